//! Uniform 1D and 2D grids and scalar fields sampled on them.
//!
//! Node layout is lexicographic: in 2D the node (i, j) sits at
//! (x0 + i·hx, y0 + j·hy) and has flat index j·nx + i.  All solvers and
//! experiments rely on this fixed ordering for reproducibility.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{to_f64, Real};

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid needs at least 3 nodes per axis, got {n}")]
    TooFewNodes { n: usize },
    #[error("grid bounds must be finite with lo < hi, got [{lo}, {hi}]")]
    BadBounds { lo: f64, hi: f64 },
    #[error("field has {got} values, grid has {expected} nodes")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("node index out of range")]
    OutOfRange,
}

/// Uniform grid on [a, b] with n nodes (n − 1 cells).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D<F> {
    a: F,
    b: F,
    n: usize,
}

impl<F: Real> Grid1D<F> {
    pub fn new(a: F, b: F, n: usize) -> Result<Self, GridError> {
        if n < 3 {
            return Err(GridError::TooFewNodes { n });
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(GridError::BadBounds { lo: to_f64(a), hi: to_f64(b) });
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> F {
        self.a
    }

    pub fn b(&self) -> F {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> F {
        (self.b - self.a) / F::from_usize(self.n - 1).expect("node count fits the scalar")
    }

    pub fn node(&self, i: usize) -> F {
        // The last node is pinned to b so accumulated rounding cannot move it.
        if i == self.n - 1 {
            self.b
        } else {
            self.a + F::from_usize(i).expect("index fits the scalar") * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<F> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        i == 0 || i == self.n - 1
    }

    /// Distance from node i to the nearest endpoint.
    pub fn boundary_distance(&self, i: usize) -> F {
        let x = self.node(i);
        (x - self.a).min(self.b - x)
    }
}

/// Uniform tensor grid on [x0, x1] × [y0, y1] with nx × ny nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D<F> {
    x0: F,
    x1: F,
    y0: F,
    y1: F,
    nx: usize,
    ny: usize,
}

impl<F: Real> Grid2D<F> {
    pub fn new(x0: F, x1: F, y0: F, y1: F, nx: usize, ny: usize) -> Result<Self, GridError> {
        if nx < 3 {
            return Err(GridError::TooFewNodes { n: nx });
        }
        if ny < 3 {
            return Err(GridError::TooFewNodes { n: ny });
        }
        if !(x0 < x1) || !x0.is_finite() || !x1.is_finite() {
            return Err(GridError::BadBounds { lo: to_f64(x0), hi: to_f64(x1) });
        }
        if !(y0 < y1) || !y0.is_finite() || !y1.is_finite() {
            return Err(GridError::BadBounds { lo: to_f64(y0), hi: to_f64(y1) });
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    pub fn bounds_x(&self) -> (F, F) {
        (self.x0, self.x1)
    }

    pub fn bounds_y(&self) -> (F, F) {
        (self.y0, self.y1)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> F {
        (self.x1 - self.x0) / F::from_usize(self.nx - 1).expect("node count fits the scalar")
    }

    pub fn hy(&self) -> F {
        (self.y1 - self.y0) / F::from_usize(self.ny - 1).expect("node count fits the scalar")
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn node(&self, i: usize, j: usize) -> (F, F) {
        let x = if i == self.nx - 1 {
            self.x1
        } else {
            self.x0 + F::from_usize(i).expect("index fits the scalar") * self.hx()
        };
        let y = if j == self.ny - 1 {
            self.y1
        } else {
            self.y0 + F::from_usize(j).expect("index fits the scalar") * self.hy()
        };
        (x, y)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    /// Distance from node (i, j) to the nearest side of the rectangle.
    pub fn boundary_distance(&self, i: usize, j: usize) -> F {
        let (x, y) = self.node(i, j);
        (x - self.x0).min(self.x1 - x).min(y - self.y0).min(self.y1 - y)
    }
}

/// Scalar field on a 1D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1<F> {
    pub grid: Grid1D<F>,
    pub values: Vec<F>,
}

impl<F: Real> Field1<F> {
    pub fn new(grid: Grid1D<F>, values: Vec<F>) -> Result<Self, GridError> {
        if values.len() != grid.n() {
            return Err(GridError::ShapeMismatch { expected: grid.n(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn sample(grid: Grid1D<F>, f: impl Fn(F) -> F) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid1D<F>, value: F) -> Self {
        Self { grid, values: vec![value; grid.n()] }
    }
}

/// Scalar field on a 2D grid (lexicographic storage).
#[derive(Debug, Clone, PartialEq)]
pub struct Field2<F> {
    pub grid: Grid2D<F>,
    pub values: Vec<F>,
}

impl<F: Real> Field2<F> {
    pub fn new(grid: Grid2D<F>, values: Vec<F>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::ShapeMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn sample(grid: Grid2D<F>, f: impl Fn(F, F) -> F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = grid.node(i, j);
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    pub fn constant(grid: Grid2D<F>, value: F) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.values[self.grid.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }
}

/// A field on either grid dimension, as carried by solve reports.
#[derive(Debug, Clone, PartialEq)]
pub enum GridField<F> {
    One(Field1<F>),
    Two(Field2<F>),
}

impl<F: Real> GridField<F> {
    pub fn values(&self) -> &[F] {
        match self {
            GridField::One(f) => &f.values,
            GridField::Two(f) => &f.values,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GridField::One(_) => 1,
            GridField::Two(_) => 2,
        }
    }

    pub fn as_one(&self) -> Option<&Field1<F>> {
        match self {
            GridField::One(f) => Some(f),
            GridField::Two(_) => None,
        }
    }

    pub fn as_two(&self) -> Option<&Field2<F>> {
        match self {
            GridField::Two(f) => Some(f),
            GridField::One(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid1d_spacing_and_endpoints() {
        let g = Grid1D::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(4), 1.0);
        assert!(g.is_boundary(0) && g.is_boundary(4) && !g.is_boundary(2));
        assert_eq!(g.boundary_distance(1), 0.25);
    }

    #[test]
    fn grid1d_rejects_degenerate() {
        assert!(matches!(Grid1D::new(0.0, 1.0, 2), Err(GridError::TooFewNodes { .. })));
        assert!(matches!(Grid1D::new(1.0, 0.0, 5), Err(GridError::BadBounds { .. })));
    }

    #[test]
    fn grid2d_indexing_is_lexicographic() {
        let g = Grid2D::new(0.0, 2.0, 0.0, 1.0, 5, 3).unwrap();
        assert_eq!(g.idx(0, 0), 0);
        assert_eq!(g.idx(4, 0), 4);
        assert_eq!(g.idx(0, 1), 5);
        assert_eq!(g.node(4, 2), (2.0, 1.0));
        assert_eq!(g.hx(), 0.5);
        assert_eq!(g.hy(), 0.5);
        assert!(g.is_boundary(0, 1) && g.is_boundary(3, 2) && !g.is_boundary(2, 1));
    }

    #[test]
    fn boundary_distance_is_min_over_sides() {
        let g = Grid2D::new(0.0, 4.0, 0.0, 2.0, 9, 5).unwrap();
        assert_eq!(g.boundary_distance(1, 2), 0.5);
        assert_eq!(g.boundary_distance(4, 1), 0.5);
    }

    #[test]
    fn field_shape_is_validated() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        assert!(Field1::new(g, vec![0.0; 3]).is_err());
        let f = Field1::sample(g, |x| x * x);
        assert_eq!(f.values[3], 1.0);
    }

    #[test]
    fn field2_accessors() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 3, 3).unwrap();
        let mut f = Field2::sample(g, |x, y| x + 10.0 * y);
        assert_eq!(f.get(2, 1), 1.0 + 10.0 * 0.5);
        f.set(1, 1, -3.0);
        assert_eq!(f.get(1, 1), -3.0);
    }
}
