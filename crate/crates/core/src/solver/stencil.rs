//! Wide-stencil discretization of M± in 2D and Godunov gradient norms.
//!
//! The operator value at an interior node is
//!
//!   M⁺_h u = max over direction pairs {θ₁, θ₂} of Σ_k [Λ(Δ_{θ_k}u)⁺ − λ(Δ_{θ_k}u)⁻],
//!   M⁻_h u = min over direction pairs {θ₁, θ₂} of Σ_k [λ(Δ_{θ_k}u)⁺ − Λ(Δ_{θ_k}u)⁻],
//!
//! where Δ_θ is the centered second difference along the lattice direction θ
//! and each pair is orthogonal in index space.  The coefficient swap in the
//! minus branch is what makes the min over frames consistent with M⁻ (both
//! branches reduce to the eigenvalue form when the principal axes of D²u lie
//! in the direction set).  On anisotropic grids (hx ≠ hy) only the axis pair
//! is physically orthogonal, so consistency of the non-axis pairs assumes
//! square spacing; monotonicity holds regardless.
//!
//! Arms that would leave the grid are clipped to the boundary: the arm is
//! shortened to the exact boundary intersection, the boundary value is
//! interpolated linearly along the face between adjacent boundary nodes, and
//! the second difference uses the unequal-arm weights
//! Δ = 2[(u₊−u_c)/L₊ + (u₋−u_c)/L₋]/(L₊+L₋).  All interpolation weights are
//! nonnegative, so clipping preserves degenerate ellipticity.

use serde::{Deserialize, Serialize};

use crate::grid::{Field1, Field2, Grid2D};
use crate::profiles::HamiltonianSign;
use crate::pucci::{Ellipticity, OperatorKind};
use crate::scalar::{real, to_f64, Real};

use super::{PdeCoeffs, SolveError};

/// Two lattice directions, orthogonal in index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionPair {
    pub d1: (i32, i32),
    pub d2: (i32, i32),
}

/// Direction set of the wide-stencil operator plus the near-boundary
/// clipping policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stencil2D {
    pub pairs: Vec<DirectionPair>,
    pub clip: bool,
}

impl Stencil2D {
    /// Axis pair only: exact on axis-aligned Hessians for any spacing.
    pub fn axis_only() -> Self {
        Self { pairs: vec![DirectionPair { d1: (1, 0), d2: (0, 1) }], clip: true }
    }

    /// Default direction set: axis pair and the two diagonals.
    pub fn standard() -> Self {
        Self {
            pairs: vec![
                DirectionPair { d1: (1, 0), d2: (0, 1) },
                DirectionPair { d1: (1, 1), d2: (1, -1) },
            ],
            clip: true,
        }
    }

    /// All frames spanned by coprime lattice directions (a, b) with
    /// max(|a|, |b|) ≤ `radius`, ordered by angle; `radius = 1` recovers
    /// [`Stencil2D::standard`].  Wider sets refine the directional
    /// resolution of the extremum at the cost of wider clipping zones.
    pub fn lattice_frames(radius: i32) -> Self {
        let mut canonical: Vec<(i32, i32)> = Vec::new();
        for a in 1..=radius {
            for b in 0..=radius {
                if gcd(a, b) == 1 {
                    canonical.push((a, b));
                }
            }
        }
        canonical.sort_by(|u, v| {
            let au = (u.1 as f64).atan2(u.0 as f64);
            let av = (v.1 as f64).atan2(v.0 as f64);
            au.partial_cmp(&av).expect("angles are finite")
        });
        let pairs = canonical
            .into_iter()
            .map(|(a, b)| {
                // Orthogonal complement with nonnegative first component.
                let d2 = if b > 0 { (b, -a) } else { (-b, a) };
                DirectionPair { d1: (a, b), d2 }
            })
            .collect();
        Self { pairs, clip: true }
    }

    pub fn with_clip(mut self, clip: bool) -> Self {
        self.clip = clip;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.pairs.is_empty() {
            return Err(SolveError::EmptyStencil);
        }
        for pair in &self.pairs {
            let (a, b) = pair.d1;
            let (c, d) = pair.d2;
            if (a == 0 && b == 0) || (c == 0 && d == 0) {
                return Err(SolveError::ZeroDirection);
            }
            if a * c + b * d != 0 {
                return Err(SolveError::NonOrthogonalPair { d1: pair.d1, d2: pair.d2 });
            }
        }
        Ok(())
    }
}

fn gcd(a: i32, b: i32) -> i32 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One arm of a directional stencil: the sampled value and the geometric
/// arm length.
struct Arm<F> {
    value: F,
    length: F,
}

/// Samples the arm from interior node (i, j) along lattice direction `dir`,
/// clipping to the boundary when the full arm leaves the grid.
fn sample_arm<F: Real>(
    grid: &Grid2D<F>,
    values: &[F],
    i: usize,
    j: usize,
    dir: (i32, i32),
    clip: bool,
) -> Result<Arm<F>, SolveError> {
    let (a, b) = dir;
    let (nx, ny) = (grid.nx() as i64, grid.ny() as i64);
    let (ti, tj) = (i as i64 + a as i64, j as i64 + b as i64);
    let hx = grid.hx();
    let hy = grid.hy();
    let full = ((real::<F>(a as f64) * hx).powi(2) + (real::<F>(b as f64) * hy).powi(2)).sqrt();
    if ti >= 0 && ti < nx && tj >= 0 && tj < ny {
        return Ok(Arm { value: values[grid.idx(ti as usize, tj as usize)], length: full });
    }
    if !clip {
        return Err(SolveError::StencilOutOfRange { i, j, dir });
    }
    // Exit time t ∈ (0, 1) along (i, j) + t·(a, b) in index space.
    let mut t = f64::INFINITY;
    if a > 0 {
        t = t.min((nx as f64 - 1.0 - i as f64) / a as f64);
    } else if a < 0 {
        t = t.min(i as f64 / (-a) as f64);
    }
    if b > 0 {
        t = t.min((ny as f64 - 1.0 - j as f64) / b as f64);
    } else if b < 0 {
        t = t.min(j as f64 / (-b) as f64);
    }
    debug_assert!(t > 0.0 && t < 1.0);
    let fi = i as f64 + t * a as f64;
    let fj = j as f64 + t * b as f64;
    // The exit point is on a face; interpolate along that face between the
    // two adjacent boundary nodes (weights in [0, 1]).
    let on_vertical_face = fi.abs() < 1e-9 || (fi - (nx as f64 - 1.0)).abs() < 1e-9;
    let value = if on_vertical_face {
        let ib = if fi < 0.5 { 0 } else { grid.nx() - 1 };
        let k = (fj.floor() as usize).min(grid.ny() - 2);
        let theta = real::<F>((fj - k as f64).clamp(0.0, 1.0));
        (F::one() - theta) * values[grid.idx(ib, k)] + theta * values[grid.idx(ib, k + 1)]
    } else {
        let jb = if fj < 0.5 { 0 } else { grid.ny() - 1 };
        let k = (fi.floor() as usize).min(grid.nx() - 2);
        let theta = real::<F>((fi - k as f64).clamp(0.0, 1.0));
        (F::one() - theta) * values[grid.idx(k, jb)] + theta * values[grid.idx(k + 1, jb)]
    };
    Ok(Arm { value, length: real::<F>(t) * full })
}

/// Centered (possibly unequal-arm) second difference along `dir`.
fn second_difference<F: Real>(
    grid: &Grid2D<F>,
    values: &[F],
    i: usize,
    j: usize,
    dir: (i32, i32),
    clip: bool,
) -> Result<F, SolveError> {
    let plus = sample_arm(grid, values, i, j, dir, clip)?;
    let minus = sample_arm(grid, values, i, j, (-dir.0, -dir.1), clip)?;
    let uc = values[grid.idx(i, j)];
    let two = real::<F>(2.0);
    Ok(two * ((plus.value - uc) / plus.length + (minus.value - uc) / minus.length) / (plus.length + minus.length))
}

pub(crate) fn pucci_2d_on_values<F: Real>(
    kind: OperatorKind,
    ell: &Ellipticity<F>,
    grid: &Grid2D<F>,
    values: &[F],
    i: usize,
    j: usize,
    stencil: &Stencil2D,
) -> Result<F, SolveError> {
    if grid.is_boundary(i, j) {
        return Err(SolveError::BoundaryNode { i, j });
    }
    let weighted = |t: F| -> F {
        let (w_pos, w_neg) = match kind {
            OperatorKind::Plus => (ell.big_lambda, ell.lambda),
            OperatorKind::Minus => (ell.lambda, ell.big_lambda),
        };
        if t > F::zero() {
            w_pos * t
        } else {
            w_neg * t
        }
    };
    let mut best: Option<F> = None;
    for pair in &stencil.pairs {
        let v1 = second_difference(grid, values, i, j, pair.d1, stencil.clip)?;
        let v2 = second_difference(grid, values, i, j, pair.d2, stencil.clip)?;
        let value = weighted(v1) + weighted(v2);
        best = Some(match (best, kind) {
            (None, _) => value,
            (Some(b), OperatorKind::Plus) => b.max(value),
            (Some(b), OperatorKind::Minus) => b.min(value),
        });
    }
    best.ok_or(SolveError::EmptyStencil)
}

/// Wide-stencil evaluation of M±_h at an interior node of a sampled field.
pub fn discrete_pucci_2d<F: Real>(
    kind: OperatorKind,
    ell: &Ellipticity<F>,
    field: &Field2<F>,
    node: (usize, usize),
    stencil: &Stencil2D,
) -> Result<F, SolveError> {
    stencil.validate()?;
    pucci_2d_on_values(kind, ell, &field.grid, &field.values, node.0, node.1, stencil)
}

/// Upwind (Godunov) value q ≥ 0 approximating |u′| along one axis from the
/// three values (u_minus, u_center, u_plus) with spacing h.  For s = +1 the
/// scheme takes differences pointing away from the center; for s = −1 the
/// reflected form (differences pointing toward the center) keeps
/// F = −M± + s·|Du|^p − f degenerate elliptic.
#[inline]
pub(crate) fn upwind_component<F: Real>(u_minus: F, u_center: F, u_plus: F, h: F, sign: HamiltonianSign) -> F {
    match sign {
        HamiltonianSign::Plus => ((u_center - u_minus) / h).max((u_center - u_plus) / h).max(F::zero()),
        HamiltonianSign::Minus => ((u_plus - u_center) / h).max((u_minus - u_center) / h).max(F::zero()),
    }
}

/// Godunov discretization of |Du|^p at an interior node of a 1D field.
pub fn discrete_gradient_norm_p_1d<F: Real>(
    field: &Field1<F>,
    i: usize,
    p: F,
    sign: HamiltonianSign,
) -> Result<F, SolveError> {
    if !(p > F::one()) || !p.is_finite() {
        return Err(SolveError::BadExponent { p: to_f64(p) });
    }
    if field.grid.is_boundary(i) {
        return Err(SolveError::BoundaryNode { i, j: 0 });
    }
    let h = field.grid.h();
    let q = upwind_component(field.values[i - 1], field.values[i], field.values[i + 1], h, sign);
    Ok(q.powf(p))
}

pub(crate) fn gradient_norm_2d_on_values<F: Real>(
    grid: &Grid2D<F>,
    values: &[F],
    i: usize,
    j: usize,
    p: F,
    sign: HamiltonianSign,
) -> F {
    let qx = upwind_component(
        values[grid.idx(i - 1, j)],
        values[grid.idx(i, j)],
        values[grid.idx(i + 1, j)],
        grid.hx(),
        sign,
    );
    let qy = upwind_component(
        values[grid.idx(i, j - 1)],
        values[grid.idx(i, j)],
        values[grid.idx(i, j + 1)],
        grid.hy(),
        sign,
    );
    (qx * qx + qy * qy).powf(p / real(2.0))
}

/// Godunov discretization of |Du|^p at an interior node of a 2D field.
pub fn discrete_gradient_norm_p_2d<F: Real>(
    field: &Field2<F>,
    node: (usize, usize),
    p: F,
    sign: HamiltonianSign,
) -> Result<F, SolveError> {
    if !(p > F::one()) || !p.is_finite() {
        return Err(SolveError::BadExponent { p: to_f64(p) });
    }
    let (i, j) = node;
    if field.grid.is_boundary(i, j) {
        return Err(SolveError::BoundaryNode { i, j });
    }
    Ok(gradient_norm_2d_on_values(&field.grid, &field.values, i, j, p, sign))
}

/// Center-slope bound of the wide-stencil operator at an interior node:
/// an upper bound for ∂F_second-order/∂u_center used by the explicit step
/// size and the nodewise relaxation.
pub(crate) fn pucci_2d_center_bound<F: Real>(
    coeffs: &PdeCoeffs<F>,
    grid: &Grid2D<F>,
    i: usize,
    j: usize,
    stencil: &Stencil2D,
) -> F {
    let w_max = coeffs.ell.big_lambda;
    let mut bound = F::zero();
    for pair in &stencil.pairs {
        let mut pair_bound = F::zero();
        for dir in [pair.d1, pair.d2] {
            let inv = inverse_arm_product(grid, i, j, dir);
            pair_bound = pair_bound + real::<F>(2.0) * w_max * inv;
        }
        bound = bound.max(pair_bound);
    }
    bound
}

/// 1/(L₊·L₋) for the (possibly clipped) arms along `dir`.
fn inverse_arm_product<F: Real>(grid: &Grid2D<F>, i: usize, j: usize, dir: (i32, i32)) -> F {
    let length = |d: (i32, i32)| -> F {
        let full = ((real::<F>(d.0 as f64) * grid.hx()).powi(2) + (real::<F>(d.1 as f64) * grid.hy()).powi(2)).sqrt();
        let (nx, ny) = (grid.nx() as f64 - 1.0, grid.ny() as f64 - 1.0);
        let mut t: f64 = 1.0;
        if d.0 > 0 {
            t = t.min((nx - i as f64) / d.0 as f64);
        } else if d.0 < 0 {
            t = t.min(i as f64 / (-d.0) as f64);
        }
        if d.1 > 0 {
            t = t.min((ny - j as f64) / d.1 as f64);
        } else if d.1 < 0 {
            t = t.min(j as f64 / (-d.1) as f64);
        }
        real::<F>(t) * full
    };
    F::one() / (length(dir) * length((-dir.0, -dir.1)))
}
