//! Radial reduction: for v = v(ρ) in ambient dimension n the Hessian has
//! eigenvalues v″ (multiplicity 1) and v′/ρ (multiplicity n − 1), so
//! M±(D²v) = w(v″) + (n−1)·w(v′/ρ) with the signed weight map w of the
//! operator.  The 1D driver handles the extra first-order term; the radial
//! grid must stay away from ρ = 0.

use crate::grid::Grid1D;
use crate::scalar::{to_f64, Real};

use super::one_dim::RadialTerm;
use super::{solve_one_dim_with_radial, PdeCoeffs, Problem1, SolveError, SolveReport, SolverParams};

/// Annulus Dirichlet problem for a radial function in dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProblem<F> {
    pub coeffs: PdeCoeffs<F>,
    pub dim: usize,
    pub grid: Grid1D<F>,
    pub f: Vec<F>,
    pub bc: (F, F),
}

impl<F: Real> RadialProblem<F> {
    pub fn new(
        coeffs: PdeCoeffs<F>,
        dim: usize,
        grid: Grid1D<F>,
        f: Vec<F>,
        bc: (F, F),
    ) -> Result<Self, SolveError> {
        if dim == 0 {
            return Err(SolveError::BadRadialDim { dim });
        }
        if !(grid.a() > F::zero()) {
            return Err(SolveError::NonPositiveRadius { r: to_f64(grid.a()) });
        }
        // Reuse the 1D validation for shapes and finiteness.
        let _ = Problem1::new(coeffs, grid, f.clone(), bc)?;
        Ok(Self { coeffs, dim, grid, f, bc })
    }

    pub fn homogeneous(coeffs: PdeCoeffs<F>, dim: usize, grid: Grid1D<F>, bc: (F, F)) -> Result<Self, SolveError> {
        Self::new(coeffs, dim, grid, vec![F::zero(); grid.n()], bc)
    }
}

/// Solves the radial Dirichlet problem on its annulus.
pub fn solve_radial<F: Real>(problem: &RadialProblem<F>, params: &SolverParams<F>) -> Result<SolveReport<F>, SolveError> {
    let inner = Problem1::new(problem.coeffs, problem.grid, problem.f.clone(), problem.bc)?;
    let radial = RadialTerm {
        multiplicity: F::from_usize(problem.dim - 1).expect("dimension fits the scalar"),
        rho: problem.grid.nodes(),
    };
    solve_one_dim_with_radial(&inner, Some(radial), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::HamiltonianSign;
    use crate::pucci::{Ellipticity, OperatorKind};
    use crate::solver::SolveMethod;

    fn ell(lambda: f64, big_lambda: f64) -> Ellipticity<f64> {
        Ellipticity::new(lambda, big_lambda).unwrap()
    }

    fn radial_error(n: usize, dim: usize, exact: impl Fn(f64) -> f64, ham: f64) -> f64 {
        let grid = Grid1D::new(1.0, 2.0, n).unwrap();
        let coeffs = PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 1.0), 2.0, HamiltonianSign::Plus)
            .unwrap()
            .with_ham_coeff(ham)
            .unwrap();
        let problem = RadialProblem::homogeneous(coeffs, dim, grid, (exact(1.0), exact(2.0))).unwrap();
        let report = solve_radial(&problem, &SolverParams::default().with_tol(1e-11)).unwrap();
        assert!(report.converged, "n={n}: residual {}", report.residual_inf);
        let values = report.solution.values();
        let mut err = 0.0f64;
        for i in 1..n - 1 {
            err = err.max((values[i] - exact(grid.node(i))).abs());
        }
        err
    }

    #[test]
    fn linear_radial_laplacian_in_3d() {
        // λ = Λ = 1, no gradient term: Δv = v″ + 2v′/ρ = 0 on [1,2] has the
        // fundamental solution v = 2/ρ − 1 with v(1) = 1, v(2) = 0.
        let exact = |r: f64| 2.0 / r - 1.0;
        let coarse = radial_error(101, 3, exact, 0.0);
        let fine = radial_error(201, 3, exact, 0.0);
        assert!(coarse < 2e-2, "coarse error {coarse}");
        // The forward-differenced first-order term is O(h).
        let order = (coarse / fine).log2();
        assert!(order > 0.7, "observed order {order} (errors {coarse} / {fine})");
    }

    #[test]
    fn hopf_cole_oracle_in_2d() {
        // p = 2, λ = Λ = 1, n = 2: −Δv + |v′|² = 0 transforms by w = e^{−v}
        // into Δw = 0, whose radial solutions are w = c₁ + c₂·ln ρ.  The
        // boundary data below gives an exact reference entirely outside the
        // discrete path.
        let (va, vb) = (1.0, 0.3);
        let c1 = (-va as f64).exp();
        let c2 = ((-vb as f64).exp() - c1) / 2.0f64.ln();
        let exact = move |r: f64| -(c1 + c2 * r.ln()).ln();
        let coarse = radial_error(101, 2, exact, 1.0);
        let fine = radial_error(201, 2, exact, 1.0);
        assert!(coarse < 2e-2, "coarse error {coarse}");
        let order = (coarse / fine).log2();
        assert!(order > 0.7, "observed order {order} (errors {coarse} / {fine})");
    }

    #[test]
    fn rejects_degenerate_geometry() {
        let coeffs = PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 1.0), 2.0, HamiltonianSign::Plus)
            .unwrap();
        let bad_radius = Grid1D::new(0.0, 1.0, 11).unwrap();
        assert!(matches!(
            RadialProblem::homogeneous(coeffs, 2, bad_radius, (0.0, 0.0)),
            Err(SolveError::NonPositiveRadius { .. })
        ));
        let grid = Grid1D::new(1.0, 2.0, 11).unwrap();
        assert!(matches!(
            RadialProblem::homogeneous(coeffs, 0, grid, (0.0, 0.0)),
            Err(SolveError::BadRadialDim { .. })
        ));
    }

    #[test]
    fn constant_boundary_data_stays_constant() {
        // The curvature term v′/ρ vanishes on constants, so v ≡ M solves the
        // homogeneous annulus problem exactly and the baseline stops at once.
        let coeffs = PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 3.0), 3.0, HamiltonianSign::Minus)
            .unwrap();
        let grid = Grid1D::new(2.0, 5.0, 61).unwrap();
        let problem = RadialProblem::homogeneous(coeffs, 3, grid, (1.25, 1.25)).unwrap();
        let params = SolverParams::default().with_method(SolveMethod::PseudoTime);
        let report = solve_radial(&problem, &params).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 1);
        for v in report.solution.values() {
            assert_eq!(*v, 1.25);
        }
    }

    #[test]
    fn curvature_influence_fades_on_distant_annuli() {
        // On a fixed-width window [R, R + 1] the multiplicity term scales like
        // v′/R, so the radial solution approaches the plain 1D one as R grows.
        let coeffs = PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 2.0), 3.0, HamiltonianSign::Minus)
            .unwrap();
        let params = SolverParams::default();
        let n = 101;
        let bc = (1.0, 0.3);
        let flat_grid = Grid1D::new(0.0, 1.0, n).unwrap();
        let flat = Problem1::homogeneous(coeffs, flat_grid, bc).unwrap();
        let flat_report = crate::solver::solve_1d(&flat, &params).unwrap();
        let mut gaps = Vec::new();
        for radius in [10.0, 40.0, 160.0] {
            let grid = Grid1D::new(radius, radius + 1.0, n).unwrap();
            let problem = RadialProblem::homogeneous(coeffs, 3, grid, bc).unwrap();
            let report = solve_radial(&problem, &params).unwrap();
            let gap = report
                .solution
                .values()
                .iter()
                .zip(flat_report.solution.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            gaps.push(gap);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "gaps {gaps:?}");
        assert!(gaps[2] < 1e-2, "far-field gap {}", gaps[2]);
    }

    #[test]
    fn dimension_one_reduces_to_plain_1d() {
        let coeffs = PdeCoeffs::new(OperatorKind::Minus, ell(0.5, 2.0), 3.0, HamiltonianSign::Minus)
            .unwrap();
        let grid = Grid1D::new(1.0, 2.0, 41).unwrap();
        let radial = RadialProblem::homogeneous(coeffs, 1, grid, (0.0, 1.0)).unwrap();
        let plain = Problem1::homogeneous(coeffs, grid, (0.0, 1.0)).unwrap();
        let params = SolverParams::default().with_method(SolveMethod::Sweep);
        let a = solve_radial(&radial, &params).unwrap();
        let b = crate::solver::solve_1d(&plain, &params).unwrap();
        for (x, y) in a.solution.values().iter().zip(b.solution.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
