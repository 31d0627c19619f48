//! Grid-refinement studies: solve the same Dirichlet problem on a family of
//! 1D grids and measure max-norm errors against a trusted reference,
//! reporting observed convergence orders between consecutive grids.

use serde::Serialize;

use crate::grid::Grid1D;
use crate::profiles::{Profile, ProfileError};
use crate::pucci::{Ellipticity, OperatorKind};
use crate::scalar::{real, to_f64, Real};

use super::{solve_1d, PdeCoeffs, Problem1, SolveError, SolverParams};

/// A named problem family parameterized by grid size, with an exact
/// reference solution.
pub struct StudyCase<F> {
    pub name: String,
    build: Box<dyn Fn(usize) -> Result<Problem1<F>, SolveError>>,
    exact: Box<dyn Fn(F) -> F>,
}

impl<F: Real> StudyCase<F> {
    /// Dirichlet restriction of a one-variable profile to `interval`; the
    /// coefficients and sign convention come from the profile itself.
    pub fn profile(profile: Profile<F>, interval: (F, F)) -> Result<Self, ProfileError> {
        let (a, b) = interval;
        // Both endpoint evaluations must be defined (and, transitively, the
        // whole interval: profiles are smooth away from their left edge).
        let left = profile.eval(a)?.0;
        let right = profile.eval(b)?.0;
        let coeffs = PdeCoeffs::new(profile.kind(), profile.ellipticity(), profile.p(), profile.natural_sign())
            .expect("profile exponents satisfy p > 1");
        let name = format!("profile-{}", profile.family());
        let reference = profile.clone();
        let build = move |n: usize| -> Result<Problem1<F>, SolveError> {
            let grid = Grid1D::new(a, b, n)?;
            Problem1::homogeneous(coeffs, grid, (left, right))
        };
        let exact = move |y: F| reference.value(y).expect("interval checked at construction");
        Ok(Self { name, build: Box::new(build), exact: Box::new(exact) })
    }

    /// Manufactured linear problem −M±(u″) = f with u = sin(π(x−a)/(b−a)).
    /// The exact solution is concave, so only the negative branch of the
    /// signed weight is active and f is a smooth single-branch source.
    pub fn linear_sine(kind: OperatorKind, ell: Ellipticity<F>, interval: (F, F)) -> Self {
        let (a, b) = interval;
        let length = b - a;
        let pi = real::<F>(std::f64::consts::PI);
        let weight = match kind {
            OperatorKind::Plus => ell.lambda,
            OperatorKind::Minus => ell.big_lambda,
        };
        let coeffs = PdeCoeffs::new(kind, ell, real(2.0), crate::profiles::HamiltonianSign::Plus)
            .expect("p = 2 is valid")
            .with_ham_coeff(F::zero())
            .expect("a = 0 is valid");
        let exact = move |x: F| (pi * (x - a) / length).sin();
        let build = move |n: usize| -> Result<Problem1<F>, SolveError> {
            let grid = Grid1D::new(a, b, n)?;
            let f: Vec<F> = (0..n)
                .map(|i| weight * (pi / length).powi(2) * exact(grid.node(i)))
                .collect();
            Problem1::new(coeffs, grid, f, (F::zero(), F::zero()))
        };
        Self { name: "linear-sine".to_string(), build: Box::new(build), exact: Box::new(exact) }
    }

    pub fn build_problem(&self, n: usize) -> Result<Problem1<F>, SolveError> {
        (self.build)(n)
    }

    pub fn exact_value(&self, x: F) -> F {
        (self.exact)(x)
    }
}

/// Errors and observed orders of a refinement sequence.  `orders[k]` is the
/// slope between grids k and k+1: ln(e_k/e_{k+1}) / ln(h_k/h_{k+1}).
#[derive(Debug, Clone, Serialize)]
pub struct StudyReport<F> {
    pub name: String,
    pub ns: Vec<usize>,
    pub hs: Vec<F>,
    pub errors: Vec<F>,
    pub orders: Vec<F>,
}

impl<F: Real> StudyReport<F> {
    /// Order observed on the finest grid pair.
    pub fn final_order(&self) -> Option<F> {
        self.orders.last().copied()
    }
}

/// Runs the case over every grid size in `ns`; any grid that fails to
/// converge aborts the study.
pub fn convergence_study<F: Real>(
    case: &StudyCase<F>,
    ns: &[usize],
    params: &SolverParams<F>,
) -> Result<StudyReport<F>, SolveError> {
    let mut hs = Vec::with_capacity(ns.len());
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let problem = case.build_problem(n)?;
        let report = solve_1d(&problem, params)?;
        if !report.converged {
            return Err(SolveError::StudyGridFailed { n, residual: to_f64(report.residual_inf) });
        }
        let values = report.solution.values();
        let mut err = F::zero();
        for i in 1..n - 1 {
            err = err.max((values[i] - case.exact_value(problem.grid.node(i))).abs());
        }
        hs.push(problem.grid.h());
        errors.push(err);
    }
    let floor = F::min_positive_value();
    let orders = (0..ns.len().saturating_sub(1))
        .map(|k| {
            let ratio = (errors[k].max(floor) / errors[k + 1].max(floor)).ln();
            ratio / (hs[k] / hs[k + 1]).ln()
        })
        .collect();
    Ok(StudyReport { name: case.name.clone(), ns: ns.to_vec(), hs, errors, orders })
}
