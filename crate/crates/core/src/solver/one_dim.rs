//! One-dimensional driver: pseudo-time baseline, nodewise sweeps, and
//! semismooth Newton with a tridiagonal active-branch Jacobian.
//!
//! The same operator evaluation also covers the radial reduction: for a
//! radial function in ambient dimension n the Hessian eigenvalues are v″
//! (once) and v′/ρ (n−1 times), so the scheme adds (n−1)·w(v′_h/ρ) to the
//! second-order part, with v′_h the forward difference — the upwind choice
//! that keeps the scheme degenerate elliptic since w is nondecreasing.

use crate::grid::{Field1, GridField};
use crate::profiles::HamiltonianSign;
use crate::scalar::{real, Real};

use super::stencil::upwind_component;
use super::{check_finite, PdeCoeffs, Problem1, ResidualTrace, SolveError, SolveMethod, SolveReport, SolverParams};

pub(crate) struct RadialTerm<F> {
    pub multiplicity: F,
    pub rho: Vec<F>,
}

struct Scheme1D<'a, F> {
    coeffs: &'a PdeCoeffs<F>,
    h: F,
    f: &'a [F],
    radial: Option<RadialTerm<F>>,
}

impl<'a, F: Real> Scheme1D<'a, F> {
    /// F_h[u] at interior node i.
    fn value(&self, u: &[F], i: usize) -> F {
        let h = self.h;
        let second = (u[i + 1] - real::<F>(2.0) * u[i] + u[i - 1]) / (h * h);
        let mut operator = self.coeffs.weighted(second);
        if let Some(radial) = &self.radial {
            let slope = (u[i + 1] - u[i]) / h;
            operator = operator + radial.multiplicity * self.coeffs.weighted(slope / radial.rho[i]);
        }
        let q = upwind_component(u[i - 1], u[i], u[i + 1], h, self.coeffs.sign);
        let ham = self.coeffs.ham_coeff * q.powf(self.coeffs.p);
        -operator + self.coeffs.sign.factor::<F>() * ham - self.f[i]
    }

    /// Upper bound for ∂F_h/∂u_i at node i (state-dependent through the
    /// gradient magnitude), used as explicit step bound and local slope.
    fn center_bound(&self, u: &[F], i: usize) -> F {
        let h = self.h;
        let w_max = self.coeffs.ell.big_lambda;
        let mut bound = real::<F>(2.0) * w_max / (h * h);
        if let Some(radial) = &self.radial {
            bound = bound + radial.multiplicity * w_max / (radial.rho[i] * h);
        }
        let q = upwind_component(u[i - 1], u[i], u[i + 1], h, self.coeffs.sign);
        bound + self.coeffs.ham_coeff * self.coeffs.p * q.powf(self.coeffs.p - F::one()) / h
    }

    /// Active-branch generalized Jacobian row (∂F/∂u_{i−1}, ∂F/∂u_i,
    /// ∂F/∂u_{i+1}).
    fn jacobian_row(&self, u: &[F], i: usize) -> (F, F, F) {
        let h = self.h;
        let h2 = h * h;
        let second = (u[i + 1] - real::<F>(2.0) * u[i] + u[i - 1]) / h2;
        let w = self.coeffs.weighted_slope(second);
        let mut lo = -w / h2;
        let mut mid = real::<F>(2.0) * w / h2;
        let mut hi = -w / h2;
        if let Some(radial) = &self.radial {
            let slope = (u[i + 1] - u[i]) / h;
            let wr = radial.multiplicity * self.coeffs.weighted_slope(slope / radial.rho[i]) / radial.rho[i];
            mid = mid + wr / h;
            hi = hi - wr / h;
        }
        let q = upwind_component(u[i - 1], u[i], u[i + 1], h, self.coeffs.sign);
        if q > F::zero() {
            let s = self.coeffs.sign.factor::<F>();
            let dq = self.coeffs.ham_coeff * self.coeffs.p * q.powf(self.coeffs.p - F::one()) / h;
            // Which one-sided difference is active (first on ties).
            match self.coeffs.sign {
                HamiltonianSign::Plus => {
                    if (u[i] - u[i - 1]) / h >= (u[i] - u[i + 1]) / h {
                        mid = mid + s * dq;
                        lo = lo - s * dq;
                    } else {
                        mid = mid + s * dq;
                        hi = hi - s * dq;
                    }
                }
                HamiltonianSign::Minus => {
                    // Reflected form: q̃ grows with the active neighbor and
                    // shrinks with the center.
                    if (u[i + 1] - u[i]) / h >= (u[i - 1] - u[i]) / h {
                        mid = mid - s * dq;
                        hi = hi + s * dq;
                    } else {
                        mid = mid - s * dq;
                        lo = lo + s * dq;
                    }
                }
            }
        }
        (lo, mid, hi)
    }

    fn residual(&self, u: &[F]) -> F {
        let mut res = F::zero();
        for i in 1..u.len() - 1 {
            res = res.max(self.value(u, i).abs());
        }
        res
    }
}

/// Pointwise scheme residual F_h[values] at the interior nodes; boundary
/// entries are zero.
pub(crate) fn residual_field<F: Real>(problem: &Problem1<F>, values: &[F]) -> Result<Vec<F>, SolveError> {
    if values.len() != problem.grid.n() {
        return Err(crate::grid::GridError::ShapeMismatch {
            expected: problem.grid.n(),
            got: values.len(),
        }
        .into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFiniteData { what: "candidate field" });
    }
    let scheme = Scheme1D { coeffs: &problem.coeffs, h: problem.grid.h(), f: &problem.f, radial: None };
    let mut out = vec![F::zero(); values.len()];
    for i in 1..values.len() - 1 {
        out[i] = scheme.value(values, i);
    }
    Ok(out)
}

pub(crate) fn solve<F: Real>(
    problem: &Problem1<F>,
    radial: Option<RadialTerm<F>>,
    params: &SolverParams<F>,
) -> Result<SolveReport<F>, SolveError> {
    params.validate()?;
    let grid = problem.grid;
    let n = grid.n();
    let scheme = Scheme1D { coeffs: &problem.coeffs, h: grid.h(), f: &problem.f, radial };
    // Initial guess: linear blend of the Dirichlet data.
    let mut u: Vec<F> = (0..n)
        .map(|i| {
            let t = (grid.node(i) - grid.a()) / (grid.b() - grid.a());
            problem.bc.0 + t * (problem.bc.1 - problem.bc.0)
        })
        .collect();
    u[0] = problem.bc.0;
    u[n - 1] = problem.bc.1;

    let method = match params.method {
        SolveMethod::Auto => SolveMethod::Newton,
        m => m,
    };
    let (iterations, residual, converged, history) = match method {
        SolveMethod::PseudoTime => pseudo_time(&scheme, &mut u, params)?,
        SolveMethod::Sweep => sweep_driver(&scheme, &mut u, params)?,
        SolveMethod::Newton => newton(&scheme, &mut u, params)?,
        SolveMethod::Auto => unreachable!("resolved above"),
    };
    Ok(SolveReport {
        solution: GridField::One(Field1 { grid, values: u }),
        iterations,
        residual_inf: residual,
        converged,
        residual_history: history,
        method,
    })
}

type DriverResult<F> = Result<(usize, F, bool, Vec<F>), SolveError>;

fn pseudo_time<F: Real>(scheme: &Scheme1D<'_, F>, u: &mut [F], params: &SolverParams<F>) -> DriverResult<F> {
    let n = u.len();
    let mut trace = ResidualTrace::new();
    let mut values = vec![F::zero(); n];
    for it in 0..params.max_iter {
        let mut res = F::zero();
        let mut bound = F::zero();
        for i in 1..n - 1 {
            values[i] = scheme.value(u, i);
            res = res.max(values[i].abs());
            bound = bound.max(scheme.center_bound(u, i));
        }
        check_finite(res, it)?;
        if res <= params.tol {
            return Ok((it, res, true, trace.finish(res)));
        }
        trace.push(res);
        let tau = if bound > F::zero() { params.cfl_safety / bound } else { F::one() };
        for i in 1..n - 1 {
            u[i] = u[i] - tau * values[i];
        }
    }
    let res = scheme.residual(u);
    Ok((params.max_iter, res, res <= params.tol, trace.finish(res)))
}

/// One relaxation pass in the given direction; returns nothing — the
/// residual is measured separately so convergence checks see a consistent
/// state.
fn sweep_pass<F: Real>(scheme: &Scheme1D<'_, F>, u: &mut [F], forward: bool, omega: F) {
    let n = u.len();
    let floor = real::<F>(1e-300);
    let mut body = |i: usize| {
        let value = scheme.value(u, i);
        let bound = scheme.center_bound(u, i).max(floor);
        u[i] = u[i] - omega * value / bound;
    };
    if forward {
        for i in 1..n - 1 {
            body(i);
        }
    } else {
        for i in (1..n - 1).rev() {
            body(i);
        }
    }
}

fn sweep_driver<F: Real>(scheme: &Scheme1D<'_, F>, u: &mut [F], params: &SolverParams<F>) -> DriverResult<F> {
    let mut trace = ResidualTrace::new();
    for it in 0..params.max_iter {
        sweep_pass(scheme, u, it % 2 == 0, params.omega);
        let res = scheme.residual(u);
        check_finite(res, it)?;
        if res <= params.tol {
            return Ok((it + 1, res, true, trace.finish(res)));
        }
        trace.push(res);
    }
    let res = scheme.residual(u);
    Ok((params.max_iter, res, res <= params.tol, trace.finish(res)))
}

/// Solves the tridiagonal system J·d = rhs in place (Thomas algorithm);
/// near-zero pivots are floored, which freezes nodes where the generalized
/// Jacobian degenerates — the line search still guards the step.
fn thomas<F: Real>(lo: &[F], mid: &mut [F], hi: &[F], rhs: &mut [F]) {
    let m = rhs.len();
    let floor = real::<F>(1e-30);
    for k in 1..m {
        let denom = if mid[k - 1].abs() > floor { mid[k - 1] } else { floor };
        let w = lo[k] / denom;
        mid[k] = mid[k] - w * hi[k - 1];
        rhs[k] = rhs[k] - w * rhs[k - 1];
    }
    let denom = if mid[m - 1].abs() > floor { mid[m - 1] } else { floor };
    rhs[m - 1] = rhs[m - 1] / denom;
    for k in (0..m - 1).rev() {
        let denom = if mid[k].abs() > floor { mid[k] } else { floor };
        rhs[k] = (rhs[k] - hi[k] * rhs[k + 1]) / denom;
    }
}

fn newton<F: Real>(scheme: &Scheme1D<'_, F>, u: &mut [F], params: &SolverParams<F>) -> DriverResult<F> {
    let n = u.len();
    let m = n - 2;
    let mut trace = ResidualTrace::new();
    let mut iterations = 0usize;

    // Warm start: a few sweeps bring the iterate into the basin where the
    // piecewise-smooth Newton map contracts.
    let res0 = scheme.residual(u);
    check_finite(res0, 0)?;
    let warmup_target = res0 * real::<F>(1e-2);
    while iterations < params.max_iter.min(200) {
        let res = scheme.residual(u);
        if res <= warmup_target.max(params.tol) {
            break;
        }
        trace.push(res);
        sweep_pass(scheme, u, iterations % 2 == 0, params.omega);
        iterations += 1;
    }

    let mut lo = vec![F::zero(); m];
    let mut mid = vec![F::zero(); m];
    let mut hi = vec![F::zero(); m];
    let mut rhs = vec![F::zero(); m];
    while iterations < params.max_iter {
        let res = scheme.residual(u);
        check_finite(res, iterations)?;
        if res <= params.tol {
            return Ok((iterations, res, true, trace.finish(res)));
        }
        trace.push(res);
        for i in 1..n - 1 {
            let (l, c, r) = scheme.jacobian_row(u, i);
            lo[i - 1] = l;
            mid[i - 1] = c;
            hi[i - 1] = r;
            rhs[i - 1] = scheme.value(u, i);
        }
        thomas(&lo, &mut mid, &hi, &mut rhs);
        let mut alpha = F::one();
        let mut accepted = false;
        let saved: Vec<F> = u.to_vec();
        while alpha >= real(1e-4) {
            for i in 1..n - 1 {
                u[i] = saved[i] - alpha * rhs[i - 1];
            }
            let res_new = scheme.residual(u);
            if res_new.is_finite() && res_new < (F::one() - real::<F>(1e-4) * alpha) * res {
                accepted = true;
                break;
            }
            alpha = alpha / real(2.0);
        }
        iterations += 1;
        if !accepted {
            // Newton direction failed: restore and relax instead.
            u.copy_from_slice(&saved);
            for _ in 0..10 {
                if iterations >= params.max_iter {
                    break;
                }
                sweep_pass(scheme, u, iterations % 2 == 0, params.omega);
                iterations += 1;
            }
        }
    }
    let res = scheme.residual(u);
    Ok((params.max_iter, res, res <= params.tol, trace.finish(res)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::profiles::{HamiltonianSign, Profile};
    use crate::pucci::{Ellipticity, OperatorKind};
    use crate::solver::{solve_1d, solve_bvp_general};

    fn ell(lambda: f64, big_lambda: f64) -> Ellipticity<f64> {
        Ellipticity::new(lambda, big_lambda).unwrap()
    }

    fn max_error_vs(values: &[f64], grid: &Grid1D<f64>, exact: impl Fn(f64) -> f64) -> f64 {
        let mut err = 0.0f64;
        for i in 1..grid.n() - 1 {
            err = err.max((values[i] - exact(grid.node(i))).abs());
        }
        err
    }

    #[test]
    fn low_p_profile_is_recovered() {
        // u(y) = 4/(y+4) solves −M⁺ + |u'|^{3/2} = 0 with Λ = 1.
        let pr = Profile::low_p(1.5, 1.0, 0.0, OperatorKind::Plus, ell(0.5, 1.0)).unwrap();
        let grid = Grid1D::new(0.0, 10.0, 201).unwrap();
        let coeffs =
            PdeCoeffs::new(OperatorKind::Plus, ell(0.5, 1.0), 1.5, HamiltonianSign::Plus).unwrap();
        let bc = (pr.value(0.0).unwrap(), pr.value(10.0).unwrap());
        let problem = Problem1::homogeneous(coeffs, grid, bc).unwrap();
        let report = solve_1d(&problem, &SolverParams::default()).unwrap();
        assert!(report.converged, "residual {}", report.residual_inf);
        let field = report.solution.as_one().unwrap();
        let err = max_error_vs(&field.values, &grid, |y| pr.value(y).unwrap());
        assert!(err < 5e-3, "max error {err}");
    }

    #[test]
    fn high_p_profile_is_recovered() {
        // Plus operator with λ = 1 on [1e-2, 1], Dirichlet from the shifted
        // family, sign −1.  The fine grid keeps the O(h)·|u″| upwind error
        // near the steep left edge below the bound.
        let pr = Profile::high_p(3.0, 0.0, OperatorKind::Plus, ell(1.0, 2.0)).unwrap();
        let grid = Grid1D::new(1e-2, 1.0, 1025).unwrap();
        let coeffs =
            PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 2.0), 3.0, HamiltonianSign::Minus).unwrap();
        let bc = (pr.value(1e-2).unwrap(), pr.value(1.0).unwrap());
        let problem = Problem1::homogeneous(coeffs, grid, bc).unwrap();
        // Residual tolerance sits above the rounding floor ~4·eps·Λ/h².
        let report = solve_1d(&problem, &SolverParams::default().with_tol(1e-8)).unwrap();
        assert!(report.converged);
        let field = report.solution.as_one().unwrap();
        let err = max_error_vs(&field.values, &grid, |y| pr.value(y).unwrap());
        assert!(err < 5e-3, "max error {err}");
    }

    #[test]
    fn all_methods_agree_on_the_fixed_point() {
        let pr = Profile::low_p(1.5, 1.0, 0.0, OperatorKind::Plus, ell(0.5, 1.0)).unwrap();
        let grid = Grid1D::new(0.0, 5.0, 101).unwrap();
        let coeffs =
            PdeCoeffs::new(OperatorKind::Plus, ell(0.5, 1.0), 1.5, HamiltonianSign::Plus).unwrap();
        let bc = (pr.value(0.0).unwrap(), pr.value(5.0).unwrap());
        let problem = Problem1::homogeneous(coeffs, grid, bc).unwrap();
        let params = SolverParams::default().with_tol(1e-11);
        let baseline = solve_1d(&problem, &params.with_method(SolveMethod::PseudoTime)).unwrap();
        let sweep = solve_1d(&problem, &params.with_method(SolveMethod::Sweep)).unwrap();
        let newton = solve_1d(&problem, &params.with_method(SolveMethod::Newton)).unwrap();
        assert!(baseline.converged && sweep.converged && newton.converged);
        let b = baseline.solution.values();
        for (name, report) in [("sweep", &sweep), ("newton", &newton)] {
            let diff = report
                .solution
                .values()
                .iter()
                .zip(b)
                .map(|(x, y)| (*x - *y).abs())
                .fold(0.0f64, f64::max);
            assert!(diff <= 1e-8, "{name} deviates from baseline by {diff}");
        }
        assert!(newton.iterations < baseline.iterations, "newton should be much cheaper");
    }

    #[test]
    fn monotone_scheme_perturbation_signs() {
        // Degenerate ellipticity of the full discrete operator: bumping a
        // neighbor never increases F, bumping the center never decreases it.
        let coeffs = PdeCoeffs::new(OperatorKind::Minus, ell(0.5, 2.0), 2.5, HamiltonianSign::Minus)
            .unwrap();
        let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
        let f = vec![0.0; 11];
        let scheme = Scheme1D { coeffs: &coeffs, h: grid.h(), f: &f, radial: None };
        let base: Vec<f64> = (0..11).map(|i| (i as f64 * 0.37).sin()).collect();
        let delta = 1e-3;
        for i in 3..6 {
            let f0 = scheme.value(&base, i);
            for j in [i - 1, i + 1] {
                let mut bumped = base.clone();
                bumped[j] += delta;
                assert!(scheme.value(&bumped, i) <= f0 + 1e-12, "neighbor bump at {j}");
            }
            let mut bumped = base.clone();
            bumped[i] += delta;
            assert!(scheme.value(&bumped, i) >= f0 - 1e-12, "center bump at {i}");
        }
    }

    #[test]
    fn linear_bvp_matches_direct_tridiagonal_solve() {
        // a = 0, λ = Λ = 2: −2v″ = c, against an independent Thomas solve of
        // the same linear system.
        let grid = Grid1D::new(0.0, 1.0, 65).unwrap();
        let c = 3.0;
        let report = solve_bvp_general(
            OperatorKind::Plus,
            ell(2.0, 2.0),
            2.0,
            0.0,
            c,
            grid,
            (1.0, -0.5),
            &SolverParams::default().with_tol(1e-12),
        )
        .unwrap();
        assert!(report.converged);
        // Independent direct solve: tridiagonal (−2/h²)(v_{i−1} −2v_i +v_{i+1}) = c.
        let n = grid.n();
        let h = grid.h();
        let m = n - 2;
        let mut lo = vec![-2.0 / (h * h); m];
        let mut mid = vec![4.0 / (h * h); m];
        let mut hi = vec![-2.0 / (h * h); m];
        let mut rhs = vec![c; m];
        rhs[0] += 2.0 / (h * h) * 1.0;
        rhs[m - 1] += 2.0 / (h * h) * (-0.5);
        lo[0] = 0.0;
        hi[m - 1] = 0.0;
        // Forward elimination / back substitution.
        for k in 1..m {
            let w = lo[k] / mid[k - 1];
            mid[k] -= w * hi[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        let mut direct = vec![0.0; m];
        direct[m - 1] = rhs[m - 1] / mid[m - 1];
        for k in (0..m - 1).rev() {
            direct[k] = (rhs[k] - hi[k] * direct[k + 1]) / mid[k];
        }
        let values = report.solution.values();
        for k in 0..m {
            assert!(
                (values[k + 1] - direct[k]).abs() < 1e-10,
                "node {}: {} vs {}",
                k + 1,
                values[k + 1],
                direct[k]
            );
        }
    }

    #[test]
    fn bvp_with_negative_a_uses_reflected_upwinding() {
        // −M⁺(v″) = |v′|² + 1 (a = −1): solution is concave; just verify
        // convergence and the comparison-principle sign (v above the chord).
        let grid = Grid1D::new(0.0, 1.0, 51).unwrap();
        let report = solve_bvp_general(
            OperatorKind::Plus,
            ell(1.0, 2.0),
            2.0,
            -1.0,
            1.0,
            grid,
            (0.0, 0.0),
            &SolverParams::default(),
        )
        .unwrap();
        assert!(report.converged);
        let values = report.solution.values();
        assert!(values[25] > 0.0);
    }

    #[test]
    fn constant_dirichlet_data_is_exact_immediately() {
        // f ≡ 0 with equal boundary values: the constant field is an exact
        // discrete solution, so the baseline converges without stepping.
        let coeffs = PdeCoeffs::new(OperatorKind::Minus, ell(0.5, 2.0), 2.5, HamiltonianSign::Minus)
            .unwrap();
        let grid = Grid1D::new(0.0, 1.0, 33).unwrap();
        let problem = Problem1::homogeneous(coeffs, grid, (0.75, 0.75)).unwrap();
        let params = SolverParams::default().with_method(SolveMethod::PseudoTime);
        let report = solve_1d(&problem, &params).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 1, "took {} iterations", report.iterations);
        for v in report.solution.values() {
            assert_eq!(*v, 0.75);
        }
    }

    #[test]
    fn degenerate_iteration_controls_are_rejected() {
        let coeffs =
            PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 2.0), 3.0, HamiltonianSign::Minus).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 9).unwrap();
        let problem = Problem1::homogeneous(coeffs, grid, (0.0, 0.0)).unwrap();
        for params in [
            SolverParams::default().with_tol(-1.0),
            SolverParams::default().with_tol(f64::NAN),
            SolverParams { cfl_safety: 0.0, ..SolverParams::default() },
            SolverParams { omega: 2.0, ..SolverParams::default() },
        ] {
            assert!(solve_1d(&problem, &params).is_err(), "accepted {params:?}");
        }
    }

    #[test]
    fn constant_source_sign_controls_the_bump_direction() {
        // −M⁺(v″) + |v′|² = c with equal Dirichlet values: at an interior
        // minimum v″ ≥ 0 forces M⁺(v″) ≥ 0 ≠ −c < 0, so c > 0 bumps the
        // solution up; c < 0 (the constant moved to the left-hand side)
        // makes it dip below the boundary values.
        let grid = Grid1D::new(0.0, 1.0, 65).unwrap();
        let params = SolverParams::default();
        for (c, expect_up) in [(5.0, true), (-5.0, false)] {
            let report = solve_bvp_general(
                OperatorKind::Plus,
                ell(1.0, 2.0),
                2.0,
                1.0,
                c,
                grid,
                (0.0, 0.0),
                &params,
            )
            .unwrap();
            assert!(report.converged);
            let mid = report.solution.values()[32];
            if expect_up {
                assert!(mid > 0.1, "c = {c}: midpoint {mid}");
            } else {
                assert!(mid < -0.1, "c = {c}: midpoint {mid}");
            }
        }
    }

    #[test]
    fn divergence_is_detected_not_looped() {
        // A source far beyond the residual guard trips the divergence error
        // instead of iterating to exhaustion.
        let coeffs = PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 1.0), 2.0, HamiltonianSign::Plus)
            .unwrap();
        let grid = Grid1D::new(0.0, 1.0, 21).unwrap();
        let problem = Problem1::new(coeffs, grid, vec![1e300; 21], (0.0, 0.0)).unwrap();
        let params = SolverParams::default().with_method(SolveMethod::Sweep);
        let err = solve_1d(&problem, &params);
        assert!(matches!(err, Err(SolveError::Diverged { .. })), "got {err:?}");
    }

    #[test]
    fn max_iter_exhaustion_reports_unconverged() {
        let coeffs = PdeCoeffs::new(OperatorKind::Plus, ell(1.0, 1.0), 2.0, HamiltonianSign::Plus)
            .unwrap();
        let grid = Grid1D::new(0.0, 1.0, 101).unwrap();
        let problem = Problem1::new(coeffs, grid, vec![1.0; 101], (0.0, 0.0)).unwrap();
        let params = SolverParams::default().with_method(SolveMethod::PseudoTime).with_max_iter(3);
        let report = solve_1d(&problem, &params).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 3);
        assert!(report.residual_inf > params.tol);
    }
}
