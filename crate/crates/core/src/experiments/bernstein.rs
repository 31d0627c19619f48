//! Gradient-envelope fits: the interior gradient of a half-space solution
//! blows up toward the boundary no faster than C·d^{−1/(p−1)}, and the power
//! profiles attain that rate.  The experiment measures |Du| on a field,
//! bins it by distance to the boundary, and fits the log-log envelope.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::grid::{Grid1D, Grid2D};
use crate::profiles::{classification_constant, HamiltonianSign, Profile};
use crate::pucci::{Ellipticity, OperatorKind};
use crate::solver::stencil::Stencil2D;
use crate::solver::{solve_2d, PdeCoeffs, Problem2, SolveMethod, SolverParams};

use super::symmetry::{solve_strip, SymmetryConfig};
use super::ExperimentError;

/// Least-squares fit of log(max |Du|) against log(distance) over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinFit {
    pub window: (f64, f64),
    /// Fitted slope; the sharp envelope has −1/(p−1).
    pub exponent: f64,
    /// Fitted intercept, i.e. ln of the envelope constant.
    pub constant: f64,
    pub r2: f64,
    pub bins: usize,
}

/// Derivative at interior node i: centered, except one grid layer from the
/// boundary where a second-order one-sided difference pointing inward avoids
/// the large centered-difference error against a singular edge.
fn derivative_1d(values: &[f64], i: usize, h: f64) -> f64 {
    let n = values.len();
    if i == 1 && n >= 4 {
        (-3.0 * values[1] + 4.0 * values[2] - values[3]) / (2.0 * h)
    } else if i == n - 2 && n >= 4 {
        (3.0 * values[n - 2] - 4.0 * values[n - 3] + values[n - 4]) / (2.0 * h)
    } else {
        (values[i + 1] - values[i - 1]) / (2.0 * h)
    }
}

/// (distance to boundary, |u′|) at every interior node.
pub fn gradient_magnitudes_1d(grid: &Grid1D<f64>, values: &[f64]) -> Vec<(f64, f64)> {
    assert_eq!(values.len(), grid.n(), "field shape must match the grid");
    (1..grid.n() - 1)
        .map(|i| (grid.boundary_distance(i), derivative_1d(values, i, grid.h()).abs()))
        .collect()
}

/// (distance to boundary, |Du|) at every interior node, componentwise by the
/// same rule as the 1D extraction.
pub fn gradient_magnitudes_2d(grid: &Grid2D<f64>, values: &[f64]) -> Vec<(f64, f64)> {
    assert_eq!(values.len(), grid.len(), "field shape must match the grid");
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = Vec::with_capacity((nx - 2) * (ny - 2));
    let mut row = vec![0.0; nx];
    let mut column = vec![0.0; ny];
    for j in 1..ny - 1 {
        for i in 0..nx {
            row[i] = values[grid.idx(i, j)];
        }
        for i in 1..nx - 1 {
            for (jj, slot) in column.iter_mut().enumerate() {
                *slot = values[grid.idx(i, jj)];
            }
            let dx = derivative_1d(&row, i, grid.hx());
            let dy = derivative_1d(&column, j, grid.hy());
            out.push((grid.boundary_distance(i, j), dx.hypot(dy)));
        }
    }
    out
}

const MIN_BINS: usize = 5;

/// Bins `samples = (distance, |Du|)` by distance inside `window`, keeps the
/// per-bin maximum, and least-squares fits ln(max) against ln(distance).
pub fn bernstein_fit(samples: &[(f64, f64)], window: (f64, f64)) -> Result<BernsteinFit, ExperimentError> {
    let (d_min, d_max) = window;
    if !(d_min > 0.0 && d_min < d_max) || !d_max.is_finite() {
        return Err(ExperimentError::BadParameter {
            name: "window",
            why: format!("need 0 < d_min < d_max, got [{d_min}, {d_max}]"),
        });
    }
    let mut bins: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for &(d, magnitude) in samples {
        if d < d_min || d > d_max || !(magnitude > 0.0) {
            continue;
        }
        // Distances of equal-offset nodes can differ in the last bits; a
        // 12-significant-digit key merges them without merging real bins.
        let entry = bins.entry(format!("{d:.11e}")).or_insert((d, 0.0));
        entry.1 = entry.1.max(magnitude);
    }
    if bins.len() < MIN_BINS {
        return Err(ExperimentError::InsufficientBins { got: bins.len(), need: MIN_BINS });
    }
    let points: Vec<(f64, f64)> = bins.values().map(|&(d, m)| (d.ln(), m.ln())).collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r2 = if ss_tot > 1e-30 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(BernsteinFit { window, exponent: slope, constant: intercept, r2, bins: bins.len() })
}

/// Exponent sweep, sample sizes, fit windows and pass tolerances.
#[derive(Debug, Clone, Serialize)]
pub struct BernsteinConfig {
    /// Exponents p > 2 to fit, each against its own profile and strip solve.
    pub ps: Vec<f64>,
    pub lambda: f64,
    pub big_lambda: f64,
    pub kind: OperatorKind,
    /// Strip geometry handed to the solver path.
    pub half_width: f64,
    pub height: f64,
    pub resolution: f64,
    /// Node count of the analytic 1D sampling on [0, 1].
    pub analytic_n: usize,
    pub analytic_window: (f64, f64),
    pub solve_window: (f64, f64),
    /// Absolute exponent tolerance of the analytic path.
    pub analytic_atol: f64,
    /// Relative exponent tolerance of the solver path.
    pub solve_rtol: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BernsteinConfig {
    fn default() -> Self {
        Self {
            ps: vec![3.0, 4.0],
            lambda: 1.0,
            big_lambda: 2.0,
            kind: OperatorKind::Plus,
            half_width: 0.5,
            height: 1.0,
            resolution: 1.0 / 32.0,
            analytic_n: 513,
            analytic_window: (0.03, 0.3),
            solve_window: (0.06, 0.3),
            analytic_atol: 1e-3,
            solve_rtol: 0.10,
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

/// Paired analytic and solver fits for one exponent.
#[derive(Debug, Clone, Serialize)]
pub struct BernsteinCase {
    pub p: f64,
    pub expected_exponent: f64,
    /// ln c_p, the intercept of the exact envelope.
    pub expected_constant: f64,
    pub analytic: BernsteinFit,
    pub analytic_pass: bool,
    pub solve: BernsteinFit,
    pub solve_pass: bool,
    pub solve_iterations: usize,
    pub solve_converged: bool,
}

/// Full report: one case per exponent plus a flat control where the gradient
/// stays bounded and the fitted exponent must be near zero.
#[derive(Debug, Clone, Serialize)]
pub struct BernsteinReport {
    pub config: BernsteinConfig,
    pub cases: Vec<BernsteinCase>,
    pub linear: BernsteinFit,
    pub linear_pass: bool,
    pub passed: bool,
}

/// Runs the exponent sweep of `config`: analytic profile sampling and strip
/// solves with zero bottom data, both fed through [`bernstein_fit`], plus an
/// affine control problem.
pub fn bernstein_experiment(config: &BernsteinConfig) -> Result<BernsteinReport, ExperimentError> {
    if config.ps.is_empty() {
        return Err(ExperimentError::BadParameter {
            name: "ps",
            why: "need at least one exponent".to_owned(),
        });
    }
    let ell = Ellipticity::new(config.lambda, config.big_lambda)?;
    let mut cases = Vec::with_capacity(config.ps.len());
    for &p in &config.ps {
        if !(p > 2.0) {
            return Err(ExperimentError::BadParameter {
                name: "ps",
                why: format!("the gradient envelope applies for p > 2, got {p}"),
            });
        }
        let expected_exponent = -1.0 / (p - 1.0);
        let (c_p, _) = classification_constant(p, &ell, config.kind)?;

        let profile = Profile::high_p(p, 0.0, config.kind, ell)?;
        let sample_grid = Grid1D::new(0.0, 1.0, config.analytic_n)?;
        let sampled: Result<Vec<f64>, _> =
            sample_grid.nodes().iter().map(|&y| profile.value(y)).collect();
        let analytic_samples = gradient_magnitudes_1d(&sample_grid, &sampled?);
        let analytic = bernstein_fit(&analytic_samples, config.analytic_window)?;
        let analytic_pass = (analytic.exponent - expected_exponent).abs() <= config.analytic_atol
            && (analytic.constant - c_p.ln()).abs() <= 20.0 * config.analytic_atol;

        let strip_config = SymmetryConfig {
            p,
            lambda: config.lambda,
            big_lambda: config.big_lambda,
            kind: config.kind,
            half_width: config.half_width,
            height: config.height,
            resolution: config.resolution,
            lateral_amplitude: 0.0,
            tol: config.tol,
            max_iter: config.max_iter,
        };
        let strip = solve_strip(&strip_config)?;
        if !strip.report.converged {
            return Err(ExperimentError::Unconverged { residual: strip.report.residual_inf });
        }
        let solve_samples = gradient_magnitudes_2d(&strip.grid, &strip.values);
        let solve = bernstein_fit(&solve_samples, config.solve_window)?;
        let solve_pass =
            (solve.exponent - expected_exponent).abs() <= config.solve_rtol * expected_exponent.abs();

        cases.push(BernsteinCase {
            p,
            expected_exponent,
            expected_constant: c_p.ln(),
            analytic,
            analytic_pass,
            solve,
            solve_pass,
            solve_iterations: strip.report.iterations,
            solve_converged: strip.report.converged,
        });
    }

    let linear = linear_control(config)?;
    let linear_pass = linear.exponent.abs() <= 0.02;
    let passed = cases.iter().all(|c| c.analytic_pass && c.solve_pass) && linear_pass;
    Ok(BernsteinReport { config: config.clone(), cases, linear, linear_pass, passed })
}

/// Affine Dirichlet data with λ = Λ and no gradient term: the solution is
/// the affine interpolant, |Du| is constant, and the fitted exponent must
/// vanish.
fn linear_control(config: &BernsteinConfig) -> Result<BernsteinFit, ExperimentError> {
    let ell = Ellipticity::new(config.lambda, config.lambda)?;
    let coeffs = PdeCoeffs::new(config.kind, ell, 2.0, HamiltonianSign::Plus)?.with_ham_coeff(0.0)?;
    let nx = 2 * super::symmetry::exact_steps("half_width", config.half_width, config.resolution)? + 1;
    let ny = super::symmetry::exact_steps("height", config.height, config.resolution)? + 1;
    let grid = Grid2D::new(-config.half_width, config.half_width, 0.0, config.height, nx, ny)?;
    let affine = |x: f64, y: f64| 0.25 * x + 0.5 * y;
    let boundary: Vec<f64> = (0..grid.len())
        .map(|k| {
            let (x, y) = grid.node(k % nx, k / nx);
            affine(x, y)
        })
        .collect();
    let problem = Problem2::new(coeffs, grid, vec![0.0; grid.len()], boundary, Stencil2D::standard())?;
    let params = SolverParams::default()
        .with_tol(config.tol)
        .with_max_iter(config.max_iter)
        .with_method(SolveMethod::Sweep);
    let report = solve_2d(&problem, &params)?;
    if !report.converged {
        return Err(ExperimentError::Unconverged { residual: report.residual_inf });
    }
    let samples = gradient_magnitudes_2d(&grid, report.solution.values());
    bernstein_fit(&samples, config.solve_window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_an_exact_power_law() {
        let samples: Vec<(f64, f64)> = (1..200)
            .map(|k| {
                let d = k as f64 * 1e-3;
                (d, 2.0 * d.powf(-0.5))
            })
            .collect();
        let fit = bernstein_fit(&samples, (0.01, 0.15)).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-12, "exponent {}", fit.exponent);
        assert!((fit.constant - 2.0f64.ln()).abs() < 1e-12);
        assert!(fit.r2 > 1.0 - 1e-12);
        assert_eq!(fit.bins, 141);
    }

    #[test]
    fn too_narrow_a_window_is_rejected() {
        let samples: Vec<(f64, f64)> = (1..10).map(|k| (k as f64 * 0.01, 1.0)).collect();
        assert!(matches!(
            bernstein_fit(&samples, (0.035, 0.055)),
            Err(ExperimentError::InsufficientBins { got: 2, need: 5 })
        ));
        assert!(matches!(
            bernstein_fit(&samples, (0.5, 0.1)),
            Err(ExperimentError::BadParameter { name: "window", .. })
        ));
    }

    #[test]
    fn edge_extraction_is_exact_on_quadratics() {
        let grid = Grid1D::new(0.0, 1.0, 33).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|&y| y * y).collect();
        let h = grid.h();
        for i in 1..32 {
            let expected = 2.0 * grid.node(i);
            let got = derivative_1d(&values, i, h);
            assert!((got - expected).abs() < 1e-12, "node {i}: {got} vs {expected}");
        }
    }

    #[test]
    fn analytic_profile_matches_the_sharp_envelope() {
        let config = BernsteinConfig::default();
        let ell = Ellipticity::new(config.lambda, config.big_lambda).unwrap();
        let profile = Profile::high_p(3.0, 0.0, config.kind, ell).unwrap();
        let grid = Grid1D::new(0.0, 1.0, config.analytic_n).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|&y| profile.value(y).unwrap()).collect();
        let samples = gradient_magnitudes_1d(&grid, &values);
        let fit = bernstein_fit(&samples, config.analytic_window).unwrap();
        assert!((fit.exponent + 0.5).abs() <= 1e-3, "exponent {}", fit.exponent);
        let c_p = classification_constant(3.0, &ell, config.kind).unwrap().0;
        assert!((fit.constant - c_p.ln()).abs() <= 2e-2, "constant {}", fit.constant);
        assert!(fit.r2 > 0.999);
    }

    #[test]
    fn experiment_passes_end_to_end() {
        let report = bernstein_experiment(&BernsteinConfig::default()).unwrap();
        for case in &report.cases {
            assert!(case.analytic_pass, "analytic fit for p = {}: {:?}", case.p, case.analytic);
            assert!(case.solve_pass, "solve fit for p = {}: {:?}", case.p, case.solve);
        }
        assert!(report.linear_pass, "linear control: {:?}", report.linear);
        assert!(report.passed);
    }
}
