//! Numerical laboratory for extremal Pucci operators M± and the
//! Hamilton–Jacobi equations −M±(D²u) ± |Du|^p = f.
//!
//! The crate has four layers:
//!
//! * [`pucci`] — the operators themselves on small symmetric matrices
//!   ([`matrix`]), both as spectral sums and as sampled sup/inf forms;
//! * [`profiles`] — the one-dimensional profile solutions on the half-space,
//!   their classification constants, shooting constants and the sharp
//!   gradient envelope c_p·d^{−1/(p−1)};
//! * [`solver`] — monotone (degenerate-elliptic) finite-difference schemes
//!   and iterative solvers on 1D/2D grids ([`grid`]), including radial
//!   reductions and convergence studies;
//! * [`experiments`] — reproducible experiment drivers (one-dimensional
//!   symmetry in strips, gradient-envelope fits, sharp-constant probes,
//!   rescaling identities, limit rates) writing `report.json` + `data.csv`
//!   run artifacts ([`io`]).
//!
//! All numeric kernels are generic over the scalar type through
//! [`scalar::Real`] (implemented for `f32` and `f64`); the aliases below pin
//! the `f64` instances used by the experiment layer and the CLI.

pub mod experiments;
pub mod grid;
pub mod io;
pub mod matrix;
pub mod profiles;
pub mod pucci;
pub mod scalar;
pub mod solver;

pub use scalar::Real;

/// `f64` instances of the core types.
pub type Ellipticity64 = pucci::Ellipticity<f64>;
pub type SymmetricMatrix64 = matrix::SymmetricMatrix<f64>;
pub type Profile64 = profiles::Profile<f64>;
pub type Grid1D64 = grid::Grid1D<f64>;
pub type Grid2D64 = grid::Grid2D<f64>;
pub type SolverParams64 = solver::SolverParams<f64>;
pub type SolveReport64 = solver::SolveReport<f64>;
