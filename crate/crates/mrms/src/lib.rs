//! Minimal residual multistep (MRMS) methods for large stiff linear ODE systems
//! `y' = A(t) y + b(t)`.
//!
//! An MRMS(k, p) step keeps the explicit k-step ansatz
//! `y_k = sum_j (tau * beta_j * f_j - alpha_j * y_j)` but picks the 2k coefficients
//! anew on every step so that the residual of an implicit p-step BDF formula is
//! minimized in the 2-norm. Instead of factorizing the n-by-n matrix
//! `tau A - c_k I` (as an implicit method must), each step solves one thin
//! n-by-2k least-squares problem, so the cost per step stays at a few
//! matrix-vector products.
//!
//! The crate provides:
//!
//! * [`stepper`] - the MRMS(k, p) stepper and integrator with per-step diagnostics,
//! * [`bdf`] - BDF coefficient generation (orders 1-6) and the classical
//!   fixed-step BDF integrator used as the baseline,
//! * [`mre`] - closed-form linear-stability analysis of the one-step member
//!   MRMS(1, 1), the minimal residual Euler method,
//! * [`problems`] - stiff test problems with exact solutions (diagonal spectrum
//!   model, 2D heat equation via method of lines),
//! * [`harness`] - convergence and time-error experiment drivers with CSV/SVG output,
//! * [`linalg`] - the self-contained kernels backing all of the above: CSC
//!   matvec, banded LU, pivoted-QR minimal-norm least squares,
//! * [`cli`] - the command-line front end (see the `mrms` binary).
//!
//! Runnable walkthroughs for each capability live in `examples/`.
//!
//! # Example
//!
//! Integrate the stiff model system `y_i' = lambda_i y_i + 1` with MRMS(2, 2),
//! seeding the window from the exact solution:
//!
//! ```
//! use mrms::problems::{diagonal_test_problem, EigenvalueSpec};
//! use mrms::stepper::{mrms_integrate, HistoryWindow, MrmsConfig};
//!
//! let problem = diagonal_test_problem(EigenvalueSpec::Uniform {
//!     lambda_max: 100.0,
//!     n: 50,
//! })?;
//! let steps = 512;
//! let tau = 1.0 / steps as f64;
//! let states = (0..2).map(|i| problem.exact_at(i as f64 * tau).unwrap()).collect();
//! let mut history = HistoryWindow::from_states(&problem, 0.0, tau, states)?;
//!
//! let config = MrmsConfig::new(2, 2)?;
//! let trajectory = mrms_integrate(&problem, &mut history, &config, steps - 1)?;
//!
//! let exact = problem.exact_at(1.0).unwrap();
//! let err = trajectory.final_state().unwrap().sub(&exact).norm_inf();
//! assert!(err < 1e-2);
//! // two fresh matvecs per step after warm-up, no factorizations
//! assert_eq!(trajectory.stats.matvecs, 2 * (steps as u64 - 1) + 3);
//! # Ok::<(), mrms::Error>(())
//! ```

pub mod bdf;
pub mod cli;
mod error;
pub mod harness;
pub mod linalg;
pub mod mre;
pub mod problems;
pub mod stepper;
mod trajectory;

pub use crate::error::{Error, Result};
pub use crate::linalg::{
    BandedFactorization, BandedMatrix, DenseThinMatrix, LeastSquaresResult, SparseMatrixCsc, Vector,
};
pub use crate::problems::{EigenvalueSpec, LinearProblem};
pub use crate::trajectory::{RunStats, Trajectory};
