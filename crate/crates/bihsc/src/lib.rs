//! bihsc — spectral simulation and boundary-control synthesis for the
//! linear biharmonic Schrödinger equation
//! `i dy/dt = -d^4y/dx^4 + gamma d^2y/dx^2` on an interval with hinged
//! ends and the second-derivative control acting at the left endpoint,
//! in the focusing regime `gamma < 0`.
//!
//! The crate computes the exact spectrum of the underlying fourth-order
//! operator, detects the critical resonance set where two eigenvalues
//! collide, measures observability of the boundary trace through the
//! weighted Gram matrix of the mode exponentials, and synthesizes
//! minimal-norm boundary null-controls by the moment method — or, at
//! resonance, quantifies exactly how much of the state can never be
//! steered.
//!
//! ```
//! use bihsc::spectrum::MediumParams;
//! use bihsc::hilbert::CoeffState;
//! use bihsc::control::null_control;
//!
//! let params = MediumParams::new(-3.0, std::f64::consts::PI).unwrap();
//! let y0 = CoeffState::unit_mode(params, 8, 1).unwrap();
//! let (f, report) = null_control(&params, &y0, 1.0, 8, 0.0).unwrap();
//! assert!(report.residual_modal.iter().all(|&r| r < 1e-8));
//! assert!(f.l2_norm() > 0.0);
//! ```

pub mod control;
pub mod eigen;
pub mod error;
pub mod evolution;
pub mod hilbert;
pub mod observability;
pub mod quad;
pub mod spectrum;

pub use control::{ControlReport, ControlSignal};
pub use error::{Error, Result};
pub use hilbert::{CoeffState, ThetaWeight};
pub use observability::GramData;
pub use spectrum::{MediumParams, Mode, ModeKind, ResonanceInfo};
