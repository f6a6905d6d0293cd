//! Criticality-enhanced optical Kerr nonlinearity in a hybrid
//! electro-optomechanical system.
//!
//! A microwave mode `c` and a mechanical mode `b` are strongly coupled through a
//! classical microwave drive. Near the instability of the resulting normal-mode
//! pair, the soft mode mediates a large effective Kerr interaction for a weakly
//! coupled optical mode `a`. The crate covers:
//!
//! * [`model`]: drive linearization and its inverse.
//! * [`spectrum`]: normal modes, Bogoliubov transform and Kerr strength.
//! * [`correlations`]: displacement correlators and the second-order coherence.
//! * [`catstate`]: Kerr cat states, their decomposition and Wigner functions.
//! * [`oracle`]: brute-force truncated-Fock Lindblad reference.
//!
//! All frequencies are expressed in units of the bare mechanical frequency.

pub mod catstate;
pub mod config;
pub mod correlations;
pub mod error;
pub mod model;
pub mod oracle;
pub mod report;
pub mod runner;
pub mod spectrum;
pub mod sweep;

pub use num_complex::Complex64;

pub use catstate::{CatDecomposition, CatState, RegimeCell, WignerGrid};
pub use correlations::{CorrelationKernel, DriveConfig, G2Estimate, QuadratureConfig};
pub use error::{Error, Result};
pub use model::{LinearizedModel, SystemParams};
pub use spectrum::{NormalModeDecay, NormalModes, PolaronFrame};
