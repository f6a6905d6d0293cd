//! Displacement correlators and weak-drive photon statistics.

pub mod g2;
pub mod kernel;
pub mod quadrature;

pub use g2::{g2_from_kernel, g2_zero, kerr_only_g2, DriveConfig, G2Estimate, QuadratureConfig};
pub use kernel::{CorrelationKernel, KernelMode};
