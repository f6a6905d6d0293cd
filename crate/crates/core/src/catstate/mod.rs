//! Kerr cat states at stroboscopic times.

pub mod decompose;
pub mod regime;
pub mod state;
pub mod wigner;

pub use decompose::{decompose_cat, CatComponent, CatDecomposition};
pub use regime::{classify, regime_map, RegimeCell, RegimeSettings};
pub use state::{evolve_cat, stroboscopic_time, validity_margin, CatState};
pub use wigner::{wigner, AxisSpec, WignerGrid};
