//! Marginal-wave ensembles for 1D two-electron systems: exact two-body
//! reference, TDQMC guide waves, Gram-matrix entanglement statistics and
//! strip-resolved profiles.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the precision.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod io;
pub mod model;
pub mod numerics;
pub mod partition;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod tdqmc;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type WaveSet64 = numerics::field::WaveSet<f64>;
pub type WaveSet32 = numerics::field::WaveSet<f32>;
pub type SystemModel64 = model::SystemModel<f64>;
pub type SystemModel32 = model::SystemModel<f32>;
pub type TwoBodyState64 = exact::TwoBodyState<f64>;
pub type TdqmcState64 = tdqmc::TdqmcState<f64>;
pub type TdqmcState32 = tdqmc::TdqmcState<f32>;
pub type WalkerEnsemble64 = tdqmc::WalkerEnsemble<f64>;
pub type EntanglementProfile64 = partition::EntanglementProfile<f64>;
pub type SchmidtSpectrum64 = stats::SchmidtSpectrum<f64>;
