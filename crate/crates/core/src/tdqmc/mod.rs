//! Guide-wave ensembles evolved in imaginary time and coupled through walkers.

mod engine;
mod ensemble;
mod potential;
mod walkers;

pub use engine::{
    energy_drift, propagate_step, resample_walkers, run_from, run_to_convergence, KernelPolicy, TdqmcEngine,
    TdqmcParams, TdqmcRun,
};
pub use ensemble::{init_ensemble, pooled_spread, GuideWaveEnsemble, TdqmcState};
pub use potential::{effective_potential, effective_potentials, exchange_term};
pub use walkers::WalkerEnsemble;
