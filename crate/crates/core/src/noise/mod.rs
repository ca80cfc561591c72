//! Imperfections and instrumentation: visibility loss, phase drift and its
//! lock, photon sources, dark counts and coincidence filtering.

mod calibrate;
mod config;
mod detection;
mod lock;
mod visibility;

pub use calibrate::{calibrate, identification, CalibrationReport, CalibrationTargets, Sensitivity};
pub use config::{NoiseConfig, SourceKind, SourceModel};
pub use detection::{
    coherent_counts, coincidence_filter, counterfactual_violation, heralded_count, heralded_times, poisson_times,
    Detection,
};
pub use lock::{drift_step, lock_step, mean_visibility, simulate_lock, LockController, LockDemo, LockSample};
pub use visibility::{apply_visibility, estimate_visibility, visibility_from_phase};
