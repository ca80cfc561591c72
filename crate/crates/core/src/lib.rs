//! Simulator for counterfactual communication through nested Zeno
//! interferometers: linear optics, a scenario language, exact / Monte Carlo /
//! path-sum execution, closed-form oracles, the bit transfer protocol and
//! noise models.

pub mod analytics;
pub mod engine;
pub mod error;
pub mod noise;
pub mod optics;
pub mod protocol;
pub mod rng;
pub mod scenario;

pub use engine::{compile, run_exact, Logic, Program, RunResult};
pub use error::{Error, Result};
pub use noise::{NoiseConfig, SourceModel};
pub use optics::{JonesMatrix, ModeId, ModeState, Polarization};
pub use scenario::{parse_scenario, serialize_scenario, BlockingModel, Scenario};
