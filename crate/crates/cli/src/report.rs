use std::collections::BTreeMap;

use cfcomm_core::engine::{AuditReport, OutcomeCounts, RunResult};
use cfcomm_core::noise::{CalibrationReport, NoiseConfig};
use cfcomm_core::protocol::ImageStats;
use cfcomm_core::{serialize_scenario, Scenario};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct ScenarioInfo {
    pub name: String,
    /// SHA-256 of the canonical serialization.
    pub hash: String,
}

impl ScenarioInfo {
    pub fn of(s: &Scenario) -> Self {
        Self {
            name: s.name.clone(),
            hash: hex::encode(Sha256::digest(serialize_scenario(s).as_bytes())),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExactReport {
    pub detectors: BTreeMap<String, f64>,
    pub sinks: BTreeMap<String, f64>,
    pub residual: f64,
    pub conclusive: f64,
    pub conditional_d0: Option<f64>,
    pub conditional_d1: Option<f64>,
    pub channel_flux: f64,
}

impl From<&RunResult> for ExactReport {
    fn from(r: &RunResult) -> Self {
        Self {
            detectors: r.detectors.clone(),
            sinks: r.sinks.clone(),
            residual: r.residual,
            conclusive: r.conclusive(),
            conditional_d0: r.conditional_d0(),
            conditional_d1: r.conditional_d1(),
            channel_flux: r.channel_flux,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MonteCarloReport {
    pub counts: OutcomeCounts,
    pub d0_given_conclusive: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub schema: &'static str,
    pub scenario: ScenarioInfo,
    pub logic: u8,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloReport>,
    pub noise: NoiseConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct TransmitReport {
    pub schema: &'static str,
    pub scenario: ScenarioInfo,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub majority: u32,
    pub attempt_cap: u64,
    pub stats: ImageStats,
}

#[derive(Debug, Serialize)]
pub struct AuditOutput {
    pub schema: &'static str,
    pub scenario: ScenarioInfo,
    pub source: &'static str,
    pub mean_photon_number: Option<f64>,
    /// Joint (light at Bob AND conclusive click) for the chosen source.
    pub joint_violation: f64,
    pub audit: AuditReport,
}

#[derive(Debug, Serialize)]
pub struct SweepPoint {
    #[serde(rename = "R")]
    pub r: f64,
    pub merit: f64,
}

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub schema: &'static str,
    #[serde(rename = "M")]
    pub m: u32,
    pub optimum: f64,
    pub closed_form: f64,
    pub merit_at_optimum: f64,
    pub sweep: Vec<SweepPoint>,
}

#[derive(Debug, Serialize)]
pub struct CalibrateOutput {
    pub schema: &'static str,
    pub scenario: ScenarioInfo,
    pub calibration: CalibrationReport,
}
