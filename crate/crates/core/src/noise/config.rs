use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceKind {
    HeraldedSingle,
    Coherent,
}

/// Photon source feeding the interferometer.
///
/// `HeraldedSingle` uses the pair-rate and efficiency fields and ignores
/// `mean_photon_number`; `Coherent` does the opposite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub kind: SourceKind,
    /// Emitted pairs per second.
    pub pair_rate: f64,
    pub coupling_efficiency: f64,
    pub herald_detector_efficiency: f64,
    pub mean_photon_number: f64,
}

impl SourceModel {
    /// 2×10⁷ pairs/s, 30 % coupling, 60 % herald detection.
    pub fn heralded() -> Self {
        Self {
            kind: SourceKind::HeraldedSingle,
            pair_rate: 2e7,
            coupling_efficiency: 0.30,
            herald_detector_efficiency: 0.60,
            mean_photon_number: 1.0,
        }
    }

    pub fn coherent(mean_photon_number: f64) -> Self {
        Self {
            kind: SourceKind::Coherent,
            mean_photon_number,
            ..Self::heralded()
        }
    }

    /// Heralded single-photon rate, pairs/s × coupling × herald detection.
    pub fn heralded_rate(&self) -> f64 {
        self.pair_rate * self.coupling_efficiency * self.herald_detector_efficiency
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SourceKind::HeraldedSingle => {
                check_range("pair_rate", self.pair_rate, 0.0, f64::MAX, ">= 0")?;
                check_range("coupling_efficiency", self.coupling_efficiency, 0.0, 1.0, "[0, 1]")?;
                check_range(
                    "herald_detector_efficiency",
                    self.herald_detector_efficiency,
                    0.0,
                    1.0,
                    "[0, 1]",
                )
            }
            SourceKind::Coherent => check_range("mean_photon_number", self.mean_photon_number, 0.0, f64::MAX, ">= 0"),
        }
    }
}

/// Imperfections of the interferometers and the detection chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub visibility_outer: f64,
    pub visibility_inner: f64,
    /// Random-walk phase drift, radians per step.
    pub phase_drift_sigma: f64,
    pub detector_efficiency: f64,
    /// Dark counts per second per detector.
    pub dark_rate: f64,
    /// Coincidence window, seconds.
    pub coincidence_window: f64,
    pub source: SourceModel,
}

impl NoiseConfig {
    pub fn ideal() -> Self {
        Self {
            visibility_outer: 1.0,
            visibility_inner: 1.0,
            phase_drift_sigma: 0.0,
            detector_efficiency: 1.0,
            dark_rate: 0.0,
            coincidence_window: 1e-9,
            source: SourceModel::heralded(),
        }
    }

    pub fn with_visibility(mut self, v: f64) -> Self {
        self.visibility_outer = v;
        self.visibility_inner = v;
        self
    }

    pub fn is_ideal(&self) -> bool {
        self.visibility_outer == 1.0
            && self.visibility_inner == 1.0
            && self.detector_efficiency == 1.0
            && self.dark_rate == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        check_range("visibility_outer", self.visibility_outer, 0.0, 1.0, "[0, 1]")?;
        check_range("visibility_inner", self.visibility_inner, 0.0, 1.0, "[0, 1]")?;
        check_range("phase_drift_sigma", self.phase_drift_sigma, 0.0, f64::MAX, ">= 0")?;
        check_range("detector_efficiency", self.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
        check_range("dark_rate", self.dark_rate, 0.0, f64::MAX, ">= 0")?;
        if !(self.coincidence_window.is_finite() && self.coincidence_window > 0.0) {
            return Err(Error::Range {
                name: "coincidence_window",
                value: self.coincidence_window,
                expected: "> 0",
            });
        }
        self.source.validate()
    }

    /// Probability that a detector fires a dark count inside one window.
    pub fn dark_click_probability(&self) -> f64 {
        -(-self.dark_rate * self.coincidence_window).exp_m1()
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::ideal()
    }
}
