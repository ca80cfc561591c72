use std::collections::BTreeMap;

use super::program::{Program, Transform};
use super::{D0, D1, DF};
use crate::error::{Error, Result};
use crate::optics::ModeState;

/// Deterministic outcome of one program run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Detection probability per declared detector.
    pub detectors: BTreeMap<String, f64>,
    /// Absorbed probability per sink label.
    pub sinks: BTreeMap<String, f64>,
    /// Intensity seen at Bob's station, summed over all taps.
    pub channel_flux: f64,
    /// Probability left in modes no detector covers.
    pub residual: f64,
    pub final_state: ModeState,
}

impl RunResult {
    pub fn detector(&self, name: &str) -> f64 {
        self.detectors.get(name).copied().unwrap_or(0.0)
    }

    pub fn sink(&self, label: &str) -> f64 {
        self.sinks.get(label).copied().unwrap_or(0.0)
    }

    pub fn p_d0(&self) -> f64 {
        self.detector(D0)
    }

    pub fn p_d1(&self) -> f64 {
        self.detector(D1)
    }

    pub fn p_df(&self) -> f64 {
        self.detector(DF)
    }

    pub fn conclusive(&self) -> f64 {
        self.p_d0() + self.p_d1()
    }

    /// `P(D0 | D0 or D1)`; `None` when no conclusive outcome is possible.
    pub fn conditional_d0(&self) -> Option<f64> {
        let c = self.conclusive();
        (c > 0.0).then(|| self.p_d0() / c)
    }

    pub fn conditional_d1(&self) -> Option<f64> {
        self.conditional_d0().map(|p| 1.0 - p)
    }
}

/// Applies one transform to a state. Returns the tapped intensity, if any.
pub(crate) fn apply(state: &mut ModeState, t: &Transform) -> Result<f64> {
    match t {
        Transform::Rotate { a, b, theta } => state.apply_rotation(a, b, *theta)?,
        Transform::Jones { path, time_bin, matrix } => state.apply_jones(path, *time_bin, matrix)?,
        Transform::Pbs { input, h, v, time_bin } => state.apply_pbs(input, h, v, *time_bin)?,
        Transform::Combine { h, v, out, time_bin } => state.apply_combine(h, v, out, *time_bin)?,
        Transform::Route { from, to } => state.route(from, to)?,
        Transform::Phase { mode, phi } => state.apply_phase(mode, *phi),
        Transform::Absorb { mode, sink, fraction } => state.absorb(mode, sink, *fraction)?,
        Transform::Decohere { a, b, visibility } => state.decohere(a, b, *visibility)?,
        Transform::Tap { mode } => return Ok(state.probability(mode)),
        Transform::AdvanceBin { path, time_bin } => state.advance_time_bin(path, *time_bin)?,
    }
    Ok(0.0)
}

/// Runs the program on a single photon injected at its input mode.
pub fn run_exact(program: &Program) -> Result<RunResult> {
    run_exact_from(program, ModeState::single_photon(program.input.clone()))
}

/// Runs the program on an arbitrary initial state. Norm is checked after every step.
pub fn run_exact_from(program: &Program, initial: ModeState) -> Result<RunResult> {
    let start_norm = initial.total_norm();
    let mut state = initial;
    let mut channel_flux = 0.0;
    for (i, step) in program.steps.iter().enumerate() {
        channel_flux += apply(&mut state, &step.transform)?;
        let norm = state.total_norm();
        if !norm.is_finite() || (norm - start_norm).abs() > crate::optics::NORM_TOL {
            return Err(Error::NumericalIntegrity(format!(
                "norm {norm} after step {i} ({:?}), expected {start_norm}",
                step.origin
            )));
        }
    }
    let detectors = state.detect(program.detector_ports())?;
    let detected: f64 = detectors.values().sum();
    let residual = (state.in_flight() - detected).max(0.0);
    Ok(RunResult {
        detectors,
        sinks: state.sinks().clone(),
        channel_flux,
        residual,
        final_state: state,
    })
}
