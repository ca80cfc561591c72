use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::rng;

use super::visibility_from_phase;

/// One random-walk increment: `phase + N(0, sigma²)`.
pub fn drift_step<R: Rng + ?Sized>(phase: f64, sigma: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    phase + sigma * z
}

/// Proportional phase lock acting on a piezo with limited travel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockController {
    pub gain: f64,
    pub setpoint_phase: f64,
    /// Largest correction per update, radians.
    pub actuator_range: f64,
    /// Steps between updates.
    pub sample_period: u32,
}

impl LockController {
    pub fn new(gain: f64, setpoint_phase: f64, actuator_range: f64, sample_period: u32) -> Result<Self> {
        let c = Self {
            gain,
            setpoint_phase,
            actuator_range,
            sample_period,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("gain", self.gain), ("actuator_range", self.actuator_range)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Range {
                    name,
                    value,
                    expected: "> 0",
                });
            }
        }
        check_range("setpoint_phase", self.setpoint_phase, f64::MIN, f64::MAX, "finite")?;
        if self.sample_period == 0 {
            return Err(Error::Range {
                name: "sample_period",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(())
    }
}

impl Default for LockController {
    fn default() -> Self {
        Self {
            gain: 0.8,
            setpoint_phase: 0.0,
            actuator_range: 0.5,
            sample_period: 1,
        }
    }
}

/// Correction for a measured phase error: `-gain·error`, saturated at the actuator range.
pub fn lock_step(controller: &LockController, phase_error: f64) -> f64 {
    (-controller.gain * phase_error).clamp(-controller.actuator_range, controller.actuator_range)
}

/// Drift and lock settings for a visibility time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockDemo {
    pub duration_steps: u64,
    /// Seconds per step.
    pub step_seconds: f64,
    pub sigma: f64,
    /// Visibility with zero phase error.
    pub ceiling: f64,
    pub controller: LockController,
}

impl Default for LockDemo {
    /// 25 minutes at one sample per second.
    fn default() -> Self {
        Self {
            duration_steps: 1500,
            step_seconds: 1.0,
            sigma: 0.05,
            ceiling: 0.99,
            controller: LockController::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockSample {
    pub step: u64,
    pub phase_error: f64,
    pub visibility: f64,
}

/// Simulates the interferometer phase with or without the lock.
///
/// Each step drifts the phase, records the visibility, then (when locked and
/// on an update step) applies the controller correction.
pub fn simulate_lock(demo: &LockDemo, locked: bool, seed: u64) -> Result<Vec<LockSample>> {
    if demo.duration_steps == 0 {
        return Err(Error::Range {
            name: "duration",
            value: 0.0,
            expected: ">= 1",
        });
    }
    check_range("sigma", demo.sigma, 0.0, f64::MAX, ">= 0")?;
    check_range("ceiling", demo.ceiling, 0.0, 1.0, "[0, 1]")?;
    demo.controller.validate()?;

    let c = &demo.controller;
    let mut rng = rng::stream(seed, 0);
    let mut phase = c.setpoint_phase;
    let mut out = Vec::with_capacity(demo.duration_steps as usize);
    for step in 0..demo.duration_steps {
        phase = drift_step(phase, demo.sigma, &mut rng);
        let error = phase - c.setpoint_phase;
        out.push(LockSample {
            step,
            phase_error: error,
            visibility: visibility_from_phase(error, demo.ceiling)?,
        });
        if locked && step % u64::from(c.sample_period) == 0 {
            phase += lock_step(c, error);
        }
    }
    Ok(out)
}

pub fn mean_visibility(samples: &[LockSample]) -> f64 {
    samples.iter().map(|s| s.visibility).sum::<f64>() / samples.len().max(1) as f64
}
