use serde::Serialize;

use super::NoiseConfig;
use crate::engine::{compile_with_noise, run_exact, Logic};
use crate::error::{check_range, Result};
use crate::scenario::Scenario;

/// Observed identification rates to fit and the search window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationTargets {
    pub logic0: f64,
    pub logic1: f64,
    /// Allowed absolute residual on each rate.
    pub tolerance: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            logic0: 0.834,
            logic1: 0.912,
            tolerance: 0.02,
            v_min: 0.90,
            v_max: 1.0,
        }
    }
}

/// Identification rates with a single interferometer degraded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    pub outer_only: [f64; 2],
    pub inner_only: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub scenario: String,
    pub targets: CalibrationTargets,
    pub visibility: f64,
    pub logic0: f64,
    pub logic1: f64,
    pub residual0: f64,
    pub residual1: f64,
    pub within_tolerance: bool,
    pub sensitivity: Sensitivity,
}

/// Conditional identification rates `[P(D0 | conclusive, 0), P(D1 | conclusive, 1)]`.
pub fn identification(s: &Scenario, noise: &NoiseConfig) -> Result<[f64; 2]> {
    let zero = run_exact(&compile_with_noise(s, Logic::Zero, noise)?)?;
    let one = run_exact(&compile_with_noise(s, Logic::One, noise)?)?;
    Ok([
        zero.conditional_d0().unwrap_or(0.0),
        one.conditional_d1().unwrap_or(0.0),
    ])
}

/// Fits one visibility, shared by both interferometers, to the targets by
/// minimizing the larger of the two residuals: a grid scan followed by a
/// golden-section refinement around the best grid point.
pub fn calibrate(s: &Scenario, targets: &CalibrationTargets) -> Result<CalibrationReport> {
    check_range("v_min", targets.v_min, 0.0, 1.0, "[0, 1]")?;
    check_range("v_max", targets.v_max, targets.v_min, 1.0, "[v_min, 1]")?;
    let base = s.noise;
    let cost = |v: f64| -> Result<f64> {
        let [p0, p1] = identification(s, &base.with_visibility(v))?;
        Ok((p0 - targets.logic0).abs().max((p1 - targets.logic1).abs()))
    };

    const GRID: usize = 200;
    let step = (targets.v_max - targets.v_min) / GRID as f64;
    let mut best = (f64::INFINITY, targets.v_max);
    for i in 0..=GRID {
        let v = targets.v_min + step * i as f64;
        let c = cost(v)?;
        if c < best.0 {
            best = (c, v);
        }
    }

    let (mut lo, mut hi) = ((best.1 - step).max(targets.v_min), (best.1 + step).min(targets.v_max));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-9 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if cost(a)? <= cost(b)? {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mid = 0.5 * (lo + hi);
    let v = if cost(mid)? < best.0 { mid } else { best.1 };

    let [p0, p1] = identification(s, &base.with_visibility(v))?;
    let outer_only = identification(
        s,
        &NoiseConfig {
            visibility_outer: v,
            visibility_inner: 1.0,
            ..base
        },
    )?;
    let inner_only = identification(
        s,
        &NoiseConfig {
            visibility_outer: 1.0,
            visibility_inner: v,
            ..base
        },
    )?;
    let (residual0, residual1) = (p0 - targets.logic0, p1 - targets.logic1);
    Ok(CalibrationReport {
        scenario: s.name.clone(),
        targets: *targets,
        visibility: v,
        logic0: p0,
        logic1: p1,
        residual0,
        residual1,
        within_tolerance: residual0.abs() <= targets.tolerance && residual1.abs() <= targets.tolerance,
        sensitivity: Sensitivity { outer_only, inner_only },
    })
}
