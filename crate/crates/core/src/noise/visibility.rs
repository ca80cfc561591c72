use crate::error::{check_range, Error, Result};
use crate::optics::{ModeId, ModeState};

/// Visibility left by a residual phase error under a static ceiling: `ceiling·|cos φ|`.
pub fn visibility_from_phase(phase_error: f64, ceiling: f64) -> Result<f64> {
    check_range("ceiling", ceiling, 0.0, 1.0, "[0, 1]")?;
    check_range("phase_error", phase_error, f64::MIN, f64::MAX, "finite")?;
    Ok(ceiling * phase_error.cos().abs())
}

/// `(I_max − I_min) / (I_max + I_min)`.
pub fn estimate_visibility(i_max: f64, i_min: f64) -> Result<f64> {
    check_range("i_max", i_max, 0.0, f64::MAX, ">= 0")?;
    check_range("i_min", i_min, 0.0, f64::MAX, ">= 0")?;
    if i_max + i_min == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((i_max - i_min).abs() / (i_max + i_min))
}

/// Returns `state` with the interference between `a` and `b` reduced to `v`.
pub fn apply_visibility(state: &ModeState, a: &ModeId, b: &ModeId, v: f64) -> Result<ModeState> {
    let mut out = state.clone();
    out.decohere(a, b, v)?;
    Ok(out)
}
