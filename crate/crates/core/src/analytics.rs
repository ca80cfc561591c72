//! Closed forms for the ideal nested-Zeno network, used as oracles for the engine.

use std::f64::consts::PI;

use serde::Serialize;

use crate::engine::{compile, run_exact, Logic};
use crate::error::{check_range, Error, Result};
use crate::scenario::{slaz_ideal, BlockingModel};

/// Golden-section stopping width for [`optimize_half_mirror`].
pub const MIRROR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdealProbs {
    pub p_d0: f64,
    pub p_d1: f64,
    pub p_df: f64,
    /// Everything absorbed or discarded.
    pub p_sink: f64,
    /// 0 when no conclusive outcome is possible.
    pub p_d0_given_conclusive: f64,
    pub p_d1_given_conclusive: f64,
}

impl IdealProbs {
    fn new(p_d0: f64, p_d1: f64, p_df: f64, p_sink: f64) -> Self {
        let c = p_d0 + p_d1;
        let (c0, c1) = if c > 0.0 { (p_d0 / c, p_d1 / c) } else { (0.0, 0.0) };
        Self {
            p_d0,
            p_d1,
            p_df,
            p_sink,
            p_d0_given_conclusive: c0,
            p_d1_given_conclusive: c1,
        }
    }

    pub fn conclusive(&self) -> f64 {
        self.p_d0 + self.p_d1
    }
}

fn check_m(m: u32, min: u32) -> Result<()> {
    if m < min {
        return Err(Error::Range {
            name: "M",
            value: f64::from(m),
            expected: if min == 2 { ">= 2" } else { ">= 3" },
        });
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::Range {
            name: "N",
            value: 0.0,
            expected: ">= 1",
        });
    }
    Ok(())
}

fn merit(r: f64, m: u32) -> f64 {
    (1.0 - r).powi(2) * r.powi(m as i32 - 2)
}

/// `cos²(π/2M)`: conditional D0 probability when Bob passes.
pub fn ideal_pass_success(m: u32) -> Result<f64> {
    check_m(m, 2)?;
    Ok((PI / (2.0 * f64::from(m))).cos().powi(2))
}

/// Unconditional outcome probabilities when Bob passes.
pub fn ideal_pass_probs(m: u32, r: f64) -> Result<IdealProbs> {
    check_m(m, 2)?;
    check_range("R", r, 0.0, 1.0, "[0, 1]")?;
    let out = merit(r, m);
    let c = ideal_pass_success(m)?;
    Ok(IdealProbs::new(out * c, out * (1.0 - c), 0.0, 1.0 - out))
}

/// Outcome probabilities when Bob blocks.
///
/// FullBreak has a closed form; ChannelOnly is evaluated with the engine on
/// the ideal builtin topology.
pub fn ideal_block_probs(m: u32, n: u32, r: f64, model: BlockingModel) -> Result<IdealProbs> {
    check_m(m, 2)?;
    check_n(n)?;
    check_range("R", r, 0.0, 1.0, "[0, 1]")?;
    match model {
        BlockingModel::FullBreak => {
            let theta = PI / (2.0 * f64::from(m));
            let p_d1 = merit(r, m) * theta.cos().powi(2 * (m as i32 - 1));
            Ok(IdealProbs::new(0.0, p_d1, 0.0, 1.0 - p_d1))
        }
        BlockingModel::ChannelOnly => {
            let mut s = slaz_ideal(m, n);
            s.half_mirror_reflectivity = r;
            s.blocking_model = BlockingModel::ChannelOnly;
            let res = run_exact(&compile(&s, Logic::One)?)?;
            Ok(IdealProbs::new(
                res.p_d0(),
                res.p_d1(),
                res.p_df(),
                res.sinks.values().sum::<f64>() + res.residual,
            ))
        }
    }
}

/// `cos^{2N}(π/2N)`: survival through N weak measurements.
pub fn zeno_survival(n: u32) -> Result<f64> {
    check_n(n)?;
    Ok((PI / (2.0 * f64::from(n))).cos().powi(2 * n as i32))
}

/// `(1−R)²·R^{M−2}`: enter, survive M−2 internal reflections, exit on time.
pub fn half_mirror_merit(r: f64, m: u32) -> Result<f64> {
    check_m(m, 3)?;
    check_range("R", r, 0.0, 1.0, "[0, 1]")?;
    Ok(merit(r, m))
}

/// Golden-section maximization of [`half_mirror_merit`] over `[0, 1]`.
pub fn optimize_half_mirror(m: u32) -> Result<f64> {
    check_m(m, 3)?;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (merit(a, m), merit(b, m));
    while hi - lo > MIRROR_TOL {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = merit(a, m);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = merit(b, m);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean attempts of repeat-until-conclusive: `1 / (p_d0 + p_d1)`.
pub fn expected_trials_per_bit(probs: &IdealProbs) -> Result<f64> {
    let c = probs.conclusive();
    if c > 0.0 {
        Ok(1.0 / c)
    } else {
        Err(Error::InfeasibleProtocol("conclusive probability is zero".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pass_success_values() {
        assert_abs_diff_eq!(ideal_pass_success(4).unwrap(), 0.853553, epsilon = 1e-6);
        assert_abs_diff_eq!(ideal_pass_success(2).unwrap(), 0.5, epsilon = 1e-15);
        let far = ideal_pass_success(1024).unwrap();
        assert_abs_diff_eq!(far, 0.999998, epsilon = 1e-6);
        assert!(far >= 1.0 - (PI / 2048.0).powi(2));
        assert!(ideal_pass_success(1).is_err());
    }

    #[test]
    fn full_break_values() {
        let p = ideal_block_probs(4, 2, 0.5, BlockingModel::FullBreak).unwrap();
        assert_eq!(p.p_d0, 0.0);
        assert_eq!(p.p_d1_given_conclusive, 1.0);
        // 0.0625·cos⁶(π/8), evaluated independently
        assert_abs_diff_eq!(p.p_d1, 0.038866201, epsilon = 1e-6);
        let trapped = ideal_block_probs(4, 2, 1.0, BlockingModel::FullBreak).unwrap();
        assert_eq!(trapped.p_d1, 0.0);
        assert!(ideal_block_probs(4, 0, 0.5, BlockingModel::FullBreak).is_err());
        assert!(ideal_block_probs(4, 2, 1.5, BlockingModel::FullBreak).is_err());
    }

    #[test]
    fn probabilities_sum_to_one() {
        for model in [BlockingModel::FullBreak, BlockingModel::ChannelOnly] {
            let p = ideal_block_probs(5, 3, 0.3, model).unwrap();
            assert_abs_diff_eq!(p.p_d0 + p.p_d1 + p.p_df + p.p_sink, 1.0, epsilon = 1e-12);
        }
        let p = ideal_pass_probs(6, 0.7).unwrap();
        assert_abs_diff_eq!(p.p_d0 + p.p_d1 + p.p_df + p.p_sink, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zeno_values() {
        assert_abs_diff_eq!(zeno_survival(2).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(zeno_survival(10).unwrap(), 0.780546070, epsilon = 1e-6);
        assert!(zeno_survival(10_000).unwrap() >= 0.999);
        assert!(zeno_survival(0).is_err());
    }

    #[test]
    fn merit_values() {
        assert_abs_diff_eq!(half_mirror_merit(0.5, 4).unwrap(), 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(half_mirror_merit(2.0 / 3.0, 6).unwrap(), 0.021948, epsilon = 1e-6);
        for m in [3, 7, 20] {
            assert_eq!(half_mirror_merit(0.0, m).unwrap(), 0.0);
            assert_eq!(half_mirror_merit(1.0, m).unwrap(), 0.0);
        }
        assert!(half_mirror_merit(0.5, 2).is_err());
    }

    #[test]
    fn mirror_optimum() {
        assert_abs_diff_eq!(optimize_half_mirror(4).unwrap(), 0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(optimize_half_mirror(3).unwrap(), 1.0 / 3.0, epsilon = 1e-5);
        assert_abs_diff_eq!(optimize_half_mirror(10).unwrap(), 0.8, epsilon = 1e-5);
        assert!(optimize_half_mirror(2).is_err());
    }

    #[test]
    fn trials_per_bit() {
        let certain = IdealProbs::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(expected_trials_per_bit(&certain).unwrap(), 1.0);
        let half = IdealProbs::new(0.25, 0.25, 0.0, 0.5);
        assert_eq!(expected_trials_per_bit(&half).unwrap(), 2.0);
        let block = ideal_block_probs(4, 2, 0.5, BlockingModel::FullBreak).unwrap();
        assert_abs_diff_eq!(expected_trials_per_bit(&block).unwrap(), 25.73, epsilon = 0.01);
        let dead = IdealProbs::new(0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            expected_trials_per_bit(&dead),
            Err(Error::InfeasibleProtocol(_))
        ));
    }
}
