use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{SourceKind, SourceModel};
use crate::engine::{compile, run_exact_from, Logic};
use crate::error::{check_range, Error, Result};
use crate::optics::ModeState;
use crate::scenario::Scenario;

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Sorted event times of a homogeneous Poisson process on `[0, duration)`.
pub fn poisson_times<R: Rng + ?Sized>(rate: f64, duration: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_range("rate", rate, 0.0, f64::MAX, ">= 0")?;
    check_range("duration", duration, 0.0, f64::MAX, ">= 0")?;
    let n = poisson(rate * duration, rng);
    let mut times: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * duration).collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// Heralded photons in `duration` seconds: Poisson pair emissions, each kept
/// if the signal couples and the herald is detected.
pub fn heralded_count<R: Rng + ?Sized>(model: &SourceModel, duration: f64, rng: &mut R) -> Result<u64> {
    model.validate()?;
    check_range("duration", duration, 0.0, f64::MAX, ">= 0")?;
    if model.kind != SourceKind::HeraldedSingle {
        return Err(Error::InvalidElement(
            "heralded sampling needs a HeraldedSingle source".into(),
        ));
    }
    let pairs = poisson(model.pair_rate * duration, rng);
    let keep = model.coupling_efficiency * model.herald_detector_efficiency;
    if pairs == 0 || keep == 0.0 {
        return Ok(0);
    }
    let thinned = Binomial::new(pairs, keep).map_err(|e| Error::NumericalIntegrity(e.to_string()))?;
    Ok(thinned.sample(rng))
}

/// Sorted herald times over `duration` seconds.
pub fn heralded_times<R: Rng + ?Sized>(model: &SourceModel, duration: f64, rng: &mut R) -> Result<Vec<f64>> {
    let n = heralded_count(model, duration, rng)?;
    let mut times: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * duration).collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// Photon counts per port for a coherent pulse: Poisson with mean `p·μ`.
pub fn coherent_counts<R: Rng + ?Sized>(
    model: &SourceModel,
    port_probabilities: &[f64],
    rng: &mut R,
) -> Result<Vec<u64>> {
    model.validate()?;
    if model.kind != SourceKind::Coherent {
        return Err(Error::InvalidElement(
            "coherent sampling needs a Coherent source".into(),
        ));
    }
    Ok(port_probabilities
        .iter()
        .map(|p| poisson(p * model.mean_photon_number, rng))
        .collect())
}

/// A time-tagged click.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub time: f64,
    pub detector: usize,
}

fn check_sorted(times: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (i, t) in times.enumerate() {
        if t.is_nan() || t < prev {
            return Err(Error::Ordering(i));
        }
        prev = t;
    }
    Ok(())
}

/// Keeps detections that fall within `±window/2` of `herald + delay`, where
/// `delay` selects the round-trip time bin.
pub fn coincidence_filter(
    heralds: &[f64],
    detections: &[Detection],
    window: f64,
    delay: f64,
) -> Result<Vec<Detection>> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::Range {
            name: "window",
            value: window,
            expected: "> 0",
        });
    }
    check_range("delay", delay, f64::MIN, f64::MAX, "finite")?;
    check_sorted(heralds.iter().copied())?;
    check_sorted(detections.iter().map(|d| d.time))?;

    let half = window / 2.0;
    let mut h = 0;
    let mut accepted = Vec::new();
    for d in detections {
        while h < heralds.len() && heralds[h] + delay < d.time - half {
            h += 1;
        }
        if h < heralds.len() && (heralds[h] + delay - d.time).abs() <= half {
            accepted.push(*d);
        }
    }
    Ok(accepted)
}

/// Probability that, in one trial, light both reaches Bob's station and
/// Alice records a conclusive click.
///
/// A single photon ends in exactly one place, so the heralded source gives 0.
/// A coherent pulse is evolved as a classical field through the same linear
/// network; photon numbers in orthogonal modes are then independent Poisson
/// variables.
pub fn counterfactual_violation(s: &Scenario, logic: Logic, source: &SourceModel) -> Result<f64> {
    source.validate()?;
    let program = compile(s, logic)?;
    match source.kind {
        SourceKind::HeraldedSingle => Ok(0.0),
        SourceKind::Coherent => {
            let mu = source.mean_photon_number;
            let field = ModeState::from_amplitudes([(program.input.clone(), Complex64::new(mu.sqrt(), 0.0))]);
            let out = run_exact_from(&program, field)?;
            let at_bob = out.channel_flux;
            let conclusive = out.conclusive();
            Ok(-(-at_bob).exp_m1() * -(-conclusive).exp_m1())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn heralded_rate_matches_product() {
        let m = SourceModel::heralded();
        let n = heralded_count(&m, 1.0, &mut rng::stream(1, 0)).unwrap() as f64;
        assert!((n / 3.6e6 - 1.0).abs() < 0.02, "{n}");
    }

    #[test]
    fn doubling_pair_rate_doubles_heralds() {
        let m = SourceModel::heralded();
        let m2 = SourceModel { pair_rate: 4e7, ..m };
        let a = heralded_count(&m, 0.1, &mut rng::stream(2, 0)).unwrap() as f64;
        let b = heralded_count(&m2, 0.1, &mut rng::stream(2, 1)).unwrap() as f64;
        assert!((b / a - 2.0).abs() < 0.02, "{a} {b}");
    }

    #[test]
    fn vacuum_coherent_never_clicks() {
        let m = SourceModel::coherent(0.0);
        let mut r = rng::stream(3, 0);
        for _ in 0..1000 {
            assert_eq!(coherent_counts(&m, &[0.5, 0.5], &mut r).unwrap(), vec![0, 0]);
        }
    }

    fn det(time: f64) -> Detection {
        Detection { time, detector: 0 }
    }

    #[test]
    fn coincidence_basics() {
        let w = 1e-9;
        let kept = coincidence_filter(&[1e-6], &[det(1e-6)], w, 0.0).unwrap();
        assert_eq!(kept.len(), 1);
        let kept = coincidence_filter(&[1e-6], &[det(1e-6 + 2.0 * w)], w, 0.0).unwrap();
        assert!(kept.is_empty());
        let kept = coincidence_filter(&[1e-6], &[det(1e-6 + 5e-9)], w, 5e-9).unwrap();
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn coincidence_rejects_unsorted() {
        assert_eq!(coincidence_filter(&[2.0, 1.0], &[], 1e-9, 0.0), Err(Error::Ordering(1)));
        assert_eq!(
            coincidence_filter(&[], &[det(1.0), det(0.5)], 1e-9, 0.0),
            Err(Error::Ordering(1))
        );
        assert!(coincidence_filter(&[], &[], 0.0, 0.0).is_err());
    }

    #[test]
    fn accidental_coincidences_are_rare() {
        // 10⁶ heralds on a regular grid, 100 dark counts/s, 1 ns window: 0.1 expected.
        let period = 1.0 / 3.6e6;
        let heralds: Vec<f64> = (0..1_000_000).map(|i| i as f64 * period).collect();
        let span = heralds.len() as f64 * period;
        let mut total = 0;
        for seed in 0..20 {
            let darks: Vec<Detection> = poisson_times(100.0, span, &mut rng::stream(seed, 9))
                .unwrap()
                .into_iter()
                .map(det)
                .collect();
            let n = coincidence_filter(&heralds, &darks, 1e-9, 0.0).unwrap().len();
            assert!(n <= 2, "{n}");
            total += n;
        }
        assert!(total <= 8, "{total}");
    }
}
