use std::ops::Add;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::exact::run_exact;
use super::program::Program;
use crate::error::{Error, Result};
use crate::noise::{NoiseConfig, SourceKind, SourceModel};
use crate::rng;

/// Trials per parallel work unit. Fixed so the split never depends on the pool.
const CHUNK: u64 = 4096;

/// What Alice records for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    D0,
    D1,
    /// D0 and D1 both fired; discarded.
    Double,
    /// Only the dark-port detector fired.
    Df,
    None,
}

impl Outcome {
    /// Decoded bit for a conclusive outcome.
    pub fn bit(self) -> Option<u8> {
        match self {
            Outcome::D0 => Some(0),
            Outcome::D1 => Some(1),
            _ => None,
        }
    }

    pub fn is_conclusive(self) -> bool {
        self.bit().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OutcomeCounts {
    pub trials: u64,
    pub d0: u64,
    pub d1: u64,
    pub df: u64,
    pub double: u64,
    pub none: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, o: Outcome) {
        self.trials += 1;
        match o {
            Outcome::D0 => self.d0 += 1,
            Outcome::D1 => self.d1 += 1,
            Outcome::Df => self.df += 1,
            Outcome::Double => self.double += 1,
            Outcome::None => self.none += 1,
        }
    }

    pub fn conclusive(&self) -> u64 {
        self.d0 + self.d1
    }

    /// Fraction of conclusive trials that were D0.
    pub fn d0_given_conclusive(&self) -> Option<f64> {
        let c = self.conclusive();
        (c > 0).then(|| self.d0 as f64 / c as f64)
    }
}

impl Add for OutcomeCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            d0: self.d0 + o.d0,
            d1: self.d1 + o.d1,
            df: self.df + o.df,
            double: self.double + o.double,
            none: self.none + o.none,
        }
    }
}

/// Per-trial click model built from exact port probabilities and the detection chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialModel {
    /// Arrival probabilities at D0, D1, Df.
    pub ports: [f64; 3],
    pub detector_efficiency: f64,
    pub dark_click: f64,
    pub kind: SourceKind,
    pub mean_photon_number: f64,
}

impl TrialModel {
    pub fn new(ports: [f64; 3], source: &SourceModel, noise: &NoiseConfig) -> Result<Self> {
        source.validate()?;
        noise.validate()?;
        Ok(Self {
            ports,
            detector_efficiency: noise.detector_efficiency,
            dark_click: noise.dark_click_probability(),
            kind: source.kind,
            mean_photon_number: source.mean_photon_number,
        })
    }

    pub fn from_program(program: &Program, source: &SourceModel, noise: &NoiseConfig) -> Result<Self> {
        let exact = run_exact(program)?;
        Self::new([exact.p_d0(), exact.p_d1(), exact.p_df()], source, noise)
    }

    /// Draws one trial. Always consumes the same number of random values.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Outcome {
        let mut clicks = [false; 3];
        match self.kind {
            SourceKind::HeraldedSingle => {
                let u: f64 = rng.random();
                let detected = rng.random::<f64>() < self.detector_efficiency;
                let mut acc = 0.0;
                for (i, p) in self.ports.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        clicks[i] = detected;
                        break;
                    }
                }
            }
            SourceKind::Coherent => {
                for (i, p) in self.ports.iter().enumerate() {
                    let mean = self.mean_photon_number * p * self.detector_efficiency;
                    clicks[i] = rng.random::<f64>() < -(-mean).exp_m1();
                }
            }
        }
        for c in clicks.iter_mut() {
            let dark = rng.random::<f64>() < self.dark_click;
            *c |= dark;
        }
        match clicks {
            [true, true, _] => Outcome::Double,
            [true, false, _] => Outcome::D0,
            [false, true, _] => Outcome::D1,
            [false, false, true] => Outcome::Df,
            [false, false, false] => Outcome::None,
        }
    }
}

/// Samples `trials` trials; trial `i` uses random stream `(seed, i)`.
pub fn run_monte_carlo(
    program: &Program,
    source: &SourceModel,
    noise: &NoiseConfig,
    trials: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    if trials == 0 {
        return Err(Error::Range {
            name: "trials",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let model = TrialModel::from_program(program, source, noise)?;
    let chunks = trials.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = OutcomeCounts::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                counts.record(model.sample(&mut rng::stream(seed, i)));
            }
            counts
        })
        .reduce(OutcomeCounts::default, Add::add))
}

/// Same as [`run_monte_carlo`] on a dedicated pool of `workers` threads.
pub fn run_monte_carlo_with_workers(
    program: &Program,
    source: &SourceModel,
    noise: &NoiseConfig,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<OutcomeCounts> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Size(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_monte_carlo(program, source, noise, trials, seed))
}
