use rand::Rng;
use serde::Serialize;

use super::MonoImage;
use crate::engine::{compile_with_noise, Logic, Outcome, TrialModel};
use crate::error::{Error, Result};
use crate::noise::NoiseConfig;
use crate::rng;
use crate::scenario::Scenario;

pub const DEFAULT_ATTEMPT_CAP: u64 = 10_000;

/// Conclusive detector behind a decoded bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Detector {
    D0,
    D1,
}

impl Detector {
    pub fn bit(self) -> u8 {
        match self {
            Detector::D0 => 0,
            Detector::D1 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BitTrial {
    pub bit_sent: u8,
    pub attempts: u64,
    pub outcome_detector: Detector,
    pub bit_decoded: u8,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageStats {
    pub bits: usize,
    pub bits_logic0: usize,
    pub bits_logic1: usize,
    pub errors_logic0: usize,
    pub errors_logic1: usize,
    /// Fraction of logic-0 bits decoded correctly; `None` if none were sent.
    pub rate_logic0: Option<f64>,
    pub rate_logic1: Option<f64>,
    pub mean_attempts: f64,
    /// Single-photon trials spent on the whole transfer.
    pub total_trials: u64,
    pub pixel_errors: usize,
}

/// Alice–Bob link for one scenario and noise setting, with the per-trial
/// click model precomputed for both logic values.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    models: [TrialModel; 2],
    pub attempt_cap: u64,
    /// Conclusive outcomes per bit; the bit is decided by majority. 1 disables voting.
    pub majority: u32,
}

impl Link {
    pub fn new(s: &Scenario, noise: &NoiseConfig) -> Result<Self> {
        let model = |logic| -> Result<TrialModel> {
            TrialModel::from_program(&compile_with_noise(s, logic, noise)?, &noise.source, noise)
        };
        Ok(Self {
            models: [model(Logic::Zero)?, model(Logic::One)?],
            attempt_cap: DEFAULT_ATTEMPT_CAP,
            majority: 1,
        })
    }

    pub fn with_attempt_cap(mut self, cap: u64) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Range {
                name: "attempt_cap",
                value: 0.0,
                expected: ">= 1",
            });
        }
        self.attempt_cap = cap;
        Ok(self)
    }

    pub fn with_majority(mut self, k: u32) -> Result<Self> {
        if k.is_multiple_of(2) {
            return Err(Error::Range {
                name: "majority",
                value: f64::from(k),
                expected: "odd and >= 1",
            });
        }
        self.majority = k;
        Ok(self)
    }

    pub fn model(&self, bit: u8) -> &TrialModel {
        &self.models[usize::from(bit != 0)]
    }

    fn check_bit(bit: u8) -> Result<()> {
        if bit > 1 {
            return Err(Error::Range {
                name: "bit",
                value: f64::from(bit),
                expected: "0 or 1",
            });
        }
        Ok(())
    }
}

/// Alice's side of one bit: collects conclusive outcomes until the bit is decided.
#[derive(Debug, Clone, Copy)]
struct Receiver {
    votes: [u32; 2],
    needed: u32,
}

impl Receiver {
    fn new(majority: u32) -> Self {
        Self {
            votes: [0; 2],
            needed: majority / 2 + 1,
        }
    }

    fn observe(&mut self, outcome: Outcome) -> Option<Detector> {
        let bit = outcome.bit()?;
        self.votes[usize::from(bit)] += 1;
        if self.votes[0] >= self.needed {
            Some(Detector::D0)
        } else if self.votes[1] >= self.needed {
            Some(Detector::D1)
        } else {
            None
        }
    }
}

fn finish(bit: u8, attempts: u64, det: Detector) -> BitTrial {
    BitTrial {
        bit_sent: bit,
        attempts,
        outcome_detector: det,
        bit_decoded: det.bit(),
        correct: det.bit() == bit,
    }
}

/// Repeats trials with Bob set to `bit` until Alice decodes it.
pub fn transmit_bit<R: Rng + ?Sized>(link: &Link, bit: u8, rng: &mut R, bit_index: usize) -> Result<BitTrial> {
    Link::check_bit(bit)?;
    let model = link.model(bit);
    let mut alice = Receiver::new(link.majority);
    for attempt in 1..=link.attempt_cap {
        if let Some(det) = alice.observe(model.sample(rng)) {
            return Ok(finish(bit, attempt, det));
        }
    }
    Err(Error::ChannelInfeasible {
        bit_index,
        attempts: link.attempt_cap,
    })
}

/// Bob's side: holds the message and a cursor that only moves on feedback.
#[derive(Debug, Clone)]
pub struct Sender {
    bits: Vec<u8>,
    cursor: usize,
}

impl Sender {
    pub fn new(bits: Vec<u8>) -> Self {
        Self { bits, cursor: 0 }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Current setting, or `None` when the message is done.
    pub fn setting(&self) -> Option<u8> {
        self.bits.get(self.cursor).copied()
    }

    /// Alice's feedback after a trial; `done` means she decoded the current bit.
    pub fn feedback(&mut self, done: bool) {
        if done && self.cursor < self.bits.len() {
            self.cursor += 1;
        }
    }
}

/// One trial as seen by both parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// Bob's cursor when the trial ran.
    pub bit_index: usize,
    pub setting: u8,
    pub outcome: Outcome,
    /// Feedback sent back to Bob after this trial.
    pub done: bool,
}

/// Sends `bits` one after another; bit `i` draws from random stream `(seed, i)`.
pub fn transmit_bits(
    link: &Link,
    bits: &[u8],
    seed: u64,
    mut trace: Option<&mut Vec<TraceEntry>>,
) -> Result<Vec<BitTrial>> {
    if bits.is_empty() {
        return Err(Error::EmptyInput("message"));
    }
    for &b in bits {
        Link::check_bit(b)?;
    }
    let mut bob = Sender::new(bits.to_vec());
    let mut trials = Vec::with_capacity(bits.len());
    while let Some(setting) = bob.setting() {
        let index = bob.cursor();
        let mut stream = rng::stream(seed, index as u64);
        let mut alice = Receiver::new(link.majority);
        let mut attempts = 0;
        loop {
            if attempts == link.attempt_cap {
                return Err(Error::ChannelInfeasible {
                    bit_index: index,
                    attempts,
                });
            }
            attempts += 1;
            let outcome = link.model(setting).sample(&mut stream);
            let decoded = alice.observe(outcome);
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceEntry {
                    bit_index: index,
                    setting,
                    outcome,
                    done: decoded.is_some(),
                });
            }
            bob.feedback(decoded.is_some());
            if let Some(det) = decoded {
                trials.push(finish(setting, attempts, det));
                break;
            }
        }
    }
    Ok(trials)
}

/// Sends every pixel of `img` and rebuilds the image from Alice's decisions.
pub fn transmit_image(link: &Link, img: &MonoImage, seed: u64) -> Result<(MonoImage, ImageStats)> {
    let trials = transmit_bits(link, &img.bits(), seed, None)?;
    let decoded: Vec<u8> = trials.iter().map(|t| t.bit_decoded).collect();
    let out = MonoImage::from_bits(img.width(), img.height(), &decoded)?;
    Ok((out, summarize(&trials)?))
}

pub fn summarize(trials: &[BitTrial]) -> Result<ImageStats> {
    if trials.is_empty() {
        return Err(Error::EmptyInput("trials"));
    }
    let mut sent = [0usize; 2];
    let mut errors = [0usize; 2];
    let mut total = 0u64;
    for t in trials {
        let i = usize::from(t.bit_sent);
        sent[i] += 1;
        errors[i] += usize::from(!t.correct);
        total += t.attempts;
    }
    let rate = |i: usize| (sent[i] > 0).then(|| (sent[i] - errors[i]) as f64 / sent[i] as f64);
    Ok(ImageStats {
        bits: trials.len(),
        bits_logic0: sent[0],
        bits_logic1: sent[1],
        errors_logic0: errors[0],
        errors_logic1: errors[1],
        rate_logic0: rate(0),
        rate_logic1: rate(1),
        mean_attempts: total as f64 / trials.len() as f64,
        total_trials: total,
        pixel_errors: errors[0] + errors[1],
    })
}
