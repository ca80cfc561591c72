use std::collections::BTreeMap;

use num_complex::Complex64;

use super::program::{Program, Transform};
use crate::error::{Error, Result};
use crate::optics::{ModeId, Polarization};

/// Largest `(M-1)·N` for which path enumeration is attempted.
pub const MAX_PATH_DEPTH: u64 = 24;
/// Hard cap on the number of enumerated paths.
pub const MAX_PATHS: usize = 1 << 24;

/// Where a path ends.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathEnd {
    /// Still in flight at the end of the program.
    Mode(ModeId),
    /// Absorbed at `mode` by the transform at index `step`.
    Sink { label: String, step: usize, mode: ModeId },
}

/// One term of the Feynman sum over histories.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub amplitude: Complex64,
    /// Mode chosen at every two-way split, in order.
    pub arms: Vec<ModeId>,
    pub end: PathEnd,
    /// Detector whose ports contain the final mode.
    pub port: Option<String>,
    /// The path passed Bob's station.
    pub entered_channel: bool,
    /// The path passed Bob's station and came back to Alice's side.
    pub traversed_channel: bool,
}

#[derive(Clone)]
struct Particle {
    mode: ModeId,
    amp: Complex64,
    arms: Vec<ModeId>,
    entered: bool,
}

impl Particle {
    fn branch(&self, mode: ModeId, amp: Complex64, split: bool) -> Self {
        let mut arms = self.arms.clone();
        if split {
            arms.push(mode.clone());
        }
        Particle {
            mode,
            amp,
            arms,
            entered: self.entered,
        }
    }
}

/// Enumerates every photon history through the program, branching at each
/// two-mode transform. Branches with an exactly zero coefficient are dropped.
pub fn path_sum(program: &Program) -> Result<Vec<PathRecord>> {
    let depth = u64::from(program.outer_bs_count.saturating_sub(1)) * u64::from(program.inner_bs_count);
    if depth > MAX_PATH_DEPTH {
        return Err(Error::Size(format!(
            "path enumeration needs (M-1)*N <= {MAX_PATH_DEPTH}, got {depth}"
        )));
    }

    let mut live = vec![Particle {
        mode: program.input.clone(),
        amp: Complex64::new(1.0, 0.0),
        arms: Vec::new(),
        entered: false,
    }];
    let mut done: Vec<(Particle, PathEnd)> = Vec::new();

    for (index, step) in program.steps.iter().enumerate() {
        let mut next = Vec::with_capacity(live.len());
        for p in live {
            step_particle(p, &step.transform, index, program, &mut next, &mut done);
        }
        live = next;
        if live.len() + done.len() > MAX_PATHS {
            return Err(Error::Size(format!("more than {MAX_PATHS} paths")));
        }
    }

    let records = done
        .into_iter()
        .chain(live.into_iter().map(|p| {
            let end = PathEnd::Mode(p.mode.clone());
            (p, end)
        }))
        .map(|(p, end)| {
            let port = match &end {
                PathEnd::Mode(m) => program.detector_of(m).map(str::to_owned),
                PathEnd::Sink { .. } => None,
            };
            let back_home = !matches!(&end, PathEnd::Sink { label, .. } if label == super::SINK_BOB_BLOCK);
            PathRecord {
                amplitude: p.amp,
                arms: p.arms,
                port,
                entered_channel: p.entered,
                traversed_channel: p.entered && back_home,
                end,
            }
        })
        .collect();
    Ok(records)
}

fn step_particle(
    p: Particle,
    t: &Transform,
    index: usize,
    program: &Program,
    next: &mut Vec<Particle>,
    done: &mut Vec<(Particle, PathEnd)>,
) {
    let relabel = |p: Particle, mode: ModeId, next: &mut Vec<Particle>| {
        next.push(Particle { mode, ..p });
    };
    match t {
        Transform::Rotate { a, b, theta } if p.mode == *a || p.mode == *b => {
            let (s, c) = theta.sin_cos();
            let (to_a, to_b) = if p.mode == *a { (c, s) } else { (-s, c) };
            split(
                p,
                [(a, to_a), (b, to_b)].map(|(m, k)| (m.clone(), Complex64::new(k, 0.0))),
                next,
            );
        }
        Transform::Jones { path, time_bin, matrix } if p.mode.path == *path && p.mode.time_bin == *time_bin => {
            let col = p.mode.polarization.index();
            let h = ModeId::new(path.as_str(), Polarization::H, *time_bin);
            let v = h.with_polarization(Polarization::V);
            split(p, [(h, matrix.entry(0, col)), (v, matrix.entry(1, col))], next);
        }
        Transform::Pbs { input, h, v, time_bin } if p.mode.path == *input && p.mode.time_bin == *time_bin => {
            let out = match p.mode.polarization {
                Polarization::H => h,
                Polarization::V => v,
            };
            let mode = ModeId::new(out.as_str(), p.mode.polarization, *time_bin);
            relabel(p, mode, next);
        }
        Transform::Combine { h, v, out, time_bin } if p.mode.time_bin == *time_bin => {
            let hit = match p.mode.polarization {
                Polarization::H => p.mode.path == *h,
                Polarization::V => p.mode.path == *v,
            };
            if hit {
                let mode = ModeId::new(out.as_str(), p.mode.polarization, *time_bin);
                relabel(p, mode, next);
            } else {
                next.push(p);
            }
        }
        Transform::Route { from, to } if p.mode == *from => relabel(p, to.clone(), next),
        Transform::AdvanceBin { path, time_bin } if p.mode.path == *path && p.mode.time_bin == *time_bin => {
            let mode = p.mode.at_bin(time_bin + 1);
            relabel(p, mode, next);
        }
        Transform::Phase { mode, phi } if p.mode == *mode => {
            let amp = p.amp * Complex64::from_polar(1.0, *phi);
            next.push(Particle { amp, ..p });
        }
        Transform::Decohere { a, b, visibility } if p.mode == *a || p.mode == *b => {
            let amp = p.amp * visibility.sqrt();
            next.push(Particle { amp, ..p });
        }
        Transform::Absorb { mode, sink, fraction } if p.mode == *mode => {
            if *fraction > 0.0 {
                let end = PathEnd::Sink {
                    label: sink.clone(),
                    step: index,
                    mode: mode.clone(),
                };
                let absorbed = Particle {
                    amp: p.amp * fraction.sqrt(),
                    ..p.clone()
                };
                done.push((absorbed, end));
            }
            if *fraction < 1.0 {
                let amp = p.amp * (1.0 - fraction).sqrt();
                next.push(Particle { amp, ..p });
            }
        }
        Transform::Tap { mode } if p.mode == *mode => {
            let entered = p.entered || program.channel_modes.contains(mode);
            next.push(Particle { entered, ..p });
        }
        _ => next.push(p),
    }
}

fn split(p: Particle, children: [(ModeId, Complex64); 2], next: &mut Vec<Particle>) {
    let nonzero = children.iter().filter(|(_, k)| *k != Complex64::new(0.0, 0.0)).count();
    for (mode, k) in children {
        if k != Complex64::new(0.0, 0.0) {
            next.push(p.branch(mode, p.amp * k, nonzero == 2));
        }
    }
}

/// Coherent sum of path amplitudes per final mode.
pub fn amplitudes_by_mode(records: &[PathRecord]) -> BTreeMap<ModeId, Complex64> {
    let mut out: BTreeMap<ModeId, Complex64> = BTreeMap::new();
    for r in records {
        if let PathEnd::Mode(m) = &r.end {
            *out.entry(m.clone()).or_default() += r.amplitude;
        }
    }
    out
}

/// Absorbed probability per sink label, summing amplitudes that meet at the
/// same absorber before squaring.
pub fn sink_probabilities(records: &[PathRecord]) -> BTreeMap<String, f64> {
    let mut events: BTreeMap<(&str, usize, &ModeId), Complex64> = BTreeMap::new();
    for r in records {
        if let PathEnd::Sink { label, step, mode } = &r.end {
            *events.entry((label.as_str(), *step, mode)).or_default() += r.amplitude;
        }
    }
    let mut out = BTreeMap::new();
    for ((label, _, _), amp) in events {
        *out.entry(label.to_owned()).or_insert(0.0) += amp.norm_sqr();
    }
    out
}
