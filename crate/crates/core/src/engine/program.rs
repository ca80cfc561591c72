use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{SINK_BOB_BLOCK, SINK_ENTRY, SINK_WRONG_BIN};
use crate::error::{Error, Result};
use crate::noise::NoiseConfig;
use crate::optics::{JonesMatrix, ModeId, Polarization};
use crate::scenario::{validate, BlockingModel, Element, Interferometer, Scenario, Section};

/// Bob's setting for one bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Logic {
    /// Pass: Bob's mirrors in place, channel clear.
    Zero,
    /// Block.
    One,
}

impl Logic {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Logic::One
        } else {
            Logic::Zero
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Logic::Zero => 0,
            Logic::One => 1,
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Rotate {
        a: ModeId,
        b: ModeId,
        theta: f64,
    },
    Jones {
        path: String,
        time_bin: u32,
        matrix: JonesMatrix,
    },
    Pbs {
        input: String,
        h: String,
        v: String,
        time_bin: u32,
    },
    Combine {
        h: String,
        v: String,
        out: String,
        time_bin: u32,
    },
    Route {
        from: ModeId,
        to: ModeId,
    },
    Phase {
        mode: ModeId,
        phi: f64,
    },
    Absorb {
        mode: ModeId,
        sink: String,
        fraction: f64,
    },
    Decohere {
        a: ModeId,
        b: ModeId,
        visibility: f64,
    },
    /// Bob's station: records the intensity crossing `mode`.
    Tap {
        mode: ModeId,
    },
    AdvanceBin {
        path: String,
        time_bin: u32,
    },
}

/// Where a transform came from, for error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Stage(usize),
    Entry,
    HalfMirror(u32),
    BinSelection(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub transform: Transform,
    pub origin: Origin,
}

/// A scenario unrolled for one logic value: an ordered list of mode transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub scenario: String,
    pub logic: Logic,
    pub outer_bs_count: u32,
    pub inner_bs_count: u32,
    pub input: ModeId,
    pub steps: Vec<Step>,
    /// Detector name to the modes it integrates over, in declaration order.
    pub detectors: Vec<(String, BTreeSet<ModeId>)>,
    /// Modes on the Alice–Bob link, visited at Bob's station.
    pub channel_modes: BTreeSet<ModeId>,
    /// Index of the first step of each outer cycle.
    pub cycle_boundaries: Vec<usize>,
}

impl Program {
    pub fn outer_cycles(&self) -> usize {
        self.cycle_boundaries.len()
    }

    pub fn detector_of(&self, mode: &ModeId) -> Option<&str> {
        self.detectors
            .iter()
            .find(|(_, modes)| modes.contains(mode))
            .map(|(name, _)| name.as_str())
    }

    pub fn detector_ports(&self) -> impl Iterator<Item = (&str, &BTreeSet<ModeId>)> {
        self.detectors.iter().map(|(n, m)| (n.as_str(), m))
    }

    /// Conservative occupancy walk: fails if any routing step could move
    /// light onto a mode that might already hold some.
    pub fn check_wiring(&self) -> std::result::Result<(), (Origin, String)> {
        let mut occupied: BTreeSet<ModeId> = BTreeSet::new();
        occupied.insert(self.input.clone());

        fn relocate(occ: &mut BTreeSet<ModeId>, from: &ModeId, to: &ModeId) -> std::result::Result<(), String> {
            if from == to || !occ.contains(from) {
                return Ok(());
            }
            if occ.contains(to) {
                return Err(format!("{from} would be routed onto occupied mode {to}"));
            }
            occ.remove(from);
            occ.insert(to.clone());
            Ok(())
        }

        for step in &self.steps {
            let fail = |m: String| (step.origin, m);
            match &step.transform {
                Transform::Rotate { a, b, .. } => {
                    if a == b {
                        return Err(fail(format!("rotation on a single mode {a}")));
                    }
                    if occupied.contains(a) || occupied.contains(b) {
                        occupied.insert(a.clone());
                        occupied.insert(b.clone());
                    }
                }
                Transform::Decohere { a, b, .. } => {
                    if a == b {
                        return Err(fail(format!("visibility on a single mode {a}")));
                    }
                }
                Transform::Jones { path, time_bin, .. } => {
                    let h = ModeId::new(path.as_str(), Polarization::H, *time_bin);
                    let v = h.with_polarization(Polarization::V);
                    if occupied.contains(&h) || occupied.contains(&v) {
                        occupied.insert(h);
                        occupied.insert(v);
                    }
                }
                Transform::Pbs { input, h, v, time_bin } => {
                    if h == v {
                        return Err(fail(format!("PBS outputs both {h}")));
                    }
                    let t = *time_bin;
                    relocate(
                        &mut occupied,
                        &ModeId::new(input.as_str(), Polarization::H, t),
                        &ModeId::new(h.as_str(), Polarization::H, t),
                    )
                    .map_err(fail)?;
                    relocate(
                        &mut occupied,
                        &ModeId::new(input.as_str(), Polarization::V, t),
                        &ModeId::new(v.as_str(), Polarization::V, t),
                    )
                    .map_err(fail)?;
                }
                Transform::Combine { h, v, out, time_bin } => {
                    if h == v {
                        return Err(fail(format!("PBS inputs both {h}")));
                    }
                    let t = *time_bin;
                    relocate(
                        &mut occupied,
                        &ModeId::new(h.as_str(), Polarization::H, t),
                        &ModeId::new(out.as_str(), Polarization::H, t),
                    )
                    .map_err(fail)?;
                    relocate(
                        &mut occupied,
                        &ModeId::new(v.as_str(), Polarization::V, t),
                        &ModeId::new(out.as_str(), Polarization::V, t),
                    )
                    .map_err(fail)?;
                }
                Transform::Route { from, to } => relocate(&mut occupied, from, to).map_err(fail)?,
                Transform::AdvanceBin { path, time_bin } => {
                    for pol in Polarization::BOTH {
                        let from = ModeId::new(path.as_str(), pol, *time_bin);
                        relocate(&mut occupied, &from, &from.at_bin(time_bin + 1)).map_err(fail)?;
                    }
                }
                Transform::Absorb { mode, fraction, .. } => {
                    if *fraction >= 1.0 {
                        occupied.remove(mode);
                    }
                }
                Transform::Phase { .. } | Transform::Tap { .. } => {}
            }
        }
        Ok(())
    }
}

struct Builder {
    steps: Vec<Step>,
    channel_modes: BTreeSet<ModeId>,
}

impl Builder {
    fn push(&mut self, transform: Transform, origin: Origin) {
        self.steps.push(Step { transform, origin });
    }
}

/// Compiles a validated scenario for one logic value, using the scenario's noise.
pub fn compile(s: &Scenario, logic: Logic) -> Result<Program> {
    compile_with_noise(s, logic, &s.noise)
}

/// Compiles with an explicit noise configuration (visibilities are baked in).
pub fn compile_with_noise(s: &Scenario, logic: Logic, noise: &NoiseConfig) -> Result<Program> {
    validate(s)?;
    noise.validate()?;
    let program = compile_unchecked(s, logic, noise);
    program
        .check_wiring()
        .map_err(|(_, m)| Error::InvalidWiring(format!("internal: {m}")))?;
    Ok(program)
}

/// Unrolls without validating. Used by validation itself.
pub(crate) fn compile_unchecked(s: &Scenario, logic: Logic, noise: &NoiseConfig) -> Program {
    let mut b = Builder {
        steps: Vec::new(),
        channel_modes: BTreeSet::new(),
    };
    let cycles = s.outer_cycles();
    let mut boundaries = Vec::with_capacity(cycles as usize);
    let input = s.input.at(0);

    let last_bin = match &s.cavity {
        Some(cav) => {
            let theta = s.half_mirror_angle();
            for pol in Polarization::BOTH {
                b.push(
                    Transform::Rotate {
                        a: ModeId::new(cav.entry.as_str(), pol, 0),
                        b: ModeId::new(cav.cavity.as_str(), pol, 0),
                        theta,
                    },
                    Origin::Entry,
                );
            }
            for pol in Polarization::BOTH {
                b.push(
                    Transform::Absorb {
                        mode: ModeId::new(cav.entry.as_str(), pol, 0),
                        sink: SINK_ENTRY.into(),
                        fraction: 1.0,
                    },
                    Origin::Entry,
                );
            }
            for k in 0..cycles {
                boundaries.push(b.steps.len());
                emit_section(&mut b, s, logic, noise, Section::Pass, k);
                for pol in Polarization::BOTH {
                    b.push(
                        Transform::Rotate {
                            a: ModeId::new(cav.cavity.as_str(), pol, k),
                            b: ModeId::new(cav.exit.as_str(), pol, k),
                            theta,
                        },
                        Origin::HalfMirror(k),
                    );
                }
                // only the exit after the last pass is kept
                let discard = if k + 1 < cycles { &cav.exit } else { &cav.cavity };
                for pol in Polarization::BOTH {
                    b.push(
                        Transform::Absorb {
                            mode: ModeId::new(discard.as_str(), pol, k),
                            sink: SINK_WRONG_BIN.into(),
                            fraction: 1.0,
                        },
                        Origin::BinSelection(k),
                    );
                }
                if k + 1 < cycles {
                    b.push(
                        Transform::AdvanceBin {
                            path: cav.cavity.clone(),
                            time_bin: k,
                        },
                        Origin::HalfMirror(k),
                    );
                }
            }
            cycles - 1
        }
        None => {
            for _ in 0..cycles {
                boundaries.push(b.steps.len());
                emit_section(&mut b, s, logic, noise, Section::Pass, 0);
            }
            0
        }
    };
    emit_section(&mut b, s, logic, noise, Section::Readout, last_bin);

    let detectors = s
        .detectors
        .iter()
        .map(|d| {
            let modes = d
                .ports
                .iter()
                .flat_map(|p| (0..=last_bin).map(move |bin| p.at(bin)))
                .collect();
            (d.name.clone(), modes)
        })
        .collect();

    Program {
        scenario: s.name.clone(),
        logic,
        outer_bs_count: s.outer_bs_count,
        inner_bs_count: s.inner_bs_count,
        input,
        steps: b.steps,
        detectors,
        channel_modes: b.channel_modes,
        cycle_boundaries: boundaries,
    }
}

fn emit_section(b: &mut Builder, s: &Scenario, logic: Logic, noise: &NoiseConfig, section: Section, bin: u32) {
    for (i, stage) in s.stages.iter().enumerate() {
        if stage.section != section {
            continue;
        }
        let origin = Origin::Stage(i);
        match &stage.element {
            Element::Bs { a, b: other, angle } => b.push(
                Transform::Rotate {
                    a: a.at(bin),
                    b: other.at(bin),
                    theta: s.angle(*angle),
                },
                origin,
            ),
            Element::Hwp { path, angle } => b.push(
                Transform::Jones {
                    path: path.clone(),
                    time_bin: bin,
                    matrix: JonesMatrix::half_wave_plate(*angle),
                },
                origin,
            ),
            Element::Qwp { path, angle } => b.push(
                Transform::Jones {
                    path: path.clone(),
                    time_bin: bin,
                    matrix: JonesMatrix::quarter_wave_plate(*angle),
                },
                origin,
            ),
            Element::Pbs { input, h, v } => b.push(
                Transform::Pbs {
                    input: input.clone(),
                    h: h.clone(),
                    v: v.clone(),
                    time_bin: bin,
                },
                origin,
            ),
            Element::Combine { h, v, out } => b.push(
                Transform::Combine {
                    h: h.clone(),
                    v: v.clone(),
                    out: out.clone(),
                    time_bin: bin,
                },
                origin,
            ),
            Element::Mirror { from, to } => b.push(
                Transform::Route {
                    from: from.at(bin),
                    to: to.at(bin),
                },
                origin,
            ),
            Element::Phase { mode, phi } => b.push(
                Transform::Phase {
                    mode: mode.at(bin),
                    phi: *phi,
                },
                origin,
            ),
            Element::Absorb { mode, sink, fraction } => b.push(
                Transform::Absorb {
                    mode: mode.at(bin),
                    sink: sink.clone(),
                    fraction: *fraction,
                },
                origin,
            ),
            Element::Visibility { a, b: other, of } => b.push(
                Transform::Decohere {
                    a: a.at(bin),
                    b: other.at(bin),
                    visibility: match of {
                        Interferometer::Outer => noise.visibility_outer,
                        Interferometer::Inner => noise.visibility_inner,
                    },
                },
                origin,
            ),
            Element::Inner {
                arm,
                channel,
                ret,
                dark,
            } => {
                let arm = arm.at(bin);
                let ch = channel.at(bin);
                let theta = s.inner_angle();
                let n = s.inner_bs_count;
                b.channel_modes.insert(ch.clone());
                if logic == Logic::One && s.blocking_model == BlockingModel::FullBreak {
                    // mirrors removed: nothing returns from the inner cycle
                    b.push(
                        Transform::Rotate {
                            a: arm.clone(),
                            b: ch.clone(),
                            theta,
                        },
                        origin,
                    );
                    b.push(Transform::Tap { mode: ch.clone() }, origin);
                    for mode in [ch, arm] {
                        b.push(
                            Transform::Absorb {
                                mode,
                                sink: SINK_BOB_BLOCK.into(),
                                fraction: 1.0,
                            },
                            origin,
                        );
                    }
                    continue;
                }
                for k in 0..n {
                    if k + 1 == n && n >= 2 {
                        b.push(
                            Transform::Decohere {
                                a: arm.clone(),
                                b: ch.clone(),
                                visibility: noise.visibility_inner,
                            },
                            origin,
                        );
                    }
                    b.push(
                        Transform::Rotate {
                            a: arm.clone(),
                            b: ch.clone(),
                            theta,
                        },
                        origin,
                    );
                    if k + 1 < n {
                        b.push(Transform::Tap { mode: ch.clone() }, origin);
                        if logic == Logic::One {
                            b.push(
                                Transform::Absorb {
                                    mode: ch.clone(),
                                    sink: SINK_BOB_BLOCK.into(),
                                    fraction: 1.0,
                                },
                                origin,
                            );
                        }
                    }
                }
                b.push(
                    Transform::Route {
                        from: arm,
                        to: dark.at(bin),
                    },
                    origin,
                );
                b.push(
                    Transform::Route {
                        from: ch,
                        to: ret.at(bin),
                    },
                    origin,
                );
            }
        }
    }
}

/// Sinks a compiled program may write to, besides user `absorb` sinks.
pub fn standard_sinks() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        (SINK_ENTRY, "reflected by the half mirror on entry"),
        (SINK_WRONG_BIN, "left the cavity after the wrong number of passes"),
        (SINK_BOB_BLOCK, "absorbed by Bob's block"),
    ])
}
