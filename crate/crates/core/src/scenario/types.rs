use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::noise::NoiseConfig;
use crate::optics::{ModeId, Polarization};

/// Current scenario file format version.
pub const FORMAT_VERSION: u32 = 1;

/// What Bob's logic-1 ("block") action does to the inner interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockingModel {
    /// The inner cycle is removed entirely: everything entering it is absorbed.
    FullBreak,
    /// Only light in the channel arm is absorbed at Bob's station.
    ChannelOnly,
}

impl fmt::Display for BlockingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockingModel::FullBreak => "FullBreak",
            BlockingModel::ChannelOnly => "ChannelOnly",
        })
    }
}

/// `path.H` or `path.V`; the time bin is supplied by the compiler.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeRef {
    pub path: String,
    pub polarization: Polarization,
}

impl ModeRef {
    pub fn new(path: impl Into<String>, polarization: Polarization) -> Self {
        Self {
            path: path.into(),
            polarization,
        }
    }

    pub fn at(&self, time_bin: u32) -> ModeId {
        ModeId::new(self.path.clone(), self.polarization, time_bin)
    }
}

impl fmt::Display for ModeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.path, self.polarization)
    }
}

/// Beam-splitter angles are always derived from M or N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleSpec {
    /// π/2M
    Outer,
    /// π/2N
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interferometer {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Section {
    /// Repeated once per outer cycle.
    Pass,
    /// Applied once to the exiting light before detection.
    Readout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Element {
    Bs {
        a: ModeRef,
        b: ModeRef,
        angle: AngleSpec,
    },
    Hwp {
        path: String,
        angle: f64,
    },
    Qwp {
        path: String,
        angle: f64,
    },
    Pbs {
        input: String,
        h: String,
        v: String,
    },
    Combine {
        h: String,
        v: String,
        out: String,
    },
    Mirror {
        from: ModeRef,
        to: ModeRef,
    },
    Phase {
        mode: ModeRef,
        phi: f64,
    },
    Absorb {
        mode: ModeRef,
        sink: String,
        fraction: f64,
    },
    Visibility {
        a: ModeRef,
        b: ModeRef,
        of: Interferometer,
    },
    /// Inner Zeno cycle: N beam splitters between `arm` and `channel`, with
    /// the channel visiting Bob between consecutive splitters. Afterwards the
    /// channel-side port routes to `ret` and the arm-side port to `dark`.
    Inner {
        arm: ModeRef,
        channel: ModeRef,
        ret: ModeRef,
        dark: ModeRef,
    },
}

impl Element {
    pub fn keyword(&self) -> &'static str {
        match self {
            Element::Bs { .. } => "bs",
            Element::Hwp { .. } => "hwp",
            Element::Qwp { .. } => "qwp",
            Element::Pbs { .. } => "pbs",
            Element::Combine { .. } => "combine",
            Element::Mirror { .. } => "mirror",
            Element::Phase { .. } => "phase",
            Element::Absorb { .. } => "absorb",
            Element::Visibility { .. } => "visibility",
            Element::Inner { .. } => "inner",
        }
    }

    /// Every path this element touches.
    pub fn paths(&self) -> Vec<&str> {
        match self {
            Element::Bs { a, b, .. } | Element::Visibility { a, b, .. } => vec![&a.path, &b.path],
            Element::Hwp { path, .. } | Element::Qwp { path, .. } => vec![path],
            Element::Pbs { input, h, v } => vec![input, h, v],
            Element::Combine { h, v, out } => vec![h, v, out],
            Element::Mirror { from, to } => vec![&from.path, &to.path],
            Element::Phase { mode, .. } | Element::Absorb { mode, .. } => vec![&mode.path],
            Element::Inner {
                arm,
                channel,
                ret,
                dark,
            } => vec![&arm.path, &channel.path, &ret.path, &dark.path],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub section: Section,
    pub element: Element,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDecl {
    pub name: String,
    /// Crosses the Alice–Bob boundary.
    pub channel: bool,
}

/// Half-mirror loop: light enters from `entry`, circulates in `cavity`,
/// and leaves through `exit` after each pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CavitySpec {
    pub entry: String,
    pub cavity: String,
    pub exit: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detector {
    pub name: String,
    pub ports: Vec<ModeRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// M, number of outer beam splitters.
    pub outer_bs_count: u32,
    /// N, number of inner beam splitters.
    pub inner_bs_count: u32,
    pub half_mirror_reflectivity: f64,
    pub blocking_model: BlockingModel,
    pub seed: u64,
    pub paths: Vec<PathDecl>,
    pub input: ModeRef,
    pub cavity: Option<CavitySpec>,
    pub detectors: Vec<Detector>,
    pub stages: Vec<Stage>,
    pub noise: NoiseConfig,
}

impl Scenario {
    /// π/2M
    pub fn outer_angle(&self) -> f64 {
        PI / (2.0 * self.outer_bs_count as f64)
    }

    /// π/2N
    pub fn inner_angle(&self) -> f64 {
        PI / (2.0 * self.inner_bs_count as f64)
    }

    pub fn angle(&self, spec: AngleSpec) -> f64 {
        match spec {
            AngleSpec::Outer => self.outer_angle(),
            AngleSpec::Inner => self.inner_angle(),
        }
    }

    /// Rotation angle of the half mirror viewed as a beam splitter of reflectivity R.
    pub fn half_mirror_angle(&self) -> f64 {
        self.half_mirror_reflectivity.sqrt().acos()
    }

    /// Number of passes through the interferometer, M − 1.
    pub fn outer_cycles(&self) -> u32 {
        self.outer_bs_count - 1
    }

    pub fn path(&self, name: &str) -> Option<&PathDecl> {
        self.paths.iter().find(|p| p.name == name)
    }

    pub fn detector(&self, name: &str) -> Option<&Detector> {
        self.detectors.iter().find(|d| d.name == name)
    }
}
