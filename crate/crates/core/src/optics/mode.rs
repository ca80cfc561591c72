use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Linear polarization basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

impl FromStr for Polarization {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" => Ok(Polarization::H),
            "V" => Ok(Polarization::V),
            _ => Err(()),
        }
    }
}

/// One optical mode: a spatial path, a polarization and a round-trip time bin.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeId {
    pub path: String,
    pub polarization: Polarization,
    pub time_bin: u32,
}

impl ModeId {
    pub fn new(path: impl Into<String>, polarization: Polarization, time_bin: u32) -> Self {
        Self {
            path: path.into(),
            polarization,
            time_bin,
        }
    }

    pub fn h(path: impl Into<String>) -> Self {
        Self::new(path, Polarization::H, 0)
    }

    pub fn v(path: impl Into<String>) -> Self {
        Self::new(path, Polarization::V, 0)
    }

    pub fn at_bin(&self, time_bin: u32) -> Self {
        Self {
            path: self.path.clone(),
            polarization: self.polarization,
            time_bin,
        }
    }

    pub fn with_polarization(&self, polarization: Polarization) -> Self {
        Self {
            path: self.path.clone(),
            polarization,
            time_bin: self.time_bin,
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}@{}", self.path, self.polarization, self.time_bin)
    }
}
