use std::collections::{BTreeMap, BTreeSet};

use super::types::*;
use super::ParseErrorKind;
use crate::engine::{self, Logic, Origin};
use crate::error::Error;

/// Part of a scenario a validation failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Header(&'static str),
    Path(usize),
    Input,
    Cavity,
    Detector(usize),
    Stage(usize),
    Noise(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invalid {
    pub kind: ParseErrorKind,
    pub message: String,
    pub at: Location,
}

fn bad(at: Location, message: impl Into<String>) -> Invalid {
    Invalid {
        kind: ParseErrorKind::BadParameter,
        message: message.into(),
        at,
    }
}

fn wiring(at: Location, message: impl Into<String>) -> Invalid {
    Invalid {
        kind: ParseErrorKind::WiringConflict,
        message: message.into(),
        at,
    }
}

impl From<Invalid> for Error {
    fn from(e: Invalid) -> Self {
        match e.kind {
            ParseErrorKind::WiringConflict => Error::InvalidWiring(e.message),
            _ => Error::InvalidElement(e.message),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks everything that can be decided without compiling.
pub fn validate_static(s: &Scenario) -> Result<(), Invalid> {
    if !is_identifier(&s.name) {
        return Err(bad(
            Location::Header("name"),
            format!("name {:?} is not an identifier", s.name),
        ));
    }
    if s.outer_bs_count < 2 {
        return Err(bad(
            Location::Header("M"),
            format!("M must be >= 2, got {}", s.outer_bs_count),
        ));
    }
    if s.inner_bs_count < 1 {
        return Err(bad(
            Location::Header("N"),
            format!("N must be >= 1, got {}", s.inner_bs_count),
        ));
    }
    let r = s.half_mirror_reflectivity;
    if !(r.is_finite() && (0.0..=1.0).contains(&r)) {
        return Err(bad(
            Location::Header("half_mirror_R"),
            format!("half_mirror_R must lie in [0, 1], got {r}"),
        ));
    }

    let mut declared = BTreeMap::new();
    for (i, p) in s.paths.iter().enumerate() {
        if !is_identifier(&p.name) {
            return Err(bad(
                Location::Path(i),
                format!("path name {:?} is not an identifier", p.name),
            ));
        }
        if declared.insert(p.name.as_str(), p).is_some() {
            return Err(wiring(Location::Path(i), format!("path {} declared twice", p.name)));
        }
    }
    let known = |at: Location, path: &str| -> Result<(), Invalid> {
        if declared.contains_key(path) {
            Ok(())
        } else {
            Err(wiring(at, format!("undeclared path {path}")))
        }
    };

    known(Location::Input, &s.input.path)?;

    if let Some(c) = &s.cavity {
        for p in [&c.entry, &c.cavity, &c.exit] {
            known(Location::Cavity, p)?;
        }
        if c.entry == c.cavity || c.entry == c.exit || c.cavity == c.exit {
            return Err(wiring(
                Location::Cavity,
                "loop entry, cavity and exit paths must be distinct",
            ));
        }
        if c.entry != s.input.path {
            return Err(wiring(
                Location::Cavity,
                format!("loop entry {} is not the input path {}", c.entry, s.input.path),
            ));
        }
    }

    let mut names = BTreeSet::new();
    let mut ports = BTreeMap::new();
    for (i, d) in s.detectors.iter().enumerate() {
        if !is_identifier(&d.name) {
            return Err(bad(
                Location::Detector(i),
                format!("detector name {:?} is not an identifier", d.name),
            ));
        }
        if !names.insert(d.name.as_str()) {
            return Err(wiring(
                Location::Detector(i),
                format!("detector {} declared twice", d.name),
            ));
        }
        if d.ports.is_empty() {
            return Err(bad(Location::Detector(i), format!("detector {} has no ports", d.name)));
        }
        for port in &d.ports {
            known(Location::Detector(i), &port.path)?;
            if let Some(other) = ports.insert(port.clone(), d.name.as_str()) {
                return Err(wiring(
                    Location::Detector(i),
                    format!("port {port} assigned to both {other} and {}", d.name),
                ));
            }
        }
    }
    for required in [engine::D0, engine::D1] {
        if !names.contains(required) {
            return Err(wiring(
                Location::Header("detector"),
                format!("detector {required} is required"),
            ));
        }
    }

    for (i, stage) in s.stages.iter().enumerate() {
        let at = Location::Stage(i);
        for p in stage.element.paths() {
            known(at, p)?;
        }
        validate_element(&declared, stage, at)?;
    }

    s.noise.validate().map_err(|e| match e {
        Error::Range { name, value, expected } => bad(
            Location::Noise(noise_key(name)),
            format!("{} = {value} is out of range ({expected})", noise_key(name)),
        ),
        other => bad(Location::Noise("source"), other.to_string()),
    })
}

fn noise_key(field: &'static str) -> &'static str {
    match field {
        "herald_detector_efficiency" => "herald_efficiency",
        other => other,
    }
}

fn validate_element(declared: &BTreeMap<&str, &PathDecl>, stage: &Stage, at: Location) -> Result<(), Invalid> {
    let distinct = |x: &ModeRef, y: &ModeRef, what: &str| {
        if x == y {
            Err(wiring(at, format!("{what} needs two distinct modes, got {x} twice")))
        } else {
            Ok(())
        }
    };
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(bad(at, format!("{name} must be finite")))
        }
    };
    match &stage.element {
        Element::Bs { a, b, .. } => distinct(a, b, "bs")?,
        Element::Visibility { a, b, .. } => distinct(a, b, "visibility")?,
        Element::Mirror { from, to } => distinct(from, to, "mirror")?,
        Element::Hwp { angle, .. } | Element::Qwp { angle, .. } => finite("angle", *angle)?,
        Element::Phase { phi, .. } => finite("phi", *phi)?,
        Element::Pbs { h, v, .. } | Element::Combine { h, v, .. } => {
            if h == v {
                return Err(wiring(
                    at,
                    format!("polarizing splitter ports must differ, both are {h}"),
                ));
            }
        }
        Element::Absorb { sink, fraction, .. } => {
            if !is_identifier(sink) {
                return Err(bad(at, format!("sink {sink:?} is not an identifier")));
            }
            if !(fraction.is_finite() && (0.0..=1.0).contains(fraction)) {
                return Err(bad(at, format!("fraction must lie in [0, 1], got {fraction}")));
            }
        }
        Element::Inner {
            arm,
            channel,
            ret,
            dark,
        } => {
            if stage.section != Section::Pass {
                return Err(wiring(at, "inner cycles belong to the pass section"));
            }
            // `ret` may reuse the arm mode: the arm port is routed away first.
            for (x, y) in [
                (arm, channel),
                (arm, dark),
                (channel, ret),
                (channel, dark),
                (ret, dark),
            ] {
                distinct(x, y, "inner")?;
            }
            if !declared[channel.path.as_str()].channel {
                return Err(wiring(
                    at,
                    format!("inner channel path {} is not marked `channel`", channel.path),
                ));
            }
            if declared[arm.path.as_str()].channel {
                return Err(wiring(
                    at,
                    format!("inner arm path {} must stay on Alice's side", arm.path),
                ));
            }
        }
    }
    Ok(())
}

/// Full validation: static checks plus a wiring dry-run of both logic values.
pub fn validate(s: &Scenario) -> Result<(), Invalid> {
    validate_static(s)?;
    for logic in [Logic::Zero, Logic::One] {
        let program = engine::compile_unchecked(s, logic, &s.noise);
        program.check_wiring().map_err(|(origin, message)| {
            let at = match origin {
                Origin::Stage(i) => Location::Stage(i),
                Origin::Entry | Origin::HalfMirror(_) | Origin::BinSelection(_) => Location::Cavity,
            };
            wiring(at, format!("{message} (logic {logic})"))
        })?;
    }
    Ok(())
}
