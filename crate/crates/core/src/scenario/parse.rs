use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::*;
use super::validate::{is_identifier, validate, Location};
use crate::noise::{NoiseConfig, SourceKind};
use crate::optics::Polarization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseErrorKind {
    Syntax,
    UnknownElement,
    BadParameter,
    WiringConflict,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownElement => "unknown element",
            ParseErrorKind::BadParameter => "bad parameter",
            ParseErrorKind::WiringConflict => "wiring conflict",
        })
    }
}

/// First problem found in a scenario source, with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn err(kind: ParseErrorKind, line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column: col,
        message: message.into(),
        kind,
    }
}

fn syntax(t: &Tok<'_>, message: impl Into<String>) -> ParseError {
    err(ParseErrorKind::Syntax, t.line, t.col, message)
}

fn bad(t: &Tok<'_>, message: impl Into<String>) -> ParseError {
    err(ParseErrorKind::BadParameter, t.line, t.col, message)
}

/// Splits a line (comment already stripped) on whitespace, with `=` as its own token.
fn tokenize(line_no: usize, text: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut start: Option<usize> = None;
    let col_of = |byte: usize| text[..byte].chars().count() + 1;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() || ch == '=' {
            if let Some(s) = start.take() {
                toks.push(Tok {
                    text: &text[s..i],
                    line: line_no,
                    col: col_of(s),
                });
            }
            if ch == '=' {
                toks.push(Tok {
                    text: "=",
                    line: line_no,
                    col: col_of(i),
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok {
            text: &text[s..],
            line: line_no,
            col: col_of(s),
        });
    }
    toks
}

/// Number literal: a decimal float, `pi`, `pi/K` or `-pi/K`.
fn parse_number(t: &Tok<'_>) -> Result<f64, ParseError> {
    let (neg, body) = match t.text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.text),
    };
    let value = if body == "pi" {
        Some(PI)
    } else if let Some(div) = body.strip_prefix("pi/") {
        div.parse::<u32>().ok().filter(|&k| k > 0).map(|k| PI / k as f64)
    } else {
        None
    };
    let value = match value {
        Some(v) if neg => -v,
        Some(v) => v,
        None => t
            .text
            .parse::<f64>()
            .map_err(|_| bad(t, format!("expected a number, found {:?}", t.text)))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad(t, format!("number {:?} is not finite", t.text)))
    }
}

fn parse_mode(t: &Tok<'_>) -> Result<ModeRef, ParseError> {
    let (path, pol) = t
        .text
        .rsplit_once('.')
        .ok_or_else(|| bad(t, format!("expected a mode like path.H, found {:?}", t.text)))?;
    if !is_identifier(path) {
        return Err(bad(t, format!("{path:?} is not a path identifier")));
    }
    let polarization: Polarization = pol
        .parse()
        .map_err(|_| bad(t, format!("polarization must be H or V, found {pol:?}")))?;
    Ok(ModeRef::new(path, polarization))
}

fn parse_ident(t: &Tok<'_>) -> Result<String, ParseError> {
    if is_identifier(t.text) {
        Ok(t.text.to_string())
    } else {
        Err(bad(t, format!("{:?} is not an identifier", t.text)))
    }
}

/// `key = value` with exactly one value token.
fn key_value<'a>(toks: &[Tok<'a>]) -> Result<(Tok<'a>, Tok<'a>), ParseError> {
    match toks {
        [k, eq, v] if eq.text == "=" && is_identifier(k.text) => Ok((*k, *v)),
        [k, eq] if eq.text == "=" => Err(syntax(eq, format!("missing value for {}", k.text))),
        [k, eq, _, extra, ..] if eq.text == "=" => Err(syntax(
            extra,
            format!("unexpected token {:?} after value of {}", extra.text, k.text),
        )),
        [k, ..] => Err(syntax(k, format!("expected `key = value`, found {:?}", k.text))),
        [] => unreachable!("empty lines are skipped"),
    }
}

struct Params<'a> {
    header: Tok<'a>,
    values: BTreeMap<&'a str, (Tok<'a>, Tok<'a>)>,
}

impl<'a> Params<'a> {
    fn new(header: Tok<'a>) -> Self {
        Self {
            header,
            values: BTreeMap::new(),
        }
    }

    fn insert(&mut self, key: Tok<'a>, value: Tok<'a>) -> Result<(), ParseError> {
        if self.values.insert(key.text, (key, value)).is_some() {
            return Err(bad(&key, format!("parameter {} given twice", key.text)));
        }
        Ok(())
    }

    fn take(&mut self, key: &str) -> Result<Tok<'a>, ParseError> {
        self.values
            .remove(key)
            .map(|(_, v)| v)
            .ok_or_else(|| bad(&self.header, format!("{} is missing parameter {key}", self.header.text)))
    }

    fn take_opt(&mut self, key: &str) -> Option<Tok<'a>> {
        self.values.remove(key).map(|(_, v)| v)
    }

    fn finish(self) -> Result<(), ParseError> {
        match self.values.values().next() {
            Some((k, _)) => Err(bad(k, format!("unknown parameter {} for {}", k.text, self.header.text))),
            None => Ok(()),
        }
    }
}

fn build_element(mut p: Params<'_>) -> Result<Element, ParseError> {
    let angle_spec = |t: Tok<'_>| match t.text {
        "outer" => Ok(AngleSpec::Outer),
        "inner" => Ok(AngleSpec::Inner),
        _ => Err(bad(
            &t,
            format!("bs angle must be `outer` or `inner`, found {:?}", t.text),
        )),
    };
    let element = match p.header.text {
        "bs" => Element::Bs {
            a: parse_mode(&p.take("a")?)?,
            b: parse_mode(&p.take("b")?)?,
            angle: angle_spec(p.take("angle")?)?,
        },
        "hwp" => Element::Hwp {
            path: parse_ident(&p.take("path")?)?,
            angle: parse_number(&p.take("angle")?)?,
        },
        "qwp" => Element::Qwp {
            path: parse_ident(&p.take("path")?)?,
            angle: parse_number(&p.take("angle")?)?,
        },
        "pbs" => Element::Pbs {
            input: parse_ident(&p.take("in")?)?,
            h: parse_ident(&p.take("h")?)?,
            v: parse_ident(&p.take("v")?)?,
        },
        "combine" => Element::Combine {
            h: parse_ident(&p.take("h")?)?,
            v: parse_ident(&p.take("v")?)?,
            out: parse_ident(&p.take("out")?)?,
        },
        "mirror" => Element::Mirror {
            from: parse_mode(&p.take("from")?)?,
            to: parse_mode(&p.take("to")?)?,
        },
        "phase" => Element::Phase {
            mode: parse_mode(&p.take("mode")?)?,
            phi: parse_number(&p.take("phi")?)?,
        },
        "absorb" => {
            let mode = parse_mode(&p.take("mode")?)?;
            let sink = parse_ident(&p.take("sink")?)?;
            let ft = p.take("fraction")?;
            let fraction = parse_number(&ft)?;
            if !(0.0..=1.0).contains(&fraction) {
                return Err(bad(&ft, format!("fraction must lie in [0, 1], got {fraction}")));
            }
            Element::Absorb { mode, sink, fraction }
        }
        "visibility" => {
            let a = parse_mode(&p.take("a")?)?;
            let b = parse_mode(&p.take("b")?)?;
            let t = p.take("of")?;
            let of = match t.text {
                "outer" => Interferometer::Outer,
                "inner" => Interferometer::Inner,
                _ => return Err(bad(&t, format!("`of` must be `outer` or `inner`, found {:?}", t.text))),
            };
            Element::Visibility { a, b, of }
        }
        "inner" => Element::Inner {
            arm: parse_mode(&p.take("arm")?)?,
            channel: parse_mode(&p.take("channel")?)?,
            ret: parse_mode(&p.take("return")?)?,
            dark: parse_mode(&p.take("dark")?)?,
        },
        other => {
            return Err(err(
                ParseErrorKind::UnknownElement,
                p.header.line,
                p.header.col,
                format!("unknown element {other:?}"),
            ))
        }
    };
    p.finish()?;
    Ok(element)
}

const ELEMENTS: [&str; 10] = [
    "bs",
    "hwp",
    "qwp",
    "pbs",
    "combine",
    "mirror",
    "phase",
    "absorb",
    "visibility",
    "inner",
];

fn build_noise(
    mut p: Params<'_>,
    positions: &mut BTreeMap<&'static str, (usize, usize)>,
) -> Result<NoiseConfig, ParseError> {
    let mut noise = NoiseConfig::ideal();
    let mut num = |p: &mut Params<'_>, key: &'static str, slot: &mut f64| -> Result<(), ParseError> {
        if let Some(t) = p.take_opt(key) {
            positions.insert(key, (t.line, t.col));
            *slot = parse_number(&t)?;
        }
        Ok(())
    };
    num(&mut p, "visibility_outer", &mut noise.visibility_outer)?;
    num(&mut p, "visibility_inner", &mut noise.visibility_inner)?;
    num(&mut p, "phase_drift_sigma", &mut noise.phase_drift_sigma)?;
    num(&mut p, "detector_efficiency", &mut noise.detector_efficiency)?;
    num(&mut p, "dark_rate", &mut noise.dark_rate)?;
    num(&mut p, "coincidence_window", &mut noise.coincidence_window)?;
    num(&mut p, "pair_rate", &mut noise.source.pair_rate)?;
    num(&mut p, "coupling_efficiency", &mut noise.source.coupling_efficiency)?;
    num(
        &mut p,
        "herald_efficiency",
        &mut noise.source.herald_detector_efficiency,
    )?;
    num(&mut p, "mean_photon_number", &mut noise.source.mean_photon_number)?;
    if let Some(t) = p.take_opt("source") {
        positions.insert("source", (t.line, t.col));
        noise.source.kind = match t.text {
            "heralded" => SourceKind::HeraldedSingle,
            "coherent" => SourceKind::Coherent,
            _ => {
                return Err(bad(
                    &t,
                    format!("source must be `heralded` or `coherent`, found {:?}", t.text),
                ))
            }
        };
    }
    p.finish()?;
    Ok(noise)
}

enum Block<'a> {
    Loop(Params<'a>),
    Noise(Params<'a>),
    Stage(Section, Params<'a>),
}

#[derive(Default)]
struct Positions {
    header: BTreeMap<&'static str, (usize, usize)>,
    paths: Vec<(usize, usize)>,
    detectors: Vec<(usize, usize)>,
    stages: Vec<(usize, usize)>,
    noise: BTreeMap<&'static str, (usize, usize)>,
    noise_block: Option<(usize, usize)>,
    cavity: Option<(usize, usize)>,
}

const HEADER_KEYS: [&str; 8] = [
    "format_version",
    "name",
    "M",
    "N",
    "half_mirror_R",
    "blocking_model",
    "seed",
    "input",
];

/// Parses and validates a scenario from raw bytes (must be UTF-8).
pub fn parse_scenario_bytes(bytes: &[u8]) -> Result<Scenario, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_scenario(text),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            // valid prefix is UTF-8 by construction
            let prefix = std::str::from_utf8(good).unwrap_or("");
            let line = prefix.matches('\n').count() + 1;
            let col = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(err(ParseErrorKind::Syntax, line, col, "input is not valid UTF-8"))
        }
    }
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut pos = Positions::default();
    let mut header: BTreeMap<&'static str, Tok<'_>> = BTreeMap::new();
    let mut paths = Vec::new();
    let mut detectors = Vec::new();
    let mut stages = Vec::new();
    let mut cavity = None;
    let mut noise = None;
    let mut block: Option<(Tok<'_>, Block<'_>)> = None;
    let mut seen_version = false;
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(line_no, content);
        let Some(first) = toks.first().copied() else {
            continue;
        };

        if let Some((_, current)) = block.as_mut() {
            if first.text == "end" {
                if toks.len() > 1 {
                    return Err(syntax(&toks[1], "unexpected token after `end`"));
                }
                let (opener, finished) = block.take().expect("block is open");
                match finished {
                    Block::Loop(mut p) => {
                        let entry = parse_ident(&p.take("entry")?)?;
                        let cav = parse_ident(&p.take("cavity")?)?;
                        let exit = parse_ident(&p.take("exit")?)?;
                        p.finish()?;
                        if cavity.is_some() {
                            return Err(syntax(&opener, "loop declared twice"));
                        }
                        pos.cavity = Some((opener.line, opener.col));
                        cavity = Some(CavitySpec {
                            entry,
                            cavity: cav,
                            exit,
                        });
                    }
                    Block::Noise(p) => {
                        if noise.is_some() {
                            return Err(syntax(&opener, "noise block declared twice"));
                        }
                        pos.noise_block = Some((opener.line, opener.col));
                        noise = Some(build_noise(p, &mut pos.noise)?);
                    }
                    Block::Stage(section, p) => {
                        let at = (p.header.line, p.header.col);
                        let element = build_element(p)?;
                        pos.stages.push(at);
                        stages.push(Stage { section, element });
                    }
                }
                continue;
            }
            let (k, v) = key_value(&toks)?;
            match current {
                Block::Loop(p) | Block::Noise(p) | Block::Stage(_, p) => p.insert(k, v)?,
            }
            continue;
        }

        if !seen_version {
            let (k, v) = key_value(&toks).map_err(|_| syntax(&first, "file must start with `format_version = 1`"))?;
            if k.text != "format_version" {
                return Err(syntax(&k, "file must start with `format_version = 1`"));
            }
            if v.text.parse::<u32>().ok() != Some(FORMAT_VERSION) {
                return Err(bad(
                    &v,
                    format!("unsupported format_version {:?}, expected {FORMAT_VERSION}", v.text),
                ));
            }
            seen_version = true;
            header.insert("format_version", v);
            pos.header.insert("format_version", (k.line, k.col));
            continue;
        }

        match first.text {
            "path" => match toks.as_slice() {
                [_, name] | [_, name, _] => {
                    let channel = match toks.get(2) {
                        None => false,
                        Some(t) if t.text == "channel" => true,
                        Some(t) => {
                            return Err(syntax(
                                t,
                                format!("expected `channel` or end of line, found {:?}", t.text),
                            ))
                        }
                    };
                    let name = parse_ident(name)?;
                    pos.paths.push((first.line, first.col));
                    paths.push(PathDecl { name, channel });
                }
                _ => return Err(syntax(&first, "expected `path <name> [channel]`")),
            },
            "detector" => {
                if toks.len() < 4 || toks[2].text != "=" {
                    return Err(syntax(&first, "expected `detector <name> = <mode> ...`"));
                }
                let name = parse_ident(&toks[1])?;
                let ports = toks[3..].iter().map(parse_mode).collect::<Result<Vec<_>, _>>()?;
                pos.detectors.push((first.line, first.col));
                detectors.push(Detector { name, ports });
            }
            "loop" | "noise" => {
                if let Some(t) = toks.get(1) {
                    return Err(syntax(t, format!("unexpected token after `{}`", first.text)));
                }
                let b = if first.text == "loop" {
                    Block::Loop(Params::new(first))
                } else {
                    Block::Noise(Params::new(first))
                };
                block = Some((first, b));
            }
            "stage" => {
                let (section, element) = match toks.as_slice() {
                    [_, s, e] => (s, e),
                    _ => return Err(syntax(&first, "expected `stage <pass|readout> <element>`")),
                };
                let section = match section.text {
                    "pass" => Section::Pass,
                    "readout" => Section::Readout,
                    other => {
                        return Err(syntax(
                            section,
                            format!("unknown section {other:?}, expected pass or readout"),
                        ))
                    }
                };
                if !ELEMENTS.contains(&element.text) {
                    return Err(err(
                        ParseErrorKind::UnknownElement,
                        element.line,
                        element.col,
                        format!("unknown element {:?}", element.text),
                    ));
                }
                block = Some((first, Block::Stage(section, Params::new(*element))));
            }
            "end" => return Err(syntax(&first, "`end` without an open block")),
            _ => {
                let (k, v) = key_value(&toks)?;
                let Some(key) = HEADER_KEYS.iter().copied().find(|h| *h == k.text) else {
                    return Err(syntax(&k, format!("unknown key {:?}", k.text)));
                };
                if header.insert(key, v).is_some() {
                    return Err(syntax(&k, format!("{key} given twice")));
                }
                pos.header.insert(key, (k.line, k.col));
            }
        }
    }

    if let Some((opener, _)) = block {
        return Err(syntax(
            &opener,
            format!("block `{}` is not closed with `end`", opener.text),
        ));
    }
    if !seen_version {
        return Err(err(
            ParseErrorKind::Syntax,
            1,
            1,
            "file must start with `format_version = 1`",
        ));
    }

    let eof = (last_line, 1);
    let required = |key: &'static str| {
        header.get(key).copied().ok_or_else(|| {
            err(
                ParseErrorKind::BadParameter,
                eof.0,
                eof.1,
                format!("missing required key {key}"),
            )
        })
    };

    let name = parse_ident(&required("name")?)?;
    let m_tok = required("M")?;
    let outer_bs_count = m_tok
        .text
        .parse::<u32>()
        .map_err(|_| bad(&m_tok, format!("M must be an integer, found {:?}", m_tok.text)))?;
    let n_tok = required("N")?;
    let inner_bs_count = n_tok
        .text
        .parse::<u32>()
        .map_err(|_| bad(&n_tok, format!("N must be an integer, found {:?}", n_tok.text)))?;
    let half_mirror_reflectivity = match header.get("half_mirror_R") {
        Some(t) => {
            let r = parse_number(t)?;
            if !(0.0..=1.0).contains(&r) {
                return Err(bad(t, format!("half_mirror_R must lie in [0, 1], got {r}")));
            }
            r
        }
        None => 0.5,
    };
    let blocking_model = match header.get("blocking_model") {
        Some(t) => match t.text {
            "FullBreak" => BlockingModel::FullBreak,
            "ChannelOnly" => BlockingModel::ChannelOnly,
            _ => {
                return Err(bad(
                    t,
                    format!("blocking_model must be FullBreak or ChannelOnly, found {:?}", t.text),
                ))
            }
        },
        None => BlockingModel::FullBreak,
    };
    let seed = match header.get("seed") {
        Some(t) => t
            .text
            .parse::<u64>()
            .map_err(|_| bad(t, format!("seed must be a 64-bit unsigned integer, found {:?}", t.text)))?,
        None => 0,
    };
    let input = parse_mode(&required("input")?)?;

    let scenario = Scenario {
        name,
        outer_bs_count,
        inner_bs_count,
        half_mirror_reflectivity,
        blocking_model,
        seed,
        paths,
        input,
        cavity,
        detectors,
        stages,
        noise: noise.unwrap_or_default(),
    };

    validate(&scenario).map_err(|invalid| {
        let (line, column) = match invalid.at {
            Location::Header(key) => pos.header.get(key).copied().unwrap_or(eof),
            Location::Path(i) => pos.paths[i],
            Location::Input => pos.header.get("input").copied().unwrap_or(eof),
            Location::Cavity => pos.cavity.unwrap_or(eof),
            Location::Detector(i) => pos.detectors[i],
            Location::Stage(i) => pos.stages[i],
            Location::Noise(key) => pos.noise.get(key).copied().or(pos.noise_block).unwrap_or(eof),
        };
        ParseError {
            line,
            column,
            message: invalid.message,
            kind: invalid.kind,
        }
    })?;
    Ok(scenario)
}
