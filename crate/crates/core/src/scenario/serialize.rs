use std::fmt::Write;

use super::types::*;
use crate::noise::SourceKind;

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn section(s: Section) -> &'static str {
    match s {
        Section::Pass => "pass",
        Section::Readout => "readout",
    }
}

fn angle(a: AngleSpec) -> &'static str {
    match a {
        AngleSpec::Outer => "outer",
        AngleSpec::Inner => "inner",
    }
}

fn element_params(e: &Element) -> Vec<(&'static str, String)> {
    match e {
        Element::Bs { a, b, angle: ang } => vec![
            ("a", a.to_string()),
            ("b", b.to_string()),
            ("angle", angle(*ang).into()),
        ],
        Element::Hwp { path, angle } | Element::Qwp { path, angle } => {
            vec![("path", path.clone()), ("angle", num(*angle))]
        }
        Element::Pbs { input, h, v } => vec![("in", input.clone()), ("h", h.clone()), ("v", v.clone())],
        Element::Combine { h, v, out } => vec![("h", h.clone()), ("v", v.clone()), ("out", out.clone())],
        Element::Mirror { from, to } => vec![("from", from.to_string()), ("to", to.to_string())],
        Element::Phase { mode, phi } => vec![("mode", mode.to_string()), ("phi", num(*phi))],
        Element::Absorb { mode, sink, fraction } => vec![
            ("mode", mode.to_string()),
            ("sink", sink.clone()),
            ("fraction", num(*fraction)),
        ],
        Element::Visibility { a, b, of } => vec![
            ("a", a.to_string()),
            ("b", b.to_string()),
            (
                "of",
                match of {
                    Interferometer::Outer => "outer".into(),
                    Interferometer::Inner => "inner".into(),
                },
            ),
        ],
        Element::Inner {
            arm,
            channel,
            ret,
            dark,
        } => vec![
            ("arm", arm.to_string()),
            ("channel", channel.to_string()),
            ("return", ret.to_string()),
            ("dark", dark.to_string()),
        ],
    }
}

/// Canonical text form. Stages appear in declaration order and every
/// parameter is written explicitly, so `parse_scenario` reproduces `s`.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let w = &mut out;
    // writing into a String cannot fail
    let _ = writeln!(w, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(w, "name = {}", s.name);
    let _ = writeln!(w, "M = {}", s.outer_bs_count);
    let _ = writeln!(w, "N = {}", s.inner_bs_count);
    let _ = writeln!(w, "half_mirror_R = {}", num(s.half_mirror_reflectivity));
    let _ = writeln!(w, "blocking_model = {}", s.blocking_model);
    let _ = writeln!(w, "seed = {}", s.seed);
    let _ = writeln!(w);
    for p in &s.paths {
        if p.channel {
            let _ = writeln!(w, "path {} channel", p.name);
        } else {
            let _ = writeln!(w, "path {}", p.name);
        }
    }
    let _ = writeln!(w);
    let _ = writeln!(w, "input = {}", s.input);
    if let Some(c) = &s.cavity {
        let _ = writeln!(w);
        let _ = writeln!(w, "loop");
        let _ = writeln!(w, "  entry = {}", c.entry);
        let _ = writeln!(w, "  cavity = {}", c.cavity);
        let _ = writeln!(w, "  exit = {}", c.exit);
        let _ = writeln!(w, "end");
    }
    let _ = writeln!(w);
    for d in &s.detectors {
        let ports: Vec<String> = d.ports.iter().map(ToString::to_string).collect();
        let _ = writeln!(w, "detector {} = {}", d.name, ports.join(" "));
    }
    for stage in &s.stages {
        let _ = writeln!(w);
        let _ = writeln!(w, "stage {} {}", section(stage.section), stage.element.keyword());
        for (k, v) in element_params(&stage.element) {
            let _ = writeln!(w, "  {k} = {v}");
        }
        let _ = writeln!(w, "end");
    }
    let n = &s.noise;
    let _ = writeln!(w);
    let _ = writeln!(w, "noise");
    let _ = writeln!(w, "  visibility_outer = {}", num(n.visibility_outer));
    let _ = writeln!(w, "  visibility_inner = {}", num(n.visibility_inner));
    let _ = writeln!(w, "  phase_drift_sigma = {}", num(n.phase_drift_sigma));
    let _ = writeln!(w, "  detector_efficiency = {}", num(n.detector_efficiency));
    let _ = writeln!(w, "  dark_rate = {}", num(n.dark_rate));
    let _ = writeln!(w, "  coincidence_window = {}", num(n.coincidence_window));
    let source = match n.source.kind {
        SourceKind::HeraldedSingle => "heralded",
        SourceKind::Coherent => "coherent",
    };
    let _ = writeln!(w, "  source = {source}");
    let _ = writeln!(w, "  pair_rate = {}", num(n.source.pair_rate));
    let _ = writeln!(w, "  coupling_efficiency = {}", num(n.source.coupling_efficiency));
    let _ = writeln!(w, "  herald_efficiency = {}", num(n.source.herald_detector_efficiency));
    let _ = writeln!(w, "  mean_photon_number = {}", num(n.source.mean_photon_number));
    let _ = writeln!(w, "end");
    out
}
