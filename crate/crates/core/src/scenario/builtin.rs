use std::collections::BTreeMap;

use super::parse::parse_scenario;
use super::types::*;
use super::validate::validate;
use crate::noise::NoiseConfig;
use crate::optics::Polarization::{H, V};

pub const SLAZ_M4N2_SOURCE: &str = include_str!("../../scenarios/slaz_m4n2.cfq");
pub const SLAZ_M4N2_CHANNELONLY_SOURCE: &str = include_str!("../../scenarios/slaz_m4n2_channelonly.cfq");
pub const PLAIN_MZ_SOURCE: &str = include_str!("../../scenarios/plain_mz.cfq");

fn parse_shipped(source: &str) -> Scenario {
    parse_scenario(source).unwrap_or_else(|e| panic!("shipped scenario does not parse: {e}"))
}

/// Ideal nested-Zeno network with `m` outer and `n` inner beam splitters,
/// FullBreak blocking and a 50 % half mirror. Same topology as `slaz_m4n2`.
pub fn slaz_ideal(m: u32, n: u32) -> Scenario {
    let stage = |section, element| Stage { section, element };
    let path = |name: &str, channel| PathDecl {
        name: name.to_string(),
        channel,
    };
    let s = Scenario {
        name: format!("slaz_ideal_m{m}_n{n}"),
        outer_bs_count: m,
        inner_bs_count: n,
        half_mirror_reflectivity: 0.5,
        blocking_model: BlockingModel::FullBreak,
        seed: 2017,
        paths: vec![
            path("in", false),
            path("cavity", false),
            path("r1", false),
            path("r2", false),
            path("r3", true),
            path("df", false),
            path("out", false),
            path("d0", false),
            path("d1", false),
        ],
        input: ModeRef::new("in", H),
        cavity: Some(CavitySpec {
            entry: "in".into(),
            cavity: "cavity".into(),
            exit: "out".into(),
        }),
        detectors: vec![
            Detector {
                name: "D0".into(),
                ports: vec![ModeRef::new("d0", V)],
            },
            Detector {
                name: "D1".into(),
                ports: vec![ModeRef::new("d1", H)],
            },
            Detector {
                name: "Df".into(),
                ports: vec![ModeRef::new("df", V)],
            },
        ],
        stages: vec![
            stage(
                Section::Pass,
                Element::Bs {
                    a: ModeRef::new("cavity", H),
                    b: ModeRef::new("cavity", V),
                    angle: AngleSpec::Outer,
                },
            ),
            stage(
                Section::Pass,
                Element::Pbs {
                    input: "cavity".into(),
                    h: "r1".into(),
                    v: "r2".into(),
                },
            ),
            stage(
                Section::Pass,
                Element::Inner {
                    arm: ModeRef::new("r2", V),
                    channel: ModeRef::new("r3", V),
                    ret: ModeRef::new("r2", V),
                    dark: ModeRef::new("df", V),
                },
            ),
            stage(
                Section::Pass,
                Element::Combine {
                    h: "r1".into(),
                    v: "r2".into(),
                    out: "cavity".into(),
                },
            ),
            stage(
                Section::Pass,
                Element::Visibility {
                    a: ModeRef::new("cavity", H),
                    b: ModeRef::new("cavity", V),
                    of: Interferometer::Outer,
                },
            ),
            stage(
                Section::Readout,
                Element::Pbs {
                    input: "out".into(),
                    h: "d1".into(),
                    v: "d0".into(),
                },
            ),
        ],
        noise: NoiseConfig::ideal(),
    };
    s
}

/// Reference configuration: M = 4, N = 2, FullBreak blocking.
pub fn slaz_m4n2() -> Scenario {
    parse_shipped(SLAZ_M4N2_SOURCE)
}

pub fn slaz_m4n2_channelonly() -> Scenario {
    parse_shipped(SLAZ_M4N2_CHANNELONLY_SOURCE)
}

pub fn plain_mz() -> Scenario {
    parse_shipped(PLAIN_MZ_SOURCE)
}

/// Named builtin scenarios.
pub fn builtin_scenarios() -> BTreeMap<String, Scenario> {
    [slaz_m4n2(), slaz_m4n2_channelonly(), plain_mz()]
        .into_iter()
        .map(|s| (s.name.clone(), s))
        .collect()
}

/// Looks up a builtin by name; also accepts the generator form `slaz_ideal(M,N)`.
pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    if let Some(args) = name.strip_prefix("slaz_ideal(").and_then(|r| r.strip_suffix(')')) {
        let (m, n) = args.split_once(',')?;
        let m: u32 = m.trim().parse().ok()?;
        let n: u32 = n.trim().parse().ok()?;
        let s = slaz_ideal(m, n);
        return validate(&s).is_ok().then_some(s);
    }
    builtin_scenarios().remove(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shipped_m4n2_matches_generator() {
        let mut generated = slaz_ideal(4, 2);
        generated.name = "slaz_m4n2".into();
        assert_eq!(slaz_m4n2(), generated);
    }

    #[test]
    fn channelonly_differs_only_in_blocking() {
        let mut a = slaz_m4n2_channelonly();
        assert_eq!(a.blocking_model, BlockingModel::ChannelOnly);
        a.blocking_model = BlockingModel::FullBreak;
        a.name = "slaz_m4n2".into();
        assert_eq!(a, slaz_m4n2());
    }

    #[test]
    fn reference_configuration() {
        let s = slaz_m4n2();
        assert_eq!((s.outer_bs_count, s.inner_bs_count), (4, 2));
        assert_eq!(s.half_mirror_reflectivity, 0.5);
        assert!((s.outer_angle() - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn generator_large_m() {
        let s = builtin_scenario("slaz_ideal(64, 2)").unwrap();
        assert!(validate(&s).is_ok());
        assert!((s.outer_angle() - PI / 128.0).abs() < 1e-15);
        assert!(builtin_scenario("slaz_ideal(1,2)").is_none());
    }

    #[test]
    fn builtin_set() {
        let all = builtin_scenarios();
        for name in ["slaz_m4n2", "slaz_m4n2_channelonly", "plain_mz"] {
            assert!(validate(&all[name]).is_ok(), "{name}");
        }
    }
}
