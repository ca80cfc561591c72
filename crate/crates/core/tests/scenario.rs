use std::f64::consts::PI;

use cfcomm_core::engine::{compile, Logic};
use cfcomm_core::scenario::{
    builtin_scenario, builtin_scenarios, parse_scenario, parse_scenario_bytes, serialize_scenario, slaz_ideal,
    ParseErrorKind, SLAZ_M4N2_SOURCE,
};
use cfcomm_core::{run_exact, BlockingModel};
use proptest::prelude::*;

const MINIMAL: &str = "\
format_version = 1
name = tiny
M = 2
N = 1
path a
path b
input = a.H
detector D0 = a.H
detector D1 = b.H
stage pass bs
  a = a.H
  b = b.H
  angle = outer
end
";

#[test]
fn minimal_scenario() {
    let s = parse_scenario(MINIMAL).unwrap();
    assert_eq!(s.outer_bs_count, 2);
    assert!((s.outer_angle() - PI / 4.0).abs() < 1e-15);
    assert_eq!(s.half_mirror_reflectivity, 0.5);
    assert_eq!(s.blocking_model, BlockingModel::FullBreak);
}

#[test]
fn shipped_reference_configuration() {
    let s = parse_scenario(SLAZ_M4N2_SOURCE).unwrap();
    assert_eq!((s.outer_bs_count, s.inner_bs_count), (4, 2));
    assert_eq!(s.half_mirror_reflectivity, 0.5);
}

#[test]
fn reflectivity_out_of_range_points_at_its_line() {
    let text = MINIMAL.replace("N = 1\n", "N = 1\nhalf_mirror_R = 1.3\n");
    let e = parse_scenario(&text).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::BadParameter);
    assert_eq!(e.line, 5);
}

#[test]
fn error_kinds() {
    let unknown = MINIMAL.replace("stage pass bs", "stage pass prism");
    assert_eq!(
        parse_scenario(&unknown).unwrap_err().kind,
        ParseErrorKind::UnknownElement
    );

    let e = parse_scenario(&MINIMAL.replace("M = 2", "M 2")).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Syntax);
    assert_eq!((e.line, e.column), (3, 1));

    let clash = MINIMAL.replace("detector D1 = b.H", "detector D1 = a.H");
    assert_eq!(parse_scenario(&clash).unwrap_err().kind, ParseErrorKind::WiringConflict);

    let undeclared = MINIMAL.replace("b = b.H", "b = c.H");
    assert_eq!(
        parse_scenario(&undeclared).unwrap_err().kind,
        ParseErrorKind::WiringConflict
    );

    let bad_m = MINIMAL.replace("M = 2", "M = 1");
    assert_eq!(parse_scenario(&bad_m).unwrap_err().kind, ParseErrorKind::BadParameter);

    assert_eq!(
        parse_scenario_bytes(b"\xff\xfe").unwrap_err().kind,
        ParseErrorKind::Syntax
    );
}

#[test]
fn error_message_has_position() {
    let e = parse_scenario(&MINIMAL.replace("angle = outer", "angle = sideways")).unwrap_err();
    assert!(e.to_string().starts_with(&format!("{}:{}:", e.line, e.column)));
    assert_eq!(e.line, 13);
}

#[test]
fn canonical_round_trip() {
    for s in builtin_scenarios().values() {
        let text = serialize_scenario(s);
        assert_eq!(&parse_scenario(&text).unwrap(), s);
        assert_eq!(serialize_scenario(&parse_scenario(&text).unwrap()), text);
        assert_eq!(serialize_scenario(s), text);
    }
}

#[test]
fn canonical_form_keeps_stage_order() {
    let s = parse_scenario(SLAZ_M4N2_SOURCE).unwrap();
    let text = serialize_scenario(&s);
    let order: Vec<&str> = text.lines().filter(|l| l.starts_with("stage ")).collect();
    assert_eq!(
        order,
        [
            "stage pass bs",
            "stage pass pbs",
            "stage pass inner",
            "stage pass combine",
            "stage pass visibility",
            "stage readout pbs"
        ]
    );
}

#[test]
fn builtins_present_and_valid() {
    let all = builtin_scenarios();
    for name in ["slaz_m4n2", "slaz_m4n2_channelonly", "plain_mz"] {
        assert!(all.contains_key(name));
    }
    let big = builtin_scenario("slaz_ideal(64, 2)").unwrap();
    assert!((big.outer_angle() - PI / 128.0).abs() < 1e-15);
}

#[test]
fn plain_mz_is_one_sided() {
    let r = run_exact(&compile(&builtin_scenario("plain_mz").unwrap(), Logic::Zero).unwrap()).unwrap();
    let dark = r.p_d0().min(r.p_d1());
    assert!(dark < 1e-12);
    assert!((r.p_d0().max(r.p_d1()) - 1.0).abs() < 1e-12);
}

fn mutate(text: &str, cut: usize, insert: &str) -> String {
    let mut cut = cut.min(text.len());
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}{}{}", &text[..cut], insert, &text[cut..])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parser_is_total_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
        if let Err(e) = parse_scenario_bytes(&bytes) {
            prop_assert!(e.line >= 1 && e.column >= 1);
        }
    }

    #[test]
    fn parser_is_total_on_mutations(cut in 0usize..2000, insert in "[ -~\n]{0,12}") {
        let text = mutate(SLAZ_M4N2_SOURCE, cut, &insert);
        match parse_scenario(&text) {
            // accepted scenarios must compile for both settings
            Ok(s) => {
                for logic in [Logic::Zero, Logic::One] {
                    prop_assert!(compile(&s, logic).is_ok());
                }
            }
            Err(e) => {
                let lines = text.lines().count().max(1) + 1;
                prop_assert!(e.line >= 1 && e.line <= lines, "{e} ({lines} lines)");
            }
        }
    }

    #[test]
    fn generated_scenarios_round_trip(m in 2u32..20, n in 1u32..6, r in 0.0f64..=1.0, channel_only: bool) {
        let mut s = slaz_ideal(m, n);
        s.half_mirror_reflectivity = r;
        if channel_only {
            s.blocking_model = BlockingModel::ChannelOnly;
        }
        let back = parse_scenario(&serialize_scenario(&s)).unwrap();
        prop_assert_eq!(back, s);
    }
}
