use cfcomm_core::analytics::{
    half_mirror_merit, ideal_block_probs, ideal_pass_probs, ideal_pass_success, optimize_half_mirror, zeno_survival,
};
use cfcomm_core::BlockingModel;
use proptest::prelude::*;

#[test]
fn optimum_matches_closed_form() {
    for m in 3..=16u32 {
        let r = optimize_half_mirror(m).unwrap();
        assert!((r * f64::from(m) - f64::from(m - 2)).abs() <= 1e-4, "M={m}: {r}");
    }
}

#[test]
fn pass_success_increases_with_m() {
    let v: Vec<f64> = (2..=200).map(|m| ideal_pass_success(m).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn zeno_survival_increases_with_n() {
    let v: Vec<f64> = (2..=500).map(|n| zeno_survival(n).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}

proptest! {
    #[test]
    fn probabilities_are_normalized(m in 2u32..40, n in 1u32..5, r in 0.0f64..=1.0) {
        let pass = ideal_pass_probs(m, r).unwrap();
        let block = ideal_block_probs(m, n, r, BlockingModel::FullBreak).unwrap();
        for p in [pass, block] {
            prop_assert!((p.p_d0 + p.p_d1 + p.p_df + p.p_sink - 1.0).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&p.p_d0_given_conclusive));
            prop_assert!((0.0..=1.0).contains(&p.p_d1_given_conclusive));
        }
    }

    #[test]
    fn optimum_dominates(m in 3u32..30, r in 0.0f64..=1.0) {
        let best = optimize_half_mirror(m).unwrap();
        prop_assert!(half_mirror_merit(best, m).unwrap() >= half_mirror_merit(r, m).unwrap() - 1e-12);
    }
}
