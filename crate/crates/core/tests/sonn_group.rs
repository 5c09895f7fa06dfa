mod common;

use common::*;
use nct_morita::linalg::IntMatrix;
use nct_morita::sonn::{
    make_nu, make_rho, make_sigma2, sigma2_block_formula, verify_membership, word_act, Generator, GeneratorWord,
    SonnError,
};
use proptest::prelude::*;

fn generator(n: usize) -> impl Strategy<Value = Generator> {
    prop_oneof![
        Just(Generator::Sigma2),
        int_skew(n).prop_map(Generator::Nu),
        unimodular(n).prop_map(Generator::Rho),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_and_words_are_members(
        (n, word) in (2usize..=4).prop_flat_map(|n| (Just(n), proptest::collection::vec(generator(n), 6)))
    ) {
        for g in &word {
            prop_assert!(verify_membership(g.element(n).unwrap().matrix()));
        }
        prop_assert!(verify_membership(GeneratorWord::new(word).element(n).unwrap().matrix()));
    }

    #[test]
    fn sigma2_is_an_involution(theta in (2usize..=4).prop_flat_map(skew_theta_invertible_block)) {
        let w = GeneratorWord::new(vec![Generator::Sigma2, Generator::Sigma2]);
        prop_assert_eq!(word_act(&w, &theta).unwrap(), theta);
    }

    #[test]
    fn block_formula_matches_action(theta in (2usize..=5).prop_flat_map(skew_theta_invertible_block)) {
        let via_action = make_sigma2(theta.dim()).unwrap().act(&theta).unwrap();
        prop_assert_eq!(sigma2_block_formula(&theta).unwrap(), via_action);
    }

    #[test]
    fn nu_adds(theta in skew_theta(3), n in int_skew(3)) {
        let moved = make_nu(&n).unwrap().act(&theta).unwrap();
        prop_assert_eq!(moved.matrix(), &(theta.matrix() + &n.to_rat()));
    }

    #[test]
    fn rho_conjugates(theta in skew_theta(3), r in unimodular(3)) {
        let moved = make_rho(&r).unwrap().act(&theta).unwrap();
        let rr = r.to_rat();
        prop_assert_eq!(moved.matrix(), &(&(&rr * theta.matrix()) * &rr.transpose()));
    }

    /// Acting letter by letter equals acting by the product `w_k ⋯ w_1`.
    #[test]
    fn word_action_is_a_group_action(
        theta in skew_theta(3),
        n1 in int_skew(3),
        r in unimodular(3),
        n2 in int_skew(3),
    ) {
        let w = GeneratorWord::new(vec![Generator::Nu(n1), Generator::Rho(r), Generator::Sigma2, Generator::Nu(n2)]);
        let stepwise = word_act(&w, &theta);
        let whole = w.element(3).unwrap().act(&theta);
        match (stepwise, whole) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(SonnError::ActionUndefined { step: Some(2) }), Err(SonnError::ActionUndefined { .. })) => {}
            (a, b) => prop_assert!(false, "stepwise {:?} vs whole {:?}", a, b),
        }
    }
}

#[test]
fn n1_sigma2_is_rejected() {
    assert_eq!(make_sigma2(1), Err(SonnError::DimensionTooSmall(1)));
}

#[test]
fn non_member_detected() {
    let mut m = IntMatrix::identity(4);
    m.set(0, 2, 1.into());
    assert!(!verify_membership(&m));
    assert!(!verify_membership(&IntMatrix::identity(3)));
}

#[test]
fn rational_inverse_oracle_for_rho() {
    // ρ(R) acts by RθRᵗ; its inverse acts by R⁻¹θR⁻ᵗ.
    let r = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
    let rinv = IntMatrix::try_from_rat(&r.to_rat().inverse().unwrap()).unwrap();
    let theta = skew(2, &[(3, 7)]);
    let w = GeneratorWord::new(vec![Generator::Rho(r), Generator::Rho(rinv)]);
    assert_eq!(word_act(&w, &theta).unwrap(), theta);
}

#[test]
fn sigma2_hand_computed_n2() {
    // θ = [[0, a], [−a, 0]] ↦ [[0, −1/a], [1/a, 0]]
    let theta = skew(2, &[(2, 5)]);
    let moved = make_sigma2(2).unwrap().act(&theta).unwrap();
    assert_eq!(moved, skew(2, &[(-5, 2)]));
}
