mod common;

use std::sync::Arc;

use common::*;
use nct_morita::dirac::{
    connection_matrix, sigma2_frame, transform_rho, transform_sigma2, transform_word, DiracData, DiracError,
};
use nct_morita::linalg::{rat, CMatrix, RatMatrix, Rational};
use nct_morita::sonn::{Generator, GeneratorWord};
use nct_morita::torus::{dirac_commutator, TorusElement};
use num_complex::Complex64;
use proptest::prelude::*;

fn sigma2_twice() -> GeneratorWord {
    GeneratorWord::new(vec![Generator::Sigma2, Generator::Sigma2])
}

fn int_vec_to_rat(x: &[i64]) -> Vec<Rational> {
    x.iter().map(|&v| rat(v, 1)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma2_twice_restores_frame(
        (theta, tau) in (2usize..=4).prop_flat_map(|n| (skew_theta_invertible_block(n), frame(n)))
    ) {
        let n = theta.dim();
        let shift: Vec<Rational> = (0..n).map(|i| rat((i % 2) as i64, 2)).collect();
        let d = DiracData::new(tau.clone(), None, shift.clone()).unwrap();
        let (back, theta_back) = transform_word(&d, &theta, &sigma2_twice()).unwrap();
        prop_assert_eq!(theta_back, theta);
        prop_assert_eq!(back.tau(), &tau);
        prop_assert_eq!(back.mu_shift(), &shift[..]);
    }

    #[test]
    fn frame_is_transpose_of_connection_matrix(theta in (2usize..=5).prop_flat_map(skew_theta_invertible_block)) {
        let f = sigma2_frame(&theta).unwrap();
        prop_assert_eq!(f.transpose(), connection_matrix(&theta).unwrap());
        prop_assert!(f.det().unwrap() != rat(0, 1));
    }

    /// `[D', U_x]` has coefficient vector `τ'ᵗx`; for `τ = I` that is `Gx`.
    #[test]
    fn commutator_matches_connection_coefficients(
        (theta, x) in (2usize..=4).prop_flat_map(|n| (skew_theta_invertible_block(n), exponent(n, 3)))
    ) {
        let n = theta.dim();
        let d = transform_sigma2(&DiracData::standard(n), &theta).unwrap();
        let theta = Arc::new(theta);
        let u = TorusElement::monomial(theta.clone(), x.clone());
        let w = dirac_commutator(&d, &u).unwrap();
        let gx = connection_matrix(&theta).unwrap().mul_vec(&int_vec_to_rat(&x));
        for (i, gi) in gx.iter().enumerate() {
            let expected = u.scale(&num_complex::Complex::new(gi.clone(), rat(0, 1)));
            prop_assert_eq!(w.component(i), &expected);
        }
    }

    #[test]
    fn rho_transforms_by_inverse(
        (tau, r) in (2usize..=4).prop_flat_map(|n| (frame(n), unimodular(n)))
    ) {
        let n = tau.rows();
        let d = DiracData::new(tau.clone(), None, vec![rat(0, 1); n]).unwrap();
        let moved = transform_rho(&d, &r).unwrap();
        prop_assert_eq!(&(&r.to_rat() * moved.tau()), &tau);
    }
}

#[test]
fn bounded_part_reset_and_shift_kept() {
    let theta = skew(2, &[(1, 2)]);
    let b = CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
    let d = DiracData::new(RatMatrix::identity(2), Some(b), vec![rat(1, 2), rat(0, 1)]).unwrap();
    let moved = transform_sigma2(&d, &theta).unwrap();
    assert!(moved.bounded_part().is_none());
    assert_eq!(moved.mu_shift(), &[rat(1, 2), rat(0, 1)]);
    // θ₁₂ = 1/2: F = −θ₁₁⁻¹ = [[0, 2], [−2, 0]]
    assert_eq!(moved.tau(), &RatMatrix::from_i64_rows(&[&[0, 2], &[-2, 0]]));
}

#[test]
fn singular_block_reports_step() {
    let theta = skew(3, &[(0, 1), (1, 2), (1, 3)]);
    let w = GeneratorWord::new(vec![Generator::Nu(nct_morita::linalg::IntMatrix::zeros(3, 3)), Generator::Sigma2]);
    let err = transform_word(&DiracData::standard(3), &theta, &w).unwrap_err();
    assert!(matches!(err, DiracError::Theta11Singular { step: Some(1) }));
}

#[test]
fn singular_frame_rejected() {
    let err = DiracData::new(RatMatrix::zeros(2, 2), None, vec![rat(0, 1); 2]).unwrap_err();
    assert!(matches!(err, DiracError::SingularFrame));
}
