#![allow(dead_code)]

use nct_morita::linalg::{rat, IntMatrix, RatMatrix, Rational, SkewMatrix};
use proptest::prelude::*;

pub fn skew(n: usize, upper: &[(i64, i64)]) -> SkewMatrix {
    SkewMatrix::from_upper(n, &upper.iter().map(|&(p, q)| rat(p, q)).collect::<Vec<_>>()).unwrap()
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=9).prop_map(|(p, q)| rat(p, q))
}

/// Skew θ with entries p/q, |p| ≤ 12, q ≤ 9.
pub fn skew_theta(n: usize) -> impl Strategy<Value = SkewMatrix> {
    proptest::collection::vec(rational(), n * (n - 1) / 2).prop_map(move |v| SkewMatrix::from_upper(n, &v).unwrap())
}

/// As [`skew_theta`] with θ₁₂ ≠ 0.
pub fn skew_theta_invertible_block(n: usize) -> impl Strategy<Value = SkewMatrix> {
    skew_theta(n).prop_filter("θ₁₂ ≠ 0", |t| *t.get(0, 1) != rat(0, 1))
}

pub fn int_skew(n: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(-4i64..=4, n * (n - 1) / 2).prop_map(move |v| {
        let mut m = IntMatrix::zeros(n, n);
        let mut it = v.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let x = it.next().unwrap();
                m.set(i, j, x.into());
                m.set(j, i, (-x).into());
            }
        }
        m
    })
}

/// Product of shears `I + k E_ij`, `i ≠ j`.
pub fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec((0..n, 1..n, -2i64..=2), 0..6).prop_map(move |shears| {
        shears.into_iter().fold(IntMatrix::identity(n), |m, (i, off, k)| {
            let mut e = IntMatrix::identity(n);
            e.set(i, (i + off) % n, k.into());
            e.checked_mul(&m).unwrap()
        })
    })
}

pub fn frame(n: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(rational(), n * n)
        .prop_map(move |v| RatMatrix::new(n, n, v).unwrap())
        .prop_filter("invertible", |m| m.inverse().is_ok())
}

pub fn exponent(n: usize, r: i64) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-r..=r, n)
}
