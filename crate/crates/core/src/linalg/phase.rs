use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, rational_to_f64, Rational};

/// Exact unit-modulus scalar `e(r) = exp(2πi r)`, with `r` kept in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(Rational);

impl Phase {
    pub fn new(exponent: Rational) -> Self {
        let reduced = &exponent - exponent.floor();
        Self(reduced)
    }

    pub fn one() -> Self {
        Self(Rational::zero())
    }

    pub fn exponent(&self) -> &Rational {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn inverse(&self) -> Self {
        Self::new(-&self.0)
    }

    pub fn to_complex(&self) -> Complex64 {
        let angle = 2.0 * std::f64::consts::PI * rational_to_f64(&self.0);
        Complex64::new(angle.cos(), angle.sin())
    }
}

impl Mul for &Phase {
    type Output = Phase;
    fn mul(self, rhs: &Phase) -> Phase {
        Phase::new(&self.0 + &rhs.0)
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        &self * &rhs
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({})", format_rational(&self.0))
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        format_rational(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Phase::new).map_err(D::Error::custom)
    }
}
