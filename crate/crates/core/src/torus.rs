//! Symbolic smooth noncommutative torus `A_θ`.
//!
//! Elements are finite sums of normal-ordered monomials
//! `M(x) = U_1^{x_1} ⋯ U_n^{x_n}` with exact coefficients. A coefficient is a
//! Gaussian rational times an exact phase `e(r)`; terms are keyed by
//! `(x, phase)` so that all algebra operations stay exact for rational θ.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dirac::DiracData;
use crate::linalg::{
    format_rational, max_abs, parse_rational, rational_to_f64, CMatrix, Phase, Rational, SkewMatrix,
};

pub type GaussRational = Complex<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("elements live over different θ")]
    ThetaMismatch,
    #[error("derivation index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cutoff {0} too small (need M >= 4)")]
    CutoffTooSmall(usize),
    #[error("invalid element: {0}")]
    Invalid(String),
}

/// Exponent of the phase picked up when normal-ordering `M(x)·M(y)`:
/// `Σ_{i<j} x_j θ_{ji} y_i`, from `U_j U_i = e(θ_{ji}) U_i U_j`.
pub fn reorder_exponent(theta: &SkewMatrix, x: &[i64], y: &[i64]) -> Rational {
    let n = theta.dim();
    let mut acc = Rational::zero();
    for j in 0..n {
        if x[j] == 0 {
            continue;
        }
        for i in 0..j {
            if y[i] != 0 {
                acc += theta.get(j, i) * Rational::from_integer((x[j] * y[i]).into());
            }
        }
    }
    acc
}

#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    theta: Arc<SkewMatrix>,
    terms: BTreeMap<(Vec<i64>, Phase), GaussRational>,
}

impl std::fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut l = f.debug_list();
        for ((x, p), c) in &self.terms {
            l.entry(&format_args!(
                "({} + {}i)·{:?}·M{:?}",
                format_rational(&c.re),
                format_rational(&c.im),
                p,
                x
            ));
        }
        l.finish()
    }
}

impl TorusElement {
    pub fn zero(theta: Arc<SkewMatrix>) -> Self {
        Self { theta, terms: BTreeMap::new() }
    }

    pub fn one(theta: Arc<SkewMatrix>) -> Self {
        let n = theta.dim();
        Self::monomial(theta, vec![0; n])
    }

    pub fn monomial(theta: Arc<SkewMatrix>, x: Vec<i64>) -> Self {
        Self::term(theta, x, GaussRational::one(), Phase::one())
    }

    /// Generator `U_i` (0-based).
    pub fn generator(theta: Arc<SkewMatrix>, i: usize) -> Self {
        let mut x = vec![0; theta.dim()];
        x[i] = 1;
        Self::monomial(theta, x)
    }

    pub fn term(theta: Arc<SkewMatrix>, x: Vec<i64>, coeff: GaussRational, phase: Phase) -> Self {
        assert_eq!(x.len(), theta.dim(), "exponent length");
        let mut e = Self::zero(theta);
        e.add_term(x, phase, coeff);
        e
    }

    pub fn n(&self) -> usize {
        self.theta.dim()
    }

    pub fn theta(&self) -> &Arc<SkewMatrix> {
        &self.theta
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates `(x, phase, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &Phase, &GaussRational)> {
        self.terms.iter().map(|((x, p), c)| (x.as_slice(), p, c))
    }

    fn add_term(&mut self, x: Vec<i64>, phase: Phase, coeff: GaussRational) {
        if coeff.is_zero() {
            return;
        }
        let key = (x, phase);
        let slot = self.terms.entry(key.clone()).or_insert_with(GaussRational::zero);
        *slot = &*slot + coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), TorusError> {
        if Arc::ptr_eq(&self.theta, &other.theta) || self.theta == other.theta {
            Ok(())
        } else {
            Err(TorusError::ThetaMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TorusError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for ((x, p), c) in &other.terms {
            out.add_term(x.clone(), p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TorusError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&GaussRational::new(-Rational::one(), Rational::zero()))
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        let mut out = Self::zero(self.theta.clone());
        for ((x, p), c) in &self.terms {
            out.add_term(x.clone(), p.clone(), c * s);
        }
        out
    }

    pub fn scale_phase(&self, s: &Phase) -> Self {
        let mut out = Self::zero(self.theta.clone());
        for ((x, p), c) in &self.terms {
            out.add_term(x.clone(), p * s, c.clone());
        }
        out
    }

    /// Bilinear extension of `M(x)·M(y) = e(Σ_{i<j} x_j θ_{ji} y_i) M(x+y)`.
    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.check_same(other)?;
        let mut out = Self::zero(self.theta.clone());
        for ((x, p), c) in &self.terms {
            for ((y, q), d) in &other.terms {
                let phase = &(p * q) * &Phase::new(reorder_exponent(&self.theta, x, y));
                let sum: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                out.add_term(sum, phase, c * d);
            }
        }
        Ok(out)
    }

    /// Antilinear involution; `M(x)^* = M(x)^{-1} = e(Σ_{i<j} x_j θ_{ji} x_i) M(-x)`.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(self.theta.clone());
        for ((x, p), c) in &self.terms {
            let neg: Vec<i64> = x.iter().map(|v| -v).collect();
            let phase = &p.inverse() * &Phase::new(reorder_exponent(&self.theta, x, x));
            out.add_term(neg, phase, c.conj());
        }
        out
    }

    /// Derivation `δ_j` (0-based `j`): multiplies each monomial by `x_j`.
    pub fn delta(&self, j: usize) -> Result<Self, TorusError> {
        if j >= self.n() {
            return Err(TorusError::IndexOutOfRange { index: j, n: self.n() });
        }
        let mut out = Self::zero(self.theta.clone());
        for ((x, p), c) in &self.terms {
            let f = Rational::from_integer(x[j].into());
            out.add_term(x.clone(), p.clone(), c * GaussRational::new(f, Rational::zero()));
        }
        Ok(out)
    }

    /// Collapses exact phases into double-precision coefficients per monomial.
    pub fn to_numeric(&self) -> BTreeMap<Vec<i64>, Complex64> {
        let mut out: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for ((x, p), c) in &self.terms {
            let z = Complex64::new(rational_to_f64(&c.re), rational_to_f64(&c.im)) * p.to_complex();
            *out.entry(x.clone()).or_default() += z;
        }
        out
    }

    /// Largest coefficient modulus after collapsing phases.
    pub fn numeric_norm_max(&self) -> f64 {
        self.to_numeric().values().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    x: Vec<i64>,
    re: String,
    im: String,
    phase: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRepr {
    n: usize,
    theta: SkewMatrix,
    terms: Vec<TermRepr>,
}

impl Serialize for TorusElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementRepr {
            n: self.n(),
            theta: (*self.theta).clone(),
            terms: self
                .terms
                .iter()
                .map(|((x, p), c)| TermRepr {
                    x: x.clone(),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                    phase: format_rational(p.exponent()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ElementRepr::deserialize(d)?;
        if r.theta.dim() != r.n {
            return Err(D::Error::custom("theta dimension differs from n"));
        }
        let mut e = TorusElement::zero(Arc::new(r.theta));
        for t in r.terms {
            if t.x.len() != r.n {
                return Err(D::Error::custom("term exponent has wrong length"));
            }
            let re = parse_rational(&t.re).map_err(D::Error::custom)?;
            let im = parse_rational(&t.im).map_err(D::Error::custom)?;
            let phase = Phase::new(parse_rational(&t.phase).map_err(D::Error::custom)?);
            e.add_term(t.x, phase, GaussRational::new(re, im));
        }
        Ok(e)
    }
}

/// Element of `Ω¹_D ≅ A_θ^{⊕n}`: the coefficient of each Clifford generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    components: Vec<TorusElement>,
}

impl OneForm {
    pub fn zero(theta: Arc<SkewMatrix>) -> Self {
        let n = theta.dim();
        Self { components: vec![TorusElement::zero(theta); n] }
    }

    pub fn from_components(components: Vec<TorusElement>) -> Result<Self, TorusError> {
        let Some(first) = components.first() else {
            return Err(TorusError::DimensionMismatch("empty one-form".into()));
        };
        if components.len() != first.n() {
            return Err(TorusError::DimensionMismatch(format!(
                "{} components for n = {}",
                components.len(),
                first.n()
            )));
        }
        for c in &components[1..] {
            first.check_same(c)?;
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[TorusElement] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TorusElement {
        &self.components[i]
    }

    /// Zero iff every component is zero (the module is free).
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(TorusElement::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TorusError> {
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect::<Result<_, _>>()?;
        Ok(Self { components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TorusError> {
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.sub(b)).collect::<Result<_, _>>()?;
        Ok(Self { components })
    }

    /// `a · ω`
    pub fn left_mul(&self, a: &TorusElement) -> Result<Self, TorusError> {
        let components = self.components.iter().map(|c| a.mul(c)).collect::<Result<_, _>>()?;
        Ok(Self { components })
    }

    /// `ω · a`
    pub fn right_mul(&self, a: &TorusElement) -> Result<Self, TorusError> {
        let components = self.components.iter().map(|c| c.mul(a)).collect::<Result<_, _>>()?;
        Ok(Self { components })
    }
}

/// `[D, a] = Σ_i (Σ_x (τ_i·x) a_x U_x) ⊗ A_i`; the bounded part of `D`
/// commutes with the algebra and drops out.
pub fn dirac_commutator(d: &DiracData, a: &TorusElement) -> Result<OneForm, TorusError> {
    let n = a.n();
    if d.n() != n {
        return Err(TorusError::DimensionMismatch(format!("Dirac data for n = {} vs element n = {n}", d.n())));
    }
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let tau_i = d.tau().col(i);
        let mut comp = TorusElement::zero(a.theta.clone());
        for ((x, p), c) in &a.terms {
            let w: Rational = tau_i.iter().zip(x).map(|(t, &xi)| t * Rational::from_integer(xi.into())).sum();
            comp.add_term(x.clone(), p.clone(), c * GaussRational::new(w, Rational::zero()));
        }
        components.push(comp);
    }
    Ok(OneForm { components })
}

/// `Σ_j a_j [D, b_j]`
pub fn one_form_from_pairs(d: &DiracData, pairs: &[(TorusElement, TorusElement)]) -> Result<OneForm, TorusError> {
    let Some((a0, _)) = pairs.first() else {
        return Err(TorusError::DimensionMismatch("no pairs".into()));
    };
    pairs.iter().try_fold(OneForm::zero(a0.theta.clone()), |acc, (a, b)| {
        acc.add(&dirac_commutator(d, b)?.left_mul(a)?)
    })
}

/// Sign `ε_J` of the real structure in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealSign {
    pub n: usize,
    pub value: i8,
}

pub fn epsilon_j(n: usize) -> RealSign {
    RealSign { n, value: if n % 4 == 1 { -1 } else { 1 } }
}

/// Outcome of the self-Morita fluctuation on the truncated circle.
#[derive(Debug, Clone, Serialize)]
pub struct FluctuationReport {
    pub cutoff: usize,
    pub epsilon_j: i8,
    /// max |(D' − D) e_μ| entry over |μ| ≤ M/2
    pub residual: f64,
    /// max entry of the multiplication operator `c` over the same columns
    pub c_norm: f64,
    /// max entry of `JD + DJ` on the same columns
    pub j_anticommutator: f64,
}

/// Antilinear reflection `J(Σ v_μ e_μ) = Σ conj(v_μ) e_{−μ}` on the basis
/// `μ ∈ [−M, M]`.
fn reflect_conj(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().rev().map(|z| z.conj()).collect()
}

/// Builds `D' = D + c + ε_J J c J†` for the commutative circle on the
/// truncated basis `e_μ`, `μ ∈ [−M, M]`, with `D e_μ = μ e_μ` and `c` acting by
/// multiplication, and reports `D' − D` on interior columns.
pub fn fluctuate_dim1(c: &TorusElement, cutoff: usize) -> Result<FluctuationReport, TorusError> {
    if c.n() != 1 {
        return Err(TorusError::DimensionMismatch(format!("circle example needs n = 1, got {}", c.n())));
    }
    if cutoff < 4 {
        return Err(TorusError::CutoffTooSmall(cutoff));
    }
    let m = cutoff as i64;
    let dim = 2 * cutoff + 1;
    let idx = |mu: i64| (mu + m) as usize;
    let coeffs = c.to_numeric();

    let mut dirac = CMatrix::zeros(dim, dim);
    let mut mult = CMatrix::zeros(dim, dim);
    for mu in -m..=m {
        dirac[(idx(mu), idx(mu))] = Complex64::new(mu as f64, 0.0);
        for (k, z) in &coeffs {
            let nu = mu + k[0];
            if (-m..=m).contains(&nu) {
                mult[(idx(nu), idx(mu))] += z;
            }
        }
    }

    // J c J† column by column; J is an involution so J† = J^{-1} = J.
    let mut conj_mult = CMatrix::zeros(dim, dim);
    let mut jd_plus_dj = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![Complex64::zero(); dim];
        e[col] = Complex64::one();
        let pre = reflect_conj(&e);
        let image: Vec<Complex64> = (0..dim).map(|r| (0..dim).map(|k| mult[(r, k)] * pre[k]).sum()).collect();
        let out = reflect_conj(&image);
        for r in 0..dim {
            conj_mult[(r, col)] = out[r];
        }
        let d_e: Vec<Complex64> = (0..dim).map(|r| dirac[(r, col)]).collect();
        let jd = reflect_conj(&d_e);
        let j_e = reflect_conj(&e);
        let dj: Vec<Complex64> = (0..dim).map(|r| (0..dim).map(|k| dirac[(r, k)] * j_e[k]).sum()).collect();
        for r in 0..dim {
            jd_plus_dj[(r, col)] = jd[r] + dj[r];
        }
    }

    let eps = epsilon_j(1).value;
    let fluctuated = &dirac + &mult + conj_mult * Complex64::new(eps as f64, 0.0);
    let diff = fluctuated - &dirac;

    let lo = idx(-m / 2);
    let hi = idx(m / 2);
    let interior = |mat: &CMatrix| max_abs(&mat.columns(lo, hi - lo + 1).into_owned());
    Ok(FluctuationReport {
        cutoff,
        epsilon_j: eps,
        residual: interior(&diff),
        c_norm: interior(&mult),
        j_anticommutator: interior(&jd_plus_dj),
    })
}
