//! The group SO(n,n|Z): generator constructors, membership, composition and
//! the fractional-linear action `θ ↦ (Aθ + B)(Cθ + D)^{-1}` on skew matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{IntMatrix, LinalgError, RatMatrix, SkewMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SonnError {
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(BigInt),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("dimension {0} too small (need n >= 2)")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not in SO(n,n|Z)")]
    NotMember,
    #[error("action undefined: C·θ + D is singular{}", step.map(|s| format!(" at word step {s}")).unwrap_or_default())]
    ActionUndefined { step: Option<usize> },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Gram matrix `[[0, I], [I, 0]]` of the split form `Σ x_i x_{n+i}` (doubled).
pub fn split_form(n: usize) -> IntMatrix {
    let mut q = IntMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        q.set(i, n + i, BigInt::one());
        q.set(n + i, i, BigInt::one());
    }
    q
}

/// True iff `m` is an integer matrix of determinant one preserving the split
/// quadratic form.
pub fn verify_membership(m: &IntMatrix) -> bool {
    if !m.is_square() || m.rows() % 2 != 0 || m.rows() == 0 {
        return false;
    }
    let q = split_form(m.rows() / 2);
    let Ok(lhs) = m.transpose().checked_mul(&q).and_then(|t| t.checked_mul(m)) else {
        return false;
    };
    lhs == q && m.det().map(|d| d.is_one()).unwrap_or(false)
}

/// An element of SO(n,n|Z) stored as its 2n×2n integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SonnElement {
    n: usize,
    m: IntMatrix,
}

impl SonnElement {
    /// Validates membership.
    pub fn new(m: IntMatrix) -> Result<Self, SonnError> {
        if !verify_membership(&m) {
            return Err(SonnError::NotMember);
        }
        Ok(Self { n: m.rows() / 2, m })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, m: IntMatrix::identity(2 * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn a(&self) -> IntMatrix {
        self.m.block(0, 0, self.n, self.n)
    }

    pub fn b(&self) -> IntMatrix {
        self.m.block(0, self.n, self.n, self.n)
    }

    pub fn c(&self) -> IntMatrix {
        self.m.block(self.n, 0, self.n, self.n)
    }

    pub fn d(&self) -> IntMatrix {
        self.m.block(self.n, self.n, self.n, self.n)
    }

    /// Group law: matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self, SonnError> {
        if self.n != other.n {
            return Err(SonnError::DimensionMismatch(format!("n = {} vs n = {}", self.n, other.n)));
        }
        Ok(Self { n: self.n, m: self.m.checked_mul(&other.m)? })
    }

    /// `(Aθ + B)(Cθ + D)^{-1}`, exact.
    pub fn act(&self, theta: &SkewMatrix) -> Result<SkewMatrix, SonnError> {
        if theta.dim() != self.n {
            return Err(SonnError::DimensionMismatch(format!(
                "element for n = {} applied to {}x{} theta",
                self.n,
                theta.dim(),
                theta.dim()
            )));
        }
        let t = theta.matrix();
        let num = &(&self.a().to_rat() * t) + &self.b().to_rat();
        let den = &(&self.c().to_rat() * t) + &self.d().to_rat();
        let inv = den.inverse().map_err(|e| match e {
            LinalgError::SingularMatrix => SonnError::ActionUndefined { step: None },
            other => other.into(),
        })?;
        let out = &num * &inv;
        // closure of the action on skew matrices; failure would be a bug
        Ok(SkewMatrix::new(out).expect("SO(n,n|Z) action left the skew matrices"))
    }
}

impl Serialize for SonnElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            matrix: &'a IntMatrix,
        }
        Repr { n: self.n, matrix: &self.m }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SonnElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            n: usize,
            matrix: IntMatrix,
        }
        let r = Repr::deserialize(d)?;
        if r.matrix.rows() != 2 * r.n || r.matrix.cols() != 2 * r.n {
            return Err(D::Error::custom(format!("matrix must be {0}x{0} for n = {1}", 2 * r.n, r.n)));
        }
        SonnElement::new(r.matrix).map_err(D::Error::custom)
    }
}

/// `ρ(R) = diag(R, (R^t)^{-1})` for `R ∈ GL(n, Z)`.
pub fn make_rho(r: &IntMatrix) -> Result<SonnElement, SonnError> {
    if !r.is_square() {
        return Err(LinalgError::NonSquare { rows: r.rows(), cols: r.cols() }.into());
    }
    let det = r.det()?;
    if det.abs() != BigInt::one() {
        return Err(SonnError::NotUnimodular(det));
    }
    let n = r.rows();
    let dual = IntMatrix::try_from_rat(&r.transpose().to_rat().inverse()?)?;
    let zero = RatMatrix::zeros(n, n);
    let m = RatMatrix::from_blocks(&[&[&r.to_rat(), &zero], &[&zero, &dual.to_rat()]])?;
    Ok(SonnElement { n, m: IntMatrix::try_from_rat(&m)? })
}

/// `ν(N) = [[I, N], [0, I]]` for integer skew `N`.
pub fn make_nu(nmat: &IntMatrix) -> Result<SonnElement, SonnError> {
    if !nmat.is_skew() {
        return Err(SonnError::NotSkew);
    }
    let n = nmat.rows();
    let mut m = IntMatrix::identity(2 * n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, n + j, nmat.get(i, j).clone());
        }
    }
    Ok(SonnElement { n, m })
}

/// The coordinate swap `x_1 ↔ x_{n+1}`, `x_2 ↔ x_{n+2}`.
pub fn make_sigma2(n: usize) -> Result<SonnElement, SonnError> {
    if n < 2 {
        return Err(SonnError::DimensionTooSmall(n));
    }
    let mut m = IntMatrix::identity(2 * n);
    for i in 0..2 {
        m.set(i, i, BigInt::ZERO);
        m.set(n + i, n + i, BigInt::ZERO);
        m.set(i, n + i, BigInt::one());
        m.set(n + i, i, BigInt::one());
    }
    Ok(SonnElement { n, m })
}

/// `σ₂(θ)` through the block formula in terms of `θ₁₁` (top-left 2×2),
/// `θ₁₂`, `θ₂₁` and `θ₂₂`. Independent of the fractional-linear route.
pub fn sigma2_block_formula(theta: &SkewMatrix) -> Result<SkewMatrix, SonnError> {
    let n = theta.dim();
    if n < 2 {
        return Err(SonnError::DimensionTooSmall(n));
    }
    let q = n - 2;
    let t = theta.matrix();
    let t11 = t.block(0, 0, 2, 2);
    let t12 = t.block(0, 2, 2, q);
    let t21 = t.block(2, 0, q, 2);
    let t22 = t.block(2, 2, q, q);
    let inv = t11.inverse().map_err(|_| SonnError::ActionUndefined { step: None })?;
    let top_right = -&(&inv * &t12);
    let bottom_left = &t21 * &inv;
    let bottom_right = &t22 - &(&bottom_left * &t12);
    let m = RatMatrix::from_blocks(&[&[&inv, &top_right], &[&bottom_left, &bottom_right]])?;
    Ok(SkewMatrix::new(m)?)
}

/// One letter of a generator word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Rho(IntMatrix),
    Nu(IntMatrix),
    Sigma2,
}

impl Generator {
    pub fn element(&self, n: usize) -> Result<SonnElement, SonnError> {
        let el = match self {
            Generator::Rho(r) => make_rho(r)?,
            Generator::Nu(m) => make_nu(m)?,
            Generator::Sigma2 => make_sigma2(n)?,
        };
        if el.n() != n {
            return Err(SonnError::DimensionMismatch(format!("generator of size {} in a word for n = {n}", el.n())));
        }
        Ok(el)
    }
}

/// Ordered generator word, applied to θ left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWord {
    pub word: Vec<Generator>,
}

impl GeneratorWord {
    pub fn new(word: Vec<Generator>) -> Self {
        Self { word }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Checks every payload (unimodular ρ, skew ν, n ≥ 2 for σ₂).
    pub fn validate(&self, n: usize) -> Result<(), SonnError> {
        self.word.iter().try_for_each(|g| g.element(n).map(|_| ()))
    }

    /// The group element acting as the whole word: `w_k ⋯ w_1`, since the
    /// first letter acts first.
    pub fn element(&self, n: usize) -> Result<SonnElement, SonnError> {
        self.word
            .iter()
            .try_fold(SonnElement::identity(n), |acc, g| g.element(n)?.compose(&acc))
    }
}

/// Applies the word letter by letter; a singular step reports its index.
pub fn word_act(word: &GeneratorWord, theta: &SkewMatrix) -> Result<SkewMatrix, SonnError> {
    let n = theta.dim();
    word.word.iter().enumerate().try_fold(theta.clone(), |t, (step, g)| {
        g.element(n)?.act(&t).map_err(|e| match e {
            SonnError::ActionUndefined { .. } => SonnError::ActionUndefined { step: Some(step) },
            other => other,
        })
    })
}
