//! Equivariant Dirac data `D = Σ_i (τ_i·δ) A_i + B` and its transformation
//! under the generators of `SO(n,n|Z)`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{
    format_rational, parse_rational, rat, CMatrix, IntMatrix, LinalgError, RatMatrix, Rational, SkewMatrix,
};
use crate::sonn::{make_sigma2, Generator, GeneratorWord, SonnError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiracError {
    #[error("tau frame is not invertible")]
    SingularFrame,
    #[error("bounded part is not self-adjoint or has the wrong size")]
    InvalidBoundedPart,
    #[error("mu_shift entries must be 0 or 1/2")]
    InvalidMuShift,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("R is not unimodular")]
    NotUnimodular,
    #[error("theta_11 is singular{}", step_suffix(.step))]
    Theta11Singular { step: Option<usize> },
    #[error("action undefined{}", step_suffix(.step))]
    ActionUndefined { step: Option<usize> },
    #[error(transparent)]
    Sonn(#[from] SonnError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn step_suffix(step: &Option<usize>) -> String {
    step.map(|s| format!(" at step {s}")).unwrap_or_default()
}

const SELF_ADJOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DiracData {
    tau: RatMatrix,
    b: Option<CMatrix>,
    mu_shift: Vec<Rational>,
}

impl DiracData {
    pub fn new(tau: RatMatrix, b: Option<CMatrix>, mu_shift: Vec<Rational>) -> Result<Self, DiracError> {
        let n = tau.rows();
        if !tau.is_square() || n == 0 {
            return Err(DiracError::DimensionMismatch("tau must be a nonempty square matrix".into()));
        }
        if tau.det()?.is_zero() {
            return Err(DiracError::SingularFrame);
        }
        if let Some(b) = &b {
            let dim = 1usize << (n / 2);
            let defect = (b - b.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if b.nrows() != dim || b.ncols() != dim || defect > SELF_ADJOINT_TOL {
                return Err(DiracError::InvalidBoundedPart);
            }
        }
        let half = rat(1, 2);
        if mu_shift.len() != n || mu_shift.iter().any(|m| !m.is_zero() && *m != half) {
            return Err(DiracError::InvalidMuShift);
        }
        Ok(Self { tau, b, mu_shift })
    }

    /// `τ_i = e_i`, no bounded part, trivial spin shift.
    pub fn standard(n: usize) -> Self {
        Self { tau: RatMatrix::identity(n), b: None, mu_shift: vec![Rational::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.tau.rows()
    }

    pub fn tau(&self) -> &RatMatrix {
        &self.tau
    }

    pub fn bounded_part(&self) -> Option<&CMatrix> {
        self.b.as_ref()
    }

    pub fn mu_shift(&self) -> &[Rational] {
        &self.mu_shift
    }

    pub fn with_bounded_part(self, b: Option<CMatrix>) -> Result<Self, DiracError> {
        Self::new(self.tau, b, self.mu_shift)
    }

    fn with_tau(&self, tau: RatMatrix) -> Self {
        Self { tau, b: self.b.clone(), mu_shift: self.mu_shift.clone() }
    }
}

/// `ν(N)` changes θ only.
pub fn transform_nu(d: &DiracData, _n: &IntMatrix) -> DiracData {
    d.clone()
}

/// `τ_i ↦ R^{-1} τ_i`.
pub fn transform_rho(d: &DiracData, r: &IntMatrix) -> Result<DiracData, DiracError> {
    if r.rows() != d.n() || !r.is_square() {
        return Err(DiracError::DimensionMismatch(format!("R is {}x{}, n = {}", r.rows(), r.cols(), d.n())));
    }
    let det = r.det()?;
    if det != 1.into() && det != (-1).into() {
        return Err(DiracError::NotUnimodular);
    }
    let rinv = r.to_rat().inverse()?;
    Ok(d.with_tau(rinv.checked_mul(&d.tau)?))
}

fn theta_blocks(theta: &SkewMatrix) -> Result<(RatMatrix, RatMatrix), DiracError> {
    let n = theta.dim();
    if n < 2 {
        return Err(SonnError::DimensionTooSmall(n).into());
    }
    let m = theta.matrix();
    let t11_inv = m.block(0, 0, 2, 2).inverse().map_err(|_| DiracError::Theta11Singular { step: None })?;
    Ok((t11_inv, m.block(0, 2, 2, n - 2)))
}

/// Frame matrix `F = [[−θ₁₁⁻¹, 0], [θ₁₂ᵗθ₁₁⁻¹, I_q]]` with `τ' = F τ`.
pub fn sigma2_frame(theta: &SkewMatrix) -> Result<RatMatrix, DiracError> {
    let (t11_inv, t12) = theta_blocks(theta)?;
    let q = theta.dim() - 2;
    let lower = t12.transpose().checked_mul(&t11_inv)?;
    Ok(RatMatrix::from_blocks(&[
        &[&-&t11_inv, &RatMatrix::zeros(2, q)],
        &[&lower, &RatMatrix::identity(q)],
    ])?)
}

/// The first displayed form: `G = [[θ₁₁⁻¹, −θ₁₁⁻¹θ₁₂], [0, I_q]]`, the matrix
/// sending `x` to the coefficient vector of `[∇, U_x^l]`. `F = Gᵗ`.
pub fn connection_matrix(theta: &SkewMatrix) -> Result<RatMatrix, DiracError> {
    let (t11_inv, t12) = theta_blocks(theta)?;
    let q = theta.dim() - 2;
    let upper = -&t11_inv.checked_mul(&t12)?;
    Ok(RatMatrix::from_blocks(&[
        &[&t11_inv, &upper],
        &[&RatMatrix::zeros(q, 2), &RatMatrix::identity(q)],
    ])?)
}

/// Dirac data on the σ₂-dual torus. The bounded part is absorbed and reset
/// to absent; `mu_shift` is carried unchanged.
pub fn transform_sigma2(d: &DiracData, theta: &SkewMatrix) -> Result<DiracData, DiracError> {
    if theta.dim() != d.n() {
        return Err(DiracError::DimensionMismatch(format!("theta n = {}, Dirac n = {}", theta.dim(), d.n())));
    }
    let f = sigma2_frame(theta)?;
    Ok(DiracData { tau: f.checked_mul(&d.tau)?, b: None, mu_shift: d.mu_shift.clone() })
}

/// Left-to-right fold of the word over `(d, θ)`.
pub fn transform_word(
    d: &DiracData,
    theta: &SkewMatrix,
    word: &GeneratorWord,
) -> Result<(DiracData, SkewMatrix), DiracError> {
    let n = theta.dim();
    if d.n() != n {
        return Err(DiracError::DimensionMismatch(format!("theta n = {n}, Dirac n = {}", d.n())));
    }
    word.validate(n)?;
    let mut d = d.clone();
    let mut theta = theta.clone();
    for (step, g) in word.word.iter().enumerate() {
        let undefined = |e: SonnError| match e {
            SonnError::ActionUndefined { .. } => DiracError::ActionUndefined { step: Some(step) },
            other => other.into(),
        };
        d = match g {
            Generator::Nu(m) => transform_nu(&d, m),
            Generator::Rho(r) => transform_rho(&d, r)?,
            Generator::Sigma2 => transform_sigma2(&d, &theta).map_err(|e| match e {
                DiracError::Theta11Singular { .. } => DiracError::Theta11Singular { step: Some(step) },
                other => other,
            })?,
        };
        theta = match g {
            Generator::Sigma2 => make_sigma2(n)?.act(&theta).map_err(undefined)?,
            other => other.element(n)?.act(&theta).map_err(undefined)?,
        };
    }
    Ok((d, theta))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiracRepr {
    n: usize,
    tau: RatMatrix,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<[f64; 2]>>>,
    mu_shift: Vec<String>,
}

impl Serialize for DiracData {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let b = self.b.as_ref().map(|b| {
            (0..b.nrows()).map(|i| (0..b.ncols()).map(|j| [b[(i, j)].re, b[(i, j)].im]).collect()).collect()
        });
        DiracRepr {
            n: self.n(),
            tau: self.tau.clone(),
            b,
            mu_shift: self.mu_shift.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiracData {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = DiracRepr::deserialize(de)?;
        if r.tau.rows() != r.n {
            return Err(D::Error::custom("tau dimension differs from n"));
        }
        let b = match r.b {
            None => None,
            Some(rows) => {
                let dim = rows.len();
                if rows.iter().any(|row| row.len() != dim) {
                    return Err(D::Error::custom("B must be square"));
                }
                Some(CMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
            }
        };
        let mu = r.mu_shift.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        DiracData::new(r.tau, b, mu).map_err(D::Error::custom)
    }
}
