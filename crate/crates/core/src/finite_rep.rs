//! Exact clock-and-shift representation of `A_θ` for rational θ.
//!
//! One tensor factor `C^{d_f}` per generator index `f < n−1`, where `d_f` is
//! the common denominator of row `f` of θ above the diagonal. `U_i` acts on
//! factor `f` as `C^{[i=f]} S^{d_f θ_{fi}}` (the shift power only for `i > f`),
//! with `C = diag(ω^k)`, `S e_k = e_{k+1}` and `CS = ωSC`. Generators are
//! monomial matrices, so every phase stays an exact rational.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{CMatrix, IntMatrix, Phase, Rational, SkewMatrix};
use crate::sonn::Generator;
use crate::torus::TorusElement;

/// Refuse constructions beyond this many basis vectors.
pub const MAX_DIM: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteRepError {
    #[error("element lives over a different θ")]
    ThetaMismatch,
    #[error("representation dimension {0} exceeds the limit")]
    DimensionTooLarge(String),
    #[error("generator not supported: {0}")]
    UnsupportedGenerator(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// `M e_j = phase_j · e_{perm_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMatrix {
    perm: Vec<usize>,
    phases: Vec<Phase>,
}

impl MonomialMatrix {
    pub fn identity(dim: usize) -> Self {
        Self { perm: (0..dim).collect(), phases: vec![Phase::one(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// `self · other`
    pub fn mul(&self, other: &Self) -> Self {
        let (perm, phases) = other
            .perm
            .iter()
            .zip(&other.phases)
            .map(|(&k, p)| (self.perm[k], &self.phases[k] * p))
            .unzip();
        Self { perm, phases }
    }

    /// Inverse, which is also the adjoint.
    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.dim()];
        let mut phases = vec![Phase::one(); self.dim()];
        for (j, (&k, p)) in self.perm.iter().zip(&self.phases).enumerate() {
            perm[k] = j;
            phases[k] = p.inverse();
        }
        Self { perm, phases }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        (0..e.unsigned_abs()).fold(Self::identity(self.dim()), |acc, _| acc.mul(&base))
    }

    pub fn scale(&self, s: &Phase) -> Self {
        Self { perm: self.perm.clone(), phases: self.phases.iter().map(|p| p * s).collect() }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (j, (&k, p)) in self.perm.iter().zip(&self.phases).enumerate() {
            m[(k, j)] = p.to_complex();
        }
        m
    }

    /// Max entrywise distance between the two dense matrices, in `O(dim)`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.perm
            .iter()
            .zip(&self.phases)
            .zip(other.perm.iter().zip(&other.phases))
            .map(|((k1, p1), (k2, p2))| if k1 == k2 { (p1.to_complex() - p2.to_complex()).norm() } else { 1.0 })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct ClockShiftRep {
    theta: Arc<SkewMatrix>,
    factor_dims: Vec<usize>,
    generators: Vec<MonomialMatrix>,
}

fn to_usize(r: &Rational) -> usize {
    r.to_integer().to_usize().expect("denominator fits in usize")
}

pub fn clock_shift_rep(theta: Arc<SkewMatrix>) -> Result<ClockShiftRep, FiniteRepError> {
    let n = theta.dim();
    let factors = n.saturating_sub(1);
    let factor_dims: Vec<usize> = (0..factors)
        .map(|f| {
            (f + 1..n).fold(1usize, |acc, j| acc.lcm(&to_usize(&Rational::from_integer(theta.get(f, j).denom().clone()))))
        })
        .collect();
    let dim = factor_dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d).filter(|&v| v <= MAX_DIM));
    let Some(dim) = dim else {
        return Err(FiniteRepError::DimensionTooLarge(format!("{factor_dims:?}")));
    };

    // mixed radix, factor 0 most significant
    let mut strides = vec![1usize; factors];
    for f in (0..factors.saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * factor_dims[f + 1];
    }

    let generators = (0..n)
        .map(|i| {
            let shifts: Vec<usize> = (0..factors)
                .map(|f| {
                    if i > f {
                        let b = theta.get(f, i) * Rational::from_integer(factor_dims[f].into());
                        let d = factor_dims[f] as i64;
                        b.to_integer().to_i64().expect("shift fits").rem_euclid(d) as usize
                    } else {
                        0
                    }
                })
                .collect();
            let mut perm = vec![0; dim];
            let mut phases = vec![Phase::one(); dim];
            for j in 0..dim {
                let mut target = 0;
                let mut phase = Rational::zero();
                for f in 0..factors {
                    let d = factor_dims[f];
                    let k = (j / strides[f]) % d;
                    let k2 = (k + shifts[f]) % d;
                    target += k2 * strides[f];
                    if i == f {
                        phase += Rational::new((k2 as i64).into(), (d as i64).into());
                    }
                }
                perm[j] = target;
                phases[j] = Phase::new(phase);
            }
            MonomialMatrix { perm, phases }
        })
        .collect();
    Ok(ClockShiftRep { theta, factor_dims, generators })
}

impl ClockShiftRep {
    pub fn n(&self) -> usize {
        self.theta.dim()
    }

    pub fn theta(&self) -> &Arc<SkewMatrix> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn generator(&self, i: usize) -> &MonomialMatrix {
        &self.generators[i]
    }

    pub fn generator_matrices(&self) -> Vec<CMatrix> {
        self.generators.iter().map(MonomialMatrix::to_dense).collect()
    }

    /// `U_1^{x_1} ⋯ U_n^{x_n}`
    pub fn monomial(&self, x: &[i64]) -> MonomialMatrix {
        self.generators.iter().zip(x).fold(MonomialMatrix::identity(self.dim()), |acc, (u, &e)| acc.mul(&u.pow(e)))
    }

    /// Max defect of `U_x U_y = e(x·θy) U_y U_x` over the given vectors.
    pub fn relation_defect(&self, xs: &[Vec<i64>]) -> f64 {
        relation_defect_with(xs, |x| self.monomial(x), &self.theta)
    }

    /// A monomial matrix is unitary iff its column map is a bijection and
    /// every entry has modulus one.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        self.generators
            .iter()
            .map(|u| {
                let mut hit = vec![false; dim];
                u.perm.iter().for_each(|&k| hit[k] = true);
                if hit.iter().any(|h| !h) {
                    return 1.0;
                }
                u.phases.iter().map(|p| (p.to_complex().norm() - 1.0).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn relation_defect_with(xs: &[Vec<i64>], op: impl Fn(&[i64]) -> MonomialMatrix, theta: &SkewMatrix) -> f64 {
    let ops: Vec<MonomialMatrix> = xs.iter().map(|x| op(x)).collect();
    let mut worst = 0.0f64;
    for (x, ux) in xs.iter().zip(&ops) {
        for (y, uy) in xs.iter().zip(&ops) {
            let lhs = ux.mul(uy);
            let rhs = uy.mul(ux).scale(&Phase::new(theta.pairing(x, y)));
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    worst
}

/// Exact equality version of the relation check.
fn relation_exact(xs: &[Vec<i64>], op: impl Fn(&[i64]) -> MonomialMatrix, theta: &SkewMatrix) -> bool {
    let ops: Vec<MonomialMatrix> = xs.iter().map(|x| op(x)).collect();
    xs.iter().zip(&ops).all(|(x, ux)| {
        xs.iter().zip(&ops).all(|(y, uy)| ux.mul(uy) == uy.mul(ux).scale(&Phase::new(theta.pairing(x, y))))
    })
}

/// Exact image of a normal-ordered element as a sum of monomial matrices.
pub fn eval_terms(r: &ClockShiftRep, a: &TorusElement) -> Result<Vec<(num_complex::Complex64, MonomialMatrix)>, FiniteRepError> {
    if **a.theta() != *r.theta {
        return Err(FiniteRepError::ThetaMismatch);
    }
    Ok(a.terms()
        .map(|(x, p, c)| {
            let coeff = num_complex::Complex64::new(
                crate::linalg::rational_to_f64(&c.re),
                crate::linalg::rational_to_f64(&c.im),
            );
            (coeff, r.monomial(x).scale(p))
        })
        .collect())
}

pub fn eval_element(r: &ClockShiftRep, a: &TorusElement) -> Result<CMatrix, FiniteRepError> {
    let dim = r.dim();
    Ok(eval_terms(r, a)?.into_iter().fold(CMatrix::zeros(dim, dim), |acc, (c, m)| acc + m.to_dense() * c))
}

/// Box `{−r..r}^n`.
pub fn test_box(n: usize, r: i64) -> Vec<Vec<i64>> {
    (0..n).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|v| (-r..=r).map(move |k| [v.clone(), vec![k]].concat())).collect()
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub generator: &'static str,
    /// max relation defect of the transported generators at the new θ
    pub max_defect: f64,
    /// relation holds in exact phase arithmetic
    pub exact: bool,
    pub pass: bool,
}

/// Checks that the generators of `A_θ` realize `A_{gθ}` for `g = ν(N)` or
/// `g = ρ(R)` over the box `{−1,0,1}^n`.
pub fn verify_iso_invariance(theta: &Arc<SkewMatrix>, g: &Generator) -> Result<IsoReport, FiniteRepError> {
    let n = theta.dim();
    let rep = clock_shift_rep(theta.clone())?;
    let xs = test_box(n, 1);
    let image = |gen: &Generator| {
        gen.element(n)
            .and_then(|e| e.act(theta))
            .map_err(|e| FiniteRepError::DimensionMismatch(e.to_string()))
    };
    match g {
        Generator::Nu(_) => {
            let moved = image(g)?;
            let exact = relation_exact(&xs, |x| rep.monomial(x), &moved);
            let max_defect = relation_defect_with(&xs, |x| rep.monomial(x), &moved);
            Ok(IsoReport { generator: "nu", max_defect, exact, pass: exact })
        }
        Generator::Rho(r) => {
            let moved = image(g)?;
            let rt = r.transpose();
            let transport = |x: &[i64]| {
                let y: Vec<i64> = (0..n)
                    .map(|i| {
                        (0..n).map(|j| rt.get(i, j).to_i64().expect("small R") * x[j]).sum()
                    })
                    .collect();
                rep.monomial(&y)
            };
            let exact = relation_exact(&xs, transport, &moved);
            let max_defect = relation_defect_with(&xs, transport, &moved);
            Ok(IsoReport { generator: "rho", max_defect, exact, pass: max_defect < 1e-10 })
        }
        Generator::Sigma2 => Err(FiniteRepError::UnsupportedGenerator("sigma2 is not an isomorphism")),
    }
}

/// Integer skew `N` check reused by callers that build `ν(N)` words.
pub fn is_integer_skew(m: &IntMatrix) -> bool {
    m.is_square() && m.is_skew()
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub dim: usize,
    pub samples: usize,
    /// generator relations over `{−1,0,1}^n`
    pub relation_defect: f64,
    pub unitarity_defect: f64,
    /// `eval(M(x)·M(y))` against the matrix product, max over samples
    pub product_defect: f64,
    /// `eval(M(x)*)` against the adjoint of `eval(M(x))`
    pub star_defect: f64,
    /// `M(x)M(y) = e(x·θy) M(y)M(x)` in exact phase arithmetic on every sample
    pub symbolic_relation_exact: bool,
    pub pass: bool,
}

/// Compares the symbolic normal-ordering engine against the clock-and-shift
/// matrices on `samples` random pairs from `{−r..r}^n`.
pub fn oracle_check(
    theta: Arc<SkewMatrix>,
    samples: usize,
    radius: i64,
    rng: &mut impl rand::Rng,
) -> Result<OracleReport, FiniteRepError> {
    let n = theta.dim();
    let rep = clock_shift_rep(theta.clone())?;
    let mut product_defect = 0.0f64;
    let mut star_defect = 0.0f64;
    let mut exact = true;
    for _ in 0..samples {
        let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
        let y: Vec<i64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
        let mx = TorusElement::monomial(theta.clone(), x.clone());
        let my = TorusElement::monomial(theta.clone(), y.clone());
        let xy = mx.mul(&my).expect("same θ");
        let yx = my.mul(&mx).expect("same θ");
        exact &= xy == yx.scale_phase(&Phase::new(theta.pairing(&x, &y)));

        let oracle = rep.monomial(&x).mul(&rep.monomial(&y));
        product_defect = product_defect.max(single_term_defect(&rep, &xy, &oracle)?);
        star_defect = star_defect.max(single_term_defect(&rep, &mx.star(), &rep.monomial(&x).inverse())?);
    }
    let relation_defect = rep.relation_defect(&test_box(n, 1));
    let unitarity_defect = rep.unitarity_defect();
    let pass = exact && product_defect < 1e-10 && star_defect < 1e-10 && relation_defect < 1e-12 && unitarity_defect < 1e-12;
    Ok(OracleReport {
        n,
        dim: rep.dim(),
        samples,
        relation_defect,
        unitarity_defect,
        product_defect,
        star_defect,
        symbolic_relation_exact: exact,
        pass,
    })
}

/// Defect of a one-term element against a monomial matrix.
fn single_term_defect(rep: &ClockShiftRep, a: &TorusElement, m: &MonomialMatrix) -> Result<f64, FiniteRepError> {
    let terms = eval_terms(rep, a)?;
    let [(c, image)] = terms.as_slice() else {
        return Ok(f64::INFINITY);
    };
    let scaled_diff = image
        .perm
        .iter()
        .zip(&image.phases)
        .zip(m.perm.iter().zip(&m.phases))
        .map(|((k1, p1), (k2, p2))| if k1 == k2 { (c * p1.to_complex() - p2.to_complex()).norm() } else { 1.0 })
        .fold(0.0, f64::max);
    Ok(scaled_diff)
}
