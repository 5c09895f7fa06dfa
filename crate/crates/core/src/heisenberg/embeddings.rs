use num_traits::Zero;

use super::ModuleError;
use crate::dirac::connection_matrix;
use crate::linalg::{RatMatrix, Rational, SkewMatrix};
use crate::sonn::sigma2_block_formula;

/// Lattice embeddings `T, S: Z^n → R² × Z^q × R^q`, exact over Q.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    theta: SkewMatrix,
    theta_prime: SkewMatrix,
    t11: RatMatrix,
    t32: RatMatrix,
    t: RatMatrix,
    s: RatMatrix,
    jo: RatMatrix,
    j2: RatMatrix,
    connection: RatMatrix,
}

fn jo() -> RatMatrix {
    RatMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]])
}

fn j2(q: usize) -> RatMatrix {
    let z = |r, c| RatMatrix::zeros(r, c);
    let id = RatMatrix::identity(q);
    RatMatrix::from_blocks(&[
        &[&jo(), &z(2, q), &z(2, q)],
        &[&z(q, 2), &z(q, q), &id],
        &[&z(q, 2), &-&id, &z(q, q)],
    ])
    .expect("block shapes")
}

/// `T11 = diag(1, −θ₁₂)`, `T32 = −(strict upper part of θ₂₂)`,
/// `T = [[T11, 0], [0, I_q], [θ₁₂ᵗ, T32]]` and
/// `S = [[K, −Kθ₁₂], [0, I_q], [0, T32ᵗ]]` with `K = Jo (T11ᵗ)⁻¹`.
pub fn build_embeddings(theta: &SkewMatrix) -> Result<Embeddings, ModuleError> {
    let n = theta.dim();
    if n < 2 {
        return Err(ModuleError::DimensionTooSmall(n));
    }
    let q = n - 2;
    let m = theta.matrix();
    let a = m.get(0, 1).clone();
    if a.is_zero() {
        return Err(ModuleError::Theta11Singular);
    }
    let t11 = RatMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Rational::from_integer(1.into()),
        (1, 1) => -a.clone(),
        _ => Rational::zero(),
    });
    let t32 = RatMatrix::from_fn(q, q, |i, j| if i < j { -m.get(2 + i, 2 + j).clone() } else { Rational::zero() });
    let theta12 = m.block(0, 2, 2, q);
    let id = RatMatrix::identity(q);
    let zero = |r, c| RatMatrix::zeros(r, c);
    let t = RatMatrix::from_blocks(&[&[&t11, &zero(2, q)], &[&zero(q, 2), &id], &[&theta12.transpose(), &t32]])
        .expect("block shapes");
    let k = &jo() * &t11.transpose().inverse().expect("T11 invertible");
    let s = RatMatrix::from_blocks(&[
        &[&k, &-&(&k * &theta12)],
        &[&zero(q, 2), &id],
        &[&zero(q, 2), &t32.transpose()],
    ])
    .expect("block shapes");
    let theta_prime = sigma2_block_formula(theta).map_err(|_| ModuleError::Theta11Singular)?;
    let connection = connection_matrix(theta).map_err(|_| ModuleError::Theta11Singular)?;
    let e = Embeddings { theta: theta.clone(), theta_prime, t11, t32, t, s, jo: jo(), j2: j2(q), connection };
    e.check_invariants()?;
    Ok(e)
}

impl Embeddings {
    pub fn n(&self) -> usize {
        self.theta.dim()
    }

    pub fn q(&self) -> usize {
        self.n() - 2
    }

    pub fn theta(&self) -> &SkewMatrix {
        &self.theta
    }

    /// `σ₂(θ)`, the parameter of the left algebra.
    pub fn theta_prime(&self) -> &SkewMatrix {
        &self.theta_prime
    }

    pub fn t11(&self) -> &RatMatrix {
        &self.t11
    }

    pub fn t32(&self) -> &RatMatrix {
        &self.t32
    }

    pub fn t(&self) -> &RatMatrix {
        &self.t
    }

    pub fn s(&self) -> &RatMatrix {
        &self.s
    }

    pub fn jo(&self) -> &RatMatrix {
        &self.jo
    }

    pub fn j2(&self) -> &RatMatrix {
        &self.j2
    }

    /// `G = [[θ₁₁⁻¹, −θ₁₁⁻¹θ₁₂], [0, I_q]]`: `[∇, L_x] = (Gx)·L_x`.
    pub fn connection_matrix(&self) -> &RatMatrix {
        &self.connection
    }

    /// `Sᵗ J₂ T`, integral because the two lattices are dual.
    pub fn duality_pairing(&self) -> RatMatrix {
        &(&self.s.transpose() * &self.j2) * &self.t
    }

    fn check_invariants(&self) -> Result<(), ModuleError> {
        let theta = self.theta.matrix();
        let t11_form = &(&self.t11.transpose() * &self.jo) * &self.t11;
        if t11_form != -&theta.block(0, 0, 2, 2) {
            return Err(ModuleError::InvariantViolated("T11ᵗ Jo T11 ≠ −θ₁₁".into()));
        }
        let q = self.q();
        if &self.t32.transpose() - &self.t32 != theta.block(2, 2, q, q) {
            return Err(ModuleError::InvariantViolated("T32ᵗ − T32 ≠ θ₂₂".into()));
        }
        if &(&self.t.transpose() * &self.j2) * &self.t != -theta {
            return Err(ModuleError::InvariantViolated("Tᵗ J₂ T ≠ −θ".into()));
        }
        if !self.duality_pairing().is_integral() {
            return Err(ModuleError::InvariantViolated("Sᵗ J₂ T not integral".into()));
        }
        if &(&self.s.transpose() * &self.j2) * &self.s != *self.theta_prime.matrix() {
            return Err(ModuleError::InvariantViolated("Sᵗ J₂ S ≠ σ₂(θ)".into()));
        }
        Ok(())
    }
}
