//! Irreducible self-adjoint representation of `Cl_{n,0}` by the Pauli tensor
//! tower.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{kron, max_abs, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    n: usize,
    dim: usize,
    generators: Vec<CMatrix>,
}

impl CliffordRep {
    /// Wraps arbitrary matrices for verification.
    pub fn from_generators(generators: Vec<CMatrix>) -> Self {
        let dim = generators.first().map_or(1, |g| g.nrows());
        Self { n: generators.len(), dim, generators }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn into_generators(self) -> Vec<CMatrix> {
        self.generators
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [CMatrix; 3] {
    let z = c(0.0, 0.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z]),
        CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c(-1.0, 0.0)]),
    ]
}

/// Generators for `n = 2k` start from the empty list on `C`; each step
/// `2k → 2k+2` maps `Γ_i ↦ Γ_i ⊗ σ_z` and appends `I ⊗ σ_x`, `I ⊗ σ_y`.
/// Odd `n = 2k+1` appends the chirality element `(−i)^k Γ_1⋯Γ_{2k}`.
pub fn clifford_generators(n: usize) -> CliffordRep {
    let [sx, sy, sz] = pauli();
    let k = n / 2;
    let mut gens: Vec<CMatrix> = Vec::with_capacity(n);
    let mut dim = 1;
    for _ in 0..k {
        let id = CMatrix::identity(dim, dim);
        gens = gens.iter().map(|g| kron(g, &sz)).collect();
        gens.push(kron(&id, &sx));
        gens.push(kron(&id, &sy));
        dim *= 2;
    }
    if n % 2 == 1 {
        let phase = (0..k).fold(c(1.0, 0.0), |acc, _| acc * c(0.0, -1.0));
        let chi = gens.iter().fold(CMatrix::identity(dim, dim), |acc, g| acc * g) * phase;
        gens.push(chi);
    }
    CliffordRep { n, dim, generators: gens }
}

#[derive(Debug, Clone, Serialize)]
pub struct CliffordReport {
    pub n: usize,
    pub dim: usize,
    /// max over i ≤ j of ‖A_iA_j + A_jA_i − 2δ_ij I‖_max
    pub anticommutator_defect: f64,
    pub self_adjoint_defect: f64,
    /// `trace(A_i)` as `[re, im]`
    pub traces: Vec<[f64; 2]>,
    /// every trace below tolerance (only meaningful for dim ≥ 2)
    pub traceless: bool,
    pub pass: bool,
}

pub fn verify_clifford(r: &CliffordRep, tol: f64) -> CliffordReport {
    let dim = r.dim;
    let id = CMatrix::identity(dim, dim);
    let mut anti = 0.0f64;
    let mut sa = 0.0f64;
    for (i, a) in r.generators.iter().enumerate() {
        sa = sa.max(max_abs(&(a - a.adjoint())));
        for b in &r.generators[i..] {
            let mut s = a * b + b * a;
            if std::ptr::eq(a, b) {
                s -= &id * c(2.0, 0.0);
            }
            anti = anti.max(max_abs(&s));
        }
    }
    let traces: Vec<[f64; 2]> = r
        .generators
        .iter()
        .map(|a| {
            let t = a.trace();
            [t.re, t.im]
        })
        .collect();
    let traceless = traces.iter().all(|t| t[0].hypot(t[1]) < tol);
    CliffordReport {
        n: r.n,
        dim,
        anticommutator_defect: anti,
        self_adjoint_defect: sa,
        traces,
        traceless,
        pass: anti < tol && sa < tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let r1 = clifford_generators(1);
        assert_eq!(r1.dim(), 1);
        assert_eq!(r1.generators()[0], CMatrix::identity(1, 1));
        assert!(verify_clifford(&r1, 1e-12).pass);

        let [sx, sy, sz] = pauli();
        let r2 = clifford_generators(2);
        assert_eq!(r2.generators(), &[sx.clone(), sy.clone()]);
        let r3 = clifford_generators(3);
        assert_eq!(r3.generators(), &[sx, sy, sz]);
    }

    #[test]
    fn dimensions() {
        for n in 1..=12 {
            let r = clifford_generators(n);
            assert_eq!(r.dim(), 1 << (n / 2));
            assert_eq!(r.generators().len(), n);
        }
    }

    #[test]
    fn relations_and_traces() {
        for n in 1..=8 {
            let rep = verify_clifford(&clifford_generators(n), 1e-12);
            assert!(rep.pass, "n = {n}: {rep:?}");
            if rep.dim >= 2 {
                assert!(rep.traceless);
            }
        }
    }

    #[test]
    fn scaled_generator_fails() {
        let mut g = clifford_generators(4).into_generators();
        g[0] *= c(2.0, 0.0);
        assert!(!verify_clifford(&CliffordRep::from_generators(g), 1e-12).pass);
    }
}
