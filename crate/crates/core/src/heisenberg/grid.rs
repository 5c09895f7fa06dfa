use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{Embeddings, ModuleError};
use crate::linalg::{rational_to_f64, RatMatrix, Rational};

/// Samples `t_k = −L + k·2L/N`, `k < N`, and `p ∈ {−P..P}^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub l: f64,
    pub p: usize,
    pub q: usize,
}

/// Relative magnitude below which a sample counts as zero.
pub const NEGLIGIBLE: f64 = 1e-12;
/// Extra t-distance kept clear beyond a translation.
const EDGE_MARGIN: f64 = 1.0;

impl GridSpec {
    pub fn new(n: usize, l: f64, p: usize, q: usize) -> Result<Self, ModuleError> {
        if !n.is_power_of_two() || n < 8 {
            return Err(ModuleError::InvalidGrid(format!("N = {n} must be a power of two >= 8")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(ModuleError::InvalidGrid(format!("L = {l} must be positive")));
        }
        if p < 2 {
            return Err(ModuleError::InvalidGrid(format!("P = {p} must be at least 2")));
        }
        Ok(Self { n, l, p, q })
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        -self.l + k as f64 * self.dt()
    }

    pub fn rows(&self) -> usize {
        (2 * self.p + 1).pow(self.q as u32)
    }

    pub fn row_index(&self, p: &[i64]) -> Option<usize> {
        let side = 2 * self.p as i64 + 1;
        p.iter().try_fold(0usize, |acc, &v| {
            let s = v + self.p as i64;
            (0..side).contains(&s).then(|| acc * side as usize + s as usize)
        })
    }

    pub fn row_coords(&self, mut idx: usize) -> Vec<i64> {
        let side = 2 * self.p + 1;
        let mut out = vec![0; self.q];
        for k in (0..self.q).rev() {
            out[k] = (idx % side) as i64 - self.p as i64;
            idx /= side;
        }
        out
    }

    /// FFT bin frequencies; the Nyquist bin is reported as 0.
    fn frequencies(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|j| match j.cmp(&(n / 2)) {
                std::cmp::Ordering::Less => j as f64,
                std::cmp::Ordering::Equal => 0.0,
                std::cmp::Ordering::Greater => j as f64 - n as f64,
            } / (2.0 * self.l))
            .collect()
    }
}

/// Function on the grid; an empty row stands for a zero row.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleGrid {
    spec: GridSpec,
    rows: Vec<Vec<Complex64>>,
}

impl ModuleGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, rows: vec![Vec::new(); spec.rows()] }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, &[i64]) -> Complex64) -> Self {
        let rows = (0..spec.rows())
            .map(|r| {
                let p = spec.row_coords(r);
                let row: Vec<Complex64> = (0..spec.n).map(|k| f(spec.t(k), &p)).collect();
                if row.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                    Vec::new()
                } else {
                    row
                }
            })
            .collect();
        Self { spec, rows }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Sample at `(t_k, p)`; zero outside the p-box.
    pub fn value(&self, k: usize, p: &[i64]) -> Complex64 {
        self.spec
            .row_index(p)
            .and_then(|r| self.rows[r].get(k).copied())
            .unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨f, g⟩ = Σ conj(f) g · dt`
    pub fn inner(&self, other: &Self) -> Complex64 {
        let s: Complex64 = self
            .rows
            .iter()
            .zip(&other.rows)
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>())
            .sum();
        s * self.spec.dt()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    /// `self + s·other`
    pub fn axpy(&self, s: Complex64, other: &Self) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| match (a.is_empty(), b.is_empty()) {
                (_, true) => a.clone(),
                (true, false) => b.iter().map(|y| s * y).collect(),
                (false, false) => a.iter().zip(b).map(|(x, y)| x + s * y).collect(),
            })
            .collect();
        Self { spec: self.spec, rows }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { spec: self.spec, rows: self.rows.iter().map(|r| r.iter().map(|z| s * z).collect()).collect() }
    }

    /// Checks that `W_z` with t-translation `a` and p-shift `u` keeps all
    /// mass inside the window: the input is negligible within `|a| + 1` of
    /// either t-edge, and rows whose image leaves the p-box are negligible.
    pub fn boundary_check(&self, a: f64, u: &[i64]) -> Result<(), ModuleError> {
        let floor = NEGLIGIBLE * self.max_abs();
        let edge = a.abs() + EDGE_MARGIN;
        for (r, row) in self.rows.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let p = self.spec.row_coords(r);
            let target: Vec<i64> = p.iter().zip(u).map(|(pi, ui)| pi - ui).collect();
            let row_max = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if row_max > floor && self.spec.row_index(&target).is_none() {
                return Err(ModuleError::BoundaryViolation(format!("row p = {p:?} shifted out of the p-box")));
            }
            for (k, z) in row.iter().enumerate() {
                let t = self.spec.t(k);
                if (t + self.spec.l < edge || self.spec.l - t < edge) && z.norm() > floor {
                    return Err(ModuleError::BoundaryViolation(format!(
                        "|f| = {:.3e} at t = {t:.3} within {edge:.3} of the window edge",
                        z.norm()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `e^{−π(t−c)²} e(βt) δ_{p,p₀}`
pub fn gaussian(spec: GridSpec, c: f64, beta: f64, p0: &[i64]) -> ModuleGrid {
    let p0 = p0.to_vec();
    ModuleGrid::from_fn(spec, move |t, p| {
        if p == p0.as_slice() {
            Complex64::from_polar((-PI * (t - c) * (t - c)).exp(), 2.0 * PI * beta * t)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `z = (a, b, u, v)` for `W_z f(t,p) = e(b·t + v·p) f(t + a, p + u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylParams {
    pub a: f64,
    pub b: f64,
    pub u: Vec<i64>,
    pub v: Vec<f64>,
}

impl WeylParams {
    /// Reads `z = M x` for an embedding `M` with rows `(a, b, u, v)`.
    pub fn from_embedding(m: &RatMatrix, x: &[i64]) -> Self {
        let xs: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(v.into())).collect();
        let z = m.mul_vec(&xs);
        let q = (z.len() - 2) / 2;
        Self {
            a: rational_to_f64(&z[0]),
            b: rational_to_f64(&z[1]),
            u: z[2..2 + q]
                .iter()
                .map(|r| {
                    assert!(r.is_integer(), "p-shift must be integral");
                    i64::try_from(r.to_integer()).expect("small shift")
                })
                .collect(),
            v: z[2 + q..].iter().map(rational_to_f64).collect(),
        }
    }
}

/// Embeddings plus FFT plans for one grid; applies the module operators.
pub struct HeisenbergModule {
    emb: Embeddings,
    spec: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    xi: Vec<f64>,
    t11_inv: [[f64; 2]; 2],
}

impl HeisenbergModule {
    pub fn new(emb: Embeddings, spec: GridSpec) -> Result<Self, ModuleError> {
        if spec.q != emb.q() {
            return Err(ModuleError::DimensionMismatch(format!("grid q = {}, embeddings q = {}", spec.q, emb.q())));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(spec.n);
        let inv = planner.plan_fft_inverse(spec.n);
        let ti = emb.t11().inverse().expect("T11 invertible");
        let f = |i, j| rational_to_f64(ti.get(i, j));
        let t11_inv = [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]];
        Ok(Self { emb, spec, fwd, inv, xi: spec.frequencies(), t11_inv })
    }

    pub fn embeddings(&self) -> &Embeddings {
        &self.emb
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn check_n(&self, x: &[i64]) -> Result<(), ModuleError> {
        if x.len() != self.emb.n() {
            return Err(ModuleError::DimensionMismatch(format!("x has length {}, n = {}", x.len(), self.emb.n())));
        }
        Ok(())
    }

    /// Multiplies the spectrum of one row by `m(ξ)`.
    fn fourier_multiply(&self, row: &[Complex64], m: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut buf = row.to_vec();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.spec.n as f64;
        for (z, &xi) in buf.iter_mut().zip(&self.xi) {
            *z *= m(xi) * scale;
        }
        self.inv.process(&mut buf);
        buf
    }

    pub fn weyl_unchecked(&self, g: &ModuleGrid, z: &WeylParams) -> ModuleGrid {
        let spec = self.spec;
        let mut out = ModuleGrid::zeros(spec);
        for (r, slot) in out.rows.iter_mut().enumerate() {
            let p = spec.row_coords(r);
            let src: Vec<i64> = p.iter().zip(&z.u).map(|(pi, ui)| pi + ui).collect();
            let Some(s) = spec.row_index(&src) else { continue };
            let row = &g.rows[s];
            if row.is_empty() {
                continue;
            }
            let shifted = if z.a == 0.0 {
                row.clone()
            } else {
                self.fourier_multiply(row, |xi| Complex64::from_polar(1.0, 2.0 * PI * xi * z.a))
            };
            let vp: f64 = z.v.iter().zip(&p).map(|(v, &pi)| v * pi as f64).sum();
            *slot = shifted
                .iter()
                .enumerate()
                .map(|(k, f)| f * Complex64::from_polar(1.0, 2.0 * PI * (z.b * spec.t(k) + vp)))
                .collect();
        }
        out
    }

    pub fn weyl(&self, g: &ModuleGrid, z: &WeylParams) -> Result<ModuleGrid, ModuleError> {
        g.boundary_check(z.a, &z.u)?;
        Ok(self.weyl_unchecked(g, z))
    }

    pub fn right_params(&self, x: &[i64]) -> WeylParams {
        WeylParams::from_embedding(self.emb.t(), x)
    }

    pub fn left_params(&self, x: &[i64]) -> WeylParams {
        WeylParams::from_embedding(self.emb.s(), x)
    }

    /// `g · U_x` for the generators of `A_θ`.
    pub fn right_action(&self, g: &ModuleGrid, x: &[i64]) -> Result<ModuleGrid, ModuleError> {
        self.check_n(x)?;
        self.weyl(g, &self.right_params(x))
    }

    /// `U_x · g` for the generators of `A_{σ₂(θ)}`.
    pub fn left_action(&self, g: &ModuleGrid, x: &[i64]) -> Result<ModuleGrid, ModuleError> {
        self.check_n(x)?;
        self.weyl(g, &self.left_params(x))
    }

    pub fn right_action_unchecked(&self, g: &ModuleGrid, x: &[i64]) -> ModuleGrid {
        self.weyl_unchecked(g, &self.right_params(x))
    }

    pub fn left_action_unchecked(&self, g: &ModuleGrid, x: &[i64]) -> ModuleGrid {
        self.weyl_unchecked(g, &self.left_params(x))
    }

    /// `∇_i` (0-based). For `i < 2`, row `i` of `T11⁻¹ (−t, (1/2πi) ∂_t)`;
    /// for `i ≥ 2`, multiplication by `−p_{i−2}`.
    pub fn connection_apply(&self, i: usize, g: &ModuleGrid) -> ModuleGrid {
        assert!(i < self.emb.n(), "connection index out of range");
        let spec = self.spec;
        let mut out = ModuleGrid::zeros(spec);
        for (r, slot) in out.rows.iter_mut().enumerate() {
            let row = &g.rows[r];
            if row.is_empty() {
                continue;
            }
            *slot = if i < 2 {
                let [c0, c1] = self.t11_inv[i];
                let deriv = if c1 == 0.0 {
                    vec![Complex64::default(); spec.n]
                } else {
                    self.fourier_multiply(row, |xi| Complex64::new(xi, 0.0))
                };
                row.iter().zip(&deriv).enumerate().map(|(k, (f, d))| -c0 * spec.t(k) * f + c1 * d).collect()
            } else {
                let p = -(spec.row_coords(r)[i - 2] as f64);
                row.iter().map(|f| f * p).collect()
            };
        }
        out
    }
}
