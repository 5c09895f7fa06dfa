use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_embeddings, gaussian, GridSpec, HeisenbergModule, ModuleError, ModuleGrid};
use crate::linalg::{rational_to_f64, Phase, SkewMatrix};

/// Random `(x, y)` pairs drawn from `{−2..2}^n` on top of all basis pairs.
pub const RANDOM_PAIRS: usize = 16;

/// Worst relative defect per identity family over the battery.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// `‖g·U_x·U_y − e(x·θy) g·U_y·U_x‖ / ‖g‖`
    pub right_relation: f64,
    /// `‖U_xU_y g − e(x·θ'y) U_yU_x g‖ / ‖g‖` at `θ' = σ₂(θ)`
    pub left_relation: f64,
    /// `‖[R_x, L_y] g‖ / ‖g‖`
    pub commutant: f64,
    /// `‖[∇_i, L_x] g − (Gx)_i L_x g‖ / ‖g‖`
    pub connection_commutator: f64,
    /// `‖[∇_i, R_x] g − x_i R_x g‖ / ‖g‖`
    pub leibniz: f64,
    /// `‖(2πi[∇₁, ∇₂] − (θ₁₁⁻¹)₁₂) g‖ / ‖g‖`
    pub curvature: f64,
    /// `|⟨R_x r, ∇_i s⟩ − ⟨R_x ∇_i r, s⟩ − x_i ⟨R_x r, s⟩| / (‖r‖‖s‖)`
    pub hermitian: f64,
}

impl Residuals {
    fn max(self, o: Self) -> Self {
        Self {
            right_relation: self.right_relation.max(o.right_relation),
            left_relation: self.left_relation.max(o.left_relation),
            commutant: self.commutant.max(o.commutant),
            connection_commutator: self.connection_commutator.max(o.connection_commutator),
            leibniz: self.leibniz.max(o.leibniz),
            curvature: self.curvature.max(o.curvature),
            hermitian: self.hermitian.max(o.hermitian),
        }
    }

    pub fn families(&self) -> [(&'static str, f64); 7] {
        [
            ("right_relation", self.right_relation),
            ("left_relation", self.left_relation),
            ("commutant", self.commutant),
            ("connection_commutator", self.connection_commutator),
            ("leibniz", self.leibniz),
            ("curvature", self.curvature),
            ("hermitian", self.hermitian),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleReport {
    pub n: usize,
    pub grid_n: usize,
    pub grid_l: f64,
    pub grid_p: usize,
    pub tol: f64,
    pub seed: u64,
    /// Set when the battery could not run, e.g. `"Theta11Singular"`.
    pub error: Option<String>,
    pub theta_prime: Option<SkewMatrix>,
    pub vectors: usize,
    pub pairs: usize,
    pub residuals: Residuals,
    /// `2πi⟨g, [∇₁, ∇₂] g⟩ / ‖g‖²` on the centered Gaussian
    pub curvature_estimate: f64,
    pub curvature_expected: f64,
    /// `Ge₁` from exact arithmetic
    pub connection_e1_expected: Vec<f64>,
    /// `⟨L g, [∇_i, L] g⟩ / ‖L g‖²` for `L = U_{e₁}` on the centered Gaussian
    pub connection_e1_measured: Vec<f64>,
    /// actions whose input was not negligible near the window or p-box edge
    pub boundary_violations: usize,
    pub pass: bool,
}

fn basis(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// `{−1,0,1}^q`
fn p_box(q: usize) -> Vec<Vec<i64>> {
    (0..q).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|v| (-1..=1).map(move |k| [v.clone(), vec![k]].concat())).collect()
    })
}

fn rel(d: &ModuleGrid, g: &ModuleGrid) -> f64 {
    d.norm() / g.norm()
}

fn phase(theta: &SkewMatrix, x: &[i64], y: &[i64]) -> Complex64 {
    Phase::new(theta.pairing(x, y)).to_complex()
}

/// Runs the Gaussian battery on `S(R × Z^q)` for θ with grid `(N, L, P)`.
pub fn verify_module(
    theta: &SkewMatrix,
    grid_n: usize,
    grid_l: f64,
    grid_p: usize,
    tol: f64,
    seed: u64,
) -> Result<ModuleReport, ModuleError> {
    let n = theta.dim();
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ModuleError::InvalidGrid(format!("tol = {tol} must be positive")));
    }
    if n < 2 {
        return Err(ModuleError::DimensionTooSmall(n));
    }
    let spec = GridSpec::new(grid_n, grid_l, grid_p, n - 2)?;
    let mut report = ModuleReport {
        n,
        grid_n,
        grid_l,
        grid_p,
        tol,
        seed,
        error: None,
        theta_prime: None,
        vectors: 0,
        pairs: 0,
        residuals: Residuals::default(),
        curvature_estimate: f64::NAN,
        curvature_expected: f64::NAN,
        connection_e1_expected: vec![],
        connection_e1_measured: vec![],
        boundary_violations: 0,
        pass: false,
    };
    let emb = match build_embeddings(theta) {
        Ok(e) => e,
        Err(ModuleError::Theta11Singular) => {
            report.error = Some("Theta11Singular".into());
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let theta_prime = emb.theta_prime().clone();
    let g_mat = emb.connection_matrix().clone();
    let g_f64: Vec<Vec<f64>> = g_mat.to_f64_rows();
    let curvature_expected = g_f64[0][1];
    let module = HeisenbergModule::new(emb, spec)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Vec<i64>, Vec<i64>)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (basis(n, i), basis(n, j)))).collect();
    for _ in 0..RANDOM_PAIRS {
        let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let y: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        pairs.push((x, y));
    }
    let mut singles: Vec<Vec<i64>> = (0..n).map(|i| basis(n, i)).collect();
    singles.extend(pairs[n * n..].iter().map(|(x, _)| x.clone()));

    let mut vectors = Vec::new();
    for c in [-1.0, 0.0, 1.0] {
        for beta in [0.0, 1.0 / 3.0] {
            for p0 in p_box(n - 2) {
                vectors.push(gaussian(spec, c, beta, &p0));
            }
        }
    }

    let violations = AtomicUsize::new(0);
    let weyl = |g: &ModuleGrid, z: &super::WeylParams| {
        if g.boundary_check(z.a, &z.u).is_err() {
            violations.fetch_add(1, Ordering::Relaxed);
        }
        module.weyl_unchecked(g, z)
    };
    let r = |g: &ModuleGrid, x: &[i64]| weyl(g, &module.right_params(x));
    let l = |g: &ModuleGrid, x: &[i64]| weyl(g, &module.left_params(x));
    let nabla = |i: usize, g: &ModuleGrid| module.connection_apply(i, g);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);

    let residuals = vectors
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let mut res = Residuals::default();
            for (x, y) in &pairs {
                let lhs = r(&r(g, x), y);
                let rhs = r(&r(g, y), x).scale(phase(theta, x, y));
                res.right_relation = res.right_relation.max(rel(&lhs.sub(&rhs), g));

                let lhs = l(&l(g, y), x);
                let rhs = l(&l(g, x), y).scale(phase(&theta_prime, x, y));
                res.left_relation = res.left_relation.max(rel(&lhs.sub(&rhs), g));

                let rl = r(&l(g, y), x);
                let lr = l(&r(g, x), y);
                res.commutant = res.commutant.max(rel(&rl.sub(&lr), g));
            }
            for x in &singles {
                let lx = l(g, x);
                let rx = r(g, x);
                let gx = g_mat.mul_vec(&x.iter().map(|&v| crate::linalg::Rational::from_integer(v.into())).collect::<Vec<_>>());
                for i in 0..n {
                    let comm = nabla(i, &lx).sub(&l(&nabla(i, g), x));
                    let pred = lx.scale(Complex64::new(rational_to_f64(&gx[i]), 0.0));
                    res.connection_commutator = res.connection_commutator.max(rel(&comm.sub(&pred), g));

                    let comm = nabla(i, &rx).sub(&r(&nabla(i, g), x));
                    let pred = rx.scale(Complex64::new(x[i] as f64, 0.0));
                    res.leibniz = res.leibniz.max(rel(&comm.sub(&pred), g));

                    let s = &vectors[(k + 1) % vectors.len()];
                    let lhs = rx.inner(&nabla(i, s)) - r(&nabla(i, g), x).inner(s) - rx.inner(s) * x[i] as f64;
                    res.hermitian = res.hermitian.max(lhs.norm() / (g.norm() * s.norm()));
                }
            }
            let curv = nabla(0, &nabla(1, g)).sub(&nabla(1, &nabla(0, g))).scale(two_pi_i);
            res.curvature = rel(&curv.sub(&g.scale(Complex64::new(curvature_expected, 0.0))), g);
            res
        })
        .reduce(Residuals::default, Residuals::max);

    // Scalar estimates on the centered Gaussian.
    let g0 = gaussian(spec, 0.0, 0.0, &vec![0; n - 2]);
    let curv = nabla(0, &nabla(1, &g0)).sub(&nabla(1, &nabla(0, &g0))).scale(two_pi_i);
    let curvature_estimate = (g0.inner(&curv) / g0.inner(&g0)).re;
    let e1 = basis(n, 0);
    let lg = l(&g0, &e1);
    let connection_e1_measured = (0..n)
        .map(|i| {
            let comm = nabla(i, &lg).sub(&l(&nabla(i, &g0), &e1));
            (lg.inner(&comm) / lg.inner(&lg)).re
        })
        .collect();

    let boundary_violations = violations.load(Ordering::Relaxed);
    let families_pass = residuals.families().iter().all(|&(name, v)| {
        let limit = if name == "hermitian" { 10.0 * tol } else { tol };
        v < limit
    });
    report.pass = families_pass
        && boundary_violations == 0
        && (curvature_estimate - curvature_expected).abs() < tol;
    report.theta_prime = Some(theta_prime);
    report.vectors = vectors.len();
    report.pairs = pairs.len();
    report.residuals = residuals;
    report.curvature_estimate = curvature_estimate;
    report.curvature_expected = curvature_expected;
    report.connection_e1_expected = g_f64.iter().map(|row| row[0]).collect();
    report.connection_e1_measured = connection_e1_measured;
    report.boundary_violations = boundary_violations;
    Ok(report)
}
