//! `nct-morita` command line: JSON in, one JSON document out.
//!
//! Exit codes: 0 pass, 1 fail, 2 input error.

mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use nct_morita::clifford::{clifford_generators, verify_clifford};
use nct_morita::dirac::{transform_sigma2, transform_word, DiracData, DiracError};
use nct_morita::finite_rep::{oracle_check, verify_iso_invariance, FiniteRepError};
use nct_morita::heisenberg::{verify_module, ModuleError};
use nct_morita::linalg::{rat, IntMatrix, Phase, SkewMatrix};
use nct_morita::sonn::{make_sigma2, split_form, verify_membership, Generator, GeneratorWord, SonnError};
use nct_morita::torus::{epsilon_j, fluctuate_dim1, one_form_from_pairs, GaussRational, TorusElement};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use io::to_json;
use io::{print_error, print_json, read_dirac, read_int_matrix, read_theta, read_word, InputError};

pub const SEED_ENV: &str = "NCT_MORITA_SEED";

#[derive(Parser, Debug)]
#[command(name = "nct-morita", version, about = "Morita equivalences of noncommutative tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SO(n,n|Z) action on θ and membership checks
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Dirac data transforms
    #[command(subcommand)]
    Dirac(DiracCmd),
    /// Clifford generators
    #[command(subcommand)]
    Clifford(CliffordCmd),
    /// Heisenberg module battery
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Symbolic algebra against the clock-and-shift oracle
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Worked examples
    #[command(subcommand)]
    Example(ExampleCmd),
}

#[derive(Subcommand, Debug)]
enum ThetaCmd {
    /// Apply a generator word to θ, letters left to right
    Act {
        #[arg(long)]
        theta: PathBuf,
        /// JSON list such as '["sigma2", {"nu": [[0,1],[-1,0]]}]', or @FILE
        #[arg(long)]
        word: String,
    },
    /// Check that an integer matrix lies in SO(n,n|Z)
    VerifyElement {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum DiracCmd {
    /// Transform Dirac data and θ along a generator word
    Transform {
        #[arg(long)]
        dirac: PathBuf,
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Apply σ₂ at θ and again at σ₂(θ); the frame must come back
    InvolutionCheck {
        #[arg(long)]
        dirac: PathBuf,
        #[arg(long)]
        theta: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum CliffordCmd {
    /// Print the generators of Cl_{n,0} as [re, im] pairs
    Emit {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
        n: u32,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ModuleCmd {
    /// Run the Gaussian battery on the σ₂ bimodule
    Verify {
        #[arg(long)]
        theta: PathBuf,
        /// N,L,P: t-samples, t half-width, p half-width
        #[arg(long, default_value = "2048,16,8")]
        grid: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    /// Compare symbolic products with clock-and-shift matrices
    Check {
        #[arg(long)]
        theta: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// exponents drawn from {-r..r}
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(0..=64))]
        radius: i64,
    },
}

#[derive(Subcommand, Debug)]
enum ExampleCmd {
    /// Self-Morita fluctuation on the circle: D' = D
    Circle {
        #[arg(long, default_value_t = 64)]
        cutoff: usize,
    },
}

/// Exit status of a subcommand that ran.
enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// A failure reported as an error object.
struct Failure {
    kind: String,
    message: String,
    step: Option<usize>,
    code: i32,
}

impl Failure {
    fn input(kind: &str, message: impl ToString) -> Self {
        Self { kind: kind.into(), message: message.to_string(), step: None, code: 2 }
    }

    fn computation(kind: &str, message: impl ToString, step: Option<usize>) -> Self {
        Self { kind: kind.into(), message: message.to_string(), step, code: 1 }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::input(e.kind(), e)
    }
}

fn sonn_failure(e: SonnError) -> Failure {
    match e {
        SonnError::ActionUndefined { step } => Failure::computation("ActionUndefined", &e, step),
        other => Failure::input(sonn_kind(&other), other),
    }
}

fn sonn_kind(e: &SonnError) -> &'static str {
    match e {
        SonnError::NotUnimodular(_) => "NotUnimodular",
        SonnError::NotSkew => "NotSkew",
        SonnError::DimensionTooSmall(_) => "DimensionTooSmall",
        SonnError::DimensionMismatch(_) => "DimensionMismatch",
        SonnError::NotMember => "NotMember",
        SonnError::ActionUndefined { .. } => "ActionUndefined",
        SonnError::Linalg(_) => "InvalidInput",
    }
}

fn dirac_failure(e: DiracError) -> Failure {
    match e {
        DiracError::Theta11Singular { step } => Failure::computation("Theta11Singular", &e, step),
        DiracError::ActionUndefined { step } => Failure::computation("ActionUndefined", &e, step),
        DiracError::Sonn(s) => sonn_failure(s),
        other => Failure::input("InvalidInput", other),
    }
}

fn seed() -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Err(_) => Ok(0),
        Ok(s) => s.trim().parse().map_err(|_| Failure::input("InvalidInput", format!("{SEED_ENV}={s:?} is not a u64"))),
    }
}

/// Parses argv, dispatches, prints one JSON document and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout().lock(), "{e}");
                return 0;
            }
            print_error("Usage", e.render().to_string().trim_end(), None);
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(f) => {
            print_error(&f.kind, f.message, f.step);
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Theta(ThetaCmd::Act { theta, word }) => theta_act(&theta, &word),
        Command::Theta(ThetaCmd::VerifyElement { matrix }) => verify_element(&matrix),
        Command::Dirac(DiracCmd::Transform { dirac, theta, word }) => dirac_transform(&dirac, &theta, &word),
        Command::Dirac(DiracCmd::InvolutionCheck { dirac, theta }) => involution_check(&dirac, &theta),
        Command::Clifford(CliffordCmd::Emit { n, tol }) => clifford_emit(n as usize, tol),
        Command::Module(ModuleCmd::Verify { theta, grid, tol }) => module_verify(&theta, &grid, tol),
        Command::Algebra(AlgebraCmd::Check { theta, samples, radius }) => algebra_check(&theta, samples, radius),
        Command::Example(ExampleCmd::Circle { cutoff }) => example_circle(cutoff),
    }
}

#[derive(Serialize)]
struct ThetaDoc<'a> {
    theta: &'a SkewMatrix,
}

fn theta_act(theta: &std::path::Path, word: &str) -> Result<Outcome, Failure> {
    let theta = read_theta(theta)?;
    let word = GeneratorWord::new(read_word(word)?);
    word.validate(theta.dim()).map_err(sonn_failure)?;
    let out = nct_morita::sonn::word_act(&word, &theta).map_err(sonn_failure)?;
    print_json(&ThetaDoc { theta: &out });
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct MembershipDoc {
    member: bool,
    rows: usize,
    cols: usize,
    form_preserved: bool,
    det: Option<String>,
}

fn verify_element(path: &std::path::Path) -> Result<Outcome, Failure> {
    let m = read_int_matrix(path)?;
    let shape_ok = m.is_square() && m.rows() % 2 == 0 && m.rows() > 0;
    let form_preserved = shape_ok && {
        let q = split_form(m.rows() / 2);
        m.transpose().checked_mul(&q).and_then(|t| t.checked_mul(&m)).map(|v| v == q).unwrap_or(false)
    };
    let det = m.is_square().then(|| m.det().map(|d| d.to_string()).unwrap_or_default());
    let member = verify_membership(&m);
    print_json(&MembershipDoc { member, rows: m.rows(), cols: m.cols(), form_preserved, det });
    Ok(Outcome::from_pass(member))
}

#[derive(Serialize)]
struct TransformDoc<'a> {
    dirac: &'a DiracData,
    theta: &'a SkewMatrix,
    /// true when a σ₂ step passed `mu_shift` through unchanged
    mu_shift_carried: bool,
}

fn dirac_transform(dirac: &std::path::Path, theta: &std::path::Path, word: &str) -> Result<Outcome, Failure> {
    let d = read_dirac(dirac)?;
    let theta = read_theta(theta)?;
    let word = GeneratorWord::new(read_word(word)?);
    let (d2, t2) = transform_word(&d, &theta, &word).map_err(dirac_failure)?;
    let carried = word.word.iter().any(|g| matches!(g, Generator::Sigma2));
    print_json(&TransformDoc { dirac: &d2, theta: &t2, mu_shift_carried: carried });
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct InvolutionDoc<'a> {
    theta_prime: &'a SkewMatrix,
    dirac_prime: &'a DiracData,
    dirac_restored: &'a DiracData,
    tau_restored: bool,
    /// the bounded part is absorbed by σ₂ and not restored
    bounded_part_dropped: bool,
    pass: bool,
}

fn involution_check(dirac: &std::path::Path, theta: &std::path::Path) -> Result<Outcome, Failure> {
    let d = read_dirac(dirac)?;
    let theta = read_theta(theta)?;
    let d1 = transform_sigma2(&d, &theta).map_err(dirac_failure)?;
    let sigma = make_sigma2(theta.dim()).map_err(sonn_failure)?;
    let theta_prime = sigma.act(&theta).map_err(sonn_failure)?;
    let d2 = transform_sigma2(&d1, &theta_prime).map_err(dirac_failure)?;
    let tau_restored = d2.tau() == d.tau() && d2.mu_shift() == d.mu_shift();
    print_json(&InvolutionDoc {
        theta_prime: &theta_prime,
        dirac_prime: &d1,
        dirac_restored: &d2,
        tau_restored,
        bounded_part_dropped: d.bounded_part().is_some(),
        pass: tau_restored,
    });
    Ok(Outcome::from_pass(tau_restored))
}

#[derive(Serialize)]
struct CliffordDoc {
    n: usize,
    dim: usize,
    generators: Vec<Vec<Vec<[f64; 2]>>>,
    report: nct_morita::clifford::CliffordReport,
}

fn clifford_emit(n: usize, tol: f64) -> Result<Outcome, Failure> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::input("InvalidInput", "tol must be positive"));
    }
    let rep = clifford_generators(n);
    let report = verify_clifford(&rep, tol);
    let generators = rep
        .generators()
        .iter()
        .map(|g| (0..g.nrows()).map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect()).collect())
        .collect();
    let pass = report.pass;
    print_json(&CliffordDoc { n, dim: rep.dim(), generators, report });
    Ok(Outcome::from_pass(pass))
}

fn parse_grid(s: &str) -> Result<(usize, f64, usize), Failure> {
    let bad = || Failure::input("InvalidInput", format!("--grid {s:?}: expected N,L,P"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n, l, p] = parts.as_slice() else { return Err(bad()) };
    Ok((n.parse().map_err(|_| bad())?, l.parse().map_err(|_| bad())?, p.parse().map_err(|_| bad())?))
}

fn module_verify(theta: &std::path::Path, grid: &str, tol: f64) -> Result<Outcome, Failure> {
    let theta = read_theta(theta)?;
    let (n, l, p) = parse_grid(grid)?;
    let seed = seed()?;
    let report = verify_module(&theta, n, l, p, tol, seed).map_err(|e| {
        let kind = match e {
            ModuleError::DimensionTooSmall(_) => "DimensionTooSmall",
            ModuleError::InvalidGrid(_) => "InvalidGrid",
            _ => "InvalidInput",
        };
        Failure::input(kind, e)
    })?;
    print_json(&report);
    Ok(Outcome::from_pass(report.pass))
}

#[derive(Serialize)]
struct AlgebraDoc {
    seed: u64,
    oracle: nct_morita::finite_rep::OracleReport,
    iso_nu: nct_morita::finite_rep::IsoReport,
    iso_rho: nct_morita::finite_rep::IsoReport,
    nu: IntMatrix,
    rho: IntMatrix,
    pass: bool,
}

/// Random integer skew matrix with entries in `{−3..3}`.
pub fn random_integer_skew(n: usize, rng: &mut impl Rng) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: i64 = rng.gen_range(-3..=3);
            m.set(i, j, BigInt::from(v));
            m.set(j, i, BigInt::from(-v));
        }
    }
    m
}

/// Random unimodular matrix as a product of elementary shears and a swap.
pub fn random_unimodular(n: usize, rng: &mut impl Rng) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k: i64 = rng.gen_range(-2..=2);
        let mut e = IntMatrix::identity(n);
        e.set(i, j, BigInt::from(k));
        m = e.checked_mul(&m).expect("square");
    }
    if rng.gen_bool(0.5) {
        let mut swap = IntMatrix::zeros(n, n);
        for i in 0..n {
            swap.set(i, if i < 2 { 1 - i } else { i }, BigInt::from(1));
        }
        m = swap.checked_mul(&m).expect("square");
    }
    m
}

fn algebra_check(theta: &std::path::Path, samples: usize, radius: i64) -> Result<Outcome, Failure> {
    let theta = Arc::new(read_theta(theta)?);
    let seed = seed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fr = |e: FiniteRepError| match e {
        FiniteRepError::DimensionTooLarge(_) => Failure::input("DimensionTooLarge", e),
        other => Failure::input("InvalidInput", other),
    };
    let oracle = oracle_check(theta.clone(), samples, radius, &mut rng).map_err(fr)?;
    let n = theta.dim();
    let nu = random_integer_skew(n, &mut rng);
    let rho = random_unimodular(n, &mut rng);
    let iso_nu = verify_iso_invariance(&theta, &Generator::Nu(nu.clone())).map_err(fr)?;
    let iso_rho = verify_iso_invariance(&theta, &Generator::Rho(rho.clone())).map_err(fr)?;
    let pass = oracle.pass && iso_nu.pass && iso_rho.pass;
    print_json(&AlgebraDoc { seed, oracle, iso_nu, iso_rho, nu, rho, pass });
    Ok(Outcome::from_pass(pass))
}

#[derive(Serialize)]
struct CircleDoc {
    cutoff: usize,
    epsilon_j: i8,
    /// self-adjoint potential `c`, written as `(c U*)[D, U]`
    c: TorusElement,
    c_is_self_adjoint: bool,
    self_adjoint: nct_morita::torus::FluctuationReport,
    /// control run with the anti-self-adjoint `i·c`: residual is `2‖c‖`
    anti_self_adjoint: nct_morita::torus::FluctuationReport,
    pass: bool,
}

/// `c = 1/2 + (1/3 + i/4) U + (1/3 − i/4) U* + (−1/5 + i/7) U² + (−1/5 − i/7) U*²`
pub fn circle_potential() -> TorusElement {
    let th = Arc::new(SkewMatrix::zeros(1));
    let term = |k: i64, re: (i64, i64), im: (i64, i64)| {
        TorusElement::term(th.clone(), vec![k], GaussRational::new(rat(re.0, re.1), rat(im.0, im.1)), Phase::one())
    };
    [
        term(0, (1, 2), (0, 1)),
        term(1, (1, 3), (1, 4)),
        term(-1, (1, 3), (-1, 4)),
        term(2, (-1, 5), (1, 7)),
        term(-2, (-1, 5), (-1, 7)),
    ]
    .iter()
    .fold(TorusElement::zero(th.clone()), |acc, t| acc.add(t).expect("same θ"))
}

fn example_circle(cutoff: usize) -> Result<Outcome, Failure> {
    let c = circle_potential();
    let th = c.theta().clone();
    let u = TorusElement::generator(th, 0);
    let d = DiracData::standard(1);
    let form = one_form_from_pairs(&d, &[(c.mul(&u.star()).expect("same θ"), u)]).expect("n = 1");
    let potential = form.component(0).clone();
    let circle = |a: &TorusElement| {
        fluctuate_dim1(a, cutoff).map_err(|e| Failure::input("CutoffTooSmall", e))
    };
    let sa = circle(&potential)?;
    let anti = circle(&potential.scale(&GaussRational::new(rat(0, 1), rat(1, 1))))?;
    let pass = sa.residual < 1e-12;
    print_json(&CircleDoc {
        cutoff,
        epsilon_j: epsilon_j(1).value,
        c_is_self_adjoint: potential.star() == potential,
        c: potential,
        self_adjoint: sa,
        anti_self_adjoint: anti,
        pass,
    });
    Ok(Outcome::from_pass(pass))
}
