//! Command-line front end. Every command prints one JSON line on stdout and
//! rechecks its own result before reporting success.

pub mod json;
mod selftest;

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::chern::{check_identities, RootBundle};
use crate::error::Error;
use crate::exactlinalg::{vector, IntMatrix};
use crate::isometry::{
    cartan_dieudonne, coinvariant_sublattice, compose_reflections, quotient_structure, reflection, RationalIsometry,
};
use crate::lattices::{standard_lattice, Lattice, K3_RANK};
use crate::mukai::{mukai_gram, mukai_pairing, sheaf_isometry_domain, verify_universal_example, MukaiVector};
use crate::orbits::{
    canonicalize_reduction, congruence_orbit_test, coprime_factor_pairs, double_orbit_reduce, enumerate_lagrangians,
    lagrangian_from_pair, u_case_module, u_double_orbit_canonical, DEFAULT_CAP,
};
use crate::sampling::Sampler;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Lib(Error),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Lib(e) if e.is_internal() => 4,
            CliError::Lib(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "k3lat", version, about = "Exact computations with K3 and Mukai lattices")]
pub struct Cli {
    /// Seed for randomized commands; K3LAT_SEED takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Upper bound on enumerated finite group sizes.
    #[arg(long, global = true)]
    cap: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order of L / I_φ when cyclic.
    CyclicType(IsometryArgs),
    /// Canonical pair (a, b) of an isometry of U.
    DoubleOrbit(IsometryArgs),
    /// Factor an isometry into reflections.
    DecomposeReflections(IsometryArgs),
    /// Write a cyclic-type isometry as left ∘ f_(n,1) ∘ right.
    ReduceDoubleOrbit(IsometryArgs),
    /// Discriminant module of f_(a,b) on U and its lagrangians.
    Discriminant(DiscriminantArgs),
    /// Least unit k with (l1,l1)/2 ≡ k²(l2,l2)/2 mod n.
    Congruence(CongruenceArgs),
    /// Mukai lattice pairing, sheaf domains and the universal example.
    #[command(subcommand)]
    Mukai(MukaiCommand),
    /// Chern character and Todd class identities.
    #[command(subcommand)]
    Chern(ChernCommand),
    /// Quick randomized checks of every module.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct LatticeArgs {
    /// U, E8, E8_minus, K3 or Mukai.
    #[arg(long, default_value = "K3")]
    lattice: String,
    /// Explicit integer Gram matrix, overriding --lattice.
    #[arg(long)]
    gram: Option<String>,
}

#[derive(Args, Debug)]
struct IsometryArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// JSON object with "matrix" or "reflection" (inline or @path).
    #[arg(long, conflicts_with = "matrix")]
    isometry: Option<String>,
    /// Matrix as a JSON array of rows of rationals.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args, Debug)]
struct DiscriminantArgs {
    #[arg(long)]
    a: u64,
    #[arg(long, default_value_t = 1)]
    b: u64,
    /// Enumerate lagrangian subgroups and match them with L_(c,d).
    #[arg(long)]
    lagrangians: bool,
}

#[derive(Args, Debug)]
struct CongruenceArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[arg(long)]
    l1: String,
    #[arg(long)]
    l2: String,
    #[arg(long)]
    n: u64,
}

#[derive(Subcommand, Debug)]
enum MukaiCommand {
    /// Pairing of two Mukai vectors [r, c_1..c_22, s].
    Pairing {
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Λ / I_ψ for the H² map of κ₂ with α = kx, β = jy.
    Domain {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        j: i64,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Integral 22x22 part of ch₂; zero when absent.
        #[arg(long)]
        c: Option<String>,
    },
    /// Degree-four expansion for the universal sheaf model.
    Universal {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        s: i64,
        #[arg(long, default_value_t = 1)]
        j: i64,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        sign: i64,
    },
}

#[derive(Subcommand, Debug)]
enum ChernCommand {
    /// Compare closed forms with root-sum oracles on random roots.
    Verify {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Worker threads; 0 uses one per suite.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

/// What a run printed and how it ended.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    command: &'static str,
    result: Value,
    verified: Map<String, Value>,
}

impl Report {
    fn new(command: &'static str, result: Value) -> Self {
        Self { command, result, verified: Map::new() }
    }

    fn check(mut self, name: &str, ok: bool) -> Self {
        self.verified.insert(name.to_string(), Value::Bool(ok));
        self
    }
}

fn seed_from(cli_seed: Option<u64>) -> Result<u64, CliError> {
    match std::env::var("K3LAT_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Parse(format!("K3LAT_SEED={s:?} is not an integer"))),
        Err(_) => Ok(cli_seed.unwrap_or(0)),
    }
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(report) => {
            let failed: Vec<&String> =
                report.verified.iter().filter(|(_, v)| v != &&Value::Bool(true)).map(|(k, _)| k).collect();
            let mut line = Map::new();
            line.insert("command".into(), Value::from(report.command));
            line.insert("result".into(), report.result);
            line.insert("verified".into(), Value::Object(report.verified.clone()));
            line.insert("timing_ms".into(), Value::from(start.elapsed().as_millis() as u64));
            let stdout = format!("{}\n", Value::Object(line));
            if failed.is_empty() {
                Outcome { code: 0, stdout, stderr: String::new() }
            } else {
                let names: Vec<&str> = failed.iter().map(|s| s.as_str()).collect();
                Outcome { code: 4, stdout, stderr: format!("verification failed: {}\n", names.join(", ")) }
            }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("k3lat: {e}\n") },
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    match &cli.command {
        Command::CyclicType(a) => cyclic_type_cmd(&load_isometry(a)?),
        Command::DoubleOrbit(a) => double_orbit_cmd(&load_isometry(a)?),
        Command::DecomposeReflections(a) => decompose_cmd(&load_isometry(a)?),
        Command::ReduceDoubleOrbit(a) => reduce_cmd(&load_isometry(a)?),
        Command::Discriminant(a) => discriminant_cmd(a, cap),
        Command::Congruence(a) => congruence_cmd(a),
        Command::Mukai(m) => mukai_cmd(m),
        Command::Chern(ChernCommand::Verify { rank, degree, trials }) => {
            chern_verify_cmd(*rank, *degree, *trials, seed_from(cli.seed)?)
        }
        Command::Selftest(a) => selftest::run(seed_from(cli.seed)?, a.jobs),
    }
}

fn load_lattice(name: &str, gram: Option<&Value>) -> Result<Lattice, CliError> {
    match gram {
        Some(g) => Ok(Lattice::new(json::to_int_matrix(g)?)?),
        None => Ok(standard_lattice(name)?),
    }
}

fn load_isometry(a: &IsometryArgs) -> Result<RationalIsometry, CliError> {
    let cli_gram = a.lattice.gram.as_deref().map(json::parse_input).transpose()?;
    if let Some(m) = &a.matrix {
        let lattice = load_lattice(&a.lattice.lattice, cli_gram.as_ref())?;
        return Ok(RationalIsometry::new(lattice, json::to_rat_matrix(&json::parse_input(m)?)?)?);
    }
    let Some(text) = &a.isometry else {
        return Err(CliError::Parse("one of --isometry or --matrix is required".into()));
    };
    let obj = json::parse_input(text)?;
    let name = obj.get("lattice").and_then(Value::as_str).unwrap_or(&a.lattice.lattice).to_string();
    let gram = obj.get("gram").cloned().or(cli_gram);
    let lattice = load_lattice(&name, gram.as_ref())?;
    if let Some(m) = obj.get("matrix") {
        Ok(RationalIsometry::new(lattice, json::to_rat_matrix(m)?)?)
    } else if let Some(x) = obj.get("reflection") {
        Ok(reflection(&lattice, &json::to_int_vec(x)?)?)
    } else {
        Err(CliError::Parse("isometry object needs \"matrix\" or \"reflection\"".into()))
    }
}

/// Independent recheck that a matrix preserves the form.
fn preserves_form(phi: &RationalIsometry) -> bool {
    let g = phi.lattice().gram_rat();
    let m = phi.matrix();
    (&(&m.transpose() * &g) * m) == g
}

fn opt_int(v: Option<BigInt>) -> Value {
    v.as_ref().map(json::int).unwrap_or(Value::Null)
}

fn cyclic_type_cmd(phi: &RationalIsometry) -> Result<Report, CliError> {
    let q = quotient_structure(phi);
    let basis = coinvariant_sublattice(phi);
    let image_integral = (phi.matrix() * &basis.to_rat()).is_integral();
    let det_matches = basis.det()?.abs() == q.index;
    Ok(Report::new(
        "cyclic-type",
        json!({
            "cyclic_type": opt_int(q.cyclic_order()),
            "elementary_divisors": json::int_vec(&q.elementary_divisors),
            "index": json::int(&q.index),
        }),
    )
    .check("isometry", preserves_form(phi))
    .check("sublattice_maps_integrally", image_integral)
    .check("index_matches_determinant", det_matches))
}

fn double_orbit_cmd(f: &RationalIsometry) -> Result<Report, CliError> {
    if f.lattice().rank() != 2 {
        return Err(CliError::Lib(Error::Precondition(
            "double-orbit works on U; use reduce-double-orbit for larger lattices".into(),
        )));
    }
    let pair = u_double_orbit_canonical(f)?;
    let ct = quotient_structure(f).cyclic_order();
    Ok(Report::new(
        "double-orbit",
        json!({ "pair": [json::int(&pair.a), json::int(&pair.b)], "cyclic_type": json::int(&pair.product()) }),
    )
    .check("isometry", preserves_form(f))
    .check("product_is_cyclic_type", ct == Some(pair.product())))
}

fn decompose_cmd(phi: &RationalIsometry) -> Result<Report, CliError> {
    let xs = cartan_dieudonne(phi)?;
    let back = compose_reflections(phi.lattice(), &xs)?;
    let bound = phi.lattice().rank() + 2;
    let vectors: Vec<Value> = xs.iter().map(|x| json::int_vec(x.coords())).collect();
    Ok(Report::new("decompose-reflections", json!({ "reflections": vectors, "count": xs.len(), "bound": bound }))
        .check("isometry", preserves_form(phi))
        .check("recomposes", back.matrix() == phi.matrix())
        .check("within_bound", xs.len() <= bound))
}

fn reduce_cmd(phi: &RationalIsometry) -> Result<Report, CliError> {
    let raw = double_orbit_reduce(phi)?;
    let canon = canonicalize_reduction(&raw)?;
    let n = quotient_structure(phi).cyclic_order();
    let recomposed = canon.recompose()?;
    Ok(Report::new(
        "reduce-double-orbit",
        json!({
            "u_pair": [json::int(&raw.pair.a), json::int(&raw.pair.b)],
            "pair": [json::int(&canon.pair.a), json::int(&canon.pair.b)],
            "left": json::rat_matrix(canon.left.matrix()),
            "right": json::rat_matrix(canon.right.matrix()),
        }),
    )
    .check("isometry", preserves_form(phi))
    .check("recomposes", recomposed.matrix() == phi.matrix())
    .check("left_integral", canon.left.is_integral() && preserves_form(&canon.left))
    .check("right_integral", canon.right.is_integral() && preserves_form(&canon.right))
    .check("product_is_cyclic_type", n == Some(raw.pair.product()) && n == Some(canon.pair.product())))
}

fn discriminant_cmd(a: &DiscriminantArgs, cap: u128) -> Result<Report, CliError> {
    let m = u_case_module(a.a, a.b)?;
    let n = a.a * a.b;
    let mut result = json!({
        "elementary_divisors": json::int_vec(&m.elementary_divisors()),
        "order": json::int(&BigInt::from(m.order())),
    });
    let mut report_checks = vec![("order_is_n_squared", m.order() == n as u128 * n as u128)];
    if a.lagrangians {
        let found = enumerate_lagrangians(&m, n, cap)?;
        let pairs = coprime_factor_pairs(n);
        let mut matched = Vec::new();
        let mut all_matched = true;
        for (c, d) in &pairs {
            let l = lagrangian_from_pair(&m, a.a, a.b, *c, *d)?;
            let hit = found.iter().any(|f| f == &l);
            all_matched &= hit && l.is_isotropic(&m) && l.order() as u64 == n;
            matched.push(json!([c, d]));
        }
        result["lagrangian_count"] = Value::from(found.len());
        result["pairs"] = Value::Array(matched);
        report_checks.push(("count_matches_pairs", found.len() == pairs.len()));
        report_checks.push(("constructors_enumerated", all_matched));
    }
    Ok(report_checks.into_iter().fold(Report::new("discriminant", result), |r, (k, v)| r.check(k, v)))
}

fn congruence_cmd(a: &CongruenceArgs) -> Result<Report, CliError> {
    let gram = a.lattice.gram.as_deref().map(json::parse_input).transpose()?;
    let lattice = load_lattice(&a.lattice.lattice, gram.as_ref())?;
    let l1 = json::to_int_vec(&json::parse_input(&a.l1)?)?;
    let l2 = json::to_int_vec(&json::parse_input(&a.l2)?)?;
    let k = congruence_orbit_test(&lattice, &l1, &l2, a.n)?;
    let recheck = match k {
        Some(k) => {
            let nb = BigInt::from(a.n);
            let kb = BigInt::from(k);
            let h1 = lattice.square(&l1) / BigInt::from(2);
            let h2 = lattice.square(&l2) / BigInt::from(2);
            kb.gcd(&nb).is_one() && (h1 - &kb * &kb * h2).mod_floor(&nb).is_zero()
        }
        None => true,
    };
    Ok(Report::new("congruence", json!({ "k": k })).check("congruence_holds", recheck))
}

fn mukai_vector(arg: &str) -> Result<MukaiVector, CliError> {
    let v = json::parse_input(arg)?;
    if v.is_object() {
        let c = json::to_int_vec(&v["c"])?;
        Ok(MukaiVector::new(json::to_int(&v["r"])?, c, json::to_int(&v["s"])?)?)
    } else {
        Ok(MukaiVector::from_coords(&json::to_int_vec(&v)?)?)
    }
}

fn mukai_cmd(m: &MukaiCommand) -> Result<Report, CliError> {
    match m {
        MukaiCommand::Pairing { v, w } => {
            let (v, w) = (mukai_vector(v)?, mukai_vector(w)?);
            let p = mukai_pairing(&v, &w);
            let by_gram = vector::pair(&mukai_gram(), &v.to_coords(), &w.to_coords());
            Ok(Report::new("mukai pairing", json!({ "pairing": json::int(&p) }))
                .check("symmetric", mukai_pairing(&w, &v) == p)
                .check("matches_gram", by_gram == p))
        }
        MukaiCommand::Domain { n, k, j, x, y, c } => {
            if *n <= 0 || *k <= 0 || *j <= 0 {
                return Err(CliError::Lib(Error::Precondition("n, k and j must be positive".into())));
            }
            let x = json::to_int_vec(&json::parse_input(x)?)?;
            let y = json::to_int_vec(&json::parse_input(y)?)?;
            let c = match c {
                Some(c) => json::to_int_matrix(&json::parse_input(c)?)?,
                None => IntMatrix::zeros(K3_RANK, K3_RANK),
            };
            let (nb, kb, jb) = (BigInt::from(*n), BigInt::from(*k), BigInt::from(*j));
            let q = sheaf_isometry_domain(&nb, &kb, &jb, &x, &y, &c)?;
            let expected = &nb / (&kb * &jb).gcd(&nb);
            Ok(Report::new(
                "mukai domain",
                json!({
                    "cyclic_order": opt_int(q.cyclic_order()),
                    "elementary_divisors": json::int_vec(&q.elementary_divisors),
                    "expected_order": json::int(&expected),
                }),
            )
            .check("order_matches_formula", q.cyclic_order() == Some(expected)))
        }
        MukaiCommand::Universal { n, s, j, sign } => {
            let r = verify_universal_example(*n, *s, *j, *sign)?;
            let k_ok = (*s * r.k - 1).rem_euclid(*n) == 0;
            Ok(Report::new(
                "mukai universal",
                json!({
                    "n": r.n, "s": r.s, "j": r.j, "k": r.k, "sign": r.sign,
                    "c2_coefficient": r.c2_coefficient,
                    "image_of_h": json::rat_vec(&r.image_of_h),
                    "h_hat": json::int_vec(&r.h_hat),
                    "maps_h_to_h_hat": r.holds,
                }),
            )
            .check("mukai_vector_isotropic", r.mukai_vector_isotropic)
            .check("k_inverts_s", k_ok))
        }
    }
}

fn chern_verify_cmd(rank: usize, degree: usize, trials: usize, seed: u64) -> Result<Report, CliError> {
    let mut s = Sampler::new(seed);
    let names = ["wedge2", "sym2", "tensor_square", "virtual_wedge2", "extraction", "r2_multiplicative"];
    let mut passed = [0usize; 6];
    for _ in 0..trials {
        let ra = s.int_in(0, rank as i64) as usize;
        let rb = s.int_in(0, rank as i64) as usize;
        let a = RootBundle::new(s.rationals(ra, 7));
        let b = RootBundle::new(s.rationals(rb, 7));
        let c = check_identities(&a, &b, degree);
        for (slot, ok) in passed.iter_mut().zip([
            c.wedge2,
            c.sym2,
            c.tensor_square,
            c.virtual_wedge2,
            c.extraction,
            c.r2_multiplicative,
        ]) {
            *slot += ok as usize;
        }
    }
    let counts: Map<String, Value> = names.iter().zip(passed).map(|(n, p)| (n.to_string(), Value::from(p))).collect();
    let mut report = Report::new(
        "chern verify",
        json!({ "rank": rank, "degree": degree, "trials": trials, "seed": seed, "passed": counts }),
    );
    for (n, p) in names.iter().zip(passed) {
        report = report.check(n, p == trials);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("k3lat").chain(args.iter().copied()))
    }

    fn result(o: &Outcome) -> Value {
        let v: Value = serde_json::from_str(o.stdout.trim()).expect("one JSON line");
        v["result"].clone()
    }

    #[test]
    fn double_orbit_of_diagonal() {
        let o = run_args(&["double-orbit", "--lattice", "U", "--matrix", "[[3/2,0],[0,2/3]]"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(result(&o)["pair"], json!([3, 2]));
    }

    #[test]
    fn cyclic_type_of_reflection() {
        let mut x = vec![0i64; K3_RANK];
        x[0] = 1;
        x[1] = 3;
        let obj = json!({ "reflection": x }).to_string();
        let o = run_args(&["cyclic-type", "--lattice", "K3", "--isometry", &obj]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(result(&o)["cyclic_type"], json!(3));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["no-such-command"]).code, 2);
        assert_eq!(run_args(&["double-orbit", "--lattice", "U", "--matrix", "[[1/2"]).code, 2);
        // not an isometry of U
        assert_eq!(run_args(&["double-orbit", "--lattice", "U", "--matrix", "[[2,0],[0,2]]"]).code, 3);
        assert_eq!(run_args(&["mukai", "universal", "--n", "4", "--s", "2"]).code, 3);
        assert_eq!(run_args(&["--help"]).code, 0);
    }

    #[test]
    fn chern_verify_passes() {
        let o = run_args(&["chern", "verify", "--rank", "3", "--degree", "8", "--trials", "10", "--seed", "7"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(result(&o)["passed"]["wedge2"], json!(10));
    }
}
