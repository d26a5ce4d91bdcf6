//! Small randomized suites over every module, run on a worker pool.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::{CliError, Report};
use crate::chern::{check_identities, RootBundle};
use crate::isometry::{cartan_dieudonne, compose_reflections, cyclic_type, quotient_structure, reflection};
use crate::lattices::{direct_sum, k3_lattice, u_lattice, u_summand, K3_RANK, MUKAI_RANK};
use crate::mukai::{exp_action, mukai_lattice, mukai_pairing, sheaf_isometry_domain, verify_universal_example, MukaiVector};
use crate::orbits::{
    coprime_factor_pairs, double_orbit_reduce, enumerate_lagrangians, u_case_module, u_diagonal_isometry,
    u_double_orbit_canonical, u_integral_isometries, DEFAULT_CAP,
};
use crate::sampling::Sampler;
use crate::Result;

type Suite = fn(u64) -> Result<Option<String>>;

const SUITES: [(&str, Suite); 9] = [
    ("reflection_cyclic_type", reflections),
    ("u_double_orbits", u_double_orbits),
    ("lagrangians", lagrangians),
    ("double_orbit_invariance", invariance),
    ("reduction", reduction),
    ("sheaf_domain", sheaf_domain),
    ("universal_example", universal),
    ("chern_identities", chern),
    ("cartan_dieudonne_and_mukai", cd_and_mukai),
];

fn fail(msg: impl Into<String>) -> Result<Option<String>> {
    Ok(Some(msg.into()))
}

fn reflections(_: u64) -> Result<Option<String>> {
    let k3 = k3_lattice();
    for plane in 0..3 {
        for d in (-6i64..=6).filter(|d| *d != 0) {
            let (e, f) = u_summand(plane);
            let mut x = vec![BigInt::from(0); K3_RANK];
            x[e] = 1.into();
            x[f] = d.into();
            if cyclic_type(&reflection(&k3, &x)?) != Some(BigInt::from(d.abs())) {
                return fail(format!("plane {plane}, d = {d}"));
            }
        }
    }
    Ok(None)
}

fn u_double_orbits(seed: u64) -> Result<Option<String>> {
    let mut s = Sampler::new(seed);
    let units = u_integral_isometries();
    for n in 1..=12u64 {
        for (a, b) in coprime_factor_pairs(n) {
            let f = u_diagonal_isometry(&a.into(), &b.into())?;
            let g = &units[s.int_in(0, 3) as usize];
            let h = &units[s.int_in(0, 3) as usize];
            let pair = u_double_orbit_canonical(&g.compose(&f)?.compose(h)?)?;
            let (hi, lo) = (a.max(b), a.min(b));
            if pair.a != hi.into() || pair.b != lo.into() {
                return fail(format!("({a},{b})"));
            }
        }
    }
    Ok(None)
}

fn lagrangians(_: u64) -> Result<Option<String>> {
    for n in 1..=10u64 {
        let m = u_case_module(n, 1)?;
        if enumerate_lagrangians(&m, n, DEFAULT_CAP)?.len() != coprime_factor_pairs(n).len() {
            return fail(format!("n = {n}"));
        }
    }
    Ok(None)
}

fn invariance(seed: u64) -> Result<Option<String>> {
    let mut s = Sampler::new(seed);
    let k3 = k3_lattice();
    for i in 0..10 {
        let n = s.int_in(1, 9);
        let phi = s.cyclic_isometry(&k3, n, 1)?;
        let g = s.integral_isometry(&k3, 2)?;
        let h = s.integral_isometry(&k3, 2)?;
        if quotient_structure(&g.compose(&phi)?.compose(&h)?) != quotient_structure(&phi) {
            return fail(format!("sample {i}"));
        }
    }
    Ok(None)
}

fn reduction(seed: u64) -> Result<Option<String>> {
    let mut s = Sampler::new(seed);
    let k3 = k3_lattice();
    for i in 0..3 {
        let n = s.int_in(2, 8);
        let phi = s.cyclic_isometry(&k3, n, 1)?;
        let r = double_orbit_reduce(&phi)?;
        if r.recompose()?.matrix() != phi.matrix() || r.pair.product() != BigInt::from(n) {
            return fail(format!("sample {i}"));
        }
    }
    Ok(None)
}

fn sheaf_domain(seed: u64) -> Result<Option<String>> {
    let mut s = Sampler::new(seed);
    let k3 = k3_lattice();
    for n in [2i64, 4, 6, 9, 12] {
        for (k, j) in [(1i64, 1i64), (1, 2), (2, 3)] {
            let (dx, dy) = (s.int_in(-3, 3), s.int_in(-3, 3));
            let x = s.primitive_of_square(&k3, dx)?;
            let y = s.primitive_of_square(&k3, dy)?;
            let c = s.int_matrix(K3_RANK, K3_RANK, 2);
            let q = sheaf_isometry_domain(&n.into(), &k.into(), &j.into(), &x, &y, &c)?;
            let expected = n / num_integer::gcd(j * k, n);
            if q.cyclic_order() != Some(expected.into()) {
                return fail(format!("n={n} k={k} j={j}"));
            }
        }
    }
    Ok(None)
}

fn universal(_: u64) -> Result<Option<String>> {
    for n in 1..=5i64 {
        for s in (1..=5i64).filter(|s| num_integer::gcd(*s, n) == 1) {
            let r = verify_universal_example(n, s, 1, -1)?;
            if !r.holds || !r.mukai_vector_isotropic {
                return fail(format!("n={n} s={s}"));
            }
        }
    }
    Ok(None)
}

fn chern(seed: u64) -> Result<Option<String>> {
    let mut s = Sampler::new(seed);
    for i in 0..20 {
        let a = RootBundle::new({
            let r = s.int_in(0, 4) as usize;
            s.rationals(r, 7)
        });
        let b = RootBundle::new({
            let r = s.int_in(0, 3) as usize;
            s.rationals(r, 7)
        });
        let d = s.int_in(1, 8) as usize;
        if !check_identities(&a, &b, d).all() {
            return fail(format!("trial {i}"));
        }
    }
    Ok(None)
}

fn cd_and_mukai(seed: u64) -> Result<Option<String>> {
    let mut s = Sampler::new(seed);
    let uu = direct_sum(&u_lattice(), &u_lattice());
    for i in 0..10 {
        let len = s.int_in(1, 4) as usize;
        let phi = s.rational_isometry(&uu, len, 3)?;
        let xs = cartan_dieudonne(&phi)?;
        if xs.len() > uu.rank() + 2 || compose_reflections(&uu, &xs)?.matrix() != phi.matrix() {
            return fail(format!("Cartan-Dieudonné sample {i}"));
        }
    }
    if mukai_lattice().signature()? != (4, 20) {
        return fail("Mukai signature");
    }
    for i in 0..20 {
        let alpha = s.small_vector(K3_RANK, 3);
        let v = MukaiVector::from_coords(&s.small_vector(MUKAI_RANK, 3))?;
        let w = MukaiVector::from_coords(&s.small_vector(MUKAI_RANK, 3))?;
        if mukai_pairing(&exp_action(&alpha, &v)?, &exp_action(&alpha, &w)?) != mukai_pairing(&v, &w) {
            return fail(format!("e^α sample {i}"));
        }
    }
    Ok(None)
}

pub(super) fn run(seed: u64, jobs: usize) -> std::result::Result<Report, CliError> {
    let workers = if jobs == 0 { SUITES.len() } else { jobs.min(SUITES.len()) };
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Option<String>>>>> = Mutex::new((0..SUITES.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= SUITES.len() {
                    break;
                }
                let out = (SUITES[i].1)(seed.wrapping_add(i as u64));
                results.lock().expect("no poisoned workers")[i] = Some(out);
            });
        }
    });
    let results = results.into_inner().expect("no poisoned workers");
    let mut suites = Map::new();
    let mut report_checks = Vec::new();
    for ((name, _), outcome) in SUITES.iter().zip(results) {
        let outcome = outcome.expect("every suite ran");
        let (pass, detail) = match outcome {
            Ok(None) => (true, Value::Null),
            Ok(Some(msg)) => (false, Value::from(msg)),
            Err(e) if e.is_internal() => return Err(CliError::Lib(e)),
            Err(e) => (false, Value::from(e.to_string())),
        };
        suites.insert(name.to_string(), json!({ "pass": pass, "failure": detail }));
        report_checks.push((*name, pass));
    }
    let report = Report::new("selftest", json!({ "seed": seed, "suites": suites }));
    Ok(report_checks.into_iter().fold(report, |r, (n, ok)| r.check(n, ok)))
}
