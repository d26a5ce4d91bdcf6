//! Acceptance run: one PASS/FAIL line per criterion, each with its own time
//! limit. Exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use k3lat::chern::{
    ch_from_roots, extract_graded, r2_iterates, roots, sym2_ch, virtual_wedge2, wedge2_ch, RootBundle, VirtualBundle,
};
use k3lat::exactlinalg::same_lattice;
use k3lat::isometry::{
    cartan_dieudonne, coinvariant_sublattice, compose_reflections, cyclic_type, quotient_structure, reflection,
    RationalIsometry,
};
use k3lat::lattices::{direct_sum, k3_lattice, u_lattice, u_summand, Lattice, K3_RANK, MUKAI_RANK};
use k3lat::mukai::{exp_action, mukai_lattice, mukai_pairing, sheaf_isometry_domain, verify_universal_example, MukaiVector};
use k3lat::orbits::{
    double_orbit_reduce, enumerate_lagrangians, lagrangian_from_pair, u_case_module, u_diagonal_isometry,
    u_double_orbit_canonical, u_integral_isometries, ModuleSubgroup, DEFAULT_CAP,
};
use k3lat::sampling::Sampler;
use num_bigint::BigInt;
use num_integer::Integer;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Coprime ordered pairs `(c, d)` with `c d = n`, by trial division.
fn coprime_pairs_oracle(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for c in 1..=n {
        if n % c == 0 && c.gcd(&(n / c)) == 1 {
            out.push((c, n / c));
        }
    }
    out
}

fn reflection_cyclic_type() -> Check {
    let k3 = k3_lattice();
    let mut count = 0;
    for plane in 0..3 {
        let (ei, fi) = u_summand(plane);
        for d in (-20i64..=20).filter(|d| *d != 0) {
            let mut x = vec![BigInt::from(0); K3_RANK];
            x[ei] = 1.into();
            x[fi] = d.into();
            let r = reflection(&k3, &x).map_err(e)?;
            let ct = cyclic_type(&r);
            ensure(ct == Some(BigInt::from(d.abs())), || format!("plane {plane}, d = {d}: got {ct:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} reflections"))
}

fn u_double_orbits() -> Check {
    let mut s = Sampler::new(1002);
    let units = u_integral_isometries();
    let mut count = 0;
    for n in 1..=30u64 {
        for (a, b) in coprime_pairs_oracle(n) {
            let f = u_diagonal_isometry(&a.into(), &b.into()).map_err(e)?;
            ensure(cyclic_type(&f) == Some(BigInt::from(n)), || format!("f_({a},{b}) cyclic type"))?;
            for _ in 0..4 {
                let g = &units[s.int_in(0, 3) as usize];
                let h = &units[s.int_in(0, 3) as usize];
                let moved = g.compose(&f).map_err(e)?.compose(h).map_err(e)?;
                let pair = u_double_orbit_canonical(&moved).map_err(e)?;
                ensure(pair.a == a.max(b).into() && pair.b == a.min(b).into(), || {
                    format!("({a},{b}) recovered as ({},{})", pair.a, pair.b)
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} conjugated pairs"))
}

fn lagrangian_classification() -> Check {
    let mut modules = 0;
    for n in 1..=30u64 {
        let pairs = coprime_pairs_oracle(n);
        for &(a, b) in &pairs {
            let m = u_case_module(a, b).map_err(e)?;
            let found = enumerate_lagrangians(&m, n, DEFAULT_CAP).map_err(e)?;
            ensure(found.len() == pairs.len(), || format!("n={n} (a,b)=({a},{b}): {} lagrangians", found.len()))?;
            let built: Vec<ModuleSubgroup> = pairs
                .iter()
                .map(|&(c, d)| lagrangian_from_pair(&m, a, b, c, d))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            let found_sets: BTreeSet<_> = found.iter().map(|l| l.elements().clone()).collect();
            let built_sets: BTreeSet<_> = built.iter().map(|l| l.elements().clone()).collect();
            ensure(found_sets == built_sets, || format!("n={n}: constructors differ from enumeration"))?;
            for (i, &(c1, d1)) in pairs.iter().enumerate() {
                for (j, &(c2, d2)) in pairs.iter().enumerate() {
                    let trivial = built[i].intersection(&built[j]).order() == 1;
                    ensure(trivial == ((c1, d1) == (d2, c2)), || {
                        format!("n={n}: complementarity of ({c1},{d1}) and ({c2},{d2})")
                    })?;
                }
            }
            modules += 1;
        }
    }
    Ok(format!("{modules} modules"))
}

/// Product of two to four reflections in primitive vectors of square ±2.
fn minus_two_reflections(s: &mut Sampler, l: &Lattice) -> Result<RationalIsometry, String> {
    let count = s.int_in(2, 4);
    let mut g = RationalIsometry::identity(l.clone());
    for _ in 0..count {
        let sign = if s.int_in(0, 1) == 0 { -1 } else { 1 };
        let x = s.primitive_of_square(l, sign).map_err(e)?;
        g = g.compose(&reflection(l, &x).map_err(e)?).map_err(e)?;
    }
    Ok(g)
}

fn double_orbit_invariance() -> Check {
    let k3 = k3_lattice();
    let mut s = Sampler::new(1004);
    for i in 0..200 {
        let phi = if i % 2 == 0 {
            let n = s.int_in(1, 12);
            s.cyclic_isometry(&k3, n, 1).map_err(e)?
        } else {
            s.rational_isometry(&k3, 2, 2).map_err(e)?
        };
        let g = minus_two_reflections(&mut s, &k3)?;
        let h = minus_two_reflections(&mut s, &k3)?;
        ensure(g.is_integral() && h.is_integral(), || format!("sample {i}: outer factors not integral"))?;
        let moved = g.compose(&phi).map_err(e)?.compose(&h).map_err(e)?;
        ensure(quotient_structure(&moved) == quotient_structure(&phi), || format!("sample {i}"))?;
        // I_{gφh} = h⁻¹(I_φ)
        let pulled = (h.inverse().matrix() * &coinvariant_sublattice(&phi).to_rat())
            .to_int()
            .ok_or_else(|| format!("sample {i}: h⁻¹ not integral"))?;
        ensure(same_lattice(&pulled, &coinvariant_sublattice(&moved)), || format!("sample {i}: sublattices"))?;
    }
    Ok("200 triples".into())
}

fn constructive_reduction() -> Check {
    let k3 = k3_lattice();
    let mut s = Sampler::new(1005);
    for i in 0..50 {
        let n = s.int_in(1, 12);
        let phi = s.cyclic_isometry(&k3, n, 2).map_err(e)?;
        let r = double_orbit_reduce(&phi).map_err(|err| format!("sample {i} (n={n}): {err}"))?;
        ensure(r.left.is_integral() && r.right.is_integral(), || format!("sample {i}: outer factors"))?;
        ensure(r.recompose().map_err(e)?.matrix() == phi.matrix(), || format!("sample {i}: recomposition"))?;
        ensure(r.pair.product() == BigInt::from(n), || format!("sample {i}: pair product {}", r.pair.product()))?;
    }
    Ok("50 isometries".into())
}

fn sheaf_domain_formula() -> Check {
    let k3 = k3_lattice();
    let mut s = Sampler::new(1006);
    let mut calls = 0;
    for n in 1..=20i64 {
        for j in 1..=n {
            for k in 1..=n {
                let expected = n / (j * k).gcd(&n);
                let dx = s.int_in(-5, 5);
                let dy = s.int_in(-5, 5);
                let x = s.primitive_of_square(&k3, dx).map_err(e)?;
                let y = s.primitive_of_square(&k3, dy).map_err(e)?;
                for _ in 0..10 {
                    let c = s.int_matrix(K3_RANK, K3_RANK, 3);
                    let q = sheaf_isometry_domain(&n.into(), &k.into(), &j.into(), &x, &y, &c).map_err(e)?;
                    ensure(q.cyclic_order() == Some(BigInt::from(expected)), || {
                        format!("n={n} j={j} k={k}: {:?}, expected {expected}", q.elementary_divisors)
                    })?;
                    calls += 1;
                }
            }
        }
    }
    Ok(format!("{calls} kernels"))
}

fn universal_example() -> Check {
    let mut count = 0;
    for n in 1..=10i64 {
        for s in (1..=10i64).filter(|s| s.gcd(&n) == 1) {
            let r = verify_universal_example(n, s, 1, -1).map_err(e)?;
            ensure(r.holds && r.mukai_vector_isotropic, || format!("n={n} s={s}"))?;
            ensure((s * r.k - 1).rem_euclid(n) == 0, || format!("n={n} s={s}: k={}", r.k))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs (n, s)"))
}

fn chern_identities() -> Check {
    let mut s = Sampler::new(1008);
    for t in 0..100 {
        let ra = s.int_in(0, 5) as usize;
        let rb = s.int_in(0, 5) as usize;
        let a = RootBundle::new(s.rationals(ra, 7));
        let b = RootBundle::new(s.rationals(rb, 7));
        let v = VirtualBundle::new(a.clone(), b.clone());
        for d in 0..=10 {
            ensure(wedge2_ch(&a, d) == roots::wedge2_by_pairs(&a, d), || format!("trial {t} D={d}: wedge2"))?;
            ensure(sym2_ch(&a, d) == roots::sym2_by_pairs(&a, d), || format!("trial {t} D={d}: sym2"))?;
            ensure(virtual_wedge2(&v, d) == roots::virtual_wedge2_by_pairs(&v, d), || {
                format!("trial {t} D={d}: virtual wedge2")
            })?;
            let ch = ch_from_roots(&a, d);
            let extracted = extract_graded(&r2_iterates(&ch)).map_err(e)?;
            ensure(extracted == ch.components(), || format!("trial {t} D={d}: extraction"))?;
        }
    }
    Ok("100 root sets, D = 0..10".into())
}

fn decompose_check(lattice: &Lattice, phi: &RationalIsometry, label: &str) -> Result<(), String> {
    let xs = cartan_dieudonne(phi).map_err(|err| format!("{label}: {err}"))?;
    ensure(xs.len() <= lattice.rank() + 2, || format!("{label}: {} reflections", xs.len()))?;
    let back = compose_reflections(lattice, &xs).map_err(e)?;
    ensure(back.matrix() == phi.matrix(), || format!("{label}: product differs"))
}

fn cartan_dieudonne_bound() -> Check {
    let mut s = Sampler::new(1009);
    let uu = direct_sum(&u_lattice(), &u_lattice());
    for i in 0..100 {
        let len = s.int_in(1, 6) as usize;
        let phi = s.rational_isometry(&uu, len, 3).map_err(e)?;
        decompose_check(&uu, &phi, &format!("U+U sample {i}"))?;
    }
    let k3 = k3_lattice();
    for i in 0..20 {
        let phi = if i % 2 == 0 {
            s.rational_isometry(&k3, 3, 2).map_err(e)?
        } else {
            let n = s.int_in(1, 8);
            s.cyclic_isometry(&k3, n, 1).map_err(e)?
        };
        decompose_check(&k3, &phi, &format!("K3 sample {i}"))?;
    }
    Ok("100 on U+U, 20 on K3".into())
}

fn mukai_pairing_and_exp() -> Check {
    let sig = mukai_lattice().signature().map_err(e)?;
    let (p1, n1) = u_lattice().signature().map_err(e)?;
    let (p2, n2) = k3_lattice().signature().map_err(e)?;
    ensure(sig == (4, 20) && sig == (p1 + p2, n1 + n2), || format!("signature {sig:?}"))?;
    let mut s = Sampler::new(1010);
    for i in 0..500 {
        let alpha = s.small_vector(K3_RANK, 5);
        let v = MukaiVector::from_coords(&s.small_vector(MUKAI_RANK, 6)).map_err(e)?;
        let w = MukaiVector::from_coords(&s.small_vector(MUKAI_RANK, 6)).map_err(e)?;
        let before = mukai_pairing(&v, &w);
        let after = mukai_pairing(&exp_action(&alpha, &v).map_err(e)?, &exp_action(&alpha, &w).map_err(e)?);
        ensure(before == after, || format!("triple {i}: {before} vs {after}"))?;
    }
    Ok("signature (4,20), 500 triples".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 10] = [
        ("1 reflection cyclic type", 5, reflection_cyclic_type),
        ("2 U double orbits", 5, u_double_orbits),
        ("3 lagrangian classification", 60, lagrangian_classification),
        ("4 double-orbit invariance", 60, double_orbit_invariance),
        ("5 constructive reduction", 300, constructive_reduction),
        ("6 sheaf isometry domain", 60, sheaf_domain_formula),
        ("7 universal example", 10, universal_example),
        ("8 Chern identities", 30, chern_identities),
        ("9 Cartan-Dieudonne", 120, cartan_dieudonne_bound),
        ("10 Mukai pairing and e^alpha", 5, mukai_pairing_and_exp),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let within = took <= Duration::from_secs(limit);
        match (&outcome, within) {
            (Ok(detail), true) => println!("PASS criterion {name}: {detail} in {:.2}s (limit {limit}s)", took.as_secs_f64()),
            (Ok(detail), false) => {
                failures += 1;
                println!("FAIL criterion {name}: {detail} but took {:.2}s (limit {limit}s)", took.as_secs_f64())
            }
            (Err(why), _) => {
                failures += 1;
                println!("FAIL criterion {name}: {why} ({:.2}s)", took.as_secs_f64())
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
