//! Writing a rational isometry as a product of reflections.
//!
//! The search walks down a chain of nondegenerate subspaces `W`, with the
//! current isometry `ψ` fixing `W^⊥` pointwise. At each level it picks an
//! anisotropic `v ∈ W` and one or two reflections making `ψ` fix `v`, then
//! passes to `W ∩ v^⊥`. A level costs two reflections only when
//! `(ψ − 1) W` is totally isotropic and nonzero, so candidates that would
//! leave the next level in that state are avoided when possible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{reflection_matrix, RationalIsometry};
use crate::error::{Error, Result};
use crate::exactlinalg::{vector, RatMatrix};
use crate::lattices::{Lattice, LatticeVector};

/// Limit on lookahead evaluations per level before settling.
const LOOKAHEAD_BUDGET: usize = 64;

type Vector = Vec<BigRational>;

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive_rat(v: &[BigRational]) -> Vector {
    vector::to_rat(&vector::primitive_on_ray(v).expect("nonzero vector"))
}

/// Primitive integer vector on the line of `v`, first nonzero entry positive.
fn signed_primitive(v: &[BigRational]) -> Vec<BigInt> {
    let mut p = vector::primitive_on_ray(v).expect("nonzero vector");
    if p.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        p.iter_mut().for_each(|x| *x = -x.clone());
    }
    p
}

/// `r_u ψ = ψ − 2 u (uᵀ G ψ) / q(u)`.
fn reflect_left(gram: &RatMatrix, psi: &RatMatrix, u: &[BigRational]) -> RatMatrix {
    let gu = gram.mul_vec(u).expect("dimension");
    let q = dot(u, &gu);
    let row = psi.transpose().mul_vec(&gu).expect("dimension");
    let c = BigRational::from_integer(2.into()) / q;
    let n = psi.rows();
    RatMatrix::from_fn(n, n, |i, j| psi.get(i, j) - &c * &u[i] * &row[j])
}

/// Small integer combinations of the basis, as `(index, coefficient)` terms.
fn candidates(k: usize) -> impl Iterator<Item = Vec<(usize, i64)>> {
    let singles = (0..k).map(|i| vec![(i, 1)]);
    let pairs = (0..k).flat_map(move |i| {
        (i + 1..k).flat_map(move |j| {
            [(1, 1), (1, -1), (1, 2), (2, 1)].into_iter().map(move |(a, b)| vec![(i, a), (j, b)])
        })
    });
    singles.chain(pairs)
}

struct Level<'a> {
    gram: &'a RatMatrix,
    psi: &'a RatMatrix,
    basis: &'a [Vector],
    /// `ψ w − w` for each basis vector.
    moved: Vec<Vector>,
    b: Vec<Vec<BigRational>>,
    c: Vec<Vec<BigRational>>,
}

struct Step {
    reflections: Vec<Vector>,
    psi: RatMatrix,
    basis: Vec<Vector>,
}

fn gram_of(gram: &RatMatrix, vs: &[Vector]) -> Vec<Vec<BigRational>> {
    let gvs: Vec<Vector> = vs.iter().map(|v| gram.mul_vec(v).expect("dimension")).collect();
    vs.iter().map(|a| gvs.iter().map(|gb| dot(a, gb)).collect()).collect()
}

fn combine(vs: &[Vector], terms: &[(usize, i64)]) -> Vector {
    let n = vs[0].len();
    let mut out = vec![BigRational::zero(); n];
    for &(i, c) in terms {
        let c = BigRational::from_integer(c.into());
        for (o, x) in out.iter_mut().zip(&vs[i]) {
            *o += &c * x;
        }
    }
    out
}

fn form_on(m: &[Vec<BigRational>], terms: &[(usize, i64)]) -> BigRational {
    let mut s = BigRational::zero();
    for &(i, a) in terms {
        for &(j, b) in terms {
            s += BigRational::from_integer((a * b).into()) * &m[i][j];
        }
    }
    s
}

/// Whether `(ψ − 1) W` is totally isotropic and nonzero.
fn stuck(gram: &RatMatrix, psi: &RatMatrix, basis: &[Vector]) -> bool {
    let moved: Vec<Vector> = basis
        .iter()
        .map(|w| vector::sub(&psi.mul_vec(w).expect("dimension"), w))
        .collect();
    if moved.iter().all(|d| vector::is_zero(d)) {
        return false;
    }
    gram_of(gram, &moved).iter().all(|row| row.iter().all(Zero::is_zero))
}

impl<'a> Level<'a> {
    fn new(gram: &'a RatMatrix, psi: &'a RatMatrix, basis: &'a [Vector]) -> Self {
        let moved: Vec<Vector> = basis
            .iter()
            .map(|w| vector::sub(&psi.mul_vec(w).expect("dimension"), w))
            .collect();
        let b = gram_of(gram, basis);
        let c = gram_of(gram, &moved);
        Self { gram, psi, basis, moved, b, c }
    }

    fn step(&self, terms: &[(usize, i64)], reflections: Vec<Vector>) -> Step {
        let v = combine(self.basis, terms);
        let gv = self.gram.mul_vec(&v).expect("dimension");
        let qv = dot(&v, &gv);
        let drop = terms[0].0;
        let basis = self
            .basis
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, w)| {
                let beta = dot(w, &gv) / &qv;
                primitive_rat(&vector::sub(w, &vector::scale(&v, &beta)))
            })
            .collect();
        let mut psi = self.psi.clone();
        for u in &reflections {
            psi = reflect_left(self.gram, &psi, u);
        }
        Step { reflections, psi, basis }
    }

    fn choose(&self) -> Step {
        let mut first_anisotropic: Option<Vec<(usize, i64)>> = None;
        let mut settled: Option<Step> = None;
        let mut budget = LOOKAHEAD_BUDGET;
        for terms in candidates(self.basis.len()) {
            if form_on(&self.b, &terms).is_zero() {
                continue;
            }
            if first_anisotropic.is_none() {
                first_anisotropic = Some(terms.clone());
            }
            let u = combine(&self.moved, &terms);
            let reflections = if vector::is_zero(&u) {
                vec![]
            } else if !form_on(&self.c, &terms).is_zero() {
                vec![u]
            } else {
                continue;
            };
            let step = self.step(&terms, reflections);
            if step.basis.is_empty() || !stuck(self.gram, &step.psi, &step.basis) {
                return step;
            }
            if settled.is_none() {
                settled = Some(step);
            }
            budget -= 1;
            if budget == 0 {
                break;
            }
        }
        if let Some(step) = settled {
            return step;
        }
        // every candidate moves v along an isotropic direction: send ψv to
        // −v through ψv + v (anisotropic, q = 4 q(v)), then reflect in v
        let terms = first_anisotropic.expect("nondegenerate subspace has an anisotropic vector");
        let v = combine(self.basis, &terms);
        let pv = self.psi.mul_vec(&v).expect("dimension");
        let sum: Vector = vector::add(&pv, &v);
        self.step(&terms, vec![sum, v])
    }
}

/// Reflection vectors `x_1, …, x_m` with `φ = r_{x_1} ∘ ⋯ ∘ r_{x_m}`.
pub fn cartan_dieudonne(phi: &RationalIsometry) -> Result<Vec<LatticeVector>> {
    let lattice = phi.lattice();
    let n = lattice.rank();
    let gram = lattice.gram_rat();
    let mut psi = phi.matrix().clone();
    let mut basis: Vec<Vector> = (0..n).map(|i| LatticeVector::basis(n, i).to_rat()).collect();
    let mut out = Vec::new();
    while !basis.is_empty() {
        let step = Level::new(&gram, &psi, &basis).choose();
        for u in &step.reflections {
            out.push(LatticeVector::new(signed_primitive(u)));
        }
        psi = step.psi;
        basis = step.basis;
    }
    if !psi.is_identity() {
        return Err(Error::Invariant("reflections did not exhaust the isometry".into()));
    }
    let check = compose_reflections(lattice, &out)?;
    if check.matrix() != phi.matrix() {
        return Err(Error::Invariant("reflection product differs from the input".into()));
    }
    Ok(out)
}

/// `r_{x_1} ∘ ⋯ ∘ r_{x_m}`; the identity for an empty list.
pub fn compose_reflections(lattice: &Lattice, xs: &[LatticeVector]) -> Result<RationalIsometry> {
    let gram = lattice.gram_rat();
    let mut m = RatMatrix::identity(lattice.rank());
    for x in xs {
        if x.len() != lattice.rank() {
            return Err(Error::Dimension("reflection vector length".into()));
        }
        m = m.mul_mat(&reflection_matrix(&gram, &x.to_rat())?)?;
    }
    Ok(RationalIsometry::new_trusted(lattice.clone(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::vector::from_i64s;
    use crate::isometry::reflection;
    use crate::lattices::{direct_sum, k3_lattice, u_lattice};

    fn check(phi: &RationalIsometry) -> usize {
        let xs = cartan_dieudonne(phi).unwrap();
        let lattice = phi.lattice();
        for x in &xs {
            assert!(!lattice.square(x).is_zero());
        }
        assert_eq!(compose_reflections(lattice, &xs).unwrap().matrix(), phi.matrix());
        assert!(xs.len() <= lattice.rank() + 2, "{} reflections", xs.len());
        xs.len()
    }

    #[test]
    fn identity_needs_none() {
        assert_eq!(check(&RationalIsometry::identity(k3_lattice())), 0);
    }

    #[test]
    fn single_reflection() {
        let u = u_lattice();
        let x = from_i64s(&[1, 3]);
        let r = reflection(&u, &x).unwrap();
        let xs = cartan_dieudonne(&r).unwrap();
        assert_eq!(xs, vec![LatticeVector::new(x)]);
    }

    #[test]
    fn minus_identity_on_u() {
        let m = RationalIsometry::new(u_lattice(), -&RatMatrix::identity(2)).unwrap();
        assert_eq!(check(&m), 2);
    }

    #[test]
    fn unipotent_isometry_of_uu() {
        // a transvection has (E − 1) totally isotropic image
        let uu = direct_sum(&u_lattice(), &u_lattice());
        let t = crate::isometry::eichler_transvection(&uu, &from_i64s(&[1, 0, 0, 0]), &from_i64s(&[0, 0, 1, 1]))
            .unwrap();
        check(&t);
    }

    #[test]
    fn products_of_reflections_on_uu() {
        let uu = direct_sum(&u_lattice(), &u_lattice());
        let vs = [[1, 2, 0, 1], [0, 1, 3, 1], [2, 1, 1, -1], [1, 1, 1, 1], [1, -1, 2, 5]];
        let mut phi = RationalIsometry::identity(uu.clone());
        for v in vs {
            phi = phi.compose(&reflection(&uu, &from_i64s(&v)).unwrap()).unwrap();
            check(&phi);
        }
    }
}
