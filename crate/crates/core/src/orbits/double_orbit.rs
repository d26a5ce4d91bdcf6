//! Double orbits `O(L) φ O(L)`: the normal form on `U`, the congruence test
//! for primitive vectors, and the constructive reduction on the K3 lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactlinalg::{integer_kernel, smith_normal_form, vector, IntMatrix, RatMatrix};
use crate::isometry::transitivity::{reduce_sl2, sl2_pair_action, Mat2};
use crate::isometry::{
    coinvariant_sublattice, cyclic_type, embed_u_isometry_in, map_primitive_to_standard, RationalIsometry,
};
use crate::lattices::{hyperbolic_prefix, is_primitive, u_lattice, Lattice};

/// `(a, b)` with `a ≥ b > 0` coprime, naming the double orbit of
/// `f_(a,b) = diag(a/b, b/a)` on `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UCanonicalPair {
    pub a: BigInt,
    pub b: BigInt,
}

impl UCanonicalPair {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self> {
        if !b.is_positive() || a < b || !a.gcd(&b).is_one() {
            return Err(Error::Precondition("pair must satisfy a ≥ b > 0 and gcd(a, b) = 1".into()));
        }
        Ok(Self { a, b })
    }

    pub fn from_u64(a: u64, b: u64) -> Result<Self> {
        Self::new(a.into(), b.into())
    }

    /// `a b`, the cyclic type of `f_(a,b)`.
    pub fn product(&self) -> BigInt {
        &self.a * &self.b
    }
}

/// `f_(a,b) = diag(a/b, b/a)` on `U`.
pub fn u_diagonal_isometry(a: &BigInt, b: &BigInt) -> Result<RationalIsometry> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Precondition("diagonal entries must be nonzero".into()));
    }
    let l = BigRational::new(a.clone(), b.clone());
    let m = RatMatrix::diagonal(&[l.clone(), l.recip()]);
    Ok(RationalIsometry::new_trusted(u_lattice(), m))
}

/// `f_(a,b) ⊕ id` on `lattice`.
pub fn embedded_pair_isometry(pair: &UCanonicalPair, lattice: &Lattice) -> Result<RationalIsometry> {
    embed_u_isometry_in(&u_diagonal_isometry(&pair.a, &pair.b)?, lattice)
}

/// The four integral isometries `±1, ±swap` of `U`.
pub fn u_integral_isometries() -> Vec<RationalIsometry> {
    let one = RatMatrix::identity(2);
    let swap = RatMatrix::from_i64_pairs(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
    [one.clone(), -&one, swap.clone(), -&swap]
        .into_iter()
        .map(|m| RationalIsometry::new_trusted(u_lattice(), m))
        .collect()
}

fn require_u(f: &RationalIsometry) -> Result<()> {
    if f.lattice().gram() != u_lattice().gram() {
        return Err(Error::Precondition("isometry must act on U".into()));
    }
    Ok(())
}

/// `(u1, (a,b), u2)` with `u1, u2 ∈ O(U)` and `f = u1 ∘ f_(a,b) ∘ u2`.
pub fn u_double_orbit_decompose(
    f: &RationalIsometry,
) -> Result<(RationalIsometry, UCanonicalPair, RationalIsometry)> {
    require_u(f)?;
    let m = f.matrix();
    // f permutes the two isotropic lines Q e1 and Q e2
    let lambda = if m.get(0, 1).is_zero() && m.get(1, 0).is_zero() {
        m.get(0, 0).clone()
    } else if m.get(0, 0).is_zero() && m.get(1, 1).is_zero() {
        m.get(1, 0).clone()
    } else {
        return Err(Error::Invariant("isometry of U does not preserve the isotropic lines".into()));
    };
    let mut lambda = lambda.abs();
    if lambda < BigRational::one() {
        lambda = lambda.recip();
    }
    let pair = UCanonicalPair::new(lambda.numer().clone(), lambda.denom().clone())?;
    let core = u_diagonal_isometry(&pair.a, &pair.b)?;
    let units = u_integral_isometries();
    for u1 in &units {
        for u2 in &units {
            if u1.compose(&core)?.compose(u2)?.matrix() == m {
                return Ok((u1.clone(), pair, u2.clone()));
            }
        }
    }
    Err(Error::Invariant("no O(U) factors reproduce the isometry".into()))
}

/// The pair `(a, b)` with `f ∈ O(U) f_(a,b) O(U)`.
pub fn u_double_orbit_canonical(f: &RationalIsometry) -> Result<UCanonicalPair> {
    Ok(u_double_orbit_decompose(f)?.1)
}

/// Least `k ≥ 1` prime to `n` with `(λ1,λ1)/2 ≡ k² (λ2,λ2)/2 mod n`.
pub fn congruence_orbit_test(lattice: &Lattice, l1: &[BigInt], l2: &[BigInt], n: u64) -> Result<Option<u64>> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if !is_primitive(lattice, l1)? || !is_primitive(lattice, l2)? {
        return Err(Error::Imprimitive);
    }
    let nb = BigInt::from(n);
    let h1 = (lattice.square(l1) / BigInt::from(2)).mod_floor(&nb).to_u64().expect("reduced");
    let h2 = (lattice.square(l2) / BigInt::from(2)).mod_floor(&nb).to_u64().expect("reduced");
    Ok((1..=n.max(1)).find(|&k| {
        k.gcd(&n) == 1 && (k as u128 * k as u128 % n as u128 * h2 as u128 % n as u128) == h1 as u128
    }))
}

/// `φ = left ∘ (f_(a,b) ⊕ id) ∘ right` with `left`, `right` integral.
#[derive(Clone, Debug)]
pub struct DoubleOrbitReduction {
    pub left: RationalIsometry,
    pub pair: UCanonicalPair,
    pub right: RationalIsometry,
}

impl DoubleOrbitReduction {
    pub fn recompose(&self) -> Result<RationalIsometry> {
        let core = embedded_pair_isometry(&self.pair, self.left.lattice())?;
        self.left.compose(&core)?.compose(&self.right)
    }

    fn verified(self, phi: &RationalIsometry) -> Result<Self> {
        if !self.left.is_integral() || !self.right.is_integral() {
            return Err(Error::Invariant("reduction factors are not integral".into()));
        }
        if self.recompose()?.matrix() != phi.matrix() {
            return Err(Error::Invariant("reduction does not recompose to the input".into()));
        }
        Ok(self)
    }
}

fn require_reducible_lattice(lattice: &Lattice) -> Result<()> {
    if hyperbolic_prefix(lattice) < 2 || !lattice.is_unimodular() || !lattice.is_even() {
        return Err(Error::Precondition(
            "lattice must be even unimodular with two leading hyperbolic planes".into(),
        ));
    }
    Ok(())
}

/// Hyperbolic basis `t1, t2` of a rank-2 even unimodular indefinite
/// lattice given by the columns of `basis`.
fn hyperbolic_basis(lattice: &Lattice, basis: &IntMatrix) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let g = basis.pairing(lattice.gram(), basis)?;
    let (a, b, c) = (g.get(0, 0).clone(), g.get(0, 1).clone(), g.get(1, 1).clone());
    if &a * &c - &b * &b != BigInt::from(-1) {
        return Err(Error::Invariant("complement is not a hyperbolic plane".into()));
    }
    // a x² + 2b xy + c y² = 0 has the root x/y = (1 − b)/a
    let coeffs = if a.is_zero() { vec![BigInt::one(), BigInt::zero()] } else { vec![BigInt::one() - &b, a.clone()] };
    let content = vector::content(&coeffs);
    let coeffs: Vec<BigInt> = coeffs.iter().map(|x| x / &content).collect();
    let t1 = basis.mul_vec(&coeffs)?;
    let pairings = g.mul_vec(&coeffs)?;
    let (one, w) = vector::bezout(&pairings);
    if !one.is_one() {
        return Err(Error::Invariant("isotropic vector is not primitive in the complement".into()));
    }
    let t2p = basis.mul_vec(&w)?;
    let half = lattice.square(&t2p) / 2;
    let t2: Vec<BigInt> = t2p.iter().zip(&t1).map(|(x, y)| x - &half * y).collect();
    debug_assert!(lattice.square(&t1).is_zero() && lattice.square(&t2).is_zero());
    debug_assert!(lattice.pair(&t1, &t2).is_one());
    Ok((t1, t2))
}

/// Integral `g`, `h` and a pair `(a, b)` with `ab = n` and
/// `φ = g ∘ (f_(a,b) ⊕ id) ∘ h`, for `φ` of `n`-cyclic type.
pub fn double_orbit_reduce(phi: &RationalIsometry) -> Result<DoubleOrbitReduction> {
    let lattice = phi.lattice().clone();
    require_reducible_lattice(&lattice)?;
    let rank = lattice.rank();
    let n = cyclic_type(phi).ok_or(Error::NotCyclicType)?;
    if n.is_one() {
        return DoubleOrbitReduction {
            left: phi.clone(),
            pair: UCanonicalPair::from_u64(1, 1)?,
            right: RationalIsometry::identity(lattice),
        }
        .verified(phi);
    }
    // I_φ = U S V with S = diag(1, …, 1, n); I_φ* / L is generated by y / n
    // where y is the last dual vector of the basis U
    let snf = smith_normal_form(&coinvariant_sublattice(phi));
    let row = snf.u_inverse().row(rank - 1);
    let g_inv = lattice.gram_rat().inverse()?.to_int().expect("unimodular");
    let y = g_inv.mul_vec(&row)?;
    let g = map_primitive_to_standard(&lattice, &y)?;

    // φ g⁻¹ maps the complement of the first plane integrally
    let phi1 = phi.compose(&g.inverse())?;
    let p = phi1
        .matrix()
        .submatrix(0..rank, 2..rank)
        .to_int()
        .ok_or_else(|| Error::Invariant("complement of U is not mapped integrally".into()))?;
    let t = integer_kernel(&p.transpose().mul_mat(lattice.gram())?);
    if t.cols() != 2 {
        return Err(Error::Invariant("orthogonal complement of the image is not of rank 2".into()));
    }
    let (t1, t2) = hyperbolic_basis(&lattice, &t)?;
    let h_inv = IntMatrix::from_columns(rank, &[t1, t2])?.hstack(&p)?;
    let h_inv = RationalIsometry::from_integral(lattice.clone(), &h_inv)?;
    let psi = h_inv.inverse().compose(&phi1)?;
    let m = psi.matrix();
    let rest = m.submatrix(2..rank, 2..rank);
    if !rest.is_identity() || !m.submatrix(0..2, 2..rank).is_zero() || !m.submatrix(2..rank, 0..2).is_zero() {
        return Err(Error::Invariant("reduced isometry is not supported on U".into()));
    }
    let f = RationalIsometry::new(u_lattice(), m.submatrix(0..2, 0..2))?;
    let (u1, pair, u2) = u_double_orbit_decompose(&f)?;
    let left = h_inv.compose(&embed_u_isometry_in(&u1, &lattice)?)?;
    let right = embed_u_isometry_in(&u2, &lattice)?.compose(&g)?;
    DoubleOrbitReduction { left, pair, right }.verified(phi)
}

fn sl2_inverse(m: &Mat2) -> Mat2 {
    [[m[1][1].clone(), -m[0][1].clone()], [-m[1][0].clone(), m[0][0].clone()]]
}

/// Rewrites a reduction with pair `(a, b)` into one with pair `(ab, 1)`.
///
/// In the model `U ⊕ U ≅ M₂(Z)`, `A ↦ [[x1, x2], [−y2, y1]]`, with
/// `diag(a, b) = P diag(1, n) Q` for `P, Q ∈ SL2(Z)`, one has
/// `f_(a,b)(A) = (1/n) P diag(1,n) Q A P diag(1,n) Q`, so `f_(a,b)` is
/// `f_(1,n)` between two integral isometries, and `f_(1,n)` is `f_(n,1)`
/// conjugated by the swap of `e1` and `e2`.
pub fn canonicalize_reduction(r: &DoubleOrbitReduction) -> Result<DoubleOrbitReduction> {
    if r.pair.b.is_one() {
        return Ok(r.clone());
    }
    let lattice = r.left.lattice().clone();
    require_reducible_lattice(&lattice)?;
    let rank = lattice.rank();
    let n = r.pair.product();
    let diag: Mat2 = [[r.pair.a.clone(), BigInt::zero()], [BigInt::zero(), r.pair.b.clone()]];
    let (p, q, c) = reduce_sl2(&diag);
    if !c.is_one() {
        return Err(Error::Invariant("coprime pair has nontrivial content".into()));
    }
    let (p1, q1) = (sl2_inverse(&p), sl2_inverse(&q));
    let outer = RationalIsometry::from_integral(lattice.clone(), &sl2_pair_action(rank, &p1, &q1))?;
    let inner = RationalIsometry::from_integral(lattice.clone(), &sl2_pair_action(rank, &q1, &p1))?;
    let swap = embed_u_isometry_in(&u_integral_isometries()[2], &lattice)?;
    let out = DoubleOrbitReduction {
        left: r.left.compose(&outer)?.compose(&swap)?,
        pair: UCanonicalPair::new(n, BigInt::one())?,
        right: swap.compose(&inner)?.compose(&r.right)?,
    };
    let original = r.recompose()?;
    out.verified(&original)
}

/// Integral `g`, `h` with `φ1 = g ∘ φ2 ∘ h`, or `None` when the cyclic types
/// differ.
pub fn same_double_orbit_witness(
    phi1: &RationalIsometry,
    phi2: &RationalIsometry,
) -> Result<Option<(RationalIsometry, RationalIsometry)>> {
    let r1 = canonicalize_reduction(&double_orbit_reduce(phi1)?)?;
    let r2 = canonicalize_reduction(&double_orbit_reduce(phi2)?)?;
    if r1.pair != r2.pair {
        return Ok(None);
    }
    let g = r1.left.compose(&r2.left.inverse())?;
    let h = r2.right.inverse().compose(&r1.right)?;
    if g.compose(phi2)?.compose(&h)?.matrix() != phi1.matrix() || !g.is_integral() || !h.is_integral() {
        return Err(Error::Invariant("double orbit witness does not recompose".into()));
    }
    Ok(Some((g, h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::int;
    use crate::isometry::reflection;
    use crate::lattices::{k3_lattice, K3_RANK};

    #[test]
    fn u_canonical_examples() {
        let id = RationalIsometry::identity(u_lattice());
        assert_eq!(u_double_orbit_canonical(&id).unwrap(), UCanonicalPair::from_u64(1, 1).unwrap());
        let f = u_diagonal_isometry(&int(3), &int(2)).unwrap();
        assert_eq!(u_double_orbit_canonical(&f).unwrap(), UCanonicalPair::from_u64(3, 2).unwrap());
        // swap, then scale the image of e1 by 2/5
        let g = RationalIsometry::new(
            u_lattice(),
            RatMatrix::from_i64_pairs(&[&[(0, 1), (5, 2)], &[(2, 5), (0, 1)]]),
        )
        .unwrap();
        assert_eq!(u_double_orbit_canonical(&g).unwrap(), UCanonicalPair::from_u64(5, 2).unwrap());
        for u1 in u_integral_isometries() {
            for u2 in u_integral_isometries() {
                let h = u1.compose(&f).unwrap().compose(&u2).unwrap();
                let (v1, pair, v2) = u_double_orbit_decompose(&h).unwrap();
                assert_eq!(pair, UCanonicalPair::from_u64(3, 2).unwrap());
                assert_eq!(v1.compose(&f).unwrap().compose(&v2).unwrap(), h);
            }
        }
    }

    #[test]
    fn congruence_examples() {
        let k3 = k3_lattice();
        let v = |d: i64| {
            let mut x = vec![BigInt::zero(); K3_RANK];
            x[0] = int(1);
            x[1] = int(d);
            x
        };
        assert_eq!(congruence_orbit_test(&k3, &v(6), &v(6), 6).unwrap(), Some(1));
        assert_eq!(congruence_orbit_test(&k3, &v(1), &v(2), 5).unwrap(), None);
        assert_eq!(congruence_orbit_test(&k3, &v(4), &v(1), 5).unwrap(), Some(2));
        let mut bad = v(0);
        bad[0] = int(2);
        assert_eq!(congruence_orbit_test(&k3, &bad, &v(1), 5), Err(Error::Imprimitive));
    }

    fn pair_isometry(a: u64, b: u64) -> RationalIsometry {
        embedded_pair_isometry(&UCanonicalPair::from_u64(a, b).unwrap(), &k3_lattice()).unwrap()
    }

    #[test]
    fn reduce_an_already_reduced_isometry() {
        let phi = pair_isometry(3, 2);
        let r = double_orbit_reduce(&phi).unwrap();
        assert_eq!(r.pair.product(), int(6));
        assert_eq!(r.recompose().unwrap(), phi);
        let c = canonicalize_reduction(&r).unwrap();
        assert_eq!(c.pair, UCanonicalPair::from_u64(6, 1).unwrap());
        assert_eq!(c.recompose().unwrap(), phi);
    }

    #[test]
    fn reduce_a_reflection() {
        let k3 = k3_lattice();
        let mut x = vec![BigInt::zero(); K3_RANK];
        x[2] = int(1);
        x[3] = int(5);
        x[10] = int(1);
        // (x, x) = 10 − 2 = 8 → cyclic type 4
        let r = double_orbit_reduce(&reflection(&k3, &x).unwrap()).unwrap();
        assert_eq!(r.pair.product(), int(4));
    }

    #[test]
    fn one_double_orbit_per_type() {
        let w = same_double_orbit_witness(&pair_isometry(6, 1), &pair_isometry(3, 2)).unwrap();
        assert!(w.is_some());
        assert!(same_double_orbit_witness(&pair_isometry(6, 1), &pair_isometry(5, 1)).unwrap().is_none());
    }

    #[test]
    fn integral_input_reduces_trivially() {
        let phi = RationalIsometry::identity(k3_lattice());
        let r = double_orbit_reduce(&phi).unwrap();
        assert_eq!(r.pair, UCanonicalPair::from_u64(1, 1).unwrap());
    }
}
