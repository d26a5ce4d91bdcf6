//! Integral isometries moving primitive vectors into the first hyperbolic
//! plane, block embeddings from `U`, and the orientation character.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::RationalIsometry;
use crate::error::{Error, Result};
use crate::exactlinalg::{vector, IntMatrix, RatMatrix};
use crate::lattices::{hyperbolic_prefix, k3_lattice, u_summand, Lattice};

/// `E(f,w): v ↦ v + (v,f) w − (v,w) f − ½ (w,w)(v,f) f` for isotropic `f`
/// orthogonal to `w`.
pub fn eichler_transvection(lattice: &Lattice, f: &[BigInt], w: &[BigInt]) -> Result<RationalIsometry> {
    let n = lattice.rank();
    if f.len() != n || w.len() != n {
        return Err(Error::Dimension("transvection vectors must match the lattice rank".into()));
    }
    if !lattice.square(f).is_zero() {
        return Err(Error::Precondition("(f,f) must vanish".into()));
    }
    if !lattice.pair(f, w).is_zero() {
        return Err(Error::Precondition("(f,w) must vanish".into()));
    }
    let gf = lattice.gram().mul_vec(f)?;
    let gw = lattice.gram().mul_vec(w)?;
    let half_ww = BigRational::new(lattice.square(w), BigInt::from(2));
    let m = RatMatrix::from_fn(n, n, |i, j| {
        // column j is the image of e_j; (e_j, f) = (G f)_j
        let delta = if i == j { BigInt::one() } else { BigInt::zero() };
        let int_part = delta + &gf[j] * &w[i] - &gw[j] * &f[i];
        BigRational::from_integer(int_part) - &half_ww * BigRational::from_integer(&gf[j] * &f[i])
    });
    Ok(RationalIsometry::new_trusted(lattice.clone(), m))
}

fn transvection_int(lattice: &Lattice, f: &[BigInt], w: &[BigInt]) -> IntMatrix {
    eichler_transvection(lattice, f, w)
        .expect("transvection preconditions")
        .to_integral()
        .expect("transvections of an even lattice are integral")
}

pub(crate) type Mat2 = [[BigInt; 2]; 2];

fn mat2_identity() -> Mat2 {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// `E ∈ SL2(Z)` with `E (a, c)ᵀ = (g, 0)ᵀ`, `g = gcd(a, c) ≥ 0`; a plain
/// elimination when `a` divides `c`.
fn clear_pair(a: &BigInt, c: &BigInt) -> Mat2 {
    if !a.is_zero() && (c % a).is_zero() && a.is_positive() {
        return [[BigInt::one(), BigInt::zero()], [-(c / a), BigInt::one()]];
    }
    let e = a.extended_gcd(c);
    let (g, x, y) = if e.gcd.is_negative() { (-e.gcd, -e.x, -e.y) } else { (e.gcd, e.x, e.y) };
    [[x, y], [-(c / &g), a / &g]]
}

fn transpose2(m: &Mat2) -> Mat2 {
    [[m[0][0].clone(), m[1][0].clone()], [m[0][1].clone(), m[1][1].clone()]]
}

/// `P, Q ∈ SL2(Z)` and `c ≥ 0`, `m` with `P A Q = diag(c, m)` and `c | m`.
pub(crate) fn reduce_sl2(a: &Mat2) -> (Mat2, Mat2, BigInt) {
    let mut a = a.clone();
    let mut p = mat2_identity();
    let mut q = mat2_identity();
    loop {
        if !a[1][0].is_zero() || a[0][0].is_negative() {
            let e = clear_pair(&a[0][0], &a[1][0]);
            a = mat2_mul(&e, &a);
            p = mat2_mul(&e, &p);
        }
        if !a[0][1].is_zero() {
            let e = transpose2(&clear_pair(&a[0][0], &a[0][1]));
            a = mat2_mul(&a, &e);
            q = mat2_mul(&q, &e);
        }
        if !a[1][0].is_zero() {
            continue;
        }
        let divides = if a[0][0].is_zero() { a[1][1].is_zero() } else { (&a[1][1] % &a[0][0]).is_zero() };
        if divides {
            break;
        }
        let e: Mat2 = [[BigInt::one(), BigInt::one()], [BigInt::zero(), BigInt::one()]];
        a = mat2_mul(&e, &a);
        p = mat2_mul(&e, &p);
    }
    (p, q, a[0][0].clone())
}

/// Coordinates `(x1, y1, x2, y2)` of `U ⊕ U` as the matrix
/// `[[x1, x2], [−y2, y1]]`, whose determinant is half the square.
fn to_mat2(v: &[BigInt]) -> Mat2 {
    [[v[0].clone(), v[2].clone()], [-v[3].clone(), v[1].clone()]]
}

fn from_mat2(a: &Mat2) -> [BigInt; 4] {
    [a[0][0].clone(), a[1][1].clone(), a[0][1].clone(), -a[1][0].clone()]
}

/// The isometry `A ↦ P A Q` of the first two hyperbolic planes, identity
/// on the rest.
pub(crate) fn sl2_pair_action(n: usize, p: &Mat2, q: &Mat2) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for j in 0..4 {
        let mut e = vec![BigInt::zero(); 4];
        e[j] = BigInt::one();
        let img = from_mat2(&mat2_mul(&mat2_mul(p, &to_mat2(&e)), q));
        for (i, x) in img.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m
}

/// Integral `g` with `g(y) = e1 + d e2` in the first hyperbolic plane,
/// `(y,y) = 2d`. The lattice must be even unimodular and start with two
/// hyperbolic planes (the K3 and Mukai lattices do).
pub fn map_primitive_to_standard(lattice: &Lattice, y: &[BigInt]) -> Result<RationalIsometry> {
    let n = lattice.rank();
    if y.len() != n {
        return Err(Error::Dimension(format!("vector of length {} in rank {n}", y.len())));
    }
    if hyperbolic_prefix(lattice) < 2 || !lattice.is_unimodular() || !lattice.is_even() {
        return Err(Error::Precondition(
            "lattice must be even unimodular with two leading hyperbolic planes".into(),
        ));
    }
    let c = vector::content(y);
    if c.is_zero() {
        return Err(Error::ZeroVector);
    }
    if !c.is_one() {
        return Err(Error::Imprimitive);
    }
    let d = lattice.square(y) / BigInt::from(2);
    let mut g = IntMatrix::identity(n);
    let mut cur = y.to_vec();
    let apply = |step: IntMatrix, g: &mut IntMatrix, cur: &mut Vec<BigInt>| {
        *cur = step.mul_vec(cur).expect("square");
        *g = &step * g;
    };

    let (p, q, content) = reduce_sl2(&to_mat2(&cur[..4]));
    apply(sl2_pair_action(n, &p, &q), &mut g, &mut cur);
    if !content.is_one() {
        // cur = c e1 + m f1 + v with v in the complement of U ⊕ U; pick w
        // there with (v, w) = content(v) and shear along e of the second plane
        let mut w = vec![BigInt::zero(); n];
        let gv = lattice.gram().mul_vec(&{
            let mut v = cur.clone();
            v[..4].iter_mut().for_each(|x| *x = BigInt::zero());
            v
        })?;
        let (_, coeffs) = vector::bezout(&gv[4..]);
        w[4..].clone_from_slice(&coeffs);
        let mut f = vec![BigInt::zero(); n];
        f[u_summand(1).0] = BigInt::one();
        apply(transvection_int(lattice, &f, &w), &mut g, &mut cur);
        let (p, q, content) = reduce_sl2(&to_mat2(&cur[..4]));
        if !content.is_one() {
            return Err(Error::Invariant("hyperbolic part did not become primitive".into()));
        }
        apply(sl2_pair_action(n, &p, &q), &mut g, &mut cur);
    }
    // cur = e1 + m f1 + v; E(f1, −v) clears v
    let (_, f1) = u_summand(0);
    let mut f = vec![BigInt::zero(); n];
    f[f1] = BigInt::one();
    let mut w: Vec<BigInt> = cur.iter().map(|x| -x).collect();
    w[..4].iter_mut().for_each(|x| *x = BigInt::zero());
    if w.iter().any(|x| !x.is_zero()) {
        apply(transvection_int(lattice, &f, &w), &mut g, &mut cur);
    }
    let mut target = vec![BigInt::zero(); n];
    target[0] = BigInt::one();
    target[1] = d;
    if cur != target {
        return Err(Error::Invariant("primitive vector was not moved to e1 + d e2".into()));
    }
    RationalIsometry::from_integral(lattice.clone(), &g)
}

/// `f ⊕ id` on a lattice whose first summand is `U`.
pub fn embed_u_isometry_in(f: &RationalIsometry, lattice: &Lattice) -> Result<RationalIsometry> {
    if f.lattice().rank() != 2 || f.lattice().gram() != crate::lattices::u_lattice().gram() {
        return Err(Error::Precondition("isometry must act on U".into()));
    }
    if hyperbolic_prefix(lattice) < 1 {
        return Err(Error::Precondition("target lattice must start with U".into()));
    }
    let rest = RatMatrix::identity(lattice.rank() - 2);
    Ok(RationalIsometry::new_trusted(lattice.clone(), f.matrix().block_diag(&rest)))
}

/// `f ⊕ id` on the K3 lattice.
pub fn embed_u_isometry(f: &RationalIsometry) -> Result<RationalIsometry> {
    embed_u_isometry_in(f, &k3_lattice())
}

/// Whether `φ` preserves the orientation of the positive 3-space spanned by
/// `e + f` in each of the first three hyperbolic planes.
pub fn is_signed(phi: &RationalIsometry) -> Result<bool> {
    let lattice = phi.lattice();
    if hyperbolic_prefix(lattice) < 3 {
        return Err(Error::Precondition("lattice must start with three hyperbolic planes".into()));
    }
    let n = lattice.rank();
    let frame: Vec<Vec<BigRational>> = (0..3)
        .map(|k| {
            let (e, f) = u_summand(k);
            let mut v = vec![BigRational::zero(); n];
            v[e] = BigRational::one();
            v[f] = BigRational::one();
            v
        })
        .collect();
    let gram = lattice.gram_rat();
    let images: Vec<Vec<BigRational>> = frame.iter().map(|v| phi.apply(v)).collect::<Result<_>>()?;
    let m = RatMatrix::from_fn(3, 3, |i, j| vector::pair_rat(&gram, &images[i], &frame[j]));
    let det = m.det()?;
    if det.is_zero() {
        return Err(Error::Invariant("positive 3-space projects degenerately".into()));
    }
    Ok(det.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::{int, rat};
    use crate::isometry::{cyclic_type, reflection};
    use crate::lattices::{direct_sum, u_lattice, K3_RANK};

    fn unit(n: usize, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v
    }

    #[test]
    fn transvection_examples() {
        let uu = direct_sum(&u_lattice(), &u_lattice());
        let zero = vec![BigInt::zero(); 4];
        let e1 = unit(4, 0);
        assert!(eichler_transvection(&uu, &e1, &zero).unwrap().is_identity());

        // E(e1, e1' + e2') sends e2 to e2 + e1' + e2' − e1
        let w = vector::from_i64s(&[0, 0, 1, 1]);
        let t = eichler_transvection(&uu, &e1, &w).unwrap();
        assert_eq!(t.apply_int(&unit(4, 1)).unwrap(), vector::to_rat(&vector::from_i64s(&[-1, 1, 1, 1])));
        assert!(RationalIsometry::new(uu.clone(), t.matrix().clone()).is_ok());
        let back = eichler_transvection(&uu, &e1, &vector::from_i64s(&[0, 0, -1, -1])).unwrap();
        assert!(t.compose(&back).unwrap().is_identity());
        assert!(t.is_integral());
        assert_eq!(t.det(), rat(1, 1));
        assert_eq!(t.apply_int(&e1).unwrap(), vector::to_rat(&e1));

        assert!(eichler_transvection(&uu, &vector::from_i64s(&[1, 1, 0, 0]), &zero).is_err());
        assert!(eichler_transvection(&uu, &e1, &unit(4, 1)).is_err());
    }

    #[test]
    fn sl2_reduction() {
        for entries in [[4i64, 6, 10, 3], [0, 0, 0, 5], [0, 0, 0, 0], [6, 0, 0, 4], [-3, 9, 12, 0]] {
            let a: Mat2 = [
                [int(entries[0]), int(entries[1])],
                [int(entries[2]), int(entries[3])],
            ];
            let (p, q, c) = reduce_sl2(&a);
            let d = mat2_mul(&mat2_mul(&p, &a), &q);
            assert!(d[0][1].is_zero() && d[1][0].is_zero());
            assert_eq!(d[0][0], c);
            assert_eq!(c, vector::content(&vector::from_i64s(&entries)));
            assert_eq!(&p[0][0] * &p[1][1] - &p[0][1] * &p[1][0], int(1));
            assert_eq!(&q[0][0] * &q[1][1] - &q[0][1] * &q[1][0], int(1));
        }
    }

    fn check_standardizes(y: &[BigInt]) {
        let k3 = k3_lattice();
        let g = map_primitive_to_standard(&k3, y).unwrap();
        assert!(g.is_integral());
        let d = k3.square(y) / 2;
        let mut target = vec![BigInt::zero(); K3_RANK];
        target[0] = int(1);
        target[1] = d;
        assert_eq!(g.apply_int(y).unwrap(), vector::to_rat(&target));
    }

    #[test]
    fn standardization_examples() {
        let k3 = k3_lattice();
        let mut y = vec![BigInt::zero(); K3_RANK];
        y[0] = int(1);
        y[1] = int(4);
        assert!(map_primitive_to_standard(&k3, &y).unwrap().is_identity());
        check_standardizes(&unit(K3_RANK, 1));
        let mut y = vec![BigInt::zero(); K3_RANK];
        y[3] = int(1);
        y[2] = int(1);
        check_standardizes(&y);
        let mut y = vec![BigInt::zero(); K3_RANK];
        y[0] = int(3);
        y[1] = int(6);
        y[9] = int(2);
        y[4] = int(5);
        check_standardizes(&y);
        check_standardizes(&unit(K3_RANK, 20));
        let mut y = vec![BigInt::zero(); K3_RANK];
        y[0] = int(2);
        assert_eq!(map_primitive_to_standard(&k3, &y).unwrap_err(), Error::Imprimitive);
    }

    #[test]
    fn embedding_preserves_cyclic_type() {
        let f = RationalIsometry::new(
            u_lattice(),
            RatMatrix::from_i64_pairs(&[&[(3, 2), (0, 1)], &[(0, 1), (2, 3)]]),
        )
        .unwrap();
        let ft = embed_u_isometry(&f).unwrap();
        assert_eq!(cyclic_type(&ft), Some(int(6)));
        assert!(embed_u_isometry(&RationalIsometry::identity(u_lattice())).unwrap().is_identity());
        let minus = RationalIsometry::new(u_lattice(), -&RatMatrix::identity(2)).unwrap();
        let mt = embed_u_isometry(&minus).unwrap();
        assert!(mt.is_integral());
        assert_eq!(cyclic_type(&mt), Some(int(1)));
    }

    #[test]
    fn signedness() {
        let k3 = k3_lattice();
        assert!(is_signed(&RationalIsometry::identity(k3.clone())).unwrap());
        let minus = RationalIsometry::new(k3.clone(), -&RatMatrix::identity(K3_RANK)).unwrap();
        assert!(!is_signed(&minus).unwrap());
        let mut x = vec![BigInt::zero(); K3_RANK];
        x[0] = int(1);
        x[1] = int(1);
        assert!(!is_signed(&reflection(&k3, &x).unwrap()).unwrap());
        let mut x = vec![BigInt::zero(); K3_RANK];
        x[0] = int(1);
        x[1] = int(-1);
        assert!(is_signed(&reflection(&k3, &x).unwrap()).unwrap());
        assert!(is_signed(&RationalIsometry::identity(u_lattice())).is_err());
    }
}
