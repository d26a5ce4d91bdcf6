//! Integral lattices given by Gram matrices, and the standard even
//! unimodular ones: `U`, `E8`, `E8(-1)`, the K3 lattice and the Mukai lattice.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlinalg::{int, vector, IntMatrix, RatMatrix};

/// Rank of the K3 lattice `U^3 ⊕ E8(-1)^2`.
pub const K3_RANK: usize = 22;
/// Rank of the Mukai lattice `U^4 ⊕ E8(-1)^2`.
pub const MUKAI_RANK: usize = 24;

/// Coordinates `(e, f)` of the `i`-th hyperbolic summand in the K3 and Mukai
/// lattices, which start with their `U` summands.
pub const fn u_summand(i: usize) -> (usize, usize) {
    (2 * i, 2 * i + 1)
}

/// The Cartan matrix of `E8` (Bourbaki numbering): positive definite, even,
/// determinant 1.
const E8_CARTAN: [[i64; 8]; 8] = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
];

/// A free abelian group with a nondegenerate symmetric integral pairing.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    gram: Arc<IntMatrix>,
    label: Option<String>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "Lattice({l}, rank {})", self.rank()),
            None => write!(f, "Lattice({:?})", self.gram),
        }
    }
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::Precondition("Gram matrix must be symmetric".into()));
        }
        if gram.det()?.is_zero() {
            return Err(Error::Degenerate("Gram determinant is zero".into()));
        }
        Ok(Self {
            gram: Arc::new(gram),
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn gram_rat(&self) -> RatMatrix {
        self.gram.to_rat()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det().expect("square Gram matrix")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        vector::pair(&self.gram, a, b)
    }

    pub fn pair_rat(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        let gb = self.gram.to_rat().mul_vec(b).expect("pairing dimension");
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    pub fn square(&self, v: &[BigInt]) -> BigInt {
        self.pair(v, v)
    }

    /// `L(t)`: the same group with the pairing multiplied by `t`.
    pub fn rescale(&self, t: i64) -> Result<Self> {
        let mut l = Lattice::new(self.gram.scale(&int(t)))?;
        l.label = self.label.as_ref().map(|s| format!("{s}({t})"));
        Ok(l)
    }

    /// `(p, q)`: numbers of positive and negative squares.
    pub fn signature(&self) -> Result<(usize, usize)> {
        signature_of(&self.gram.to_rat())
    }

    fn check_len(&self, v: &[BigInt]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "vector of length {} in a lattice of rank {}",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }
}

/// Signature of a symmetric rational matrix by congruence diagonalization.
pub(crate) fn signature_of(gram: &RatMatrix) -> Result<(usize, usize)> {
    let n = gram.rows();
    let mut a = gram.clone();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a.get(k, k).is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a.get(i, i).is_zero()) {
                a.swap_rows(i, k);
                a.swap_cols(i, k);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                // row_k += row_j, col_k += col_j makes the pivot 2 a_kj
                for c in 0..n {
                    let v = a.get(k, c) + a.get(j, c);
                    a.set(k, c, v);
                }
                for r in 0..n {
                    let v = a.get(r, k) + a.get(r, j);
                    a.set(r, k, v);
                }
            } else {
                return Err(Error::Degenerate("Gram matrix is degenerate".into()));
            }
        }
        let piv = a.get(k, k).clone();
        if piv.is_zero() {
            return Err(Error::Degenerate("Gram matrix is degenerate".into()));
        }
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k) / &piv;
            for c in k..n {
                let v = a.get(i, c) - &f * a.get(k, c);
                a.set(i, c, v);
            }
            for r in k..n {
                let v = a.get(r, i) - &f * a.get(r, k);
                a.set(r, i, v);
            }
        }
    }
    Ok((pos, neg))
}

/// Integral coordinates of an element of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Self(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        Self(vector::from_i64s(coords))
    }

    pub fn zero(rank: usize) -> Self {
        Self(vec![BigInt::zero(); rank])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = BigInt::one();
        v
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn to_rat(&self) -> Vec<BigRational> {
        vector::to_rat(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> BigInt {
        vector::content(&self.0)
    }

    /// Places this vector at `offset` inside a vector of length `rank`.
    pub fn embed(&self, rank: usize, offset: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[offset..offset + self.0.len()].clone_from_slice(&self.0);
        v
    }
}

impl Deref for LatticeVector {
    type Target = [BigInt];
    fn deref(&self) -> &[BigInt] {
        &self.0
    }
}

impl From<Vec<BigInt>> for LatticeVector {
    fn from(v: Vec<BigInt>) -> Self {
        Self(v)
    }
}

/// Names accepted by [`standard_lattice`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardLattice {
    U,
    E8,
    E8Minus,
    K3,
    Mukai,
}

impl FromStr for StandardLattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(Self::U),
            "E8" => Ok(Self::E8),
            "E8_minus" | "E8(-1)" => Ok(Self::E8Minus),
            "K3" => Ok(Self::K3),
            "Mukai" => Ok(Self::Mukai),
            other => Err(Error::UnknownLattice(other.to_string())),
        }
    }
}

impl StandardLattice {
    pub fn build(self) -> Lattice {
        let u = || IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let e8 = || {
            let rows: Vec<&[i64]> = E8_CARTAN.iter().map(|r| r.as_slice()).collect();
            IntMatrix::from_i64_rows(&rows)
        };
        let (gram, label) = match self {
            Self::U => (u(), "U"),
            Self::E8 => (e8(), "E8"),
            Self::E8Minus => (-&e8(), "E8(-1)"),
            Self::K3 | Self::Mukai => {
                let copies = if self == Self::K3 { 3 } else { 4 };
                let mut g = u();
                for _ in 1..copies {
                    g = g.block_diag(&u());
                }
                let e8m = -&e8();
                g = g.block_diag(&e8m).block_diag(&e8m);
                (g, if self == Self::K3 { "K3" } else { "Mukai" })
            }
        };
        Lattice::new(gram).expect("standard Gram matrices are nondegenerate").with_label(label)
    }
}

/// One of `U`, `E8`, `E8_minus`, `K3` (`U^3 ⊕ E8(-1)^2`) or `Mukai`
/// (`U^4 ⊕ E8(-1)^2`). Summands appear in that order in the coordinates.
pub fn standard_lattice(name: &str) -> Result<Lattice> {
    Ok(name.parse::<StandardLattice>()?.build())
}

pub fn k3_lattice() -> Lattice {
    StandardLattice::K3.build()
}

pub fn u_lattice() -> Lattice {
    StandardLattice::U.build()
}

/// Orthogonal direct sum with block-diagonal Gram matrix.
pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    let label = match (a.label(), b.label()) {
        (Some(x), Some(y)) => Some(format!("{x}+{y}")),
        _ => None,
    };
    Lattice {
        gram: Arc::new(a.gram.block_diag(&b.gram)),
        label,
    }
}

pub fn signature(l: &Lattice) -> Result<(usize, usize)> {
    l.signature()
}

/// Whether the gcd of the coordinates of `v` is 1.
pub fn is_primitive(l: &Lattice, v: &[BigInt]) -> Result<bool> {
    l.check_len(v)?;
    let c = vector::content(v);
    if c.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(c.is_one())
}

/// `div(y) = gcd{(y, λ) : λ ∈ L}`, the gcd of the entries of `G y`.
pub fn divisibility(l: &Lattice, y: &[BigInt]) -> Result<BigInt> {
    l.check_len(y)?;
    if y.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    Ok(vector::content(&l.gram.mul_vec(y)?))
}

/// Number of leading hyperbolic planes: the largest `k` such that the first
/// `2k` coordinates carry `U^k` and are orthogonal to all others.
pub fn hyperbolic_prefix(l: &Lattice) -> usize {
    let g = l.gram();
    let n = l.rank();
    let mut k = 0;
    while 2 * k + 1 < n {
        let (e, f) = u_summand(k);
        let ok = (0..n).all(|j| {
            let want_e = if j == f { BigInt::one() } else { BigInt::zero() };
            let want_f = if j == e { BigInt::one() } else { BigInt::zero() };
            *g.get(e, j) == want_e && *g.get(f, j) == want_f
        });
        if !ok {
            break;
        }
        k += 1;
    }
    k
}

/// `e1 + d e2` in `U`: primitive of square `2d`.
pub fn u_vector_of_square(d: i64) -> LatticeVector {
    LatticeVector::from_i64s(&[1, d])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_lattices_are_even_unimodular() {
        for (name, rank, sig) in [
            ("U", 2, (1, 1)),
            ("E8", 8, (8, 0)),
            ("E8_minus", 8, (0, 8)),
            ("K3", 22, (3, 19)),
            ("Mukai", 24, (4, 20)),
        ] {
            let l = standard_lattice(name).unwrap();
            assert_eq!(l.rank(), rank, "{name}");
            assert!(l.is_even(), "{name}");
            assert!(l.is_unimodular(), "{name}");
            assert_eq!(l.signature().unwrap(), sig, "{name}");
        }
        assert_eq!(standard_lattice("U").unwrap().det(), int(-1));
        assert_eq!(standard_lattice("K3").unwrap().det(), int(-1));
        assert_eq!(standard_lattice("E8_minus").unwrap().det(), int(1));
        assert!(matches!(standard_lattice("D4"), Err(Error::UnknownLattice(_))));
    }

    #[test]
    fn direct_sums() {
        let u = u_lattice();
        let uu = direct_sum(&u, &u);
        assert_eq!(uu.rank(), 4);
        assert_eq!(uu.det(), int(1));
        let e8m = standard_lattice("E8_minus").unwrap();
        let k3 = direct_sum(&direct_sum(&direct_sum(&uu, &u), &e8m), &e8m);
        assert_eq!(k3.gram(), k3_lattice().gram());
        let empty = Lattice::new(IntMatrix::zeros(0, 0)).unwrap();
        assert_eq!(direct_sum(&u, &empty).gram(), u.gram());
    }

    #[test]
    fn rescale_negates_e8() {
        let e8 = standard_lattice("E8").unwrap();
        assert_eq!(e8.rescale(-1).unwrap().gram(), standard_lattice("E8_minus").unwrap().gram());
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            Lattice::new(IntMatrix::from_i64_rows(&[&[2, 2], &[2, 2]])),
            Err(Error::Degenerate(_))
        ));
        assert!(Lattice::new(IntMatrix::from_i64_rows(&[&[0, 1], &[2, 0]])).is_err());
        assert!(signature_of(&IntMatrix::from_i64_rows(&[&[0, 0], &[0, 1]]).to_rat()).is_err());
    }

    #[test]
    fn primitivity_and_divisibility() {
        let u = u_lattice();
        assert!(is_primitive(&u, &vector::from_i64s(&[1, 0])).unwrap());
        assert!(!is_primitive(&u, &vector::from_i64s(&[2, 4])).unwrap());
        assert_eq!(is_primitive(&u, &vector::from_i64s(&[0, 0])), Err(Error::ZeroVector));
        for d in -10..=10 {
            assert!(is_primitive(&u, &u_vector_of_square(d)).unwrap());
        }
        assert_eq!(divisibility(&u, &vector::from_i64s(&[1, 0])).unwrap(), int(1));
        assert_eq!(divisibility(&u, &vector::from_i64s(&[3, 0])).unwrap(), int(3));
        assert!(divisibility(&u, &vector::from_i64s(&[1])).is_err());
    }

    #[test]
    fn hyperbolic_prefixes() {
        assert_eq!(hyperbolic_prefix(&k3_lattice()), 3);
        assert_eq!(hyperbolic_prefix(&standard_lattice("Mukai").unwrap()), 4);
        assert_eq!(hyperbolic_prefix(&u_lattice()), 1);
        assert_eq!(hyperbolic_prefix(&standard_lattice("E8").unwrap()), 0);
    }

    #[test]
    fn u_vectors_have_prescribed_square() {
        let u = u_lattice();
        assert_eq!(u.square(&u_vector_of_square(1)), int(2));
        assert_eq!(u.square(&u_vector_of_square(0)), int(0));
        assert_eq!(u.square(&u_vector_of_square(-3)), int(-6));
    }
}
