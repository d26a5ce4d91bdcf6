//! Rational isometries of a lattice, acting on column vectors.

mod decompose;
pub(crate) mod transitivity;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactlinalg::{integral_preimage, quotient_divisors, vector, IntMatrix, RatMatrix};
use crate::lattices::{k3_lattice, Lattice};

pub use decompose::{cartan_dieudonne, compose_reflections};
pub use transitivity::{
    eichler_transvection, embed_u_isometry, embed_u_isometry_in, is_signed,
    map_primitive_to_standard,
};

/// A rational matrix `M` with `Mᵀ G M = G`, acting as `v ↦ M v`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalIsometry {
    lattice: Lattice,
    matrix: RatMatrix,
}

impl fmt::Debug for RationalIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalIsometry({:?}, {:?})", self.lattice, self.matrix)
    }
}

fn preserves_form(gram: &RatMatrix, m: &RatMatrix) -> bool {
    m.pairing(gram, m).map(|g| &g == gram).unwrap_or(false)
}

impl RationalIsometry {
    pub fn new(lattice: Lattice, matrix: RatMatrix) -> Result<Self> {
        let n = lattice.rank();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!(
                "{}x{} matrix on a lattice of rank {n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !preserves_form(&lattice.gram_rat(), &matrix) {
            return Err(Error::NotIsometry("Mᵀ G M differs from G".into()));
        }
        Ok(Self { lattice, matrix })
    }

    pub fn from_integral(lattice: Lattice, matrix: &IntMatrix) -> Result<Self> {
        Self::new(lattice, matrix.to_rat())
    }

    /// Skips the form check; callers build `matrix` from known isometries.
    pub(crate) fn new_trusted(lattice: Lattice, matrix: RatMatrix) -> Self {
        debug_assert!(preserves_form(&lattice.gram_rat(), &matrix));
        Self { lattice, matrix }
    }

    pub fn identity(lattice: Lattice) -> Self {
        let n = lattice.rank();
        Self { lattice, matrix: RatMatrix::identity(n) }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.lattice.gram() != other.lattice.gram() {
            return Err(Error::Dimension("isometries of different lattices".into()));
        }
        let m = self.matrix.mul_mat(&other.matrix)?;
        Ok(Self::new_trusted(self.lattice.clone(), m))
    }

    /// `G⁻¹ Mᵀ G`.
    pub fn inverse(&self) -> Self {
        let g = self.lattice.gram_rat();
        let g_inv = g.inverse().expect("nondegenerate lattice");
        let m = &(&g_inv * &self.matrix.transpose()) * &g;
        Self::new_trusted(self.lattice.clone(), m)
    }

    pub fn apply(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_int(&self, v: &[BigInt]) -> Result<Vec<BigRational>> {
        self.matrix.mul_vec(&vector::to_rat(v))
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.is_integral()
    }

    pub fn to_integral(&self) -> Option<IntMatrix> {
        self.matrix.to_int()
    }

    pub fn det(&self) -> BigRational {
        self.matrix.det().expect("square matrix")
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// The finite group `L / I` recorded by its elementary divisors greater
/// than one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientStructure {
    pub elementary_divisors: Vec<BigInt>,
    pub index: BigInt,
}

impl QuotientStructure {
    pub fn from_divisors(divisors: impl IntoIterator<Item = BigInt>) -> Self {
        let elementary_divisors: Vec<BigInt> = divisors.into_iter().filter(|d| !d.is_one()).collect();
        let index = elementary_divisors.iter().product();
        Self { elementary_divisors, index }
    }

    pub fn is_cyclic(&self) -> bool {
        self.elementary_divisors.len() <= 1
    }

    /// Order of the group when it is cyclic.
    pub fn cyclic_order(&self) -> Option<BigInt> {
        self.is_cyclic().then(|| self.index.clone())
    }
}

pub(crate) fn reflection_matrix(gram: &RatMatrix, x: &[BigRational]) -> Result<RatMatrix> {
    let gx = gram.mul_vec(x)?;
    let q: BigRational = x.iter().zip(&gx).map(|(a, b)| a * b).sum();
    if q.is_zero() {
        return Err(Error::Isotropic);
    }
    let c = BigRational::from_integer(2.into()) / q;
    let n = x.len();
    Ok(RatMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { BigRational::one() } else { BigRational::zero() };
        delta - &c * &x[i] * &gx[j]
    }))
}

/// `r_x: v ↦ v − 2 (v,x)/(x,x) x` for primitive anisotropic `x`.
pub fn reflection(lattice: &Lattice, x: &[BigInt]) -> Result<RationalIsometry> {
    if x.len() != lattice.rank() {
        return Err(Error::Dimension(format!(
            "vector of length {} in a lattice of rank {}",
            x.len(),
            lattice.rank()
        )));
    }
    let c = vector::content(x);
    if c.is_zero() {
        return Err(Error::ZeroVector);
    }
    if !c.is_one() {
        return Err(Error::Imprimitive);
    }
    let m = reflection_matrix(&lattice.gram_rat(), &vector::to_rat(x))?;
    Ok(RationalIsometry::new_trusted(lattice.clone(), m))
}

/// Basis (Hermite normal form) of `I_φ = L ∩ φ⁻¹(L)`, the vectors with
/// integral image.
pub fn coinvariant_sublattice(phi: &RationalIsometry) -> IntMatrix {
    integral_preimage(&phi.matrix)
}

pub fn quotient_structure(phi: &RationalIsometry) -> QuotientStructure {
    let basis = coinvariant_sublattice(phi);
    QuotientStructure::from_divisors(quotient_divisors(&basis).expect("full-rank sublattice"))
}

/// `n` when `L / I_φ` is cyclic of order `n`; `1` for integral isometries.
pub fn cyclic_type(phi: &RationalIsometry) -> Option<BigInt> {
    quotient_structure(phi).cyclic_order()
}

/// A rational isometry of the K3 lattice from its matrix.
pub fn k3_isometry(matrix: RatMatrix) -> Result<RationalIsometry> {
    RationalIsometry::new(k3_lattice(), matrix)
}
