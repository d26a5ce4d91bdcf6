//! Sublattices of `Z^r` given by column bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{rat_from_int, vector, IntMatrix, RatMatrix};
use super::normal_form::{elementary_divisors, hermite_normal_form, hermite_normal_form_mod, smith_normal_form};
use crate::error::{Error, Result};

fn require_full_rank(a: &IntMatrix, what: &str) -> Result<()> {
    if a.rank() != a.rows() {
        return Err(Error::RankDeficient(format!(
            "{what}: rank {} in dimension {}",
            a.rank(),
            a.rows()
        )));
    }
    Ok(())
}

/// Integer matrix with the same column lattice as `D * m`, `D` the common
/// denominator, together with `D`.
fn clear_denominators(m: &RatMatrix) -> (IntMatrix, BigInt) {
    let den = m.common_denominator();
    let scaled = m.scale(&rat_from_int(&den));
    (scaled.to_int().expect("denominators cleared"), den)
}

/// Basis of the intersection of two full-rank column lattices in `Z^r`,
/// in Hermite normal form.
///
/// Computed through duality: `A ∩ B = (A* + B*)*` with respect to the
/// standard dot product.
pub fn intersect_column_lattices(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "lattices live in Z^{} and Z^{}",
            a.rows(),
            b.rows()
        )));
    }
    require_full_rank(a, "first lattice")?;
    require_full_rank(b, "second lattice")?;
    let a = hermite_normal_form(a).to_rat();
    let b = hermite_normal_form(b).to_rat();
    let a_dual = a.inverse()?.transpose();
    let b_dual = b.inverse()?.transpose();
    let (sum, den) = clear_denominators(&a_dual.hstack(&b_dual)?);
    let sum = hermite_normal_form(&sum).to_rat().scale(&BigRational::new(BigInt::one(), den));
    let meet = sum.inverse()?.transpose();
    let meet = meet
        .to_int()
        .ok_or_else(|| Error::Invariant("intersection basis is not integral".into()))?;
    Ok(hermite_normal_form(&meet))
}

/// Basis of the dual `M* = {λ ∈ L_Q : (λ, m) ∈ Z for all m ∈ M}` of the
/// lattice spanned by the columns of `basis`, inside the space with Gram
/// matrix `gram`. The output pairs with `basis` to the identity.
pub fn dual_basis(basis: &IntMatrix, gram: &IntMatrix) -> Result<RatMatrix> {
    let b = basis.to_rat();
    let m_gram = basis.pairing(gram, basis)?.to_rat();
    let inv = m_gram.inverse().map_err(|_| Error::Singular)?;
    b.mul_mat(&inv)
}

/// Basis of the saturated integer kernel `{x ∈ Z^c : A x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let cols: Vec<usize> = (rank..a.cols()).collect();
    snf.v_inverse().select_columns(&cols)
}

/// Basis (Hermite normal form) of `{x ∈ Z^c : M x ∈ Z^r}` for a rational
/// `r x c` matrix `M`.
///
/// With `M = A / D` this is `{x : A x ≡ 0 mod D}`; see [`kernel_mod`].
pub fn integral_preimage(m: &RatMatrix) -> IntMatrix {
    let (a, d) = clear_denominators(m);
    kernel_mod(&a, &d)
}

/// Basis (Hermite normal form) of `{x ∈ Z^c : A x ≡ 0 mod d}` for `d > 0`.
pub fn kernel_mod(a: &IntMatrix, d: &BigInt) -> IntMatrix {
    // the lattice contains d Z^c, so the elimination runs on residues mod d
    let (r, c) = (a.rows(), a.cols());
    if d.is_one() {
        return IntMatrix::identity(c);
    }
    // column j: r entries of A e_j followed by the c entries of e_j
    let mut cols: Vec<Vec<BigInt>> = (0..c)
        .map(|j| {
            let mut v: Vec<BigInt> = (0..r).map(|i| a.get(i, j).mod_floor(d)).collect();
            v.extend((0..c).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            v
        })
        .collect();
    for i in 0..r {
        let mut pivot: Option<usize> = None;
        for j in 0..c {
            if cols[j][i].is_zero() {
                continue;
            }
            let Some(p) = pivot else {
                pivot = Some(j);
                continue;
            };
            let e = cols[p][i].extended_gcd(&cols[j][i]);
            let (u, w) = (&cols[j][i] / &e.gcd, &cols[p][i] / &e.gcd);
            for t in i..r + c {
                let (x, y) = (&cols[p][t], &cols[j][t]);
                let np = (&e.x * x + &e.y * y).mod_floor(d);
                let nj = (&w * y - &u * x).mod_floor(d);
                cols[p][t] = np;
                cols[j][t] = nj;
            }
        }
        if let Some(p) = pivot {
            let k = d / cols[p][i].gcd(d);
            for t in i..r + c {
                cols[p][t] = (&cols[p][t] * &k).mod_floor(d);
            }
        }
    }
    let bottoms: Vec<Vec<BigInt>> = cols.into_iter().map(|v| v[r..].to_vec()).collect();
    hermite_normal_form_mod(&IntMatrix::from_columns(c, &bottoms).expect("column length"), d)
}

/// Elementary divisors `d_1 | ... | d_r` of `Z^r / span(basis)` for a
/// full-rank square basis.
pub fn quotient_divisors(basis: &IntMatrix) -> Result<Vec<BigInt>> {
    if !basis.is_square() {
        return Err(Error::Dimension("quotient of a non-square basis".into()));
    }
    require_full_rank(basis, "sublattice")?;
    Ok(elementary_divisors(basis))
}

/// Coordinates of `v` in the column basis, if `v` lies in the lattice.
pub fn lattice_coordinates(basis: &IntMatrix, v: &[BigRational]) -> Option<Vec<BigInt>> {
    let b = basis.to_rat();
    if !b.is_square() {
        return None;
    }
    let x = b.solve(v).ok()?;
    vector::to_int(&x)
}

/// Whether the two column bases span the same lattice.
pub fn same_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    hermite_normal_form(a) == hermite_normal_form(b)
}
