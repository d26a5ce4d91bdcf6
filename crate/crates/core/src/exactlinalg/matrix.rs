use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Ring elements a [`Matrix`] can hold.
///
/// Implemented for [`BigInt`] and [`BigRational`]; the reference-taking
/// methods avoid cloning arbitrary-precision values in inner loops.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn mul_ref(&self, other: &Self) -> Self;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);

    /// `a * b` for shapes already checked to agree.
    fn matrix_product(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        let mut out: Matrix<Self> = Matrix::zeros(a.rows, b.cols);
        for i in 0..a.rows {
            for k in 0..a.cols {
                let x = a.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let y = b.get(k, j);
                    if y.is_zero() {
                        continue;
                    }
                    out.get_mut(i, j).add_assign_ref(&x.mul_ref(y));
                }
            }
        }
        out
    }
}

impl Scalar for BigInt {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
}

impl Scalar for BigRational {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }

    /// Clears denominators per row of `a` and per column of `b`, so the inner
    /// sums run over integers and each entry is reduced once.
    fn matrix_product(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        let row_den: Vec<BigInt> = (0..a.rows)
            .map(|i| (0..a.cols).fold(BigInt::one(), |acc, k| acc.lcm(a.get(i, k).denom())))
            .collect();
        let col_den: Vec<BigInt> = (0..b.cols)
            .map(|j| (0..b.rows).fold(BigInt::one(), |acc, k| acc.lcm(b.get(k, j).denom())))
            .collect();
        let an = Matrix::from_fn(a.rows, a.cols, |i, k| {
            let x = a.get(i, k);
            x.numer() * (&row_den[i] / x.denom())
        });
        let bn = Matrix::from_fn(b.rows, b.cols, |k, j| {
            let y = b.get(k, j);
            y.numer() * (&col_den[j] / y.denom())
        });
        let prod = BigInt::matrix_product(&an, &bn);
        Matrix::from_fn(a.rows, b.cols, |i, j| {
            BigRational::new(prod.get(i, j).clone(), &row_den[i] * &col_den[j])
        })
    }
}

/// Dense row-major matrix.
///
/// Bases are stored column-wise: column `j` is the `j`-th basis vector, and a
/// linear map acts on column vectors as `v -> M v`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors. An empty list gives the 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.into_iter().flatten().collect();
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, columns: &[Vec<T>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != nrows) {
            return Err(Error::Dimension(format!(
                "column length differs from {nrows}"
            )));
        }
        Ok(Self::from_fn(nrows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { T::zero() })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Self::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul_mat(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(T::matrix_product(self, other))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc.add_assign_ref(&a.mul_ref(x));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn add_mat(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub_mat(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|x| x.mul_ref(k))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// `self^T * G * other`, the pairing matrix of two families of column vectors.
    pub fn pairing(&self, gram: &Self, other: &Self) -> Result<Self> {
        self.transpose().mul_mat(&gram.mul_mat(other)?)
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on shape mismatch; use [`Matrix::mul_mat`] for a checked product.
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.mul_mat(rhs).expect("matrix shape mismatch")
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_from_int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("ragged i64 rows")
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(rat_from_int)
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.to_rat().rank()
    }
}

impl RatMatrix {
    pub fn from_i64_pairs(rows: &[&[(i64, i64)]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect()).collect())
            .expect("ragged rational rows")
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// The integer matrix with the same entries, if every entry is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        self.is_integral().then(|| self.map(|x| x.to_integer()))
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Reduced row echelon form together with the pivot columns.
    fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let inv = a.get(r, c).recip();
            for j in 0..a.cols {
                let v = a.get(r, j) * &inv;
                a.set(r, j, v);
            }
            for i in 0..a.rows {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..a.cols {
                    let v = a.get(i, j) - &f * a.get(r, j);
                    a.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<BigRational> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                return Ok(BigRational::zero());
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c) / &piv;
                for j in c..n {
                    let v = a.get(i, j) - &f * a.get(c, j);
                    a.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n))?;
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(red.submatrix(0..n, n..2 * n))
    }

    /// Unique solution `x` of `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[BigRational]) -> Result<Vec<BigRational>> {
        self.inverse()?.mul_vec(b)
    }

    /// Basis (as columns) of the rational null space.
    pub fn kernel(&self) -> Self {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let columns: Vec<Vec<BigRational>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -red.get(r, f).clone();
                }
                v
            })
            .collect();
        Self::from_columns(self.cols, &columns).expect("kernel column length")
    }
}

/// Helpers on plain coordinate vectors.
pub mod vector {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};

    use super::{IntMatrix, RatMatrix};

    pub fn from_i64s(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
        v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
    }

    /// Integer vector if every entry is integral.
    pub fn to_int(v: &[BigRational]) -> Option<Vec<BigInt>> {
        v.iter().all(|x| x.is_integer()).then(|| v.iter().map(|x| x.to_integer()).collect())
    }

    /// Non-negative gcd of all entries; zero for the zero vector.
    pub fn content(v: &[BigInt]) -> BigInt {
        v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
    }

    /// Scales a nonzero rational vector to the primitive integer vector on the
    /// same ray.
    pub fn primitive_on_ray(v: &[BigRational]) -> Option<Vec<BigInt>> {
        let den = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
        let c = content(&ints);
        if c.is_zero() {
            return None;
        }
        Some(ints.into_iter().map(|x| x / &c).collect())
    }

    pub fn pair(gram: &IntMatrix, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let gb = gram.mul_vec(b).expect("pairing dimension");
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    pub fn pair_rat(gram: &RatMatrix, a: &[BigRational], b: &[BigRational]) -> BigRational {
        let gb = gram.mul_vec(b).expect("pairing dimension");
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    pub fn add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(a: &[BigRational], k: &BigRational) -> Vec<BigRational> {
        a.iter().map(|x| x * k).collect()
    }

    pub fn is_zero(a: &[BigRational]) -> bool {
        a.iter().all(Zero::is_zero)
    }

    /// Integer vector `w` with `a . w = gcd(a)`, the gcd taken non-negative.
    pub fn bezout(a: &[BigInt]) -> (BigInt, Vec<BigInt>) {
        let mut g = BigInt::zero();
        let mut w = vec![BigInt::zero(); a.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let e = g.extended_gcd(x);
            // e.x * g + e.y * x = e.gcd
            for wi in w.iter_mut() {
                *wi *= &e.x;
            }
            w[i] = e.y.clone();
            g = e.gcd;
        }
        if g.is_negative() {
            g = -g;
            for wi in w.iter_mut() {
                *wi = -wi.clone();
            }
        }
        (g, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let b = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(&a * &b, IntMatrix::from_i64_rows(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose().transpose(), a);
        assert!(a.mul_mat(&IntMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn determinants_agree() {
        let a = IntMatrix::from_i64_rows(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(a.det().unwrap(), int(4));
        assert_eq!(a.to_rat().det().unwrap(), rat(4, 1));
        let s = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(s.det().unwrap(), int(-1));
        assert_eq!(IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).det().unwrap(), int(0));
    }

    #[test]
    fn inverse_round_trip() {
        let a = RatMatrix::from_i64_pairs(&[&[(3, 2), (1, 1)], &[(0, 1), (2, 3)]]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert!(matches!(
            RatMatrix::from_i64_pairs(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]).inverse(),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn kernel_is_annihilated() {
        let a = IntMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6]]).to_rat();
        let k = a.kernel();
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).is_zero());
    }

    #[test]
    fn bezout_vector() {
        let a = vector::from_i64s(&[6, 10, 15]);
        let (g, w) = vector::bezout(&a);
        assert_eq!(g, int(1));
        let dot: BigInt = a.iter().zip(&w).map(|(x, y)| x * y).sum();
        assert_eq!(dot, g);
        let (g, _) = vector::bezout(&vector::from_i64s(&[-4, 0]));
        assert_eq!(g, int(4));
    }
}
