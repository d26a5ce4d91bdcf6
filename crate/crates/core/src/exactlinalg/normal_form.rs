use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `A = U * D * V` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ... `, all `d_i >= 0`.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries `d_1, ..., d_min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Number of nonzero elementary divisors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// `U^{-1}`, maintained during elimination.
    pub fn u_inverse(&self) -> &IntMatrix {
        &self.u_inv
    }

    /// `V^{-1}`, maintained during elimination.
    pub fn v_inverse(&self) -> &IntMatrix {
        &self.v_inv
    }
}

/// Working state: `a = p * A * q`, `A = u * a * v`, with `p = u^{-1}` and
/// `q = v^{-1}`.
struct Elimination {
    /// When false only `a` is updated.
    track: bool,
    a: IntMatrix,
    u: IntMatrix,
    p: IntMatrix,
    v: IntMatrix,
    q: IntMatrix,
}

impl Elimination {
    /// Replaces rows `(i, j)` of `a` by `t * (row_i; row_j)` for `t` with
    /// determinant `+-1`, given row-major as `[t00, t01, t10, t11]`.
    fn rows2(&mut self, i: usize, j: usize, t: [&BigInt; 4]) {
        combine_rows(&mut self.a, i, j, t);
        if !self.track {
            return;
        }
        combine_rows(&mut self.p, i, j, t);
        // u <- u * t^{-1}: t^{-1} = det * [t11, -t01; -t10, t00]
        let det = t[0] * t[3] - t[1] * t[2];
        let (n0, n1, n2, n3) = (t[3] * &det, -(t[1] * &det), -(t[2] * &det), t[0] * &det);
        combine_cols(&mut self.u, i, j, [&n0, &n1, &n2, &n3]);
    }

    /// Replaces columns `(i, j)` of `a` by `(col_i, col_j) * t`.
    fn cols2(&mut self, i: usize, j: usize, t: [&BigInt; 4]) {
        combine_cols(&mut self.a, i, j, t);
        if !self.track {
            return;
        }
        combine_cols(&mut self.q, i, j, t);
        let det = t[0] * t[3] - t[1] * t[2];
        let (n0, n1, n2, n3) = (t[3] * &det, -(t[1] * &det), -(t[2] * &det), t[0] * &det);
        combine_rows(&mut self.v, i, j, [&n0, &n1, &n2, &n3]);
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap_rows(i, j);
            if !self.track {
                return;
            }
            self.p.swap_rows(i, j);
            self.u.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap_cols(i, j);
            if !self.track {
                return;
            }
            self.q.swap_cols(i, j);
            self.v.swap_rows(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.a.cols() {
            let x = -self.a.get(i, j).clone();
            self.a.set(i, j, x);
        }
        if !self.track {
            return;
        }
        for j in 0..self.p.cols() {
            let x = -self.p.get(i, j).clone();
            self.p.set(i, j, x);
        }
        for r in 0..self.u.rows() {
            let x = -self.u.get(r, i).clone();
            self.u.set(r, i, x);
        }
    }
}

/// `(row_i; row_j) <- t * (row_i; row_j)`.
fn combine_rows(m: &mut IntMatrix, i: usize, j: usize, t: [&BigInt; 4]) {
    for c in 0..m.cols() {
        let (x, y) = (m.get(i, c).clone(), m.get(j, c).clone());
        if x.is_zero() && y.is_zero() {
            continue;
        }
        m.set(i, c, t[0] * &x + t[1] * &y);
        m.set(j, c, t[2] * &x + t[3] * &y);
    }
}

/// `(col_i, col_j) <- (col_i, col_j) * t`.
fn combine_cols(m: &mut IntMatrix, i: usize, j: usize, t: [&BigInt; 4]) {
    for r in 0..m.rows() {
        let (x, y) = (m.get(r, i).clone(), m.get(r, j).clone());
        if x.is_zero() && y.is_zero() {
            continue;
        }
        m.set(r, i, &x * t[0] + &y * t[2]);
        m.set(r, j, &x * t[1] + &y * t[3]);
    }
}

/// Unimodular 2x2 `t` with `t * (a; b) = (g; 0)`, `g = gcd(a, b)` up to sign.
fn bezout_transform(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    if b.is_zero() {
        return [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
    }
    if a.is_zero() {
        return [BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero()];
    }
    if (b % a).is_zero() {
        // plain row subtraction keeps entries small
        return [BigInt::one(), BigInt::zero(), -(b / a), BigInt::one()];
    }
    let e = a.extended_gcd(b);
    [e.x, e.y, -(b / &e.gcd), a / &e.gcd]
}

/// Smith normal form by Bezout elimination over arbitrary-precision integers.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (r, c) = (a.rows(), a.cols());
    let st = Elimination {
        track: true,
        a: a.clone(),
        u: IntMatrix::identity(r),
        p: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
        q: IntMatrix::identity(c),
    };
    finish(eliminate(st))
}

/// Diagonal of the Smith normal form, without the transforms.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    // a row or column whose only nonzero entry is a unit splits off a 1
    let (mut rows, mut cols): (Vec<usize>, Vec<usize>) = ((0..a.rows()).collect(), (0..a.cols()).collect());
    let mut ones = 0;
    loop {
        let lone_in_row = rows.iter().enumerate().find_map(|(ri, &i)| {
            let mut nz = cols.iter().enumerate().filter(|(_, &j)| !a.get(i, j).is_zero());
            match (nz.next(), nz.next()) {
                (Some((cj, &j)), None) if a.get(i, j).abs().is_one() => Some((ri, cj)),
                _ => None,
            }
        });
        let lone = lone_in_row.or_else(|| {
            cols.iter().enumerate().find_map(|(cj, &j)| {
                let mut nz = rows.iter().enumerate().filter(|(_, &i)| !a.get(i, j).is_zero());
                match (nz.next(), nz.next()) {
                    (Some((ri, &i)), None) if a.get(i, j).abs().is_one() => Some((ri, cj)),
                    _ => None,
                }
            })
        });
        let Some((ri, cj)) = lone else { break };
        rows.remove(ri);
        cols.remove(cj);
        ones += 1;
    }
    let rest = IntMatrix::from_fn(rows.len(), cols.len(), |i, j| a.get(rows[i], cols[j]).clone());
    let empty = IntMatrix::zeros(0, 0);
    let st = Elimination {
        track: false,
        a: rest,
        u: empty.clone(),
        p: empty.clone(),
        v: empty.clone(),
        q: empty,
    };
    let d = eliminate(st).a;
    let mut out = vec![BigInt::one(); ones];
    out.extend((0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()));
    out
}

fn eliminate(mut st: Elimination) -> Elimination {
    let (r, c) = (st.a.rows(), st.a.cols());
    for t in 0..r.min(c) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = st.a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < st.a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return st;
            };
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);

            for i in t + 1..r {
                if st.a.get(i, t).is_zero() {
                    continue;
                }
                let tr = bezout_transform(st.a.get(t, t), st.a.get(i, t));
                st.rows2(t, i, [&tr[0], &tr[1], &tr[2], &tr[3]]);
            }
            for j in t + 1..c {
                if st.a.get(t, j).is_zero() {
                    continue;
                }
                let tr = bezout_transform(st.a.get(t, t), st.a.get(t, j));
                // column version: (col_t, col_j) * tr^T
                st.cols2(t, j, [&tr[0], &tr[2], &tr[1], &tr[3]]);
            }
            if (t + 1..r).any(|i| !st.a.get(i, t).is_zero()) {
                continue;
            }
            let piv = st.a.get(t, t).clone();
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !(st.a.get(i, j) % &piv).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    let zero = BigInt::zero();
                    // row_t += row_i
                    st.rows2(t, i, [&one, &one, &zero, &one]);
                }
                None => break,
            }
        }
        if st.a.get(t, t).is_negative() {
            st.negate_row(t);
        }
    }
    st
}

fn finish(st: Elimination) -> SnfDecomposition {
    SnfDecomposition {
        u: st.u,
        d: st.a,
        v: st.v,
        u_inv: st.p,
        v_inv: st.q,
    }
}

/// Column-style Hermite normal form of the lattice spanned by the columns.
///
/// The result has one column per pivot, is lower triangular in the pivot
/// rows, has positive pivots, and entries left of a pivot lie in
/// `[0, pivot)`. Two generating sets span the same lattice iff their forms
/// are equal.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    if a.is_square() && a.rows() > 0 {
        // a nonsingular basis spans a lattice containing det · Z^n
        let det = a.det().expect("square").abs();
        if !det.is_zero() {
            return hermite_normal_form_mod(a, &det);
        }
    }
    hermite_by_elimination(a)
}

fn hermite_by_elimination(a: &IntMatrix) -> IntMatrix {
    let (r, m) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut k = 0;
    for i in 0..r {
        if k == m {
            break;
        }
        for j in k + 1..m {
            if h.get(i, j).is_zero() {
                continue;
            }
            let tr = bezout_transform(h.get(i, k), h.get(i, j));
            combine_cols(&mut h, k, j, [&tr[0], &tr[2], &tr[1], &tr[3]]);
        }
        if h.get(i, k).is_zero() {
            continue;
        }
        if h.get(i, k).is_negative() {
            for row in 0..r {
                let x = -h.get(row, k).clone();
                h.set(row, k, x);
            }
        }
        let piv = h.get(i, k).clone();
        for j in 0..k {
            let f = h.get(i, j).div_floor(&piv);
            if f.is_zero() {
                continue;
            }
            for row in i..r {
                let x = h.get(row, j) - &f * h.get(row, k);
                h.set(row, j, x);
            }
        }
        k += 1;
    }
    h.select_columns(&(0..k).collect::<Vec<_>>())
}

/// Hermite normal form of `span(gens) + d Z^m` for `d > 0`, with all
/// arithmetic on residues mod `d`.
pub(crate) fn hermite_normal_form_mod(gens: &IntMatrix, d: &BigInt) -> IntMatrix {
    let m = gens.rows();
    let r = d;
    let mut cols: Vec<Vec<BigInt>> =
        gens.columns().into_iter().map(|c| c.iter().map(|x| x.mod_floor(r)).collect()).collect();
    let mut w: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut piv = cols.pop().unwrap_or_else(|| vec![BigInt::zero(); m]);
        for col in cols.iter_mut() {
            if col[i].is_zero() {
                continue;
            }
            let e = piv[i].extended_gcd(&col[i]);
            let (a, b) = (&piv[i] / &e.gcd, &col[i] / &e.gcd);
            for t in i..m {
                let (x, y) = (&piv[t], &col[t]);
                let np = (&e.x * x + &e.y * y).mod_floor(r);
                let nc = (&a * y - &b * x).mod_floor(r);
                piv[t] = np;
                col[t] = nc;
            }
        }
        // pair the pivot with d e_i; the partner has a zero in row i
        let e = piv[i].extended_gcd(r);
        let partner = r / &e.gcd;
        let rest: Vec<BigInt> = (0..m).map(|t| if t > i { (-&partner * &piv[t]).mod_floor(r) } else { BigInt::zero() }).collect();
        if rest.iter().any(|x| !x.is_zero()) {
            cols.push(rest);
        }
        let mut wi: Vec<BigInt> = (0..m).map(|t| if t >= i { (&e.x * &piv[t]).mod_floor(r) } else { BigInt::zero() }).collect();
        if wi[i].is_zero() {
            wi[i] = r.clone();
        }
        for wl in w.iter_mut() {
            let q = wl[i].div_floor(&wi[i]);
            if !q.is_zero() {
                for t in i..m {
                    let v = &q * &wi[t];
                    wl[t] -= v;
                }
            }
        }
        w.push(wi);
    }
    IntMatrix::from_columns(m, &w).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::matrix::int;

    #[test]
    fn modular_hermite_form_matches_elimination() {
        let mut state = 11u64;
        let mut next = |m: i64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as i64).rem_euclid(m)
        };
        let mut checked = 0;
        while checked < 300 {
            let n = 1 + next(6) as usize;
            let a = IntMatrix::from_fn(n, n, |_, _| int(next(41) - 20));
            let det = a.det().unwrap();
            if det.is_zero() {
                continue;
            }
            assert_eq!(hermite_normal_form_mod(&a, &det.abs()), hermite_by_elimination(&a), "{a:?}");
            // any multiple of the index works as the modulus
            assert_eq!(hermite_normal_form_mod(&a, &(det.abs() * 6)), hermite_by_elimination(&a));
            checked += 1;
        }
    }

    fn check(a: &IntMatrix) -> SnfDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(&(&s.u * &s.d) * &s.v, *a);
        assert!((&s.u * s.u_inverse()).is_identity());
        assert!((&s.v * s.v_inverse()).is_identity());
        assert_eq!(s.u.det().unwrap().abs(), int(1));
        assert_eq!(s.v.det().unwrap().abs(), int(1));
        let d = s.diagonal();
        for w in d.windows(2) {
            assert!(w[1].is_zero() || (&w[1] % &w[0]).is_zero());
        }
        assert_eq!(elementary_divisors(a), d);
        s
    }

    #[test]
    fn snf_identity() {
        let s = check(&IntMatrix::identity(3));
        assert!(s.d.is_identity());
    }

    #[test]
    fn snf_two_by_two() {
        // elementary divisors of [[2,4],[6,8]]: gcd of entries 2, det -8
        let s = check(&IntMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.diagonal(), vec![int(2), int(4)]);
    }

    #[test]
    fn snf_reorders_chain() {
        let s = check(&IntMatrix::from_i64_rows(&[&[6, 0], &[0, 2]]));
        assert_eq!(s.diagonal(), vec![int(2), int(6)]);
        let s = check(&IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![int(1), int(6)]);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        let s = check(&IntMatrix::from_i64_rows(&[&[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(s.rank(), 0);
        let s = check(&IntMatrix::from_i64_rows(&[&[4, 6, 8]]));
        assert_eq!(s.diagonal(), vec![int(2)]);
        check(&IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4], &[5, 6]]));
    }

    #[test]
    fn hnf_examples() {
        let h = hermite_normal_form(&IntMatrix::from_i64_rows(&[&[2, 1], &[0, 1]]));
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[1, 0], &[1, 2]]));
        assert!(hermite_normal_form(&IntMatrix::identity(4)).is_identity());
        let h = hermite_normal_form(&IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]));
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn hnf_of_generating_set_drops_dependent_columns() {
        let h = hermite_normal_form(&IntMatrix::from_i64_rows(&[&[2, 3, 4], &[0, 0, 6]]));
        assert_eq!(h.cols(), 2);
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[1, 0], &[0, 6]]));
    }
}
