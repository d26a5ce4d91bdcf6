//! Seeded random lattice vectors and isometries for property checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactlinalg::{vector, IntMatrix};
use crate::isometry::{reflection, RationalIsometry};
use crate::lattices::{hyperbolic_prefix, u_summand, Lattice};

/// Deterministic generator; equal seeds give equal streams.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Integer vector with entries in `[-bound, bound]`.
    pub fn small_vector(&mut self, n: usize, bound: i64) -> Vec<BigInt> {
        (0..n).map(|_| BigInt::from(self.rng.gen_range(-bound..=bound))).collect()
    }

    /// Sparse vector: `nonzero` random coordinates in `[-bound, bound]`.
    pub fn sparse_vector(&mut self, n: usize, nonzero: usize, bound: i64) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        for _ in 0..nonzero {
            let i = self.rng.gen_range(0..n);
            v[i] = BigInt::from(self.rng.gen_range(-bound..=bound));
        }
        v
    }

    /// Primitive anisotropic vector with small entries.
    pub fn anisotropic_vector(&mut self, lattice: &Lattice, bound: i64) -> Vec<BigInt> {
        loop {
            let v = self.small_vector(lattice.rank(), bound);
            if vector::content(&v) == BigInt::from(1) && !lattice.square(&v).is_zero() {
                return v;
            }
        }
    }

    /// `e + b f + z` with `z` a small vector off the first hyperbolic plane
    /// and `b` chosen so that the square is `square` (even).
    pub fn vector_of_square(&mut self, lattice: &Lattice, square: i64) -> Result<Vec<BigInt>> {
        if hyperbolic_prefix(lattice) < 1 || square % 2 != 0 {
            return Err(Error::Precondition("need a leading hyperbolic plane and an even square".into()));
        }
        let n = lattice.rank();
        let mut v = vec![BigInt::zero(); n];
        if n > 2 {
            let nonzero = self.rng.gen_range(0..=3);
            let z = self.sparse_vector(n - 2, nonzero, 2);
            v[2..].clone_from_slice(&z);
        }
        let zz = lattice.square(&v);
        let (e, f) = u_summand(0);
        v[e] = BigInt::from(1);
        v[f] = (BigInt::from(square) - zz) / BigInt::from(2);
        Ok(v)
    }

    /// Product of `len` factors, each a reflection in a random vector of
    /// square `±2` or a swap of two hyperbolic planes.
    pub fn integral_isometry(&mut self, lattice: &Lattice, len: usize) -> Result<RationalIsometry> {
        let mut phi = RationalIsometry::identity(lattice.clone());
        for step in self.integral_steps(lattice, len)? {
            let factor = match step {
                Step::Reflect(v) => reflection(lattice, &v)?,
                Step::Swap(i, j) => plane_swap(lattice, i, j)?,
            };
            phi = phi.compose(&factor)?;
        }
        Ok(phi)
    }

    /// Factors of a random integral isometry, leftmost first: reflections in
    /// vectors of square `±2` conjugated by the product so far, and swaps of
    /// hyperbolic planes.
    fn integral_steps(&mut self, lattice: &Lattice, len: usize) -> Result<Vec<Step>> {
        let planes = hyperbolic_prefix(lattice);
        let mut steps: Vec<Step> = Vec::with_capacity(len);
        for _ in 0..len {
            let step = if planes >= 2 && self.rng.gen_bool(0.2) {
                let mut idx: Vec<usize> = (0..planes).collect();
                idx.shuffle(&mut self.rng);
                Step::Swap(idx[0], idx[1])
            } else {
                let sign = if self.rng.gen_bool(0.5) { 2 } else { -2 };
                let v = self.vector_of_square(lattice, sign)?;
                Step::Reflect(apply_steps(lattice, &steps, v))
            };
            steps.push(step);
        }
        Ok(steps)
    }

    pub fn primitive_of_square(&mut self, lattice: &Lattice, d: i64) -> Result<Vec<BigInt>> {
        if hyperbolic_prefix(lattice) < 1 {
            return Err(Error::Precondition("need a leading hyperbolic plane".into()));
        }
        let steps = self.integral_steps(lattice, 3)?;
        let mut v = vec![BigInt::zero(); lattice.rank()];
        let (e, f) = u_summand(0);
        v[e] = BigInt::from(1);
        v[f] = BigInt::from(d);
        Ok(apply_steps(lattice, &steps, v))
    }

    /// `g ∘ r_x ∘ h` with `(x, x) = ±2n`, of `n`-cyclic type.
    pub fn cyclic_isometry(&mut self, lattice: &Lattice, n: i64, len: usize) -> Result<RationalIsometry> {
        let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let x = self.vector_of_square(lattice, 2 * n * sign)?;
        let g = self.integral_isometry(lattice, len)?;
        let h = self.integral_isometry(lattice, len)?;
        g.compose(&reflection(lattice, &x)?)?.compose(&h)
    }

    /// Product of `len` reflections in random small anisotropic vectors.
    pub fn rational_isometry(&mut self, lattice: &Lattice, len: usize, bound: i64) -> Result<RationalIsometry> {
        let mut phi = RationalIsometry::identity(lattice.clone());
        for _ in 0..len {
            let v = self.anisotropic_vector(lattice, bound);
            phi = phi.compose(&reflection(lattice, &v)?)?;
        }
        Ok(phi)
    }

    /// Rationals with numerator in `[-bound, bound]` and denominator in
    /// `[1, bound]`.
    pub fn rationals(&mut self, count: usize, bound: i64) -> Vec<BigRational> {
        (0..count)
            .map(|_| {
                BigRational::new(
                    BigInt::from(self.rng.gen_range(-bound..=bound)),
                    BigInt::from(self.rng.gen_range(1..=bound)),
                )
            })
            .collect()
    }

    /// Integer matrix with entries in `[-bound, bound]`.
    pub fn int_matrix(&mut self, rows: usize, cols: usize, bound: i64) -> IntMatrix {
        IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(self.rng.gen_range(-bound..=bound)))
    }
}

/// Exchange of the `i`-th and `j`-th hyperbolic planes.
enum Step {
    Reflect(Vec<BigInt>),
    Swap(usize, usize),
}

/// `s_1(s_2(... s_k(v)))` for integral steps; reflections are in vectors of
/// square `±2`.
fn apply_steps(lattice: &Lattice, steps: &[Step], mut v: Vec<BigInt>) -> Vec<BigInt> {
    for step in steps.iter().rev() {
        match step {
            Step::Reflect(x) => {
                // r_x(v) = v − 2 (v,x)/(x,x) x with (x,x) = ±2
                let c = lattice.pair(&v, x) * BigInt::from(2) / lattice.square(x);
                for (a, b) in v.iter_mut().zip(x) {
                    *a -= &c * b;
                }
            }
            Step::Swap(i, j) => {
                let ((ei, fi), (ej, fj)) = (u_summand(*i), u_summand(*j));
                v.swap(ei, ej);
                v.swap(fi, fj);
            }
        }
    }
    v
}

pub fn plane_swap(lattice: &Lattice, i: usize, j: usize) -> Result<RationalIsometry> {
    let n = lattice.rank();
    let mut perm: Vec<usize> = (0..n).collect();
    let (ei, fi) = u_summand(i);
    let (ej, fj) = u_summand(j);
    perm.swap(ei, ej);
    perm.swap(fi, fj);
    let m = IntMatrix::from_fn(n, n, |r, c| BigInt::from((perm[c] == r) as i64));
    RationalIsometry::from_integral(lattice.clone(), &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::int;
    use crate::isometry::cyclic_type;
    use crate::lattices::k3_lattice;

    #[test]
    fn primitive_vectors_are_images_of_the_sampled_isometry() {
        let k3 = k3_lattice();
        for seed in 0..20 {
            let d = seed as i64 - 10;
            let g = Sampler::new(seed).integral_isometry(&k3, 3).unwrap();
            let v = Sampler::new(seed).primitive_of_square(&k3, d).unwrap();
            let mut w = vec![BigInt::zero(); k3.rank()];
            w[0] = int(1);
            w[1] = int(d);
            assert_eq!(vector::to_rat(&v), g.apply_int(&w).unwrap());
            assert_eq!(k3.square(&v), int(2 * d));
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a = Sampler::new(7).small_vector(10, 5);
        let b = Sampler::new(7).small_vector(10, 5);
        assert_eq!(a, b);
        assert_ne!(a, Sampler::new(8).small_vector(10, 5));
    }

    #[test]
    fn samples_meet_their_contracts() {
        let k3 = k3_lattice();
        let mut s = Sampler::new(1);
        for sq in [-2i64, 2, 8, -14] {
            let v = s.vector_of_square(&k3, sq).unwrap();
            assert_eq!(k3.square(&v), int(sq));
        }
        let g = s.integral_isometry(&k3, 4).unwrap();
        assert!(g.is_integral());
        let y = s.primitive_of_square(&k3, -3).unwrap();
        assert_eq!(k3.square(&y), int(-6));
        assert_eq!(vector::content(&y), int(1));
        let phi = s.cyclic_isometry(&k3, 5, 2).unwrap();
        assert_eq!(cyclic_type(&phi), Some(int(5)));
    }
}
