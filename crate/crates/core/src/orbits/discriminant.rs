//! Discriminant modules `I*/I` with their residual forms, and subgroups.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactlinalg::{dual_basis, smith_normal_form, vector, IntMatrix, RatMatrix};
use crate::lattices::{u_lattice, Lattice};

/// Coordinates of an element with respect to the module generators.
pub type Element = Vec<u64>;

/// Default bound on the number of elements an enumeration may visit.
pub const DEFAULT_CAP: u128 = 1 << 20;

/// `x mod m` in `[0, m)` for rational `x` and integer `m > 0`.
pub(crate) fn reduce_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(m.into());
    x - (x / &m).floor() * &m
}

/// `I*/I` for a finite-index sublattice `I` of an even lattice, presented as
/// `⊕ Z/m_i` with rational lifts of the generators.
#[derive(Clone, Debug)]
pub struct FiniteQuadraticModule {
    moduli: Vec<u64>,
    lifts: Vec<Vec<BigRational>>,
    lift_gram: Vec<Vec<BigRational>>,
    /// Rows map the dual-basis coordinates `Bᵀ G w` to module coordinates.
    coordinate_map: IntMatrix,
    pairing_with_basis: RatMatrix,
}

impl FiniteQuadraticModule {
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        self.moduli.iter().map(|&m| BigInt::from(m)).collect()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u128 {
        self.moduli.iter().map(|&m| m as u128).product()
    }

    pub fn generator_lifts(&self) -> &[Vec<BigRational>] {
        &self.lifts
    }

    pub fn zero(&self) -> Element {
        vec![0; self.moduli.len()]
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1 % self.moduli[i];
        e
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), m)| (x + y) % m).collect()
    }

    pub fn scale(&self, a: &[u64], k: i64) -> Element {
        a.iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| ((x as i128 * k as i128).rem_euclid(m as i128)) as u64)
            .collect()
    }

    pub fn element_order(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.moduli).fold(1, |acc, (&x, &m)| acc.lcm(&(m / x.gcd(&m))))
    }

    /// A rational vector of `L_Q` representing the element.
    pub fn lift(&self, a: &[u64]) -> Vec<BigRational> {
        let n = self.lifts.first().map_or(0, Vec::len);
        let mut out = vec![BigRational::zero(); n];
        for (c, l) in a.iter().zip(&self.lifts) {
            let c = BigRational::from_integer((*c).into());
            for (o, x) in out.iter_mut().zip(l) {
                *o += &c * x;
            }
        }
        out
    }

    /// Residual quadratic form `q(a) = (ã, ã) mod 2Z`, in `[0, 2)`.
    pub fn q(&self, a: &[u64]) -> BigRational {
        reduce_mod(&self.raw_pair(a, a), 2)
    }

    /// Residual bilinear form `b(a, c) = (ã, c̃) mod Z`, in `[0, 1)`.
    pub fn b(&self, a: &[u64], c: &[u64]) -> BigRational {
        reduce_mod(&self.raw_pair(a, c), 1)
    }

    fn raw_pair(&self, a: &[u64], c: &[u64]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in c.iter().enumerate() {
                if x != 0 && y != 0 {
                    s += BigRational::from_integer((x as u128 * y as u128).into()) * &self.lift_gram[i][j];
                }
            }
        }
        s
    }

    /// Module coordinates of a vector of `I*`.
    pub fn coordinates(&self, w: &[BigRational]) -> Result<Element> {
        let x = self.pairing_with_basis.mul_vec(w)?;
        let x = vector::to_int(&x).ok_or_else(|| Error::Precondition("vector is not in the dual lattice".into()))?;
        let y = self.coordinate_map.mul_vec(&x)?;
        Ok(y.iter()
            .zip(&self.moduli)
            .map(|(v, &m)| v.mod_floor(&BigInt::from(m)).to_u64().expect("below modulus"))
            .collect())
    }

    /// All elements, refusing groups larger than `cap`.
    pub fn elements(&self, cap: u128) -> Result<Vec<Element>> {
        let size = self.order();
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        let mut out = vec![self.zero()];
        for (i, &m) in self.moduli.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for e in &out {
                for k in 0..m {
                    let mut f = e.clone();
                    f[i] = k;
                    next.push(f);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// `I*/I` for the sublattice of `L` spanned by the columns of `basis`.
pub fn discriminant_module(lattice: &Lattice, basis: &IntMatrix) -> Result<FiniteQuadraticModule> {
    let n = lattice.rank();
    if basis.rows() != n || basis.cols() != n {
        return Err(Error::Dimension("sublattice basis must be square of the lattice rank".into()));
    }
    if !lattice.is_even() {
        return Err(Error::Precondition("residual quadratic form needs an even lattice".into()));
    }
    let m = basis.pairing(lattice.gram(), basis)?;
    if m.det()?.is_zero() {
        return Err(Error::Degenerate("sublattice Gram matrix is singular".into()));
    }
    let dual = dual_basis(basis, lattice.gram())?;
    // I in dual-basis coordinates is the column span of M = U S V
    let snf = smith_normal_form(&m);
    let keep: Vec<usize> = (0..n).filter(|&i| !snf.d.get(i, i).is_one()).collect();
    let moduli = keep
        .iter()
        .map(|&i| {
            snf.d.get(i, i).to_u64().ok_or_else(|| Error::Precondition("elementary divisor too large".into()))
        })
        .collect::<Result<Vec<u64>>>()?;
    let u = snf.u.to_rat();
    let lifts: Vec<Vec<BigRational>> =
        keep.iter().map(|&i| dual.mul_vec(&u.column(i)).expect("dimension")).collect();
    let gram = lattice.gram_rat();
    let lift_gram = lifts.iter().map(|a| lifts.iter().map(|b| vector::pair_rat(&gram, a, b)).collect()).collect();
    let u_inv = snf.u_inverse();
    let coordinate_map = if keep.is_empty() {
        IntMatrix::zeros(0, n)
    } else {
        IntMatrix::from_rows(keep.iter().map(|&i| u_inv.row(i)).collect())?
    };
    let pairing_with_basis = basis.transpose().mul_mat(lattice.gram())?.to_rat();
    Ok(FiniteQuadraticModule { moduli, lifts, lift_gram, coordinate_map, pairing_with_basis })
}

/// `I_f = bZ e1 ⊕ aZ e2 ⊂ U` for `f = diag(a/b, b/a)`.
pub fn u_case_sublattice(a: u64, b: u64) -> IntMatrix {
    IntMatrix::diagonal(&[BigInt::from(b), BigInt::from(a)])
}

/// The module `I_f*/I_f ≅ (Z/ab)²` for `f = diag(a/b, b/a)` on `U`.
pub fn u_case_module(a: u64, b: u64) -> Result<FiniteQuadraticModule> {
    if a == 0 || b == 0 || a.gcd(&b) != 1 {
        return Err(Error::Precondition("need coprime positive a, b".into()));
    }
    discriminant_module(&u_lattice(), &u_case_sublattice(a, b))
}

/// A subgroup, stored with its generators and full element set. Equality
/// compares element sets.
#[derive(Clone, Debug)]
pub struct ModuleSubgroup {
    generators: Vec<Element>,
    elements: BTreeSet<Element>,
}

impl PartialEq for ModuleSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for ModuleSubgroup {}

impl ModuleSubgroup {
    /// The subgroup generated by `generators`, refusing more than `cap`
    /// elements.
    pub fn generated(m: &FiniteQuadraticModule, generators: Vec<Element>, cap: u128) -> Result<Self> {
        let mut elements = BTreeSet::from([m.zero()]);
        let mut frontier = vec![m.zero()];
        while let Some(e) = frontier.pop() {
            for g in &generators {
                let s = m.add(&e, g);
                if elements.insert(s.clone()) {
                    if elements.len() as u128 > cap {
                        return Err(Error::CapExceeded { size: elements.len() as u128, cap });
                    }
                    frontier.push(s);
                }
            }
        }
        Ok(Self { generators, elements })
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn elements(&self) -> &BTreeSet<Element> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &[u64]) -> bool {
        self.elements.contains(e)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let elements: BTreeSet<Element> = self.elements.intersection(&other.elements).cloned().collect();
        Self { generators: elements.iter().cloned().collect(), elements }
    }

    /// Whether `q` vanishes on every element.
    pub fn is_isotropic(&self, m: &FiniteQuadraticModule) -> bool {
        self.elements.iter().all(|e| m.q(e).is_zero())
    }

    pub fn is_cyclic(&self, m: &FiniteQuadraticModule) -> bool {
        self.elements.iter().any(|e| m.element_order(e) as usize == self.order())
    }
}

/// Cyclic subgroups of order `n` on which `q` vanishes, for a module of
/// order `n²`.
pub fn enumerate_lagrangians(m: &FiniteQuadraticModule, n: u64, cap: u128) -> Result<Vec<ModuleSubgroup>> {
    if m.order() != n as u128 * n as u128 {
        return Err(Error::Precondition(format!("module order {} is not {n}²", m.order())));
    }
    let mut seen: BTreeSet<BTreeSet<Element>> = BTreeSet::new();
    let mut out = Vec::new();
    for e in m.elements(cap)? {
        if m.element_order(&e) != n || !m.q(&e).is_zero() {
            continue;
        }
        let sub = ModuleSubgroup::generated(m, vec![e], cap)?;
        if seen.insert(sub.elements.clone()) {
            out.push(sub);
        }
    }
    Ok(out)
}

/// `L_(c,d) = ⟨(c/a) e1, (d/b) e2⟩` inside the module of [`u_case_module`].
pub fn lagrangian_from_pair(m: &FiniteQuadraticModule, a: u64, b: u64, c: u64, d: u64) -> Result<ModuleSubgroup> {
    let n = a.checked_mul(b).ok_or_else(|| Error::Precondition("a·b overflows".into()))?;
    if c.checked_mul(d) != Some(n) {
        return Err(Error::Precondition(format!("c·d must equal a·b = {n}")));
    }
    if c.gcd(&d) != 1 {
        return Err(Error::Precondition("c and d must be coprime".into()));
    }
    if m.order() != n as u128 * n as u128 {
        return Err(Error::Precondition("module does not match the pair (a, b)".into()));
    }
    let r = |p: u64, q: u64| BigRational::new(p.into(), q.into());
    let g1 = m.coordinates(&[r(c, a), r(0, 1)])?;
    let g2 = m.coordinates(&[r(0, 1), r(d, b)])?;
    ModuleSubgroup::generated(m, vec![g1, g2], n as u128)
}

/// `|L_(c1,d1) ∩ L_(c2,d2)| = (n / lcm(c1,c2)) · (n / lcm(d1,d2))`.
pub fn lagrangian_intersection_order(n: u64, c1: u64, d1: u64, c2: u64, d2: u64) -> u64 {
    (n / c1.lcm(&c2)) * (n / d1.lcm(&d2))
}

/// Ordered pairs `(c, d)` of coprime positive integers with `c d = n`.
pub fn coprime_factor_pairs(n: u64) -> Vec<(u64, u64)> {
    (1..=n).filter(|c| n % c == 0 && c.gcd(&(n / c)) == 1).map(|c| (c, n / c)).collect()
}
