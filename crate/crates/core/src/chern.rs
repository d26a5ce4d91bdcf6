//! Truncated Chern characters from rational Chern roots, the Adams-type
//! operation `r₂`, wedge and symmetric squares, and recovery of graded
//! components from the totals of `r₂`-iterates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactlinalg::RatMatrix;

/// Components `c_0, …, c_D` of a class truncated above degree `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    components: Vec<BigRational>,
}

impl GradedSeries {
    pub fn zero(degree: usize) -> Self {
        Self { components: vec![BigRational::zero(); degree + 1] }
    }

    pub fn constant(value: BigRational, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.components[0] = value;
        s
    }

    pub fn from_components(components: Vec<BigRational>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension("a series needs at least the degree-0 slot".into()));
        }
        Ok(Self { components })
    }

    pub fn degree(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[BigRational] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &BigRational {
        &self.components[i]
    }

    /// Sum of all components.
    pub fn total(&self) -> BigRational {
        self.components.iter().sum()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::Dimension(format!(
                "truncation degrees {} and {} differ",
                self.degree(),
                other.degree()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { components: self.components.iter().map(|a| a * k).collect() }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.degree();
        let mut out = vec![BigRational::zero(); d + 1];
        for (i, a) in self.components.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.components[..=d - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self { components: out })
    }

    /// Component `i` multiplied by `k^i`.
    pub fn r_k(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        let mut w = BigRational::one();
        let components = self
            .components
            .iter()
            .map(|c| {
                let out = c * &w;
                w *= &k;
                out
            })
            .collect();
        Self { components }
    }

    /// Component `i` multiplied by `2^i`.
    pub fn r2(&self) -> Self {
        self.r_k(2)
    }
}

/// A bundle presented by its Chern roots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootBundle {
    pub roots: Vec<BigRational>,
}

impl RootBundle {
    pub fn new(roots: Vec<BigRational>) -> Self {
        Self { roots }
    }

    pub fn rank(&self) -> usize {
        self.roots.len()
    }
}

/// The formal difference `[plus] − [minus]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VirtualBundle {
    pub plus: RootBundle,
    pub minus: RootBundle,
}

impl VirtualBundle {
    pub fn new(plus: RootBundle, minus: RootBundle) -> Self {
        Self { plus, minus }
    }
}

/// `e^x` truncated above degree `degree`.
pub fn exp_series(x: &BigRational, degree: usize) -> GradedSeries {
    let mut components = Vec::with_capacity(degree + 1);
    let mut term = BigRational::one();
    for i in 0..=degree {
        components.push(term.clone());
        term = term * x / BigRational::from_integer(BigInt::from(i + 1));
    }
    GradedSeries { components }
}

/// `Σ_j e^{x_j}`.
pub fn ch_from_roots(bundle: &RootBundle, degree: usize) -> GradedSeries {
    bundle.roots.iter().fold(GradedSeries::zero(degree), |acc, x| {
        acc.add(&exp_series(x, degree)).expect("same degree")
    })
}

/// `ch(plus) − ch(minus)`.
pub fn virtual_ch(v: &VirtualBundle, degree: usize) -> GradedSeries {
    ch_from_roots(&v.plus, degree).sub(&ch_from_roots(&v.minus, degree)).expect("same degree")
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `(u² − r₂u) / 2`, the wedge square of a class with character `u`.
pub fn wedge2_of_series(u: &GradedSeries) -> GradedSeries {
    u.mul(u).expect("same degree").sub(&u.r2()).expect("same degree").scale(&half())
}

/// `(u² + r₂u) / 2`, the symmetric square of a class with character `u`.
pub fn sym2_of_series(u: &GradedSeries) -> GradedSeries {
    u.mul(u).expect("same degree").add(&u.r2()).expect("same degree").scale(&half())
}

/// `ch(∧²F)`.
pub fn wedge2_ch(bundle: &RootBundle, degree: usize) -> GradedSeries {
    wedge2_of_series(&ch_from_roots(bundle, degree))
}

/// `ch(Sym²B)`.
pub fn sym2_ch(bundle: &RootBundle, degree: usize) -> GradedSeries {
    sym2_of_series(&ch_from_roots(bundle, degree))
}

/// `ch(∧²A) − ch(A)ch(B) + ch(Sym²B)` for `V = [A] − [B]`.
pub fn virtual_wedge2(v: &VirtualBundle, degree: usize) -> GradedSeries {
    let a = ch_from_roots(&v.plus, degree);
    let b = ch_from_roots(&v.minus, degree);
    wedge2_of_series(&a)
        .sub(&a.mul(&b).expect("same degree"))
        .and_then(|s| s.add(&sym2_of_series(&b)))
        .expect("same degree")
}

/// Recovers `c_0, …, c_D` from the totals `Σ_i 2^{mi} c_i` of the inputs
/// `[u, r₂u, r₂²u, …]` by solving the Vandermonde system in the nodes `2^m`.
pub fn extract_graded(cycles: &[GradedSeries]) -> Result<Vec<BigRational>> {
    let Some(first) = cycles.first() else {
        return Err(Error::Precondition("no series given".into()));
    };
    let d = first.degree();
    if cycles.len() != d + 1 {
        return Err(Error::Precondition(format!(
            "need {} iterates for truncation degree {d}, got {}",
            d + 1,
            cycles.len()
        )));
    }
    if cycles.iter().any(|c| c.degree() != d) {
        return Err(Error::Dimension("iterates have different truncation degrees".into()));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let nodes: Vec<BigRational> = (0..=d).map(|m| num_traits::pow(two.clone(), m)).collect();
    let vandermonde = RatMatrix::from_fn(d + 1, d + 1, |m, i| num_traits::pow(nodes[m].clone(), i));
    let totals: Vec<BigRational> = cycles.iter().map(GradedSeries::total).collect();
    vandermonde.solve(&totals)
}

/// `[u, r₂u, …, r₂^D u]`.
pub fn r2_iterates(u: &GradedSeries) -> Vec<GradedSeries> {
    let mut out = Vec::with_capacity(u.degree() + 1);
    let mut cur = u.clone();
    for _ in 0..=u.degree() {
        let next = cur.r2();
        out.push(cur);
        cur = next;
    }
    out
}

/// Direct sums over root combinations, used as oracles for the closed forms.
pub mod roots {
    use super::*;

    /// `Σ_{i<j} e^{x_i + x_j}`.
    pub fn wedge2_by_pairs(bundle: &RootBundle, degree: usize) -> GradedSeries {
        let x = &bundle.roots;
        let mut sums = Vec::new();
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                sums.push(&x[i] + &x[j]);
            }
        }
        ch_from_roots(&RootBundle::new(sums), degree)
    }

    /// `Σ_{i≤j} e^{x_i + x_j}`.
    pub fn sym2_by_pairs(bundle: &RootBundle, degree: usize) -> GradedSeries {
        let x = &bundle.roots;
        let mut sums = Vec::new();
        for i in 0..x.len() {
            for j in i..x.len() {
                sums.push(&x[i] + &x[j]);
            }
        }
        ch_from_roots(&RootBundle::new(sums), degree)
    }

    /// `Σ_{i,j} e^{a_i + b_j}`.
    pub fn tensor_by_pairs(a: &RootBundle, b: &RootBundle, degree: usize) -> GradedSeries {
        let sums = a.roots.iter().flat_map(|x| b.roots.iter().map(move |y| x + y)).collect();
        ch_from_roots(&RootBundle::new(sums), degree)
    }

    /// `[∧²A] − [A⊗B] + [Sym²B]` with each term summed over roots.
    pub fn virtual_wedge2_by_pairs(v: &VirtualBundle, degree: usize) -> GradedSeries {
        wedge2_by_pairs(&v.plus, degree)
            .sub(&tensor_by_pairs(&v.plus, &v.minus, degree))
            .and_then(|s| s.add(&sym2_by_pairs(&v.minus, degree)))
            .expect("same degree")
    }
}

/// Outcome of one randomized check of the identities.
#[derive(Clone, Debug, Default)]
pub struct IdentityChecks {
    pub wedge2: bool,
    pub sym2: bool,
    pub tensor_square: bool,
    pub virtual_wedge2: bool,
    pub extraction: bool,
    pub r2_multiplicative: bool,
}

impl IdentityChecks {
    pub fn all(&self) -> bool {
        self.wedge2 && self.sym2 && self.tensor_square && self.virtual_wedge2 && self.extraction && self.r2_multiplicative
    }
}

/// Compares every closed form against its root-sum oracle for one bundle
/// `a` and one virtual bundle `a − b`.
pub fn check_identities(a: &RootBundle, b: &RootBundle, degree: usize) -> IdentityChecks {
    let ch = ch_from_roots(a, degree);
    let chb = ch_from_roots(b, degree);
    let v = VirtualBundle::new(a.clone(), b.clone());
    IdentityChecks {
        wedge2: wedge2_ch(a, degree) == roots::wedge2_by_pairs(a, degree),
        sym2: sym2_ch(a, degree) == roots::sym2_by_pairs(a, degree),
        tensor_square: wedge2_ch(a, degree).add(&sym2_ch(a, degree)).ok() == ch.mul(&ch).ok(),
        virtual_wedge2: virtual_wedge2(&v, degree) == roots::virtual_wedge2_by_pairs(&v, degree)
            && virtual_wedge2(&v, degree) == wedge2_of_series(&virtual_ch(&v, degree)),
        extraction: extract_graded(&r2_iterates(&ch)).ok().as_deref() == Some(ch.components()),
        r2_multiplicative: ch.mul(&chb).map(|p| p.r2()).ok() == ch.r2().mul(&chb.r2()).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::rat;
    use crate::sampling::Sampler;

    fn bundle(roots: &[(i64, i64)]) -> RootBundle {
        RootBundle::new(roots.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    fn series(c: &[(i64, i64)]) -> GradedSeries {
        GradedSeries::from_components(c.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    #[test]
    fn ch_examples() {
        assert_eq!(ch_from_roots(&RootBundle::default(), 3), GradedSeries::zero(3));
        assert_eq!(ch_from_roots(&bundle(&[(0, 1)]), 3), series(&[(1, 1), (0, 1), (0, 1), (0, 1)]));
        assert_eq!(ch_from_roots(&bundle(&[(1, 1), (-1, 1)]), 2), series(&[(2, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn r2_examples() {
        let c = GradedSeries::constant(rat(5, 1), 4);
        assert_eq!(c.r2(), c);
        assert_eq!(ch_from_roots(&bundle(&[(1, 1)]), 5).r2(), ch_from_roots(&bundle(&[(2, 1)]), 5));
        let u = ch_from_roots(&bundle(&[(1, 3), (-2, 5)]), 6);
        assert_eq!(u.r2().r2(), u.r_k(4));
    }

    #[test]
    fn wedge_and_sym_examples() {
        assert_eq!(wedge2_ch(&bundle(&[(3, 2)]), 4), GradedSeries::zero(4));
        let xy = bundle(&[(1, 2), (2, 3)]);
        assert_eq!(wedge2_ch(&xy, 5), ch_from_roots(&bundle(&[(7, 6)]), 5));
        assert_eq!(sym2_ch(&bundle(&[(1, 3)]), 5), ch_from_roots(&bundle(&[(2, 3)]), 5));
        assert_eq!(sym2_ch(&bundle(&[(0, 1), (0, 1)]), 3), series(&[(3, 1), (0, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn wedge_formula_without_the_half_disagrees_with_root_sums() {
        let f = bundle(&[(1, 2), (-1, 3), (2, 1)]);
        let ch = ch_from_roots(&f, 6);
        let no_half = ch.mul(&ch).unwrap().sub(&ch.r2()).unwrap();
        assert_ne!(no_half, roots::wedge2_by_pairs(&f, 6));
        assert_eq!(no_half.scale(&rat(1, 2)), roots::wedge2_by_pairs(&f, 6));
    }

    #[test]
    fn virtual_wedge_edge_cases() {
        let a = bundle(&[(1, 2), (-1, 3)]);
        let b = bundle(&[(2, 5), (1, 1)]);
        let only_a = VirtualBundle::new(a.clone(), RootBundle::default());
        assert_eq!(virtual_wedge2(&only_a, 6), wedge2_ch(&a, 6));
        let only_b = VirtualBundle::new(RootBundle::default(), b.clone());
        assert_eq!(virtual_wedge2(&only_b, 6), sym2_ch(&b, 6));
    }

    #[test]
    fn extraction_examples() {
        let zeros = ch_from_roots(&bundle(&[(0, 1), (0, 1), (0, 1)]), 3);
        assert_eq!(extract_graded(&r2_iterates(&zeros)).unwrap(), series(&[(3, 1), (0, 1), (0, 1), (0, 1)]).components());
        let one = ch_from_roots(&bundle(&[(1, 1)]), 3);
        assert_eq!(extract_graded(&r2_iterates(&one)).unwrap(), series(&[(1, 1), (1, 1), (1, 2), (1, 6)]).components());
        assert!(extract_graded(&r2_iterates(&one)[..2]).is_err());
    }

    #[test]
    fn random_identities() {
        let mut s = Sampler::new(23);
        for _ in 0..20 {
            let ra = s.int_in(0, 4) as usize;
            let rb = s.int_in(0, 3) as usize;
            let d = s.int_in(1, 7) as usize;
            let a = RootBundle::new(s.rationals(ra, 7));
            let b = RootBundle::new(s.rationals(rb, 7));
            assert!(check_identities(&a, &b, d).all());
        }
    }
}
