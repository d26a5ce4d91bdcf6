//! The Mukai lattice `H⁰ ⊕ H² ⊕ H⁴` of a K3 surface, the `e^α` action and
//! even-degree Künneth kernels on `S × M` with their induced maps on `H²`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlinalg::{kernel_mod, quotient_divisors, vector, IntMatrix, RatMatrix};
use crate::isometry::QuotientStructure;
use crate::lattices::{k3_lattice, u_summand, Lattice, K3_RANK, MUKAI_RANK};

fn k3() -> &'static Lattice {
    static K3: OnceLock<Lattice> = OnceLock::new();
    K3.get_or_init(k3_lattice)
}

fn k3_gram_rat() -> &'static RatMatrix {
    static G: OnceLock<RatMatrix> = OnceLock::new();
    G.get_or_init(|| k3().gram_rat())
}

fn check_len(v: &[BigInt], what: &str) -> Result<()> {
    if v.len() != K3_RANK {
        return Err(Error::Dimension(format!("{what} has length {}, expected {K3_RANK}", v.len())));
    }
    Ok(())
}

/// `(r, c, s)` with `c` in K3-lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c: Vec<BigInt>,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: BigInt, c: Vec<BigInt>, s: BigInt) -> Result<Self> {
        check_len(&c, "H² part")?;
        Ok(Self { r, c, s })
    }

    pub fn from_i64s(r: i64, c: &[i64], s: i64) -> Result<Self> {
        Self::new(BigInt::from(r), vector::from_i64s(c), BigInt::from(s))
    }

    /// `(r, 0, s)`.
    pub fn scalar(r: i64, s: i64) -> Self {
        Self { r: BigInt::from(r), c: vec![BigInt::zero(); K3_RANK], s: BigInt::from(s) }
    }

    /// Coordinates `(r, c_1, …, c_22, s)` in the basis of [`mukai_gram`].
    pub fn to_coords(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(MUKAI_RANK);
        out.push(self.r.clone());
        out.extend(self.c.iter().cloned());
        out.push(self.s.clone());
        out
    }

    pub fn from_coords(coords: &[BigInt]) -> Result<Self> {
        if coords.len() != MUKAI_RANK {
            return Err(Error::Dimension(format!("{} Mukai coordinates, expected {MUKAI_RANK}", coords.len())));
        }
        Self::new(coords[0].clone(), coords[1..MUKAI_RANK - 1].to_vec(), coords[MUKAI_RANK - 1].clone())
    }

    pub fn is_isotropic(&self) -> bool {
        mukai_pairing(self, self).is_zero()
    }
}

/// `−v⁴w⁰ + (v², w²) − v⁰w⁴`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector) -> BigInt {
    k3().pair(&v.c, &w.c) - &v.s * &w.r - &v.r * &w.s
}

/// Gram matrix of the pairing in the coordinates `(r, c, s)`.
pub fn mukai_gram() -> IntMatrix {
    let g = k3().gram();
    let n = MUKAI_RANK;
    IntMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, j) if j == n - 1 => BigInt::from(-1),
        (i, 0) if i == n - 1 => BigInt::from(-1),
        (0, _) | (_, 0) => BigInt::zero(),
        (i, j) if i == n - 1 || j == n - 1 => BigInt::zero(),
        (i, j) => g.get(i - 1, j - 1).clone(),
    })
}

pub fn mukai_lattice() -> Lattice {
    Lattice::new(mukai_gram()).expect("nondegenerate").with_label("Mukai")
}

/// Multiplication by `e^α`: `(r, c, s) ↦ (r, c + rα, s + (c,α) + r(α,α)/2)`.
pub fn exp_action(alpha: &[BigInt], v: &MukaiVector) -> Result<MukaiVector> {
    check_len(alpha, "α")?;
    check_len(&v.c, "H² part")?;
    let lat = k3();
    let aa = lat.square(alpha);
    let (half, rem) = aa.div_rem(&BigInt::from(2));
    if !rem.is_zero() {
        return Err(Error::Invariant("odd square in an even lattice".into()));
    }
    let c = v.c.iter().zip(alpha).map(|(ci, ai)| ci + &v.r * ai).collect();
    let s = &v.s + lat.pair(&v.c, alpha) + &v.r * half;
    Ok(MukaiVector { r: v.r.clone(), c, s })
}

const DEGREES: [u8; 3] = [0, 2, 4];

fn slot(deg: u8) -> Result<usize> {
    match deg {
        0 => Ok(0),
        2 => Ok(1),
        4 => Ok(2),
        _ => Err(Error::Precondition(format!("degree {deg} is not one of 0, 2, 4"))),
    }
}

/// Class in `⊕ H^p(S) ⊗ H^q(M)` for `p, q ∈ {0, 2, 4}`, stored per bidegree
/// as a `dim H^p × dim H^q` rational matrix. Both `H²` factors use K3
/// coordinates; `H⁰` and `H⁴` are spanned by `1` and the point class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KunnethKernel {
    parts: [[RatMatrix; 3]; 3],
}

fn dim(slot: usize) -> usize {
    if slot == 1 {
        K3_RANK
    } else {
        1
    }
}

enum Cup {
    UnitLeft,
    UnitRight,
    Contract,
}

fn cup(a: usize, b: usize) -> Option<Cup> {
    match (a, b) {
        (0, _) => Some(Cup::UnitLeft),
        (_, 0) => Some(Cup::UnitRight),
        (1, 1) => Some(Cup::Contract),
        _ => None,
    }
}

impl KunnethKernel {
    pub fn zero() -> Self {
        Self { parts: std::array::from_fn(|p| std::array::from_fn(|q| RatMatrix::zeros(dim(p), dim(q)))) }
    }

    pub fn one() -> Self {
        let mut k = Self::zero();
        k.parts[0][0] = RatMatrix::identity(1);
        k
    }

    pub fn component(&self, p: u8, q: u8) -> Result<&RatMatrix> {
        Ok(&self.parts[slot(p)?][slot(q)?])
    }

    pub fn set_component(&mut self, p: u8, q: u8, value: RatMatrix) -> Result<()> {
        let (a, b) = (slot(p)?, slot(q)?);
        if value.rows() != dim(a) || value.cols() != dim(b) {
            return Err(Error::Dimension(format!(
                "component ({p},{q}) must be {}x{}, got {}x{}",
                dim(a),
                dim(b),
                value.rows(),
                value.cols()
            )));
        }
        self.parts[a][b] = value;
        Ok(())
    }

    /// `π_S*(class)` for a class on `S` given as `(h0, h2, h4)`.
    pub fn pullback_s(h0: BigRational, h2: &[BigRational], h4: BigRational) -> Result<Self> {
        let mut k = Self::zero();
        k.parts[0][0] = RatMatrix::diagonal(&[h0]);
        k.set_component(2, 0, RatMatrix::from_columns(h2.len(), &[h2.to_vec()])?)?;
        k.parts[2][0] = RatMatrix::diagonal(&[h4]);
        Ok(k)
    }

    /// `π_M*(class)` for a class on `M` given as `(h0, h2, h4)`.
    pub fn pullback_m(h0: BigRational, h2: &[BigRational], h4: BigRational) -> Result<Self> {
        let mut k = Self::zero();
        k.parts[0][0] = RatMatrix::diagonal(&[h0]);
        k.set_component(0, 2, RatMatrix::from_rows(vec![h2.to_vec()])?)?;
        k.parts[0][2] = RatMatrix::diagonal(&[h4]);
        Ok(k)
    }

    /// `α ⊗ β` in bidegree `(2,2)`.
    pub fn pure_tensor(alpha: &[BigRational], beta: &[BigRational]) -> Result<Self> {
        let mut k = Self::zero();
        let m = RatMatrix::from_fn(alpha.len(), beta.len(), |i, j| &alpha[i] * &beta[j]);
        k.set_component(2, 2, m)?;
        Ok(k)
    }

    fn zip(&self, other: &Self, f: impl Fn(&RatMatrix, &RatMatrix) -> RatMatrix) -> Self {
        Self { parts: std::array::from_fn(|p| std::array::from_fn(|q| f(&self.parts[p][q], &other.parts[p][q]))) }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add_mat(b).expect("same shape"))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub_mat(b).expect("same shape"))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { parts: std::array::from_fn(|p| std::array::from_fn(|q| self.parts[p][q].scale(k))) }
    }

    /// Components of total degree `degree`, others zeroed.
    pub fn degree_part(&self, degree: u8) -> Self {
        let mut out = Self::zero();
        for (a, &p) in DEGREES.iter().enumerate() {
            for (b, &q) in DEGREES.iter().enumerate() {
                if p + q == degree {
                    out.parts[a][b] = self.parts[a][b].clone();
                }
            }
        }
        out
    }

    /// Cup product, dropping components of total degree above `max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: u8) -> Self {
        let g = k3_gram_rat();
        let mut out = Self::zero();
        for a1 in 0..3 {
            for b1 in 0..3 {
                let x = &self.parts[a1][b1];
                if x.is_zero() {
                    continue;
                }
                for a2 in 0..3 {
                    for b2 in 0..3 {
                        let y = &other.parts[a2][b2];
                        let (a, b) = (a1 + a2, b1 + b2);
                        if y.is_zero() || a > 2 || b > 2 || 2 * (a + b) > max_degree as usize {
                            continue;
                        }
                        let (Some(cs), Some(cm)) = (cup(a1, a2), cup(b1, b2)) else { continue };
                        let prod = block_product(x, y, &cs, &cm, g);
                        out.parts[a][b] = out.parts[a][b].add_mat(&prod).expect("same shape");
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, 8)
    }

    /// `1 + x + x²/2 + …` up to total degree `max_degree`.
    pub fn exp_truncated(&self, max_degree: u8) -> Self {
        let mut out = Self::one();
        let mut term = Self::one();
        for k in 1..=(max_degree / 2 + 1) {
            term = term.mul_truncated(self, max_degree).scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
            if term == Self::zero() {
                break;
            }
            out = out.add(&term);
        }
        out
    }
}

/// Product of two bidegree blocks: first contract or multiply on the `S`
/// side, then on the `M` side.
fn block_product(x: &RatMatrix, y: &RatMatrix, cs: &Cup, cm: &Cup, g: &RatMatrix) -> RatMatrix {
    // t[r] is a (cols x) × (cols y) matrix for each output S-index r
    let outer = |u: &[BigRational], v: &[BigRational]| RatMatrix::from_fn(u.len(), v.len(), |i, j| &u[i] * &v[j]);
    let t: Vec<RatMatrix> = match cs {
        Cup::UnitLeft => (0..y.rows()).map(|k| outer(&x.row(0), &y.row(k))).collect(),
        Cup::UnitRight => (0..x.rows()).map(|i| outer(&x.row(i), &y.row(0))).collect(),
        Cup::Contract => vec![(&(&x.transpose() * g) * y)],
    };
    let rows = t.len();
    match cm {
        Cup::UnitLeft => RatMatrix::from_fn(rows, y.cols(), |r, l| t[r].get(0, l).clone()),
        Cup::UnitRight => RatMatrix::from_fn(rows, x.cols(), |r, j| t[r].get(j, 0).clone()),
        Cup::Contract => RatMatrix::from_fn(rows, 1, |r, _| {
            let m = &t[r];
            let mut acc = BigRational::zero();
            for j in 0..m.rows() {
                for l in 0..m.cols() {
                    if !m.get(j, l).is_zero() && !g.get(j, l).is_zero() {
                        acc += m.get(j, l) * g.get(j, l);
                    }
                }
            }
            acc
        }),
    }
}

/// `γ ↦ π_M*(π_S*γ · Z)` on `H²`, i.e. `Z₂₂ᵀ G`.
pub fn induced_h2_map(z: &KunnethKernel) -> RatMatrix {
    &z.parts[1][1].transpose() * k3_gram_rat()
}

/// `1 + π_S*[pt] + π_M*[pt] + π_S*[pt]·π_M*[pt]`.
pub fn sqrt_todd_kernel() -> KunnethKernel {
    let mut k = KunnethKernel::zero();
    for (a, b) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
        k.parts[a][b] = RatMatrix::identity(1);
    }
    k
}

/// `C − (π_S*α + π_M*β)² / 2n` in total degree four.
pub fn kappa_two(c: &IntMatrix, alpha: &[BigInt], beta: &[BigInt], n: &BigInt) -> Result<KunnethKernel> {
    if !n.is_positive() {
        return Err(Error::Precondition("rank must be positive".into()));
    }
    check_len(alpha, "α")?;
    check_len(beta, "β")?;
    if c.rows() != K3_RANK || c.cols() != K3_RANK {
        return Err(Error::Dimension(format!("C must be {K3_RANK}x{K3_RANK}")));
    }
    let zero = BigRational::zero();
    let c1 = KunnethKernel::pullback_s(zero.clone(), &vector::to_rat(alpha), zero.clone())?
        .add(&KunnethKernel::pullback_m(zero.clone(), &vector::to_rat(beta), zero)?);
    let mut ch2 = KunnethKernel::zero();
    ch2.parts[1][1] = c.to_rat();
    let sq = c1.mul_truncated(&c1, 4);
    Ok(ch2.sub(&sq.scale(&BigRational::new(BigInt::one(), BigInt::from(2) * n))))
}

/// `Λ / I_ψ` for the `H²` map `ψ` of `κ₂` with `α = kx`, `β = jy`.
pub fn sheaf_isometry_domain(
    n: &BigInt,
    k: &BigInt,
    j: &BigInt,
    x: &[BigInt],
    y: &[BigInt],
    c: &IntMatrix,
) -> Result<QuotientStructure> {
    check_len(x, "x")?;
    check_len(y, "y")?;
    for v in [x, y] {
        let content = vector::content(v);
        if content.is_zero() {
            return Err(Error::ZeroVector);
        }
        if !content.is_one() {
            return Err(Error::Imprimitive);
        }
    }
    let alpha: Vec<BigInt> = x.iter().map(|v| v * k).collect();
    let beta: Vec<BigInt> = y.iter().map(|v| v * j).collect();
    if !n.is_positive() {
        return Err(Error::Precondition("rank must be positive".into()));
    }
    if c.rows() != K3_RANK || c.cols() != K3_RANK {
        return Err(Error::Dimension(format!("C must be {K3_RANK}x{K3_RANK}")));
    }
    let basis = kernel_mod(&sheaf_h2_numerator(c, &alpha, &beta, n), n);
    Ok(QuotientStructure::from_divisors(quotient_divisors(&basis)?))
}

/// `n ψ` for `ψ` the induced map of `kappa_two(c, α, β, n)`: the (2,2) part of
/// κ is `C − α ⊗ β / n`.
fn sheaf_h2_numerator(c: &IntMatrix, alpha: &[BigInt], beta: &[BigInt], n: &BigInt) -> IntMatrix {
    let z = IntMatrix::from_fn(K3_RANK, K3_RANK, |i, j| n * c.get(i, j) - &alpha[i] * &beta[j]);
    &z.transpose() * k3().gram()
}

/// Outcome of the universal-sheaf expansion for given `(n, s, j)`.
#[derive(Clone, Debug)]
pub struct UniversalExampleReport {
    pub n: i64,
    pub s: i64,
    pub j: i64,
    pub k: i64,
    pub sign: i64,
    pub mukai_vector_isotropic: bool,
    pub c2_coefficient: i64,
    pub image_of_h: Vec<BigRational>,
    pub h_hat: Vec<BigInt>,
    pub holds: bool,
}

/// Expands `sign · κ(E^∨)√td` in degree four for the model data
/// `h = ĥ = e + ns f`, `c1(E^∨) = −π_S*h − j π_M*ĥ` and a `c2` whose
/// `(2,2)` part sends `h` to `(1 + 2(n−1)sj) ĥ`, then applies the induced
/// map to `h`.
pub fn verify_universal_example(n: i64, s: i64, j: i64, sign: i64) -> Result<UniversalExampleReport> {
    if n <= 0 || s <= 0 || j <= 0 {
        return Err(Error::Precondition("n, s and j must be positive".into()));
    }
    if n.gcd(&s) != 1 {
        return Err(Error::Precondition(format!("gcd({n}, {s}) must be 1")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Precondition("sign must be ±1".into()));
    }
    let k = (1..=n).find(|k| (s * k - 1).rem_euclid(n) == 0).expect("s is a unit mod n");
    let (e, f) = u_summand(0);
    let mut h = vec![BigInt::zero(); K3_RANK];
    h[e] = BigInt::one();
    h[f] = BigInt::from(n * s);
    let h_rat = vector::to_rat(&h);
    let zero = BigRational::zero();
    let rank = BigRational::from_integer(BigInt::from(n));

    let minus_h = vector::scale(&h_rat, &-BigRational::one());
    let minus_jh = vector::scale(&h_rat, &BigRational::from_integer(BigInt::from(-j)));
    let c1 = KunnethKernel::pullback_s(zero.clone(), &minus_h, zero.clone())?
        .add(&KunnethKernel::pullback_m(zero.clone(), &minus_jh, zero.clone())?);
    // c2 in bidegree (2,2): λ f ⊗ ĥ with (h, f) = 1
    let lambda = 1 + 2 * (n - 1) * s * j;
    let mut w = vec![BigRational::zero(); K3_RANK];
    w[f] = BigRational::one();
    let c2 = KunnethKernel::pure_tensor(&w, &h_rat)?.scale(&BigRational::from_integer(BigInt::from(lambda)));

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let ch = KunnethKernel::one()
        .scale(&rank)
        .add(&c1)
        .add(&c1.mul_truncated(&c1, 4).sub(&c2.scale(&BigRational::from_integer(2.into()))).scale(&half));
    let twist = c1.scale(&-(BigRational::one() / &rank)).exp_truncated(4);
    let kappa = ch.mul_truncated(&twist, 4);
    let z = kappa
        .mul_truncated(&sqrt_todd_kernel(), 4)
        .degree_part(4)
        .scale(&BigRational::from_integer(BigInt::from(sign)));
    let image = induced_h2_map(&z).mul_vec(&h_rat)?;
    let mukai = MukaiVector::new(BigInt::from(n), h.clone(), BigInt::from(s))?;
    let holds = image == h_rat;
    Ok(UniversalExampleReport {
        n,
        s,
        j,
        k,
        sign,
        mukai_vector_isotropic: mukai.is_isotropic(),
        c2_coefficient: lambda,
        image_of_h: image,
        h_hat: h,
        holds,
    })
}

/// `(a, b)` on rational `H²` classes.
pub fn h2_pairing(a: &[BigRational], b: &[BigRational]) -> BigRational {
    vector::pair_rat(k3_gram_rat(), a, b)
}
