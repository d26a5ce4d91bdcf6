//! C ABI over `k3lat`.
//!
//! Lattices and isometries cross the boundary as opaque handles owned by the
//! caller and released with the matching `_free` function. Every entry point
//! returns a [`K3latStatus`]; on failure a message is available from
//! [`k3lat_last_error`] on the same thread. Matrices are row-major, rational
//! entries travel as separate numerator and denominator arrays, and values
//! that do not fit in 64 bits are reported as [`K3latStatus::Overflow`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use k3lat::exactlinalg::{IntMatrix, RatMatrix};
use k3lat::isometry::{cartan_dieudonne, cyclic_type, quotient_structure, reflection, RationalIsometry};
use k3lat::lattices::{standard_lattice, Lattice, K3_RANK, MUKAI_RANK};
use k3lat::mukai::{mukai_pairing, sheaf_isometry_domain, verify_universal_example, MukaiVector};
use k3lat::orbits::double_orbit_reduce;
use k3lat::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K3latStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotIsometry = 3,
    Singular = 4,
    NotCyclic = 5,
    CapExceeded = 6,
    Overflow = 7,
    BufferTooSmall = 8,
    Internal = 9,
    Panic = 10,
}

/// A lattice given by an even or odd integral Gram matrix.
pub struct K3latLattice(Lattice);

/// A rational isometry of a lattice.
pub struct K3latIsometry(RationalIsometry);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(K3latStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotIsometry(_) => K3latStatus::NotIsometry,
            Error::Singular | Error::Degenerate(_) | Error::RankDeficient(_) => K3latStatus::Singular,
            Error::NotCyclicType => K3latStatus::NotCyclic,
            Error::CapExceeded { .. } => K3latStatus::CapExceeded,
            Error::Invariant(_) => K3latStatus::Internal,
            _ => K3latStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Outcome) -> K3latStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            K3latStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside k3lat");
            K3latStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(K3latStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(K3latStatus::InvalidArgument, msg.into())
}

fn overflow(what: &str) -> Fail {
    Fail(K3latStatus::Overflow, format!("{what} does not fit in 64 bits"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Outcome {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn ints(p: *const i64, len: usize, what: &str) -> Result<Vec<BigInt>, Fail> {
    Ok(slice(p, len, what)?.iter().map(|&x| BigInt::from(x)).collect())
}

fn to_i64(x: &BigInt, what: &str) -> Result<i64, Fail> {
    x.to_i64().ok_or_else(|| overflow(what))
}

/// Copies `values` into a caller buffer of capacity `cap`; `len` always
/// receives the number of values.
unsafe fn fill(values: &[BigInt], out: *mut i64, cap: usize, len: *mut usize, what: &str) -> Outcome {
    write(len, values.len(), "length output")?;
    if values.len() > cap {
        return Err(Fail(K3latStatus::BufferTooSmall, format!("{what} needs {} slots, got {cap}", values.len())));
    }
    if !values.is_empty() && out.is_null() {
        return Err(null(what));
    }
    for (i, v) in values.iter().enumerate() {
        out.add(i).write(to_i64(v, what)?);
    }
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message describing the last failure on this thread, empty after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn k3lat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn k3lat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up `U`, `E8`, `E8_minus`, `K3` or `Mukai`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_lattice_standard(name: *const c_char, out: *mut *mut K3latLattice) -> K3latStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| invalid("name is not UTF-8"))?;
        let l = standard_lattice(name)?;
        write(out, boxed(K3latLattice(l)), "out")
    })
}

/// Lattice with the symmetric `rank x rank` Gram matrix `gram`.
///
/// # Safety
/// `gram` must hold `rank * rank` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_lattice_from_gram(
    rank: usize,
    gram: *const i64,
    out: *mut *mut K3latLattice,
) -> K3latStatus {
    guard(|| {
        let entries = ints(gram, rank * rank, "gram")?;
        let m = IntMatrix::from_vec(rank, rank, entries)?;
        let l = Lattice::new(m)?;
        write(out, boxed(K3latLattice(l)), "out")
    })
}

/// Rank of the lattice, or 0 for a null handle.
///
/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn k3lat_lattice_rank(lattice: *const K3latLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.rank())
}

/// The pairing `(v, w)` of two vectors of length `rank`.
///
/// # Safety
/// `v` and `w` must hold `rank` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_lattice_pair(
    lattice: *const K3latLattice,
    v: *const i64,
    w: *const i64,
    out: *mut i64,
) -> K3latStatus {
    guard(|| {
        let l = &deref(lattice, "lattice")?.0;
        let v = ints(v, l.rank(), "v")?;
        let w = ints(w, l.rank(), "w")?;
        write(out, to_i64(&l.pair(&v, &w), "pairing")?, "out")
    })
}

/// # Safety
/// `lattice` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn k3lat_lattice_free(lattice: *mut K3latLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Isometry with entries `num[i] / den[i]`, row-major. Fails with
/// `NotIsometry` when the matrix does not preserve the form.
///
/// # Safety
/// `num` and `den` must hold `rank * rank` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_new(
    lattice: *const K3latLattice,
    num: *const i64,
    den: *const i64,
    out: *mut *mut K3latIsometry,
) -> K3latStatus {
    guard(|| {
        let l = &deref(lattice, "lattice")?.0;
        let n = l.rank();
        let nums = slice(num, n * n, "num")?;
        let dens = slice(den, n * n, "den")?;
        if dens.contains(&0) {
            return Err(invalid("zero denominator"));
        }
        let entries = nums.iter().zip(dens).map(|(&p, &q)| BigRational::new(p.into(), q.into())).collect();
        let phi = RationalIsometry::new(l.clone(), RatMatrix::from_vec(n, n, entries)?)?;
        write(out, boxed(K3latIsometry(phi)), "out")
    })
}

/// Reflection in a primitive anisotropic vector `x` of length `rank`.
///
/// # Safety
/// `x` must hold `rank` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_reflection(
    lattice: *const K3latLattice,
    x: *const i64,
    out: *mut *mut K3latIsometry,
) -> K3latStatus {
    guard(|| {
        let l = &deref(lattice, "lattice")?.0;
        let x = ints(x, l.rank(), "x")?;
        write(out, boxed(K3latIsometry(reflection(l, &x)?)), "out")
    })
}

/// `a ∘ b`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_compose(
    a: *const K3latIsometry,
    b: *const K3latIsometry,
    out: *mut *mut K3latIsometry,
) -> K3latStatus {
    guard(|| {
        let c = deref(a, "a")?.0.compose(&deref(b, "b")?.0)?;
        write(out, boxed(K3latIsometry(c)), "out")
    })
}

/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_inverse(
    phi: *const K3latIsometry,
    out: *mut *mut K3latIsometry,
) -> K3latStatus {
    guard(|| {
        let inv = deref(phi, "phi")?.0.inverse();
        write(out, boxed(K3latIsometry(inv)), "out")
    })
}

/// Size of the matrix, or 0 for a null handle.
///
/// # Safety
/// `phi` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_rank(phi: *const K3latIsometry) -> usize {
    phi.as_ref().map_or(0, |p| p.0.lattice().rank())
}

/// Entry `(row, col)` in lowest terms with a positive denominator.
///
/// # Safety
/// `phi` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_entry(
    phi: *const K3latIsometry,
    row: usize,
    col: usize,
    num: *mut i64,
    den: *mut i64,
) -> K3latStatus {
    guard(|| {
        let m = deref(phi, "phi")?.0.matrix();
        if row >= m.rows() || col >= m.cols() {
            return Err(invalid(format!("entry ({row}, {col}) outside a {}x{} matrix", m.rows(), m.cols())));
        }
        let x = m.get(row, col);
        write(num, to_i64(x.numer(), "numerator")?, "num")?;
        write(den, to_i64(x.denom(), "denominator")?, "den")
    })
}

/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_is_integral(phi: *const K3latIsometry, out: *mut bool) -> K3latStatus {
    guard(|| write(out, deref(phi, "phi")?.0.is_integral(), "out"))
}

/// # Safety
/// `phi` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn k3lat_isometry_free(phi: *mut K3latIsometry) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// Order `n` of `L / I_φ` when that group is cyclic; `NotCyclic` otherwise.
///
/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_cyclic_type(phi: *const K3latIsometry, out: *mut i64) -> K3latStatus {
    guard(|| {
        let n = cyclic_type(&deref(phi, "phi")?.0).ok_or(Error::NotCyclicType)?;
        write(out, to_i64(&n, "cyclic type")?, "out")
    })
}

/// Elementary divisors greater than one of `L / I_φ`. `len` receives the
/// count even when `cap` is too small.
///
/// # Safety
/// `out` must have room for `cap` values; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_quotient_divisors(
    phi: *const K3latIsometry,
    out: *mut i64,
    cap: usize,
    len: *mut usize,
) -> K3latStatus {
    guard(|| {
        let q = quotient_structure(&deref(phi, "phi")?.0);
        fill(&q.elementary_divisors, out, cap, len, "divisors")
    })
}

/// Writes `φ = g ∘ f_(a,b) ∘ h` with `g`, `h` integral. `left` and `right`
/// receive new handles for `g` and `h`.
///
/// # Safety
/// `phi` must be a live handle of cyclic type; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_double_orbit_reduce(
    phi: *const K3latIsometry,
    a: *mut i64,
    b: *mut i64,
    left: *mut *mut K3latIsometry,
    right: *mut *mut K3latIsometry,
) -> K3latStatus {
    guard(|| {
        let r = double_orbit_reduce(&deref(phi, "phi")?.0)?;
        if left.is_null() || right.is_null() {
            return Err(null("left or right"));
        }
        write(a, to_i64(&r.pair.a, "a")?, "a")?;
        write(b, to_i64(&r.pair.b, "b")?, "b")?;
        left.write(boxed(K3latIsometry(r.left)));
        right.write(boxed(K3latIsometry(r.right)));
        Ok(())
    })
}

/// Reflection vectors `x_1, ..., x_k` with `φ = r_{x_1} ∘ ... ∘ r_{x_k}`,
/// stored consecutively. `count` receives `k`; `out` needs `k * rank` slots.
///
/// # Safety
/// `out` must have room for `cap` values; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_cartan_dieudonne(
    phi: *const K3latIsometry,
    out: *mut i64,
    cap: usize,
    count: *mut usize,
) -> K3latStatus {
    guard(|| {
        let xs = cartan_dieudonne(&deref(phi, "phi")?.0)?;
        let flat: Vec<BigInt> = xs.iter().flat_map(|x| x.coords().iter().cloned()).collect();
        let mut slots = 0usize;
        fill(&flat, out, cap, &mut slots, "reflection vectors")?;
        write(count, xs.len(), "count")
    })
}

/// Mukai pairing of two vectors `(r, c_1..c_22, s)`.
///
/// # Safety
/// `v` and `w` must hold 24 values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_mukai_pairing(v: *const i64, w: *const i64, out: *mut i64) -> K3latStatus {
    guard(|| {
        let v = MukaiVector::from_coords(&ints(v, MUKAI_RANK, "v")?)?;
        let w = MukaiVector::from_coords(&ints(w, MUKAI_RANK, "w")?)?;
        write(out, to_i64(&mukai_pairing(&v, &w), "pairing")?, "out")
    })
}

/// Elementary divisors greater than one of `L / I_ψ` for the sheaf kernel
/// with `c1 = k π*x + j π̂*y` and integral part `c` (22x22, row-major; null
/// means zero).
///
/// # Safety
/// `x`, `y` must hold 22 values and `c`, when not null, 484; `out` must have
/// room for `cap` values and `len` be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_sheaf_domain(
    n: i64,
    k: i64,
    j: i64,
    x: *const i64,
    y: *const i64,
    c: *const i64,
    out: *mut i64,
    cap: usize,
    len: *mut usize,
) -> K3latStatus {
    guard(|| {
        let x = ints(x, K3_RANK, "x")?;
        let y = ints(y, K3_RANK, "y")?;
        let c = if c.is_null() {
            IntMatrix::zeros(K3_RANK, K3_RANK)
        } else {
            IntMatrix::from_vec(K3_RANK, K3_RANK, ints(c, K3_RANK * K3_RANK, "c")?)?
        };
        let q = sheaf_isometry_domain(&n.into(), &k.into(), &j.into(), &x, &y, &c)?;
        fill(&q.elementary_divisors, out, cap, len, "divisors")
    })
}

/// Checks that the degree-four kernel of the universal family sends `h` to
/// `ĥ`. `k` receives the inverse of `s` mod `n`.
///
/// # Safety
/// `holds` and `k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3lat_universal_example(
    n: i64,
    s: i64,
    j: i64,
    sign: i64,
    holds: *mut bool,
    k: *mut i64,
) -> K3latStatus {
    guard(|| {
        let r = verify_universal_example(n, s, j, sign)?;
        write(holds, r.holds, "holds")?;
        write(k, r.k, "k")
    })
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(k3lat_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn errors_set_and_clear_the_message() {
        let mut l: *mut K3latLattice = ptr::null_mut();
        let name = CString::new("nope").unwrap();
        assert_eq!(unsafe { k3lat_lattice_standard(name.as_ptr(), &mut l) }, K3latStatus::InvalidArgument);
        assert!(last_error().contains("nope"));
        let name = CString::new("U").unwrap();
        assert_eq!(unsafe { k3lat_lattice_standard(name.as_ptr(), &mut l) }, K3latStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(unsafe { k3lat_lattice_rank(l) }, 2);
        unsafe { k3lat_lattice_free(l) };
    }

    #[test]
    fn null_handles_are_rejected() {
        let mut out = 0i64;
        assert_eq!(unsafe { k3lat_cyclic_type(ptr::null(), &mut out) }, K3latStatus::NullPointer);
        assert_eq!(unsafe { k3lat_lattice_rank(ptr::null()) }, 0);
        unsafe { k3lat_isometry_free(ptr::null_mut()) };
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(k3lat_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
