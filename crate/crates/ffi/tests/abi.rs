use std::ffi::{CStr, CString};
use std::ptr;

use k3lat_ffi::*;

fn k3() -> *mut K3latLattice {
    let mut l = ptr::null_mut();
    let name = CString::new("K3").unwrap();
    assert_eq!(unsafe { k3lat_lattice_standard(name.as_ptr(), &mut l) }, K3latStatus::Ok);
    l
}

fn reflection_in(l: *const K3latLattice, d: i64) -> *mut K3latIsometry {
    let mut x = [0i64; 22];
    x[0] = 1;
    x[1] = d;
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { k3lat_isometry_reflection(l, x.as_ptr(), &mut r) }, K3latStatus::Ok);
    r
}

fn entries(phi: *const K3latIsometry) -> Vec<(i64, i64)> {
    let n = unsafe { k3lat_isometry_rank(phi) };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (mut p, mut q) = (0, 0);
            assert_eq!(unsafe { k3lat_isometry_entry(phi, i, j, &mut p, &mut q) }, K3latStatus::Ok);
            out.push((p, q));
        }
    }
    out
}

#[test]
fn reflection_cyclic_type_and_divisors() {
    let l = k3();
    for d in [-7i64, -1, 2, 5, 12] {
        let r = reflection_in(l, d);
        let mut n = 0;
        assert_eq!(unsafe { k3lat_cyclic_type(r, &mut n) }, K3latStatus::Ok);
        assert_eq!(n, d.abs());
        let mut buf = [0i64; 4];
        let mut len = 0;
        assert_eq!(unsafe { k3lat_quotient_divisors(r, buf.as_mut_ptr(), buf.len(), &mut len) }, K3latStatus::Ok);
        let expected: Vec<i64> = if d.abs() == 1 { vec![] } else { vec![d.abs()] };
        assert_eq!(&buf[..len], expected.as_slice());
        let mut integral = false;
        assert_eq!(unsafe { k3lat_isometry_is_integral(r, &mut integral) }, K3latStatus::Ok);
        assert_eq!(integral, d.abs() == 1);
        unsafe { k3lat_isometry_free(r) };
    }
    unsafe { k3lat_lattice_free(l) };
}

#[test]
fn reduction_handles_recompose() {
    let l = k3();
    let r = reflection_in(l, 6);
    let (mut a, mut b) = (0, 0);
    let (mut g, mut h) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { k3lat_double_orbit_reduce(r, &mut a, &mut b, &mut g, &mut h) }, K3latStatus::Ok);
    assert_eq!(a * b, 6);
    let mut integral = false;
    for side in [g, h] {
        assert_eq!(unsafe { k3lat_isometry_is_integral(side, &mut integral) }, K3latStatus::Ok);
        assert!(integral);
    }
    // g⁻¹ r h⁻¹ fixes the orthogonal complement of the first plane
    let (mut gi, mut hi, mut t, mut core) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(k3lat_isometry_inverse(g, &mut gi), K3latStatus::Ok);
        assert_eq!(k3lat_isometry_inverse(h, &mut hi), K3latStatus::Ok);
        assert_eq!(k3lat_isometry_compose(gi, r, &mut t), K3latStatus::Ok);
        assert_eq!(k3lat_isometry_compose(t, hi, &mut core), K3latStatus::Ok);
    }
    let m = entries(core);
    for i in 2..22 {
        for j in 0..22 {
            assert_eq!(m[i * 22 + j], ((i == j) as i64, 1), "entry ({i}, {j})");
        }
    }
    for p in [r, g, h, gi, hi, t, core] {
        unsafe { k3lat_isometry_free(p) };
    }
    unsafe { k3lat_lattice_free(l) };
}

#[test]
fn rational_isometry_from_entries_and_decomposition() {
    let gram = [0i64, 1, 1, 0];
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { k3lat_lattice_from_gram(2, gram.as_ptr(), &mut u) }, K3latStatus::Ok);
    let (num, den) = ([3i64, 0, 0, 2], [2i64, 1, 1, 3]);
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { k3lat_isometry_new(u, num.as_ptr(), den.as_ptr(), &mut f) }, K3latStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { k3lat_cyclic_type(f, &mut n) }, K3latStatus::Ok);
    assert_eq!(n, 6);

    let mut count = 0;
    let mut small = [0i64; 1];
    assert_eq!(
        unsafe { k3lat_cartan_dieudonne(f, small.as_mut_ptr(), small.len(), &mut count) },
        K3latStatus::BufferTooSmall
    );
    let mut buf = [0i64; 16];
    assert_eq!(unsafe { k3lat_cartan_dieudonne(f, buf.as_mut_ptr(), buf.len(), &mut count) }, K3latStatus::Ok);
    assert!(count >= 1 && count <= 4);
    let mut product: *mut K3latIsometry = ptr::null_mut();
    for i in 0..count {
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { k3lat_isometry_reflection(u, buf[2 * i..].as_ptr(), &mut r) }, K3latStatus::Ok);
        if product.is_null() {
            product = r;
        } else {
            let mut next = ptr::null_mut();
            assert_eq!(unsafe { k3lat_isometry_compose(product, r, &mut next) }, K3latStatus::Ok);
            unsafe {
                k3lat_isometry_free(product);
                k3lat_isometry_free(r);
            }
            product = next;
        }
    }
    assert_eq!(entries(product), entries(f));

    let bad = [1i64, 1, 0, 1];
    let ones = [1i64; 4];
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { k3lat_isometry_new(u, bad.as_ptr(), ones.as_ptr(), &mut g) }, K3latStatus::NotIsometry);
    assert!(g.is_null());
    unsafe {
        k3lat_isometry_free(product);
        k3lat_isometry_free(f);
        k3lat_lattice_free(u);
    }
}

#[test]
fn mukai_entry_points() {
    let mut v = [0i64; 24];
    v[0] = 2;
    v[23] = 3;
    let mut out = 0;
    assert_eq!(unsafe { k3lat_mukai_pairing(v.as_ptr(), v.as_ptr(), &mut out) }, K3latStatus::Ok);
    assert_eq!(out, -12);

    let (mut holds, mut k) = (false, 0);
    assert_eq!(unsafe { k3lat_universal_example(5, 2, 1, -1, &mut holds, &mut k) }, K3latStatus::Ok);
    assert!(holds);
    assert_eq!(k, 3);
    assert_eq!(unsafe { k3lat_universal_example(4, 6, 1, -1, &mut holds, &mut k) }, K3latStatus::InvalidArgument);

    let mut x = [0i64; 22];
    x[0] = 1;
    x[1] = 2;
    let mut y = [0i64; 22];
    y[2] = 1;
    y[3] = -1;
    let mut buf = [0i64; 22];
    let mut len = 0;
    let status = unsafe {
        k3lat_sheaf_domain(12, 2, 3, x.as_ptr(), y.as_ptr(), ptr::null(), buf.as_mut_ptr(), buf.len(), &mut len)
    };
    assert_eq!(status, K3latStatus::Ok);
    assert_eq!(&buf[..len], &[2]);
    x[1] = 0;
    x[0] = 2;
    let status = unsafe {
        k3lat_sheaf_domain(12, 2, 3, x.as_ptr(), y.as_ptr(), ptr::null(), buf.as_mut_ptr(), buf.len(), &mut len)
    };
    assert_eq!(status, K3latStatus::InvalidArgument);
    let msg = unsafe { CStr::from_ptr(k3lat_last_error()) }.to_string_lossy().into_owned();
    assert!(msg.contains("primitive"), "{msg}");
}
