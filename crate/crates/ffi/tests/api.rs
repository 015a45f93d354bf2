use std::ffi::CString;
use std::ptr;

use simplicial_spectra_ffi::*;

fn last_error() -> String {
    let n = unsafe { ss_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0u8; n + 1];
    unsafe { ss_last_error(buf.as_mut_ptr().cast(), buf.len()) };
    String::from_utf8(buf[..n].to_vec()).unwrap()
}

fn triangle() -> *mut SsComplex {
    let mut c = ptr::null_mut();
    let v = [0u32, 1, 2];
    assert_eq!(unsafe { ss_complex_new(v.as_ptr(), 1, 3, &mut c) }, SsStatus::SsOk);
    c
}

#[test]
fn complex_life_cycle() {
    let c = triangle();
    let mut dim = 0;
    assert_eq!(unsafe { ss_complex_dim(c, &mut dim) }, SsStatus::SsOk);
    assert_eq!(dim, 2);

    let mut sub = ptr::null_mut();
    assert_eq!(unsafe { ss_complex_subdivide(c, SsKind::SsBarycentric, 0, 1, &mut sub) }, SsStatus::SsOk);
    let mut len = 0;
    assert_eq!(unsafe { ss_complex_f_vector(sub, ptr::null_mut(), 0, &mut len) }, SsStatus::SsOk);
    assert_eq!(len, 3);
    let mut small = [0usize; 2];
    assert_eq!(unsafe { ss_complex_f_vector(sub, small.as_mut_ptr(), 2, &mut len) }, SsStatus::SsBufferTooSmall);
    assert_eq!(small, [0, 0]);
    let mut f = [0usize; 3];
    assert_eq!(unsafe { ss_complex_f_vector(sub, f.as_mut_ptr(), 3, &mut len) }, SsStatus::SsOk);
    assert_eq!(f, [7, 12, 6]);
    unsafe {
        ss_complex_free(sub);
        ss_complex_free(c);
        ss_complex_free(ptr::null_mut());
    }
}

#[test]
fn json_and_errors() {
    let mut c = ptr::null_mut();
    let bad = CString::new("{\"facets\": 3}").unwrap();
    assert_eq!(unsafe { ss_complex_from_json(bad.as_ptr(), &mut c) }, SsStatus::SsInvalidComplex);
    assert!(c.is_null());
    assert!(!last_error().is_empty());

    let good = CString::new("{\"facets\": [[0,1],[1,2]]}").unwrap();
    assert_eq!(unsafe { ss_complex_from_json(good.as_ptr(), &mut c) }, SsStatus::SsOk);
    assert!(last_error().is_empty());
    let mut sub = ptr::null_mut();
    assert_eq!(unsafe { ss_complex_subdivide(c, SsKind::SsEdgewise, 0, 1, &mut sub) }, SsStatus::SsInvalidArgument);
    assert_eq!(unsafe { ss_complex_dim(ptr::null(), ptr::null_mut()) }, SsStatus::SsNullPointer);
    assert_eq!(unsafe { ss_complex_subdivide(c, SsKind::SsCone, 0, 1, ptr::null_mut()) }, SsStatus::SsNullPointer);
    let mut m = 0.0;
    let mut l = 0.0;
    assert_eq!(unsafe { ss_renormalize(2, 1.0, 0.0, &mut m, &mut l) }, SsStatus::SsSingular);
    unsafe { ss_complex_free(c) };
}

#[test]
fn quantiles_and_distance() {
    let c = triangle();
    let mut sub = ptr::null_mut();
    let mut q = ptr::null_mut();
    let mut lim = ptr::null_mut();
    unsafe {
        assert_eq!(ss_complex_subdivide(c, SsKind::SsCone, 0, 1, &mut sub), SsStatus::SsOk);
        assert_eq!(ss_complex_top_quantile(sub, &mut q), SsStatus::SsOk);
        let mut len = 0;
        assert_eq!(ss_step_function_len(q, &mut len), SsStatus::SsOk);
        let (mut a, mut b, mut v) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
        let mut n = 0;
        assert_eq!(ss_step_function_steps(q, a.as_mut_ptr(), b.as_mut_ptr(), v.as_mut_ptr(), len, &mut n), SsStatus::SsOk);
        assert!(v.iter().zip([1.0, 4.0, 4.0]).all(|(x, y)| (x - y).abs() < 1e-12), "{v:?}");
        assert_eq!(a[0], 0.0);
        assert_eq!(b[len - 1], 1.0);
        let mut x = 0.0;
        assert_eq!(ss_step_function_eval(q, 0.1, &mut x), SsStatus::SsOk);
        assert!((x - 1.0).abs() < 1e-12);
        assert_eq!(ss_step_function_eval(q, 1.5, &mut x), SsStatus::SsInvalidArgument);

        assert_eq!(ss_limit_quantile_cd(2, 10, &mut lim), SsStatus::SsOk);
        let mut d = 0.0;
        assert_eq!(ss_l1_distance(q, lim, &mut d), SsStatus::SsOk);
        // same value as the convergence table at n = 1
        assert!((d - 0.634690782966).abs() < 1e-9, "{d}");
        ss_step_function_free(lim);
        ss_step_function_free(q);
        ss_complex_free(sub);
        ss_complex_free(c);
    }
}

#[test]
fn spectra_agree() {
    let mut len = 0;
    unsafe {
        assert_eq!(ss_schreier_spectrum(2, 3, ptr::null_mut(), 0, &mut len), SsStatus::SsOk);
        let mut ev = vec![0.0; len];
        assert_eq!(ss_schreier_spectrum(2, 3, ev.as_mut_ptr(), len, &mut len), SsStatus::SsOk);
        let mut k = 0;
        assert_eq!(ss_predicted_spectrum(2, 3, ptr::null_mut(), ptr::null_mut(), 0, &mut k), SsStatus::SsOk);
        let (mut vals, mut mult) = (vec![0.0; k], vec![0u64; k]);
        assert_eq!(ss_predicted_spectrum(2, 3, vals.as_mut_ptr(), mult.as_mut_ptr(), k, &mut k), SsStatus::SsOk);
        let flat: Vec<f64> = vals.iter().zip(&mult).flat_map(|(&v, &m)| std::iter::repeat_n(v, m as usize)).collect();
        assert_eq!(flat.len(), 27);
        assert!(flat.iter().zip(&ev).all(|(a, b)| (a - b).abs() < 1e-9));
        assert_eq!(ss_predicted_spectrum(1, 3, ptr::null_mut(), ptr::null_mut(), 0, &mut k), SsStatus::SsUnsupported);
    }
}
