//! The C ABI exercised from Rust, plus a syntax check of the generated header.

use std::ffi::CStr;
use std::path::PathBuf;
use std::ptr;

use hurwitz_frobenius_ffi::*;

fn z(re: f64, im: f64) -> HfComplex {
    HfComplex { re, im }
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { hf_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn lemniscatic() -> *mut HfCovering {
    let lambda = [z(1.0, 0.0), z(0.0, 0.0), z(-1.0, 0.0)];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hf_covering_new(lambda.as_ptr(), &mut h) }, HfStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn covering_periods_and_coordinates() {
    let h = lemniscatic();
    let (mut mu, mut omega) = (z(0.0, 0.0), z(0.0, 0.0));
    assert_eq!(unsafe { hf_covering_periods(h, &mut mu, &mut omega) }, HfStatus::Ok);
    assert!((mu.re).abs() < 1e-12 && (mu.im - 1.0).abs() < 1e-12);
    assert!((omega.re.abs() - 1.311028777146060).abs() < 1e-12);

    let mut t = [z(0.0, 0.0); 6];
    let mut dim = 0usize;
    let st = unsafe { hf_flat_coordinates(h, 0, z(0.0, 0.0), t.as_mut_ptr(), t.len(), &mut dim) };
    assert_eq!(st, HfStatus::Ok);
    assert_eq!(dim, 3);
    assert!((t[2].re - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);

    let st = unsafe { hf_flat_coordinates(h, 2, z(0.0, 0.0), t.as_mut_ptr(), 3, &mut dim) };
    assert_eq!(st, HfStatus::BufferTooSmall);
    assert_eq!(dim, 6);
    assert!(last_error().contains("need 6"));

    let st = unsafe { hf_flat_coordinates(h, 2, z(0.0, 0.0), t.as_mut_ptr(), t.len(), &mut dim) };
    assert_eq!(st, HfStatus::Ok);
    let mut f = z(0.0, 0.0);
    assert_eq!(unsafe { hf_eval_f(2, z(0.0, 0.0), t.as_ptr(), 6, &mut f) }, HfStatus::Ok);
    assert!(f.im.abs() < 1e-9 * f.re.abs().max(1.0));
    let mut g = z(0.0, 0.0);
    assert_eq!(unsafe { hf_eval_g(2, z(0.0, 0.0), t.as_ptr(), 6, 0, &mut g) }, HfStatus::Ok);
    assert_eq!(unsafe { hf_eval_g(2, z(0.0, 0.0), t.as_ptr(), 6, 1, &mut g) }, HfStatus::Ok);
    unsafe { hf_covering_free(h) };
}

#[test]
fn holo_value_and_wdvv() {
    let t = [z(1.0, 0.0), z(0.0, 0.0), z(0.0, 1.0 / (2.0 * std::f64::consts::PI))];
    let mut f = z(0.0, 0.0);
    assert_eq!(unsafe { hf_eval_f(0, z(0.0, 0.0), t.as_ptr(), 3, &mut f) }, HfStatus::Ok);
    assert!((f.im - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15 && f.re.abs() < 1e-15);

    let p = [z(0.3, 0.1), z(0.8, -0.2), z(0.094, 0.01), z(0.4, -0.3), z(0.7, 0.25), z(0.022, -0.08)];
    let mut r = f64::NAN;
    assert_eq!(unsafe { hf_wdvv_residual(1, z(0.0, 0.0), p.as_ptr(), 6, &mut r) }, HfStatus::Ok);
    assert!(r < 1e-7, "{r}");
}

#[test]
fn error_codes_and_messages() {
    let same = [z(1.0, 0.0), z(1.0, 0.0), z(-1.0, 0.0)];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hf_covering_new(same.as_ptr(), &mut h) }, HfStatus::Degeneracy);
    assert!(h.is_null());
    assert!(last_error().contains("coincident"));

    assert_eq!(unsafe { hf_covering_new(ptr::null(), &mut h) }, HfStatus::NullPointer);
    assert_eq!(last_error(), "null pointer argument");

    let t = [z(1.0, 0.0), z(0.5, 0.0), z(-0.1, 0.0)];
    let mut f = z(0.0, 0.0);
    assert_eq!(unsafe { hf_eval_f(0, z(0.0, 0.0), t.as_ptr(), 3, &mut f) }, HfStatus::Domain);
    assert_eq!(unsafe { hf_eval_f(7, z(0.0, 0.0), t.as_ptr(), 3, &mut f) }, HfStatus::Usage);
    assert!(last_error().contains("unknown kind"));
    assert_eq!(unsafe { hf_eval_f(3, z(0.0, 0.0), t.as_ptr(), 3, &mut f) }, HfStatus::Domain);

    // truncation keeps the terminator and reports the full length
    let mut small = [0 as std::ffi::c_char; 4];
    let n = unsafe { hf_last_error_message(small.as_mut_ptr(), small.len()) };
    assert!(n > 3);
    assert_eq!(unsafe { CStr::from_ptr(small.as_ptr()) }.to_bytes().len(), 3);
    assert_eq!(unsafe { hf_last_error_message(ptr::null_mut(), 0) }, n);
    unsafe { hf_covering_free(ptr::null_mut()) };
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hurwitz_frobenius.h")
}

#[test]
fn header_declares_every_function() {
    let text = std::fs::read_to_string(header()).unwrap();
    for f in [
        "hf_covering_new",
        "hf_covering_free",
        "hf_covering_periods",
        "hf_flat_coordinates",
        "hf_eval_f",
        "hf_eval_g",
        "hf_wdvv_residual",
        "hf_last_error_message",
        "HF_STATUS_BUFFER_TOO_SMALL",
        "typedef struct HfCovering HfCovering",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; header syntax check skipped");
        return;
    };
    let src = std::env::temp_dir().join(format!("hf-capi-{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"hurwitz_frobenius.h\"\n\
         int main(void) {\n\
           HfComplex l[3] = {{1, 0}, {0, 0}, {-1, 0}};\n\
           HfCovering *h = 0;\n\
           if (hf_covering_new(l, &h) != HF_STATUS_OK) return 1;\n\
           hf_covering_free(h);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(include)
        .arg(&src)
        .output()
        .unwrap();
    std::fs::remove_file(&src).ok();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<String, ()> {
    for c in ["cc", "gcc", "clang"] {
        if std::process::Command::new(c).arg("--version").output().is_ok() {
            return Ok(c.to_string());
        }
    }
    Err(())
}
