use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qdiscord_ffi::*;

fn prepare(id: &str, p: f64) -> *mut QdState {
    let id = CString::new(id).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qd_state_prepare(id.as_ptr(), p, &mut out) }, QdStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = qd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rho1_quantifiers() {
    let rho = prepare("rho1", 0.0);
    unsafe {
        assert_eq!(qd_state_dim(rho), 4);
        let mut sv = [0.0; 4];
        assert_eq!(qd_singular_values(rho, sv.as_mut_ptr()), QdStatus::Ok);
        for (a, b) in sv.iter().zip([1.0, 1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        let mut d = f64::NAN;
        assert_eq!(qd_discord(rho, 1, &mut d), QdStatus::Ok);
        assert!(d.abs() < 1e-6);
        let mut rank = 0u32;
        assert_eq!(qd_correlation_rank(rho, 1e-7, &mut rank), QdStatus::Ok);
        assert_eq!(rank, 2);
        let mut mi = 0.0;
        assert_eq!(qd_mutual_information(rho, &mut mi), QdStatus::Ok);
        assert!((mi - 1.0).abs() < 1e-9);
        qd_state_free(rho);
    }
}

#[test]
fn dephasing_and_damping_produce_new_handles() {
    let rho = prepare("rho1", 0.0);
    unsafe {
        let mut cd = ptr::null_mut();
        assert_eq!(qd_apply_correlated_dephasing(rho, 0.0, 0.0, 1.0, &mut cd), QdStatus::Ok);
        let mut rank = 0u32;
        qd_correlation_rank(cd, 1e-7, &mut rank);
        assert_eq!(rank, 3);

        let mut damped = ptr::null_mut();
        assert_eq!(qd_apply_amplitude_damping(rho, 1.0, 1, &mut damped), QdStatus::Ok);
        let mut d_b = 1.0;
        qd_discord(damped, 1, &mut d_b);
        assert!(d_b.abs() < 1e-6);

        assert_eq!(qd_apply_correlated_dephasing(rho, 1.0, 1.0, 0.0, &mut cd), QdStatus::InvalidArgument);
        assert_eq!(qd_apply_amplitude_damping(rho, 0.5, 7, &mut damped), QdStatus::InvalidArgument);
        assert!(last_error().contains("side"));
        qd_state_free(cd);
        qd_state_free(damped);
        qd_state_free(rho);
    }
}

#[test]
fn werner_tangle_and_fidelity() {
    let w = prepare("werner", 1.0);
    let bell = prepare("bell_phi_plus", 0.0);
    unsafe {
        let mut t = 0.0;
        assert_eq!(qd_tangle(w, &mut t), QdStatus::Ok);
        assert!((t - 1.0).abs() < 1e-9);
        let mut c = 0.0;
        assert_eq!(qd_concurrence(w, &mut c), QdStatus::Ok);
        assert!((c - 1.0).abs() < 1e-9);
        let mut f = 0.0;
        assert_eq!(qd_fidelity(w, bell, &mut f), QdStatus::Ok);
        assert!((f - 1.0).abs() < 1e-9);
        qd_state_free(w);
        qd_state_free(bell);
    }
}

#[test]
fn matrix_round_trip_and_validation() {
    let rho = prepare("rho2", 0.0);
    unsafe {
        let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
        assert_eq!(qd_state_matrix(rho, re.as_mut_ptr(), im.as_mut_ptr()), QdStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qd_state_from_matrix(4, re.as_ptr(), im.as_ptr(), &mut back), QdStatus::Ok);
        let mut f = 0.0;
        qd_fidelity(rho, back, &mut f);
        assert!((f - 1.0).abs() < 1e-9);

        re[0] += 0.5;
        let mut bad = ptr::null_mut();
        assert_eq!(qd_state_from_matrix(4, re.as_ptr(), im.as_ptr(), &mut bad), QdStatus::NotAState);
        assert!(bad.is_null());
        assert_eq!(qd_state_from_matrix(3, re.as_ptr(), im.as_ptr(), &mut bad), QdStatus::InvalidArgument);
        qd_state_free(back);
        qd_state_free(rho);
    }
}

#[test]
fn qubit_handles_and_dimension_mismatch() {
    let re = [1.0, 0.0, 0.0, 0.0];
    let im = [0.0; 4];
    let two = prepare("plus_plus", 0.0);
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(qd_state_from_matrix(2, re.as_ptr(), im.as_ptr(), &mut q), QdStatus::Ok);
        assert_eq!(qd_state_dim(q), 2);
        let mut f = 0.0;
        assert_eq!(qd_fidelity(q, two, &mut f), QdStatus::InvalidArgument);
        assert!(last_error().contains("dimension"));
        assert_eq!(qd_discord(q, 0, &mut f), QdStatus::InvalidArgument);
        assert_eq!(qd_fidelity(q, q, &mut f), QdStatus::Ok);
        assert!((f - 1.0).abs() < 1e-12);
        qd_state_free(q);
        qd_state_free(two);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(qd_tangle(ptr::null(), &mut out), QdStatus::NullPointer);
        assert!(last_error().contains("state"));
        let rho = prepare("rho1", 0.0);
        assert_eq!(qd_tangle(rho, ptr::null_mut()), QdStatus::NullPointer);
        assert_eq!(qd_state_prepare(ptr::null(), 0.0, &mut ptr::null_mut()), QdStatus::NullPointer);
        assert_eq!(qd_state_dim(ptr::null()), 0);
        qd_state_free(ptr::null_mut());
        qd_state_free(rho);
    }
}

#[test]
fn unknown_state_id() {
    let id = CString::new("nope").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qd_state_prepare(id.as_ptr(), 0.0, &mut out) }, QdStatus::InvalidArgument);
    assert!(last_error().contains("nope"));
    let w = CString::new("werner").unwrap();
    assert_eq!(unsafe { qd_state_prepare(w.as_ptr(), 1.5, &mut out) }, QdStatus::InvalidArgument);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("qdiscord.h").exists());
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping header check");
        return;
    };
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        "#include \"qdiscord.h\"\n\
         int main(void) {\n\
           QdState *s = 0;\n\
           double sv[4];\n\
           if (qd_state_prepare(\"rho1\", 0.0, &s) != QD_STATUS_OK) return 1;\n\
           qd_singular_values(s, sv);\n\
           qd_state_free(s);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_header");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
