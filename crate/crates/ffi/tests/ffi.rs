use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use typealign_ffi::*;

const PROFILES_A: &str = "A1\ta:1\tb:1\tc:1\nA2\tx:2\n";
const PROFILES_B: &str = "B1\tb:1\tc:1\td:1\nB2\tx:1\ty:1\n";

fn fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let a = dir.join("a.tsv");
    let b = dir.join("b.tsv");
    std::fs::write(&a, PROFILES_A).unwrap();
    std::fs::write(&b, PROFILES_B).unwrap();
    (a, b)
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn cpath(p: &Path) -> CString {
    c(p.to_str().unwrap())
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ta_last_error()) }.to_str().unwrap().to_string()
}

struct Fixture {
    _dir: tempfile::TempDir,
    a: *mut TaProfileSet,
    b: *mut TaProfileSet,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let (pa, pb) = fixture(dir.path());
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(ta_profiles_load(cpath(&pa).as_ptr(), &mut a), TaStatus::Ok);
            assert_eq!(ta_profiles_load(cpath(&pb).as_ptr(), &mut b), TaStatus::Ok);
        }
        Fixture { _dir: dir, a, b }
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe {
            ta_profiles_free(self.a);
            ta_profiles_free(self.b);
        }
    }
}

#[test]
fn align_score_and_rank() {
    let f = Fixture::new();
    unsafe {
        assert_eq!(ta_profiles_len(f.a), 2);
        let mut t = ptr::null_mut();
        assert_eq!(ta_align(f.a, f.b, TA_MEASURES_ALL, &mut t), TaStatus::Ok);
        assert_eq!(ta_table_len(t), 4);

        let mut score = 0.0;
        let (a1, b1) = (c("A1"), c("B1"));
        assert_eq!(
            ta_table_score(t, a1.as_ptr(), b1.as_ptr(), TA_MEASURE_JACCARD, &mut score),
            TaStatus::Ok
        );
        assert_eq!(score, 0.5);
        assert_eq!(
            ta_table_score(t, a1.as_ptr(), b1.as_ptr(), TA_MEASURE_G_JACCARD, &mut score),
            TaStatus::Ok
        );
        assert_eq!(score, 0.5);
        let mut direct = 0.0;
        assert_eq!(
            ta_profiles_score(f.a, a1.as_ptr(), f.b, b1.as_ptr(), TA_MEASURE_G_JACCARD, &mut direct),
            TaStatus::Ok
        );
        assert_eq!(direct, score);

        let mut n = 0usize;
        assert_eq!(
            ta_table_threshold_count(t, TA_MEASURE_LOG_TF, 0.5, &mut n),
            TaStatus::Ok
        );
        assert_eq!(n, 2);
        assert_eq!(
            ta_table_threshold_count(t, TA_MEASURE_LOG_TF, 1.5, &mut n),
            TaStatus::InvalidArgument
        );

        let mut r = ptr::null_mut();
        assert_eq!(
            ta_table_top_k(t, a1.as_ptr(), TA_MEASURE_JACCARD, 1, &mut r),
            TaStatus::Ok
        );
        assert_eq!(ta_ranking_len(r), 1);
        assert_eq!(CStr::from_ptr(ta_ranking_target(r, 0)).to_str().unwrap(), "B1");
        assert_eq!(ta_ranking_score(r, 0), 0.5);
        assert!(ta_ranking_target(r, 1).is_null());
        ta_ranking_free(r);
        ta_table_free(t);
    }
}

#[test]
fn table_round_trips_through_tsv() {
    let f = Fixture::new();
    let dir = tempfile::tempdir().unwrap();
    let path = cpath(&dir.path().join("t.tsv"));
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(ta_align(f.a, f.b, 1 << TA_MEASURE_LOG_TF, &mut t), TaStatus::Ok);
        assert_eq!(ta_table_save(t, path.as_ptr()), TaStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ta_table_load(path.as_ptr(), &mut back), TaStatus::Ok);
        assert_eq!(ta_table_len(back), 4);
        let mut score = 0.0;
        let (a1, b1) = (c("A1"), c("B1"));
        assert_eq!(
            ta_table_score(back, a1.as_ptr(), b1.as_ptr(), TA_MEASURE_LOG_TF, &mut score),
            TaStatus::Ok
        );
        assert!((score - (5.0f64 / 3.0).log2()).abs() < 5e-7);
        assert_eq!(
            ta_table_score(back, a1.as_ptr(), b1.as_ptr(), TA_MEASURE_JACCARD, &mut score),
            TaStatus::InvalidArgument
        );
        assert!(last_error().contains("jaccard"), "{}", last_error());
        ta_table_free(t);
        ta_table_free(back);
    }
}

#[test]
fn error_codes() {
    let f = Fixture::new();
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(ta_profiles_load(ptr::null(), &mut p), TaStatus::NullArgument);
        let missing = c("/no/such/profiles.tsv");
        assert_eq!(ta_profiles_load(missing.as_ptr(), &mut p), TaStatus::Io);
        assert!(last_error().contains("/no/such/profiles.tsv"));
        assert!(p.is_null());

        let bad = [0xffu8, 0];
        assert_eq!(ta_profiles_load(bad.as_ptr().cast(), &mut p), TaStatus::InvalidUtf8);

        let dir = tempfile::tempdir().unwrap();
        let malformed = dir.path().join("m.tsv");
        std::fs::write(&malformed, "T\tnocolon\n").unwrap();
        assert_eq!(ta_profiles_load(cpath(&malformed).as_ptr(), &mut p), TaStatus::Format);

        let mut t = ptr::null_mut();
        assert_eq!(ta_align(f.a, f.b, 0, &mut t), TaStatus::InvalidArgument);
        assert_eq!(ta_align(f.a, f.b, 8, &mut t), TaStatus::InvalidArgument);
        assert_eq!(ta_align(f.a, ptr::null(), 1, &mut t), TaStatus::NullArgument);
        assert_eq!(ta_align(f.a, f.b, 1, ptr::null_mut()), TaStatus::NullArgument);

        let mut s = 0.0;
        let (a1, zz) = (c("A1"), c("ZZ"));
        assert_eq!(
            ta_profiles_score(f.a, a1.as_ptr(), f.b, zz.as_ptr(), 0, &mut s),
            TaStatus::NotFound
        );
        assert_eq!(
            ta_profiles_score(f.a, a1.as_ptr(), f.b, a1.as_ptr(), 9, &mut s),
            TaStatus::InvalidArgument
        );

        assert_eq!(ta_profiles_len(ptr::null()), 0);
        ta_profiles_free(ptr::null_mut());
        ta_table_free(ptr::null_mut());
        ta_ranking_free(ptr::null_mut());
        assert!(ta_ranking_score(ptr::null(), 0).is_nan());
    }
    let v = unsafe { CStr::from_ptr(ta_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles the C smoke program against the generated header and the static
/// library, then runs it on the fixture.
#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("typealign.h").is_file());
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libtypealign_ffi.a");
    assert!(lib.is_file(), "static library not found at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = fixture(dir.path());
    let bin = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap_or_else(|e| panic!("cannot run {cc}: {e}"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).arg(&pa).arg(&pb).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
