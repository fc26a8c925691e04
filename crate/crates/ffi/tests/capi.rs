use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use bellgame_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bg_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn chsh_values_through_handles() {
    unsafe {
        let mut corr = ptr::null_mut();
        assert_eq!(bg_correlation_chsh(&mut corr), BgStatus::Ok);

        let mut bound = 0.0;
        assert_eq!(bg_correlation_classical_bound(corr, 1_000_000, &mut bound), BgStatus::Ok);
        assert_eq!(bound, 2.0);

        let mut q = 0.0;
        assert_eq!(bg_correlation_xor_value(corr, 8, 1, &mut q), BgStatus::Ok);
        assert!((q - (std::f64::consts::PI / 8.0).cos().powi(2)).abs() < 1e-9);

        let mut game = ptr::null_mut();
        assert_eq!(bg_correlation_to_game(corr, &mut game), BgStatus::Ok);
        let (mut max, mut min) = (0.0, 0.0);
        assert_eq!(bg_game_classical_value(game, 1_000_000, &mut max, &mut min), BgStatus::Ok);
        assert_eq!((max, min), (0.75, 0.25));

        let dims = [2usize, 2];
        let mut s = 0.0;
        assert_eq!(bg_game_seesaw_value(game, dims.as_ptr(), 2, 4, 0, &mut s), BgStatus::Ok);
        assert!(s > 0.8535 && s < 0.8536, "{s}");

        bg_game_free(game);
        bg_correlation_free(corr);
    }
}

#[test]
fn text_round_trip() {
    unsafe {
        let mut corr = ptr::null_mut();
        assert_eq!(bg_correlation_gisin(3, &mut corr), BgStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(bg_correlation_to_text(corr, &mut text), BgStatus::Ok);
        let owned = CStr::from_ptr(text).to_str().unwrap().to_string();
        assert!(owned.ends_with("bound 5\n"));

        let mut again = ptr::null_mut();
        assert_eq!(bg_correlation_parse(text, &mut again), BgStatus::Ok);
        let mut text2 = ptr::null_mut();
        assert_eq!(bg_correlation_to_text(again, &mut text2), BgStatus::Ok);
        assert_eq!(CStr::from_ptr(text2).to_str().unwrap(), owned);

        bg_string_free(text);
        bg_string_free(text2);
        bg_correlation_free(again);
        bg_correlation_free(corr);
    }
}

#[test]
fn game_text_and_three_qutrit() {
    unsafe {
        let mut game = ptr::null_mut();
        assert_eq!(bg_game_three_qutrit(&mut game), BgStatus::Ok);
        let (mut max, mut min) = (0.0, 0.0);
        assert_eq!(bg_game_classical_value(game, 1000, &mut max, &mut min), BgStatus::Ok);
        assert!((max - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(min, 0.0);

        let mut text = ptr::null_mut();
        assert_eq!(bg_game_to_text(game, &mut text), BgStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(bg_game_parse(text, &mut back), BgStatus::Ok);
        bg_string_free(text);
        bg_game_free(back);
        bg_game_free(game);
    }
}

#[test]
fn error_statuses() {
    unsafe {
        let mut corr = ptr::null_mut();
        let bad = CString::new("bell correlation v1\nparties 2\nsettings 2 2\ncoeff 1 1 x\nbound 1\n").unwrap();
        assert_eq!(bg_correlation_parse(bad.as_ptr(), &mut corr), BgStatus::Syntax);
        assert!(last_error().contains("line 4"), "{}", last_error());
        assert!(corr.is_null());

        let v2 = CString::new("bell correlation v2\n").unwrap();
        assert_eq!(bg_correlation_parse(v2.as_ptr(), &mut corr), BgStatus::Unsupported);

        let unnormalized =
            CString::new("game v1\nparties 1\nsettings 1\nalphabet 1 1 0 1\nprob 1 0.9\nwin 1 : (0)\n").unwrap();
        let mut game = ptr::null_mut();
        assert_eq!(bg_game_parse(unnormalized.as_ptr(), &mut game), BgStatus::Validation);
        assert!(last_error().contains("distribution-not-normalized"));

        let invalid_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(bg_game_parse(invalid_utf8.as_ptr().cast(), &mut game), BgStatus::InvalidUtf8);
        assert_eq!(bg_game_parse(ptr::null(), &mut game), BgStatus::NullArgument);

        let mut q = 0.0;
        assert_eq!(bg_correlation_xor_value(ptr::null(), 1, 0, &mut q), BgStatus::NullArgument);

        assert_eq!(bg_correlation_gisin(6, &mut corr), BgStatus::Ok);
        let mut bound = 0.0;
        assert_eq!(bg_correlation_classical_bound(corr, 10, &mut bound), BgStatus::Solver);
        bg_correlation_free(corr);

        assert_eq!(bg_game_three_qutrit(&mut game), BgStatus::Ok);
        let dims = [5usize, 5, 5];
        assert_eq!(bg_game_seesaw_value(game, dims.as_ptr(), 3, 1, 0, &mut q), BgStatus::Solver);
        bg_game_free(game);

        bg_game_free(ptr::null_mut());
        bg_correlation_free(ptr::null_mut());
        bg_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(bg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bellgame.h")).unwrap();
    for name in [
        "bg_last_error",
        "bg_string_free",
        "bg_correlation_chsh",
        "bg_correlation_gisin",
        "bg_correlation_parse",
        "bg_correlation_to_text",
        "bg_correlation_classical_bound",
        "bg_correlation_xor_value",
        "bg_correlation_to_game",
        "bg_correlation_free",
        "bg_game_three_qutrit",
        "bg_game_parse",
        "bg_game_to_text",
        "bg_game_classical_value",
        "bg_game_seesaw_value",
        "bg_game_free",
        "bg_version",
        "typedef struct BgGame BgGame",
        "BG_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/bellgame.h");
    let status = Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn c_program_links_against_staticlib() {
    let Ok(cc) = which_cc() else { return };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let manifest = env!("CARGO_MANIFEST_DIR");
    // test builds only refresh the rlib
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "--quiet", "--lib", "--manifest-path", &format!("{manifest}/Cargo.toml")]);
    if profile_dir.ends_with("release") {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success());
    let lib = profile_dir.join("libbellgame_ffi.a");
    let out = std::env::temp_dir().join(format!("bellgame-smoke-{}", std::process::id()));
    let status = Command::new(cc)
        .arg(format!("{manifest}/tests/c/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
    let _ = std::fs::remove_file(out);
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
