use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bellgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellgame")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn kv(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(' ').map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("bellgame-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn golden(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name).to_str().unwrap().to_string()
}

#[test]
fn catalog_matches_golden_files() {
    for (args, file) in [
        (vec!["catalog", "chsh"], "chsh.bell"),
        (vec!["catalog", "chsh", "--as", "game"], "chsh.game"),
        (vec!["catalog", "gisin", "--n", "3"], "gisin3.bell"),
        (vec!["catalog", "three-qutrit"], "three_qutrit.bell"),
        (vec!["catalog", "three-qutrit", "--as", "game"], "three_qutrit.game"),
    ] {
        let text = stdout(&bellgame(&args));
        assert_eq!(text, std::fs::read_to_string(golden(file)).unwrap(), "{file}");
    }
}

#[test]
fn convert_chain_returns_to_start() {
    let dir = Scratch::new("convert");
    let (w, c) = (dir.path("w.bell"), dir.path("c.bell"));
    stdout(&bellgame(&["convert", "--in", &golden("chsh.bell"), "--to", "weighted", "--out", &w]));
    stdout(&bellgame(&["convert", "--in", &w, "--to", "correlation", "--out", &c]));
    assert_eq!(std::fs::read_to_string(c).unwrap(), std::fs::read_to_string(golden("chsh.bell")).unwrap());
}

#[test]
fn game_to_bell_recovers_the_window() {
    let text = stdout(&bellgame(&["convert", "--in", &golden("chsh.game"), "--to", "weighted"]));
    assert!(text.contains("smin 0.25\n") && text.contains("smax 0.75\n"), "{text}");
}

#[test]
fn classical_kv_output() {
    let text = stdout(&bellgame(&["classical", "--in", &golden("chsh.bell"), "--format", "kv"]));
    assert_eq!(kv(&text, "p_c_max"), "0.75");
    assert_eq!(kv(&text, "p_c_min"), "0.25");
    assert_eq!(kv(&text, "bound"), "2");
    assert_eq!(kv(&text, "strategies"), "16");
}

#[test]
fn table_output_has_header() {
    let text = stdout(&bellgame(&["classical", "--in", &golden("chsh.game")]));
    assert!(text.starts_with("quantity"), "{text}");
}

#[test]
fn quantum_methods_agree_on_chsh() {
    let xor = stdout(&bellgame(&["quantum", "--in", &golden("chsh.bell"), "--method", "xor", "--format", "kv"]));
    let seesaw = stdout(&bellgame(&[
        "quantum", "--in", &golden("chsh.game"), "--method", "seesaw", "--dims", "2,2", "--restarts", "4",
        "--format", "kv",
    ]));
    let (a, b): (f64, f64) = (kv(&xor, "p_q").parse().unwrap(), kv(&seesaw, "p_q").parse().unwrap());
    let exact = (std::f64::consts::PI / 8.0).cos().powi(2);
    assert!((a - exact).abs() < 1e-9);
    assert!(b <= exact + 1e-9 && b > exact - 1e-6, "{b}");
}

#[test]
fn quantum_witness_is_written() {
    let dir = Scratch::new("witness");
    let w = dir.path("q.strategy");
    stdout(&bellgame(&["quantum", "--in", &golden("chsh.bell"), "--method", "xor", "--witness", &w]));
    assert!(std::fs::read_to_string(w).unwrap().starts_with("strategy quantum v1\n"));
}

#[test]
fn simulate_with_classical_witness_is_reproducible() {
    let dir = Scratch::new("simulate");
    let w = dir.path("w.strategy");
    stdout(&bellgame(&["classical", "--in", &golden("chsh.game"), "--witness", &w]));
    let args = ["simulate", "--in", &golden("chsh.game"), "--strategy", &w, "--rounds", "20000", "--seed", "5", "--format", "kv"];
    let (a, b) = (stdout(&bellgame(&args)), stdout(&bellgame(&args)));
    assert_eq!(a, b);
    assert_eq!(kv(&a, "analytic_rate"), "0.75");
    let rate: f64 = kv(&a, "empirical_rate").parse().unwrap();
    assert!((rate - 0.75).abs() < 0.02);
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |t: &str| {
        stdout(&bellgame(&["--threads", t, "classical", "--in", &golden("three_qutrit.game"), "--format", "kv"]))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn exit_codes() {
    assert_eq!(bellgame(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bellgame(&["classical", "--in", "/no/such/file"]).status.code(), Some(1));
    assert_eq!(bellgame(&["classical", "--in", &golden("chsh.bell"), "--cap", "2"]).status.code(), Some(2));

    let dir = Scratch::new("exit");
    let bad = dir.path("bad.bell");
    std::fs::write(&bad, "bell correlation v1\nparties 2\nsettings 2 2\ncoeff 1 1 one\nbound 1\n").unwrap();
    let out = bellgame(&["classical", "--in", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}
