//! The `bellgame` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input (usage, parse or validation
//! errors), 2 solver failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog;
use crate::classical::{self, ClassicalConfig, ClassicalError, DEFAULT_CAP};
use crate::io::{self, format_real, Document, ParseError};
use crate::model::{
    CorrelationInequality, DeterministicStrategy, ModelError, NonlocalGame, QuantumMethod, QuantumStrategy,
    QuantumValue, ValueReport, WeightedSumInequality,
};
use crate::quantum::{self, QuantumError, SeesawConfig, XorSolveConfig};
use crate::simulate::{self, SimError, Strategy};
use crate::transform::{self, TransformError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bellgame", version, about = "Bell inequalities and nonlocal games")]
struct Cli {
    /// Worker threads for parallel solvers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output style for numeric results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Kv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert between correlation, weighted-sum and game files.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Exact classical value by enumeration.
    Classical {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Write the maximizing deterministic strategy here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Quantum value: exact for two-party XOR games, see-saw lower bound otherwise.
    Quantum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        opts: QuantumOpts,
        /// Write the optimal quantum strategy here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Play seeded rounds of a game with a strategy.
    Simulate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a built-in inequality or game.
    Catalog {
        #[command(subcommand)]
        entry: CatalogEntry,
        #[arg(long = "as", value_enum, default_value_t = As::Bell, global = true)]
        as_: As,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Classical value, quantum value and quantum advantage.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        opts: QuantumOpts,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
}

#[derive(Debug, Args)]
struct QuantumOpts {
    /// Local dimensions for the see-saw, comma separated (default: outcome counts).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    iters: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Game,
    Weighted,
    Correlation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Xor,
    Seesaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum As {
    Bell,
    Game,
}

#[derive(Debug, Subcommand)]
enum CatalogEntry {
    Chsh,
    Gisin {
        #[arg(long)]
        n: usize,
    },
    ThreeQutrit,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Solver(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Solver(m) => m,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ClassicalError> for CliError {
    fn from(e: ClassicalError) -> Self {
        match e {
            ClassicalError::ShapeMismatch(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Oracle(c) => c.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::DimensionCapExceeded { .. } | QuantumError::Linalg(_) | QuantumError::Model(_) => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Quantum(q) => q.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<catalog::CatalogError> for CliError {
    fn from(e: catalog::CatalogError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// Ordered `key value` results.
#[derive(Debug, Default)]
struct Output {
    rows: Vec<(String, String)>,
}

impl Output {
    fn push(&mut self, key: &str, value: impl Into<String>) {
        self.rows.push((key.to_string(), value.into()));
    }

    fn real(&mut self, key: &str, value: f64) {
        self.push(key, format_real(value));
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Kv => self.rows.iter().map(|(k, v)| format!("{k} {v}\n")).collect(),
            Format::Table => {
                let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0).max(8);
                let mut s = format!("{:<width$}  value\n", "quantity");
                s.push_str(&format!("{}  {}\n", "-".repeat(width), "-".repeat(17)));
                for (k, v) in &self.rows {
                    s.push_str(&format!("{k:<width$}  {v}\n"));
                }
                s
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Document, CliError> {
    Ok(io::parse_document(&read(path)?)?)
}

/// A game together with the weighted form it came from, if any.
struct Loaded {
    game: NonlocalGame,
    weighted: Option<WeightedSumInequality>,
    correlation: Option<CorrelationInequality>,
}

impl Loaded {
    fn from_document(doc: Document) -> Result<Self, CliError> {
        match doc {
            Document::Correlation(c) => {
                let w = transform::correlation_to_weighted(&c);
                let (game, _) = transform::bell_to_game(&w)?;
                Ok(Self { game, weighted: Some(w), correlation: Some(c) })
            }
            Document::Weighted(w) => {
                let (game, _) = transform::bell_to_game(&w)?;
                Ok(Self { game, weighted: Some(w), correlation: None })
            }
            Document::Game(game) => Ok(Self { game, weighted: None, correlation: None }),
            other => Err(CliError::Invalid(format!(
                "expected an inequality or game, found a {} document",
                other.kind()
            ))),
        }
    }

    fn weight_sum(&self) -> Option<f64> {
        self.weighted.as_ref().map(|w| w.weight_sum())
    }

    /// Correlation form for the XOR solver, converting games through enumeration.
    fn correlation_form(&self, cfg: &ClassicalConfig) -> Result<CorrelationInequality, CliError> {
        if let Some(c) = &self.correlation {
            return Ok(c.clone());
        }
        let weighted = match &self.weighted {
            Some(w) => w.clone(),
            None => transform::game_to_bell_enumerated(&self.game, cfg)?,
        };
        Ok(transform::weighted_to_correlation(&weighted)?)
    }
}

fn responses_compact(d: &DeterministicStrategy) -> String {
    d.responses()
        .iter()
        .map(|row| row.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn default_dims(game: &NonlocalGame) -> Vec<usize> {
    game.scenario()
        .alphabets()
        .iter()
        .map(|inputs| inputs.iter().map(|a| a.len()).max().unwrap_or(2).max(2))
        .collect()
}

struct QuantumRun {
    value: QuantumValue,
    witness: QuantumStrategy,
    bias: Option<f64>,
    restart: usize,
    dims: Vec<usize>,
}

fn run_xor(loaded: &Loaded, opts: &QuantumOpts, cfg: &ClassicalConfig) -> Result<QuantumRun, CliError> {
    let corr = loaded.correlation_form(cfg)?;
    let mut xcfg = XorSolveConfig { rng_seed: opts.seed, ..XorSolveConfig::default() };
    if let Some(r) = opts.restarts {
        xcfg.restarts = r;
    }
    if let Some(i) = opts.iters {
        xcfg.max_iters = i;
    }
    let sol = quantum::xor_quantum_value(&corr, &xcfg)?;
    let witness = match quantum::xor_to_quantum_witness(&sol.alice, &sol.bob) {
        Ok(w) => w,
        Err(QuantumError::UnsupportedVectorDim(_)) => {
            let planar = XorSolveConfig { vector_dim: Some(2), ..xcfg.clone() };
            let alt = quantum::xor_quantum_value(&corr, &planar)?;
            if (alt.value - sol.value).abs() > 1e-9 {
                return Err(CliError::Solver(format!(
                    "optimal vectors need dimension {}; no qubit witness available",
                    sol.alice.first().map_or(0, |v| v.len())
                )));
            }
            quantum::xor_to_quantum_witness(&alt.alice, &alt.bob)?
        }
        Err(e) => return Err(e.into()),
    };
    Ok(QuantumRun {
        value: QuantumValue { value: sol.value, method: QuantumMethod::ExactXor, converged: sol.converged },
        witness,
        bias: Some(sol.bias),
        restart: sol.restart,
        dims: vec![2, 2],
    })
}

fn run_seesaw(loaded: &Loaded, opts: &QuantumOpts) -> Result<QuantumRun, CliError> {
    let dims = opts.dims.clone().unwrap_or_else(|| default_dims(&loaded.game));
    let mut cfg = SeesawConfig::new(dims.clone());
    cfg.rng_seed = opts.seed;
    if let Some(r) = opts.restarts {
        cfg.restarts = r;
    }
    if let Some(i) = opts.iters {
        cfg.max_iters = i;
    }
    let sol = quantum::seesaw_quantum_value(&loaded.game, &cfg)?;
    Ok(QuantumRun {
        value: QuantumValue { value: sol.value, method: QuantumMethod::SeesawLowerBound, converged: sol.converged },
        witness: sol.witness,
        bias: None,
        restart: sol.restart,
        dims,
    })
}

fn quantum_rows(out: &mut Output, run: &QuantumRun, weight_sum: Option<f64>) {
    out.push("method", run.value.method.as_str());
    out.real("p_q", run.value.value);
    if let Some(total) = weight_sum {
        out.real("s_q", run.value.value * total);
    }
    if let Some(b) = run.bias {
        out.real("bias", b);
    }
    out.push("dims", run.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","));
    out.push("converged", run.value.converged.to_string());
    out.push("restart", run.restart.to_string());
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Invalid(format!("cannot write output: {e}"))),
    }
}

fn execute(cli: &Cli, stdout: &mut Vec<u8>) -> Result<(), CliError> {
    let classical_cfg = |cap: u64| ClassicalConfig { cap, threads: cli.threads };
    match &cli.command {
        Command::Convert { input, to, out, cap } => {
            let doc = load(input)?;
            let result = convert(doc, *to, &classical_cfg(*cap))?;
            emit(&result.to_text(), out.as_deref(), stdout)
        }
        Command::Classical { input, cap, witness } => {
            let loaded = Loaded::from_document(load(input)?)?;
            let cfg = classical_cfg(*cap);
            let value = classical::classical_value(&loaded.game, &cfg)?;
            let mut out = Output::default();
            out.real("p_c_max", value.max);
            out.real("p_c_min", value.min);
            if let Some(w) = &loaded.weighted {
                let bounds = classical::classical_bound(w, &cfg)?;
                out.real("s_c_max", bounds.s_max);
                out.real("s_c_min", bounds.s_min);
            }
            if let Some(c) = &loaded.correlation {
                out.real("bound", classical::correlation_bound(c, &cfg)?);
            }
            out.push("argmax", responses_compact(&value.argmax));
            out.push("argmin", responses_compact(&value.argmin));
            out.push("strategies", classical::strategy_space_size(loaded.game.scenario()).to_string());
            if let Some(p) = witness {
                write_file(p, &io::write_deterministic(&value.argmax))?;
            }
            emit(&out.render(cli.format), None, stdout)
        }
        Command::Quantum { input, method, opts, witness } => {
            let loaded = Loaded::from_document(load(input)?)?;
            let run = match method {
                Method::Xor => run_xor(&loaded, opts, &classical_cfg(DEFAULT_CAP))?,
                Method::Seesaw => run_seesaw(&loaded, opts)?,
            };
            let mut out = Output::default();
            quantum_rows(&mut out, &run, loaded.weight_sum());
            if let Some(p) = witness {
                write_file(p, &io::write_quantum(&run.witness))?;
            }
            emit(&out.render(cli.format), None, stdout)
        }
        Command::Simulate { input, strategy, rounds, seed } => {
            let loaded = Loaded::from_document(load(input)?)?;
            let strat = match load(strategy)? {
                Document::Deterministic(d) => Strategy::Deterministic(d),
                Document::Quantum(q) => Strategy::Quantum(q),
                other => {
                    return Err(CliError::Invalid(format!(
                        "expected a strategy file, found a {} document",
                        other.kind()
                    )));
                }
            };
            let report = simulate::simulate(&loaded.game, &strat, *rounds, *seed)?;
            let mut out = Output::default();
            for line in report.to_kv().lines() {
                let (k, v) = line.split_once(' ').unwrap();
                out.push(k, v);
            }
            emit(&out.render(cli.format), None, stdout)
        }
        Command::Catalog { entry, as_, out } => {
            let doc = match entry {
                CatalogEntry::Chsh => Document::Correlation(catalog::chsh()),
                CatalogEntry::Gisin { n } => Document::Correlation(catalog::gisin(*n)?),
                CatalogEntry::ThreeQutrit => Document::Weighted(catalog::three_qutrit()),
            };
            let doc = match as_ {
                As::Bell => doc,
                As::Game => Document::Game(Loaded::from_document(doc)?.game),
            };
            emit(&doc.to_text(), out.as_deref(), stdout)
        }
        Command::Report { input, opts, cap } => {
            let loaded = Loaded::from_document(load(input)?)?;
            let cfg = classical_cfg(*cap);
            let classical = classical::classical_value(&loaded.game, &cfg)?;
            let xor_ready = loaded.game.parties() == 2
                && loaded.game.scenario().is_dichotomic()
                && opts.dims.is_none()
                && loaded.correlation_form(&cfg).is_ok();
            let run = if xor_ready { run_xor(&loaded, opts, &cfg)? } else { run_seesaw(&loaded, opts)? };
            let report = ValueReport::new(
                classical.max,
                classical.min,
                classical.argmax.clone(),
                Some(run.value),
                Some(run.witness.clone()),
            )
            .map_err(|e| CliError::Solver(e.to_string()))?;
            let mut out = Output::default();
            out.real("p_c_max", report.classical_max());
            out.real("p_c_min", report.classical_min());
            quantum_rows(&mut out, &run, loaded.weight_sum());
            out.real("advantage", transform::advantage(&report)?);
            if let Some(total) = loaded.weight_sum() {
                out.real("s_c_max", report.classical_max() * total);
            }
            out.push("argmax", responses_compact(report.witness_classical()));
            emit(&out.render(cli.format), None, stdout)
        }
    }
}

fn convert(doc: Document, to: Target, cfg: &ClassicalConfig) -> Result<Document, CliError> {
    let weighted = match (&doc, to) {
        (Document::Correlation(_), Target::Correlation)
        | (Document::Weighted(_), Target::Weighted)
        | (Document::Game(_), Target::Game) => return Ok(doc),
        (Document::Correlation(c), _) => transform::correlation_to_weighted(c),
        (Document::Weighted(w), _) => w.clone(),
        (Document::Game(g), _) => transform::game_to_bell_enumerated(g, cfg)?,
        (other, _) => {
            return Err(CliError::Invalid(format!("cannot convert a {} document", other.kind())));
        }
    };
    Ok(match to {
        Target::Weighted => Document::Weighted(weighted),
        Target::Correlation => Document::Correlation(transform::weighted_to_correlation(&weighted)?),
        Target::Game => Document::Game(transform::bell_to_game(&weighted)?.0),
    })
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli, &mut buf)),
            Err(e) => Err(CliError::Solver(format!("could not start worker pool: {e}"))),
        },
        None => execute(&cli, &mut buf),
    };
    if stdout.write_all(&buf).and_then(|_| stdout.flush()).is_err() {
        return EXIT_INVALID;
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("bellgame").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn kv(text: &str) -> std::collections::BTreeMap<String, String> {
        text.lines()
            .filter_map(|l| l.split_once(' '))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn temp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("bellgame-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn catalog_prints_canonical_text() {
        let (code, out, _) = call(&["catalog", "chsh"]);
        assert_eq!(code, 0);
        assert_eq!(out, io::write_correlation(&catalog::chsh()));
        let (code, out, _) = call(&["catalog", "gisin", "--n", "3"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("bound 5\n"));
        let (code, out, _) = call(&["catalog", "three-qutrit", "--as", "game"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("game v1\n"));
    }

    #[test]
    fn chsh_chain() {
        let bell = temp("chain.bell");
        let game = temp("chain.game");
        assert_eq!(call(&["catalog", "chsh", "--out", bell.to_str().unwrap()]).0, 0);
        assert_eq!(
            call(&["convert", "--in", bell.to_str().unwrap(), "--to", "game", "--out", game.to_str().unwrap()]).0,
            0
        );
        let (code, out, _) = call(&["classical", "--in", game.to_str().unwrap(), "--format", "kv"]);
        assert_eq!(code, 0);
        let m = kv(&out);
        assert_eq!(m["p_c_max"], "0.75");
        assert_eq!(m["p_c_min"], "0.25");
        let (code, out, _) = call(&["quantum", "--in", bell.to_str().unwrap(), "--method", "xor", "--format", "kv"]);
        assert_eq!(code, 0);
        let p: f64 = kv(&out)["p_q"].parse().unwrap();
        assert!((p - 0.853553).abs() < 1e-6);
        let (code, out, _) = call(&["classical", "--in", bell.to_str().unwrap(), "--format", "kv"]);
        assert_eq!(code, 0);
        assert_eq!(kv(&out)["bound"], "2");
        assert_eq!(kv(&out)["s_c_max"], "6");
    }

    #[test]
    fn convert_round_trips_through_game() {
        let bell = temp("rt.bell");
        let game = temp("rt.game");
        call(&["catalog", "gisin", "--n", "3", "--out", bell.to_str().unwrap()]);
        call(&["convert", "--in", bell.to_str().unwrap(), "--to", "game", "--out", game.to_str().unwrap()]);
        let (code, out, _) = call(&["convert", "--in", game.to_str().unwrap(), "--to", "correlation"]);
        assert_eq!(code, 0);
        let back = io::parse_correlation(&out).unwrap();
        let g = catalog::gisin(3).unwrap();
        let scale = back.classical_bound() / g.classical_bound();
        for (s, c) in g.coefficients() {
            assert!((back.coefficient(s) - c * scale).abs() < 1e-12);
        }
    }

    #[test]
    fn simulate_with_witness() {
        let bell = temp("sim.bell");
        let wit = temp("sim.witness");
        call(&["catalog", "chsh", "--out", bell.to_str().unwrap()]);
        let (code, _, err) = call(&[
            "quantum", "--in", bell.to_str().unwrap(), "--method", "xor", "--witness", wit.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        let args = [
            "simulate", "--in", bell.to_str().unwrap(), "--strategy", wit.to_str().unwrap(), "--rounds", "100000",
            "--seed", "3", "--format", "kv",
        ];
        let (code, a, _) = call(&args);
        assert_eq!(code, 0);
        let (_, b, _) = call(&args);
        assert_eq!(a, b);
        let rate: f64 = kv(&a)["empirical_rate"].parse().unwrap();
        assert!((rate - 0.853553).abs() < 0.01);
    }

    #[test]
    fn report_on_three_qutrit() {
        let bell = temp("qutrit.bell");
        call(&["catalog", "three-qutrit", "--out", bell.to_str().unwrap()]);
        let (code, out, err) = call(&[
            "report", "--in", bell.to_str().unwrap(), "--restarts", "4", "--format", "kv",
        ]);
        assert_eq!(code, 0, "{err}");
        let m = kv(&out);
        assert_eq!(m["method"], "seesaw-lower-bound");
        assert_eq!(m["dims"], "3,3,3");
        let adv: f64 = m["advantage"].parse().unwrap();
        assert!(adv > 0.14, "{out}");
    }

    #[test]
    fn exit_codes() {
        let bad = temp("bad.game");
        fs::write(&bad, "game v1\nparties 1\nsettings 1\nalphabet 1 1 0 1\nprob 1 0.9\nwin 1 : (0)\n").unwrap();
        let (code, _, err) = call(&["classical", "--in", bad.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(err.contains("distribution-not-normalized"), "{err}");
        assert_eq!(call(&["classical", "--in", "/nonexistent/file"]).0, 1);
        assert_eq!(call(&["bogus"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
        let bell = temp("cap.bell");
        call(&["catalog", "gisin", "--n", "6", "--out", bell.to_str().unwrap()]);
        let (code, _, err) = call(&["classical", "--in", bell.to_str().unwrap(), "--cap", "10"]);
        assert_eq!(code, 2, "{err}");
        let q = temp("q.bell");
        call(&["catalog", "three-qutrit", "--out", q.to_str().unwrap()]);
        let (code, _, _) = call(&["quantum", "--in", q.to_str().unwrap(), "--method", "xor"]);
        assert_eq!(code, 1);
        let (code, _, _) = call(&["quantum", "--in", q.to_str().unwrap(), "--method", "seesaw", "--dims", "5,5,5"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn table_format_is_default() {
        let bell = temp("table.bell");
        call(&["catalog", "chsh", "--out", bell.to_str().unwrap()]);
        let (code, out, _) = call(&["classical", "--in", bell.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("quantity"));
        assert!(out.lines().any(|l| l.starts_with("p_c_max") && l.ends_with("0.75")));
    }
}
