//! BELLSPEC v1, the line-oriented text format for inequalities, games and
//! strategies.
//!
//! Files are UTF-8, one record per line, `#` starts a comment, tokens are
//! separated by whitespace. The first record is the header naming the kind
//! and version. Indices (parties, inputs) are 1-based.
//!
//! Serialization is canonical: records appear in a fixed order, keyed entries
//! in lexicographic key order, reals with 17 significant digits and LF line
//! endings, so `parse(serialize(x)) == x` and serializing twice gives the
//! same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::{CMatrix, C64};
use crate::model::{
    CorrelationInequality, DeterministicStrategy, Label, Measurement, ModelError, NonlocalGame,
    OutcomeTuple, QuantumStrategy, Scenario, SettingVec, Violation, WeightedSumInequality,
    WinningSet,
};

/// Largest number of inputs per party accepted by the parser.
pub const MAX_INPUTS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Correlation(CorrelationInequality),
    Weighted(WeightedSumInequality),
    Game(NonlocalGame),
    Deterministic(DeterministicStrategy),
    Quantum(QuantumStrategy),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Correlation(_) => "bell correlation",
            Document::Weighted(_) => "bell weighted",
            Document::Game(_) => "game",
            Document::Deterministic(_) => "strategy deterministic",
            Document::Quantum(_) => "strategy quantum",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Document::Correlation(x) => write_correlation(x),
            Document::Weighted(x) => write_weighted(x),
            Document::Game(x) => write_game(x),
            Document::Deterministic(x) => write_deterministic(x),
            Document::Quantum(x) => write_quantum(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {reason}")]
    Syntax { line: usize, column: usize, reason: String },
    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error("line {line}, column {column}: unsupported version {found:?}, expected v1")]
    VersionUnsupported { line: usize, column: usize, found: String },
}

impl ParseError {
    /// Violation codes of a validation error, empty otherwise.
    pub fn codes(&self) -> Vec<&'static str> {
        match self {
            ParseError::Validation(v) => v.iter().map(|x| x.code.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<ModelError> for ParseError {
    fn from(e: ModelError) -> Self {
        ParseError::Validation(e.violations().to_vec())
    }
}

// ---------------------------------------------------------------------------
// Reals
// ---------------------------------------------------------------------------

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, exponent form outside `1e-4 <= |x| < 1e17`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let sign = if x < 0.0 { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}{tail}e{esign}{:02}", exp.abs());
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn join_usize(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_tuple(t: &[Label]) -> String {
    let inner = t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    format!("({inner})")
}

fn write_scenario(out: &mut String, scenario: &Scenario, with_alphabets: bool) {
    let settings = scenario.settings();
    let _ = writeln!(out, "parties {}", scenario.parties());
    let _ = writeln!(out, "settings {}", join_usize(&settings));
    if with_alphabets {
        for (p, inputs) in scenario.alphabets().iter().enumerate() {
            for (x, alpha) in inputs.iter().enumerate() {
                let labels = alpha.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ");
                let _ = writeln!(out, "alphabet {} {} {labels}", p + 1, x + 1);
            }
        }
    }
}

fn write_keyed_reals(out: &mut String, key: &str, map: &BTreeMap<SettingVec, f64>) {
    for (s, v) in map {
        let _ = writeln!(out, "{key} {} {}", join_usize(s), format_real(*v));
    }
}

fn write_wins(out: &mut String, table: &BTreeMap<SettingVec, WinningSet>) {
    for (s, set) in table {
        let _ = write!(out, "win {} :", join_usize(s));
        for t in set {
            let _ = write!(out, " {}", write_tuple(t));
        }
        out.push('\n');
    }
}

pub fn write_correlation(ineq: &CorrelationInequality) -> String {
    let mut out = String::from("bell correlation v1\n");
    let _ = writeln!(out, "parties {}", ineq.parties());
    let _ = writeln!(out, "settings {}", join_usize(ineq.settings()));
    write_keyed_reals(&mut out, "coeff", ineq.coefficients());
    let _ = writeln!(out, "bound {}", format_real(ineq.classical_bound()));
    out
}

pub fn write_weighted(ineq: &WeightedSumInequality) -> String {
    let mut out = String::from("bell weighted v1\n");
    write_scenario(&mut out, ineq.scenario(), true);
    write_keyed_reals(&mut out, "weight", ineq.weights());
    write_wins(&mut out, ineq.winning_sets());
    let _ = writeln!(out, "smin {}", format_real(ineq.s_min()));
    let _ = writeln!(out, "smax {}", format_real(ineq.s_max()));
    out
}

pub fn write_game(game: &NonlocalGame) -> String {
    let mut out = String::from("game v1\n");
    write_scenario(&mut out, game.scenario(), true);
    write_keyed_reals(&mut out, "prob", game.distribution());
    write_wins(&mut out, game.truth_table());
    out
}

pub fn write_deterministic(strat: &DeterministicStrategy) -> String {
    let mut out = String::from("strategy deterministic v1\n");
    for (p, row) in strat.responses().iter().enumerate() {
        for (x, l) in row.iter().enumerate() {
            let _ = writeln!(out, "respond {} {} {l}", p + 1, x + 1);
        }
    }
    out
}

fn write_complex(out: &mut String, z: C64) {
    let _ = write!(out, " {} {}", format_real(z.re), format_real(z.im));
}

pub fn write_quantum(strat: &QuantumStrategy) -> String {
    let mut out = String::from("strategy quantum v1\n");
    let _ = writeln!(out, "dims {}", join_usize(strat.local_dims()));
    out.push_str("state");
    for &z in strat.state() {
        write_complex(&mut out, z);
    }
    out.push('\n');
    for (p, inputs) in strat.measurements().iter().enumerate() {
        for (x, meas) in inputs.iter().enumerate() {
            for (label, proj) in meas {
                let _ = write!(out, "proj {} {} {label}", p + 1, x + 1);
                for &z in proj.as_slice() {
                    write_complex(&mut out, z);
                }
                out.push('\n');
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

#[derive(Debug)]
struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let content = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        for (col, (byte, ch)) in content.char_indices().enumerate() {
            if ch.is_whitespace() {
                if let Some((b, c)) = start.take() {
                    tokens.push(Token { text: &content[b..byte], column: c + 1 });
                }
            } else if start.is_none() {
                start = Some((byte, col));
            }
        }
        if let Some((b, c)) = start {
            tokens.push(Token { text: &content[b..], column: c + 1 });
        }
        if !tokens.is_empty() {
            lines.push(Line { number: i + 1, tokens });
        }
    }
    lines
}

fn syntax(line: usize, column: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, column, reason: reason.into() }
}

fn at(line: &Line<'_>, tok: &Token<'_>, reason: impl Into<String>) -> ParseError {
    syntax(line.number, tok.column, reason)
}

fn end_column(line: &Line<'_>) -> usize {
    let last = line.tokens.last().unwrap();
    last.column + last.text.chars().count()
}

fn parse_usize(line: &Line<'_>, tok: &Token<'_>, what: &str) -> Result<usize, ParseError> {
    tok.text
        .parse::<usize>()
        .map_err(|_| at(line, tok, format!("expected {what}, found {:?}", tok.text)))
}

fn parse_index(line: &Line<'_>, tok: &Token<'_>, what: &str, max: usize) -> Result<usize, ParseError> {
    let v = parse_usize(line, tok, what)?;
    if v == 0 || v > max {
        return Err(at(line, tok, format!("{what} {v} is outside 1..={max}")));
    }
    Ok(v)
}

fn parse_label(line: &Line<'_>, tok: &Token<'_>) -> Result<Label, ParseError> {
    tok.text
        .parse::<Label>()
        .map_err(|_| at(line, tok, format!("expected an integer label, found {:?}", tok.text)))
}

fn parse_label_str(line: &Line<'_>, tok: &Token<'_>, s: &str) -> Result<Label, ParseError> {
    s.parse::<Label>()
        .map_err(|_| at(line, tok, format!("expected an integer label, found {s:?}")))
}

fn parse_real(line: &Line<'_>, tok: &Token<'_>) -> Result<f64, ParseError> {
    let t = tok.text;
    let looks_decimal = t
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'));
    match t.parse::<f64>() {
        Ok(v) if looks_decimal && v.is_finite() => Ok(v),
        _ => Err(at(line, tok, format!("expected a finite real, found {t:?}"))),
    }
}

fn expect_arity(line: &Line<'_>, n: usize) -> Result<(), ParseError> {
    if line.tokens.len() != n {
        let key = line.tokens[0].text;
        return Err(syntax(
            line.number,
            line.tokens[0].column,
            format!("`{key}` takes {} fields, found {}", n - 1, line.tokens.len() - 1),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Correlation,
    Weighted,
    Game,
    Deterministic,
    Quantum,
}

fn parse_header(line: &Line<'_>) -> Result<Kind, ParseError> {
    let words: Vec<&str> = line.tokens.iter().map(|t| t.text).collect();
    let (kind, n) = match words.as_slice() {
        ["bell", "correlation", ..] => (Kind::Correlation, 2),
        ["bell", "weighted", ..] => (Kind::Weighted, 2),
        ["game", ..] => (Kind::Game, 1),
        ["strategy", "deterministic", ..] => (Kind::Deterministic, 2),
        ["strategy", "quantum", ..] => (Kind::Quantum, 2),
        _ => {
            return Err(at(line, &line.tokens[0], format!("unknown header {:?}", words.join(" "))));
        }
    };
    if words.len() != n + 1 {
        return Err(syntax(line.number, end_column(line), "header must end with a version tag"));
    }
    let v = &line.tokens[n];
    if v.text != "v1" {
        return Err(ParseError::VersionUnsupported {
            line: line.number,
            column: v.column,
            found: v.text.to_string(),
        });
    }
    Ok(kind)
}

/// Parses any BELLSPEC v1 document.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let lines = tokenize(text);
    let Some(header) = lines.first() else {
        return Err(syntax(1, 1, "empty document"));
    };
    let kind = parse_header(header)?;
    let body = &lines[1..];
    let last_line = text.split('\n').count();
    match kind {
        Kind::Correlation => parse_correlation_body(body, last_line).map(Document::Correlation),
        Kind::Weighted => parse_weighted_body(body, last_line).map(Document::Weighted),
        Kind::Game => parse_game_body(body, last_line).map(Document::Game),
        Kind::Deterministic => parse_deterministic_body(body, last_line).map(Document::Deterministic),
        Kind::Quantum => parse_quantum_body(body, last_line).map(Document::Quantum),
    }
}

fn wrong_kind(found: &Document, expected: &str) -> ParseError {
    syntax(1, 1, format!("expected a {expected} document, found {}", found.kind()))
}

pub fn parse_correlation(text: &str) -> Result<CorrelationInequality, ParseError> {
    match parse_document(text)? {
        Document::Correlation(x) => Ok(x),
        other => Err(wrong_kind(&other, "bell correlation")),
    }
}

pub fn parse_weighted(text: &str) -> Result<WeightedSumInequality, ParseError> {
    match parse_document(text)? {
        Document::Weighted(x) => Ok(x),
        other => Err(wrong_kind(&other, "bell weighted")),
    }
}

pub fn parse_game(text: &str) -> Result<NonlocalGame, ParseError> {
    match parse_document(text)? {
        Document::Game(x) => Ok(x),
        other => Err(wrong_kind(&other, "game")),
    }
}

pub fn parse_deterministic(text: &str) -> Result<DeterministicStrategy, ParseError> {
    match parse_document(text)? {
        Document::Deterministic(x) => Ok(x),
        other => Err(wrong_kind(&other, "strategy deterministic")),
    }
}

pub fn parse_quantum(text: &str) -> Result<QuantumStrategy, ParseError> {
    match parse_document(text)? {
        Document::Quantum(x) => Ok(x),
        other => Err(wrong_kind(&other, "strategy quantum")),
    }
}

/// Reads the leading `parties` and `settings` records.
fn parse_shape<'a>(body: &'a [Line<'a>], last_line: usize) -> Result<(Vec<usize>, &'a [Line<'a>]), ParseError> {
    let Some(first) = body.first() else {
        return Err(syntax(last_line, 1, "missing `parties` record"));
    };
    if first.tokens[0].text != "parties" {
        return Err(at(first, &first.tokens[0], "expected `parties`"));
    }
    expect_arity(first, 2)?;
    let n = parse_usize(first, &first.tokens[1], "a party count")?;
    if n == 0 {
        return Err(at(first, &first.tokens[1], "at least one party is required"));
    }
    let Some(second) = body.get(1) else {
        return Err(syntax(last_line, 1, "missing `settings` record"));
    };
    if second.tokens[0].text != "settings" {
        return Err(at(second, &second.tokens[0], "expected `settings`"));
    }
    if second.tokens.len() != n + 1 {
        return Err(syntax(
            second.number,
            second.tokens[0].column,
            format!("`settings` needs {n} counts, found {}", second.tokens.len() - 1),
        ));
    }
    let mut settings = Vec::with_capacity(n);
    for tok in &second.tokens[1..] {
        let m = parse_usize(second, tok, "an input count")?;
        if m == 0 || m > MAX_INPUTS {
            return Err(at(second, tok, format!("input count {m} is outside 1..={MAX_INPUTS}")));
        }
        settings.push(m);
    }
    Ok((settings, &body[2..]))
}

fn parse_setting(line: &Line<'_>, toks: &[Token<'_>], settings: &[usize]) -> Result<SettingVec, ParseError> {
    toks.iter()
        .zip(settings)
        .map(|(tok, &m)| parse_index(line, tok, "input", m))
        .collect()
}

/// `<key> s_1 .. s_n <real>` records.
fn insert_keyed_real(
    line: &Line<'_>,
    settings: &[usize],
    map: &mut BTreeMap<SettingVec, f64>,
) -> Result<(), ParseError> {
    let n = settings.len();
    expect_arity(line, n + 2)?;
    let s = parse_setting(line, &line.tokens[1..=n], settings)?;
    let v = parse_real(line, &line.tokens[n + 1])?;
    if map.insert(s.clone(), v).is_some() {
        let key = line.tokens[0].text;
        return Err(at(line, &line.tokens[0], format!("duplicate `{key}` for input {s:?}")));
    }
    Ok(())
}

fn parse_tuple(line: &Line<'_>, tok: &Token<'_>) -> Result<OutcomeTuple, ParseError> {
    let inner = tok
        .text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| at(line, tok, format!("expected a tuple like (0,1), found {:?}", tok.text)))?;
    if inner.is_empty() {
        return Err(at(line, tok, "empty outcome tuple"));
    }
    inner.split(',').map(|s| parse_label_str(line, tok, s)).collect()
}

fn insert_win(
    line: &Line<'_>,
    settings: &[usize],
    table: &mut BTreeMap<SettingVec, WinningSet>,
) -> Result<(), ParseError> {
    let n = settings.len();
    if line.tokens.len() < n + 2 {
        return Err(syntax(line.number, end_column(line), "`win` needs inputs followed by `:`"));
    }
    let s = parse_setting(line, &line.tokens[1..=n], settings)?;
    let colon = &line.tokens[n + 1];
    if colon.text != ":" {
        return Err(at(line, colon, format!("expected `:`, found {:?}", colon.text)));
    }
    let mut set = BTreeSet::new();
    for tok in &line.tokens[n + 2..] {
        let t = parse_tuple(line, tok)?;
        if !set.insert(t) {
            return Err(at(line, tok, "duplicate outcome tuple"));
        }
    }
    if table.insert(s.clone(), set).is_some() {
        return Err(at(line, &line.tokens[0], format!("duplicate `win` for input {s:?}")));
    }
    Ok(())
}

fn parse_single_real(line: &Line<'_>, slot: &mut Option<f64>) -> Result<(), ParseError> {
    expect_arity(line, 2)?;
    let v = parse_real(line, &line.tokens[1])?;
    if slot.replace(v).is_some() {
        let key = line.tokens[0].text;
        return Err(at(line, &line.tokens[0], format!("duplicate `{key}`")));
    }
    Ok(())
}

fn unknown(line: &Line<'_>) -> ParseError {
    at(line, &line.tokens[0], format!("unexpected record {:?}", line.tokens[0].text))
}

fn parse_correlation_body(body: &[Line<'_>], last_line: usize) -> Result<CorrelationInequality, ParseError> {
    let (settings, rest) = parse_shape(body, last_line)?;
    let mut coeffs = BTreeMap::new();
    let mut bound = None;
    for line in rest {
        match line.tokens[0].text {
            "coeff" => insert_keyed_real(line, &settings, &mut coeffs)?,
            "bound" => parse_single_real(line, &mut bound)?,
            _ => return Err(unknown(line)),
        }
    }
    let bound = bound.ok_or_else(|| syntax(last_line, 1, "missing `bound` record"))?;
    Ok(CorrelationInequality::new(settings, coeffs, bound)?)
}

struct Tabular {
    scenario: Scenario,
    values: BTreeMap<SettingVec, f64>,
    wins: BTreeMap<SettingVec, WinningSet>,
    smin: Option<f64>,
    smax: Option<f64>,
}

fn parse_tabular(body: &[Line<'_>], last_line: usize, value_key: &str, bounds: bool) -> Result<Tabular, ParseError> {
    let (settings, rest) = parse_shape(body, last_line)?;
    let mut alphabets: BTreeMap<(usize, usize), Vec<Label>> = BTreeMap::new();
    let mut values = BTreeMap::new();
    let mut wins = BTreeMap::new();
    let (mut smin, mut smax) = (None, None);
    for line in rest {
        let key = line.tokens[0].text;
        match key {
            "alphabet" => {
                if line.tokens.len() < 4 {
                    return Err(syntax(line.number, end_column(line), "`alphabet` needs party, input and labels"));
                }
                let p = parse_index(line, &line.tokens[1], "party", settings.len())?;
                let x = parse_index(line, &line.tokens[2], "input", settings[p - 1])?;
                let labels = line.tokens[3..]
                    .iter()
                    .map(|t| parse_label(line, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if alphabets.insert((p, x), labels).is_some() {
                    return Err(at(line, &line.tokens[0], format!("duplicate `alphabet` for party {p} input {x}")));
                }
            }
            "win" => insert_win(line, &settings, &mut wins)?,
            "smin" if bounds => parse_single_real(line, &mut smin)?,
            "smax" if bounds => parse_single_real(line, &mut smax)?,
            k if k == value_key => insert_keyed_real(line, &settings, &mut values)?,
            _ => return Err(unknown(line)),
        }
    }
    // every (party, input) has at most one record, so equal counts mean all present
    let expected: usize = settings.iter().sum();
    if alphabets.len() != expected {
        for (p, &m) in settings.iter().enumerate() {
            for x in 1..=m {
                if !alphabets.contains_key(&(p + 1, x)) {
                    return Err(syntax(last_line, 1, format!("missing `alphabet` for party {} input {x}", p + 1)));
                }
            }
        }
    }
    let mut nested: Vec<Vec<Vec<Label>>> = settings.iter().map(|&m| Vec::with_capacity(m)).collect();
    for ((p, _), labels) in alphabets {
        nested[p - 1].push(labels);
    }
    Ok(Tabular {
        scenario: Scenario::new(nested)?,
        values,
        wins,
        smin,
        smax,
    })
}

fn parse_weighted_body(body: &[Line<'_>], last_line: usize) -> Result<WeightedSumInequality, ParseError> {
    let t = parse_tabular(body, last_line, "weight", true)?;
    let smin = t.smin.ok_or_else(|| syntax(last_line, 1, "missing `smin` record"))?;
    let smax = t.smax.ok_or_else(|| syntax(last_line, 1, "missing `smax` record"))?;
    Ok(WeightedSumInequality::new(t.scenario, t.values, t.wins, smin, smax)?)
}

fn parse_game_body(body: &[Line<'_>], last_line: usize) -> Result<NonlocalGame, ParseError> {
    let t = parse_tabular(body, last_line, "prob", false)?;
    Ok(NonlocalGame::new(t.scenario, t.values, t.wins)?)
}

fn parse_deterministic_body(body: &[Line<'_>], last_line: usize) -> Result<DeterministicStrategy, ParseError> {
    let mut entries: BTreeMap<(usize, usize), Label> = BTreeMap::new();
    for line in body {
        if line.tokens[0].text != "respond" {
            return Err(unknown(line));
        }
        expect_arity(line, 4)?;
        let p = parse_index(line, &line.tokens[1], "party", usize::MAX)?;
        let x = parse_index(line, &line.tokens[2], "input", usize::MAX)?;
        let l = parse_label(line, &line.tokens[3])?;
        if entries.insert((p, x), l).is_some() {
            return Err(at(line, &line.tokens[0], format!("duplicate `respond` for party {p} input {x}")));
        }
    }
    if entries.is_empty() {
        return Err(syntax(last_line, 1, "no `respond` records"));
    }
    let mut responses: Vec<Vec<Label>> = Vec::new();
    for ((p, x), l) in entries {
        if p == responses.len() + 1 && x == 1 {
            responses.push(Vec::new());
        }
        let n = responses.len();
        match responses.last_mut() {
            Some(row) if p == n && x == row.len() + 1 => row.push(l),
            _ => {
                return Err(syntax(
                    last_line,
                    1,
                    format!("`respond` records skip an entry before party {p} input {x}"),
                ));
            }
        }
    }
    Ok(DeterministicStrategy::from_responses(responses)?)
}

fn parse_complex_run(line: &Line<'_>, toks: &[Token<'_>]) -> Result<Vec<C64>, ParseError> {
    toks.chunks(2)
        .map(|pair| Ok(C64::new(parse_real(line, &pair[0])?, parse_real(line, &pair[1])?)))
        .collect()
}

fn parse_quantum_body(body: &[Line<'_>], last_line: usize) -> Result<QuantumStrategy, ParseError> {
    let Some(first) = body.first() else {
        return Err(syntax(last_line, 1, "missing `dims` record"));
    };
    if first.tokens[0].text != "dims" {
        return Err(at(first, &first.tokens[0], "expected `dims`"));
    }
    if first.tokens.len() < 2 {
        return Err(syntax(first.number, end_column(first), "`dims` needs at least one dimension"));
    }
    let mut dims = Vec::new();
    let mut total: usize = 1;
    for tok in &first.tokens[1..] {
        let d = parse_usize(first, tok, "a dimension")?;
        if d == 0 {
            return Err(at(first, tok, "dimension must be positive"));
        }
        total = total
            .checked_mul(d)
            .ok_or_else(|| at(first, tok, "joint dimension overflows"))?;
        dims.push(d);
    }
    let mut state: Option<Vec<C64>> = None;
    let mut projs: BTreeMap<(usize, usize), Measurement> = BTreeMap::new();
    for line in &body[1..] {
        match line.tokens[0].text {
            "state" => {
                if (line.tokens.len() - 1) / 2 != total || (line.tokens.len() - 1) % 2 != 0 {
                    return Err(at(
                        line,
                        &line.tokens[0],
                        format!("`state` needs {total} complex amplitudes as re/im pairs"),
                    ));
                }
                let amps = parse_complex_run(line, &line.tokens[1..])?;
                if state.replace(amps).is_some() {
                    return Err(at(line, &line.tokens[0], "duplicate `state`"));
                }
            }
            "proj" => {
                if line.tokens.len() < 4 {
                    return Err(syntax(line.number, end_column(line), "`proj` needs party, input and label"));
                }
                let p = parse_index(line, &line.tokens[1], "party", dims.len())?;
                let x = parse_index(line, &line.tokens[2], "input", usize::MAX)?;
                let label = parse_label(line, &line.tokens[3])?;
                let d = dims[p - 1];
                let entries = &line.tokens[4..];
                if Some(entries.len() / 2) != d.checked_mul(d) || entries.len() % 2 != 0 {
                    return Err(at(
                        line,
                        &line.tokens[0],
                        format!("`proj` for party {p} needs {d}x{d} complex entries as re/im pairs"),
                    ));
                }
                let m = CMatrix::from_row_major(parse_complex_run(line, entries)?).expect("square by construction");
                if projs.entry((p, x)).or_default().insert(label, m).is_some() {
                    return Err(at(
                        line,
                        &line.tokens[0],
                        format!("duplicate `proj` for party {p} input {x} label {label}"),
                    ));
                }
            }
            _ => return Err(unknown(line)),
        }
    }
    let state = state.ok_or_else(|| syntax(last_line, 1, "missing `state` record"))?;
    let mut measurements: Vec<Vec<Measurement>> = vec![Vec::new(); dims.len()];
    for ((p, x), meas) in projs {
        let row = &mut measurements[p - 1];
        if x != row.len() + 1 {
            return Err(syntax(last_line, 1, format!("`proj` records skip party {p} input {}", row.len() + 1)));
        }
        row.push(meas);
    }
    if let Some(p) = measurements.iter().position(|m| m.is_empty()) {
        return Err(syntax(last_line, 1, format!("no `proj` records for party {}", p + 1)));
    }
    Ok(QuantumStrategy::new(dims, state, measurements)?)
}
