//! Domain types: correlation and weighted-sum Bell inequalities, nonlocal
//! games, classical and quantum strategies, and value reports.
//!
//! Every type is immutable once built. Constructors run the same checks as
//! [`Validate::validate`], so a value that exists is a valid value.
//!
//! Settings (inputs) are 1-based throughout: a setting vector `s` has
//! `1 <= s[i] <= settings[i]`. Maps keyed by setting vectors are `BTreeMap`s,
//! so iteration is lexicographic and every downstream output is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::linalg::{CMatrix, C64};

/// Outcome label. Dichotomic outcomes use `+1` and `-1` literally.
pub type Label = i64;
/// One 1-based setting (input) per party.
pub type SettingVec = Vec<usize>;
/// One outcome label per party.
pub type OutcomeTuple = Vec<Label>;
pub type WinningSet = BTreeSet<OutcomeTuple>;

/// Absolute tolerance for probability and projector checks.
pub const TOL: f64 = 1e-9;

pub const DICHOTOMIC: [Label; 2] = [1, -1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    NoParties,
    NoSettings,
    EmptyAlphabet,
    DuplicateLabel,
    SettingOutOfRange,
    AllCoefficientsZero,
    NonPositiveBound,
    NonFinite,
    NegativeWeight,
    AllWeightsZero,
    TupleArity,
    LabelNotInAlphabet,
    BoundsInverted,
    DistributionNotNormalized,
    NegativeProbability,
    MissingTruthTable,
    ShapeMismatch,
    ResponseNotInAlphabet,
    DimensionTooSmall,
    StateNotNormalized,
    NotHermitian,
    NotProjective,
    ProjectorsNotOrthogonal,
    ProjectorsIncomplete,
    ProbabilityOutOfRange,
    QuantumBelowClassical,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            NoParties => "no-parties",
            NoSettings => "no-settings",
            EmptyAlphabet => "empty-alphabet",
            DuplicateLabel => "duplicate-label",
            SettingOutOfRange => "setting-out-of-range",
            AllCoefficientsZero => "all-coefficients-zero",
            NonPositiveBound => "nonpositive-bound",
            NonFinite => "non-finite",
            NegativeWeight => "negative-weight",
            AllWeightsZero => "all-weights-zero",
            TupleArity => "tuple-arity",
            LabelNotInAlphabet => "label-not-in-alphabet",
            BoundsInverted => "bounds-inverted",
            DistributionNotNormalized => "distribution-not-normalized",
            NegativeProbability => "negative-probability",
            MissingTruthTable => "missing-truth-table",
            ShapeMismatch => "shape-mismatch",
            ResponseNotInAlphabet => "response-not-in-alphabet",
            DimensionTooSmall => "dimension-too-small",
            StateNotNormalized => "state-not-normalized",
            NotHermitian => "not-hermitian",
            NotProjective => "not-projective",
            ProjectorsNotOrthogonal => "projectors-not-orthogonal",
            ProjectorsIncomplete => "projectors-incomplete",
            ProbabilityOutOfRange => "probability-out-of-range",
            QuantumBelowClassical => "quantum-below-classical",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid value: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

impl ModelError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ModelError::Invalid(v) => v,
        }
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations().iter().any(|v| v.code == code)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

fn into_result<T>(value: T, violations: Vec<Violation>) -> Result<T, ModelError> {
    if violations.is_empty() {
        Ok(value)
    } else {
        Err(ModelError::Invalid(violations))
    }
}

/// Invariant checking shared by every domain type.
pub trait Validate {
    fn violations(&self) -> Vec<Violation>;

    fn validate(&self) -> Result<(), Vec<Violation>> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// Iterates all setting vectors of a scenario with per-party counts `settings`,
/// in lexicographic order.
pub fn setting_vectors(settings: &[usize]) -> impl Iterator<Item = SettingVec> + '_ {
    let total: usize = if settings.is_empty() {
        0
    } else {
        settings.iter().product()
    };
    (0..total).map(move |mut idx| {
        let mut s = vec![0; settings.len()];
        for (slot, &m) in s.iter_mut().zip(settings).rev() {
            *slot = idx % m + 1;
            idx /= m;
        }
        s
    })
}

fn setting_in_range(s: &[usize], settings: &[usize]) -> bool {
    s.len() == settings.len() && s.iter().zip(settings).all(|(&x, &m)| x >= 1 && x <= m)
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Parties, their setting counts, and the outcome alphabet of each
/// (party, setting).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    alphabets: Vec<Vec<Vec<Label>>>,
}

impl Scenario {
    /// `alphabets[party][setting - 1]` is the ordered outcome list.
    pub fn new(alphabets: Vec<Vec<Vec<Label>>>) -> Result<Self, ModelError> {
        let scenario = Self { alphabets };
        let v = scenario.violations();
        into_result(scenario, v)
    }

    /// Every (party, setting) has outcomes `{+1, -1}`.
    pub fn dichotomic(settings: &[usize]) -> Result<Self, ModelError> {
        Self::new(
            settings
                .iter()
                .map(|&m| vec![DICHOTOMIC.to_vec(); m])
                .collect(),
        )
    }

    pub fn parties(&self) -> usize {
        self.alphabets.len()
    }

    pub fn settings(&self) -> Vec<usize> {
        self.alphabets.iter().map(Vec::len).collect()
    }

    /// Outcome list of `party` (0-based) under `setting` (1-based).
    pub fn alphabet(&self, party: usize, setting: usize) -> &[Label] {
        &self.alphabets[party][setting - 1]
    }

    pub fn alphabets(&self) -> &[Vec<Vec<Label>>] {
        &self.alphabets
    }

    pub fn setting_vectors(&self) -> Vec<SettingVec> {
        setting_vectors(&self.settings()).collect()
    }

    pub fn contains_setting(&self, s: &[usize]) -> bool {
        setting_in_range(s, &self.settings())
    }

    pub fn is_dichotomic(&self) -> bool {
        self.alphabets.iter().flatten().all(|a| {
            a.len() == 2 && a.contains(&1) && a.contains(&-1)
        })
    }

    /// All outcome tuples admissible under setting vector `s`, in
    /// lexicographic order of alphabet positions.
    pub fn outcome_tuples(&self, s: &[usize]) -> Vec<OutcomeTuple> {
        let alphabets: Vec<&[Label]> = s
            .iter()
            .enumerate()
            .map(|(p, &x)| self.alphabet(p, x))
            .collect();
        let mut out = vec![Vec::with_capacity(s.len())];
        for alpha in alphabets {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    alpha.iter().map(move |&l| {
                        let mut t = prefix.clone();
                        t.push(l);
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn tuple_violations(&self, s: &[usize], tuples: &WinningSet, out: &mut Vec<Violation>) {
        for t in tuples {
            if t.len() != self.parties() {
                out.push(Violation::new(
                    ViolationCode::TupleArity,
                    format!("tuple {t:?} under setting {s:?} has {} entries, expected {}", t.len(), self.parties()),
                ));
                continue;
            }
            for (p, (&label, &x)) in t.iter().zip(s).enumerate() {
                if !self.alphabet(p, x).contains(&label) {
                    out.push(Violation::new(
                        ViolationCode::LabelNotInAlphabet,
                        format!("label {label} of party {} is not an outcome of setting {x}", p + 1),
                    ));
                }
            }
        }
    }
}

impl Validate for Scenario {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.alphabets.is_empty() {
            out.push(Violation::new(ViolationCode::NoParties, "at least one party is required"));
        }
        for (p, per_party) in self.alphabets.iter().enumerate() {
            if per_party.is_empty() {
                out.push(Violation::new(
                    ViolationCode::NoSettings,
                    format!("party {} has no settings", p + 1),
                ));
            }
            for (x, alpha) in per_party.iter().enumerate() {
                if alpha.is_empty() {
                    out.push(Violation::new(
                        ViolationCode::EmptyAlphabet,
                        format!("party {} setting {} has no outcomes", p + 1, x + 1),
                    ));
                }
                let distinct: BTreeSet<_> = alpha.iter().collect();
                if distinct.len() != alpha.len() {
                    out.push(Violation::new(
                        ViolationCode::DuplicateLabel,
                        format!("party {} setting {} repeats an outcome label", p + 1, x + 1),
                    ));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Correlation inequality
// ---------------------------------------------------------------------------

/// `|Σ_s c_s ⟨Π_i o_i^(s_i)⟩| <= C` over dichotomic outcomes.
///
/// Zero coefficients are not stored; `coefficient(s)` returns 0 for them.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationInequality {
    settings: Vec<usize>,
    coefficients: BTreeMap<SettingVec, f64>,
    classical_bound: f64,
}

impl CorrelationInequality {
    pub fn new(
        settings: Vec<usize>,
        coefficients: BTreeMap<SettingVec, f64>,
        classical_bound: f64,
    ) -> Result<Self, ModelError> {
        let coefficients = coefficients.into_iter().filter(|(_, c)| *c != 0.0).collect();
        let ineq = Self {
            settings,
            coefficients,
            classical_bound,
        };
        let v = ineq.violations();
        into_result(ineq, v)
    }

    /// Builds a two-party inequality from a coefficient matrix, row `i`
    /// holding the coefficients of `⟨a_{i+1} b_j⟩`.
    pub fn from_matrix(rows: &[Vec<f64>], classical_bound: f64) -> Result<Self, ModelError> {
        let m1 = rows.len();
        let m2 = rows.first().map_or(0, Vec::len);
        let mut coefficients = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                coefficients.insert(vec![i + 1, j + 1], c);
            }
        }
        Self::new(vec![m1, m2], coefficients, classical_bound)
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    pub fn coefficients(&self) -> &BTreeMap<SettingVec, f64> {
        &self.coefficients
    }

    pub fn coefficient(&self, s: &[usize]) -> f64 {
        self.coefficients.get(s).copied().unwrap_or(0.0)
    }

    pub fn classical_bound(&self) -> f64 {
        self.classical_bound
    }

    /// Σ_s |c_s|
    pub fn abs_sum(&self) -> f64 {
        self.coefficients.values().map(|c| c.abs()).sum()
    }

    /// Dense coefficient matrix of a two-party inequality.
    pub fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        if self.parties() != 2 {
            return None;
        }
        Some(
            (1..=self.settings[0])
                .map(|i| (1..=self.settings[1]).map(|j| self.coefficient(&[i, j])).collect())
                .collect(),
        )
    }

    /// The same inequality with every coefficient negated.
    pub fn negated(&self) -> Self {
        Self {
            settings: self.settings.clone(),
            coefficients: self.coefficients.iter().map(|(s, c)| (s.clone(), -c)).collect(),
            classical_bound: self.classical_bound,
        }
    }
}

impl Validate for CorrelationInequality {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.settings.is_empty() {
            out.push(Violation::new(ViolationCode::NoParties, "at least one party is required"));
        }
        if self.settings.iter().any(|&m| m == 0) {
            out.push(Violation::new(ViolationCode::NoSettings, "every party needs at least one setting"));
        }
        for (s, c) in &self.coefficients {
            if !setting_in_range(s, &self.settings) {
                out.push(Violation::new(
                    ViolationCode::SettingOutOfRange,
                    format!("coefficient key {s:?} is outside settings {:?}", self.settings),
                ));
            }
            if !c.is_finite() {
                out.push(Violation::new(ViolationCode::NonFinite, format!("coefficient at {s:?} is not finite")));
            }
        }
        if self.coefficients.is_empty() {
            out.push(Violation::new(ViolationCode::AllCoefficientsZero, "at least one coefficient must be nonzero"));
        }
        if !self.classical_bound.is_finite() {
            out.push(Violation::new(ViolationCode::NonFinite, "classical bound is not finite"));
        } else if self.classical_bound <= 0.0 {
            out.push(Violation::new(
                ViolationCode::NonPositiveBound,
                format!("classical bound {} must be positive", self.classical_bound),
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Weighted-sum inequality
// ---------------------------------------------------------------------------

/// `S_min <= Σ_s w_s P(outcomes ∈ W_s | s) <= S_max`, the setting-uniform
/// weighted-sum form. Absent weights are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSumInequality {
    scenario: Scenario,
    weights: BTreeMap<SettingVec, f64>,
    winning_sets: BTreeMap<SettingVec, WinningSet>,
    s_min: f64,
    s_max: f64,
}

impl WeightedSumInequality {
    pub fn new(
        scenario: Scenario,
        weights: BTreeMap<SettingVec, f64>,
        winning_sets: BTreeMap<SettingVec, WinningSet>,
        s_min: f64,
        s_max: f64,
    ) -> Result<Self, ModelError> {
        let ineq = Self {
            scenario,
            weights,
            winning_sets,
            s_min,
            s_max,
        };
        let v = ineq.violations();
        into_result(ineq, v)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn weights(&self) -> &BTreeMap<SettingVec, f64> {
        &self.weights
    }

    pub fn weight(&self, s: &[usize]) -> f64 {
        self.weights.get(s).copied().unwrap_or(0.0)
    }

    pub fn winning_sets(&self) -> &BTreeMap<SettingVec, WinningSet> {
        &self.winning_sets
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.values().sum()
    }
}

impl Validate for WeightedSumInequality {
    fn violations(&self) -> Vec<Violation> {
        let mut out = self.scenario.violations();
        if !out.is_empty() {
            return out;
        }
        for (s, &w) in &self.weights {
            if !self.scenario.contains_setting(s) {
                out.push(Violation::new(
                    ViolationCode::SettingOutOfRange,
                    format!("weight key {s:?} is outside settings {:?}", self.scenario.settings()),
                ));
            }
            if !w.is_finite() {
                out.push(Violation::new(ViolationCode::NonFinite, format!("weight at {s:?} is not finite")));
            } else if w < 0.0 {
                out.push(Violation::new(
                    ViolationCode::NegativeWeight,
                    format!("weight {w} at {s:?} is negative"),
                ));
            }
        }
        if !self.weights.values().any(|&w| w > 0.0) {
            out.push(Violation::new(ViolationCode::AllWeightsZero, "at least one weight must be positive"));
        }
        for (s, set) in &self.winning_sets {
            if !self.scenario.contains_setting(s) {
                out.push(Violation::new(
                    ViolationCode::SettingOutOfRange,
                    format!("winning-set key {s:?} is outside settings {:?}", self.scenario.settings()),
                ));
                continue;
            }
            self.scenario.tuple_violations(s, set, &mut out);
        }
        if !self.s_min.is_finite() || !self.s_max.is_finite() {
            out.push(Violation::new(ViolationCode::NonFinite, "classical bounds must be finite"));
        } else if self.s_min > self.s_max {
            out.push(Violation::new(
                ViolationCode::BoundsInverted,
                format!("smin {} exceeds smax {}", self.s_min, self.s_max),
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Nonlocal game
// ---------------------------------------------------------------------------

/// Input distribution plus truth table. Inputs with zero probability need no
/// truth-table entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalGame {
    scenario: Scenario,
    distribution: BTreeMap<SettingVec, f64>,
    truth_table: BTreeMap<SettingVec, WinningSet>,
}

impl NonlocalGame {
    pub fn new(
        scenario: Scenario,
        distribution: BTreeMap<SettingVec, f64>,
        truth_table: BTreeMap<SettingVec, WinningSet>,
    ) -> Result<Self, ModelError> {
        let game = Self {
            scenario,
            distribution,
            truth_table,
        };
        let v = game.violations();
        into_result(game, v)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn parties(&self) -> usize {
        self.scenario.parties()
    }

    pub fn distribution(&self) -> &BTreeMap<SettingVec, f64> {
        &self.distribution
    }

    pub fn probability(&self, s: &[usize]) -> f64 {
        self.distribution.get(s).copied().unwrap_or(0.0)
    }

    pub fn truth_table(&self) -> &BTreeMap<SettingVec, WinningSet> {
        &self.truth_table
    }

    pub fn winning_set(&self, s: &[usize]) -> Option<&WinningSet> {
        self.truth_table.get(s)
    }

    pub fn wins(&self, s: &[usize], outcome: &[Label]) -> bool {
        self.truth_table.get(s).is_some_and(|w| w.contains(outcome))
    }

    /// The game obtained by renaming `party`'s outputs through `relabel`
    /// (applied to every input). `relabel` must be a bijection on each
    /// alphabet of that party.
    pub fn relabel_outputs(
        &self,
        party: usize,
        relabel: impl Fn(Label) -> Label,
    ) -> Result<Self, ModelError> {
        let mut alphabets = self.scenario.alphabets().to_vec();
        for alpha in &mut alphabets[party] {
            for l in alpha.iter_mut() {
                *l = relabel(*l);
            }
        }
        let truth_table = self
            .truth_table
            .iter()
            .map(|(s, set)| {
                let set = set
                    .iter()
                    .map(|t| {
                        let mut t = t.clone();
                        t[party] = relabel(t[party]);
                        t
                    })
                    .collect();
                (s.clone(), set)
            })
            .collect();
        Self::new(Scenario::new(alphabets)?, self.distribution.clone(), truth_table)
    }
}

impl Validate for NonlocalGame {
    fn violations(&self) -> Vec<Violation> {
        let mut out = self.scenario.violations();
        if !out.is_empty() {
            return out;
        }
        let mut total = 0.0;
        for (s, &p) in &self.distribution {
            if !self.scenario.contains_setting(s) {
                out.push(Violation::new(
                    ViolationCode::SettingOutOfRange,
                    format!("probability key {s:?} is outside inputs {:?}", self.scenario.settings()),
                ));
            }
            if !p.is_finite() {
                out.push(Violation::new(ViolationCode::NonFinite, format!("probability at {s:?} is not finite")));
                continue;
            }
            if p < 0.0 {
                out.push(Violation::new(
                    ViolationCode::NegativeProbability,
                    format!("probability {p} at {s:?} is negative"),
                ));
            }
            if p > 0.0 && !self.truth_table.contains_key(s) {
                out.push(Violation::new(
                    ViolationCode::MissingTruthTable,
                    format!("input {s:?} has probability {p} but no truth-table entry"),
                ));
            }
            total += p;
        }
        if total.is_finite() && (total - 1.0).abs() > TOL {
            out.push(Violation::new(
                ViolationCode::DistributionNotNormalized,
                format!("input probabilities sum to {total}"),
            ));
        }
        for (s, set) in &self.truth_table {
            if !self.scenario.contains_setting(s) {
                out.push(Violation::new(
                    ViolationCode::SettingOutOfRange,
                    format!("truth-table key {s:?} is outside inputs {:?}", self.scenario.settings()),
                ));
                continue;
            }
            self.scenario.tuple_violations(s, set, &mut out);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// A local deterministic strategy: `responses[party][input - 1]` is the label
/// that party returns on that input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    responses: Vec<Vec<Label>>,
}

impl DeterministicStrategy {
    /// Builds a strategy and checks it against `scenario`'s alphabets.
    pub fn new(scenario: &Scenario, responses: Vec<Vec<Label>>) -> Result<Self, ModelError> {
        let strat = Self { responses };
        let v = strat.violations_against(scenario);
        into_result(strat, v)
    }

    /// Builds a strategy with no scenario to check against; only shape
    /// sanity (nonempty tables) is enforced.
    pub fn from_responses(responses: Vec<Vec<Label>>) -> Result<Self, ModelError> {
        let strat = Self { responses };
        let v = strat.violations();
        into_result(strat, v)
    }

    /// Every party answers `label` on every input.
    pub fn constant(scenario: &Scenario, label: Label) -> Result<Self, ModelError> {
        Self::new(
            scenario,
            scenario.settings().iter().map(|&m| vec![label; m]).collect(),
        )
    }

    pub fn responses(&self) -> &[Vec<Label>] {
        &self.responses
    }

    pub fn respond(&self, party: usize, input: usize) -> Label {
        self.responses[party][input - 1]
    }

    /// Joint output for setting vector `s`.
    pub fn outcome(&self, s: &[usize]) -> OutcomeTuple {
        s.iter().enumerate().map(|(p, &x)| self.respond(p, x)).collect()
    }

    pub fn violations_against(&self, scenario: &Scenario) -> Vec<Violation> {
        let mut out = self.violations();
        if scenario.settings() != self.responses.iter().map(Vec::len).collect::<Vec<_>>() {
            out.push(Violation::new(
                ViolationCode::ShapeMismatch,
                format!(
                    "strategy covers inputs {:?}, scenario has {:?}",
                    self.responses.iter().map(Vec::len).collect::<Vec<_>>(),
                    scenario.settings()
                ),
            ));
            return out;
        }
        for (p, table) in self.responses.iter().enumerate() {
            for (x, label) in table.iter().enumerate() {
                if !scenario.alphabet(p, x + 1).contains(label) {
                    out.push(Violation::new(
                        ViolationCode::ResponseNotInAlphabet,
                        format!("party {} answers {label} on input {}, not an allowed outcome", p + 1, x + 1),
                    ));
                }
            }
        }
        out
    }
}

impl Validate for DeterministicStrategy {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.responses.is_empty() {
            out.push(Violation::new(ViolationCode::NoParties, "strategy has no parties"));
        }
        if self.responses.iter().any(Vec::is_empty) {
            out.push(Violation::new(ViolationCode::NoSettings, "a party has an empty response table"));
        }
        out
    }
}

/// Projective measurement: one projector per outcome label.
pub type Measurement = BTreeMap<Label, CMatrix>;

/// Shared pure state plus per-(party, input) projective measurements.
///
/// The state is indexed party-major: basis index
/// `Σ_i k_i · Π_{j>i} d_j` for local basis indices `k_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    local_dims: Vec<usize>,
    state: Vec<C64>,
    measurements: Vec<Vec<Measurement>>,
}

impl QuantumStrategy {
    pub fn new(
        local_dims: Vec<usize>,
        state: Vec<C64>,
        measurements: Vec<Vec<Measurement>>,
    ) -> Result<Self, ModelError> {
        let strat = Self {
            local_dims,
            state,
            measurements,
        };
        let v = strat.violations();
        into_result(strat, v)
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    pub fn state(&self) -> &[C64] {
        &self.state
    }

    pub fn measurements(&self) -> &[Vec<Measurement>] {
        &self.measurements
    }

    /// Measurement of `party` (0-based) on `input` (1-based).
    pub fn measurement(&self, party: usize, input: usize) -> &Measurement {
        &self.measurements[party][input - 1]
    }

    pub fn inputs(&self) -> Vec<usize> {
        self.measurements.iter().map(Vec::len).collect()
    }

    /// Same parties and inputs as `scenario`, and each measurement's labels
    /// are exactly the outcome alphabet.
    pub fn violations_against(&self, scenario: &Scenario) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.inputs() != scenario.settings() {
            out.push(Violation::new(
                ViolationCode::ShapeMismatch,
                format!("strategy covers inputs {:?}, scenario has {:?}", self.inputs(), scenario.settings()),
            ));
            return out;
        }
        for (p, per_party) in self.measurements.iter().enumerate() {
            for (x, m) in per_party.iter().enumerate() {
                let labels: BTreeSet<Label> = m.keys().copied().collect();
                let alpha: BTreeSet<Label> = scenario.alphabet(p, x + 1).iter().copied().collect();
                if labels != alpha {
                    out.push(Violation::new(
                        ViolationCode::ShapeMismatch,
                        format!(
                            "party {} input {} measures outcomes {labels:?}, game expects {alpha:?}",
                            p + 1,
                            x + 1
                        ),
                    ));
                }
            }
        }
        out
    }
}

impl Validate for QuantumStrategy {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.local_dims.is_empty() {
            out.push(Violation::new(ViolationCode::NoParties, "strategy has no parties"));
            return out;
        }
        if let Some(d) = self.local_dims.iter().find(|&&d| d < 2) {
            out.push(Violation::new(
                ViolationCode::DimensionTooSmall,
                format!("local dimension {d} is below 2"),
            ));
            return out;
        }
        if self.measurements.len() != self.local_dims.len() {
            out.push(Violation::new(
                ViolationCode::ShapeMismatch,
                format!(
                    "{} measurement tables for {} parties",
                    self.measurements.len(),
                    self.local_dims.len()
                ),
            ));
            return out;
        }
        let total: usize = self.local_dims.iter().product();
        if self.state.len() != total {
            out.push(Violation::new(
                ViolationCode::ShapeMismatch,
                format!("state has {} amplitudes, dimension is {total}", self.state.len()),
            ));
        } else if self.state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            out.push(Violation::new(ViolationCode::NonFinite, "state has non-finite amplitudes"));
        } else {
            let norm = crate::linalg::vec_norm(&self.state);
            if (norm - 1.0).abs() > TOL {
                out.push(Violation::new(
                    ViolationCode::StateNotNormalized,
                    format!("state norm is {norm}"),
                ));
            }
        }
        for (p, per_party) in self.measurements.iter().enumerate() {
            let d = self.local_dims[p];
            if per_party.is_empty() {
                out.push(Violation::new(ViolationCode::NoSettings, format!("party {} has no measurements", p + 1)));
            }
            for (x, m) in per_party.iter().enumerate() {
                measurement_violations(p, x, d, m, &mut out);
            }
        }
        out
    }
}

fn measurement_violations(p: usize, x: usize, d: usize, m: &Measurement, out: &mut Vec<Violation>) {
    let at = || format!("party {} input {}", p + 1, x + 1);
    if m.is_empty() {
        out.push(Violation::new(ViolationCode::EmptyAlphabet, format!("{} has no outcomes", at())));
        return;
    }
    for (label, proj) in m {
        if proj.dim() != d {
            out.push(Violation::new(
                ViolationCode::ShapeMismatch,
                format!("{} outcome {label}: projector is {n}x{n}, local dimension {d}", at(), n = proj.dim()),
            ));
            return;
        }
        if !proj.is_finite() {
            out.push(Violation::new(ViolationCode::NonFinite, format!("{} outcome {label} is not finite", at())));
            return;
        }
        if proj.hermiticity_defect() > TOL {
            out.push(Violation::new(
                ViolationCode::NotHermitian,
                format!("{} outcome {label}: projector is not Hermitian", at()),
            ));
        }
        if (proj * proj).max_abs_diff(proj) > TOL {
            out.push(Violation::new(
                ViolationCode::NotProjective,
                format!("{} outcome {label}: P·P differs from P", at()),
            ));
        }
    }
    let projs: Vec<(&Label, &CMatrix)> = m.iter().collect();
    let zero = CMatrix::zeros(d);
    for (i, (la, a)) in projs.iter().enumerate() {
        for (lb, b) in &projs[i + 1..] {
            if (*a * *b).max_abs_diff(&zero) > TOL {
                out.push(Violation::new(
                    ViolationCode::ProjectorsNotOrthogonal,
                    format!("{} outcomes {la} and {lb} overlap", at()),
                ));
            }
        }
    }
    let sum = projs.iter().fold(CMatrix::zeros(d), |acc, (_, p)| &acc + *p);
    if sum.max_abs_diff(&CMatrix::identity(d)) > TOL {
        out.push(Violation::new(
            ViolationCode::ProjectorsIncomplete,
            format!("{} projectors do not sum to the identity", at()),
        ));
    }
}

// ---------------------------------------------------------------------------
// Value report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumMethod {
    /// Vector optimization for two-party XOR games; exact at convergence.
    ExactXor,
    /// Certified lower bound from an explicit strategy.
    SeesawLowerBound,
}

impl QuantumMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            QuantumMethod::ExactXor => "exact-xor",
            QuantumMethod::SeesawLowerBound => "seesaw-lower-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumValue {
    pub value: f64,
    pub method: QuantumMethod,
    pub converged: bool,
}

/// Classical window, optional quantum value, and the witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueReport {
    classical_max: f64,
    classical_min: f64,
    quantum: Option<QuantumValue>,
    advantage: Option<f64>,
    witness_classical: DeterministicStrategy,
    witness_quantum: Option<QuantumStrategy>,
}

impl ValueReport {
    pub fn new(
        classical_max: f64,
        classical_min: f64,
        witness_classical: DeterministicStrategy,
        quantum: Option<QuantumValue>,
        witness_quantum: Option<QuantumStrategy>,
    ) -> Result<Self, ModelError> {
        let report = Self {
            classical_max,
            classical_min,
            advantage: quantum.map(|q| q.value - classical_max),
            quantum,
            witness_classical,
            witness_quantum,
        };
        let v = report.violations();
        into_result(report, v)
    }

    pub fn classical_max(&self) -> f64 {
        self.classical_max
    }

    pub fn classical_min(&self) -> f64 {
        self.classical_min
    }

    pub fn quantum(&self) -> Option<QuantumValue> {
        self.quantum
    }

    pub fn advantage(&self) -> Option<f64> {
        self.advantage
    }

    pub fn witness_classical(&self) -> &DeterministicStrategy {
        &self.witness_classical
    }

    pub fn witness_quantum(&self) -> Option<&QuantumStrategy> {
        self.witness_quantum.as_ref()
    }
}

impl Validate for ValueReport {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (lo, hi) = (self.classical_min, self.classical_max);
        if !(lo >= -TOL && lo <= hi + TOL && hi <= 1.0 + TOL) {
            out.push(Violation::new(
                ViolationCode::ProbabilityOutOfRange,
                format!("classical window [{lo}, {hi}] is not inside [0, 1]"),
            ));
        }
        if let Some(q) = self.quantum {
            if !(q.value >= -TOL && q.value <= 1.0 + TOL) {
                out.push(Violation::new(
                    ViolationCode::ProbabilityOutOfRange,
                    format!("quantum value {} is not a probability", q.value),
                ));
            }
            if q.converged && q.value < hi - TOL {
                out.push(Violation::new(
                    ViolationCode::QuantumBelowClassical,
                    format!("converged quantum value {} is below classical {hi}", q.value),
                ));
            }
        }
        if let Some(w) = &self.witness_quantum {
            out.extend(w.violations());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh_game(prob: f64) -> Result<NonlocalGame, ModelError> {
        let scenario = Scenario::dichotomic(&[2, 2]).unwrap();
        let mut dist = BTreeMap::new();
        let mut table = BTreeMap::new();
        for s in scenario.setting_vectors() {
            dist.insert(s.clone(), prob);
            let sign = if s == [2, 2] { -1 } else { 1 };
            let set = scenario
                .outcome_tuples(&s)
                .into_iter()
                .filter(|t| t.iter().product::<i64>() == sign)
                .collect();
            table.insert(s, set);
        }
        NonlocalGame::new(scenario, dist, table)
    }

    #[test]
    fn setting_vectors_are_lexicographic() {
        let all: Vec<_> = setting_vectors(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![1, 1]);
        assert_eq!(all[1], vec![1, 2]);
        assert_eq!(all[5], vec![2, 3]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn valid_game_passes_validation() {
        let game = chsh_game(0.25).unwrap();
        assert!(game.validate().is_ok());
    }

    #[test]
    fn half_normalized_distribution_is_flagged() {
        let err = chsh_game(0.125).unwrap_err();
        assert!(err.has(ViolationCode::DistributionNotNormalized));
        assert_eq!(ViolationCode::DistributionNotNormalized.as_str(), "distribution-not-normalized");
    }

    #[test]
    fn missing_truth_table_only_for_asked_inputs() {
        let scenario = Scenario::dichotomic(&[1, 2]).unwrap();
        let mut dist = BTreeMap::new();
        dist.insert(vec![1, 1], 1.0);
        dist.insert(vec![1, 2], 0.0);
        let mut table = BTreeMap::new();
        table.insert(vec![1, 1], WinningSet::new());
        assert!(NonlocalGame::new(scenario.clone(), dist.clone(), table).is_ok());
        let err = NonlocalGame::new(scenario, dist, BTreeMap::new()).unwrap_err();
        assert!(err.has(ViolationCode::MissingTruthTable));
    }

    #[test]
    fn correlation_rejects_bad_values() {
        let mut c = BTreeMap::new();
        c.insert(vec![3, 1], 1.0);
        let err = CorrelationInequality::new(vec![2, 2], c, 0.0).unwrap_err();
        assert!(err.has(ViolationCode::SettingOutOfRange));
        assert!(err.has(ViolationCode::NonPositiveBound));

        let mut zeros = BTreeMap::new();
        zeros.insert(vec![1, 1], 0.0);
        let err = CorrelationInequality::new(vec![2, 2], zeros, 1.0).unwrap_err();
        assert!(err.has(ViolationCode::AllCoefficientsZero));
    }

    #[test]
    fn weighted_rejects_negative_weight_and_foreign_labels() {
        let scenario = Scenario::dichotomic(&[1]).unwrap();
        let mut w = BTreeMap::new();
        w.insert(vec![1], -2.0);
        let mut sets = BTreeMap::new();
        sets.insert(vec![1], [vec![7]].into_iter().collect());
        let err = WeightedSumInequality::new(scenario, w, sets, 0.0, 1.0).unwrap_err();
        assert!(err.has(ViolationCode::NegativeWeight));
        assert!(err.has(ViolationCode::AllWeightsZero));
        assert!(err.has(ViolationCode::LabelNotInAlphabet));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = Scenario::new(vec![vec![vec![1, 1]]]).unwrap_err();
        assert!(err.has(ViolationCode::DuplicateLabel));
    }

    #[test]
    fn deterministic_strategy_checks_alphabet() {
        let scenario = Scenario::dichotomic(&[2, 2]).unwrap();
        assert!(DeterministicStrategy::constant(&scenario, 1).is_ok());
        let err = DeterministicStrategy::constant(&scenario, 0).unwrap_err();
        assert!(err.has(ViolationCode::ResponseNotInAlphabet));
        let err = DeterministicStrategy::new(&scenario, vec![vec![1], vec![1, 1]]).unwrap_err();
        assert!(err.has(ViolationCode::ShapeMismatch));
    }

    fn z_measurement() -> Measurement {
        let mut m = Measurement::new();
        m.insert(1, CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]));
        m.insert(-1, CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]));
        m
    }

    #[test]
    fn quantum_strategy_checks_projectors() {
        let state = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let ok = QuantumStrategy::new(
            vec![2, 2],
            state.clone(),
            vec![vec![z_measurement()], vec![z_measurement()]],
        );
        assert!(ok.is_ok());

        let mut bad = z_measurement();
        bad.insert(1, CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]));
        let err = QuantumStrategy::new(vec![2, 2], state.clone(), vec![vec![bad], vec![z_measurement()]])
            .unwrap_err();
        assert!(err.has(ViolationCode::NotProjective));
        assert_eq!(ViolationCode::NotProjective.as_str(), "not-projective");

        let mut incomplete = z_measurement();
        incomplete.remove(&-1);
        let err = QuantumStrategy::new(vec![2, 2], state.clone(), vec![vec![incomplete], vec![z_measurement()]])
            .unwrap_err();
        assert!(err.has(ViolationCode::ProjectorsIncomplete));

        let unnormalized: Vec<C64> = state.iter().map(|z| z * 2.0).collect();
        let err = QuantumStrategy::new(vec![2, 2], unnormalized, vec![vec![z_measurement()], vec![z_measurement()]])
            .unwrap_err();
        assert!(err.has(ViolationCode::StateNotNormalized));
    }

    #[test]
    fn value_report_window_checked() {
        let scenario = Scenario::dichotomic(&[1]).unwrap();
        let w = DeterministicStrategy::constant(&scenario, 1).unwrap();
        assert!(ValueReport::new(0.75, 0.25, w.clone(), None, None).is_ok());
        let err = ValueReport::new(0.25, 0.75, w.clone(), None, None).unwrap_err();
        assert!(err.has(ViolationCode::ProbabilityOutOfRange));
        let q = QuantumValue {
            value: 0.5,
            method: QuantumMethod::SeesawLowerBound,
            converged: true,
        };
        let err = ValueReport::new(0.75, 0.25, w, Some(q), None).unwrap_err();
        assert!(err.has(ViolationCode::QuantumBelowClassical));
    }

    #[test]
    fn relabeling_outputs_keeps_distribution() {
        let game = chsh_game(0.25).unwrap();
        let flipped = game.relabel_outputs(0, |l| -l).unwrap();
        assert_eq!(flipped.distribution(), game.distribution());
        assert!(flipped.wins(&[1, 1], &[1, -1]));
        assert!(!flipped.wins(&[1, 1], &[1, 1]));
    }
}
