//! Exact classical values by exhaustive enumeration of local deterministic
//! strategies.
//!
//! A strategy is a response table indexed party-major, input-minor. The
//! enumeration walks an odometer whose most significant digit is
//! (party 1, input 1), so strategy index order is the lexicographic order of
//! response tables (by alphabet position). Ties are broken towards the
//! smaller index, which makes witnesses independent of how the range is
//! split across threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{
    DeterministicStrategy, Label, NonlocalGame, Scenario, SettingVec,
    WeightedSumInequality, WinningSet,
};
use crate::model::CorrelationInequality;
use crate::transform;

pub const DEFAULT_CAP: u64 = 100_000_000;

/// Values closer than this are treated as ties.
pub const TIE_EPS: f64 = 1e-15;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("strategy space has {size} deterministic strategies, above the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u64 },
    #[error("strategy does not match the game: {0}")]
    ShapeMismatch(String),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalConfig {
    pub cap: u64,
    /// `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalValue {
    pub max: f64,
    pub min: f64,
    pub argmax: DeterministicStrategy,
    pub argmin: DeterministicStrategy,
}

/// Extremes of an inequality's weighted sum over local deterministic models.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBounds {
    pub s_max: f64,
    pub s_min: f64,
    pub argmax: DeterministicStrategy,
    pub argmin: DeterministicStrategy,
}

/// Number of deterministic strategies, `Π_i Π_x |alphabet(i, x)|`.
pub fn strategy_space_size(scenario: &Scenario) -> u128 {
    scenario
        .alphabets()
        .iter()
        .flatten()
        .map(|a| a.len() as u128)
        .fold(1u128, |acc, k| acc.saturating_mul(k))
}

pub fn classical_value(game: &NonlocalGame, cfg: &ClassicalConfig) -> Result<ClassicalValue, ClassicalError> {
    let (max, min) = extremize(game.scenario(), game.distribution(), game.truth_table(), cfg)?;
    Ok(ClassicalValue {
        max: max.value,
        min: min.value,
        argmax: max.strategy,
        argmin: min.strategy,
    })
}

/// Same objective as the game built by `bell_to_game`, kept in unnormalized
/// weights so integer inequalities produce exact sums.
pub fn classical_bound(
    ineq: &WeightedSumInequality,
    cfg: &ClassicalConfig,
) -> Result<ClassicalBounds, ClassicalError> {
    let (max, min) = extremize(ineq.scenario(), ineq.weights(), ineq.winning_sets(), cfg)?;
    Ok(ClassicalBounds {
        s_max: max.value,
        s_min: min.value,
        argmax: max.strategy,
        argmin: min.strategy,
    })
}

/// Enumerated local bound `C = S_max - Σ|c|` of a correlation inequality.
pub fn correlation_bound(ineq: &CorrelationInequality, cfg: &ClassicalConfig) -> Result<f64, ClassicalError> {
    let weighted = transform::correlation_to_weighted(ineq);
    let bounds = classical_bound(&weighted, cfg)?;
    Ok(bounds.s_max - ineq.abs_sum())
}

pub fn evaluate_strategy(game: &NonlocalGame, strat: &DeterministicStrategy) -> Result<f64, ClassicalError> {
    let violations = strat.violations_against(game.scenario());
    if let Some(v) = violations.first() {
        return Err(ClassicalError::ShapeMismatch(v.to_string()));
    }
    Ok(game
        .distribution()
        .iter()
        .filter(|(s, _)| game.wins(s, &strat.outcome(s)))
        .map(|(_, &p)| p)
        .sum())
}

/// Value of a convex mixture of deterministic strategies (shared randomness).
pub fn mixture_value(
    game: &NonlocalGame,
    mixture: &[(f64, DeterministicStrategy)],
) -> Result<f64, ClassicalError> {
    mixture
        .iter()
        .map(|(w, s)| evaluate_strategy(game, s).map(|v| w * v))
        .sum()
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    index: u64,
}

struct Extremum {
    value: f64,
    strategy: DeterministicStrategy,
}

/// One weighted term of the objective: a setting vector, the digit that
/// holds each party's response, and a dense win table over outcome indices.
struct Term {
    weight: f64,
    digits: Vec<usize>,
    strides: Vec<usize>,
    wins: Vec<bool>,
}

struct Objective {
    radices: Vec<usize>,
    terms: Vec<Term>,
}

impl Objective {
    fn new(
        scenario: &Scenario,
        weights: &BTreeMap<SettingVec, f64>,
        tables: &BTreeMap<SettingVec, WinningSet>,
    ) -> Self {
        let settings = scenario.settings();
        let mut offsets = Vec::with_capacity(settings.len());
        let mut radices = Vec::new();
        for (p, &m) in settings.iter().enumerate() {
            offsets.push(radices.len());
            for x in 1..=m {
                radices.push(scenario.alphabet(p, x).len());
            }
        }
        let mut terms = Vec::new();
        for (s, &weight) in weights {
            if weight == 0.0 {
                continue;
            }
            let Some(set) = tables.get(s) else { continue };
            let digits: Vec<usize> = s.iter().enumerate().map(|(p, &x)| offsets[p] + x - 1).collect();
            let sizes: Vec<usize> = digits.iter().map(|&d| radices[d]).collect();
            let mut strides = vec![1; sizes.len()];
            for i in (0..sizes.len().saturating_sub(1)).rev() {
                strides[i] = strides[i + 1] * sizes[i + 1];
            }
            let mut wins = vec![false; sizes.iter().product()];
            for t in set {
                let idx = t.iter().enumerate().try_fold(0usize, |acc, (p, label)| {
                    scenario
                        .alphabet(p, s[p])
                        .iter()
                        .position(|l| l == label)
                        .map(|pos| acc + pos * strides[p])
                });
                if let Some(idx) = idx {
                    wins[idx] = true;
                }
            }
            terms.push(Term {
                weight,
                digits,
                strides,
                wins,
            });
        }
        Self { radices, terms }
    }

    fn value(&self, digits: &[usize]) -> f64 {
        let mut acc = 0.0;
        for term in &self.terms {
            let idx: usize = term
                .digits
                .iter()
                .zip(&term.strides)
                .map(|(&d, &st)| digits[d] * st)
                .sum();
            if term.wins[idx] {
                acc += term.weight;
            }
        }
        acc
    }

    fn decode(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for (slot, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *slot = (index % r as u64) as usize;
            index /= r as u64;
        }
        digits
    }

    fn scan(&self, start: u64, end: u64) -> (Best, Best) {
        let mut digits = self.decode(start);
        let first = self.value(&digits);
        let mut max = Best { value: first, index: start };
        let mut min = max.clone();
        for index in start + 1..end {
            for (slot, &r) in digits.iter_mut().zip(&self.radices).rev() {
                *slot += 1;
                if *slot < r {
                    break;
                }
                *slot = 0;
            }
            let v = self.value(&digits);
            if v > max.value + TIE_EPS {
                max = Best { value: v, index };
            }
            if v < min.value - TIE_EPS {
                min = Best { value: v, index };
            }
        }
        (max, min)
    }
}

fn pick_max(a: Best, b: Best) -> Best {
    if b.value > a.value + TIE_EPS || (b.value >= a.value - TIE_EPS && b.index < a.index) {
        b
    } else {
        a
    }
}

fn pick_min(a: Best, b: Best) -> Best {
    if b.value < a.value - TIE_EPS || (b.value <= a.value + TIE_EPS && b.index < a.index) {
        b
    } else {
        a
    }
}

fn extremize(
    scenario: &Scenario,
    weights: &BTreeMap<SettingVec, f64>,
    tables: &BTreeMap<SettingVec, WinningSet>,
    cfg: &ClassicalConfig,
) -> Result<(Extremum, Extremum), ClassicalError> {
    let size = strategy_space_size(scenario);
    if size > cfg.cap as u128 {
        return Err(ClassicalError::SearchSpaceTooLarge { size, cap: cfg.cap });
    }
    let total = size as u64;
    let objective = Objective::new(scenario, weights, tables);
    let chunks = total.div_ceil(CHUNK);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| objective.scan(c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .reduce_with(|(amax, amin), (bmax, bmin)| (pick_max(amax, bmax), pick_min(amin, bmin)))
            .expect("strategy space is never empty")
    };
    let (max, min) = match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| ClassicalError::ThreadPool(e.to_string()))?
            .install(run),
        None => run(),
    };
    let to_strategy = |index: u64| {
        let digits = objective.decode(index);
        let mut it = digits.into_iter();
        let responses: Vec<Vec<Label>> = scenario
            .alphabets()
            .iter()
            .map(|per_party| per_party.iter().map(|alpha| alpha[it.next().unwrap()]).collect())
            .collect();
        DeterministicStrategy::new(scenario, responses).expect("decoded strategy is in range")
    };
    Ok((
        Extremum {
            value: max.value,
            strategy: to_strategy(max.index),
        },
        Extremum {
            value: min.value,
            strategy: to_strategy(min.index),
        },
    ))
}
