//! Seeded Monte-Carlo referee.
//!
//! Rounds are played in batches of [`BATCH`]; batch `b` draws from stream `b`
//! of [`crate::rng`] (xoshiro256++), so a report depends only on
//! `(game, strategy, rounds, seed)` and not on thread scheduling.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::classical::{evaluate_strategy, ClassicalError};
use crate::io::format_real;
use crate::model::{DeterministicStrategy, NonlocalGame, SettingVec, TOL};
use crate::model::QuantumStrategy;
use crate::quantum::{born_rule, QuantumError};
use crate::rng;

pub const BATCH: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Deterministic(DeterministicStrategy),
    Quantum(QuantumStrategy),
    /// Shared randomness over deterministic strategies, weights summing to 1.
    Mixed(Vec<(f64, DeterministicStrategy)>),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("strategy does not match the game: {0}")]
    ShapeMismatch(String),
    #[error("at least one round is required")]
    NoRounds,
    #[error("invalid mixture: {0}")]
    BadMixture(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

impl From<ClassicalError> for SimError {
    fn from(e: ClassicalError) -> Self {
        SimError::ShapeMismatch(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub rounds: u64,
    pub wins: u64,
    pub empirical_rate: f64,
    pub analytic_rate: Option<f64>,
    /// `sqrt(p(1-p)/rounds)` at the empirical rate.
    pub stderr: f64,
    pub rng_seed: u64,
}

impl SimReport {
    /// One `key value` pair per line.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rounds {}", self.rounds);
        let _ = writeln!(out, "wins {}", self.wins);
        let _ = writeln!(out, "empirical_rate {}", format_real(self.empirical_rate));
        if let Some(a) = self.analytic_rate {
            let _ = writeln!(out, "analytic_rate {}", format_real(a));
        }
        let _ = writeln!(out, "stderr {}", format_real(self.stderr));
        let _ = writeln!(out, "rng_seed {}", self.rng_seed);
        out
    }
}

/// Cumulative table over a finite categorical distribution.
#[derive(Debug, Clone)]
struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// Draws input vectors from a game's distribution.
#[derive(Debug, Clone)]
pub struct InputSampler {
    inputs: Vec<SettingVec>,
    table: Categorical,
}

impl InputSampler {
    pub fn new(game: &NonlocalGame) -> Self {
        let (inputs, probs): (Vec<_>, Vec<_>) = game
            .distribution()
            .iter()
            .filter(|(_, &p)| p > 0.0)
            .map(|(s, &p)| (s.clone(), p))
            .unzip();
        Self { inputs, table: Categorical::new(probs) }
    }

    /// Inputs with positive probability, in sampling-index order.
    pub fn inputs(&self) -> &[SettingVec] {
        &self.inputs
    }

    pub fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        self.table.sample(rng)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &SettingVec {
        &self.inputs[self.sample_index(rng)]
    }
}

/// Per-input winning behaviour of a strategy.
enum Referee {
    /// `wins[component][input]`, with a distribution over components.
    Table { components: Categorical, wins: Vec<Vec<bool>> },
    /// Outcome distribution per input with the winning flag per outcome.
    Born { outcomes: Vec<(Categorical, Vec<bool>)> },
}

impl Referee {
    fn build(game: &NonlocalGame, inputs: &[SettingVec], strategy: &Strategy) -> Result<Self, SimError> {
        let table = |d: &DeterministicStrategy| -> Result<Vec<bool>, SimError> {
            if let Some(v) = d.violations_against(game.scenario()).first() {
                return Err(SimError::ShapeMismatch(v.to_string()));
            }
            Ok(inputs.iter().map(|s| game.wins(s, &d.outcome(s))).collect())
        };
        match strategy {
            Strategy::Deterministic(d) => Ok(Referee::Table {
                components: Categorical::new([1.0]),
                wins: vec![table(d)?],
            }),
            Strategy::Mixed(mix) => {
                check_mixture(mix)?;
                Ok(Referee::Table {
                    components: Categorical::new(mix.iter().map(|(w, _)| *w)),
                    wins: mix.iter().map(|(_, d)| table(d)).collect::<Result<_, _>>()?,
                })
            }
            Strategy::Quantum(q) => {
                if let Some(v) = q.violations_against(game.scenario()).first() {
                    return Err(SimError::ShapeMismatch(v.to_string()));
                }
                let outcomes = inputs
                    .iter()
                    .map(|s| {
                        let dist = born_rule(q, s)?;
                        let flags = dist.keys().map(|t| game.wins(s, t)).collect();
                        Ok((Categorical::new(dist.values().copied()), flags))
                    })
                    .collect::<Result<_, QuantumError>>()?;
                Ok(Referee::Born { outcomes })
            }
        }
    }

    fn play<R: Rng>(&self, input: usize, rng: &mut R) -> bool {
        match self {
            Referee::Table { components, wins } => {
                let c = if wins.len() == 1 { 0 } else { components.sample(rng) };
                wins[c][input]
            }
            Referee::Born { outcomes } => {
                let (dist, flags) = &outcomes[input];
                flags[dist.sample(rng)]
            }
        }
    }
}

fn check_mixture(mix: &[(f64, DeterministicStrategy)]) -> Result<(), SimError> {
    if mix.is_empty() {
        return Err(SimError::BadMixture("no components".into()));
    }
    if let Some((w, _)) = mix.iter().find(|(w, _)| !w.is_finite() || *w < 0.0) {
        return Err(SimError::BadMixture(format!("weight {w} is not a probability")));
    }
    let total: f64 = mix.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > TOL {
        return Err(SimError::BadMixture(format!("weights sum to {total}")));
    }
    Ok(())
}

/// Exact winning probability `Σ_s ρ_s Pr(win | s)`.
pub fn analytic_value(game: &NonlocalGame, strategy: &Strategy) -> Result<f64, SimError> {
    match strategy {
        Strategy::Deterministic(d) => Ok(evaluate_strategy(game, d)?),
        Strategy::Mixed(mix) => {
            check_mixture(mix)?;
            let mut total = 0.0;
            for (w, d) in mix {
                total += w * evaluate_strategy(game, d)?;
            }
            Ok(total)
        }
        Strategy::Quantum(q) => {
            if let Some(v) = q.violations_against(game.scenario()).first() {
                return Err(SimError::ShapeMismatch(v.to_string()));
            }
            Ok(crate::quantum::quantum_game_value(game, q)?)
        }
    }
}

/// Plays `rounds` independent rounds and reports the win statistics.
pub fn simulate(game: &NonlocalGame, strategy: &Strategy, rounds: u64, seed: u64) -> Result<SimReport, SimError> {
    if rounds == 0 {
        return Err(SimError::NoRounds);
    }
    let sampler = InputSampler::new(game);
    let referee = Referee::build(game, sampler.inputs(), strategy)?;
    let analytic = analytic_value(game, strategy)?;
    let batches = rounds.div_ceil(BATCH);
    let streams = rng::streams(seed, batches as usize);
    let wins: u64 = streams
        .into_par_iter()
        .enumerate()
        .map(|(b, mut rng)| {
            let start = b as u64 * BATCH;
            let n = BATCH.min(rounds - start);
            let mut w = 0u64;
            for _ in 0..n {
                let input = sampler.sample_index(&mut rng);
                w += referee.play(input, &mut rng) as u64;
            }
            w
        })
        .sum();
    let p = wins as f64 / rounds as f64;
    Ok(SimReport {
        rounds,
        wins,
        empirical_rate: p,
        analytic_rate: Some(analytic),
        stderr: (p * (1.0 - p) / rounds as f64).sqrt(),
        rng_seed: seed,
    })
}
