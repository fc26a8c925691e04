//! Built-in inequalities: CHSH, the Gisin n×n family, and the three-qutrit
//! mod-3 inequality in its weighted-sum form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::model::{CorrelationInequality, Label, Scenario, WeightedSumInequality, WinningSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("family parameter n = {0} must be at least 2")]
    BadN(usize),
    #[error("{0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("dichotomic output must be +1 or -1, got {0}")]
    NotDichotomic(Label),
}

/// `⟨a1b1⟩ + ⟨a1b2⟩ + ⟨a2b1⟩ - ⟨a2b2⟩ <= 2`
pub fn chsh() -> CorrelationInequality {
    CorrelationInequality::from_matrix(&[vec![1.0, 1.0], vec![1.0, -1.0]], 2.0)
        .expect("CHSH is valid")
}

/// `c_ij = +1` if `i + j <= n`, else `-1`; local bound `n²/2` (even n) or
/// `(n² + 1)/2` (odd n).
pub fn gisin(n: usize) -> Result<CorrelationInequality, CatalogError> {
    if n < 2 {
        return Err(CatalogError::BadN(n));
    }
    let rows: Vec<Vec<f64>> = (1..=n)
        .map(|i| (1..=n).map(|j| if i + j <= n { 1.0 } else { -1.0 }).collect())
        .collect();
    let nn = (n * n) as f64;
    let bound = if n % 2 == 0 { nn / 2.0 } else { (nn + 1.0) / 2.0 };
    Ok(CorrelationInequality::from_matrix(&rows, bound).expect("Gisin inequality is valid"))
}

/// Closed-form quantum winning probability of the Gisin game,
/// `cos(π/2n) / (n sin(π/n)) + 1/2`.
pub fn gisin_quantum_max(n: usize) -> Result<f64, CatalogError> {
    if n < 2 {
        return Err(CatalogError::BadN(n));
    }
    let n = n as f64;
    Ok((PI / (2.0 * n)).cos() / (n * (PI / n).sin()) + 0.5)
}

/// Mod-3 sum conditions of the three-qutrit inequality, in setting order
/// (1,1,1), (1,1,2), ..., (2,2,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SumCondition {
    Equals(i64),
    NotEquals(i64),
}

impl SumCondition {
    fn holds(self, sum: i64) -> bool {
        match self {
            SumCondition::Equals(k) => sum.rem_euclid(3) == k,
            SumCondition::NotEquals(k) => sum.rem_euclid(3) != k,
        }
    }
}

const THREE_QUTRIT_CONDITIONS: [SumCondition; 8] = [
    SumCondition::Equals(0),
    SumCondition::NotEquals(2),
    SumCondition::NotEquals(2),
    SumCondition::Equals(1),
    SumCondition::NotEquals(2),
    SumCondition::Equals(1),
    SumCondition::Equals(1),
    SumCondition::Equals(0),
];

/// Three parties, two settings each, outcomes `{1, 0, -1}`. Weight 1 on every
/// setting except (2,2,2), which has weight 2; classical range `[0, 6]`.
pub fn three_qutrit() -> WeightedSumInequality {
    let scenario = Scenario::new(vec![vec![vec![1, 0, -1]; 2]; 3]).expect("valid scenario");
    let mut weights = BTreeMap::new();
    let mut winning_sets = BTreeMap::new();
    for (s, cond) in scenario.setting_vectors().into_iter().zip(THREE_QUTRIT_CONDITIONS) {
        let set: WinningSet = scenario
            .outcome_tuples(&s)
            .into_iter()
            .filter(|t| cond.holds(t.iter().sum()))
            .collect();
        let w = if s == [2, 2, 2] { 2.0 } else { 1.0 };
        weights.insert(s.clone(), w);
        winning_sets.insert(s, set);
    }
    WeightedSumInequality::new(scenario, weights, winning_sets, 0.0, 6.0)
        .expect("three-qutrit inequality is valid")
}

/// Continuum limit of the Gisin game: identical outputs win when
/// `alpha + beta <= 1`, opposite outputs win otherwise.
pub fn continuum_gisin_predicate(
    alpha: f64,
    beta: f64,
    out_a: Label,
    out_b: Label,
) -> Result<bool, CatalogError> {
    for x in [alpha, beta] {
        if !(0.0..=1.0).contains(&x) {
            return Err(CatalogError::OutOfRange(x));
        }
    }
    for o in [out_a, out_b] {
        if o != 1 && o != -1 {
            return Err(CatalogError::NotDichotomic(o));
        }
    }
    Ok((out_a == out_b) != (alpha + beta > 1.0))
}
