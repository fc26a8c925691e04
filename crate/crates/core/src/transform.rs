//! Conversions between the correlation form, the weighted-sum form, and
//! nonlocal games.
//!
//! A correlation inequality `|Σ c_s ⟨Π o_i⟩| <= C` becomes the weighted sum
//! `Σ 2|c_s| P(Π o_i = sign c_s)` with bounds `Σ|c| ± C`. Normalizing the
//! weights gives the game's input distribution, and the winning sets become
//! its truth table. The game-to-inequality direction is the inverse up to the
//! overall scale of the weights.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::classical::{self, ClassicalConfig, ClassicalError};
use crate::model::{
    CorrelationInequality, ModelError, NonlocalGame, Scenario, SettingVec, ValueReport,
    WeightedSumInequality, WinningSet,
};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("outcomes are not dichotomic (+1/-1) for every party and setting")]
    NotDichotomic,
    #[error("winning set for setting {0:?} is not a full product-sign class")]
    NotProductForm(SettingVec),
    #[error("all weights are zero")]
    ZeroWeight,
    #[error("report carries no quantum value")]
    MissingQuantumValue,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("classical oracle failed: {0}")]
    Oracle(#[from] ClassicalError),
}

/// Normalized classical window `[P_C^min, P_C^max]` of a game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalWindow {
    pub min: f64,
    pub max: f64,
}

/// Product-sign class: all dichotomic tuples under `s` whose product is `sign`.
pub fn product_class(scenario: &Scenario, s: &[usize], sign: i64) -> WinningSet {
    scenario
        .outcome_tuples(s)
        .into_iter()
        .filter(|t| t.iter().product::<i64>() == sign)
        .collect()
}

pub fn correlation_to_weighted(ineq: &CorrelationInequality) -> WeightedSumInequality {
    let scenario = Scenario::dichotomic(ineq.settings())
        .expect("a valid correlation inequality has a valid dichotomic scenario");
    let mut weights = BTreeMap::new();
    let mut winning_sets = BTreeMap::new();
    for s in scenario.setting_vectors() {
        let c = ineq.coefficient(&s);
        let set = if c > 0.0 {
            product_class(&scenario, &s, 1)
        } else if c < 0.0 {
            product_class(&scenario, &s, -1)
        } else {
            WinningSet::new()
        };
        weights.insert(s.clone(), 2.0 * c.abs());
        winning_sets.insert(s, set);
    }
    let abs_sum = ineq.abs_sum();
    let bound = ineq.classical_bound();
    // Lower bound is Σ|c| - C; with C <= Σ|c| it stays nonnegative.
    WeightedSumInequality::new(scenario, weights, winning_sets, abs_sum - bound, abs_sum + bound)
        .expect("weighted form of a valid correlation inequality is valid")
}

pub fn weighted_to_correlation(
    ineq: &WeightedSumInequality,
) -> Result<CorrelationInequality, TransformError> {
    let scenario = ineq.scenario();
    if !scenario.is_dichotomic() {
        return Err(TransformError::NotDichotomic);
    }
    let mut coefficients = BTreeMap::new();
    for s in scenario.setting_vectors() {
        let w = ineq.weight(&s);
        if w == 0.0 {
            continue;
        }
        let empty = WinningSet::new();
        let set = ineq.winning_sets().get(&s).unwrap_or(&empty);
        let sign = if *set == product_class(scenario, &s, 1) {
            1.0
        } else if *set == product_class(scenario, &s, -1) {
            -1.0
        } else {
            return Err(TransformError::NotProductForm(s));
        };
        coefficients.insert(s, sign * w / 2.0);
    }
    let abs_sum: f64 = coefficients.values().map(|c: &f64| c.abs()).sum();
    Ok(CorrelationInequality::new(
        scenario.settings(),
        coefficients,
        ineq.s_max() - abs_sum,
    )?)
}

/// Normalizes the weights into an input distribution and copies the winning
/// sets into the truth table.
pub fn bell_to_game(
    ineq: &WeightedSumInequality,
) -> Result<(NonlocalGame, ClassicalWindow), TransformError> {
    let total = ineq.weight_sum();
    if total <= 0.0 {
        return Err(TransformError::ZeroWeight);
    }
    let distribution: BTreeMap<SettingVec, f64> = ineq
        .weights()
        .iter()
        .map(|(s, w)| (s.clone(), w / total))
        .collect();
    let mut truth_table = ineq.winning_sets().clone();
    for (s, &w) in ineq.weights() {
        if w > 0.0 {
            truth_table.entry(s.clone()).or_default();
        }
    }
    let game = NonlocalGame::new(ineq.scenario().clone(), distribution, truth_table)?;
    let window = ClassicalWindow {
        min: ineq.s_min() / total,
        max: ineq.s_max() / total,
    };
    Ok((game, window))
}

pub fn correlation_to_game(
    ineq: &CorrelationInequality,
) -> Result<(NonlocalGame, ClassicalWindow), TransformError> {
    bell_to_game(&correlation_to_weighted(ineq))
}

/// Inverse of [`bell_to_game`] with weights normalized to `Σw = 1`. The
/// classical bounds come from `oracle`, which returns the game's window.
pub fn game_to_bell<F>(game: &NonlocalGame, oracle: F) -> Result<WeightedSumInequality, TransformError>
where
    F: FnOnce(&NonlocalGame) -> Result<ClassicalWindow, ClassicalError>,
{
    let window = oracle(game)?;
    let total: f64 = game.distribution().values().sum();
    Ok(WeightedSumInequality::new(
        game.scenario().clone(),
        game.distribution().clone(),
        game.truth_table().clone(),
        window.min * total,
        window.max * total,
    )?)
}

/// [`game_to_bell`] with exhaustive enumeration as the oracle.
pub fn game_to_bell_enumerated(
    game: &NonlocalGame,
    cfg: &ClassicalConfig,
) -> Result<WeightedSumInequality, TransformError> {
    game_to_bell(game, |g| {
        classical::classical_value(g, cfg).map(|v| ClassicalWindow { min: v.min, max: v.max })
    })
}

/// Quantum value minus the classical maximum.
pub fn advantage(report: &ValueReport) -> Result<f64, TransformError> {
    report.advantage().ok_or(TransformError::MissingQuantumValue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::model::{DeterministicStrategy, QuantumMethod, QuantumValue};

    #[test]
    fn chsh_weighted_form() {
        let w = correlation_to_weighted(&catalog::chsh());
        for s in w.scenario().setting_vectors() {
            assert_eq!(w.weight(&s), 2.0);
            let set = &w.winning_sets()[&s];
            assert_eq!(set.len(), 2);
            let equal = set.iter().all(|t| t[0] == t[1]);
            assert_eq!(equal, s != [2, 2], "setting {s:?}");
        }
        assert_eq!(w.s_max(), 6.0);
        assert_eq!(w.s_min(), 2.0);
    }

    #[test]
    fn single_party() {
        let mut c = BTreeMap::new();
        c.insert(vec![1], 1.0);
        let ineq = CorrelationInequality::new(vec![1], c, 1.0).unwrap();
        let w = correlation_to_weighted(&ineq);
        assert_eq!(w.weight(&[1]), 2.0);
        assert_eq!(w.s_max(), 2.0);
        assert_eq!(w.s_min(), 0.0);
    }

    #[test]
    fn gisin3_weighted_bounds() {
        let w = correlation_to_weighted(&catalog::gisin(3).unwrap());
        assert!(w.weights().values().all(|&x| x == 2.0));
        // 2·(9 + 5)/2 from Σ|c| = 9 and C = 5
        assert_eq!(w.s_max(), 14.0);
    }

    #[test]
    fn chsh_round_trip_and_errors() {
        let chsh = catalog::chsh();
        let w = correlation_to_weighted(&chsh);
        assert_eq!(weighted_to_correlation(&w).unwrap(), chsh);

        let three = catalog::three_qutrit();
        assert!(matches!(weighted_to_correlation(&three), Err(TransformError::NotDichotomic)));

        let mut sets = w.winning_sets().clone();
        sets.insert(vec![1, 1], [vec![1, 1]].into_iter().collect());
        let broken = WeightedSumInequality::new(
            w.scenario().clone(),
            w.weights().clone(),
            sets,
            w.s_min(),
            w.s_max(),
        )
        .unwrap();
        match weighted_to_correlation(&broken) {
            Err(TransformError::NotProductForm(s)) => assert_eq!(s, vec![1, 1]),
            other => panic!("expected NotProductForm, got {other:?}"),
        }
    }

    #[test]
    fn chsh_game_distribution_and_window() {
        let (game, window) = correlation_to_game(&catalog::chsh()).unwrap();
        assert!(game.distribution().values().all(|&p| p == 0.25));
        assert_eq!(window, ClassicalWindow { min: 0.25, max: 0.75 });
    }

    #[test]
    fn gisin_distribution_is_uniform() {
        for n in 2..=6 {
            let (game, _) = correlation_to_game(&catalog::gisin(n).unwrap()).unwrap();
            let expect = 1.0 / (n * n) as f64;
            assert!(game.distribution().values().all(|&p| (p - expect).abs() < 1e-15));
        }
    }

    #[test]
    fn three_qutrit_distribution_and_window() {
        let (game, window) = bell_to_game(&catalog::three_qutrit()).unwrap();
        for (s, &p) in game.distribution() {
            let expect = if s == &[2, 2, 2] { 2.0 / 9.0 } else { 1.0 / 9.0 };
            assert_eq!(p, expect);
        }
        assert_eq!(window.min, 0.0);
        assert_eq!(window.max, 6.0 / 9.0);
    }

    #[test]
    fn game_to_bell_rescales_chsh() {
        let w = correlation_to_weighted(&catalog::chsh());
        let (game, _) = bell_to_game(&w).unwrap();
        let back = game_to_bell_enumerated(&game, &ClassicalConfig::default()).unwrap();
        assert_eq!(back.winning_sets(), w.winning_sets());
        for (s, &x) in w.weights() {
            assert_eq!(back.weight(s), x / 8.0);
        }
        assert_eq!(back.s_max(), w.s_max() / 8.0);
        assert_eq!(back.s_min(), w.s_min() / 8.0);
    }

    #[test]
    fn always_winning_game_has_unit_bounds() {
        let scenario = Scenario::new(vec![vec![vec![0, 1]; 2]; 2]).unwrap();
        let mut dist = BTreeMap::new();
        let mut table = BTreeMap::new();
        for s in scenario.setting_vectors() {
            dist.insert(s.clone(), 0.25);
            table.insert(s.clone(), scenario.outcome_tuples(&s).into_iter().collect());
        }
        let game = NonlocalGame::new(scenario, dist, table).unwrap();
        let ineq = game_to_bell_enumerated(&game, &ClassicalConfig::default()).unwrap();
        assert_eq!(ineq.s_min(), 1.0);
        assert_eq!(ineq.s_max(), 1.0);
    }

    #[test]
    fn oracle_failure_propagates() {
        let (game, _) = correlation_to_game(&catalog::chsh()).unwrap();
        let err = game_to_bell(&game, |_| Err(ClassicalError::SearchSpaceTooLarge { size: 16, cap: 1 }));
        assert!(matches!(err, Err(TransformError::Oracle(_))));
    }

    #[test]
    fn advantage_requires_quantum_value() {
        let scenario = Scenario::dichotomic(&[2, 2]).unwrap();
        let w = DeterministicStrategy::constant(&scenario, 1).unwrap();
        let bare = ValueReport::new(0.75, 0.25, w.clone(), None, None).unwrap();
        assert!(matches!(advantage(&bare), Err(TransformError::MissingQuantumValue)));

        let q = |value| QuantumValue {
            value,
            method: QuantumMethod::ExactXor,
            converged: true,
        };
        let tied = ValueReport::new(0.75, 0.25, w.clone(), Some(q(0.75)), None).unwrap();
        assert_eq!(advantage(&tied).unwrap(), 0.0);

        let qutrit = ValueReport::new(6.0 / 9.0, 0.0, w, Some(q(7.37 / 9.0)), None).unwrap();
        assert!((advantage(&qutrit).unwrap() - 0.152).abs() < 1e-3);
    }
}
