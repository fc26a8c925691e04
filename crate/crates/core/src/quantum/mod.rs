//! Quantum strategies: Born-rule evaluation, the vector optimization that
//! gives the exact value of two-party XOR games, and a see-saw lower bound
//! for general games in fixed local dimension.

mod seesaw;
mod xor;

use std::collections::BTreeMap;

use thiserror::Error;

pub use crate::linalg::{hermitian_eig, HermitianEigen, LinalgError};
pub use seesaw::{seesaw_quantum_value, MeasurementUpdate, SeesawConfig, SeesawSolution};
pub use xor::{
    xor_quantum_value, xor_quantum_value_weighted, xor_to_quantum_witness, XorSolution, XorSolveConfig,
};

use crate::linalg::{CMatrix, C64, ZERO};
use crate::model::{ModelError, NonlocalGame, OutcomeTuple, QuantumStrategy, Validate};

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("the XOR solver needs exactly two parties, got {0}")]
    NotTwoParty(usize),
    #[error("outcomes are not dichotomic")]
    NotDichotomic,
    #[error("joint dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("qubit reconstruction supports vectors of dimension <= 2, got {0}")]
    UnsupportedVectorDim(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Applies `op` to `party`'s factor of a party-major state vector.
pub(crate) fn apply_local(state: &[C64], dims: &[usize], party: usize, op: &CMatrix) -> Vec<C64> {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut out = vec![ZERO; state.len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for r in 0..d {
                let mut acc = ZERO;
                for c in 0..d {
                    let x = op[(r, c)];
                    if x != ZERO {
                        acc += x * state[base + c * inner];
                    }
                }
                out[base + r * inner] = acc;
            }
        }
    }
    out
}

/// Reduced density matrix of `party` for an (unnormalized) state vector.
pub(crate) fn reduced_density(state: &[C64], dims: &[usize], party: usize) -> CMatrix {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut rho = CMatrix::zeros(d);
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for r in 0..d {
                let a = state[base + r * inner];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    rho[(r, c)] += a * state[base + c * inner].conj();
                }
            }
        }
    }
    rho
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Joint outcome distribution of `strategy` on setting vector `s`:
/// `Pr(o) = ‖(⊗_i P_{o_i}) ψ‖²`.
pub fn born_rule(strategy: &QuantumStrategy, s: &[usize]) -> Result<BTreeMap<OutcomeTuple, f64>, QuantumError> {
    let inputs = strategy.inputs();
    if s.len() != inputs.len() || s.iter().zip(&inputs).any(|(&x, &m)| x == 0 || x > m) {
        return Err(QuantumError::ShapeMismatch(format!(
            "setting {s:?} does not fit strategy inputs {inputs:?}"
        )));
    }
    let dims = strategy.local_dims();
    let mut out = BTreeMap::new();
    let mut partial: Vec<(OutcomeTuple, Vec<C64>)> = vec![(Vec::new(), strategy.state().to_vec())];
    for (p, &x) in s.iter().enumerate() {
        let meas = strategy.measurement(p, x);
        let mut next = Vec::with_capacity(partial.len() * meas.len());
        for (prefix, vec) in &partial {
            for (&label, proj) in meas {
                let projected = apply_local(vec, dims, p, proj);
                let mut t = prefix.clone();
                t.push(label);
                next.push((t, projected));
            }
        }
        partial = next;
    }
    for (t, v) in partial {
        out.insert(t, norm_sqr(&v));
    }
    Ok(out)
}

/// Winning probability of `strategy` in `game`, summed exactly over inputs.
pub fn quantum_game_value(game: &NonlocalGame, strategy: &QuantumStrategy) -> Result<f64, QuantumError> {
    let violations = strategy.violations_against(game.scenario());
    if let Some(v) = violations.first() {
        return Err(QuantumError::ShapeMismatch(v.to_string()));
    }
    let mut total = 0.0;
    for (s, &p) in game.distribution() {
        if p == 0.0 {
            continue;
        }
        let dist = born_rule(strategy, s)?;
        let win: f64 = dist
            .iter()
            .filter(|(t, _)| game.wins(s, t))
            .map(|(_, &q)| q)
            .sum();
        total += p * win;
    }
    Ok(total)
}

/// Checks a strategy's own invariants; used on optimizer output.
pub(crate) fn checked(strategy: QuantumStrategy) -> Result<QuantumStrategy, QuantumError> {
    strategy.validate().map_err(|v| QuantumError::Model(ModelError::Invalid(v)))?;
    Ok(strategy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Measurement;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn axis_measurement(theta: f64) -> Measurement {
        // spin along (sin θ, 0, cos θ): eigenvector (cos θ/2, sin θ/2)
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let up = [C64::new(c, 0.0), C64::new(s, 0.0)];
        let down = [C64::new(-s, 0.0), C64::new(c, 0.0)];
        let mut m = Measurement::new();
        m.insert(1, CMatrix::outer(&up, &up));
        m.insert(-1, CMatrix::outer(&down, &down));
        m
    }

    fn singlet() -> Vec<C64> {
        vec![
            ZERO,
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(-FRAC_1_SQRT_2, 0.0),
            ZERO,
        ]
    }

    #[test]
    fn singlet_same_axis_is_anticorrelated() {
        for theta in [0.0, 0.4, 1.3] {
            let strat = QuantumStrategy::new(
                vec![2, 2],
                singlet(),
                vec![vec![axis_measurement(theta)], vec![axis_measurement(theta)]],
            )
            .unwrap();
            let dist = born_rule(&strat, &[1, 1]).unwrap();
            let equal: f64 = dist.iter().filter(|(t, _)| t[0] == t[1]).map(|(_, p)| p).sum();
            assert!(equal.abs() < 1e-15);
            assert!((dist.values().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn product_state_is_deterministic() {
        let mut m = Measurement::new();
        m.insert(0, CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]));
        m.insert(1, CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]));
        let mut state = vec![ZERO; 4];
        state[0] = C64::new(1.0, 0.0);
        let strat = QuantumStrategy::new(vec![2, 2], state, vec![vec![m.clone()], vec![m]]).unwrap();
        let dist = born_rule(&strat, &[1, 1]).unwrap();
        assert_eq!(dist[&vec![0, 0]], 1.0);
        assert_eq!(dist.values().filter(|&&p| p > 0.0).count(), 1);
    }

    #[test]
    fn born_rule_rejects_bad_setting() {
        let strat = QuantumStrategy::new(
            vec![2, 2],
            singlet(),
            vec![vec![axis_measurement(0.0)], vec![axis_measurement(0.0)]],
        )
        .unwrap();
        assert!(matches!(born_rule(&strat, &[1, 2]), Err(QuantumError::ShapeMismatch(_))));
        assert!(matches!(born_rule(&strat, &[1]), Err(QuantumError::ShapeMismatch(_))));
    }

    #[test]
    fn local_application_matches_kron() {
        let dims = [2, 3];
        let state: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = CMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let full_a = a.kron(&CMatrix::identity(3)).mul_vec(&state);
        let full_b = CMatrix::identity(2).kron(&b).mul_vec(&state);
        assert_eq!(apply_local(&state, &dims, 0, &a), full_a);
        assert_eq!(apply_local(&state, &dims, 1, &b), full_b);
    }
}
