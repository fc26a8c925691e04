use std::f64::consts::FRAC_1_SQRT_2;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{checked, QuantumError};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::model::{CorrelationInequality, Measurement, QuantumStrategy, WeightedSumInequality};
use crate::rng::{self, StreamRng};
use crate::transform::{self, TransformError};

#[derive(Debug, Clone, PartialEq)]
pub struct XorSolveConfig {
    /// Dimension of the optimization vectors; `None` means `min(m1, m2)`.
    pub vector_dim: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub rng_seed: u64,
}

impl Default for XorSolveConfig {
    fn default() -> Self {
        Self {
            vector_dim: None,
            restarts: 32,
            max_iters: 10_000,
            tol: 1e-12,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XorSolution {
    /// Optimal bias `Q = max Σ c_ij ⟨u_i, v_j⟩`.
    pub bias: f64,
    /// Winning probability `(Q + Σ|c|) / (2 Σ|c|)`.
    pub value: f64,
    pub alice: Vec<Vec<f64>>,
    pub bob: Vec<Vec<f64>>,
    pub converged: bool,
    pub restart: usize,
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 1e-300 {
        v.iter_mut().for_each(|x| *x /= n);
        true
    } else {
        false
    }
}

fn random_unit(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if normalize(&mut v) {
            return v;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bias(c: &[Vec<f64>], u: &[Vec<f64>], v: &[Vec<f64>]) -> f64 {
    c.iter()
        .zip(u)
        .map(|(row, ui)| row.iter().zip(v).map(|(cij, vj)| cij * dot(ui, vj)).sum::<f64>())
        .sum()
}

/// `target_k ∝ Σ_l weight(k, l) · source_l`; keeps the old vector when the
/// combination vanishes.
fn align(
    targets: &mut [Vec<f64>],
    sources: &[Vec<f64>],
    weight: impl Fn(usize, usize) -> f64,
) {
    let dim = sources[0].len();
    for (k, t) in targets.iter_mut().enumerate() {
        let mut acc = vec![0.0; dim];
        for (l, src) in sources.iter().enumerate() {
            let w = weight(k, l);
            if w != 0.0 {
                acc.iter_mut().zip(src).for_each(|(a, s)| *a += w * s);
            }
        }
        if normalize(&mut acc) {
            *t = acc;
        }
    }
}

struct Run {
    bias: f64,
    alice: Vec<Vec<f64>>,
    bob: Vec<Vec<f64>>,
    converged: bool,
}

fn run_restart(c: &[Vec<f64>], dim: usize, cfg: &XorSolveConfig, mut rng: StreamRng) -> Run {
    let m1 = c.len();
    let m2 = c[0].len();
    let mut alice: Vec<Vec<f64>> = (0..m1).map(|_| random_unit(&mut rng, dim)).collect();
    let mut bob: Vec<Vec<f64>> = (0..m2).map(|_| random_unit(&mut rng, dim)).collect();
    let mut current = bias(c, &alice, &bob);
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        align(&mut bob, &alice, |j, i| c[i][j]);
        align(&mut alice, &bob, |i, j| c[i][j]);
        let next = bias(c, &alice, &bob);
        let gain = next - current;
        current = next.max(current);
        if gain < cfg.tol {
            converged = true;
            break;
        }
    }
    Run {
        bias: current,
        alice,
        bob,
        converged,
    }
}

/// Maximizes `Σ_ij c_ij ⟨u_i, v_j⟩` over unit vectors by alternating
/// best responses, keeping the best of `cfg.restarts` seeded starts.
pub fn xor_quantum_value(ineq: &CorrelationInequality, cfg: &XorSolveConfig) -> Result<XorSolution, QuantumError> {
    let c = ineq.matrix().ok_or(QuantumError::NotTwoParty(ineq.parties()))?;
    if cfg.restarts == 0 || cfg.tol <= 0.0 || cfg.vector_dim == Some(0) {
        return Err(QuantumError::BadConfig(
            "restarts >= 1, tol > 0 and vector_dim >= 1 are required".into(),
        ));
    }
    let dim = cfg.vector_dim.unwrap_or_else(|| c.len().min(c[0].len()));
    let runs: Vec<Run> = rng::streams(cfg.rng_seed, cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&c, dim, cfg, r))
        .collect();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.bias > a.1.bias { b } else { a })
        .expect("at least one restart");
    let abs_sum = ineq.abs_sum();
    Ok(XorSolution {
        bias: best.bias,
        value: (best.bias + abs_sum) / (2.0 * abs_sum),
        alice: best.alice,
        bob: best.bob,
        converged: best.converged,
        restart,
    })
}

/// [`xor_quantum_value`] for a weighted-sum inequality that is a
/// correlation inequality in disguise.
pub fn xor_quantum_value_weighted(
    ineq: &WeightedSumInequality,
    cfg: &XorSolveConfig,
) -> Result<XorSolution, QuantumError> {
    if ineq.scenario().parties() != 2 {
        return Err(QuantumError::NotTwoParty(ineq.scenario().parties()));
    }
    let corr = transform::weighted_to_correlation(ineq).map_err(|e| match e {
        TransformError::Model(m) => QuantumError::Model(m),
        _ => QuantumError::NotDichotomic,
    })?;
    xor_quantum_value(&corr, cfg)
}

fn observable(v: &[f64]) -> CMatrix {
    // x·Z + y·X
    let (x, y) = (v[0], v.get(1).copied().unwrap_or(0.0));
    CMatrix::from_real_rows(&[&[x, y], &[y, -x]])
}

fn dichotomic_measurement(v: &[f64]) -> Measurement {
    let id = CMatrix::identity(2);
    let a = observable(v);
    let mut m = Measurement::new();
    m.insert(1, (&id + &a).scale_real(0.5));
    m.insert(-1, (&id - &a).scale_real(0.5));
    m
}

/// Realizes vectors of dimension <= 2 as qubit observables `x Z + y X` on
/// `(|00⟩ + |11⟩)/√2`, where `⟨A_u ⊗ B_v⟩ = u·v`.
pub fn xor_to_quantum_witness(alice: &[Vec<f64>], bob: &[Vec<f64>]) -> Result<QuantumStrategy, QuantumError> {
    let mut sides = Vec::with_capacity(2);
    for vectors in [alice, bob] {
        if vectors.is_empty() {
            return Err(QuantumError::ShapeMismatch("each party needs at least one vector".into()));
        }
        let mut per_party = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() > 2 {
                return Err(QuantumError::UnsupportedVectorDim(v.len()));
            }
            let mut unit = v.clone();
            if unit.is_empty() || !normalize(&mut unit) {
                return Err(QuantumError::ShapeMismatch("vectors must be nonzero".into()));
            }
            per_party.push(dichotomic_measurement(&unit));
        }
        sides.push(per_party);
    }
    let state = vec![C64::new(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, C64::new(FRAC_1_SQRT_2, 0.0)];
    checked(QuantumStrategy::new(vec![2, 2], state, sides)?)
}
