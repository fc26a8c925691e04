//! See-saw lower bound for general games.
//!
//! Each sweep sets the shared state to the top eigenvector of the game
//! operator `G = Σ_s ρ_s Σ_{t ∈ W_s} ⊗_i P^{(i, s_i)}_{t_i}` and then, party by
//! party, improves that party's measurements against the effective operators
//! `E_{x,o} = Σ_{s: s_i = x} ρ_s Σ_{t ∈ W_s, t_i = o} Tr_{¬i}[(⊗_{j≠i} P_{t_j}) |ψ⟩⟨ψ|]`.
//! Two-outcome measurements are solved exactly (projector onto the
//! nonnegative eigenspace of `E_a - E_b`); larger alphabets take backtracking
//! steps along the unitary gradient `Σ_o [E_o, P_o]`. No step decreases the
//! objective.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{apply_local, checked, quantum_game_value, reduced_density, QuantumError};
use crate::linalg::{self, CMatrix, C64};
use crate::model::{Label, Measurement, NonlocalGame, QuantumStrategy, SettingVec};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementUpdate {
    /// Exact update for two-outcome measurements, gradient ascent for the rest.
    SignSplit,
    /// Gradient ascent for every measurement.
    UnitaryAscent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub local_dims: Vec<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub rng_seed: u64,
    pub measurement_update: MeasurementUpdate,
    /// Initial unitary step; halved whenever a step fails to improve.
    pub step_size: f64,
    /// Largest joint dimension `Π d_i` accepted.
    pub dim_cap: usize,
}

impl SeesawConfig {
    pub fn new(local_dims: Vec<usize>) -> Self {
        Self {
            local_dims,
            restarts: 16,
            max_iters: 2000,
            tol: 1e-10,
            rng_seed: 0,
            measurement_update: MeasurementUpdate::SignSplit,
            step_size: 0.1,
            dim_cap: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeesawSolution {
    /// Born-rule value of `witness`; a certified lower bound.
    pub value: f64,
    pub witness: QuantumStrategy,
    /// Objective after each sweep of the winning restart.
    pub history: Vec<f64>,
    pub converged: bool,
    pub restart: usize,
}

/// Gradient steps per measurement per sweep.
const ASCENT_STEPS: usize = 6;
const MIN_STEP: f64 = 1e-9;
const MAX_STEP: f64 = 1.0;

#[derive(Clone)]
struct LocalMeasurement {
    /// Orthonormal columns; column `c` belongs to outcome `groups[c]`.
    basis: CMatrix,
    groups: Vec<usize>,
    projectors: Vec<CMatrix>,
    step: f64,
}

impl LocalMeasurement {
    fn from_basis(basis: CMatrix, groups: Vec<usize>, outcomes: usize, step: f64) -> Self {
        let projectors = projectors_of(&basis, &groups, outcomes);
        Self {
            basis,
            groups,
            projectors,
            step,
        }
    }
}

fn projectors_of(basis: &CMatrix, groups: &[usize], outcomes: usize) -> Vec<CMatrix> {
    let d = basis.dim();
    let mut out = vec![CMatrix::zeros(d); outcomes];
    for (c, &g) in groups.iter().enumerate() {
        let col = basis.column(c);
        out[g] = &out[g] + &CMatrix::outer(&col, &col);
    }
    out
}

/// Input-weighted winning tuples, as alphabet positions.
struct Term {
    setting: SettingVec,
    weight: f64,
    tuples: Vec<Vec<usize>>,
}

struct Problem<'a> {
    game: &'a NonlocalGame,
    dims: Vec<usize>,
    terms: Vec<Term>,
    /// `outcomes[party][input - 1]`
    outcomes: Vec<Vec<usize>>,
    /// Outcome position that takes the nonnegative eigenspace in a sign split.
    plus: Vec<Vec<usize>>,
}

impl<'a> Problem<'a> {
    fn new(game: &'a NonlocalGame, dims: Vec<usize>) -> Self {
        let scenario = game.scenario();
        let mut terms = Vec::new();
        for (s, &p) in game.distribution() {
            if p == 0.0 {
                continue;
            }
            let tuples = game
                .winning_set(s)
                .map(|set| {
                    set.iter()
                        .map(|t| {
                            t.iter()
                                .enumerate()
                                .map(|(i, l)| {
                                    scenario
                                        .alphabet(i, s[i])
                                        .iter()
                                        .position(|x| x == l)
                                        .expect("validated tuple")
                                })
                                .collect()
                        })
                        .collect()
                })
                .unwrap_or_default();
            terms.push(Term {
                setting: s.clone(),
                weight: p,
                tuples,
            });
        }
        let outcomes = scenario
            .alphabets()
            .iter()
            .map(|pp| pp.iter().map(Vec::len).collect())
            .collect();
        let plus = scenario
            .alphabets()
            .iter()
            .map(|pp| pp.iter().map(|a| a.iter().position(|&l| l == 1).unwrap_or(0)).collect())
            .collect();
        Self {
            game,
            dims,
            terms,
            outcomes,
            plus,
        }
    }

    fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn game_operator(&self, meas: &[Vec<LocalMeasurement>]) -> CMatrix {
        let mut g = CMatrix::zeros(self.total_dim());
        for term in &self.terms {
            for t in &term.tuples {
                let mut op = CMatrix::identity(1);
                for (i, &o) in t.iter().enumerate() {
                    op = op.kron(&meas[i][term.setting[i] - 1].projectors[o]);
                }
                g = &g + &op.scale_real(term.weight);
            }
        }
        g
    }

    /// `E[x][o]` for `party`.
    fn effective(&self, party: usize, state: &[C64], meas: &[Vec<LocalMeasurement>]) -> Vec<Vec<CMatrix>> {
        let d = self.dims[party];
        let mut e: Vec<Vec<CMatrix>> = self.outcomes[party]
            .iter()
            .map(|&k| vec![CMatrix::zeros(d); k])
            .collect();
        for term in &self.terms {
            let x = term.setting[party] - 1;
            for t in &term.tuples {
                let mut phi = state.to_vec();
                for (j, &o) in t.iter().enumerate() {
                    if j != party {
                        phi = apply_local(&phi, &self.dims, j, &meas[j][term.setting[j] - 1].projectors[o]);
                    }
                }
                let rho = reduced_density(&phi, &self.dims, party);
                let slot = &mut e[x][t[party]];
                *slot = &*slot + &rho.scale_real(term.weight);
            }
        }
        e
    }
}

fn local_objective(projectors: &[CMatrix], e: &[CMatrix]) -> f64 {
    projectors.iter().zip(e).map(|(p, x)| p.trace_product_re(x)).sum()
}

fn random_unitary(rng: &mut StreamRng, d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d);
    for r in 0..d {
        for c in 0..d {
            m[(r, c)] = C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        }
    }
    linalg::orthonormalize_columns(&mut m);
    m
}

fn sign_split(e: &[CMatrix], plus: usize, step: f64) -> Result<LocalMeasurement, QuantumError> {
    let minus = 1 - plus;
    let diff = &e[plus] - &e[minus];
    let eig = linalg::hermitian_eig(&diff.hermitian_part())?;
    let groups = eig
        .values
        .iter()
        .map(|&v| if v >= 0.0 { plus } else { minus })
        .collect();
    Ok(LocalMeasurement::from_basis(eig.vectors, groups, 2, step))
}

/// Backtracking ascent along `A = Σ_o [E_o, P_o]`; only improving steps are
/// kept.
fn ascend(m: &mut LocalMeasurement, e: &[CMatrix]) -> Result<(), QuantumError> {
    let outcomes = m.projectors.len();
    let mut current = local_objective(&m.projectors, e);
    for _ in 0..ASCENT_STEPS {
        let d = m.basis.dim();
        let mut a = CMatrix::zeros(d);
        for (p, x) in m.projectors.iter().zip(e) {
            a = &a + &(&(x * p) - &(p * x));
        }
        let norm = a.max_abs();
        if norm < 1e-14 {
            return Ok(());
        }
        // exp(t·A/‖A‖) = exp(i·t·H) with H = -i·A/‖A‖
        let h = a.scale(C64::new(0.0, -1.0 / norm)).hermitian_part();
        loop {
            let rot = linalg::expm_i_hermitian(&h.scale_real(m.step))?;
            let mut basis = &rot * &m.basis;
            linalg::orthonormalize_columns(&mut basis);
            let projectors = projectors_of(&basis, &m.groups, outcomes);
            let value = local_objective(&projectors, e);
            if value > current {
                current = value;
                m.basis = basis;
                m.projectors = projectors;
                m.step = (m.step * 1.5).min(MAX_STEP);
                break;
            }
            m.step *= 0.5;
            if m.step < MIN_STEP {
                m.step = MIN_STEP;
                return Ok(());
            }
        }
    }
    Ok(())
}

struct Run {
    value: f64,
    state: Vec<C64>,
    meas: Vec<Vec<LocalMeasurement>>,
    history: Vec<f64>,
    converged: bool,
}

fn run_restart(problem: &Problem, cfg: &SeesawConfig, mut rng: StreamRng) -> Result<Run, QuantumError> {
    let mut meas: Vec<Vec<LocalMeasurement>> = problem
        .outcomes
        .iter()
        .enumerate()
        .map(|(p, per_input)| {
            let d = problem.dims[p];
            per_input
                .iter()
                .map(|&k| {
                    let basis = random_unitary(&mut rng, d);
                    let groups = (0..d).map(|c| c % k).collect();
                    LocalMeasurement::from_basis(basis, groups, k, cfg.step_size)
                })
                .collect()
        })
        .collect();

    let mut history = Vec::new();
    let mut state = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let g = problem.game_operator(&meas);
        let eig = linalg::hermitian_eig(&g)?;
        state = eig.vectors.column(problem.total_dim() - 1);
        let mut objective = *eig.values.last().expect("nonempty spectrum");

        for party in 0..problem.dims.len() {
            let e = problem.effective(party, &state, &meas);
            for (x, ex) in e.iter().enumerate() {
                let m = &mut meas[party][x];
                let k = m.projectors.len();
                if k == 2 && cfg.measurement_update == MeasurementUpdate::SignSplit {
                    let split = sign_split(ex, problem.plus[party][x], m.step)?;
                    if local_objective(&split.projectors, ex) >= local_objective(&m.projectors, ex) {
                        *m = split;
                    }
                } else if k > 1 {
                    ascend(m, ex)?;
                }
            }
            objective = e
                .iter()
                .zip(&meas[party])
                .map(|(ex, m)| local_objective(&m.projectors, ex))
                .sum();
        }
        history.push(objective);
        if objective - previous < cfg.tol {
            converged = true;
            break;
        }
        previous = objective;
    }
    let value = *history.last().unwrap_or(&0.0);
    Ok(Run {
        value,
        state,
        meas,
        history,
        converged,
    })
}

fn witness(problem: &Problem, state: Vec<C64>, meas: &[Vec<LocalMeasurement>]) -> Result<QuantumStrategy, QuantumError> {
    let scenario = problem.game.scenario();
    let measurements: Vec<Vec<Measurement>> = meas
        .iter()
        .enumerate()
        .map(|(p, per_input)| {
            per_input
                .iter()
                .enumerate()
                .map(|(x, m)| {
                    let labels: &[Label] = scenario.alphabet(p, x + 1);
                    labels.iter().copied().zip(m.projectors.iter().cloned()).collect()
                })
                .collect()
        })
        .collect();
    checked(QuantumStrategy::new(problem.dims.clone(), state, measurements)?)
}

/// Best see-saw strategy over seeded restarts. The reported value is the
/// Born-rule value of the returned witness.
pub fn seesaw_quantum_value(game: &NonlocalGame, cfg: &SeesawConfig) -> Result<SeesawSolution, QuantumError> {
    if cfg.local_dims.len() != game.parties() {
        return Err(QuantumError::ShapeMismatch(format!(
            "{} local dimensions for {} parties",
            cfg.local_dims.len(),
            game.parties()
        )));
    }
    if let Some(&d) = cfg.local_dims.iter().find(|&&d| d < 2) {
        return Err(QuantumError::BadConfig(format!("local dimension {d} is below 2")));
    }
    if cfg.restarts == 0 || cfg.max_iters == 0 || !(cfg.tol > 0.0) || !(cfg.step_size > 0.0) {
        return Err(QuantumError::BadConfig(
            "restarts, max_iters, tol and step_size must be positive".into(),
        ));
    }
    let dim = cfg
        .local_dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if dim > cfg.dim_cap || dim > linalg::MAX_EIG_DIM {
        return Err(QuantumError::DimensionCapExceeded {
            dim,
            cap: cfg.dim_cap.min(linalg::MAX_EIG_DIM),
        });
    }
    let problem = Problem::new(game, cfg.local_dims.clone());
    let runs: Vec<Run> = rng::streams(cfg.rng_seed, cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&problem, cfg, r))
        .collect::<Result<_, _>>()?;
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("at least one restart");
    let strategy = witness(&problem, best.state, &best.meas)?;
    let value = quantum_game_value(game, &strategy)?;
    Ok(SeesawSolution {
        value,
        witness: strategy,
        history: best.history,
        converged: best.converged,
        restart,
    })
}
