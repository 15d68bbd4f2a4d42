//! Numerical optimizers for general `L` and brute-force oracles for `L = 2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch_solver::{map_matrix_rep, ScatteringQuad};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, lambda_max, max_generalized_eigenpair, Pulse};
use crate::multiplex::Scheme;
use crate::random::{random_sphere_point, random_unit_vector, substream};
use crate::scalar::{lit, Scalar};
use crate::wssus_map::{
    apply_a, apply_adjoint_a, denominator_operator, DensityOperator, NoiseLevel, ScatteringFunction,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig<T> {
    pub max_iters: usize,
    /// Stop once a full iteration improves the objective by less than this.
    pub tol: T,
    pub restarts: usize,
    pub seed: u64,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol: lit(1e-14),
            restarts: 20,
            seed: 0,
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= T::zero() {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one alternating-maximization run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartOutcome<T> {
    /// Objective after every half-step.
    pub history: Vec<T>,
    pub converged: bool,
}

impl<T: Scalar> RestartOutcome<T> {
    pub fn value(&self) -> T {
        *self.history.last().expect("history is never empty")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationTrace<T> {
    /// History of the best restart.
    pub objective_history: Vec<T>,
    pub converged: bool,
    pub best_value: T,
    #[serde(skip)]
    pub best_pair: (Pulse<T>, Pulse<T>),
    /// All restarts in index order.
    pub restarts: Vec<RestartOutcome<T>>,
}

/// SINR-optimal receiver for a fixed precoder: the top generalized
/// eigenvector of `(A(Gamma), C_scheme(Gamma) + sigma^2 I)`.
pub fn optimal_receiver<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    scheme: &Scheme,
    noise: NoiseLevel<T>,
) -> Result<(Pulse<T>, T)> {
    let numerator = apply_a(c, gamma.matrix())?.hermitian_part();
    let denominator = denominator_operator(c, gamma.matrix(), scheme, noise)?.hermitian_part();
    let (lambda, v) = max_generalized_eigenpair(&numerator, &denominator)?;
    Ok((Pulse::new(v)?, lambda))
}

fn top_pulse<T: Scalar>(m: &crate::linalg::ComplexMatrix<T>) -> Result<(T, Pulse<T>)> {
    let eig = hermitian_eigensystem(&m.hermitian_part())?;
    Ok((eig.max_value(), Pulse::normalize(eig.top_vector())?))
}

type PulsePair<T> = (Pulse<T>, Pulse<T>);

fn alternate_once<T: Scalar>(
    c: &ScatteringFunction<T>,
    cfg: &OptimizerConfig<T>,
    restart: usize,
) -> Result<(RestartOutcome<T>, PulsePair<T>)> {
    let mut rng = substream(cfg.seed, restart as u64);
    let mut gamma = Pulse::new(random_unit_vector(c.dim(), &mut rng))?;
    let mut history = Vec::new();
    let mut converged = false;

    // G <- top eigenvector of A(Gamma).
    let (mut value, mut g) = top_pulse(&apply_a(c, &gamma.projector())?)?;
    history.push(value);
    for _ in 0..cfg.max_iters {
        let start = value;
        // Gamma <- top eigenvector of A^*(G).
        let (v, next_gamma) = top_pulse(&apply_adjoint_a(c, &g.projector())?)?;
        gamma = next_gamma;
        history.push(v);
        let (v, next_g) = top_pulse(&apply_a(c, &gamma.projector())?)?;
        g = next_g;
        history.push(v);
        value = v;
        if value - start < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok((RestartOutcome { history, converged }, (gamma, g)))
}

/// Alternating exact maximization of `Tr(A(Gamma) G)` over rank-one
/// `Gamma`, `G`; each half-step solves its subproblem globally, so every
/// history is nondecreasing. Restarts run in parallel on independent
/// substreams of `cfg.seed`.
pub fn alternating_fidelity_max<T: Scalar>(
    c: &ScatteringFunction<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<OptimizationTrace<T>> {
    cfg.validate()?;
    let runs: Vec<_> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| alternate_once(c, cfg, k))
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (k, (outcome, _)) in runs.iter().enumerate() {
        if outcome.value() > runs[best].0.value() {
            best = k;
        }
    }
    let best_pair = runs[best].1.clone();
    let restarts: Vec<RestartOutcome<T>> = runs.into_iter().map(|(o, _)| o).collect();
    Ok(OptimizationTrace {
        objective_history: restarts[best].history.clone(),
        converged: restarts[best].converged,
        best_value: restarts[best].value(),
        best_pair,
        restarts,
    })
}

/// Sampled maximum of `<x, a y>` over the Bloch manifold. The inner
/// maximization over `y` is exact (`y_vec` parallel to `b . x_vec`), so each
/// sample contributes `1/2 + |(b_1 x_1, b_2 x_2, b_3 x_3)|`.
pub fn brute_force_bloch_oracle<T: Scalar>(
    p: &ScatteringQuad<T>,
    n_samples: usize,
    include_axes: bool,
    seed: u64,
) -> Result<T> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let a = map_matrix_rep(p);
    let b = [a[1], a[2], a[3]];
    let half = lit::<T>(0.5);
    let value = |x: [T; 3]| {
        let s: T = (0..3).map(|k| (b[k] * x[k]) * (b[k] * x[k])).sum();
        half + s.sqrt()
    };
    let mut rng = substream(seed, 0);
    let mut best = T::neg_infinity();
    for _ in 0..n_samples {
        best = best.max(value(random_sphere_point(&mut rng)));
    }
    if include_axes {
        for k in 0..3 {
            let mut axis = [T::zero(); 3];
            axis[k] = T::one();
            best = best.max(value(axis));
        }
    }
    Ok(best)
}

/// Lower bound on `max_Gamma lambda_max(A(Gamma))` from random precoders.
pub fn fidelity_lower_bound_search<T: Scalar>(
    c: &ScatteringFunction<T>,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let values = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let gamma = random_unit_vector::<T, _>(c.dim(), &mut rng);
            lambda_max(&apply_a(c, &gamma.outer(&gamma))?.hermitian_part())
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(values.into_iter().fold(T::neg_infinity(), T::max))
}
