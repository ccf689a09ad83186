//! Global-best particle swarm optimization over a box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundHandling {
    /// Move the violating coordinate onto the bound and zero its velocity.
    #[default]
    ClampZeroVelocity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub seed: u64,
    pub bound_handling: BoundHandling,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            iterations: 150,
            inertia: 0.729,
            cognitive: 1.494,
            social: 1.494,
            seed: 0,
            bound_handling: BoundHandling::ClampZeroVelocity,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 5 {
            return Err(Error::invariant("pso.swarm_size", "must be >= 5"));
        }
        for (field, v) in [
            ("pso.inertia", self.inertia),
            ("pso.cognitive", self.cognitive),
            ("pso.social", self.social),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invariant(field, "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Objective over a box. Implementations must be pure: the same point
/// always yields the same cost.
pub trait SearchProblem: Sync {
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn initial_guess(&self) -> Vec<f64>;
    fn cost(&self, x: &[f64]) -> f64;

    /// Whether `cost` marks a failed evaluation rather than a real fit.
    fn is_penalty(&self, cost: f64) -> bool {
        !cost.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoResult {
    pub best: Vec<f64>,
    pub best_cost: f64,
    /// Best cost so far after initialization and after each iteration.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

fn evaluate_all<P: SearchProblem>(problem: &P, positions: &[Vec<f64>]) -> Vec<f64> {
    positions
        .par_iter()
        .map(|x| {
            let c = problem.cost(x);
            if c.is_nan() {
                f64::INFINITY
            } else {
                c
            }
        })
        .collect()
}

/// Minimizes `problem` within its bounds.
///
/// Particle 0 starts at the initial guess (projected into the box); the
/// rest start uniformly at random. Random numbers are drawn serially in
/// particle-then-dimension order and costs are gathered in particle order,
/// so the trajectory does not depend on how many threads evaluate the swarm.
///
/// The configuration is not validated here so that degenerate swarms can be
/// run deliberately; user-supplied configs go through [`PsoConfig::validate`].
pub fn pso_minimize<P: SearchProblem>(problem: &P, config: &PsoConfig) -> Result<PsoResult> {
    let lower = problem.lower();
    let upper = problem.upper();
    let dim = lower.len();
    if upper.len() != dim || dim == 0 {
        return Err(Error::Optimization("bounds must be non-empty and of equal length".into()));
    }
    if let Some(d) = (0..dim).find(|&d| !(lower[d] <= upper[d]) || !lower[d].is_finite() || !upper[d].is_finite()) {
        return Err(Error::Optimization(format!(
            "invalid bounds in dimension {d}: [{}, {}]",
            lower[d], upper[d]
        )));
    }
    if config.swarm_size == 0 {
        return Err(Error::Optimization("empty swarm".into()));
    }
    let span: Vec<f64> = (0..dim).map(|d| upper[d] - lower[d]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let guess = problem.initial_guess();
    let mut positions: Vec<Vec<f64>> = Vec::with_capacity(config.swarm_size);
    let mut velocities: Vec<Vec<f64>> = Vec::with_capacity(config.swarm_size);
    for i in 0..config.swarm_size {
        let x: Vec<f64> = if i == 0 {
            (0..dim).map(|d| guess[d].clamp(lower[d], upper[d])).collect()
        } else {
            (0..dim).map(|d| lower[d] + rng.random::<f64>() * span[d]).collect()
        };
        let v: Vec<f64> = (0..dim)
            .map(|d| (rng.random::<f64>() * 0.2 - 0.1) * span[d])
            .collect();
        positions.push(x);
        velocities.push(v);
    }

    let costs = evaluate_all(problem, &positions);
    let mut evaluations = costs.len();
    let mut pbest = positions.clone();
    let mut pbest_cost = costs;
    let mut g = 0;
    for i in 1..pbest_cost.len() {
        if pbest_cost[i] < pbest_cost[g] {
            g = i;
        }
    }
    let mut gbest = pbest[g].clone();
    let mut gbest_cost = pbest_cost[g];
    let mut history = vec![gbest_cost];

    for iter in 0..config.iterations {
        for i in 0..config.swarm_size {
            let x = &mut positions[i];
            let v = &mut velocities[i];
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let mut vd = config.inertia * v[d]
                    + config.cognitive * r1 * (pbest[i][d] - x[d])
                    + config.social * r2 * (gbest[d] - x[d]);
                vd = vd.clamp(-span[d], span[d]);
                let mut xd = x[d] + vd;
                match config.bound_handling {
                    BoundHandling::ClampZeroVelocity => {
                        if xd < lower[d] {
                            xd = lower[d];
                            vd = 0.0;
                        } else if xd > upper[d] {
                            xd = upper[d];
                            vd = 0.0;
                        }
                    }
                }
                x[d] = xd;
                v[d] = vd;
            }
        }
        let costs = evaluate_all(problem, &positions);
        evaluations += costs.len();
        for (i, &c) in costs.iter().enumerate() {
            if c < pbest_cost[i] {
                pbest_cost[i] = c;
                pbest[i].clone_from(&positions[i]);
            }
            if c < gbest_cost {
                gbest_cost = c;
                gbest.clone_from(&positions[i]);
            }
        }
        history.push(gbest_cost);
        log::debug!("pso iteration {}: best cost {gbest_cost:.6e}", iter + 1);
    }

    if problem.is_penalty(gbest_cost) {
        return Err(Error::Optimization(format!(
            "every evaluation failed; best penalty cost {gbest_cost:.6e} after {evaluations} evaluations"
        )));
    }
    Ok(PsoResult {
        best: gbest,
        best_cost: gbest_cost,
        history,
        evaluations,
    })
}
