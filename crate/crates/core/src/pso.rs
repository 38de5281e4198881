//! Bounded particle swarm optimizer with a constant inertia weight.
//!
//! Each particle moves by
//!
//! ```text
//! v <- w v + c1 r1 (p_best - x) + c2 r2 (g_best - x)
//! x <- x + v
//! ```
//!
//! Constraints are expressed only through the cost: any non-finite cost
//! (including NaN) is infeasible and can never displace a finite best.
//! Positions are not clamped to the initial bounds.
//!
//! Randomness is reproducible per seed. Particle `i` draws from ChaCha8
//! stream `i` of the seeded generator: first its initial position (one
//! uniform draw per dimension, in order), then per iteration `r1` followed by
//! `r2` (or, in per-dimension mode, the `(r1, r2)` pair for each dimension in
//! turn). Because every particle owns its stream and bests are merged in
//! particle order after each sweep, the parallel mode is bit-identical to the
//! sequential one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsoError {
    #[error("search space has no dimensions")]
    EmptyBounds,
    #[error("bounds for dimension {dim} are not a finite interval with lo < hi: ({lo}, {hi})")]
    InvalidBounds { dim: usize, lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no feasible point found after {} evaluations", .0.evaluations)]
    AllInfeasible(Box<OptimizeResult>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    /// Cognitive learning rate.
    pub c1: f64,
    /// Social learning rate.
    pub c2: f64,
    pub inertia: f64,
    /// Initialization range `(lo, hi)` per dimension.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
    /// Draw `r1`, `r2` per dimension (default) instead of once per particle
    /// per iteration.
    pub per_dimension_random: bool,
    /// Evaluate the swarm's costs on the rayon pool.
    pub parallel: bool,
}

impl PsoConfig {
    /// Swarm of 10, 20 iterations, `c1 = c2 = 1.5`, `w = 0.6`.
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            swarm_size: 10,
            iterations: 20,
            c1: 1.5,
            c2: 1.5,
            inertia: 0.6,
            bounds,
            seed: 0,
            per_dimension_random: true,
            parallel: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dimensions(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        if self.bounds.is_empty() {
            return Err(PsoError::EmptyBounds);
        }
        for (dim, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(PsoError::InvalidBounds { dim, lo, hi });
            }
        }
        if self.swarm_size == 0 {
            return Err(PsoError::InvalidConfig("swarm_size must be >= 1"));
        }
        if self.iterations == 0 {
            return Err(PsoError::InvalidConfig("iterations must be >= 1"));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(PsoError::InvalidConfig("c1 and c2 must be >= 0"));
        }
        if !self.inertia.is_finite() {
            return Err(PsoError::InvalidConfig("inertia must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub pos: Vec<f64>,
    pub vel: Vec<f64>,
    pub best_pos: Vec<f64>,
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_pos: Vec<f64>,
    pub best_cost: f64,
    /// Global best cost after initialization and after every iteration.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub best_pos: Vec<f64>,
    pub best_cost: f64,
    pub iteration: usize,
    pub evaluations: usize,
    rngs: Vec<ChaCha8Rng>,
}

fn sanitize(cost: f64) -> f64 {
    if cost.is_nan() {
        f64::INFINITY
    } else {
        cost
    }
}

fn evaluate<F>(cost: &F, positions: &[&[f64]], parallel: bool) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if parallel {
        positions.par_iter().map(|p| sanitize(cost(p))).collect()
    } else {
        positions.iter().map(|p| sanitize(cost(p))).collect()
    }
}

impl Swarm {
    /// Places every particle uniformly inside the bounds with zero velocity.
    pub fn init<F>(cost: &F, config: &PsoConfig) -> Result<Self, PsoError>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        config.validate()?;
        let mut rngs = Vec::with_capacity(config.swarm_size);
        let mut positions = Vec::with_capacity(config.swarm_size);
        for i in 0..config.swarm_size {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let pos: Vec<f64> = config.bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect();
            positions.push(pos);
            rngs.push(rng);
        }
        let views: Vec<&[f64]> = positions.iter().map(Vec::as_slice).collect();
        let costs = evaluate(cost, &views, config.parallel);

        let dims = config.dimensions();
        let particles: Vec<Particle> = positions
            .into_iter()
            .zip(costs)
            .map(|(pos, c)| Particle { best_pos: pos.clone(), pos, vel: vec![0.0; dims], best_cost: c })
            .collect();

        let mut swarm = Swarm {
            best_pos: particles[0].best_pos.clone(),
            best_cost: particles[0].best_cost,
            particles,
            iteration: 0,
            evaluations: config.swarm_size,
            rngs,
        };
        swarm.update_global();
        Ok(swarm)
    }

    fn update_global(&mut self) {
        for p in &self.particles {
            if p.best_cost < self.best_cost {
                self.best_cost = p.best_cost;
                self.best_pos.clone_from(&p.best_pos);
            }
        }
    }

    /// One synchronous iteration: move every particle against the current
    /// global best, evaluate, then update personal and global bests.
    pub fn step<F>(&mut self, cost: &F, config: &PsoConfig)
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let (w, c1, c2) = (config.inertia, config.c1, config.c2);
        for (p, rng) in self.particles.iter_mut().zip(self.rngs.iter_mut()) {
            let scalar =
                if config.per_dimension_random { None } else { Some((rng.random::<f64>(), rng.random::<f64>())) };
            for d in 0..p.pos.len() {
                let (r1, r2) = scalar.unwrap_or_else(|| (rng.random(), rng.random()));
                p.vel[d] =
                    w * p.vel[d] + c1 * r1 * (p.best_pos[d] - p.pos[d]) + c2 * r2 * (self.best_pos[d] - p.pos[d]);
                p.pos[d] += p.vel[d];
            }
        }

        let views: Vec<&[f64]> = self.particles.iter().map(|p| p.pos.as_slice()).collect();
        let costs = evaluate(cost, &views, config.parallel);
        for (p, c) in self.particles.iter_mut().zip(costs) {
            if c < p.best_cost {
                p.best_cost = c;
                p.best_pos.clone_from(&p.pos);
            }
        }
        self.evaluations += self.particles.len();
        self.iteration += 1;
        self.update_global();
    }
}

/// Runs initialization plus `config.iterations` steps.
pub fn optimize<F>(cost: F, config: &PsoConfig) -> Result<OptimizeResult, PsoError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut swarm = Swarm::init(&cost, config)?;
    let mut history = Vec::with_capacity(config.iterations + 1);
    history.push(swarm.best_cost);
    for _ in 0..config.iterations {
        swarm.step(&cost, config);
        history.push(swarm.best_cost);
    }
    let result = OptimizeResult {
        best_pos: swarm.best_pos,
        best_cost: swarm.best_cost,
        history,
        evaluations: swarm.evaluations,
    };
    if result.best_cost.is_finite() || result.best_cost == f64::NEG_INFINITY {
        Ok(result)
    } else {
        Err(PsoError::AllInfeasible(Box::new(result)))
    }
}
