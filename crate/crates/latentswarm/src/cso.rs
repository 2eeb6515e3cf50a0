//! Competitive swarm optimizer over an arbitrary minimization objective.
//!
//! Each generation the swarm is paired off at random; the better half passes
//! to the next generation untouched while every loser moves by learning from
//! its winner (and optionally from the swarm mean):
//!
//! ```text
//! v' = r1 .* v  +  r2 .* (x_winner - x)  +  phi * r3 .* (x_mean - x)
//! x' = x + v'
//! ```
//!
//! with `r1`, `r2`, `r3` fresh uniform-[0,1] vectors per competition. Winners
//! keep their cached fitness, so only half the swarm is re-evaluated per
//! generation. Positions are bounded at initialization only; the search
//! itself is unconstrained.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};

/// Optimizer parameters.
#[derive(Clone, Debug)]
pub struct CsoParams {
    /// Number of particles; must be even and at least 2.
    pub swarm_size: usize,
    /// Search-space dimensionality.
    pub dim: usize,
    /// Weight of the swarm-mean attraction term. Zero disables it.
    pub phi: f64,
    /// Generation budget for [`run`].
    pub max_generations: usize,
    /// Lower bound of the initialization hypercube.
    pub init_low: f64,
    /// Upper bound of the initialization hypercube.
    pub init_high: f64,
    /// Seed for the optimizer's random stream.
    pub seed: u64,
}

impl Default for CsoParams {
    fn default() -> Self {
        CsoParams {
            swarm_size: 100,
            dim: 1,
            phi: 0.0,
            max_generations: 100,
            init_low: 0.0,
            init_high: 1.0,
            seed: 0,
        }
    }
}

impl CsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 || self.swarm_size % 2 != 0 {
            return Err(Error::config(format!(
                "swarm size must be even and >= 2, got {}",
                self.swarm_size
            )));
        }
        if self.dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if !(self.init_low < self.init_high) {
            return Err(Error::config(format!(
                "initialization range is empty: [{}, {}]",
                self.init_low, self.init_high
            )));
        }
        if !self.phi.is_finite() || self.phi < 0.0 {
            return Err(Error::config(format!("phi must be >= 0, got {}", self.phi)));
        }
        Ok(())
    }
}

/// One candidate solution: a position, its velocity, and a cached objective
/// value (`None` until evaluated).
#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub fitness: Option<f64>,
}

impl Particle {
    fn at(position: Vec<f64>) -> Self {
        let dim = position.len();
        Particle {
            position,
            velocity: vec![0.0; dim],
            fitness: None,
        }
    }
}

/// Returns `(winner, loser)` for a pair of evaluated particles.
///
/// Ties go to the first argument.
pub fn compete<'a>(a: &'a Particle, b: &'a Particle) -> Result<(&'a Particle, &'a Particle)> {
    let fa = a.fitness.ok_or(Error::UnevaluatedFitness)?;
    let fb = b.fitness.ok_or(Error::UnevaluatedFitness)?;
    if fa <= fb {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

/// Applies the loser update with explicit random vectors.
///
/// Exposed separately so the update kernel can be exercised with forced
/// `r1`/`r2`/`r3` values; [`update_loser`] draws them from an RNG.
pub fn update_loser_with(
    loser: &Particle,
    winner: &Particle,
    mean_position: &[f64],
    phi: f64,
    r1: &[f64],
    r2: &[f64],
    r3: &[f64],
) -> Result<Particle> {
    let dim = loser.position.len();
    for len in [
        winner.position.len(),
        mean_position.len(),
        r1.len(),
        r2.len(),
        r3.len(),
    ] {
        if len != dim {
            return Err(Error::dim("loser update", dim, len));
        }
    }
    let mut velocity = Vec::with_capacity(dim);
    let mut position = Vec::with_capacity(dim);
    for k in 0..dim {
        let v = r1[k] * loser.velocity[k]
            + r2[k] * (winner.position[k] - loser.position[k])
            + phi * r3[k] * (mean_position[k] - loser.position[k]);
        velocity.push(v);
        position.push(loser.position[k] + v);
    }
    Ok(Particle {
        position,
        velocity,
        fitness: None,
    })
}

/// Draws fresh `r1`, `r2`, `r3` and applies the loser update. The returned
/// particle's fitness is unevaluated; the winner is untouched.
pub fn update_loser(
    loser: &Particle,
    winner: &Particle,
    mean_position: &[f64],
    phi: f64,
    rng: &mut impl Rng,
) -> Result<Particle> {
    let dim = loser.position.len();
    let draw = |rng: &mut dyn rand::RngCore| -> Vec<f64> {
        (0..dim).map(|_| rng.random::<f64>()).collect()
    };
    let r1 = draw(rng);
    let r2 = draw(rng);
    let r3 = draw(rng);
    update_loser_with(loser, winner, mean_position, phi, &r1, &r2, &r3)
}

/// The particle population plus bookkeeping across generations.
#[derive(Clone, Debug)]
pub struct Swarm {
    particles: Vec<Particle>,
    phi: f64,
    generation: usize,
    best_ever: Option<Particle>,
    history: Vec<f64>,
}

impl Swarm {
    /// Creates `swarm_size` particles with positions drawn uniformly from
    /// `[init_low, init_high)^dim`, zero velocities, and no fitness values.
    pub fn init(params: &CsoParams, rng: &mut impl Rng) -> Result<Swarm> {
        params.validate()?;
        let particles = (0..params.swarm_size)
            .map(|_| {
                Particle::at(
                    (0..params.dim)
                        .map(|_| rng.random_range(params.init_low..params.init_high))
                        .collect(),
                )
            })
            .collect();
        Ok(Swarm {
            particles,
            phi: params.phi,
            generation: 0,
            best_ever: None,
            history: Vec::new(),
        })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Lowest-fitness particle seen over all evaluations so far.
    pub fn best_ever(&self) -> Option<&Particle> {
        self.best_ever.as_ref()
    }

    /// Best fitness per recorded generation; non-increasing.
    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// Overwrites one particle's position (zero velocity, fitness cleared).
    /// Used to inject a warm-start candidate before the first evaluation.
    pub fn seed_particle(&mut self, index: usize, position: &[f64]) -> Result<()> {
        if index >= self.particles.len() {
            return Err(Error::dim("particle index", self.particles.len(), index));
        }
        let dim = self.particles[index].position.len();
        if position.len() != dim {
            return Err(Error::dim("seed particle", dim, position.len()));
        }
        self.particles[index] = Particle::at(position.to_vec());
        Ok(())
    }

    /// Arithmetic mean of all current particle positions.
    pub fn mean_position(&self) -> Vec<f64> {
        let n = self.particles.len();
        let dim = self.particles[0].position.len();
        let mut mean = vec![0.0; dim];
        for p in &self.particles {
            for (m, x) in mean.iter_mut().zip(&p.position) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        mean
    }

    fn evaluate_missing<F>(&mut self, fitness: &F, mode: ExecMode) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let pending: Vec<usize> = (0..self.particles.len())
            .filter(|&i| self.particles[i].fitness.is_none())
            .collect();
        let particles = &self.particles;
        let values = map_indexed(mode, pending.len(), |k| {
            fitness(&particles[pending[k]].position)
        });
        for (&i, &value) in pending.iter().zip(&values) {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Evaluation { index: i, value });
            }
            self.particles[i].fitness = Some(value);
        }
        Ok(())
    }

    // Appends the current generation's best fitness and refreshes best_ever.
    // All particles must be evaluated.
    fn record(&mut self) {
        let best = self
            .particles
            .iter()
            .min_by(|a, b| a.fitness.unwrap().total_cmp(&b.fitness.unwrap()))
            .expect("swarm is never empty")
            .clone();
        let fit = best.fitness.unwrap();
        self.history.push(fit);
        match &self.best_ever {
            Some(b) if b.fitness.unwrap() <= fit => {}
            _ => self.best_ever = Some(best),
        }
    }

    // Random perfect pairing; winners carried over verbatim, losers updated.
    fn advance(&mut self, rng: &mut impl Rng) {
        let n = self.particles.len();
        let mean = self.mean_position();
        let perm = random_permutation(n, rng);
        let mut next: Vec<Option<Particle>> = vec![None; n];
        for pair in perm.chunks_exact(2) {
            let (i, j) = (pair[0], pair[1]);
            let (winner_idx, loser_idx) = {
                let (w, _) = compete(&self.particles[i], &self.particles[j])
                    .expect("all particles evaluated before advancing");
                if std::ptr::eq(w, &self.particles[i]) {
                    (i, j)
                } else {
                    (j, i)
                }
            };
            let updated = update_loser(
                &self.particles[loser_idx],
                &self.particles[winner_idx],
                &mean,
                self.phi,
                rng,
            )
            .expect("dimensions are fixed at initialization");
            next[winner_idx] = Some(self.particles[winner_idx].clone());
            next[loser_idx] = Some(updated);
        }
        self.particles = next.into_iter().map(|p| p.unwrap()).collect();
        self.generation += 1;
    }

    /// Evaluates every particle lacking a fitness value and records the
    /// generation's best. Sequential evaluation; see [`Swarm::evaluate_with`].
    pub fn evaluate<F>(&mut self, fitness: &F) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        self.evaluate_with(fitness, ExecMode::Sequential)
    }

    pub fn evaluate_with<F>(&mut self, fitness: &F, mode: ExecMode) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        self.evaluate_missing(fitness, mode)?;
        self.record();
        Ok(())
    }

    /// One full generation: evaluate, record, pair, update losers.
    ///
    /// Exactly `n/2` particles of the next generation are bit-identical to
    /// members of the current one.
    pub fn step<F>(&mut self, fitness: &F, rng: &mut impl Rng) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        self.step_with(fitness, rng, ExecMode::Sequential)
    }

    pub fn step_with<F>(&mut self, fitness: &F, rng: &mut impl Rng, mode: ExecMode) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        self.evaluate_missing(fitness, mode)?;
        self.record();
        self.advance(rng);
        Ok(())
    }
}

fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Extra knobs for [`run_with`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Injected as particle 0 before the first evaluation.
    pub warm_start: Option<Vec<f64>>,
    /// Stop early once the best fitness reaches this value.
    pub target_fitness: Option<f64>,
    pub exec: ExecMode,
}

/// Runs the optimizer for `params.max_generations` generations and returns
/// the best particle found plus the per-generation best-fitness history.
///
/// A zero generation budget still evaluates the initial swarm once, so the
/// history always has at least one entry. Two runs with the same parameters
/// produce identical results.
pub fn run<F>(params: &CsoParams, fitness: F) -> Result<(Particle, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    run_with(params, fitness, &RunOptions::default())
}

pub fn run_with<F>(
    params: &CsoParams,
    fitness: F,
    opts: &RunOptions,
) -> Result<(Particle, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut swarm = Swarm::init(params, &mut rng)?;
    if let Some(start) = &opts.warm_start {
        swarm.seed_particle(0, start)?;
    }
    for gen in 0..=params.max_generations {
        swarm.evaluate_missing(&fitness, opts.exec)?;
        swarm.record();
        if gen == params.max_generations {
            break;
        }
        if let Some(target) = opts.target_fitness {
            if swarm.best_ever().unwrap().fitness.unwrap() <= target {
                break;
            }
        }
        swarm.advance(&mut rng);
    }
    let best = swarm.best_ever().unwrap().clone();
    Ok((best, swarm.history))
}
