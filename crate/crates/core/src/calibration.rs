//! Real-coded genetic algorithm over the ten global parameters.
//!
//! Fitness is the share of correctly predicted trading links. Each
//! generation keeps its best `elitism_fraction` unchanged and fills the rest
//! with offspring of rank-selected parents (uniform crossover, per-gene
//! Gaussian mutation clipped to the bounds). Population evaluation is the
//! only parallel part; all random draws happen sequentially on one seeded
//! stream, so results do not depend on the thread count.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::domain::{GlobalParams, WEIGHT_MAX, WEIGHT_MIN};
use crate::simulation::Model;
use crate::{par, Error, Result, SimRng};

pub const GENOME_LEN: usize = 10;

/// Gene order follows [`GlobalParams::NAMES`].
pub type Genome = [f64; GENOME_LEN];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub elitism_fraction: f64,
    pub mutation_rate: f64,
    /// Standard deviation of a gene mutation, in weight units.
    pub mutation_sigma: f64,
    pub lower: f64,
    pub upper: f64,
    /// Seed of every simulation run during fitness evaluation.
    pub eval_seed: u64,
    pub replications_per_candidate: usize,
    /// Seed of the GA's own draws (initial population and operators).
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 1000,
            elitism_fraction: 0.2,
            mutation_rate: 0.1,
            mutation_sigma: 10.0,
            lower: WEIGHT_MIN,
            upper: WEIGHT_MAX,
            eval_seed: 0,
            replications_per_candidate: 1,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn elite_count(&self) -> usize {
        libm::floor(self.elitism_fraction * self.population_size as f64) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if self.generations == 0 {
            return bad("generations must be at least 1");
        }
        if !(0.0..1.0).contains(&self.elitism_fraction) || self.elite_count() < 1 {
            return bad("elitism_fraction must lie in [0, 1) and keep at least one elite");
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate < 1.0) {
            return bad("mutation_rate must lie in (0, 1)");
        }
        if !(self.mutation_sigma > 0.0 && self.mutation_sigma.is_finite()) {
            return bad("mutation_sigma must be positive");
        }
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return bad("bounds must satisfy lower < upper");
        }
        if self.lower < WEIGHT_MIN || self.upper > WEIGHT_MAX {
            return bad("bounds must lie within the weight range [0, 100]");
        }
        if self.replications_per_candidate == 0 {
            return bad("replications_per_candidate must be at least 1");
        }
        Ok(())
    }
}

/// Share of correctly predicted links for `params`, averaged over seeds
/// `eval_seed .. eval_seed + replications`. A parameter vector the model
/// rejects scores 0.
pub fn evaluate(model: &Model, params: &GlobalParams, eval_seed: u64, replications: usize) -> f64 {
    let replications = replications.max(1);
    let mut total = 0.0;
    for r in 0..replications {
        match model.run(params, eval_seed.wrapping_add(r as u64)) {
            Ok(report) => total += report.observation.correct_tradings_p,
            Err(err) => {
                log::debug!("fitness 0 for {:?}: {}", params.to_array(), err);
                return 0.0;
            }
        }
    }
    total / replications as f64
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationRecord {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    pub best_genome: Genome,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitnessTrace {
    pub generations: Vec<GenerationRecord>,
}

impl FitnessTrace {
    pub fn best_series(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.best).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: GlobalParams,
    pub best_fitness: f64,
    pub trace: FitnessTrace,
}

pub fn random_genome<R: Rng + ?Sized>(rng: &mut R, lower: f64, upper: f64) -> Genome {
    core::array::from_fn(|_| rng.random_range(lower..=upper))
}

/// Each gene from `a` or `b` with equal probability.
pub fn uniform_crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Genome {
    core::array::from_fn(|i| if rng.random_bool(0.5) { a[i] } else { b[i] })
}

/// Adds `N(0, sigma)` to each gene with probability `rate`, clipping to
/// `[lower, upper]`.
pub fn mutate<R: Rng + ?Sized>(
    genome: &mut Genome,
    rate: f64,
    sigma: f64,
    lower: f64,
    upper: f64,
    rng: &mut R,
) {
    let noise = Normal::new(0.0, sigma).expect("sigma validated positive");
    for gene in genome.iter_mut() {
        if rng.random_bool(rate) {
            *gene = (*gene + noise.sample(rng)).clamp(lower, upper);
        }
    }
}

/// Index into a population sorted best first, drawn with probability
/// proportional to `len - rank`.
pub fn rank_select<R: Rng + ?Sized>(len: usize, rng: &mut R) -> usize {
    let total = len * (len + 1) / 2;
    let mut ticket = rng.random_range(0..total);
    for rank in 0..len {
        let weight = len - rank;
        if ticket < weight {
            return rank;
        }
        ticket -= weight;
    }
    len - 1
}

/// Runs the genetic algorithm and returns the best genome ever evaluated.
pub fn ga_run(model: &Model, config: &GaConfig) -> Result<GaResult> {
    config.validate()?;
    let mut rng = SimRng::seed_from_u64(config.seed);
    let fitness_of = |g: &Genome| {
        evaluate(
            model,
            &GlobalParams::from_array(*g),
            config.eval_seed,
            config.replications_per_candidate,
        )
    };

    let mut population: Vec<Genome> = (0..config.population_size)
        .map(|_| random_genome(&mut rng, config.lower, config.upper))
        .collect();
    let mut scored: Vec<(Genome, f64)> = population
        .iter()
        .zip(par::map(&population, fitness_of))
        .map(|(g, f)| (*g, f))
        .collect();

    let elites = config.elite_count();
    let mut trace = FitnessTrace::default();
    let mut best: (Genome, f64) = (scored[0].0, f64::NEG_INFINITY);

    for generation in 0..config.generations {
        // Best first; the stable sort keeps earlier (older) genomes ahead on ties.
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        let fits = scored.iter().map(|s| s.1);
        let mean = fits.clone().sum::<f64>() / scored.len() as f64;
        let worst = fits.fold(f64::INFINITY, f64::min);
        if scored[0].1 > best.1 {
            best = scored[0];
        }
        trace.generations.push(GenerationRecord {
            generation,
            best: best.1,
            mean,
            worst,
            best_genome: best.0,
        });
        log::debug!(
            "generation {generation}: best {:.4} mean {:.4} worst {:.4}",
            best.1,
            mean,
            worst
        );
        if generation + 1 == config.generations {
            break;
        }

        population.clear();
        for _ in elites..config.population_size {
            let a = rank_select(scored.len(), &mut rng);
            let b = rank_select(scored.len(), &mut rng);
            let mut child = uniform_crossover(&scored[a].0, &scored[b].0, &mut rng);
            mutate(
                &mut child,
                config.mutation_rate,
                config.mutation_sigma,
                config.lower,
                config.upper,
                &mut rng,
            );
            population.push(child);
        }
        let offspring = par::map(&population, fitness_of);
        scored.truncate(elites);
        scored.extend(population.iter().copied().zip(offspring));
    }

    Ok(GaResult {
        best: GlobalParams::from_array(best.0),
        best_fitness: best.1,
        trace,
    })
}
