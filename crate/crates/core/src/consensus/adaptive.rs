use rand::seq::SliceRandom;
use rand::Rng;

use crate::estimators::{Dataset, Estimator};

use super::chromosome::sort_by_fitness;
use super::{
    check_data, crossover_probability, engine_rng, mutate_full, mutation_probability,
    normalize_fitness, uniform_crossover, Budget, Chromosome, ConsensusError, Evaluator,
    Population, Repair, RouletteWheel, RunTrace, STALL_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveParams {
    /// Power applied to normalized fitness for the crossover probability.
    pub gamma: f64,
    /// Decay scale of the mutation probability.
    pub delta: f64,
    pub population_size: usize,
    pub elitism: usize,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            gamma: 3.0,
            delta: 0.2,
            population_size: 10,
            elitism: 1,
        }
    }
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<(), ConsensusError> {
        let bad = |msg: String| Err(ConsensusError::InvalidParams(msg));
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be >= 1, got {}", self.gamma));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta must lie in (0, 1], got {}", self.delta));
        }
        if self.population_size < 4 {
            return bad(format!(
                "population size must be >= 4, got {}",
                self.population_size
            ));
        }
        if self.elitism == 0 || self.elitism >= self.population_size {
            return bad(format!(
                "elitism must lie in [1, population size), got {}",
                self.elitism
            ));
        }
        Ok(())
    }
}

/// Adaptive genetic sample consensus.
///
/// Each generation: normalize the fitnesses, draw a crossover parent pool
/// by per-individual Bernoulli trials on `norm^gamma`, train the roulette
/// wheel on that pool, recombine random pool pairs, fully mutate each
/// non-elite member with probability `exp(-norm / delta)` using the wheel,
/// then keep the fittest `population_size` of parents and children. The run
/// ends when the budget cannot pay for the next model, when every minimal
/// sample has been fit, or after [`STALL_LIMIT`] generations without a new
/// fit.
pub fn run_adaptive_gasac<E: Estimator>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    params: &AdaptiveParams,
    max_models: usize,
    seed: u64,
) -> Result<RunTrace<E::Model>, ConsensusError> {
    run_adaptive_gasac_observed(estimator, data, params, max_models, seed, |_| {})
}

/// [`run_adaptive_gasac`] calling `observer` with every fully evaluated
/// generation, before its operators run.
pub fn run_adaptive_gasac_observed<E, F>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    params: &AdaptiveParams,
    max_models: usize,
    seed: u64,
    mut observer: F,
) -> Result<RunTrace<E::Model>, ConsensusError>
where
    E: Estimator,
    F: FnMut(&Population),
{
    params.validate()?;
    let n = data.len();
    let m = estimator.minimal_sample_size();
    check_data(n, m)?;
    let size = params.population_size;
    if max_models < size {
        return Err(ConsensusError::InvalidParams(format!(
            "budget {max_models} is smaller than the population size {size}"
        )));
    }

    let mut rng = engine_rng(seed);
    let mut eval = Evaluator::new(estimator, data, Budget::new(max_models));
    let mut wheel = RouletteWheel::uniform(n);
    let mut members: Vec<Chromosome> = (0..size)
        .map(|_| Chromosome::random(n, m, &mut rng))
        .collect();
    eval.evaluate_all(&mut members)?;
    sort_by_fitness(&mut members);

    let mut generation = 0;
    let mut stalled = 0;
    loop {
        let pop = Population {
            members,
            generation,
        };
        observer(&pop);
        members = pop.members;

        let fitnesses: Vec<usize> = members.iter().map(|c| c.score()).collect();
        let norm = normalize_fitness(&fitnesses);

        let mut pool: Vec<usize> = (0..size)
            .filter(|&i| rng.random::<f64>() < crossover_probability(norm[i], params.gamma))
            .collect();
        if pool.len() < 2 {
            // `members` is sorted, so the top two are the first two.
            for i in 0..2 {
                if !pool.contains(&i) {
                    pool.push(i);
                }
            }
            pool.sort_unstable();
        }

        wheel.train(pool.iter().map(|&i| (&members[i], norm[i])));

        pool.shuffle(&mut rng);
        let mut children = Vec::with_capacity(pool.len());
        for pair in pool.chunks_exact(2) {
            let (a, b) = uniform_crossover(
                &members[pair[0]],
                &members[pair[1]],
                Repair::Wheel(&wheel),
                &mut rng,
            );
            children.push(a);
            children.push(b);
        }

        for i in params.elitism..size {
            if rng.random::<f64>() < mutation_probability(norm[i], params.delta) {
                members[i] = mutate_full(&members[i], &wheel, &mut rng);
            }
        }

        members.extend(children);
        let before = eval.budget().used();
        if eval.evaluate_all(&mut members).is_err() {
            break;
        }
        sort_by_fitness(&mut members);
        members.truncate(size);
        generation += 1;
        stalled = if eval.budget().used() == before {
            stalled + 1
        } else {
            0
        };
        if stalled >= STALL_LIMIT || eval.search_space_exhausted() {
            break;
        }
    }
    Ok(eval.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{LineEstimator, Point2};

    fn noisy_line(n: usize) -> Dataset<Point2> {
        let pts = (0..n)
            .map(|i| {
                let x = i as f64;
                if i % 2 == 0 {
                    Point2::new(x, 0.5 * x)
                } else {
                    Point2::new(x, 40.0 - 3.0 * x + (i * i % 7) as f64 * 5.0)
                }
            })
            .collect();
        Dataset::new(pts).unwrap()
    }

    #[test]
    fn default_params_are_valid() {
        let p = AdaptiveParams::default();
        assert_eq!(
            (p.gamma, p.delta, p.population_size, p.elitism),
            (3.0, 0.2, 10, 1)
        );
        assert!(p.validate().is_ok());
        assert!(AdaptiveParams { gamma: 0.5, ..p }.validate().is_err());
        assert!(AdaptiveParams { delta: 0.0, ..p }.validate().is_err());
        assert!(AdaptiveParams {
            population_size: 3,
            ..p
        }
        .validate()
        .is_err());
        assert!(AdaptiveParams { elitism: 0, ..p }.validate().is_err());
    }

    #[test]
    fn budget_equal_to_population_is_one_random_generation() {
        let data = noisy_line(20);
        let est = LineEstimator::new(0.1);
        let params = AdaptiveParams::default();
        let mut generations = 0;
        let trace =
            run_adaptive_gasac_observed(&est, &data, &params, 10, 4, |_| generations += 1).unwrap();
        assert_eq!(trace.series.len(), 10);
        assert_eq!(generations, 1);
    }

    #[test]
    fn budget_below_population_is_rejected() {
        let data = noisy_line(20);
        let est = LineEstimator::new(0.1);
        let r = run_adaptive_gasac(&est, &data, &AdaptiveParams::default(), 9, 0);
        assert!(matches!(r, Err(ConsensusError::InvalidParams(_))));
    }

    #[test]
    fn same_seed_same_trace() {
        let data = noisy_line(30);
        let est = LineEstimator::new(0.1);
        let params = AdaptiveParams::default();
        let a = run_adaptive_gasac(&est, &data, &params, 150, 77).unwrap();
        let b = run_adaptive_gasac(&est, &data, &params, 150, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.series.len(), 150);
    }
}
