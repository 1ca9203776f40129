use rand::Rng;

use crate::estimators::{Dataset, Estimator};

use super::chromosome::sort_by_fitness;
use super::{
    check_data, engine_rng, uniform_crossover, Budget, Chromosome, ConsensusError, Evaluator,
    Population, Repair, RunTrace, STALL_LIMIT,
};

/// Per-gene mutation probability of the GASAC baseline, `1 / (2m)`.
pub fn gasac_mutation_probability(m: usize) -> f64 {
    1.0 / (2.0 * m as f64)
}

/// Independently replaces each gene with probability `p` by a uniformly
/// random index in `0..n` that the chromosome does not already hold.
///
/// Returns the new chromosome (clean if nothing changed) and the number of
/// replaced genes.
pub fn mutate_genes<R: Rng + ?Sized>(
    c: &Chromosome,
    n: usize,
    p: f64,
    rng: &mut R,
) -> (Chromosome, usize) {
    let mut genes = c.genes().to_vec();
    let mut changed = 0;
    for i in 0..genes.len() {
        if rng.random::<f64>() < p {
            let free = n - genes.len();
            if free == 0 {
                continue;
            }
            let k = rng.random_range(0..free);
            let replacement = (0..n)
                .filter(|g| !genes.contains(g))
                .nth(k)
                .expect("free index exists");
            genes[i] = replacement;
            changed += 1;
        }
    }
    if changed == 0 {
        return (c.clone(), 0);
    }
    (Chromosome::new(genes), changed)
}

/// GASAC baseline: the best half of the population are parents, uniform
/// crossover children of random parent pairs refill the other half, and
/// every gene of every non-elite member mutates with probability `1/(2m)`.
pub fn run_gasac<E: Estimator>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    population_size: usize,
    max_models: usize,
    seed: u64,
) -> Result<RunTrace<E::Model>, ConsensusError> {
    run_gasac_observed(estimator, data, population_size, max_models, seed, |_| {})
}

/// [`run_gasac`] calling `observer` with every fully evaluated generation.
pub fn run_gasac_observed<E, F>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    population_size: usize,
    max_models: usize,
    seed: u64,
    mut observer: F,
) -> Result<RunTrace<E::Model>, ConsensusError>
where
    E: Estimator,
    F: FnMut(&Population),
{
    let n = data.len();
    let m = estimator.minimal_sample_size();
    check_data(n, m)?;
    let size = population_size;
    if size < 4 {
        return Err(ConsensusError::InvalidParams(format!(
            "population size must be >= 4, got {size}"
        )));
    }
    if max_models < size {
        return Err(ConsensusError::InvalidParams(format!(
            "budget {max_models} is smaller than the population size {size}"
        )));
    }

    let p_gene = gasac_mutation_probability(m);
    let parents_len = size / 2;
    let mut rng = engine_rng(seed);
    let mut eval = Evaluator::new(estimator, data, Budget::new(max_models));
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

        members.truncate(parents_len);
        while members.len() < size {
            let i = rng.random_range(0..parents_len);
            let mut j = rng.random_range(0..parents_len - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = uniform_crossover(&members[i], &members[j], Repair::Uniform(n), &mut rng);
            members.push(a);
            if members.len() < size {
                members.push(b);
            }
        }

        for c in members.iter_mut().skip(1) {
            let (mutated, changed) = mutate_genes(c, n, p_gene, &mut rng);
            if changed > 0 {
                *c = mutated;
            }
        }

        let before = eval.budget().used();
        if eval.evaluate_all(&mut members).is_err() {
            break;
        }
        sort_by_fitness(&mut members);
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

    #[test]
    fn line_mutation_probability() {
        assert_eq!(gasac_mutation_probability(4), 0.125);
        assert_eq!(gasac_mutation_probability(2), 0.25);
    }

    #[test]
    fn mutated_genes_stay_distinct() {
        let mut rng = engine_rng(8);
        let mut c = Chromosome::new(vec![0, 1, 2, 3]);
        c.set_fitness(3);
        for _ in 0..2000 {
            let (out, changed) = mutate_genes(&c, 6, 0.5, &mut rng);
            let differing = out
                .genes()
                .iter()
                .zip(c.genes())
                .filter(|(a, b)| a != b)
                .count();
            assert!(differing <= changed);
            assert_eq!(out.is_dirty(), changed > 0);
        }
    }

    #[test]
    fn full_dataset_chromosome_cannot_mutate() {
        let mut rng = engine_rng(8);
        let c = Chromosome::new(vec![2, 0, 1]);
        let (out, changed) = mutate_genes(&c, 3, 1.0, &mut rng);
        assert_eq!(changed, 0);
        assert_eq!(out.genes(), c.genes());
    }

    #[test]
    fn same_seed_same_trace() {
        let data = Dataset::new(
            (0..30)
                .map(|i| Point2::new(i as f64, if i % 3 == 0 { 1.0 } else { (i * 7 % 11) as f64 }))
                .collect(),
        )
        .unwrap();
        let est = LineEstimator::new(0.1);
        let a = run_gasac(&est, &data, 10, 120, 5).unwrap();
        let b = run_gasac(&est, &data, 10, 120, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.series.len(), 120);
    }
}
