/// Min-max normalization of one generation's fitnesses to `[0, 1]`.
///
/// A generation with a single fitness value carries no ranking signal and
/// maps entirely to 0.
pub fn normalize_fitness(fitnesses: &[usize]) -> Vec<f64> {
    let (Some(&min), Some(&max)) = (fitnesses.iter().min(), fitnesses.iter().max()) else {
        return Vec::new();
    };
    if max == min {
        return vec![0.0; fitnesses.len()];
    }
    let range = (max - min) as f64;
    fitnesses
        .iter()
        .map(|&f| (f - min) as f64 / range)
        .collect()
}

/// Probability that an individual joins the crossover parent pool:
/// `norm_fitness ^ gamma`.
pub fn crossover_probability(norm_fitness: f64, gamma: f64) -> f64 {
    norm_fitness.powf(gamma)
}

/// Probability that an individual is fully mutated:
/// `exp(-norm_fitness / delta)`.
pub fn mutation_probability(norm_fitness: f64, delta: f64) -> f64 {
    (-norm_fitness / delta).exp()
}
