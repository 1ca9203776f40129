use rand::Rng;
use thiserror::Error;

use super::Chromosome;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WheelError {
    #[error("wheel needs at least one slot")]
    Empty,
    #[error("weight {value} at index {index} is not positive and finite")]
    BadWeight { index: usize, value: f64 },
}

/// Learned replacement distribution over dataset indices.
///
/// Gene `g` is drawn with probability `weights[g] / sum(weights)`. Training
/// only ever adds weight, so every slot stays positive and never-seen
/// indices remain reachable.
#[derive(Debug, Clone, PartialEq)]
pub struct RouletteWheel {
    weights: Vec<f64>,
}

impl RouletteWheel {
    /// Every index equally likely.
    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self, WheelError> {
        if weights.is_empty() {
            return Err(WheelError::Empty);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(WheelError::BadWeight { index, value });
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn probability(&self, gene: usize) -> f64 {
        self.weights[gene] / self.total()
    }

    /// Adds each parent's normalized fitness to the weight of every gene
    /// it carries.
    pub fn train<'a, I>(&mut self, parents: I)
    where
        I: IntoIterator<Item = (&'a Chromosome, f64)>,
    {
        for (parent, norm_fitness) in parents {
            debug_assert!((0.0..=1.0).contains(&norm_fitness));
            for &g in parent.genes() {
                self.weights[g] += norm_fitness;
            }
        }
    }

    /// Draws one index from the wheel restricted to indices not in `exclude`.
    ///
    /// Panics if `exclude` covers every index.
    pub fn sample_excluding<R: Rng + ?Sized>(&self, exclude: &[usize], rng: &mut R) -> usize {
        let total: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|(i, _)| !exclude.contains(i))
            .map(|(_, w)| w)
            .sum();
        assert!(total > 0.0, "no index left to draw");
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = None;
        for (i, &w) in self.weights.iter().enumerate() {
            if exclude.contains(&i) {
                continue;
            }
            acc += w;
            if target < acc {
                return i;
            }
            last = Some(i);
        }
        // Rounding can leave `target` a hair above the final partial sum.
        last.expect("no index left to draw")
    }

    /// `m` distinct indices by sequential draws, renormalizing over the
    /// indices not yet taken.
    pub fn draw_distinct<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Vec<usize> {
        assert!(
            m <= self.len(),
            "cannot draw {m} distinct of {}",
            self.len()
        );
        let mut out = Vec::with_capacity(m);
        for _ in 0..m {
            let g = self.sample_excluding(&out, rng);
            out.push(g);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consensus::engine_rng;

    #[test]
    fn single_parent_training() {
        let mut wheel = RouletteWheel::uniform(5);
        let parent = Chromosome::new(vec![0, 1, 2, 3]);
        wheel.train([(&parent, 1.0)]);
        assert_eq!(wheel.weights(), &[2.0, 2.0, 2.0, 2.0, 1.0]);
        assert!((wheel.probability(4) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn zero_fitness_parent_leaves_wheel_unchanged() {
        let mut wheel = RouletteWheel::uniform(6);
        wheel.train([(&Chromosome::new(vec![1, 4]), 0.0)]);
        assert_eq!(wheel, RouletteWheel::uniform(6));
    }

    #[test]
    fn shared_genes_accumulate() {
        let mut wheel = RouletteWheel::uniform(6);
        let a = Chromosome::new(vec![2, 0]);
        let b = Chromosome::new(vec![5, 2]);
        wheel.train([(&a, 1.0), (&b, 0.5)]);
        assert_eq!(wheel.weights()[2], 2.5);
        assert_eq!(wheel.weights()[0], 2.0);
        assert_eq!(wheel.weights()[5], 1.5);
    }

    #[test]
    fn rejects_bad_weights() {
        assert_eq!(RouletteWheel::from_weights(vec![]), Err(WheelError::Empty));
        assert!(RouletteWheel::from_weights(vec![1.0, 0.0]).is_err());
        assert!(RouletteWheel::from_weights(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn exclusion_is_respected() {
        let wheel = RouletteWheel::from_weights(vec![5.0, 1.0, 5.0, 1.0]).unwrap();
        let mut rng = engine_rng(11);
        for _ in 0..2000 {
            let g = wheel.sample_excluding(&[0, 2], &mut rng);
            assert!(g == 1 || g == 3);
        }
        assert_eq!(wheel.sample_excluding(&[0, 1, 2], &mut rng), 3);
    }

    #[test]
    fn sampling_follows_weights() {
        let wheel = RouletteWheel::from_weights(vec![1.0, 3.0]).unwrap();
        let mut rng = engine_rng(5);
        let hits = (0..40_000)
            .filter(|_| wheel.sample_excluding(&[], &mut rng) == 1)
            .count();
        // p = 0.75, sd of the count = sqrt(40000 * 0.75 * 0.25) ~ 86.6
        assert!((hits as f64 - 30_000.0).abs() < 4.0 * 86.6, "{hits}");
    }
}
