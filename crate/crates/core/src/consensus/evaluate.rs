use std::collections::HashMap;

use crate::datagen::binomial;
use crate::estimators::{count_inliers, Dataset, Estimator};

use super::{Chromosome, ConsensusError};

/// Number of model fits a run may perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    max_models: usize,
    used: usize,
}

impl Budget {
    pub fn new(max_models: usize) -> Self {
        Self {
            max_models,
            used: 0,
        }
    }

    pub fn max_models(&self) -> usize {
        self.max_models
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.max_models - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_models
    }

    /// Takes one unit and returns the new `used` count.
    pub fn consume(&mut self) -> Result<usize, ConsensusError> {
        if self.is_exhausted() {
            return Err(ConsensusError::BudgetExhausted);
        }
        self.used += 1;
        Ok(self.used)
    }
}

/// Result of one engine run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<M> {
    /// `(models_generated, best_inliers)` after every evaluation, starting
    /// at 1 and ending at the number of models the run used.
    pub series: Vec<(usize, usize)>,
    pub best_chromosome: Chromosome,
    /// `None` only when every evaluated sample was degenerate.
    pub best_model: Option<M>,
}

impl<M> RunTrace<M> {
    pub fn models_generated(&self) -> usize {
        self.series.len()
    }

    pub fn best_inliers(&self) -> usize {
        self.series.last().map_or(0, |&(_, b)| b)
    }

    /// Best-so-far values on the grid `1..=len`, holding the last value
    /// when the run stopped early.
    pub fn densify(&self, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut last = 0;
        for t in 0..len {
            if let Some(&(_, b)) = self.series.get(t) {
                last = b;
            }
            out.push(last);
        }
        out
    }
}

/// Scores chromosomes against a dataset while charging a [`Budget`] and
/// recording the best-so-far trace.
///
/// Fitness is memoized per gene set (order ignored) for the whole run: a
/// dirty chromosome whose genes were already fit takes the known fitness
/// without a model fit, without a budget unit and without a trace tick.
pub struct Evaluator<'a, E: Estimator> {
    estimator: &'a E,
    data: &'a Dataset<E::Observation>,
    budget: Budget,
    series: Vec<(usize, usize)>,
    best: Option<(Chromosome, Option<E::Model>)>,
    seen: HashMap<Vec<usize>, usize>,
    space: u128,
}

impl<'a, E: Estimator> Evaluator<'a, E> {
    pub fn new(estimator: &'a E, data: &'a Dataset<E::Observation>, budget: Budget) -> Self {
        Self {
            estimator,
            data,
            series: Vec::with_capacity(budget.remaining()),
            budget,
            best: None,
            seen: HashMap::new(),
            space: binomial(data.len(), estimator.minimal_sample_size()),
        }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn best_inliers(&self) -> usize {
        self.series.last().map_or(0, |&(_, b)| b)
    }

    /// Every distinct minimal sample of the dataset has been fit.
    pub fn search_space_exhausted(&self) -> bool {
        self.seen.len() as u128 >= self.space
    }

    /// Number of distinct gene sets fit so far.
    pub fn distinct_fits(&self) -> usize {
        self.seen.len()
    }

    /// Fits `c`, stores its inlier count (0 for a degenerate sample) as its
    /// fitness and charges one model. Clean chromosomes and gene sets that
    /// were already fit cost nothing.
    pub fn evaluate(&mut self, c: &mut Chromosome) -> Result<(), ConsensusError> {
        if !c.is_dirty() {
            return Ok(());
        }
        let mut key = c.genes().to_vec();
        key.sort_unstable();
        if let Some(&fitness) = self.seen.get(&key) {
            c.set_fitness(fitness);
            return Ok(());
        }
        let used = self.budget.consume()?;
        let model = self.estimator.fit_indices(self.data, c.genes()).ok();
        let fitness = model
            .as_ref()
            .map_or(0, |m| count_inliers(self.estimator, m, self.data));
        c.set_fitness(fitness);
        self.seen.insert(key, fitness);

        let improved = match &self.best {
            None => true,
            Some((b, _)) => fitness > b.score(),
        };
        if improved {
            self.best = Some((c.clone(), model));
        }
        let best = self.best.as_ref().map_or(0, |(b, _)| b.score());
        self.series.push((used, best));
        Ok(())
    }

    /// Evaluates every dirty member in order. Stops at the first member the
    /// budget cannot pay for.
    pub fn evaluate_all(&mut self, members: &mut [Chromosome]) -> Result<(), ConsensusError> {
        members.iter_mut().try_for_each(|c| self.evaluate(c))
    }

    /// Panics if nothing was evaluated.
    pub fn finish(self) -> RunTrace<E::Model> {
        let (best_chromosome, best_model) = self.best.expect("run evaluated no models");
        RunTrace {
            series: self.series,
            best_chromosome,
            best_model,
        }
    }
}
