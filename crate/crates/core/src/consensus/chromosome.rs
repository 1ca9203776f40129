use rand::Rng;

/// An m-vector of distinct dataset indices encoding one hypothesis.
///
/// A chromosome without a fitness is dirty: its genes changed since it was
/// last scored and it must be evaluated before selection can use it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    genes: Vec<usize>,
    fitness: Option<usize>,
}

impl Chromosome {
    /// Panics if `genes` contains a repeated index.
    pub fn new(genes: Vec<usize>) -> Self {
        assert!(has_distinct_genes(&genes), "repeated gene in {genes:?}");
        Self {
            genes,
            fitness: None,
        }
    }

    /// Uniformly random distinct genes drawn from `0..n`.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        Self {
            genes: rand::seq::index::sample(rng, n, m).into_vec(),
            fitness: None,
        }
    }

    pub fn genes(&self) -> &[usize] {
        &self.genes
    }

    pub fn fitness(&self) -> Option<usize> {
        self.fitness
    }

    pub fn is_dirty(&self) -> bool {
        self.fitness.is_none()
    }

    pub(crate) fn set_fitness(&mut self, fitness: usize) {
        self.fitness = Some(fitness);
    }

    /// Fitness for ranking; dirty chromosomes rank last.
    pub(crate) fn score(&self) -> usize {
        self.fitness.unwrap_or(0)
    }

    pub fn contains(&self, gene: usize) -> bool {
        self.genes.contains(&gene)
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

pub(crate) fn has_distinct_genes(genes: &[usize]) -> bool {
    genes
        .iter()
        .enumerate()
        .all(|(i, g)| !genes[..i].contains(g))
}

/// One generation of a genetic engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Chromosome>,
    pub generation: usize,
}

impl Population {
    /// Index of the fittest member, earliest on ties.
    pub fn best_index(&self) -> Option<usize> {
        best_index(&self.members)
    }
}

pub(crate) fn best_index(members: &[Chromosome]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in members.iter().enumerate() {
        match best {
            Some(b) if members[b].score() >= c.score() => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Stable sort by descending fitness, so earlier members win ties.
pub(crate) fn sort_by_fitness(members: &mut [Chromosome]) {
    members.sort_by_key(|c| std::cmp::Reverse(c.score()));
}
