use rand::Rng;

use super::{Chromosome, RouletteWheel};

/// Where replacement genes come from when a crossover child ends up with a
/// repeated index.
#[derive(Debug, Clone, Copy)]
pub enum Repair<'a> {
    /// Learned distribution (adaptive engine).
    Wheel(&'a RouletteWheel),
    /// Uniform over `0..n` (GASAC baseline).
    Uniform(usize),
}

impl Repair<'_> {
    fn draw<R: Rng + ?Sized>(&self, exclude: &[usize], rng: &mut R) -> usize {
        match self {
            Repair::Wheel(wheel) => wheel.sample_excluding(exclude, rng),
            Repair::Uniform(n) => {
                let free = (0..*n).filter(|i| !exclude.contains(i)).count();
                assert!(free > 0, "no index left to draw");
                let k = rng.random_range(0..free);
                (0..*n)
                    .filter(|i| !exclude.contains(i))
                    .nth(k)
                    .expect("free index exists")
            }
        }
    }
}

/// Per-position coin flip: the first child takes the first parent's gene
/// with probability 1/2 and the second child takes the other one.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    repair: Repair<'_>,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let flips: Vec<bool> = (0..a.len()).map(|_| rng.random::<bool>()).collect();
    uniform_crossover_with(a, b, &flips, repair, rng)
}

/// Crossover with explicit flips. `flips[i] == false` gives the first child
/// `a[i]` and the second `b[i]`; `true` swaps them.
pub fn uniform_crossover_with<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    flips: &[bool],
    repair: Repair<'_>,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    assert_eq!(a.len(), b.len(), "parents differ in length");
    assert_eq!(flips.len(), a.len(), "one flip per gene");
    let mut first = Vec::with_capacity(a.len());
    let mut second = Vec::with_capacity(a.len());
    for ((&ga, &gb), &swap) in a.genes().iter().zip(b.genes()).zip(flips) {
        if swap {
            first.push(gb);
            second.push(ga);
        } else {
            first.push(ga);
            second.push(gb);
        }
    }
    repair_duplicates(&mut first, repair, rng);
    repair_duplicates(&mut second, repair, rng);
    (Chromosome::new(first), Chromosome::new(second))
}

/// Redraws every slot whose gene already occurs earlier in the child,
/// excluding all genes the child currently holds.
fn repair_duplicates<R: Rng + ?Sized>(genes: &mut [usize], repair: Repair<'_>, rng: &mut R) {
    for i in 1..genes.len() {
        if genes[..i].contains(&genes[i]) {
            genes[i] = repair.draw(genes, rng);
        }
    }
}

/// Replaces every gene, drawing `m` distinct indices from the wheel.
pub fn mutate_full<R: Rng + ?Sized>(
    c: &Chromosome,
    wheel: &RouletteWheel,
    rng: &mut R,
) -> Chromosome {
    Chromosome::new(wheel.draw_distinct(c.len(), rng))
}
