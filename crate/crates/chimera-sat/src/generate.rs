//! Seeded instance generators shared by tests, benchmarks and the stats
//! command. Everything here is deterministic in the seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::problem::{Clause, ClauseKind, Literal, Problem};

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn distinct_vars(rng: &mut ChaCha8Rng, n: u32, k: usize) -> Vec<u32> {
    let mut vars: Vec<u32> = (1..=n).collect();
    vars.shuffle(rng);
    vars.truncate(k);
    vars
}

fn random_literals(rng: &mut ChaCha8Rng, n: u32, k: usize) -> Vec<Literal> {
    distinct_vars(rng, n, k)
        .into_iter()
        .map(|v| Literal::new(v, rng.gen_bool(0.5)).unwrap())
        .collect()
}

/// A non-constant symmetric penalty profile of length `k + 1`.
pub fn random_profile(rng: &mut ChaCha8Rng, k: usize) -> Vec<bool> {
    loop {
        let p: Vec<bool> = (0..=k).map(|_| rng.gen_bool(0.5)).collect();
        if p.iter().any(|&x| x) && !p.iter().all(|&x| x) {
            return p;
        }
    }
}

/// A nonempty strict subset of the `2^k` local assignments.
pub fn random_violating_set(rng: &mut ChaCha8Rng, k: usize) -> std::collections::BTreeSet<u32> {
    let full = 1u32 << k;
    loop {
        let set: std::collections::BTreeSet<u32> =
            (0..full).filter(|_| rng.gen_bool(0.3)).collect();
        if !set.is_empty() && (set.len() as u32) < full {
            return set;
        }
    }
}

pub fn random_gauges(rng: &mut ChaCha8Rng, k: usize) -> Vec<i8> {
    (0..k).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
}

/// Random weighted instance with mixed clause kinds.
///
/// Sizes are drawn uniformly: 2..=n_max variables, 1..=c_max clauses of
/// width 1..=k_max, weights uniform in `weights`. With `with_tables` the
/// generator may also emit truth-table clauses.
pub fn random_weighted_instance(
    rng: &mut ChaCha8Rng,
    n_max: u32,
    c_max: usize,
    k_max: usize,
    weights: (f64, f64),
    with_tables: bool,
) -> Problem {
    let n = rng.gen_range(2..=n_max.max(2));
    let c = rng.gen_range(1..=c_max.max(1));
    let mut clauses = Vec::with_capacity(c);
    for _ in 0..c {
        let k = rng.gen_range(1..=k_max.min(n as usize).max(1));
        let lits = random_literals(rng, n, k);
        let weight = rng.gen_range(weights.0..=weights.1);
        let kinds = if with_tables { 5 } else { 4 };
        let clause = match rng.gen_range(0..kinds) {
            0 => Clause::or(lits, weight),
            1 => Clause::xor(lits, weight),
            2 if k >= 2 => Clause::and(lits, weight),
            2 => Clause::or(lits, weight),
            3 if k >= 1 => {
                let penalized = random_profile(rng, k);
                Clause::new(ClauseKind::Symmetric { penalized }, lits, weight)
            }
            _ => {
                let violating = random_violating_set(rng, k);
                Clause::new(ClauseKind::Table { violating }, lits, weight)
            }
        }
        .expect("generator respects clause invariants");
        clauses.push(clause);
    }
    Problem::new(n, clauses).expect("generator respects variable bounds")
}

/// Random unweighted max-2-SAT instance with `c` OR clauses.
pub fn random_max2sat(n: u32, c: usize, seed: u64) -> Problem {
    let mut rng = rng_from(seed);
    let clauses = (0..c)
        .map(|_| Clause::or(random_literals(&mut rng, n, 2), 1.0).unwrap())
        .collect();
    Problem::new(n, clauses).unwrap()
}

/// Random mixed-kind problem (no tables), fixed sizes, used in unit tests.
pub fn random_problem(n: u32, c: usize, k_max: usize, seed: u64, with_tables: bool) -> Problem {
    let mut rng = rng_from(seed);
    let mut clauses = Vec::with_capacity(c);
    for _ in 0..c {
        let k = rng.gen_range(1..=k_max.min(n as usize));
        let lits = random_literals(&mut rng, n, k);
        let clause = match rng.gen_range(0..if with_tables { 5 } else { 4 }) {
            0 => Clause::or(lits, rng.gen_range(0.5..2.0)).unwrap(),
            1 => Clause::xor(lits, rng.gen_range(0.5..2.0)).unwrap(),
            2 if k >= 2 => Clause::and(lits, rng.gen_range(0.5..2.0)).unwrap(),
            2 => Clause::or(lits, rng.gen_range(0.5..2.0)).unwrap(),
            3 => {
                let penalized = random_profile(&mut rng, k);
                Clause::new(ClauseKind::Symmetric { penalized }, lits, rng.gen_range(0.5..2.0))
                    .unwrap()
            }
            _ => {
                let violating = random_violating_set(&mut rng, k);
                Clause::new(ClauseKind::Table { violating }, lits, rng.gen_range(0.5..2.0))
                    .unwrap()
            }
        };
        clauses.push(clause);
    }
    Problem::new(n, clauses).unwrap()
}

/// Fixed-ratio max-k-SAT family member: `round(ratio * n)` OR clauses of
/// width `k` on `n` variables.
pub fn maxksat_instance(n: u32, k: usize, ratio: f64, seed: u64) -> Problem {
    let mut rng = rng_from(seed);
    let c = ((ratio * n as f64).round() as usize).max(1);
    let clauses = (0..c)
        .map(|_| Clause::or(random_literals(&mut rng, n, k.min(n as usize)), 1.0).unwrap())
        .collect();
    Problem::new(n, clauses).unwrap()
}
