//! Ground-state search for abstract or physical Ising models.
//!
//! [`solve_exact`] enumerates every spin state with a Gray-code walk in
//! parallel chunks and re-evaluates candidate minima from scratch, so the
//! reported energies carry no accumulated drift. [`solve_sa`] is
//! single-spin-flip Metropolis annealing with a geometric temperature
//! schedule; every restart owns a counter-derived RNG stream, so results
//! are reproducible for a fixed seed at any worker count.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chimera::{Embedding, PhysicalModel};
use crate::ising::{IsingModel, ModelError, Spin, SpinAssignment, Vertex};
use crate::problem::energy_tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{spins} spins exceed the exact-solve cap of {cap}")]
    CapExceeded { spins: usize, cap: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Exact,
    Annealing,
}

impl SolveMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMethod::Exact => "exact",
            SolveMethod::Annealing => "sa",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartStat {
    pub restart: u32,
    pub energy: f64,
}

/// Solver output. `assignments` are spin vectors aligned with
/// `vertex_order`; the exact solver returns every optimal state (ascending
/// in mask order over `vertex_order`), annealing returns the single best.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub vertex_order: Vec<Vertex>,
    pub best_energy: f64,
    pub assignments: Vec<Vec<Spin>>,
    pub method: SolveMethod,
    pub restarts: Vec<RestartStat>,
}

impl SolveResult {
    pub fn best_assignment(&self) -> SpinAssignment {
        self.vertex_order
            .iter()
            .copied()
            .zip(self.assignments[0].iter().copied())
            .collect()
    }

    pub fn assignment(&self, idx: usize) -> SpinAssignment {
        self.vertex_order
            .iter()
            .copied()
            .zip(self.assignments[idx].iter().copied())
            .collect()
    }
}

pub const DEFAULT_EXACT_CAP: u32 = 26;

/// Exhaustive ground-state search: the global minimum and all argmins.
pub fn solve_exact(model: &IsingModel, cap: u32) -> Result<SolveResult, SolveError> {
    solve_exact_impl(model, cap, true)
}

/// Sequential twin of [`solve_exact`].
pub fn solve_exact_seq(model: &IsingModel, cap: u32) -> Result<SolveResult, SolveError> {
    solve_exact_impl(model, cap, false)
}

fn solve_exact_impl(model: &IsingModel, cap: u32, parallel: bool) -> Result<SolveResult, SolveError> {
    let indexed = model.indexed();
    let n = indexed.n();
    if n as u32 > cap || n >= 63 {
        return Err(SolveError::CapExceeded { spins: n, cap });
    }
    let total = 1u64 << n;
    // Loose collection window: far above any Gray-walk float drift, far
    // below the energy quantum of the models solved here.
    let scale: f64 = indexed.h.iter().map(|h| h.abs()).sum::<f64>()
        + indexed.edges.iter().map(|(_, _, j)| j.abs()).sum::<f64>()
        + indexed.offset.abs();
    let loose = 1e-7 * scale.max(1.0);

    let chunk_bits = n.min(16);
    let chunks = total >> chunk_bits;
    let results = crate::par::map_masks(chunks.max(1), parallel, |chunk| {
        let lo = chunk << chunk_bits;
        let hi = ((chunk + 1) << chunk_bits).min(total);
        gray_scan(&indexed, lo, hi, loose)
    });

    let mut best = f64::INFINITY;
    for (e, _) in &results {
        best = best.min(*e);
    }
    // Exact re-evaluation of the candidates near the scan minimum.
    let mut min = f64::INFINITY;
    for (_, cands) in &results {
        for &mask in cands {
            min = min.min(indexed.energy_of_mask(mask));
        }
    }
    let tol = energy_tolerance(min);
    let mut masks: Vec<u64> = results
        .iter()
        .flat_map(|(_, cands)| cands.iter().copied())
        .filter(|&m| indexed.energy_of_mask(m) <= min + tol)
        .collect();
    masks.sort_unstable();
    masks.dedup();
    let assignments: Vec<Vec<Spin>> = masks.iter().map(|&m| indexed.state_from_mask(m)).collect();
    Ok(SolveResult {
        vertex_order: indexed.verts,
        best_energy: min,
        assignments,
        method: SolveMethod::Exact,
        restarts: Vec::new(),
    })
}

/// Gray-code walk over `[lo, hi)` in state-index order; returns the walk
/// minimum and all masks within `loose` of it.
fn gray_scan(
    indexed: &crate::ising::IndexedModel,
    lo: u64,
    hi: u64,
    loose: f64,
) -> (f64, Vec<u64>) {
    let gray = |i: u64| i ^ (i >> 1);
    let mut state = indexed.state_from_mask(gray(lo));
    let mut energy = indexed.energy_of_state(&state);
    let mut best = energy;
    let mut cands = vec![gray(lo)];
    for i in (lo + 1)..hi {
        let bit = i.trailing_zeros() as usize;
        energy += indexed.flip_delta(&state, bit);
        state[bit] = -state[bit];
        if energy <= best + loose {
            if energy < best {
                best = energy;
            }
            cands.push(gray(i));
        }
    }
    // Prune once against the final minimum to keep candidate lists small.
    cands.retain(|&m| indexed.energy_of_mask(m) <= best + loose);
    (best, cands)
}

/// Annealing configuration. `t_start`/`t_end` default to twice the largest
/// coupling magnitude and one percent of the penalty quantum.
#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub sweeps: usize,
    pub restarts: u32,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            sweeps: 10_000,
            restarts: 32,
            t_start: None,
            t_end: None,
            seed: 0,
        }
    }
}

impl SaConfig {
    fn schedule(&self, model: &IsingModel, g: f64) -> (f64, f64) {
        let t0 = self
            .t_start
            .unwrap_or_else(|| 2.0 * model.max_magnitude().max(g));
        let t1 = self.t_end.unwrap_or(0.01 * g).min(t0);
        (t0.max(1e-12), t1.max(1e-12))
    }
}

/// Best-of-restarts simulated annealing. `g` sets the default final
/// temperature scale (one percent of it).
pub fn solve_sa(model: &IsingModel, g: f64, config: &SaConfig) -> SolveResult {
    solve_sa_impl(model, g, config, &[], true)
}

/// Sequential twin of [`solve_sa`].
pub fn solve_sa_seq(model: &IsingModel, g: f64, config: &SaConfig) -> SolveResult {
    solve_sa_impl(model, g, config, &[], false)
}

/// Annealing with collective moves: each sweep also proposes flipping
/// every listed vertex group as one move. Identification chains are bound
/// by couplings far above the problem scale, which single-spin dynamics
/// cannot cross once the temperature drops below the chain strength;
/// chain flips keep the logical search mobile there while single flips
/// still allow (and report) chain breaks.
pub fn solve_sa_with_clusters(
    model: &IsingModel,
    g: f64,
    config: &SaConfig,
    clusters: &[Vec<Vertex>],
) -> SolveResult {
    solve_sa_impl(model, g, config, clusters, true)
}

fn solve_sa_impl(
    model: &IsingModel,
    g: f64,
    config: &SaConfig,
    clusters: &[Vec<Vertex>],
    parallel: bool,
) -> SolveResult {
    let indexed = model.indexed();
    let n = indexed.n();
    let (t0, t1) = config.schedule(model, g);
    let ratio = (t1 / t0).ln();
    let sweeps = config.sweeps.max(1);

    // Map vertex groups to index groups and tag members for the
    // internal-edge test in the collective move.
    let pos: std::collections::BTreeMap<Vertex, u32> = indexed
        .verts
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i as u32))
        .collect();
    let mut cluster_of: Vec<u32> = vec![u32::MAX; n];
    let index_clusters: Vec<Vec<u32>> = clusters
        .iter()
        .enumerate()
        .map(|(c, group)| {
            group
                .iter()
                .filter_map(|v| pos.get(v).copied())
                .inspect(|&i| cluster_of[i as usize] = c as u32)
                .collect()
        })
        .collect();

    let runs: Vec<(f64, Vec<Spin>)> =
        crate::par::map_indices(config.restarts.max(1) as usize, parallel, |restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64 + 1);
            let mut state: Vec<Spin> =
                (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            let mut energy = indexed.energy_of_state(&state);
            let mut best_state = state.clone();
            let mut best_energy = energy;
            for sweep in 0..sweeps {
                let frac = sweep as f64 / (sweeps.max(2) - 1) as f64;
                let temp = t0 * (ratio * frac).exp();
                for i in 0..n {
                    let delta = indexed.flip_delta(&state, i);
                    if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                        state[i] = -state[i];
                        energy += delta;
                        if energy < best_energy {
                            best_energy = energy;
                            best_state.copy_from_slice(&state);
                        }
                    }
                }
                for (c, group) in index_clusters.iter().enumerate() {
                    let mut delta = 0.0;
                    for &i in group {
                        let mut local = indexed.h[i as usize];
                        for &(j, jv) in &indexed.adj[i as usize] {
                            if cluster_of[j as usize] != c as u32 {
                                local += jv * f64::from(state[j as usize]);
                            }
                        }
                        delta += -2.0 * f64::from(state[i as usize]) * local;
                    }
                    if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                        for &i in group {
                            state[i as usize] = -state[i as usize];
                        }
                        energy += delta;
                        if energy < best_energy {
                            best_energy = energy;
                            best_state.copy_from_slice(&state);
                        }
                    }
                }
            }
            // Report drift-free energies.
            let exact = indexed.energy_of_state(&best_state);
            (exact, best_state)
        });

    let restarts: Vec<RestartStat> = runs
        .iter()
        .enumerate()
        .map(|(i, (e, _))| RestartStat {
            restart: i as u32,
            energy: *e,
        })
        .collect();
    let (best_energy, best_state) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .expect("at least one restart");
    SolveResult {
        vertex_order: indexed.verts,
        best_energy,
        assignments: vec![best_state],
        method: SolveMethod::Annealing,
        restarts,
    }
}

/// Chain readout of one physical assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Abstract assignment recovered chain by chain.
    pub assignment: SpinAssignment,
    /// Chains whose qubits disagreed (resolved by majority, ties to -1).
    pub broken: Vec<Vertex>,
}

impl DecodeOutcome {
    pub fn intact(&self) -> bool {
        self.broken.is_empty()
    }
}

/// Maps a physical assignment back to abstract vertices: unanimous chains
/// read off directly, broken chains by majority vote with ties going to -1.
pub fn decode(physical: &SpinAssignment, embedding: &Embedding) -> DecodeOutcome {
    let mut assignment = SpinAssignment::new();
    let mut broken = Vec::new();
    for (v, chain) in embedding.chains() {
        let mut up = 0usize;
        let mut down = 0usize;
        for &q in chain {
            match physical.get(&Vertex::Physical(q)) {
                Some(s) if s > 0 => up += 1,
                _ => down += 1,
            }
        }
        if up != 0 && down != 0 {
            broken.push(*v);
        }
        assignment.set(*v, if up > down { 1 } else { -1 });
    }
    DecodeOutcome { assignment, broken }
}

/// Chain-break statistics of a solved physical model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBreakReport {
    pub chains: usize,
    pub broken: Vec<Vertex>,
}

/// Chain groups of an embedding, as physical-vertex clusters for
/// [`solve_sa_with_clusters`].
pub fn chain_clusters(embedding: &Embedding) -> Vec<Vec<Vertex>> {
    embedding
        .chains()
        .map(|(_, chain)| chain.iter().map(|&q| Vertex::Physical(q)).collect())
        .collect()
}

/// Solves a physical model (exactly when it fits the cap, otherwise by
/// chain-aware annealing) and decodes the best state.
pub fn solve_physical(
    physical: &PhysicalModel,
    g: f64,
    config: &SaConfig,
    exact_cap: u32,
) -> Result<(SolveResult, DecodeOutcome), SolveError> {
    let result = if physical.model.vertex_count() as u32 <= exact_cap {
        solve_exact(&physical.model, exact_cap)?
    } else {
        solve_sa_with_clusters(&physical.model, g, config, &chain_clusters(&physical.embedding))
    };
    let decoded = decode(&result.best_assignment(), &physical.embedding);
    Ok((result, decoded))
}
