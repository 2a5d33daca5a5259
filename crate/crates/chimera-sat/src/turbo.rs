//! Turbo-code encoding and decoding through the compiler pipeline.
//!
//! The code transmits the K message spins followed by K nested prefix
//! parity checks: odd-order checks over the original ordering, even-order
//! checks over a permuted ordering. A binary symmetric channel with flip
//! probability p gives each received value the log-likelihood weight
//! `f = -(1/2) ln((1-p)/p)`, and maximum-a-posteriori decoding minimizes
//!
//! ```text
//! H(rho) = f * sum_i rho_i s_i + f * sum_i rho_{K+i} * (prefix products)
//! ```
//!
//! which maps onto a weighted parity-clause problem: one XOR clause of
//! weight 2|f| per term, its target parity chosen so the clause is
//! satisfied exactly when the term sits at its minimum.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chimera::{layout_embedding, realize, ChimeraGraph, EmbedError, LayoutKind};
use crate::gadgets::{compile_problem, CompileError, GadgetParams};
use crate::ising::{ModelError, Spin, Vertex};
use crate::problem::{energy_tolerance, Clause, ClauseKind, Literal, Problem, ProblemError};
use crate::solver::{decode, solve_exact, solve_sa_with_clusters, SaConfig, SolveError, SolveMethod};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TurboError {
    #[error("flip probability must lie strictly between 0 and 1/2, got {0}")]
    BadProbability(f64),
    #[error("expected a vector of length {want}, got {got}")]
    LengthMismatch { want: usize, got: usize },
    #[error("permutation is not a bijection on 1..=K")]
    BadPermutation,
    #[error("message length {k} exceeds the exhaustive decoding cap {cap}")]
    CapExceeded { k: usize, cap: usize },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Message length and interleaver permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurboCode {
    k: usize,
    /// 0-based images: `perm[j]` is the permuted position of rank `j`.
    perm: Vec<usize>,
}

impl TurboCode {
    pub fn new(k: usize, perm: Vec<usize>) -> Result<TurboCode, TurboError> {
        if perm.len() != k {
            return Err(TurboError::LengthMismatch {
                want: k,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || seen[p] {
                return Err(TurboError::BadPermutation);
            }
            seen[p] = true;
        }
        Ok(TurboCode { k, perm })
    }

    /// Identity interleaver.
    pub fn identity(k: usize) -> TurboCode {
        TurboCode {
            k,
            perm: (0..k).collect(),
        }
    }

    /// Seeded uniform shuffle.
    pub fn random(k: usize, seed: u64) -> TurboCode {
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        TurboCode { k, perm }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// The variable set (1-based, transmission order) of parity check `i`
    /// (1-based): odd checks cover the first `i` original positions, even
    /// checks the first `i` permuted positions.
    pub fn check_vars(&self, i: usize) -> Vec<u32> {
        debug_assert!(i >= 1 && i <= self.k);
        if i % 2 == 1 {
            (1..=i as u32).collect()
        } else {
            self.perm[..i].iter().map(|&p| p as u32 + 1).collect()
        }
    }

    /// Transmitted word: the message followed by its K parity checks.
    pub fn encode(&self, message: &[Spin]) -> Result<Vec<Spin>, TurboError> {
        if message.len() != self.k {
            return Err(TurboError::LengthMismatch {
                want: self.k,
                got: message.len(),
            });
        }
        let mut out = message.to_vec();
        for i in 1..=self.k {
            let product: i32 = self
                .check_vars(i)
                .iter()
                .map(|&v| i32::from(message[v as usize - 1]))
                .product();
            out.push(product as Spin);
        }
        Ok(out)
    }
}

/// Binary symmetric channel with flip probability `p` and weight `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    p: f64,
    f: f64,
}

impl Channel {
    pub fn new(p: f64) -> Result<Channel, TurboError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(TurboError::BadProbability(p));
        }
        Ok(Channel {
            p,
            f: -0.5 * ((1.0 - p) / p).ln(),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Log-likelihood weight, negative for p below one half.
    pub fn weight(&self) -> f64 {
        self.f
    }

    /// Flips each entry independently with probability `p`.
    pub fn transmit(&self, word: &[Spin], seed: u64) -> Vec<Spin> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        word.iter()
            .map(|&s| if rng.gen_bool(self.p) { -s } else { s })
            .collect()
    }
}

/// Direct evaluation of the decoding Hamiltonian for one message.
pub fn hamiltonian(code: &TurboCode, received: &[Spin], channel: &Channel, message: &[Spin]) -> f64 {
    debug_assert_eq!(received.len(), 2 * code.k);
    debug_assert_eq!(message.len(), code.k);
    let f = channel.f;
    let mut h = 0.0;
    for i in 0..code.k {
        h += f * f64::from(received[i]) * f64::from(message[i]);
    }
    for i in 1..=code.k {
        let product: i32 = code
            .check_vars(i)
            .iter()
            .map(|&v| i32::from(message[v as usize - 1]))
            .product();
        h += f * f64::from(received[code.k + i - 1]) * f64::from(product as Spin);
    }
    h
}

/// The decoding problem plus the affine report relating its energy to the
/// Hamiltonian: `problem_energy = alpha * H + beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingProblem {
    pub problem: Problem,
    pub alpha: f64,
    pub beta: f64,
}

/// Builds the weighted parity-clause problem equivalent to the decoding
/// Hamiltonian. Every term becomes one XOR clause of weight `2|f|`,
/// satisfied exactly when the term's spin product equals the received
/// sign; target parities are written by negating the first literal.
pub fn build_decoding_problem(
    code: &TurboCode,
    received: &[Spin],
    channel: &Channel,
) -> Result<DecodingProblem, TurboError> {
    if received.len() != 2 * code.k {
        return Err(TurboError::LengthMismatch {
            want: 2 * code.k,
            got: received.len(),
        });
    }
    let weight = 2.0 * channel.f.abs();
    let mut clauses = Vec::with_capacity(2 * code.k);
    let mut push_term = |vars: Vec<u32>, rho: Spin| -> Result<(), TurboError> {
        // The term f*rho*prod is minimal when the product equals rho
        // (f is negative), i.e. when the number of false variables is even
        // for rho = +1 and odd for rho = -1. In literal-count terms the
        // clause asserts odd true-literal parity, so the first literal is
        // negated whenever the target true-variable parity is even.
        let want_true_parity = (vars.len() + usize::from(rho < 0)) % 2;
        let literals: Vec<Literal> = vars
            .iter()
            .enumerate()
            .map(|(idx, &v)| Literal::new(v, idx == 0 && want_true_parity == 0))
            .collect::<Result<_, _>>()
            .map_err(ProblemError::from)?;
        clauses.push(
            Clause::new(ClauseKind::Xor, literals, weight).map_err(ProblemError::from)?,
        );
        Ok(())
    };
    for i in 0..code.k {
        push_term(vec![i as u32 + 1], received[i])?;
    }
    for i in 1..=code.k {
        push_term(code.check_vars(i), received[code.k + i - 1])?;
    }
    let problem = Problem::new(code.k as u32, clauses)?;
    Ok(DecodingProblem {
        problem,
        alpha: 1.0,
        beta: 2.0 * code.k as f64 * channel.f.abs(),
    })
}

pub const DEFAULT_ORACLE_CAP: usize = 20;

fn message_from_mask(mask: u64, k: usize) -> Vec<Spin> {
    (0..k).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

/// Exact maximum-a-posteriori decoding by enumeration of all messages.
/// Ties break toward the smallest message mask.
pub fn map_decode_oracle(
    code: &TurboCode,
    received: &[Spin],
    channel: &Channel,
    cap: usize,
) -> Result<Vec<Spin>, TurboError> {
    if code.k > cap {
        return Err(TurboError::CapExceeded { k: code.k, cap });
    }
    if received.len() != 2 * code.k {
        return Err(TurboError::LengthMismatch {
            want: 2 * code.k,
            got: received.len(),
        });
    }
    // Degenerate minima are common (the Hamiltonian takes values on a
    // lattice spaced by 2|f|), and float rounding may split exact ties by
    // a few ulps, so the tie set is collected within tolerance and broken
    // toward the smallest mask.
    let mut best = f64::INFINITY;
    for mask in 0..1u64 << code.k {
        let msg = message_from_mask(mask, code.k);
        best = best.min(hamiltonian(code, received, channel, &msg));
    }
    let tol = energy_tolerance(best);
    let best_mask = (0..1u64 << code.k)
        .find(|&mask| {
            let msg = message_from_mask(mask, code.k);
            hamiltonian(code, received, channel, &msg) <= best + tol
        })
        .expect("nonempty message space");
    Ok(message_from_mask(best_mask, code.k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeTarget {
    /// Solve the compiled abstract model (exact spectrum minimization).
    Abstract,
    /// Embed in a Chimera graph and solve the physical model.
    Embedded,
}

impl DecodeTarget {
    pub fn name(&self) -> &'static str {
        match self {
            DecodeTarget::Abstract => "abstract",
            DecodeTarget::Embedded => "embedded",
        }
    }
}

/// Decoder configuration for the gadget pipeline.
#[derive(Debug, Clone)]
pub struct DecoderConfig {
    pub params: GadgetParams,
    pub sa: SaConfig,
    /// Chimera dimensions; sized to the instance when absent.
    pub graph: Option<(u32, u32)>,
    pub exact_cap: u32,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            params: GadgetParams::default(),
            sa: SaConfig::default(),
            graph: None,
            exact_cap: crate::solver::DEFAULT_EXACT_CAP,
        }
    }
}

/// One decoding run's outcome and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcomeRecord {
    pub decoded: Vec<Spin>,
    pub oracle: Option<Vec<Spin>>,
    pub agree: Option<bool>,
    pub chain_breaks: usize,
    pub physical_spins: usize,
    pub method: SolveMethod,
}

/// Compiles the decoding problem through the gadget pipeline and decodes.
///
/// Parity checks of order 1 and 2 land directly on the logical graph,
/// order 3 uses the single-ancilla gadget, wider checks the k-ancilla
/// staircase. The abstract target minimizes the reduced spectrum exactly;
/// the embedded target realizes the model in a Chimera graph and solves
/// it (exactly below `exact_cap` spins, otherwise by annealing).
pub fn decode_via_annealing(
    code: &TurboCode,
    received: &[Spin],
    channel: &Channel,
    target: DecodeTarget,
    config: &DecoderConfig,
) -> Result<DecodeOutcomeRecord, TurboError> {
    let decoding = build_decoding_problem(code, received, channel)?;
    let compiled = compile_problem(&decoding.problem, &config.params)?;
    let k = code.k;
    let tol = energy_tolerance(2.0 * channel.f.abs() * k as f64);

    let (decoded, chain_breaks, physical_spins, method) = match target {
        DecodeTarget::Abstract => {
            let cap = (k as u32 + 2).max(config.params.spin_cap);
            let spectrum = compiled.logical_spectrum(cap)?;
            let mask = spectrum.argmin_masks(tol)[0];
            (message_from_mask(mask, k), 0, 0, SolveMethod::Exact)
        }
        DecodeTarget::Embedded => {
            let (rows, cols) = config.graph.unwrap_or_else(|| {
                crate::chimera::required_dims(k as u32, compiled.total_ancillas())
            });
            let graph = ChimeraGraph::new(rows, cols);
            let embedding = layout_embedding(&compiled, &graph, LayoutKind::Linear)?;
            let physical = realize(&compiled.model, &embedding, &config.params)?;
            let spins = physical.model.vertex_count();
            let result = if spins as u32 <= config.exact_cap {
                solve_exact(&physical.model, config.exact_cap)?
            } else {
                solve_sa_with_clusters(
                    &physical.model,
                    config.params.g,
                    &config.sa,
                    &crate::solver::chain_clusters(&embedding),
                )
            };
            let outcome = decode(&result.best_assignment(), &embedding);
            let mut message = vec![-1 as Spin; k];
            for v in 1..=k as u32 {
                if outcome.assignment.get(&Vertex::Logical(v)) == Some(1) {
                    message[v as usize - 1] = 1;
                }
            }
            (message, outcome.broken.len(), spins, result.method)
        }
    };

    let oracle = if k <= DEFAULT_ORACLE_CAP {
        Some(map_decode_oracle(code, received, channel, DEFAULT_ORACLE_CAP)?)
    } else {
        None
    };
    let agree = oracle.as_ref().map(|o| *o == decoded);
    Ok(DecodeOutcomeRecord {
        decoded,
        oracle,
        agree,
        chain_breaks,
        physical_spins,
        method,
    })
}

/// Monte Carlo decoding study configuration.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub k: usize,
    pub p: f64,
    pub trials: u32,
    pub seed: u64,
    pub target: DecodeTarget,
    pub decoder: DecoderConfig,
}

/// One seeded trial: message, channel noise, decode, oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u32,
    pub message: Vec<Spin>,
    pub received: Vec<Spin>,
    pub decoded: Vec<Spin>,
    pub oracle: Option<Vec<Spin>>,
    pub agree: Option<bool>,
    pub bit_errors: usize,
    pub chain_breaks: usize,
}

pub fn spins_to_string(spins: &[Spin]) -> String {
    spins.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

impl TrialRecord {
    /// One-line log record.
    pub fn to_line(&self) -> String {
        format!(
            "trial {} msg {} recv {} decoded {} oracle {} bits {} chainbreaks {} agree {}",
            self.trial,
            spins_to_string(&self.message),
            spins_to_string(&self.received),
            spins_to_string(&self.decoded),
            self.oracle.as_deref().map_or("-".to_string(), spins_to_string),
            self.bit_errors,
            self.chain_breaks,
            self.agree.map_or("-".to_string(), |a| u8::from(a).to_string()),
        )
    }
}

/// Runs seeded encode -> transmit -> compile -> solve -> compare trials.
/// One permutation is drawn per run; messages and noise vary per trial.
pub fn run_trials(config: &TrialConfig) -> Result<Vec<TrialRecord>, TurboError> {
    let code = TurboCode::random(config.k, config.seed);
    let channel = Channel::new(config.p)?;
    let outcomes: Vec<Result<TrialRecord, TurboError>> =
        crate::par::map_indices(config.trials as usize, true, |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(0x10_0000 + t as u64);
            let message: Vec<Spin> = (0..config.k)
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let word = code.encode(&message)?;
            let noise_seed = rng.gen::<u64>();
            let received = channel.transmit(&word, noise_seed);
            let mut decoder = config.decoder.clone();
            decoder.sa.seed = config.seed.wrapping_add((t as u64) << 20);
            let outcome =
                decode_via_annealing(&code, &received, &channel, config.target, &decoder)?;
            let bit_errors = message
                .iter()
                .zip(&outcome.decoded)
                .filter(|(a, b)| a != b)
                .count();
            Ok(TrialRecord {
                trial: t as u32,
                message,
                received,
                decoded: outcome.decoded,
                oracle: outcome.oracle,
                agree: outcome.agree,
                bit_errors,
                chain_breaks: outcome.chain_breaks,
            })
        });
    outcomes.into_iter().collect()
}

/// Ancilla count of the compiled K-bit decoding problem in closed form:
/// nothing for orders 1 and 2, one ancilla for the order-3 check, k per
/// order-k check beyond that.
pub fn expected_ancillas(k: usize) -> usize {
    (3..=k)
        .map(|i| if i == 3 { 1 } else { i })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spins(bits: &[i32]) -> Vec<Spin> {
        bits.iter().map(|&b| b as Spin).collect()
    }

    #[test]
    fn encode_all_ones_has_all_positive_parities() {
        let code = TurboCode::identity(4);
        let word = code.encode(&spins(&[1, 1, 1, 1])).unwrap();
        assert_eq!(word, spins(&[1, 1, 1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn encode_prefix_products() {
        let code = TurboCode::identity(4);
        let word = code.encode(&spins(&[1, -1, 1, -1])).unwrap();
        // Parities: s1, s1*s2, s1*s2*s3, s1*s2*s3*s4.
        assert_eq!(word[4..], spins(&[1, -1, -1, 1])[..]);
    }

    #[test]
    fn check_variable_sets_follow_the_permutation() {
        // Permutation images for ranks 1..6: 7, 4, 5, 9, 12, 8.
        let mut perm: Vec<usize> = vec![6, 3, 4, 8, 11, 7];
        for i in 0..12 {
            if !perm.contains(&i) {
                perm.push(i);
            }
        }
        let code = TurboCode::new(12, perm).unwrap();
        assert_eq!(code.check_vars(3), vec![1, 2, 3]);
        assert_eq!(code.check_vars(4), vec![7, 4, 5, 9]);
        assert_eq!(code.check_vars(5), vec![1, 2, 3, 4, 5]);
        assert_eq!(code.check_vars(6), vec![7, 4, 5, 9, 12, 8]);
    }

    #[test]
    fn channel_rejects_degenerate_probabilities() {
        assert!(Channel::new(0.5).is_err());
        assert!(Channel::new(0.0).is_err());
        assert!(Channel::new(-0.1).is_err());
        assert!(Channel::new(1.0).is_err());
    }

    #[test]
    fn channel_weight_matches_log_likelihood() {
        let ch = Channel::new(0.1).unwrap();
        let expect = -0.5 * (0.9f64 / 0.1).ln();
        assert!((ch.weight() - expect).abs() < 1e-12);
        assert!(ch.weight() < 0.0);
    }

    #[test]
    fn transmit_with_vanishing_noise_is_identity() {
        let ch = Channel::new(1e-12).unwrap();
        let word = spins(&[1, -1, 1, 1, -1, -1, 1, -1]);
        assert_eq!(ch.transmit(&word, 7), word);
    }

    #[test]
    fn empirical_flip_rate() {
        let ch = Channel::new(0.1).unwrap();
        let word = vec![1 as Spin; 100_000];
        let received = ch.transmit(&word, 1234);
        let flips = received.iter().filter(|&&s| s < 0).count();
        let rate = flips as f64 / 100_000.0;
        assert!((rate - 0.1).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn one_bit_code_gives_two_unit_clauses() {
        let code = TurboCode::identity(1);
        let ch = Channel::new(0.1).unwrap();
        let dp = build_decoding_problem(&code, &spins(&[1, 1]), &ch).unwrap();
        assert_eq!(dp.problem.clauses().len(), 2);
        for c in dp.problem.clauses() {
            assert_eq!(c.width(), 1);
            assert!((c.weight() - 2.0 * ch.weight().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn problem_energy_is_affine_in_the_hamiltonian() {
        for k in 1..=6usize {
            let code = TurboCode::random(k, 3 * k as u64);
            let ch = Channel::new(0.08).unwrap();
            let mut rng = crate::generate::rng_from(77 + k as u64);
            let message: Vec<Spin> =
                (0..k).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            let word = code.encode(&message).unwrap();
            let received = ch.transmit(&word, 17);
            let dp = build_decoding_problem(&code, &received, &ch).unwrap();
            for mask in 0..1u64 << k {
                let msg = message_from_mask(mask, k);
                let h = hamiltonian(&code, &received, &ch, &msg);
                let bools: Vec<bool> = msg.iter().map(|&s| s > 0).collect();
                let e = dp.problem.energy(&bools).unwrap();
                assert!(
                    (e - (dp.alpha * h + dp.beta)).abs() < 1e-9,
                    "k={k} mask={mask:b}: {e} vs {h}"
                );
            }
        }
    }

    #[test]
    fn noiseless_words_decode_to_the_message() {
        for k in 2..=10usize {
            let code = TurboCode::random(k, k as u64);
            let ch = Channel::new(0.05).unwrap();
            let mut rng = crate::generate::rng_from(k as u64);
            let message: Vec<Spin> =
                (0..k).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            let word = code.encode(&message).unwrap();
            // No flips: the word arrives unchanged.
            let decoded = map_decode_oracle(&code, &word, &ch, 20).unwrap();
            assert_eq!(decoded, message, "k={k}");
            // And the decoding problem's optimum is unique and identical.
            let dp = build_decoding_problem(&code, &word, &ch).unwrap();
            let opt = crate::problem::brute_force_optimum(&dp.problem, 26).unwrap();
            assert_eq!(opt.assignments.len(), 1, "k={k}");
            let mask = opt.assignments[0];
            assert_eq!(message_from_mask(mask, k), message, "k={k}");
        }
    }

    #[test]
    fn oracle_cap() {
        let code = TurboCode::identity(25);
        let ch = Channel::new(0.1).unwrap();
        let recv = vec![1 as Spin; 50];
        assert!(matches!(
            map_decode_oracle(&code, &recv, &ch, 20),
            Err(TurboError::CapExceeded { .. })
        ));
    }

    #[test]
    fn abstract_decoding_agrees_with_oracle_under_noise() {
        let cfg = DecoderConfig::default();
        for trial in 0..10u64 {
            let code = TurboCode::random(6, 5);
            let ch = Channel::new(0.12).unwrap();
            let mut rng = crate::generate::rng_from(900 + trial);
            let message: Vec<Spin> =
                (0..6).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            let word = code.encode(&message).unwrap();
            let received = ch.transmit(&word, 5000 + trial);
            let out =
                decode_via_annealing(&code, &received, &ch, DecodeTarget::Abstract, &cfg).unwrap();
            assert_eq!(out.agree, Some(true), "trial {trial}");
        }
    }

    #[test]
    fn embedded_exact_decoding_matches_message_when_noiseless() {
        let code = TurboCode::identity(4);
        let ch = Channel::new(0.05).unwrap();
        let message = spins(&[1, -1, -1, 1]);
        let word = code.encode(&message).unwrap();
        let out = decode_via_annealing(
            &code,
            &word,
            &ch,
            DecodeTarget::Embedded,
            &DecoderConfig::default(),
        )
        .unwrap();
        assert_eq!(out.decoded, message);
        assert_eq!(out.chain_breaks, 0);
        assert_eq!(out.agree, Some(true));
    }

    #[test]
    fn compiled_ancilla_count_matches_closed_form() {
        for k in 1..=10usize {
            let code = TurboCode::random(k, 1);
            let ch = Channel::new(0.1).unwrap();
            let word = code.encode(&vec![1 as Spin; k]).unwrap();
            let dp = build_decoding_problem(&code, &word, &ch).unwrap();
            let compiled = compile_problem(&dp.problem, &GadgetParams::default()).unwrap();
            assert_eq!(
                compiled.total_ancillas(),
                expected_ancillas(k),
                "k={k}"
            );
        }
        // Quadratic growth.
        assert_eq!(expected_ancillas(12), 1 + (4..=12).sum::<usize>());
    }

    #[test]
    fn trial_runner_is_deterministic() {
        let cfg = TrialConfig {
            k: 4,
            p: 0.05,
            trials: 5,
            seed: 11,
            target: DecodeTarget::Abstract,
            decoder: DecoderConfig::default(),
        };
        let a = run_trials(&cfg).unwrap();
        let b = run_trials(&cfg).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert_eq!(r.agree, Some(true));
        }
    }
}

