//! Penalty gadgets: two-body Ising sub-Hamiltonians whose minimum over
//! ancilla spins reproduces a clause's two-level penalty spectrum.
//!
//! The general construction couples the k logical spins all-to-all with
//! strength `ja`, applies fields `(q0 - ja) * c(i)`, couples every logical
//! spin to every ancilla with strength `ja * c(i)` and staggers the ancilla
//! fields so that exactly one ancilla flips each time another logical spin
//! agrees with its gauge. Choosing the per-ancilla corrections `q_j` from a
//! penalty profile `f` makes the min-over-ancilla energy equal `2 f_m` for
//! assignments with `m` gauge-aligned logical spins, which covers OR, XOR
//! and any permutation-symmetric clause. AND clauses and 3-bit parity
//! checks have cheaper single-ancilla forms.
//!
//! Every gadget is offset-normalized so satisfied assignments sit at
//! exactly 0 and violated ones at the clause weight.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ising::{IsingModel, ModelError, Spectrum, Vertex};
use crate::problem::{energy_tolerance, Clause, ClauseKind, Problem};

/// Parameters of the gadget family.
///
/// `ja` is the ancilla coupling scale, `g` the penalty quantum, `q0` the
/// parity/symmetric field offset and `jinf_factor` the chain-strength
/// multiplier consumed by the hardware embedding. `ratio_min` states how
/// strongly `ja` should dominate `g` and `q0`; it is a robustness margin
/// reported by validation, not an exactness requirement. `gap_fraction`
/// is the minimum acceptable single-ancilla AND gap before falling back,
/// and `spin_cap` bounds exhaustive verification.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetParams {
    pub ja: f64,
    pub g: f64,
    pub q0: f64,
    pub jinf_factor: f64,
    pub ratio_min: f64,
    pub gap_fraction: f64,
    pub spin_cap: u32,
}

impl Default for GadgetParams {
    fn default() -> Self {
        GadgetParams {
            ja: 1.0,
            g: 0.2,
            q0: 0.3,
            jinf_factor: 2.0,
            ratio_min: 5.0,
            gap_fraction: 0.5,
            spin_cap: crate::ising::DEFAULT_SPIN_CAP,
        }
    }
}

impl GadgetParams {
    pub fn validate(&self) -> Result<(), GadgetError> {
        if !(self.ja > 0.0) || !self.ja.is_finite() {
            return Err(GadgetError::InvalidParams(format!(
                "ja must be positive, got {}",
                self.ja
            )));
        }
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(GadgetError::InvalidParams(format!(
                "g must be positive, got {}",
                self.g
            )));
        }
        if !(self.jinf_factor > 1.0) {
            return Err(GadgetError::InvalidParams(format!(
                "jinf_factor must exceed 1, got {}",
                self.jinf_factor
            )));
        }
        Ok(())
    }

    fn validate_q0(&self) -> Result<(), GadgetError> {
        if !(self.q0 > self.g / 2.0) {
            return Err(GadgetError::InvalidParams(format!(
                "parity/symmetric gadgets need q0 > g/2, got q0={} g={}",
                self.q0, self.g
            )));
        }
        Ok(())
    }

    /// Uniformly rescaled copy whose penalty quantum equals `weight`.
    ///
    /// Scaling `ja`, `g` and `q0` together keeps every internal ratio, so a
    /// weighted clause compiles to an exactly `weight`-deep gadget with the
    /// same robustness margins as the base parameters.
    pub fn scaled_to_penalty(&self, weight: f64) -> GadgetParams {
        let s = weight / self.g;
        GadgetParams {
            ja: self.ja * s,
            g: weight,
            q0: self.q0 * s,
            ..self.clone()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("invalid gadget parameters: {0}")]
    InvalidParams(String),
    #[error("{kind} gadget needs at least {min} literals, got {got}")]
    TooNarrow {
        kind: &'static str,
        min: usize,
        got: usize,
    },
    #[error("{kind} gadget takes exactly {want} literals, got {got}")]
    WidthMismatch {
        kind: &'static str,
        want: usize,
        got: usize,
    },
    #[error("gauge vector length {gauges} does not match {vars} variables")]
    GaugeMismatch { gauges: usize, vars: usize },
    #[error("symmetric profile must not be constant")]
    ConstantProfile,
    #[error("table violating set must be a nonempty strict subset")]
    BadTable,
    #[error("gadget spectrum did not split into two levels")]
    NotTwoLevel,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How a gadget realizes its clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetKind {
    Or,
    Parity,
    ParityNative,
    Parity3,
    Symmetric,
    AndSingleAncilla,
    AndSymmetricFallback,
    TableTerm,
}

impl GadgetKind {
    pub fn name(&self) -> &'static str {
        match self {
            GadgetKind::Or => "or",
            GadgetKind::Parity => "parity",
            GadgetKind::ParityNative => "parity-native",
            GadgetKind::Parity3 => "parity3",
            GadgetKind::Symmetric => "symmetric",
            GadgetKind::AndSingleAncilla => "and",
            GadgetKind::AndSymmetricFallback => "and-fallback",
            GadgetKind::TableTerm => "table-term",
        }
    }
}

/// One clause's penalty sub-Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub model: IsingModel,
    /// Logical vertices in literal order.
    pub logicals: Vec<Vertex>,
    /// Ancilla vertices in allocation order.
    pub ancillas: Vec<Vertex>,
    /// Gauges actually wired into the couplings (construction gauges).
    pub gauges: Vec<i8>,
    /// Target spectrum over raw variable-value masks: 0 or the penalty.
    pub ideal: Vec<f64>,
    pub kind: GadgetKind,
    pub clause_index: u32,
    /// Penalty depth (the clause weight this gadget realizes).
    pub g: f64,
}

impl Gadget {
    pub fn width(&self) -> usize {
        self.logicals.len()
    }

    pub fn total_spins(&self) -> usize {
        self.logicals.len() + self.ancillas.len()
    }

    pub fn spectrum(&self, cap: u32) -> Result<Spectrum, ModelError> {
        self.model.reduced_spectrum(&self.logicals, cap)
    }
}

fn check_gauges(kind: &'static str, vars: &[u32], gauges: &[i8]) -> Result<(), GadgetError> {
    if vars.is_empty() {
        return Err(GadgetError::TooNarrow {
            kind,
            min: 1,
            got: 0,
        });
    }
    if gauges.len() != vars.len() {
        return Err(GadgetError::GaugeMismatch {
            gauges: gauges.len(),
            vars: vars.len(),
        });
    }
    debug_assert!(gauges.iter().all(|&c| c == 1 || c == -1));
    Ok(())
}

fn negation_mask(gauges: &[i8]) -> u32 {
    let mut m = 0;
    for (i, &c) in gauges.iter().enumerate() {
        if c < 0 {
            m |= 1 << i;
        }
    }
    m
}

/// Gauge-aligned count for a raw variable-value mask.
fn aligned_count(values: u32, gauges: &[i8]) -> u32 {
    (values ^ negation_mask(gauges)).count_ones()
}

/// Shared staircase construction: fields `(q0 - ja) c(i)` on the logical
/// spins, all-to-all logical couplings `ja c(i) c(j)`, ancilla `j` coupled
/// `ja c(i)` to every logical spin with field `-ja (2j - k) + q_j` where
/// `q_j = q0 + f[j-1] - f[j]`. The min-over-ancilla energy lands at
/// `2 f_m - f_0 - f_k + const`, normalized here so it is exactly `2 f_m`.
fn staircase_model(
    clause_index: u32,
    ancilla_base: u32,
    vars: &[u32],
    gauges: &[i8],
    f: &[f64],
    q0: f64,
    ja: f64,
) -> (IsingModel, Vec<Vertex>, Vec<Vertex>) {
    let k = vars.len();
    debug_assert_eq!(f.len(), k + 1);
    let logicals: Vec<Vertex> = vars.iter().map(|&v| Vertex::Logical(v)).collect();
    let ancillas: Vec<Vertex> = (0..k as u32)
        .map(|j| Vertex::Ancilla {
            clause: clause_index,
            index: ancilla_base + j,
        })
        .collect();
    let mut m = IsingModel::new();
    for (i, &li) in logicals.iter().enumerate() {
        m.add_field(li, (q0 - ja) * f64::from(gauges[i]));
        for (jj, &lj) in logicals.iter().enumerate().skip(i + 1) {
            m.add_coupling(li, lj, ja * f64::from(gauges[i]) * f64::from(gauges[jj]))
                .unwrap();
        }
    }
    for (j0, &aj) in ancillas.iter().enumerate() {
        let j = (j0 + 1) as f64; // ancilla indices are 1-based in the field rule
        let qj = q0 + f[j0] - f[j0 + 1];
        m.add_field(aj, -ja * (2.0 * j - k as f64) + qj);
        for (i, &li) in logicals.iter().enumerate() {
            m.add_coupling(li, aj, ja * f64::from(gauges[i])).unwrap();
        }
    }
    // Satisfied level sits at -k(k+1)ja/2 - f_0 - f_k before this shift.
    m.add_offset(k as f64 * (k as f64 + 1.0) / 2.0 * ja + f[0] + f[k]);
    (m, logicals, ancillas)
}

/// OR gadget: k logical spins, k ancillae, penalty `g` exactly when every
/// literal is false.
pub fn build_or_gadget(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
) -> Result<Gadget, GadgetError> {
    build_or_term(clause_index, 0, vars, gauges, params, GadgetKind::Or)
}

fn build_or_term(
    clause_index: u32,
    ancilla_base: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
    kind: GadgetKind,
) -> Result<Gadget, GadgetError> {
    check_gauges("or", vars, gauges)?;
    params.validate()?;
    let k = vars.len();
    let mut f = vec![0.0; k + 1];
    f[0] = params.g / 2.0;
    let (model, logicals, ancillas) = staircase_model(
        clause_index,
        ancilla_base,
        vars,
        gauges,
        &f,
        0.0,
        params.ja,
    );
    let ideal = (0..1u32 << k)
        .map(|v| {
            if aligned_count(v, gauges) == 0 {
                params.g
            } else {
                0.0
            }
        })
        .collect();
    Ok(Gadget {
        model,
        logicals,
        ancillas,
        gauges: gauges.to_vec(),
        ideal,
        kind,
        clause_index,
        g: params.g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Parity-check gadget over k logical spins with k ancillae.
///
/// The staircase with alternating `q_j = q0 -/+ g/2` penalizes assignments
/// whose gauge-aligned count has the same parity as `k`; when that is the
/// parity the caller wants satisfied, one construction gauge is flipped.
pub fn build_parity_gadget(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    desired: Parity,
    params: &GadgetParams,
) -> Result<Gadget, GadgetError> {
    check_gauges("parity", vars, gauges)?;
    params.validate()?;
    params.validate_q0()?;
    let k = vars.len();
    let desired_bit = match desired {
        Parity::Odd => 1,
        Parity::Even => 0,
    };
    let mut wired: Vec<i8> = gauges.to_vec();
    if k % 2 == desired_bit as usize % 2 {
        wired[0] = -wired[0];
    }
    // Penalize aligned counts with the parity of k, measured in the wired
    // gauges; the profile alternates g/2 on those counts.
    let f: Vec<f64> = (0..=k)
        .map(|m| if m % 2 == k % 2 { params.g / 2.0 } else { 0.0 })
        .collect();
    let (model, logicals, ancillas) = staircase_model(
        clause_index,
        0,
        vars,
        &wired,
        &f,
        params.q0,
        params.ja,
    );
    let ideal = (0..1u32 << k)
        .map(|v| {
            if aligned_count(v, gauges) % 2 == desired_bit {
                0.0
            } else {
                params.g
            }
        })
        .collect();
    Ok(Gadget {
        model,
        logicals,
        ancillas,
        gauges: wired,
        ideal,
        kind: GadgetKind::Parity,
        clause_index,
        g: params.g,
    })
}

/// Gadget for a clause symmetric under literal permutation, described by a
/// profile of penalized gauge-aligned counts.
pub fn build_symmetric_gadget(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    penalized: &[bool],
    params: &GadgetParams,
) -> Result<Gadget, GadgetError> {
    check_gauges("symmetric", vars, gauges)?;
    params.validate()?;
    params.validate_q0()?;
    let k = vars.len();
    if penalized.len() != k + 1 {
        return Err(GadgetError::WidthMismatch {
            kind: "symmetric profile",
            want: k + 1,
            got: penalized.len(),
        });
    }
    if penalized.iter().all(|&p| p) || penalized.iter().all(|&p| !p) {
        return Err(GadgetError::ConstantProfile);
    }
    let f: Vec<f64> = penalized
        .iter()
        .map(|&p| if p { params.g / 2.0 } else { 0.0 })
        .collect();
    let (model, logicals, ancillas) = staircase_model(
        clause_index,
        0,
        vars,
        gauges,
        &f,
        params.q0,
        params.ja,
    );
    let ideal = (0..1u32 << k)
        .map(|v| {
            if penalized[aligned_count(v, gauges) as usize] {
                params.g
            } else {
                0.0
            }
        })
        .collect();
    Ok(Gadget {
        model,
        logicals,
        ancillas,
        gauges: gauges.to_vec(),
        ideal,
        kind: GadgetKind::Symmetric,
        clause_index,
        g: params.g,
    })
}

/// AND gadget: penalty `g` unless every literal is true.
///
/// A deterministic grid search over the single-ancilla template (optionally
/// with a uniform logical-logical coupling) is scored by brute force; the
/// best flat candidate is rescaled so the gap is exactly `g`. When no
/// candidate has a flat violating level with gap at least
/// `g * gap_fraction`, the k-ancilla symmetric profile (g/2, .., g/2, 0)
/// takes over, rebuilt at safe internal ratios and rescaled, so the result
/// is exact either way.
pub fn build_and_gadget(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
) -> Result<Gadget, GadgetError> {
    check_gauges("and", vars, gauges)?;
    if vars.len() < 2 {
        return Err(GadgetError::TooNarrow {
            kind: "and",
            min: 2,
            got: vars.len(),
        });
    }
    params.validate()?;
    let k = vars.len();
    let ideal: Vec<f64> = (0..1u32 << k)
        .map(|v| {
            if aligned_count(v, gauges) == k as u32 {
                0.0
            } else {
                params.g
            }
        })
        .collect();

    if k as u32 + 1 <= params.spin_cap {
        if let Some(gadget) = and_single_ancilla_search(clause_index, vars, gauges, params, &ideal)? {
            return Ok(gadget);
        }
    } else if params.g < 4.0 * params.ja {
        // Too wide to score by brute force; the closed form is exact while
        // the level split g/2 stays below the coupling step 2*ja.
        return Ok(and_single_ancilla_closed_form(
            clause_index,
            vars,
            gauges,
            params,
            &ideal,
        ));
    }

    // Fallback: symmetric staircase penalizing every count below k.
    let mut penalized = vec![true; k + 1];
    penalized[k] = false;
    let safe = GadgetParams::default().scaled_to_penalty(params.g);
    let mut gadget = build_symmetric_gadget(clause_index, vars, gauges, &penalized, &safe)?;
    gadget.kind = GadgetKind::AndSymmetricFallback;
    gadget.ideal = ideal;
    Ok(gadget)
}

fn and_template(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    j_ll: f64,
    h: f64,
    h_a: f64,
) -> (IsingModel, Vec<Vertex>, Vec<Vertex>) {
    let logicals: Vec<Vertex> = vars.iter().map(|&v| Vertex::Logical(v)).collect();
    let ancilla = Vertex::Ancilla {
        clause: clause_index,
        index: 0,
    };
    let mut m = IsingModel::new();
    for (i, &li) in logicals.iter().enumerate() {
        m.add_field(li, h * f64::from(gauges[i]));
        m.add_coupling(li, ancilla, -h * f64::from(gauges[i])).unwrap();
        if j_ll != 0.0 {
            for (jj, &lj) in logicals.iter().enumerate().skip(i + 1) {
                m.add_coupling(li, lj, j_ll * f64::from(gauges[i]) * f64::from(gauges[jj]))
                    .unwrap();
            }
        }
    }
    m.add_field(ancilla, h_a);
    (m, logicals, vec![ancilla])
}

fn and_single_ancilla_closed_form(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
    ideal: &[f64],
) -> Gadget {
    let k = vars.len() as f64;
    let (h, h_a) = (-params.ja, -params.ja * k + params.g / 2.0);
    let (mut model, logicals, ancillas) = and_template(clause_index, vars, gauges, 0.0, h, h_a);
    model.add_offset(params.ja * k + params.g / 2.0);
    Gadget {
        model,
        logicals,
        ancillas,
        gauges: gauges.to_vec(),
        ideal: ideal.to_vec(),
        kind: GadgetKind::AndSingleAncilla,
        clause_index,
        g: params.g,
    }
}

fn and_single_ancilla_search(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
    ideal: &[f64],
) -> Result<Option<Gadget>, GadgetError> {
    let k = vars.len();
    let kf = k as f64;
    let (ja, g) = (params.ja, params.g);
    let mut candidates = Vec::new();
    for h in [-ja, ja, -ja / 2.0, ja / 2.0] {
        for q in [g / 2.0, -g / 2.0] {
            for h_a in [-h * kf + q, h * kf + q] {
                for j_ll in [0.0, ja / 4.0] {
                    candidates.push((j_ll, h, h_a));
                }
            }
        }
    }

    let flat_tol = 1e-10 * ja.abs().max(1.0);
    let sat_mask = ((1u64 << k) - 1) as usize;
    let mut best: Option<(f64, IsingModel, Vec<Vertex>, Vec<Vertex>)> = None;
    for (j_ll, h, h_a) in candidates {
        let (model, logicals, ancillas) = and_template(clause_index, vars, gauges, j_ll, h, h_a);
        let spectrum = model.reduced_spectrum(&logicals, params.spin_cap)?;
        let energies = spectrum.energies();
        // Index of the satisfied assignment in spectrum mask space: spin +1
        // on position i iff gauge-aligned, i.e. raw value = (gauge > 0).
        let sat_idx = (0..k).fold(0usize, |acc, i| {
            if gauges[i] > 0 {
                acc | 1 << i
            } else {
                acc
            }
        });
        debug_assert_eq!(sat_idx & sat_mask, sat_idx);
        let sat = energies[sat_idx];
        let violating: Vec<f64> = energies
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != sat_idx)
            .map(|(_, &e)| e)
            .collect();
        let vmin = violating.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let vmax = violating.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if vmax - vmin > flat_tol {
            continue;
        }
        let gap = vmin - sat;
        if gap < g * params.gap_fraction {
            continue;
        }
        if best.as_ref().map_or(true, |(bg, ..)| gap > *bg) {
            best = Some((gap, model, logicals, ancillas));
        }
    }

    Ok(best.map(|(gap, mut model, logicals, ancillas)| {
        model.scale(g / gap);
        let sat_idx = (0..k).fold(0usize, |acc, i| {
            if gauges[i] > 0 {
                acc | 1 << i
            } else {
                acc
            }
        });
        let spectrum = model.reduced_spectrum(&logicals, params.spin_cap).unwrap();
        model.add_offset(-spectrum.energies()[sat_idx]);
        Gadget {
            model,
            logicals,
            ancillas,
            gauges: gauges.to_vec(),
            ideal: ideal.to_vec(),
            kind: GadgetKind::AndSingleAncilla,
            clause_index,
            g,
        }
    }))
}

/// Single-ancilla 3-bit parity gadget asserting odd gauge-aligned count.
///
/// The template puts `ja/2` on the logical pairs, fields `g` on the logical
/// spins, couples each to one ancilla with strength `ja` and gives the
/// ancilla field `2g`; its two levels split by `2g` with the even counts
/// low, so one gauge is flipped and the whole model rescaled to a gap of
/// exactly `g`.
pub fn build_parity3_gadget(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
) -> Result<Gadget, GadgetError> {
    check_gauges("parity3", vars, gauges)?;
    if vars.len() != 3 {
        return Err(GadgetError::WidthMismatch {
            kind: "parity3",
            want: 3,
            got: vars.len(),
        });
    }
    params.validate()?;
    if params.ja <= params.g {
        return Err(GadgetError::InvalidParams(format!(
            "parity3 needs ja > g (the ancilla coupling must dominate the field), got ja={} g={}",
            params.ja, params.g
        )));
    }
    let mut wired = gauges.to_vec();
    wired[0] = -wired[0];

    let logicals: Vec<Vertex> = vars.iter().map(|&v| Vertex::Logical(v)).collect();
    let ancilla = Vertex::Ancilla {
        clause: clause_index,
        index: 0,
    };
    let mut model = IsingModel::new();
    let h = params.g;
    for (i, &li) in logicals.iter().enumerate() {
        model.add_field(li, h * f64::from(wired[i]));
        model.add_coupling(li, ancilla, params.ja * f64::from(wired[i])).unwrap();
        for (jj, &lj) in logicals.iter().enumerate().skip(i + 1) {
            model
                .add_coupling(li, lj, params.ja / 2.0 * f64::from(wired[i]) * f64::from(wired[jj]))
                .unwrap();
        }
    }
    model.add_field(ancilla, 2.0 * h);

    // Measure the realized two-level split and rescale it to exactly g.
    let spectrum = model.reduced_spectrum(&logicals, params.spin_cap)?;
    let energies = spectrum.energies();
    let low = energies.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let high = energies.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let tol = 1e-10 * params.ja.abs().max(1.0);
    for &e in &energies {
        if (e - low).abs() > tol && (e - high).abs() > tol {
            return Err(GadgetError::NotTwoLevel);
        }
    }
    let gap = high - low;
    if gap <= tol {
        return Err(GadgetError::NotTwoLevel);
    }
    model.scale(params.g / gap);
    model.add_offset(-low * params.g / gap);

    let ideal = (0..8u32)
        .map(|v| {
            if aligned_count(v, gauges) % 2 == 1 {
                0.0
            } else {
                params.g
            }
        })
        .collect();
    Ok(Gadget {
        model,
        logicals,
        ancillas: vec![ancilla],
        gauges: wired,
        ideal,
        kind: GadgetKind::Parity3,
        clause_index,
        g: params.g,
    })
}

/// Truth-table clause built piecewise: one OR term per violating
/// bitstring, gauged so that bitstring is the term's unique all-false
/// assignment. Violating masks are over literal values (gauged bits).
pub fn build_table_gadget(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    violating: &BTreeSet<u32>,
    params: &GadgetParams,
) -> Result<Vec<Gadget>, GadgetError> {
    check_gauges("table", vars, gauges)?;
    params.validate()?;
    let k = vars.len();
    let full = 1u64 << k;
    if violating.is_empty()
        || violating.len() as u64 >= full
        || violating.iter().any(|&b| b as u64 >= full)
    {
        return Err(GadgetError::BadTable);
    }
    let neg = negation_mask(gauges);
    let mut out = Vec::with_capacity(violating.len());
    for (rank, &b) in violating.iter().enumerate() {
        // The term must be violated exactly at raw values b ^ neg.
        let value_mask = b ^ neg;
        let term_gauges: Vec<i8> = (0..k)
            .map(|i| if value_mask >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let mut gadget = build_or_term(
            clause_index,
            (rank * k) as u32,
            vars,
            &term_gauges,
            params,
            GadgetKind::TableTerm,
        )?;
        debug_assert!(gadget
            .ideal
            .iter()
            .enumerate()
            .all(|(v, &e)| (e > 0.0) == (v as u32 == value_mask)));
        gadget.clause_index = clause_index;
        out.push(gadget);
    }
    Ok(out)
}

/// Native realizations of 1- and 2-literal parity checks: a field or a
/// single coupler, no ancillae.
fn build_parity_native(
    clause_index: u32,
    vars: &[u32],
    gauges: &[i8],
    params: &GadgetParams,
) -> Result<Gadget, GadgetError> {
    check_gauges("parity-native", vars, gauges)?;
    params.validate()?;
    let k = vars.len();
    let g = params.g;
    let mut model = IsingModel::new();
    let logicals: Vec<Vertex> = vars.iter().map(|&v| Vertex::Logical(v)).collect();
    match k {
        1 => {
            model.add_field(logicals[0], -g / 2.0 * f64::from(gauges[0]));
            model.add_offset(g / 2.0);
        }
        2 => {
            model
                .add_coupling(
                    logicals[0],
                    logicals[1],
                    g / 2.0 * f64::from(gauges[0]) * f64::from(gauges[1]),
                )
                .unwrap();
            model.add_offset(g / 2.0);
        }
        _ => {
            return Err(GadgetError::WidthMismatch {
                kind: "parity-native",
                want: 2,
                got: k,
            })
        }
    }
    let ideal = (0..1u32 << k)
        .map(|v| {
            if aligned_count(v, gauges) % 2 == 1 {
                0.0
            } else {
                g
            }
        })
        .collect();
    Ok(Gadget {
        model,
        logicals,
        ancillas: Vec::new(),
        gauges: gauges.to_vec(),
        ideal,
        kind: GadgetKind::ParityNative,
        clause_index,
        g,
    })
}

// --- validation ----------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Brute-force verification record for one gadget.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetReport {
    pub clause_index: u32,
    pub kind: GadgetKind,
    pub logical_count: usize,
    pub ancilla_count: usize,
    /// Min-over-ancilla spectrum equals the ideal spectrum after offset
    /// removal.
    pub exact: bool,
    pub max_deviation: f64,
    /// Energy of the satisfied level (should sit at 0).
    pub satisfied_level: f64,
    /// Cheapest wrong-ancilla excitation over all logical assignments.
    pub ancilla_gap: Option<f64>,
    pub margins: Vec<Margin>,
    /// False when the gadget was too wide to verify exhaustively.
    pub verified: bool,
}

impl GadgetReport {
    pub fn margin_warnings(&self) -> impl Iterator<Item = &Margin> {
        self.margins.iter().filter(|m| !m.ok)
    }
}

fn margins_for(gadget: &Gadget, params: &GadgetParams) -> Vec<Margin> {
    let bound = params.ja / params.ratio_min;
    let mut margins = vec![Margin {
        name: "g-ratio".into(),
        value: gadget.g,
        bound,
        ok: gadget.g <= bound + 1e-12,
    }];
    if matches!(gadget.kind, GadgetKind::Parity | GadgetKind::Symmetric) {
        margins.push(Margin {
            name: "q0-ratio".into(),
            value: params.q0,
            bound,
            ok: params.q0 <= bound + 1e-12,
        });
        margins.push(Margin {
            name: "q0-window".into(),
            value: params.q0 + gadget.g / 2.0,
            bound: 2.0 * params.ja,
            ok: params.q0 + gadget.g / 2.0 < 2.0 * params.ja,
        });
    }
    if matches!(gadget.kind, GadgetKind::Or | GadgetKind::TableTerm) {
        margins.push(Margin {
            name: "g-window".into(),
            value: gadget.g / 2.0,
            bound: 2.0 * params.ja,
            ok: gadget.g / 2.0 < 2.0 * params.ja,
        });
    }
    margins
}

/// Exhaustively checks a gadget's spectrum against its ideal spectrum.
pub fn validate_gadget(gadget: &Gadget, params: &GadgetParams) -> Result<GadgetReport, GadgetError> {
    let spectrum = gadget.spectrum(params.spin_cap)?;
    let tol = energy_tolerance(gadget.g);
    let (exact, max_deviation) = spectrum.matches(&gadget.ideal, tol);
    let satisfied_level = spectrum.min_energy();
    Ok(GadgetReport {
        clause_index: gadget.clause_index,
        kind: gadget.kind,
        logical_count: gadget.logicals.len(),
        ancilla_count: gadget.ancillas.len(),
        exact: exact && satisfied_level.abs() <= tol,
        max_deviation,
        satisfied_level,
        ancilla_gap: spectrum.min_ancilla_gap(),
        margins: margins_for(gadget, params),
        verified: true,
    })
}

fn unverified_report(gadget: &Gadget, params: &GadgetParams) -> GadgetReport {
    GadgetReport {
        clause_index: gadget.clause_index,
        kind: gadget.kind,
        logical_count: gadget.logicals.len(),
        ancilla_count: gadget.ancillas.len(),
        exact: true,
        max_deviation: 0.0,
        satisfied_level: 0.0,
        ancilla_gap: None,
        margins: margins_for(gadget, params),
        verified: false,
    }
}

// --- compiler --------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("clause {index}: {source}")]
    Gadget { index: usize, source: GadgetError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A compiled problem: the superimposed model plus per-clause provenance.
#[derive(Debug, Clone)]
pub struct CompiledProblem {
    pub model: IsingModel,
    pub num_vars: u32,
    /// Ancilla vertices per clause, in allocation order.
    pub clause_ancillas: Vec<Vec<Vertex>>,
    /// Wired construction gauges per clause (per gadget for table clauses,
    /// flattened in term order).
    pub clause_gauges: Vec<Vec<i8>>,
    pub reports: Vec<Vec<GadgetReport>>,
    pub params: GadgetParams,
    /// `problem_energy = logical spectrum + energy_offset` (zero by
    /// construction; recorded for the interchange format).
    pub energy_offset: f64,
}

impl CompiledProblem {
    pub fn logical_vertices(&self) -> Vec<Vertex> {
        (1..=self.num_vars).map(Vertex::Logical).collect()
    }

    /// Min-over-ancilla spectrum over the problem variables.
    pub fn logical_spectrum(&self, cap: u32) -> Result<Spectrum, ModelError> {
        self.model.reduced_spectrum(&self.logical_vertices(), cap)
    }

    pub fn total_ancillas(&self) -> usize {
        self.clause_ancillas.iter().map(|a| a.len()).sum()
    }

    pub fn all_reports(&self) -> impl Iterator<Item = &GadgetReport> {
        self.reports.iter().flatten()
    }
}

fn build_clause_gadgets(
    index: usize,
    clause: &Clause,
    params: &GadgetParams,
) -> Result<Vec<Gadget>, CompileError> {
    let ci = index as u32;
    let vars: Vec<u32> = clause.literals().iter().map(|l| l.var()).collect();
    let gauges: Vec<i8> = clause.literals().iter().map(|l| l.gauge()).collect();
    let p = params.scaled_to_penalty(clause.weight());
    let wrap = |source| CompileError::Gadget { index, source };
    let gadgets = match clause.kind() {
        ClauseKind::Or => vec![build_or_gadget(ci, &vars, &gauges, &p).map_err(wrap)?],
        // A 1-literal AND is the same constraint as a 1-literal OR.
        ClauseKind::And if vars.len() == 1 => {
            vec![build_or_gadget(ci, &vars, &gauges, &p).map_err(wrap)?]
        }
        ClauseKind::And => vec![build_and_gadget(ci, &vars, &gauges, &p).map_err(wrap)?],
        ClauseKind::Xor => match vars.len() {
            1 | 2 => vec![build_parity_native(ci, &vars, &gauges, &p).map_err(wrap)?],
            3 => vec![build_parity3_gadget(ci, &vars, &gauges, &p).map_err(wrap)?],
            _ => vec![build_parity_gadget(ci, &vars, &gauges, Parity::Odd, &p).map_err(wrap)?],
        },
        ClauseKind::Symmetric { penalized } => {
            vec![build_symmetric_gadget(ci, &vars, &gauges, penalized, &p).map_err(wrap)?]
        }
        ClauseKind::Table { violating } => {
            build_table_gadget(ci, &vars, &gauges, violating, &p).map_err(wrap)?
        }
    };
    Ok(gadgets)
}

/// Compiles a problem to a single two-body model by superimposing one
/// validated gadget (or table term list) per clause on the shared logical
/// vertices. Gadgets within the verification cap are brute-force checked;
/// wider ones are constructed by the closed forms and flagged unverified.
pub fn compile_problem(
    problem: &Problem,
    params: &GadgetParams,
) -> Result<CompiledProblem, CompileError> {
    params.validate().map_err(|source| CompileError::Gadget {
        index: 0,
        source,
    })?;
    let built: Vec<Result<(Vec<Gadget>, Vec<GadgetReport>), CompileError>> =
        crate::par::map_indices(problem.clauses().len(), true, |i| {
            let clause = &problem.clauses()[i];
            let p = params.scaled_to_penalty(clause.weight());
            let gadgets = build_clause_gadgets(i, clause, params)?;
            let mut reports = Vec::with_capacity(gadgets.len());
            for gadget in &gadgets {
                if gadget.total_spins() as u32 <= params.spin_cap {
                    reports.push(
                        validate_gadget(gadget, &p)
                            .map_err(|source| CompileError::Gadget { index: i, source })?,
                    );
                } else {
                    reports.push(unverified_report(gadget, &p));
                }
            }
            Ok((gadgets, reports))
        });

    let mut models = Vec::new();
    let mut clause_ancillas = Vec::new();
    let mut clause_gauges = Vec::new();
    let mut reports = Vec::new();
    for item in built {
        let (gadgets, clause_reports) = item?;
        let mut ancillas = Vec::new();
        let mut gauges = Vec::new();
        for gadget in gadgets {
            ancillas.extend(gadget.ancillas.iter().copied());
            gauges.extend(gadget.gauges.iter().copied());
            models.push(gadget.model);
        }
        clause_ancillas.push(ancillas);
        clause_gauges.push(gauges);
        reports.push(clause_reports);
    }

    let mut model = IsingModel::superimpose(models.iter())?;
    for v in 1..=problem.num_vars() {
        model.add_vertex(Vertex::Logical(v));
    }
    Ok(CompiledProblem {
        model,
        num_vars: problem.num_vars(),
        clause_ancillas,
        clause_gauges,
        reports,
        params: params.clone(),
        energy_offset: 0.0,
    })
}
