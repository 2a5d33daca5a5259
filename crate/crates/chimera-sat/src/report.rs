//! Structured text documents exchanged between pipeline stages: the
//! embedding metadata that makes decoding reproducible from files alone,
//! verification reports, solve reports, turbo trial logs and scaling
//! tables. Every writer here has a parser, and writers are deterministic,
//! so identical runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::chimera::{LayoutKind, PhysicalModel, QubitBudget};
use crate::gadgets::{CompiledProblem, GadgetParams, GadgetReport, Margin};
use crate::ising::{Spin, Vertex};
use crate::solver::{DecodeOutcome, SolveResult};
use crate::turbo::TrialRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocError {
    #[error("line {line}: {msg}")]
    Bad { line: usize, msg: String },
    #[error("missing or wrong document header, expected {0:?}")]
    Header(&'static str),
}

fn bad(line: usize, msg: impl Into<String>) -> DocError {
    DocError::Bad {
        line,
        msg: msg.into(),
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t.split_whitespace().collect()));
        }
        None
    }
}

fn parse_f64(line: usize, tok: &str) -> Result<f64, DocError> {
    tok.parse().map_err(|_| bad(line, format!("bad number {tok:?}")))
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, DocError> {
    tok.parse().map_err(|_| bad(line, format!("bad integer {tok:?}")))
}

fn parse_vertex(line: usize, tok: &str) -> Result<Vertex, DocError> {
    tok.parse().map_err(|e| bad(line, e))
}

pub fn spins_from_string(s: &str) -> Result<Vec<Spin>, String> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(format!("bad spin character {other:?}")),
        })
        .collect()
}

// --- embedding metadata ------------------------------------------------

/// Everything needed to reconstruct the decode step from files: the
/// abstract vertex numbering of the ising text file, per-clause gauges and
/// ancillae, and each chain with its identification strength.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub graph: (u32, u32),
    pub layout: LayoutKind,
    pub params: GadgetParams,
    pub energy_offset: f64,
    pub realize_constant: f64,
    pub num_vars: u32,
    /// Abstract ising-file index -> tagged vertex.
    pub vertex_ids: BTreeMap<u64, Vertex>,
    /// Wired gauges per clause, in clause order.
    pub gauges: Vec<Vec<i8>>,
    /// Ancilla vertices per clause as abstract indices.
    pub clause_ancillas: Vec<Vec<u64>>,
    /// Abstract index -> (chain strength, physical qubits).
    pub chains: BTreeMap<u64, (f64, Vec<u32>)>,
}

const META_HEADER: &str = "chimera-sat-meta 1";

impl Metadata {
    pub fn collect(compiled: &CompiledProblem, physical: &PhysicalModel) -> Metadata {
        let numbering = compiled.model.numbering();
        let id_of = |v: &Vertex| numbering[v];
        let vertex_ids = numbering.iter().map(|(v, &i)| (i, *v)).collect();
        let chains = physical
            .embedding
            .chains()
            .map(|(v, qubits)| {
                (
                    id_of(v),
                    (physical.chain_strengths[v], qubits.clone()),
                )
            })
            .collect();
        Metadata {
            graph: (physical.graph.rows(), physical.graph.cols()),
            layout: physical.embedding.kind(),
            params: compiled.params.clone(),
            energy_offset: compiled.energy_offset,
            realize_constant: physical.constant,
            num_vars: compiled.num_vars,
            vertex_ids,
            gauges: compiled.clause_gauges.clone(),
            clause_ancillas: compiled
                .clause_ancillas
                .iter()
                .map(|anc| anc.iter().map(|v| id_of(v)).collect())
                .collect(),
            chains,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{META_HEADER}").unwrap();
        writeln!(out, "graph {} {}", self.graph.0, self.graph.1).unwrap();
        writeln!(out, "layout {}", self.layout.name()).unwrap();
        let p = &self.params;
        writeln!(
            out,
            "params ja {} g {} q0 {} jinf-factor {} ratio-min {} gap-fraction {} spin-cap {}",
            fmt_num(p.ja),
            fmt_num(p.g),
            fmt_num(p.q0),
            fmt_num(p.jinf_factor),
            fmt_num(p.ratio_min),
            fmt_num(p.gap_fraction),
            p.spin_cap
        )
        .unwrap();
        writeln!(out, "energy-offset {}", fmt_num(self.energy_offset)).unwrap();
        writeln!(out, "realize-constant {}", fmt_num(self.realize_constant)).unwrap();
        writeln!(out, "nvars {}", self.num_vars).unwrap();
        for (i, v) in &self.vertex_ids {
            match v {
                Vertex::Logical(x) => writeln!(out, "avertex {i} L {x}").unwrap(),
                Vertex::Ancilla { clause, index } => {
                    writeln!(out, "avertex {i} A {clause} {index}").unwrap()
                }
                Vertex::Physical(q) => writeln!(out, "avertex {i} P {q}").unwrap(),
            }
        }
        for (c, gauges) in self.gauges.iter().enumerate() {
            let list = gauges
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "gauge {c} : {list}").unwrap();
        }
        for (c, anc) in self.clause_ancillas.iter().enumerate() {
            let list = anc.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
            writeln!(out, "clause {c} anc : {list}").unwrap();
        }
        for (i, (strength, qubits)) in &self.chains {
            let list = qubits.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
            writeln!(out, "chain {i} strength {} : {list}", fmt_num(*strength)).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Metadata, DocError> {
        let mut lines = Lines::new(text);
        match lines.next_tokens() {
            Some((_, toks)) if toks.join(" ") == META_HEADER => {}
            _ => return Err(DocError::Header(META_HEADER)),
        }
        let mut meta = Metadata {
            graph: (0, 0),
            layout: LayoutKind::Linear,
            params: GadgetParams::default(),
            energy_offset: 0.0,
            realize_constant: 0.0,
            num_vars: 0,
            vertex_ids: BTreeMap::new(),
            gauges: Vec::new(),
            clause_ancillas: Vec::new(),
            chains: BTreeMap::new(),
        };
        while let Some((ln, toks)) = lines.next_tokens() {
            match toks.as_slice() {
                ["graph", r, c] => meta.graph = (parse_int(ln, r)?, parse_int(ln, c)?),
                ["layout", "linear"] => meta.layout = LayoutKind::Linear,
                ["layout", "serpentine"] => meta.layout = LayoutKind::Serpentine,
                ["params", "ja", ja, "g", g, "q0", q0, "jinf-factor", jf, "ratio-min", rm, "gap-fraction", gf, "spin-cap", sc] =>
                {
                    meta.params = GadgetParams {
                        ja: parse_f64(ln, ja)?,
                        g: parse_f64(ln, g)?,
                        q0: parse_f64(ln, q0)?,
                        jinf_factor: parse_f64(ln, jf)?,
                        ratio_min: parse_f64(ln, rm)?,
                        gap_fraction: parse_f64(ln, gf)?,
                        spin_cap: parse_int(ln, sc)?,
                    };
                }
                ["energy-offset", v] => meta.energy_offset = parse_f64(ln, v)?,
                ["realize-constant", v] => meta.realize_constant = parse_f64(ln, v)?,
                ["nvars", n] => meta.num_vars = parse_int(ln, n)?,
                ["avertex", i, "L", x] => {
                    meta.vertex_ids
                        .insert(parse_int(ln, i)?, Vertex::Logical(parse_int(ln, x)?));
                }
                ["avertex", i, "A", c, s] => {
                    meta.vertex_ids.insert(
                        parse_int(ln, i)?,
                        Vertex::Ancilla {
                            clause: parse_int(ln, c)?,
                            index: parse_int(ln, s)?,
                        },
                    );
                }
                ["avertex", i, "P", q] => {
                    meta.vertex_ids
                        .insert(parse_int(ln, i)?, Vertex::Physical(parse_int(ln, q)?));
                }
                ["gauge", c, ":", rest @ ..] => {
                    let c: usize = parse_int(ln, c)?;
                    if c != meta.gauges.len() {
                        return Err(bad(ln, "gauge lines out of order"));
                    }
                    let gauges = rest
                        .iter()
                        .map(|t| parse_int::<i8>(ln, t))
                        .collect::<Result<_, _>>()?;
                    meta.gauges.push(gauges);
                }
                ["clause", c, "anc", ":", rest @ ..] => {
                    let c: usize = parse_int(ln, c)?;
                    if c != meta.clause_ancillas.len() {
                        return Err(bad(ln, "clause lines out of order"));
                    }
                    let anc = rest
                        .iter()
                        .map(|t| parse_int::<u64>(ln, t))
                        .collect::<Result<_, _>>()?;
                    meta.clause_ancillas.push(anc);
                }
                ["chain", i, "strength", s, ":", rest @ ..] => {
                    let qubits = rest
                        .iter()
                        .map(|t| parse_int::<u32>(ln, t))
                        .collect::<Result<_, _>>()?;
                    meta.chains
                        .insert(parse_int(ln, i)?, (parse_f64(ln, s)?, qubits));
                }
                _ => return Err(bad(ln, format!("unrecognized line {:?}", toks.join(" ")))),
            }
        }
        Ok(meta)
    }
}

// --- verification report -------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub gadgets: Vec<GadgetReport>,
    /// Whole-model spectrum check against the problem energies, when the
    /// instance fits the enumeration cap.
    pub superposition: Option<(bool, f64)>,
    pub pass: bool,
}

const VERIFY_HEADER: &str = "chimera-sat-verify 1";

impl VerifyReport {
    pub fn new(gadgets: Vec<GadgetReport>, superposition: Option<(bool, f64)>) -> VerifyReport {
        let pass = gadgets.iter().all(|g| g.exact)
            && superposition.map_or(true, |(ok, _)| ok);
        VerifyReport {
            gadgets,
            superposition,
            pass,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{VERIFY_HEADER}").unwrap();
        for g in &self.gadgets {
            writeln!(
                out,
                "gadget {} kind {} logicals {} ancillas {} exact {} dev {} level {} gap {} verified {}",
                g.clause_index,
                g.kind.name(),
                g.logical_count,
                g.ancilla_count,
                u8::from(g.exact),
                fmt_num(g.max_deviation),
                fmt_num(g.satisfied_level),
                g.ancilla_gap.map_or("-".into(), fmt_num),
                u8::from(g.verified),
            )
            .unwrap();
            for m in &g.margins {
                writeln!(
                    out,
                    "margin {} {} value {} bound {} ok {}",
                    g.clause_index,
                    m.name,
                    fmt_num(m.value),
                    fmt_num(m.bound),
                    u8::from(m.ok)
                )
                .unwrap();
            }
        }
        if let Some((ok, dev)) = self.superposition {
            writeln!(out, "superposition ok {} maxdev {}", u8::from(ok), fmt_num(dev)).unwrap();
        }
        writeln!(out, "result {}", if self.pass { "pass" } else { "fail" }).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<VerifyReport, DocError> {
        use crate::gadgets::GadgetKind;
        let mut lines = Lines::new(text);
        match lines.next_tokens() {
            Some((_, toks)) if toks.join(" ") == VERIFY_HEADER => {}
            _ => return Err(DocError::Header(VERIFY_HEADER)),
        }
        let mut gadgets: Vec<GadgetReport> = Vec::new();
        let mut superposition = None;
        let mut pass = false;
        while let Some((ln, toks)) = lines.next_tokens() {
            match toks.as_slice() {
                ["gadget", c, "kind", kind, "logicals", lc, "ancillas", ac, "exact", ex, "dev", dev, "level", level, "gap", gap, "verified", ver] =>
                {
                    let kind = match *kind {
                        "or" => GadgetKind::Or,
                        "parity" => GadgetKind::Parity,
                        "parity-native" => GadgetKind::ParityNative,
                        "parity3" => GadgetKind::Parity3,
                        "symmetric" => GadgetKind::Symmetric,
                        "and" => GadgetKind::AndSingleAncilla,
                        "and-fallback" => GadgetKind::AndSymmetricFallback,
                        "table-term" => GadgetKind::TableTerm,
                        other => return Err(bad(ln, format!("unknown gadget kind {other:?}"))),
                    };
                    gadgets.push(GadgetReport {
                        clause_index: parse_int(ln, c)?,
                        kind,
                        logical_count: parse_int(ln, lc)?,
                        ancilla_count: parse_int(ln, ac)?,
                        exact: *ex == "1",
                        max_deviation: parse_f64(ln, dev)?,
                        satisfied_level: parse_f64(ln, level)?,
                        ancilla_gap: if *gap == "-" {
                            None
                        } else {
                            Some(parse_f64(ln, gap)?)
                        },
                        margins: Vec::new(),
                        verified: *ver == "1",
                    });
                }
                ["margin", c, name, "value", v, "bound", b, "ok", ok] => {
                    let c: u32 = parse_int(ln, c)?;
                    let gadget = gadgets
                        .iter_mut()
                        .rev()
                        .find(|g| g.clause_index == c)
                        .ok_or_else(|| bad(ln, "margin before its gadget"))?;
                    gadget.margins.push(Margin {
                        name: name.to_string(),
                        value: parse_f64(ln, v)?,
                        bound: parse_f64(ln, b)?,
                        ok: *ok == "1",
                    });
                }
                ["superposition", "ok", ok, "maxdev", dev] => {
                    superposition = Some((*ok == "1", parse_f64(ln, dev)?));
                }
                ["result", r] => pass = *r == "pass",
                _ => return Err(bad(ln, format!("unrecognized line {:?}", toks.join(" ")))),
            }
        }
        Ok(VerifyReport {
            gadgets,
            superposition,
            pass,
        })
    }
}

// --- solve report ----------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: String,
    pub energy: f64,
    pub vertices: Vec<Vertex>,
    pub assignments: Vec<Vec<Spin>>,
    pub restarts: Vec<(u32, f64)>,
    /// (total chains, broken chains) for physical solves.
    pub chains: Option<(usize, Vec<Vertex>)>,
}

const SOLVE_HEADER: &str = "chimera-sat-solve 1";

impl SolveReport {
    pub fn new(result: &SolveResult, decoded: Option<(&DecodeOutcome, usize)>) -> SolveReport {
        SolveReport {
            method: result.method.name().to_string(),
            energy: result.best_energy,
            vertices: result.vertex_order.clone(),
            assignments: result.assignments.clone(),
            restarts: result.restarts.iter().map(|r| (r.restart, r.energy)).collect(),
            chains: decoded.map(|(d, total)| (total, d.broken.clone())),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{SOLVE_HEADER}").unwrap();
        writeln!(out, "method {}", self.method).unwrap();
        writeln!(out, "energy {}", fmt_num(self.energy)).unwrap();
        let verts = self
            .vertices
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "vertices {verts}").unwrap();
        for a in &self.assignments {
            writeln!(out, "assignment {}", crate::turbo::spins_to_string(a)).unwrap();
        }
        for (i, e) in &self.restarts {
            writeln!(out, "restart {i} {}", fmt_num(*e)).unwrap();
        }
        if let Some((total, broken)) = &self.chains {
            writeln!(out, "chains {} broken {}", total, broken.len()).unwrap();
            for v in broken {
                writeln!(out, "broken-chain {v}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SolveReport, DocError> {
        let mut lines = Lines::new(text);
        match lines.next_tokens() {
            Some((_, toks)) if toks.join(" ") == SOLVE_HEADER => {}
            _ => return Err(DocError::Header(SOLVE_HEADER)),
        }
        let mut report = SolveReport {
            method: String::new(),
            energy: 0.0,
            vertices: Vec::new(),
            assignments: Vec::new(),
            restarts: Vec::new(),
            chains: None,
        };
        while let Some((ln, toks)) = lines.next_tokens() {
            match toks.as_slice() {
                ["method", m] => report.method = m.to_string(),
                ["energy", e] => report.energy = parse_f64(ln, e)?,
                ["vertices", rest @ ..] => {
                    report.vertices = rest
                        .iter()
                        .map(|t| parse_vertex(ln, t))
                        .collect::<Result<_, _>>()?;
                }
                ["assignment", s] => {
                    report
                        .assignments
                        .push(spins_from_string(s).map_err(|e| bad(ln, e))?);
                }
                ["restart", i, e] => report
                    .restarts
                    .push((parse_int(ln, i)?, parse_f64(ln, e)?)),
                ["chains", total, "broken", _n] => {
                    report.chains = Some((parse_int(ln, total)?, Vec::new()));
                }
                ["broken-chain", v] => {
                    let v = parse_vertex(ln, v)?;
                    report
                        .chains
                        .as_mut()
                        .ok_or_else(|| bad(ln, "broken-chain before chains"))?
                        .1
                        .push(v);
                }
                _ => return Err(bad(ln, format!("unrecognized line {:?}", toks.join(" ")))),
            }
        }
        Ok(report)
    }
}

// --- turbo trial log ---------------------------------------------------

const TRIALS_HEADER: &str = "chimera-sat-trials 1";

pub fn trials_to_text(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    writeln!(out, "{TRIALS_HEADER}").unwrap();
    for r in records {
        writeln!(out, "{}", r.to_line()).unwrap();
    }
    out
}

pub fn trials_from_text(text: &str) -> Result<Vec<TrialRecord>, DocError> {
    let mut lines = Lines::new(text);
    match lines.next_tokens() {
        Some((_, toks)) if toks.join(" ") == TRIALS_HEADER => {}
        _ => return Err(DocError::Header(TRIALS_HEADER)),
    }
    let mut out = Vec::new();
    while let Some((ln, toks)) = lines.next_tokens() {
        match toks.as_slice() {
            ["trial", t, "msg", msg, "recv", recv, "decoded", dec, "oracle", oracle, "bits", bits, "chainbreaks", cb, "agree", agree] =>
            {
                let parse_spins =
                    |s: &str| spins_from_string(s).map_err(|e| bad(ln, e));
                out.push(TrialRecord {
                    trial: parse_int(ln, t)?,
                    message: parse_spins(msg)?,
                    received: parse_spins(recv)?,
                    decoded: parse_spins(dec)?,
                    oracle: if *oracle == "-" {
                        None
                    } else {
                        Some(parse_spins(oracle)?)
                    },
                    agree: match *agree {
                        "-" => None,
                        "1" => Some(true),
                        "0" => Some(false),
                        other => return Err(bad(ln, format!("bad agree flag {other:?}"))),
                    },
                    bit_errors: parse_int(ln, bits)?,
                    chain_breaks: parse_int(ln, cb)?,
                });
            }
            _ => return Err(bad(ln, format!("unrecognized line {:?}", toks.join(" ")))),
        }
    }
    Ok(out)
}

// --- scaling table -------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub size: u32,
    pub budget: QubitBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsTable {
    pub family: String,
    pub ratio: f64,
    pub width: usize,
    pub rows: Vec<StatsRow>,
    pub fitted_exponent: f64,
}

const STATS_HEADER: &str = "chimera-sat-stats 1";

impl StatsTable {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{STATS_HEADER}").unwrap();
        writeln!(
            out,
            "family {} ratio {} width {}",
            self.family,
            fmt_num(self.ratio),
            self.width
        )
        .unwrap();
        for r in &self.rows {
            let b = &r.budget;
            writeln!(
                out,
                "row {} logical {} ancillae {} qubits {} cells {} pred-chain {} pred-fixed {} pred-tab {} pred-dense {}",
                r.size,
                b.logical,
                b.ancillae,
                b.physical,
                b.cells_used,
                fmt_num(b.pred_chain_dominated),
                fmt_num(b.pred_fixed_ratio),
                fmt_num(b.pred_tabulated),
                fmt_num(b.pred_dense_worst),
            )
            .unwrap();
        }
        writeln!(out, "fitted-exponent {}", fmt_num(self.fitted_exponent)).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<StatsTable, DocError> {
        let mut lines = Lines::new(text);
        match lines.next_tokens() {
            Some((_, toks)) if toks.join(" ") == STATS_HEADER => {}
            _ => return Err(DocError::Header(STATS_HEADER)),
        }
        let mut table = StatsTable {
            family: String::new(),
            ratio: 0.0,
            width: 0,
            rows: Vec::new(),
            fitted_exponent: 0.0,
        };
        while let Some((ln, toks)) = lines.next_tokens() {
            match toks.as_slice() {
                ["family", f, "ratio", r, "width", w] => {
                    table.family = f.to_string();
                    table.ratio = parse_f64(ln, r)?;
                    table.width = parse_int(ln, w)?;
                }
                ["row", size, "logical", lg, "ancillae", anc, "qubits", q, "cells", cells, "pred-chain", pc, "pred-fixed", pf, "pred-tab", pt, "pred-dense", pd] =>
                {
                    table.rows.push(StatsRow {
                        size: parse_int(ln, size)?,
                        budget: QubitBudget {
                            logical: parse_int(ln, lg)?,
                            ancillae: parse_int(ln, anc)?,
                            physical: parse_int(ln, q)?,
                            cells_used: parse_int(ln, cells)?,
                            pred_chain_dominated: parse_f64(ln, pc)?,
                            pred_fixed_ratio: parse_f64(ln, pf)?,
                            pred_tabulated: parse_f64(ln, pt)?,
                            pred_dense_worst: parse_f64(ln, pd)?,
                        },
                    });
                }
                ["fitted-exponent", e] => table.fitted_exponent = parse_f64(ln, e)?,
                _ => return Err(bad(ln, format!("unrecognized line {:?}", toks.join(" ")))),
            }
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::{layout_embedding, realize, ChimeraGraph};
    use crate::gadgets::{compile_problem, validate_gadget};
    use crate::solver::solve_exact;

    fn pipeline() -> (CompiledProblem, PhysicalModel) {
        let p = crate::problem::parse_wcnf("p wcnf 3 2 4\n1.5 1 2 0\nx 1 -2 3 0\n").unwrap();
        let compiled = compile_problem(&p, &GadgetParams::default()).unwrap();
        let g = ChimeraGraph::new(3, 3);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        let phys = realize(&compiled.model, &emb, &GadgetParams::default()).unwrap();
        (compiled, phys)
    }

    #[test]
    fn metadata_round_trip() {
        let (compiled, phys) = pipeline();
        let meta = Metadata::collect(&compiled, &phys);
        let parsed = Metadata::from_text(&meta.to_text()).unwrap();
        assert_eq!(meta, parsed);
        // The numbering covers every abstract vertex.
        assert_eq!(meta.vertex_ids.len(), compiled.model.vertex_count());
    }

    #[test]
    fn verify_report_round_trip() {
        let (compiled, _) = pipeline();
        let reports: Vec<_> = compiled.all_reports().cloned().collect();
        let report = VerifyReport::new(reports, Some((true, 3.2e-12)));
        assert!(report.pass);
        let parsed = VerifyReport::from_text(&report.to_text()).unwrap();
        assert_eq!(report, parsed);
    }

    #[test]
    fn verify_report_fails_on_broken_gadget() {
        let p = GadgetParams {
            g: 5.0,
            ..GadgetParams::default()
        };
        let g = crate::gadgets::build_or_gadget(0, &[1, 2, 3], &[1, 1, 1], &p).unwrap();
        let r = validate_gadget(&g, &p).unwrap();
        let report = VerifyReport::new(vec![r], None);
        assert!(!report.pass);
        assert!(report.to_text().contains("result fail"));
    }

    #[test]
    fn solve_report_round_trip() {
        let (compiled, phys) = pipeline();
        let result = solve_exact(&phys.model, 26).unwrap();
        let decoded = crate::solver::decode(&result.best_assignment(), &phys.embedding);
        let total = phys.embedding.chain_count();
        let report = SolveReport::new(&result, Some((&decoded, total)));
        let parsed = SolveReport::from_text(&report.to_text()).unwrap();
        assert_eq!(report, parsed);
        let _ = compiled;
    }

    #[test]
    fn trial_log_round_trip() {
        let cfg = crate::turbo::TrialConfig {
            k: 3,
            p: 0.1,
            trials: 4,
            seed: 9,
            target: crate::turbo::DecodeTarget::Abstract,
            decoder: crate::turbo::DecoderConfig::default(),
        };
        let records = crate::turbo::run_trials(&cfg).unwrap();
        let text = trials_to_text(&records);
        let parsed = trials_from_text(&text).unwrap();
        assert_eq!(records, parsed);
    }

    #[test]
    fn stats_table_round_trip() {
        let p = crate::generate::maxksat_instance(8, 3, 1.0, 3);
        let compiled = compile_problem(&p, &GadgetParams::default()).unwrap();
        let (rows, cols) = crate::chimera::required_dims(8, compiled.total_ancillas());
        let g = ChimeraGraph::new(rows, cols);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        let budget = crate::chimera::count_physical_qubits(&p, &compiled, &emb);
        let table = StatsTable {
            family: "maxsat".into(),
            ratio: 1.0,
            width: 3,
            rows: vec![StatsRow { size: 8, budget }],
            fitted_exponent: 2.0,
        };
        let parsed = StatsTable::from_text(&table.to_text()).unwrap();
        assert_eq!(table, parsed);
    }
}
