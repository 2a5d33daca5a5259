//! The Chimera hardware graph and minor embeddings into it.
//!
//! A Chimera graph is an M x N grid of K_{4,4} unit cells. Each cell has a
//! horizontal shore (shore 0, coupled to the left/right neighbor cells at
//! the same unit index) and a vertical shore (shore 1, coupled up/down),
//! and every horizontal qubit couples to every vertical qubit of its cell.
//!
//! Logical variables are embedded as chains: an L-shaped run through a
//! complete-graph block at the bottom of the region realizes all
//! variable-variable couplings, and vertical extensions of those chains
//! cross horizontal ancilla chains in the rows above, four ancillae per
//! row. When a problem outgrows the strip above the block, the serpentine
//! layout turns the chains around the edge of the region with
//! complete-graph corner blocks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::gadgets::{CompiledProblem, GadgetParams};
use crate::ising::{IsingModel, ModelError, Vertex};
use crate::problem::Problem;

pub const CELL: u32 = 4;

/// Coordinates of one qubit: cell row/column, shore (0 horizontal,
/// 1 vertical) and unit index within the shore.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coords {
    pub row: u32,
    pub col: u32,
    pub shore: u32,
    pub unit: u32,
}

/// An M x N Chimera graph with linear qubit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChimeraGraph {
    rows: u32,
    cols: u32,
}

impl ChimeraGraph {
    pub fn new(rows: u32, cols: u32) -> ChimeraGraph {
        assert!(rows >= 1 && cols >= 1);
        ChimeraGraph { rows, cols }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn vertex_count(&self) -> u32 {
        2 * CELL * self.rows * self.cols
    }

    pub fn index(&self, row: u32, col: u32, shore: u32, unit: u32) -> u32 {
        debug_assert!(row < self.rows && col < self.cols && shore < 2 && unit < CELL);
        ((row * self.cols + col) * 2 + shore) * CELL + unit
    }

    pub fn coords(&self, index: u32) -> Coords {
        let unit = index % CELL;
        let shore = (index / CELL) % 2;
        let cell = index / (2 * CELL);
        Coords {
            row: cell / self.cols,
            col: cell % self.cols,
            shore,
            unit,
        }
    }

    pub fn contains(&self, index: u32) -> bool {
        index < self.vertex_count()
    }

    pub fn is_adjacent(&self, a: u32, b: u32) -> bool {
        if a == b || !self.contains(a) || !self.contains(b) {
            return false;
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        if ca.row == cb.row && ca.col == cb.col {
            return ca.shore != cb.shore;
        }
        if ca.shore != cb.shore || ca.unit != cb.unit {
            return false;
        }
        match ca.shore {
            0 => ca.row == cb.row && ca.col.abs_diff(cb.col) == 1,
            _ => ca.col == cb.col && ca.row.abs_diff(cb.row) == 1,
        }
    }

    pub fn neighbors(&self, index: u32) -> Vec<u32> {
        let c = self.coords(index);
        let mut out = Vec::with_capacity(6);
        for unit in 0..CELL {
            out.push(self.index(c.row, c.col, 1 - c.shore, unit));
        }
        match c.shore {
            0 => {
                if c.col > 0 {
                    out.push(self.index(c.row, c.col - 1, 0, c.unit));
                }
                if c.col + 1 < self.cols {
                    out.push(self.index(c.row, c.col + 1, 0, c.unit));
                }
            }
            _ => {
                if c.row > 0 {
                    out.push(self.index(c.row - 1, c.col, 1, c.unit));
                }
                if c.row + 1 < self.rows {
                    out.push(self.index(c.row + 1, c.col, 1, c.unit));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All edges as ordered pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for row in 0..self.rows {
            for col in 0..self.cols {
                for uh in 0..CELL {
                    let h = self.index(row, col, 0, uh);
                    for uv in 0..CELL {
                        let v = self.index(row, col, 1, uv);
                        out.push((h.min(v), h.max(v)));
                    }
                }
                if col + 1 < self.cols {
                    for u in 0..CELL {
                        out.push((self.index(row, col, 0, u), self.index(row, col + 1, 0, u)));
                    }
                }
                if row + 1 < self.rows {
                    for u in 0..CELL {
                        out.push((self.index(row, col, 1, u), self.index(row + 1, col, 1, u)));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        let (m, n) = (self.rows as usize, self.cols as usize);
        16 * m * n + 4 * m * (n - 1) + 4 * n * (m - 1)
    }
}

/// Number of unit-cell block rows/columns for `n` chain variables.
fn block_size(n: u32) -> u32 {
    n.div_ceil(CELL).max(1)
}

/// Smallest linear-layout graph for `n` variables and `a` ancillae.
pub fn required_dims(n: u32, a: usize) -> (u32, u32) {
    let b = block_size(n.max(1));
    (b + (a as u32).div_ceil(CELL), b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Linear,
    Serpentine,
}

impl LayoutKind {
    pub fn name(&self) -> &'static str {
        match self {
            LayoutKind::Linear => "linear",
            LayoutKind::Serpentine => "serpentine",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("graph is {rows}x{cols} unit cells but the layout needs at least {need_rows}x{need_cols}")]
    GraphTooSmall {
        need_rows: u32,
        need_cols: u32,
        rows: u32,
        cols: u32,
    },
    #[error("layout capacity exceeded: {needed} ancillae, capacity {capacity}; a linear layout needs a {suggest_rows}x{suggest_cols} graph")]
    Capacity {
        needed: usize,
        capacity: usize,
        suggest_rows: u32,
        suggest_cols: u32,
    },
    #[error("no chain embeds abstract vertex {0}")]
    MissingChain(Vertex),
    #[error("no physical edge joins the chains of {0} and {1}")]
    MissingCouplingEdge(Vertex, Vertex),
    #[error("embedding audit failed: {0}")]
    Audit(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A minor embedding: one connected, vertex-disjoint chain of physical
/// qubits per abstract vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    graph: ChimeraGraph,
    kind: LayoutKind,
    num_vars: u32,
    chains: BTreeMap<Vertex, Vec<u32>>,
}

impl Embedding {
    pub fn graph(&self) -> &ChimeraGraph {
        &self.graph
    }

    pub fn kind(&self) -> LayoutKind {
        self.kind
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn chain(&self, v: &Vertex) -> Option<&[u32]> {
        self.chains.get(v).map(|c| c.as_slice())
    }

    pub fn chains(&self) -> impl Iterator<Item = (&Vertex, &Vec<u32>)> {
        self.chains.iter()
    }

    pub fn chain_count(&self) -> usize {
        self.chains.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.chains.values().map(|c| c.len()).sum()
    }

    pub fn cells_used(&self) -> usize {
        let mut cells = BTreeSet::new();
        for chain in self.chains.values() {
            for &q in chain {
                let c = self.graph.coords(q);
                cells.insert((c.row, c.col));
            }
        }
        cells.len()
    }
}

/// One gadget ancilla to be placed: its vertex and the variables its chain
/// must cross and couple to.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaRequest {
    pub ancilla: Vertex,
    pub vars: Vec<u32>,
}

/// Ancilla placements of a compiled problem, in clause order, with the
/// coupled variables read off the abstract model.
pub fn ancilla_requests(compiled: &CompiledProblem) -> Vec<AncillaRequest> {
    let mut out = Vec::new();
    for ancillas in &compiled.clause_ancillas {
        for &a in ancillas {
            let mut vars: Vec<u32> = compiled
                .model
                .couplings()
                .filter(|(&(u, v), &j)| j != 0.0 && (u == a || v == a))
                .filter_map(|(&(u, v), _)| {
                    let other = if u == a { v } else { u };
                    match other {
                        Vertex::Logical(x) => Some(x),
                        _ => None,
                    }
                })
                .collect();
            vars.sort_unstable();
            vars.dedup();
            out.push(AncillaRequest { ancilla: a, vars });
        }
    }
    out
}

struct Slot {
    segment: u8,
    lane: u32, // row offset (vertical strips) or column offset (horizontal)
    unit: u32,
}

/// Builds the full layout: complete block, corner blocks when the
/// serpentine overflows, variable chain extensions and ancilla chains.
fn build_layout(
    num_vars: u32,
    requests: &[AncillaRequest],
    graph: &ChimeraGraph,
    kind: LayoutKind,
) -> Result<Embedding, EmbedError> {
    let (m, n) = (graph.rows, graph.cols);
    let mut chains: BTreeMap<Vertex, Vec<u32>> = BTreeMap::new();
    if num_vars == 0 {
        if !requests.is_empty() {
            return Err(EmbedError::Audit(
                "ancilla requests without any variables".into(),
            ));
        }
        return Ok(Embedding {
            graph: *graph,
            kind,
            num_vars,
            chains,
        });
    }
    let b = block_size(num_vars);
    if m < b || n < b {
        return Err(EmbedError::GraphTooSmall {
            need_rows: b,
            need_cols: b,
            rows: m,
            cols: n,
        });
    }
    let block_top = m - b; // block occupies rows [block_top, m)

    let slot_of = |var: u32| -> (u32, u32) {
        let i = var - 1;
        (i / CELL, i % CELL) // (block index, unit)
    };

    // Segment capacities. Segment 1 is the vertical strip above the block;
    // 2 the horizontal strip right of the top-left corner block; 3 the
    // vertical strip under the top-right corner block.
    let total = requests.len();
    let linear_rows = block_top;
    let fits_linear = (total as u32).div_ceil(CELL) <= linear_rows;
    let (suggest_rows, suggest_cols) = required_dims(num_vars, total);
    let seg_caps: [usize; 3] = if fits_linear {
        [(linear_rows * CELL) as usize, 0, 0]
    } else {
        match kind {
            LayoutKind::Linear => {
                return Err(EmbedError::Capacity {
                    needed: total,
                    capacity: (linear_rows * CELL) as usize,
                    suggest_rows,
                    suggest_cols,
                });
            }
            LayoutKind::Serpentine => {
                if m < 2 * b || n < 2 * b {
                    return Err(EmbedError::GraphTooSmall {
                        need_rows: 2 * b,
                        need_cols: 2 * b,
                        rows: m,
                        cols: n,
                    });
                }
                let seg1 = ((m - 2 * b) * CELL) as usize;
                let seg2_full = ((n - b) * CELL) as usize;
                if total <= seg1 + seg2_full {
                    [seg1, seg2_full, 0]
                } else {
                    let seg2 = ((n - 2 * b) * CELL) as usize;
                    let seg3 = ((m - b) * CELL) as usize;
                    if total > seg1 + seg2 + seg3 {
                        return Err(EmbedError::Capacity {
                            needed: total,
                            capacity: seg1 + seg2 + seg3,
                            suggest_rows,
                            suggest_cols,
                        });
                    }
                    [seg1, seg2, seg3]
                }
            }
        }
    };

    // Assign ancillae to slots in request order, filling segment by segment.
    let mut slots = Vec::with_capacity(total);
    for (t, _) in requests.iter().enumerate() {
        let (segment, offset) = if t < seg_caps[0] {
            (1u8, t)
        } else if t < seg_caps[0] + seg_caps[1] {
            (2, t - seg_caps[0])
        } else {
            (3, t - seg_caps[0] - seg_caps[1])
        };
        slots.push(Slot {
            segment,
            lane: (offset as u32) / CELL,
            unit: (offset as u32) % CELL,
        });
    }
    let seg_used = |s: u8| slots.iter().filter(|x| x.segment == s).count();
    let use_corner1 = seg_used(2) > 0 || seg_used(3) > 0;
    let use_corner2 = seg_used(3) > 0;
    let seg1_last_row = slots
        .iter()
        .filter(|s| s.segment == 1)
        .map(|s| block_top - 1 - s.lane)
        .min();
    let seg2_last_col = slots
        .iter()
        .filter(|s| s.segment == 2)
        .map(|s| b + s.lane)
        .max();
    let seg3_last_row = slots
        .iter()
        .filter(|s| s.segment == 3)
        .map(|s| b + s.lane)
        .max();

    let involved: BTreeSet<u32> = requests.iter().flat_map(|r| r.vars.iter().copied()).collect();

    // Complete-graph block chains. Variable i bends at the diagonal cell of
    // its block: a vertical run from the block top down to the diagonal and
    // a horizontal run from the diagonal to the right edge of the block.
    for var in 1..=num_vars {
        let (vb, u) = slot_of(var);
        let mut chain = Vec::new();
        if num_vars == 1 {
            chain.push(graph.index(block_top, 0, 1, 0));
        } else {
            for r in block_top..=block_top + vb {
                chain.push(graph.index(r, vb, 1, u));
            }
            for c in vb..b {
                chain.push(graph.index(block_top + vb, c, 0, u));
            }
        }

        if involved.contains(&var) {
            // Vertical extension through the strip above the block.
            let ext_top = if use_corner1 {
                b
            } else {
                seg1_last_row.unwrap_or(block_top)
            };
            for r in (ext_top..block_top).rev() {
                chain.push(graph.index(r, vb, 1, u));
            }
            if use_corner1 {
                // Top-left corner block: full-height vertical run, then a
                // horizontal run bending at the diagonal toward the east.
                for r in (vb..b).rev() {
                    chain.push(graph.index(r, vb, 1, u));
                }
                for c in vb..b {
                    chain.push(graph.index(vb, c, 0, u));
                }
                let ext_right = if use_corner2 {
                    n - b
                } else {
                    seg2_last_col.map_or(b, |c| c + 1)
                };
                for c in b..ext_right {
                    chain.push(graph.index(vb, c, 0, u));
                }
            }
            if use_corner2 {
                // Top-right corner block: horizontal run to the diagonal,
                // then a vertical run exiting south.
                for c in (n - b)..=(n - b + vb) {
                    chain.push(graph.index(vb, c, 0, u));
                }
                for r in vb..b {
                    chain.push(graph.index(r, n - b + vb, 1, u));
                }
                let ext_bottom = seg3_last_row.map_or(b, |r| r + 1);
                for r in b..ext_bottom {
                    chain.push(graph.index(r, n - b + vb, 1, u));
                }
            }
        }
        chain.sort_unstable();
        chain.dedup();
        chains.insert(Vertex::Logical(var), chain);
    }

    // Ancilla chains cross the extended variable chains within their lane.
    for (req, slot) in requests.iter().zip(&slots) {
        if req.vars.is_empty() {
            return Err(EmbedError::Audit(format!(
                "ancilla {} couples to no variables",
                req.ancilla
            )));
        }
        let blocks: Vec<u32> = req.vars.iter().map(|&v| slot_of(v).0).collect();
        let (bmin, bmax) = (
            *blocks.iter().min().unwrap(),
            *blocks.iter().max().unwrap(),
        );
        let mut chain = Vec::new();
        match slot.segment {
            1 => {
                let row = block_top - 1 - slot.lane;
                for c in bmin..=bmax {
                    chain.push(graph.index(row, c, 0, slot.unit));
                }
            }
            2 => {
                let col = b + slot.lane;
                for r in bmin..=bmax {
                    chain.push(graph.index(r, col, 1, slot.unit));
                }
            }
            _ => {
                let row = b + slot.lane;
                for c in (n - b + bmin)..=(n - b + bmax) {
                    chain.push(graph.index(row, c, 0, slot.unit));
                }
            }
        }
        chains.insert(req.ancilla, chain);
    }

    Ok(Embedding {
        graph: *graph,
        kind,
        num_vars,
        chains,
    })
}

/// Minor embedding of the complete graph on `n` chain variables into the
/// bottom rows of `graph`, leaving the strip above free for ancilla rows.
pub fn embed_complete_graph(n: u32, graph: &ChimeraGraph) -> Result<Embedding, EmbedError> {
    build_layout(n, &[], graph, LayoutKind::Linear)
}

/// Extends the logical chains of a complete-graph embedding upward and
/// places the requested ancillae, four per unit-cell row.
pub fn extend_chains_with_ancilla_rows(
    embedding: Embedding,
    requests: &[AncillaRequest],
) -> Result<Embedding, EmbedError> {
    build_layout(embedding.num_vars, requests, &embedding.graph, embedding.kind)
}

/// Full layout for a compiled problem.
pub fn layout_embedding(
    compiled: &CompiledProblem,
    graph: &ChimeraGraph,
    kind: LayoutKind,
) -> Result<Embedding, EmbedError> {
    let requests = ancilla_requests(compiled);
    build_layout(compiled.num_vars, &requests, graph, kind)
}

/// Serpentine layout: identical to the linear layout while the problem
/// fits one strip, then snakes around the region edge through corner
/// blocks.
pub fn serpentine_layout(
    compiled: &CompiledProblem,
    graph: &ChimeraGraph,
) -> Result<Embedding, EmbedError> {
    layout_embedding(compiled, graph, LayoutKind::Serpentine)
}

/// Checks chain disjointness, chain connectivity and coupling coverage.
pub fn audit_embedding(embedding: &Embedding, model: &IsingModel) -> Result<(), EmbedError> {
    let graph = &embedding.graph;
    let mut owner: BTreeMap<u32, Vertex> = BTreeMap::new();
    for (v, chain) in embedding.chains() {
        if chain.is_empty() {
            return Err(EmbedError::Audit(format!("chain of {v} is empty")));
        }
        for &q in chain {
            if !graph.contains(q) {
                return Err(EmbedError::Audit(format!(
                    "chain of {v} uses qubit {q} outside the graph"
                )));
            }
            if let Some(prev) = owner.insert(q, *v) {
                return Err(EmbedError::Audit(format!(
                    "qubit {q} is claimed by both {prev} and {v}"
                )));
            }
        }
        // Connectivity by breadth-first search inside the chain.
        let set: BTreeSet<u32> = chain.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([chain[0]]);
        seen.insert(chain[0]);
        while let Some(q) = queue.pop_front() {
            for nb in graph.neighbors(q) {
                if set.contains(&nb) && seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
        if seen.len() != set.len() {
            return Err(EmbedError::Audit(format!("chain of {v} is disconnected")));
        }
    }
    for v in model.vertices() {
        if embedding.chain(v).is_none() {
            return Err(EmbedError::MissingChain(*v));
        }
    }
    for (&(u, v), &j) in model.couplings() {
        if j == 0.0 {
            continue;
        }
        let cu = embedding.chain(&u).ok_or(EmbedError::MissingChain(u))?;
        let cv = embedding.chain(&v).ok_or(EmbedError::MissingChain(v))?;
        let connected = cu
            .iter()
            .any(|&a| cv.iter().any(|&b| graph.is_adjacent(a, b)));
        if !connected {
            return Err(EmbedError::MissingCouplingEdge(u, v));
        }
    }
    Ok(())
}

/// A model mapped onto physical qubits together with its embedding.
#[derive(Debug, Clone)]
pub struct PhysicalModel {
    pub graph: ChimeraGraph,
    pub model: IsingModel,
    pub embedding: Embedding,
    /// Ferromagnetic identification strength per abstract vertex.
    pub chain_strengths: BTreeMap<Vertex, f64>,
    /// Physical energy of a chain-intact state minus the abstract energy.
    pub constant: f64,
}

/// Maps an abstract model onto its embedding.
///
/// Fields are split uniformly along chains, each abstract coupling rides
/// the lowest-index physical edge between the two chains, intra-chain
/// edges get `-|Jinf|` with `|Jinf| = jinf_factor * (|h| + sum |J|)` per
/// chain (floored at the penalty quantum so empty chains stay bound), and
/// the offset absorbs the intra-chain energy so that chain-intact states
/// reproduce abstract energies exactly.
pub fn realize(
    model: &IsingModel,
    embedding: &Embedding,
    params: &GadgetParams,
) -> Result<PhysicalModel, EmbedError> {
    audit_embedding(embedding, model)?;
    let graph = embedding.graph;
    let mut phys = IsingModel::new();
    let mut chain_strengths = BTreeMap::new();

    let mut incident: BTreeMap<Vertex, f64> = BTreeMap::new();
    for v in model.vertices() {
        incident.insert(*v, model.field(v).abs());
    }
    for (&(u, v), &j) in model.couplings() {
        *incident.get_mut(&u).unwrap() += j.abs();
        *incident.get_mut(&v).unwrap() += j.abs();
    }

    for v in model.vertices() {
        let chain = embedding.chain(v).unwrap();
        let share = model.field(v) / chain.len() as f64;
        if share != 0.0 || model.field(v) != 0.0 {
            for &q in chain {
                phys.add_field(Vertex::Physical(q), share);
            }
        } else {
            for &q in chain {
                phys.add_vertex(Vertex::Physical(q));
            }
        }
        let strength = params.jinf_factor * incident[v].max(params.g);
        chain_strengths.insert(*v, strength);
        let mut intra_edges = 0usize;
        for (i, &a) in chain.iter().enumerate() {
            for &bq in &chain[i + 1..] {
                if graph.is_adjacent(a, bq) {
                    phys.add_coupling(Vertex::Physical(a), Vertex::Physical(bq), -strength)
                        .unwrap();
                    intra_edges += 1;
                }
            }
        }
        phys.add_offset(strength * intra_edges as f64);
    }

    let mut owner: BTreeMap<u32, Vertex> = BTreeMap::new();
    for (v, chain) in embedding.chains() {
        for &q in chain {
            owner.insert(q, *v);
        }
    }

    for (&(u, v), &j) in model.couplings() {
        let cu = embedding.chain(&u).unwrap();
        let cv = embedding.chain(&v).unwrap();
        let mut edge = None;
        for &a in cu {
            for &bq in cv {
                if graph.is_adjacent(a, bq) {
                    let e = (a.min(bq), a.max(bq));
                    if edge.map_or(true, |prev| e < prev) {
                        edge = Some(e);
                    }
                }
            }
        }
        let (a, bq) = edge.ok_or(EmbedError::MissingCouplingEdge(u, v))?;
        phys.add_coupling(Vertex::Physical(a), Vertex::Physical(bq), j)
            .unwrap();
    }

    // Record unused ancilla-crossing couplers as explicit zeros: crossings
    // between an ancilla chain and a logical chain inside allocated rows
    // that carry no abstract coupling.
    for (v, chain) in embedding.chains() {
        if !matches!(v, Vertex::Ancilla { .. }) {
            continue;
        }
        for &q in chain {
            for nb in graph.neighbors(q) {
                if let Some(other) = owner.get(&nb) {
                    if matches!(other, Vertex::Logical(_)) && !model.has_coupling(v, other) {
                        phys.add_coupling(Vertex::Physical(q), Vertex::Physical(nb), 0.0)
                            .unwrap();
                    }
                }
            }
        }
    }

    phys.add_offset(model.offset());
    Ok(PhysicalModel {
        graph,
        model: phys,
        embedding: embedding.clone(),
        chain_strengths,
        constant: 0.0,
    })
}

/// Exact and predicted qubit budgets for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitBudget {
    pub logical: u32,
    pub ancillae: usize,
    pub physical: usize,
    pub cells_used: usize,
    /// Chain-dominated reference: `n * <k> * c`.
    pub pred_chain_dominated: f64,
    /// Fixed clause ratio reference: `n^2 * <k> * r`.
    pub pred_fixed_ratio: f64,
    /// Tabulated-clause reference: `n^2 * r * <2^k - 1>`.
    pub pred_tabulated: f64,
    /// Every-subset worst case reference: `n^(k_max + 1)`.
    pub pred_dense_worst: f64,
}

/// Exact qubit count of the produced embedding plus the asymptotic
/// reference curves evaluated for this instance.
pub fn count_physical_qubits(
    problem: &Problem,
    compiled: &CompiledProblem,
    embedding: &Embedding,
) -> QubitBudget {
    let n = problem.num_vars() as f64;
    let c = problem.clauses().len() as f64;
    let kmean = problem.mean_width();
    let r = if n > 0.0 { c / n } else { 0.0 };
    let mean_table: f64 = if problem.clauses().is_empty() {
        0.0
    } else {
        problem
            .clauses()
            .iter()
            .map(|cl| (1u64 << cl.width().min(62)) as f64 - 1.0)
            .sum::<f64>()
            / c
    };
    QubitBudget {
        logical: problem.num_vars(),
        ancillae: compiled.total_ancillas(),
        physical: embedding.total_qubits(),
        cells_used: embedding.cells_used(),
        pred_chain_dominated: n * kmean * c,
        pred_fixed_ratio: n * n * kmean * r,
        pred_tabulated: n * n * r * mean_table,
        pred_dense_worst: n.powi(problem.max_width() as i32 + 1),
    }
}

/// Least-squares slope of `ln(count)` against `ln(size)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::compile_problem;
    use crate::ising::SpinAssignment;

    fn params() -> GadgetParams {
        GadgetParams::default()
    }

    #[test]
    fn single_cell_counts() {
        let g = ChimeraGraph::new(1, 1);
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edges().len(), 16);
        assert_eq!(g.edge_count(), 16);
    }

    #[test]
    fn three_by_two_has_48_vertices() {
        let g = ChimeraGraph::new(3, 2);
        assert_eq!(g.vertex_count(), 48);
    }

    /// Edge count by independent pairwise adjacency enumeration.
    #[test]
    fn two_by_two_edge_count_against_adjacency_scan() {
        let g = ChimeraGraph::new(2, 2);
        let mut count = 0;
        for a in 0..g.vertex_count() {
            for b in (a + 1)..g.vertex_count() {
                if g.is_adjacent(a, b) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 80);
        assert_eq!(g.edges().len(), 80);
        assert_eq!(g.edge_count(), 80);
    }

    #[test]
    fn degree_bound_and_neighbor_symmetry() {
        let g = ChimeraGraph::new(3, 3);
        for v in 0..g.vertex_count() {
            let nb = g.neighbors(v);
            assert!(nb.len() <= 6);
            for u in nb {
                assert!(g.is_adjacent(u, v));
                assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn index_coords_round_trip() {
        let g = ChimeraGraph::new(4, 3);
        for v in 0..g.vertex_count() {
            let c = g.coords(v);
            assert_eq!(g.index(c.row, c.col, c.shore, c.unit), v);
        }
    }

    fn check_all_pairs_coupled(embedding: &Embedding, n: u32) {
        let g = embedding.graph();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let ci = embedding.chain(&Vertex::Logical(i)).unwrap();
                let cj = embedding.chain(&Vertex::Logical(j)).unwrap();
                let ok = ci.iter().any(|&a| cj.iter().any(|&b| g.is_adjacent(a, b)));
                assert!(ok, "chains {i} and {j} never touch");
            }
        }
    }

    #[test]
    fn complete_graph_four_in_one_cell() {
        let g = ChimeraGraph::new(1, 1);
        let emb = embed_complete_graph(4, &g).unwrap();
        for v in 1..=4 {
            assert_eq!(emb.chain(&Vertex::Logical(v)).unwrap().len(), 2);
        }
        check_all_pairs_coupled(&emb, 4);
    }

    #[test]
    fn complete_graph_twelve_uses_three_block_rows() {
        let g = ChimeraGraph::new(3, 3);
        let emb = embed_complete_graph(12, &g).unwrap();
        check_all_pairs_coupled(&emb, 12);
        let rows: BTreeSet<u32> = emb
            .chains()
            .flat_map(|(_, c)| c.iter().map(|&q| g.coords(q).row))
            .collect();
        assert_eq!(rows.len(), 3);
        // Chain length is block size + 1.
        for v in 1..=12 {
            assert_eq!(emb.chain(&Vertex::Logical(v)).unwrap().len(), 4);
        }
    }

    #[test]
    fn complete_graph_single_vertex() {
        let g = ChimeraGraph::new(1, 1);
        let emb = embed_complete_graph(1, &g).unwrap();
        assert_eq!(emb.chain(&Vertex::Logical(1)).unwrap().len(), 1);
    }

    #[test]
    fn complete_graph_too_small() {
        let g = ChimeraGraph::new(1, 1);
        assert!(matches!(
            embed_complete_graph(5, &g),
            Err(EmbedError::GraphTooSmall { .. })
        ));
    }

    fn requests_for(clause: u32, count: u32, vars: &[u32]) -> Vec<AncillaRequest> {
        (0..count)
            .map(|index| AncillaRequest {
                ancilla: Vertex::Ancilla { clause, index },
                vars: vars.to_vec(),
            })
            .collect()
    }

    #[test]
    fn extension_consumes_one_row_per_four_ancillae() {
        let g = ChimeraGraph::new(4, 3);
        let emb = embed_complete_graph(12, &g).unwrap();
        let reqs = requests_for(0, 4, &[1, 5, 9, 12]);
        let ext = extend_chains_with_ancilla_rows(emb, &reqs).unwrap();
        let rows: BTreeSet<u32> = ext
            .chains()
            .flat_map(|(_, c)| c.iter().map(|&q| g.coords(q).row))
            .collect();
        assert_eq!(rows.len(), 4, "3 block rows + 1 ancilla row");
        for req in &reqs {
            let ca = ext.chain(&req.ancilla).unwrap();
            for &v in &req.vars {
                let cv = ext.chain(&Vertex::Logical(v)).unwrap();
                assert!(
                    ca.iter().any(|&a| cv.iter().any(|&b| g.is_adjacent(a, b))),
                    "ancilla {} cannot couple variable {v}",
                    req.ancilla
                );
            }
        }
    }

    #[test]
    fn extension_without_ancillae_is_identity() {
        let g = ChimeraGraph::new(4, 3);
        let emb = embed_complete_graph(12, &g).unwrap();
        let same = extend_chains_with_ancilla_rows(emb.clone(), &[]).unwrap();
        assert_eq!(emb, same);
    }

    #[test]
    fn two_gadgets_take_two_rows() {
        let g = ChimeraGraph::new(5, 3);
        let emb = embed_complete_graph(12, &g).unwrap();
        let mut reqs = requests_for(0, 4, &[1, 2, 3, 4]);
        reqs.extend(requests_for(1, 4, &[5, 6, 7, 8]));
        let ext = extend_chains_with_ancilla_rows(emb, &reqs).unwrap();
        let anc_rows: BTreeSet<u32> = reqs
            .iter()
            .flat_map(|r| ext.chain(&r.ancilla).unwrap().iter().map(|&q| g.coords(q).row))
            .collect();
        assert_eq!(anc_rows.len(), 2);
        // Crossing pattern matches each gadget's bipartite structure.
        for req in &reqs {
            let ca = ext.chain(&req.ancilla).unwrap();
            for &v in &req.vars {
                let cv = ext.chain(&Vertex::Logical(v)).unwrap();
                assert!(ca.iter().any(|&a| cv.iter().any(|&b| g.is_adjacent(a, b))));
            }
        }
    }

    #[test]
    fn linear_layout_capacity_error_reports_required_size() {
        let g = ChimeraGraph::new(2, 1);
        let emb = embed_complete_graph(4, &g).unwrap();
        let reqs = requests_for(0, 8, &[1, 2, 3, 4]);
        match extend_chains_with_ancilla_rows(emb, &reqs) {
            Err(EmbedError::Capacity {
                suggest_rows: 3,
                suggest_cols: 1,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    fn compiled_instance(text: &str) -> CompiledProblem {
        let p = crate::problem::parse_wcnf(text).unwrap();
        compile_problem(&p, &params()).unwrap()
    }

    #[test]
    fn audit_passes_on_compiled_embedding() {
        let compiled = compiled_instance("p cnf 6 3\n1 2 3 0\n-2 4 5 0\nx 1 6 0\n");
        let g = ChimeraGraph::new(6, 6);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        audit_embedding(&emb, &compiled.model).unwrap();
    }

    #[test]
    fn serpentine_is_linear_when_it_fits() {
        let compiled = compiled_instance("p cnf 4 2\n1 2 3 0\n1 -4 0\n");
        let g = ChimeraGraph::new(4, 4);
        let lin = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        let ser = serpentine_layout(&compiled, &g).unwrap();
        assert_eq!(lin.chains().count(), ser.chains().count());
        for (v, chain) in lin.chains() {
            assert_eq!(ser.chain(v).unwrap(), chain.as_slice());
        }
    }

    #[test]
    fn serpentine_overflows_into_second_strip() {
        // 4 variables, six 4-wide OR clauses: 24 ancillae, too many for the
        // 12 slots a linear layout has above the block on a 4x4 graph.
        let mut text = String::from("p cnf 4 6\n");
        for _ in 0..6 {
            text.push_str("1 2 3 4 0\n");
        }
        let compiled = compiled_instance(&text);
        assert_eq!(compiled.total_ancillas(), 24);
        let g = ChimeraGraph::new(4, 4);
        assert!(matches!(
            layout_embedding(&compiled, &g, LayoutKind::Linear),
            Err(EmbedError::Capacity { .. })
        ));
        let ser = serpentine_layout(&compiled, &g).unwrap();
        audit_embedding(&ser, &compiled.model).unwrap();
        // Chain-intact lift still reproduces abstract energies through the
        // corners.
        let phys = realize(&compiled.model, &ser, &params()).unwrap();
        let verts: Vec<Vertex> = compiled.model.vertices().copied().collect();
        let mut rng = crate::generate::rng_from(5);
        for _ in 0..50 {
            use rand::Rng;
            let mask: u64 = rng.gen_range(0..1u64 << verts.len());
            let mut abstract_s = SpinAssignment::new();
            let mut phys_s = SpinAssignment::new();
            for (i, v) in verts.iter().enumerate() {
                let spin = if mask >> i & 1 == 1 { 1 } else { -1 };
                abstract_s.set(*v, spin);
                for &q in ser.chain(v).unwrap() {
                    phys_s.set(Vertex::Physical(q), spin);
                }
            }
            let ea = compiled.model.energy(&abstract_s).unwrap();
            let ep = phys.model.energy(&phys_s).unwrap();
            assert!((ea - ep).abs() < 1e-9, "mask {mask:b}");
        }
    }

    #[test]
    fn serpentine_capacity_error() {
        let mut text = String::from("p cnf 4 40\n");
        for _ in 0..40 {
            text.push_str("1 2 3 4 0\n");
        }
        let compiled = compiled_instance(&text);
        let g = ChimeraGraph::new(4, 4);
        match serpentine_layout(&compiled, &g) {
            Err(EmbedError::Capacity { needed: 160, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotone_capacity_under_graph_growth() {
        let compiled = compiled_instance("p cnf 5 3\n1 2 3 0\n-1 4 5 0\nx 2 3 4 0\n");
        let mut fits_before = false;
        for size in 3..7u32 {
            let g = ChimeraGraph::new(size, size);
            let fits = layout_embedding(&compiled, &g, LayoutKind::Linear).is_ok();
            assert!(!fits_before || fits, "shrank at {size}");
            fits_before = fits;
        }
        assert!(fits_before);
    }

    #[test]
    fn realize_single_vertex_model() {
        let mut m = IsingModel::new();
        m.add_field(Vertex::Logical(1), 0.5);
        let g = ChimeraGraph::new(1, 1);
        let emb = embed_complete_graph(1, &g).unwrap();
        let phys = realize(&m, &emb, &params()).unwrap();
        assert_eq!(phys.model.vertex_count(), 1);
        let q = emb.chain(&Vertex::Logical(1)).unwrap()[0];
        assert_eq!(phys.model.field(&Vertex::Physical(q)), 0.5);
        assert_eq!(phys.constant, 0.0);
    }

    #[test]
    fn realize_single_or_clause_uses_two_cells_with_four_identification_links() {
        let compiled = compiled_instance("p cnf 4 1\n1 2 3 4 0\n");
        let g = ChimeraGraph::new(2, 1);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        audit_embedding(&emb, &compiled.model).unwrap();
        assert_eq!(emb.cells_used(), 2);
        // The logical chains each cross the cell boundary once.
        let mut identification_links = 0;
        for v in 1..=4 {
            let chain = emb.chain(&Vertex::Logical(v)).unwrap();
            for (i, &a) in chain.iter().enumerate() {
                for &b in &chain[i + 1..] {
                    if g.is_adjacent(a, b) && g.coords(a).row != g.coords(b).row {
                        identification_links += 1;
                    }
                }
            }
        }
        assert_eq!(identification_links, 4);
        realize(&compiled.model, &emb, &params()).unwrap();
    }

    #[test]
    fn chain_intact_states_reproduce_abstract_energies() {
        let compiled = compiled_instance("p wcnf 4 3 6\n1.5 1 2 0\nx 2 1 3 4 0\na 1 2 4 0\n");
        let g = ChimeraGraph::new(6, 6);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        let phys = realize(&compiled.model, &emb, &params()).unwrap();
        let verts: Vec<Vertex> = compiled.model.vertices().copied().collect();
        assert!(verts.len() <= 14);
        for mask in 0..1u64 << verts.len() {
            let mut abstract_s = SpinAssignment::new();
            let mut phys_s = SpinAssignment::new();
            for (i, v) in verts.iter().enumerate() {
                let spin = if mask >> i & 1 == 1 { 1 } else { -1 };
                abstract_s.set(*v, spin);
                for &q in emb.chain(v).unwrap() {
                    phys_s.set(Vertex::Physical(q), spin);
                }
            }
            let ea = compiled.model.energy(&abstract_s).unwrap();
            let ep = phys.model.energy(&phys_s).unwrap();
            assert!(
                (ea + phys.constant - ep).abs() < 1e-9,
                "mask {mask:b}: abstract {ea} physical {ep}"
            );
        }
    }

    #[test]
    fn realize_records_unused_crossings_as_zero() {
        // The wide clause's ancilla chains span both block columns and
        // cross the narrow clause's extended chains without coupling them.
        let compiled = compiled_instance("p cnf 8 2\n1 8 0\n2 3 0\n");
        let g = ChimeraGraph::new(4, 2);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        let phys = realize(&compiled.model, &emb, &params()).unwrap();
        let zeros = phys
            .model
            .couplings()
            .filter(|(_, &j)| j == 0.0)
            .count();
        assert!(zeros > 0, "expected explicit zero crossings");
    }

    #[test]
    fn qubit_budget_counts_and_predictions() {
        let p = crate::problem::parse_wcnf("p cnf 4 1\n1 2 3 4 0\n").unwrap();
        let compiled = compile_problem(&p, &params()).unwrap();
        let g = ChimeraGraph::new(2, 1);
        let emb = layout_embedding(&compiled, &g, LayoutKind::Linear).unwrap();
        let budget = count_physical_qubits(&p, &compiled, &emb);
        assert_eq!(budget.logical, 4);
        assert_eq!(budget.ancillae, 4);
        assert_eq!(budget.physical, emb.total_qubits());
        assert!((budget.pred_chain_dominated - 16.0).abs() < 1e-12);
        assert!((budget.pred_dense_worst - 4.0f64.powi(5)).abs() < 1e-12);
    }

    #[test]
    fn loglog_slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [8.0, 12.0, 16.0, 20.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powi(2)))
            .collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-9);
    }
}
