//! Two-body Ising models on tagged vertex sets.
//!
//! Vertices carry their role: `Logical` spins represent problem variables,
//! `Ancilla` spins belong to exactly one clause gadget (which makes the
//! "ancillae are never shared" rule structural), and `Physical` spins are
//! Chimera qubits. Energies are
//!
//! ```text
//! E(s) = offset + sum_v h_v s_v + sum_{u<v} J_uv s_u s_v,   s_v in {-1, +1}
//! ```
//!
//! Absent `h`/`J` entries are zero. Explicitly stored zero couplings are
//! kept (the hardware realization records unused couplers as zeros).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub type Spin = i8;

/// A spin site, tagged by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    /// Problem variable, 1-based.
    Logical(u32),
    /// Gadget ancilla `index` of clause `clause` (both 0-based).
    Ancilla { clause: u32, index: u32 },
    /// Chimera qubit, linear index.
    Physical(u32),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Logical(v) => write!(f, "L{v}"),
            Vertex::Ancilla { clause, index } => write!(f, "A{clause}.{index}"),
            Vertex::Physical(q) => write!(f, "P{q}"),
        }
    }
}

impl std::str::FromStr for Vertex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("bad vertex {s:?}");
        let (tag, rest) = s.split_at(s.len().min(1));
        match tag {
            "L" => rest.parse().map(Vertex::Logical).map_err(|_| err()),
            "P" => rest.parse().map(Vertex::Physical).map_err(|_| err()),
            "A" => {
                let (c, i) = rest.split_once('.').ok_or_else(err)?;
                Ok(Vertex::Ancilla {
                    clause: c.parse().map_err(|_| err())?,
                    index: i.parse().map_err(|_| err())?,
                })
            }
            _ => Err(err()),
        }
    }
}

/// Total assignment of spins to vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpinAssignment {
    values: BTreeMap<Vertex, Spin>,
}

impl SpinAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: Vertex, s: Spin) {
        debug_assert!(s == 1 || s == -1);
        self.values.insert(v, s);
    }

    pub fn get(&self, v: &Vertex) -> Option<Spin> {
        self.values.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, &Spin)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flips the listed vertices (used by gauge identities).
    pub fn flipped(&self, flips: &BTreeSet<Vertex>) -> SpinAssignment {
        let values = self
            .values
            .iter()
            .map(|(v, &s)| (*v, if flips.contains(v) { -s } else { s }))
            .collect();
        SpinAssignment { values }
    }
}

impl FromIterator<(Vertex, Spin)> for SpinAssignment {
    fn from_iter<T: IntoIterator<Item = (Vertex, Spin)>>(iter: T) -> Self {
        SpinAssignment {
            values: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("self-coupling on vertex {0}")]
    SelfCoupling(Vertex),
    #[error("assignment is missing a value for vertex {0}")]
    MissingSpin(Vertex),
    #[error("vertex {0} is not part of the model")]
    UnknownVertex(Vertex),
    #[error("duplicate logical vertex {0} in spectrum request")]
    DuplicateLogical(Vertex),
    #[error("ancilla {0} appears in more than one superimposed model")]
    AncillaCollision(Vertex),
    #[error("spectrum enumeration width {width} exceeds cap {cap}")]
    CapExceeded { width: u32, cap: u32 },
}

/// Default cap on the exhaustive enumeration width (logical bits plus the
/// largest block of mutually coupled non-logical spins).
pub const DEFAULT_SPIN_CAP: u32 = 26;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IsingModel {
    vertices: BTreeSet<Vertex>,
    h: BTreeMap<Vertex, f64>,
    couplings: BTreeMap<(Vertex, Vertex), f64>,
    offset: f64,
}

fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl IsingModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.vertices.insert(v);
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn field(&self, v: &Vertex) -> f64 {
        self.h.get(v).copied().unwrap_or(0.0)
    }

    /// Adds `dh` to the field on `v`, inserting the vertex if new.
    pub fn add_field(&mut self, v: Vertex, dh: f64) {
        self.vertices.insert(v);
        *self.h.entry(v).or_insert(0.0) += dh;
    }

    pub fn coupling(&self, u: &Vertex, v: &Vertex) -> f64 {
        self.couplings
            .get(&ordered(*u, *v))
            .copied()
            .unwrap_or(0.0)
    }

    /// Whether the pair has a stored entry (possibly an explicit zero).
    pub fn has_coupling(&self, u: &Vertex, v: &Vertex) -> bool {
        self.couplings.contains_key(&ordered(*u, *v))
    }

    /// Adds `dj` to the coupling on the unordered pair, inserting vertices
    /// and the entry if new. A zero `dj` still creates an explicit entry.
    pub fn add_coupling(&mut self, u: Vertex, v: Vertex, dj: f64) -> Result<(), ModelError> {
        if u == v {
            return Err(ModelError::SelfCoupling(u));
        }
        self.vertices.insert(u);
        self.vertices.insert(v);
        *self.couplings.entry(ordered(u, v)).or_insert(0.0) += dj;
        Ok(())
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_offset(&mut self, d: f64) {
        self.offset += d;
    }

    pub fn fields(&self) -> impl Iterator<Item = (&Vertex, &f64)> {
        self.h.iter()
    }

    pub fn couplings(&self) -> impl Iterator<Item = (&(Vertex, Vertex), &f64)> {
        self.couplings.iter()
    }

    /// Multiplies every field, coupling and the offset by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for v in self.h.values_mut() {
            *v *= factor;
        }
        for v in self.couplings.values_mut() {
            *v *= factor;
        }
        self.offset *= factor;
    }

    /// Largest absolute field or coupling magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.h
            .values()
            .chain(self.couplings.values())
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    /// Energy of a total assignment.
    pub fn energy(&self, s: &SpinAssignment) -> Result<f64, ModelError> {
        for v in &self.vertices {
            if s.get(v).is_none() {
                return Err(ModelError::MissingSpin(*v));
            }
        }
        let mut e = self.offset;
        for (v, &hv) in &self.h {
            e += hv * f64::from(s.get(v).unwrap());
        }
        for (&(u, v), &j) in &self.couplings {
            e += j * f64::from(s.get(&u).unwrap()) * f64::from(s.get(&v).unwrap());
        }
        Ok(e)
    }

    /// Entrywise sum of models.
    ///
    /// Logical and physical vertices may be shared; each ancilla must come
    /// from exactly one model.
    pub fn superimpose<'a>(
        models: impl IntoIterator<Item = &'a IsingModel>,
    ) -> Result<IsingModel, ModelError> {
        let mut out = IsingModel::new();
        let mut seen_ancillae = BTreeSet::new();
        for m in models {
            for v in &m.vertices {
                if matches!(v, Vertex::Ancilla { .. }) && !seen_ancillae.insert(*v) {
                    return Err(ModelError::AncillaCollision(*v));
                }
                out.vertices.insert(*v);
            }
            for (v, &hv) in &m.h {
                *out.h.entry(*v).or_insert(0.0) += hv;
            }
            for (&pair, &j) in &m.couplings {
                *out.couplings.entry(pair).or_insert(0.0) += j;
            }
            out.offset += m.offset;
        }
        Ok(out)
    }

    /// Sign-flips the listed vertices: `h -> -h` on flipped vertices and
    /// `J -> -J` on couplings with exactly one flipped endpoint. Satisfies
    /// `energy(flipped model, flipped s) == energy(model, s)`.
    pub fn gauge_transform(&self, flips: &BTreeSet<Vertex>) -> IsingModel {
        debug_assert!(flips.iter().all(|v| self.vertices.contains(v)));
        let h = self
            .h
            .iter()
            .map(|(v, &hv)| (*v, if flips.contains(v) { -hv } else { hv }))
            .collect();
        let couplings = self
            .couplings
            .iter()
            .map(|(&(u, v), &j)| {
                let sign = if flips.contains(&u) != flips.contains(&v) {
                    -1.0
                } else {
                    1.0
                };
                ((u, v), sign * j)
            })
            .collect();
        IsingModel {
            vertices: self.vertices.clone(),
            h,
            couplings,
            offset: self.offset,
        }
    }

    /// Minimum energy over the completions of the non-logical vertices, for
    /// every assignment of the logical ones. See [`Spectrum`].
    ///
    /// The non-logical vertices are conditioned on the logical assignment
    /// and enumerated per connected component of their own coupling graph;
    /// the cap applies to `logical bits + largest component`, so a model
    /// whose ancillae are mutually uncoupled reduces in time
    /// `2^L * (number of ancillae)` regardless of the total spin count.
    pub fn reduced_spectrum(&self, logical: &[Vertex], cap: u32) -> Result<Spectrum, ModelError> {
        self.reduced_spectrum_impl(logical, cap, true)
    }

    /// Sequential twin of [`IsingModel::reduced_spectrum`].
    pub fn reduced_spectrum_seq(
        &self,
        logical: &[Vertex],
        cap: u32,
    ) -> Result<Spectrum, ModelError> {
        self.reduced_spectrum_impl(logical, cap, false)
    }

    fn reduced_spectrum_impl(
        &self,
        logical: &[Vertex],
        cap: u32,
        parallel: bool,
    ) -> Result<Spectrum, ModelError> {
        let mut logical_pos = BTreeMap::new();
        for (i, v) in logical.iter().enumerate() {
            if !self.vertices.contains(v) {
                return Err(ModelError::UnknownVertex(*v));
            }
            if logical_pos.insert(*v, i).is_some() {
                return Err(ModelError::DuplicateLogical(*v));
            }
        }
        let ancilla: Vec<Vertex> = self
            .vertices
            .iter()
            .filter(|v| !logical_pos.contains_key(v))
            .copied()
            .collect();
        let ancilla_pos: BTreeMap<Vertex, usize> = ancilla
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();

        // Union-find over non-logical vertices, joined by nonzero couplings.
        let mut parent: Vec<usize> = (0..ancilla.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut logical_edges = Vec::new();
        let mut cross = vec![Vec::new(); ancilla.len()]; // ancilla -> (logical idx, J)
        let mut internal = Vec::new(); // (ancilla idx, ancilla idx, J)
        for (&(u, v), &j) in &self.couplings {
            match (logical_pos.get(&u), logical_pos.get(&v)) {
                (Some(&lu), Some(&lv)) => {
                    if j != 0.0 {
                        logical_edges.push((lu, lv, j));
                    }
                }
                (Some(&lu), None) => {
                    let av = ancilla_pos[&v];
                    if j != 0.0 {
                        cross[av].push((lu, j));
                    }
                }
                (None, Some(&lv)) => {
                    let au = ancilla_pos[&u];
                    if j != 0.0 {
                        cross[au].push((lv, j));
                    }
                }
                (None, None) => {
                    let (au, av) = (ancilla_pos[&u], ancilla_pos[&v]);
                    if j != 0.0 {
                        internal.push((au, av, j));
                        let (ru, rv) = (find(&mut parent, au), find(&mut parent, av));
                        if ru != rv {
                            parent[ru.max(rv)] = ru.min(rv);
                        }
                    }
                }
            }
        }

        // Group non-logical vertices into components, ordered by first member.
        let mut comp_of_root = BTreeMap::new();
        let mut components: Vec<Component> = Vec::new();
        for i in 0..ancilla.len() {
            let r = find(&mut parent, i);
            let ci = *comp_of_root.entry(r).or_insert_with(|| {
                components.push(Component::default());
                components.len() - 1
            });
            components[ci].members.push(i);
        }
        for (au, av, j) in internal {
            let ci = comp_of_root[&find(&mut parent, au)];
            let comp = &mut components[ci];
            let lu = comp.members.iter().position(|&m| m == au).unwrap();
            let lv = comp.members.iter().position(|&m| m == av).unwrap();
            comp.edges.push((lu, lv, j));
        }
        for comp in &mut components {
            comp.fields = comp
                .members
                .iter()
                .map(|&a| self.h.get(&ancilla[a]).copied().unwrap_or(0.0))
                .collect();
            comp.cross = comp.members.iter().map(|&a| cross[a].clone()).collect();
        }

        let max_comp = components.iter().map(|c| c.members.len()).max().unwrap_or(0);
        let width = logical.len() as u32 + max_comp as u32;
        if width > cap || logical.len() >= 63 || max_comp >= 63 {
            return Err(ModelError::CapExceeded { width, cap });
        }

        let h_logical: Vec<f64> = logical.iter().map(|v| self.field(v)).collect();
        let offset = self.offset;
        let nl = logical.len();
        let total = 1u64 << nl;
        let tie = |e: f64| 1e-12 * e.abs().max(1.0);

        let entries = crate::par::map_masks(total, parallel, |mask| {
            let spin = |i: usize| -> f64 {
                if mask >> i & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            };
            let mut base = offset;
            for (i, hv) in h_logical.iter().enumerate() {
                base += hv * spin(i);
            }
            for &(u, v, j) in &logical_edges {
                base += j * spin(u) * spin(v);
            }
            let mut energy = base;
            let mut runner_delta = f64::INFINITY;
            let mut completion = vec![-1i8; ancilla.len()];
            for comp in &components {
                let s = comp.members.len();
                // Effective fields once the logical spins are fixed.
                let eff: Vec<f64> = (0..s)
                    .map(|j| {
                        let mut f = comp.fields[j];
                        for &(l, jv) in &comp.cross[j] {
                            f += jv * spin(l);
                        }
                        f
                    })
                    .collect();
                let mut best = f64::INFINITY;
                let mut best_code = 0u64;
                let mut second = f64::INFINITY;
                for code in 0..1u64 << s {
                    // Bit s-1-j carries member j: ascending codes scan
                    // completions in lexicographic order, so the first
                    // minimum is the lexicographically smallest one.
                    let ms = |j: usize| -> f64 {
                        if code >> (s - 1 - j) & 1 == 1 {
                            1.0
                        } else {
                            -1.0
                        }
                    };
                    let mut e = 0.0;
                    for (j, f) in eff.iter().enumerate() {
                        e += f * ms(j);
                    }
                    for &(a, b, jv) in &comp.edges {
                        e += jv * ms(a) * ms(b);
                    }
                    if e < best - tie(best.min(e)) {
                        second = best;
                        best = e;
                        best_code = code;
                    } else if e > best + tie(best) && e < second {
                        second = e;
                    }
                }
                energy += best;
                if second.is_finite() {
                    runner_delta = runner_delta.min(second - best);
                }
                for (j, &m) in comp.members.iter().enumerate() {
                    completion[m] = if best_code >> (s - 1 - j) & 1 == 1 { 1 } else { -1 };
                }
            }
            SpectrumEntry {
                energy,
                completion,
                runner_up: runner_delta.is_finite().then(|| energy + runner_delta),
            }
        });

        Ok(Spectrum {
            logical: logical.to_vec(),
            ancilla,
            entries,
        })
    }

    pub(crate) fn indexed(&self) -> IndexedModel {
        let verts: Vec<Vertex> = self.vertices.iter().copied().collect();
        let pos: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let h = verts.iter().map(|v| self.field(v)).collect();
        let mut adj = vec![Vec::new(); verts.len()];
        let mut edges = Vec::new();
        for (&(u, v), &j) in &self.couplings {
            if j == 0.0 {
                continue;
            }
            let (iu, iv) = (pos[&u] as u32, pos[&v] as u32);
            adj[iu as usize].push((iv, j));
            adj[iv as usize].push((iu, j));
            edges.push((iu, iv, j));
        }
        IndexedModel {
            verts,
            h,
            adj,
            edges,
            offset: self.offset,
        }
    }
}

#[derive(Default)]
struct Component {
    members: Vec<usize>,
    fields: Vec<f64>,
    cross: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
}

/// One row of a [`Spectrum`]: the minimal energy over completions, one
/// argmin completion (lexicographically smallest, earlier vertices first,
/// -1 before +1) and the cheapest strictly higher completion energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub energy: f64,
    pub completion: Vec<Spin>,
    pub runner_up: Option<f64>,
}

/// Minimum-over-completions energy table over the logical vertices.
///
/// Entry `mask` assigns spin +1 to `logical[i]` when bit `i` of `mask` is
/// set (bit value 1 is "true").
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    logical: Vec<Vertex>,
    ancilla: Vec<Vertex>,
    entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn logical(&self) -> &[Vertex] {
        &self.logical
    }

    pub fn ancilla(&self) -> &[Vertex] {
        &self.ancilla
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, mask: u64) -> &SpectrumEntry {
        &self.entries[mask as usize]
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.energy).collect()
    }

    pub fn min_energy(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.energy)
            .fold(f64::INFINITY, f64::min)
    }

    /// Energies with the minimum shifted to zero.
    pub fn normalized(&self) -> Vec<f64> {
        let min = self.min_energy();
        self.entries.iter().map(|e| e.energy - min).collect()
    }

    /// Masks whose energy is within `tol` of the minimum, ascending.
    pub fn argmin_masks(&self, tol: f64) -> Vec<u64> {
        let min = self.min_energy();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.energy <= min + tol)
            .map(|(m, _)| m as u64)
            .collect()
    }

    /// Compares the min-shifted spectrum against `ideal`.
    /// Returns the match flag and the largest absolute deviation.
    pub fn matches(&self, ideal: &[f64], tol: f64) -> (bool, f64) {
        assert_eq!(ideal.len(), self.entries.len());
        let normalized = self.normalized();
        let max_dev = normalized
            .iter()
            .zip(ideal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        (max_dev <= tol, max_dev)
    }

    /// Smallest gap between an entry's minimum and its cheapest wrong
    /// completion. `None` when no entry has an alternative completion.
    pub fn min_ancilla_gap(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(|e| e.runner_up.map(|r| r - e.energy))
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }
}

/// Dense, index-based view used by the solvers.
pub(crate) struct IndexedModel {
    pub verts: Vec<Vertex>,
    pub h: Vec<f64>,
    pub adj: Vec<Vec<(u32, f64)>>,
    pub edges: Vec<(u32, u32, f64)>,
    pub offset: f64,
}

impl IndexedModel {
    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn energy_of_state(&self, s: &[Spin]) -> f64 {
        let mut e = self.offset;
        for (i, &hv) in self.h.iter().enumerate() {
            e += hv * f64::from(s[i]);
        }
        for &(u, v, j) in &self.edges {
            e += j * f64::from(s[u as usize]) * f64::from(s[v as usize]);
        }
        e
    }

    pub fn state_from_mask(&self, mask: u64) -> Vec<Spin> {
        (0..self.n())
            .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
            .collect()
    }

    pub fn energy_of_mask(&self, mask: u64) -> f64 {
        let s = self.state_from_mask(mask);
        self.energy_of_state(&s)
    }

    /// Energy change of flipping spin `i` in state `s`.
    pub fn flip_delta(&self, s: &[Spin], i: usize) -> f64 {
        let mut local = self.h[i];
        for &(j, jv) in &self.adj[i] {
            local += jv * f64::from(s[j as usize]);
        }
        -2.0 * f64::from(s[i]) * local
    }
}

// --- text format -------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsingTextError {
    #[error("line {line}: unrecognized ising line {text:?}")]
    BadLine { line: usize, text: String },
    #[error("line {line}: bad number {token:?}")]
    BadNumber { line: usize, token: String },
}

/// Plain numeric view used by the text interchange format.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawIsing {
    pub offset: f64,
    pub h: BTreeMap<u64, f64>,
    pub j: BTreeMap<(u64, u64), f64>,
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

impl RawIsing {
    /// Renders `offset`, `h <i> <v>` and `J <i> <j> <v>` lines, sorted,
    /// with `i < j` on coupling lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("offset {}\n", fmt_num(self.offset)));
        for (i, v) in &self.h {
            out.push_str(&format!("h {} {}\n", i, fmt_num(*v)));
        }
        for (&(i, j), v) in &self.j {
            debug_assert!(i < j);
            out.push_str(&format!("J {} {} {}\n", i, j, fmt_num(*v)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<RawIsing, IsingTextError> {
        let mut raw = RawIsing::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            let parse_f = |tok: &str| -> Result<f64, IsingTextError> {
                tok.parse().map_err(|_| IsingTextError::BadNumber {
                    line: lineno,
                    token: tok.to_string(),
                })
            };
            let parse_u = |tok: &str| -> Result<u64, IsingTextError> {
                tok.parse().map_err(|_| IsingTextError::BadNumber {
                    line: lineno,
                    token: tok.to_string(),
                })
            };
            match toks.as_slice() {
                ["offset", v] => raw.offset = parse_f(v)?,
                ["h", i, v] => {
                    raw.h.insert(parse_u(i)?, parse_f(v)?);
                }
                ["J", i, j, v] => {
                    let (i, j) = (parse_u(i)?, parse_u(j)?);
                    raw.j.insert((i.min(j), i.max(j)), parse_f(v)?);
                }
                _ => {
                    return Err(IsingTextError::BadLine {
                        line: lineno,
                        text: t.to_string(),
                    })
                }
            }
        }
        Ok(raw)
    }
}

impl IsingModel {
    /// Deterministic vertex numbering for text output: vertices in sorted
    /// order (logicals, then ancillae, then physicals), numbered from 1.
    /// Physical vertices keep their own qubit index instead.
    pub fn numbering(&self) -> BTreeMap<Vertex, u64> {
        let all_physical = self.vertices.iter().all(|v| matches!(v, Vertex::Physical(_)));
        if all_physical {
            self.vertices
                .iter()
                .map(|v| match v {
                    Vertex::Physical(q) => (*v, *q as u64),
                    _ => unreachable!(),
                })
                .collect()
        } else {
            self.vertices
                .iter()
                .enumerate()
                .map(|(i, v)| (*v, i as u64 + 1))
                .collect()
        }
    }

    pub fn to_raw(&self) -> RawIsing {
        let numbering = self.numbering();
        let mut raw = RawIsing {
            offset: self.offset,
            ..Default::default()
        };
        for (v, &hv) in &self.h {
            raw.h.insert(numbering[v], hv);
        }
        for (&(u, v), &j) in &self.couplings {
            let (a, b) = (numbering[&u], numbering[&v]);
            raw.j.insert((a.min(b), a.max(b)), j);
        }
        raw
    }

    pub fn to_text(&self) -> String {
        self.to_raw().to_text()
    }
}

/// Test-only helpers shared across this crate's unit tests.
#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use rand::prelude::*;

    /// Test-side spectrum oracle: enumerate every total state with the
    /// public `energy` evaluator, no component tricks.
    pub(crate) fn oracle_reduced_spectrum(model: &IsingModel, logical: &[Vertex]) -> Vec<f64> {
        let ancilla: Vec<Vertex> = model
            .vertices()
            .filter(|v| !logical.contains(v))
            .copied()
            .collect();
        let mut out = Vec::new();
        for mask in 0..1u64 << logical.len() {
            let mut best = f64::INFINITY;
            for amask in 0..1u64 << ancilla.len() {
                let mut s = SpinAssignment::new();
                for (i, v) in logical.iter().enumerate() {
                    s.set(*v, if mask >> i & 1 == 1 { 1 } else { -1 });
                }
                for (i, v) in ancilla.iter().enumerate() {
                    s.set(*v, if amask >> i & 1 == 1 { 1 } else { -1 });
                }
                best = best.min(model.energy(&s).unwrap());
            }
            out.push(best);
        }
        out
    }

    pub(crate) fn random_model(n: u32, seed: u64) -> IsingModel {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = IsingModel::new();
        for i in 1..=n {
            m.add_field(Vertex::Logical(i), rng.gen_range(-1.0..1.0));
        }
        for i in 1..=n {
            for j in (i + 1)..=n {
                if rng.gen_bool(0.5) {
                    m.add_coupling(Vertex::Logical(i), Vertex::Logical(j), rng.gen_range(-1.0..1.0))
                        .unwrap();
                }
            }
        }
        m.add_offset(rng.gen_range(-1.0..1.0));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::{oracle_reduced_spectrum, random_model};
    use super::*;
    use rand::prelude::*;

    fn l(i: u32) -> Vertex {
        Vertex::Logical(i)
    }

    fn assign(pairs: &[(Vertex, Spin)]) -> SpinAssignment {
        pairs.iter().copied().collect()
    }

    #[test]
    fn energy_of_empty_model() {
        let m = IsingModel::new();
        assert_eq!(m.energy(&SpinAssignment::new()).unwrap(), 0.0);
    }

    #[test]
    fn energy_single_field() {
        let mut m = IsingModel::new();
        m.add_field(l(1), 1.0);
        assert_eq!(m.energy(&assign(&[(l(1), -1)])).unwrap(), -1.0);
    }

    #[test]
    fn energy_antiferromagnetic_pair() {
        let mut m = IsingModel::new();
        m.add_coupling(l(1), l(2), 1.0).unwrap();
        assert_eq!(m.energy(&assign(&[(l(1), 1), (l(2), -1)])).unwrap(), -1.0);
    }

    #[test]
    fn energy_missing_spin() {
        let mut m = IsingModel::new();
        m.add_field(l(1), 1.0);
        assert!(matches!(
            m.energy(&SpinAssignment::new()),
            Err(ModelError::MissingSpin(_))
        ));
    }

    #[test]
    fn self_coupling_rejected() {
        let mut m = IsingModel::new();
        assert!(matches!(
            m.add_coupling(l(1), l(1), 1.0),
            Err(ModelError::SelfCoupling(_))
        ));
    }

    #[test]
    fn superimpose_identity_and_sum() {
        let m = random_model(4, 7);
        let single = IsingModel::superimpose([&m]).unwrap();
        assert_eq!(single, m);

        let mut a = IsingModel::new();
        a.add_field(l(1), 0.25);
        let mut b = IsingModel::new();
        b.add_field(l(1), 0.5);
        let sum = IsingModel::superimpose([&a, &b]).unwrap();
        assert_eq!(sum.field(&l(1)), 0.75);
    }

    #[test]
    fn superimpose_rejects_shared_ancilla() {
        let anc = Vertex::Ancilla { clause: 0, index: 0 };
        let mut a = IsingModel::new();
        a.add_field(anc, 0.5);
        let mut b = IsingModel::new();
        b.add_field(anc, 0.5);
        assert!(matches!(
            IsingModel::superimpose([&a, &b]),
            Err(ModelError::AncillaCollision(_))
        ));
    }

    #[test]
    fn superimpose_energy_is_linear() {
        let a = random_model(5, 11);
        let b = random_model(5, 12);
        let sum = IsingModel::superimpose([&a, &b]).unwrap();
        for mask in 0..32u64 {
            let s: SpinAssignment = (1..=5u32)
                .map(|i| (l(i), if mask >> (i - 1) & 1 == 1 { 1i8 } else { -1 }))
                .collect();
            let lhs = sum.energy(&s).unwrap();
            let rhs = a.energy(&s).unwrap() + b.energy(&s).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn gauge_transform_flips_signs() {
        let mut m = IsingModel::new();
        m.add_field(l(1), 1.0);
        let flips: BTreeSet<Vertex> = [l(1)].into_iter().collect();
        let g = m.gauge_transform(&flips);
        assert_eq!(g.field(&l(1)), -1.0);
        let id = m.gauge_transform(&BTreeSet::new());
        assert_eq!(id, m);
    }

    #[test]
    fn gauge_transform_energy_identity_exhaustive() {
        let m = random_model(8, 23);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let flips: BTreeSet<Vertex> = (1..=8u32)
            .filter(|_| rng.gen_bool(0.5))
            .map(l)
            .collect();
        let g = m.gauge_transform(&flips);
        for mask in 0..256u64 {
            let s: SpinAssignment = (1..=8u32)
                .map(|i| (l(i), if mask >> (i - 1) & 1 == 1 { 1i8 } else { -1 }))
                .collect();
            let e = m.energy(&s).unwrap();
            let ef = g.energy(&s.flipped(&flips)).unwrap();
            assert!((e - ef).abs() < 1e-12, "mask {mask:b}");
        }
        // Involution.
        assert_eq!(g.gauge_transform(&flips), m);
    }

    #[test]
    fn reduced_spectrum_no_ancilla_is_energy_table() {
        let m = random_model(4, 5);
        let logical: Vec<Vertex> = (1..=4).map(l).collect();
        let spec = m.reduced_spectrum(&logical, 26).unwrap();
        let oracle = oracle_reduced_spectrum(&m, &logical);
        for (e, o) in spec.energies().iter().zip(&oracle) {
            assert!((e - o).abs() < 1e-12);
        }
        assert!(spec.min_ancilla_gap().is_none());
    }

    #[test]
    fn reduced_spectrum_matches_oracle_with_coupled_ancillae() {
        // 4 logical + 5 extra spins with arbitrary couplings everywhere.
        let m = random_model(9, 31);
        let logical: Vec<Vertex> = (1..=4).map(l).collect();
        let spec = m.reduced_spectrum(&logical, 26).unwrap();
        let oracle = oracle_reduced_spectrum(&m, &logical);
        for (mask, (e, o)) in spec.energies().iter().zip(&oracle).enumerate() {
            assert!((e - o).abs() < 1e-9, "mask {mask:b}: {e} vs {o}");
        }
    }

    #[test]
    fn reduced_spectrum_seq_matches_parallel() {
        let m = random_model(8, 77);
        let logical: Vec<Vertex> = (1..=5).map(l).collect();
        let par = m.reduced_spectrum(&logical, 26).unwrap();
        let seq = m.reduced_spectrum_seq(&logical, 26).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn reduced_spectrum_cap() {
        let m = random_model(10, 3);
        let logical: Vec<Vertex> = (1..=4).map(l).collect();
        // Fully coupled leftovers form one component of 6: width 10 > 8.
        assert!(matches!(
            m.reduced_spectrum(&logical, 8),
            Err(ModelError::CapExceeded { .. })
        ));
    }

    #[test]
    fn gauge_preserves_sorted_spectrum() {
        let m = random_model(6, 41);
        let flips: BTreeSet<Vertex> = [l(2), l(5)].into_iter().collect();
        let g = m.gauge_transform(&flips);
        let logical: Vec<Vertex> = (1..=6).map(l).collect();
        let mut a = m.reduced_spectrum(&logical, 26).unwrap().energies();
        let mut b = g.reduced_spectrum(&logical, 26).unwrap().energies();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn raw_ising_round_trip() {
        let m = random_model(5, 13);
        let raw = m.to_raw();
        let parsed = RawIsing::from_text(&raw.to_text()).unwrap();
        assert_eq!(raw, parsed);
    }

    #[test]
    fn physical_models_keep_qubit_indices() {
        let mut m = IsingModel::new();
        m.add_field(Vertex::Physical(17), 0.5);
        m.add_coupling(Vertex::Physical(17), Vertex::Physical(3), -1.0)
            .unwrap();
        let raw = m.to_raw();
        assert!(raw.h.contains_key(&17));
        assert!(raw.j.contains_key(&(3, 17)));
    }

    #[test]
    fn explicit_zero_couplings_survive_text() {
        let mut m = IsingModel::new();
        m.add_coupling(Vertex::Physical(0), Vertex::Physical(4), 0.0)
            .unwrap();
        let text = m.to_text();
        assert!(text.contains("J 0 4 0"));
        let parsed = RawIsing::from_text(&text).unwrap();
        assert_eq!(parsed.j.get(&(0, 4)), Some(&0.0));
    }
}
