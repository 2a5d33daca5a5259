//! Weighted satisfiability problems over Boolean variables.
//!
//! A [`Problem`] is a weighted set of clauses. Besides plain OR clauses,
//! parity (XOR) clauses, AND clauses, permutation-symmetric clauses and
//! tabulated truth-table clauses are supported, since all of them admit a
//! two-level penalty spectrum: an assignment either satisfies a clause
//! (penalty 0) or violates it (penalty equal to the clause weight).
//!
//! The text format is DIMACS CNF/WCNF plus three line extensions:
//! `x` for XOR clauses, `a` for AND clauses and `s` for symmetric clauses
//! (see [`parse_wcnf`]).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Maximum clause width; clause-local assignments are stored in `u32` masks.
pub const MAX_CLAUSE_WIDTH: usize = 31;

/// Absolute tolerance used when comparing energies that are sums of weights.
pub fn energy_tolerance(scale: f64) -> f64 {
    1e-9 * scale.abs().max(1.0)
}

/// A possibly negated reference to a 1-based Boolean variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Result<Self, ClauseError> {
        if var == 0 {
            return Err(ClauseError::ZeroVariable);
        }
        Ok(Literal { var, negated })
    }

    pub fn positive(var: u32) -> Result<Self, ClauseError> {
        Literal::new(var, false)
    }

    pub fn negative(var: u32) -> Result<Self, ClauseError> {
        Literal::new(var, true)
    }

    /// Parses the signed-integer DIMACS form: `-3` is the negation of `x3`.
    pub fn from_dimacs(code: i64) -> Result<Self, ClauseError> {
        if code == 0 || code.unsigned_abs() > u32::MAX as u64 {
            return Err(ClauseError::ZeroVariable);
        }
        Literal::new(code.unsigned_abs() as u32, code < 0)
    }

    pub fn var(&self) -> u32 {
        self.var
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    /// Coupling gauge: +1 for a plain literal, -1 for a negated one.
    pub fn gauge(&self) -> i8 {
        if self.negated {
            -1
        } else {
            1
        }
    }

    pub fn to_dimacs(&self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }
}

/// Clause kind, with kind-specific payload.
#[derive(Debug, Clone, PartialEq)]
pub enum ClauseKind {
    /// Satisfied when at least one literal is true.
    Or,
    /// Satisfied when an odd number of literals are true.
    Xor,
    /// Satisfied when all literals are true.
    And,
    /// Symmetric under permutation: `penalized[m]` says whether assignments
    /// with exactly `m` true literals are violating. Length is `k + 1`.
    Symmetric { penalized: Vec<bool> },
    /// Violating literal-value masks (bit `i` = literal `i` is true).
    Table { violating: BTreeSet<u32> },
}

impl ClauseKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClauseKind::Or => "or",
            ClauseKind::Xor => "xor",
            ClauseKind::And => "and",
            ClauseKind::Symmetric { .. } => "symmetric",
            ClauseKind::Table { .. } => "table",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClauseError {
    #[error("variable index 0 is reserved")]
    ZeroVariable,
    #[error("clause has no literals")]
    Empty,
    #[error("clause wider than {MAX_CLAUSE_WIDTH} literals")]
    TooWide,
    #[error("variable {0} appears twice in one clause")]
    DuplicateVariable(u32),
    #[error("clause weight must be positive and finite, got {0}")]
    BadWeight(f64),
    #[error("symmetric profile must have k+1 entries, got {got} for k={k}")]
    BadProfileLength { got: usize, k: usize },
    #[error("symmetric profile is constant; it penalizes nothing or everything")]
    ConstantProfile,
    #[error("table violating set must be a nonempty strict subset of the 2^k assignments")]
    BadTable,
}

/// One weighted clause. Violating assignments cost exactly `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    kind: ClauseKind,
    literals: Vec<Literal>,
    weight: f64,
}

impl Clause {
    pub fn new(kind: ClauseKind, literals: Vec<Literal>, weight: f64) -> Result<Self, ClauseError> {
        if literals.is_empty() {
            return Err(ClauseError::Empty);
        }
        if literals.len() > MAX_CLAUSE_WIDTH {
            return Err(ClauseError::TooWide);
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(ClauseError::BadWeight(weight));
        }
        let mut seen = BTreeSet::new();
        for lit in &literals {
            if !seen.insert(lit.var()) {
                return Err(ClauseError::DuplicateVariable(lit.var()));
            }
        }
        let k = literals.len();
        match &kind {
            ClauseKind::Symmetric { penalized } => {
                if penalized.len() != k + 1 {
                    return Err(ClauseError::BadProfileLength {
                        got: penalized.len(),
                        k,
                    });
                }
                if penalized.iter().all(|&p| p) || penalized.iter().all(|&p| !p) {
                    return Err(ClauseError::ConstantProfile);
                }
            }
            ClauseKind::Table { violating } => {
                let full = 1u64 << k;
                if violating.is_empty()
                    || violating.len() as u64 >= full
                    || violating.iter().any(|&m| m as u64 >= full)
                {
                    return Err(ClauseError::BadTable);
                }
            }
            _ => {}
        }
        Ok(Clause {
            kind,
            literals,
            weight,
        })
    }

    pub fn or(literals: Vec<Literal>, weight: f64) -> Result<Self, ClauseError> {
        Clause::new(ClauseKind::Or, literals, weight)
    }

    pub fn xor(literals: Vec<Literal>, weight: f64) -> Result<Self, ClauseError> {
        Clause::new(ClauseKind::Xor, literals, weight)
    }

    pub fn and(literals: Vec<Literal>, weight: f64) -> Result<Self, ClauseError> {
        Clause::new(ClauseKind::And, literals, weight)
    }

    pub fn kind(&self) -> &ClauseKind {
        &self.kind
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Bitmask with bit `i` set when literal `i` is negated.
    pub fn negation_mask(&self) -> u32 {
        let mut m = 0u32;
        for (i, lit) in self.literals.iter().enumerate() {
            if lit.negated() {
                m |= 1 << i;
            }
        }
        m
    }

    /// Is the clause violated by the given variable values?
    ///
    /// Bit `i` of `values` is the value of the variable of literal `i`.
    pub fn violated(&self, values: u32) -> bool {
        let lit_mask = values ^ self.negation_mask();
        let k = self.width() as u32;
        let m = lit_mask.count_ones();
        match &self.kind {
            ClauseKind::Or => m == 0,
            ClauseKind::Xor => m % 2 == 0,
            ClauseKind::And => m != k,
            ClauseKind::Symmetric { penalized } => penalized[m as usize],
            ClauseKind::Table { violating } => violating.contains(&lit_mask),
        }
    }

    /// Penalty for the given variable values: `weight` if violated, else 0.
    pub fn penalty(&self, values: u32) -> f64 {
        if self.violated(values) {
            self.weight
        } else {
            0.0
        }
    }

    /// The full penalty table over all `2^k` clause-local assignments.
    pub fn spectrum(&self) -> Vec<f64> {
        (0..1u32 << self.width()).map(|v| self.penalty(v)).collect()
    }

    /// Clause-local values extracted from a full assignment.
    pub fn local_values(&self, assignment: &[bool]) -> u32 {
        let mut v = 0u32;
        for (i, lit) in self.literals.iter().enumerate() {
            if assignment[(lit.var() - 1) as usize] {
                v |= 1 << i;
            }
        }
        v
    }

    fn local_values_from_mask(&self, mask: u64) -> u32 {
        let mut v = 0u32;
        for (i, lit) in self.literals.iter().enumerate() {
            if mask >> (lit.var() - 1) & 1 == 1 {
                v |= 1 << i;
            }
        }
        v
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Clause(#[from] ClauseError),
    #[error("literal references variable {var} but the problem has {nvars} variables")]
    VarOutOfRange { var: u32, nvars: u32 },
    #[error("assignment has {got} values, problem has {want} variables")]
    AssignmentLength { got: usize, want: usize },
    #[error("{nvars} variables exceed the exhaustive-search cap of {cap}")]
    CapExceeded { nvars: u32, cap: u32 },
}

/// A weighted satisfiability problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl Problem {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, ProblemError> {
        for clause in &clauses {
            for lit in clause.literals() {
                if lit.var() > num_vars {
                    return Err(ProblemError::VarOutOfRange {
                        var: lit.var(),
                        nvars: num_vars,
                    });
                }
            }
        }
        Ok(Problem { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Total penalty of an assignment: the weighted sum of violated clauses.
    pub fn energy(&self, assignment: &[bool]) -> Result<f64, ProblemError> {
        if assignment.len() != self.num_vars as usize {
            return Err(ProblemError::AssignmentLength {
                got: assignment.len(),
                want: self.num_vars as usize,
            });
        }
        Ok(self
            .clauses
            .iter()
            .map(|c| c.penalty(c.local_values(assignment)))
            .sum())
    }

    /// Same as [`Problem::energy`] with the assignment packed in a mask
    /// (bit `i` is the value of variable `i + 1`).
    pub fn energy_of_mask(&self, mask: u64) -> f64 {
        self.clauses
            .iter()
            .map(|c| c.penalty(c.local_values_from_mask(mask)))
            .sum()
    }

    pub fn mean_width(&self) -> f64 {
        if self.clauses.is_empty() {
            return 0.0;
        }
        self.clauses.iter().map(|c| c.width()).sum::<usize>() as f64 / self.clauses.len() as f64
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(|c| c.width()).max().unwrap_or(0)
    }
}

/// Result of an exhaustive scan: the minimum and every assignment reaching it.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub energy: f64,
    /// Optimal assignments as masks (bit `i` = variable `i + 1`), ascending.
    pub assignments: Vec<u64>,
    pub num_vars: u32,
}

impl Optimum {
    pub fn contains(&self, mask: u64) -> bool {
        self.assignments.binary_search(&mask).is_ok()
    }
}

pub const DEFAULT_BRUTE_FORCE_CAP: u32 = 26;

/// Exhaustive optimum over all `2^n` assignments.
///
/// Returns every assignment whose energy is within [`energy_tolerance`] of
/// the minimum.
pub fn brute_force_optimum(problem: &Problem, cap: u32) -> Result<Optimum, ProblemError> {
    let n = problem.num_vars();
    if n > cap {
        return Err(ProblemError::CapExceeded { nvars: n, cap });
    }
    let total: u64 = 1u64 << n;
    let min = crate::par::min_energy_over_masks(total, |m| problem.energy_of_mask(m));
    let tol = energy_tolerance(min);
    let assignments =
        crate::par::collect_masks(total, |m| problem.energy_of_mask(m) <= min + tol);
    Ok(Optimum {
        energy: min,
        assignments,
        num_vars: n,
    })
}

// --- text format -----------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    BadHeader { line: usize, msg: String },
    #[error("no 'p cnf' or 'p wcnf' header before the first clause")]
    MissingHeader,
    #[error("line {line}: unexpected token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: clause is not terminated by 0")]
    Unterminated { line: usize },
    #[error("line {line}: variable {var} out of range (problem has {nvars})")]
    VarOutOfRange { line: usize, var: u32, nvars: u32 },
    #[error("line {line}: clause weight must be positive, got {weight}")]
    BadWeight { line: usize, weight: f64 },
    #[error("line {line}: {source}")]
    Clause { line: usize, source: ClauseError },
    #[error("line {line}: symmetric clause needs k+1 profile flags before ':'")]
    BadProfile { line: usize },
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Cnf,
    Wcnf,
}

struct LineParser<'a> {
    tokens: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn next_token(&mut self) -> Option<&'a str> {
        self.tokens.next()
    }

    fn parse<T: std::str::FromStr>(&mut self, tok: &str) -> Result<T, ParseError> {
        tok.parse().map_err(|_| ParseError::BadToken {
            line: self.line,
            token: tok.to_string(),
        })
    }
}

/// Parses the DIMACS CNF/WCNF text format with extensions.
///
/// Grammar (line oriented, `c` lines are comments):
///
/// ```text
/// p cnf <nvars> <nclauses>          header, clause weights default to 1
/// p wcnf <nvars> <nclauses> <top>   header, clause lines start with a weight
/// 1 -2 3 0                          OR clause
/// <w> 1 -2 3 0                      OR clause (wcnf)
/// x [w] 1 2 3 0                     XOR clause (asserts odd parity of literals)
/// a <w> 1 2 0                       AND clause (weight always explicit)
/// s <w> f0 .. fk : 1 -2 0           symmetric clause, f flags in {0,1}
/// ```
pub fn parse_wcnf(text: &str) -> Result<Problem, ParseError> {
    let mut format = None;
    let mut num_vars = 0u32;
    let mut clauses = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut lp = LineParser {
            tokens: trimmed.split_whitespace(),
            line,
        };
        let first = lp.next_token().expect("nonempty line");
        if first == "p" {
            let kind = lp.next_token().unwrap_or("");
            let fmt = match kind {
                "cnf" => Format::Cnf,
                "wcnf" => Format::Wcnf,
                other => {
                    return Err(ParseError::BadHeader {
                        line,
                        msg: format!("unknown format {other:?}"),
                    })
                }
            };
            let nv = lp.next_token().ok_or_else(|| ParseError::BadHeader {
                line,
                msg: "missing variable count".into(),
            })?;
            num_vars = lp.parse(nv)?;
            let nc = lp.next_token().ok_or_else(|| ParseError::BadHeader {
                line,
                msg: "missing clause count".into(),
            })?;
            let _nclauses: u64 = lp.parse(nc)?;
            if fmt == Format::Wcnf {
                let top = lp.next_token().ok_or_else(|| ParseError::BadHeader {
                    line,
                    msg: "missing top weight".into(),
                })?;
                let _top: f64 = lp.parse(top)?;
            }
            if lp.next_token().is_some() {
                return Err(ParseError::BadHeader {
                    line,
                    msg: "trailing tokens".into(),
                });
            }
            format = Some(fmt);
            continue;
        }

        let fmt = format.ok_or(ParseError::MissingHeader)?;
        let (kind_tag, mut weight): (&str, f64) = match first {
            "x" | "a" | "s" => (first, 1.0),
            _ => ("", 1.0),
        };

        let mut pending = None;
        match kind_tag {
            "" => {
                if fmt == Format::Wcnf {
                    weight = lp.parse(first)?;
                } else {
                    pending = Some(first);
                }
            }
            "x" => {
                if fmt == Format::Wcnf {
                    let w = lp.next_token().ok_or(ParseError::Unterminated { line })?;
                    weight = lp.parse(w)?;
                }
            }
            // AND and symmetric lines always carry an explicit weight.
            "a" | "s" => {
                let w = lp.next_token().ok_or(ParseError::Unterminated { line })?;
                weight = lp.parse(w)?;
            }
            _ => unreachable!(),
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(ParseError::BadWeight { line, weight });
        }

        let mut profile = None;
        if kind_tag == "s" {
            let mut flags = Vec::new();
            loop {
                let tok = lp.next_token().ok_or(ParseError::BadProfile { line })?;
                if tok == ":" {
                    break;
                }
                match tok {
                    "0" => flags.push(false),
                    "1" => flags.push(true),
                    _ => return Err(ParseError::BadProfile { line }),
                }
            }
            profile = Some(flags);
        }

        let mut lits = Vec::new();
        let mut terminated = false;
        loop {
            let tok = match pending.take() {
                Some(t) => t,
                None => match lp.next_token() {
                    Some(t) => t,
                    None => break,
                },
            };
            let code: i64 = lp.parse(tok)?;
            if code == 0 {
                terminated = lp.next_token().is_none();
                if !terminated {
                    return Err(ParseError::BadToken {
                        line,
                        token: "trailing tokens after 0".into(),
                    });
                }
                break;
            }
            let lit = Literal::from_dimacs(code).map_err(|source| ParseError::Clause { line, source })?;
            if lit.var() > num_vars {
                return Err(ParseError::VarOutOfRange {
                    line,
                    var: lit.var(),
                    nvars: num_vars,
                });
            }
            lits.push(lit);
        }
        if !terminated {
            return Err(ParseError::Unterminated { line });
        }

        let kind = match kind_tag {
            "" => ClauseKind::Or,
            "x" => ClauseKind::Xor,
            "a" => ClauseKind::And,
            "s" => ClauseKind::Symmetric {
                penalized: profile.unwrap(),
            },
            _ => unreachable!(),
        };
        let clause =
            Clause::new(kind, lits, weight).map_err(|source| ParseError::Clause { line, source })?;
        clauses.push(clause);
    }

    if format.is_none() {
        return Err(ParseError::MissingHeader);
    }
    Problem::new(num_vars, clauses).map_err(|e| match e {
        ProblemError::VarOutOfRange { var, nvars } => ParseError::VarOutOfRange {
            line: 0,
            var,
            nvars,
        },
        ProblemError::Clause(source) => ParseError::Clause { line: 0, source },
        _ => unreachable!(),
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SerializeError {
    #[error("table clauses have no text representation")]
    TableClause,
}

fn fmt_weight(w: f64) -> String {
    if w == 0.0 {
        "0".to_string()
    } else {
        format!("{w}")
    }
}

/// Writes a problem in the format accepted by [`parse_wcnf`].
///
/// Always emits a `wcnf` header so weights survive the round trip. Table
/// clauses are rejected: the grammar has no syntax for them.
pub fn serialize(problem: &Problem) -> Result<String, SerializeError> {
    let mut out = String::new();
    let top: f64 = problem.clauses().iter().map(|c| c.weight()).sum::<f64>() + 1.0;
    writeln!(
        out,
        "p wcnf {} {} {}",
        problem.num_vars(),
        problem.clauses().len(),
        fmt_weight(top)
    )
    .unwrap();
    for clause in problem.clauses() {
        let lits = clause
            .literals()
            .iter()
            .map(|l| l.to_dimacs().to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let w = fmt_weight(clause.weight());
        match clause.kind() {
            ClauseKind::Or => writeln!(out, "{w} {lits} 0").unwrap(),
            ClauseKind::Xor => writeln!(out, "x {w} {lits} 0").unwrap(),
            ClauseKind::And => writeln!(out, "a {w} {lits} 0").unwrap(),
            ClauseKind::Symmetric { penalized } => {
                let flags = penalized
                    .iter()
                    .map(|&p| if p { "1" } else { "0" })
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(out, "s {w} {flags} : {lits} 0").unwrap();
            }
            ClauseKind::Table { .. } => return Err(SerializeError::TableClause),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent truth-table oracle, written from the Boolean definitions
    /// rather than from bitmask arithmetic.
    fn satisfied_naive(clause: &Clause, assignment: &[bool]) -> bool {
        let vals: Vec<bool> = clause
            .literals()
            .iter()
            .map(|l| {
                let v = assignment[(l.var() - 1) as usize];
                if l.negated() {
                    !v
                } else {
                    v
                }
            })
            .collect();
        match clause.kind() {
            ClauseKind::Or => vals.iter().any(|&v| v),
            ClauseKind::Xor => vals.iter().filter(|&&v| v).count() % 2 == 1,
            ClauseKind::And => vals.iter().all(|&v| v),
            ClauseKind::Symmetric { penalized } => {
                !penalized[vals.iter().filter(|&&v| v).count()]
            }
            ClauseKind::Table { violating } => {
                let mut mask = 0u32;
                for (i, &v) in vals.iter().enumerate() {
                    if v {
                        mask |= 1 << i;
                    }
                }
                !violating.contains(&mask)
            }
        }
    }

    fn bools(mask: u64, n: u32) -> Vec<bool> {
        (0..n).map(|i| mask >> i & 1 == 1).collect()
    }

    fn lit(code: i64) -> Literal {
        Literal::from_dimacs(code).unwrap()
    }

    #[test]
    fn parse_minimal_cnf() {
        let p = parse_wcnf("p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(p.num_vars(), 2);
        assert_eq!(p.clauses().len(), 1);
        let c = &p.clauses()[0];
        assert_eq!(*c.kind(), ClauseKind::Or);
        assert_eq!(c.literals(), &[lit(1), lit(-2)]);
        assert_eq!(c.weight(), 1.0);
    }

    #[test]
    fn parse_wcnf_weight() {
        let p = parse_wcnf("p wcnf 3 1 100\n5 1 2 3 0\n").unwrap();
        let c = &p.clauses()[0];
        assert_eq!(*c.kind(), ClauseKind::Or);
        assert_eq!(c.weight(), 5.0);
        assert_eq!(c.literals(), &[lit(1), lit(2), lit(3)]);
    }

    #[test]
    fn parse_xor_line() {
        let p = parse_wcnf("p cnf 4 1\nx 1 2 3 4 0\n").unwrap();
        let c = &p.clauses()[0];
        assert_eq!(*c.kind(), ClauseKind::Xor);
        assert_eq!(c.weight(), 1.0);
        assert_eq!(c.width(), 4);
    }

    #[test]
    fn parse_and_and_symmetric_lines() {
        let p = parse_wcnf("p wcnf 3 2 10\na 2.5 1 2 0\ns 1.5 1 0 0 : 1 -3 0\n").unwrap();
        assert_eq!(p.clauses()[0].kind().name(), "and");
        assert_eq!(p.clauses()[0].weight(), 2.5);
        match p.clauses()[1].kind() {
            ClauseKind::Symmetric { penalized } => {
                assert_eq!(penalized, &vec![true, false, false])
            }
            other => panic!("expected symmetric, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_wcnf("p cnf 2 1\n1 3 0\n") {
            Err(ParseError::VarOutOfRange { line: 2, var: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_wcnf("p wcnf 2 1 5\n0.0 1 2 0\n") {
            Err(ParseError::BadWeight { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_wcnf("p cnf 2 1\n1 -1 0\n") {
            Err(ParseError::Clause {
                line: 2,
                source: ClauseError::DuplicateVariable(1),
            }) => {}
            other => panic!("{other:?}"),
        }
        match parse_wcnf("p cnf 2 1\n1 2\n") {
            Err(ParseError::Unterminated { line: 2 }) => {}
            other => panic!("{other:?}"),
        }
        match parse_wcnf("1 2 0\n") {
            Err(ParseError::MissingHeader) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn or_spectrum_matches_truth_table() {
        let c = Clause::or(vec![lit(1), lit(2), lit(3), lit(4)], 0.25).unwrap();
        assert_eq!(c.penalty(0b0000), 0.25);
        assert_eq!(c.penalty(0b0101), 0.0); // assignment 1010 read a1..a4
        for v in 0..16u32 {
            let expect = if v == 0 { 0.25 } else { 0.0 };
            assert_eq!(c.penalty(v), expect);
        }
    }

    #[test]
    fn xor_two_bits() {
        let c = Clause::xor(vec![lit(1), lit(2)], 0.7).unwrap();
        assert_eq!(c.penalty(0b01), 0.0);
        assert_eq!(c.penalty(0b10), 0.0);
        assert_eq!(c.penalty(0b11), 0.7);
        assert_eq!(c.penalty(0b00), 0.7);
    }

    #[test]
    fn table_membership() {
        let violating: BTreeSet<u32> = [0b101u32].into_iter().collect();
        let c = Clause::new(
            ClauseKind::Table { violating },
            vec![lit(1), lit(2), lit(3)],
            0.3,
        )
        .unwrap();
        for v in 0..8u32 {
            let expect = if v == 0b101 { 0.3 } else { 0.0 };
            assert_eq!(c.penalty(v), expect, "v={v:03b}");
        }
    }

    #[test]
    fn clause_invariants_rejected() {
        assert!(Clause::or(vec![], 1.0).is_err());
        assert!(Clause::or(vec![lit(1)], 0.0).is_err());
        assert!(Clause::or(vec![lit(1)], -2.0).is_err());
        assert!(Clause::new(
            ClauseKind::Symmetric {
                penalized: vec![true, true]
            },
            vec![lit(1)],
            1.0
        )
        .is_err());
        let all: BTreeSet<u32> = (0..4u32).collect();
        assert!(Clause::new(ClauseKind::Table { violating: all }, vec![lit(1), lit(2)], 1.0).is_err());
        assert!(Clause::new(
            ClauseKind::Table {
                violating: BTreeSet::new()
            },
            vec![lit(1), lit(2)],
            1.0
        )
        .is_err());
    }

    #[test]
    fn energy_of_empty_problem_is_zero() {
        let p = Problem::new(3, vec![]).unwrap();
        assert_eq!(p.energy(&[true, false, true]).unwrap(), 0.0);
    }

    #[test]
    fn energy_counts_violations() {
        let p = Problem::new(
            1,
            vec![
                Clause::or(vec![lit(1)], 1.0).unwrap(),
                Clause::or(vec![lit(-1)], 1.0).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(p.energy(&[true]).unwrap(), 1.0);
        assert_eq!(p.energy(&[false]).unwrap(), 1.0);
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let p = Problem::new(2, vec![]).unwrap();
        assert!(matches!(
            p.energy(&[true]),
            Err(ProblemError::AssignmentLength { .. })
        ));
    }

    /// Random instance energy against the per-clause naive oracle.
    #[test]
    fn energy_matches_naive_oracle() {
        let problem = crate::generate::random_problem(8, 6, 4, 0xFEED, true);
        for mask in 0..(1u64 << 8) {
            let assignment = bools(mask, 8);
            let naive: f64 = problem
                .clauses()
                .iter()
                .map(|c| {
                    if satisfied_naive(c, &assignment) {
                        0.0
                    } else {
                        c.weight()
                    }
                })
                .sum();
            let got = problem.energy(&assignment).unwrap();
            assert!((got - naive).abs() < 1e-12, "mask {mask:b}");
        }
    }

    #[test]
    fn brute_force_small_or() {
        let p = Problem::new(2, vec![Clause::or(vec![lit(1), lit(2)], 1.0).unwrap()]).unwrap();
        let opt = brute_force_optimum(&p, 26).unwrap();
        assert_eq!(opt.energy, 0.0);
        assert_eq!(opt.assignments, vec![0b01, 0b10, 0b11]);
    }

    #[test]
    fn brute_force_unsat_pair() {
        let p = Problem::new(
            1,
            vec![
                Clause::or(vec![lit(1)], 1.0).unwrap(),
                Clause::or(vec![lit(-1)], 1.0).unwrap(),
            ],
        )
        .unwrap();
        let opt = brute_force_optimum(&p, 26).unwrap();
        assert_eq!(opt.energy, 1.0);
        assert_eq!(opt.assignments.len(), 2);
    }

    #[test]
    fn brute_force_cap() {
        let p = Problem::new(10, vec![]).unwrap();
        assert!(matches!(
            brute_force_optimum(&p, 8),
            Err(ProblemError::CapExceeded { .. })
        ));
    }

    /// Second, independently coded enumeration: recursive descent over
    /// variables instead of mask iteration.
    #[test]
    fn brute_force_matches_recursive_rescan() {
        fn rescan(problem: &Problem, var: u32, assignment: &mut Vec<bool>, best: &mut (f64, Vec<Vec<bool>>)) {
            if var == problem.num_vars() {
                let e = problem.energy(assignment).unwrap();
                if e < best.0 - 1e-12 {
                    *best = (e, vec![assignment.clone()]);
                } else if (e - best.0).abs() <= 1e-12 {
                    best.1.push(assignment.clone());
                }
                return;
            }
            for v in [false, true] {
                assignment.push(v);
                rescan(problem, var + 1, assignment, best);
                assignment.pop();
            }
        }

        let problem = crate::generate::random_max2sat(10, 15, 0xBEEF);
        let opt = brute_force_optimum(&problem, 26).unwrap();
        let mut best = (f64::INFINITY, Vec::new());
        rescan(&problem, 0, &mut Vec::new(), &mut best);
        assert!((opt.energy - best.0).abs() < 1e-12);
        let masks: Vec<u64> = best
            .1
            .iter()
            .map(|a| {
                a.iter()
                    .enumerate()
                    .filter(|(_, &v)| v)
                    .map(|(i, _)| 1u64 << i)
                    .sum()
            })
            .collect();
        let mut sorted = masks.clone();
        sorted.sort_unstable();
        assert_eq!(opt.assignments, sorted);
    }

    #[test]
    fn serialize_rejects_table() {
        let violating: BTreeSet<u32> = [1u32].into_iter().collect();
        let c = Clause::new(ClauseKind::Table { violating }, vec![lit(1), lit(2)], 1.0).unwrap();
        let p = Problem::new(2, vec![c]).unwrap();
        assert!(matches!(serialize(&p), Err(SerializeError::TableClause)));
    }
}
