//! Compiler from weighted max-k-SAT and high-order parity-check problems
//! to two-body Ising models minor-embedded in a Chimera hardware graph.
//!
//! The pipeline:
//!
//! 1. [`problem`] parses and represents weighted clause sets (OR, XOR,
//!    AND, permutation-symmetric and truth-table clauses) and provides the
//!    brute-force oracle.
//! 2. [`gadgets`] builds, for each clause, a penalty sub-Hamiltonian whose
//!    minimum over its ancilla spins is 0 on satisfying assignments and
//!    exactly the clause weight on violating ones; [`gadgets::compile_problem`]
//!    superimposes them on the shared logical spins and brute-force
//!    verifies each gadget.
//! 3. [`chimera`] models the hardware graph and minor-embeds the compiled
//!    model: a complete-graph block for the logical variables, ancilla
//!    rows crossing their extended chains, and a serpentine fallback with
//!    corner blocks for larger problems.
//! 4. [`solver`] finds ground states (exact enumeration or simulated
//!    annealing) and decodes chains back to logical assignments.
//! 5. [`turbo`] encodes messages with nested prefix parity checks, passes
//!    them through a binary symmetric channel and decodes by compiling
//!    the posterior Hamiltonian through the same pipeline.
//!
//! Spectrum enumeration, exact solving, annealing restarts and Monte
//! Carlo decoding trials run on rayon when the `parallel` feature (on by
//! default) is enabled; results are identical either way.

pub mod chimera;
pub mod gadgets;
pub mod generate;
pub mod ising;
mod par;
pub mod problem;
pub mod report;
pub mod solver;
pub mod turbo;

pub use chimera::{ChimeraGraph, Embedding, LayoutKind, PhysicalModel};
pub use gadgets::{CompiledProblem, GadgetParams};
pub use ising::{IsingModel, Spectrum, SpinAssignment, Vertex};
pub use par::configure_threads_from_env;
pub use problem::{Clause, ClauseKind, Literal, Problem};
pub use solver::{SaConfig, SolveResult};
pub use turbo::{Channel, TurboCode};
