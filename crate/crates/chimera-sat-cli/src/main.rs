//! Command-line front end: compile, verify, solve, turbo and stats.
//!
//! Options resolve in the order flags > config file > defaults. The config
//! file is flat `key=value` text; unknown keys are rejected. Outputs are
//! written atomically (temp file + rename) and are byte-identical for
//! identical inputs and seeds. Exit codes: 0 success, 1 verification or
//! runtime failure, 2 usage error, 3 capacity error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use chimera_sat::chimera::{
    count_physical_qubits, layout_embedding, loglog_slope, realize, required_dims, ChimeraGraph,
    EmbedError, LayoutKind,
};
use chimera_sat::gadgets::{compile_problem, CompiledProblem, GadgetParams};
use chimera_sat::problem::{energy_tolerance, parse_wcnf, Problem};
use chimera_sat::report::{Metadata, SolveReport, StatsRow, StatsTable, VerifyReport};
use chimera_sat::solver::{decode, solve_exact, solve_sa, SaConfig};
use chimera_sat::turbo::{
    build_decoding_problem, run_trials, Channel, DecodeTarget, DecoderConfig, TrialConfig,
    TurboCode,
};

#[derive(Parser)]
#[command(name = "chimera-sat", version, about = "Compile satisfiability problems to Chimera-embedded Ising models", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Problem file (DIMACS CNF/WCNF with x/a/s extensions).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    outdir: Option<PathBuf>,
    /// Chimera dimensions as MxN unit cells; sized to fit when absent.
    #[arg(long, global = true)]
    graph: Option<String>,
    /// Chain layout: linear or serpentine.
    #[arg(long, global = true)]
    layout: Option<String>,
    /// Ancilla coupling scale.
    #[arg(long = "Ja", global = true)]
    ja: Option<f64>,
    /// Penalty quantum.
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Parity/symmetric field offset.
    #[arg(long, global = true)]
    q0: Option<f64>,
    /// Chain strength multiplier.
    #[arg(long = "jinf-factor", global = true)]
    jinf_factor: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Annealing restarts.
    #[arg(long, global = true)]
    restarts: Option<u32>,
    /// Annealing sweeps per restart.
    #[arg(long, global = true)]
    sweeps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a problem and embed it: abstract/physical ising files plus
    /// the embedding metadata document.
    Compile,
    /// Brute-force check every gadget spectrum and the superposition.
    Verify,
    /// Solve a compiled problem (exactly when small, else by annealing).
    Solve {
        /// abstract or physical
        #[arg(long)]
        target: Option<String>,
    },
    /// Seeded turbo-code decoding trials through the pipeline.
    Turbo {
        /// Message length.
        #[arg(long)]
        k: Option<usize>,
        /// Channel flip probability.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        trials: Option<u32>,
        /// abstract or embedded
        #[arg(long)]
        target: Option<String>,
    },
    /// Qubit-count scaling table for an instance family.
    Stats {
        /// maxsat or turbo
        #[arg(long)]
        family: Option<String>,
        /// Comma-separated sizes (variable counts or message lengths).
        #[arg(long)]
        sizes: Option<String>,
        /// Clauses per variable (maxsat family).
        #[arg(long)]
        ratio: Option<f64>,
        /// Clause width (maxsat family).
        #[arg(long = "clause-width")]
        clause_width: Option<usize>,
        /// Channel flip probability (turbo family).
        #[arg(long)]
        p: Option<f64>,
    },
}

struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Fail {
        Fail {
            code: 2,
            msg: msg.into(),
        }
    }

    fn run(msg: impl std::fmt::Display) -> Fail {
        Fail {
            code: 1,
            msg: msg.to_string(),
        }
    }
}

impl From<EmbedError> for Fail {
    fn from(e: EmbedError) -> Fail {
        let code = match e {
            EmbedError::Capacity { .. } | EmbedError::GraphTooSmall { .. } => 3,
            _ => 1,
        };
        Fail {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<chimera_sat::turbo::TurboError> for Fail {
    fn from(e: chimera_sat::turbo::TurboError) -> Fail {
        match e {
            chimera_sat::turbo::TurboError::Embed(e) => e.into(),
            other => Fail::run(other),
        }
    }
}

const CONFIG_KEYS: &[&str] = &[
    "input",
    "outdir",
    "graph",
    "layout",
    "ja",
    "g",
    "q0",
    "jinf-factor",
    "seed",
    "restarts",
    "sweeps",
    "target",
    "k",
    "p",
    "trials",
    "family",
    "sizes",
    "ratio",
    "clause-width",
];

/// Options after merging flags over the config file over defaults.
struct Resolved {
    file: BTreeMap<String, String>,
    cli: Cli,
}

impl Resolved {
    fn new(cli: Cli) -> Result<Resolved, Fail> {
        let mut file = BTreeMap::new();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Fail::usage(format!("cannot read config {}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                let (key, value) = t
                    .split_once('=')
                    .ok_or_else(|| Fail::usage(format!("config line {}: expected key=value", i + 1)))?;
                let key = key.trim();
                if !CONFIG_KEYS.contains(&key) {
                    return Err(Fail::usage(format!("config line {}: unknown key {key:?}", i + 1)));
                }
                file.insert(key.to_string(), value.trim().to_string());
            }
        }
        Ok(Resolved { file, cli })
    }

    fn file_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Fail> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Fail::usage(format!("config key {key}: bad value {raw:?}"))),
        }
    }

    fn input(&self) -> Result<PathBuf, Fail> {
        self.cli
            .input
            .clone()
            .or_else(|| self.file.get("input").map(PathBuf::from))
            .ok_or_else(|| Fail::usage("--input is required"))
    }

    fn outdir(&self) -> PathBuf {
        self.cli
            .outdir
            .clone()
            .or_else(|| self.file.get("outdir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn graph(&self) -> Result<Option<(u32, u32)>, Fail> {
        let raw = match (&self.cli.graph, self.file.get("graph")) {
            (Some(g), _) => g.clone(),
            (None, Some(g)) => g.clone(),
            (None, None) => return Ok(None),
        };
        let (m, n) = raw
            .split_once(['x', 'X'])
            .ok_or_else(|| Fail::usage(format!("--graph expects MxN, got {raw:?}")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Fail::usage(format!("--graph expects MxN, got {raw:?}")))
        };
        Ok(Some((parse(m)?, parse(n)?)))
    }

    fn layout(&self) -> Result<LayoutKind, Fail> {
        let raw = match (&self.cli.layout, self.file.get("layout")) {
            (Some(l), _) => l.clone(),
            (None, Some(l)) => l.clone(),
            (None, None) => return Ok(LayoutKind::Linear),
        };
        match raw.as_str() {
            "linear" => Ok(LayoutKind::Linear),
            "serpentine" => Ok(LayoutKind::Serpentine),
            other => Err(Fail::usage(format!("--layout must be linear or serpentine, got {other:?}"))),
        }
    }

    fn params(&self) -> Result<GadgetParams, Fail> {
        let mut p = GadgetParams::default();
        p.ja = self.cli.ja.or(self.file_parsed("ja")?).unwrap_or(p.ja);
        p.g = self.cli.g.or(self.file_parsed("g")?).unwrap_or(p.g);
        let q0_default_scaled = p.q0 / 0.2 * p.g;
        p.q0 = self
            .cli
            .q0
            .or(self.file_parsed("q0")?)
            .unwrap_or(q0_default_scaled);
        p.jinf_factor = self
            .cli
            .jinf_factor
            .or(self.file_parsed("jinf-factor")?)
            .unwrap_or(p.jinf_factor);
        Ok(p)
    }

    fn seed(&self) -> Result<u64, Fail> {
        Ok(self.cli.seed.or(self.file_parsed("seed")?).unwrap_or(0))
    }

    fn sa_config(&self) -> Result<SaConfig, Fail> {
        let mut sa = SaConfig {
            seed: self.seed()?,
            ..SaConfig::default()
        };
        if let Some(r) = self.cli.restarts.or(self.file_parsed("restarts")?) {
            sa.restarts = r;
        }
        if let Some(s) = self.cli.sweeps.or(self.file_parsed("sweeps")?) {
            sa.sweeps = s;
        }
        Ok(sa)
    }

    fn merged<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, Fail> {
        Ok(flag.or(self.file_parsed(key)?).unwrap_or(default))
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<(), Fail> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Fail::run(format!("writing {}: {e}", path.display())))
}

fn load_problem(opts: &Resolved) -> Result<Problem, Fail> {
    let path = opts.input()?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Fail::run(format!("cannot read {}: {e}", path.display())))?;
    parse_wcnf(&text).map_err(Fail::run)
}

fn compile(opts: &Resolved, problem: &Problem) -> Result<CompiledProblem, Fail> {
    compile_problem(problem, &opts.params()?).map_err(Fail::run)
}

fn embed_graph(
    opts: &Resolved,
    compiled: &CompiledProblem,
) -> Result<(ChimeraGraph, chimera_sat::Embedding), Fail> {
    let (rows, cols) = match opts.graph()? {
        Some(dims) => dims,
        None => required_dims(compiled.num_vars, compiled.total_ancillas()),
    };
    let graph = ChimeraGraph::new(rows.max(1), cols.max(1));
    let embedding = layout_embedding(compiled, &graph, opts.layout()?)?;
    Ok((graph, embedding))
}

fn ensure_outdir(opts: &Resolved) -> Result<PathBuf, Fail> {
    let dir = opts.outdir();
    std::fs::create_dir_all(&dir)
        .map_err(|e| Fail::run(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn cmd_compile(opts: &Resolved) -> Result<(), Fail> {
    let problem = load_problem(opts)?;
    let compiled = compile(opts, &problem)?;
    let (_, embedding) = embed_graph(opts, &compiled)?;
    let physical = realize(&compiled.model, &embedding, &opts.params()?)?;
    let dir = ensure_outdir(opts)?;
    write_atomic(&dir.join("abstract.ising"), &compiled.model.to_text())?;
    write_atomic(&dir.join("physical.ising"), &physical.model.to_text())?;
    let meta = Metadata::collect(&compiled, &physical);
    write_atomic(&dir.join("embedding.meta"), &meta.to_text())?;
    let budget = count_physical_qubits(&problem, &compiled, &embedding);
    println!(
        "compiled {} vars, {} clauses: {} ancillae, {} physical qubits in {} cells",
        problem.num_vars(),
        problem.clauses().len(),
        budget.ancillae,
        budget.physical,
        budget.cells_used
    );
    Ok(())
}

fn verify_report(opts: &Resolved, problem: &Problem) -> Result<VerifyReport, Fail> {
    let compiled = compile(opts, problem)?;
    let reports: Vec<_> = compiled.all_reports().cloned().collect();
    // Whole-model check: reduced spectrum against the problem energies.
    let superposition = if problem.num_vars() <= 20 {
        match compiled.logical_spectrum(opts.params()?.spin_cap.max(problem.num_vars() + 1)) {
            Ok(spectrum) => {
                let mut max_dev = 0.0f64;
                for mask in 0..1u64 << problem.num_vars() {
                    let dev = (spectrum.entry(mask).energy - problem.energy_of_mask(mask)).abs();
                    max_dev = max_dev.max(dev);
                }
                let tol = energy_tolerance(
                    problem.clauses().iter().map(|c| c.weight()).sum::<f64>(),
                );
                Some((max_dev <= tol, max_dev))
            }
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(VerifyReport::new(reports, superposition))
}

fn cmd_verify(opts: &Resolved) -> Result<(), Fail> {
    let problem = load_problem(opts)?;
    let report = verify_report(opts, &problem)?;
    let dir = ensure_outdir(opts)?;
    write_atomic(&dir.join("verify.txt"), &report.to_text())?;
    if report.pass {
        println!("verify: pass ({} gadgets)", report.gadgets.len());
        Ok(())
    } else {
        let first = report
            .gadgets
            .iter()
            .find(|g| !g.exact)
            .map(|g| g.clause_index);
        match first {
            Some(idx) => println!("verify: FAIL at clause {idx}"),
            None => println!("verify: FAIL (superposition check)"),
        }
        Err(Fail::run("verification failed"))
    }
}

fn cmd_solve(opts: &Resolved, target: Option<String>) -> Result<(), Fail> {
    let target = match target
        .or_else(|| opts.file.get("target").cloned())
        .unwrap_or_else(|| "physical".to_string())
        .as_str()
    {
        "abstract" => false,
        "physical" => true,
        other => return Err(Fail::usage(format!("--target must be abstract or physical, got {other:?}"))),
    };
    let problem = load_problem(opts)?;
    let compiled = compile(opts, &problem)?;
    let params = opts.params()?;
    let sa = opts.sa_config()?;
    let started = Instant::now();
    let report = if target {
        let (_, embedding) = embed_graph(opts, &compiled)?;
        let physical = realize(&compiled.model, &embedding, &params)?;
        let spins = physical.model.vertex_count() as u32;
        let result = if spins <= params.spin_cap {
            solve_exact(&physical.model, params.spin_cap).map_err(Fail::run)?
        } else {
            solve_sa(&physical.model, params.g, &sa)
        };
        let outcome = decode(&result.best_assignment(), &embedding);
        let total = embedding.chain_count();
        SolveReport::new(&result, Some((&outcome, total)))
    } else {
        let spins = compiled.model.vertex_count() as u32;
        let result = if spins <= params.spin_cap {
            solve_exact(&compiled.model, params.spin_cap).map_err(Fail::run)?
        } else {
            solve_sa(&compiled.model, params.g, &sa)
        };
        SolveReport::new(&result, None)
    };
    // Timing stays off the report file so identical runs stay byte-identical.
    eprintln!("solve took {:.3}s", started.elapsed().as_secs_f64());
    let dir = ensure_outdir(opts)?;
    write_atomic(&dir.join("solve.txt"), &report.to_text())?;
    println!(
        "solve: method {} energy {} ({} optimal assignment(s))",
        report.method,
        report.energy,
        report.assignments.len()
    );
    Ok(())
}

fn cmd_turbo(
    opts: &Resolved,
    k: Option<usize>,
    p: Option<f64>,
    trials: Option<u32>,
    target: Option<String>,
) -> Result<(), Fail> {
    let k = opts.merged(k, "k", 8)?;
    let p = opts.merged(p, "p", 0.05)?;
    let trials = opts.merged(trials, "trials", 100)?;
    let target = match target
        .or_else(|| opts.file.get("target").cloned())
        .unwrap_or_else(|| "abstract".to_string())
        .as_str()
    {
        "abstract" => DecodeTarget::Abstract,
        "embedded" => DecodeTarget::Embedded,
        other => return Err(Fail::usage(format!("--target must be abstract or embedded, got {other:?}"))),
    };
    let config = TrialConfig {
        k,
        p,
        trials,
        seed: opts.seed()?,
        target,
        decoder: DecoderConfig {
            params: opts.params()?,
            sa: opts.sa_config()?,
            graph: opts.graph()?,
            exact_cap: chimera_sat::solver::DEFAULT_EXACT_CAP,
        },
    };
    let records = run_trials(&config)?;
    let dir = ensure_outdir(opts)?;
    write_atomic(&dir.join("trials.txt"), &chimera_sat::report::trials_to_text(&records))?;
    let agreed = records.iter().filter(|r| r.agree == Some(true)).count();
    let compared = records.iter().filter(|r| r.agree.is_some()).count();
    println!(
        "turbo: {} trials, oracle agreement {}/{}",
        records.len(),
        agreed,
        compared
    );
    Ok(())
}

fn stats_rows_maxsat(
    opts: &Resolved,
    sizes: &[u32],
    ratio: f64,
    width: usize,
) -> Result<Vec<StatsRow>, Fail> {
    let seed = opts.seed()?;
    let mut rows = Vec::new();
    for &n in sizes {
        let problem = chimera_sat::generate::maxksat_instance(n, width, ratio, seed ^ u64::from(n));
        let compiled = compile(opts, &problem)?;
        let (_, embedding) = embed_graph(opts, &compiled)?;
        rows.push(StatsRow {
            size: n,
            budget: count_physical_qubits(&problem, &compiled, &embedding),
        });
    }
    Ok(rows)
}

fn stats_rows_turbo(opts: &Resolved, sizes: &[u32], p: f64) -> Result<Vec<StatsRow>, Fail> {
    let seed = opts.seed()?;
    let channel = Channel::new(p).map_err(Fail::run)?;
    let mut rows = Vec::new();
    for &k in sizes {
        let code = TurboCode::random(k as usize, seed ^ u64::from(k));
        // Only the check structure matters for counting; use a clean word.
        let word = code.encode(&vec![1; k as usize]).map_err(Fail::run)?;
        let decoding = build_decoding_problem(&code, &word, &channel).map_err(Fail::run)?;
        let compiled = compile(opts, &decoding.problem)?;
        let (_, embedding) = embed_graph(opts, &compiled)?;
        rows.push(StatsRow {
            size: k,
            budget: count_physical_qubits(&decoding.problem, &compiled, &embedding),
        });
    }
    Ok(rows)
}

fn cmd_stats(
    opts: &Resolved,
    family: Option<String>,
    sizes: Option<String>,
    ratio: Option<f64>,
    clause_width: Option<usize>,
    p: Option<f64>,
) -> Result<(), Fail> {
    let family = family
        .or_else(|| opts.file.get("family").cloned())
        .unwrap_or_else(|| "maxsat".to_string());
    let sizes_raw = sizes
        .or_else(|| opts.file.get("sizes").cloned())
        .unwrap_or_else(|| match family.as_str() {
            "turbo" => "4,6,8,10,12".to_string(),
            _ => "8,12,16,20,24".to_string(),
        });
    let sizes: Vec<u32> = sizes_raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Fail::usage(format!("bad size {s:?} in --sizes")))
        })
        .collect::<Result<_, _>>()?;
    if sizes.len() < 2 {
        return Err(Fail::usage("--sizes needs at least two entries"));
    }
    let ratio = opts.merged(ratio, "ratio", 1.0)?;
    let width = opts.merged(clause_width, "clause-width", 3)?;
    let p = opts.merged(p, "p", 0.05)?;

    let rows = match family.as_str() {
        "maxsat" => stats_rows_maxsat(opts, &sizes, ratio, width)?,
        "turbo" => stats_rows_turbo(opts, &sizes, p)?,
        other => return Err(Fail::usage(format!("--family must be maxsat or turbo, got {other:?}"))),
    };
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (f64::from(r.size), r.budget.physical as f64))
        .collect();
    let table = StatsTable {
        family,
        ratio,
        width,
        rows,
        fitted_exponent: loglog_slope(&points),
    };
    let dir = ensure_outdir(opts)?;
    write_atomic(&dir.join("stats.txt"), &table.to_text())?;
    let mut line = String::new();
    for r in &table.rows {
        write!(line, " {}:{}", r.size, r.budget.physical).unwrap();
    }
    println!(
        "stats: family {} exponent {:.3} qubits{line}",
        table.family, table.fitted_exponent
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    let opts = Resolved::new(cli)?;
    match &opts.cli.command {
        Command::Compile => cmd_compile(&opts),
        Command::Verify => cmd_verify(&opts),
        Command::Solve { target } => cmd_solve(&opts, target.clone()),
        Command::Turbo { k, p, trials, target } => {
            cmd_turbo(&opts, *k, *p, *trials, target.clone())
        }
        Command::Stats {
            family,
            sizes,
            ratio,
            clause_width,
            p,
        } => cmd_stats(
            &opts,
            family.clone(),
            sizes.clone(),
            *ratio,
            *clause_width,
            *p,
        ),
    }
}

fn main() -> ExitCode {
    chimera_sat::configure_threads_from_env();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("error: {}", fail.msg);
            ExitCode::from(fail.code)
        }
    }
}
