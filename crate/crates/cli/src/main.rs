use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use permqc::feasibility::{
    self, kernel_intersection, orbit_filter, rank_check, FeasibilityProblem, FeasibilityReport, RankReport,
    SearchConfig, SearchOutput, SearchSummary, Strategy, MAX_DENSE_DIM,
};
use permqc::induced::{binomial, RootOfUnity};
use permqc::perm::QubitPermutation;
use permqc::reports;
use permqc::schedule::SCHEMA_VERSION;
use permqc::toffoli::compare_report;

const DEFAULT_SEED: u64 = 7;
const OUTPUT_DIR_VAR: &str = "PERMQC_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "permqc",
    version,
    about = "Verify permutational quantum computing constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Row width of the dual-rail encoding. Omit to run the standard set.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of qubits for feasibility commands.
    #[arg(long = "M", global = true)]
    m: Option<usize>,
    /// Excitation weight. Omit to scan every weight.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Deviation tolerance for verify-theorem1.
    #[arg(long, global = true, default_value_t = reports::EXACT_TOL)]
    tol: f64,
    /// Report file. Defaults to `<command>.<ext>` in $PERMQC_OUTPUT_DIR, or stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run the slow three-register Toffoli simulation at n = 8 and above.
    #[arg(long, global = true)]
    long_tests: bool,
    /// Worker threads. Search uses all cores by default, everything else one.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, default_value = "exhaustive")]
    strategy: Strategy,
    /// Candidate limit for feasibility-search.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Resumable progress file for feasibility-search.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    /// Per-candidate JSON lines for feasibility-search.
    #[arg(long, global = true)]
    jsonl: Option<PathBuf>,
    /// Record wall-clock time in the search summary.
    #[arg(long, global = true)]
    timing: bool,
    /// Permutation realizing P, in cycle notation.
    #[arg(long, global = true)]
    perm_p: Option<String>,
    /// Permutation realizing H, in cycle notation.
    #[arg(long, global = true)]
    perm_h: Option<String>,
    /// Eigenvalue `p/q` (meaning e^{2πi p/q}) for P. Omit to scan candidates.
    #[arg(long, global = true)]
    z1: Option<RootOfUnity>,
    /// Eigenvalue scale `p/q` for H. Omit to scan candidates.
    #[arg(long, global = true)]
    z2: Option<RootOfUnity>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// α and γ on the logical basis, and the P/X logical group.
    VerifyEncoding,
    /// Sequential versus parallel exchange layers on random states.
    VerifyTheorem1,
    /// The pairing identity for permutation matrices.
    VerifyLemma,
    /// The calibrated resonant Hadamard.
    VerifyHadamard,
    /// The Fredkin CNOT between two registers.
    VerifyCnot,
    /// Toffoli timesteps, baseline, and (when affordable) simulation.
    VerifyToffoli,
    /// Hadamard and phase flip from qubit permutations alone.
    VerifyPermHadamard,
    /// The 24 Clifford elements and the two generator tables.
    CliffordTables,
    /// Kernel-intersection test for one permutation pair.
    FeasibilityCheck,
    /// Search for permutation pairs realizing P and H.
    FeasibilitySearch,
    /// Toffoli timestep comparison with the exchange-only baseline.
    ScheduleCompare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyEncoding => "verify-encoding",
            Command::VerifyTheorem1 => "verify-theorem1",
            Command::VerifyLemma => "verify-lemma",
            Command::VerifyHadamard => "verify-hadamard",
            Command::VerifyCnot => "verify-cnot",
            Command::VerifyToffoli => "verify-toffoli",
            Command::VerifyPermHadamard => "verify-perm-hadamard",
            Command::CliffordTables => "clifford-tables",
            Command::FeasibilityCheck => "feasibility-check",
            Command::FeasibilitySearch => "feasibility-search",
            Command::ScheduleCompare => "schedule-compare",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<Outcome, UsageError>;

/// A finished command: its config echo, pass flag and report.
struct Outcome {
    config: Value,
    passed: bool,
    report: Value,
    /// Preferred text rendering, when the report has one.
    text: Option<String>,
}

impl Outcome {
    fn new<R: Serialize>(config: Value, passed: bool, report: &R) -> Result<Self, UsageError> {
        Ok(Outcome {
            config,
            passed,
            report: serde_json::to_value(report)?,
            text: None,
        })
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a Value,
    passed: bool,
    report: &'a Value,
}

fn widths(n: Option<usize>, default: &[usize]) -> Vec<usize> {
    n.map_or_else(|| default.to_vec(), |n| vec![n])
}

fn all_passed<T>(items: &[T], pass: impl Fn(&T) -> bool) -> bool {
    items.iter().all(pass)
}

fn verify_encoding(cli: &Cli) -> CmdResult {
    let ns = widths(cli.n, &[2, 4, 8]);
    let reps = ns
        .iter()
        .map(|&n| reports::encoding_report(n))
        .collect::<Result<Vec<_>, _>>()?;
    Outcome::new(json!({ "n": ns }), all_passed(&reps, |r| r.passed), &reps)
}

fn verify_theorem1(cli: &Cli) -> CmdResult {
    let ns = widths(cli.n, &[1, 2, 3, 4, 5, 6, 7, 8]);
    let reps = ns
        .iter()
        .map(|&n| reports::theorem1_report(n, cli.trials, cli.seed, cli.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let config = json!({ "n": ns, "trials": cli.trials, "seed": cli.seed, "tol": cli.tol });
    Outcome::new(config, all_passed(&reps, |r| r.passed), &reps)
}

fn verify_lemma(cli: &Cli) -> CmdResult {
    let max_n = cli.n.unwrap_or(6);
    let rep = reports::lemma_report(max_n)?;
    Outcome::new(json!({ "maxN": max_n }), rep.passed, &rep)
}

fn verify_hadamard(cli: &Cli) -> CmdResult {
    let ns = widths(cli.n, &[4, 8]);
    let reps = ns
        .iter()
        .map(|&n| reports::hadamard_report(n))
        .collect::<Result<Vec<_>, _>>()?;
    Outcome::new(json!({ "n": ns }), all_passed(&reps, |r| r.passed), &reps)
}

fn verify_cnot(cli: &Cli) -> CmdResult {
    let ns = widths(cli.n, &[2]);
    let reps = ns
        .iter()
        .map(|&n| reports::cnot_report(n))
        .collect::<Result<Vec<_>, _>>()?;
    Outcome::new(json!({ "n": ns }), all_passed(&reps, |r| r.passed), &reps)
}

fn verify_toffoli(cli: &Cli) -> CmdResult {
    let ns = widths(cli.n, &[8]);
    let reps = ns
        .iter()
        .map(|&n| reports::toffoli_report(n, n <= 4 || cli.long_tests))
        .collect::<Result<Vec<_>, _>>()?;
    let config = json!({ "n": ns, "longTests": cli.long_tests });
    Outcome::new(config, all_passed(&reps, |r| r.passed), &reps)
}

fn verify_perm_hadamard(_cli: &Cli) -> CmdResult {
    let rep = permqc::perm_hadamard::run_report()?;
    Outcome::new(json!({}), rep.passed(), &rep)
}

fn clifford_tables(_cli: &Cli) -> CmdResult {
    let rep = reports::clifford_tables_report();
    Outcome::new(json!({}), rep.passed, &rep)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckCase {
    k: usize,
    z1: RootOfUnity,
    z2: RootOfUnity,
    kernel: FeasibilityReport,
    rank: Option<RankReport>,
    /// Both routes give the same nullity (true when the dense route is skipped).
    routes_agree: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WeightCheck {
    k: usize,
    orbit_filter: feasibility::OrbitFilter,
    spectrum_p: Vec<RootOfUnity>,
    spectrum_h: Vec<RootOfUnity>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckReport {
    m: usize,
    perm_p: String,
    perm_h: String,
    weights: Vec<WeightCheck>,
    cases: Vec<CheckCase>,
    feasible: bool,
}

fn parse_perm(m: usize, text: &Option<String>, flag: &str) -> Result<QubitPermutation, UsageError> {
    let text = text
        .as_deref()
        .ok_or_else(|| UsageError(format!("{flag} is required")))?;
    Ok(QubitPermutation::parse(m, text)?)
}

fn feasibility_check(cli: &Cli) -> CmdResult {
    let m = cli.m.ok_or_else(|| UsageError("--M is required".into()))?;
    let p = parse_perm(m, &cli.perm_p, "--perm-p")?;
    let h = parse_perm(m, &cli.perm_h, "--perm-h")?;
    let ks: Vec<usize> = match cli.k {
        Some(k) if k > m => return Err(UsageError(format!("--k {k} exceeds --M {m}"))),
        Some(k) => vec![k],
        None => (0..=m).collect(),
    };
    let hp = h.compose(&p)?;
    let mut weights = Vec::new();
    let mut cases = Vec::new();
    for &k in &ks {
        let spec_p: Vec<RootOfUnity> = feasibility::z_candidates(&p, k)?;
        let spec_h: Vec<RootOfUnity> = feasibility::z_candidates(&h, k)?;
        let z1s = match cli.z1 {
            Some(z) => vec![z],
            None => feasibility::z1_candidates(&spec_p.iter().copied().collect()),
        };
        let z2s = match cli.z2 {
            Some(z) => vec![z],
            None => feasibility::z2_candidates(&spec_h.iter().copied().collect()),
        };
        for &z1 in &z1s {
            for &z2 in &z2s {
                let problem = FeasibilityProblem::from_roots(k, p.clone(), h.clone(), z1, z2)?;
                let kernel = kernel_intersection(&problem)?;
                let rank = if binomial(m, k) <= MAX_DENSE_DIM {
                    Some(rank_check(&problem)?)
                } else {
                    None
                };
                let routes_agree = rank.as_ref().is_none_or(|r| r.nullity == kernel.diagnostics.nullity);
                cases.push(CheckCase {
                    k,
                    z1,
                    z2,
                    kernel,
                    rank,
                    routes_agree,
                });
            }
        }
        weights.push(WeightCheck {
            k,
            orbit_filter: orbit_filter(&p, &hp, k)?,
            spectrum_p: spec_p,
            spectrum_h: spec_h,
        });
    }
    let passed = cases
        .iter()
        .all(|c| c.routes_agree && c.kernel.solutions.iter().all(|s| s.reproduces_generators));
    let rep = CheckReport {
        m,
        perm_p: p.to_string(),
        perm_h: h.to_string(),
        weights,
        feasible: cases.iter().any(|c| c.kernel.feasible),
        cases,
    };
    let config = json!({
        "M": m,
        "k": cli.k,
        "permP": rep.perm_p,
        "permH": rep.perm_h,
        "z1": cli.z1,
        "z2": cli.z2,
    });
    Outcome::new(config, passed, &rep)
}

/// Re-solves every hit and checks the returned bases reproduce P and H.
fn confirm_hits(summary: &SearchSummary, m: usize) -> Result<bool, UsageError> {
    for rec in &summary.feasible {
        let p = QubitPermutation::parse(m, &rec.perm_p)?;
        let h = QubitPermutation::parse(m, &rec.perm_h)?;
        for hit in &rec.hits {
            let problem = FeasibilityProblem::from_roots(rec.k, p.clone(), h.clone(), hit.z1, hit.z2)?;
            let rep = kernel_intersection(&problem)?;
            if !rep.feasible || !rep.solutions.iter().all(|s| s.reproduces_generators) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn search_text(s: &SearchSummary) -> String {
    let mut out = String::new();
    let size = s.space_size.map_or("unbounded".to_string(), |v| v.to_string());
    out.push_str(&format!("strategy           {:?}\n", s.config.strategy).to_lowercase());
    out.push_str(&format!("M                  {}\n", s.config.m));
    out.push_str(&format!(
        "k                  {}\n",
        s.config.k.map_or("all".to_string(), |k| k.to_string())
    ));
    out.push_str(&format!("space size         {size}\n"));
    out.push_str(&format!("evaluated          {}\n", s.evaluated));
    out.push_str(&format!("filter passed      {}\n", s.filter_passed));
    out.push_str(&format!("z pairs tried      {}\n", s.z_pairs_tried));
    out.push_str(&format!("feasible           {}\n", s.feasible_count));
    out.push_str(&format!("budget exhausted   {}\n", s.budget_exhausted));
    if let Some(t) = s.elapsed_seconds {
        out.push_str(&format!("elapsed seconds    {t:.3}\n"));
    }
    for rec in &s.feasible {
        out.push_str(&format!(
            "  #{} k={} P={} H={}\n",
            rec.index, rec.k, rec.perm_p, rec.perm_h
        ));
    }
    out
}

fn feasibility_search(cli: &Cli) -> CmdResult {
    let m = cli.m.ok_or_else(|| UsageError("--M is required".into()))?;
    let cfg = SearchConfig {
        m,
        k: cli.k,
        strategy: cli.strategy,
        seed: cli.seed,
        budget: cli.budget,
    };
    let out = SearchOutput {
        jsonl: cli.jsonl.as_deref(),
        checkpoint: cli.checkpoint.as_deref(),
        timing: cli.timing,
        chunk: None,
    };
    let summary = feasibility::search(&cfg, &out)?;
    let passed = confirm_hits(&summary, m)?;
    let mut outcome = Outcome::new(serde_json::to_value(&cfg)?, passed, &summary)?;
    outcome.text = Some(search_text(&summary));
    Ok(outcome)
}

fn schedule_compare(cli: &Cli) -> CmdResult {
    let ns = widths(cli.n, &[8]);
    let reps = ns.iter().map(|&n| compare_report(n)).collect::<Result<Vec<_>, _>>()?;
    let text = reps.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n");
    let passed = reps
        .iter()
        .all(|r| r.measured.is_none_or(|t| t == r.extended_dual_rail) && r.permutational_gates == 8);
    let mut outcome = Outcome::new(json!({ "n": ns }), passed, &reps)?;
    outcome.text = Some(text);
    Ok(outcome)
}

/// `path = value` lines for every leaf of a JSON value.
fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (key, child) in map {
                let p = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten(&p, child, out);
            }
        }
        Value::Array(items) if items.iter().any(|c| c.is_object() || c.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        leaf => out.push_str(&format!("{prefix} = {leaf}\n")),
    }
}

fn render(command: Command, outcome: &Outcome, format: Format) -> Result<String, UsageError> {
    match format {
        Format::Json => {
            let env = Envelope {
                schema_version: SCHEMA_VERSION,
                command: command.name(),
                config: &outcome.config,
                passed: outcome.passed,
                report: &outcome.report,
            };
            let mut s = serde_json::to_string_pretty(&env)?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let mut s = format!("{}: {}\n", command.name(), if outcome.passed { "PASS" } else { "FAIL" });
            match &outcome.text {
                Some(t) => s.push_str(t),
                None => flatten("", &outcome.report, &mut s),
            }
            Ok(s)
        }
    }
}

fn output_path(cli: &Cli, command: Command) -> Option<PathBuf> {
    if let Some(p) = &cli.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUTPUT_DIR_VAR).filter(|d| !d.is_empty())?;
    let ext = match cli.format {
        Format::Json => "json",
        Format::Text => "txt",
    };
    Some(Path::new(&dir).join(format!("{}.{ext}", command.name())))
}

fn run(cli: &Cli) -> CmdResult {
    let workers = match (cli.workers, cli.command) {
        (Some(0), _) => return Err(UsageError("--workers must be positive".into())),
        (Some(w), _) => Some(w),
        (None, Command::FeasibilitySearch) => None,
        (None, _) => Some(1),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build()?;
    pool.install(|| match cli.command {
        Command::VerifyEncoding => verify_encoding(cli),
        Command::VerifyTheorem1 => verify_theorem1(cli),
        Command::VerifyLemma => verify_lemma(cli),
        Command::VerifyHadamard => verify_hadamard(cli),
        Command::VerifyCnot => verify_cnot(cli),
        Command::VerifyToffoli => verify_toffoli(cli),
        Command::VerifyPermHadamard => verify_perm_hadamard(cli),
        Command::CliffordTables => clifford_tables(cli),
        Command::FeasibilityCheck => feasibility_check(cli),
        Command::FeasibilitySearch => feasibility_search(cli),
        Command::ScheduleCompare => schedule_compare(cli),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        let text = render(cli.command, &outcome, cli.format)?;
        match output_path(&cli, cli.command) {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(&path, text)?;
                eprintln!(
                    "{}: {} ({})",
                    cli.command.name(),
                    if outcome.passed { "PASS" } else { "FAIL" },
                    path.display()
                );
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
