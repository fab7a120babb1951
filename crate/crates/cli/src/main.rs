//! `unitest`: run unitary property testers, distance oracles, generators and
//! verification suites from the command line.
//!
//! Every invocation prints one JSON object on stdout; diagnostics go to
//! stderr. Exit codes: 0 accept-majority / success, 1 reject-majority or a
//! failed verification, 2 usage or input errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use unitest::generators::{
    haar_unitary, permutation_matrix, random_clifford, random_junta, random_orthogonal,
    Permutation,
};
use unitest::io::{read_matrix, read_members, write_matrix};
use unitest::linalg::{is_unitary, unitarity_residual, UNITARY_TOL};
use unitest::oracles::{
    dist_to_clifford, dist_to_finite_subset, dist_to_juntas, dist_to_orthogonal,
    dist_to_pauli_group, enumerate_clifford, CliffordTable, JUNTA_MAX_QUBITS,
    ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS,
};
use unitest::rng::DEFAULT_SEED;
use unitest::testers::{
    permutation_subset, test_clifford, test_finite_subset, test_junta, test_orthogonal,
    test_pauli, FiniteSubset, TestVerdict, PERMUTATION_MAX_QUBITS,
};
use unitest::verify::{run_suite, Suite};
use unitest::{ComplexMatrix, DistanceReport, RngStream};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "unitest", version, about = "Property testers for unitary operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tester repeatedly on a matrix file.
    Test(TestArgs),
    /// Compute the exact distance from a matrix to a class.
    Oracle(OracleArgs),
    /// Write a random class member as a matrix file.
    Generate(GenerateArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TestClass {
    Orthogonal,
    Junta,
    Pauli,
    Clifford,
    Subset,
    Permutation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleClass {
    Pauli,
    Orthogonal,
    Junta,
    Clifford,
    Subset,
    Permutation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenerateClass {
    Haar,
    Orthogonal,
    Clifford,
    Junta,
    Permutation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Metrics,
    Appendix,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::Metrics => Suite::Metrics,
            SuiteArg::Appendix => Suite::Appendix,
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

#[derive(clap::Args)]
struct SeedArg {
    /// RNG seed (decimal or 0x-prefixed hex).
    #[arg(long, env = "UNITEST_SEED", default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
}

#[derive(clap::Args)]
struct TestArgs {
    class: TestClass,
    /// Matrix JSON file.
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Junta size (junta tester).
    #[arg(long)]
    k: Option<usize>,
    /// Directory of matrix files or a JSON array of matrices (subset tester).
    #[arg(long)]
    members: Option<PathBuf>,
}

#[derive(clap::Args)]
struct OracleArgs {
    class: OracleClass,
    input: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    members: Option<PathBuf>,
    /// Cache file for the enumerated Clifford table.
    #[arg(long)]
    clifford_cache: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    class: GenerateClass,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    /// Circuit depth for Clifford generation (default 20n + 20).
    #[arg(long)]
    depth: Option<usize>,
    /// Explicit permutation image list, e.g. "2 1 3".
    #[arg(long)]
    permutation: Option<String>,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    suite: SuiteArg,
    #[command(flatten)]
    seed: SeedArg,
    /// Random instances per check (suite default when omitted).
    #[arg(long)]
    instances: Option<usize>,
}

/// A failure to report with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult<T> = Result<T, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Serialize)]
struct RunReport {
    schema: u32,
    command: String,
    parameters: BTreeMap<String, Value>,
    trials: usize,
    accept_count: usize,
    accept_rate: f64,
    oracle_distance: Option<f64>,
    /// Largest number of queries spent by a single trial.
    queries_per_trial: u64,
    seed: u64,
    wall_time_ms: f64,
}

#[derive(Serialize)]
struct OracleReport {
    schema: u32,
    command: String,
    input: String,
    #[serde(flatten)]
    report: DistanceReport,
}

#[derive(Serialize)]
struct GenerateReport {
    schema: u32,
    command: String,
    path: String,
    n_qubits: usize,
    seed: u64,
    oracle_distance: Option<f64>,
}

fn class_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

fn print_json<T: Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn load_unitary(path: &Path) -> CliResult<ComplexMatrix> {
    let m = read_matrix(path).map_err(|e| usage(format!("cannot load {}: {e}", path.display())))?;
    if !is_unitary(&m, UNITARY_TOL) {
        return Err(usage(format!(
            "{}: matrix is not unitary (||U^dag U - I||_F = {:.3e} > {UNITARY_TOL:.0e})",
            path.display(),
            unitarity_residual(&m)
        )));
    }
    Ok(m)
}

fn load_subset(path: Option<&PathBuf>) -> CliResult<FiniteSubset> {
    let path = path.ok_or_else(|| usage("--members is required for the subset class"))?;
    let members = read_members(path)
        .map_err(|e| usage(format!("cannot load members from {}: {e}", path.display())))?;
    Ok(FiniteSubset::new(members)?)
}

fn require_k(k: Option<usize>) -> CliResult<usize> {
    k.ok_or_else(|| usage("--k is required for the junta class"))
}

fn clifford_table(n: usize, cache: Option<&PathBuf>) -> CliResult<CliffordTable> {
    Ok(match cache {
        Some(path) => CliffordTable::load_or_build(path, n)?,
        None => enumerate_clifford(n)?,
    })
}

fn cmd_test(args: TestArgs) -> CliResult<ExitCode> {
    let start = Instant::now();
    let u = load_unitary(&args.input)?;
    let n = u.n_qubits();
    let eps = args.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(usage(format!("--epsilon must lie in (0, 1), got {eps}")));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("input".to_string(), json!(args.input.display().to_string()));
    parameters.insert("epsilon".to_string(), json!(eps));
    parameters.insert("n_qubits".to_string(), json!(n));

    let mut subset = None;
    let mut clifford = None;
    let k = match args.class {
        TestClass::Junta => {
            let k = require_k(args.k)?;
            if k == 0 || k > n {
                return Err(usage(format!("--k must satisfy 1 <= k <= n = {n}")));
            }
            parameters.insert("k".to_string(), json!(k));
            k
        }
        _ => 0,
    };
    match args.class {
        TestClass::Subset => {
            let s = load_subset(args.members.as_ref())?;
            if s.dim() != u.dim() {
                return Err(usage(format!(
                    "members act on dimension {}, input on {}",
                    s.dim(),
                    u.dim()
                )));
            }
            parameters.insert(
                "members".to_string(),
                json!(args.members.as_ref().unwrap().display().to_string()),
            );
            parameters.insert("subset_size".to_string(), json!(s.len()));
            parameters.insert("delta".to_string(), json!(s.delta()));
            subset = Some(s);
        }
        TestClass::Permutation => {
            let s = permutation_subset(n)?;
            parameters.insert("subset_size".to_string(), json!(s.len()));
            parameters.insert("delta".to_string(), json!(s.delta()));
            subset = Some(s);
        }
        TestClass::Clifford if n <= 2 => clifford = Some(enumerate_clifford(n)?),
        _ => {}
    }

    let oracle_distance = match args.class {
        TestClass::Orthogonal => {
            Some(dist_to_orthogonal(&u, ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS)?.value)
        }
        TestClass::Junta if n <= JUNTA_MAX_QUBITS => Some(dist_to_juntas(&u, k)?.value),
        TestClass::Pauli => Some(dist_to_pauli_group(&u).value),
        TestClass::Clifford => match &clifford {
            Some(t) => Some(dist_to_clifford(&u, t)?.value),
            None => None,
        },
        TestClass::Subset | TestClass::Permutation => {
            Some(dist_to_finite_subset(&u, subset.as_ref().unwrap())?.value)
        }
        _ => None,
    };

    let class = args.class;
    let base = class as u64 + 1;
    let seed = args.seed.seed;
    let run_one = |trial: usize| -> unitest::Result<TestVerdict> {
        let mut rng = RngStream::new(seed, (base << 32) | trial as u64);
        match class {
            TestClass::Orthogonal => test_orthogonal(&u, eps, &mut rng),
            TestClass::Junta => test_junta(&u, k, eps, &mut rng),
            TestClass::Pauli => test_pauli(&u, eps, &mut rng),
            TestClass::Clifford => test_clifford(&u, eps, &mut rng),
            TestClass::Subset | TestClass::Permutation => {
                test_finite_subset(&u, subset.as_ref().unwrap(), eps, &mut rng)
            }
        }
    };
    let verdicts: Vec<TestVerdict> = (0..args.trials)
        .into_par_iter()
        .map(run_one)
        .collect::<unitest::Result<_>>()?;
    let accept_count = verdicts.iter().filter(|v| v.accepted).count();
    let queries = verdicts.iter().map(|v| v.queries_used).max().unwrap_or(0);
    if let Some(v) = verdicts.first() {
        parameters.insert("policy".to_string(), json!(v.policy));
    }

    let report = RunReport {
        schema: SCHEMA,
        command: format!("test {}", class_name(&class)),
        parameters,
        trials: args.trials,
        accept_count,
        accept_rate: accept_count as f64 / args.trials as f64,
        oracle_distance,
        queries_per_trial: queries,
        seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    print_json(&report);
    eprintln!(
        "accepted {accept_count}/{} trials ({})",
        args.trials,
        if 2 * accept_count > args.trials { "accept majority" } else { "reject majority" }
    );
    Ok(if 2 * accept_count > args.trials {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_oracle(args: OracleArgs) -> CliResult<ExitCode> {
    let u = load_unitary(&args.input)?;
    let n = u.n_qubits();
    let report = match args.class {
        OracleClass::Pauli => dist_to_pauli_group(&u),
        OracleClass::Orthogonal => dist_to_orthogonal(&u, ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS)?,
        OracleClass::Junta => dist_to_juntas(&u, require_k(args.k)?)?,
        OracleClass::Clifford => {
            dist_to_clifford(&u, &clifford_table(n, args.clifford_cache.as_ref())?)?
        }
        OracleClass::Subset => dist_to_finite_subset(&u, &load_subset(args.members.as_ref())?)?,
        OracleClass::Permutation => dist_to_finite_subset(&u, &permutation_subset(n)?)?,
    };
    print_json(&OracleReport {
        schema: SCHEMA,
        command: format!("oracle {}", class_name(&args.class)),
        input: args.input.display().to_string(),
        report,
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(args: GenerateArgs) -> CliResult<ExitCode> {
    let n = args.n;
    let seed = args.seed.seed;
    let mut rng = RngStream::new(seed, 0);
    let (u, distance) = match args.class {
        GenerateClass::Haar => (haar_unitary(n, &mut rng)?, None),
        GenerateClass::Orthogonal => {
            let u = random_orthogonal(n, &mut rng)?;
            let d = dist_to_orthogonal(&u, ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS)?.value;
            (u, Some(d))
        }
        GenerateClass::Clifford => {
            let depth = args.depth.unwrap_or(20 * n + 20);
            let u = random_clifford(n, depth, &mut rng)?;
            let d = if n <= 2 {
                Some(dist_to_clifford(&u, &enumerate_clifford(n)?)?.value)
            } else {
                None
            };
            (u, d)
        }
        GenerateClass::Junta => {
            let k = require_k(args.k)?;
            let u = random_junta(n, k, &mut rng)?;
            let d = if n <= JUNTA_MAX_QUBITS {
                Some(dist_to_juntas(&u, k)?.value)
            } else {
                None
            };
            (u, d)
        }
        GenerateClass::Permutation => {
            let p = match &args.permutation {
                Some(text) => text.parse::<Permutation>()?,
                None => {
                    if n == 0 {
                        return Err(usage("--n must be positive"));
                    }
                    Permutation::random(n, &mut rng)
                }
            };
            if p.len() != n {
                return Err(usage(format!(
                    "permutation acts on {} qubits but --n is {n}",
                    p.len()
                )));
            }
            let u = permutation_matrix(&p)?;
            let d = if n <= PERMUTATION_MAX_QUBITS {
                Some(dist_to_finite_subset(&u, &permutation_subset(n)?)?.value)
            } else {
                None
            };
            (u, d)
        }
    };
    let class = class_name(&args.class);
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{class}-n{n}-seed{seed}.json")));
    write_matrix(&out, &u)?;
    print_json(&GenerateReport {
        schema: SCHEMA,
        command: format!("generate {class}"),
        path: out.display().to_string(),
        n_qubits: n,
        seed,
        oracle_distance: distance,
    });
    match distance {
        Some(d) => eprintln!("wrote {}; class oracle distance {d:.3e}", out.display()),
        None => eprintln!("wrote {}; no class oracle at this size", out.display()),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> CliResult<ExitCode> {
    let report = run_suite(args.suite.into(), args.seed.seed, args.instances)?;
    for c in &report.checks {
        eprintln!(
            "{} {} ({} instances, worst margin {:.3e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.instances,
            c.worst_margin
        );
    }
    print_json(&report);
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    result.unwrap_or_else(|UsageError(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse_in_decimal_and_hex() {
        assert_eq!(parse_seed("42"), Ok(42));
        assert_eq!(parse_seed("0xC0FFEE"), Ok(0xC0FFEE));
        assert_eq!(parse_seed("0X2a"), Ok(42));
        assert!(parse_seed("0xZZ").is_err());
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn class_names_match_subcommands() {
        assert_eq!(class_name(&TestClass::Permutation), "permutation");
        assert_eq!(class_name(&GenerateClass::Haar), "haar");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
