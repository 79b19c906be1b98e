use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jetchar::basefield::FieldConfig;
use jetchar::characters::SolveOptions;
use jetchar::groups::{by_name, CATALOG};
use jetchar::parse::{parse_ratfunc, Origin};
use jetchar::report::{analyze_group, AnalysisRequest};
use jetchar::spec::{load_spec, resolve_trunc, SpecFile};
use jetchar::verify::{oracle_trials, run_case, run_properties, Context, Suite, DEFAULT_CASES};
use jetchar::{Error, Result};

#[derive(Parser)]
#[command(name = "jetchar", version, about = "Differential characters and Manin kernels of group laws over Q(t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characters, primitive basis and kernel report for a group.
    Analyze(AnalyzeArgs),
    /// Run a randomized property suite.
    Verify(VerifyArgs),
    /// Jet-point oracle trials.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Catalog groups.
    Groups {
        #[command(subcommand)]
        command: GroupsCommand,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Catalog name such as ga, gm, legendre or ga^2*gm.
    name: Option<String>,
    /// Group spec file instead of a catalog name.
    #[arg(long, conflicts_with = "name")]
    spec: Option<PathBuf>,
    #[arg(long)]
    max_order: Option<usize>,
    /// Truncation degree D (default: spec file, then JETCHAR_TRUNC_DEFAULT, then 8).
    #[arg(long)]
    trunc: Option<u32>,
    /// Legendre parameter, a rational function in t.
    #[arg(long, default_value = "t")]
    lambda: String,
    /// Accepted for uniformity; the analysis itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Treat t as a constant (zero derivation on Q(t)).
    #[arg(long)]
    constant_field: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cases per property.
    #[arg(long, default_value_t = DEFAULT_CASES)]
    cases: usize,
    /// Run a single property instead of a whole suite.
    #[arg(long)]
    property: Option<String>,
    /// Replay one case of --property from its reproduction seed.
    #[arg(long, requires = "property")]
    case_seed: Option<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Valid and perturbed jets of a scheme spec, one JSON record per trial.
    Jets {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Override the spec's maximal jet level.
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GroupsCommand {
    List,
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        print!("{}", text);
        return Ok(());
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<i32> {
    let field = if a.constant_field {
        FieldConfig::constants_only()
    } else {
        FieldConfig::standard()
    };
    let mut solve = SolveOptions::default();
    let (law, lambda) = match (&a.name, &a.spec) {
        (_, Some(path)) => {
            let spec = match load_spec(path)? {
                SpecFile::Group(g) => g,
                SpecFile::Scheme(_) => {
                    return Err(Error::Input(format!("{} is a scheme spec, not a group", path.display())))
                }
            };
            if let Some(k) = spec.ansatz_degree {
                solve.ansatz_degree = k;
            }
            let d = resolve_trunc(a.trunc, spec.trunc)?;
            (spec.law(d)?, None)
        }
        (Some(name), None) => {
            let lambda = parse_ratfunc(
                &a.lambda,
                &Origin {
                    path: "--lambda".into(),
                    line: 1,
                    col: 1,
                },
            )?;
            let d = resolve_trunc(a.trunc, None)?;
            let law = by_name(name, d, &lambda)?;
            let lambda = name.contains("legendre").then_some(lambda);
            (law, lambda)
        }
        (None, None) => return Err(Error::Input("give a catalog group name or --spec <path>".into())),
    };
    let mut req = AnalysisRequest::new(law);
    req.lambda = lambda;
    req.max_order = a.max_order;
    req.field = field;
    req.solve = solve;
    let report = analyze_group(&req)?;
    match &a.json {
        Some(p) if p == Path::new("-") => write_out(p, &report.to_json())?,
        Some(p) => {
            write_out(p, &report.to_json())?;
            print!("{}", report.summary());
        }
        None => print!("{}", report.summary()),
    }
    Ok(0)
}

fn cmd_verify(v: VerifyArgs) -> Result<i32> {
    let suite: Suite = v.suite.parse()?;
    if v.cases == 0 {
        return Err(Error::Input("--cases must be positive".into()));
    }
    let mut ctx = Context::new();
    let res = match (&v.property, v.case_seed) {
        (Some(p), _) if !Suite::All.properties().contains(&p.as_str()) => {
            return Err(Error::Input(format!("unknown property '{}'", p)))
        }
        (Some(p), Some(seed)) => {
            return match run_case(p, seed, &mut ctx) {
                Ok(()) => {
                    println!("{} (seed {}): ok", p, seed);
                    Ok(0)
                }
                Err(e) => {
                    println!("{} (seed {}): {}", p, seed, e);
                    Ok(1)
                }
            };
        }
        (Some(p), None) => run_properties(p, &[p.as_str()], v.seed, v.cases, &mut ctx),
        (None, _) => run_properties(&suite.to_string(), &suite.properties(), v.seed, v.cases, &mut ctx),
    };
    for t in &res.properties {
        println!(
            "{:<24} {:>5} cases  {}",
            t.property,
            t.cases,
            if t.failures == 0 {
                "ok".to_string()
            } else {
                format!("{} FAILED", t.failures)
            }
        );
    }
    for f in &res.failures {
        println!(
            "failure: {} case {} (seed {}) [{}] {}",
            f.property, f.case, f.seed, f.invariant, f.detail
        );
    }
    println!(
        "suite {}: {} cases, {} failures (seed {})",
        res.suite,
        res.cases,
        res.failures.len(),
        res.seed
    );
    if let Some(p) = &v.json {
        write_out(p, &(serde_json::to_string_pretty(&res).expect("serializes") + "\n"))?;
    }
    Ok(if res.passed() { 0 } else { 1 })
}

fn cmd_oracle(spec: &Path, seed: u64, trials: usize, max_order: Option<usize>, json: Option<PathBuf>) -> Result<i32> {
    let s = match load_spec(spec)? {
        SpecFile::Scheme(s) => s,
        SpecFile::Group(_) => return Err(Error::Input(format!("{} is a group spec, not a scheme", spec.display()))),
    };
    let n = max_order.unwrap_or(s.max_order);
    let records = oracle_trials(&s.scheme, &s.points, n, trials, seed, &FieldConfig::standard())?;
    let lines: String = records
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializes") + "\n")
        .collect();
    match &json {
        Some(p) => write_out(p, &lines)?,
        None => print!("{}", lines),
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    eprintln!("{}: {} jets checked, {} failures", s.name, records.len(), failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(v) => cmd_verify(v),
        Command::Oracle {
            command:
                OracleCommand::Jets {
                    spec,
                    seed,
                    trials,
                    max_order,
                    json,
                },
        } => cmd_oracle(&spec, seed, trials, max_order, json),
        Command::Groups {
            command: GroupsCommand::List,
        } => {
            for (name, about) in CATALOG {
                println!("{:<14} {}", name, about);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
