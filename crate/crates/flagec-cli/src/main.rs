//! Batch front end: build codes from definition files, run the
//! distinguishability checks and fault-injection campaigns, render the
//! fault tables and dump measurement circuits.
//!
//! Exit codes: 0 on success (and passing verification), 1 when a
//! verification campaign reports failures, 2 for usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use flagec::circuit::{build_flag_circuit, build_nonflag_circuit, decompose_operator};
use flagec::codefile::load_code;
use flagec::consecutive::{
    consecutive_set, distinguishable_oracle, lemma1_check_x, lemma1_check_z, lemma3_check,
    theorem2_check, DistinguishabilityReport, SetKind,
};
use flagec::css::{covering_cap, CssCode};
use flagec::pauli::Pauli;
use flagec::protocol::{MeasurementEnv, ProtocolEnv, ProtocolOptions};
use flagec::verify::{
    render_tables, reproduce_fault_tables, verify_def4, verify_def9, CampaignOptions,
};

#[derive(Parser)]
#[command(
    name = "flagec",
    about = "Cyclic CSS codes with flag fault-tolerant error correction, verified by exhaustive fault injection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a definition file and print its parameters.
    Build(BuildArgs),
    /// Check distinguishability of consecutive error sets.
    Distinguish(DistinguishArgs),
    /// Run a fault-injection verification campaign.
    Verify(VerifyArgs),
    /// Render the fault-class tables against their listed procedures.
    Tables(TablesArgs),
    /// Dump a measurement circuit, one location per line.
    Circuit(CircuitArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Code definition file.
    code: PathBuf,
}

#[derive(Args)]
struct DistinguishArgs {
    code: PathBuf,
    /// Which check to run.
    #[arg(long, value_enum)]
    method: Method,
    /// Error set kind for the oracle method.
    #[arg(long, value_enum, default_value_t = Kind::Product)]
    kind: Kind,
    /// Cyclic shift of the error set (oracle method).
    #[arg(long, default_value_t = 0)]
    l: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Oracle,
    Lemma1,
    Lemma3,
    Theorem2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    X,
    Z,
    Product,
}

impl Kind {
    fn to_set_kind(self) -> SetKind {
        match self {
            Kind::X => SetKind::X,
            Kind::Z => SetKind::Z,
            Kind::Product => SetKind::Product,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    code: PathBuf,
    /// Which protocol to verify.
    #[arg(long, value_enum)]
    protocol: Protocol,
    /// Measured operator (sparse "X1 X11 X21" or dense "IXZ..."),
    /// required for the measurement protocol.
    #[arg(long)]
    operator: Option<String>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// High-weight input samples for the any-input condition.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Worker threads for the campaign (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Ftec,
    Measure,
}

#[derive(Args)]
struct TablesArgs {
    code: PathBuf,
    /// Operator measured for the measurement-protocol table (defaults to
    /// the code's first X-type logical).
    #[arg(long)]
    operator: Option<String>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Args)]
struct CircuitArgs {
    code: PathBuf,
    /// 1-based generator index in measurement order.
    #[arg(long, conflicts_with = "operator")]
    generator: Option<usize>,
    /// Operator to measure instead of a generator.
    #[arg(long)]
    operator: Option<String>,
    /// Emit the bare parity circuit without flag wires.
    #[arg(long)]
    no_flag: bool,
}

#[derive(Serialize)]
struct DistinguishJson<'a> {
    code: &'a str,
    kind: &'a str,
    l: usize,
    verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<[String; 2]>,
    method: &'a str,
    elapsed_ms: u128,
}

fn distinguish_json(
    code: &CssCode,
    kind: &str,
    l: usize,
    report: &DistinguishabilityReport,
    elapsed_ms: u128,
) -> String {
    let row = DistinguishJson {
        code: code.label(),
        kind,
        l,
        verdict: report.verdict,
        witness: report
            .witness
            .as_ref()
            .map(|(a, b)| [a.sparse_string(), b.sparse_string()]),
        method: match report.method {
            flagec::consecutive::Method::Oracle => "oracle",
            flagec::consecutive::Method::Lemma1 => "lemma1",
            flagec::consecutive::Method::Lemma3 => "lemma3",
        },
        elapsed_ms,
    };
    serde_json::to_string_pretty(&row).expect("report serializes")
}

fn fail_usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn parse_operator(code: &CssCode, text: &str) -> Result<Pauli, String> {
    Pauli::parse(text, code.n()).map_err(|e| format!("invalid operator {text:?}: {e}"))
}

fn campaign_options_for(code: &CssCode) -> ProtocolOptions {
    let cap = covering_cap(code).unwrap_or(flagec::MinWeightDecoder::DEFAULT_CAP);
    ProtocolOptions {
        cap,
        ..Default::default()
    }
}

fn run_build(args: &BuildArgs) -> Result<ExitCode, String> {
    let code = load_code(&args.code).map_err(|e| e.to_string())?;
    let (dx, dz) = code.classical_distances();
    let fmt_distance = |d: Option<flagec::Distance>| match d {
        Some(flagec::Distance::Exact(v)) => v.to_string(),
        Some(flagec::Distance::ExceedsCap { cap }) => format!(">{cap}"),
        None => "-".to_string(),
    };
    let quantum3 = code.quantum_distance_at_least(3).is_ok();
    println!(
        "{}: [[{},{}]] r_x={} r_z={} cyclic={} d_x={} d_z={} quantum distance >= 3: {}",
        code.label(),
        code.n(),
        code.k(),
        code.rx(),
        code.rz(),
        code.is_cyclic(),
        fmt_distance(dx),
        fmt_distance(dz),
        quantum3
    );
    if let Some(logicals) = code.logicals() {
        let report = code.validate_logicals(logicals);
        println!(
            "logical table: {} pairs, {}",
            logicals.len(),
            if report.is_clean() {
                "all checks pass"
            } else {
                "VIOLATIONS"
            }
        );
        if !report.is_clean() {
            print!("{report}");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_distinguish(args: &DistinguishArgs) -> Result<ExitCode, String> {
    let code = load_code(&args.code).map_err(|e| e.to_string())?;
    if args.l >= code.n() {
        return Err(format!(
            "shift {} out of range 0..={}",
            args.l,
            code.n() - 1
        ));
    }
    match args.method {
        Method::Oracle => {
            let start = Instant::now();
            let set = consecutive_set(args.kind.to_set_kind(), args.l, code.n());
            let report = distinguishable_oracle(&code, &set);
            let kind = match args.kind {
                Kind::X => "x",
                Kind::Z => "z",
                Kind::Product => "product",
            };
            println!(
                "{}",
                distinguish_json(&code, kind, args.l, &report, start.elapsed().as_millis())
            );
            Ok(if report.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Method::Lemma1 => {
            let start = Instant::now();
            let (kind, report) = match args.kind {
                Kind::X => ("x", lemma1_check_x(code.hz())),
                _ => ("z", lemma1_check_z(code.hx())),
            };
            println!(
                "{}",
                distinguish_json(&code, kind, 0, &report, start.elapsed().as_millis())
            );
            Ok(if report.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Method::Lemma3 => {
            let start = Instant::now();
            let matrix = match args.kind {
                Kind::X => code.hz(),
                _ => code.hx(),
            };
            let report = lemma3_check(matrix).map_err(|e| e.to_string())?;
            let kind = match args.kind {
                Kind::X => "x",
                _ => "z",
            };
            println!(
                "{}",
                distinguish_json(&code, kind, 0, &report, start.elapsed().as_millis())
            );
            Ok(if report.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Method::Theorem2 => {
            let start = Instant::now();
            let report = theorem2_check(&code);
            let passed = report.per_shift.iter().filter(|r| r.verdict).count();
            let mut rows = Vec::new();
            for (l, shift) in report.per_shift.iter().enumerate() {
                rows.push(
                    serde_json::from_str::<serde_json::Value>(&distinguish_json(
                        &code, "product", l, shift, 0,
                    ))
                    .expect("row serializes"),
                );
            }
            let out = serde_json::json!({
                "code": code.label(),
                "method": "theorem2",
                "shifts_passed": passed,
                "shifts_total": report.per_shift.len(),
                "all_pass": report.all_pass,
                "per_shift": rows,
                "elapsed_ms": start.elapsed().as_millis(),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("report serializes")
            );
            println!("{passed}/{} shifts pass", report.per_shift.len());
            Ok(if report.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn report_dir() -> PathBuf {
    std::env::var_os("FLAGEC_REPORT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let code = load_code(&args.code).map_err(|e| e.to_string())?;
    let options = campaign_options_for(&code);
    let campaign = CampaignOptions {
        seed: args.seed,
        samples: args.samples,
    };
    let (result, file_stem) = match args.protocol {
        Protocol::Ftec => {
            let env = ProtocolEnv::new(&code, options);
            (
                verify_def4(&env, &campaign),
                format!("ftec_{}", code.label()),
            )
        }
        Protocol::Measure => {
            let text = args
                .operator
                .as_ref()
                .ok_or("--operator is required for the measurement protocol")?;
            let operator = parse_operator(&code, text)?;
            let menv = MeasurementEnv::new(&code, &operator, options).map_err(|e| e.to_string())?;
            (
                verify_def9(&menv, &campaign),
                format!(
                    "measure_{}_{}",
                    code.label(),
                    operator.sparse_string().replace(' ', "_")
                ),
            )
        }
    };
    let path = report_dir().join(format!("{file_stem}.json"));
    std::fs::write(&path, result.to_json()).map_err(|e| format!("writing {path:?}: {e}"))?;
    println!(
        "{}: {} cases, {} failures (report: {})",
        result.protocol,
        result.totals.cases,
        result.totals.failures,
        path.display()
    );
    for failure in result.failures.iter().take(10) {
        println!(
            "  FAIL [{}] {} -- {}",
            failure.branch, failure.case, failure.condition
        );
    }
    Ok(if result.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_tables(args: &TablesArgs) -> Result<ExitCode, String> {
    let code = load_code(&args.code).map_err(|e| e.to_string())?;
    let options = campaign_options_for(&code);
    let campaign = CampaignOptions {
        seed: args.seed,
        samples: 0,
    };
    let env = ProtocolEnv::new(&code, options);
    let def4 = verify_def4(&env, &campaign);
    let operator = match &args.operator {
        Some(text) => parse_operator(&code, text)?,
        None => {
            let logicals = code.logicals().ok_or("code carries no logical operators")?;
            logicals[0].0.clone()
        }
    };
    let menv = MeasurementEnv::new(&code, &operator, options).map_err(|e| e.to_string())?;
    let def9 = verify_def9(&menv, &campaign);
    let tables = reproduce_fault_tables(&def4, &def9);
    print!("{}", render_tables(&tables));
    println!(
        "\ncampaigns: ftec {} failures, measurement {} failures (operator {})",
        def4.totals.failures,
        def9.totals.failures,
        operator.sparse_string()
    );
    Ok(if tables.all_pass && def4.passed() && def9.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_circuit(args: &CircuitArgs) -> Result<ExitCode, String> {
    let code = load_code(&args.code).map_err(|e| e.to_string())?;
    let operator = match (&args.generator, &args.operator) {
        (Some(index), None) => {
            let gens = code.generators();
            if *index == 0 || *index > gens.len() {
                return Err(format!(
                    "generator index {index} out of range 1..={}",
                    gens.len()
                ));
            }
            gens[*index - 1].pauli.clone()
        }
        (None, Some(text)) => parse_operator(&code, text)?,
        _ => return Err("choose exactly one of --generator or --operator".to_string()),
    };
    let circuit = if args.no_flag {
        build_nonflag_circuit(&operator).map_err(|e| e.to_string())?
    } else {
        let decomposition = decompose_operator(&operator).map_err(|e| e.to_string())?;
        build_flag_circuit(decomposition)
    };
    print!("{}", circuit.dump());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(args) => run_build(args),
        Command::Distinguish(args) => run_distinguish(args),
        Command::Verify(args) => run_verify(args),
        Command::Tables(args) => run_tables(args),
        Command::Circuit(args) => run_circuit(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => fail_usage(message),
    }
}
