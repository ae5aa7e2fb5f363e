//! Command-line front end: certification, pipeline stages and the
//! verification harness, with machine-readable JSON/CSV output.
//!
//! Exit codes: 0 ok, 1 verification failed tolerances, 2 rejected input,
//! 3 not-a-center, 64 malformed input, 70 internal numeric failure.

mod output;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use centerpot::field::{CertVerdict, PlanarField};
use centerpot::normal_form::{extract_f, orbital_normal_form, NormalFormVerdict};
use centerpot::period::PeriodSeries;
use centerpot::pipeline::{run_pipeline, run_potential_from_period, PipelineConfig, PipelineError};
use centerpot::verify::GridSpec;

use output::{emit, Payload};

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_NOT_A_CENTER: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_NUMERIC: u8 = 70;

#[derive(Parser)]
#[command(
    name = "centerpot",
    about = "Construct an even potential with the same period function as a planar center",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear-part and reversibility certification of a center candidate.
    Certify(JobArgs),
    /// Orbital normal form: angular profile, residuals, transform.
    Normalform(JobArgs),
    /// Period-function series from the normal form.
    Period(JobArgs),
    /// Even potential constructed from the period series.
    Potential(JobArgs),
    /// Inverse-problem entry: potential directly from {"a": [...]} or {"T": [...]}.
    #[command(name = "potential-from-period")]
    PotentialFromPeriod(JobArgs),
    /// Verification report only (predicted vs measured periods).
    Verify(JobArgs),
    /// Full pipeline with composite JSON report and optional CSV table.
    Pipeline(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Input JSON file ("-" reads stdin).
    input: String,
    /// Truncation order N of the period and potential series.
    #[arg(long, default_value_t = 12)]
    order: usize,
    /// Absolute tolerance on the linear-part trace.
    #[arg(long, default_value_t = 1e-12)]
    tol_lin: f64,
    /// Threshold on radial residuals for the center verdict.
    #[arg(long, default_value_t = 1e-9)]
    tol_center: f64,
    /// Relative ODE tolerance for period measurement.
    #[arg(long, default_value_t = 1e-10)]
    tol_ode: f64,
    /// Relative tolerance of the verification pass verdict.
    #[arg(long, default_value_t = 1e-5)]
    tol_verify: f64,
    /// Energy grid as "min,max,count".
    #[arg(long)]
    grid: Option<String>,
    /// Upper grid energy (shorthand overriding the grid maximum).
    #[arg(long)]
    emax: Option<f64>,
    /// Write the JSON payload here as well as to stdout.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write the verification table as CSV (pipeline/verify only).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Seed for the randomized Abel spot-check energies.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Accepted input documents: a field as monomial lists, a field as a
/// potential, or a raw period sequence for the inverse problem.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDoc {
    degree: Option<u32>,
    #[serde(rename = "P")]
    p: Option<Vec<(u32, u32, f64)>>,
    #[serde(rename = "Q")]
    q: Option<Vec<(u32, u32, f64)>>,
    #[serde(rename = "hamiltonian_V")]
    hamiltonian_v: Option<Vec<f64>>,
    a: Option<Vec<f64>>,
    #[serde(rename = "T")]
    t: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    let args = match &cli.command {
        Command::Certify(a)
        | Command::Normalform(a)
        | Command::Period(a)
        | Command::Potential(a)
        | Command::PotentialFromPeriod(a)
        | Command::Verify(a)
        | Command::Pipeline(a) => a,
    };
    let Some(config) = build_config(args) else {
        return EXIT_USAGE;
    };
    let doc = match read_input(&args.input) {
        Ok(doc) => doc,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };

    match &cli.command {
        Command::Certify(a) => cmd_certify(a, &config, &doc),
        Command::Normalform(a) => cmd_stage(a, &config, &doc, Stage::NormalForm),
        Command::Period(a) => cmd_stage(a, &config, &doc, Stage::Period),
        Command::Potential(a) => cmd_stage(a, &config, &doc, Stage::Potential),
        Command::PotentialFromPeriod(a) => cmd_potential_from_period(a, &config, &doc),
        Command::Verify(a) => cmd_pipeline(a, &config, &doc, false),
        Command::Pipeline(a) => cmd_pipeline(a, &config, &doc, true),
    }
}

fn build_config(args: &JobArgs) -> Option<PipelineConfig> {
    if args.order < 2 {
        eprintln!("error: --order must be at least 2");
        return None;
    }
    let mut grid = GridSpec { e_min: 0.01, e_max: 0.05, count: 5 };
    if let Some(spec) = &args.grid {
        let parts: Vec<&str> = spec.split(',').collect();
        let parsed = (parts.len() == 3)
            .then(|| {
                Some(GridSpec {
                    e_min: parts[0].trim().parse().ok()?,
                    e_max: parts[1].trim().parse().ok()?,
                    count: parts[2].trim().parse().ok()?,
                })
            })
            .flatten();
        match parsed {
            Some(g) => grid = g,
            None => {
                eprintln!("error: --grid expects \"min,max,count\"");
                return None;
            }
        }
    }
    if let Some(emax) = args.emax {
        grid.e_max = emax;
    }
    if !(grid.e_min > 0.0 && grid.e_max >= grid.e_min && grid.count >= 1) {
        eprintln!("error: grid must satisfy 0 < min <= max and count >= 1");
        return None;
    }
    // seed-controlled spot-check energies as fractions of the validity radius
    let mut state = args.seed.wrapping_add(0x9e3779b97f4a7c15);
    let mut next_fraction = || {
        state = splitmix64(state);
        0.2 + 0.4 * (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let abel_check_fractions =
        if args.seed == 0 { vec![0.25, 0.5] } else { vec![next_fraction(), next_fraction()] };
    Some(PipelineConfig {
        order: args.order,
        tau_lin: args.tol_lin,
        tau_center: args.tol_center,
        ode_rtol: args.tol_ode,
        ode_atol: args.tol_ode * 1e-2,
        verify_tol: args.tol_verify,
        grid,
        abel_check_fractions,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn read_input(path: &str) -> Result<InputDoc, String> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| e.to_string())?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

fn parse_field(doc: &InputDoc) -> Result<PlanarField, String> {
    if let Some(v) = &doc.hamiltonian_v {
        if doc.p.is_some() || doc.q.is_some() {
            return Err("give either hamiltonian_V or P/Q, not both".into());
        }
        return PlanarField::from_hamiltonian_v(v).map_err(|e| e.to_string());
    }
    let (Some(p), Some(q)) = (&doc.p, &doc.q) else {
        return Err("field input needs P and Q (or hamiltonian_V)".into());
    };
    let p = centerpot::BivariatePoly::from_triples(p).map_err(|e| e.to_string())?;
    let q = centerpot::BivariatePoly::from_triples(q).map_err(|e| e.to_string())?;
    let degree = doc.degree.unwrap_or_else(|| p.total_degree().max(q.total_degree()).max(1));
    PlanarField::new(p, q, degree).map_err(|e| e.to_string())
}

fn cmd_certify(args: &JobArgs, config: &PipelineConfig, doc: &InputDoc) -> u8 {
    let field = match parse_field(doc) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let record = field.certify(config.tau_lin);
    let rejected = record.verdict == CertVerdict::Rejected;
    let payload = Payload::new("certify").certification(record);
    emit(&payload, args.out_json.as_deref());
    if rejected {
        EXIT_REJECTED
    } else {
        EXIT_OK
    }
}

enum Stage {
    NormalForm,
    Period,
    Potential,
}

fn cmd_stage(args: &JobArgs, config: &PipelineConfig, doc: &InputDoc, stage: Stage) -> u8 {
    let field = match parse_field(doc) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let record = field.certify(config.tau_lin);
    if record.verdict == CertVerdict::Rejected {
        let reason = record.reason.clone();
        let payload = Payload::new(stage_name(&stage))
            .certification(record)
            .error("certify", reason.unwrap_or_default());
        emit(&payload, args.out_json.as_deref());
        return EXIT_REJECTED;
    }

    let nf = match orbital_normal_form(&field, 2 * config.order, config.tau_lin, config.tau_center)
    {
        Ok(nf) => nf,
        Err(e) => {
            let payload = Payload::new(stage_name(&stage))
                .certification(record)
                .error("normal_form", e.to_string());
            emit(&payload, args.out_json.as_deref());
            return EXIT_NUMERIC;
        }
    };
    let mut payload = Payload::new(stage_name(&stage)).certification(record).normal_form(&nf);
    if let NormalFormVerdict::NotCenterToOrder(order) = nf.verdict {
        let payload = payload.error("normal_form", format!("not a center to order {order}"));
        emit(&payload, args.out_json.as_deref());
        return EXIT_NOT_A_CENTER;
    }
    if matches!(stage, Stage::NormalForm) {
        emit(&payload, args.out_json.as_deref());
        return EXIT_OK;
    }

    let f = extract_f(&nf).expect("center verdict checked above");
    let period = match PeriodSeries::from_f(&f) {
        Ok(p) => p,
        Err(e) => {
            let payload = payload.error("period", e.to_string());
            emit(&payload, args.out_json.as_deref());
            return EXIT_NUMERIC;
        }
    };
    payload = payload.period(&period);
    if matches!(stage, Stage::Period) {
        emit(&payload, args.out_json.as_deref());
        return EXIT_OK;
    }

    match run_potential_from_period(&period, config) {
        Ok((potential, checks)) => {
            let payload = payload.potential(&potential).abel_checks(checks);
            emit(&payload, args.out_json.as_deref());
            EXIT_OK
        }
        Err(e) => {
            let payload = payload.error("potential", e.to_string());
            emit(&payload, args.out_json.as_deref());
            EXIT_NUMERIC
        }
    }
}

fn stage_name(stage: &Stage) -> &'static str {
    match stage {
        Stage::NormalForm => "normalform",
        Stage::Period => "period",
        Stage::Potential => "potential",
    }
}

fn cmd_potential_from_period(args: &JobArgs, config: &PipelineConfig, doc: &InputDoc) -> u8 {
    let period = match (&doc.a, &doc.t) {
        (Some(a), None) => PeriodSeries::from_a(a),
        (None, Some(t)) => PeriodSeries::from_t(t),
        _ => {
            eprintln!("error: potential-from-period needs exactly one of \"a\" or \"T\"");
            return EXIT_USAGE;
        }
    };
    let period = match period {
        Ok(p) => p,
        Err(e) => {
            let payload =
                Payload::new("potential-from-period").error("period", e.to_string());
            emit(&payload, args.out_json.as_deref());
            return EXIT_REJECTED;
        }
    };
    match run_potential_from_period(&period, config) {
        Ok((potential, checks)) => {
            let payload = Payload::new("potential-from-period")
                .period(&period)
                .potential(&potential)
                .abel_checks(checks);
            emit(&payload, args.out_json.as_deref());
            EXIT_OK
        }
        Err(e) => {
            let payload = Payload::new("potential-from-period").error("potential", e.to_string());
            emit(&payload, args.out_json.as_deref());
            EXIT_NUMERIC
        }
    }
}

fn cmd_pipeline(args: &JobArgs, config: &PipelineConfig, doc: &InputDoc, composite: bool) -> u8 {
    let field = match parse_field(doc) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let command = if composite { "pipeline" } else { "verify" };
    match run_pipeline(&field, config) {
        Ok(out) => {
            let pass = out.report.pass;
            let mut payload = Payload::new(command);
            if composite {
                payload = payload
                    .certification(out.certification)
                    .normal_form(&out.normal_form)
                    .period(&out.period)
                    .potential(&out.potential);
            }
            let payload = payload.report(&out.report);
            emit(&payload, args.out_json.as_deref());
            if let Some(path) = &args.out_csv {
                if let Err(e) = fs::write(path, out.report.to_csv()) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return EXIT_NUMERIC;
                }
            }
            if pass {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(PipelineError::Rejected { record, reason }) => {
            let payload =
                Payload::new(command).certification(record).error("certify", reason);
            emit(&payload, args.out_json.as_deref());
            EXIT_REJECTED
        }
        Err(PipelineError::NotACenter { order, residual, record }) => {
            let payload = Payload::new(command)
                .certification(*record)
                .not_a_center(order, residual);
            emit(&payload, args.out_json.as_deref());
            EXIT_NOT_A_CENTER
        }
        Err(PipelineError::Stage { stage, message }) => {
            let payload = Payload::new(command).error_static(stage, message);
            emit(&payload, args.out_json.as_deref());
            EXIT_NUMERIC
        }
    }
}
