//! Command-line front end: every pipeline takes JSON (file or stdin) and
//! prints JSON. Fixed seeds make runs byte-reproducible.
//!
//! Exit codes: 0 success, 2 malformed input (bad JSON, wrong schema,
//! unreadable file), 3 mathematical precondition failure; in both error
//! cases a `{"error": name, "message": ...}` envelope goes to stderr.

use clap::{Args, Parser, Subcommand};
use pencils_core::error::Error as MathError;
use pencils_core::json;
use pencils_core::moduli::Sl2;
use pencils_core::numeric::{match_roots, C64, DEFAULT_TOL};
use pencils_core::pencil::{discriminant, standard_basis};
use pencils_core::poised::{fiber_point_image, kernel_subspace, refined_mu, tangent_image};
use pencils_core::reconstruct::{recover_lambdas, solve_sigma};
use pencils_core::suites::{run_all, run_suite, SuiteConfig, SuiteReport, SUITE_NAMES};
use pencils_core::variety::{is_regular, point_from_fiber, theta, ThetaMode};
use serde_json::{json, Value};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pencils",
    about = "Pencils of quadrics: discriminants, second fundamental forms, refined moduli, reconstruction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct VarietyPoint {
    /// Variety JSON ({"n": ..., "lambdas": [[re,im],...]}), path or "-"
    #[arg(long)]
    variety: String,
    /// Point JSON ({"coords": [[re,im],...]}), path or "-"
    #[arg(long)]
    point: String,
    /// Relative tolerance override
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant binary form of a pencil
    Discriminant {
        /// Pencil JSON ({"n", "phi1", "phi2"}), path or "-"
        #[arg(long)]
        input: String,
    },
    /// Simultaneous diagonalization (standard basis) of a good pair
    Diagonalize {
        /// Pencil JSON, path or "-"
        #[arg(long)]
        input: String,
    },
    /// Validate variety parameters
    Variety {
        /// Variety JSON, path or "-"
        #[arg(long)]
        input: String,
    },
    /// Sample the discriminant-map fiber over a binary form
    FiberPoint {
        /// Variety JSON, path or "-"
        #[arg(long)]
        variety: String,
        /// Payload {"psi": binary form, "signs": [0|1,...]}, path or "-"
        #[arg(long)]
        input: String,
    },
    /// Discriminant of the second fundamental form at a point
    Theta {
        #[command(flatten)]
        at: VarietyPoint,
        /// closed | brute | both
        #[arg(long, default_value = "both")]
        mode: String,
    },
    /// Regularity report at a point
    Regular {
        #[command(flatten)]
        at: VarietyPoint,
    },
    /// Kernel of the moduli map at a regular point
    Kernel {
        #[command(flatten)]
        at: VarietyPoint,
    },
    /// Refined moduli sample at a regular point
    Refined {
        #[command(flatten)]
        at: VarietyPoint,
        /// Unimodular 2x2 matrix "a,b,c,d" (real) or 8 comma-separated
        /// numbers (re,im pairs); adds the fiber-sibling image
        #[arg(long)]
        pair: Option<String>,
    },
    /// Injectivity certificate ranks at a regular point
    RankCert {
        #[command(flatten)]
        at: VarietyPoint,
    },
    /// Recover variety parameters from refined samples
    Reconstruct {
        /// Payload {"n": int, "samples": [{"alphas", "v"},...]}, path or "-"
        #[arg(long)]
        input: String,
    },
    /// Run named verification suites
    Verify {
        /// Suite name or "all"
        #[arg(long)]
        suite: String,
        /// Dimension override
        #[arg(long)]
        n: Option<usize>,
        /// Trial count override
        #[arg(long)]
        trials: Option<usize>,
        /// Generator seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Tolerance override
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Input-shape problems exit with 2, mathematical failures with 3.
enum CliError {
    Schema(String),
    Math(MathError),
}

impl CliError {
    fn envelope(&self) -> (Value, u8) {
        match self {
            CliError::Schema(msg) => (
                json!({"error": "SchemaViolation", "message": msg}),
                2,
            ),
            CliError::Math(e) => (
                json!({"error": e.name(), "message": e.to_string()}),
                3,
            ),
        }
    }
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

type CliResult = Result<Value, CliError>;

fn read_payload(path: &str) -> Result<Value, CliError> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| schema(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| schema(format!("cannot read {path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| schema(format!("malformed JSON in {path}: {e}")))
}

/// Parse-phase conversions: structural problems are schema violations
/// (exit 2), while domain validation (distinctness, membership,
/// degeneracy) keeps its mathematical error name (exit 3).
fn parse<T>(r: Result<T, MathError>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        MathError::InvalidInput(msg) => schema(msg),
        other => CliError::Math(other),
    })
}

fn compute<T>(r: Result<T, MathError>) -> Result<T, CliError> {
    r.map_err(CliError::Math)
}

fn parse_pair(text: &str) -> Result<Sl2, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| schema(format!("--pair must be comma-separated numbers: {e}")))?;
    match parts.len() {
        4 => Ok(Sl2::new(
            C64::new(parts[0], 0.0),
            C64::new(parts[1], 0.0),
            C64::new(parts[2], 0.0),
            C64::new(parts[3], 0.0),
        )),
        8 => Ok(Sl2::new(
            C64::new(parts[0], parts[1]),
            C64::new(parts[2], parts[3]),
            C64::new(parts[4], parts[5]),
            C64::new(parts[6], parts[7]),
        )),
        other => Err(schema(format!(
            "--pair needs 4 (real) or 8 (re,im) numbers, got {other}"
        ))),
    }
}

fn load_variety_point(
    at: &VarietyPoint,
) -> Result<
    (
        pencils_core::variety::DiagonalIntersection,
        pencils_core::variety::SurfacePoint,
    ),
    CliError,
> {
    let xv = parse(json::variety_from_value(&read_payload(&at.variety)?))?;
    let pt = parse(json::point_from_value(&xv, &read_payload(&at.point)?))?;
    Ok((xv, pt))
}

fn suite_to_value(r: &SuiteReport) -> Value {
    json!({
        "suite": r.suite,
        "trials": r.trials,
        "passed": r.passed,
        "failed": r.failed,
        "maxResidual": r.max_residual,
        "threshold": r.threshold,
        "pass": r.pass,
        "notes": r.notes,
    })
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Discriminant { input } => {
            let p = parse(json::pencil_from_value(&read_payload(&input)?))?;
            let d = compute(discriminant(&p))?;
            Ok(json::binary_form_to_value(&d))
        }
        Command::Diagonalize { input } => {
            let p = parse(json::pencil_from_value(&read_payload(&input)?))?;
            let sb = compute(standard_basis(&p))?;
            let columns: Vec<Value> = (0..sb.basis.cols())
                .map(|j| json::cvec_to_value(&sb.basis.column(j)))
                .collect();
            Ok(json!({
                "roots": json::cvec_to_value(&sb.roots),
                "basis": Value::Array(columns),
            }))
        }
        Command::Variety { input } => {
            let xv = parse(json::variety_from_value(&read_payload(&input)?))?;
            Ok(json::variety_to_value(&xv))
        }
        Command::FiberPoint { variety, input } => {
            let xv = parse(json::variety_from_value(&read_payload(&variety)?))?;
            let payload = read_payload(&input)?;
            let obj = payload
                .as_object()
                .ok_or_else(|| schema("fiber-point payload must be an object"))?;
            let psi = parse(json::binary_form_from_value(
                obj.get("psi")
                    .ok_or_else(|| schema("payload needs \"psi\""))?,
            ))?;
            let signs: Vec<bool> = obj
                .get("signs")
                .and_then(Value::as_array)
                .ok_or_else(|| schema("payload needs \"signs\" (array of 0/1)"))?
                .iter()
                .map(|v| match v {
                    Value::Bool(b) => Ok(*b),
                    Value::Number(x) => Ok(x.as_f64().unwrap_or(0.0) != 0.0),
                    _ => Err(schema("signs entries must be 0/1 or booleans")),
                })
                .collect::<Result<_, _>>()?;
            let (point, general) = compute(point_from_fiber(&xv, &psi, &signs))?;
            Ok(json!({
                "point": json::point_to_value(&point),
                "phiGeneral": general,
            }))
        }
        Command::Theta { at, mode } => {
            let (xv, pt) = load_variety_point(&at)?;
            let tol = at.tol.unwrap_or(DEFAULT_TOL);
            match mode.as_str() {
                "closed" => {
                    let t = compute(theta(&xv, &pt, ThetaMode::Closed))?;
                    Ok(json!({"closed": json::binary_form_to_value(&t)}))
                }
                "brute" => {
                    let t = compute(theta(&xv, &pt, ThetaMode::Brute))?;
                    Ok(json!({"brute": json::binary_form_to_value(&t)}))
                }
                "both" => {
                    let closed = compute(theta(&xv, &pt, ThetaMode::Closed))?;
                    let brute = compute(theta(&xv, &pt, ThetaMode::Brute))?;
                    let agree = (|| -> Result<bool, MathError> {
                        let rc = closed.finite_roots(DEFAULT_TOL)?;
                        let rb = brute.finite_roots(DEFAULT_TOL)?;
                        Ok(match_roots(&rc, &rb)?.max_distance < tol.max(1e-7))
                    })();
                    Ok(json!({
                        "closed": json::binary_form_to_value(&closed),
                        "brute": json::binary_form_to_value(&brute),
                        "match": compute(agree)?,
                    }))
                }
                other => Err(schema(format!(
                    "--mode must be closed, brute, or both; got \"{other}\""
                ))),
            }
        }
        Command::Regular { at } => {
            let (xv, pt) = load_variety_point(&at)?;
            let report = compute(is_regular(&xv, &pt))?;
            Ok(json::regularity_to_value(&report))
        }
        Command::Kernel { at } => {
            let (xv, pt) = load_variety_point(&at)?;
            let k = compute(kernel_subspace(&xv, &pt))?;
            Ok(json!({
                "uGen": Value::Array(k.u_gen.iter().map(|u| json::cvec_to_value(u)).collect()),
                "v0": json::cvec_to_value(&k.v[0]),
                "v1": json::cvec_to_value(&k.v[1]),
                "v2": json::cvec_to_value(&k.v[2]),
                "alphas": json::cvec_to_value(&k.alphas),
            }))
        }
        Command::Refined { at, pair } => {
            let (xv, pt) = load_variety_point(&at)?;
            let sample = compute(refined_mu(&xv, &pt))?;
            let mut out = json::refined_sample_to_value(&sample);
            if let Some(text) = pair {
                let g = parse_pair(&text)?;
                let image = compute(fiber_point_image(&xv, &pt, &g))?;
                out.as_object_mut()
                    .expect("object")
                    .insert("fiberImage".into(), json::refined_sample_to_value(&image));
            }
            Ok(out)
        }
        Command::RankCert { at } => {
            let (xv, pt) = load_variety_point(&at)?;
            if xv.n() <= 4 {
                return Err(CliError::Math(MathError::DimensionTooSmall(format!(
                    "rank-5 certificate needs dim > 4, got {}",
                    xv.n()
                ))));
            }
            let image = compute(tangent_image(&xv, &pt))?;
            Ok(json!({
                "rankT4": image.rank_t4,
                "rankT5": image.rank_t5,
                "certificate": image.rank_t4 == 4 && image.rank_t5 == 5,
            }))
        }
        Command::Reconstruct { input } => {
            let payload = read_payload(&input)?;
            let obj = payload
                .as_object()
                .ok_or_else(|| schema("reconstruct payload must be an object"))?;
            let n = obj
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| schema("payload needs integer \"n\""))? as usize;
            let samples = obj
                .get("samples")
                .and_then(Value::as_array)
                .ok_or_else(|| schema("payload needs \"samples\""))?
                .iter()
                .map(|v| parse(json::refined_sample_from_value(v)))
                .collect::<Result<Vec<_>, _>>()?;
            let (sigma, residual) = compute(solve_sigma(&samples, n))?;
            let lambdas = compute(recover_lambdas(&sigma))?;
            Ok(json!({
                "sigma": json::sigma_to_value(&sigma),
                "lambdas": json::cvec_to_value(&lambdas),
                "residual": residual,
            }))
        }
        Command::Verify {
            suite,
            n,
            trials,
            seed,
            tol,
        } => {
            let cfg = SuiteConfig {
                n,
                trials,
                seed,
                tol,
            };
            if suite == "all" {
                let reports = run_all(&cfg);
                let pass = reports.iter().all(|r| r.pass);
                Ok(json!({
                    "suites": Value::Array(reports.iter().map(suite_to_value).collect()),
                    "pass": pass,
                }))
            } else {
                if !SUITE_NAMES.contains(&suite.as_str()) {
                    return Err(schema(format!(
                        "unknown suite \"{suite}\"; known: {}",
                        SUITE_NAMES.join(", ")
                    )));
                }
                let report = compute(run_suite(&suite, &cfg))?;
                Ok(suite_to_value(&report))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(value) => {
            println!("{}", value);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (envelope, code) = e.envelope();
            eprintln!("{}", envelope);
            ExitCode::from(code)
        }
    }
}
