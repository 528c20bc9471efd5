//! Command-line front end: job configs in, JSON/CSV reports out.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub use config::{parse_and_validate, parse_config, ConfigError, Format, JobSpec, RunConfig, SolveMethod, ValidatedConfig};

use crate::measure;
use crate::solver::{self, SolveResult};
use crate::variety::act;
use crate::verify::{self, HolderOptions, SolverFn};
use crate::{Error, Result, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dbar-cone", version, about = "Solve the dbar-equation on weighted homogeneous varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the job described by a TOML config.
    Run {
        config: PathBuf,
        /// Omit wall-clock fields so reruns are byte-identical.
        #[arg(long)]
        reproducible: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Check { config: PathBuf },
    /// List the built-in varieties.
    Fixtures,
}

/// Options that override or complement the config file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub reproducible: bool,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Serialize)]
struct SolveRow {
    point: Vec<C64>,
    #[serde(flatten)]
    result: SolveResult,
}

#[derive(Serialize)]
struct ScaledRow {
    point: Vec<C64>,
    s: C64,
    scaled: SolveResult,
    direct: SolveResult,
    discrepancy: f64,
}

#[derive(Serialize)]
struct ResidualRow {
    anchor: usize,
    s: C64,
    x: Vec<C64>,
    point: Vec<C64>,
    residual_s: f64,
    residual: f64,
    noisy: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn solver_for<'a>(cfg: &'a ValidatedConfig, method: SolveMethod) -> Box<SolverFn<'a>> {
    let params = &cfg.config.quadrature;
    match method {
        SolveMethod::Direct => Box::new(move |z: &[C64]| solver::solve(&cfg.variety, &cfg.form, z, params)),
        SolveMethod::L2 => Box::new(move |z: &[C64]| solver::solve_l2(&cfg.variety, &cfg.form, z, params)),
    }
}

/// Executes the job and returns the `result` section of the report.
pub fn execute(cfg: &ValidatedConfig, seed: u64) -> Result<Value> {
    let params = &cfg.config.quadrature;
    let (variety, form) = (&cfg.variety, &cfg.form);
    match &cfg.config.job {
        JobSpec::Solve { points, method } => {
            let solve = solver_for(cfg, *method);
            let rows = points
                .iter()
                .map(|p| {
                    Ok(SolveRow {
                        point: p.clone(),
                        result: solve(p)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({ "method": method, "rows": rows }))
        }
        JobSpec::SolveScaled { points, scales } => {
            let mut rows = Vec::new();
            for p in points {
                for &s in scales {
                    let scaled = solver::solve_scaled(variety, form, p, s, params)?;
                    let q = act(s, variety.weights(), p);
                    let direct = solver::solve(variety, form, &q, params)?;
                    let discrepancy = (scaled.value - direct.value).norm() / (1.0 + direct.value.norm());
                    rows.push(ScaledRow {
                        point: p.clone(),
                        s,
                        scaled,
                        direct,
                        discrepancy,
                    });
                }
            }
            let max = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
            Ok(json!({ "max_discrepancy": max, "rows": rows }))
        }
        JobSpec::Residual {
            anchors,
            samples_per_anchor,
            fd_step,
            method,
        } => {
            let solve = solver_for(cfg, *method);
            let link = measure::sample_link(variety, *anchors, seed)?;
            let mut reports = Vec::new();
            let mut rows = Vec::new();
            for (i, anchor) in link.points.iter().enumerate() {
                let sub_seed = seed.wrapping_add(i as u64 + 1);
                let r = verify::dbar_residual(variety, form, &*solve, anchor, *samples_per_anchor, *fd_step, sub_seed)?;
                rows.extend(r.samples.iter().map(|s| ResidualRow {
                    anchor: i,
                    s: s.s,
                    x: s.x.clone(),
                    point: s.point.clone(),
                    residual_s: s.residual_s,
                    residual: s.residual,
                    noisy: s.noisy,
                }));
                reports.push(json!({
                    "anchor": r.anchor,
                    "max": r.max,
                    "median": r.median,
                    "noisy": r.noisy,
                }));
            }
            let values: Vec<f64> = rows.iter().map(|r| r.residual).collect();
            Ok(json!({
                "method": method,
                "median": verify::median(&values),
                "max": values.iter().copied().fold(0.0, f64::max),
                "noisy": rows.iter().filter(|r| r.noisy).count(),
                "anchors": reports,
                "rows": rows,
            }))
        }
        JobSpec::Holder {
            theta,
            radius,
            pairs,
            scales,
            path_steps,
            anchors,
        } => {
            let opts = HolderOptions {
                theta: *theta,
                radius: *radius,
                n_pairs: *pairs,
                scales: scales.clone(),
                seed,
                path_steps: *path_steps,
                anchors: *anchors,
                ..HolderOptions::default()
            };
            let solve = solver_for(cfg, SolveMethod::Direct);
            let report = verify::holder_report(variety, form, &*solve, &opts)?;
            let mut v = to_value(&report);
            if let Value::Object(m) = &mut v {
                if let Some(p) = m.remove("pairs") {
                    m.insert("rows".into(), p);
                }
            }
            Ok(v)
        }
        JobSpec::L2 { radius, samples } => {
            let report = verify::l2_report(variety, form, *radius, *samples, seed, params)?;
            Ok(to_value(&report))
        }
        JobSpec::Scaling {
            radii,
            samples,
            integrand,
        } => Ok(to_value(&verify::measure_scaling_check(variety, radii, *samples, seed, *integrand)?)),
        JobSpec::ThetaCrosscheck { points, count } => {
            let cone = variety.theta_cone()?;
            let mut cone_points = points.clone();
            if *count > 0 {
                let pulled = form.theta_pullback(variety.weights())?;
                let link = measure::sample_link(&cone, *count, seed)?;
                let mut rng = measure::rng_for(seed, u64::MAX);
                let n = cone.ambient_dim() as f64;
                for p in link.points {
                    let t = pulled.support_radius() / n.sqrt() * rng.random_range(0.05..1.0);
                    cone_points.push(p.iter().map(|c| c * t).collect());
                }
            }
            let rows = cone_points
                .iter()
                .map(|z| solver::theta_transfer_at(variety, form, z, params))
                .collect::<Result<Vec<_>>>()?;
            let max = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
            Ok(json!({ "max_discrepancy": max, "rows": rows }))
        }
    }
}

fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Full report for a validated config, and the exit code it implies.
pub fn run_validated(cfg: &ValidatedConfig, opts: &RunOptions) -> (Value, i32) {
    let seed = opts.seed.or(cfg.config.seed).unwrap_or(0);
    let start = std::time::Instant::now();
    let outcome = match opts.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(cfg, seed)),
            Err(e) => Err(Error::InvalidParameter {
                name: "threads",
                reason: e.to_string(),
            }),
        },
        None => execute(cfg, seed),
    };
    let mut report = Map::new();
    report.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if !opts.reproducible {
        report.insert("timestamp_unix".into(), json!(unix_timestamp()));
        report.insert("elapsed_seconds".into(), json!(start.elapsed().as_secs_f64()));
    }
    report.insert("seed".into(), json!(seed));
    report.insert("job".into(), json!(cfg.config.job.name()));
    report.insert("config".into(), to_value(&cfg.config));
    let code = match outcome {
        Ok(result) => {
            report.insert("status".into(), json!("ok"));
            report.insert("result".into(), result);
            EXIT_OK
        }
        Err(e) => {
            report.insert("status".into(), json!("error"));
            report.insert(
                "error".into(),
                json!({ "kind": error_kind(&e), "message": e.to_string() }),
            );
            EXIT_RUNTIME
        }
    };
    (Value::Object(report), code)
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_into(&key, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten_into(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), "NaN".into())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// CSV view of a report: the main table of the result, one row per entry.
/// Complex numbers and vectors are spread over `name.0`, `name.1`, ... columns.
pub fn report_to_csv(report: &Value) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    if report["status"] != "ok" {
        wtr.write_record(["status", "kind", "message"]).expect("in-memory write");
        wtr.write_record([
            "error",
            report["error"]["kind"].as_str().unwrap_or(""),
            report["error"]["message"].as_str().unwrap_or(""),
        ])
        .expect("in-memory write");
    } else {
        let result = &report["result"];
        let rows: Vec<Value> = match result.get("rows").and_then(Value::as_array) {
            Some(rows) => rows.clone(),
            None => vec![result.clone()],
        };
        let flat: Vec<Vec<(String, String)>> = rows
            .iter()
            .map(|r| {
                let mut out = Vec::new();
                flatten_into("", r, &mut out);
                out
            })
            .collect();
        let mut header: Vec<String> = Vec::new();
        for row in &flat {
            for (k, _) in row {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        wtr.write_record(&header).expect("in-memory write");
        for row in &flat {
            let record: Vec<&str> = header
                .iter()
                .map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or(""))
                .collect();
            wtr.write_record(&record).expect("in-memory write");
        }
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => report_to_csv(report),
    }
}

fn read_config(path: &Path) -> std::result::Result<ValidatedConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_and_validate(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_output(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Fixtures => {
            for f in crate::fixtures::FIXTURES {
                println!("{:<14} {}", f.name, f.description);
            }
            EXIT_OK
        }
        Command::Check { config } => match read_config(&config) {
            Ok(cfg) => {
                println!(
                    "ok: {} job on a variety in C^{} ({} equation(s))",
                    cfg.config.job.name(),
                    cfg.variety.ambient_dim(),
                    cfg.variety.polynomials().len()
                );
                EXIT_OK
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                EXIT_VALIDATION
            }
        },
        Command::Run {
            config,
            reproducible,
            out,
            format,
            seed,
            threads,
        } => {
            if threads == Some(0) {
                eprintln!("error: --threads must be positive");
                return EXIT_VALIDATION;
            }
            let cfg = match read_config(&config) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_VALIDATION;
                }
            };
            let opts = RunOptions {
                reproducible,
                seed,
                threads,
            };
            let (report, code) = run_validated(&cfg, &opts);
            if code != EXIT_OK {
                eprintln!("error: {}", report["error"]["message"].as_str().unwrap_or("runtime failure"));
            }
            let format = format.unwrap_or(cfg.config.output.format);
            let out = out.or_else(|| cfg.config.output.path.as_ref().map(PathBuf::from));
            if let Err(e) = write_output(&render(&report, format), out.as_deref()) {
                eprintln!("error: cannot write report: {e}");
                return EXIT_RUNTIME;
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ValidatedConfig {
        parse_and_validate(text).unwrap()
    }

    const LINE: &str = r#"
seed = 3
[variety]
fixture = "line2"
[form]
kind = "bump-dbar"
h = [{ exponents = [1, 0], re = 1.0 }]
r0 = 0.5
radius = 1.5
[job]
kind = "solve"
points = [[[0.3, 0.1], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
"#;

    #[test]
    fn solve_report_has_rows() {
        let (report, code) = run_validated(&cfg(LINE), &RunOptions::default());
        assert_eq!(code, EXIT_OK);
        assert_eq!(report["status"], "ok");
        assert_eq!(report["result"]["rows"].as_array().unwrap().len(), 2);
        assert!(report.get("timestamp_unix").is_some());
    }

    #[test]
    fn reproducible_reports_are_identical() {
        let c = cfg(LINE);
        let opts = RunOptions {
            reproducible: true,
            ..RunOptions::default()
        };
        let a = render(&run_validated(&c, &opts).0, Format::Json);
        let b = render(&run_validated(&c, &opts).0, Format::Json);
        assert_eq!(a, b);
        assert!(!a.contains("timestamp"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (report, _) = run_validated(&cfg(LINE), &RunOptions::default());
        let text = report_to_csv(&report);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("point.0.0,point.0.1"), "{}", lines[0]);
        assert!(lines[0].contains("value.0"));
    }

    #[test]
    fn runtime_failure_is_reported() {
        let text = LINE.to_string() + "[quadrature]\nmax_panels = 16\nrel_tol = 1e-14\nabs_tol = 1e-30\n";
        let (report, code) = run_validated(&cfg(&text), &RunOptions::default());
        assert_eq!(code, EXIT_RUNTIME, "{report}");
        assert_eq!(report["status"], "error");
        assert!(report["error"]["kind"].is_string());
    }

    #[test]
    fn error_kind_is_variant_name() {
        assert_eq!(error_kind(&Error::NotACone), "NotACone");
        assert_eq!(error_kind(&Error::NoConvergence("x".into())), "NoConvergence");
    }
}
