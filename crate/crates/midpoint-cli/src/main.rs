//! Command-line front end: mesh subdivision, spectral analysis, and C1
//! certification over (degree, valence) batches.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info};

use midpoint::charmap::{self, Verdict};
use midpoint::io;
use midpoint::mesh::{self, PolyMesh};
use midpoint::report;
use midpoint::ringnet::{self, segment_angle, FrameK, NetKind};
use midpoint::spectral;

#[derive(Parser)]
#[command(name = "midpoint", version, about = "Midpoint subdivision kernel and C1 certification")]
struct Cli {
    /// JSON config file; command-line flags take precedence over its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply the degree-n midpoint scheme to a mesh file
    Subdivide(SubdivideArgs),
    /// Spectral report for (degree, valence) cases
    Analyze(BatchArgs),
    /// C1 certificates for (degree, valence) cases
    Certify(BatchArgs),
}

#[derive(Args, Clone)]
struct SubdivideArgs {
    /// Subdivision degree n
    #[arg(short = 'n', long)]
    degree: Option<usize>,
    /// Number of subdivision steps
    #[arg(short = 'k', long)]
    iterations: Option<usize>,
    /// Input mesh (OBJ or OFF)
    #[arg(short = 'i', long)]
    input: Option<PathBuf>,
    /// Output mesh path
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BatchArgs {
    /// Degree n, a range `a..b`, or a comma list
    #[arg(short = 'n', long)]
    degree: Option<String>,
    /// Valence m, a range `a..b`, or a comma list
    #[arg(short = 'm', long)]
    valence: Option<String>,
    /// Net kind override; inferred from the parity of n when omitted
    #[arg(long)]
    kind: Option<KindArg>,
    /// Ring count for exported nets (defaults to the analysis net size)
    #[arg(long)]
    rings: Option<usize>,
    /// Power-iteration convergence tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Power-iteration cap
    #[arg(long)]
    max_iter: Option<usize>,
    /// Concurrent (n, m) cases
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Restrict emitted file kinds
    #[arg(long)]
    format: Option<FormatArg>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Primal,
    Dual,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Obj,
    Json,
    Csv,
}

/// Config-file values; every field can be overridden by a flag.
#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    degree: Option<serde_json::Value>,
    valence: Option<serde_json::Value>,
    kind: Option<String>,
    iterations: Option<usize>,
    rings: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    jobs: Option<usize>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] io::IoError),
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
}

fn usage<S: Into<String>>(msg: S) -> CliError {
    CliError::Usage(msg.into())
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))
        }
    }
}

/// `7`, `2..5` (inclusive), or `3,5,6` -> sorted unique list.
fn parse_list(spec: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let bad = || usage(format!("invalid {what} specification `{spec}`"));
    let mut vals = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            vals.extend(a..=b);
        } else {
            vals.push(part.parse().map_err(|_| bad())?);
        }
    }
    if vals.is_empty() {
        return Err(bad());
    }
    vals.sort_unstable();
    vals.dedup();
    Ok(vals)
}

fn config_list(v: &serde_json::Value, what: &str) -> Result<Vec<usize>, CliError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_u64()
            .map(|x| vec![x as usize])
            .ok_or_else(|| usage(format!("invalid {what} in config"))),
        serde_json::Value::String(s) => parse_list(s, what),
        _ => Err(usage(format!("invalid {what} in config"))),
    }
}

fn extraordinary_summary(m: &PolyMesh<[f64; 3]>) -> String {
    let (ev, ef) = m.extraordinary_counts();
    format!(
        "{} vertices, {} faces, {} extraordinary vertices, {} extraordinary faces",
        m.vertices.len(),
        m.faces.len(),
        ev,
        ef
    )
}

fn cmd_subdivide(args: &SubdivideArgs, cfg: &FileConfig) -> Result<bool, CliError> {
    let n = args.degree.or(cfg.degree.as_ref().and_then(|v| v.as_u64().map(|x| x as usize)));
    let n = n.ok_or_else(|| usage("--degree is required"))?;
    if n < 1 {
        return Err(usage("--degree must be at least 1"));
    }
    let k = args.iterations.or(cfg.iterations).unwrap_or(1);
    if k < 1 {
        return Err(usage("--iterations must be at least 1"));
    }
    let input = args
        .input
        .clone()
        .or_else(|| cfg.input.clone())
        .ok_or_else(|| usage("--input is required"))?;
    let output = args
        .output
        .clone()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| usage("--output is required"))?;
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("");
    let reader = std::io::BufReader::new(std::fs::File::open(&input)?);
    let mut m = match ext.to_ascii_lowercase().as_str() {
        "off" => io::read_off(reader, true)?,
        _ => io::read_obj(reader, true)?,
    };
    info!("input: {}", extraordinary_summary(&m));
    for step in 1..=k {
        m = mesh::midpoint_Mn(&m, n)?;
        info!("step {step}: {}", extraordinary_summary(&m));
    }
    io::write_obj(&m, std::io::BufWriter::new(std::fs::File::create(&output)?))?;
    info!("wrote {}", output.display());
    Ok(true)
}

struct BatchConfig {
    degrees: Vec<usize>,
    valences: Vec<usize>,
    rings: Option<usize>,
    tol: f64,
    max_iter: usize,
    jobs: usize,
    output: PathBuf,
    format: Option<FormatArg>,
}

fn resolve_batch(args: &BatchArgs, cfg: &FileConfig) -> Result<BatchConfig, CliError> {
    let degrees = match (&args.degree, &cfg.degree) {
        (Some(s), _) => parse_list(s, "degree")?,
        (None, Some(v)) => config_list(v, "degree")?,
        (None, None) => return Err(usage("--degree is required")),
    };
    let valences = match (&args.valence, &cfg.valence) {
        (Some(s), _) => parse_list(s, "valence")?,
        (None, Some(v)) => config_list(v, "valence")?,
        (None, None) => return Err(usage("--valence is required")),
    };
    if valences.iter().any(|&m| m < 3) {
        return Err(usage("--valence must be at least 3"));
    }
    let kind = match (args.kind, cfg.kind.as_deref()) {
        (Some(KindArg::Primal), _) => Some(NetKind::Primal),
        (Some(KindArg::Dual), _) => Some(NetKind::Dual),
        (None, Some("primal")) => Some(NetKind::Primal),
        (None, Some("dual")) => Some(NetKind::Dual),
        (None, Some(other)) => return Err(usage(format!("invalid kind `{other}` in config"))),
        (None, None) => None,
    };
    if let Some(kind) = kind {
        for &n in &degrees {
            if !kind.matches_degree(n) {
                return Err(usage(format!(
                    "{}",
                    ringnet::RingnetError::ParityMismatch { kind, n }
                )));
            }
        }
    }
    let format = match (args.format, cfg.format.as_deref()) {
        (Some(f), _) => Some(f),
        (None, Some("obj")) => Some(FormatArg::Obj),
        (None, Some("json")) => Some(FormatArg::Json),
        (None, Some("csv")) => Some(FormatArg::Csv),
        (None, Some(other)) => return Err(usage(format!("invalid format `{other}` in config"))),
        (None, None) => None,
    };
    Ok(BatchConfig {
        degrees,
        valences,
        rings: args.rings.or(cfg.rings),
        tol: args.tol.or(cfg.tol).unwrap_or(1e-11),
        max_iter: args.max_iter.or(cfg.max_iter).unwrap_or(20000),
        jobs: args.jobs.or(cfg.jobs).unwrap_or(1).max(1),
        output: args
            .output
            .clone()
            .or_else(|| cfg.output.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
        format,
    })
}

fn wants(cfg: &BatchConfig, f: FormatArg) -> bool {
    cfg.format.is_none() || cfg.format == Some(f)
}

/// Timestamp recorded in certificates; MIDPOINT_TIMESTAMP pins it so that
/// repeated runs produce byte-identical files.
fn timestamp() -> String {
    std::env::var("MIDPOINT_TIMESTAMP").unwrap_or_else(|_| {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("{secs}")
    })
}

/// Run `work` over all (n, m) cases on `jobs` threads; results are collected
/// and re-ordered so output files and summaries are deterministic.
fn run_cases<T: Send>(
    cfg: &BatchConfig,
    work: impl Fn(usize, usize) -> T + Sync,
) -> Vec<((usize, usize), T)> {
    let cases: Vec<(usize, usize)> = cfg
        .degrees
        .iter()
        .flat_map(|&n| cfg.valences.iter().map(move |&m| (n, m)))
        .collect();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(BTreeMap::new());
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.min(cases.len()) {
            scope.spawn(|| loop {
                let ix = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, m)) = cases.get(ix) else { break };
                let out = work(n, m);
                results.lock().unwrap().insert((n, m), out);
            });
        }
    });
    results.into_inner().unwrap().into_iter().collect()
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn cmd_analyze(cfg: &BatchConfig) -> Result<bool, CliError> {
    std::fs::create_dir_all(&cfg.output)?;
    let results = run_cases(cfg, |n, m| -> Result<_, String> {
        if n < 2 {
            return Err("degree must be at least 2 for spectral analysis".into());
        }
        let report = spectral::spectral_report(n, m).map_err(|e| e.to_string())?;
        let (net, _, _) =
            spectral::characteristic_mesh(n, m, cfg.tol, cfg.max_iter).map_err(|e| e.to_string())?;
        Ok((report, net))
    });
    let mut ok = true;
    for ((n, m), res) in results {
        match res {
            Err(e) => {
                error!("analyze ({n},{m}): {e}");
                ok = false;
            }
            Ok((report, net)) => {
                info!(
                    "analyze ({n},{m}): lambda_sub = {}, mult = ({}, {})",
                    report.lambda_sub, report.mult_alg, report.mult_geo
                );
                if !report.pass.all() {
                    ok = false;
                }
                if wants(cfg, FormatArg::Json) {
                    let path = cfg.output.join(format!("spectral_n{n}_m{m}.json"));
                    write(&path, &report::spectral_report_json(&report))?;
                    let net = match cfg.rings {
                        Some(r) if r <= net.jmax => net.clone().truncate(r.saturating_sub(1)),
                        _ => net.clone(),
                    };
                    let path = cfg.output.join(format!("charmesh_n{n}_m{m}.json"));
                    write(&path, &report::ringnet_json(&net))?;
                }
                if wants(cfg, FormatArg::Csv) {
                    let path = cfg.output.join(format!("eigenvalues_n{n}_m{m}.csv"));
                    write(&path, &report::eigenvalue_csv(&report))?;
                    let frame = FrameK::new(segment_angle(m, 1))
                        .map_err(|e| usage(e.to_string()))?;
                    let path = cfg.output.join(format!("hcoords_n{n}_m{m}.csv"));
                    write(&path, &report::h_coords_csv(&net, &frame))?;
                }
            }
        }
    }
    Ok(ok)
}

fn cmd_certify(cfg: &BatchConfig) -> Result<bool, CliError> {
    std::fs::create_dir_all(&cfg.output)?;
    let stamp = timestamp();
    let results = run_cases(cfg, |n, m| charmap::certify_C1(n, m).map_err(|e| e.to_string()));
    let mut ok = true;
    let mut certs = Vec::new();
    let mut rejected = Vec::new();
    for ((n, m), res) in results {
        match res {
            Err(e) => {
                error!("certify ({n},{m}): {e}");
                rejected.push(((n, m), e));
                ok = false;
            }
            Ok(cert) => {
                info!(
                    "certify ({n},{m}): {} (lambda = {})",
                    report::verdict_name(cert.verdict),
                    cert.lambda
                );
                if cert.verdict != Verdict::Pass {
                    ok = false;
                }
                if wants(cfg, FormatArg::Json) {
                    let path = cfg.output.join(format!("cert_n{n}_m{m}.json"));
                    write(&path, &report::certificate_json(&cert, &stamp))?;
                }
                certs.push(cert);
            }
        }
    }
    if wants(cfg, FormatArg::Csv) {
        let mut summary = report::summary_csv(&certs);
        for ((n, m), e) in &rejected {
            summary.push_str(&format!("{n},{m},,,,rejected: {e}\n"));
        }
        write(&cfg.output.join("summary.csv"), &summary)?;
    }
    Ok(ok)
}

fn run() -> Result<bool, CliError> {
    let cli = Cli::parse();
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.cmd {
        Cmd::Subdivide(args) => cmd_subdivide(args, &cfg),
        Cmd::Analyze(args) => cmd_analyze(&resolve_batch(args, &cfg)?),
        Cmd::Certify(args) => cmd_certify(&resolve_batch(args, &cfg)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MIDPOINT_LOG", "info"))
        .format_timestamp(None)
        .init();
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            error!("{e}");
            match e {
                CliError::Usage(_) | CliError::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(2),
            }
        }
    }
}
