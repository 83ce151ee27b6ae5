//! Command-line interface.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ssd_core::grid::axis_grid;
use ssd_core::idist::{cumulant_tol, log_moment, CumulantValue, SamplerConfig, SamplerMeta};
use ssd_core::iterate::{is_lm_member, is_semi_stable, phi_iter_cumulant, IterConfig, SemiStableFit};
use ssd_core::ou::{
    semistationary, validate_limit, verify_langevin, InitSpec, LimitReport, OUConfig, SemiStationaryReport,
    SemiStationarySpec, Simulator,
};
use ssd_core::phi::{is_semi_selfdecomposable, phi_forward_triplet, phi_inverse, MembershipCertificate, SpanConfig, Validity, Verdict};
use ssd_core::Error;

use crate::error::CliError;
use crate::output::{fmt_f64, OutDir, RunManifest};
use crate::runner::{init_threads, Parallel};
use crate::spec::{Spec, TripletSpec};
use crate::suites::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "ssd", version, about = "Span-b mappings, membership checks and OU-type simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the span-b mapping (or its inverse, or its iterate) to a spec.
    Map(MapArgs),
    /// Decide membership in the nested classes.
    Check(CheckArgs),
    /// Simulate OU-type paths and validate their laws.
    Simulate(SimulateArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
}

/// Axis grid `lo:hi:n` along every coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl std::str::FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("grid must be lo:hi:n, got {s:?}");
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi && n >= 1) {
            return Err(bad());
        }
        Ok(GridArg { lo, hi, n })
    }
}

impl GridArg {
    fn points(&self, d: usize) -> Vec<Vec<f64>> {
        axis_grid(d, self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Distribution spec (JSON).
    pub spec: PathBuf,
    /// Span, greater than 1.
    #[arg(long)]
    pub b: f64,
    /// Recover the factor instead of applying the map.
    #[arg(long)]
    pub inverse: bool,
    /// Apply the map m + 1 times.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Evaluation grid `lo:hi:n` along each axis.
    #[arg(long, default_value = "-5:5:21", allow_hyphen_values = true)]
    pub grid: GridArg,
    /// Absolute cumulant tolerance (default: SSD_TOL or 1e-10).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Distribution spec (JSON).
    pub spec: PathBuf,
    /// Span, greater than 1.
    #[arg(long)]
    pub b: f64,
    /// Nesting level m to decide.
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    /// Tolerance for the semi-stable fit (default: SSD_TOL or 1e-10, floored at 1e-8).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directory for the certificate; printed to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Law of the driving process at time 1 (JSON spec).
    pub spec: PathBuf,
    /// Contraction factor per epoch, greater than 1.
    #[arg(long)]
    pub b: f64,
    /// Epochs per unit time.
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 60)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    /// `zero`, `limit`, `const:x1,x2,...` or `law:<spec file>`.
    #[arg(long, default_value = "zero")]
    pub init: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also test the finite-dimensional laws for period 1/c.
    #[arg(long)]
    pub semistationary: bool,
    /// ECF comparison grid.
    #[arg(long, default_value = "-3:3:21", allow_hyphen_values = true)]
    pub grid: GridArg,
    /// Number of full paths written to paths.csv.
    #[arg(long, default_value_t = 10)]
    pub write_paths: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Paths per Monte Carlo check.
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    /// Directory for summary.json; printed to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn default_tol() -> f64 {
    std::env::var("SSD_TOL").ok().and_then(|v| v.parse::<f64>().ok()).filter(|t| *t > 0.0).unwrap_or(ssd_core::DEFAULT_TOL)
}

/// Parse `args` (without the program name) and run. Returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once(String::from("ssd")).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_threads();
    let res = match &cli.command {
        Command::Map(a) => cmd_map(a, args),
        Command::Check(a) => cmd_check(a, args),
        Command::Simulate(a) => cmd_simulate(a, args),
        Command::Verify(a) => cmd_verify(a, args),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ssd: {e}");
            e.exit_code()
        }
    }
}

/// Pretty JSON on stdout; a closed pipe is not an error.
fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    use std::io::Write;
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn span(b: f64) -> Result<SpanConfig, CliError> {
    Ok(SpanConfig::new(b)?)
}

fn finish(out: &OutDir, mut manifest: RunManifest, start: Instant) -> Result<(), CliError> {
    manifest.wall_time_s = Some(start.elapsed().as_secs_f64());
    out.manifest(&manifest)?;
    Ok(())
}

fn cumulant_rows(points: &[Vec<f64>], values: &[CumulantValue]) -> Vec<Vec<String>> {
    points
        .iter()
        .zip(values)
        .map(|(z, v)| {
            let mut r: Vec<String> = z.iter().map(|x| fmt_f64(*x)).collect();
            r.extend([fmt_f64(v.value.re), fmt_f64(v.value.im), fmt_f64(v.err)]);
            r
        })
        .collect()
}

fn cumulant_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=d).map(|i| format!("z{i}")).collect();
    h.extend(["re".into(), "im".into(), "err".into()]);
    h
}

fn tolerance_guard(v: CumulantValue, tol: f64) -> Result<CumulantValue, CliError> {
    if !(v.err <= tol) {
        return Err(CliError::Tolerance(format!("error bound {:e} exceeds {tol:e}", v.err)));
    }
    Ok(v)
}

#[derive(Serialize)]
struct InverseReport<'a> {
    b: f64,
    spec: &'a str,
    validity: &'a Validity,
}

pub fn cmd_map(a: &MapArgs, args: Vec<String>) -> Result<i32, CliError> {
    let start = Instant::now();
    let (spec, hash) = Spec::read(&a.spec)?;
    let t = spec.triplet()?;
    let cfg = span(a.b)?;
    let iter = IterConfig::new(a.b, a.m)?;
    if a.inverse && a.m != 0 {
        return Err(CliError::Parse("--inverse takes no --m".into()));
    }
    let tol = a.tol.unwrap_or_else(default_tol);
    if !(tol > 0.0) {
        return Err(CliError::Parse("--tol must be positive".into()));
    }
    let mut manifest = RunManifest::new("map", args);
    manifest.spec_hashes.insert("spec".into(), hash.clone());
    manifest.tolerances.insert("cumulant".into(), tol);
    let out = OutDir::create(&a.out, &manifest)?;
    let d = t.dim();
    let grid = a.grid.points(d);

    if a.inverse {
        let inv = phi_inverse(&t, &cfg)?;
        match (&inv.validity, &inv.rho) {
            (Validity::Valid, Some(rho)) => {
                out.json("triplet.json", &TripletSpec::from_triplet(rho))?;
                let vals = grid.iter().map(|z| cumulant_tol(rho, z, tol)).collect::<Result<Vec<_>, Error>>()?;
                let vals = vals.into_iter().map(|v| tolerance_guard(v, tol)).collect::<Result<Vec<_>, _>>()?;
                out.csv("cumulant.csv", &cumulant_header(d), &cumulant_rows(&grid, &vals))?;
                finish(&out, manifest, start)?;
                Ok(0)
            }
            (v, _) => {
                out.json("inverse.json", &InverseReport { b: a.b, spec: &hash, validity: v })?;
                finish(&out, manifest, start)?;
                Err(CliError::Domain(format!("not in the range of the span-{} map: {v:?}", a.b)))
            }
        }
    } else {
        let mut vals = Vec::with_capacity(grid.len());
        for z in &grid {
            vals.push(tolerance_guard(phi_iter_cumulant(&t, &iter, z, tol)?, tol)?);
        }
        let mut image = Some(t.clone());
        for _ in 0..=a.m {
            image = match image.map(|x| phi_forward_triplet(&x, &cfg, 1e-3 * tol)) {
                Some(Ok(x)) => Some(x),
                Some(Err(Error::Unsupported(msg))) => {
                    eprintln!("ssd: no exact triplet ({msg}); writing the cumulant grid only");
                    None
                }
                Some(Err(e)) => return Err(e.into()),
                None => None,
            };
        }
        if let Some(img) = &image {
            out.json("triplet.json", &TripletSpec::from_triplet(img))?;
        }
        out.csv("cumulant.csv", &cumulant_header(d), &cumulant_rows(&grid, &vals))?;
        finish(&out, manifest, start)?;
        Ok(0)
    }
}

#[derive(Serialize)]
struct CheckOutput {
    spec: String,
    b: f64,
    level: u32,
    member: bool,
    certificate: MembershipCertificate,
    semi_stable: Option<SemiStableFit>,
}

pub fn cmd_check(a: &CheckArgs, args: Vec<String>) -> Result<i32, CliError> {
    let start = Instant::now();
    let (spec, hash) = Spec::read(&a.spec)?;
    let t = spec.triplet()?;
    let cfg = span(a.b)?;
    let cert = if a.level == 0 {
        is_semi_selfdecomposable(&t, &cfg)?
    } else {
        is_lm_member(&t, &IterConfig::new(a.b, a.level)?)?
    };
    let fit_tol = a.tol.unwrap_or_else(default_tol).max(1e-8);
    let fit = is_semi_stable(&t, a.b, &axis_grid(t.dim(), -3.0, 3.0, 13), fit_tol).ok();
    let member = cert.verdict == Verdict::Member;
    let report = CheckOutput { spec: hash.clone(), b: a.b, level: a.level, member, certificate: cert, semi_stable: fit };
    let mut manifest = RunManifest::new("check", args);
    manifest.spec_hashes.insert("spec".into(), hash);
    manifest.tolerances.insert("semi_stable_fit".into(), fit_tol);
    match &a.out {
        Some(dir) => {
            let out = OutDir::create(dir, &manifest)?;
            out.json("certificate.json", &report)?;
            finish(&out, manifest, start)?;
        }
        None => print_json(&report)?,
    }
    Ok(if member { 0 } else { 1 })
}

fn parse_init(s: &str, d: usize) -> Result<(InitSpec, Option<String>), CliError> {
    match s.split_once(':') {
        None if s == "zero" => Ok((InitSpec::Zero, None)),
        None if s == "limit" => Ok((InitSpec::Limit, None)),
        Some(("const", v)) => {
            let value = v
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Parse(format!("--init const: {e}")))?;
            if value.len() != d {
                return Err(CliError::Parse(format!("--init const needs {d} values")));
            }
            Ok((InitSpec::Const { value }, None))
        }
        Some(("law", path)) => {
            let (spec, hash) = Spec::read(Path::new(path))?;
            let law = spec.triplet()?;
            if law.dim() != d {
                return Err(CliError::Parse(format!("--init law has dimension {}, expected {d}", law.dim())));
            }
            Ok((InitSpec::Law { law }, Some(hash)))
        }
        _ => Err(CliError::Parse(format!("unknown --init {s:?}"))),
    }
}

#[derive(Serialize)]
struct LangevinSummary {
    paths: u64,
    epochs: usize,
    max_relative_residual: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    spec: String,
    config: OUConfig,
    init: String,
    seed: u64,
    paths: u64,
    steps: usize,
    noise: SamplerMeta,
    log_moment: f64,
    langevin: LangevinSummary,
    limit: Option<LimitReport>,
    semistationary: Option<SemiStationaryReport>,
    notes: Vec<String>,
}

pub fn cmd_simulate(a: &SimulateArgs, args: Vec<String>) -> Result<i32, CliError> {
    let start = Instant::now();
    let (spec, hash) = Spec::read(&a.spec)?;
    let x1 = spec.triplet()?;
    let d = x1.dim();
    let (init, init_hash) = parse_init(&a.init, d)?;
    let horizon = (a.steps.max(1) as f64 / a.c).max(if a.semistationary { 5.0 / a.c } else { 0.0 });
    let cfg = OUConfig::new(a.b, a.c, 0.0, horizon)?;
    if a.paths < 2 {
        return Err(CliError::Parse("--paths must be at least 2".into()));
    }
    let lm = log_moment(&x1.levy, 1)?;
    let needs_moment = matches!(init, InitSpec::Limit) || a.semistationary;
    if !lm.is_finite() && needs_moment {
        return Err(CliError::Domain("the driving law has an infinite log-moment; no limit law exists".into()));
    }
    let mut manifest = RunManifest::new("simulate", args);
    manifest.spec_hashes.insert("spec".into(), hash.clone());
    if let Some(h) = init_hash {
        manifest.spec_hashes.insert("init".into(), h);
    }
    manifest.seed = Some(a.seed);
    let out = OutDir::create(&a.out, &manifest)?;
    let grid = a.grid.points(d);
    let samp = SamplerConfig::default();
    let sim = Simulator::new(&x1, &cfg, &init, 0, &grid, &samp)?;

    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let checked = a.paths.min(100);
    for i in 0..checked {
        let p = sim.path(a.seed, i, a.steps);
        worst = worst.max(verify_langevin(&p).relative);
        if i >= a.write_paths {
            continue;
        }
        for k in 0..=a.steps as i64 {
            let mut r = vec![i.to_string(), k.to_string(), fmt_f64(cfg.time(k))];
            r.extend(p.state(k).unwrap_or(&[]).iter().map(|v| fmt_f64(*v)));
            match p.increment(k) {
                Some(dx) => r.extend(dx.iter().map(|v| fmt_f64(*v))),
                None => r.extend((0..d).map(|_| String::new())),
            }
            rows.push(r);
        }
    }
    let mut header = vec!["path".to_string(), "epoch".into(), "time".into()];
    header.extend((1..=d).map(|i| format!("z{i}")));
    header.extend((1..=d).map(|i| format!("dx{i}")));
    out.csv("paths.csv", &header, &rows)?;

    let mut notes = Vec::new();
    let limit = if lm.is_finite() {
        let other = if matches!(init, InitSpec::Limit) { InitSpec::Zero } else { InitSpec::Limit };
        Some(validate_limit(&x1, &cfg, [&init, &other], a.paths, a.steps, &grid, a.seed, &samp, &Parallel)?)
    } else {
        notes.push("infinite log-moment: no limit law, limit validation skipped".into());
        None
    };
    let semi = if a.semistationary {
        let ss = SemiStationarySpec::standard(a.c, grid.clone());
        Some(semistationary(&x1, &cfg, &ss, a.paths, a.seed, &samp, &Parallel)?)
    } else {
        None
    };
    let report = SimulateReport {
        spec: hash,
        config: cfg,
        init: init.label().into(),
        seed: a.seed,
        paths: a.paths,
        steps: a.steps,
        noise: sim.noise_meta().clone(),
        log_moment: lm,
        langevin: LangevinSummary { paths: checked, epochs: a.steps, max_relative_residual: worst },
        limit,
        semistationary: semi,
        notes,
    };
    out.json("report.json", &report)?;
    finish(&out, manifest, start)?;
    Ok(0)
}

pub fn cmd_verify(a: &VerifyArgs, args: Vec<String>) -> Result<i32, CliError> {
    let start = Instant::now();
    if a.paths < 2 {
        return Err(CliError::Parse("--paths must be at least 2".into()));
    }
    let summary = suites::run(a.suite, a.seed, a.paths);
    for c in summary.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: {} (value {:e}, threshold {:e})", c.group, c.name, c.value, c.threshold);
    }
    let mut manifest = RunManifest::new("verify", args);
    manifest.seed = Some(a.seed);
    let mut tol = BTreeMap::new();
    tol.insert("factorization".to_string(), 1e-8);
    manifest.tolerances = tol;
    match &a.out {
        Some(dir) => {
            let out = OutDir::create(dir, &manifest)?;
            out.json("summary.json", &summary)?;
            finish(&out, manifest, start)?;
        }
        None => print_json(&summary)?,
    }
    Ok(if summary.passed { 0 } else { 1 })
}
