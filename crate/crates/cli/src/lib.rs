//! Command-line front end: loads matrix files, runs the library routines
//! and writes JSON/CSV/SVG artifacts.
//!
//! Exit codes: 0 success, 1 report failure, 2 usage error, 3 inconclusive
//! (insufficient sampling), 4 parse error, 5 length or dimension error,
//! 6 non-finite input, 7 I/O error.

pub mod error;
pub mod io;
pub mod svg;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use numrange::config::{RunConfig, Tolerances};
use numrange::corners::{certify_corner, corner_scan, CornerCertificate};
use numrange::numerics::{norm, ComplexMatrix};
use numrange::range::{sample_cloud, support_stiefel_with, AscentOptions, SupportResult};
use numrange::verify::{boundary_cloud, check_theorem_1_1, check_theorem_1_2, property_suite, Theorem};

use crate::error::{CliError, CliResult, EXIT_OK, EXIT_REPORT_FAILED, EXIT_USAGE};
use crate::io::{cloud_csv, load_matrix_file, read_cloud, read_json, write_atomic, write_json, Envelope, MatrixInfo};

/// Environment variable that overrides `--seed` when set.
pub const SEED_ENV: &str = "NUMRANGE_SEED";

#[derive(Debug, Parser)]
#[command(name = "numrange", version, about = "Numerical ranges W_n(T): sampling, supports, corners and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample W_n(T) with Haar frames; writes cloud.json (and cloud.csv).
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Support values h(w) by Stiefel ascent; writes support.json.
    Support {
        #[command(flatten)]
        common: Common,
        /// Direction as "re,im;re,im;…" (n pairs); repeat for several.
        #[arg(long, required = true)]
        direction: Vec<String>,
    },
    /// Corner certificates of a boundary-enriched cloud; writes cloud.json and corners.json.
    Corners {
        #[command(flatten)]
        common: Common,
    },
    /// Check a theorem; writes report.json.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["1.1", "1.2"])]
        theorem: String,
        /// Family sizes for 1.2: leading principal submatrices, e.g. "10,30,100".
        #[arg(long)]
        dims: Option<String>,
        /// Target λ for 1.2 as "re,im;…" (defaults to the origin).
        #[arg(long)]
        target: Option<String>,
    },
    /// Structural property checks E0–E3; writes suite.json.
    Suite {
        #[command(flatten)]
        common: Common,
    },
    /// SVG scatter of a cloud with certified corners marked; writes plot.svg.
    Plot {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        corners: Option<PathBuf>,
        /// Two real coordinates, e.g. "re1,im1" or "re1,re2".
        #[arg(long, default_value = "re1,im1")]
        axes: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = RunConfig::default().n)]
    pub n: usize,
    #[arg(long, default_value_t = RunConfig::default().samples)]
    pub samples: usize,
    #[arg(long, default_value_t = RunConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = RunConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = RunConfig::default().delta_min)]
    pub delta_min: f64,
    /// Tolerance override "name=value"; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl Common {
    fn config(&self) -> CliResult<RunConfig> {
        let seed = match std::env::var(SEED_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}={s:?} is not a 64-bit unsigned integer")))?,
            Err(_) => self.seed,
        };
        let mut overrides = BTreeMap::new();
        for item in &self.tol {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VALUE, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--tol {name}: {value:?} is not a number")))?;
            overrides.insert(name.trim().to_string(), value);
        }
        let config = RunConfig {
            n: self.n,
            seed,
            samples: self.samples,
            restarts: self.restarts,
            epsilon: self.epsilon,
            delta_min: self.delta_min,
            tolerances: Tolerances::default().with_overrides(&overrides).map_err(usage)?,
            ..RunConfig::default()
        };
        config.validate().map_err(usage)?;
        Ok(config)
    }
}

fn usage(e: numrange::Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `"re,im;re,im;…"`.
pub fn parse_complex_list(s: &str) -> CliResult<Vec<Complex64>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("{pair:?} is not a \"re,im\" pair")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("{x:?} is not a number")))
            };
            let z = Complex64::new(parse(re)?, parse(im)?);
            if !z.is_finite() {
                return Err(CliError::NonFinite(format!("{pair:?} is not finite")));
            }
            Ok(z)
        })
        .collect()
}

fn parse_dims(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--dims: {x:?} is not a size")))
        })
        .collect()
}

/// Leading `k×k` block of `t`.
pub fn leading_submatrix(t: &ComplexMatrix, k: usize) -> CliResult<ComplexMatrix> {
    if k == 0 || k > t.dim() {
        return Err(CliError::Length(format!("submatrix size {k} outside 1..={}", t.dim())));
    }
    let rows: Vec<Vec<Complex64>> = (0..k).map(|i| t.row(i)[..k].to_vec()).collect();
    Ok(ComplexMatrix::from_rows(&rows))
}

struct Loaded {
    t: ComplexMatrix,
    info: MatrixInfo,
    config: RunConfig,
}

fn load(common: &Common) -> CliResult<Loaded> {
    let file = load_matrix_file(&common.matrix)?;
    let t = file.to_matrix()?;
    let config = common.config()?;
    Ok(Loaded { info: MatrixInfo::new(&t, file.name), t, config })
}

fn envelope<T>(command: &str, loaded: &Loaded, result: T) -> Envelope<T> {
    Envelope {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        matrix: loaded.info.clone(),
        config: loaded.config.clone(),
        result,
    }
}

/// Exit code plus a one-line summary for stdout.
pub struct Outcome {
    pub code: i32,
    pub message: String,
}

fn ok(message: String) -> Outcome {
    Outcome { code: EXIT_OK, message }
}

fn verdict(passed: bool, message: String) -> Outcome {
    Outcome { code: if passed { EXIT_OK } else { EXIT_REPORT_FAILED }, message }
}

fn sample(common: &Common, format: Format) -> CliResult<Outcome> {
    if format == Format::Svg {
        return Err(CliError::Usage("sample writes json or csv; use `plot` for svg".into()));
    }
    let loaded = load(common)?;
    let c = &loaded.config;
    let cloud = sample_cloud(&loaded.t, c.n, c.samples, c.seed)?;
    let path = common.out.join("cloud.json");
    write_json(&path, &envelope("sample", &loaded, &cloud))?;
    if format == Format::Csv {
        write_atomic(&common.out.join("cloud.csv"), &cloud_csv(&cloud))?;
    }
    Ok(ok(format!("wrote {} ({} points)", path.display(), cloud.len())))
}

fn support(common: &Common, directions: &[String]) -> CliResult<Outcome> {
    let loaded = load(common)?;
    let c = &loaded.config;
    let opts = AscentOptions { grad_tol: c.tolerances.gradient, ..AscentOptions::default() };
    let mut results: Vec<SupportResult> = Vec::with_capacity(directions.len());
    for (i, spec) in directions.iter().enumerate() {
        let w = parse_complex_list(spec)?;
        if w.len() != c.n {
            return Err(CliError::Length(format!("direction {spec:?} has {} entries, --n is {}", w.len(), c.n)));
        }
        let nw = norm(&w);
        if nw == 0.0 {
            return Err(numrange::Error::ZeroDirection.into());
        }
        let w: Vec<Complex64> = w.iter().map(|z| z / nw).collect();
        let seed = numrange::frames::derive_seed(c.seed, 0, i as u64);
        results.push(support_stiefel_with(&loaded.t, c.n, &w, c.restarts, seed, &opts, &[])?);
    }
    let path = common.out.join("support.json");
    write_json(&path, &envelope("support", &loaded, &results))?;
    let values: Vec<String> = results.iter().map(|r| format!("{:.12}", r.value)).collect();
    Ok(ok(format!("wrote {}: h = [{}]", path.display(), values.join(", "))))
}

/// Boundary-enriched cloud and fully certified corners of it.
pub fn certified_corners(t: &ComplexMatrix, config: &RunConfig) -> numrange::Result<(numrange::range::PointCloud, Vec<CornerCertificate>)> {
    let cloud = boundary_cloud(t, config)?;
    let scan = corner_scan(&cloud, config.delta_min, config.epsilon)?;
    let certs = scan
        .iter()
        .enumerate()
        .map(|(i, c)| {
            certify_corner(
                t,
                &cloud,
                &c.point,
                c.epsilon,
                config.delta_min,
                numrange::frames::derive_seed(config.seed, 7, i as u64),
                config.exterior_count,
            )
        })
        .collect::<numrange::Result<Vec<_>>>()?;
    Ok((cloud, certs))
}

fn corners(common: &Common) -> CliResult<Outcome> {
    let loaded = load(common)?;
    let (cloud, certs) = certified_corners(&loaded.t, &loaded.config)?;
    write_json(&common.out.join("cloud.json"), &envelope("corners", &loaded, &cloud))?;
    let path = common.out.join("corners.json");
    write_json(&path, &envelope("corners", &loaded, &certs))?;
    Ok(ok(format!("wrote {} ({} certificates)", path.display(), certs.len())))
}

fn verify(common: &Common, theorem: &str, dims: Option<&str>, target: Option<&str>) -> CliResult<Outcome> {
    let loaded = load(common)?;
    let c = &loaded.config;
    let theorem: Theorem = theorem.parse().map_err(usage)?;
    let report = match theorem {
        Theorem::CornerEigenvalues => check_theorem_1_1(&loaded.t, c)?,
        Theorem::ApproximateEigenvalues => {
            let d = loaded.t.dim();
            let sizes = match dims {
                Some(s) => parse_dims(s)?,
                None => {
                    let mut v = vec![d.div_ceil(4), d.div_ceil(2), d];
                    v.dedup();
                    v
                }
            };
            let family = sizes
                .iter()
                .map(|&k| leading_submatrix(&loaded.t, k))
                .collect::<CliResult<Vec<_>>>()?;
            let lambda = match target {
                Some(s) => parse_complex_list(s)?,
                None => vec![Complex64::new(0.0, 0.0); c.n],
            };
            if lambda.len() != c.n {
                return Err(CliError::Length(format!("--target has {} entries, --n is {}", lambda.len(), c.n)));
            }
            check_theorem_1_2(&family, &lambda, c)?
        }
    };
    let path = common.out.join("report.json");
    write_json(&path, &envelope("verify", &loaded, &report))?;
    let status = if report.passed { "passed" } else { "FAILED" };
    Ok(verdict(
        report.passed,
        format!(
            "theorem {theorem}: {status} ({} certificates, {} failures); wrote {}",
            report.certificates.len(),
            report.failures.len(),
            path.display(),
            theorem = if theorem == Theorem::CornerEigenvalues { "1.1" } else { "1.2" }
        ),
    ))
}

fn suite(common: &Common) -> CliResult<Outcome> {
    let loaded = load(common)?;
    let c = &loaded.config;
    let report = property_suite(&loaded.t, c.n, c.seed, c)?;
    let path = common.out.join("suite.json");
    write_json(&path, &envelope("suite", &loaded, &report))?;
    let summary: Vec<String> = report
        .checks
        .iter()
        .map(|k| format!("{:?}={}", k.property, if k.skipped { "skip" } else if k.passed { "ok" } else { "FAIL" }))
        .collect();
    Ok(verdict(report.passed, format!("{}; wrote {}", summary.join(" "), path.display())))
}

fn plot(cloud_path: &Path, corners_path: Option<&Path>, axes: &str, out: &Path, format: Format) -> CliResult<Outcome> {
    if format != Format::Svg {
        return Err(CliError::Usage("plot only writes svg".into()));
    }
    let (xa, ya) = axes
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("--axes expects two coordinates, got {axes:?}")))?;
    let (xa, ya) = (svg::Axis::parse(xa)?, svg::Axis::parse(ya)?);
    let cloud = read_cloud(cloud_path)?;
    if xa.index >= cloud.n || ya.index >= cloud.n {
        return Err(CliError::Length(format!("--axes {axes:?} outside a cloud of W_{} points", cloud.n)));
    }
    let points: Vec<(f64, f64)> = cloud.points.iter().map(|p| (xa.pick(&p.value), ya.pick(&p.value))).collect();
    let marked: Vec<(f64, f64)> = match corners_path {
        Some(p) => read_json::<Envelope<Vec<CornerCertificate>>>(p)?
            .result
            .iter()
            .filter(|c| c.certified)
            .map(|c| (xa.pick(&c.point.value), ya.pick(&c.point.value)))
            .collect(),
        None => Vec::new(),
    };
    let path = out.join("plot.svg");
    write_atomic(&path, svg::scatter(&points, &marked, &xa.label(), &ya.label()).as_bytes())?;
    Ok(ok(format!("wrote {} ({} points, {} corners)", path.display(), points.len(), marked.len())))
}

pub fn dispatch(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Sample { common, format } => sample(common, *format),
        Command::Support { common, direction } => support(common, direction),
        Command::Corners { common } => corners(common),
        Command::Verify { common, theorem, dims, target } => verify(common, theorem, dims.as_deref(), target.as_deref()),
        Command::Suite { common } => suite(common),
        Command::Plot { cloud, corners, axes, out, format } => plot(cloud, corners.as_deref(), axes, out, *format),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(outcome) => {
            println!("{}", outcome.message);
            outcome.code
        }
        Err(e) => {
            eprintln!("numrange: {e}");
            e.exit_code()
        }
    }
}
