use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use matrix_moments::circle::{from_canonical_circle, to_canonical_circle, CircleCanonicalVector, TrigMomentVector};
use matrix_moments::ensembles::{sample_batch, Draw, Ensemble, EnsembleParams};
use matrix_moments::interval::{
    from_canonical_interval, to_canonical_interval, IntervalCanonicalVector, IntervalMomentVector,
};
use matrix_moments::json::{MatrixJson, VectorJson, VectorKind};
use matrix_moments::rng::RngStream;
use matrix_moments::schur::{
    boundary_density_from_schur, schur_boundary_values, schur_params_from_canonical, schur_taylor_from_params,
    szego_triple_identity, SchurParameterSequence, DEFAULT_BOUNDARY_NODES,
};
use matrix_moments::verify::{run_all, write_artifacts, ExperimentConfig, Suite, DEFAULT_SEED};
use matrix_moments::{Error, Result};

#[derive(Parser)]
#[command(name = "matmom", version, about = "Matrix moment spaces, canonical moments and their rate functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a moment vector to canonical moments or back (JSON on stdin/stdout).
    Transform {
        #[arg(long, value_enum)]
        space: Space,
        /// Defaults to the direction implied by the input kind.
        #[arg(long, value_enum)]
        direction: Option<Direction>,
        /// Read from this file instead of stdin.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Draw a reproducible batch from a matrix ensemble.
    Sample {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        #[arg(long)]
        p: usize,
        /// Moment-space index of canonical ensembles.
        #[arg(long)]
        n: Option<usize>,
        /// Number of leading canonical moments (defaults to n).
        #[arg(long)]
        k: Option<usize>,
        /// First shape parameter (Wishart, Beta).
        #[arg(long)]
        a: Option<f64>,
        /// Second shape parameter (Beta).
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Taylor coefficients, boundary values or rates of a Schur function.
    Schur {
        /// Vector JSON of kind schur-parameters or circle-canonical.
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum)]
        emit: Emit,
        #[arg(long, default_value_t = DEFAULT_BOUNDARY_NODES)]
        grid: usize,
    },
    /// Run the verification experiments and write reports.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Interval,
    Circle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    ToCanonical,
    FromCanonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Taylor,
    Boundary,
    Rates,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Clt,
    Ldp,
    Measure,
    Szego,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Wishart,
    Beta,
    Gue,
    Ginibre,
    Haar,
    CanonicalInterval,
    CanonicalCircle,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Wishart => Ensemble::Wishart,
            EnsembleArg::Beta => Ensemble::Beta,
            EnsembleArg::Gue => Ensemble::Gue,
            EnsembleArg::Ginibre => Ensemble::Ginibre,
            EnsembleArg::Haar => Ensemble::Haar,
            EnsembleArg::CanonicalInterval => Ensemble::CanonicalInterval,
            EnsembleArg::CanonicalCircle => Ensemble::CanonicalCircle,
        }
    }
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Clt => Suite::Clt,
            SuiteArg::Ldp => Suite::Ldp,
            SuiteArg::Measure => Suite::Measure,
            SuiteArg::Szego => Suite::Szego,
            SuiteArg::All => Suite::All,
        }
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn transform(space: Space, direction: Option<Direction>, input: &str) -> Result<String> {
    let v: VectorJson = serde_json::from_str(input)?;
    let (forward, backward) = match space {
        Space::Interval => (VectorKind::IntervalMoments, VectorKind::IntervalCanonical),
        Space::Circle => (VectorKind::TrigMoments, VectorKind::CircleCanonical),
    };
    let direction = match direction {
        Some(d) => d,
        None if v.kind == forward => Direction::ToCanonical,
        None if v.kind == backward => Direction::FromCanonical,
        None => return Err(Error::Format(format!("kind {:?} does not belong to this space", v.kind))),
    };
    let items = v.matrices()?;
    let out = match (space, direction) {
        (Space::Interval, Direction::ToCanonical) => {
            v.expect_kind(forward)?;
            let u = to_canonical_interval(&IntervalMomentVector::from_matrices(v.p, items)?)?;
            let m: Vec<_> = u.canon().iter().map(|h| h.matrix().clone()).collect();
            VectorJson::new(v.p, backward, &m)
        }
        (Space::Interval, Direction::FromCanonical) => {
            v.expect_kind(backward)?;
            let s = from_canonical_interval(&IntervalCanonicalVector::from_matrices(v.p, items)?)?;
            let m: Vec<_> = s.moments().iter().map(|h| h.matrix().clone()).collect();
            VectorJson::new(v.p, forward, &m)
        }
        (Space::Circle, Direction::ToCanonical) => {
            v.expect_kind(forward)?;
            let a = to_canonical_circle(&TrigMomentVector::new(v.p, items)?)?;
            VectorJson::new(v.p, backward, a.canon())
        }
        (Space::Circle, Direction::FromCanonical) => {
            v.expect_kind(backward)?;
            let g = from_canonical_circle(&CircleCanonicalVector::new(v.p, items)?)?;
            VectorJson::new(v.p, forward, g.moments())
        }
    };
    to_json(&out)
}

#[derive(Serialize)]
#[serde(untagged)]
enum DrawJson {
    Matrix(MatrixJson),
    Vector(VectorJson),
}

#[derive(Serialize)]
struct BatchJson {
    params: EnsembleParams,
    seed: u64,
    #[serde(rename = "streamId")]
    stream_id: u64,
    draws: Vec<DrawJson>,
}

#[allow(clippy::too_many_arguments)]
fn sample(
    ensemble: Ensemble,
    p: usize,
    n: Option<usize>,
    k: Option<usize>,
    a: Option<f64>,
    b: Option<f64>,
    count: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<String> {
    let params = EnsembleParams { ensemble, p, a, b, n, k };
    let batch = sample_batch(&params, count, RngStream::new(seed, 0))?;
    let kind = match ensemble {
        Ensemble::CanonicalInterval => VectorKind::IntervalCanonical,
        _ => VectorKind::CircleCanonical,
    };
    let draws = batch
        .draws
        .iter()
        .map(|d| match d {
            Draw::Matrix(m) => DrawJson::Matrix(MatrixJson::from(m)),
            Draw::Vector(v) => DrawJson::Vector(VectorJson::new(p, kind, v)),
        })
        .collect();
    let json = BatchJson {
        params: batch.params,
        seed: batch.provenance_seed.seed,
        stream_id: batch.provenance_seed.stream_id,
        draws,
    };
    match out {
        Some(path) => {
            fs::write(path, serde_json::to_string(&json)? + "\n")?;
            Ok(String::new())
        }
        None => to_json(&json),
    }
}

#[derive(Serialize)]
struct BoundaryJson {
    p: usize,
    nodes: Vec<f64>,
    schur: Vec<MatrixJson>,
    density: Vec<MatrixJson>,
}

fn load_params(path: &Path) -> Result<SchurParameterSequence> {
    let v: VectorJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    let items = v.matrices()?;
    match v.kind {
        VectorKind::SchurParameters => SchurParameterSequence::new(v.p, items),
        VectorKind::CircleCanonical => schur_params_from_canonical(&CircleCanonicalVector::new(v.p, items)?),
        other => Err(Error::Format(format!("expected schur-parameters or circle-canonical, found {other:?}"))),
    }
}

fn schur(params: &Path, emit: Emit, grid: usize) -> Result<String> {
    let a = load_params(params)?;
    match emit {
        Emit::Taylor => {
            let g = schur_taylor_from_params(&a)?;
            to_json(&VectorJson::new(a.p(), VectorKind::SchurTaylor, &g.coeffs))
        }
        Emit::Boundary => {
            let f = schur_boundary_values(&a, grid)?;
            let w = boundary_density_from_schur(&f)?;
            to_json(&BoundaryJson {
                p: a.p(),
                nodes: f.nodes.clone(),
                schur: f.values.iter().map(MatrixJson::from).collect(),
                density: w.values.iter().map(|m| MatrixJson::from(m.matrix())).collect(),
            })
        }
        Emit::Rates => {
            let f = schur_boundary_values(&a, grid)?;
            let w = boundary_density_from_schur(&f)?;
            to_json(&szego_triple_identity(&a, &w, &f)?)
        }
    }
}

/// Summary text, and whether every experiment passed.
fn verify(suite: Suite, config: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>) -> Result<(String, bool)> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let report = run_all(&cfg, suite)?;
    let mut text = String::new();
    for r in &report.experiments {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        text += &format!("{verdict} {} ({:.1} s)\n", r.experiment, r.runtime_seconds);
        for s in r.failures() {
            text += &format!("    {}: observed {:.6e}, target {:.6e}, allowed {:.3e}\n", s.name, s.observed, s.target, s.threshold);
        }
    }
    if let Some(dir) = out.or(cfg.out.clone()) {
        write_artifacts(&report, &dir)?;
    }
    Ok((text, report.passed))
}

/// Runs a command; `stdin` is consulted only by `transform` without `--input`.
fn execute(command: Command, stdin: impl FnOnce() -> Result<String>) -> Result<(String, bool)> {
    match command {
        Command::Transform { space, direction, input } => {
            let text = match input {
                Some(path) => fs::read_to_string(path)?,
                None => stdin()?,
            };
            Ok((transform(space, direction, &text)?, true))
        }
        Command::Sample { ensemble, p, n, k, a, b, count, seed, out } => {
            Ok((sample(ensemble.into(), p, n, k, a, b, count, seed, out.as_deref())?, true))
        }
        Command::Schur { params, emit, grid } => Ok((schur(&params, emit, grid)?, true)),
        Command::Verify { suite, config, seed, out } => verify(suite.into(), config.as_deref(), seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let read_stdin = || {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    };
    let result = execute(cli.command, read_stdin).and_then(|(text, passed)| {
        io::stdout().lock().write_all(text.as_bytes())?;
        Ok(passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
