//! Desk-scale reproduction of the limit theorems: CLT moment matching,
//! deterministic large-deviation density scaling, measure-level rate
//! convergence and the Szegő identity, with JSON reports and a CSV
//! convergence table.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::from_canonical_circle;
use crate::ensembles::{
    beta_rate_asymmetric, beta_rate_symmetric, log_density_beta, log_density_circle_canonical, par_draws,
    sample_canonical_circle_prefix, sample_complex_wishart, sample_haar_unitary, sample_matrix_beta,
};
use crate::error::{Error, Result};
use crate::hermitian::{frobenius_norm, identity, log_det_cholesky, real_diagonal, CMatrix, Hermitian};
use crate::interval::{
    canonical_interval_via_circle, moments_of_measure, rate_canonical_interval, rate_measure_interval,
    rate_moments_interval,
};
use crate::measure::DensityGridMeasure;
use crate::rng::RngStream;
use crate::schur::{
    boundary_density_from_schur, schur_boundary_values, szego_triple_identity, SchurParameterSequence, SzegoTriple,
};
use crate::stats::{covariance, SampleSummary};

pub const CLT_BETA_GUE: &str = "clt_beta_gue";
pub const CLT_BETA_WISHART: &str = "clt_beta_wishart";
pub const CLT_TRIG_GINIBRE: &str = "clt_trig_ginibre";
pub const CLT_WISHART_GUE: &str = "clt_wishart_gue";
pub const LDP_DENSITY_SCALING: &str = "ldp_density_scaling";
pub const MEASURE_RATE_MONOTONICITY: &str = "measure_rate_monotonicity";
pub const SZEGO_CONSISTENCY: &str = "szego_consistency";

pub const ALL_EXPERIMENTS: [&str; 7] = [
    CLT_BETA_GUE,
    CLT_BETA_WISHART,
    CLT_TRIG_GINIBRE,
    CLT_WISHART_GUE,
    LDP_DENSITY_SCALING,
    MEASURE_RATE_MONOTONICITY,
    SZEGO_CONSISTENCY,
];

/// Default seed of the reference run.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Clt,
    Ldp,
    Measure,
    Szego,
    All,
}

impl Suite {
    pub fn experiments(self) -> &'static [&'static str] {
        match self {
            Suite::Clt => &ALL_EXPERIMENTS[..4],
            Suite::Ldp => &ALL_EXPERIMENTS[4..5],
            Suite::Measure => &ALL_EXPERIMENTS[5..6],
            Suite::Szego => &ALL_EXPERIMENTS[6..7],
            Suite::All => &ALL_EXPERIMENTS,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clt" => Ok(Suite::Clt),
            "ldp" => Ok(Suite::Ldp),
            "measure" => Ok(Suite::Measure),
            "szego" => Ok(Suite::Szego),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown suite `{other}`"))),
        }
    }
}

/// Settings shared by all experiments, read from `key = value` lines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Matrix dimensions to run (`p = 1,2,3`).
    pub dims: Vec<usize>,
    /// Shape `a_n` of the Beta/Wishart CLTs and moment-space index `n` of the circle CLT.
    pub n: usize,
    /// Number of leading canonical moments in the circle CLT.
    pub k: usize,
    /// Monte Carlo sample size `N`.
    pub samples: usize,
    pub seed: u64,
    /// Half-width of the acceptance band in standard errors.
    pub sigma: f64,
    pub ldp_tol: f64,
    /// Density-scaling grid `n = 2^lo ..= 2^hi`, monotone from `2^monotone_from`.
    pub ldp_log2_lo: u32,
    pub ldp_log2_hi: u32,
    pub ldp_monotone_from: u32,
    pub measure_levels: usize,
    pub measure_tol: f64,
    /// Chebyshev nodes of the measure-level quadrature.
    pub quadrature_nodes: usize,
    pub szego_tol: f64,
    /// Angular nodes of boundary grids.
    pub grid: usize,
    /// Restricts the run to these experiment ids.
    pub only: Option<Vec<String>>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dims: vec![1, 2, 3],
            n: 4096,
            k: 2,
            samples: 100_000,
            seed: DEFAULT_SEED,
            sigma: 3.0,
            ldp_tol: 0.01,
            ldp_log2_lo: 6,
            ldp_log2_hi: 12,
            ldp_monotone_from: 8,
            measure_levels: 64,
            measure_tol: 1e-3,
            quadrature_nodes: 8192,
            szego_tol: 1e-6,
            grid: crate::schur::DEFAULT_BOUNDARY_NODES,
            only: None,
            out: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "p" => cfg.dims = parse_list(key, value)?,
                "n" => cfg.n = parse_value(key, value)?,
                "k" => cfg.k = parse_value(key, value)?,
                "samples" => cfg.samples = parse_value(key, value)?,
                "seed" => cfg.seed = parse_value(key, value)?,
                "sigma" => cfg.sigma = parse_value(key, value)?,
                "ldp_tol" => cfg.ldp_tol = parse_value(key, value)?,
                "ldp_log2_lo" => cfg.ldp_log2_lo = parse_value(key, value)?,
                "ldp_log2_hi" => cfg.ldp_log2_hi = parse_value(key, value)?,
                "ldp_monotone_from" => cfg.ldp_monotone_from = parse_value(key, value)?,
                "measure_levels" => cfg.measure_levels = parse_value(key, value)?,
                "measure_tol" => cfg.measure_tol = parse_value(key, value)?,
                "quadrature_nodes" => cfg.quadrature_nodes = parse_value(key, value)?,
                "szego_tol" => cfg.szego_tol = parse_value(key, value)?,
                "grid" => cfg.grid = parse_value(key, value)?,
                "experiments" => cfg.only = Some(parse_list(key, value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.dims.is_empty() || self.dims.iter().any(|&p| p == 0 || p > 4) {
            return fail(format!("p must list dimensions in 1..=4, got {:?}", self.dims));
        }
        if self.samples < 1000 {
            return fail(format!("samples = {} is below the minimum of 1000", self.samples));
        }
        if self.k == 0 || self.k > 3 || self.k > self.n {
            return fail(format!("k = {} must satisfy 1 <= k <= min(3, n)", self.k));
        }
        if self.n < 16 {
            return fail(format!("n = {} is too small for the limit experiments", self.n));
        }
        if !(self.ldp_log2_lo <= self.ldp_monotone_from && self.ldp_monotone_from <= self.ldp_log2_hi)
            || self.ldp_log2_hi > 20
        {
            return fail("ldp grid needs ldp_log2_lo <= ldp_monotone_from <= ldp_log2_hi <= 20".into());
        }
        if self.measure_levels == 0 || self.grid < 8 || self.quadrature_nodes < 8 {
            return fail("measure_levels, grid and quadrature_nodes must be positive (grids >= 8)".into());
        }
        if [self.sigma, self.ldp_tol, self.measure_tol, self.szego_tol].iter().any(|t| !(*t > 0.0)) {
            return fail("tolerances must be positive".into());
        }
        if let Some(ids) = &self.only {
            if let Some(bad) = ids.iter().find(|id| !ALL_EXPERIMENTS.contains(&id.as_str())) {
                return fail(format!("unknown experiment `{bad}`"));
            }
        }
        Ok(())
    }

    fn stream(&self, label: &str) -> RngStream {
        RngStream::new(self.seed, 0).derive(label)
    }
}

/// One compared quantity with its acceptance band `|observed − target| ≤ threshold`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Statistic {
    pub name: String,
    pub observed: f64,
    pub target: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// A row of the convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub experiment: String,
    pub n: u64,
    pub statistic: String,
    pub observed: f64,
    pub target: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub passed: bool,
    pub statistics: Vec<Statistic>,
    #[serde(skip)]
    pub rows: Vec<ConvergenceRow>,
    /// Wall-clock time; the only field that differs between identical runs.
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub fn failures(&self) -> impl Iterator<Item = &Statistic> {
        self.statistics.iter().filter(|s| !s.passed)
    }
}

/// Accumulates statistics and table rows for one experiment.
struct Collector {
    id: &'static str,
    statistics: Vec<Statistic>,
    rows: Vec<ConvergenceRow>,
}

impl Collector {
    fn new(id: &'static str) -> Self {
        Collector {
            id,
            statistics: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn check(&mut self, n: u64, name: String, observed: f64, target: f64, threshold: f64) -> bool {
        let gap = (observed - target).abs();
        let passed = gap <= threshold;
        self.row(n, name.clone(), observed, target);
        self.statistics.push(Statistic {
            name,
            observed,
            target,
            threshold,
            passed,
        });
        passed
    }

    fn row(&mut self, n: u64, statistic: String, observed: f64, target: f64) {
        self.rows.push(ConvergenceRow {
            experiment: self.id.to_string(),
            n,
            statistic,
            observed,
            target,
            gap: (observed - target).abs(),
        });
    }

    fn check_flag(&mut self, n: u64, name: String, ok: bool) {
        let observed = if ok { 1.0 } else { 0.0 };
        self.row(n, name.clone(), observed, 1.0);
        self.statistics.push(Statistic {
            name,
            observed,
            target: 1.0,
            threshold: 0.0,
            passed: ok,
        });
    }

    /// Sample mean within `sigma` standard errors of `target`.
    fn mean(&mut self, n: u64, name: &str, values: &[f64], target: f64, sigma: f64) {
        let s = SampleSummary::of(values);
        self.check(n, format!("{name} mean"), s.mean, target, sigma * s.se_mean);
    }

    /// Sample variance within `sigma` standard errors of `target`.
    fn variance(&mut self, n: u64, name: &str, values: &[f64], target: f64, sigma: f64) {
        let s = SampleSummary::of(values);
        self.check(n, format!("{name} variance"), s.variance, target, sigma * s.se_variance);
    }

    fn finish(self, cfg: &ExperimentConfig, started: Instant) -> ExperimentReport {
        ExperimentReport {
            experiment: self.id.to_string(),
            seed: cfg.seed,
            passed: self.statistics.iter().all(|s| s.passed),
            statistics: self.statistics,
            rows: self.rows,
            runtime_seconds: started.elapsed().as_secs_f64(),
        }
    }
}

/// Entry `(i, j)` split into real and imaginary parts over a batch.
fn entry_parts(draws: &[CMatrix], i: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
    draws.iter().map(|m| (m[(i, j)].re, m[(i, j)].im)).unzip()
}

/// Means → 0 and variances → GUE targets (1 on the diagonal, 1/2 per part off it),
/// scaled by `unit`, for every entry on or above the diagonal.
fn gue_entry_checks(c: &mut Collector, n: u64, label: &str, draws: &[CMatrix], unit: f64, sigma: f64) {
    let p = draws.first().map_or(0, |m| m.nrows());
    for i in 0..p {
        for j in i..p {
            let (re, im) = entry_parts(draws, i, j);
            if i == j {
                c.mean(n, &format!("{label} Y[{i},{i}]"), &re, 0.0, sigma);
                c.variance(n, &format!("{label} Y[{i},{i}]"), &re, unit, sigma);
            } else {
                for (part, v) in [("re", &re), ("im", &im)] {
                    c.mean(n, &format!("{label} Y[{i},{j}].{part}"), v, 0.0, sigma);
                    c.variance(n, &format!("{label} Y[{i},{j}].{part}"), v, unit / 2.0, sigma);
                }
            }
        }
    }
    let trace: Vec<f64> = draws.iter().map(|m| m.trace().re).collect();
    c.variance(n, &format!("{label} trace"), &trace, unit * p as f64, sigma);
}

/// Means → 0 and per-part variances → 1/2 for every entry (Ginibre targets).
fn ginibre_entry_checks(c: &mut Collector, n: u64, label: &str, draws: &[CMatrix], sigma: f64) {
    let p = draws.first().map_or(0, |m| m.nrows());
    for i in 0..p {
        for j in 0..p {
            let (re, im) = entry_parts(draws, i, j);
            for (part, v) in [("re", &re), ("im", &im)] {
                c.mean(n, &format!("{label}[{i},{j}].{part}"), v, 0.0, sigma);
                c.variance(n, &format!("{label}[{i},{j}].{part}"), v, 0.5, sigma);
            }
        }
    }
}

/// `√(8a)(X − I/2)` for `X ~ Beta_p(a, a)` against GUE.
pub fn clt_beta_gue_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(CLT_BETA_GUE);
    let a = cfg.n as f64;
    for &p in &cfg.dims {
        let scale = Complex64::new((8.0 * a).sqrt(), 0.0);
        let half = identity(p) * Complex64::new(0.5, 0.0);
        let draws = par_draws(cfg.samples, cfg.stream(&format!("{CLT_BETA_GUE}/p={p}")), |r| {
            let x = sample_matrix_beta(p, a, a, r).expect("a > p - 1");
            (x.matrix() - &half) * scale
        });
        gue_entry_checks(&mut c, cfg.n as u64, &format!("p={p}"), &draws, 1.0, cfg.sigma);
    }
    c.finish(cfg, started)
}

/// Shape `c` of the Beta-to-Wishart limit for dimension `p`.
pub fn wishart_limit_shape(p: usize) -> f64 {
    (2 * p - 1) as f64
}

/// `a·X` for `X ~ Beta_p(c, a)` against `W_p(c)`: mean `cI`, diagonal variance
/// `c`, off-diagonal part variance `c/2`, positive semidefinite draws.
pub fn clt_beta_wishart_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(CLT_BETA_WISHART);
    let a = cfg.n as f64;
    let n = cfg.n as u64;
    for &p in &cfg.dims {
        let shape = wishart_limit_shape(p);
        let draws = par_draws(cfg.samples, cfg.stream(&format!("{CLT_BETA_WISHART}/p={p}")), |r| {
            sample_matrix_beta(p, shape, a, r).expect("shapes exceed p - 1")
        });
        let min_eig = draws.iter().map(|x| x.eigenvalues()[0]).fold(f64::INFINITY, f64::min);
        c.check_flag(n, format!("p={p} c={shape} eigenvalues >= 0"), min_eig >= 0.0);
        let scaled: Vec<CMatrix> = draws.iter().map(|x| x.matrix() * Complex64::new(a, 0.0)).collect();
        for i in 0..p {
            for j in i..p {
                let (re, im) = entry_parts(&scaled, i, j);
                let label = format!("p={p} c={shape} Y[{i},{j}]");
                if i == j {
                    c.mean(n, &label, &re, shape, cfg.sigma);
                    c.variance(n, &label, &re, shape, cfg.sigma);
                } else {
                    for (part, v) in [("re", &re), ("im", &im)] {
                        c.mean(n, &format!("{label}.{part}"), v, 0.0, cfg.sigma);
                        c.variance(n, &format!("{label}.{part}"), v, shape / 2.0, cfg.sigma);
                    }
                }
            }
        }
    }
    c.finish(cfg, started)
}

/// `√(2pn)·A_j` and `√(2pn)·Γ_j`, `j ≤ k`, against Ginibre, plus the
/// decorrelation of levels and the shrinking gap between the two scalings.
pub fn clt_trig_ginibre_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(CLT_TRIG_GINIBRE);
    for &p in &cfg.dims {
        let mut mean_gap = Vec::new();
        for n in [cfg.n / 16, cfg.n] {
            let scale = Complex64::new(((2 * p * n) as f64).sqrt(), 0.0);
            let stream = cfg.stream(&format!("{CLT_TRIG_GINIBRE}/p={p}/n={n}"));
            let draws = par_draws(cfg.samples, stream, |r| {
                let a = sample_canonical_circle_prefix(n, cfg.k, p, r).expect("1 <= k <= n");
                let g = from_canonical_circle(&a).expect("strict contractions");
                let a: Vec<CMatrix> = a.canon().iter().map(|m| m * scale).collect();
                let g: Vec<CMatrix> = g.moments().iter().map(|m| m * scale).collect();
                (a, g)
            });
            let gap = draws
                .iter()
                .map(|(a, g)| a.iter().zip(g).map(|(x, y)| frobenius_norm(&(x - y))).sum::<f64>())
                .sum::<f64>()
                / draws.len() as f64;
            c.row(n as u64, format!("p={p} mean sum_j |A_j - G_j| (scaled)"), gap, 0.0);
            mean_gap.push(gap);
            if n != cfg.n {
                continue;
            }
            for j in 0..cfg.k {
                let level_a: Vec<CMatrix> = draws.iter().map(|(a, _)| a[j].clone()).collect();
                let level_g: Vec<CMatrix> = draws.iter().map(|(_, g)| g[j].clone()).collect();
                ginibre_entry_checks(&mut c, n as u64, &format!("p={p} A{}", j + 1), &level_a, cfg.sigma);
                ginibre_entry_checks(&mut c, n as u64, &format!("p={p} G{}", j + 1), &level_g, cfg.sigma);
            }
            if cfg.k >= 2 {
                let x: Vec<f64> = draws.iter().map(|(a, _)| a[0][(0, 0)].re).collect();
                let y: Vec<f64> = draws.iter().map(|(a, _)| a[1][(0, 0)].re).collect();
                let (sx, sy) = (SampleSummary::of(&x), SampleSummary::of(&y));
                let se = (sx.variance * sy.variance / x.len() as f64).sqrt();
                c.check(n as u64, format!("p={p} cov(A1[0,0].re, A2[0,0].re)"), covariance(&x, &y), 0.0, cfg.sigma * se);
            }
        }
        c.check_flag(
            cfg.n as u64,
            format!("p={p} A/G gap shrinks from n/16 to n"),
            mean_gap[1] < mean_gap[0],
        );
    }
    c.finish(cfg, started)
}

/// `(W − aI)/√a` for `W ~ W_p(a)` against GUE, and `E‖W/a − I‖²_F = p²/a`.
pub fn clt_wishart_gue_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(CLT_WISHART_GUE);
    let a = cfg.n as f64;
    for &p in &cfg.dims {
        let draws = par_draws(cfg.samples, cfg.stream(&format!("{CLT_WISHART_GUE}/p={p}")), |r| {
            sample_complex_wishart(p, a, r).expect("a > p - 1").matrix().clone()
        });
        let centred: Vec<CMatrix> = draws
            .iter()
            .map(|w| (w - identity(p) * Complex64::new(a, 0.0)) / Complex64::new(a.sqrt(), 0.0))
            .collect();
        gue_entry_checks(&mut c, cfg.n as u64, &format!("p={p}"), &centred, 1.0, cfg.sigma);
        let dist: Vec<f64> = draws
            .iter()
            .map(|w| frobenius_norm(&(w / Complex64::new(a, 0.0) - identity(p))).powi(2))
            .collect();
        c.mean(cfg.n as u64, &format!("p={p} |W/a - I|_F^2"), &dist, (p * p) as f64 / a, cfg.sigma);
    }
    c.finish(cfg, started)
}

/// `|−(1/n) log f_n(B) − rate(B)|` with `f_n` the `Beta_p(an, an)` density.
pub fn ldp_gap_beta_symmetric(b: &Hermitian, a: f64, n: usize) -> f64 {
    let an = a * n as f64;
    let density = log_density_beta(b.dim(), an, an, b).expect("an > p - 1");
    (-density / n as f64 - beta_rate_symmetric(b, a)).abs()
}

/// `|−(1/n) log f_n(B) − rate(B)|` with `f_n` the `Beta_p(c, an)` density.
pub fn ldp_gap_beta_asymmetric(b: &Hermitian, c: f64, a: f64, n: usize) -> f64 {
    let density = log_density_beta(b.dim(), c, a * n as f64, b).expect("shapes exceed p - 1");
    (-density / n as f64 - beta_rate_asymmetric(b, a)).abs()
}

/// `|−(1/n) log f(A_k) + 2p log det(I − A*A)|` for the uniform circle canonical-moment density.
pub fn ldp_gap_circle(a: &CMatrix, n: usize, k: usize) -> f64 {
    let p = a.nrows();
    let density = log_density_circle_canonical(p, n, k, a).expect("1 <= k <= n");
    let rate = -2.0 * p as f64 * log_det_cholesky(&(identity(p) - a.adjoint() * a)).expect("strict contraction");
    (-density / n as f64 - rate).abs()
}

/// Fixed evaluation points: `V diag(λ) V*` with `λ = (1/4, 1/2, 2/3, 3/4)[..p]`
/// and a fixed unitary `V`, plus `I/2` for the symmetric case.
fn ldp_points(cfg: &ExperimentConfig, p: usize) -> (Vec<(String, Hermitian)>, CMatrix) {
    let lambda = [0.25, 0.5, 2.0 / 3.0, 0.75];
    let v = sample_haar_unitary(p, &mut cfg.stream(&format!("{LDP_DENSITY_SCALING}/p={p}")).rng());
    let diag = Hermitian::from_real_diagonal(&lambda[..p]);
    let rotated = diag.congruence(&v);
    let contraction = &v * real_diagonal(&[0.5, 1.0 / 3.0, 0.25, 0.2][..p]);
    (
        vec![("diag".into(), diag), ("rotated".into(), rotated), ("half".into(), Hermitian::scaled_identity(p, 0.5))],
        contraction,
    )
}

/// A named `n ↦ gap` curve.
type GapSeries = (String, Box<dyn Fn(usize) -> f64>);

/// Deterministic density-scaling check over `n = 2^lo..2^hi`: the final gap is
/// within `ldp_tol` and gaps decrease strictly from `2^monotone_from` on.
pub fn ldp_density_scaling_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(LDP_DENSITY_SCALING);
    let ns: Vec<usize> = (cfg.ldp_log2_lo..=cfg.ldp_log2_hi).map(|e| 1usize << e).collect();
    let monotone_start = 1usize << cfg.ldp_monotone_from;
    for &p in &cfg.dims {
        let (points, contraction) = ldp_points(cfg, p);
        let a = p as f64;
        let mut series: Vec<GapSeries> = Vec::new();
        for (label, b) in points.iter().cloned() {
            let bs = b.clone();
            series.push((format!("p={p} beta({a}n,{a}n) at {label}"), Box::new(move |n| ldp_gap_beta_symmetric(&bs, a, n))));
            if label != "half" {
                let (shape, rate_a) = (p as f64, 2.0 * p as f64);
                series.push((
                    format!("p={p} beta({shape},{rate_a}n) at {label}"),
                    Box::new(move |n| ldp_gap_beta_asymmetric(&b, shape, rate_a, n)),
                ));
            }
        }
        for k in [1, cfg.k] {
            let m = contraction.clone();
            series.push((format!("p={p} circle A{k}"), Box::new(move |n| ldp_gap_circle(&m, n, k))));
        }
        series.dedup_by(|x, y| x.0 == y.0);
        for (name, gap) in &series {
            let gaps: Vec<f64> = ns.iter().map(|&n| gap(n)).collect();
            for (&n, &g) in ns.iter().zip(&gaps) {
                c.row(n as u64, format!("{name} gap"), g, 0.0);
            }
            let last = *gaps.last().expect("non-empty grid");
            c.check(*ns.last().unwrap() as u64, format!("{name} final gap"), last, 0.0, cfg.ldp_tol);
            let tail: Vec<f64> = ns.iter().zip(&gaps).filter(|(n, _)| **n >= monotone_start).map(|(_, g)| *g).collect();
            c.check_flag(
                *ns.last().unwrap() as u64,
                format!("{name} gaps decrease from n={monotone_start}"),
                tail.windows(2).all(|w| w[1] < w[0]),
            );
        }
    }
    c.finish(cfg, started)
}

/// Test densities relative to the Lebesgue measure on `[0,1]`.
fn lebesgue_density(name: &str, x: f64) -> f64 {
    match name {
        "uniform" => 1.0,
        "beta22" => 6.0 * x * (1.0 - x),
        "arcsine" => 1.0 / (PI * (x * (1.0 - x)).sqrt()),
        _ => unreachable!("unknown test density"),
    }
}

/// Closed-form `−∫ log W dν₁` where `W` is the density relative to the arcsine law.
fn scalar_measure_rate(name: &str) -> f64 {
    // ∫ log(x(1−x)) dν₁ = −4 log 2.
    match name {
        "uniform" => (4.0 / PI).ln(),
        "beta22" => -(6.0 * PI).ln() + 6.0 * 2f64.ln(),
        "arcsine" => 0.0,
        _ => unreachable!("unknown test density"),
    }
}

fn grid_measure(names: &[&str], nodes: usize) -> Result<DensityGridMeasure> {
    DensityGridMeasure::arcsine_grid(names.len(), nodes, |x| {
        let w: Vec<f64> = names
            .iter()
            .map(|name| PI * (x * (1.0 - x)).sqrt() * lebesgue_density(name, x))
            .collect();
        real_diagonal(&w)
    })
}

/// `k ↦` rate of the first `k` canonical moments, for `k = 1..levels`.
pub fn partial_rates_interval(mu: &DensityGridMeasure, levels: usize) -> Result<Vec<f64>> {
    let u = canonical_interval_via_circle(mu, levels)?;
    Ok((1..=levels).map(|k| rate_canonical_interval(&u.canon()[..k])).collect())
}

/// Partial rates of scalar Jacobi-type densities and a `p = 2` block-diagonal
/// embedding: non-decreasing in `k`, equal to the moment-route rates at small
/// `k`, additive over blocks, and close to the measure-level rate at `k = levels`.
pub fn measure_rate_monotonicity_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(MEASURE_RATE_MONOTONICITY);
    let levels = cfg.measure_levels;
    let mut scalar_rates: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let cases: [&[&str]; 4] = [&["arcsine"], &["uniform"], &["beta22"], &["uniform", "beta22"]];
    for names in cases {
        let label = names.join("+");
        let mu = match grid_measure(names, cfg.quadrature_nodes) {
            Ok(mu) => mu,
            Err(e) => {
                c.check_flag(0, format!("{label} grid measure: {e}"), false);
                continue;
            }
        };
        let rates = match partial_rates_interval(&mu, levels) {
            Ok(r) => r,
            Err(e) => {
                c.check_flag(0, format!("{label} canonical moments: {e}"), false);
                continue;
            }
        };
        let p = names.len() as f64;
        let target: f64 = p * names.iter().map(|n| scalar_measure_rate(n)).sum::<f64>();
        for (k, r) in rates.iter().enumerate() {
            c.row((k + 1) as u64, format!("{label} partial rate"), *r, target);
        }
        let slack = 1e-12 * (1.0 + target.abs());
        c.check_flag(
            levels as u64,
            format!("{label} partial rates non-decreasing"),
            rates.windows(2).all(|w| w[1] >= w[0] - slack),
        );
        let quadrature = rate_measure_interval(&mu).unwrap_or(f64::NAN);
        c.check(levels as u64, format!("{label} quadrature rate vs closed form"), quadrature, target, cfg.measure_tol);
        c.check(
            levels as u64,
            format!("{label} partial rate at k={levels}"),
            *rates.last().expect("levels >= 1"),
            target,
            cfg.measure_tol,
        );
        if let Ok(s) = moments_of_measure(&mu, 6) {
            for k in 1..=6.min(levels) {
                c.check(
                    k as u64,
                    format!("{label} moment-route rate k={k}"),
                    rate_moments_interval(&s.prefix(k)),
                    rates[k - 1],
                    1e-6 * (1.0 + rates[k - 1].abs()),
                );
            }
        }
        if names.len() == 1 {
            scalar_rates.insert(names[0], rates);
        } else {
            let sum: Vec<f64> = (0..levels).map(|k| names.iter().map(|n| scalar_rates[n][k]).sum::<f64>() * p).collect();
            let worst = rates.iter().zip(&sum).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            c.check(levels as u64, format!("{label} block rate minus p * scalar sum"), worst, 0.0, 1e-9);
        }
    }
    c.finish(cfg, started)
}

/// Szegő triple of a parameter sequence on a grid of `nodes` angles.
pub fn szego_triple_of(a: &SchurParameterSequence, nodes: usize) -> Result<SzegoTriple> {
    let f = schur_boundary_values(a, nodes)?;
    let w = boundary_density_from_schur(&f)?;
    szego_triple_identity(a, &w, &f)
}

fn scalar_seq(values: &[Complex64]) -> SchurParameterSequence {
    SchurParameterSequence::new(1, values.iter().map(|&v| CMatrix::from_element(1, 1, v)).collect())
        .expect("scalar corpus entries lie in the open disc")
}

/// Szegő triple on a Bernstein–Szegő corpus: zero, scalar `1/2`, seeded scalar
/// sequences, their `p = 2` block-diagonal embeddings and dense `p = 2, 3` sequences.
///
/// Parameters stay in the disc of radius 1/2: the boundary density has poles at the
/// zeros of the orthogonal polynomial, and the trapezoid error decays like their
/// modulus to the power of the grid size.
pub fn szego_consistency_check(cfg: &ExperimentConfig) -> ExperimentReport {
    let started = Instant::now();
    let mut c = Collector::new(SZEGO_CONSISTENCY);
    let nodes = cfg.grid;
    let record = |c: &mut Collector, name: String, t: Result<SzegoTriple>| match t {
        Ok(t) => {
            c.check(nodes as u64, format!("{name} max pairwise gap"), t.max_gap(), 0.0, cfg.szego_tol);
            Some(t)
        }
        Err(e) => {
            c.check_flag(nodes as u64, format!("{name}: {e}"), false);
            None
        }
    };
    for p in [1, 2] {
        let zero = SchurParameterSequence::new(p, vec![CMatrix::zeros(p, p); 3]).expect("zero is a contraction");
        record(&mut c, format!("zero p={p}"), szego_triple_of(&zero, nodes));
    }
    if let Some(t) = record(&mut c, "scalar 1/2".into(), szego_triple_of(&scalar_seq(&[Complex64::new(0.5, 0.0)]), nodes)) {
        c.check(nodes as u64, "scalar 1/2 canonical side".into(), t.canonical, 0.75f64.ln(), 1e-12);
    }
    let mut rng = cfg.stream(SZEGO_CONSISTENCY).rng();
    let mut disc = || {
        use rand::Rng;
        Complex64::from_polar(0.5 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI))
    };
    for case in 0..5 {
        let x: Vec<Complex64> = (0..4).map(|_| disc()).collect();
        let y: Vec<Complex64> = (0..4).map(|_| disc()).collect();
        let tx = record(&mut c, format!("scalar #{case}a"), szego_triple_of(&scalar_seq(&x), nodes));
        let ty = record(&mut c, format!("scalar #{case}b"), szego_triple_of(&scalar_seq(&y), nodes));
        let diag = SchurParameterSequence::new(
            2,
            x.iter().zip(&y).map(|(&u, &v)| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![u, v]))).collect(),
        )
        .expect("diagonal of disc points");
        if let (Some(td), Some(tx), Some(ty)) = (record(&mut c, format!("block #{case}"), szego_triple_of(&diag, nodes)), tx, ty) {
            c.check(nodes as u64, format!("block #{case} density = sum of scalars"), td.density, tx.density + ty.density, cfg.szego_tol);
        }
    }
    let mut rng = cfg.stream(&format!("{SZEGO_CONSISTENCY}/dense")).rng();
    for p in [2, 3] {
        for case in 0..3 {
            let params = (0..4)
                .map(|_| sample_haar_unitary(p, &mut rng) * Complex64::new(0.5, 0.0) * sample_haar_unitary(p, &mut rng))
                .map(|m| {
                    let d = real_diagonal(&(0..p).map(|i| 1.0 - 0.2 * i as f64).collect::<Vec<_>>());
                    m * d
                })
                .collect();
            let a = SchurParameterSequence::new(p, params).expect("norm at most 0.5");
            record(&mut c, format!("dense p={p} #{case}"), szego_triple_of(&a, nodes));
        }
    }
    c.finish(cfg, started)
}

/// Runs one experiment by id.
pub fn run_experiment(id: &str, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(match id {
        CLT_BETA_GUE => clt_beta_gue_check(cfg),
        CLT_BETA_WISHART => clt_beta_wishart_check(cfg),
        CLT_TRIG_GINIBRE => clt_trig_ginibre_check(cfg),
        CLT_WISHART_GUE => clt_wishart_gue_check(cfg),
        LDP_DENSITY_SCALING => ldp_density_scaling_check(cfg),
        MEASURE_RATE_MONOTONICITY => measure_rate_monotonicity_check(cfg),
        SZEGO_CONSISTENCY => szego_consistency_check(cfg),
        other => return Err(Error::Config(format!("unknown experiment `{other}`"))),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateReport {
    pub seed: u64,
    pub passed: bool,
    pub config: ExperimentConfig,
    pub experiments: Vec<ExperimentReport>,
}

/// Runs the suite's experiments (filtered by `cfg.only`) in parallel, in a fixed order.
pub fn run_all(cfg: &ExperimentConfig, suite: Suite) -> Result<AggregateReport> {
    cfg.validate()?;
    let ids: Vec<&str> = suite
        .experiments()
        .iter()
        .copied()
        .filter(|id| cfg.only.as_ref().is_none_or(|only| only.iter().any(|o| o == id)))
        .collect();
    let experiments = ids
        .par_iter()
        .map(|id| run_experiment(id, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateReport {
        seed: cfg.seed,
        passed: experiments.iter().all(|r| r.passed),
        config: cfg.clone(),
        experiments,
    })
}

/// Writes `<id>.json` per experiment, `summary.json` and `convergence.csv` into `dir`.
pub fn write_artifacts(report: &AggregateReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for r in &report.experiments {
        fs::write(dir.join(format!("{}.json", r.experiment)), serde_json::to_string_pretty(r)? + "\n")?;
    }
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(report)? + "\n")?;
    let mut csv = csv::Writer::from_path(dir.join("convergence.csv")).map_err(|e| Error::Io(e.into()))?;
    for row in report.experiments.iter().flat_map(|r| &r.rows) {
        csv.serialize(row).map_err(|e| Error::Io(e.into()))?;
    }
    csv.flush()?;
    Ok(())
}
