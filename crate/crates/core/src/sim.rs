//! Monte Carlo estimation of block logical error rates.
//!
//! Each trial samples independent X and Z errors from its own random
//! streams, decodes the two sectors separately and counts a block failure
//! when either sector fails: the decoder gives up, or the residual is not a
//! stabilizer. Trials are independent, so estimates do not depend on how
//! they are spread over workers.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{select_best_graph, GraphSelection};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::{generate_configuration_model, BiregularBipartiteGraph};
use crate::hgp::{hypergraph_product, CssCode, Sector};
use crate::rng::{trial_stream, StreamTag};
use crate::ssf::{CssCatalogs, CssDecoder, DEFAULT_WEIGHT_CAP};
use crate::stats::{wald_halfwidth99, wilson99};
use crate::toric::{mwpm_decode, ToricCode};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "QLDPC_WORKERS";

/// Version string recorded in sweep metadata.
pub const DECODER_VERSION: &str = concat!("ssf-", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseSample {
    pub x_error: BitVector,
    pub z_error: BitVector,
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

fn bernoulli(n: usize, p: f64, rng: &mut impl Rng) -> BitVector {
    let support = (0..n).filter(|_| rng.gen::<f64>() < p).collect();
    BitVector::from_sorted_unchecked(n, support)
}

/// Noise for trial `trial`: every qubit gets an X error and, independently,
/// a Z error with probability `p`, each sector from its own stream.
pub fn sample_noise(n: usize, p: f64, seed: u64, trial: u64) -> Result<NoiseSample> {
    check_probability(p)?;
    Ok(NoiseSample {
        x_error: bernoulli(n, p, &mut trial_stream(seed, trial, StreamTag::XNoise)),
        z_error: bernoulli(n, p, &mut trial_stream(seed, trial, StreamTag::ZNoise)),
    })
}

/// A decoder for both sectors of a CSS code.
pub trait SectorDecoder {
    /// Error estimate for `sector` errors from their syndrome, or `None` if
    /// the decoder gives up.
    fn decode_sector(&mut self, sector: Sector, syndrome: &BitVector) -> Result<Option<BitVector>>;
}

impl SectorDecoder for CssDecoder<'_> {
    fn decode_sector(&mut self, sector: Sector, syndrome: &BitVector) -> Result<Option<BitVector>> {
        let out = self.get_mut(sector).decode(syndrome)?;
        Ok(out.converged().then_some(out.deduced_error))
    }
}

/// Matching decoder for a toric code.
pub struct ToricDecoder<'a>(pub &'a ToricCode);

impl SectorDecoder for ToricDecoder<'_> {
    fn decode_sector(&mut self, sector: Sector, syndrome: &BitVector) -> Result<Option<BitVector>> {
        mwpm_decode(self.0, sector, syndrome).map(Some)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub x_fail: bool,
    pub z_fail: bool,
    pub block_fail: bool,
}

/// Whether decoding `sector` errors `e` fails.
pub fn sector_fails(code: &CssCode, dec: &mut impl SectorDecoder, sector: Sector, e: &BitVector) -> Result<bool> {
    let syndrome = code.detecting(sector).mul_support(e.support());
    Ok(match dec.decode_sector(sector, &syndrome)? {
        None => true,
        Some(est) => !code.stabilizers(sector).in_row_space(&e.xor(&est)?)?,
    })
}

/// Decodes both sectors of a given noise sample.
pub fn judge_noise(code: &CssCode, dec: &mut impl SectorDecoder, noise: &NoiseSample) -> Result<TrialOutcome> {
    let z_fail = sector_fails(code, dec, Sector::Z, &noise.z_error)?;
    let x_fail = sector_fails(code, dec, Sector::X, &noise.x_error)?;
    Ok(TrialOutcome {
        x_fail,
        z_fail,
        block_fail: x_fail || z_fail,
    })
}

/// One trial: sample noise, decode each sector, judge the residuals.
pub fn run_trial(
    code: &CssCode,
    dec: &mut impl SectorDecoder,
    p: f64,
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    judge_noise(code, dec, &sample_noise(code.n_qubits(), p, seed, trial)?)
}

/// Block failure of one trial. The X sector is skipped once the Z sector
/// has failed, since the block has failed either way.
fn block_fails(code: &CssCode, dec: &mut impl SectorDecoder, p: f64, seed: u64, trial: u64) -> Result<bool> {
    let n = code.n_qubits();
    let ez = bernoulli(n, p, &mut trial_stream(seed, trial, StreamTag::ZNoise));
    if sector_fails(code, dec, Sector::Z, &ez)? {
        return Ok(true);
    }
    let ex = bernoulli(n, p, &mut trial_stream(seed, trial, StreamTag::XNoise));
    sector_fails(code, dec, Sector::X, &ex)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub p_log: f64,
    /// Wald half-width at 99%.
    pub ci99: f64,
    /// Wilson 99% interval, informative when failures are few.
    pub wilson: (f64, f64),
}

impl EstimateWithCI {
    pub fn from_counts(p: f64, failures: u64, trials: u64) -> Self {
        Self {
            p,
            trials,
            failures,
            p_log: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
            ci99: wald_halfwidth99(failures, trials),
            wilson: wilson99(failures, trials),
        }
    }

    pub fn low(&self) -> f64 {
        self.p_log - self.ci99
    }

    pub fn high(&self) -> f64 {
        self.p_log + self.ci99
    }
}

fn count_failures<D, F, G>(trials: u64, make: F, fails: G) -> Result<u64>
where
    F: Fn() -> D + Sync + Send,
    G: Fn(&mut D, u64) -> Result<bool> + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map_init(make, |dec, t| fails(dec, t).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Block logical error rate of small-set-flip decoding at rate `p`. Runs on
/// the current rayon pool.
pub fn estimate(code: &CssCode, catalogs: &CssCatalogs, p: f64, trials: u64, seed: u64) -> Result<EstimateWithCI> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let failures = count_failures(
        trials,
        || CssDecoder::new(catalogs),
        |dec, t| block_fails(code, dec, p, seed, t),
    )?;
    Ok(EstimateWithCI::from_counts(p, failures, trials))
}

/// Logical error rate `q_log` of one toric code under the same noise model.
pub fn estimate_toric(t: &ToricCode, p: f64, trials: u64, seed: u64) -> Result<EstimateWithCI> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let failures = count_failures(trials, || ToricDecoder(t), |dec, i| block_fails(t.code(), dec, p, seed, i))?;
    Ok(EstimateWithCI::from_counts(p, failures, trials))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub seed: u64,
    pub graph_files: Vec<String>,
    pub decoder_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub code_id: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub points: Vec<EstimateWithCI>,
    pub metadata: SweepMetadata,
}

pub const CSV_HEADER: &str = "code_id,N,k,p,trials,failures,p_log,ci99";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        for e in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:.6e},{:.6e}",
                self.code_id, self.n, self.k, e.p, e.trials, e.failures, e.p_log, e.ci99
            );
        }
        s
    }

    pub fn p_grid(&self) -> Vec<f64> {
        self.points.iter().map(|e| e.p).collect()
    }
}

fn check_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.is_empty() {
        return Err(Error::InvalidParameters("empty p grid".into()));
    }
    for &p in p_grid {
        check_probability(p)?;
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameters("p grid must be strictly increasing".into()));
    }
    Ok(())
}

/// One estimate per grid point, each from the same master seed.
pub fn sweep(
    code_id: &str,
    code: &CssCode,
    catalogs: &CssCatalogs,
    p_grid: &[f64],
    trials: u64,
    metadata: SweepMetadata,
) -> Result<SweepResult> {
    check_grid(p_grid)?;
    let points = p_grid
        .iter()
        .map(|&p| estimate(code, catalogs, p, trials, metadata.seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        code_id: code_id.to_string(),
        n: code.n_qubits(),
        k: code.k(),
        points,
        metadata,
    })
}

pub const THRESHOLD_METHOD_NOTE: &str = "largest grid point p such that at every nonzero grid point up to p the \
block error rate strictly decreases with N and consecutive 99% Wald intervals do not overlap; \
curve crossings are not used because they only occur near p_log = 1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// `None` when the ordering never holds.
    pub p_th: Option<f64>,
    pub method_note: String,
}

/// Threshold by sub-threshold ordering. Grid points where every sweep saw
/// zero failures carry no ordering information and are skipped.
pub fn threshold_estimate(sweeps: &[SweepResult]) -> Result<ThresholdEstimate> {
    if sweeps.len() < 2 {
        return Err(Error::InvalidParameters("need at least two sweeps".into()));
    }
    let grid = sweeps[0].p_grid();
    if sweeps.iter().any(|s| s.p_grid() != grid) {
        return Err(Error::InvalidParameters("sweeps must share one p grid".into()));
    }
    let mut order: Vec<&SweepResult> = sweeps.iter().collect();
    order.sort_by_key(|s| s.n);
    if order.windows(2).any(|w| w[0].n == w[1].n) {
        return Err(Error::InvalidParameters("sweeps must have distinct N".into()));
    }
    let mut p_th = None;
    for (i, &p) in grid.iter().enumerate() {
        if order.iter().all(|s| s.points[i].failures == 0) {
            continue;
        }
        let ordered = order.windows(2).all(|w| {
            let (small, large) = (&w[0].points[i], &w[1].points[i]);
            large.p_log < small.p_log && large.high() < small.low()
        });
        if !ordered {
            break;
        }
        p_th = Some(p);
    }
    Ok(ThresholdEstimate {
        p_th,
        method_note: THRESHOLD_METHOD_NOTE.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToricComparison {
    pub k: usize,
    pub hgp_block_fail: f64,
    pub hgp_ci99: f64,
    pub toric_block_fail: f64,
    pub toric_ci99: f64,
    /// Physical qubits of `k / 2` toric codes.
    pub toric_qubits: Option<usize>,
}

/// Compares one code with `k` logical qubits against `k / 2` independent
/// toric codes: `1 - (1 - q_log)^(k/2)`, with the interval carried through
/// the derivative of the power.
pub fn compare_with_toric(hgp: &EstimateWithCI, toric: &EstimateWithCI, k: usize) -> Result<ToricComparison> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::InvalidParameters(format!(
            "k = {k}: the comparison needs an even, positive number of logical qubits"
        )));
    }
    let copies = (k / 2) as f64;
    let q = toric.p_log;
    let survive = (1.0 - q).powf(copies);
    let slope = copies * (1.0 - q).powf(copies - 1.0);
    Ok(ToricComparison {
        k,
        hgp_block_fail: hgp.p_log,
        hgp_ci99: hgp.ci99,
        toric_block_fail: 1.0 - survive,
        toric_ci99: slope * toric.ci99,
        toric_qubits: None,
    })
}

fn default_candidates() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub p: f64,
    pub trials: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { p: 0.05, trials: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub n: usize,
    pub m: usize,
    pub dv: usize,
    pub dc: usize,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    #[serde(default)]
    pub selection: SelectionConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub p_grid: Vec<f64>,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub graph: GraphConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Candidate `i` is drawn with seed `seed + i`; all candidates are then
/// benchmarked with `seed` and the best one is returned.
pub fn select_graph(cfg: &GraphConfig, seed: u64) -> Result<(BiregularBipartiteGraph, GraphSelection)> {
    if cfg.candidates == 0 {
        return Err(Error::InvalidParameters("need at least one candidate graph".into()));
    }
    let candidates = (0..cfg.candidates as u64)
        .map(|i| generate_configuration_model(cfg.n, cfg.m, cfg.dv, cfg.dc, seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let sel = select_best_graph(&candidates, cfg.selection.p, cfg.selection.trials, seed)?;
    Ok((candidates[sel.best_index].clone(), sel))
}

pub fn code_id(cfg: &GraphConfig) -> String {
    format!("hgp-{}-{}-n{}-m{}", cfg.dv, cfg.dc, cfg.n, cfg.m)
}

/// The whole pipeline for one config: select a graph, square it, sweep.
/// Runs on the worker count given by [`resolve_workers`].
pub fn run_config(cfg: &Config, graph_files: Vec<String>) -> Result<(SweepResult, BiregularBipartiteGraph)> {
    let workers = resolve_workers(cfg.workers)?;
    with_workers(workers, || {
        let (g, _) = select_graph(&cfg.graph, cfg.seed)?;
        let code = hypergraph_product(&g, &g)?;
        let catalogs = CssCatalogs::build(&code, DEFAULT_WEIGHT_CAP)?;
        let meta = SweepMetadata {
            seed: cfg.seed,
            graph_files,
            decoder_version: DECODER_VERSION.to_string(),
        };
        let res = sweep(&code_id(&cfg.graph), &code, &catalogs, &cfg.sweep.p_grid, cfg.sweep.trials, meta)?;
        Ok((res, g))
    })?
}

/// Worker count: the environment variable wins over `configured`, which
/// wins over the number of CPUs.
pub fn resolve_workers(configured: Option<usize>) -> Result<usize> {
    let from_env = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameters(format!("{WORKERS_ENV}={v} is not a count")))?,
        ),
        Err(_) => None,
    };
    let n = from_env.or(configured).unwrap_or_else(num_cpus);
    if n == 0 {
        return Err(Error::InvalidParameters("worker count must be at least 1".into()));
    }
    Ok(n)
}

fn num_cpus() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
