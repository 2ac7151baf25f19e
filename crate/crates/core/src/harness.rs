//! Monte-Carlo experiment runner: builds a receiver per run, streams a
//! packet of QPSK symbols through the CDMA downlink, and aggregates BER, MSE
//! and mixing-parameter trajectories across runs.
//!
//! Runs are independent and seeded with `seed + run_index`, so results do not
//! depend on how many run in parallel. `RRFILT_THREADS` caps the worker count
//! (0 or unset = one per core).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdma::{
    detect_qpsk, generate_received, generate_signatures, mmse_filter, random_qpsk, CdmaConfig,
    ChannelState, SymbolWindow,
};
use crate::combiners::{Clms, Combiner, SchemeA, SchemeB, SchemeOutput, DEFAULT_U_MAX};
use crate::filters::{dot_h, FullRankLms, JidfFilter, JidfParams};
use crate::{Error, Result, C64};

/// Environment variable capping the number of parallel Monte-Carlo runs.
pub const THREADS_ENV: &str = "RRFILT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Fullrank,
    Clms,
    Jidf,
    SchemeA,
    SchemeB,
    Mmse,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Fullrank => "fullrank",
            SchemeKind::Clms => "clms",
            SchemeKind::Jidf => "jidf",
            SchemeKind::SchemeA => "scheme_a",
            SchemeKind::SchemeB => "scheme_b",
            SchemeKind::Mmse => "mmse",
        }
    }

    /// Number of constituent filters the scheme expects.
    pub fn filter_count(self) -> usize {
        match self {
            SchemeKind::Fullrank | SchemeKind::Jidf => 1,
            SchemeKind::Clms | SchemeKind::SchemeB => 2,
            SchemeKind::SchemeA => 4,
            SchemeKind::Mmse => 0,
        }
    }

    fn is_jidf(self) -> bool {
        matches!(
            self,
            SchemeKind::Jidf | SchemeKind::SchemeA | SchemeKind::SchemeB
        )
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one constituent filter. Full-rank filters only use `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterParams {
    pub mu: f64,
    /// Reduced rank `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Interpolator length `I`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interp: Option<usize>,
    /// Interpolator step size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl FilterParams {
    pub fn full_rank(mu: f64) -> Self {
        Self {
            mu,
            rank: None,
            interp: None,
            eta: None,
        }
    }

    pub fn jidf(rank: usize, interp: usize, eta: f64, mu: f64) -> Self {
        Self {
            mu,
            rank: Some(rank),
            interp: Some(interp),
            eta: Some(eta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CombinerConfig {
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_c: f64,
    pub u_max: f64,
}

impl Default for CombinerConfig {
    fn default() -> Self {
        Self {
            mu_a: 0.25,
            mu_b: 0.25,
            mu_c: 0.25,
            u_max: DEFAULT_U_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// The true symbol is the desired response for the whole packet.
    #[default]
    Supervised,
    /// Supervised for the first `T` symbols, decision-directed afterwards.
    Semi(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    #[serde(default)]
    pub cdma: CdmaConfig,
    /// Number of decimation branches `B` shared by all JIDF filters.
    #[serde(default = "default_branches")]
    pub branches: usize,
    #[serde(default)]
    pub filters: Vec<FilterParams>,
    #[serde(default)]
    pub combiner: CombinerConfig,
    pub n_symbols: usize,
    pub n_runs: usize,
    #[serde(default)]
    pub train_mode: TrainMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_branches() -> usize {
    8
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Parameter set used for the BER-versus-symbols experiment, for the
    /// given scheme.
    pub fn reference(scheme: SchemeKind) -> Self {
        let filters = match scheme {
            SchemeKind::Fullrank => vec![FilterParams::full_rank(0.05)],
            SchemeKind::Clms => vec![FilterParams::full_rank(0.01), FilterParams::full_rank(0.25)],
            SchemeKind::Jidf => vec![FilterParams::jidf(4, 3, 0.005, 0.01)],
            SchemeKind::SchemeA => vec![
                FilterParams::jidf(3, 3, 0.01, 0.1),
                FilterParams::jidf(6, 6, 0.01, 0.1),
                FilterParams::jidf(3, 3, 0.0075, 0.01),
                FilterParams::jidf(6, 6, 0.0075, 0.01),
            ],
            SchemeKind::SchemeB => vec![
                FilterParams::jidf(3, 3, 0.01, 0.1),
                FilterParams::jidf(6, 6, 0.0075, 0.01),
            ],
            SchemeKind::Mmse => Vec::new(),
        };
        Self {
            scheme,
            cdma: CdmaConfig::default(),
            branches: 8,
            filters,
            combiner: CombinerConfig::default(),
            n_symbols: 1500,
            n_runs: 100,
            train_mode: TrainMode::Supervised,
            seed: 1,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cdma.validate()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_symbols < 1 || self.n_runs < 1 {
            return bad("n_symbols and n_runs must be at least 1".into());
        }
        if self.filters.len() != self.scheme.filter_count() {
            return bad(format!(
                "scheme {} needs {} filter entries, found {}",
                self.scheme,
                self.scheme.filter_count(),
                self.filters.len()
            ));
        }
        for (j, f) in self.filters.iter().enumerate() {
            if !(f.mu.is_finite() && f.mu >= 0.0) {
                return bad(format!("filter {}: mu must be non-negative", j + 1));
            }
            if self.scheme.is_jidf() {
                if f.rank.is_none() || f.interp.is_none() || f.eta.is_none() {
                    return bad(format!(
                        "filter {}: JIDF filters need rank, interp and eta",
                        j + 1
                    ));
                }
            } else if f.rank.is_some() || f.interp.is_some() || f.eta.is_some() {
                return bad(format!(
                    "filter {}: rank/interp/eta only apply to JIDF schemes",
                    j + 1
                ));
            }
        }
        let c = &self.combiner;
        if [c.mu_a, c.mu_b, c.mu_c]
            .iter()
            .any(|m| !(m.is_finite() && *m >= 0.0))
        {
            return bad("combiner steps must be non-negative".into());
        }
        if !(c.u_max.is_finite() && c.u_max > 0.0) {
            return bad("u_max must be positive".into());
        }
        // Dimension checks for the JIDF filters.
        for p in self.jidf_params() {
            JidfFilter::new(p)?;
        }
        Ok(())
    }

    fn jidf_params(&self) -> Vec<JidfParams> {
        if !self.scheme.is_jidf() {
            return Vec::new();
        }
        let m = self.cdma.observation_len();
        self.filters
            .iter()
            .map(|f| JidfParams {
                m,
                interp_len: f.interp.unwrap_or(1),
                rank: f.rank.unwrap_or(1),
                branches: self.branches,
                eta: f.eta.unwrap_or(0.0),
                mu: f.mu,
            })
            .collect()
    }

    /// Arithmetic cost per symbol of the configured scheme.
    pub fn complexity(&self) -> Result<Complexity> {
        let interp: Vec<usize> = self.filters.iter().filter_map(|f| f.interp).collect();
        let ranks: Vec<usize> = self.filters.iter().filter_map(|f| f.rank).collect();
        complexity_report(
            self.scheme,
            self.cdma.observation_len(),
            &interp,
            &ranks,
            self.branches,
        )
    }

    fn build_receiver(&self) -> Result<Receiver> {
        let m = self.cdma.observation_len();
        let c = &self.combiner;
        let jidf = || {
            self.jidf_params()
                .into_iter()
                .map(JidfFilter::new)
                .collect::<Result<Vec<_>>>()
        };
        Ok(match self.scheme {
            SchemeKind::Fullrank => Receiver::FullRank(FullRankLms::new(m, self.filters[0].mu)?),
            SchemeKind::Clms => Receiver::Clms(Clms::new(
                [
                    FullRankLms::new(m, self.filters[0].mu)?,
                    FullRankLms::new(m, self.filters[1].mu)?,
                ],
                Combiner::new(c.mu_a, c.u_max)?,
            )?),
            SchemeKind::Jidf => Receiver::Jidf(jidf()?.remove(0)),
            SchemeKind::SchemeA => {
                let fs: [JidfFilter; 4] = jidf()?.try_into().expect("four filters");
                Receiver::SchemeA(Box::new(SchemeA::new(
                    fs,
                    Combiner::new(c.mu_a, c.u_max)?,
                    Combiner::new(c.mu_b, c.u_max)?,
                    Combiner::new(c.mu_c, c.u_max)?,
                )?))
            }
            SchemeKind::SchemeB => {
                let fs: [JidfFilter; 2] = jidf()?.try_into().expect("two filters");
                Receiver::SchemeB(SchemeB::new(fs, Combiner::new(c.mu_c, c.u_max)?)?)
            }
            SchemeKind::Mmse => Receiver::Mmse,
        })
    }
}

/// Additions and multiplications per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Complexity {
    pub additions: u64,
    pub multiplications: u64,
}

/// Per-symbol arithmetic cost of each scheme.
///
/// JIDF-based schemes take one `(I_j, D_j)` pair per constituent; a single
/// JIDF filter costs `M(I-1) + (B+1)D + 2I` additions and `MI + (B+2)D`
/// multiplications.
pub fn complexity_report(
    scheme: SchemeKind,
    m: usize,
    interp: &[usize],
    ranks: &[usize],
    branches: usize,
) -> Result<Complexity> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be positive".into()));
    }
    let m = m as u64;
    let jidf_sum = || -> Result<Complexity> {
        let j = scheme.filter_count();
        if interp.len() != j || ranks.len() != j {
            return Err(Error::InvalidParameter(format!(
                "{scheme} needs {j} (I, D) pairs, got {} and {}",
                interp.len(),
                ranks.len()
            )));
        }
        if branches == 0 || interp.iter().chain(ranks).any(|&x| x == 0) {
            return Err(Error::InvalidParameter(
                "I, D and B must be positive".into(),
            ));
        }
        let b = branches as u64;
        Ok(interp.iter().zip(ranks).fold(
            Complexity {
                additions: 0,
                multiplications: 0,
            },
            |acc, (&i, &d)| {
                let (i, d) = (i as u64, d as u64);
                Complexity {
                    additions: acc.additions + m * (i - 1) + (b + 1) * d + 2 * i,
                    multiplications: acc.multiplications + m * i + (b + 2) * d,
                }
            },
        ))
    };
    match scheme {
        SchemeKind::Fullrank => Ok(Complexity {
            additions: 2 * m,
            multiplications: 2 * m + 1,
        }),
        SchemeKind::Clms => Ok(Complexity {
            additions: 4 * m + 5,
            multiplications: 4 * m + 6,
        }),
        SchemeKind::Jidf | SchemeKind::SchemeA | SchemeKind::SchemeB => jidf_sum(),
        SchemeKind::Mmse => Err(Error::InvalidParameter(
            "the MMSE receiver has no per-symbol adaptation cost model".into(),
        )),
    }
}

enum Receiver {
    FullRank(FullRankLms),
    Clms(Clms),
    Jidf(JidfFilter),
    SchemeA(Box<SchemeA>),
    SchemeB(SchemeB),
    Mmse,
}

impl Receiver {
    fn step(&mut self, r: &[C64], d: C64) -> Result<SchemeOutput> {
        let single = |y: C64, branch: Option<usize>| SchemeOutput {
            y,
            constituents: vec![y],
            intermediate: Vec::new(),
            lambda_a: None,
            lambda_b: None,
            lambda_c: None,
            branches: branch.into_iter().collect(),
        };
        match self {
            Receiver::FullRank(f) => f.step(r, d).map(|s| single(s.y, None)),
            Receiver::Jidf(f) => f.step(r, d).map(|s| single(s.y, s.branch)),
            Receiver::Clms(s) => s.step(r, d),
            Receiver::SchemeA(s) => s.step(r, d),
            Receiver::SchemeB(s) => s.step(r, d),
            Receiver::Mmse => unreachable!("MMSE receiver does not adapt"),
        }
    }

    fn output(&self, r: &[C64]) -> Result<C64> {
        match self {
            Receiver::FullRank(f) => f.output(r),
            Receiver::Jidf(f) => f.output(r),
            Receiver::Clms(s) => s.output(r),
            Receiver::SchemeA(s) => s.output(r),
            Receiver::SchemeB(s) => s.output(r),
            Receiver::Mmse => unreachable!("MMSE receiver does not adapt"),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Receiver::FullRank(f) => f.is_finite(),
            Receiver::Jidf(f) => f.is_finite(),
            Receiver::Clms(s) => s.is_finite(),
            Receiver::SchemeA(s) => s.is_finite(),
            Receiver::SchemeB(s) => s.is_finite(),
            Receiver::Mmse => true,
        }
    }
}

#[derive(Debug, Default)]
struct RunTrace {
    errors: Vec<bool>,
    sq_err: Vec<f64>,
    lambda: [Vec<f64>; 3],
    branch: Vec<Option<usize>>,
    diverged: bool,
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn run_once(cfg: &ExperimentConfig, run: usize) -> Result<RunTrace> {
    let cdma = &cfg.cdma;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(run as u64));
    let sigs = generate_signatures(cdma.users, cdma.chips, &mut rng)?;
    let mut channel = ChannelState::new(cdma, &mut rng)?;
    let zeros = vec![C64::new(0.0, 0.0); cdma.users];
    let symbols: Vec<Vec<C64>> = (0..cfg.n_symbols)
        .map(|_| (0..cdma.users).map(|_| random_qpsk(&mut rng)).collect())
        .collect();
    let noise_var = cdma.noise_variance();
    let mut receiver = cfg.build_receiver()?;
    let mut trace = RunTrace::default();

    for i in 0..cfg.n_symbols {
        let h = channel.next_gains();
        let window = SymbolWindow {
            prev: if i > 0 { &symbols[i - 1] } else { &zeros },
            cur: &symbols[i],
            next: symbols.get(i + 1).unwrap_or(&zeros),
        };
        let r = generate_received(cdma, &sigs, &h, window, noise_var, &mut rng)?;
        let desired = symbols[i][0];

        let (y, decision, out) = if let Receiver::Mmse = receiver {
            let w = mmse_filter(cdma, &sigs, &h, noise_var)?;
            let y = dot_h(&w, &r);
            (y, detect_qpsk(y), None)
        } else {
            let training = match cfg.train_mode {
                TrainMode::Supervised => true,
                TrainMode::Semi(t) => i < t,
            };
            let stepped = if training {
                receiver
                    .step(&r, desired)
                    .map(|out| (out.y, detect_qpsk(out.y), Some(out)))
            } else {
                receiver.output(&r).and_then(|y| {
                    let decision = detect_qpsk(y);
                    receiver
                        .step(&r, decision)
                        .map(|out| (y, decision, Some(out)))
                })
            };
            match stepped {
                Err(Error::NonFinite(_)) => {
                    trace.diverged = true;
                    return Ok(trace);
                }
                other => other?,
            }
        };

        if !finite(y) || !(desired - y).norm_sqr().is_finite() || !receiver.is_finite() {
            trace.diverged = true;
            return Ok(trace);
        }
        trace.errors.push(decision != desired);
        trace.sq_err.push((desired - y).norm_sqr());
        if let Some(out) = out {
            for (slot, l) in trace
                .lambda
                .iter_mut()
                .zip([out.lambda_a, out.lambda_b, out.lambda_c])
            {
                if let Some(l) = l {
                    slot.push(l);
                }
            }
            trace.branch.push(out.branches.first().copied());
        } else {
            trace.branch.push(None);
        }
    }
    Ok(trace)
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

/// Run-averaged results of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub scheme: SchemeKind,
    pub snr_db: f64,
    /// Cumulative symbol error ratio up to and including each symbol.
    pub ber: Vec<f64>,
    /// Run-averaged `|d - y|^2` per symbol.
    pub mse: Vec<f64>,
    pub lambda_a: Option<Vec<f64>>,
    pub lambda_b: Option<Vec<f64>>,
    pub lambda_c: Option<Vec<f64>>,
    /// Most frequent branch of the first JIDF constituent at each symbol.
    pub branch_mode: Vec<Option<usize>>,
    /// Branch selection counts of the first JIDF constituent.
    pub branch_histogram: Vec<u64>,
    pub final_ber: f64,
    pub runs_used: usize,
    pub runs_diverged: usize,
    pub complexity: Option<Complexity>,
    pub wall_time: Duration,
}

impl ExperimentRecord {
    pub fn len(&self) -> usize {
        self.ber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ber.is_empty()
    }

    /// Mean of the per-symbol MSE over the packet.
    pub fn mean_mse(&self) -> f64 {
        if self.mse.is_empty() {
            return f64::NAN;
        }
        self.mse.iter().sum::<f64>() / self.mse.len() as f64
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let traces: Vec<RunTrace> = pool.install(|| {
        (0..cfg.n_runs)
            .into_par_iter()
            .map(|run| run_once(cfg, run))
            .collect::<Result<Vec<_>>>()
    })?;

    let n = cfg.n_symbols;
    let used: Vec<&RunTrace> = traces.iter().filter(|t| !t.diverged).collect();
    let runs_used = used.len();
    if runs_used == 0 {
        return Err(Error::NonFinite("every Monte-Carlo run diverged"));
    }
    let runs = runs_used as f64;

    let mut ber = Vec::with_capacity(n);
    let mut mse = Vec::with_capacity(n);
    let mut errors = 0u64;
    for i in 0..n {
        errors += used.iter().filter(|t| t.errors[i]).count() as u64;
        ber.push(errors as f64 / ((i + 1) as f64 * runs));
        mse.push(used.iter().map(|t| t.sq_err[i]).sum::<f64>() / runs);
    }
    let lambda = |slot: usize| -> Option<Vec<f64>> {
        if used[0].lambda[slot].is_empty() {
            return None;
        }
        Some(
            (0..n)
                .map(|i| used.iter().map(|t| t.lambda[slot][i]).sum::<f64>() / runs)
                .collect(),
        )
    };

    let branch_count = if cfg.scheme.is_jidf() {
        cfg.branches
    } else {
        0
    };
    let mut branch_histogram = vec![0u64; branch_count];
    let mut branch_mode = Vec::with_capacity(n);
    for i in 0..n {
        let mut counts = vec![0u64; branch_count];
        for t in &used {
            if let Some(b) = t.branch[i] {
                counts[b] += 1;
            }
        }
        for (h, c) in branch_histogram.iter_mut().zip(&counts) {
            *h += c;
        }
        // Lowest index wins ties.
        let mode = counts
            .iter()
            .enumerate()
            .fold(None::<(usize, u64)>, |best, (b, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ if c > 0 => Some((b, c)),
                _ => best,
            })
            .map(|(b, _)| b);
        branch_mode.push(mode);
    }

    Ok(ExperimentRecord {
        scheme: cfg.scheme,
        snr_db: cfg.cdma.snr_db,
        final_ber: *ber.last().expect("n_symbols >= 1"),
        ber,
        mse,
        lambda_a: lambda(0),
        lambda_b: lambda(1),
        lambda_c: lambda(2),
        branch_mode,
        branch_histogram,
        runs_used,
        runs_diverged: traces.len() - runs_used,
        complexity: cfg.complexity().ok(),
        wall_time: start.elapsed(),
    })
}

/// Runs the experiment once per SNR value with the same base seed.
pub fn snr_sweep(cfg: &ExperimentConfig, snr_list: &[f64]) -> Result<Vec<ExperimentRecord>> {
    snr_list
        .iter()
        .map(|&snr| {
            let mut point = cfg.clone();
            point.cdma.snr_db = snr;
            run_experiment(&point)
        })
        .collect()
}

fn fmt_num(x: f64) -> String {
    format!("{x:.9e}")
}

fn fmt_opt(series: &Option<Vec<f64>>, i: usize) -> String {
    series.as_ref().map(|s| fmt_num(s[i])).unwrap_or_default()
}

pub const RECORD_CSV_HEADER: &str = "symbol,mse,ber,lambda_a,lambda_b,lambda_c,b_opt_mode";
pub const SWEEP_CSV_HEADER: &str = "snr_db,ber,mse,runs_used,runs_diverged";

/// Per-symbol CSV text of a record; symbols are numbered from 1.
pub fn record_csv(record: &ExperimentRecord) -> String {
    let mut out = String::new();
    out.push_str(RECORD_CSV_HEADER);
    out.push('\n');
    for i in 0..record.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i + 1,
            fmt_num(record.mse[i]),
            fmt_num(record.ber[i]),
            fmt_opt(&record.lambda_a, i),
            fmt_opt(&record.lambda_b, i),
            fmt_opt(&record.lambda_c, i),
            record.branch_mode[i]
                .map(|b| b.to_string())
                .unwrap_or_default(),
        );
    }
    out
}

/// One row per SNR point: final BER and packet-averaged MSE.
pub fn sweep_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.snr_db),
            fmt_num(r.final_ber),
            fmt_num(r.mean_mse()),
            r.runs_used,
            r.runs_diverged
        );
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv(record: &ExperimentRecord, path: &Path) -> Result<()> {
    write_text(path, &record_csv(record))
}

pub fn write_sweep_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    write_text(path, &sweep_csv(records))
}
