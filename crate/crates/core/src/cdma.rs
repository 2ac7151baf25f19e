//! Synchronous DS-CDMA downlink with a common time-varying multipath channel.
//!
//! Per symbol the receiver observes `M = N + L_p - 1` chip-rate samples:
//!
//! ```text
//! r[i] = sum_k A_k b_k[i] C_k h[i] + isi[i] + n[i]
//! ```
//!
//! The received window is produced by convolving the chip stream of symbols
//! `i - 1`, `i` and `i + 1` with the channel taps, so the ISI term is exact.
//! Channel taps fade independently following Clarke's model, realized as a
//! sum of sinusoids.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::check_len;
use crate::{Error, Result, C64};

/// Default number of sinusoids per fading tap.
pub const DEFAULT_OSCILLATORS: usize = 32;

/// Diagonal loading added to the MMSE covariance before solving.
pub const MMSE_REGULARIZATION: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CdmaConfig {
    /// Number of users `K`; user 0 is the desired one.
    pub users: usize,
    /// Chips per symbol `N`.
    pub chips: usize,
    /// Channel length `L_p` in chips.
    pub paths: usize,
    /// Per-user amplitudes; empty means unit amplitude for every user.
    pub amplitudes: Vec<f64>,
    /// `E_b / N_0` in dB with `E_b = A_1^2`.
    pub snr_db: f64,
    /// Normalized Doppler `f_d T` per symbol.
    pub doppler: f64,
    /// Relative power of the active taps in dB.
    pub path_profile_db: Vec<f64>,
    /// Sinusoids per fading tap.
    pub oscillators: usize,
}

impl Default for CdmaConfig {
    fn default() -> Self {
        Self {
            users: 8,
            chips: 32,
            paths: 9,
            amplitudes: Vec::new(),
            snr_db: 10.0,
            doppler: 1e-4,
            path_profile_db: vec![0.0, -3.0, -9.0],
            oscillators: DEFAULT_OSCILLATORS,
        }
    }
}

impl CdmaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.users < 1 {
            return bad("at least one user required".into());
        }
        if self.chips < 1 || self.paths < 1 {
            return bad("chips and paths must be positive".into());
        }
        if self.paths > self.chips {
            return bad(format!(
                "channel length {} must not exceed the spreading factor {}",
                self.paths, self.chips
            ));
        }
        if !self.amplitudes.is_empty() {
            check_len("amplitudes", self.users, self.amplitudes.len())?;
            if self.amplitudes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return bad("amplitudes must be positive".into());
            }
        }
        if !self.snr_db.is_finite() {
            return bad("snr_db must be finite".into());
        }
        if !(self.doppler.is_finite() && self.doppler >= 0.0) {
            return bad("doppler must be non-negative".into());
        }
        if self.path_profile_db.is_empty() || self.path_profile_db.iter().any(|p| !p.is_finite()) {
            return bad("path profile must be non-empty and finite".into());
        }
        // Gaps of up to two chips between consecutive taps.
        if 2 * (self.path_profile_db.len() - 1) >= self.paths {
            return bad(format!(
                "{} taps with up to 2-chip spacing do not fit in {} paths",
                self.path_profile_db.len(),
                self.paths
            ));
        }
        if self.oscillators < 1 {
            return bad("at least one oscillator per tap required".into());
        }
        Ok(())
    }

    /// Observation length `M = N + L_p - 1`.
    pub fn observation_len(&self) -> usize {
        self.chips + self.paths - 1
    }

    pub fn amplitude(&self, k: usize) -> f64 {
        self.amplitudes.get(k).copied().unwrap_or(1.0)
    }

    /// Per-sample complex noise variance `sigma^2 = A_1^2 / 10^(snr/10)`.
    pub fn noise_variance(&self) -> f64 {
        let a = self.amplitude(0);
        a * a / 10f64.powf(self.snr_db / 10.0)
    }

    /// Tap powers from the profile, normalized to unit sum.
    pub fn tap_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self
            .path_profile_db
            .iter()
            .map(|db| 10f64.powf(db / 10.0))
            .collect();
        let total: f64 = lin.iter().sum();
        lin.iter().map(|p| p / total).collect()
    }
}

/// Unit-norm `±1/sqrt(N)` spreading codes, one per user.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSet {
    codes: Vec<Vec<f64>>,
}

impl SignatureSet {
    pub fn from_codes(codes: Vec<Vec<f64>>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::InvalidParameter("empty signature set".into()));
        }
        let n = codes[0].len();
        for c in &codes {
            check_len("signature length", n, c.len())?;
        }
        Ok(Self { codes })
    }

    pub fn get(&self, k: usize) -> &[f64] {
        &self.codes[k]
    }

    pub fn users(&self) -> usize {
        self.codes.len()
    }

    pub fn chips(&self) -> usize {
        self.codes[0].len()
    }
}

/// Draws `K` pairwise distinct random binary signatures of length `N`.
pub fn generate_signatures<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<SignatureSet> {
    if k < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "need K >= 1 and N >= 1 (K = {k}, N = {n})"
        )));
    }
    if n < 64 && (k as u128) > (1u128 << n) {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {k} distinct signatures of length {n}"
        )));
    }
    let chip = 1.0 / (n as f64).sqrt();
    let mut codes: Vec<Vec<f64>> = Vec::with_capacity(k);
    while codes.len() < k {
        let code: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { chip } else { -chip })
            .collect();
        if !codes.contains(&code) {
            codes.push(code);
        }
    }
    Ok(SignatureSet { codes })
}

/// `M x L_p` matrix whose column `l` is the signature delayed by `l` chips.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ConvolutionMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, m: usize, l: usize) -> f64 {
        self.data[m * self.cols + l]
    }

    /// `C h`.
    pub fn mul(&self, h: &[C64]) -> Result<Vec<C64>> {
        check_len("channel taps", self.cols, h.len())?;
        Ok((0..self.rows)
            .map(|m| {
                h.iter()
                    .enumerate()
                    .fold(C64::new(0.0, 0.0), |acc, (l, hl)| acc + hl * self.get(m, l))
            })
            .collect())
    }
}

pub fn build_convolution_matrix(s: &[f64], paths: usize) -> Result<ConvolutionMatrix> {
    if paths < 1 || s.is_empty() {
        return Err(Error::InvalidParameter(
            "signature and channel must be non-empty".into(),
        ));
    }
    let rows = s.len() + paths - 1;
    let mut data = vec![0.0; rows * paths];
    for l in 0..paths {
        for (c, &chip) in s.iter().enumerate() {
            data[(c + l) * paths + l] = chip;
        }
    }
    Ok(ConvolutionMatrix {
        rows,
        cols: paths,
        data,
    })
}

/// One Rayleigh-fading tap: a sum of sinusoids with Clarke's Doppler
/// spectrum (arrival angles spread evenly over a quarter circle with a random
/// rotation, random phases).
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkeFader {
    scale: f64,
    freq_i: Vec<f64>,
    freq_q: Vec<f64>,
    phase_i: Vec<f64>,
    phase_q: Vec<f64>,
}

impl ClarkeFader {
    pub fn new<R: Rng + ?Sized>(doppler: f64, power: f64, oscillators: usize, rng: &mut R) -> Self {
        let n = oscillators as f64;
        let w = 2.0 * PI * doppler;
        let theta = rng.random_range(-PI..PI);
        let mut fader = Self {
            // sqrt(P / 2) * sqrt(2 / N) per quadrature branch.
            scale: (power / n).sqrt(),
            freq_i: Vec::with_capacity(oscillators),
            freq_q: Vec::with_capacity(oscillators),
            phase_i: Vec::with_capacity(oscillators),
            phase_q: Vec::with_capacity(oscillators),
        };
        for idx in 1..=oscillators {
            let alpha = (2.0 * PI * idx as f64 - PI + theta) / (4.0 * n);
            fader.freq_i.push(w * alpha.cos());
            fader.freq_q.push(w * alpha.sin());
            fader.phase_i.push(rng.random_range(-PI..PI));
            fader.phase_q.push(rng.random_range(-PI..PI));
        }
        fader
    }

    /// Gain at symbol time `t`.
    pub fn gain(&self, t: u64) -> C64 {
        let t = t as f64;
        let re: f64 = self
            .freq_i
            .iter()
            .zip(&self.phase_i)
            .map(|(f, p)| (f * t + p).cos())
            .sum();
        let im: f64 = self
            .freq_q
            .iter()
            .zip(&self.phase_q)
            .map(|(f, p)| (f * t + p).cos())
            .sum();
        C64::new(re, im) * self.scale
    }
}

/// Multipath channel with a few active fading taps at random chip delays.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    paths: usize,
    delays: Vec<usize>,
    faders: Vec<ClarkeFader>,
    t: u64,
}

impl ChannelState {
    /// First tap at delay 0, each following tap 0, 1 or 2 chips after the
    /// previous one (equally likely).
    pub fn new<R: Rng + ?Sized>(cfg: &CdmaConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let powers = cfg.tap_powers();
        let mut delays = Vec::with_capacity(powers.len());
        let mut delay = 0;
        for idx in 0..powers.len() {
            if idx > 0 {
                delay += rng.random_range(0..=2usize);
            }
            delays.push(delay);
        }
        let faders = powers
            .iter()
            .map(|&p| ClarkeFader::new(cfg.doppler, p, cfg.oscillators, rng))
            .collect();
        Ok(Self {
            paths: cfg.paths,
            delays,
            faders,
            t: 0,
        })
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn faders(&self) -> &[ClarkeFader] {
        &self.faders
    }

    /// Current `L_p`-vector of path gains; taps sharing a delay add up.
    pub fn gains(&self) -> Vec<C64> {
        let mut h = vec![C64::new(0.0, 0.0); self.paths];
        for (&d, f) in self.delays.iter().zip(&self.faders) {
            h[d] += f.gain(self.t);
        }
        h
    }

    /// Returns the gains for the current symbol and advances one symbol.
    pub fn next_gains(&mut self) -> Vec<C64> {
        let h = self.gains();
        self.t += 1;
        h
    }
}

/// Symbols of all users for the previous, current and next symbol period.
#[derive(Debug, Clone, Copy)]
pub struct SymbolWindow<'a> {
    pub prev: &'a [C64],
    pub cur: &'a [C64],
    pub next: &'a [C64],
}

/// Noiseless received window, by chip-rate convolution of the transmitted
/// chip stream with the channel `h`.
pub fn noiseless_received(
    cfg: &CdmaConfig,
    sigs: &SignatureSet,
    h: &[C64],
    symbols: SymbolWindow<'_>,
) -> Result<Vec<C64>> {
    let (n, lp, k) = (cfg.chips, cfg.paths, cfg.users);
    check_len("signature count", k, sigs.users())?;
    check_len("signature length", n, sigs.chips())?;
    check_len("channel taps", lp, h.len())?;
    for s in [symbols.prev, symbols.cur, symbols.next] {
        check_len("symbols per user", k, s.len())?;
    }
    let mut chips = Vec::with_capacity(3 * n);
    for block in [symbols.prev, symbols.cur, symbols.next] {
        for c in 0..n {
            let chip = (0..k).fold(C64::new(0.0, 0.0), |acc, user| {
                acc + block[user] * (cfg.amplitude(user) * sigs.get(user)[c])
            });
            chips.push(chip);
        }
    }
    Ok((0..cfg.observation_len())
        .map(|m| (0..lp).fold(C64::new(0.0, 0.0), |acc, l| acc + h[l] * chips[n + m - l]))
        .collect())
}

/// Circularly symmetric complex Gaussian noise with variance `var` per sample.
pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R, m: usize, var: f64) -> Vec<C64> {
    let s = (var / 2.0).sqrt();
    (0..m)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// Received window with noise of variance `noise_var` drawn from `rng`.
pub fn generate_received<R: Rng + ?Sized>(
    cfg: &CdmaConfig,
    sigs: &SignatureSet,
    h: &[C64],
    symbols: SymbolWindow<'_>,
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<C64>> {
    let mut r = noiseless_received(cfg, sigs, h, symbols)?;
    let noise = draw_noise(rng, r.len(), noise_var);
    for (x, n) in r.iter_mut().zip(noise) {
        *x += n;
    }
    Ok(r)
}

/// Contribution of a unit symbol of one user, transmitted `shift` symbol
/// periods away from the current one (`-1`, `0` or `1`), to the window.
pub fn symbol_response(sig: &[f64], h: &[C64], shift: i32) -> Result<Vec<C64>> {
    let base = build_convolution_matrix(sig, h.len())?.mul(h)?;
    let (m, n) = (base.len(), sig.len() as i64);
    let offset = shift as i64 * n;
    Ok((0..m as i64)
        .map(|row| {
            let src = row - offset;
            if (0..m as i64).contains(&src) {
                base[src as usize]
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// Covariance `R` of the received window and cross-correlation `p` with the
/// desired user's symbol.
pub fn received_statistics(
    cfg: &CdmaConfig,
    sigs: &SignatureSet,
    h: &[C64],
    noise_var: f64,
) -> Result<(DMatrix<C64>, Vec<C64>)> {
    let m = cfg.observation_len();
    check_len("signature count", cfg.users, sigs.users())?;
    let mut r = DMatrix::<C64>::zeros(m, m);
    let mut p = Vec::new();
    for k in 0..cfg.users {
        let a2 = cfg.amplitude(k).powi(2);
        for shift in [-1, 0, 1] {
            let q = symbol_response(sigs.get(k), h, shift)?;
            for row in 0..m {
                for col in 0..m {
                    r[(row, col)] += q[row] * q[col].conj() * a2;
                }
            }
            if k == 0 && shift == 0 {
                p = q.iter().map(|x| x * cfg.amplitude(0)).collect();
            }
        }
    }
    for i in 0..m {
        r[(i, i)] += C64::new(noise_var, 0.0);
    }
    Ok((r, p))
}

/// Linear MMSE receiver `w = R^-1 p` for the desired user, from the true
/// channel, signatures and noise level.
pub fn mmse_filter(
    cfg: &CdmaConfig,
    sigs: &SignatureSet,
    h: &[C64],
    noise_var: f64,
) -> Result<Vec<C64>> {
    let (mut r, p) = received_statistics(cfg, sigs, h, noise_var)?;
    let m = r.nrows();
    for i in 0..m {
        r[(i, i)] += C64::new(MMSE_REGULARIZATION, 0.0);
    }
    let rhs = nalgebra::DVector::from_column_slice(&p);
    let sol = match r.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => r
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("MMSE covariance".into()))?,
    };
    if sol.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Singular("MMSE solution is not finite".into()));
    }
    Ok(sol.iter().copied().collect())
}

/// Quadrant slicer; zero components decide `+1`.
pub fn detect_qpsk(y: C64) -> C64 {
    let re = if y.re >= 0.0 { 1.0 } else { -1.0 };
    let im = if y.im >= 0.0 { 1.0 } else { -1.0 };
    C64::new(re, im) * FRAC_1_SQRT_2
}

/// Uniformly drawn QPSK symbol `(±1 ± j) / sqrt(2)`.
pub fn random_qpsk<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let im = if rng.random::<bool>() { 1.0 } else { -1.0 };
    C64::new(re, im) * FRAC_1_SQRT_2
}
