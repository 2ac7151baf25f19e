//! Adaptive filters: the full-rank LMS baseline and the JIDF reduced-rank
//! filter.
//!
//! A JIDF filter factors an `M`-tap filter into an `I`-tap interpolator `v`,
//! one of `B` fixed decimation patterns and a `D`-tap reduced-rank filter
//! `w_bar`. Each iteration it picks the pattern with the smallest
//! instantaneous squared error and then adapts `v` and `w_bar` jointly by LMS:
//!
//! ```text
//! r_bar = D_b R_o v*            y = w_bar^H r_bar      e = d - y
//! u     = R_o^T D_b^T w_bar*
//! v     <- v     + eta * e* * u
//! w_bar <- w_bar + mu  * e* * r_bar
//! ```
//!
//! Both updates use the pre-update values of `v` and `w_bar`.

use crate::error::check_len;
use crate::signalcore::{
    apply_decimation, build_hankel, generate_decimation_patterns, toeplitz_mul, DecimationPattern,
    HankelRegressor,
};
use crate::{Error, Result, C64};

/// `a^H b`.
pub(crate) fn dot_h(a: &[C64], b: &[C64]) -> C64 {
    a.iter()
        .zip(b)
        .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

fn check_step(name: &str, step: f64) -> Result<()> {
    if step.is_finite() && step >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and non-negative, got {step}"
        )))
    }
}

/// Output of one adaptation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub y: C64,
    /// `d - y`.
    pub e: C64,
    /// Selected decimation branch (0-based); `None` for full-rank filters.
    pub branch: Option<usize>,
}

/// Full-rank complex LMS filter, `y = w^H r`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRankLms {
    w: Vec<C64>,
    mu: f64,
}

impl FullRankLms {
    pub fn new(m: usize, mu: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "filter length must be positive".into(),
            ));
        }
        check_step("mu", mu)?;
        Ok(Self {
            w: vec![C64::new(0.0, 0.0); m],
            mu,
        })
    }

    pub fn with_weights(w: Vec<C64>, mu: f64) -> Result<Self> {
        let mut f = Self::new(w.len(), mu)?;
        f.w = w;
        Ok(f)
    }

    pub fn weights(&self) -> &[C64] {
        &self.w
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn output(&self, r: &[C64]) -> Result<C64> {
        check_len("full-rank LMS input", self.w.len(), r.len())?;
        Ok(dot_h(&self.w, r))
    }

    pub fn step(&mut self, r: &[C64], d: C64) -> Result<StepResult> {
        let y = self.output(r)?;
        let e = d - y;
        let g = e.conj() * self.mu;
        for (w, x) in self.w.iter_mut().zip(r) {
            *w += g * x;
        }
        Ok(StepResult { y, e, branch: None })
    }
}

/// Dimensions and step sizes of one JIDF filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JidfParams {
    /// Observation length `M`.
    pub m: usize,
    /// Interpolator length `I`.
    pub interp_len: usize,
    /// Reduced rank `D`.
    pub rank: usize,
    /// Number of decimation branches `B`.
    pub branches: usize,
    /// Interpolator step size.
    pub eta: f64,
    /// Reduced-rank filter step size.
    pub mu: f64,
}

/// Branch selection for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSelection {
    /// 0-based index of the winning pattern.
    pub branch: usize,
    pub y: C64,
    pub error: C64,
    /// Decimated interpolated regressor of the winning branch.
    pub reduced: Vec<C64>,
}

/// JIDF reduced-rank adaptive filter.
#[derive(Debug, Clone, PartialEq)]
pub struct JidfFilter {
    m: usize,
    v: Vec<C64>,
    w_bar: Vec<C64>,
    patterns: Vec<DecimationPattern>,
    eta: f64,
    mu: f64,
    selected: usize,
}

impl JidfFilter {
    /// Unit-impulse interpolator, zero reduced-rank filter, uniform-stride
    /// decimation patterns.
    pub fn new(p: JidfParams) -> Result<Self> {
        if p.interp_len < 1 || p.interp_len > p.m {
            return Err(Error::InvalidParameter(format!(
                "interpolator length I = {} must be in 1..={}",
                p.interp_len, p.m
            )));
        }
        let patterns = generate_decimation_patterns(p.m, p.rank, p.branches)?;
        let mut v = vec![C64::new(0.0, 0.0); p.interp_len];
        v[0] = C64::new(1.0, 0.0);
        Self::from_parts(
            p.m,
            v,
            vec![C64::new(0.0, 0.0); p.rank],
            patterns,
            p.eta,
            p.mu,
        )
    }

    /// Builds a filter from explicit state. All patterns must have the
    /// length of `w_bar` and index into an `m`-vector.
    pub fn from_parts(
        m: usize,
        v: Vec<C64>,
        w_bar: Vec<C64>,
        patterns: Vec<DecimationPattern>,
        eta: f64,
        mu: f64,
    ) -> Result<Self> {
        check_step("eta", eta)?;
        check_step("mu", mu)?;
        if v.is_empty() || v.len() > m {
            return Err(Error::InvalidParameter(format!(
                "interpolator length {} must be in 1..={m}",
                v.len()
            )));
        }
        if patterns.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one decimation pattern required".into(),
            ));
        }
        for p in &patterns {
            check_len("decimation pattern length", w_bar.len(), p.len())?;
            if p.indices().iter().any(|&i| i >= m) {
                return Err(Error::InvalidParameter("pattern index out of range".into()));
            }
        }
        Ok(Self {
            m,
            v,
            w_bar,
            patterns,
            eta,
            mu,
            selected: 0,
        })
    }

    pub fn observation_len(&self) -> usize {
        self.m
    }

    pub fn interpolator(&self) -> &[C64] {
        &self.v
    }

    pub fn reduced_filter(&self) -> &[C64] {
        &self.w_bar
    }

    pub fn patterns(&self) -> &[DecimationPattern] {
        &self.patterns
    }

    pub fn rank(&self) -> usize {
        self.w_bar.len()
    }

    pub fn interp_len(&self) -> usize {
        self.v.len()
    }

    pub fn branch_count(&self) -> usize {
        self.patterns.len()
    }

    /// Branch chosen by the most recent [`step`](Self::step) (0 before any step).
    pub fn selected_branch(&self) -> usize {
        self.selected
    }

    pub fn hankel(&self, r: &[C64]) -> Result<HankelRegressor> {
        check_len("JIDF input", self.m, r.len())?;
        build_hankel(r, self.m, self.v.len())
    }

    fn check_hankel(&self, h: &HankelRegressor) -> Result<()> {
        check_len("Hankel rows", self.m, h.rows())?;
        check_len("Hankel columns", self.v.len(), h.cols())
    }

    fn check_branch(&self, b: usize) -> Result<()> {
        if b < self.patterns.len() {
            Ok(())
        } else {
            Err(Error::BranchOutOfRange {
                branch: b,
                count: self.patterns.len(),
            })
        }
    }

    /// Picks the pattern minimizing `|d - w_bar^H D_b R_o v*|^2`; ties go to
    /// the lowest index.
    pub fn select_branch(&self, hankel: &HankelRegressor, d: C64) -> Result<BranchSelection> {
        self.check_hankel(hankel)?;
        let interpolated = hankel.mul_conj(&self.v)?;
        let mut best: Option<BranchSelection> = None;
        for (b, pattern) in self.patterns.iter().enumerate() {
            let reduced = apply_decimation(pattern, &interpolated)?;
            let y = dot_h(&self.w_bar, &reduced);
            let error = d - y;
            let better = match &best {
                None => true,
                Some(cur) => error.norm_sqr() < cur.error.norm_sqr(),
            };
            if better {
                best = Some(BranchSelection {
                    branch: b,
                    y,
                    error,
                    reduced,
                });
            }
        }
        Ok(best.expect("at least one pattern"))
    }

    /// `w_bar^H D_b R_o v*`.
    pub fn output_primal(&self, hankel: &HankelRegressor, b: usize) -> Result<C64> {
        self.check_hankel(hankel)?;
        self.check_branch(b)?;
        let reduced = apply_decimation(&self.patterns[b], &hankel.mul_conj(&self.v)?)?;
        Ok(dot_h(&self.w_bar, &reduced))
    }

    /// `v^H u` with `u = R_o^T D_b^T w_bar*`.
    pub fn output_dual(&self, hankel: &HankelRegressor, b: usize) -> Result<C64> {
        self.check_hankel(hankel)?;
        self.check_branch(b)?;
        let u = self.interp_regressor(hankel, b)?;
        Ok(dot_h(&self.v, &u))
    }

    fn interp_regressor(&self, hankel: &HankelRegressor, b: usize) -> Result<Vec<C64>> {
        let w_conj: Vec<C64> = self.w_bar.iter().map(|w| w.conj()).collect();
        hankel.transpose_mul_scattered(&self.patterns[b], &w_conj)
    }

    /// Output with the most recently selected branch, without adapting.
    pub fn output(&self, r: &[C64]) -> Result<C64> {
        let h = self.hankel(r)?;
        self.output_primal(&h, self.selected)
    }

    /// The full-rank filter `S_D w_bar = V D_b^T w_bar` with
    /// `(S_D w_bar)^H r = w_bar^H D_b R_o v*` for every `r`.
    pub fn equivalent_filter(&self, b: usize) -> Result<Vec<C64>> {
        self.check_branch(b)?;
        let scattered = self.patterns[b].scatter(&self.w_bar, self.m)?;
        Ok(toeplitz_mul(&self.v, &scattered))
    }

    pub fn step(&mut self, r: &[C64], d: C64) -> Result<StepResult> {
        let hankel = self.hankel(r)?;
        let sel = self.select_branch(&hankel, d)?;
        let u = self.interp_regressor(&hankel, sel.branch)?;
        let g = sel.error.conj();
        for (v, uk) in self.v.iter_mut().zip(&u) {
            *v += g * self.eta * uk;
        }
        for (w, x) in self.w_bar.iter_mut().zip(&sel.reduced) {
            *w += g * self.mu * x;
        }
        self.selected = sel.branch;
        Ok(StepResult {
            y: sel.y,
            e: sel.error,
            branch: Some(sel.branch),
        })
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.v
            .iter()
            .chain(&self.w_bar)
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl FullRankLms {
    pub(crate) fn is_finite(&self) -> bool {
        self.w.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
