//! Convex combinations of adaptive filters.
//!
//! A combiner mixes two outputs as `lambda * y1 + (1 - lambda) * y2` with
//! `lambda = sigmoid(u)`. The auxiliary variable `u` follows a stochastic
//! gradient of the squared error at the combiner node and is clipped to
//! `[-u_max, u_max]` so that `lambda` never saturates completely.
//!
//! Scheme A is a two-level tree over four JIDF filters (`lambda_a` over
//! filters 1 and 2, `lambda_b` over 3 and 4, `lambda_c` over the two
//! intermediate outputs). Scheme B mixes two JIDF filters with a single
//! `lambda_c`. [`Clms`] mixes two full-rank LMS filters.
//!
//! Every constituent filter adapts with its own error; the combiners never
//! feed back into the constituents.

use crate::error::check_len;
use crate::filters::{FullRankLms, JidfFilter, StepResult};
use crate::{Error, Result, C64};

/// Default clipping bound for the auxiliary variable.
pub const DEFAULT_U_MAX: f64 = 4.0;

pub fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Sigmoid-parametrized convex combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct Combiner {
    u: f64,
    mu: f64,
    u_max: f64,
}

impl Combiner {
    /// Starts at `u = 0` (`lambda = 0.5`).
    pub fn new(mu: f64, u_max: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "combiner step must be finite and non-negative, got {mu}"
            )));
        }
        if !(u_max.is_finite() && u_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "u_max must be finite and positive, got {u_max}"
            )));
        }
        Ok(Self { u: 0.0, mu, u_max })
    }

    /// Combiner with an explicit auxiliary value, clipped to `±u_max`.
    pub fn with_u(u: f64, mu: f64, u_max: f64) -> Result<Self> {
        let mut c = Self::new(mu, u_max)?;
        if !u.is_finite() {
            return Err(Error::NonFinite("combiner auxiliary variable"));
        }
        c.u = u.clamp(-u_max, u_max);
        Ok(c)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn lambda(&self) -> f64 {
        sigmoid(self.u)
    }

    pub fn mix(&self, y1: C64, y2: C64) -> C64 {
        let l = self.lambda();
        y1 * l + y2 * (1.0 - l)
    }

    /// Gradient step on `u` given the constituent outputs and the error
    /// `e = d - mix(y1, y2)` of this node.
    pub fn update(&mut self, y1: C64, y2: C64, e: C64) -> Result<()> {
        if ![y1, y2, e]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite("combiner update inputs"));
        }
        let l = self.lambda();
        let grad = ((y1 - y2).conj() * e).re * l * (1.0 - l);
        self.u = (self.u + self.mu * grad).clamp(-self.u_max, self.u_max);
        Ok(())
    }
}

/// Per-step diagnostics of a combined receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutput {
    /// Combined output.
    pub y: C64,
    /// Constituent outputs `y_1, y_2, ...`.
    pub constituents: Vec<C64>,
    /// Intermediate node outputs `y_a, y_b` (Scheme A only).
    pub intermediate: Vec<C64>,
    /// Mixing parameters used for this output (pre-update).
    pub lambda_a: Option<f64>,
    pub lambda_b: Option<f64>,
    pub lambda_c: Option<f64>,
    /// Selected decimation branch of each JIDF constituent.
    pub branches: Vec<usize>,
}

fn branches_of(steps: &[StepResult]) -> Vec<usize> {
    steps.iter().filter_map(|s| s.branch).collect()
}

fn check_shared_m(filters: &[JidfFilter]) -> Result<usize> {
    let m = filters[0].observation_len();
    for f in &filters[1..] {
        check_len("constituent observation length", m, f.observation_len())?;
    }
    Ok(m)
}

fn weighted_sum(m: usize, terms: &[(f64, Vec<C64>)]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m];
    for (weight, w) in terms {
        for (o, x) in out.iter_mut().zip(w) {
            *o += x * *weight;
        }
    }
    out
}

/// Four JIDF filters combined in a two-level tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeA {
    filters: [JidfFilter; 4],
    a: Combiner,
    b: Combiner,
    c: Combiner,
}

impl SchemeA {
    pub fn new(filters: [JidfFilter; 4], a: Combiner, b: Combiner, c: Combiner) -> Result<Self> {
        check_shared_m(&filters)?;
        Ok(Self { filters, a, b, c })
    }

    pub fn filters(&self) -> &[JidfFilter; 4] {
        &self.filters
    }

    pub fn combiners(&self) -> [&Combiner; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn observation_len(&self) -> usize {
        self.filters[0].observation_len()
    }

    pub fn step(&mut self, r: &[C64], d: C64) -> Result<SchemeOutput> {
        check_len("Scheme A input", self.observation_len(), r.len())?;
        let steps = self
            .filters
            .iter_mut()
            .map(|f| f.step(r, d))
            .collect::<Result<Vec<_>>>()?;
        let [y1, y2, y3, y4] = [steps[0].y, steps[1].y, steps[2].y, steps[3].y];
        let (la, lb, lc) = (self.a.lambda(), self.b.lambda(), self.c.lambda());
        let ya = self.a.mix(y1, y2);
        let yb = self.b.mix(y3, y4);
        let yc = self.c.mix(ya, yb);
        self.a.update(y1, y2, d - ya)?;
        self.b.update(y3, y4, d - yb)?;
        self.c.update(ya, yb, d - yc)?;
        Ok(SchemeOutput {
            y: yc,
            constituents: vec![y1, y2, y3, y4],
            intermediate: vec![ya, yb],
            lambda_a: Some(la),
            lambda_b: Some(lb),
            lambda_c: Some(lc),
            branches: branches_of(&steps),
        })
    }

    /// Combined output using each filter's last selected branch.
    pub fn output(&self, r: &[C64]) -> Result<C64> {
        let ys = self
            .filters
            .iter()
            .map(|f| f.output(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .c
            .mix(self.a.mix(ys[0], ys[1]), self.b.mix(ys[2], ys[3])))
    }

    /// Equivalent full-rank filter for the given per-filter branches.
    pub fn equivalent_filter_for(&self, branches: &[usize]) -> Result<Vec<C64>> {
        check_len("Scheme A branches", 4, branches.len())?;
        let (la, lb, lc) = (self.a.lambda(), self.b.lambda(), self.c.lambda());
        let weights = [
            lc * la,
            lc * (1.0 - la),
            (1.0 - lc) * lb,
            (1.0 - lc) * (1.0 - lb),
        ];
        let terms = self
            .filters
            .iter()
            .zip(branches)
            .zip(weights)
            .map(|((f, &b), w)| Ok((w, f.equivalent_filter(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(weighted_sum(self.observation_len(), &terms))
    }

    /// Equivalent full-rank filter with each filter's current branch.
    pub fn equivalent_filter(&self) -> Vec<C64> {
        let branches: Vec<usize> = self.filters.iter().map(|f| f.selected_branch()).collect();
        self.equivalent_filter_for(&branches)
            .expect("selected branches are always in range")
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.filters.iter().all(|f| f.is_finite())
    }
}

/// Two JIDF filters with one combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeB {
    filters: [JidfFilter; 2],
    c: Combiner,
}

impl SchemeB {
    pub fn new(filters: [JidfFilter; 2], c: Combiner) -> Result<Self> {
        check_shared_m(&filters)?;
        Ok(Self { filters, c })
    }

    pub fn filters(&self) -> &[JidfFilter; 2] {
        &self.filters
    }

    pub fn combiner(&self) -> &Combiner {
        &self.c
    }

    pub fn observation_len(&self) -> usize {
        self.filters[0].observation_len()
    }

    pub fn step(&mut self, r: &[C64], d: C64) -> Result<SchemeOutput> {
        check_len("Scheme B input", self.observation_len(), r.len())?;
        let s1 = self.filters[0].step(r, d)?;
        let s2 = self.filters[1].step(r, d)?;
        let lc = self.c.lambda();
        let yc = self.c.mix(s1.y, s2.y);
        self.c.update(s1.y, s2.y, d - yc)?;
        Ok(SchemeOutput {
            y: yc,
            constituents: vec![s1.y, s2.y],
            intermediate: Vec::new(),
            lambda_a: None,
            lambda_b: None,
            lambda_c: Some(lc),
            branches: branches_of(&[s1, s2]),
        })
    }

    pub fn output(&self, r: &[C64]) -> Result<C64> {
        Ok(self
            .c
            .mix(self.filters[0].output(r)?, self.filters[1].output(r)?))
    }

    pub fn equivalent_filter_for(&self, branches: &[usize]) -> Result<Vec<C64>> {
        check_len("Scheme B branches", 2, branches.len())?;
        let lc = self.c.lambda();
        let terms = [
            (lc, self.filters[0].equivalent_filter(branches[0])?),
            (1.0 - lc, self.filters[1].equivalent_filter(branches[1])?),
        ];
        Ok(weighted_sum(self.observation_len(), &terms))
    }

    pub fn equivalent_filter(&self) -> Vec<C64> {
        let branches = [
            self.filters[0].selected_branch(),
            self.filters[1].selected_branch(),
        ];
        self.equivalent_filter_for(&branches)
            .expect("selected branches are always in range")
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.filters.iter().all(|f| f.is_finite())
    }
}

/// Convex combination of two full-rank LMS filters.
#[derive(Debug, Clone, PartialEq)]
pub struct Clms {
    filters: [FullRankLms; 2],
    a: Combiner,
}

impl Clms {
    pub fn new(filters: [FullRankLms; 2], a: Combiner) -> Result<Self> {
        check_len("CLMS filter lengths", filters[0].len(), filters[1].len())?;
        Ok(Self { filters, a })
    }

    pub fn filters(&self) -> &[FullRankLms; 2] {
        &self.filters
    }

    pub fn combiner(&self) -> &Combiner {
        &self.a
    }

    pub fn step(&mut self, r: &[C64], d: C64) -> Result<SchemeOutput> {
        let s1 = self.filters[0].step(r, d)?;
        let s2 = self.filters[1].step(r, d)?;
        let la = self.a.lambda();
        let y = self.a.mix(s1.y, s2.y);
        self.a.update(s1.y, s2.y, d - y)?;
        Ok(SchemeOutput {
            y,
            constituents: vec![s1.y, s2.y],
            intermediate: Vec::new(),
            lambda_a: Some(la),
            lambda_b: None,
            lambda_c: None,
            branches: Vec::new(),
        })
    }

    pub fn output(&self, r: &[C64]) -> Result<C64> {
        Ok(self
            .a
            .mix(self.filters[0].output(r)?, self.filters[1].output(r)?))
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.filters.iter().all(|f| f.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::JidfParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn jidf(m: usize, i: usize, d: usize, mu: f64) -> JidfFilter {
        JidfFilter::new(JidfParams {
            m,
            interp_len: i,
            rank: d,
            branches: (m / d).min(2),
            eta: 0.01,
            mu,
        })
        .unwrap()
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(4.0) - 0.9820137900).abs() < 1e-9);
        assert!((sigmoid(-4.0) - 0.0179862100).abs() < 1e-9);
    }

    #[test]
    fn combiner_update_by_hand() {
        let mut c = Combiner::new(0.25, 4.0).unwrap();
        c.update(C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.2, 0.0))
            .unwrap();
        assert!((c.u() - 0.00625).abs() < 1e-15);
    }

    #[test]
    fn combiner_zero_gradient_cases() {
        let mut c = Combiner::with_u(0.7, 0.5, 4.0).unwrap();
        let y = C64::new(0.3, -0.1);
        c.update(y, y, C64::new(1.0, 1.0)).unwrap();
        assert_eq!(c.u(), 0.7);
        c.update(y, C64::new(2.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(c.u(), 0.7);
    }

    #[test]
    fn combiner_clips() {
        let mut c = Combiner::with_u(3.99, 1e6, 4.0).unwrap();
        c.update(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
            .unwrap();
        assert_eq!(c.u(), 4.0);
        assert_eq!(Combiner::with_u(-10.0, 0.1, 4.0).unwrap().u(), -4.0);
    }

    #[test]
    fn combiner_rejects_non_finite() {
        let mut c = Combiner::new(0.1, 4.0).unwrap();
        let nan = C64::new(f64::NAN, 0.0);
        assert!(c
            .update(nan, C64::new(0.0, 0.0), C64::new(1.0, 0.0))
            .is_err());
        assert!(Combiner::new(-0.1, 4.0).is_err());
        assert!(Combiner::new(0.1, 0.0).is_err());
    }

    #[test]
    fn scheme_a_rejects_mixed_lengths() {
        let c = Combiner::new(0.1, 4.0).unwrap();
        let fs = [
            jidf(8, 2, 2, 0.1),
            jidf(8, 2, 2, 0.1),
            jidf(9, 2, 2, 0.1),
            jidf(8, 2, 2, 0.1),
        ];
        assert!(SchemeA::new(fs, c.clone(), c.clone(), c).is_err());
    }

    #[test]
    fn scheme_b_midpoint_of_equal_outputs() {
        // Fresh filters output zero; force equal nonzero outputs with identical constituents.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = jidf(8, 2, 4, 0.2);
        let mut s = SchemeB::new([f.clone(), f], Combiner::new(0.5, 4.0).unwrap()).unwrap();
        for _ in 0..20 {
            let r = rand_vec(&mut rng, 8);
            let out = s.step(&r, C64::new(1.0, -1.0)).unwrap();
            assert_eq!(out.constituents[0], out.constituents[1]);
            assert!((out.y - out.constituents[0]).norm() < 1e-15);
        }
        assert_eq!(s.combiner().u(), 0.0);
    }

    #[test]
    fn scheme_a_equal_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = jidf(8, 2, 4, 0.2);
        let c = Combiner::new(0.5, 4.0).unwrap();
        let mut s = SchemeA::new(
            [f.clone(), f.clone(), f.clone(), f],
            c.clone(),
            c.clone(),
            c,
        )
        .unwrap();
        for _ in 0..20 {
            let out = s.step(&rand_vec(&mut rng, 8), C64::new(-1.0, 1.0)).unwrap();
            assert!((out.y - out.constituents[0]).norm() < 1e-14);
        }
    }

    #[test]
    fn scheme_a_saturated_tracks_first_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fs = [
            jidf(8, 2, 4, 0.2),
            jidf(8, 3, 2, 0.05),
            jidf(8, 1, 8, 0.1),
            jidf(8, 2, 2, 0.3),
        ];
        let sat = Combiner::with_u(4.0, 0.0, 4.0).unwrap();
        let mut s = SchemeA::new(fs, sat.clone(), Combiner::new(0.0, 4.0).unwrap(), sat).unwrap();
        let bound = 1.0 - sigmoid(4.0) * sigmoid(4.0);
        for _ in 0..50 {
            let out = s.step(&rand_vec(&mut rng, 8), C64::new(1.0, 1.0)).unwrap();
            let spread = out
                .constituents
                .iter()
                .map(|y| (y - out.constituents[0]).norm())
                .fold(0.0, f64::max);
            assert!((out.y - out.constituents[0]).norm() <= bound * spread + 1e-12);
        }
    }

    #[test]
    fn endpoint_equivalent_filters() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut fs = [
            jidf(8, 2, 4, 0.2),
            jidf(8, 3, 2, 0.05),
            jidf(8, 1, 8, 0.1),
            jidf(8, 2, 2, 0.3),
        ];
        for f in fs.iter_mut() {
            for _ in 0..5 {
                f.step(&rand_vec(&mut rng, 8), C64::new(1.0, 0.0)).unwrap();
            }
        }
        // Exact endpoint: u large enough that sigmoid(u) rounds to 1.
        let one = Combiner::with_u(40.0, 0.0, 40.0).unwrap();
        assert_eq!(one.lambda(), 1.0);
        let s = SchemeA::new(fs.clone(), one.clone(), one.clone(), one.clone()).unwrap();
        assert_eq!(
            s.equivalent_filter(),
            fs[0].equivalent_filter(fs[0].selected_branch()).unwrap()
        );
        let sb = SchemeB::new([fs[0].clone(), fs[1].clone()], one).unwrap();
        assert_eq!(
            sb.equivalent_filter(),
            fs[0].equivalent_filter(fs[0].selected_branch()).unwrap()
        );
    }

    #[test]
    fn zero_filters_give_zero_equivalent() {
        let c = Combiner::new(0.1, 4.0).unwrap();
        let f = jidf(8, 2, 4, 0.2);
        let s = SchemeA::new(
            [f.clone(), f.clone(), f.clone(), f.clone()],
            c.clone(),
            c.clone(),
            c.clone(),
        )
        .unwrap();
        assert!(s
            .equivalent_filter()
            .iter()
            .all(|z| *z == C64::new(0.0, 0.0)));
        let s = SchemeB::new([f.clone(), f], c).unwrap();
        assert!(s
            .equivalent_filter()
            .iter()
            .all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn clms_identical_filters() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = FullRankLms::new(6, 0.05).unwrap();
        let mut c = Clms::new([f.clone(), f], Combiner::new(0.25, 4.0).unwrap()).unwrap();
        for _ in 0..30 {
            let out = c.step(&rand_vec(&mut rng, 6), C64::new(1.0, 0.0)).unwrap();
            assert!((out.y - out.constituents[0]).norm() < 1e-15);
        }
        assert_eq!(c.combiner().u(), 0.0);
    }

    #[test]
    fn clms_saturated_endpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let one = Combiner::with_u(40.0, 0.0, 40.0).unwrap();
        let mut c = Clms::new(
            [
                FullRankLms::new(6, 0.05).unwrap(),
                FullRankLms::new(6, 0.2).unwrap(),
            ],
            one,
        )
        .unwrap();
        for _ in 0..30 {
            let out = c.step(&rand_vec(&mut rng, 6), C64::new(0.0, 1.0)).unwrap();
            assert_eq!(out.y, out.constituents[0]);
        }
    }
}
