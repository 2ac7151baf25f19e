//! Complex-vector building blocks shared by the filters: the Hankel data
//! matrix of an observation, decimation patterns and the interpolator.
//!
//! The interpolated vector of an `M`-sample observation `r` through an
//! `I`-tap interpolator `v` can be written two ways: as `V^H r` with `V` the
//! `M x M` lower-triangular Toeplitz matrix built from `v`, or as `R_o v*`
//! with `R_o` the `M x I` Hankel matrix `R_o[m][k] = r[m + k]`. Samples past
//! the end of the observation are taken as zero.

use crate::error::check_len;
use crate::{Error, Result, C64};

/// `M x I` Hankel matrix of an observation, `entries[m][k] = r[m + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelRegressor {
    rows: usize,
    cols: usize,
    // Row-major, rows * cols entries.
    data: Vec<C64>,
}

impl HankelRegressor {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, m: usize, k: usize) -> C64 {
        self.data[m * self.cols + k]
    }

    /// The observation sample at position `idx`, zero past the end.
    fn sample(&self, idx: usize) -> C64 {
        // Sample m + k lives in row m, column k; walk down column 0 and then
        // along the last row.
        if idx < self.rows {
            self.get(idx, 0)
        } else if idx < self.rows + self.cols - 1 {
            self.get(self.rows - 1, idx + 1 - self.rows)
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// `R_o v*`: the interpolated `M`-vector.
    pub fn mul_conj(&self, v: &[C64]) -> Result<Vec<C64>> {
        check_len("Hankel times interpolator", self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|m| {
                let row = &self.data[m * self.cols..(m + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(C64::new(0.0, 0.0), |acc, (r, vk)| acc + r * vk.conj())
            })
            .collect())
    }

    /// `R_o^T x` for an `M`-vector `x`, giving an `I`-vector.
    pub fn transpose_mul(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_len("Hankel transpose times vector", self.rows, x.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (m, xm) in x.iter().enumerate() {
            let row = &self.data[m * self.cols..(m + 1) * self.cols];
            for (o, r) in out.iter_mut().zip(row) {
                *o += r * xm;
            }
        }
        Ok(out)
    }

    /// `R_o^T D^T z` where `D` selects `pattern` and `z` is a `D`-vector.
    ///
    /// Equivalent to scattering `z` into an `M`-vector at the pattern
    /// indices and calling [`transpose_mul`](Self::transpose_mul).
    pub fn transpose_mul_scattered(
        &self,
        pattern: &DecimationPattern,
        z: &[C64],
    ) -> Result<Vec<C64>> {
        check_len("scattered regressor", pattern.len(), z.len())?;
        if pattern.max_index() >= self.rows {
            return Err(Error::DimensionMismatch {
                context: "decimation pattern vs Hankel rows",
                expected: self.rows,
                actual: pattern.max_index() + 1,
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (&m, zm) in pattern.indices().iter().zip(z) {
            for (k, o) in out.iter_mut().enumerate() {
                *o += self.sample(m + k) * zm;
            }
        }
        Ok(out)
    }
}

/// Builds the `M x I` Hankel matrix of `samples`.
///
/// `samples` must hold at least `M` values. Indices from `samples.len()` up
/// to `M + I - 2` are filled with zeros; extra trailing samples beyond
/// `M + I - 1` are ignored.
pub fn build_hankel(samples: &[C64], m: usize, i: usize) -> Result<HankelRegressor> {
    if m < 1 || i < 1 {
        return Err(Error::InvalidParameter(format!(
            "Hankel dimensions must be positive (M = {m}, I = {i})"
        )));
    }
    if samples.len() < m {
        return Err(Error::DimensionMismatch {
            context: "Hankel samples",
            expected: m,
            actual: samples.len(),
        });
    }
    let zero = C64::new(0.0, 0.0);
    let mut data = Vec::with_capacity(m * i);
    for row in 0..m {
        for col in 0..i {
            data.push(samples.get(row + col).copied().unwrap_or(zero));
        }
    }
    Ok(HankelRegressor {
        rows: m,
        cols: i,
        data,
    })
}

/// A strictly increasing set of `D` indices into an `M`-vector; the rows of
/// a `D x M` selection matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimationPattern {
    indices: Vec<usize>,
}

impl DecimationPattern {
    pub fn new(indices: Vec<usize>, m: usize) -> Result<Self> {
        if indices.is_empty() || indices.len() > m {
            return Err(Error::InvalidParameter(format!(
                "pattern length {} must be in 1..={m}",
                indices.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "pattern indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= m {
                return Err(Error::InvalidParameter(format!(
                    "pattern index {last} out of range for M = {m}"
                )));
            }
        }
        Ok(Self { indices })
    }

    /// Selects every sample of an `M`-vector.
    pub fn identity(m: usize) -> Self {
        Self {
            indices: (0..m).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn max_index(&self) -> usize {
        *self.indices.last().expect("patterns are non-empty")
    }

    /// `D^T z`: places the entries of `z` at the pattern indices of a zero
    /// `M`-vector.
    pub fn scatter(&self, z: &[C64], m: usize) -> Result<Vec<C64>> {
        check_len("scatter", self.len(), z.len())?;
        if self.max_index() >= m {
            return Err(Error::DimensionMismatch {
                context: "scatter target",
                expected: self.max_index() + 1,
                actual: m,
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (&idx, &val) in self.indices.iter().zip(z) {
            out[idx] = val;
        }
        Ok(out)
    }
}

/// Generates `B` decimation patterns of `D` indices for an `M`-vector.
///
/// With stride `L = floor(M / D)`, pattern `b` (0-based) selects
/// `b + d * L` for `d = 0..D`. Offsets run up to `M - 1 - (D - 1) * L`, so
/// `B` may exceed `L` when `D` does not divide `M`; the first `L` patterns
/// are pairwise disjoint and all of them are distinct.
pub fn generate_decimation_patterns(
    m: usize,
    d: usize,
    b: usize,
) -> Result<Vec<DecimationPattern>> {
    if d < 1 || d > m {
        return Err(Error::InvalidParameter(format!(
            "rank D = {d} must be in 1..={m}"
        )));
    }
    let stride = m / d;
    let max_branches = m - (d - 1) * stride;
    if b < 1 || b > max_branches {
        return Err(Error::InvalidParameter(format!(
            "branch count B = {b} must be in 1..={max_branches} for M = {m}, D = {d}"
        )));
    }
    (0..b)
        .map(|offset| {
            let indices = (0..d).map(|k| offset + k * stride).collect();
            DecimationPattern::new(indices, m)
        })
        .collect()
}

/// Applies a decimation pattern: `out[d] = x[pattern[d]]`.
pub fn apply_decimation(pattern: &DecimationPattern, x: &[C64]) -> Result<Vec<C64>> {
    if pattern.max_index() >= x.len() {
        return Err(Error::DimensionMismatch {
            context: "decimation input",
            expected: pattern.max_index() + 1,
            actual: x.len(),
        });
    }
    Ok(pattern.indices.iter().map(|&idx| x[idx]).collect())
}

/// Interpolates `r` with the `I`-tap filter `v`:
/// `out[m] = sum_k r[m + k] * conj(v[k])`, zero past the end of `r`.
pub fn interpolate(v: &[C64], r: &[C64]) -> Result<Vec<C64>> {
    if v.is_empty() || v.len() > r.len() {
        return Err(Error::InvalidParameter(format!(
            "interpolator length {} must be in 1..={}",
            v.len(),
            r.len()
        )));
    }
    build_hankel(r, r.len(), v.len())?.mul_conj(v)
}

/// `V x`, where `V` is the `M x M` Toeplitz convolution matrix of `v` with
/// `V[m][c] = v[m - c]` for `0 <= m - c < I`.
pub fn toeplitz_mul(v: &[C64], x: &[C64]) -> Vec<C64> {
    let m = x.len();
    (0..m)
        .map(|row| {
            v.iter()
                .enumerate()
                .take(row + 1)
                .fold(C64::new(0.0, 0.0), |acc, (k, vk)| acc + vk * x[row - k])
        })
        .collect()
}
