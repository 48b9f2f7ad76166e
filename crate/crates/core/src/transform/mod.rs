//! Non-decimated (à trous) and decimated wavelet transforms with periodic
//! boundaries.
//!
//! Levels are addressed two ways. The scale index `s = 1..=depth` counts
//! stages from the finest detail outward; the level `j = J - s`, with
//! `J = ceil(log2 n)`, is the resolution level used by the spectra, so the
//! finest detail sits at `j = J - 1`.

mod acf;
mod filters;

pub use acf::level_acf;
pub use filters::WaveletFilter;

use crate::error::{HurstError, Result};
use crate::synthesis::Signal;

/// `ceil(log2 n)`, with `J(1) = 0`.
pub fn max_level(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdwtDecomposition {
    details: Vec<Vec<f64>>,
    coarse: Vec<f64>,
    n: usize,
    depth: usize,
    j_max: usize,
    filter: WaveletFilter,
}

impl NdwtDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `J = ceil(log2 n)`.
    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn filter(&self) -> &WaveletFilter {
        &self.filter
    }

    pub fn coarse(&self) -> &[f64] {
        &self.coarse
    }

    /// Detail coefficients at scale index `s` (1 = finest).
    pub fn detail_at_scale(&self, s: usize) -> Option<&[f64]> {
        s.checked_sub(1)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    /// Detail coefficients at level `j = J - s`.
    pub fn level(&self, j: i32) -> Option<&[f64]> {
        self.scale_of(j).and_then(|s| self.detail_at_scale(s))
    }

    pub fn scale_of(&self, j: i32) -> Option<usize> {
        let s = self.j_max as i64 - j as i64;
        (s >= 1 && s <= self.depth as i64).then_some(s as usize)
    }

    pub fn level_of(&self, s: usize) -> i32 {
        self.j_max as i32 - s as i32
    }

    /// Levels present, coarsest first.
    pub fn levels(&self) -> impl Iterator<Item = i32> + '_ {
        (1..=self.depth).rev().map(|s| self.level_of(s))
    }

    pub fn coefficient_count(&self) -> usize {
        self.n * (self.depth + 1)
    }
}

/// Circular correlation of `input` with `taps` spread `stride` apart.
fn spread_correlate(input: &[f64], taps: &[f64], stride: usize, out: &mut [f64]) {
    let n = input.len();
    let stride = stride % n;
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut idx = k;
        for &t in taps {
            acc += t * input[idx];
            idx += stride;
            if idx >= n {
                idx -= n;
            }
        }
        *slot = acc;
    }
}

/// Non-decimated wavelet transform to `depth` stages. Stage `s` uses the
/// filters with `2^{s-1} - 1` zeros between taps; every level keeps the
/// signal length.
pub fn ndwt(signal: &Signal, filter: &WaveletFilter, depth: usize) -> Result<NdwtDecomposition> {
    ndwt_samples(signal.samples(), filter, depth)
}

pub fn ndwt_samples(x: &[f64], filter: &WaveletFilter, depth: usize) -> Result<NdwtDecomposition> {
    let n = x.len();
    let j_max = max_level(n);
    if depth == 0 {
        return Err(HurstError::InvalidParameter(
            "depth must be at least 1".into(),
        ));
    }
    if depth > j_max {
        return Err(HurstError::DepthExceedsJ {
            depth,
            max: j_max,
            n,
        });
    }
    if n < filter.len() {
        return Err(HurstError::SignalShorterThanFilter {
            n,
            filter_len: filter.len(),
        });
    }

    let mut approx = x.to_vec();
    let mut next = vec![0.0; n];
    let mut details = Vec::with_capacity(depth);
    for s in 1..=depth {
        let stride = 1usize << (s - 1);
        let mut detail = vec![0.0; n];
        spread_correlate(&approx, &filter.high, stride, &mut detail);
        spread_correlate(&approx, &filter.low, stride, &mut next);
        std::mem::swap(&mut approx, &mut next);
        details.push(detail);
    }
    Ok(NdwtDecomposition {
        details,
        coarse: approx,
        n,
        depth,
        j_max,
        filter: filter.clone(),
    })
}

/// Orthogonal (decimated) pyramid transform.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtDecomposition {
    details: Vec<Vec<f64>>,
    coarse: Vec<f64>,
    n: usize,
    depth: usize,
    j_max: usize,
}

impl DwtDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn coarse(&self) -> &[f64] {
        &self.coarse
    }

    pub fn detail_at_scale(&self, s: usize) -> Option<&[f64]> {
        s.checked_sub(1)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    pub fn level(&self, j: i32) -> Option<&[f64]> {
        let s = self.j_max as i64 - j as i64;
        if s < 1 || s > self.depth as i64 {
            return None;
        }
        self.detail_at_scale(s as usize)
    }

    pub fn level_of(&self, s: usize) -> i32 {
        self.j_max as i32 - s as i32
    }

    /// Every coefficient, details finest first, then the coarse block.
    pub fn all_coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.details
            .iter()
            .flatten()
            .chain(self.coarse.iter())
            .copied()
    }
}

pub fn dwt(signal: &Signal, filter: &WaveletFilter, depth: usize) -> Result<DwtDecomposition> {
    dwt_samples(signal.samples(), filter, depth)
}

pub fn dwt_samples(x: &[f64], filter: &WaveletFilter, depth: usize) -> Result<DwtDecomposition> {
    let n = x.len();
    if depth == 0 {
        return Err(HurstError::InvalidParameter(
            "depth must be at least 1".into(),
        ));
    }
    if depth >= usize::BITS as usize || !n.is_multiple_of(1usize << depth) {
        return Err(HurstError::NonDyadicLength { n, depth });
    }
    if n < filter.len() {
        return Err(HurstError::SignalShorterThanFilter {
            n,
            filter_len: filter.len(),
        });
    }
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(depth);
    for _ in 0..depth {
        let len = approx.len();
        let half = len / 2;
        let mut low = vec![0.0; half];
        let mut high = vec![0.0; half];
        for k in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (i, (&lo, &hi)) in filter.low.iter().zip(&filter.high).enumerate() {
                let v = approx[(2 * k + i) % len];
                a += lo * v;
                d += hi * v;
            }
            low[k] = a;
            high[k] = d;
        }
        details.push(high);
        approx = low;
    }
    Ok(DwtDecomposition {
        details,
        coarse: approx,
        n,
        depth,
        j_max: max_level(n),
    })
}

/// `out[k] = x[(k + shift) mod n]`.
pub fn circular_shift(x: &[f64], shift: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    if !x.is_empty() {
        out.rotate_left(shift % x.len());
    }
    out
}
