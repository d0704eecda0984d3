//! Heavy-tail-aware comparison statistics.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values with modulus at or below this are dropped before inversion maps.
pub const INVERSION_FLOOR: f64 = 1e-12;

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InsufficientData("sample contains NaN".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup |F_n - F|` of the empirical CDF against `cdf`.
pub fn ks_one_sample(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted(values)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Signed extremes `(max(F_a - F_b), max(F_b - F_a))` over the pooled sample.
fn two_sample_extremes(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut up, mut down): (f64, f64) = (0.0, 0.0);
    while i < a.len() || j < b.len() {
        // advance through every copy of the next pooled value
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let diff = i as f64 / na - j as f64 / nb;
        up = up.max(diff);
        down = down.max(-diff);
    }
    Ok((up, down))
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let (up, down) = two_sample_extremes(a, b)?;
    Ok(up.max(down))
}

/// Two-sample Kuiper statistic `D⁺ + D⁻`, invariant under rotations of a circle.
pub fn kuiper_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let (up, down) = two_sample_extremes(a, b)?;
    Ok((up + down).min(1.0))
}

/// Least-squares fit of `log P(|W - center| ≥ r)` against `log r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    /// Log amplitude with the slope pinned at -2: mean of `log S(r) + 2 log r`.
    pub log_amplitude: f64,
    /// Intercept of the free fit.
    pub intercept: f64,
    pub window: (f64, f64),
    pub stderr_slope: f64,
    pub n_points: usize,
}

impl TailFit {
    pub fn amplitude(&self) -> f64 {
        self.log_amplitude.exp()
    }
}

pub const DEFAULT_TAIL_WINDOW: (f64, f64) = (0.95, 0.999);

/// Fits the survival function of `|v - center|` on the order statistics whose
/// ranks fall inside the quantile window `[q_lo, q_hi)`.
pub fn tail_fit(values: &[Complex64], center: Complex64, q_lo: f64, q_hi: f64) -> Result<TailFit> {
    if !(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0) {
        return Err(Error::Config(format!(
            "tail window requires 0 < q_lo < q_hi < 1, got ({q_lo}, {q_hi})"
        )));
    }
    let radii: Vec<f64> = values.iter().map(|v| (v - center).norm()).collect();
    let r = sorted(&radii)?;
    let n = r.len();
    let lo = (q_lo * n as f64).floor() as usize;
    let hi = ((q_hi * n as f64).ceil() as usize).min(n);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, &rk) in r.iter().enumerate().take(hi).skip(lo) {
        if rk > 0.0 {
            // empirical P(|W| ≥ r_(k)) with ranks from zero
            xs.push(rk.ln());
            ys.push(((n - k) as f64 / n as f64).ln());
        }
    }
    let m = xs.len();
    if m < 20 {
        return Err(Error::InsufficientData(format!(
            "only {m} tail points in window ({q_lo}, {q_hi}) of {n} samples; need 20"
        )));
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("tail radii are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr_slope = (sse / (mf - 2.0) / sxx).sqrt();
    let log_amplitude = ys.iter().zip(&xs).map(|(y, x)| y + 2.0 * x).sum::<f64>() / mf;
    Ok(TailFit {
        slope,
        log_amplitude,
        intercept,
        window: (q_lo, q_hi),
        stderr_slope,
        n_points: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    /// `v ↦ 1/v`
    Reciprocal,
    /// `v ↦ conj(1/v)`
    ReciprocalConjugate,
    /// `v ↦ √2/v`
    Sqrt2Reciprocal,
}

impl MapKind {
    pub fn apply(&self, v: Complex64) -> Complex64 {
        match self {
            Self::Identity => v,
            Self::Reciprocal => v.inv(),
            Self::ReciprocalConjugate => v.inv().conj(),
            Self::Sqrt2Reciprocal => v.inv() * SQRT_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub ks_modulus: f64,
    /// Kuiper statistic of the arguments on the circle.
    pub ks_argument: f64,
    /// Values kept after dropping near-zero entries.
    pub n: usize,
    pub dropped: usize,
    /// More than 1% of the input was dropped.
    pub warning: bool,
    pub map_kind: MapKind,
}

/// Compares `{v}` with `{map(v)}` by modulus (KS) and argument (Kuiper).
pub fn inversion_symmetry(values: &[Complex64], map_kind: MapKind) -> Result<SymmetryReport> {
    let kept: Vec<Complex64> = values
        .iter()
        .copied()
        .filter(|v| v.norm() > INVERSION_FLOOR)
        .collect();
    let dropped = values.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::InsufficientData(
            "no values above the inversion floor".into(),
        ));
    }
    let (ks_modulus, ks_argument) = if map_kind == MapKind::Identity {
        (0.0, 0.0)
    } else {
        let mapped: Vec<Complex64> = kept.iter().map(|v| map_kind.apply(*v)).collect();
        let m1: Vec<f64> = kept.iter().map(|v| v.norm()).collect();
        let m2: Vec<f64> = mapped.iter().map(|v| v.norm()).collect();
        let a1: Vec<f64> = kept.iter().map(|v| v.arg()).collect();
        let a2: Vec<f64> = mapped.iter().map(|v| v.arg()).collect();
        (ks_two_sample(&m1, &m2)?, kuiper_two_sample(&a1, &a2)?)
    };
    Ok(SymmetryReport {
        ks_modulus,
        ks_argument,
        n: kept.len(),
        dropped,
        warning: dropped * 100 > values.len(),
        map_kind,
    })
}

/// `mean exp(i Re(conj(ω) v))`.
pub fn empirical_char_fn(values: &[Complex64], omega: Complex64) -> Complex64 {
    if values.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    if omega == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let s: Complex64 = values
        .iter()
        .map(|v| Complex64::from_polar(1.0, (omega.conj() * v).re))
        .sum();
    s / values.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramScale {
    Linear,
    /// Geometric bins on positive values.
    LogRadial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub scale: HistogramScale,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `count / (n · width)`.
    pub density: Vec<f64>,
    /// Values outside the binned range (non-positive values on a log scale).
    pub excluded: usize,
    pub total: usize,
}

/// Histogram of `values` over `[min, max]` with `bins` bins. Empty bins are kept.
pub fn histogram(values: &[f64], bins: usize, scale: HistogramScale) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::Config(format!(
            "histogram needs at least 2 bins, got {bins}"
        )));
    }
    let usable: Vec<f64> = values
        .iter()
        .copied()
        .filter(|v| v.is_finite() && (scale == HistogramScale::Linear || *v > 0.0))
        .collect();
    if usable.is_empty() {
        return Err(Error::InsufficientData("no values to bin".into()));
    }
    let lo = usable.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = usable.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + lo.abs().max(1.0) * 1e-9;
    }
    let edges: Vec<f64> = match scale {
        HistogramScale::Linear => (0..=bins)
            .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
            .collect(),
        HistogramScale::LogRadial => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..=bins)
                .map(|k| (a + (b - a) * k as f64 / bins as f64).exp())
                .collect()
        }
    };
    let mut counts = vec![0u64; bins];
    for &v in &usable {
        let pos = match scale {
            HistogramScale::Linear => (v - lo) / (hi - lo),
            HistogramScale::LogRadial => (v.ln() - lo.ln()) / (hi.ln() - lo.ln()),
        };
        let k = ((pos * bins as f64).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = values.len() as f64;
    let density = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 / (n * (edges[k + 1] - edges[k])))
        .collect();
    Ok(Histogram {
        scale,
        edges,
        counts,
        density,
        excluded: values.len() - usable.len(),
        total: values.len(),
    })
}

/// Histogram of `|v - center|`.
pub fn radial_histogram(
    values: &[Complex64],
    center: Complex64,
    bins: usize,
    scale: HistogramScale,
) -> Result<Histogram> {
    let radii: Vec<f64> = values.iter().map(|v| (v - center).norm()).collect();
    histogram(&radii, bins, scale)
}

impl Histogram {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bin_lo", "bin_hi", "count", "density"])?;
        for k in 0..self.counts.len() {
            out.write_record([
                format!("{:e}", self.edges[k]),
                format!("{:e}", self.edges[k + 1]),
                self.counts[k].to_string(),
                format!("{:e}", self.density[k]),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a % TAU;
    if x <= -PI {
        x += TAU;
    } else if x > PI {
        x -= TAU;
    }
    x
}

/// Sample mean and its standard error.
pub fn mean_sem(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::InsufficientData("need at least two values".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}
