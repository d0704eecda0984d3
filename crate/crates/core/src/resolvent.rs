//! Resolvent statistics `G(z) = (z - M)^{-1}`.
//!
//! Matrix draws go through a partial-pivot LU. The finite-N Ginibre law is
//! also available without matrices: `1/[G]_{11} - z ~ N_C(0, (1+t)/N)` with
//! `t` drawn from [`DistributionModel::FiniteNVarianceLaw`].

use faer::linalg::solvers::DenseSolveCore;
use faer::prelude::*;
use faer::Mat;
use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::batch::{SampleBatch, Statistic};
use crate::densities::{DistributionModel, TailRegime};
use crate::ensembles::EnsembleSpec;
use crate::error::{domain, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pool::run_indexed;
use crate::rng::{derive_retry_seed, SampleRng};

/// Retries per sample index before a draw is reported as failed.
pub const MAX_ATTEMPTS: u32 = 16;

const PIVOT_FLOOR: f64 = 1e-300;
const RESIDUAL_TOL: f64 = 1e-6;

/// `N ↦ coef · N^{-power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub coef: f64,
    pub power: f64,
}

impl Schedule {
    pub fn at(&self, n: usize) -> f64 {
        self.coef * (n as f64).powf(-self.power)
    }
}

/// The spectral point `z` and how `|z|` scales with `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegimeSpec {
    /// Fixed `|z| < 1`.
    Bulk { z: Complex64 },
    /// `|z|² = 1 - g(N)` with `1/N ≪ g(N)`.
    InsideWindow { g: Schedule, phase: f64 },
    /// `|z|² = 1 + ε(N)` with `ε(N) = o(1/√N)`.
    CriticalWindow { eps: Schedule, phase: f64 },
    /// `|z|² = 1 + α/√N`.
    EdgeWindow { alpha: f64, phase: f64 },
    /// `|z|² = 1 + f(N)` with `1/√N ≪ f(N)`.
    OutsideWindow { f: Schedule, phase: f64 },
    /// Fixed `|z| > 1`.
    Outside { z: Complex64 },
}

impl RegimeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bulk { .. } => "bulk",
            Self::InsideWindow { .. } => "inside_window",
            Self::CriticalWindow { .. } => "critical_window",
            Self::EdgeWindow { .. } => "edge_window",
            Self::OutsideWindow { .. } => "outside_window",
            Self::Outside { .. } => "outside",
        }
    }

    /// Spectral point at size `n`.
    pub fn z_at(&self, n: usize) -> Result<Complex64> {
        let nf = n as f64;
        let polar = |r2: f64, phase: f64| -> Result<Complex64> {
            if !(r2 > 0.0) {
                return Err(domain("RegimeSpec", format!("|z|^2 = {r2} at N = {n}")));
            }
            Ok(Complex64::from_polar(r2.sqrt(), phase))
        };
        match *self {
            Self::Bulk { z } => {
                if !(z.norm() < 1.0) {
                    return Err(domain(
                        "RegimeSpec",
                        format!("bulk requires |z| < 1, got {}", z.norm()),
                    ));
                }
                Ok(z)
            }
            Self::Outside { z } => {
                if !(z.norm() > 1.0) || !z.norm().is_finite() {
                    return Err(domain(
                        "RegimeSpec",
                        format!("outside requires |z| > 1, got {}", z.norm()),
                    ));
                }
                Ok(z)
            }
            Self::InsideWindow { g, phase } => {
                let g = g.at(n);
                if !(g > 0.0 && g < 1.0) {
                    return Err(domain(
                        "RegimeSpec",
                        format!("g(N) = {g} must lie in (0, 1)"),
                    ));
                }
                polar(1.0 - g, phase)
            }
            Self::CriticalWindow { eps, phase } => polar(1.0 + eps.at(n), phase),
            Self::EdgeWindow { alpha, phase } => polar(1.0 + alpha / nf.sqrt(), phase),
            Self::OutsideWindow { f, phase } => {
                let f = f.at(n);
                if !(f > 0.0) {
                    return Err(domain("RegimeSpec", format!("f(N) = {f} must be positive")));
                }
                polar(1.0 + f, phase)
            }
        }
    }

    /// Limit of `[G]_{11}`: `z̄` inside the disk, `1/z` at and beyond the edge.
    pub fn center(&self, n: usize) -> Result<Complex64> {
        let z = self.z_at(n)?;
        Ok(match self {
            Self::Bulk { .. } | Self::InsideWindow { .. } => z.conj(),
            _ => z.inv(),
        })
    }

    /// Multiplier applied to `[G]_{11} - center`.
    pub fn scale(&self, n: usize) -> Result<f64> {
        let z = self.z_at(n)?;
        let nf = n as f64;
        let r2 = z.norm_sqr();
        Ok(match self {
            Self::Bulk { .. } | Self::InsideWindow { .. } => 1.0 / (1.0 - r2).sqrt(),
            Self::CriticalWindow { .. } | Self::EdgeWindow { .. } => nf.powf(0.25),
            Self::OutsideWindow { .. } | Self::Outside { .. } => (nf * r2 * (r2 - 1.0)).sqrt(),
        })
    }

    /// Limit law of the scaled statistic. Edge laws are variance laws of a
    /// Gaussian mixture.
    pub fn limit_model(&self) -> DistributionModel {
        let origin = Complex64::new(0.0, 0.0);
        match *self {
            Self::Bulk { .. } | Self::InsideWindow { .. } => DistributionModel::ComplexStudent {
                beta: 1.0,
                center: origin,
            },
            Self::CriticalWindow { .. } => DistributionModel::Regime2VarianceLaw,
            Self::EdgeWindow { alpha, .. } => DistributionModel::Regime3VarianceLaw { alpha },
            Self::OutsideWindow { .. } | Self::Outside { .. } => {
                DistributionModel::ComplexGaussian {
                    mean: origin,
                    variance: 1.0,
                }
            }
        }
    }

    /// Tail regime of the scaled statistic.
    pub fn tail_regime(&self) -> TailRegime {
        match *self {
            // after division by √(1-|z|²) the amplitude is 1
            Self::Bulk { .. } | Self::InsideWindow { .. } => TailRegime::Bulk { z_modulus: 0.0 },
            Self::CriticalWindow { .. } => TailRegime::Critical,
            Self::EdgeWindow { alpha, .. } => TailRegime::Edge { alpha },
            Self::OutsideWindow { .. } | Self::Outside { .. } => TailRegime::Outside,
        }
    }
}

fn shifted(m: &ComplexMatrix, z: Complex64) -> Mat<Complex64> {
    Mat::from_fn(m.n(), m.n(), |i, j| {
        if i == j {
            z - m.get(i, j)
        } else {
            -m.get(i, j)
        }
    })
}

fn check_pivots(lu: &faer::linalg::solvers::PartialPivLu<Complex64>, op: &str) -> Result<()> {
    let u = lu.U();
    let n = u.nrows();
    let smallest = (0..n)
        .map(|i| u[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if !(smallest >= PIVOT_FLOOR) {
        return Err(Error::Rejected(format!(
            "{op}: pivot {smallest:e} below floor"
        )));
    }
    Ok(())
}

/// `[(z - M)^{-1}]_{11}` from one LU solve.
pub fn g11(m: &ComplexMatrix, z: Complex64) -> Result<Complex64> {
    let n = m.n();
    if n == 0 {
        return Err(domain("g11", "empty matrix"));
    }
    let a = shifted(m, z);
    let lu = a.partial_piv_lu();
    check_pivots(&lu, "g11")?;
    let mut x = Mat::<Complex64>::zeros(n, 1);
    x[(0, 0)] = Complex64::new(1.0, 0.0);
    lu.solve_in_place(&mut x);
    // residual of (z - M) x = e₁ relative to ‖A‖_F ‖x‖
    let r = &a * &x;
    let mut res = 0.0;
    let mut xnorm = 0.0;
    for i in 0..n {
        let target = if i == 0 { 1.0 } else { 0.0 };
        res += (r[(i, 0)] - target).norm_sqr();
        xnorm += x[(i, 0)].norm_sqr();
    }
    let anorm = a.norm_l2();
    let rel = res.sqrt() / (anorm * xnorm.sqrt() + 1.0);
    if !(rel <= RESIDUAL_TOL) || !x[(0, 0)].re.is_finite() || !x[(0, 0)].im.is_finite() {
        return Err(Error::Rejected(format!("g11: relative residual {rel:e}")));
    }
    Ok(x[(0, 0)])
}

/// Diagonal of `(z - M)^{-1}` from one factorization.
pub fn resolvent_diagonal(m: &ComplexMatrix, z: Complex64) -> Result<Vec<Complex64>> {
    let n = m.n();
    if n == 0 {
        return Err(domain("stieltjes_trace", "empty matrix"));
    }
    let a = shifted(m, z);
    let lu = a.partial_piv_lu();
    check_pivots(&lu, "stieltjes_trace")?;
    let inv = lu.inverse();
    let diag: Vec<Complex64> = (0..n).map(|i| inv[(i, i)]).collect();
    if diag.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Rejected(
            "stieltjes_trace: non-finite inverse".into(),
        ));
    }
    Ok(diag)
}

/// Normalized trace `(1/N) Tr (z - M)^{-1}`.
pub fn stieltjes_trace(m: &ComplexMatrix, z: Complex64) -> Result<Complex64> {
    let diag = resolvent_diagonal(m, z)?;
    Ok(diag.iter().sum::<Complex64>() / diag.len() as f64)
}

/// Draws of the variance parameter `t` of the finite-N law.
pub fn sample_t_finite_n(n: usize, r: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let batch =
        crate::densities::sample(&DistributionModel::FiniteNVarianceLaw { n, r }, count, seed)?;
    Ok(batch.real_parts())
}

/// Exact draws of `[G]_{11}` for an `N×N` Ginibre matrix, without matrices.
pub fn sample_g11_exact(n: usize, z: Complex64, count: usize, seed: u64) -> Result<SampleBatch> {
    let model = DistributionModel::FiniteNVarianceLaw { n, r: z.norm() };
    model.validate()?;
    let mut values = Vec::with_capacity(count);
    let mut rejections = 0;
    if count > 0 {
        let table = model.tabulate()?;
        let mut rng = SampleRng::new(seed);
        let nf = n as f64;
        while values.len() < count {
            let t = table.quantile(rng.uniform_open());
            let denom = z + rng.complex_gaussian((1.0 + t) / nf);
            if denom.norm() < 1e-300 {
                rejections += 1;
                warn!(
                    "sample_g11_exact: rejected draw with |z + zeta| = {:e}",
                    denom.norm()
                );
                continue;
            }
            values.push(denom.inv());
        }
    }
    Ok(SampleBatch {
        statistic: Statistic::ExactG11,
        ensemble: Some(EnsembleSpec::Ginibre { n }),
        regime: None,
        n,
        z: Some(z),
        values,
        seed,
        indices: 0..count as u64,
        rejections,
    })
}

/// Outcome of drawing one statistic per sample index with retries.
pub(crate) struct Drawn<T> {
    pub values: Vec<T>,
    pub rejections: usize,
}

pub(crate) fn draw_with_retries<T, F>(
    count: usize,
    seed: u64,
    workers: usize,
    what: &str,
    f: F,
) -> Result<Drawn<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let results = run_indexed(0..count as u64, workers, |i| {
        let mut rejected = 0usize;
        for attempt in 0..MAX_ATTEMPTS {
            match f(derive_retry_seed(seed, i, attempt)) {
                Ok(v) => return Ok((v, rejected)),
                Err(Error::Rejected(msg)) | Err(Error::DegenerateSpectrum(msg)) => {
                    warn!("{what}: sample {i} attempt {attempt} rejected: {msg}");
                    rejected += 1;
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::Rejected(format!(
            "{what}: sample {i} rejected {MAX_ATTEMPTS} times"
        )))
    });
    let mut values = Vec::with_capacity(count);
    let mut rejections = 0;
    let mut failed = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((v, rej)) => {
                values.push(v);
                rejections += rej;
            }
            Err(e) => failed.push((i, e)),
        }
    }
    if let Some((i, e)) = failed.into_iter().next() {
        return Err(Error::Partial {
            completed: values.len(),
            requested: count,
            reason: format!("sample {i}: {e}"),
        });
    }
    Ok(Drawn { values, rejections })
}

/// `[G]_{11}` over `count` independent matrix draws; sample `i` uses
/// `derive_seed(seed, i)` (or a retry seed after a rejection).
pub fn sample_g11_matrix(
    ensemble: &EnsembleSpec,
    z: Complex64,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<SampleBatch> {
    ensemble.validate()?;
    let drawn = draw_with_retries(count, seed, workers, "g11", |s| {
        g11(&ensemble.sample(s)?, z)
    })?;
    Ok(SampleBatch {
        statistic: Statistic::G11,
        ensemble: Some(*ensemble),
        regime: None,
        n: ensemble.n(),
        z: Some(z),
        values: drawn.values,
        seed,
        indices: 0..count as u64,
        rejections: drawn.rejections,
    })
}

/// Normalized resolvent trace over `count` independent matrix draws.
pub fn sample_stieltjes_matrix(
    ensemble: &EnsembleSpec,
    z: Complex64,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<SampleBatch> {
    ensemble.validate()?;
    let drawn = draw_with_retries(count, seed, workers, "stieltjes_trace", |s| {
        stieltjes_trace(&ensemble.sample(s)?, z)
    })?;
    Ok(SampleBatch {
        statistic: Statistic::StieltjesTrace,
        ensemble: Some(*ensemble),
        regime: None,
        n: ensemble.n(),
        z: Some(z),
        values: drawn.values,
        seed,
        indices: 0..count as u64,
        rejections: drawn.rejections,
    })
}

/// Applies the regime's affine rescaling `scale · ([G]_{11} - center)`.
pub fn scaled_statistic(batch: &SampleBatch, regime: &RegimeSpec) -> Result<SampleBatch> {
    if !matches!(batch.statistic, Statistic::G11 | Statistic::ExactG11) {
        return Err(Error::Config(format!(
            "scaled_statistic needs a g11 batch, got {:?}",
            batch.statistic
        )));
    }
    let z = regime.z_at(batch.n)?;
    let bz = batch
        .z
        .ok_or_else(|| Error::Config("batch has no spectral point".into()))?;
    if (bz - z).norm() > 1e-12 * (1.0 + z.norm()) {
        return Err(Error::Config(format!(
            "batch z = {bz} does not match regime {} z = {z} at N = {}",
            regime.name(),
            batch.n
        )));
    }
    let center = regime.center(batch.n)?;
    let scale = regime.scale(batch.n)?;
    Ok(SampleBatch {
        statistic: Statistic::ScaledG11,
        regime: Some(*regime),
        values: batch.values.iter().map(|v| (v - center) * scale).collect(),
        ..batch.clone()
    })
}

/// `√N (𝔤^N - g_limit) / √(π ρ)` per draw.
pub fn stieltjes_fluctuation(
    batch: &SampleBatch,
    g_limit: Complex64,
    rho: f64,
) -> Result<SampleBatch> {
    if batch.statistic != Statistic::StieltjesTrace {
        return Err(Error::Config(format!(
            "stieltjes_fluctuation needs a trace batch, got {:?}",
            batch.statistic
        )));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(domain(
            "stieltjes_fluctuation",
            format!("requires rho > 0, got {rho}"),
        ));
    }
    let k = (batch.n as f64).sqrt() / (std::f64::consts::PI * rho).sqrt();
    Ok(SampleBatch {
        statistic: Statistic::ScaledStieltjes,
        values: batch.values.iter().map(|v| (v - g_limit) * k).collect(),
        ..batch.clone()
    })
}
