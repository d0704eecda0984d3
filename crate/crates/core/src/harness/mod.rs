//! Experiment runner: one configuration in, persisted samples and a JSON
//! report out.
//!
//! Each experiment draws its batches from fixed seed streams
//! (`derive_seed(config.seed, stream)`), and every sample inside a batch
//! derives its own seed from the batch seed and its index. Outputs are
//! therefore identical for any worker count.

mod experiments;
mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densities::TailRegime;
use crate::ensembles::{self, EnsembleSpec};
use crate::error::{Error, Result};
use crate::overlaps::{empirical_density, DensityEstimate};
use crate::pool::run_indexed;
use crate::resolvent::{self, RegimeSpec};
use crate::rng::derive_retry_seed;
use crate::stats::{SymmetryReport, TailFit, DEFAULT_TAIL_WINDOW};

pub use output::{read_samples_csv, write_samples_csv, SampleRow};

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Regime1,
    Regime2,
    Regime3,
    Regime4,
    Theorem1Oracle,
    OverlapInvgamma,
    ChalkerMehlig,
    Conjecture1,
    Conjecture2,
    EdgeModel,
    HermitianBaseline,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        Self::Regime1,
        Self::Regime2,
        Self::Regime3,
        Self::Regime4,
        Self::Theorem1Oracle,
        Self::OverlapInvgamma,
        Self::ChalkerMehlig,
        Self::Conjecture1,
        Self::Conjecture2,
        Self::EdgeModel,
        Self::HermitianBaseline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Regime1 => "regime1",
            Self::Regime2 => "regime2",
            Self::Regime3 => "regime3",
            Self::Regime4 => "regime4",
            Self::Theorem1Oracle => "theorem1_oracle",
            Self::OverlapInvgamma => "overlap_invgamma",
            Self::ChalkerMehlig => "chalker_mehlig",
            Self::Conjecture1 => "conjecture1",
            Self::Conjecture2 => "conjecture2",
            Self::EdgeModel => "edge_model",
            Self::HermitianBaseline => "hermitian_baseline",
        }
    }

    /// The plotted artifact the experiment regenerates.
    pub fn artifact(&self) -> &'static str {
        match self {
            Self::Regime1 => "radial histogram and log-log tail of Omega, z = 0.7",
            Self::Regime2 => "radial histogram and log-log tail of X at |z|^2 = 1 + 1/N",
            Self::Regime3 => "radial histogram and log-log tail of X at alpha = 1/2",
            Self::Regime4 => "radial histogram of X at z = 2",
            Self::Conjecture1 => "radial histogram and log-log tail of Omega, product model",
            Self::Conjecture2 => "radial histogram and log-log tail of Z, product model",
            Self::Theorem1Oracle => "exact vs matrix histograms of [G]11",
            Self::OverlapInvgamma => "histogram of rescaled conditional self-overlaps",
            Self::ChalkerMehlig => "conditional overlap mean against |z|",
            Self::EdgeModel => "histograms of the largest eigenvalue modulus",
            Self::HermitianBaseline => "histograms of Re [G]11 and the trace at real x",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::Regime1 => "bulk: radial law of the rescaled [G]11 at fixed |z| < 1",
            Self::Regime2 => "critical window |z|^2 = 1 + eps(N): N^(1/4)-scaled [G]11",
            Self::Regime3 => "edge window |z|^2 = 1 + alpha/sqrt(N): tail amplitude A(alpha)",
            Self::Regime4 => "outside |z| > 1: Gaussian fluctuations of [G]11",
            Self::Theorem1Oracle => "exact finite-N sampler against matrix Monte Carlo",
            Self::OverlapInvgamma => "conditional self-overlaps against the inverse-gamma law",
            Self::ChalkerMehlig => "conditional overlap mean against 1 - |z|^2",
            Self::Conjecture1 => "[G]11 of a product model against the unit Student law",
            Self::Conjecture2 => {
                "trace fluctuation Z of a product model against a Ginibre reference"
            }
            Self::EdgeModel => "largest eigenvalue modulus against the Gumbel edge formula",
            Self::HermitianBaseline => "GUE [G]11 and trace against the Cauchy law at real x",
        }
    }

    fn needs_regime(&self) -> bool {
        matches!(
            self,
            Self::Regime1
                | Self::Regime2
                | Self::Regime3
                | Self::Regime4
                | Self::Theorem1Oracle
                | Self::OverlapInvgamma
                | Self::Conjecture1
                | Self::Conjecture2
        )
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown experiment '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

fn default_workers() -> usize {
    1
}

/// Experiment-specific knobs. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Extras {
    /// Eigenvalue selection radius for overlaps; `N^{-1/4}` when absent.
    pub overlap_radius: Option<f64>,
    /// Disk radius of the counting density estimate.
    pub density_radius: f64,
    /// Quantile window of the tail fit.
    pub tail_window: (f64, f64),
    /// Matrix draws behind the limit estimates `ĝ`, `ρ̂`.
    pub limit_pool: usize,
    /// Ginibre reference draws; `n_samples` when absent.
    pub reference_samples: Option<usize>,
    /// Draws from the closed-form edge law.
    pub formula_samples: usize,
    /// `|z|` values of the conditional-mean scan.
    pub z_moduli: Vec<f64>,
    /// Eigendecompositions behind `β̂`.
    pub beta_draws: usize,
    pub bins: usize,
    /// Real spectral points of the Hermitian baseline.
    pub x: Vec<f64>,
}

impl Default for Extras {
    fn default() -> Self {
        Self {
            overlap_radius: None,
            density_radius: 0.1,
            tail_window: DEFAULT_TAIL_WINDOW,
            limit_pool: 200,
            reference_samples: None,
            formula_samples: 100_000,
            z_moduli: vec![0.0, 0.5, 0.7],
            beta_draws: 500,
            bins: 50,
            x: vec![0.0, 0.7, -1.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub ensemble: EnsembleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeSpec>,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub extras: Extras,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl ExperimentConfig {
    /// Parses a JSON config; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("at '{path}': {}", e.into_inner()))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Desk-scale defaults for `kind`.
    pub fn template(kind: ExperimentKind) -> Self {
        let ginibre = |n| EnsembleSpec::Ginibre { n };
        let product = EnsembleSpec::ProductABC { n: 300, tau: 0.5 };
        let (ensemble, regime, n_samples) = match kind {
            ExperimentKind::Regime1 => (
                ginibre(1000),
                Some(RegimeSpec::Bulk { z: c(0.7, 0.0) }),
                2000,
            ),
            ExperimentKind::Regime2 => (
                ginibre(1000),
                Some(RegimeSpec::CriticalWindow {
                    eps: resolvent::Schedule {
                        coef: 1.0,
                        power: 1.0,
                    },
                    phase: 0.0,
                }),
                2000,
            ),
            ExperimentKind::Regime3 => (
                ginibre(1000),
                Some(RegimeSpec::EdgeWindow {
                    alpha: 0.5,
                    phase: 0.0,
                }),
                2000,
            ),
            ExperimentKind::Regime4 => (
                ginibre(1000),
                Some(RegimeSpec::Outside { z: c(2.0, 0.0) }),
                5000,
            ),
            ExperimentKind::Theorem1Oracle => (
                ginibre(50),
                Some(RegimeSpec::Bulk { z: c(0.5, 0.0) }),
                20_000,
            ),
            ExperimentKind::OverlapInvgamma => {
                (ginibre(300), Some(RegimeSpec::Bulk { z: c(0.4, 0.0) }), 500)
            }
            ExperimentKind::ChalkerMehlig => (ginibre(500), None, 200),
            ExperimentKind::Conjecture1 => {
                (product, Some(RegimeSpec::Bulk { z: c(0.2, 0.4) }), 2000)
            }
            ExperimentKind::Conjecture2 => {
                (product, Some(RegimeSpec::Bulk { z: c(0.1, 0.2) }), 2000)
            }
            ExperimentKind::EdgeModel => (ginibre(1000), None, 1000),
            ExperimentKind::HermitianBaseline => (EnsembleSpec::GUE { n: 400 }, None, 2000),
        };
        Self {
            experiment: kind,
            ensemble,
            regime,
            n_samples,
            seed: 1,
            workers: 1,
            output_dir: PathBuf::from(format!("out/{}", kind.name())),
            extras: Extras::default(),
        }
    }

    /// Restores the sample counts of the original large runs.
    pub fn full_scale(mut self) -> Self {
        match self.experiment {
            ExperimentKind::Regime1
            | ExperimentKind::Regime2
            | ExperimentKind::Regime3
            | ExperimentKind::Regime4 => {
                self.ensemble = self.ensemble.with_n(1000);
                self.n_samples = 5000;
            }
            ExperimentKind::Conjecture1 => {
                self.n_samples = 5000;
                self.extras.beta_draws = 3000;
            }
            ExperimentKind::Conjecture2 => {
                self.n_samples = 5000;
                self.extras.reference_samples = Some(5000);
            }
            ExperimentKind::OverlapInvgamma => self.n_samples = 2000,
            ExperimentKind::Theorem1Oracle
            | ExperimentKind::ChalkerMehlig
            | ExperimentKind::EdgeModel
            | ExperimentKind::HermitianBaseline => {}
        }
        self
    }

    /// Checks the configuration before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if self.n_samples < 1 {
            return bad("n_samples", "must be at least 1".into());
        }
        if self.workers < 1 {
            return bad("workers", "must be at least 1".into());
        }
        self.ensemble
            .validate()
            .map_err(|e| Error::Config(format!("ensemble: {e}")))?;
        let kind = self.experiment;
        let n = self.ensemble.n();
        let is_ginibre = matches!(self.ensemble, EnsembleSpec::Ginibre { .. });
        match kind {
            ExperimentKind::Regime1
            | ExperimentKind::Regime2
            | ExperimentKind::Regime3
            | ExperimentKind::Regime4
            | ExperimentKind::Theorem1Oracle
            | ExperimentKind::OverlapInvgamma
            | ExperimentKind::ChalkerMehlig
            | ExperimentKind::EdgeModel
                if !is_ginibre =>
            {
                return bad(
                    "ensemble",
                    format!(
                        "{kind} requires the ginibre ensemble, got {}",
                        self.ensemble.name()
                    ),
                );
            }
            ExperimentKind::Conjecture1 | ExperimentKind::Conjecture2
                if self.ensemble.is_hermitian() =>
            {
                return bad(
                    "ensemble",
                    format!("{kind} requires a non-Hermitian ensemble"),
                );
            }
            ExperimentKind::HermitianBaseline if !self.ensemble.is_hermitian() => {
                return bad(
                    "ensemble",
                    format!(
                        "{kind} requires the gue ensemble, got {}",
                        self.ensemble.name()
                    ),
                );
            }
            _ => {}
        }
        match (&self.regime, kind.needs_regime()) {
            (None, true) => return bad("regime", format!("{kind} needs a regime")),
            (Some(_), false) => return bad("regime", format!("{kind} takes no regime")),
            _ => {}
        }
        if let Some(regime) = &self.regime {
            let allowed = match kind {
                ExperimentKind::Regime1 => matches!(
                    regime,
                    RegimeSpec::Bulk { .. } | RegimeSpec::InsideWindow { .. }
                ),
                ExperimentKind::Regime2 => matches!(regime, RegimeSpec::CriticalWindow { .. }),
                ExperimentKind::Regime3 => matches!(regime, RegimeSpec::EdgeWindow { .. }),
                ExperimentKind::Regime4 => {
                    matches!(
                        regime,
                        RegimeSpec::Outside { .. } | RegimeSpec::OutsideWindow { .. }
                    )
                }
                ExperimentKind::Theorem1Oracle => true,
                _ => matches!(regime, RegimeSpec::Bulk { .. }),
            };
            if !allowed {
                return bad(
                    "regime.kind",
                    format!("{kind} does not accept a {} regime", regime.name()),
                );
            }
            regime
                .z_at(n)
                .map_err(|e| Error::Config(format!("regime: {e}")))?;
        }
        let x = &self.extras;
        let (lo, hi) = x.tail_window;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return bad(
                "extras.tail_window",
                format!("requires 0 < lo < hi < 1, got ({lo}, {hi})"),
            );
        }
        if !(x.density_radius > 0.0) {
            return bad(
                "extras.density_radius",
                format!("must be positive, got {}", x.density_radius),
            );
        }
        if let Some(r) = x.overlap_radius {
            if !(r > 0.0) {
                return bad(
                    "extras.overlap_radius",
                    format!("must be positive, got {r}"),
                );
            }
        }
        if x.bins < 2 {
            return bad("extras.bins", "must be at least 2".into());
        }
        match kind {
            ExperimentKind::Conjecture1 if x.beta_draws < 1 => {
                return bad("extras.beta_draws", "must be at least 1".into())
            }
            ExperimentKind::Conjecture2 if x.limit_pool < 1 => {
                return bad("extras.limit_pool", "must be at least 1".into())
            }
            ExperimentKind::Conjecture2 if x.reference_samples == Some(0) => {
                return bad("extras.reference_samples", "must be at least 1".into())
            }
            ExperimentKind::EdgeModel => {
                if x.formula_samples < 1 {
                    return bad("extras.formula_samples", "must be at least 1".into());
                }
                ensembles::edge_gamma(n).map_err(|e| Error::Config(format!("ensemble.n: {e}")))?;
            }
            ExperimentKind::ChalkerMehlig
                if x.z_moduli.is_empty() || x.z_moduli.iter().any(|m| !(*m >= 0.0 && *m < 1.0)) =>
            {
                return bad(
                    "extras.z_moduli",
                    format!("needs values in [0, 1), got {:?}", x.z_moduli),
                );
            }
            ExperimentKind::HermitianBaseline
                if x.x.is_empty() || x.x.iter().any(|v| !(v.abs() < 2.0)) =>
            {
                return bad(
                    "extras.x",
                    format!("needs points inside (-2, 2), got {:?}", x.x),
                );
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn overlap_radius(&self) -> f64 {
        self.extras
            .overlap_radius
            .unwrap_or_else(|| crate::overlaps::default_radius(self.ensemble.n()))
    }
}

/// Wall-clock measurements; the only part of a report that varies between
/// identical runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub stages: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub estimates: BTreeMap<String, f64>,
    pub complex_estimates: BTreeMap<String, Complex64>,
    pub ks: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fit: Option<TailFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
    pub rejections: usize,
    /// Statistics that were skipped for lack of data.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Files written to `output_dir`, relative to it.
    pub files: Vec<String>,
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn estimate(&self, key: &str) -> Result<f64> {
        self.estimates
            .get(key)
            .copied()
            .ok_or_else(|| Error::InsufficientData(format!("report has no estimate '{key}'")))
    }

    pub fn ks_stat(&self, key: &str) -> Result<f64> {
        self.ks
            .get(key)
            .copied()
            .ok_or_else(|| Error::InsufficientData(format!("report has no KS statistic '{key}'")))
    }

    /// JSON without the timing block, for byte-level comparisons between runs.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.timing = Timing::default();
        Ok(serde_json::to_string_pretty(&copy)?)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join(REPORT_FILE))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Runs one experiment and writes its artifacts under `config.output_dir`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut ctx = output::Context::new(config)?;
    match config.experiment {
        ExperimentKind::Regime1
        | ExperimentKind::Regime2
        | ExperimentKind::Regime3
        | ExperimentKind::Regime4 => experiments::regime(&mut ctx)?,
        ExperimentKind::Theorem1Oracle => experiments::theorem1_oracle(&mut ctx)?,
        ExperimentKind::OverlapInvgamma => experiments::overlap_invgamma(&mut ctx)?,
        ExperimentKind::ChalkerMehlig => experiments::chalker_mehlig(&mut ctx)?,
        ExperimentKind::Conjecture1 => experiments::conjecture1(&mut ctx)?,
        ExperimentKind::Conjecture2 => experiments::conjecture2(&mut ctx)?,
        ExperimentKind::EdgeModel => experiments::edge_model(&mut ctx)?,
        ExperimentKind::HermitianBaseline => experiments::hermitian_baseline(&mut ctx)?,
    }
    ctx.finish(start.elapsed().as_secs_f64())
}

/// Tail regime implied by a regime spec, for reporting targets.
pub(crate) fn amplitude_target(regime: &RegimeSpec) -> Option<f64> {
    match regime.tail_regime() {
        TailRegime::Outside => None,
        t => crate::densities::tail_amplitude(t).ok(),
    }
}

/// Numerical limits `ĝ(z)` and `ρ̂(z)` of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// Mean normalized resolvent trace over the pool.
    pub g_hat: Complex64,
    pub rho: DensityEstimate,
    pub pool: usize,
    pub rejections: usize,
}

/// Averages the normalized trace over `pool` draws and counts eigenvalues of
/// the same draws near `z`. Draw `i` uses `derive_seed(seed, i)`.
pub fn estimate_limits(
    ensemble: &EnsembleSpec,
    z: Complex64,
    pool: usize,
    seed: u64,
    workers: usize,
    density_radius: f64,
) -> Result<LimitEstimate> {
    ensemble.validate()?;
    if pool == 0 {
        return Err(Error::Config(
            "estimate_limits: pool must be at least 1".into(),
        ));
    }
    let results = run_indexed(0..pool as u64, workers, |i| {
        let mut rejected = 0;
        for attempt in 0..resolvent::MAX_ATTEMPTS {
            let m = match ensemble.sample(derive_retry_seed(seed, i, attempt)) {
                Ok(m) => m,
                Err(e) => return Err(e),
            };
            match resolvent::stieltjes_trace(&m, z)
                .and_then(|g| Ok((g, ensembles::eigenvalues(&m)?)))
            {
                Ok((g, eigs)) => return Ok((g, eigs, rejected)),
                Err(Error::Rejected(_)) | Err(Error::DegenerateSpectrum(_)) => rejected += 1,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Rejected(format!(
            "estimate_limits: draw {i} rejected {} times",
            resolvent::MAX_ATTEMPTS
        )))
    });
    let mut g_sum = Complex64::new(0.0, 0.0);
    let mut eigs = Vec::new();
    let mut rejections = 0;
    let mut completed = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((g, e, rej)) => {
                g_sum += g;
                eigs.extend(e);
                rejections += rej;
                completed += 1;
            }
            Err(e) => {
                return Err(Error::Partial {
                    completed,
                    requested: pool,
                    reason: format!("limit draw {i}: {e}"),
                })
            }
        }
    }
    let rho = empirical_density(&eigs, z, density_radius)?;
    Ok(LimitEstimate {
        g_hat: g_sum / pool as f64,
        rho,
        pool,
        rejections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::template(kind);
        cfg.output_dir = dir.to_path_buf();
        cfg
    }

    #[test]
    fn templates_validate_and_roundtrip() {
        for kind in ExperimentKind::ALL {
            let cfg = ExperimentConfig::template(kind);
            cfg.validate().unwrap();
            let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
    }

    #[test]
    fn unknown_fields_report_their_path() {
        let mut v =
            serde_json::to_value(ExperimentConfig::template(ExperimentKind::Regime1)).unwrap();
        v["extras"]["radius"] = serde_json::json!(0.3);
        let err = ExperimentConfig::from_json(&v.to_string())
            .unwrap_err()
            .to_string();
        assert!(err.contains("extras"), "{err}");
        assert!(err.contains("radius"), "{err}");
    }

    #[test]
    fn incompatible_configs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(ExperimentKind::Regime1, dir.path());
        cfg.ensemble = EnsembleSpec::GUE { n: 10 };
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
        let mut cfg = tiny(ExperimentKind::Regime2, dir.path());
        cfg.regime = Some(RegimeSpec::Bulk { z: c(0.3, 0.0) });
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = tiny(ExperimentKind::Regime1, dir.path());
        cfg.n_samples = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = tiny(ExperimentKind::EdgeModel, dir.path());
        cfg.ensemble = EnsembleSpec::Ginibre { n: 100 };
        assert!(cfg.validate().is_err());
        // nothing was written
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn ginibre_limits() {
        let z = c(0.3, 0.1);
        let est = estimate_limits(&EnsembleSpec::Ginibre { n: 200 }, z, 100, 5, 1, 0.2).unwrap();
        assert!(
            (est.g_hat - z.conj()).norm() < 0.05 * z.norm(),
            "{}",
            est.g_hat
        );
        assert!(
            (est.rho.value * std::f64::consts::PI - 1.0).abs() < 0.05,
            "{}",
            est.rho.value
        );
        let out = estimate_limits(
            &EnsembleSpec::Ginibre { n: 200 },
            c(2.0, 0.0),
            10,
            6,
            1,
            0.2,
        )
        .unwrap();
        assert!((out.g_hat.re - 0.5).abs() < 0.01 && out.g_hat.im.abs() < 0.01);
    }

    #[test]
    fn every_experiment_has_a_distinct_artifact() {
        let mut seen = std::collections::BTreeSet::new();
        for kind in ExperimentKind::ALL {
            assert!(seen.insert(kind.artifact()), "{kind} shares its artifact");
        }
        assert_eq!(seen.len(), ExperimentKind::ALL.len());
    }
}
