use std::f64::consts::PI;

use num_complex::Complex64;

use super::output::Context;
use super::{amplitude_target, estimate_limits, ExperimentKind};
use crate::densities::{
    cauchy_inversion_residual, complex_student_radial_cdf, hermitian_cauchy_cdf, inverse_gamma_cdf,
};
use crate::ensembles::{predicted_spectral_edge, spectral_radius, EnsembleSpec};
use crate::error::{Error, Result};
use crate::overlaps::{
    conditional_overlap_mean, conditional_overlap_samples, eigensystem, estimate_beta,
    self_overlaps, OverlapRecord,
};
use crate::resolvent::{
    draw_with_retries, sample_g11_exact, sample_g11_matrix, sample_stieltjes_matrix,
    scaled_statistic, stieltjes_fluctuation, RegimeSpec,
};
use crate::rng::{derive_seed, SampleRng};
use crate::stats::{
    histogram, inversion_symmetry, ks_one_sample, ks_two_sample, kuiper_two_sample, mean_sem,
    radial_histogram, tail_fit, HistogramScale, MapKind,
};

// seed streams
const PRIMARY: u64 = 0;
const REFERENCE: u64 = 1;
const LIMITS: u64 = 2;
const EIGEN: u64 = 3;
const FORMULA: u64 = 4;

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

fn parts(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (
        values.iter().map(|v| v.re).collect(),
        values.iter().map(|v| v.im).collect(),
    )
}

fn moduli(values: &[Complex64]) -> Vec<f64> {
    values.iter().map(|v| v.norm()).collect()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)
}

fn mean(values: &[Complex64]) -> Complex64 {
    values.iter().sum::<Complex64>() / values.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

/// Tail fit of `values` around `center`, recorded in `ctx`.
fn record_tail(ctx: &mut Context, values: &[Complex64], center: Complex64) -> Result<()> {
    let (lo, hi) = ctx.config.extras.tail_window;
    let Some(fit) = ctx.soft("tail fit", tail_fit(values, center, lo, hi))? else {
        return Ok(());
    };
    ctx.estimate("tail_slope", fit.slope);
    ctx.estimate("tail_slope_stderr", fit.stderr_slope);
    ctx.estimate("tail_amplitude", fit.amplitude());
    ctx.estimate("tail_intercept", fit.intercept);
    ctx.tail_fit = Some(fit);
    Ok(())
}

fn record_symmetry(ctx: &mut Context, values: &[Complex64], map: MapKind) -> Result<()> {
    if let Some(sym) = ctx.soft("inversion symmetry", inversion_symmetry(values, map))? {
        ctx.ks("inversion_modulus", sym.ks_modulus);
        ctx.ks("inversion_argument", sym.ks_argument);
        ctx.symmetry = Some(sym);
    }
    Ok(())
}

/// Self-overlap records pooled over `count` eigendecompositions.
fn overlap_pool(
    ensemble: &EnsembleSpec,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<(Vec<OverlapRecord>, usize)> {
    let drawn = draw_with_retries(count, seed, workers, "eigensystem", |s| {
        let m = ensemble.sample(s)?;
        Ok(self_overlaps(&eigensystem(&m)?, s))
    })?;
    Ok((
        drawn.values.into_iter().flatten().collect(),
        drawn.rejections,
    ))
}

pub(super) fn regime(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let regime = cfg.regime.expect("validated");
    let ens = cfg.ensemble;
    let n = ens.n();
    let z = regime.z_at(n)?;
    let seed = ctx.stream(PRIMARY);
    let raw = ctx.timed("sample", || {
        sample_g11_matrix(&ens, z, cfg.n_samples, seed, cfg.workers)
    })?;
    ctx.rejections += raw.rejections;
    let scaled = scaled_statistic(&raw, &regime)?;
    let w = &scaled.values;
    let (sre, sim) = parts(w);
    ctx.samples(
        "samples.csv",
        &raw.values,
        &[("scaled_re", &sre), ("scaled_im", &sim)],
    )?;
    ctx.complex_estimates.insert("z".into(), z);
    ctx.complex_estimates
        .insert("center".into(), regime.center(n)?);
    ctx.estimate("scale", regime.scale(n)?);
    let radii = moduli(w);

    if cfg.experiment == ExperimentKind::Regime4 {
        ctx.histogram(
            "histogram_radial.csv",
            &histogram(&radii, cfg.extras.bins, HistogramScale::Linear)?,
        )?;
        ctx.estimate("var_re", sample_variance(&sre));
        ctx.estimate("var_im", sample_variance(&sim));
        let ks = ks_one_sample(&radii, |r| 1.0 - (-r * r).exp())?;
        ctx.ks("rayleigh", ks);
        let (gre, gim) = parts(&raw.values);
        let nf = n as f64;
        ctx.estimate(
            "n_var_unscaled",
            nf * (sample_variance(&gre) + sample_variance(&gim)),
        );
        let r2 = z.norm_sqr();
        ctx.estimate("n_var_target", 1.0 / (r2 * (r2 - 1.0)));
        return Ok(());
    }

    ctx.histogram(
        "histogram_radial.csv",
        &histogram(&radii, cfg.extras.bins, HistogramScale::LogRadial)?,
    )?;
    let radial = regime.limit_model().radial_cdf()?;
    let ks = ctx.timed("ks", || ks_one_sample(&radii, |r| radial.eval(r)))?;
    ctx.ks("radial", ks);
    if matches!(
        regime,
        RegimeSpec::CriticalWindow { .. } | RegimeSpec::EdgeWindow { .. }
    ) {
        // same statistic centered at 1 instead of 1/z
        let one = Complex64::new(1.0, 0.0);
        let shift = regime.scale(n)? * (regime.center(n)? - one);
        let unit: Vec<f64> = w.iter().map(|v| (v + shift).norm()).collect();
        ctx.complex_estimates.insert("center_unit".into(), one);
        ctx.ks(
            "radial_unit_center",
            ks_one_sample(&unit, |r| radial.eval(r))?,
        );
    }
    record_tail(ctx, w, ORIGIN)?;
    if let Some(a) = amplitude_target(&regime) {
        ctx.estimate("tail_amplitude_target", a);
    }
    if cfg.experiment == ExperimentKind::Regime1 {
        record_symmetry(ctx, w, MapKind::Reciprocal)?;
    }
    Ok(())
}

pub(super) fn theorem1_oracle(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let n = ens.n();
    let z = cfg.regime.expect("validated").z_at(n)?;
    let (s_matrix, s_exact) = (ctx.stream(PRIMARY), ctx.stream(REFERENCE));
    let matrix = ctx.timed("matrix", || {
        sample_g11_matrix(&ens, z, cfg.n_samples, s_matrix, cfg.workers)
    })?;
    let exact = ctx.timed("exact", || sample_g11_exact(n, z, cfg.n_samples, s_exact))?;
    ctx.rejections += matrix.rejections + exact.rejections;
    ctx.samples("samples.csv", &matrix.values, &[])?;
    ctx.samples("exact_samples.csv", &exact.values, &[])?;
    let (mm, em) = (moduli(&matrix.values), moduli(&exact.values));
    ctx.histogram(
        "histogram_matrix.csv",
        &histogram(&mm, cfg.extras.bins, HistogramScale::LogRadial)?,
    )?;
    ctx.histogram(
        "histogram_exact.csv",
        &histogram(&em, cfg.extras.bins, HistogramScale::LogRadial)?,
    )?;
    let (mre, mim) = parts(&matrix.values);
    let (ere, eim) = parts(&exact.values);
    ctx.ks("modulus", ks_two_sample(&mm, &em)?);
    ctx.ks("real_part", ks_two_sample(&mre, &ere)?);
    ctx.ks("imag_part", ks_two_sample(&mim, &eim)?);
    ctx.complex_estimates.insert("z".into(), z);
    ctx.estimate("median_modulus_matrix", median(&mm));
    ctx.estimate("median_modulus_exact", median(&em));
    Ok(())
}

pub(super) fn overlap_invgamma(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let z = cfg.regime.expect("validated").z_at(ens.n())?;
    let seed = ctx.stream(EIGEN);
    let (records, rejected) = ctx.timed("eigen", || {
        overlap_pool(&ens, cfg.n_samples, seed, cfg.workers)
    })?;
    ctx.rejections += rejected;
    ctx.overlaps("overlaps.csv", &records)?;
    let radius = cfg.overlap_radius();
    let x = conditional_overlap_samples(&records, z, radius)?;
    ctx.real_samples("samples.csv", &x, &[])?;
    ctx.histogram(
        "histogram.csv",
        &histogram(&x, cfg.extras.bins, HistogramScale::LogRadial)?,
    )?;
    let ks = ks_one_sample(&x, |v| inverse_gamma_cdf(v, 2.0, 1.0).unwrap_or(f64::NAN))?;
    ctx.ks("inverse_gamma", ks);
    if let Some((m, sem)) = ctx.soft("overlap mean", mean_sem(&x))? {
        ctx.estimate("mean", m);
        ctx.estimate("mean_sem", sem);
    }
    ctx.estimate("median", median(&x));
    ctx.estimate("selected", x.len() as f64);
    ctx.estimate("overlap_radius", radius);
    Ok(())
}

pub(super) fn chalker_mehlig(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let seed = ctx.stream(EIGEN);
    let (records, rejected) = ctx.timed("eigen", || {
        overlap_pool(&ens, cfg.n_samples, seed, cfg.workers)
    })?;
    ctx.rejections += rejected;
    ctx.overlaps("overlaps.csv", &records)?;
    let radius = cfg.overlap_radius();
    ctx.estimate("overlap_radius", radius);
    for &m in &cfg.extras.z_moduli {
        let z = Complex64::new(m, 0.0);
        let got = conditional_overlap_mean(&records, z, radius)?;
        let target = 1.0 - m * m;
        let selected = records
            .iter()
            .filter(|r| (r.eigenvalue - z).norm() <= radius)
            .count();
        ctx.estimate(format!("conditional_mean[{m}]"), got);
        ctx.estimate(format!("target[{m}]"), target);
        ctx.estimate(
            format!("relative_error[{m}]"),
            (got - target).abs() / target,
        );
        ctx.estimate(format!("selected[{m}]"), selected as f64);
    }
    Ok(())
}

pub(super) fn conjecture1(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let z = cfg.regime.expect("validated").z_at(ens.n())?;
    let x = &cfg.extras;
    let (s_eigen, s_limits, s_primary) =
        (ctx.stream(EIGEN), ctx.stream(LIMITS), ctx.stream(PRIMARY));
    let (records, rejected) = ctx.timed("eigen", || {
        overlap_pool(&ens, x.beta_draws, s_eigen, cfg.workers)
    })?;
    ctx.rejections += rejected;
    ctx.overlaps("overlaps.csv", &records)?;
    let eigs: Vec<Complex64> = records.iter().map(|r| r.eigenvalue).collect();
    let beta = estimate_beta(&records, &eigs, z, cfg.overlap_radius(), x.density_radius)?;
    let limits = ctx.timed("limits", || {
        estimate_limits(
            &ens,
            z,
            x.limit_pool,
            s_limits,
            cfg.workers,
            x.density_radius,
        )
    })?;
    ctx.rejections += limits.rejections;
    let raw = ctx.timed("sample", || {
        sample_g11_matrix(&ens, z, cfg.n_samples, s_primary, cfg.workers)
    })?;
    ctx.rejections += raw.rejections;

    let omega: Vec<Complex64> = raw
        .values
        .iter()
        .map(|g| (g - limits.g_hat) / beta.beta.sqrt())
        .collect();
    let (ore, oim) = parts(&omega);
    ctx.samples(
        "samples.csv",
        &raw.values,
        &[("omega_re", &ore), ("omega_im", &oim)],
    )?;
    let radii = moduli(&omega);
    ctx.histogram(
        "histogram_radial.csv",
        &histogram(&radii, x.bins, HistogramScale::LogRadial)?,
    )?;

    ctx.estimate("beta_hat", beta.beta);
    ctx.estimate("pi_rho_hat", PI * beta.rho.value);
    ctx.estimate("conditional_mean", beta.conditional_mean);
    ctx.estimate("selected", beta.selected as f64);
    ctx.complex_estimates.insert("g_hat".into(), limits.g_hat);
    ctx.complex_estimates
        .insert("g11_mean".into(), mean(&raw.values));
    ctx.complex_estimates.insert("z".into(), z);
    ctx.ks(
        "radial",
        ks_one_sample(&radii, |r| {
            complex_student_radial_cdf(r, 1.0).unwrap_or(f64::NAN)
        })?,
    );
    record_tail(ctx, &omega, ORIGIN)?;
    record_symmetry(ctx, &omega, MapKind::Reciprocal)?;
    Ok(())
}

pub(super) fn conjecture2(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let n = ens.n();
    let z = cfg.regime.expect("validated").z_at(n)?;
    let x = &cfg.extras;
    let (s_limits, s_primary, s_ref) = (
        ctx.stream(LIMITS),
        ctx.stream(PRIMARY),
        ctx.stream(REFERENCE),
    );
    let limits = ctx.timed("limits", || {
        estimate_limits(
            &ens,
            z,
            x.limit_pool,
            s_limits,
            cfg.workers,
            x.density_radius,
        )
    })?;
    ctx.rejections += limits.rejections;
    if limits.rho.count == 0 {
        return Err(Error::EmptySelection(format!(
            "no eigenvalue within {} of {z}; enlarge extras.density_radius",
            x.density_radius
        )));
    }
    let trace = ctx.timed("sample", || {
        sample_stieltjes_matrix(&ens, z, cfg.n_samples, s_primary, cfg.workers)
    })?;
    ctx.rejections += trace.rejections;
    let zs = stieltjes_fluctuation(&trace, limits.g_hat, limits.rho.value)?;

    let ref_count = x.reference_samples.unwrap_or(cfg.n_samples);
    let ginibre = EnsembleSpec::Ginibre { n };
    let reference = ctx.timed("reference", || {
        sample_stieltjes_matrix(&ginibre, z, ref_count, s_ref, cfg.workers)
    })?;
    ctx.rejections += reference.rejections;
    let zr = stieltjes_fluctuation(&reference, z.conj(), 1.0 / PI)?;

    let (zre, zim) = parts(&zs.values);
    ctx.samples(
        "samples.csv",
        &trace.values,
        &[("z_re", &zre), ("z_im", &zim)],
    )?;
    let (rre, rim) = parts(&zr.values);
    ctx.samples(
        "reference_samples.csv",
        &reference.values,
        &[("z_re", &rre), ("z_im", &rim)],
    )?;
    let (mz, mr) = (moduli(&zs.values), moduli(&zr.values));
    ctx.histogram(
        "histogram_radial.csv",
        &histogram(&mz, x.bins, HistogramScale::LogRadial)?,
    )?;
    ctx.histogram(
        "histogram_reference.csv",
        &histogram(&mr, x.bins, HistogramScale::LogRadial)?,
    )?;

    ctx.complex_estimates.insert("g_hat".into(), limits.g_hat);
    ctx.complex_estimates.insert("z".into(), z);
    ctx.estimate("rho_hat", limits.rho.value);
    ctx.estimate("pi_rho_hat", PI * limits.rho.value);
    ctx.estimate("rho_count", limits.rho.count as f64);
    ctx.ks("reference_modulus", ks_two_sample(&mz, &mr)?);
    let args = |v: &[Complex64]| v.iter().map(|w| w.arg()).collect::<Vec<_>>();
    ctx.ks(
        "reference_argument",
        kuiper_two_sample(&args(&zs.values), &args(&zr.values))?,
    );
    record_tail(ctx, &zs.values, ORIGIN)?;
    record_symmetry(ctx, &zs.values, MapKind::Sqrt2Reciprocal)?;
    Ok(())
}

pub(super) fn edge_model(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let n = ens.n();
    let (s_primary, s_formula) = (ctx.stream(PRIMARY), ctx.stream(FORMULA));
    let drawn = ctx.timed("eigenvalues", || {
        draw_with_retries(
            cfg.n_samples,
            s_primary,
            cfg.workers,
            "spectral_radius",
            |s| spectral_radius(&ens.sample(s)?),
        )
    })?;
    ctx.rejections += drawn.rejections;
    let observed = drawn.values;
    let mut rng = SampleRng::new(s_formula);
    let formula = (0..cfg.extras.formula_samples)
        .map(|_| predicted_spectral_edge(n, rng.uniform_open()))
        .collect::<Result<Vec<f64>>>()?;
    ctx.real_samples("samples.csv", &observed, &[])?;
    ctx.real_samples("formula_samples.csv", &formula, &[])?;
    ctx.histogram(
        "histogram_observed.csv",
        &histogram(&observed, cfg.extras.bins, HistogramScale::Linear)?,
    )?;
    ctx.histogram(
        "histogram_formula.csv",
        &histogram(&formula, cfg.extras.bins, HistogramScale::Linear)?,
    )?;
    ctx.ks("two_sample", ks_two_sample(&observed, &formula)?);
    ctx.estimate("median_observed", median(&observed));
    ctx.estimate("median_formula", median(&formula));
    ctx.estimate(
        "mean_observed",
        observed.iter().sum::<f64>() / observed.len() as f64,
    );
    ctx.estimate(
        "mean_formula",
        formula.iter().sum::<f64>() / formula.len() as f64,
    );
    Ok(())
}

pub(super) fn hermitian_baseline(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config;
    let ens = cfg.ensemble;
    let (s_g11, s_trace) = (ctx.stream(PRIMARY), ctx.stream(REFERENCE));
    for (k, &x) in cfg.extras.x.iter().enumerate() {
        let z = Complex64::new(x, 0.0);
        let (loc, scale) = (x / 2.0, (4.0 - x * x).sqrt() / 2.0);
        let (sg, st) = (derive_seed(s_g11, k as u64), derive_seed(s_trace, k as u64));
        let g = ctx.timed("g11", || {
            sample_g11_matrix(&ens, z, cfg.n_samples, sg, cfg.workers)
        })?;
        let t = ctx.timed("trace", || {
            sample_stieltjes_matrix(&ens, z, cfg.n_samples, st, cfg.workers)
        })?;
        ctx.rejections += g.rejections + t.rejections;
        ctx.samples(&format!("g11_x{k}.csv"), &g.values, &[])?;
        ctx.samples(&format!("trace_x{k}.csv"), &t.values, &[])?;
        let (gre, _) = parts(&g.values);
        let (tre, _) = parts(&t.values);
        ctx.histogram(
            &format!("histogram_g11_x{k}.csv"),
            &radial_histogram(
                &g.values,
                Complex64::new(loc, 0.0),
                cfg.extras.bins,
                HistogramScale::LogRadial,
            )?,
        )?;
        let cdf = |v: f64| hermitian_cauchy_cdf(v, loc, scale).unwrap_or(f64::NAN);
        ctx.ks(format!("g11[{x}]"), ks_one_sample(&gre, cdf)?);
        ctx.ks(format!("trace[{x}]"), ks_one_sample(&tre, cdf)?);
        ctx.estimate(
            format!("inversion_residual[{x}]"),
            cauchy_inversion_residual(loc, scale)?,
        );
        ctx.estimate(format!("location[{x}]"), loc);
        ctx.estimate(format!("scale[{x}]"), scale);
    }
    Ok(())
}
