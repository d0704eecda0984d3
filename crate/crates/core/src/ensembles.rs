//! Random matrix ensembles.
//!
//! Normalizations follow the circular/semicircle conventions: every entry of a
//! Ginibre matrix has `E|M_ij|² = 1/N`, so the spectrum fills the unit disk,
//! and the GUE has off-diagonal variance `1/N`, so its spectrum is `[-2, 2]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::matrix::ComplexMatrix;
use crate::rng::{derive_seed, SampleRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum EnsembleSpec {
    #[serde(rename = "ginibre")]
    Ginibre { n: usize },
    /// Elliptic Ginibre with `E(X_ij X_ji) = τ/N`.
    #[serde(rename = "ginue")]
    GinUE { n: usize, tau: f64 },
    #[serde(rename = "haar_unitary")]
    HaarUnitary { n: usize },
    /// `A·B·C` with `A ~ GinUE(τ)`, `B ~ Haar`, `C ~ Ginibre`, independent.
    #[serde(rename = "product_abc")]
    ProductABC { n: usize, tau: f64 },
    #[serde(rename = "gue")]
    GUE { n: usize },
}

impl EnsembleSpec {
    pub fn n(&self) -> usize {
        match *self {
            Self::Ginibre { n }
            | Self::GinUE { n, .. }
            | Self::HaarUnitary { n }
            | Self::ProductABC { n, .. }
            | Self::GUE { n } => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ginibre { .. } => "ginibre",
            Self::GinUE { .. } => "ginue",
            Self::HaarUnitary { .. } => "haar_unitary",
            Self::ProductABC { .. } => "product_abc",
            Self::GUE { .. } => "gue",
        }
    }

    /// Identifier stored in matrix dumps.
    pub fn variant_id(&self) -> u32 {
        match self {
            Self::Ginibre { .. } => 1,
            Self::GinUE { .. } => 2,
            Self::HaarUnitary { .. } => 3,
            Self::ProductABC { .. } => 4,
            Self::GUE { .. } => 5,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        matches!(self, Self::GUE { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(domain("EnsembleSpec", format!("requires N >= 2, got {n}")));
        }
        if let Self::GinUE { tau, .. } | Self::ProductABC { tau, .. } = *self {
            check_tau(tau)?;
        }
        Ok(())
    }

    pub fn with_n(&self, n: usize) -> Self {
        match *self {
            Self::Ginibre { .. } => Self::Ginibre { n },
            Self::GinUE { tau, .. } => Self::GinUE { n, tau },
            Self::HaarUnitary { .. } => Self::HaarUnitary { n },
            Self::ProductABC { tau, .. } => Self::ProductABC { n, tau },
            Self::GUE { .. } => Self::GUE { n },
        }
    }

    /// Draws one matrix; identical `(spec, seed)` give bitwise-identical output.
    pub fn sample(&self, seed: u64) -> Result<ComplexMatrix> {
        self.validate()?;
        Ok(match *self {
            Self::Ginibre { n } => sample_ginibre(n, seed)?,
            Self::GinUE { n, tau } => sample_ginue(n, tau, seed)?,
            Self::HaarUnitary { n } => sample_haar_unitary(n, seed)?,
            Self::ProductABC { n, tau } => sample_product_model(n, tau, seed)?,
            Self::GUE { n } => sample_gue(n, seed)?,
        })
    }
}

fn check_n(op: &'static str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(op, format!("requires N >= 2, got {n}")));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.abs() < 1.0) {
        return Err(domain("GinUE", format!("requires |tau| < 1, got {tau}")));
    }
    Ok(())
}

fn ginibre_from(n: usize, rng: &mut SampleRng) -> ComplexMatrix {
    let v = 1.0 / n as f64;
    ComplexMatrix::from_fn(n, |_, _| rng.complex_gaussian(v))
}

fn gue_from(n: usize, rng: &mut SampleRng) -> ComplexMatrix {
    let a = ginibre_from(n, rng);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = (a.get(i, j) + a.get(j, i).conj()) * s;
            if i == j {
                h.set(i, i, Complex64::new(v.re, 0.0));
            } else {
                h.set(i, j, v);
                h.set(j, i, v.conj());
            }
        }
    }
    h
}

/// I.i.d. circular complex Gaussian entries with `E|M_ij|² = 1/N`.
pub fn sample_ginibre(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_n("sample_ginibre", n)?;
    Ok(ginibre_from(n, &mut SampleRng::new(seed)))
}

/// Hermitian, `E|H_ij|² = 1/N` off the diagonal, real diagonal of variance `1/N`.
pub fn sample_gue(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_n("sample_gue", n)?;
    Ok(gue_from(n, &mut SampleRng::new(seed)))
}

/// `√((1+τ)/2) H₁ + i √((1-τ)/2) H₂` with independent GUE `H₁, H₂`.
pub fn sample_ginue(n: usize, tau: f64, seed: u64) -> Result<ComplexMatrix> {
    check_n("sample_ginue", n)?;
    check_tau(tau)?;
    let mut rng = SampleRng::new(seed);
    let h1 = gue_from(n, &mut rng);
    let h2 = gue_from(n, &mut rng);
    let a = ((1.0 + tau) / 2.0).sqrt();
    let b = ((1.0 - tau) / 2.0).sqrt();
    Ok(h1
        .scale(Complex64::new(a, 0.0))
        .add(&h2.scale(Complex64::new(0.0, b))))
}

/// Haar unitary from the QR factorization of a Ginibre draw, with the phases of
/// `diag(R)` absorbed into `Q` so that the factorization is unique.
pub fn sample_haar_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_n("sample_haar_unitary", n)?;
    let g = ginibre_from(n, &mut SampleRng::new(seed)).to_faer();
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<Complex64> = (0..n)
        .map(|j| {
            let d = r[(j, j)];
            let m = d.norm();
            if m > 0.0 {
                d / m
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| q[(i, j)] * phases[j]))
}

/// `A·B·C`: GinUE(τ) times Haar times Ginibre, each from its own derived stream.
pub fn sample_product_model(n: usize, tau: f64, seed: u64) -> Result<ComplexMatrix> {
    check_n("sample_product_model", n)?;
    check_tau(tau)?;
    let a = sample_ginue(n, tau, derive_seed(seed, 0))?;
    let b = sample_haar_unitary(n, derive_seed(seed, 1))?;
    let c = sample_ginibre(n, derive_seed(seed, 2))?;
    let prod = a.to_faer() * b.to_faer() * c.to_faer();
    Ok(ComplexMatrix::from_faer(prod.as_ref()))
}

/// `γ_N = log(N/2π) - 2 log log N`.
pub fn edge_gamma(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(domain(
            "predicted_spectral_edge",
            format!("requires N >= 3, got {n}"),
        ));
    }
    let nf = n as f64;
    let g = (nf / (2.0 * std::f64::consts::PI)).ln() - 2.0 * nf.ln().ln();
    if g <= 0.0 {
        return Err(domain(
            "predicted_spectral_edge",
            format!("gamma_N = {g:.4} is not positive at N = {n} (needs N >= 164)"),
        ));
    }
    Ok(g)
}

/// Approximate largest eigenvalue modulus of an `N×N` Ginibre matrix,
/// `1 + √(γ_N/N) - log(Z)/√(4Nγ_N)` with `Z = -log u` exponential.
pub fn predicted_spectral_edge(n: usize, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(domain(
            "predicted_spectral_edge",
            format!("requires u in (0, 1), got {u}"),
        ));
    }
    let g = edge_gamma(n)?;
    let nf = n as f64;
    let z = -u.ln();
    Ok(1.0 + (g / nf).sqrt() - z.ln() / (4.0 * nf * g).sqrt())
}

/// Eigenvalues of `m`, without eigenvectors.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.to_faer()
        .eigenvalues()
        .map_err(|e| crate::error::Error::DegenerateSpectrum(format!("{e:?}")))
}

/// Largest eigenvalue modulus of `m`.
pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|l| l.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry_moments(m: &ComplexMatrix) -> (f64, Complex64) {
        let n2 = (m.n() * m.n()) as f64;
        let abs2 = m.as_slice().iter().map(|v| v.norm_sqr()).sum::<f64>() / n2;
        let sq = m.as_slice().iter().map(|v| v * v).sum::<Complex64>() / n2;
        (abs2, sq)
    }

    #[test]
    fn ginibre_moments() {
        let n = 200;
        let m = sample_ginibre(n, 3).unwrap();
        let (abs2, sq) = entry_moments(&m);
        // |w|² of a unit circular Gaussian is Exp(1): sd 1/N per entry
        let sigma = 1.0 / n as f64 / n as f64;
        assert!((abs2 - 1.0 / n as f64).abs() < 3.0 * sigma);
        assert!(sq.norm() < 4.0 * sigma);
    }

    #[test]
    fn determinism() {
        for spec in [
            EnsembleSpec::Ginibre { n: 5 },
            EnsembleSpec::GinUE { n: 5, tau: 0.3 },
            EnsembleSpec::HaarUnitary { n: 5 },
            EnsembleSpec::ProductABC { n: 5, tau: 0.5 },
            EnsembleSpec::GUE { n: 5 },
        ] {
            assert_eq!(spec.sample(17).unwrap(), spec.sample(17).unwrap());
            assert_ne!(spec.sample(17).unwrap(), spec.sample(18).unwrap());
        }
    }

    #[test]
    fn validation() {
        assert!(EnsembleSpec::Ginibre { n: 1 }.sample(0).is_err());
        assert!(EnsembleSpec::GinUE { n: 4, tau: 1.0 }.sample(0).is_err());
        assert!(sample_ginue(4, -1.2, 0).is_err());
    }

    #[test]
    fn gue_hermitian_and_normalized() {
        let n = 300;
        let h = sample_gue(n, 8).unwrap();
        assert_eq!(h, h.adjoint());
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h.get(i, j).norm_sqr())
            .sum::<f64>()
            / (n * (n - 1)) as f64;
        assert!((off * n as f64 - 1.0).abs() < 0.02);
        let diag: f64 = (0..n).map(|i| h.get(i, i).re.powi(2)).sum::<f64>() / n as f64;
        assert!((diag * n as f64 - 1.0).abs() < 0.3);
    }

    #[test]
    fn ginue_correlation() {
        let n = 300;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        let mut abs2 = 0.0;
        let mut count = 0.0;
        for seed in 0..4 {
            let x = sample_ginue(n, 0.5, seed).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    let p = (x.get(i, j) * x.get(j, i)).re * n as f64;
                    acc += p;
                    acc2 += p * p;
                    abs2 += x.get(i, j).norm_sqr() * n as f64;
                    count += 1.0;
                }
            }
        }
        let mean = acc / count;
        let sem = ((acc2 / count - mean * mean) / count).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sem, "mean {mean} sem {sem}");
        assert!((abs2 / count - 1.0).abs() < 0.01);
    }

    #[test]
    fn ginue_interpolates_to_hermitian() {
        let x = sample_ginue(100, 0.999, 2).unwrap();
        let skew = x.sub(&x.adjoint()).frobenius_norm() / x.frobenius_norm();
        assert!(skew < 0.05, "{skew}");
        let y = sample_ginue(100, 0.0, 2).unwrap();
        let skew0 = y.sub(&y.adjoint()).frobenius_norm() / y.frobenius_norm();
        assert!(skew0 > 1.0);
    }

    #[test]
    fn haar_is_unitary() {
        let u = sample_haar_unitary(60, 5).unwrap();
        let residual = u
            .adjoint()
            .matmul(&u)
            .sub(&ComplexMatrix::identity(60))
            .max_abs();
        assert!(residual < 1e-12, "{residual}");
        let eigs = u.to_faer().eigenvalues().unwrap();
        let worst = eigs
            .iter()
            .map(|l| (l.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }

    #[test]
    fn haar_trace_vanishes_on_average() {
        // E|Tr U|² = 1 for Haar unitaries of any size
        let draws = 400;
        let traces: Vec<Complex64> = (0..draws)
            .map(|s| sample_haar_unitary(20, s).unwrap().trace())
            .collect();
        let mean = traces.iter().sum::<Complex64>() / draws as f64;
        let second = traces.iter().map(|t| t.norm_sqr()).sum::<f64>() / draws as f64;
        assert!(mean.norm() < 3.0 * (1.0 / draws as f64).sqrt());
        assert!((second - 1.0).abs() < 0.25, "{second}");
    }

    #[test]
    fn spectral_edge_formula() {
        assert!(predicted_spectral_edge(100, 0.5).is_err());
        assert!(predicted_spectral_edge(1000, 0.0).is_err());
        // median of Z is log 2
        let median = |n: usize| {
            let g = edge_gamma(n).unwrap();
            let nf = n as f64;
            1.0 + (g / nf).sqrt() - std::f64::consts::LN_2.ln() / (4.0 * nf * g).sqrt()
        };
        for &n in &[1000usize, 10_000, 100_000] {
            assert!((predicted_spectral_edge(n, 0.5).unwrap() - median(n)).abs() < 1e-15);
        }
        assert!(median(1000) > median(10_000) && median(10_000) > median(100_000));
        assert!(median(100_000) > 1.0);
    }

    #[test]
    fn ginibre_spectrum_in_disk() {
        let m = sample_ginibre(400, 1).unwrap();
        let eigs = m.to_faer().eigenvalues().unwrap();
        let inside = eigs.iter().filter(|l| l.norm() <= 1.0).count() as f64 / 400.0;
        assert!(inside > 0.97, "{inside}");
    }
}
