//! Eigenvector self-overlaps of non-normal matrices.
//!
//! With `M = P D P^{-1}`, right eigenvectors are the columns of `P` and left
//! eigenvectors the rows of `P^{-1}`, so `⟨L_i|R_j⟩ = δ_ij` holds by
//! construction. The self-overlap `O_nn = ‖L_n‖² ‖R_n‖²` does not depend on
//! how the columns of `P` are normalized.

use std::io::{Read, Write};
use std::path::Path;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Biorthogonality residual above which a decomposition is rejected.
pub const BIORTHOGONALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    /// `P`, right eigenvectors as columns.
    pub right: Mat<Complex64>,
    /// `P^{-1}`, left eigenvectors as rows.
    pub left: Mat<Complex64>,
    /// `‖P^{-1} P - I‖_max`.
    pub biorthogonality_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapRecord {
    pub eigenvalue: Complex64,
    pub self_overlap: f64,
    pub n: usize,
    /// Seed of the matrix draw the record came from.
    pub seed: u64,
}

fn max_identity_residual(m: &Mat<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Eigendecomposition with left vectors from `P^{-1}`.
pub fn eigensystem(m: &ComplexMatrix) -> Result<EigenSystem> {
    let a = m.to_faer();
    let evd = a
        .eigen()
        .map_err(|e| Error::DegenerateSpectrum(format!("eigensolver failed: {e:?}")))?;
    let right = evd.U().to_owned();
    let eigenvalues: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
    let lu = right.partial_piv_lu();
    let left = lu.inverse();
    let residual = max_identity_residual(&(&left * &right));
    if !(residual <= BIORTHOGONALITY_TOL) {
        return Err(Error::DegenerateSpectrum(format!(
            "biorthogonality residual {residual:e} exceeds {BIORTHOGONALITY_TOL:e}"
        )));
    }
    Ok(EigenSystem {
        eigenvalues,
        right,
        left,
        biorthogonality_residual: residual,
    })
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `‖P D P^{-1} - M‖_max / ‖M‖_max`.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        let n = self.n();
        let pd = Mat::from_fn(n, n, |i, j| self.right[(i, j)] * self.eigenvalues[j]);
        let rec = &pd * &self.left;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((rec[(i, j)] - m.get(i, j)).norm());
            }
        }
        worst / m.max_abs().max(f64::MIN_POSITIVE)
    }

    /// `‖P P^{-1} - I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        max_identity_residual(&(&self.right * &self.left))
    }

    /// Rescales column `i` of `P` by `c_i` and row `i` of `P^{-1}` by `1/c_i`.
    pub fn regauge(&self, factors: &[Complex64]) -> Self {
        let n = self.n();
        Self {
            eigenvalues: self.eigenvalues.clone(),
            right: Mat::from_fn(n, n, |i, j| self.right[(i, j)] * factors[j]),
            left: Mat::from_fn(n, n, |i, j| self.left[(i, j)] / factors[i]),
            biorthogonality_residual: self.biorthogonality_residual,
        }
    }
}

/// `O_nn = ⟨L_n|L_n⟩⟨R_n|R_n⟩`; `seed` tags the records with their draw.
pub fn self_overlaps(es: &EigenSystem, seed: u64) -> Vec<OverlapRecord> {
    let n = es.n();
    (0..n)
        .map(|k| {
            let r2: f64 = (0..n).map(|i| es.right[(i, k)].norm_sqr()).sum();
            let l2: f64 = (0..n).map(|j| es.left[(k, j)].norm_sqr()).sum();
            OverlapRecord {
                eigenvalue: es.eigenvalues[k],
                self_overlap: r2 * l2,
                n,
                seed,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub count: usize,
    pub total: usize,
    pub radius: f64,
    /// Fewer than 10 eigenvalues fell in the disk.
    pub low_statistics: bool,
}

/// `#{|λ - z| ≤ radius} / (N π radius²)` over a pool of eigenvalues, `N` being
/// the pool size.
pub fn empirical_density(eigs: &[Complex64], z: Complex64, radius: f64) -> Result<DensityEstimate> {
    if !(radius > 0.0) {
        return Err(crate::error::domain(
            "empirical_density",
            format!("requires radius > 0, got {radius}"),
        ));
    }
    if eigs.is_empty() {
        return Err(Error::InsufficientData("empty eigenvalue pool".into()));
    }
    let count = eigs.iter().filter(|l| (*l - z).norm() <= radius).count();
    let value = count as f64 / (eigs.len() as f64 * std::f64::consts::PI * radius * radius);
    Ok(DensityEstimate {
        value,
        count,
        total: eigs.len(),
        radius,
        low_statistics: count < 10,
    })
}

/// Default selection radius `N^{-1/4}`.
pub fn default_radius(n: usize) -> f64 {
    (n as f64).powf(-0.25)
}

fn near(records: &[OverlapRecord], z: Complex64, radius: f64) -> Result<Vec<&OverlapRecord>> {
    if !(radius > 0.0) {
        return Err(crate::error::domain(
            "conditional overlap",
            format!("requires radius > 0, got {radius}"),
        ));
    }
    let sel: Vec<&OverlapRecord> = records
        .iter()
        .filter(|r| (r.eigenvalue - z).norm() <= radius)
        .collect();
    if sel.is_empty() {
        return Err(Error::EmptySelection(format!(
            "no eigenvalue within {radius} of {z} among {} records; enlarge the radius or pool more draws",
            records.len()
        )));
    }
    Ok(sel)
}

/// Mean of `O_nn / N` over eigenvalues within `radius` of `z`.
pub fn conditional_overlap_mean(
    records: &[OverlapRecord],
    z: Complex64,
    radius: f64,
) -> Result<f64> {
    let sel = near(records, z, radius)?;
    Ok(sel.iter().map(|r| r.self_overlap / r.n as f64).sum::<f64>() / sel.len() as f64)
}

/// `O_nn / (N(1 - |λ_n|²))` for eigenvalues within `radius` of `z`.
pub fn conditional_overlap_samples(
    records: &[OverlapRecord],
    z: Complex64,
    radius: f64,
) -> Result<Vec<f64>> {
    let sel = near(records, z, radius)?;
    let inside: Vec<f64> = sel
        .iter()
        .filter(|r| r.eigenvalue.norm_sqr() < 1.0)
        .map(|r| r.self_overlap / (r.n as f64 * (1.0 - r.eigenvalue.norm_sqr())))
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptySelection(format!(
            "no selected eigenvalue near {z} lies inside the unit disk"
        )));
    }
    Ok(inside)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub rho: DensityEstimate,
    pub conditional_mean: f64,
    pub selected: usize,
    pub overlap_radius: f64,
}

/// `β̂ = π ρ̂(z) · E(O_nn/N | λ_n ≈ z)`.
pub fn estimate_beta(
    records: &[OverlapRecord],
    eigs_pool: &[Complex64],
    z: Complex64,
    overlap_radius: f64,
    density_radius: f64,
) -> Result<BetaEstimate> {
    let conditional_mean = conditional_overlap_mean(records, z, overlap_radius)?;
    let selected = near(records, z, overlap_radius)?.len();
    let rho = empirical_density(eigs_pool, z, density_radius)?;
    if rho.count == 0 {
        return Err(Error::EmptySelection(format!(
            "no eigenvalue within {density_radius} of {z}"
        )));
    }
    Ok(BetaEstimate {
        beta: std::f64::consts::PI * rho.value * conditional_mean,
        rho,
        conditional_mean,
        selected,
        overlap_radius,
    })
}

/// Writes records with columns `re,im,overlap,n,seed`.
pub fn write_overlaps_csv<W: Write>(w: W, records: &[OverlapRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["re", "im", "overlap", "n", "seed"])?;
    for r in records {
        out.write_record([
            format!("{:e}", r.eigenvalue.re),
            format!("{:e}", r.eigenvalue.im),
            format!("{:e}", r.self_overlap),
            r.n.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_overlaps_csv<R: Read>(r: R) -> Result<Vec<OverlapRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<&str> {
            rec.get(k)
                .ok_or_else(|| Error::Parse(format!("row {}: missing column {k}", line + 1)))
        };
        let num = |k: usize| -> Result<f64> {
            field(k)?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))
        };
        out.push(OverlapRecord {
            eigenvalue: Complex64::new(num(0)?, num(1)?),
            self_overlap: num(2)?,
            n: field(3)?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?,
            seed: field(4)?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?,
        });
    }
    Ok(out)
}

pub fn save_overlaps(path: &Path, records: &[OverlapRecord]) -> Result<()> {
    write_overlaps_csv(std::fs::File::create(path)?, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_ginibre, sample_gue, sample_haar_unitary};
    use crate::rng::SampleRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normal_matrices_have_unit_overlaps() {
        for m in [
            sample_gue(40, 1).unwrap(),
            sample_haar_unitary(40, 2).unwrap(),
        ] {
            let es = eigensystem(&m).unwrap();
            for r in self_overlaps(&es, 0) {
                assert!((r.self_overlap - 1.0).abs() < 1e-8, "{}", r.self_overlap);
            }
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        // eigenvectors (1,0) and (1,ε) with left rows (1,-1/ε), (0,1/ε)
        for &eps in &[0.5, 0.1, 0.01] {
            let m = ComplexMatrix::from_row_major(
                2,
                vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(eps, 0.0)],
            )
            .unwrap();
            let es = eigensystem(&m).unwrap();
            for r in self_overlaps(&es, 0) {
                let want = 1.0 + 1.0 / (eps * eps);
                assert!(
                    ((r.self_overlap - want) / want).abs() < 1e-10,
                    "eps={eps}: {}",
                    r.self_overlap
                );
            }
        }
    }

    #[test]
    fn ginibre_decomposition_residuals() {
        let m = sample_ginibre(200, 3).unwrap();
        let es = eigensystem(&m).unwrap();
        assert!(es.reconstruction_residual(&m) < 1e-8);
        assert!(es.completeness_residual() < 1e-8);
        assert!(es.biorthogonality_residual < 1e-8);
        assert!(self_overlaps(&es, 0)
            .iter()
            .all(|r| r.self_overlap >= 1.0 - 1e-9));
    }

    #[test]
    fn gauge_invariance() {
        let m = sample_ginibre(30, 4).unwrap();
        let es = eigensystem(&m).unwrap();
        let mut rng = SampleRng::new(5);
        let f: Vec<Complex64> = (0..30)
            .map(|_| rng.complex_gaussian(1.0) + c(0.1, 0.0))
            .collect();
        let a = self_overlaps(&es, 0);
        let b = self_overlaps(&es.regauge(&f), 0);
        for (x, y) in a.iter().zip(&b) {
            assert!(((x.self_overlap - y.self_overlap) / x.self_overlap).abs() < 1e-10);
        }
    }

    #[test]
    fn density_counting() {
        let eigs = sample_haar_unitary(50, 1)
            .unwrap()
            .to_faer()
            .eigenvalues()
            .unwrap();
        let d = empirical_density(&eigs, c(0.0, 0.0), 0.5).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.low_statistics);
        let far = empirical_density(&eigs, c(3.0, 0.0), 0.2).unwrap();
        assert_eq!(far.count, 0);
        assert!(empirical_density(&eigs, c(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn selection_errors() {
        let recs = vec![OverlapRecord {
            eigenvalue: c(0.1, 0.0),
            self_overlap: 3.0,
            n: 10,
            seed: 0,
        }];
        assert!(matches!(
            conditional_overlap_mean(&recs, c(0.9, 0.0), 0.1),
            Err(Error::EmptySelection(_))
        ));
        assert!((conditional_overlap_mean(&recs, c(0.0, 0.0), 0.2).unwrap() - 0.3).abs() < 1e-15);
        let s = conditional_overlap_samples(&recs, c(0.0, 0.0), 0.2).unwrap();
        assert!((s[0] - 3.0 / (10.0 * 0.99)).abs() < 1e-15);
        assert!(estimate_beta(&recs, &[c(0.1, 0.0)], c(5.0, 0.0), 0.1, 0.1).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let recs = vec![
            OverlapRecord {
                eigenvalue: c(0.1, -0.2),
                self_overlap: 3.5,
                n: 10,
                seed: 7,
            },
            OverlapRecord {
                eigenvalue: c(-0.4, 0.25),
                self_overlap: 1.0,
                n: 10,
                seed: u64::MAX,
            },
        ];
        let mut buf = Vec::new();
        write_overlaps_csv(&mut buf, &recs).unwrap();
        assert_eq!(read_overlaps_csv(buf.as_slice()).unwrap(), recs);
    }
}
