//! Dense complex matrices and their debug dump format.

use std::io::{Read, Write};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

const DUMP_MAGIC: &[u8; 8] = b"RLABMAT1";

/// Square complex matrix, row-major, 64-bit real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Wraps row-major entries; all must be finite.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} entries for N={n}, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Config("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn from_faer(m: faer::MatRef<'_, Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let prod = self.to_faer() * rhs.to_faer();
        Self::from_faer(prod.as_ref())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Writes `{magic, N, variant id, seed}` followed by interleaved re/im doubles,
    /// all little-endian.
    pub fn write_dump<W: Write>(&self, mut w: W, variant_id: u32, seed: u64) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&variant_id.to_le_bytes())?;
        w.write_all(&seed.to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`write_dump`](Self::write_dump); returns the matrix, variant id and seed.
    pub fn read_dump<R: Read>(mut r: R) -> Result<(Self, u32, u64)> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Parse("not a matrix dump (bad magic)".into()));
        }
        let mut b8 = [0u8; 8];
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b4)?;
        let variant = u32::from_le_bytes(b4);
        r.read_exact(&mut b8)?;
        let seed = u64::from_le_bytes(b8);
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            let im = f64::from_le_bytes(b8);
            data.push(Complex64::new(re, im));
        }
        Ok((Self::from_row_major(n, data)?, variant, seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_small() {
        let a = ComplexMatrix::from_row_major(
            2,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let b = ComplexMatrix::from_row_major(
            2,
            vec![c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let p = a.matmul(&b);
        assert_eq!(p.get(0, 0), c(0.0, 2.0));
        assert_eq!(p.get(0, 1), c(1.0, 0.0));
        assert_eq!(p.get(1, 0), c(0.0, 2.0));
        assert_eq!(p.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn dump_roundtrip() {
        let m = ComplexMatrix::from_fn(3, |i, j| c(i as f64 - 0.5, j as f64 * 1e-3));
        let mut buf = Vec::new();
        m.write_dump(&mut buf, 4, 99).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 4 + 8 + 9 * 16);
        let (back, v, s) = ComplexMatrix::read_dump(buf.as_slice()).unwrap();
        assert_eq!((back, v, s), (m, 4, 99));
        assert!(ComplexMatrix::read_dump(&b"garbage!........"[..]).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ComplexMatrix::from_row_major(1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::from_row_major(2, vec![c(0.0, 0.0)]).is_err());
    }
}
