//! Inverse-CDF sampling for positive laws known only through their density.
//!
//! The table lives in `y = ln t`, where both the power-law right tails and the
//! essential singularities at `t → 0` of the variance laws become smooth.

use crate::error::{Error, Result};

const QUANTILE_LO: f64 = 1e-12;
const QUANTILE_HI: f64 = 1.0 - 1e-12;
const DEFAULT_NODES: usize = 4096;
const MAX_NODES: usize = 1 << 16;
const TAIL_DROP: f64 = 60.0;

// 15-point Kronrod rule on [-1, 1], used for fixed per-cell integrals.
const KX: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KW: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

fn cell_integral<F: Fn(f64) -> f64>(q: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = KW[7] * q(c);
    for j in 0..7 {
        s += KW[j] * (q(c - h * KX[j]) + q(c + h * KX[j]));
    }
    s * h
}

/// Tabulated quantile function of a positive random variable.
#[derive(Debug, Clone)]
pub struct TabulatedLaw {
    /// `ln t` at the nodes (uniform spacing).
    y: Vec<f64>,
    /// CDF at the nodes.
    cdf: Vec<f64>,
    /// Normalized density of `y` at the nodes.
    dens: Vec<f64>,
    left_rate: f64,
    right_rate: f64,
}

impl TabulatedLaw {
    /// Builds the table from `ln p(t)`, the (possibly unnormalized) log density of `t`.
    pub fn from_log_pdf<F: Fn(f64) -> f64>(log_pdf: F) -> Result<Self> {
        Self::with_nodes(log_pdf, DEFAULT_NODES)
    }

    pub fn with_nodes<F: Fn(f64) -> f64>(log_pdf: F, nodes: usize) -> Result<Self> {
        let log_q = |y: f64| {
            let v = log_pdf(y.exp()) + y;
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };

        // coarse scan for the mode of the y-density
        let (mut best_y, mut best) = (0.0, f64::NEG_INFINITY);
        let mut y = -80.0;
        while y <= 80.0 {
            let v = log_q(y);
            if v > best {
                best = v;
                best_y = y;
            }
            y += 0.01;
        }
        if !best.is_finite() {
            return Err(Error::Unsupported(
                "density vanishes on the whole scan range".into(),
            ));
        }
        // golden-section polish of the mode
        let (mut a, mut b) = (best_y - 0.01, best_y + 0.01);
        let gr = 0.618_033_988_749_894_8;
        for _ in 0..60 {
            let c = b - gr * (b - a);
            let d = a + gr * (b - a);
            if log_q(c) > log_q(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let mode = 0.5 * (a + b);
        let peak = log_q(mode).max(best);

        // bracket where the density is within e^{-TAIL_DROP} of its peak
        let find_edge = |dir: f64| {
            let mut step = 0.01;
            let mut y = mode;
            for _ in 0..10_000 {
                let next = y + dir * step;
                if log_q(next) < peak - TAIL_DROP || next.abs() > 700.0 {
                    return next;
                }
                y = next;
                step = (step * 1.1).min(1.0);
            }
            y
        };
        let lo = find_edge(-1.0);
        let hi = find_edge(1.0);

        let q = |y: f64| (log_q(y) - peak).exp();

        // first pass: fine cumulative over the full bracket
        let cells = 16_384;
        let h = (hi - lo) / cells as f64;
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(0.0);
        for i in 0..cells {
            let a = lo + i as f64 * h;
            let prev = *cum.last().unwrap();
            cum.push(prev + cell_integral(&q, a, a + h));
        }
        let total = *cum.last().unwrap();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Unsupported(
                "density is not integrable on its bracket".into(),
            ));
        }
        let locate = |p: f64| -> f64 {
            let target = p * total;
            let k = cum.partition_point(|&c| c < target).clamp(1, cells);
            let (c0, c1) = (cum[k - 1], cum[k]);
            let frac = if c1 > c0 {
                (target - c0) / (c1 - c0)
            } else {
                0.5
            };
            lo + (k as f64 - 1.0 + frac) * h
        };
        let y_a = locate(QUANTILE_LO);
        let y_b = locate(QUANTILE_HI);
        let mass_below = {
            // exact mass below y_a: cumulative up to its cell plus the partial cell
            let k = (((y_a - lo) / h).floor() as usize).min(cells - 1);
            cum[k] + cell_integral(&q, lo + k as f64 * h, y_a)
        };

        let mut nodes = nodes.max(16);
        loop {
            let law = Self::assemble(&q, total, mass_below, y_a, y_b, nodes, &log_q);
            if law.self_check(&q, total) < 1e-3 || nodes >= MAX_NODES {
                return Ok(law);
            }
            nodes *= 2;
        }
    }

    fn assemble<Q: Fn(f64) -> f64, L: Fn(f64) -> f64>(
        q: &Q,
        total: f64,
        mass_below: f64,
        y_a: f64,
        y_b: f64,
        nodes: usize,
        log_q: &L,
    ) -> Self {
        let h = (y_b - y_a) / (nodes - 1) as f64;
        let y: Vec<f64> = (0..nodes).map(|i| y_a + i as f64 * h).collect();
        let mut cdf = Vec::with_capacity(nodes);
        let mut acc = mass_below;
        cdf.push(acc / total);
        for i in 1..nodes {
            acc += cell_integral(q, y[i - 1], y[i]);
            cdf.push((acc / total).min(1.0));
        }
        let dens: Vec<f64> = y.iter().map(|&v| q(v) / total).collect();
        let eps = 1e-4;
        let left_rate = ((log_q(y_a + eps) - log_q(y_a)) / eps).max(1e-3);
        let right_rate = (-(log_q(y_b) - log_q(y_b - eps)) / eps).max(1e-3);
        Self {
            y,
            cdf,
            dens,
            left_rate,
            right_rate,
        }
    }

    /// Largest CDF error of the interpolated quantile function at cell midpoints.
    fn self_check<Q: Fn(f64) -> f64>(&self, q: &Q, total: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let stride = (self.y.len() / 512).max(1);
        for k in (0..self.y.len() - 1).step_by(stride) {
            let u = 0.5 * (self.cdf[k] + self.cdf[k + 1]);
            let y = self.quantile_y(u);
            let exact = self.cdf[k] + cell_integral(q, self.y[k], y) / total;
            worst = worst.max((exact - u).abs());
        }
        worst
    }

    /// Quantile of `ln t` at probability `u ∈ (0, 1)`.
    pub fn quantile_y(&self, u: f64) -> f64 {
        let n = self.y.len();
        let f0 = self.cdf[0];
        let fk = self.cdf[n - 1];
        if u <= f0 {
            return self.y[0] + (u / f0).ln() / self.left_rate;
        }
        if u >= fk {
            let tail = 1.0 - fk;
            return self.y[n - 1] - ((1.0 - u) / tail).ln() / self.right_rate;
        }
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, n - 1) - 1;
        let (f_a, f_b) = (self.cdf[k], self.cdf[k + 1]);
        let (y_a, y_b) = (self.y[k], self.y[k + 1]);
        let df = f_b - f_a;
        if df <= 0.0 {
            return y_a;
        }
        let secant = (y_b - y_a) / df;
        // Hermite cubic of y(F) with exact slopes 1/density, limited for monotonicity
        let slope = |d: f64| {
            if d > 0.0 {
                (1.0 / d).min(3.0 * secant)
            } else {
                3.0 * secant
            }
        };
        let (m_a, m_b) = (slope(self.dens[k]), slope(self.dens[k + 1]));
        let s = (u - f_a) / df;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y_a + h10 * df * m_a + h01 * y_b + h11 * df * m_b
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.quantile_y(u).exp()
    }

    /// Table CDF at `t`, linearly interpolated in `ln t`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let y = t.ln();
        let n = self.y.len();
        if y <= self.y[0] {
            return self.cdf[0] * (self.left_rate * (y - self.y[0])).exp();
        }
        if y >= self.y[n - 1] {
            return 1.0 - (1.0 - self.cdf[n - 1]) * (-self.right_rate * (y - self.y[n - 1])).exp();
        }
        let h = self.y[1] - self.y[0];
        let pos = (y - self.y[0]) / h;
        let k = (pos.floor() as usize).min(n - 2);
        let frac = pos - k as f64;
        self.cdf[k] + frac * (self.cdf[k + 1] - self.cdf[k])
    }

    pub fn nodes(&self) -> usize {
        self.y.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_law_quantiles() {
        // t ~ Exp(1): ln p = -t
        let law = TabulatedLaw::from_log_pdf(|t| -t).unwrap();
        for &u in &[1e-9, 1e-4, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-9] {
            let t = law.quantile(u);
            let exact = -(1.0f64 - u).ln();
            assert!(((t - exact) / exact).abs() < 1e-3, "u={u}: {t} vs {exact}");
        }
    }

    #[test]
    fn heavy_tail_law_quantiles() {
        // inverse gamma(1, 1): cdf e^{-1/t}
        let law = TabulatedLaw::from_log_pdf(|t| -2.0 * t.ln() - 1.0 / t).unwrap();
        for &u in &[1e-6, 0.2, 0.5, 0.99, 0.999_999] {
            let t = law.quantile(u);
            let exact = -1.0 / u.ln();
            assert!(((t - exact) / exact).abs() < 1e-4, "u={u}: {t} vs {exact}");
            assert!((law.cdf(exact) - u).abs() < 1e-5);
        }
    }

    #[test]
    fn quantile_monotone() {
        let law = TabulatedLaw::from_log_pdf(|t| 3.0 * t.ln() - 2.0 * t).unwrap();
        let mut prev = 0.0;
        for i in 1..20_000 {
            let t = law.quantile(i as f64 / 20_000.0);
            assert!(t > prev);
            prev = t;
        }
    }
}
