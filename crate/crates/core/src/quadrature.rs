//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Integrates `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    const MAX_SEGMENTS: usize = 20_000;
    const INITIAL_SEGMENTS: usize = 8;
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    // a uniform starting partition keeps narrow features from slipping between nodes
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    let h = (b - a) / INITIAL_SEGMENTS as f64;
    for i in 0..INITIAL_SEGMENTS {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == INITIAL_SEGMENTS { b } else { lo + h };
        let (v, e) = gk15(&mut f, lo, hi);
        total += v;
        total_err += e;
        heap.push(Segment {
            a: lo,
            b: hi,
            value: v,
            error: e,
        });
    }
    let mut evals = 15 * INITIAL_SEGMENTS;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::InsufficientData(format!(
                "quadrature did not converge: estimate {total} with error {total_err}"
            )));
        }
        let seg = heap.pop().expect("non-empty");
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval no longer splittable in floating point
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        evals += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed accumulated rounding from the running updates
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let abs_error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        abs_error,
        evaluations: evals,
    })
}

/// Integrates `f` over `(0, ∞)` through the substitution `t = u / (1 - u)`.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    integrate(
        |u| {
            let one_minus = 1.0 - u;
            if one_minus <= 0.0 {
                return 0.0;
            }
            let t = u / one_minus;
            let v = f(t) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Integrates `f` over `(a, ∞)` through `t = a + u / (1 - u)`.
pub fn integrate_upper<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    integrate_half_line(|t| f(a + t), abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special;

    #[test]
    fn polynomials_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, -1.0, 3.0, 1e-12, 0.0).unwrap();
        assert!((r.value - (81.0 / 4.0 - 9.0 - 0.25 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn half_line_exponential() {
        let r = integrate_half_line(|t| (-t).exp(), 1e-12, 0.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn sharp_peak() {
        // narrow Gaussian centred off-grid
        let s = 1e-2;
        let r = integrate(
            |x| {
                (-(x - 0.3137) * (x - 0.3137) / (2.0 * s * s)).exp()
                    / (s * (2.0 * std::f64::consts::PI).sqrt())
            },
            0.0,
            1.0,
            1e-10,
            0.0,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn erfc_matches_quadrature() {
        // erfc(x) = (2/√(2π)) ∫_{x√2}^∞ e^{-v²/2} dv
        for &x in &[std::f64::consts::FRAC_1_SQRT_2, 0.0, 0.25, 1.5, 3.0] {
            let r = integrate_upper(
                |v| (-0.5 * v * v).exp(),
                x * std::f64::consts::SQRT_2,
                1e-15,
                1e-14,
            )
            .unwrap();
            let oracle = 2.0 * r.value / (2.0 * std::f64::consts::PI).sqrt();
            assert!((special::erfc(x) - oracle).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn gaussian_tail_matches_quadrature() {
        for &alpha in &[-1.0, 0.0, 0.5, 2.0] {
            let r = integrate_upper(|v| (-0.5 * v * v).exp(), alpha, 1e-15, 1e-14).unwrap();
            let oracle = r.value / (2.0 * std::f64::consts::PI).sqrt();
            assert!(
                (special::gaussian_upper_tail(alpha) - oracle).abs() < 1e-13,
                "alpha={alpha}"
            );
        }
    }
}
