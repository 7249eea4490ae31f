//! Adaptive Gauss-Kronrod quadrature used by the special-function and
//! density kernels.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

// 7-15 Gauss-Kronrod pair (QUADPACK abscissae/weights).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_27,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7-15 pass over [a, b]; returns (integral, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fc.abs() * WGK[7];
    for i in 0..7 {
        let x = h * XGK[i];
        let f1 = f(c - x);
        let f2 = f(c + x);
        let sum = f1 + f2;
        res_k += WGK[i] * sum;
        res_abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            res_g += WG[i / 2] * sum;
        }
    }
    let integral = res_k * h;
    let raw = ((res_k - res_g) * h).abs();
    // QUADPACK-style rescaling keeps the estimate meaningful once the
    // integrand is nearly resolved.
    let scale = (200.0 * raw / (res_abs * h.abs()).max(f64::MIN_POSITIVE)).powf(1.5);
    let err = if scale < 1.0 { res_abs * h.abs() * scale } else { raw };
    (integral, err.max(50.0 * f64::EPSILON * integral.abs()))
}

#[derive(PartialEq)]
struct Interval {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl Eq for Interval {}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Adaptive quadrature of `f` over the finite interval [a, b].
///
/// Subdivides the interval with the largest error estimate until the
/// accumulated estimate satisfies `max(abs_tol, rel_tol * |integral|)`.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (val, err) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval { err, a, b, val });
    let mut total = val;
    let mut total_err = err;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::NonConvergence(format!(
                "quadrature on [{a}, {b}] stalled at {} panels (err {:.3e}, value {:.6e})",
                heap.len(),
                total_err,
                total
            )));
        }
        let worst = heap.pop().expect("heap nonempty while error positive");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution; keep its estimate and move on.
            let mut kept = worst;
            kept.err = 0.0;
            heap.push(kept);
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Interval { err: e1, a: worst.a, b: mid, val: v1 });
        heap.push(Interval { err: e2, a: mid, b: worst.b, val: v2 });
    }
    Ok(total)
}

/// Adaptive quadrature of `f` over (0, ∞) for integrands with exponential
/// decay scale `decay` (integrand negligible beyond ~`t_max`).
///
/// The caller supplies `t_max` past which the integrand is below the
/// absolute tolerance; the domain is split into geometric panels so the
/// subdivision heap starts near the mass of the integrand.
pub fn adaptive_semi_inf<F: Fn(f64) -> f64>(
    f: &F,
    t_max: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    // Seed panels: [0,1], [1,2], [2,4], ... up to t_max.
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64.min(t_max);
    loop {
        let (v, e) = gk15(f, lo, hi);
        total += v;
        total_err += e;
        heap.push(Interval { err: e, a: lo, b: hi, val: v });
        if hi >= t_max {
            break;
        }
        lo = hi;
        hi = (hi * 2.0).min(t_max);
    }
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::NonConvergence(format!(
                "semi-infinite quadrature stalled at {} panels (err {:.3e})",
                heap.len(),
                total_err
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            let mut kept = worst;
            kept.err = 0.0;
            heap.push(kept);
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Interval { err: e1, a: worst.a, b: mid, val: v1 });
        heap.push(Interval { err: e2, a: mid, b: worst.b, val: v2 });
    }
    Ok(total)
}
