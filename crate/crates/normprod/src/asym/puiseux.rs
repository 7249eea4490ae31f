//! Puiseux-series coefficients g_{i,j}(a,b): the coefficient of u^i y^{j/2}
//! in (1+uy)^a exp(b y^{−1/2}(√(1+uy) − 1)), computed by truncated
//! formal-series composition with polynomial-in-u coefficients.

use crate::specfun::gen_binom;

/// Triangular table of g_{i,j}(a,b) for 0 ≤ j ≤ max_j, ⌈j/2⌉ ≤ i ≤ j.
#[derive(Debug, Clone)]
pub struct PuiseuxTable {
    pub a: f64,
    pub b: f64,
    pub max_j: usize,
    /// rows[j][i] = g_{i,j}; entries outside the band are zero.
    rows: Vec<Vec<f64>>,
}

impl PuiseuxTable {
    /// g_{i,j}, zero outside the stored band.
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.rows.get(j).and_then(|r| r.get(i)).copied().unwrap_or(0.0)
    }
}

/// Multiply two u-polynomials, truncating at degree cap.
fn poly_mul(p: &[f64], q: &[f64], cap: usize) -> Vec<f64> {
    let len = (p.len() + q.len() - 1).min(cap + 1);
    let mut out = vec![0.0; len];
    for (i, &pi) in p.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (k, &qk) in q.iter().enumerate() {
            if i + k < len {
                out[i + k] += pi * qk;
            }
        }
    }
    out
}

fn poly_axpy(acc: &mut Vec<f64>, scale: f64, p: &[f64]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (i, &pi) in p.iter().enumerate() {
        acc[i] += scale * pi;
    }
}

pub fn puiseux_g(a: f64, b: f64, max_j: usize) -> PuiseuxTable {
    assert!(max_j <= 40, "puiseux_g: max_j capped at 40");
    // Grade everything in powers of y^{1/2}. The exponent's series is
    // b y^{-1/2}(√(1+uy)−1) = Σ_{m≥1} b·C(1/2, m) u^m y^{(2m−1)/2},
    // so grade t = 2m−1 carries the monomial b·C(1/2,m) u^m.
    let mut e: Vec<Vec<f64>> = vec![Vec::new(); max_j + 1];
    let mut m = 1usize;
    while 2 * m - 1 <= max_j {
        let mut p = vec![0.0; m + 1];
        p[m] = b * gen_binom(0.5, m as u32);
        e[2 * m - 1] = p;
        m += 1;
    }
    // exp of a graded series: f_0 = 1, f_t = (1/t) Σ_{r=1}^{t} r e_r f_{t−r}.
    let mut f: Vec<Vec<f64>> = vec![Vec::new(); max_j + 1];
    f[0] = vec![1.0];
    for t in 1..=max_j {
        let mut acc: Vec<f64> = Vec::new();
        for r in 1..=t {
            if e[r].is_empty() || f[t - r].is_empty() {
                continue;
            }
            let prod = poly_mul(&e[r], &f[t - r], max_j);
            poly_axpy(&mut acc, r as f64 / t as f64, &prod);
        }
        f[t] = acc;
    }
    // Multiply by (1+uy)^a = Σ_i C(a,i) u^i y^i (grade 2i, monomial u^i).
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(max_j + 1);
    for j in 0..=max_j {
        let mut row: Vec<f64> = Vec::new();
        let mut i2 = 0usize;
        while 2 * i2 <= j {
            let c = gen_binom(a, i2 as u32);
            let base = &f[j - 2 * i2];
            for (k, &bk) in base.iter().enumerate() {
                let deg = k + i2;
                if row.len() <= deg {
                    row.resize(deg + 1, 0.0);
                }
                row[deg] += c * bk;
            }
            i2 += 1;
        }
        row.truncate(j + 1);
        rows.push(row);
    }
    PuiseuxTable { a, b, max_j, rows }
}
