//! Exact evaluation of the density of S_n (the sum of n independent copies
//! of a product of correlated normal variables), together with numeric
//! tail/CDF by quadrature and quantiles by safeguarded Newton iteration.
//!
//! Two independent representations of the density are provided: a double
//! series in confluent hypergeometric U-functions and a family of integral
//! representations with Bessel-I kernels. Negative arguments are always
//! evaluated by the reflection (x, ρ, r_Y) → (−x, −ρ, −r_Y).

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{self, SpecFunConfig, UGrid};
use statrs::function::gamma::{gamma, ln_gamma};
use std::cell::RefCell;

/// Distribution parameters: means, standard deviations, correlation, and
/// the number of summands.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DistParams {
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub rho: f64,
    pub n: u32,
}

impl DistParams {
    pub fn new(mu_x: f64, mu_y: f64, sigma_x: f64, sigma_y: f64, rho: f64, n: u32) -> Result<Self> {
        if !(sigma_x > 0.0) || !sigma_x.is_finite() {
            return Err(Error::Parameter(format!("sigma_x must be positive, got {sigma_x}")));
        }
        if !(sigma_y > 0.0) || !sigma_y.is_finite() {
            return Err(Error::Parameter(format!("sigma_y must be positive, got {sigma_y}")));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::Parameter(format!("rho must lie in (-1, 1), got {rho}")));
        }
        if !mu_x.is_finite() || !mu_y.is_finite() {
            return Err(Error::Parameter("means must be finite".into()));
        }
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        Ok(DistParams { mu_x, mu_y, sigma_x, sigma_y, rho, n })
    }

    /// Standard unit-variance parameters (σ_X = σ_Y = 1).
    pub fn standard(mu_x: f64, mu_y: f64, rho: f64, n: u32) -> Result<Self> {
        DistParams::new(mu_x, mu_y, 1.0, 1.0, rho, n)
    }

    /// Parameters of −S_n: the distribution of S_n evaluated at −x equals
    /// that of the reflected parameters at x.
    pub fn reflected(&self) -> Self {
        DistParams { mu_y: -self.mu_y, rho: -self.rho, ..*self }
    }
}

/// Quantities derived from the raw parameters.
#[derive(Debug, Clone, Copy)]
pub struct DerivedParams {
    pub r_x: f64,
    pub r_y: f64,
    pub s: f64,
    pub c_n: f64,
}

pub fn derive(p: &DistParams) -> DerivedParams {
    let r_x = p.mu_x / p.sigma_x;
    let r_y = p.mu_y / p.sigma_y;
    let s = p.sigma_x * p.sigma_y;
    let n = p.n as f64;
    let q = r_x * r_x + r_y * r_y - 2.0 * p.rho * r_x * r_y;
    let c_n = (-n * q / (2.0 * (1.0 - p.rho * p.rho))).exp();
    DerivedParams { r_x, r_y, s, c_n }
}

/// ln C_n, kept separate to avoid underflow of C_n itself.
fn ln_c_n(p: &DistParams, d: &DerivedParams) -> f64 {
    let n = p.n as f64;
    let q = d.r_x * d.r_x + d.r_y * d.r_y - 2.0 * p.rho * d.r_x * d.r_y;
    -n * q / (2.0 * (1.0 - p.rho * p.rho))
}

/// Evaluation-accuracy knobs.
#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    /// Cap on the outer series index.
    pub series_k_max: usize,
    /// Relative accuracy target for series truncation and quadrature.
    pub quad_rel_tol: f64,
    /// Absolute floor below which contributions are ignored.
    pub quad_abs_tol: f64,
    /// Decay margin (in e-foldings) for semi-infinite domain truncation.
    pub tail_cut: f64,
    /// Special-function evaluation policy.
    pub specfun: SpecFunConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            series_k_max: 50,
            quad_rel_tol: 1e-10,
            quad_abs_tol: 1e-300,
            tail_cut: 50.0,
            specfun: SpecFunConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.series_k_max == 0 {
            return Err(Error::Parameter("series_k_max must be positive".into()));
        }
        if !(self.quad_rel_tol > 0.0) || !(self.quad_abs_tol > 0.0) || !(self.tail_cut > 0.0) {
            return Err(Error::Parameter("tolerances must be positive".into()));
        }
        self.specfun.validate()
    }
}

/// Per-evaluation intermediates of the integral representations, exposed
/// for cross-checks.
#[derive(Debug, Clone, Copy)]
pub struct ExactPdfWorkspace {
    pub sgn_x: i32,
    /// ln D_1(x) when |r_x| ≠ |r_y| (general representation).
    pub ln_d1: Option<f64>,
    /// ln D_2(x) when r_x = r_y ≠ 0.
    pub ln_d2: Option<f64>,
    /// ln D_3(x) when r_x = −r_y ≠ 0.
    pub ln_d3: Option<f64>,
}

pub fn workspace(p: &DistParams, x: f64) -> ExactPdfWorkspace {
    let (p, x) = if x < 0.0 { (p.reflected(), -x) } else { (*p, x) };
    let d = derive(&p);
    let n = p.n as f64;
    let rho = p.rho;
    let s = d.s;
    let (mut ln_d1, mut ln_d2, mut ln_d3) = (None, None, None);
    if x > 0.0 {
        if d.r_x * d.r_x != d.r_y * d.r_y {
            ln_d1 = Some(
                ln_c_n(&p, &d) - (s * (1.0 - rho * rho)).ln()
                    + (1.0 - n / 2.0) * ((n / 4.0).ln() + (d.r_x * d.r_x - d.r_y * d.r_y).abs().ln())
                    + n / 2.0 * (x / s).ln()
                    - x / (s * (1.0 + rho)),
            );
        } else if d.r_x == d.r_y && d.r_x != 0.0 {
            ln_d2 = Some(
                (2.0 - n) / 4.0 * n.ln() + (1.0 - n / 2.0) * d.r_x.abs().ln()
                    - s.ln() - n / 2.0 * (1.0 - rho).ln() - (1.0 + rho).ln() - ln_gamma(n / 2.0)
                    + (3.0 * n - 2.0) / 4.0 * (x / s).ln()
                    - n * d.r_x * d.r_x / (1.0 + rho)
                    - x / (s * (1.0 + rho)),
            );
        } else if d.r_x == -d.r_y && d.r_x != 0.0 {
            ln_d3 = Some(
                (2.0 - n) / 4.0 * n.ln() + (1.0 - n / 2.0) * d.r_x.abs().ln()
                    - s.ln() - n / 2.0 * (1.0 + rho).ln() - (1.0 - rho).ln() - ln_gamma(n / 2.0)
                    + (3.0 * n - 2.0) / 4.0 * (x / s).ln()
                    - n * d.r_x * d.r_x / (1.0 - rho)
                    - x / (s * (1.0 + rho)),
            );
        }
    }
    ExactPdfWorkspace { sgn_x: if x > 0.0 { 1 } else { 0 }, ln_d1, ln_d2, ln_d3 }
}

/// Replacement point for x = 0 when the density is finite there (n ≥ 2).
const ZERO_EPS: f64 = 1e-12;

fn handle_zero(p: &DistParams) -> Result<f64> {
    if p.n == 1 {
        Err(Error::Singular(
            "density of the product has a logarithmic singularity at x = 0".into(),
        ))
    } else {
        Ok(ZERO_EPS)
    }
}

// ---------------------------------------------------------------------------
// Series representation
// ---------------------------------------------------------------------------

/// Density via the series representations: the closed Bessel-K form for
/// r_x = r_y = 0 and the U-function double series otherwise (which
/// collapses to a single series when r_x ∓ r_y = 0).
pub fn pdf_series(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if x == 0.0 {
        return pdf_series(p, handle_zero(p)?, cfg);
    }
    if x < 0.0 {
        return pdf_series(&p.reflected(), -x, cfg);
    }
    let d = derive(p);
    if d.r_x == 0.0 && d.r_y == 0.0 {
        return pdf_central(p, &d, x, cfg);
    }
    let n = p.n as f64;
    let rho = p.rho;
    let s = d.s;
    let omr2 = 1.0 - rho * rho;
    let z = 2.0 * x / (s * omr2);
    // Weight growth factors for the j (difference) and m (sum) directions,
    // with the (n/8)^k shell factor folded in.
    let wd = (1.0 + rho) / (1.0 - rho) * (d.r_x - d.r_y).powi(2) * n * z / 8.0;
    let ws = (1.0 - rho) / (1.0 + rho) * (d.r_x + d.r_y).powi(2) * n * z / 8.0;
    let mut grid = UGrid::new(n / 2.0, z, 1e-12, cfg.specfun)?;
    // a_j = wd^j / (j! Γ(n/2+j)), b_m = ws^m / (m! Γ(n/2+m)).
    let kcap = cfg.series_k_max;
    let mut a = Vec::with_capacity(kcap + 1);
    let mut b = Vec::with_capacity(kcap + 1);
    a.push(1.0 / gamma(n / 2.0));
    b.push(1.0 / gamma(n / 2.0));
    for i in 0..kcap {
        let i = i as f64;
        a.push(a.last().unwrap() * wd / ((i + 1.0) * (n / 2.0 + i)));
        b.push(b.last().unwrap() * ws / ((i + 1.0) * (n / 2.0 + i)));
    }
    let mut total = 0.0;
    let mut below = 0;
    let mut converged = false;
    for k in 0..=kcap {
        let mut shell = 0.0;
        for j in 0..=k {
            let m = k - j;
            if (a[j] == 0.0 && j > 0) || (b[m] == 0.0 && m > 0) {
                continue;
            }
            shell += a[j] * b[m] * grid.gamma_u(j, m)?;
        }
        total += shell;
        if shell <= cfg.quad_rel_tol * total {
            below += 1;
            if below >= 3 {
                converged = true;
                break;
            }
        } else {
            below = 0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "density series not converged by k = {kcap} at x = {x}"
        )));
    }
    let ln_pref = (n / 2.0 - 1.0) * omr2.ln() + ln_c_n(p, &d)
        - (n - 1.0) * std::f64::consts::LN_2
        - s.ln()
        - x / (s * (1.0 + rho))
        + (n - 1.0) * z.ln();
    Ok(ln_pref.exp() * total)
}

/// Closed form for r_x = r_y = 0.
fn pdf_central(p: &DistParams, d: &DerivedParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    let n = p.n as f64;
    let s = d.s;
    let omr2 = 1.0 - p.rho * p.rho;
    let w = x.abs() / (s * omr2);
    let ks = specfun::bessel_k_scaled((n - 1.0) / 2.0, w, &cfg.specfun)?;
    // Constant (1/2)^{(n−1)/2}: follows from the U-function form via the
    // Kummer transform and the U–K relation, and is fixed by the n = 2
    // Laplace special case (difference of two unit-rate gammas).
    let ln_a = (n - 1.0) / 2.0 * (0.5f64.ln() + x.abs().ln()) - (n + 1.0) / 2.0 * s.ln()
        - 0.5 * (std::f64::consts::PI * omr2).ln()
        - ln_gamma(n / 2.0);
    // e^{ρx/(s(1−ρ²))} K = e^{ρx/(s(1−ρ²)) − w} (e^w K); the exponent is
    // −|x|/(s(1+ρ sgn x)).
    let expo = p.rho * x / (s * omr2) - w;
    Ok((ln_a + expo).exp() * ks)
}

/// Density of the product Z (n = 1) via the Bessel-K double series.
/// Exists as an independent cross-check of `pdf_series`.
pub fn pdf_cui(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if p.n != 1 {
        return Err(Error::Parameter("pdf_cui is defined for n = 1 only".into()));
    }
    if x == 0.0 {
        return Err(Error::Singular(
            "density of the product has a logarithmic singularity at x = 0".into(),
        ));
    }
    if x < 0.0 {
        return pdf_cui(&p.reflected(), -x, cfg);
    }
    let d = derive(p);
    let rho = p.rho;
    let s = d.s;
    let omr2 = 1.0 - rho * rho;
    let w = x / (s * omr2);
    // Bessel K of integer orders 0..=k_max+1 by upward recurrence
    // (stable: K grows with the order).
    let kcap = cfg.series_k_max;
    let mut kv = Vec::with_capacity(kcap + 1);
    kv.push(specfun::bessel_k(0.0, w, &cfg.specfun)?);
    kv.push(specfun::bessel_k(1.0, w, &cfg.specfun)?);
    for m in 1..kcap {
        let next = kv[m - 1] + 2.0 * m as f64 / w * kv[m];
        kv.push(next);
    }
    let u = d.r_x - rho * d.r_y;
    let v = d.r_y - rho * d.r_x;
    let mut sum = 0.0;
    let mut fact2k = 1.0; // (2k)!
    let mut below = 0;
    let mut converged = false;
    for k in 0..kcap {
        if k > 0 {
            fact2k *= (2 * k - 1) as f64 * (2 * k) as f64;
        }
        let base = x.powi(k as i32) / (fact2k * s.powi(k as i32) * omr2.powi(2 * k as i32));
        let mut shell = 0.0;
        for j in 0..=(2 * k) {
            let ord = (j as i64 - k as i64).unsigned_abs() as usize;
            shell += specfun::gen_binom(2.0 * k as f64, j as u32)
                * u.powi(j as i32)
                * v.powi((2 * k - j) as i32)
                * kv[ord];
        }
        sum += base * shell;
        if (base * shell).abs() <= cfg.quad_rel_tol * sum.abs() {
            below += 1;
            if below >= 3 {
                converged = true;
                break;
            }
        } else {
            below = 0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "product-density series not converged by k = {kcap} at x = {x}"
        )));
    }
    let pref = d.c_n / (std::f64::consts::PI * omr2.sqrt()) * (rho * x / (s * omr2)).exp();
    Ok(pref * sum)
}

// ---------------------------------------------------------------------------
// Integral representation
// ---------------------------------------------------------------------------

/// Density via the Bessel-I integral representations. Not applicable when
/// r_x = r_y = 0 (use `pdf_series`).
pub fn pdf_integral(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if x == 0.0 {
        return pdf_integral(p, handle_zero(p)?, cfg);
    }
    if x < 0.0 {
        return pdf_integral(&p.reflected(), -x, cfg);
    }
    let d = derive(p);
    let n = p.n as f64;
    let rho = p.rho;
    let s = d.s;
    if d.r_x == 0.0 && d.r_y == 0.0 {
        return Err(Error::Domain(
            "integral representation not applicable for r_x = r_y = 0".into(),
        ));
    }
    let ws = workspace(p, x);
    let beta = 2.0 * x / (s * (1.0 - rho * rho));
    let nu = n / 2.0 - 1.0;
    let sf = cfg.specfun;
    // (c1, c2, q1, q2, ln_pref): kernel exp(q1 ln t + q2 ln(1+t) − βt)
    // × I_ν(c1 √t) I_ν(c2 √(1+t)), with a vanishing c meaning that Bessel
    // factor is absent.
    let (c1, c2, q1, q2, ln_d) = if let Some(ld1) = ws.ln_d1 {
        let c1 = (d.r_x - d.r_y).abs() * (n * x).sqrt() / ((1.0 - rho) * s.sqrt());
        let c2 = (d.r_x + d.r_y).abs() * (n * x).sqrt() / ((1.0 + rho) * s.sqrt());
        (c1, c2, (n - 2.0) / 4.0, (n - 2.0) / 4.0, ld1)
    } else if let Some(ld2) = ws.ln_d2 {
        let c2 = 2.0 * d.r_x.abs() * (n * x).sqrt() / ((1.0 + rho) * s.sqrt());
        (0.0, c2, (n - 2.0) / 2.0, (n - 2.0) / 4.0, ld2)
    } else {
        let ld3 = ws.ln_d3.unwrap();
        let c1 = 2.0 * d.r_x.abs() * (n * x).sqrt() / ((1.0 - rho) * s.sqrt());
        (c1, 0.0, (n - 2.0) / 4.0, (n - 2.0) / 2.0, ld3)
    };
    // The factor e^{c2} from I_ν(c2 √(1+t)) at t = 0 is pulled out so the
    // integrand stays O(1).
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mut expo = q1 * t.ln() + q2 * t.ln_1p() - beta * t;
        let mut fac = 1.0;
        if c1 > 0.0 {
            let u1 = c1 * t.sqrt();
            expo += u1;
            match specfun::bessel_i_scaled(nu, u1, &sf) {
                Ok(v) => fac *= v,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    return 0.0;
                }
            }
        }
        if c2 > 0.0 {
            let u2 = c2 * (1.0 + t).sqrt();
            expo += u2 - c2;
            match specfun::bessel_i_scaled(nu, u2, &sf) {
                Ok(v) => fac *= v,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    return 0.0;
                }
            }
        }
        expo.exp() * fac
    };
    // Domain truncation: past t_max the exponent is at least tail_cut
    // e-foldings below the integrand's peak bound (c1+c2)²/(4β).
    let qp = q1.max(0.0) + q2.max(0.0);
    let peak = (c1 + c2).powi(2) / (4.0 * beta);
    let mut t_max = (cfg.tail_cut + peak) / beta;
    for _ in 0..6 {
        t_max = (cfg.tail_cut + peak + c1 * t_max.sqrt() + c2 * ((1.0 + t_max).sqrt() - 1.0)
            + qp * t_max.ln_1p())
            / beta;
    }
    t_max = t_max.max(4.0 / beta);
    let integral = if p.n % 2 == 1 {
        // Odd n: t = u² renders the integrand analytic at the origin.
        let g = |u: f64| 2.0 * u * integrand(u * u);
        quad::adaptive(&g, 0.0, t_max.sqrt(), cfg.quad_rel_tol, cfg.quad_abs_tol, 4000)?
    } else {
        quad::adaptive(&integrand, 0.0, t_max, cfg.quad_rel_tol, cfg.quad_abs_tol, 4000)?
    };
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok((ln_d + c2).exp() * integral)
}

/// Density dispatcher: series first, integral representation as fallback.
pub fn pdf(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    match pdf_series(p, x, cfg) {
        Ok(v) => Ok(v),
        Err(Error::NonConvergence(_)) => pdf_integral(p, x, cfg),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Tail, CDF, quantile
// ---------------------------------------------------------------------------

/// ∫_a^b pdf, propagating any evaluation error from inside the integrand.
fn integrate_pdf(p: &DistParams, a: f64, b: f64, cfg: &EvalConfig) -> Result<f64> {
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let f = |x: f64| match pdf(p, x, cfg) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let v = quad::adaptive(&f, a, b, cfg.quad_rel_tol.max(1e-11), cfg.quad_abs_tol, 4000)?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(v)
}

/// ∫_x^∞ pdf for x ≥ 0.
fn upper_tail(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    debug_assert!(x >= 0.0);
    let d = derive(p);
    let n = p.n as f64;
    // Density decays like x^m e^{−ax + b√x}.
    let a = 1.0 / (d.s * (1.0 + p.rho));
    let b = (d.r_x + d.r_y).abs() * n.sqrt() / ((1.0 + p.rho) * d.s.sqrt());
    let m = n / 2.0 + 2.0;
    let mut t = cfg.tail_cut / a;
    for _ in 0..8 {
        t = (cfg.tail_cut + b * ((x + t).sqrt() - x.sqrt()) + m * ((x + t + 2.0) / (x + 1.0)).ln())
            / a;
    }
    integrate_pdf(p, x, x + t, cfg)
}

/// Tail probability P(S_n ≥ x).
pub fn tail(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if x >= 0.0 {
        upper_tail(p, x, cfg)
    } else {
        Ok(1.0 - upper_tail(&p.reflected(), -x, cfg)?)
    }
}

/// CDF P(S_n ≤ x).
pub fn cdf(p: &DistParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(1.0 - tail(p, x, cfg)?)
}

/// Quantile by root-finding on the tail, optionally seeded with an
/// approximate starting point.
pub fn quantile_numeric_seeded(
    p: &DistParams,
    prob: f64,
    cfg: &EvalConfig,
    seed: Option<f64>,
) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Parameter(format!("probability must lie in (0,1), got {prob}")));
    }
    let q = 1.0 - prob;
    let t0 = upper_tail(p, 0.0, cfg)?;
    if (q - t0).abs() <= 1e-12 {
        return Ok(0.0);
    }
    if q < t0 {
        solve_upper(p, q, cfg, seed.filter(|s| *s > 0.0))
    } else {
        // Negative quantile: solve on the reflected upper side.
        let y = solve_upper(&p.reflected(), prob, cfg, seed.map(|s| -s).filter(|s| *s > 0.0))?;
        Ok(-y)
    }
}

pub fn quantile_numeric(p: &DistParams, prob: f64, cfg: &EvalConfig) -> Result<f64> {
    quantile_numeric_seeded(p, prob, cfg, None)
}

/// Solve upper_tail(x) = q for x > 0 by bracketed Newton iteration on
/// ln tail. Tail updates between iterates use incremental quadrature.
fn solve_upper(p: &DistParams, q: f64, cfg: &EvalConfig, seed: Option<f64>) -> Result<f64> {
    let d = derive(p);
    let tol = 1e-9f64.min(1e-12 + 1e-7 * q);
    let mut x = seed.unwrap_or(d.s);
    let mut t = upper_tail(p, x, cfg)?;
    // Establish a bracket [lo, hi] with tail(lo) ≥ q ≥ tail(hi).
    let (mut lo, mut hi);
    if t >= q {
        lo = x;
        let mut step = d.s.max(x);
        loop {
            let x2 = x + step;
            t = (t - integrate_pdf(p, x, x2, cfg)?).max(0.0);
            x = x2;
            if t < q {
                hi = x;
                break;
            }
            lo = x;
            step *= 2.0;
            if x > 1e8 * d.s {
                return Err(Error::NonConvergence(format!(
                    "quantile bracketing failed: tail still above {q} at x = {x}"
                )));
            }
        }
    } else {
        hi = x;
        loop {
            let x2 = 0.5 * x;
            t += integrate_pdf(p, x2, x, cfg)?;
            x = x2;
            if t >= q {
                lo = x;
                break;
            }
            hi = x;
            if x < 1e-10 * d.s {
                return Err(Error::NonConvergence(
                    "quantile bracketing failed near zero".into(),
                ));
            }
        }
    }
    for _ in 0..100 {
        if (t - q).abs() <= tol {
            return Ok(x);
        }
        if t >= q {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let f = pdf(p, x, cfg)?;
        let mut x_new = if f > 0.0 && t > 0.0 {
            x + t * (t / q).ln() / f
        } else {
            0.5 * (lo + hi)
        };
        if !(x_new > lo && x_new < hi) {
            x_new = 0.5 * (lo + hi);
        }
        // Incremental tail update over the short interval.
        let delta = if x_new >= x {
            -integrate_pdf(p, x, x_new, cfg)?
        } else {
            integrate_pdf(p, x_new, x, cfg)?
        };
        t = (t + delta).max(0.0);
        x = x_new;
        if hi - lo <= f64::EPSILON * hi.abs() {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence(format!(
        "quantile iteration did not reach |tail - q| <= {tol}"
    )))
}
