//! Petersson inner products by quadrature over the standard fundamental
//! domain `F = {|x| ≤ 1/2, |τ| ≥ 1}` with the measure `dx dy / y²`
//! (no volume normalization).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precision, Result};
use crate::kernel::r_k;
use crate::lfunction::{central_values, coefficient_ratio};
use crate::qexpansion::Eigenform;
use crate::specfun::upper_incomplete_gamma;
use crate::value::ValueWithError;

const EPS: f64 = f64::EPSILON;

/// Largest `|f(τ)|` truncation error tolerated at the lowest point of `F`.
const MAX_TRUNCATION: f64 = 1e-12;

/// Tensor Gauss–Legendre layout: `x_nodes` across the strip, `y_nodes` per
/// unit-height panel of `[1, y_cutoff]` and across the arc region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub x_nodes: usize,
    pub y_nodes: usize,
    pub y_cutoff: f64,
}

impl QuadratureSpec {
    pub fn new(x_nodes: usize, y_nodes: usize, y_cutoff: f64) -> Result<Self> {
        if x_nodes < 8 || y_nodes < 8 {
            return domain(format!("need at least 8 nodes per axis, got ({x_nodes}, {y_nodes})"));
        }
        if !(y_cutoff >= 3.0) || !y_cutoff.is_finite() {
            return domain(format!("y_cutoff must be >= 3, got {y_cutoff}"));
        }
        Ok(Self { x_nodes, y_nodes, y_cutoff })
    }

    fn halved(&self) -> Self {
        Self {
            x_nodes: (self.x_nodes / 2).max(4),
            y_nodes: (self.y_nodes / 2).max(4),
            y_cutoff: self.y_cutoff,
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { x_nodes: 40, y_nodes: 24, y_cutoff: 4.0 }
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    // (P_n(x), P_n′(x)) by the three-term recurrence
    let legendre = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        for j in 2..=n {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        let (p, pm) = if n == 1 { (x, 1.0) } else { (p1, p0) };
        (p, n as f64 * (x * p - pm) / (x * x - 1.0))
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, dp) = legendre(x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

fn map(rule: &[(f64, f64)], a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let h = 0.5 * (b - a);
    rule.iter().map(move |&(t, w)| (a + h * (t + 1.0), h * w))
}

fn eval(f: &Eigenform, x: f64, y: f64) -> Complex64 {
    let q = Complex64::from_polar((-2.0 * PI * y).exp(), 2.0 * PI * x);
    let mut qn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for &a in f.coeffs() {
        qn *= q;
        sum += a * qn;
    }
    sum
}

/// Bound on `Σ_{n>N} |a_n||q|^n` at `y`, from `|a_n| ≤ 2C·n^{k/2}` with `C`
/// twice the largest ratio seen over the stored coefficients.
fn truncation_bound(f: &Eigenform, y: f64) -> Result<f64> {
    let c = 2.0 * coefficient_ratio(f);
    let r = (-2.0 * PI * y).exp();
    let n = (f.num_coeffs() + 1) as f64;
    let h = f.weight() as f64 / 2.0;
    let term = |n: f64| 2.0 * c * n.powf(h) * r.powf(n);
    let ratio = term(n + 1.0) / term(n);
    if !(ratio < 1.0) {
        return precision("too few coefficients for a convergent truncation bound");
    }
    Ok(term(n) / (1.0 - ratio))
}

/// `∫∫ f·conj(g)·y^k dx dy/y²` over `F ∩ {y ≤ y_cutoff}` by one tensor rule.
fn integrate(f: &Eigenform, g: &Eigenform, spec: &QuadratureSpec) -> (f64, f64) {
    let k = f.weight() as i32;
    let gx = gauss_legendre(spec.x_nodes);
    let gy = gauss_legendre(spec.y_nodes);
    let integrand = |x: f64, y: f64| (eval(f, x, y) * eval(g, x, y).conj()).re * y.powi(k - 2);
    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut add = |v: f64| {
        total += v;
        abs_total += v.abs();
    };
    // arc region: y from √(1 − x²) to 1
    for (x, wx) in map(&gx, -0.5, 0.5) {
        for (y, wy) in map(&gy, (1.0 - x * x).sqrt(), 1.0) {
            add(wx * wy * integrand(x, y));
        }
    }
    // box [−1/2, 1/2] × [1, y_cutoff] in unit panels; the integrand is a
    // trigonometric polynomial in x there, so x uses the periodic midpoint rule
    let nx = spec.x_nodes;
    let mut lo = 1.0;
    while lo < spec.y_cutoff {
        let hi = (lo + 1.0).min(spec.y_cutoff);
        for (y, wy) in map(&gy, lo, hi) {
            for j in 0..nx {
                let (x, wx) = (-0.5 + (j as f64 + 0.5) / nx as f64, 1.0 / nx as f64);
                add(wx * wy * integrand(x, y));
            }
        }
        lo = hi;
    }
    (total, abs_total)
}

/// The region `y > Y`, where the x-integral is exact:
/// `Σ a_n b_n Γ(k−1, 4πnY)/(4πn)^{k−1}` over the stored coefficients.
pub fn cusp_tail(f: &Eigenform, g: &Eigenform, y_cutoff: f64) -> Result<ValueWithError> {
    let k = f.weight() as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut abs_total = 0.0;
    for (i, (a, b)) in f.coeffs().iter().zip(g.coeffs()).enumerate() {
        let x = 4.0 * PI * (i + 1) as f64;
        let gam = upper_incomplete_gamma(k - 1.0, x * y_cutoff)?;
        let scale = a * b / x.powf(k - 1.0);
        total += scale * gam.value;
        abs_total += (scale * gam.value).abs();
        err += scale.abs() * gam.abs_err;
    }
    Ok(ValueWithError::new(total, err + 8.0 * EPS * abs_total))
}

/// `Σ |a_n b_n| Γ(k−1, 4πnY)/(4πn)^{k−1}`, the largest change that moving
/// the cutoff above `Y` can make.
pub fn cusp_tail_bound(f: &Eigenform, g: &Eigenform, y_cutoff: f64) -> Result<f64> {
    let k = f.weight() as f64;
    let mut total = 0.0;
    for (i, (a, b)) in f.coeffs().iter().zip(g.coeffs()).enumerate() {
        let x = 4.0 * PI * (i + 1) as f64;
        let gam = upper_incomplete_gamma(k - 1.0, x * y_cutoff)?;
        total += (a * b).abs() * gam.hi() / x.powf(k - 1.0);
    }
    Ok(total * (1.0 + 1e-12))
}

/// `(f, g)` for two forms of the same weight with real coefficients.
pub fn petersson_inner(f: &Eigenform, g: &Eigenform, spec: &QuadratureSpec) -> Result<ValueWithError> {
    QuadratureSpec::new(spec.x_nodes, spec.y_nodes, spec.y_cutoff)?;
    if f.weight() != g.weight() {
        return domain("inner product of forms of different weights");
    }
    let low = 3f64.sqrt() / 2.0;
    let (tf, tg) = (truncation_bound(f, low)?, truncation_bound(g, low)?);
    if tf.max(tg) >= MAX_TRUNCATION {
        return precision(format!(
            "q-series truncation error {:e} at y = √3/2 exceeds {MAX_TRUNCATION:e}",
            tf.max(tg)
        ));
    }
    let (fine, abs_fine) = integrate(f, g, spec);
    let (coarse, _) = integrate(f, g, &spec.halved());
    let tail = cusp_tail(f, g, spec.y_cutoff)?;
    // |f ḡ − f_N ḡ_N| ≤ tf|g| + tg|f| + tf·tg; |f|, |g| bounded by Σ|a_n||q|^n
    let sup = |h: &Eigenform| -> f64 {
        let r = (-2.0 * PI * low).exp();
        h.coeffs().iter().enumerate().map(|(i, a)| a.abs() * r.powi(i as i32 + 1)).sum()
    };
    let area = 1.0 * (spec.y_cutoff - low);
    let ymax = spec.y_cutoff.max(1.0).powi(f.weight() as i32 - 2);
    let trunc = (tf * sup(g) + tg * sup(f) + tf * tg) * ymax * area;
    let err = (fine - coarse).abs() + 64.0 * EPS * abs_fine + trunc;
    Ok(ValueWithError::new(fine, err).add(&tail))
}

/// `‖f‖² = (f, f)`.
pub fn petersson_norm_sq(f: &Eigenform, spec: &QuadratureSpec) -> Result<ValueWithError> {
    petersson_inner(f, f, spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleCheck {
    pub k: u32,
    /// `r_k(1)` from the kernel series.
    pub lhs: ValueWithError,
    /// `Σ_f L(f, k/2)/‖f‖²` over the normalized eigenforms.
    pub rhs: ValueWithError,
    pub ratio: ValueWithError,
}

/// Compares `r_k(1)` with `Σ_f L(f, k/2)/‖f‖²`.
pub fn triangle_check(k: u32, eps: f64, spec: &QuadratureSpec) -> Result<TriangleCheck> {
    if k % 4 != 0 || !(12..=28).contains(&k) {
        return domain(format!("triangle check needs k = 0 mod 4 in [12, 28], got {k}"));
    }
    let lhs = r_k(k, 1, eps)?.value;
    let mut rhs = ValueWithError::exact(0.0);
    for (f, l) in central_values(k, eps)? {
        let norm = petersson_norm_sq(&f, spec)?;
        rhs = rhs.add(&l.div(&norm));
    }
    if !rhs.excludes_zero() {
        return precision(format!("eigenform side of weight {k} does not exclude zero: {rhs}"));
    }
    let ratio = lhs.div(&rhs);
    Ok(TriangleCheck { k, lhs, rhs, ratio })
}
