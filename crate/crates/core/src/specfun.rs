//! Special functions with error contracts.
//!
//! Bessel values come from the ascending series. For the arguments the
//! kernel needs (`x = nπ/m`, order `ν ≥ 11/2`) the series is short and
//! alternating, so the first omitted term bounds the truncation error once the
//! terms are shown to be decreasing. When `x ≥ ν` the series cancels badly and
//! the upward recurrence from `J_{±1/2}` is used as well; the smaller error
//! bound wins.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, precision, Result};
use crate::value::ValueWithError;

const EPS: f64 = f64::EPSILON;

/// Largest argument accepted by [`bessel_j`].
pub const MAX_BESSEL_ARG: f64 = 32.0;

/// Largest `s` accepted by [`upper_incomplete_gamma`].
pub const MAX_INCOMPLETE_GAMMA_S: f64 = 60.0;

/// A half-integer order `ν = twice_nu / 2` with `twice_nu` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfIntOrder {
    twice_nu: u32,
}

impl HalfIntOrder {
    pub fn new(twice_nu: u32) -> Result<Self> {
        if twice_nu % 2 == 0 {
            return domain(format!("half-integer order needs odd twice_nu, got {twice_nu}"));
        }
        Ok(Self { twice_nu })
    }

    /// `ν = (k − 1)/2` for even weight `k`.
    pub fn for_weight(k: u32) -> Result<Self> {
        if k % 2 != 0 || k < 2 {
            return domain(format!("weight must be even and >= 2, got {k}"));
        }
        Self::new(k - 1)
    }

    pub fn twice_nu(&self) -> u32 {
        self.twice_nu
    }

    pub fn nu(&self) -> f64 {
        self.twice_nu as f64 / 2.0
    }

    /// `ν = r + 1/2`.
    fn floor(&self) -> u32 {
        (self.twice_nu - 1) / 2
    }
}

/// `(x/2)^ν / Γ(ν + 1)` as a product of `r + 1` factors, `ν = r + 1/2`.
fn leading_term(nu: HalfIntOrder, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut t = h.sqrt() * 2.0 / PI.sqrt();
    for j in 1..=nu.floor() {
        t *= h / (j as f64 + 0.5);
    }
    t
}

/// Upward recurrence `J_{μ+1} = (2μ/x)·J_μ − J_{μ−1}` from the elementary
/// `J_{1/2}` and `J_{−1/2}`, with errors propagated in absolute value.
fn bessel_recurrence(nu: HalfIntOrder, x: f64) -> ValueWithError {
    let pre = (2.0 / (PI * x)).sqrt();
    let (s, c) = x.sin_cos();
    // |x| ≤ 32, so sin and cos are within a couple of ulps
    let mut prev = (pre * c, 4.0 * EPS * pre);
    let mut cur = (pre * s, 4.0 * EPS * pre);
    for j in 0..nu.floor() {
        let mu = j as f64 + 0.5;
        let f = 2.0 * mu / x;
        let next = f * cur.0 - prev.0;
        let err = f * cur.1 + prev.1 + 3.0 * EPS * (f * cur.0.abs() + prev.0.abs());
        prev = cur;
        cur = (next, err);
    }
    ValueWithError::new(cur.0, cur.1)
}

/// `J_ν(x)` for half-integer `ν` and `0 < x ≤ 32`.
pub fn bessel_j(nu: HalfIntOrder, x: f64) -> Result<ValueWithError> {
    if !(x > 0.0) {
        return domain(format!("bessel_j needs x > 0, got {x}"));
    }
    if x > MAX_BESSEL_ARG {
        return domain(format!("bessel_j argument {x} exceeds {MAX_BESSEL_ARG}"));
    }
    let series = bessel_series(nu, x)?;
    if x >= nu.nu() {
        let rec = bessel_recurrence(nu, x);
        if rec.abs_err < series.abs_err {
            return Ok(rec);
        }
    }
    Ok(series)
}

fn bessel_series(nu: HalfIntOrder, x: f64) -> Result<ValueWithError> {
    let v = nu.nu();
    let h2 = 0.25 * x * x;
    let mut term = leading_term(nu, x);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    // each term carries at most (r + 2 + 3j) roundings relative to itself
    let mut rounding = 0.0;
    for j in 0..1000u32 {
        sum += term;
        abs_sum += term.abs();
        rounding += (nu.floor() as f64 + 3.0 + 3.0 * j as f64) * EPS * term.abs();
        let ratio = h2 / ((j as f64 + 1.0) * (v + j as f64 + 1.0));
        let next = -term * ratio;
        // ratio decreases in j, so once below 1 every later term shrinks and
        // the alternating remainder is bounded by `next`
        if ratio < 1.0 && next.abs() <= 1e-3 * EPS * abs_sum {
            return Ok(ValueWithError::new(sum, next.abs() + rounding + EPS * sum.abs()));
        }
        term = next;
    }
    precision(format!("bessel_j series did not settle for nu={v}, x={x}"))
}

/// The power envelope `(x/2)^ν / Γ(ν + 1)`, an upper bound for `|J_ν(x)|`
/// when `x ≥ 0`.
pub fn bessel_envelope(nu: HalfIntOrder, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_envelope needs x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    leading_term(nu, x)
}

/// The same envelope for `ν = (k − 1)/2` written through factorials:
/// `√(2/π) · (k/2)!/k! · 2^(k/2) · x^((k−1)/2)`.
pub fn bessel_envelope_factorial_form(k: u32, x: f64) -> Result<f64> {
    if k % 2 != 0 || k < 2 {
        return domain(format!("weight must be even and >= 2, got {k}"));
    }
    if x < 0.0 {
        return domain("bessel envelope needs x >= 0");
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let log = 0.5 * (2.0 / PI).ln() + log_gamma(kf / 2.0 + 1.0)? - log_gamma(kf + 1.0)?
        + (kf / 2.0) * 2f64.ln()
        + 0.5 * (kf - 1.0) * x.ln();
    Ok(log.exp())
}

const LANCZOS_R: f64 = 10.900511;

const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, &dk)| s + dk / (x + i as f64 - 1.0))
}

/// `ln Γ(x)` for `x > 0` (Lanczos approximation).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma needs finite x > 0, got {x}"));
    }
    if x < 0.5 {
        return Ok(log_gamma(x + 1.0)? - x.ln());
    }
    Ok(LN_2_SQRT_E_OVER_PI
        + lanczos_sum(x).ln()
        + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / E).ln())
}

/// `Γ(x)` for `0 < x < 171` with an estimate of its relative error.
///
/// Integers and half-integers go through exact-factor products; everything
/// else through a Taylor series on `[1, 2)` and the recurrence.
pub(crate) fn gamma_with_rel_err(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || x >= 171.0 {
        return domain(format!("gamma needs 0 < x < 171, got {x}"));
    }
    if x.fract() == 0.0 {
        let n = x as u32;
        let value: f64 = (2..n).map(|j| j as f64).product();
        // factorials up to 18! are exact in binary64
        let rel = if n <= 19 { 0.0 } else { 0.5 * (n - 19) as f64 * EPS };
        return Ok((value, rel));
    }
    if (x - 0.5).fract() == 0.0 {
        let r = (x - 0.5) as u32;
        let value = PI.sqrt() * (0..r).map(|j| j as f64 + 0.5).product::<f64>();
        return Ok((value, (r as f64 + 1.0) * EPS));
    }
    // Γ(x) = Γ(1 + z) · Π (x − 1 − j) with z = frac(x); 1/Γ(1 + z) by its
    // Taylor series, whose absolute terms sum to at most 2.5 on [0, 1)
    let z = x.fract();
    let core = 1.0 / RECIP_GAMMA_TAYLOR.iter().rev().fold(0.0, |acc, c| acc * z + c);
    let steps = x.floor() as i64 - 1;
    if steps < 0 {
        return Ok((core / z, 6.0 * EPS));
    }
    let value = (0..steps).fold(core, |acc, j| acc * (z + 1.0 + j as f64));
    Ok((value, (5.0 + 1.5 * steps as f64) * EPS))
}

/// Coefficients of `1/Γ(1 + z) = Σ c_j z^j`.
const RECIP_GAMMA_TAYLOR: [f64; 30] = [
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
    1.18669225475160033258e-18,
    1.412380655318031781556e-18,
    -2.298745684435370206592e-19,
    1.714406321927337433384e-20,
];

/// `Γ(x)` for `0 < x < 171`.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(gamma_with_rel_err(x)?.0)
}

/// `x^s e^(−x)` and its relative error.
fn power_exp(s: f64, x: f64) -> (f64, f64) {
    let direct = x.powf(s) * (-x).exp();
    if direct.is_normal() {
        (direct, 3.0 * EPS)
    } else {
        let arg = s * x.ln() - x;
        (arg.exp(), (2.0 * (s * x.ln()).abs() + x + 2.0) * EPS)
    }
}

/// Lower incomplete gamma `γ(s, x)` by its power series, for `x < s + 1`.
fn lower_series(s: f64, x: f64) -> Result<ValueWithError> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    let mut err = EPS * del;
    for j in 1..10_000u32 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        // each term has 2j + 1 roundings, plus one for the running sum
        err += (2.0 * j as f64 + 2.0) * EPS * del;
        if del < 1e-3 * EPS * sum {
            let (pre, pre_rel) = power_exp(s, x);
            let value = pre * sum;
            let abs_err = pre * (err + del) + value * (pre_rel + EPS);
            return Ok(ValueWithError::new(value, abs_err));
        }
    }
    precision(format!("lower incomplete gamma series failed for s={s}, x={x}"))
}

/// Continued fraction for `Γ(s, x)`, for `x ≥ s + 1` (modified Lentz).
fn upper_continued_fraction(s: f64, x: f64) -> Result<ValueWithError> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000u32 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 0.5 * EPS {
            let (pre, pre_rel) = power_exp(s, x);
            let value = pre * h;
            let rel = pre_rel + (i as f64 + 4.0) * EPS;
            return Ok(ValueWithError::new(value, rel * value));
        }
    }
    precision(format!("incomplete gamma continued fraction failed for s={s}, x={x}"))
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^(s−1) e^(−t) dt` for
/// `0 < s ≤ 60`, `x > 0`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<ValueWithError> {
    if !(s > 0.0) || !(x > 0.0) || !x.is_finite() {
        return domain(format!("upper_incomplete_gamma needs s > 0 and x > 0, got ({s}, {x})"));
    }
    if s > MAX_INCOMPLETE_GAMMA_S {
        return domain(format!("upper_incomplete_gamma supports s <= 60, got {s}"));
    }
    if x >= s + 1.0 {
        return upper_continued_fraction(s, x);
    }
    let (g, g_rel) = gamma_with_rel_err(s)?;
    let lower = lower_series(s, x)?;
    let value = g - lower.value;
    let abs_err = g * g_rel + lower.abs_err + EPS * (g + value.abs());
    Ok(ValueWithError::new(value, abs_err))
}
