//! Fourier coefficients of the kernel `R_k` and the non-vanishing
//! certificate for `r_k(1)`.
//!
//! `r_k(n) = P_k(n)·ρ_k(n)` with the positive prefactor
//! `P_k(n) = 4(2π)^{k/2}(8π)^{k/2−1}/(k−2)!·n^{k/2−1}` and the bracket
//!
//! ```text
//! ρ_k(n) = 1 + (−1)^{k/4} √(2π) Σ_{m≥1} γ_n(m) √(nπ/m) J_{(k−1)/2}(nπ/m)
//! ```
//!
//! where `γ_n(m)` uses [`InverseConvention::Coupled`]. Everything that
//! matters for the sign lives in `ρ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, precision, Error, Result};
use crate::ntheory::{gamma_sum_with, zeta, InverseConvention};
use crate::specfun::{bessel_envelope, bessel_j, HalfIntOrder, MAX_BESSEL_ARG};
use crate::value::ValueWithError;

const EPS: f64 = f64::EPSILON;

/// Smallest target error accepted by [`r_k`].
pub const MIN_EPS: f64 = 1e-14;
pub const MIN_WEIGHT: u32 = 12;
pub const MAX_WEIGHT: u32 = 40;
/// Hard cap on the number of bracket terms.
const MAX_TERMS: u64 = 5_000_000;

/// A real number as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    pub sign: i8,
    pub log_abs: f64,
}

impl SignedLog {
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }
}

/// Sign of a certified quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Positive,
    #[serde(rename = "-1")]
    Negative,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl Sign {
    pub fn of(v: &ValueWithError) -> Self {
        if !v.excludes_zero() {
            Sign::Undetermined
        } else if v.value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Positive => "+1",
            Sign::Negative => "-1",
            Sign::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCoefficient {
    pub k: u32,
    pub n: u64,
    /// The normalized bracket `ρ_k(n)`.
    pub rho: ValueWithError,
    /// `ln P_k(n)`.
    pub log_prefactor: f64,
    /// `r_k(n)`.
    pub value: ValueWithError,
    pub terms_used: u64,
    /// Certified bound on the omitted terms `m > terms_used`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: u32,
    pub rho: ValueWithError,
    pub per_k_bound: f64,
    pub global_bound: f64,
    pub nonvanishing: bool,
    pub sign: Sign,
    pub log_prefactor: f64,
    pub terms_used: u64,
}

fn check_weight(k: u32) -> Result<()> {
    if k % 4 != 0 || k < MIN_WEIGHT {
        return domain(format!("weight must be a multiple of 4 and >= 12, got {k}"));
    }
    Ok(())
}

fn check_kernel_weight(k: u32) -> Result<()> {
    check_weight(k)?;
    if k > MAX_WEIGHT {
        return domain(format!("weight {k} is above the supported maximum {MAX_WEIGHT}"));
    }
    Ok(())
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

/// `c_k = (−1)^{k/4}(8π)^{k/2−1}Γ(k/2)/Γ(k−1)`.
pub fn c_k(k: u32) -> Result<SignedLog> {
    check_weight(k)?;
    let sign = if (k / 4) % 2 == 0 { 1 } else { -1 };
    let log_abs = (k / 2 - 1) as f64 * (8.0 * PI).ln() + ln_factorial(k / 2 - 1)
        - ln_factorial(k - 2);
    Ok(SignedLog { sign, log_abs })
}

/// `P_k(n)` evaluated directly, with a relative error bound.
fn prefactor(k: u32, n: u64) -> (f64, f64) {
    let h = (k / 2) as i32;
    let mut p = 4.0 * (2.0 * PI).powi(h) * (8.0 * PI).powi(h - 1);
    for j in 2..=k - 2 {
        p /= j as f64;
    }
    p *= (n as f64).powi(h - 1);
    (p, (3 * k as u64 + 10) as f64 * EPS)
}

/// `ln P_k(n)`.
pub fn log_prefactor(k: u32, n: u64) -> Result<f64> {
    check_weight(k)?;
    if n == 0 {
        return domain("coefficient index must be >= 1");
    }
    let h = (k / 2) as f64;
    Ok(4f64.ln() + h * (2.0 * PI).ln() + (h - 1.0) * (8.0 * PI).ln() - ln_factorial(k - 2)
        + (h - 1.0) * (n as f64).ln())
}

fn bracket_sign(k: u32) -> f64 {
    if (k / 4) % 2 == 0 { 1.0 } else { -1.0 }
}

fn check_index(n: u64) -> Result<f64> {
    if n == 0 {
        return domain("coefficient index must be >= 1");
    }
    let x = n as f64 * PI;
    if x > MAX_BESSEL_ARG {
        return domain(format!(
            "n = {n} puts the Bessel argument nπ above {MAX_BESSEL_ARG}"
        ));
    }
    Ok(x)
}

/// The `m`-th bracket term `γ_n(m)·√(nπ/m)·J_{(k−1)/2}(nπ/m)` (without the
/// `(−1)^{k/4}√(2π)` factor).
pub fn bracket_term(k: u32, n: u64, m: u64) -> Result<ValueWithError> {
    check_weight(k)?;
    let x = check_index(n)? / m.max(1) as f64;
    if m == 0 {
        return domain("m must be >= 1");
    }
    let nu = HalfIntOrder::for_weight(k)?;
    let gamma = gamma_sum_with(n, m, InverseConvention::Coupled)?;
    let j = bessel_j(nu, x)?;
    let root = x.sqrt();
    let v = gamma * root * j.value;
    // γ carries one rounded cosine per factor pair
    let gamma_err = 2.0 * EPS * gamma.abs().max(1.0) * crate::ntheory::divisor_count(m) as f64;
    let err = gamma.abs() * root * j.abs_err + gamma_err * root * j.value.abs() + 3.0 * EPS * v.abs();
    Ok(ValueWithError::new(v, err))
}

/// Certified bound on `Σ_{m>M} |γ_n(m)|√(nπ/m)|J_ν(nπ/m)|·√(2π)`.
///
/// Uses `|γ_n(m)| ≤ d(m) ≤ 2√m` and `|J_ν(x)| ≤ (x/2)^ν/Γ(ν+1)`, so term `m`
/// is at most `2A·m^{−ν}` with `A = √(nπ)(nπ/2)^ν/Γ(ν+1)`, and the tail is
/// at most `2A·M^{1−ν}/(ν−1)`.
pub fn tail_bound(k: u32, n: u64, m: u64) -> Result<f64> {
    check_weight(k)?;
    let x = check_index(n)?;
    if m == 0 {
        return domain("truncation point must be >= 1");
    }
    let nu = HalfIntOrder::for_weight(k)?;
    let a = x.sqrt() * bessel_envelope(nu, x);
    let v = nu.nu();
    let bound = (2.0 * PI).sqrt() * 2.0 * a * (m as f64).powf(1.0 - v) / (v - 1.0);
    Ok(bound * (1.0 + 1e-12))
}

/// `Σ_{m≤M}` of [`bracket_term`], summed from the smallest term up.
pub fn partial_bracket_sum(k: u32, n: u64, m_max: u64) -> Result<ValueWithError> {
    let terms = (1..=m_max)
        .map(|m| bracket_term(k, n, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_terms(&terms))
}

fn sum_terms(terms: &[ValueWithError]) -> ValueWithError {
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut partial_abs = 0.0;
    for t in terms.iter().rev() {
        sum += t.value;
        err += t.abs_err;
        partial_abs += sum.abs();
    }
    // each addition rounds once, relative to the partial sum it produces
    ValueWithError::new(sum, err + 1.01 * EPS * partial_abs)
}

/// Smallest `M` whose tail bound is below `target`.
fn truncation_point(k: u32, n: u64, target: f64) -> Result<u64> {
    let at_one = tail_bound(k, n, 1)?;
    let v = (k - 1) as f64 / 2.0;
    let guess = (at_one / target).powf(1.0 / (v - 1.0)).ceil().max(1.0);
    if guess > MAX_TERMS as f64 {
        return precision(format!("r_k({k}, {n}) would need more than {MAX_TERMS} terms"));
    }
    let mut m = (guess as u64).saturating_sub(2).max(1);
    while tail_bound(k, n, m)? >= target {
        m += 1;
    }
    Ok(m)
}

/// `r_k(n)` with `ρ` certified to absolute error below `eps`.
pub fn r_k(k: u32, n: u64, eps: f64) -> Result<KernelCoefficient> {
    check_kernel_weight(k)?;
    check_index(n)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return domain(format!("eps must be positive and finite, got {eps}"));
    }
    if eps < MIN_EPS {
        return precision(format!("eps = {eps:e} is below the attainable {MIN_EPS:e}"));
    }
    let m = truncation_point(k, n, eps / 2.0)?;
    let tail = tail_bound(k, n, m)?;
    let s = partial_bracket_sum(k, n, m)?;
    let scale = bracket_sign(k) * (2.0 * PI).sqrt();
    let shifted = s.value * scale;
    let rho_value = 1.0 + shifted;
    let float_err = s.abs_err * scale.abs() * (1.0 + 2.0 * EPS)
        + 2.0 * EPS * shifted.abs()
        + EPS * rho_value.abs();
    if float_err >= eps / 2.0 {
        return precision(format!(
            "accumulated floating error {float_err:e} exceeds eps/2 for k = {k}, n = {n}"
        ));
    }
    let rho = ValueWithError::new(rho_value, tail + float_err);
    let (p, p_rel) = prefactor(k, n);
    let value = ValueWithError::new(
        p * rho.value,
        p * rho.abs_err + p_rel * (p * rho.value).abs() + EPS * (p * rho.value).abs(),
    );
    Ok(KernelCoefficient {
        k,
        n,
        rho,
        log_prefactor: log_prefactor(k, n)?,
        value,
        terms_used: m,
        tail_bound: tail,
    })
}

/// `2(2π)^{k/2}·(k/2)!/k!·ζ(k/2)²`, an upper bound for `|ρ_k(1) − 1|`.
pub fn per_k_bound(k: u32) -> Result<f64> {
    check_weight(k)?;
    let z = zeta((k / 2) as f64)?;
    let log = 2f64.ln() + (k / 2) as f64 * (2.0 * PI).ln() + ln_factorial(k / 2)
        - ln_factorial(k)
        + 2.0 * z.hi().ln();
    Ok(log.exp())
}

/// `2(2π/7)(2π/8)^5·ζ(6)²`, a bound for every [`per_k_bound`] with
/// `k ≥ 12`.
pub fn global_bound() -> f64 {
    let z6 = PI.powi(6) / 945.0;
    2.0 * (2.0 * PI / 7.0) * (2.0 * PI / 8.0).powi(5) * z6 * z6
}

/// The intermediate step between [`per_k_bound`] and [`global_bound`]:
/// `2ζ(6)²·Π_{i=1}^{k/2} 2π/(k/2 + i)`, i.e. the per-weight bound with
/// `ζ(k/2)` relaxed to `ζ(6)`. Every factor is below `2π/8` except the
/// first (below `2π/7`), and factors past the sixth are below 1.
pub fn factorial_chain_bound(k: u32) -> Result<f64> {
    check_weight(k)?;
    let z6 = PI.powi(6) / 945.0;
    let h = k / 2;
    let mut p = 2.0 * z6 * z6;
    for i in 1..=h {
        p *= 2.0 * PI / (h + i) as f64;
    }
    Ok(p)
}

/// Certifies `r_k(1) ≠ 0` through `ρ_k(1)`, and checks the bracket against
/// [`per_k_bound`].
pub fn certify(k: u32, eps: f64) -> Result<Certificate> {
    check_kernel_weight(k)?;
    let rk = r_k(k, 1, eps)?;
    let bound = per_k_bound(k)?;
    let deviation = (rk.rho.value - 1.0).abs();
    if deviation > bound + rk.rho.abs_err {
        return Err(Error::BoundViolation(format!(
            "|rho - 1| = {deviation:e} exceeds per-k bound {bound:e} + {:e} at k = {k}",
            rk.rho.abs_err
        )));
    }
    let nonvanishing = rk.rho.excludes_zero();
    Ok(Certificate {
        k,
        rho: rk.rho,
        per_k_bound: bound,
        global_bound: global_bound(),
        nonvanishing,
        sign: Sign::of(&rk.rho),
        log_prefactor: rk.log_prefactor,
        terms_used: rk.terms_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // high-precision evaluations of the bracket at n = 1
    const RHO_12: f64 = 1.124_928_249_094_1;
    const RHO_16: f64 = 0.993_030_526_302_3;
    const RHO_20: f64 = 1.000_225_596_489_244;

    #[test]
    fn c_k_examples() {
        let c = c_k(12).unwrap();
        assert_eq!(c.sign, -1);
        let want = (8.0 * PI).powi(5) / 30240.0;
        assert!((c.to_f64() + want).abs() < 1e-13 * want);
        assert_eq!(c_k(16).unwrap().sign, 1);
        assert_eq!(c_k(20).unwrap().sign, -1);
        assert!(c_k(14).is_err());
    }

    #[test]
    fn bracket_values() {
        for (k, want) in [(12, RHO_12), (16, RHO_16), (20, RHO_20)] {
            let r = r_k(k, 1, 1e-12).unwrap();
            assert!(r.rho.abs_err < 1e-12);
            assert!((r.rho.value - want).abs() < 2e-12, "k={k}: {}", r.rho);
        }
    }

    #[test]
    fn k12_example() {
        let r = r_k(12, 1, 1e-10).unwrap();
        let b = per_k_bound(12).unwrap();
        assert!(r.rho.value > 0.0);
        assert!((r.rho.value - 1.0).abs() < b);
    }

    #[test]
    fn large_weights_are_near_one() {
        for k in (28..=40).step_by(4) {
            let r = r_k(k, 1, 1e-12).unwrap();
            assert!((r.rho.value - 1.0).abs() < 1e-3, "k={k}");
            assert!((r.rho.value - 1.0).abs() <= per_k_bound(k).unwrap());
        }
    }

    #[test]
    fn value_matches_prefactor_times_rho() {
        for k in (12..=40).step_by(4) {
            for n in [1, 2, 3] {
                let r = r_k(k, n, 1e-10).unwrap();
                let v = r.log_prefactor.exp() * r.rho.value;
                assert!((r.value.value - v).abs() <= 1e-12 * v.abs(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn first_term() {
        let nu = HalfIntOrder::for_weight(12).unwrap();
        for n in [1u64, 2, 3] {
            let x = n as f64 * PI;
            let j = bessel_j(nu, x).unwrap().value;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let t = bracket_term(12, n, 1).unwrap();
            assert!((t.value - sign * x.sqrt() * j).abs() < 1e-16);
        }
    }

    #[test]
    fn tail_bound_dominates_partial_sums() {
        for k in (12..=40).step_by(4) {
            for n in [1u64, 3] {
                for m in [5u64, 20, 60] {
                    let a = partial_bracket_sum(k, n, m).unwrap();
                    let b = partial_bracket_sum(k, n, 4 * m).unwrap();
                    let diff = (2.0 * PI).sqrt() * (b.value - a.value).abs();
                    assert!(diff <= tail_bound(k, n, m).unwrap(), "k={k} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn interval_honesty() {
        for k in (12..=40).step_by(4) {
            let coarse = r_k(k, 1, 1e-8).unwrap();
            let fine = r_k(k, 1, 1e-9).unwrap();
            assert!(coarse.rho.contains(fine.rho.value), "k={k}");
        }
    }

    #[test]
    fn weight_12_follows_tau() {
        // S_12 is spanned by Δ, so ρ_12(n) = ρ_12(1)·τ(n)/n^5
        let tau = [1.0, -24.0, 252.0, -1472.0, 4830.0, -6048.0, -16744.0, 84480.0, -113643.0, -115920.0];
        let rho1 = r_k(12, 1, 1e-10).unwrap().rho;
        for n in 2..=10u64 {
            let rho = r_k(12, n, 1e-10).unwrap().rho;
            let want = rho1.value * tau[n as usize - 1] / (n as f64).powi(5);
            assert!((rho.value - want).abs() < 1e-9, "n={n}: {} vs {want}", rho.value);
        }
    }

    #[test]
    fn domain_and_precision_errors() {
        assert!(matches!(r_k(14, 1, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(r_k(44, 1, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(r_k(12, 11, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(r_k(12, 0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(r_k(12, 1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(r_k(12, 1, 1e-15), Err(Error::Precision(_))));
        assert!(r_k(12, 1, MIN_EPS).is_ok());
        assert!(matches!(certify(14, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn bounds() {
        let b12 = per_k_bound(12).unwrap();
        let z6 = PI.powi(6) / 945.0;
        let direct = 2.0 * (2.0 * PI).powi(6) * 720.0 / 479_001_600.0 * z6 * z6;
        assert!((b12 - direct).abs() < 1e-14);
        assert!((b12 - 0.191_443_045).abs() < 1e-9);
        let g = global_bound();
        assert!((g - 0.555_259_613_1).abs() < 1e-9);
        assert!((1.0 - g - 0.4446).abs() < 1e-3);
        let mut prev = f64::INFINITY;
        for k in (12..=40).step_by(4) {
            let b = per_k_bound(k).unwrap();
            assert!(b < prev);
            assert!(b <= g);
            assert!(b <= factorial_chain_bound(k).unwrap() * (1.0 + 1e-12));
            assert!(factorial_chain_bound(k).unwrap() <= g * (1.0 + 1e-12));
            prev = b;
        }
        assert!((factorial_chain_bound(12).unwrap() - b12).abs() < 1e-14);
    }

    #[test]
    fn certificates() {
        for k in (12..=40).step_by(4) {
            let c = certify(k, 1e-12).unwrap();
            assert!(c.nonvanishing);
            assert_eq!(c.sign, Sign::Positive);
            assert!(c.rho.value >= 1.0 - c.per_k_bound - c.rho.abs_err);
        }
    }
}
