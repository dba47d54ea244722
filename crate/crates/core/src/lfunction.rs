//! Completed Hecke L-functions of level-one eigenforms.
//!
//! For `f = Σ a_n q^n` of weight `k` and `ε = (−1)^{k/2}`, splitting the Mellin
//! integral `Λ(s) = ∫_0^∞ f(iy) y^{s−1} dy` at `y = t` and folding the lower
//! half with `f(i/y) = ε y^k f(iy)` gives
//!
//! ```text
//! Λ(s) = Σ a_n [ (2πn)^{−s} Γ(s, 2πn·t) + ε (2πn)^{s−k} Γ(k−s, 2πn/t) ]
//! ```
//!
//! for every `t > 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, precision, Error, Result};
use crate::ntheory::divisor_count;
use crate::qexpansion::{eigenforms, Eigenform};
use crate::specfun::{gamma_with_rel_err, upper_incomplete_gamma};
use crate::value::ValueWithError;

const EPS: f64 = f64::EPSILON;

/// Fewest coefficients accepted by [`completed_l`].
pub const MIN_COEFFS: usize = 30;

/// Split used for the reflected side in [`functional_equation_residual`].
pub const RESIDUAL_SPLIT: f64 = 1.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub k: u32,
    pub s: f64,
    /// `Λ(f, s) = (2π)^{−s} Γ(s) L(f, s)`.
    pub completed: ValueWithError,
    /// `L(f, s)`.
    pub finite: ValueWithError,
    pub terms_used: usize,
}

fn root_number(k: u32) -> f64 {
    if (k / 2) % 2 == 0 { 1.0 } else { -1.0 }
}

/// Smallest `C` with `|a_n| ≤ C·d(n)·n^{(k−1)/2}` over the stored
/// coefficients.
pub fn coefficient_ratio(f: &Eigenform) -> f64 {
    let half = (f.weight() as f64 - 1.0) / 2.0;
    f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let n = (i + 1) as u64;
            a.abs() / (divisor_count(n) as f64 * (n as f64).powf(half))
        })
        .fold(0.0, f64::max)
}

/// [`coefficient_ratio`] for a normalized eigenform; fails if it exceeds 1.
pub fn coefficient_bound(f: &Eigenform) -> Result<f64> {
    let c = coefficient_ratio(f);
    if c > 1.0 + 1e-9 {
        return Err(Error::BoundViolation(format!(
            "coefficient bound constant {c} exceeds 1 in weight {}",
            f.weight()
        )));
    }
    Ok(c)
}

/// Bound on `Σ_{n>N} |a_n|(2πn)^{−a}Γ(a, 2πnτ)` given `|a_n| ≤ c·n^{k/2}`.
///
/// Uses `Γ(a, x) ≤ x^{a−1}e^{−x}·x/(x − a + 1)` for `x > a − 1` (and
/// `x^{a−1}e^{−x}` when `a ≤ 1`); the resulting term bound has a ratio that
/// decreases in `n`, so the tail is at most a geometric series.
fn half_tail(c: f64, k: u32, a: f64, tau: f64, n_max: usize) -> Result<f64> {
    let n = (n_max + 1) as f64;
    let x = 2.0 * PI * n * tau;
    if x <= a {
        return precision(format!(
            "{n_max} coefficients are too few for the tail bound at a = {a}"
        ));
    }
    let term = |n: f64| {
        let x = 2.0 * PI * n * tau;
        let gamma_bound = (x.powf(a - 1.0) * (-x).exp()) * if a > 1.0 { x / (x - a + 1.0) } else { 1.0 };
        c * n.powf(k as f64 / 2.0) * (2.0 * PI * n).powf(-a) * gamma_bound
    };
    let first = term(n);
    let ratio = term(n + 1.0) / first;
    if !(ratio < 1.0) {
        return precision(format!("tail ratio {ratio} is not below 1 at N = {n_max}"));
    }
    Ok(first / (1.0 - ratio) * (1.0 + 1e-12))
}

/// `Λ(f, s)` with the Mellin integral split at `t`.
pub fn completed_l_with_split(f: &Eigenform, s: f64, t: f64) -> Result<LValue> {
    let k = f.weight();
    let center = k as f64 / 2.0;
    if !(s >= center - 2.0 && s <= center + 2.0) {
        return domain(format!("s = {s} is outside [{}, {}]", center - 2.0, center + 2.0));
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("split point must be positive, got {t}"));
    }
    if f.num_coeffs() < MIN_COEFFS {
        return domain(format!(
            "need at least {MIN_COEFFS} coefficients, got {}",
            f.num_coeffs()
        ));
    }
    let eps_k = root_number(k);
    let (a, b) = (s, k as f64 - s);
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut abs_sum = 0.0;
    for (i, &an) in f.coeffs().iter().enumerate() {
        let x = 2.0 * PI * (i + 1) as f64;
        let g1 = upper_incomplete_gamma(a, x * t)?;
        let g2 = upper_incomplete_gamma(b, x / t)?;
        let p1 = x.powf(-a);
        let p2 = x.powf(-b);
        let h1 = p1 * g1.value;
        let h2 = eps_k * p2 * g2.value;
        let term = an * (h1 + h2);
        sum += term;
        abs_sum += term.abs();
        // powf and x each contribute a few roundings; a_n is rounded once
        err += an.abs() * (p1 * g1.abs_err + p2 * g2.abs_err)
            + an.abs() * (h1.abs() + h2.abs()) * 8.0 * EPS;
    }
    let n = f.num_coeffs();
    let c = 2.0 * coefficient_bound(f)?;
    // |a_n| ≤ C·d(n)·n^{(k−1)/2} ≤ 2C·n^{k/2}
    let tail = half_tail(2.0 * c, k, a, t, n)? + half_tail(2.0 * c, k, b, 1.0 / t, n)?;
    let completed = ValueWithError::new(sum, err + tail + n as f64 * EPS * abs_sum);

    let (g, g_rel) = gamma_with_rel_err(s)?;
    let factor = (2.0 * PI).powf(s) / g;
    let factor_rel = g_rel + 4.0 * EPS;
    let finite_value = completed.value * factor;
    let finite = ValueWithError::new(
        finite_value,
        completed.abs_err * factor + finite_value.abs() * (factor_rel + EPS),
    );
    Ok(LValue { k, s, completed, finite, terms_used: n })
}

/// `Λ(f, s)` with the symmetric split `t = 1`.
pub fn completed_l(f: &Eigenform, s: f64) -> Result<LValue> {
    completed_l_with_split(f, s, 1.0)
}

/// `|Λ(f, s) − (−1)^{k/2} Λ(f, k − s)|`, with the right side evaluated at
/// split [`RESIDUAL_SPLIT`] so the two sides share no terms.
pub fn functional_equation_residual(f: &Eigenform, s: f64) -> Result<f64> {
    let k = f.weight();
    let left = completed_l(f, s)?;
    let right = completed_l_with_split(f, k as f64 - s, RESIDUAL_SPLIT)?;
    Ok((left.completed.value - root_number(k) * right.completed.value).abs())
}

/// `L(f, k/2)` for every normalized eigenform of weight `k`, each with
/// `abs_err ≤ eps`.
pub fn central_values(k: u32, eps: f64) -> Result<Vec<(Eigenform, ValueWithError)>> {
    if !(eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    let mut n = MIN_COEFFS;
    loop {
        let forms = eigenforms(k, n)?;
        let values = forms
            .iter()
            .map(|f| completed_l(f, k as f64 / 2.0).map(|l| l.finite))
            .collect::<Result<Vec<_>>>()?;
        if values.iter().all(|v| v.abs_err <= eps) {
            return Ok(forms.into_iter().zip(values).collect());
        }
        if n >= 8 * MIN_COEFFS {
            return precision(format!(
                "central values in weight {k} do not reach eps = {eps:e}"
            ));
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // high-precision values for Δ
    const L_DELTA_6: f64 = 0.792_122_838_646_030_6;
    const L_DELTA_6_5: f64 = 0.839_345_512_031_942;
    const L_DELTA_7: f64 = 0.877_354_125_388_661;
    // weight 16 and 20 (ΔE_4 and ΔE_4²)
    const L_16: f64 = 1.520_561_669_084_729;
    const L_20: f64 = 1.981_735_405_433_527;

    fn form(k: u32, n: usize) -> Eigenform {
        eigenforms(k, n).unwrap().remove(0)
    }

    #[test]
    fn delta_values() {
        let d = form(12, 40);
        for (s, want) in [(6.0, L_DELTA_6), (6.5, L_DELTA_6_5), (7.0, L_DELTA_7)] {
            let l = completed_l(&d, s).unwrap();
            assert!((l.finite.value - want).abs() < 1e-13, "s={s}: {}", l.finite);
            assert!(l.finite.contains(want));
            assert!(l.finite.abs_err < 1e-12);
        }
        let l16 = completed_l(&form(16, 40), 8.0).unwrap();
        assert!((l16.finite.value - L_16).abs() < 1e-12);
        let l20 = completed_l(&form(20, 40), 10.0).unwrap();
        assert!((l20.finite.value - L_20).abs() < 1e-12);
    }

    #[test]
    fn split_independence() {
        let d = form(24, 40);
        for s in [10.5, 12.0, 13.7] {
            let a = completed_l(&d, s).unwrap();
            for t in [0.8, 1.1, 1.5] {
                let b = completed_l_with_split(&d, s, t).unwrap();
                let diff = (a.completed.value - b.completed.value).abs();
                assert!(diff <= a.completed.abs_err + b.completed.abs_err, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn forced_vanishing() {
        for k in [18u32, 22, 26, 30] {
            for (f, v) in central_values(k, 1e-10).unwrap() {
                assert_eq!(f.weight(), k);
                assert!(v.value.abs() < 1e-10, "k={k}: {v}");
            }
        }
        assert!(central_values(14, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn central_value_shapes() {
        let v = central_values(12, 1e-10).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].1.value > 0.0 && v[0].1.excludes_zero());
        let v = central_values(24, 1e-10).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|(_, l)| l.value.is_finite()));
    }

    #[test]
    fn residuals() {
        let d = form(12, 40);
        assert!(functional_equation_residual(&d, 6.5).unwrap() < 1e-10);
        let at_center = functional_equation_residual(&d, 6.0).unwrap();
        assert!(at_center < 1e-15, "{at_center}");
        for k in (12..=28).step_by(2) {
            for f in eigenforms(k, 40).unwrap() {
                let c = k as f64 / 2.0;
                for s in [c - 1.0, c - 0.5, c + 0.7] {
                    let r = functional_equation_residual(&f, s).unwrap();
                    assert!(r < 1e-9, "k={k} s={s}: {r}");
                }
            }
        }
        let f = form(18, 40);
        assert!(functional_equation_residual(&f, 9.5).unwrap() < 1e-10);
    }

    #[test]
    fn doubling_coefficients_stays_within_error() {
        for k in [12u32, 24, 32] {
            let short = eigenforms(k, 30).unwrap();
            let long = eigenforms(k, 60).unwrap();
            for (a, b) in short.iter().zip(&long) {
                let s = k as f64 / 2.0;
                let la = completed_l(a, s).unwrap().completed;
                let lb = completed_l(b, s).unwrap().completed;
                assert!((la.value - lb.value).abs() <= la.abs_err, "k={k}");
            }
        }
    }

    #[test]
    fn coefficient_constant() {
        for k in [12u32, 24, 36] {
            for f in eigenforms(k, 60).unwrap() {
                let c = coefficient_bound(&f).unwrap();
                assert!(c > 0.0 && c <= 1.0);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = form(12, 40);
        assert!(completed_l(&d, 3.0).is_err());
        assert!(completed_l(&d, 8.5).is_err());
        assert!(completed_l(&form(12, 10), 6.0).is_err());
        assert!(completed_l_with_split(&d, 6.0, 0.0).is_err());
    }
}
