use hecke_core::cli::{CertificateView, LValueEntry, Report, Timings, TriangleView};
use hecke_core::kernel::{partial_bracket_sum, tail_bound, Sign};
use hecke_core::ntheory::{
    coprime_factor_pairs, distinct_prime_factors, divisor_count, gamma_sum, gamma_terms,
    mod_inverse, InverseConvention,
};
use hecke_core::specfun::{bessel_envelope, bessel_j, upper_incomplete_gamma, HalfIntOrder};
use num_integer::Integer;
use proptest::prelude::*;

proptest! {
    #[test]
    fn mod_inverse_round_trip(c in 2u64..=1000, a0 in 1u64..1000) {
        let a = a0 % c;
        prop_assume!(a > 0 && a.gcd(&c) == 1);
        let inv = mod_inverse(a, c).unwrap();
        prop_assert!(inv < c);
        prop_assert_eq!(a * inv % c, 1);
    }

    #[test]
    fn pair_count_is_power_of_two(m in 1u64..=10_000) {
        let pairs = coprime_factor_pairs(m);
        prop_assert_eq!(pairs.len() as u64, 1u64 << distinct_prime_factors(m));
        for (a, c) in pairs {
            prop_assert_eq!(a * c, m);
            prop_assert_eq!(a.gcd(&c), 1);
        }
    }

    #[test]
    fn gamma_sum_halves(n in 1u64..=20, m in 1u64..=2000) {
        let full = gamma_sum(n, m).unwrap();
        let terms = gamma_terms(n, m, InverseConvention::Reduced).unwrap();
        let half: f64 = terms
            .iter()
            .filter(|t| t.a <= t.c)
            .map(|t| if t.a == t.c { t.contribution } else { 2.0 * t.contribution })
            .sum();
        prop_assert!((full - half).abs() < 1e-12, "{} vs {}", full, half);
    }

    #[test]
    fn gamma_sum_divisor_bound(n in 1u64..=20, m in 1u64..=500) {
        let g = gamma_sum(n, m).unwrap();
        prop_assert!(g.abs() <= divisor_count(m) as f64 + 1e-12);
    }

    #[test]
    fn bessel_below_envelope(h in 0u32..40, x in 0.001f64..32.0) {
        let nu = HalfIntOrder::new(2 * h + 1).unwrap();
        let j = bessel_j(nu, x).unwrap();
        prop_assert!(j.value.abs() <= bessel_envelope(nu, x) + j.abs_err);
    }

    #[test]
    fn bessel_three_term_recurrence(h in 2u32..30, x in 0.01f64..32.0) {
        let lo = bessel_j(HalfIntOrder::new(2 * h - 1).unwrap(), x).unwrap();
        let mid = bessel_j(HalfIntOrder::new(2 * h + 1).unwrap(), x).unwrap();
        let hi = bessel_j(HalfIntOrder::new(2 * h + 3).unwrap(), x).unwrap();
        let f = (2 * h + 1) as f64 / x;
        let residual = (lo.value + hi.value - f * mid.value).abs();
        let allowed = lo.abs_err + hi.abs_err + f * mid.abs_err
            + 4.0 * f64::EPSILON * (lo.value.abs() + hi.value.abs() + f * mid.value.abs());
        prop_assert!(residual <= allowed, "residual {:e} > {:e}", residual, allowed);
    }

    #[test]
    fn incomplete_gamma_recursion(s in 0.05f64..59.0, x in 0.01f64..200.0) {
        let upper = upper_incomplete_gamma(s + 1.0, x).unwrap();
        let lower = upper_incomplete_gamma(s, x).unwrap();
        prop_assume!(upper.value > 1e-290);
        let rhs = s * lower.value + (s * x.ln() - x).exp();
        prop_assert!(((upper.value - rhs) / upper.value).abs() < 1e-12);
    }

    #[test]
    fn incomplete_gamma_interval_contains_neighbour(s in 0.5f64..40.0, x in 0.1f64..80.0) {
        // Γ(s, x) is decreasing in x
        let a = upper_incomplete_gamma(s, x).unwrap();
        let b = upper_incomplete_gamma(s, x * (1.0 + 1e-6)).unwrap();
        prop_assert!(b.lo() <= a.hi());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_bound_covers_later_terms(h in 3u32..=10, n in 1u64..=3, m in 20u64..200, extra in 1u64..400) {
        let k = 4 * h;
        let short = partial_bracket_sum(k, n, m).unwrap();
        let long = partial_bracket_sum(k, n, m + extra).unwrap();
        let diff = (long.value - short.value).abs();
        prop_assert!(diff <= tail_bound(k, n, m).unwrap() + short.abs_err + long.abs_err);
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1e3f64..1e3,
        Just(0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Positive), Just(Sign::Negative), Just(Sign::Undetermined)]
}

prop_compose! {
    fn report()(
        weight in 12u32..=40,
        nonvanishing in any::<bool>(),
        sign in sign(),
        c in prop::array::uniform5(finite()),
        terms_used in any::<u64>(),
        l in prop::collection::vec((1usize..4, finite(), finite()), 0..4),
        tri in prop::option::of(prop::array::uniform6(finite())),
        ms in prop::array::uniform3(any::<u64>()),
    ) -> Report {
        Report {
            schema_version: "1".into(),
            weight,
            certificate: CertificateView {
                nonvanishing,
                sign,
                rho: c[0],
                rho_abs_err: c[1],
                per_k_bound: c[2],
                global_bound: c[3],
                log_prefactor: c[4],
                terms_used,
            },
            l_values: l
                .into_iter()
                .enumerate()
                .map(|(i, (deg, value, abs_err))| LValueEntry {
                    form_index: i,
                    coefficient_field_degree: deg,
                    value,
                    abs_err,
                })
                .collect(),
            triangle: tri.map(|t| TriangleView {
                lhs: t[0],
                lhs_abs_err: t[1],
                rhs: t[2],
                rhs_abs_err: t[3],
                ratio: t[4],
                ratio_abs_err: t[5],
            }),
            timings_ms: Timings { certify: ms[0], l_values: ms[1], triangle: Some(ms[2]) },
        }
    }
}

proptest! {
    #[test]
    fn report_json_round_trip(r in report()) {
        let json = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
