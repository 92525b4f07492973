use proptest::prelude::*;

use bmcarpet::curve::curve_point;
use bmcarpet::dimension::{box_dim_closed_form, hausdorff_dim_closed_form};
use bmcarpet::oracle::{good_bad_counts, Theta};
use bmcarpet::upper::solve_delta0;
use bmcarpet::{box_dim, hausdorff_dim, Carpet, CarpetSpec, Error, RateFunction};

fn carpets() -> impl Strategy<Value = Carpet> {
    (2i64..=5, 1i64..=4)
        .prop_flat_map(|(m, extra)| {
            let n = m + extra;
            (Just(m), Just(n), proptest::collection::vec(any::<bool>(), (m * n) as usize))
        })
        .prop_filter_map("needs at least one digit", |(m, n, mask)| {
            let digits =
                mask.iter().enumerate().filter(|(_, &on)| on).map(|(i, _)| (i as i64 / n, i as i64 % n)).collect();
            Carpet::new(CarpetSpec::new(m, n, digits)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimensions_ordered_and_closed_forms_agree(c in carpets()) {
        let (h, b) = (hausdorff_dim(&c), box_dim(&c));
        prop_assert!(h <= b + 1e-12);
        prop_assert!((h - hausdorff_dim_closed_form(&c)).abs() <= 1e-12);
        prop_assert!((b - box_dim_closed_form(&c)).abs() <= 1e-12);
        prop_assert!(h >= 0.0 && b <= 2.0);
    }

    #[test]
    fn rate_monotone_on_domain(c in carpets(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let rate = RateFunction::new(&c);
        let (lo, hi) = rate.domain();
        let (x, y) = (lo + (hi - lo) * a.min(b), lo + (hi - lo) * a.max(b));
        let (ix, iy) = (rate.value(x).unwrap(), rate.value(y).unwrap());
        prop_assert!(ix >= -1e-14);
        prop_assert!(ix <= iy + 1e-12, "I({x}) = {ix} > I({y}) = {iy}");
    }

    #[test]
    fn bounds_sandwiched(c in carpets(), theta in 0.0f64..=1.0) {
        let p = curve_point(&RateFunction::new(&c), theta, false).unwrap();
        prop_assert!(p.violations().is_empty(), "{:?}", p.violations());
        prop_assert!(p.lower_psi <= p.lower_env && p.lower_linear <= p.lower_env && p.lower_ffk <= p.lower_env);
    }

    #[test]
    fn partition_identity(c in carpets(), k in 6u64..=14, num in 1u64..20) {
        let theta = Theta::rational(num, 20).unwrap();
        let rate = RateFunction::new(&c);
        let delta0 = match solve_delta0(&rate, theta.value()) {
            Ok(s) => s.delta0,
            Err(_) => 0.01,
        };
        match good_bad_counts(&c, k, theta, delta0) {
            Ok(counts) => {
                let good = counts.exact_good_count.unwrap();
                let bad = counts.exact_bad_count.unwrap();
                prop_assert_eq!(good + bad, counts.exact_total_count.unwrap());
            }
            Err(Error::ThetaOutOfRange { .. }) | Err(Error::Regime(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
