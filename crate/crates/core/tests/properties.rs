use proptest::prelude::*;

use plap::bifurcation::{bifurcation_table, continuum_dimension, AreaRelation};
use plap::nonlinearity::{Family, Nonlinearity, Side};
use plap::profile::{energy_residual, reconstruct, shoot};
use plap::solver::{descriptor_id, descriptor_residual, parse_class, solve_class, Kind, SolutionClass};
use plap::timemap::{alpha, arch_top_rel, flat_core_half_widths, slope_bounds, theta, Problem, RelSlope};

fn power(b_plus: f64, b_minus: f64, r_exp: f64, q: f64) -> Nonlinearity {
    Nonlinearity::new(Family::PowerAsym { b_plus, b_minus, r_exp }, q).unwrap()
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Positive), Just(Side::Negative)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn ids_round_trip(j in 1usize..40, sign in side(), r in 1e-6f64..1e6, flat in any::<bool>()) {
        let class = SolutionClass::new(j, sign);
        let kind = if flat { Kind::FlatCore } else { Kind::Regular };
        let id = descriptor_id(class, kind, r);
        prop_assert_eq!(parse_class(&id), Some(class));
        prop_assert_eq!(descriptor_id(class, kind, r), id);
    }

    #[test]
    fn odd_f_has_equal_half_maps(q in 1.5f64..3.5, dr in 0.5f64..3.0, b in 0.3f64..3.0, p in 1.5f64..4.0, frac in 0.01f64..0.99) {
        let pr = Problem::new(p, power(b, b, q + dr, q), 10.0).unwrap();
        let r = frac * slope_bounds(&pr).r_pos;
        let (t, a) = (theta(&pr, r).unwrap(), alpha(&pr, r).unwrap());
        prop_assert!((t - a).abs() <= 1e-12 * t);
    }

    #[test]
    fn arch_top_grows_with_slope(q in 1.5f64..3.5, dr in 0.5f64..3.0, bp in 0.3f64..3.0, bm in 0.3f64..3.0,
                                 p in 1.5f64..4.0, r1 in 0.01f64..0.98, gap in 0.001f64..0.02, s in side()) {
        let pr = Problem::new(p, power(bp, bm, q + dr, q), 5.0).unwrap();
        let lo = arch_top_rel(&pr, s, RelSlope::new(r1, s)).unwrap();
        let hi = arch_top_rel(&pr, s, RelSlope::new(r1 + gap, s)).unwrap();
        let z = pr.nl.branch(s).zero();
        prop_assert!(0.0 < lo && lo < hi && hi <= z);
    }

    #[test]
    fn flat_core_widths_scale_with_lambda(q in 1.5f64..3.5, dr in 0.5f64..3.0, p in 2.2f64..5.0, l1 in 1.0f64..100.0, ratio in 1.1f64..10.0) {
        let pr = Problem::new(p, power(1.0, 2.0, q + dr, q), l1).unwrap();
        let (x1, y1) = flat_core_half_widths(&pr).unwrap();
        let (x2, y2) = flat_core_half_widths(&pr.at_lambda(l1 * ratio).unwrap()).unwrap();
        let k = ratio.powf(1.0 / p);
        prop_assert!((x1 / x2 - k).abs() <= 1e-12 * k);
        prop_assert!((y1 / y2 - k).abs() <= 1e-12 * k);
    }

    #[test]
    fn thresholds_increase_from_two_arches(q in 1.5f64..3.0, dr in 0.5f64..3.0, bp in 0.3f64..3.0, bm in 0.3f64..3.0, p in 2.2f64..4.5) {
        let t = bifurcation_table(&power(bp, bm, q + dr, q), p, 8).unwrap();
        // the one-arch onset may exceed later ones when the areas differ
        for v in [&t.lambda_tilde_plus, &t.lambda_tilde_minus] {
            prop_assert!(v[1..].windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn continuum_dims_are_largest_for_equal_areas(n in 2usize..30, s in side()) {
        let eq = continuum_dimension(n, s, AreaRelation::Equal);
        for rel in [AreaRelation::PlusSmaller, AreaRelation::MinusSmaller] {
            prop_assert!(continuum_dimension(n, s, rel) <= eq);
        }
        // swapping the sign and the area relation is a symmetry
        prop_assert_eq!(
            continuum_dimension(n, Side::Positive, AreaRelation::PlusSmaller),
            continuum_dimension(n, Side::Negative, AreaRelation::MinusSmaller)
        );
    }

    #[test]
    fn shooting_is_odd_for_odd_f(q in 1.5f64..3.0, dr in 0.5f64..2.0, p in 1.5f64..4.0, lambda in 1.0f64..50.0, frac in 0.1f64..0.9) {
        let pr = Problem::new(p, power(1.0, 1.0, q + dr, q), lambda).unwrap();
        let r = frac * slope_bounds(&pr).r_pos;
        let a = shoot(&pr, r, Side::Positive, 2000).unwrap();
        let b = shoot(&pr, r, Side::Negative, 2000).unwrap();
        for (u, v) in a.phi.iter().zip(&b.phi) {
            prop_assert!((u + v).abs() <= 1e-14 * (1.0 + u.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn reconstructed_first_class_is_consistent(q in 1.5f64..3.0, dr in 0.5f64..2.5, bp in 0.5f64..2.0, bm in 0.5f64..2.0,
                                               p in 1.5f64..4.0, scale in 0.2f64..0.95, s in side()) {
        let nl = power(bp, bm, q + dr, q);
        // below the first flat-core onset the first class is a single regular arch for q < p;
        // for q >= p use a multiple of the onset that still has regular solutions
        let table = bifurcation_table(&nl, p, 1).unwrap();
        let onset = table.tilde(1, s);
        let lambda = if onset.is_finite() { scale * onset + (1.0 - scale) * table.existence(1, s) } else { 40.0 / scale };
        prop_assume!(lambda > table.existence(1, s) * (1.0 + 1e-6));
        let pr = Problem::new(p, nl, lambda).unwrap();
        let ds = solve_class(&pr, SolutionClass::new(1, s)).unwrap();
        for d in ds.iter().filter(|d| d.kind == Kind::Regular) {
            prop_assert!(descriptor_residual(&pr, d).unwrap().abs() < 1e-9);
            let prof = reconstruct(&pr, d, 257, None).unwrap();
            prop_assert!(prof.phi[0].abs() < 1e-10 && prof.phi[256].abs() < 1e-10);
            prop_assert!((prof.dphi[0].abs() - d.r).abs() <= 1e-9 * d.r);
            prop_assert!(energy_residual(&pr, &prof) < 1e-8);
            prop_assert!(prof.phi.iter().all(|v| v * s.sign() >= -1e-15));
        }
    }
}
