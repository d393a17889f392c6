use hexcov_core::geometry::{build_lattice, hex_depth, Point, NEIGHBOR_DIRS};
use hexcov_core::netmodel::{LinkMode, SidelobeMode, SimParams};
use hexcov_core::stats::wilson_interval;
use hexcov_core::theory::{exponent_center, exponent_typical_bounds};
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = SimParams> {
    (
        1e-3..1e3f64,       // lambda
        1e-3..1e3f64,       // eta
        0.01..1.0f64,       // nu
        2.1..8.0f64,        // alpha
        0.1..2.0f64,        // delta1 (delta2 = delta1 + gap)
        0.0..3.0f64,        // gap
        0.01..1.0f64,       // delta
        0.1..100.0f64,      // theta
    )
        .prop_map(|(lambda, eta, nu, alpha, delta1, gap, delta, theta)| SimParams {
            lambda,
            eta,
            nu,
            alpha,
            delta1,
            delta2: delta1 + gap,
            delta,
            theta,
            m_antennas: None,
            rings: 1,
            link_mode: LinkMode::Rayleigh,
            sidelobe_mode: SidelobeMode::Constant,
            seed: 0,
        })
}

proptest! {
    #[test]
    fn apothem_law_holds(eta in 1e-4..1e4f64) {
        let lat = build_lattice(eta, 0).unwrap();
        prop_assert!((2.0 * 3.0f64.sqrt() * lat.rho() * lat.rho() * eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponents_are_linear_in_k(p in arb_params(), k in 0.1..100.0f64) {
        prop_assert!((exponent_center(&p, 2.0 * k) - 2.0 * exponent_center(&p, k)).abs()
            < 1e-9 * exponent_center(&p, k).abs().max(1.0));
        let b1 = exponent_typical_bounds(&p, k);
        let b2 = exponent_typical_bounds(&p, 2.0 * k);
        prop_assert!((b2.hi - 2.0 * b1.hi).abs() < 1e-9 * b1.hi.max(1.0));
        prop_assert!(b1.lo <= b1.lo_alt && b1.lo_alt <= b1.hi + 1e-12);
    }

    #[test]
    fn typical_bounds_below_center(p in arb_params(), k in 0.1..100.0f64) {
        let b = exponent_typical_bounds(&p, k);
        prop_assert!(b.hi <= exponent_center(&p, k) + 1e-9);
    }

    #[test]
    fn wilson_is_a_valid_interval(s in 0u64..1000, extra in 0u64..10_000) {
        let n = s + extra;
        if n > 0 {
            let (lo, hi) = wilson_interval(s, n, 1.96);
            let p = s as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }

    #[test]
    fn hex_depth_is_scale_covariant(x in -10.0..10.0f64, y in -10.0..10.0f64, s in 0.1..10.0f64) {
        let p = Point::new(x, y);
        let q = Point::new(s * x, s * y);
        prop_assert!((hex_depth(q, Point::ORIGIN) - s * hex_depth(p, Point::ORIGIN)).abs() < 1e-9);
    }

    #[test]
    fn hex_depth_matches_halfplane_membership(
        x in -5.0..5.0f64, y in -5.0..5.0f64, a in 0.1..5.0f64
    ) {
        let p = Point::new(x, y);
        let inside = NEIGHBOR_DIRS.iter().all(|&(ux, uy)| x * ux + y * uy <= a);
        prop_assert_eq!(hex_depth(p, Point::ORIGIN) <= a, inside);
    }
}
