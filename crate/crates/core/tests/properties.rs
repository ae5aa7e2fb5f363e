//! Randomized property suites for the series ring, the parity classes,
//! the period-map identities and the potential construction.

use centerpot::field::{BivariatePoly, PlanarField};
use centerpot::period::{energy_profile, invert_profile, period_series, period_series_via_f};
use centerpot::potential::{ab_transform, build_potential, phi_from_b, GammaRatioTable};
use centerpot::series::{Parity, ParitySeries, TruncatedSeries};
use proptest::prelude::*;

fn series(order: usize, range: f64) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(-range..range, order + 1..=order + 1)
        .prop_map(|c| TruncatedSeries::new(c).unwrap())
}

/// Series with zero constant term and linear term bounded away from zero.
/// Tail coefficients scale with `f1^2` so the reversion stays
/// well-conditioned: the inverse coefficients grow like
/// `(max |f_k| / f1^2)^n`, and an absolute 1e-9 round-trip bound is only
/// meaningful in f64 when that ratio stays moderate.
fn revertible(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    (
        prop::collection::vec(-2.0..2.0f64, order + 1..=order + 1),
        0.5..2.0f64,
        prop::bool::ANY,
    )
        .prop_map(|(mut c, lin, neg)| {
            c[0] = 0.0;
            for t in c.iter_mut().skip(2) {
                *t *= 0.5 * lin * lin;
            }
            c[1] = if neg { -lin } else { lin };
            TruncatedSeries::new(c).unwrap()
        })
}

/// Angular profile with f(0) in [0.5, 4].
fn profile(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    (prop::collection::vec(-1.0..1.0f64, order + 1..=order + 1), 0.5..4.0f64).prop_map(
        |(mut c, f0)| {
            c[0] = f0;
            TruncatedSeries::new(c).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn revert_round_trip(f in (2usize..=12).prop_flat_map(revertible)) {
        let g = f.revert().unwrap();
        let round = f.compose(&g).unwrap();
        let id = TruncatedSeries::identity(f.order());
        prop_assert!(round.max_scaled_diff(&id) < 1e-9);
    }

    #[test]
    fn ring_axioms(
        (f, g, h) in (2usize..=12).prop_flat_map(|n| (series(n, 2.0), series(n, 2.0), series(n, 2.0)))
    ) {
        let fg = f.mul(&g).unwrap();
        let gf = g.mul(&f).unwrap();
        prop_assert!(fg.max_scaled_diff(&gf) < 1e-12);

        let assoc_l = fg.mul(&h).unwrap();
        let assoc_r = f.mul(&g.mul(&h).unwrap()).unwrap();
        prop_assert!(assoc_l.max_scaled_diff(&assoc_r) < 1e-12);

        let dist_l = f.mul(&g.add(&h).unwrap()).unwrap();
        let dist_r = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
        prop_assert!(dist_l.max_scaled_diff(&dist_r) < 1e-12);
    }

    #[test]
    fn derivative_undoes_antiderivative(f in (1usize..=12).prop_flat_map(|n| series(n, 3.0))) {
        let back = f.antiderivative(0.0).derivative();
        // exact to order N (identical up to one rounding in divide/multiply)
        for k in 0..=f.order() {
            let scale = 1.0f64.max(f.coeff(k).abs());
            prop_assert!((back.coeff(k) - f.coeff(k)).abs() <= 1e-14 * scale);
        }
        prop_assert_eq!(back.trusted_order(), f.order());
    }

    #[test]
    fn sqrt1p_squares_back(f in (2usize..=12).prop_flat_map(|n| {
        prop::collection::vec(-0.8..0.8f64, n + 1..=n + 1).prop_map(|mut c| {
            c[0] = 0.0;
            TruncatedSeries::new(c).unwrap()
        })
    })) {
        let s = f.sqrt1p().unwrap();
        let square = s.mul(&s).unwrap();
        let mut want = f.coeffs().to_vec();
        want[0] += 1.0;
        let want = TruncatedSeries::new(want).unwrap();
        prop_assert!(square.max_scaled_diff(&want) < 1e-10);
    }

    #[test]
    fn odd_reversion_is_odd(b in prop::collection::vec(-2.0..2.0f64, 1..=7), lead in 0.5..2.0f64) {
        let mut b = b;
        b[0] = lead;
        let phi = ParitySeries::odd(&b).unwrap();
        let (inv, defect) = phi.revert_odd().unwrap();
        prop_assert!(defect < 1e-12);
        // squared inverse is even by construction and matches a full-series
        // square (padded so the highest even term has room)
        let sq = inv.square();
        prop_assert_eq!(sq.parity(), Parity::Even);
        let full = inv.to_series().extend_exact(2 * inv.count());
        let full_sq = full.mul(&full).unwrap();
        let (even_part, odd_defect) = ParitySeries::from_series(&full_sq, Parity::Even).unwrap();
        prop_assert!(odd_defect < 1e-12);
        for (a, b) in sq.compact().iter().zip(even_part.compact()) {
            prop_assert!((a - b).abs() < 1e-9 * 1.0f64.max(a.abs()));
        }
    }

    #[test]
    fn period_route_equivalence(f in (2usize..=10).prop_flat_map(profile)) {
        let via_a = {
            let big_f = energy_profile(&f).unwrap();
            period_series(&invert_profile(&big_f).unwrap()).unwrap()
        };
        let via_f = period_series_via_f(&f).unwrap();
        let trimmed = TruncatedSeries::new(via_a.coeffs()[..=f.order()].to_vec()).unwrap();
        prop_assert!(trimmed.max_scaled_diff(&via_f) < 1e-9);
    }

    #[test]
    fn leading_coefficient_ties_to_frequency(f in (2usize..=10).prop_flat_map(profile)) {
        let a = invert_profile(&energy_profile(&f).unwrap()).unwrap();
        prop_assert!((a[0] * f.coeff(0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_ties_to_b1(
        a in prop::collection::vec(-2.0..2.0f64, 3..=10),
        a1 in 0.5..4.0f64,
    ) {
        let mut a = a;
        a[0] = a1;
        let b = ab_transform(&a).unwrap();
        let result = build_potential(&phi_from_b(&b).unwrap()).unwrap();
        prop_assert!((result.vpp0 * b[0] * b[0] - 2.0).abs() < 1e-10);
        // growth bound |b_n| <= n M |a_n| with M = sqrt(2 pi)/(4 r_1)
        let m = 2.0f64.sqrt() / 2.0;
        for (k, bn) in b.iter().enumerate() {
            prop_assert!(bn.abs() <= (k + 1) as f64 * m * a[k].abs() + 1e-15);
        }
    }

    #[test]
    fn central_identity_randomized(
        a in prop::collection::vec(-2.0..2.0f64, 4..=10),
        a1 in 0.5..4.0f64,
    ) {
        let mut a = a;
        a[0] = a1;
        let b = ab_transform(&a).unwrap();
        let lhs = centerpot::potential::abel_forward_series(&b);
        let rhs = period_series(&a).unwrap();
        prop_assert!(lhs.max_scaled_diff(&rhs) < 1e-9);
    }

    #[test]
    fn gamma_recurrence(n in 1usize..120) {
        let table = GammaRatioTable::new(n + 1);
        let nf = n as f64;
        let lhs = table.ratio(n + 1);
        let rhs = table.ratio(n) * (nf + 0.5) / nf;
        prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs());
        prop_assert!(table.ratio(n + 1) > table.ratio(n));
    }

    #[test]
    fn reversibility_scale_invariant(
        p in prop::collection::vec((0u32..4, 0u32..4, -2.0..2.0f64), 1..6),
        q in prop::collection::vec((0u32..4, 0u32..4, -2.0..2.0f64), 1..6),
        c in 0.1..10.0f64,
    ) {
        let clean = |terms: &[(u32, u32, f64)]| {
            let mut poly = BivariatePoly::from_triples(terms).unwrap();
            poly.add_term(0, 0, -poly.coeff(0, 0));
            poly
        };
        let (p, q) = (clean(&p), clean(&q));
        let field = PlanarField::new(p.clone(), q.clone(), 8).unwrap();
        let scaled = PlanarField::new(p.scale(c), q.scale(c), 8).unwrap();
        prop_assert_eq!(field.is_reversible_uv(), scaled.is_reversible_uv());
    }

    #[test]
    fn hamiltonian_fields_are_reversible(v in prop::collection::vec(-2.0..2.0f64, 3..=9)) {
        // P = dH/dy = y, Q = -dH/dx = -V'(x) for any V with V'(0) = 0
        let mut v = v;
        v[1] = 0.0;
        let field = PlanarField::from_hamiltonian_v(&v).unwrap();
        prop_assert!(field.is_reversible_uv());
    }

    #[test]
    fn linear_part_det_is_exact(
        a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64,
    ) {
        let p = BivariatePoly::from_triples(&[(1, 0, a), (0, 1, b)]).unwrap();
        let q = BivariatePoly::from_triples(&[(1, 0, c), (0, 1, d)]).unwrap();
        let field = PlanarField::new(p, q, 1).unwrap();
        match field.linear_part(1e-12) {
            Ok(info) => prop_assert_eq!(info.det, a * d - b * c),
            Err(_) => prop_assert!(a * d - b * c <= 0.0 || (a + d).abs() > 1e-12),
        }
    }

    #[test]
    fn fields_vanish_at_origin(
        p in prop::collection::vec((0u32..5, 0u32..5, -3.0..3.0f64), 1..8),
    ) {
        let mut poly = BivariatePoly::from_triples(&p).unwrap();
        poly.add_term(0, 0, -poly.coeff(0, 0));
        let field = PlanarField::new(poly.clone(), poly, 10).unwrap();
        prop_assert_eq!(field.evaluate([0.0, 0.0]), [0.0, 0.0]);
    }
}

#[test]
fn exact_backend_agrees_with_float_pipeline() {
    use centerpot::series::exact::{energy_profile as exact_profile, invert_profile as exact_invert, ExactSeries};
    // golden: f = 1 + z against the rational backend through the pre-gamma
    // stages, coefficient by coefficient
    let f = TruncatedSeries::new(vec![1.0, 1.0]).unwrap().extend_exact(12);
    let a_float = invert_profile(&energy_profile(&f).unwrap()).unwrap();
    let exact = exact_invert(&exact_profile(&ExactSeries::from_i64(&[1, 1]).extend(12)));
    use num_traits::ToPrimitive;
    for (x, r) in a_float.iter().zip(&exact) {
        let want = r.to_f64().unwrap();
        assert!((x - want).abs() <= 1e-9 * want.abs().max(1.0), "{x} vs {want}");
    }
}
