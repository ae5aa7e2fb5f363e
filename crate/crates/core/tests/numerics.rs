//! Heavier numerical cross-checks: the independent quadrature oracle
//! against the ODE and Abel oracles, the uniqueness round trip, and
//! energy conservation along measured orbits.

mod common;

use approx::assert_abs_diff_eq;
use centerpot::field::{BivariatePoly, PlanarField};
use centerpot::pipeline::{run_pipeline, PipelineConfig};
use centerpot::potential::{abel_forward_numeric, AbelQuadrature};
use centerpot::verify::{energy_of, inverse_amplitude, measure_period, MeasureConfig};
use common::oracle_period;
use std::f64::consts::PI;

fn field(p: &[(u32, u32, f64)], q: &[(u32, u32, f64)], degree: u32) -> PlanarField {
    PlanarField::new(BivariatePoly::from_triples(p).unwrap(), BivariatePoly::from_triples(q).unwrap(), degree)
        .unwrap()
}

#[test]
fn oracle_period_reproduces_harmonic_oscillator() {
    // accuracy floor ~1e-9 from square-root cancellation at the endpoint
    assert_abs_diff_eq!(oracle_period(&[0.0, 0.0, 0.5], 0.1), 2.0 * PI, epsilon = 5e-9);
    // omega = 2: T = pi
    assert_abs_diff_eq!(oracle_period(&[0.0, 0.0, 2.0], 0.1), PI, epsilon = 5e-9);
}

#[test]
fn measured_duffing_period_matches_quadrature_oracle() {
    let v = [0.0, 0.0, 0.5, 0.0, 0.25];
    let f = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (3, 0, -1.0)], 3);
    for e in [0.02, 0.05, 0.1] {
        let x_e = common::turning_point(&v, e, 1.0);
        let orbit = measure_period(&f, [x_e, 0.0], &MeasureConfig::default()).unwrap();
        let oracle = oracle_period(&v, e);
        assert_abs_diff_eq!(orbit.period, oracle, epsilon = 1e-8);
    }
}

#[test]
fn pipeline_abel_numeric_agrees_with_ode_oracle() {
    // non-even potential input x^2/2 + x^3/3; the pipeline output V is even
    let f = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (2, 0, -1.0)], 2);
    let out = run_pipeline(&f, &PipelineConfig { order: 10, ..Default::default() }).unwrap();
    let pot = &out.potential;
    for e in [0.01, 0.03] {
        let abel = abel_forward_numeric(pot, e, AbelQuadrature::default()).unwrap();
        let x_e = inverse_amplitude(pot, e).unwrap();
        let orbit = measure_period(
            &pot.hamiltonian_field().unwrap(),
            [x_e, 0.0],
            &MeasureConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(abel, orbit.period, epsilon = 1e-6);
        // and both match the direct quadrature on the *input* well
        let oracle = oracle_period(&[0.0, 0.0, 0.5, 1.0 / 3.0], e);
        assert_abs_diff_eq!(orbit.period, oracle, epsilon = 1e-6);
    }
}

#[test]
fn uniqueness_rerunning_pipeline_on_built_potential_fixes_a() {
    // X is a non-even center; Y is the even potential system built from it.
    // Both runs must produce the same inverse-profile coefficients.
    let config = PipelineConfig { order: 8, ..Default::default() };
    let x_field = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (2, 0, -1.0)], 2);
    let first = run_pipeline(&x_field, &config).unwrap();
    let y_field = first.potential.hamiltonian_field().unwrap();
    let second = run_pipeline(&y_field, &config).unwrap();
    for (a1, a2) in first.period.a.iter().zip(&second.period.a) {
        assert!((a1 - a2).abs() < 1e-6 * 1.0f64.max(a1.abs()), "{a1} vs {a2}");
    }
    // the recovered potentials coincide as well
    for (v1, v2) in first.potential.v.compact().iter().zip(second.potential.v.compact()) {
        assert!((v1 - v2).abs() < 1e-6 * 1.0f64.max(v1.abs()), "{v1} vs {v2}");
    }
}

#[test]
fn uniqueness_holds_for_rescaled_frequency() {
    // omega = 2 potential input: V = 2 x^2 + x^4 / 4
    let config = PipelineConfig { order: 8, ..Default::default() };
    let x_field = PlanarField::from_hamiltonian_v(&[0.0, 0.0, 2.0, 0.0, 0.25]).unwrap();
    let first = run_pipeline(&x_field, &config).unwrap();
    // recovered potential reproduces the input
    let v = first.potential.v.compact();
    assert_abs_diff_eq!(v[0], 2.0, epsilon = 1e-8);
    assert_abs_diff_eq!(v[1], 0.25, epsilon = 1e-8);
    for vk in &v[2..4] {
        assert!(vk.abs() < 1e-7, "spurious coefficient {vk}");
    }
    let second = run_pipeline(&first.potential.hamiltonian_field().unwrap(), &config).unwrap();
    for (a1, a2) in first.period.a.iter().zip(&second.period.a) {
        assert!((a1 - a2).abs() < 1e-6 * 1.0f64.max(a1.abs()));
    }
}

#[test]
fn energy_is_conserved_along_measured_orbits() {
    let f = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (2, 0, -1.0)], 2);
    let out = run_pipeline(&f, &PipelineConfig { order: 8, ..Default::default() }).unwrap();
    let pot = &out.potential;
    let yf = pot.hamiltonian_field().unwrap();
    let cfg = MeasureConfig::default();
    for e in [0.01, 0.04] {
        let x_e = inverse_amplitude(pot, e).unwrap();
        let orbit = measure_period(&yf, [x_e, 0.0], &cfg).unwrap();
        let e0 = energy_of(pot, [x_e, 0.0]).unwrap();
        for &(_, x, y) in &orbit.samples {
            let drift = (energy_of(pot, [x, y]).unwrap() - e0).abs();
            assert!(drift < 10.0 * cfg.rtol, "drift {drift} at ({x}, {y})");
        }
    }
}

#[test]
fn normal_form_idempotence_on_random_profiles() {
    // fields built exactly as f(x^2+y^2)(y, -x) are fixed points of the
    // normal form: same profile back, identity transform
    use centerpot::normal_form::poincare_normal_form;
    let cases = [vec![1.0, 0.7], vec![2.0, -0.4], vec![0.8, 0.3, -0.2]];
    for f_coeffs in cases {
        let mut p = BivariatePoly::zero();
        let mut q = BivariatePoly::zero();
        for (k, c) in f_coeffs.iter().enumerate() {
            let k = k as u32;
            // f_k (x^2+y^2)^k * y and -f_k (x^2+y^2)^k * x
            let mut rho_k = BivariatePoly::monomial(0, 0, 1.0);
            let rho = BivariatePoly::from_triples(&[(2, 0, 1.0), (0, 2, 1.0)]).unwrap();
            for _ in 0..k {
                rho_k = rho_k.mul(&rho, None);
            }
            p = p.add(&rho_k.mul(&BivariatePoly::monomial(0, 1, *c), None));
            q = q.add(&rho_k.mul(&BivariatePoly::monomial(1, 0, -*c), None));
        }
        let degree = 2 * (f_coeffs.len() as u32 - 1) + 1;
        let fld = PlanarField::new(p, q, degree).unwrap();
        let nf = poincare_normal_form(&fld, 8, 1e-9).unwrap();
        for (k, want) in f_coeffs.iter().enumerate() {
            assert!(
                (nf.f_coeffs.coeff(k) - want).abs() < 1e-9 * 1.0f64.max(want.abs()),
                "profile coefficient {k}: {} vs {want}",
                nf.f_coeffs.coeff(k)
            );
        }
        for k in f_coeffs.len()..=nf.f_coeffs.order() {
            assert!(nf.f_coeffs.coeff(k).abs() < 1e-9);
        }
        let xi_dev = nf.transform.0.sub(&BivariatePoly::monomial(1, 0, 1.0)).max_coeff();
        let eta_dev = nf.transform.1.sub(&BivariatePoly::monomial(0, 1, 1.0)).max_coeff();
        assert!(xi_dev < 1e-9 && eta_dev < 1e-9);
    }
}
