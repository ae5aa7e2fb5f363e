//! Shared fixtures for the benchmark targets.

use centerpot::field::{BivariatePoly, PlanarField};

pub fn duffing() -> PlanarField {
    PlanarField::from_hamiltonian_v(&[0.0, 0.0, 0.5, 0.0, 0.25]).unwrap()
}

pub fn linear_center() -> PlanarField {
    PlanarField::new(
        BivariatePoly::monomial(0, 1, 1.0),
        BivariatePoly::monomial(1, 0, -1.0),
        1,
    )
    .unwrap()
}

/// The field `(1 + x^2 + y^2)(y, -x)`, already in normal form.
pub fn profile_field() -> PlanarField {
    PlanarField::new(
        BivariatePoly::from_triples(&[(0, 1, 1.0), (2, 1, 1.0), (0, 3, 1.0)]).unwrap(),
        BivariatePoly::from_triples(&[(1, 0, -1.0), (3, 0, -1.0), (1, 2, -1.0)]).unwrap(),
        3,
    )
    .unwrap()
}
