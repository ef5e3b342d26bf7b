//! Fixtures shared by the benchmarks in `benches/`.

use twophoton_core::forward::{compute_datum, solve_semilinear};
use twophoton_core::{BoundaryField, CoefficientSet, DatumSet, Mesh, NewtonConfig, NodalField};

/// Smooth coefficients with a two-photon term comparable to the linear one.
pub fn coefficients(mesh: &Mesh) -> CoefficientSet {
    CoefficientSet::new(
        NodalField::constant(mesh, 1.0),
        NodalField::from_fn(mesh, |p| 0.1 * (1.0 + 0.25 * (p[0] * p[1]).cos())),
        NodalField::from_fn(mesh, |p| 0.1 + 0.05 * (2.0 * p[0]).sin().abs()),
        NodalField::from_fn(mesh, |p| 0.02 + 0.01 * p[1] * p[1]),
    )
}

pub fn sources(mesh: &Mesh) -> Vec<BoundaryField> {
    [0.25, 1.0, 2.0, 4.0]
        .iter()
        .map(|&c| BoundaryField::from_fn(mesh, move |p| c * (1.0 + 0.1 * p[0])))
        .collect()
}

/// Noiseless data for [`sources`].
pub fn data(mesh: &Mesh, coeffs: &CoefficientSet) -> DatumSet {
    let sources = sources(mesh);
    let data = sources
        .iter()
        .map(|g| {
            let (u, _) = solve_semilinear(mesh, coeffs, g, &NewtonConfig::default()).expect("forward solve");
            compute_datum(coeffs, &u).expect("datum")
        })
        .collect();
    DatumSet::noiseless(sources, data).expect("datum set")
}
