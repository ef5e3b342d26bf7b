#![allow(dead_code)]

use twophoton_core::forward::{compute_datum, solve_semilinear};
use twophoton_core::{BoundaryField, CoefficientSet, DatumSet, Mesh, NewtonConfig, NodalField};

fn bump(p: [f64; 2], c: [f64; 2], r: f64) -> f64 {
    let d2 = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / (r * r);
    (-d2).exp()
}

/// Smooth test coefficients with a few localized features.
pub fn smooth_phantom(mesh: &Mesh) -> CoefficientSet {
    CoefficientSet::new(
        NodalField::from_fn(mesh, |p| 1.0 + 0.2 * bump(p, [0.3, -0.2], 0.4)),
        NodalField::from_fn(mesh, |p| 0.1 + 0.05 * bump(p, [-0.4, 0.4], 0.35)),
        NodalField::from_fn(mesh, |p| 0.2 + 0.2 * bump(p, [-0.3, -0.3], 0.3)),
        NodalField::from_fn(mesh, |p| 0.5 + 0.5 * bump(p, [0.4, 0.3], 0.3)),
    )
}

/// Four positive sources with distinct amplitudes.
pub fn sources(mesh: &Mesh) -> Vec<BoundaryField> {
    vec![
        BoundaryField::constant(mesh, 1.0),
        BoundaryField::constant(mesh, 3.0),
        BoundaryField::from_fn(mesh, |p| 2.0 + p[0]),
        BoundaryField::from_fn(mesh, |p| 2.0 + p[1]),
    ]
}

pub fn clean_data(mesh: &Mesh, coeffs: &CoefficientSet, sources: Vec<BoundaryField>) -> (DatumSet, Vec<NodalField>) {
    let mut data = Vec::new();
    let mut states = Vec::new();
    for g in &sources {
        let (u, _) = solve_semilinear(mesh, coeffs, g, &NewtonConfig::default()).unwrap();
        data.push(compute_datum(coeffs, &u).unwrap());
        states.push(u);
    }
    (DatumSet::noiseless(sources, data).unwrap(), states)
}
