mod common;

use twophoton_core::forward::{compute_datum, solve_semilinear};
use twophoton_core::frechet::{boundary_traces, datum_derivative, solve_sensitivity};
use twophoton_core::{BoundaryField, CoefficientPerturbation, CoefficientSet, Mesh, NewtonConfig, NodalField};

fn tight() -> NewtonConfig {
    NewtonConfig {
        residual_tol: 1e-13,
        ..NewtonConfig::default()
    }
}

fn direction(mesh: &Mesh) -> CoefficientPerturbation {
    CoefficientPerturbation {
        d_gamma: NodalField::from_fn(mesh, |p| 0.03 * (1.0 + p[0] * p[1])),
        d_sigma: NodalField::from_fn(mesh, |p| 0.1 * (2.0 * p[0]).cos()),
        d_mu: NodalField::from_fn(mesh, |p| 0.3 * (1.5 * p[1]).sin() + 0.1),
    }
}

fn max_abs_diff(a: &NodalField, b: &NodalField) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Taylor remainders `‖F(q + t d) - F(q) - t F'(q) d‖` for u and H.
fn remainders(mesh: &Mesh, coeffs: &CoefficientSet, g: &BoundaryField, ts: &[f64]) -> Vec<(f64, f64)> {
    let pert = direction(mesh);
    let (u, _) = solve_semilinear(mesh, coeffs, g, &tight()).unwrap();
    let h = compute_datum(coeffs, &u).unwrap();
    let v = solve_sensitivity(mesh, coeffs, &u, &pert).unwrap();
    let dh = datum_derivative(coeffs, &u, &v, &pert).unwrap();
    ts.iter()
        .map(|&t| {
            let shifted = pert.apply(coeffs, t);
            let (ut, _) = solve_semilinear(mesh, &shifted, g, &tight()).unwrap();
            let ht = compute_datum(&shifted, &ut).unwrap();
            let lin_u = u.axpy(t, &v);
            let lin_h = h.axpy(t, &dh);
            (max_abs_diff(&ut, &lin_u), max_abs_diff(&ht, &lin_h))
        })
        .collect()
}

#[test]
fn taylor_remainder_is_quadratic() {
    let mesh = Mesh::square(16).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let g = BoundaryField::from_fn(&mesh, |p| 1.5 + 0.5 * p[0]);
    let r = remainders(&mesh, &coeffs, &g, &[1e-2, 5e-3, 2.5e-3]);
    for w in r.windows(2) {
        let (ratio_u, ratio_h) = (w[0].0 / w[1].0, w[0].1 / w[1].1);
        assert!((3.5..=4.5).contains(&ratio_u), "u ratio {ratio_u}");
        assert!((3.5..=4.5).contains(&ratio_h), "H ratio {ratio_h}");
        assert!(ratio_u.log2() >= 1.9 && ratio_h.log2() >= 1.9);
    }
}

#[test]
fn sensitivity_is_linear_in_direction() {
    let mesh = Mesh::square(8).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let g = BoundaryField::constant(&mesh, 2.0);
    let (u, _) = solve_semilinear(&mesh, &coeffs, &g, &tight()).unwrap();
    let a = direction(&mesh);
    let b = CoefficientPerturbation {
        d_gamma: NodalField::from_fn(&mesh, |p| 0.01 * p[0]),
        d_sigma: NodalField::constant(&mesh, 0.05),
        d_mu: NodalField::from_fn(&mesh, |p| p[0] - p[1]),
    };
    let va = solve_sensitivity(&mesh, &coeffs, &u, &a).unwrap();
    let vb = solve_sensitivity(&mesh, &coeffs, &u, &b).unwrap();
    let combo = solve_sensitivity(&mesh, &coeffs, &u, &a.scaled(2.0).plus(&b.scaled(-3.0))).unwrap();
    let expected = va.scaled(2.0).axpy(-3.0, &vb);
    let scale = combo.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max_abs_diff(&combo, &expected) <= 1e-9 * scale.max(1.0));
    for &i in mesh.boundary_nodes() {
        assert_eq!(va[i], 0.0);
    }
}

#[test]
fn boundary_traces_recover_perturbation() {
    let mesh = Mesh::square(6).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let pert = direction(&mesh);
    let g1 = BoundaryField::constant(&mesh, 1.0);
    let g2 = BoundaryField::from_fn(&mesh, |p| 2.5 + 0.3 * p[0]);
    let dh: Vec<NodalField> = [&g1, &g2]
        .iter()
        .map(|g| {
            let (u, _) = solve_semilinear(&mesh, &coeffs, g, &tight()).unwrap();
            let v = solve_sensitivity(&mesh, &coeffs, &u, &pert).unwrap();
            datum_derivative(&coeffs, &u, &v, &pert).unwrap()
        })
        .collect();
    let (ds, dm) = boundary_traces(&mesh, &dh[0], &dh[1], &g1, &g2, &coeffs.gruneisen).unwrap();
    for (node, value) in ds.iter() {
        assert!((value - pert.d_sigma[node]).abs() < 1e-10);
    }
    for (node, value) in dm.iter() {
        assert!((value - pert.d_mu[node]).abs() < 1e-10);
    }
}
