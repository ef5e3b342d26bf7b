use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twophoton_core::fem::{
    apply_dirichlet, assemble_load, assemble_stiffness, assemble_weighted_mass, solve_linear, SparseMatrix,
};
use twophoton_core::{Mesh, NodalField};

/// Seven-point rule exact for polynomials of degree 5 on a triangle, as
/// (barycentric point, weight) with weights summing to one.
fn degree5_rule() -> Vec<([f64; 3], f64)> {
    let (a1, b1, w1) = (0.059715871789770, 0.470142064105115, 0.132394152788506);
    let (a2, b2, w2) = (0.797426985353087, 0.101286507323456, 0.125939180544827);
    vec![
        ([1.0 / 3.0; 3], 0.225),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

fn point(mesh: &Mesh, t: usize, bary: [f64; 3]) -> [f64; 2] {
    let tri = mesh.triangles()[t];
    let mut p = [0.0; 2];
    for a in 0..3 {
        let q = mesh.nodes()[tri[a]];
        p[0] += bary[a] * q[0];
        p[1] += bary[a] * q[1];
    }
    p
}

#[test]
fn weighted_mass_matches_quadrature_oracle() {
    let mesh = Mesh::square(2).unwrap();
    let weight = NodalField::from_fn(&mesh, |p| p[0]);
    let m = assemble_weighted_mass(&mesh, &weight).unwrap();

    let n = mesh.num_nodes();
    let mut oracle = vec![vec![0.0; n]; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        for (bary, w) in degree5_rule() {
            let x = point(&mesh, t, bary)[0];
            for a in 0..3 {
                for b in 0..3 {
                    oracle[tri[a]][tri[b]] += area * w * x * bary[a] * bary[b];
                }
            }
        }
    }
    let dense = m.to_dense();
    for i in 0..n {
        for j in 0..n {
            assert!((dense[i][j] - oracle[i][j]).abs() < 1e-12, "M[{i}][{j}]");
        }
    }
}

#[test]
fn p1_reproduces_linear_solution() {
    let mesh = Mesh::square(4).unwrap();
    let k = assemble_stiffness(&mesh, &NodalField::constant(&mesh, 1.0)).unwrap();
    let values: BTreeMap<_, _> = mesh.boundary_nodes().iter().map(|&i| (i, mesh.nodes()[i][0])).collect();
    let (a, b) = apply_dirichlet(&mesh, &k, &vec![0.0; mesh.num_nodes()], &values).unwrap();
    assert!(a.max_asymmetry() == 0.0);
    let u = solve_linear(&a, &b, 1e-14).unwrap();
    for (i, p) in mesh.nodes().iter().enumerate() {
        assert!((u[i] - p[0]).abs() < 1e-12, "node {i}");
    }
}

fn manufactured_error(n: usize) -> f64 {
    // -Δu + u = f with u = e^x cos y + x², so -Δu = -2
    let exact = |p: [f64; 2]| p[0].exp() * p[1].cos() + p[0] * p[0];
    let mesh = Mesh::square(n).unwrap();
    let mut a = assemble_stiffness(&mesh, &NodalField::constant(&mesh, 1.0)).unwrap();
    let mass = assemble_weighted_mass(&mesh, &NodalField::constant(&mesh, 1.0)).unwrap();
    for i in 0..mesh.num_nodes() {
        for (j, v) in mass.row(i) {
            a.add(i, j, v);
        }
    }
    let f = NodalField::from_fn(&mesh, |p| exact(p) - 2.0);
    let b = assemble_load(&mesh, &f).unwrap();
    let values: BTreeMap<_, _> = mesh.boundary_nodes().iter().map(|&i| (i, exact(mesh.nodes()[i]))).collect();
    let (a, b) = apply_dirichlet(&mesh, &a, &b, &values).unwrap();
    let u = solve_linear(&a, &b, 1e-13).unwrap();

    let mut err2 = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        for (bary, w) in degree5_rule() {
            let uh: f64 = (0..3).map(|k| bary[k] * u[tri[k]]).sum();
            err2 += area * w * (uh - exact(point(&mesh, t, bary))).powi(2);
        }
    }
    err2.sqrt()
}

#[test]
fn second_order_refinement() {
    let errors: Vec<f64> = [8, 16, 32].iter().map(|&n| manufactured_error(n)).collect();
    for w in errors.windows(2) {
        let rate = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&rate), "observed rate {rate} from {errors:?}");
    }
}

#[test]
fn cg_matches_dense_factorization() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 50;
    let b_mat = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let spd = b_mat.transpose() * &b_mat + DMatrix::identity(n, n) * (n as f64);
    let rhs = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let oracle = spd.clone().cholesky().unwrap().solve(&rhs);

    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| spd[(i, j)]).collect()).collect();
    let sparse = SparseMatrix::from_dense(&rows);
    let tol = 1e-10;
    let x = solve_linear(&sparse, rhs.as_slice(), tol).unwrap();
    let diff = (DVector::from_vec(x.clone()) - &oracle).norm() / oracle.norm();
    assert!(diff < 1e-8, "relative difference {diff}");
    let residual = DVector::from_vec(sparse.mul_vec(&x)) - &rhs;
    assert!(residual.norm() / rhs.norm() <= tol);
}

fn random_field(mesh: &Mesh, seed: u64, lo: f64, hi: f64) -> NodalField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    NodalField::new((0..mesh.num_nodes()).map(|_| rng.gen_range(lo..hi)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn assembled_matrices_symmetric(n in 1usize..12, seed in any::<u64>()) {
        let mesh = Mesh::square(n).unwrap();
        let gamma = random_field(&mesh, seed, 0.1, 5.0);
        let k = assemble_stiffness(&mesh, &gamma).unwrap();
        prop_assert!(k.max_asymmetry() <= 1e-14 * k.max_abs());
        let m = assemble_weighted_mass(&mesh, &gamma).unwrap();
        prop_assert!(m.max_asymmetry() <= 1e-14 * m.max_abs());
    }

    #[test]
    fn stiffness_positive_semidefinite(n in 1usize..12, seed in any::<u64>()) {
        let mesh = Mesh::square(n).unwrap();
        let gamma = random_field(&mesh, seed, 0.1, 5.0);
        let k = assemble_stiffness(&mesh, &gamma).unwrap();
        let x = random_field(&mesh, seed ^ 0x9e37_79b9, -1.0, 1.0);
        let quad: f64 = x.values().iter().zip(k.mul_vec(x.values())).map(|(a, b)| a * b).sum();
        let norm2: f64 = x.values().iter().map(|v| v * v).sum();
        prop_assert!(quad >= -1e-12 * norm2);
        let ones = k.mul_vec(&vec![1.0; mesh.num_nodes()]);
        prop_assert!(ones.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn positive_weight_mass_is_definite(n in 1usize..8, seed in any::<u64>()) {
        let mesh = Mesh::square(n).unwrap();
        let w = random_field(&mesh, seed, 0.01, 3.0);
        let m = assemble_weighted_mass(&mesh, &w).unwrap();
        let x = random_field(&mesh, seed.wrapping_add(1), -1.0, 1.0);
        let quad: f64 = x.values().iter().zip(m.mul_vec(x.values())).map(|(a, b)| a * b).sum();
        prop_assert!(quad > 0.0);
    }
}
