mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twophoton_core::recon_lsq::{run_lsq, LsqProblem};
use twophoton_core::{LsqConfig, Mesh, NewtonConfig, NodalField, Unknowns};

fn tight() -> NewtonConfig {
    NewtonConfig {
        residual_tol: 1e-14,
        ..NewtonConfig::default()
    }
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> NodalField {
    NodalField::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn check_gradient(kappa: f64, trial_shift: f64) {
    let mesh = Mesh::square(8).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let (data, _) = common::clean_data(&mesh, &coeffs, common::sources(&mesh));
    let problem = LsqProblem::new(&mesh, &coeffs.gruneisen, &coeffs.diffusion, &data, kappa, tight()).unwrap();
    let sigma = coeffs.single_photon.map(|v| v * (1.0 + trial_shift));
    let mu = NodalField::from_fn(&mesh, |p| 0.8 + trial_shift * p[0]);
    let (_, grad) = problem.gradient(&sigma, &mu).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let t = 1e-6;
    let n = mesh.num_nodes();
    for _ in 0..20 {
        let (ds, dm) = (random_direction(&mut rng, n), random_direction(&mut rng, n).scaled(0.1));
        let phi = |s: f64| {
            problem
                .objective(&sigma.axpy(s, &ds.scaled(0.01)), &mu.axpy(s, &dm))
                .unwrap()
                .value
        };
        let fd = (phi(t) - phi(-t)) / (2.0 * t);
        let analytic = problem.inner(&grad.sigma, &ds.scaled(0.01)) + problem.inner(&grad.mu, &dm);
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-300);
        assert!(rel <= 1e-4, "fd {fd} vs adjoint {analytic} (rel {rel})");
    }
}

#[test]
fn adjoint_gradient_matches_finite_differences() {
    check_gradient(0.0, 0.3);
}

#[test]
fn regularized_gradient_matches_finite_differences() {
    check_gradient(1e-3, 0.3);
}

#[test]
fn regularizer_gradient_alone_at_exact_coefficients() {
    // at the truth every misfit vanishes, leaving only the smoothness term
    let mesh = Mesh::square(8).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let (data, _) = common::clean_data(&mesh, &coeffs, common::sources(&mesh));
    let kappa = 0.5;
    let problem = LsqProblem::new(&mesh, &coeffs.gruneisen, &coeffs.diffusion, &data, kappa, tight()).unwrap();
    let (value, grad) = problem.gradient(&coeffs.single_photon, &coeffs.two_photon).unwrap();
    assert!(value.misfits.iter().all(|&m| m < 1e-20));
    let dir = NodalField::from_fn(&mesh, |p| (p[0] * 2.0).sin() * p[1]);
    let t = 1e-6;
    let phi = |s: f64| problem.objective(&coeffs.single_photon.axpy(s, &dir), &coeffs.two_photon).unwrap().value;
    let fd = (phi(t) - phi(-t)) / (2.0 * t);
    let analytic = problem.inner(&grad.sigma, &dir);
    assert!((fd - analytic).abs() <= 1e-4 * analytic.abs());
}

#[test]
fn noiseless_fit_drives_misfit_down() {
    let mesh = Mesh::square(8).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let (data, _) = common::clean_data(&mesh, &coeffs, common::sources(&mesh));
    let sigma0 = NodalField::constant(&mesh, 0.25);
    let mu0 = NodalField::constant(&mesh, 0.7);
    let cfg = LsqConfig {
        max_iterations: 2000,
        grad_tol: 1e-12,
        ..LsqConfig::default()
    };
    let result = run_lsq(&mesh, (&coeffs.gruneisen, &coeffs.diffusion), &data, (&sigma0, &mu0), &cfg).unwrap();
    let hist = &result.report.objective_history;
    assert!(hist.last().unwrap() <= &(1e-10 * hist[0]), "{} -> {}", hist[0], hist.last().unwrap());
    assert!(hist.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn mu_only_leaves_sigma_fixed() {
    let mesh = Mesh::square(8).unwrap();
    let coeffs = common::smooth_phantom(&mesh);
    let (data, _) = common::clean_data(&mesh, &coeffs, common::sources(&mesh));
    let mu0 = NodalField::constant(&mesh, 0.7);
    let cfg = LsqConfig {
        unknowns: Unknowns::MuOnly,
        ..LsqConfig::default()
    };
    let result = run_lsq(&mesh, (&coeffs.gruneisen, &coeffs.diffusion), &data, (&coeffs.single_photon, &mu0), &cfg)
        .unwrap();
    assert_eq!(result.sigma, coeffs.single_photon);
    let err = twophoton_core::metrics::relative_l2_error(&result.mu, &coeffs.two_photon, &mesh).unwrap();
    assert!(err < 0.1, "mu error {err}%");
}
