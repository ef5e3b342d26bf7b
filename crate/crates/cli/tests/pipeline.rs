use std::path::Path;
use std::process::Command;

use twophoton_cli::pipeline::{run_experiment, run_forward, run_reconstruction};
use twophoton_cli::{Algorithm, ExperimentConfig, Experiment, SourceSpec};
use twophoton_core::fem::transfer_field;
use twophoton_core::{Mesh, NodalField};

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn small(n: usize) -> ExperimentConfig {
    ExperimentConfig {
        mesh_n: n,
        ..ExperimentConfig::default()
    }
}

#[test]
fn minimal_forward_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        sources: vec![SourceSpec {
            constant: 1.0,
            gradient: [0.0, 0.0],
        }],
        targets: twophoton_cli::Targets::Mu,
        noise_levels: vec![0.0],
        ..small(4)
    };
    run_forward(&cfg, dir.path(), 1).unwrap();
    assert_eq!(
        files(dir.path()),
        ["H_src0_clean.csv", "H_src0_eps0.csv", "forward_report.csv", "manifest.txt", "mesh.txt", "u_src0.csv"]
    );
    let report = std::fs::read_to_string(dir.path().join("forward_report.csv")).unwrap();
    assert!(report.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn forward_file_counts_and_reproducibility() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = small(8);
    run_forward(&cfg, a.path(), 7).unwrap();
    run_forward(&cfg, b.path(), 7).unwrap();
    let names = files(a.path());
    assert_eq!(names.iter().filter(|f| f.ends_with("_clean.csv")).count(), 4);
    assert_eq!(names.iter().filter(|f| f.contains("_eps")).count(), 16);
    for f in &names {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn transfer_identity_and_constants() {
    let (m8, m5) = (Mesh::square(8).unwrap(), Mesh::square(5).unwrap());
    let f = NodalField::from_fn(&m8, |p| (3.0 * p[0]).sin() + p[1]);
    assert_eq!(transfer_field(&m8, &f, &m8).unwrap(), f);
    let c = transfer_field(&m8, &NodalField::constant(&m8, 2.5), &m5).unwrap();
    assert!(c.values().iter().all(|v| (v - 2.5).abs() < 1e-14));
}

#[test]
fn direct_experiments_replicate_reference_levels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        noise_levels: vec![0.0, 2.0],
        ..ExperimentConfig::default()
    };
    let i = run_experiment(Experiment::I, &cfg, dir.path()).unwrap();
    assert!(i.mean("mu", 0.0).unwrap() <= 1.0);
    let iii = run_experiment(Experiment::III, &cfg, dir.path()).unwrap();
    assert!(iii.mean("sigma", 0.0).unwrap() <= 1.0 && iii.mean("mu", 0.0).unwrap() <= 1.0);
    let (s, m) = (iii.mean("sigma", 2.0).unwrap(), iii.mean("mu", 2.0).unwrap());
    assert!((1.56 / 2.0..=1.56 * 2.0).contains(&s), "sigma {s}%");
    assert!((5.55 / 2.0..=5.55 * 2.0).contains(&m), "mu {m}%");
    // 1 noiseless + 10 seeded jobs, two coefficients each, plus 2 × 2 means
    let csv = std::fs::read_to_string(dir.path().join("errors_III.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 22 + 4);
}

#[test]
fn crime_free_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        data_mesh_n: Some(64),
        noise_levels: vec![0.0],
        ..ExperimentConfig::default()
    };
    assert!(cfg.crime_free());
    let t = run_experiment(Experiment::III, &cfg, dir.path()).unwrap();
    let (s, m) = (t.mean("sigma", 0.0).unwrap(), t.mean("mu", 0.0).unwrap());
    println!("crime-free n=64 -> n=32: sigma {s:.3}%, mu {m:.3}%");
    assert!(s <= 3.0 && m <= 3.0, "sigma {s}%, mu {m}%");
    assert!(s > 0.0 && m > 0.0);
}

#[test]
fn reconstruction_from_forward_directory() {
    let (data, out) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = ExperimentConfig {
        noise_levels: vec![0.0],
        ..small(12)
    };
    run_forward(&cfg, data.path(), 1).unwrap();
    let table = run_reconstruction(&cfg, Algorithm::Direct, Some(data.path()), 0.0, 1, out.path()).unwrap();
    assert!(table.mean("mu", 0.0).unwrap() < 1e-6);
    for f in ["sigma.csv", "mu.csv", "sigma_clipped.csv", "mu_clipped.csv", "condition.csv", "errors.csv", "manifest.txt"] {
        assert!(out.path().join(f).exists(), "{f}");
    }
}

fn twophoton(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_twophoton")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let mut cfg = small(6);
    cfg.noise_levels = vec![0.0];
    let good = dir.path().join("good.toml");
    std::fs::write(&good, cfg.to_toml()).unwrap();
    let ok = twophoton(&["--threads", "1", "recon-direct", "--config", good.to_str().unwrap(), "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, cfg.to_toml().replace("mesh_n = 6", "mesh_n = 0")).unwrap();
    let invalid = twophoton(&["forward", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(invalid.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("mesh_n"));

    cfg.newton.max_iterations = Some(1);
    cfg.newton.residual_tol = Some(1e-300);
    let stiff = dir.path().join("stiff.toml");
    std::fs::write(&stiff, cfg.to_toml()).unwrap();
    let failed = twophoton(&["forward", "--config", stiff.to_str().unwrap(), "--out", out]);
    assert_eq!(failed.status.code(), Some(2), "{}", String::from_utf8_lossy(&failed.stderr));
}

#[test]
fn binary_mesh_and_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(twophoton(&["mesh", "--n", "4", "--out", out]).status.success());
    let mesh = Mesh::load(dir.path().join("square_4.mesh")).unwrap();
    assert_eq!(mesh, Mesh::square(4).unwrap());

    let field = dir.path().join("f.csv");
    NodalField::constant(&mesh, 1.25).save_csv(&field).unwrap();
    let mesh_path = dir.path().join("square_4.mesh");
    let status = twophoton(&[
        "transfer",
        "--from",
        mesh_path.to_str().unwrap(),
        "--to",
        "7",
        "--field",
        field.to_str().unwrap(),
        "--out",
        out,
    ]);
    assert!(status.status.success());
    let moved = NodalField::load_csv(dir.path().join("transferred.csv")).unwrap();
    assert_eq!(moved.len(), 64);
}
