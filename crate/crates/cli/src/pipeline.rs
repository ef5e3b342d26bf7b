//! Synthetic data generation, reconstruction runs and experiment sweeps.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twophoton_core::fem::transfer_field;
use twophoton_core::forward::{add_noise_stream, compute_datum, SemilinearOperator};
use twophoton_core::metrics::relative_l2_error;
use twophoton_core::recon_direct::{recover_mu_joint, recover_pair};
use twophoton_core::recon_lsq::{run_lsq_on, LsqProblem};
use twophoton_core::{
    BoundaryField, CoefficientSet, DatumMeta, DatumSet, LsqConfig, Mesh, NewtonConfig, NodalField, SolverReport,
    Unknowns,
};

use crate::config::{Algorithm, ExperimentConfig, Targets};
use crate::error::{CliError, CliResult, Context};

/// Experiments I–IV: (direct | least squares) × (μ only | σ and μ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    I,
    II,
    III,
    IV,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [Experiment::I, Experiment::II, Experiment::III, Experiment::IV];

    pub fn algorithm(self) -> Algorithm {
        match self {
            Experiment::I | Experiment::III => Algorithm::Direct,
            Experiment::II | Experiment::IV => Algorithm::Lsq,
        }
    }

    pub fn targets(self) -> Targets {
        match self {
            Experiment::I | Experiment::II => Targets::Mu,
            Experiment::III | Experiment::IV => Targets::Both,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::I => "I",
            Experiment::II => "II",
            Experiment::III => "III",
            Experiment::IV => "IV",
        })
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Experiment::I),
            "II" | "2" => Ok(Experiment::II),
            "III" | "3" => Ok(Experiment::III),
            "IV" | "4" => Ok(Experiment::IV),
            _ => Err(format!("unknown experiment {s:?}; expected I, II, III or IV")),
        }
    }
}

/// Clean synthetic data on the reconstruction mesh, plus the truth
/// sampled there.
pub struct Synthetic {
    pub mesh: Mesh,
    pub truth: CoefficientSet,
    pub sources: Vec<BoundaryField>,
    pub clean: Vec<NodalField>,
}

impl Synthetic {
    /// Data with multiplicative noise; source `j` draws from stream `j` of
    /// `seed`, so realizations do not depend on scheduling.
    pub fn noisy(&self, epsilon: f64, seed: u64) -> CliResult<DatumSet> {
        let data = self
            .clean
            .iter()
            .enumerate()
            .map(|(j, h)| add_noise_stream(h, epsilon, seed, j as u64))
            .collect::<twophoton_core::Result<Vec<_>>>()
            .context(|| format!("noise at level {epsilon}"))?;
        let meta = vec![
            DatumMeta {
                noise_level: epsilon,
                seed: Some(seed),
            };
            data.len()
        ];
        DatumSet::new(self.sources.clone(), data, meta).context(|| "datum set".into())
    }

    pub fn clean_set(&self) -> CliResult<DatumSet> {
        DatumSet::noiseless(self.sources.clone(), self.clean.clone()).context(|| "datum set".into())
    }
}

/// Forward states and data on the data mesh.
pub struct ForwardData {
    pub mesh: Mesh,
    pub states: Vec<NodalField>,
    pub data: Vec<NodalField>,
    pub reports: Vec<SolverReport>,
}

fn square(n: usize) -> CliResult<Mesh> {
    Mesh::square(n).context(|| format!("building the {n}×{n} mesh"))
}

pub fn forward_solve(cfg: &ExperimentConfig, mesh: Mesh) -> CliResult<ForwardData> {
    let truth = cfg.phantom.coefficients(&mesh);
    let newton = cfg.newton.resolve();
    let op = SemilinearOperator::new(&mesh, &truth.diffusion).context(|| "forward operator".into())?;
    let solved = cfg
        .sources
        .par_iter()
        .enumerate()
        .map(|(j, spec)| {
            let g = spec.on(&mesh);
            let (u, report) = op
                .solve(&truth.single_photon, &truth.two_photon, &g, &newton)
                .context(|| format!("forward solve for source {j}"))?;
            let h = compute_datum(&truth, &u).context(|| format!("datum for source {j}"))?;
            Ok((u, h, report))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = ForwardData {
        mesh,
        states: Vec::new(),
        data: Vec::new(),
        reports: Vec::new(),
    };
    for (u, h, r) in solved {
        out.states.push(u);
        out.data.push(h);
        out.reports.push(r);
    }
    Ok(out)
}

/// Generates data on the data mesh and moves them to the reconstruction
/// mesh when the two differ.
pub fn synthesize(cfg: &ExperimentConfig) -> CliResult<Synthetic> {
    let mesh = square(cfg.mesh_n)?;
    let forward = forward_solve(cfg, square(cfg.data_mesh_n())?)?;
    let clean = if cfg.crime_free() {
        forward
            .data
            .iter()
            .map(|h| transfer_field(&forward.mesh, h, &mesh))
            .collect::<twophoton_core::Result<Vec<_>>>()
            .context(|| "transferring data to the reconstruction mesh".into())?
    } else {
        forward.data
    };
    Ok(Synthetic {
        truth: cfg.phantom.coefficients(&mesh),
        sources: cfg.sources.iter().map(|s| s.on(&mesh)).collect(),
        mesh,
        clean,
    })
}

/// Reconstructed coefficients plus the diagnostics file each method emits.
pub struct Reconstruction {
    pub sigma: NodalField,
    pub mu: NodalField,
    pub sigma_clipped: Option<NodalField>,
    pub mu_clipped: Option<NodalField>,
    /// (file suffix, CSV contents)
    pub diagnostics: Option<(&'static str, String)>,
}

/// Resolved least-squares configuration, with κ fixed from the clean data
/// unless given explicitly.
pub fn lsq_config(cfg: &ExperimentConfig, targets: Targets, clean: &DatumSet) -> LsqConfig {
    let unknowns = match targets {
        Targets::Mu => Unknowns::MuOnly,
        Targets::Both => Unknowns::Both,
    };
    let mut lsq = cfg.lsq.resolve(unknowns, cfg.newton.resolve());
    lsq.kappa = cfg.lsq.kappa.unwrap_or_else(|| LsqConfig::default_kappa(clean));
    lsq
}

pub fn initial_guess(cfg: &ExperimentConfig, mesh: &Mesh) -> (NodalField, NodalField) {
    let s = cfg.lsq.init_sigma.unwrap_or(cfg.phantom.sigma.background);
    let m = cfg.lsq.init_mu.unwrap_or(cfg.phantom.mu.background);
    (NodalField::constant(mesh, s), NodalField::constant(mesh, m))
}

pub fn reconstruct(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    targets: Targets,
    mesh: &Mesh,
    truth: &CoefficientSet,
    data: &DatumSet,
    lsq: &LsqConfig,
) -> CliResult<Reconstruction> {
    let (gamma, diffusion) = (&truth.gruneisen, &truth.diffusion);
    match (algorithm, targets) {
        (Algorithm::Direct, Targets::Mu) => {
            let (mu, _) = recover_mu_joint(mesh, gamma, diffusion, &truth.single_photon, data)
                .context(|| "direct reconstruction of mu".into())?;
            Ok(Reconstruction {
                sigma: truth.single_photon.clone(),
                mu_clipped: Some(mu.map(|v| v.max(0.0))),
                mu,
                sigma_clipped: None,
                diagnostics: None,
            })
        }
        (Algorithm::Direct, Targets::Both) => {
            let pair = recover_pair(mesh, gamma, diffusion, data).context(|| "direct reconstruction".into())?;
            let diagnostics = Some(("condition", pair.condition_csv()));
            Ok(Reconstruction {
                sigma: pair.sigma,
                mu: pair.mu,
                sigma_clipped: Some(pair.sigma_clipped),
                mu_clipped: Some(pair.mu_clipped),
                diagnostics,
            })
        }
        (Algorithm::Lsq, _) => {
            let (mut sigma0, mu0) = initial_guess(cfg, mesh);
            if targets == Targets::Mu {
                sigma0 = truth.single_photon.clone();
            }
            let problem = LsqProblem::new(mesh, gamma, diffusion, data, lsq.kappa, lsq.newton)
                .context(|| "least-squares setup".into())?;
            let result =
                run_lsq_on(&problem, (&sigma0, &mu0), lsq).context(|| "least-squares reconstruction".into())?;
            Ok(Reconstruction {
                sigma: result.sigma,
                mu: result.mu,
                sigma_clipped: None,
                mu_clipped: None,
                diagnostics: Some(("lsq_report", result.report.to_csv())),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub coefficient: &'static str,
    pub noise: f64,
    /// `None` for noiseless runs, which do not depend on the seed.
    pub seed: Option<u64>,
    /// Relative L² error in percent.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub label: String,
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// Mean relative error for one coefficient and noise level.
    pub fn mean(&self, coefficient: &str, noise: f64) -> Option<f64> {
        let sel: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.coefficient == coefficient && r.noise == noise)
            .map(|r| r.error)
            .collect();
        (!sel.is_empty()).then(|| sel.iter().sum::<f64>() / sel.len() as f64)
    }

    fn keys(&self) -> Vec<(&'static str, f64)> {
        let mut keys: Vec<(&'static str, f64)> = Vec::new();
        for r in &self.rows {
            if !keys.iter().any(|&(c, e)| c == r.coefficient && e == r.noise) {
                keys.push((r.coefficient, r.noise));
            }
        }
        keys
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("run,coefficient,noise,seed,relative_l2_error\n");
        for r in &self.rows {
            let seed = r.seed.map_or_else(|| "none".to_string(), |v| v.to_string());
            writeln!(s, "{},{},{},{seed},{:?}", self.label, r.coefficient, r.noise, r.error).unwrap();
        }
        for (c, e) in self.keys() {
            writeln!(s, "{},{c},{e},mean,{:?}", self.label, self.mean(c, e).unwrap()).unwrap();
        }
        s
    }
}

impl fmt::Display for ErrorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, e) in self.keys() {
            writeln!(f, "{} {c:>5} eps={e:<4} mean relative L2 error {:.3}%", self.label, self.mean(c, e).unwrap())?;
        }
        Ok(())
    }
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write(path: PathBuf, contents: &str) -> CliResult<()> {
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

fn write_field(dir: &Path, name: &str, field: &NodalField) -> CliResult<()> {
    write(dir.join(format!("{name}.csv")), &field.to_csv())
}

/// Run manifest: the effective configuration and everything else needed to
/// reproduce the outputs byte for byte.
pub fn write_manifest(dir: &Path, command: &str, cfg: &ExperimentConfig, extra: &[(&str, String)]) -> CliResult<()> {
    let mut s = String::new();
    writeln!(s, "# twophoton run manifest").unwrap();
    writeln!(s, "command = {command:?}").unwrap();
    writeln!(s, "twophoton_cli = {:?}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "twophoton_core = {:?}", twophoton_core::VERSION).unwrap();
    writeln!(s, "seeds = {:?}", cfg.seeds).unwrap();
    writeln!(s, "noise_levels = {:?}", cfg.noise_levels).unwrap();
    writeln!(s, "crime_free = {}", cfg.crime_free()).unwrap();
    writeln!(s, "noise_streams = \"source index\"").unwrap();
    for (k, v) in extra {
        writeln!(s, "{k} = {v}").unwrap();
    }
    writeln!(s, "\n# effective configuration\n{}", cfg.to_toml()).unwrap();
    write(dir.join("manifest.txt"), &s)
}

fn eps_tag(eps: f64) -> String {
    format!("eps{eps}")
}

/// Writes the data mesh, `u_j`, clean `H_j`, one noisy `H_j` per noise level
/// (all drawn with `seed`) and a solver report.
pub fn run_forward(cfg: &ExperimentConfig, out: &Path, seed: u64) -> CliResult<ForwardData> {
    cfg.validate()?;
    create_dir(out)?;
    let forward = forward_solve(cfg, square(cfg.data_mesh_n())?)?;
    write(out.join("mesh.txt"), &forward.mesh.to_text())?;
    let mut report = String::from("source,iterations,final_residual,converged\n");
    for (j, (u, h)) in forward.states.iter().zip(&forward.data).enumerate() {
        write_field(out, &format!("u_src{j}"), u)?;
        write_field(out, &format!("H_src{j}_clean"), h)?;
        for &eps in &cfg.noise_levels {
            let noisy = add_noise_stream(h, eps, seed, j as u64).context(|| format!("noise at level {eps}"))?;
            write_field(out, &format!("H_src{j}_{}", eps_tag(eps)), &noisy)?;
        }
        let r = &forward.reports[j];
        let last = r.residual_history.last().copied().unwrap_or(0.0);
        writeln!(report, "{j},{},{last:?},{}", r.iterations, r.converged).unwrap();
    }
    write(out.join("forward_report.csv"), &report)?;
    write_manifest(out, "forward", cfg, &[("seed", seed.to_string())])?;
    Ok(forward)
}

/// Loads data written by [`run_forward`] at noise level `eps`, moving them
/// to the reconstruction mesh if needed.
pub fn load_data(cfg: &ExperimentConfig, dir: &Path, eps: f64) -> CliResult<Synthetic> {
    let data_mesh = Mesh::load(dir.join("mesh.txt")).context(|| "loading the data mesh".into())?;
    let mesh = square(cfg.mesh_n)?;
    let mut clean = Vec::with_capacity(cfg.sources.len());
    for j in 0..cfg.sources.len() {
        let path = dir.join(format!("H_src{j}_{}.csv", eps_tag(eps)));
        let h = NodalField::load_csv(&path).context(|| format!("loading {}", path.display()))?;
        let h = if data_mesh == mesh {
            h.check_mesh(&mesh, "datum").context(|| format!("datum {}", path.display()))?;
            h
        } else {
            transfer_field(&data_mesh, &h, &mesh).context(|| format!("transferring {}", path.display()))?
        };
        clean.push(h);
    }
    Ok(Synthetic {
        truth: cfg.phantom.coefficients(&mesh),
        sources: cfg.sources.iter().map(|s| s.on(&mesh)).collect(),
        mesh,
        clean,
    })
}

fn error_rows(rec: &Reconstruction, truth: &CoefficientSet, mesh: &Mesh, targets: Targets, noise: f64, seed: Option<u64>) -> CliResult<Vec<ErrorRow>> {
    let mut rows = Vec::new();
    if targets == Targets::Both {
        rows.push(ErrorRow {
            coefficient: "sigma",
            noise,
            seed,
            error: relative_l2_error(&rec.sigma, &truth.single_photon, mesh).context(|| "sigma error".into())?,
        });
    }
    rows.push(ErrorRow {
        coefficient: "mu",
        noise,
        seed,
        error: relative_l2_error(&rec.mu, &truth.two_photon, mesh).context(|| "mu error".into())?,
    });
    Ok(rows)
}

fn write_reconstruction(dir: &Path, prefix: &str, rec: &Reconstruction, targets: Targets) -> CliResult<()> {
    if targets == Targets::Both {
        write_field(dir, &format!("{prefix}sigma"), &rec.sigma)?;
        if let Some(c) = &rec.sigma_clipped {
            write_field(dir, &format!("{prefix}sigma_clipped"), c)?;
        }
    }
    write_field(dir, &format!("{prefix}mu"), &rec.mu)?;
    if let Some(c) = &rec.mu_clipped {
        write_field(dir, &format!("{prefix}mu_clipped"), c)?;
    }
    if let Some((name, csv)) = &rec.diagnostics {
        write(dir.join(format!("{prefix}{name}.csv")), csv)?;
    }
    Ok(())
}

/// One reconstruction from either a forward-run directory or freshly
/// generated data, at noise level `eps` drawn with `seed`.
pub fn run_reconstruction(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    data_dir: Option<&Path>,
    eps: f64,
    seed: u64,
    out: &Path,
) -> CliResult<ErrorTable> {
    cfg.validate()?;
    create_dir(out)?;
    let (syn, data) = match data_dir {
        Some(dir) => {
            let syn = load_data(cfg, dir, eps)?;
            let data = syn.clean_set()?;
            (syn, data)
        }
        None => {
            let syn = synthesize(cfg)?;
            let data = syn.noisy(eps, seed)?;
            (syn, data)
        }
    };
    let lsq = lsq_config(cfg, cfg.targets, &data);
    let rec = reconstruct(cfg, algorithm, cfg.targets, &syn.mesh, &syn.truth, &data, &lsq)?;
    write_reconstruction(out, "", &rec, cfg.targets)?;
    let seed_used = (data_dir.is_none() && eps > 0.0).then_some(seed);
    let table = ErrorTable {
        label: format!("{algorithm:?}").to_lowercase(),
        rows: error_rows(&rec, &syn.truth, &syn.mesh, cfg.targets, eps, seed_used)?,
    };
    write(out.join("errors.csv"), &table.to_csv())?;
    let mut extra = vec![
        ("algorithm", format!("{:?}", format!("{algorithm:?}").to_lowercase())),
        ("noise", format!("{eps}")),
        ("seed", seed.to_string()),
    ];
    if let Some(dir) = data_dir {
        extra.push(("data_dir", format!("{:?}", dir.display().to_string())));
    }
    if algorithm == Algorithm::Lsq {
        extra.push(("kappa_used", format!("{:?}", lsq.kappa)));
    }
    write_manifest(out, "reconstruct", cfg, &extra)?;
    Ok(table)
}

/// Sweeps the configured noise levels and seeds for one experiment. The
/// noiseless case runs once. Jobs run in parallel and write
/// `<experiment>_<eps>_<seed>_<field>.csv`, then the error table is
/// written as `errors_<experiment>.csv`.
pub fn run_experiment(which: Experiment, cfg: &ExperimentConfig, out: &Path) -> CliResult<ErrorTable> {
    cfg.validate()?;
    if which.targets() == Targets::Both && cfg.sources.len() < 2 {
        return Err(CliError::config("sources", "experiments III and IV need at least 2 sources"));
    }
    if which.algorithm() == Algorithm::Direct {
        if let Some(k) = cfg.sources.iter().position(|s| !(s.min_on_boundary() > 0.0)) {
            return Err(CliError::config(
                format!("sources[{k}]"),
                "the direct algorithm needs a strictly positive source on the whole boundary",
            ));
        }
    }
    create_dir(out)?;
    let syn = synthesize(cfg)?;
    let clean = syn.clean_set()?;
    let lsq = lsq_config(cfg, which.targets(), &clean);

    let mut jobs: Vec<(f64, Option<u64>)> = Vec::new();
    for &eps in &cfg.noise_levels {
        if eps == 0.0 {
            jobs.push((eps, None));
        } else {
            jobs.extend(cfg.seeds.iter().map(|&s| (eps, Some(s))));
        }
    }
    let results = jobs
        .par_iter()
        .map(|&(eps, seed)| {
            let ctx = || match seed {
                Some(s) => format!("experiment {which}, eps={eps}, seed={s}"),
                None => format!("experiment {which}, eps={eps}"),
            };
            let data = match seed {
                Some(s) => syn.noisy(eps, s)?,
                None => clean.clone(),
            };
            let rec = reconstruct(cfg, which.algorithm(), which.targets(), &syn.mesh, &syn.truth, &data, &lsq)
                .map_err(|e| match e {
                    CliError::Core { context, source } => CliError::Core {
                        context: format!("{}: {context}", ctx()),
                        source,
                    },
                    other => other,
                })?;
            let tag = seed.map_or_else(|| "clean".to_string(), |s| format!("seed{s}"));
            write_reconstruction(out, &format!("{which}_{}_{tag}_", eps_tag(eps)), &rec, which.targets())?;
            error_rows(&rec, &syn.truth, &syn.mesh, which.targets(), eps, seed)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let table = ErrorTable {
        label: which.to_string(),
        rows: results.into_iter().flatten().collect(),
    };
    write(out.join(format!("errors_{which}.csv")), &table.to_csv())?;
    let mut extra = vec![("experiment", format!("{:?}", which.to_string()))];
    if which.algorithm() == Algorithm::Lsq {
        extra.push(("kappa_used", format!("{:?}", lsq.kappa)));
    }
    write_manifest(out, &format!("experiment {which}"), cfg, &extra)?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    /// (finite difference, adjoint, relative error) per direction.
    pub rows: Vec<(f64, f64, f64)>,
}

impl GradientCheck {
    pub fn max_relative_error(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.2))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("direction,finite_difference,adjoint,relative_error\n");
        for (k, (fd, adj, rel)) in self.rows.iter().enumerate() {
            writeln!(s, "{k},{fd:?},{adj:?},{rel:?}").unwrap();
        }
        s
    }
}

/// Compares the adjoint gradient of the misfit with central differences
/// of step `step` along `directions` random directions, at the initial
/// guess on clean data.
pub fn gradient_check(cfg: &ExperimentConfig, seed: u64, directions: usize, step: f64) -> CliResult<GradientCheck> {
    cfg.validate()?;
    let syn = synthesize(cfg)?;
    let data = syn.clean_set()?;
    let lsq = lsq_config(cfg, Targets::Both, &data);
    let newton = NewtonConfig {
        residual_tol: 1e-13,
        ..lsq.newton
    };
    let mesh = &syn.mesh;
    let problem = LsqProblem::new(mesh, &syn.truth.gruneisen, &syn.truth.diffusion, &data, lsq.kappa, newton)
        .context(|| "gradient check setup".into())?;
    let (sigma, mu) = initial_guess(cfg, mesh);
    let (_, grad) = problem.gradient(&sigma, &mu).context(|| "adjoint gradient".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mesh.num_nodes();
    let mut rows = Vec::with_capacity(directions);
    for k in 0..directions {
        let mut draw = |scale: f64| NodalField::new((0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect());
        let ds = draw(cfg.phantom.sigma.background);
        let dm = draw(cfg.phantom.mu.background);
        let phi = |t: f64| {
            problem
                .objective(&sigma.axpy(t, &ds), &mu.axpy(t, &dm))
                .map(|o| o.value)
                .context(|| format!("objective along direction {k}"))
        };
        let fd = (phi(step)? - phi(-step)?) / (2.0 * step);
        let adjoint = problem.inner(&grad.sigma, &ds) + problem.inner(&grad.mu, &dm);
        let rel = (fd - adjoint).abs() / adjoint.abs().max(f64::MIN_POSITIVE);
        rows.push((fd, adjoint, rel));
    }
    Ok(GradientCheck { rows })
}

/// Parses a mesh argument: an integer `n` is the n×n square mesh,
/// anything else a mesh file.
pub fn mesh_arg(arg: &str) -> CliResult<Mesh> {
    match arg.parse::<usize>() {
        Ok(n) if n > 0 => square(n),
        Ok(_) => Err(CliError::config("mesh", "mesh size must be at least 1")),
        Err(_) => Mesh::load(arg).context(|| format!("loading mesh {arg}")),
    }
}
