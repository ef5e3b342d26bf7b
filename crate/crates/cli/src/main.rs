use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twophoton_cli::pipeline::{self, mesh_arg};
use twophoton_cli::{Algorithm, CliError, CliResult, ExperimentConfig, Experiment};
use twophoton_core::fem::transfer_field;
use twophoton_core::NodalField;

#[derive(Parser)]
#[command(name = "twophoton", version, about = "Two-photon photoacoustic tomography: synthetic data and reconstructions")]
struct Cli {
    /// Worker threads (defaults to all cores); outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Use this single noise seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated noise levels overriding the configured list.
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
}

impl Common {
    fn load(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seeds = vec![seed];
        }
        if let Some(noise) = &self.noise {
            cfg.noise_levels = noise.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the structured square mesh used for reconstructions.
    Mesh {
        #[command(flatten)]
        common: Common,
        /// Cells per side, overriding the configuration.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Solve the forward problem and write states and clean/noisy data.
    Forward {
        #[command(flatten)]
        common: Common,
    },
    /// Direct reconstruction at one noise level.
    ReconDirect {
        #[command(flatten)]
        common: Common,
        /// Directory written by `forward`; data are generated when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Least-squares reconstruction at one noise level.
    ReconLsq {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Compare the adjoint gradient with central finite differences.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        directions: usize,
        #[arg(long, default_value_t = 1e-6)]
        step: f64,
    },
    /// Run experiment I, II, III or IV over the noise levels and seeds.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = clap::value_parser!(Experiment))]
        which: Experiment,
    },
    /// Interpolate a nodal field from one mesh onto another.
    Transfer {
        /// Source mesh: a mesh file or a cell count n for the n×n square.
        #[arg(long)]
        from: String,
        /// Target mesh, in the same forms as --from.
        #[arg(long)]
        to: String,
        /// Nodal field CSV on the source mesh.
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn create(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn single_noise(cfg: &ExperimentConfig) -> CliResult<f64> {
    match cfg.noise_levels.as_slice() {
        [eps] => Ok(*eps),
        _ => Err(CliError::config("noise", "a single reconstruction needs exactly one noise level (use --noise)")),
    }
}

fn reconstruct(common: &Common, data: Option<&Path>, algorithm: Algorithm) -> CliResult<()> {
    let cfg = common.load()?;
    let eps = single_noise(&cfg)?;
    let table = pipeline::run_reconstruction(&cfg, algorithm, data, eps, cfg.seeds[0], &common.out)?;
    print!("{table}");
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Mesh { common, n } => {
            let cfg = common.load()?;
            let n = n.unwrap_or(cfg.mesh_n);
            let mesh = mesh_arg(&n.to_string())?;
            create(&common.out)?;
            let path = common.out.join(format!("square_{n}.mesh"));
            mesh.save(&path).map_err(|source| CliError::Core {
                context: "writing the mesh".into(),
                source,
            })?;
            println!("wrote {}", path.display());
        }
        Command::Forward { common } => {
            let cfg = common.load()?;
            let forward = pipeline::run_forward(&cfg, &common.out, cfg.seeds[0])?;
            for (j, r) in forward.reports.iter().enumerate() {
                println!("source {j}: {} Newton iterations", r.iterations);
            }
        }
        Command::ReconDirect { common, data } => reconstruct(&common, data.as_deref(), Algorithm::Direct)?,
        Command::ReconLsq { common, data } => reconstruct(&common, data.as_deref(), Algorithm::Lsq)?,
        Command::Gradcheck {
            common,
            directions,
            step,
        } => {
            let cfg = common.load()?;
            let check = pipeline::gradient_check(&cfg, cfg.seeds[0], directions, step)?;
            create(&common.out)?;
            let path = common.out.join("gradcheck.csv");
            std::fs::write(&path, check.to_csv()).map_err(|e| CliError::io(&path, e))?;
            println!("max relative error {:e} over {directions} directions", check.max_relative_error());
        }
        Command::Experiment { common, which } => {
            let cfg = common.load()?;
            let table = pipeline::run_experiment(which, &cfg, &common.out)?;
            print!("{table}");
        }
        Command::Transfer { from, to, field, out } => {
            let (source, target) = (mesh_arg(&from)?, mesh_arg(&to)?);
            let core = |context: &str| {
                let context = context.to_string();
                move |source| CliError::Core { context, source }
            };
            let f = NodalField::load_csv(&field).map_err(core("loading the field"))?;
            let moved = transfer_field(&source, &f, &target).map_err(core("transferring the field"))?;
            create(&out)?;
            let path = out.join("transferred.csv");
            moved.save_csv(&path).map_err(core("writing the field"))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: could not configure {k} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
