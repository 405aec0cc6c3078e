use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wg_helmholtz::assembly::prepare;
use wg_helmholtz::experiment::{self, ConfigFile, Domain, ExperimentConfig};
use wg_helmholtz::wg_space::{Degree, DofMap};

/// Weak Galerkin solver for the 2-D Helmholtz equation.
#[derive(Parser, Debug)]
#[command(name = "wg-helmholtz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error table over a sequence of meshes.
    Convergence(Common),
    /// Errors at fixed κh over a list of wave numbers (hexagon).
    Pollution(Common),
    /// Discrete and exact solution along y = 0 (hexagon, finest mesh).
    Trace(Common),
    /// Per-triangle solution dump on the finest mesh.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also write the reduced system matrix in coordinate format.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with [convergence], [pollution], [trace] or [solve] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    domain: Option<Domain>,
    /// Wave number.
    #[arg(long)]
    k: Option<f64>,
    /// Polynomial degree, 0 or 1.
    #[arg(long)]
    degree: Option<usize>,
    /// Comma-separated mesh parameters (N for the hexagon, rings for disks).
    #[arg(long, value_delimiter = ',')]
    mesh_seq: Option<Vec<usize>>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    kh: Option<f64>,
    /// Comma-separated wave numbers for the pollution sweep.
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<f64>>,
    #[arg(long)]
    sectors: Option<usize>,
    #[arg(long)]
    max_dofs: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    /// File section (or defaults) with command-line values on top.
    fn resolve(&self, section: fn(ConfigFile) -> Option<ExperimentConfig>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let file = ConfigFile::load(p).with_context(|| format!("reading {}", p.display()))?;
                section(file).unwrap_or_default()
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.domain {
            cfg.domain = v;
        }
        if let Some(v) = self.k {
            cfg.kappa = v;
        }
        if let Some(v) = self.degree {
            cfg.degree = Degree::try_from(v).map_err(anyhow::Error::msg)?;
        }
        if let Some(v) = &self.mesh_seq {
            cfg.mesh_seq = v.clone();
        }
        if let Some(v) = self.xi {
            cfg.xi = v;
        }
        if let Some(v) = self.kh {
            cfg.kh = v;
        }
        if let Some(v) = &self.k_list {
            cfg.k_list = v.clone();
        }
        if let Some(v) = self.sectors {
            cfg.sectors = v;
        }
        if let Some(v) = self.max_dofs {
            cfg.max_dofs = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convergence(c) => {
            let cfg = c.resolve(|f| f.convergence)?;
            let report = experiment::run_convergence(&cfg)?;
            report.write_csv(output(&cfg)?)?;
            if let Some(msg) = report.failure {
                bail!("sweep stopped early, partial results written: {msg}");
            }
        }
        Command::Pollution(c) => {
            let cfg = c.resolve(|f| f.pollution)?;
            let rows = experiment::run_pollution(&cfg)?;
            experiment::write_pollution_csv(&rows, output(&cfg)?)?;
        }
        Command::Trace(c) => {
            let cfg = c.resolve(|f| f.trace)?;
            let rows = experiment::run_trace(&cfg)?;
            experiment::write_trace_csv(&rows, output(&cfg)?)?;
        }
        Command::Solve { common, dump_matrix } => {
            let cfg = common.resolve(|f| f.solve)?;
            let solved = experiment::run_solve(&cfg)?;
            experiment::write_dump_csv(&experiment::dump_rows(&solved), cfg.degree, output(&cfg)?)?;
            if let Some(path) = dump_matrix {
                let problem = cfg.problem(cfg.kappa)?;
                let dm = DofMap::new(&solved.mesh, cfg.degree);
                let sys = prepare(&solved.mesh, &dm, &problem, &cfg.quadrature)?;
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                sys.matrix.write_coordinate(BufWriter::new(f))?;
            }
            eprintln!(
                "solved {} unknowns, relative residual {:.3e}, {:.3} s",
                solved.dofs.n_total(),
                solved.report.relative_residual,
                solved.report.seconds
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
