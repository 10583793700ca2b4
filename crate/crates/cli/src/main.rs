use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quaddiv_cli::converge::{load_source, run_convergence};
use quaddiv_cli::{mesh_info, run_verify, MeshSource, RunConfig};

#[derive(Parser)]
#[command(name = "quaddiv", version, about = "Lowest-order grad-div virtual elements for the quad-div problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the manufactured benchmark on each mesh and report errors.
    Solve(RunArgs),
    /// Like `solve`, plus observed rates, a CSV table and a gnuplot file.
    Converge(RunArgs),
    /// Check the discrete complex and the local forms.
    Verify(RunArgs),
    /// Print mesh statistics and validation findings.
    MeshInfo(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Structured n x n x n cube mesh of the unit cube (repeatable).
    #[arg(long = "cube")]
    cubes: Vec<usize>,
    /// Polyhedral mesh file in JSON (repeatable).
    #[arg(long = "mesh")]
    meshes: Vec<PathBuf>,
    /// `key=value` configuration file, applied before the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "quad-assembly")]
    quad_assembly: Option<usize>,
    #[arg(long = "quad-analytic")]
    quad_analytic: Option<usize>,
    /// Target relative residual of the linear solve.
    #[arg(long)]
    tol: Option<f64>,
    /// Output prefix for the CSV and gnuplot files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also report the projected divergence errors.
    #[arg(long)]
    diagnostics: bool,
    /// Also verify the discrete complex on each mesh.
    #[arg(long = "verify-complex")]
    verify_complex: bool,
    /// Fill the wall-time column.
    #[arg(long)]
    timings: bool,
    /// Write each assembled system to PREFIX.<mesh index>.coo as
    /// `row col value` lines.
    #[arg(long = "dump-system", value_name = "PREFIX")]
    dump_system: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> quaddiv::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        c.meshes.extend(self.cubes.into_iter().map(MeshSource::Cube));
        c.meshes.extend(self.meshes.into_iter().map(MeshSource::File));
        if let Some(q) = self.quad_assembly {
            c.quadrature.assembly = q;
        }
        if let Some(q) = self.quad_analytic {
            c.quadrature.analytic = q;
        }
        if let Some(t) = self.tol {
            c.tol = t;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        c.diagnostics |= self.diagnostics;
        c.verify_complex |= self.verify_complex;
        c.timings |= self.timings;
        if self.dump_system.is_some() {
            c.dump_system = self.dump_system;
        }
        Ok(c)
    }
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn run(cli: Cli) -> quaddiv::Result<ExitCode> {
    match cli.command {
        Command::Solve(args) | Command::Converge(args) => {
            let config = args.into_config()?;
            let study = run_convergence(&config)?;
            print!("{}", study.summary());
            if let Some(prefix) = &config.out {
                std::fs::write(with_extension(prefix, ".csv"), study.to_csv())?;
                std::fs::write(with_extension(prefix, ".dat"), study.to_gnuplot())?;
            } else {
                println!();
                print!("{}", study.to_csv());
            }
            Ok(if study.any_failed() { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
        Command::Verify(args) => {
            print!("{}", run_verify(&args.into_config()?)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::MeshInfo(args) => {
            let config = args.into_config()?;
            config.validate()?;
            for source in &config.meshes {
                println!("[{}]", source.id());
                print!("{}", mesh_info(&load_source(source)?)?);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
