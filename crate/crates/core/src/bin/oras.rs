use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use helmholtz_oras::experiment::{
    parse_power_range, run_describe, run_fig1, run_table1, run_table2, write_norm_csv,
    write_solution, write_solve_csv, Experiment, ExperimentConfig, Geometry,
};
use helmholtz_oras::linalg::Estimator;
use helmholtz_oras::Result;

/// Norms of powers of the ORAS error propagation matrix for 2D Helmholtz.
#[derive(Parser)]
#[command(name = "oras", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ‖E‖, ‖E^(N-1)‖, ‖E^N‖ on strips
    Table1(Flags),
    /// ‖E^(N²-1)‖, ‖E^(N²)‖ and GMRES counts on the checkerboard
    Table2(Flags),
    /// ‖E^s‖ for s = 1..N² on the checkerboard
    Fig1(Flags),
    /// Plane-wave solve with preconditioned GMRES
    Solve(Flags),
    /// Mesh and subdomain summary
    Describe(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Wavenumber (repeatable)
    #[arg(long = "k")]
    k: Vec<f64>,
    /// Subdomains per direction (repeatable)
    #[arg(long = "n")]
    n: Vec<usize>,
    /// strip or checkerboard
    #[arg(long)]
    geometry: Option<Geometry>,
    #[arg(long)]
    degree: Option<usize>,
    /// C in h = C k^(-5/4)
    #[arg(long)]
    mesh_constant: Option<f64>,
    /// Strip overlap width, or checkerboard overlap as a fraction of the
    /// subdomain width
    #[arg(long)]
    overlap: Option<f64>,
    /// Powers as a..b (inclusive)
    #[arg(long, value_parser = parse_powers)]
    powers: Option<(usize, usize)>,
    #[arg(long)]
    gmres_tol: Option<f64>,
    /// Output file (stdout by default)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the random start vector of the norm estimates
    #[arg(long)]
    seed: Option<u64>,
    /// lanczos or power
    #[arg(long)]
    estimator: Option<Estimator>,
    /// key=value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_powers(s: &str) -> std::result::Result<(usize, usize), String> {
    parse_power_range(s).map_err(|e| e.to_string())
}

impl Flags {
    fn into_config(self, default_geometry: Geometry) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig { geometry: default_geometry, ..ExperimentConfig::default() };
        if let Some(path) = &self.config {
            c.load_config_file(path)?;
        }
        if !self.k.is_empty() {
            c.ks = self.k;
        }
        if !self.n.is_empty() {
            c.ns = self.n;
        }
        c.geometry = self.geometry.unwrap_or(c.geometry);
        c.degree = self.degree.unwrap_or(c.degree);
        c.mesh_constant = self.mesh_constant.unwrap_or(c.mesh_constant);
        c.overlap = self.overlap.or(c.overlap);
        c.powers = self.powers.or(c.powers);
        c.gmres_tol = self.gmres_tol.unwrap_or(c.gmres_tol);
        c.output_path = self.out.or(c.output_path);
        c.seed = self.seed.unwrap_or(c.seed);
        c.estimator = self.estimator.unwrap_or(c.estimator);
        c.validate()?;
        Ok(c)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `dir/name.ext` -> `dir/name<suffix>.ext`
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}{suffix}.{ext}"),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table1(flags) => {
            let c = flags.into_config(Geometry::Strip)?;
            let rows = run_table1(&c)?;
            write_norm_csv(&rows, output(c.output_path.as_deref())?)?;
        }
        Command::Table2(flags) => {
            let c = flags.into_config(Geometry::Checkerboard)?;
            let t = run_table2(&c)?;
            match &c.output_path {
                Some(p) => {
                    write_norm_csv(&t.norms, output(Some(p))?)?;
                    write_solve_csv(&t.gmres, output(Some(&with_suffix(p, "_gmres")))?)?;
                }
                None => {
                    let mut out = output(None)?;
                    write_norm_csv(&t.norms, &mut out)?;
                    writeln!(out)?;
                    write_solve_csv(&t.gmres, &mut out)?;
                }
            }
        }
        Command::Fig1(flags) => {
            let c = flags.into_config(Geometry::Checkerboard)?;
            let fig = run_fig1(&c)?;
            write_norm_csv(&fig.rows, output(c.output_path.as_deref())?)?;
            for (k, n, first) in fig.first_contracting {
                match first {
                    Some(s) => eprintln!("k={k} N={n}: first s with ‖E^s‖ < 1 is {s}"),
                    None => eprintln!("k={k} N={n}: no computed power contracts"),
                }
            }
        }
        Command::Solve(flags) => {
            let c = flags.into_config(Geometry::Strip)?;
            let many = c.ks.len() * c.ns.len() > 1;
            let mut summaries = Vec::new();
            for &k in &c.ks {
                for &n in &c.ns {
                    let exp = Experiment::from_config(&c, k, n)?;
                    let s = exp.solve_plane_wave(c.gmres_tol)?;
                    if let Some(p) = &c.output_path {
                        let path = if many { with_suffix(p, &format!("_k{k}_N{n}")) } else { p.clone() };
                        write_solution(exp.operator.space(), &s.solution, output(Some(&path))?)?;
                    }
                    summaries.push(s);
                }
            }
            write_solve_csv(&summaries, output(None)?)?;
        }
        Command::Describe(flags) => {
            let c = flags.into_config(Geometry::Strip)?;
            run_describe(&c, output(c.output_path.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
