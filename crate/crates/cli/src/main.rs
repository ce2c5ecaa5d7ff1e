mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curvagraph::Rational;

/// Exact discrete curvature and geometric property checks for planar maps.
#[derive(Debug, Parser)]
#[command(name = "curvagraph", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Corner, vertex and face curvature with suprema and the negative-curvature gap.
    Curvature,
    /// Tessellation class with violating features.
    Classify,
    /// Sum of vertex curvatures over an induced subgraph.
    GaussBonnet,
    /// Embed B_k(v0) into a supergraph with curvature close to the threshold.
    Embed,
    /// Vertices with no neighbor farther from the root.
    Cutlocus,
    /// Sphere structure properties (1)-(5) around the root.
    Admissibility,
    /// Minimal geodesic bigons and their interiors.
    Bigons,
    /// Sphere growth against the curvature bound.
    Growth,
    /// Cheeger constant lower bounds and brute-force upper bounds.
    Cheeger,
    /// Dirichlet bottom of the spectrum on balls against the Cheeger bound.
    Spectrum,
    /// Polar decomposition of the Laplacian and structure of its blocks.
    Polar,
    /// Finitely supported eigenfunctions of the Laplacian.
    Eigensearch,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Graph file in the line-oriented map format.
    #[arg(long, global = true, conflicts_with = "gen")]
    pub file: Option<PathBuf>,
    /// Generator: pq:P,Q | tree:P | radtree[:BASE] | line | octahub | platonic:NAME.
    #[arg(long, global = true)]
    pub gen: Option<String>,
    /// Radius of the generated ball.
    #[arg(long, global = true, default_value_t = 4, value_parser = positive)]
    pub radius: usize,
    /// Analysis horizon around the root; defaults to one less than the radius for generated maps and 3 for files.
    #[arg(long, global = true, value_parser = positive)]
    pub horizon: Option<usize>,
    /// Root vertex.
    #[arg(long, global = true, default_value_t = 0)]
    pub root: usize,
    /// Curvature slack for `embed`, as a rational.
    #[arg(long, global = true, default_value = "1/2000", value_parser = positive_rational)]
    pub eps: Rational,
    /// Subset-size cap for `cheeger`; radius of W = B_k(root) for `embed`.
    #[arg(long, global = true, default_value_t = 6, value_parser = positive)]
    pub k: usize,
    /// Tolerance on eigenvalues.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive_float)]
    pub tol: f64,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Use every vertex of the map instead of a ball around the root.
    #[arg(long, global = true)]
    pub all: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let r: Rational = s.trim().parse().map_err(|_| format!("'{s}' is not a rational number"))?;
    if r > Rational::from_integer(0.into()) {
        Ok(r)
    } else {
        Err("must be positive".into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.config) {
        Ok(report) => {
            let body = if cli.config.json {
                serde_json::to_string_pretty(&report.json).expect("report serializes") + "\n"
            } else {
                report.text.clone()
            };
            if let Some(path) = &cli.config.out {
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{body}");
            }
            ExitCode::from(if report.finding { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
