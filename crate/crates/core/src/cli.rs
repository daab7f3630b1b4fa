//! Command-line front end. `main` parses [`Cli`] and hands it to [`run`].

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analysis::{
    collapse_points, crossing_threshold, fit_exponents_joint, fit_with_threshold, CollapseGroup,
    CollapseOptions, FitOptions, ScalingFit,
};
use crate::entanglement::{concurrence_of_theta, Concurrence, ThetaNorm};
use crate::error::{Error, Result};
use crate::io;
use crate::lattice::{Lattice, LatticeKind};
use crate::paths::PathTable;
use crate::percolation::{sweep, theta_grid, PercolationCurve, Protocol, SweepConfig};

#[derive(Debug, Parser)]
#[command(
    name = "gcp",
    version,
    about = "Concurrence percolation on 2D lattice quantum networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo sweep of P(θ), one CSV per lattice size.
    Sweep(SweepArgs),
    /// Threshold from the crossings of curves at different sizes.
    Threshold(ThresholdArgs),
    /// Critical-exponent fit by finite-size data collapse.
    Collapse(CollapseArgs),
    /// Dump the shortest-path table of a lattice.
    Paths(DumpArgs),
    /// Dump the edge list of a lattice.
    Lattice(DumpArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub lattice: Option<LatticeKind>,
    /// Comma-separated linear sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub protocol: Option<Protocol>,
    /// Number of θ grid points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Realisations per grid point.
    #[arg(long)]
    pub ensembles: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Fraction of non-neighbour GCP pairs that receive a link.
    #[arg(long)]
    pub pair_fraction: Option<f64>,
}

/// Sweep settings as read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfigFile {
    pub lattice: Option<LatticeKind>,
    pub sizes: Option<Vec<usize>>,
    pub protocol: Option<Protocol>,
    pub points: Option<usize>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub ensembles: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub pair_fraction: Option<f64>,
}

/// Fully resolved sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lattice: LatticeKind,
    pub sizes: Vec<usize>,
    pub protocol: Protocol,
    pub theta_min: f64,
    pub theta_max: f64,
    pub points: usize,
    pub ensembles: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub pair_fraction: f64,
}

impl RunConfig {
    pub fn resolve(args: &SweepArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                toml::from_str::<RunConfigFile>(&text)
                    .map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?
            }
            None => RunConfigFile::default(),
        };
        let config = RunConfig {
            lattice: args
                .lattice
                .or(file.lattice)
                .ok_or_else(|| Error::Usage("--lattice is required".into()))?,
            sizes: args
                .sizes
                .clone()
                .or(file.sizes)
                .ok_or_else(|| Error::Usage("--sizes is required".into()))?,
            protocol: args.protocol.or(file.protocol).unwrap_or(Protocol::Gcp),
            theta_min: args.theta_min.or(file.theta_min).unwrap_or(0.0),
            theta_max: args.theta_max.or(file.theta_max).unwrap_or(1.0),
            points: args.points.or(file.points).unwrap_or(101),
            ensembles: args.ensembles.or(file.ensembles).unwrap_or(1000),
            seed: args.seed.or(file.seed).unwrap_or(0),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("runs")),
            workers: args.workers.or(file.workers),
            pair_fraction: args.pair_fraction.or(file.pair_fraction).unwrap_or(1.0),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if self.sizes.is_empty() {
            return usage("--sizes is empty".into());
        }
        if let Some(&s) = self.sizes.iter().find(|&&s| s < 2) {
            return usage(format!("lattice size {s} is below 2"));
        }
        if self.points == 0 {
            return usage("--points must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.theta_min) || !(0.0..=1.0).contains(&self.theta_max) {
            return usage("theta range must lie within [0, 1]".into());
        }
        if self.theta_min > self.theta_max {
            return usage("--theta-min exceeds --theta-max".into());
        }
        if self.ensembles == 0 {
            return usage("--ensembles must be at least 1".into());
        }
        if self.workers == Some(0) {
            return usage("--workers must be at least 1".into());
        }
        if !(self.pair_fraction > 0.0 && self.pair_fraction <= 1.0) {
            return usage("--pair-fraction must lie in (0, 1]".into());
        }
        Ok(())
    }

    fn sweep_config(&self) -> Result<SweepConfig> {
        let grid = theta_grid(self.theta_min, self.theta_max, self.points)?;
        let mut config = SweepConfig::new(self.protocol, grid, self.ensembles, self.seed);
        config.workers = self.workers;
        config.pair_fraction = self.pair_fraction;
        Ok(config)
    }
}

pub fn curve_file_name(kind: LatticeKind, protocol: Protocol, node_count: usize) -> String {
    format!("{kind}_{protocol}_N{node_count}.csv")
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Curve CSV files, one per size.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "threshold.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    /// Curve CSV files; several lattice kinds are fitted jointly.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Threshold concurrence; defaults to each kind's crossing estimate.
    #[arg(long)]
    pub c_th: Option<f64>,
    /// Also fit the threshold (single lattice kind only).
    #[arg(long)]
    pub free_threshold: bool,
    /// Half-width of the θ window around threshold that enters the cost.
    #[arg(long, default_value_t = 0.1)]
    pub theta_window: f64,
    /// Use every grid point in the cost.
    #[arg(long, conflicts_with = "theta_window")]
    pub no_window: bool,
    #[arg(long, default_value = "collapse.json")]
    pub out: PathBuf,
    /// Point cloud of the collapsed curves at the fitted exponents.
    #[arg(long, default_value = "collapse_points.csv")]
    pub points_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub lattice: LatticeKind,
    #[arg(long)]
    pub size: usize,
    /// Count paths by breadth-first search even where a closed form exists.
    #[arg(long)]
    pub bfs: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Executes one command, writing human-readable summaries to `stdout`.
pub fn run<W: Write>(cli: Cli, stdout: &mut W) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => cmd_sweep(&RunConfig::resolve(&args)?, stdout).map(|_| ()),
        Command::Threshold(args) => cmd_threshold(&args, stdout),
        Command::Collapse(args) => cmd_collapse(&args, stdout).map(|_| ()),
        Command::Paths(args) => cmd_paths(&args, stdout),
        Command::Lattice(args) => cmd_lattice(&args, stdout),
    }
}

fn echo<W: Write>(stdout: &mut W, line: std::fmt::Arguments<'_>) -> Result<()> {
    writeln!(stdout, "{line}").map_err(|e| Error::io(Path::new("<stdout>"), e))
}

/// Runs the sweep for every size and returns the written paths.
pub fn cmd_sweep<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<Vec<PathBuf>> {
    let sweep_config = config.sweep_config()?;
    std::fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    let mut written = Vec::with_capacity(config.sizes.len());
    for &size in &config.sizes {
        let lattice = Lattice::build(config.lattice, size)?;
        let table = match config.protocol {
            Protocol::Gcp => Some(PathTable::build(&lattice)?),
            Protocol::Cep => None,
        };
        let curve = sweep(&lattice, table.as_ref(), &sweep_config)?;
        let path = config.out.join(curve_file_name(
            config.lattice,
            config.protocol,
            curve.node_count,
        ));
        io::save_with(&path, |w| io::write_curve(w, &curve))?;
        echo(
            stdout,
            format_args!(
                "{} {} L={size} N={}: {} points x {} ensembles -> {}",
                config.lattice,
                config.protocol,
                curve.node_count,
                curve.points.len(),
                curve.ensembles,
                path.display()
            ),
        )?;
        written.push(path);
    }
    Ok(written)
}

fn load_curves(paths: &[PathBuf]) -> Result<Vec<PercolationCurve>> {
    paths.iter().map(|p| io::load_curve(p)).collect()
}

fn cmd_threshold<W: Write>(args: &ThresholdArgs, stdout: &mut W) -> Result<()> {
    if args.inputs.len() < 2 {
        return Err(Error::Usage(
            "threshold needs at least 2 curve files".into(),
        ));
    }
    let curves = load_curves(&args.inputs)?;
    let estimate = crossing_threshold(&curves)?;
    io::save_json(&args.out, &estimate)?;
    echo(
        stdout,
        format_args!(
            "theta_T = {:.4} +/- {:.4} ({} crossings) -> {}",
            estimate.theta_t,
            estimate.uncertainty,
            estimate.crossings.len(),
            args.out.display()
        ),
    )
}

/// Fits exponents and writes the fit and point cloud.
pub fn cmd_collapse<W: Write>(args: &CollapseArgs, stdout: &mut W) -> Result<ScalingFit> {
    if args.inputs.len() < 3 {
        return Err(Error::Usage("collapse needs at least 3 curve files".into()));
    }
    let curves = load_curves(&args.inputs)?;
    let mut by_kind: BTreeMap<LatticeKind, Vec<PercolationCurve>> = BTreeMap::new();
    for c in curves {
        by_kind.entry(c.kind).or_default().push(c);
    }
    let fixed = args.c_th.map(Concurrence::new).transpose()?;
    let mut thresholds = Vec::with_capacity(by_kind.len());
    for curves in by_kind.values() {
        thresholds.push(match fixed {
            Some(c) => c,
            None => concurrence_of_theta(ThetaNorm::new(crossing_threshold(curves)?.theta_t)?),
        });
    }
    let groups: Vec<CollapseGroup<'_>> = by_kind
        .values()
        .zip(&thresholds)
        .map(|(curves, &c_th)| CollapseGroup { curves, c_th })
        .collect();

    let options = FitOptions {
        collapse: CollapseOptions {
            theta_window: (!args.no_window).then_some(args.theta_window),
        },
        ..FitOptions::default()
    };
    let fit = if args.free_threshold {
        if groups.len() != 1 {
            return Err(Error::Usage(
                "--free-threshold needs curves of a single lattice kind".into(),
            ));
        }
        fit_with_threshold(groups[0].curves, groups[0].c_th, &options)?
    } else {
        fit_exponents_joint(&groups, &options)?
    };

    let mut point_groups = groups.clone();
    if let (Some(c), [g]) = (fit.c_th, point_groups.as_mut_slice()) {
        g.c_th = Concurrence::new(c)?;
    }
    let points = collapse_points(&point_groups, fit.nu, fit.beta, &options.collapse)?;
    io::save_json(&args.out, &fit)?;
    io::save_with(&args.points_out, |w| io::write_collapse_points(w, &points))?;
    echo(
        stdout,
        format_args!(
            "nu = {:.3}, beta = {:.3}, cost = {:.3e} -> {}",
            fit.nu,
            fit.beta,
            fit.cost,
            args.out.display()
        ),
    )?;
    Ok(fit)
}

fn dump<W: Write, F>(out: &Option<PathBuf>, stdout: &mut W, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => io::save_with(path, |w| write(w)),
        None => write(stdout),
    }
}

fn cmd_paths<W: Write>(args: &DumpArgs, stdout: &mut W) -> Result<()> {
    let lattice = Lattice::build(args.lattice, args.size)?;
    let table = if args.bfs {
        PathTable::by_bfs(&lattice)?
    } else {
        PathTable::build(&lattice)?
    };
    dump(&args.out, stdout, |w| io::write_path_table(w, &table))
}

fn cmd_lattice<W: Write>(args: &DumpArgs, stdout: &mut W) -> Result<()> {
    let lattice = Lattice::build(args.lattice, args.size)?;
    dump(&args.out, stdout, |w| io::write_lattice(w, &lattice))
}
