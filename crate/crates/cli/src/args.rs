use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sharp_core::percolation::Direction;

pub const SEED_ENV: &str = "SHARP_SEED";

const CONFIG_HELP: &str = "\
Config file: one `key = value` per line, keys are long flag names without
the dashes (e.g. `replicas = 20000`, `p-grid = 0.4:0.6:21`). Lines starting
with # are ignored. Flags given on the command line override the file.

Exit codes: 0 success, 1 an assertion failed, 2 configuration error.";

#[derive(Debug, Parser)]
#[command(name = "sharp", version, about = "Seeded percolation and sharp-threshold experiments", after_help = CONFIG_HELP)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Key-value config file (see below).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Master seed.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Directory for CSV/JSON artifacts. Without it only the JSON report
    /// is printed on stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Crossing probability of a rectangle as a function of p.
    #[command(args_override_self = true, after_help = "\
Artifacts: crossing.csv with columns p,estimate,stderr,n_replicas (preceded
by # metadata lines) and crossing.json with the report.")]
    Crossing(CrossingArgs),

    /// One-arm probabilities, their partial sums and the critical estimate.
    #[command(args_override_self = true, after_help = "\
Artifacts: theta.csv with columns
n,p,theta,theta_stderr,partial_sum,partial_sum_stderr,n_replicas (preceded
by # metadata lines) and theta.json with the critical estimate.")]
    Theta(ThetaArgs),

    /// Exhaustive exact-identity suites.
    #[command(args_override_self = true, after_help = "Artifacts: inequalities.json with one report per suite.")]
    Inequalities(InequalitiesArgs),

    /// Threshold curve of a monotone property of G(n, p).
    #[command(args_override_self = true, after_help = "\
Artifacts: er.csv with columns p,estimate,stderr,n_replicas (preceded by #
metadata lines) and er.json with the window and the crossing of 1/2.")]
    Er(ErArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Crossing(_) => "crossing",
            Command::Theta(_) => "theta",
            Command::Inequalities(_) => "inequalities",
            Command::Er(_) => "er",
        }
    }
}

/// Grid of `p` values: `lo:hi:count` or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid"));
        let parts: Vec<&str> = s.split(':').collect();
        let values = if parts.len() == 3 {
            let count: usize = parts[2].trim().parse().map_err(|_| format!("bad point count {:?}", parts[2]))?;
            sharp_core::curve::linspace(num(parts[0])?, num(parts[1])?, count)
        } else if parts.len() == 1 {
            s.split(',').map(num).collect::<Result<Vec<f64>, String>>()?
        } else {
            return Err(format!("grid {s:?} is neither lo:hi:count nor a list"));
        };
        if values.is_empty() {
            return Err("empty grid".into());
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err("grid must be strictly increasing".into());
        }
        if values.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err("grid values must lie in [0, 1]".into());
        }
        Ok(Grid(values))
    }
}

/// A closed interval `lo,hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo > hi {
            return Err(format!("empty range {lo} > {hi}"));
        }
        Ok(Range { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    H,
    V,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::H => Direction::Horizontal,
            DirectionArg::V => Direction::Vertical,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CrossingArgs {
    /// Horizontal extent n of R(n, m).
    #[arg(long)]
    pub width: usize,
    /// Vertical extent m of R(n, m).
    #[arg(long)]
    pub height: usize,
    /// h: left-right crossing H(n, m); v: bottom-top crossing V(n, m).
    #[arg(long, value_enum, default_value = "h")]
    pub direction: DirectionArg,
    #[arg(long, default_value = "0:1:21")]
    pub p_grid: Grid,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: u64,
    /// Also run direct Monte Carlo with this many samples per point and
    /// require agreement within --sigmas.
    #[arg(long, default_value_t = 0)]
    pub direct_replicas: u64,
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
    /// Grid point used by --expect and --at-least.
    #[arg(long, default_value_t = 0.5)]
    pub at: f64,
    /// Require the estimate at --at to be within --sigmas of this value.
    #[arg(long)]
    pub expect: Option<f64>,
    /// Require estimate − sigmas·stderr at --at to exceed this value.
    #[arg(long)]
    pub at_least: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaArgs {
    #[arg(long, default_value_t = 2)]
    pub dimension: usize,
    /// Largest box radius N; θ_n is reported for every n ≤ N.
    #[arg(long, default_value_t = 32)]
    pub max_n: usize,
    #[arg(long, default_value = "0.3:0.7:41")]
    pub p_grid: Grid,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: u64,
    /// Level that log S_N / log N must reach.
    #[arg(long, default_value_t = 43.0 / 48.0)]
    pub threshold_ratio: f64,
    /// Require the critical estimate to lie in lo,hi.
    #[arg(long)]
    pub pc_range: Option<Range>,
}

#[derive(Debug, Args, Serialize)]
pub struct InequalitiesArgs {
    /// Suite name or "all".
    #[arg(long, default_value = "all")]
    pub suite: String,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyArg {
    Connectivity,
    Giant,
}

#[derive(Debug, Args, Serialize)]
pub struct ErArgs {
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,
    /// Component size for the giant property (default ⌈n^{2/3}⌉).
    #[arg(long)]
    pub r: Option<usize>,
    /// Default: a grid around the expected threshold scale.
    #[arg(long)]
    pub p_grid: Option<Grid>,
    #[arg(long, default_value_t = 2_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Require the crossing of 1/2 to lie in lo,hi, in units of the
    /// property's scale (log n / n or 1 / n).
    #[arg(long)]
    pub expect_crossing: Option<Range>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!("0:1:3".parse::<Grid>().unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!("0.4, 0.6".parse::<Grid>().unwrap().0, vec![0.4, 0.6]);
        assert!("0.6,0.4".parse::<Grid>().is_err());
        assert!("0:2:3".parse::<Grid>().is_err());
        assert!("a:b".parse::<Grid>().is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!("0.45,0.55".parse::<Range>().unwrap(), Range { lo: 0.45, hi: 0.55 });
        assert!("1,0".parse::<Range>().is_err());
    }
}
