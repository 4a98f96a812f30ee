use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbp_core::{Family, Inequality, Part, Statement};

#[derive(Debug, Parser)]
#[command(name = "qbp", version, about = "Normalized Jackson q-Bessel functions and their partial-sum bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

/// Options shared by every subcommand. Each overrides the config file.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file (`key = value` lines); falls back to $QBP_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the payload here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Truncation epsilon for series evaluation.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    #[arg(long, global = true)]
    pub max_terms: Option<usize>,

    /// Comma-separated lattice radii in (0, 1).
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,

    #[arg(long, global = true)]
    pub angles_per_radius: Option<usize>,

    #[arg(long, global = true)]
    pub random_points: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Partial-sum orders, comma-separated.
    #[arg(long = "m", global = true, value_delimiter = ',')]
    pub m_sweep: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate h, h' or a partial sum at one point.
    Eval(EvalArgs),
    /// Check one theorem bound on the disk sample.
    Check(CheckArgs),
    /// Scan a (q, nu) rectangle and emit CSV.
    Atlas(AtlasArgs),
    /// Cross-check the fast path against the extended-precision oracle.
    Selftest(SelftestArgs),
    /// Print the resolved configuration in config-file format.
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "2")]
    Second,
    #[value(name = "3")]
    Third,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Second => Family::Second,
            FamilyArg::Third => Family::Third,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z_re: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z_im: f64,
    /// Evaluate the derivative instead.
    #[arg(long)]
    pub deriv: bool,
    /// Use the partial sum of order M.
    #[arg(long, value_name = "M")]
    pub partial: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    T1,
    T2,
    T3,
    T4,
}

impl From<TheoremArg> for Statement {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::T1 => Statement::T1,
            TheoremArg::T2 => Statement::T2,
            TheoremArg::T3 => Statement::T3,
            TheoremArg::T4 => Statement::T4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    Ratio,
    Reciprocal,
}

impl From<PartArg> for Part {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::Ratio => Part::Ratio,
            PartArg::Reciprocal => Part::Reciprocal,
        }
    }
}

pub fn theorem_inequality(theorem: TheoremArg, part: PartArg) -> Inequality {
    Statement::from(theorem)
        .theorem_inequality(part.into())
        .expect("every theorem has both parts")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Literal,
    Pattern,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AtlasVariantArg {
    Literal,
    Pattern,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    #[arg(long, value_enum, default_value = "ratio")]
    pub part: PartArg,
    #[arg(long, value_enum, default_value = "literal")]
    pub variant: VariantArg,
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
}

#[derive(Debug, Args)]
pub struct AtlasArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    #[arg(long, value_enum, default_value = "ratio")]
    pub part: PartArg,
    #[arg(long, value_enum, default_value = "literal")]
    pub variant: AtlasVariantArg,
    #[arg(long)]
    pub q_min: f64,
    #[arg(long)]
    pub q_max: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub nu_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub nu_max: f64,
    /// Grid size as `NxM` (q steps by nu steps).
    #[arg(long, value_parser = parse_steps, default_value = "10x10")]
    pub steps: (usize, usize),
}

fn parse_steps(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n = a.trim().parse::<usize>().map_err(|e| format!("bad q step count `{a}`: {e}"))?;
    let m = b.trim().parse::<usize>().map_err(|e| format!("bad nu step count `{b}`: {e}"))?;
    if n == 0 || m == 0 {
        return Err("step counts must be positive".into());
    }
    Ok((n, m))
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Number of randomized cases.
    #[arg(long, default_value_t = 25)]
    pub cases: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn steps_parse() {
        assert_eq!(parse_steps("3x4"), Ok((3, 4)));
        assert_eq!(parse_steps("1X1"), Ok((1, 1)));
        assert!(parse_steps("0x4").is_err());
        assert!(parse_steps("34").is_err());
    }

    #[test]
    fn negative_coordinates_parse() {
        let cli = Cli::try_parse_from(["qbp", "eval", "--family", "3", "--q", "0.2", "--nu", "-0.5", "--z-re", "-0.5", "--z-im", "0"]).unwrap();
        match cli.command {
            Command::Eval(a) => {
                assert_eq!(a.nu, -0.5);
                assert_eq!(a.z_re, -0.5);
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
