use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pencillab", version, about = "Compatibility checks for pairs of metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Almost compatibility and compatibility of the pair
    Check(CheckArgs),
    /// Curvature type of g1 and g2
    Curvature(CurvatureArgs),
    /// Roots of det(g1 - x g2) and nonsingularity
    Eigenvalues(EigenArgs),
    /// Build and verify an explicit family
    Family(FamilyArgs),
    /// Residuals of the identities relating M and the Nijenhuis tensor
    Identities(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Grid points per axis
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    /// Sample box: `lo:hi` for every axis, `lo:hi,lo:hi,...`, or `lo:hi:lo:hi...`
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Scale-aware tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Number of (lambda1, lambda2) samples for compatibility
    #[arg(long, default_value_t = 7)]
    pub lambda_samples: usize,
    /// Distance from singular loci below which grid points are dropped
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    /// Write the JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Seed recorded in the report; PENCILLAB_SEED takes precedence
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub pair: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    G1,
    G2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum CurvatureExpect {
    Flat,
    ConstantCurvature,
    General,
}

impl CurvatureExpect {
    pub fn word(self) -> &'static str {
        match self {
            CurvatureExpect::Flat => "flat",
            CurvatureExpect::ConstantCurvature => "constant_curvature",
            CurvatureExpect::General => "general",
        }
    }
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long)]
    pub pair: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::Both)]
    pub which: Which,
    /// Exit 2 unless every classified metric has this type
    #[arg(long, value_enum)]
    pub expect: Option<CurvatureExpect>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumExpect {
    Nonsingular,
    Singular,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long)]
    pub pair: PathBuf,
    /// Exit 2 unless the pencil has this property
    #[arg(long, value_enum)]
    pub expect: Option<SpectrumExpect>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Diagonal,
    TwoComponent,
    Conformal,
    Frobenius,
    VectorPotential,
    Dubrovin,
    Gpc,
}

impl Kind {
    pub fn word(self) -> &'static str {
        match self {
            Kind::Diagonal => "diagonal",
            Kind::TwoComponent => "two_component",
            Kind::Conformal => "conformal",
            Kind::Frobenius => "frobenius",
            Kind::VectorPotential => "vector_potential",
            Kind::Dubrovin => "dubrovin",
            Kind::Gpc => "gpc",
        }
    }
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family kind; may be omitted when --pair has a family stanza
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Pair file whose family stanza holds the parameters
    #[arg(long)]
    pub pair: Option<PathBuf>,
    /// two_component: the constant c of F = c ln(u1 - u2)
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// two_component or conformal: target constant curvature
    #[arg(long = "K", allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// two_component: sign eps2 (eps1 = -eps2)
    #[arg(long, allow_hyphen_values = true)]
    pub eps2: Option<i8>,
    /// two_component: constant factor of b1 = b2
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<f64>,
    /// conformal: exponent a of exp(a) delta
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

impl Cli {
    pub fn common(&self) -> &Common {
        match &self.command {
            Command::Check(a) | Command::Identities(a) => &a.common,
            Command::Curvature(a) => &a.common,
            Command::Eigenvalues(a) => &a.common,
            Command::Family(a) => &a.common,
        }
    }
}

impl Common {
    /// PENCILLAB_SEED overrides --seed.
    pub fn resolved_seed(&self) -> Result<Option<u64>> {
        match std::env::var("PENCILLAB_SEED") {
            Ok(s) if !s.trim().is_empty() => {
                Ok(Some(s.trim().parse().with_context(|| format!("PENCILLAB_SEED is not an integer: {s:?}"))?))
            }
            _ => Ok(self.seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.grid >= 1, "--grid must be at least 1");
        ensure!(self.tol > 0.0 && self.tol.is_finite(), "--tol must be a positive number");
        ensure!(self.margin >= 0.0 && self.margin.is_finite(), "--margin must be nonnegative");
        Ok(())
    }

    /// The sample box for a chart of dimension `dim`, `[-1, 1]^dim` by default.
    pub fn bounds(&self, dim: usize) -> Result<Vec<(f64, f64)>> {
        match &self.bounds {
            None => Ok(vec![(-1.0, 1.0); dim]),
            Some(s) => parse_box(s, dim),
        }
    }
}

/// Accepts `lo:hi` (every axis), `lo:hi,lo:hi,...` (one per axis) or
/// `lo:hi:lo:hi...` (2 * dim numbers).
pub fn parse_box(s: &str, dim: usize) -> Result<Vec<(f64, f64)>> {
    let mut nums = Vec::new();
    for seg in s.split(',') {
        let vals = seg
            .split(':')
            .map(|t| t.trim().parse::<f64>().with_context(|| format!("--box: {t:?} is not a number")))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() % 2 != 0 {
            bail!("--box: segment {seg:?} needs lo:hi pairs");
        }
        nums.push(vals);
    }
    let flat: Vec<f64> = nums.concat();
    let pairs: Vec<(f64, f64)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
    let out = if pairs.len() == 1 {
        vec![pairs[0]; dim]
    } else if pairs.len() == dim {
        pairs
    } else {
        bail!("--box gives {} intervals for a {dim}-dimensional chart", pairs.len());
    };
    for (i, (lo, hi)) in out.iter().enumerate() {
        ensure!(lo.is_finite() && hi.is_finite(), "--box: interval {} is not finite", i + 1);
        ensure!(lo <= hi, "--box: interval {} has lo {lo} > hi {hi}", i + 1);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_forms() {
        assert_eq!(parse_box("-1:1", 3).unwrap(), vec![(-1.0, 1.0); 3]);
        assert_eq!(parse_box("1.2:2:0:1", 2).unwrap(), vec![(1.2, 2.0), (0.0, 1.0)]);
        assert_eq!(parse_box("1.2:2,0:1", 2).unwrap(), vec![(1.2, 2.0), (0.0, 1.0)]);
        assert!(parse_box("0:1,0:1", 3).is_err());
        assert!(parse_box("1:0", 1).is_err());
        assert!(parse_box("0:x", 1).is_err());
        assert!(parse_box("0:1:2", 1).is_err());
    }

    #[test]
    fn env_seed_wins() {
        let c = Common {
            grid: 5,
            bounds: None,
            tol: 1e-9,
            lambda_samples: 7,
            margin: 0.1,
            report: None,
            seed: Some(3),
        };
        // the variable is unset in the test environment unless a caller exported it
        if std::env::var("PENCILLAB_SEED").is_err() {
            assert_eq!(c.resolved_seed().unwrap(), Some(3));
        }
    }
}
