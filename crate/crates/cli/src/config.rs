use std::path::PathBuf;

use bqs_core::{MultiIndex, ResidueClass, ShiftExponent, SpaceParams};
use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct RawConfig {
    /// Complex dimension N.
    #[arg(long = "N", default_value_t = 2)]
    pub dim: usize,
    /// Weight exponent, must be > -1.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Shift exponent, comma separated (e.g. 2,3).
    #[arg(long)]
    pub n: Option<String>,
    /// Residue class; all classes when omitted.
    #[arg(long)]
    pub j: Option<String>,
    /// Total-degree truncation D.
    #[arg(long = "max-degree", default_value_t = 12)]
    pub max_degree: u32,
    /// Last diagonal step of the asymptotic sweep.
    #[arg(long = "diagonal-max", default_value_t = 60)]
    pub diagonal_max: u32,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Tolerance for algebraic identities.
    #[arg(long, default_value_t = 1e-12, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Validated configuration, echoed in JSON reports.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub n: Option<MultiIndex>,
    pub j: Option<MultiIndex>,
    pub max_degree: u32,
    pub diagonal_max: u32,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub params: SpaceParams,
    #[serde(skip)]
    pub shift: Option<ShiftExponent>,
    #[serde(skip)]
    pub class: Option<ResidueClass>,
}

impl RunConfig {
    pub fn resolve(command: &str, raw: RawConfig) -> Result<Self, String> {
        let params = SpaceParams::new(raw.dim, raw.alpha).map_err(|e| e.to_string())?;
        if raw.tol.is_nan() || raw.tol <= 0.0 {
            return Err("tol must be > 0".into());
        }
        let shift = match &raw.n {
            Some(s) => {
                let idx: MultiIndex = s.parse().map_err(|e| format!("--n: {e}"))?;
                idx.check_dim(raw.dim).map_err(|e| format!("--n: {e}"))?;
                Some(ShiftExponent::new(idx).map_err(|_| "--n: entries must be >= 1".to_string())?)
            }
            None => None,
        };
        let class = match (&raw.j, &shift) {
            (Some(s), Some(n)) => {
                let idx: MultiIndex = s.parse().map_err(|e| format!("--j: {e}"))?;
                Some(ResidueClass::new(idx, n).map_err(|e| format!("--j: {e}"))?)
            }
            (Some(_), None) => return Err("--j needs --n".into()),
            _ => None,
        };
        Ok(RunConfig {
            command: command.to_string(),
            dim: raw.dim,
            alpha: raw.alpha,
            n: shift.as_ref().map(|n| n.as_index().clone()),
            j: class.as_ref().map(|j| j.as_index().clone()),
            max_degree: raw.max_degree,
            diagonal_max: raw.diagonal_max,
            samples: raw.samples,
            seed: raw.seed,
            tol: raw.tol,
            format: raw.format,
            output: raw.output,
            params,
            shift,
            class,
        })
    }

    pub fn require_shift(&self) -> Result<&ShiftExponent, String> {
        self.shift.as_ref().ok_or_else(|| format!("{} requires --n", self.command))
    }

    /// The selected class, or every class of `n`.
    pub fn classes(&self) -> Result<Vec<ResidueClass>, String> {
        Ok(match &self.class {
            Some(j) => vec![j.clone()],
            None => self.require_shift()?.classes(),
        })
    }
}
