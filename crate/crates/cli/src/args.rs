use std::path::PathBuf;

use brown_core::{ModelParams, TwoAtomLaw};
use clap::Args;

use crate::Failure;

/// Accepts decimals (`0.8`, `1e-3`) and simple fractions (`4/5`, `-1/2`).
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("`{s}` is not a number or fraction"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("`{s}` is not a number or fraction"))?;
            if den == 0.0 {
                return Err(format!("`{s}` has a zero denominator"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number or fraction"))?,
    };
    if !value.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(value)
}

#[derive(Debug, Clone, Args)]
pub struct LawArgs {
    /// Lower atom of the law of p (α)
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub p_low: f64,
    /// Upper atom of the law of p (α′)
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub p_high: f64,
    /// Mass of p at its lower atom
    #[arg(long, value_parser = parse_number)]
    pub p_weight: f64,
    /// Lower atom of the law of q (β)
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub q_low: f64,
    /// Upper atom of the law of q (β′)
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub q_high: f64,
    /// Mass of q at its lower atom
    #[arg(long, value_parser = parse_number)]
    pub q_weight: f64,
}

impl LawArgs {
    /// Checks every flag before any computation. Point-mass laws pass here and
    /// are reported by the core as the normal case.
    pub fn params(&self) -> Result<ModelParams, Failure> {
        let law = |prefix: &str, low: f64, high: f64, weight: f64| {
            if low >= high {
                return Err(Failure::validation(format!(
                    "--{prefix}-high ({high}) must be greater than --{prefix}-low ({low})"
                )));
            }
            if !(0.0..=1.0).contains(&weight) {
                return Err(Failure::validation(format!("--{prefix}-weight ({weight}) must lie in [0, 1]")));
            }
            TwoAtomLaw::new(low, high, weight).map_err(Failure::from)
        };
        Ok(ModelParams::new(
            law("p", self.p_low, self.p_high, self.p_weight)?,
            law("q", self.q_low, self.q_high, self.q_weight)?,
        ))
    }
}

/// `--out` if given, otherwise `name` under `$BROWN_OUT_DIR` (or the working
/// directory).
pub fn resolve_out(flag: Option<PathBuf>, name: &str) -> PathBuf {
    flag.unwrap_or_else(|| {
        std::env::var_os("BROWN_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(name)
    })
}
