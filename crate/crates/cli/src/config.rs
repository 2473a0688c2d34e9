use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use hcr_core::builders::IterationRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Certified envelopes and band widths
    Envelope,
    /// Shots with δ = 0 and δ = Δ and their gap
    Shoot,
    /// Bracketing of the t = 0 limit
    Limit0,
    /// Boundary-layer classification
    Blayer,
    /// All certificates plus the comparison against the shooting oracle
    Verify,
    /// Regenerate every reference table as CSV
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Envelope => "envelope",
            Command::Shoot => "shoot",
            Command::Limit0 => "limit0",
            Command::Blayer => "blayer",
            Command::Verify => "verify",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Kind {
    #[default]
    Global,
    Partial,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Rule {
    Text,
    #[default]
    Listing,
}

impl From<Rule> for IterationRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Text => IterationRule::Text,
            Rule::Listing => IterationRule::Listing,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hcr", version, about = "Bounds for u'' = b²(u⁴ - t⁴), u(0) = 1, u(1) = t")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub b: Option<f64>,
    #[arg(long, global = true)]
    pub t: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub kind: Kind,
    /// Integration steps; the default depends on the command
    #[arg(long, global = true, env = "HCR_DEFAULT_STEPS")]
    pub steps: Option<usize>,
    #[arg(long = "grid-points", global = true, default_value_t = hcr_core::builders::BAND_POINTS)]
    pub grid_points: usize,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: Format,
    /// Directory for data files
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "iteration-rule", global = true, value_enum, default_value_t)]
    pub iteration_rule: Rule,
}

/// Validated command-line configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub b: f64,
    pub t: f64,
    pub kind: Kind,
    pub steps: Option<usize>,
    pub grid_points: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub rule: IterationRule,
}

impl TryFrom<Cli> for RunConfig {
    type Error = String;

    fn try_from(cli: Cli) -> Result<Self, String> {
        let needs_b = cli.command != Command::Report;
        let needs_t = !matches!(cli.command, Command::Report | Command::Limit0);
        let b = match cli.b {
            Some(b) if b > 0.0 && b.is_finite() => b,
            Some(b) => return Err(format!("--b must be positive (got {b})")),
            None if needs_b => return Err("--b is required".into()),
            None => f64::NAN,
        };
        let t = match cli.t {
            Some(t) if t > 0.0 && t < 1.0 => t,
            Some(t) if needs_t => return Err(format!("--t must lie in (0, 1) (got {t})")),
            None if needs_t => return Err("--t is required".into()),
            _ => f64::NAN,
        };
        if cli.command == Command::Limit0 && b <= 1.0 {
            return Err(format!("limit0 needs --b > 1 (got {b})"));
        }
        if cli.grid_points < 2 {
            return Err(format!("--grid-points must be at least 2 (got {})", cli.grid_points));
        }
        if cli.steps == Some(0) {
            return Err("--steps must be positive".into());
        }
        Ok(RunConfig {
            command: cli.command,
            b,
            t,
            kind: cli.kind,
            steps: cli.steps,
            grid_points: cli.grid_points,
            format: cli.format,
            out: cli.out,
            rule: cli.iteration_rule.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, String> {
        let cli = Cli::try_parse_from(std::iter::once("hcr").chain(args.iter().copied())).map_err(|e| e.to_string())?;
        RunConfig::try_from(cli)
    }

    #[test]
    fn defaults() {
        let c = parse(&["envelope", "--b", "500", "--t", "0.1"]).unwrap();
        assert_eq!(c.kind, Kind::Global);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.grid_points, 2001);
        assert_eq!(c.rule, IterationRule::Listing);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse(&["envelope", "--b", "-1", "--t", "0.1"]).is_err());
        assert!(parse(&["envelope", "--b", "1", "--t", "1.0"]).is_err());
        assert!(parse(&["envelope", "--b", "1"]).is_err());
        assert!(parse(&["envelope", "--b", "1", "--t", "0.5", "--grid-points", "1"]).is_err());
        assert!(parse(&["envelope", "--b", "1", "--t", "0.5", "--kind", "local"]).is_err());
    }

    #[test]
    fn limit0_ignores_t() {
        let c = parse(&["limit0", "--b", "100"]).unwrap();
        assert!(c.t.is_nan());
        assert!(parse(&["limit0", "--b", "0.5"]).is_err());
    }

    #[test]
    fn rule_flag() {
        let c = parse(&["verify", "--b", "70", "--t", "0.1", "--iteration-rule", "text"]).unwrap();
        assert_eq!(c.rule, IterationRule::Text);
    }
}
