use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ssd", version, about = "Bayesian sample size determination")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest sample size meeting a criterion over a planning range
    Size(Opts),
    /// Asymptotic and exact expected functional at a given n
    Eval(Opts),
    /// Seeded Monte Carlo estimate of the expected functional
    Simulate(Opts),
    /// Reproduce one of the built-in comparison tables
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Normal,
    Poisson,
    Bernoulli,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionName {
    Apvc,
    Acc,
    Alc,
    AlcQuantile,
    Es,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    #[arg(long, value_enum, default_value = "normal")]
    pub model: Model,
    /// Known sampling variance of the normal model
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub tau2: Option<f64>,
    /// Prior parameter: Gamma rate or Beta first shape
    #[arg(long)]
    pub a: Option<f64>,
    /// Prior parameter: Gamma shape or Beta second shape
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, value_enum, default_value = "apvc")]
    pub criterion: CriterionName,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub len: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Planning range as lo:hi
    #[arg(long, value_parser = parse_range)]
    pub range: Option<(f64, f64)>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    #[arg(long, default_value_t = ssd_core::tables::DEFAULT_SEED)]
    pub seed: u64,
    /// Draw the seed from the clock instead of --seed
    #[arg(long)]
    pub fresh_seed: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines; flags on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    Ok((lo, hi))
}

const SUBCOMMANDS: [&str; 4] = ["size", "eval", "simulate", "table"];

/// Turns config file text into flag arguments.
pub fn config_args(text: &str) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`, got {raw:?}", i + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!("config line {}: nested config files are not supported", i + 1));
        }
        if key == "fresh-seed" {
            match value {
                "true" => out.push(OsString::from("--fresh-seed")),
                "false" => {}
                other => return Err(format!("config line {}: fresh-seed must be true or false, got {other:?}", i + 1)),
            }
            continue;
        }
        out.push(OsString::from(format!("--{key}")));
        out.push(OsString::from(value));
    }
    Ok(out)
}

/// Splices the arguments read from `--config` in just after the
/// subcommand (and the table index), ahead of the explicit flags so those
/// take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let path = args
        .iter()
        .enumerate()
        .find_map(|(i, a)| {
            let s = a.to_str()?;
            if s == "--config" {
                args.get(i + 1).cloned()
            } else {
                s.strip_prefix("--config=").map(OsString::from)
            }
        });
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", PathBuf::from(&path).display()))?;
    let extra = config_args(&text)?;
    let Some(sub) = args.iter().position(|a| a.to_str().is_some_and(|s| SUBCOMMANDS.contains(&s))) else {
        return Ok(args);
    };
    let mut at = sub + 1;
    if args[sub] == "table" && args.get(at).and_then(|a| a.to_str()).is_some_and(|s| !s.starts_with('-')) {
        at += 1;
    }
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_lines() {
        let args = config_args("# study\nmodel = bernoulli\nfresh_seed = false\nrange = 0.4:0.6\n").unwrap();
        assert_eq!(args, os(&["--model", "bernoulli", "--range", "0.4:0.6"]));
        assert!(config_args("model bernoulli").is_err());
    }

    #[test]
    fn explicit_flags_win() {
        let dir = std::env::temp_dir().join(format!("ssd-args-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("study.conf");
        std::fs::write(&path, "eps = 0.5\nsigma2 = 0.2\n").unwrap();
        let argv = os(&["ssd", "size", "--eps", "0.002", "--config", path.to_str().unwrap()]);
        let cli = Cli::try_parse_from(expand_config(argv).unwrap()).unwrap();
        let Command::Size(opts) = cli.command else { panic!() };
        assert_eq!(opts.eps, Some(0.002));
        assert_eq!(opts.sigma2, Some(0.2));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.1:0.9").unwrap(), (0.1, 0.9));
        assert!(parse_range("0.1").is_err());
    }
}
