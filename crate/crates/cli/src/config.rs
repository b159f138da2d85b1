//! Flag parsing, the optional `key = value` config file, and the resolved run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use belltransfer_core::sweep::Axis;
use belltransfer_core::{Complex64, InputState};
use clap::{Args, Parser, Subcommand};

use crate::CliError;

/// Probabilistic transfer of multi-qubit states through imperfect Bell channels.
///
/// Departure angles are in radians.
#[derive(Debug, Parser)]
#[command(name = "belltransfer", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full protocol over every Bell-measurement record and report as JSON.
    Transfer(RunArgs),
    /// Stage-by-stage state of the published measurement branch, as JSON.
    Trace(RunArgs),
    /// Success probability over a grid of departures, as CSV.
    Sweep(SweepArgs),
    /// Check the published operators and print the discrepancy ledger.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Shared {
    /// Number of message qubits (2 or 3).
    #[arg(long)]
    pub k: Option<String>,
    /// Channel departures in radians, comma separated, one per channel.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Flat `key = value` file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single tolerance applied to every invariant check.
    #[arg(long)]
    pub tolerance: Option<String>,
    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// Message amplitudes as `re[:im]`, comma separated; must be normalized.
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Seed for a random message when no input is given.
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// Fixed message used at every grid point.
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Seed for per-point random messages.
    #[arg(long)]
    pub seed: Option<String>,
    /// Axes as `min:max:steps`, comma separated, one per channel.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Closed-form probability only; no simulation columns.
    #[arg(long)]
    pub analytic_only: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// Write the checked operators to this directory.
    #[arg(long, num_args = 0..=1, default_missing_value = "operators", value_name = "DIR")]
    pub dump_operators: Option<String>,
}

/// Fully resolved settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub k: usize,
    pub deltas: Vec<f64>,
    /// True when the departures came from a flag or the config file.
    pub deltas_given: bool,
    pub input: Option<InputState>,
    pub seed: Option<u64>,
    pub grid: Option<Vec<Axis>>,
    pub analytic_only: bool,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub dump_operators: Option<PathBuf>,
}

pub const MAX_CHANNELS: usize = 3;

/// Parses a config file body: `key = value` lines, `#` comments, blank lines ignored.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().replace('_', "-");
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(out)
}

fn load(shared: &Shared, allowed: &[&str]) -> Result<BTreeMap<String, String>, CliError> {
    let Some(path) = &shared.config else {
        return Ok(BTreeMap::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let map = parse_config_text(&text)?;
    if let Some(bad) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Usage(format!(
            "config key `{bad}` does not apply to this command"
        )));
    }
    Ok(map)
}

fn overlay(map: &mut BTreeMap<String, String>, key: &str, flag: &Option<String>) {
    if let Some(v) = flag {
        map.insert(key.to_string(), v.clone());
    }
}

fn parse_f64(text: &str, what: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{what}: `{text}` is not a number")))
}

pub fn parse_deltas(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|t| parse_f64(t, "--delta")).collect()
}

/// `re[:im]` entries, comma separated.
pub fn parse_input(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',')
        .map(|t| match t.split_once(':') {
            Some((re, im)) => Ok(Complex64::new(parse_f64(re, "--input")?, parse_f64(im, "--input")?)),
            None => Ok(Complex64::new(parse_f64(t, "--input")?, 0.0)),
        })
        .collect()
}

pub fn parse_grid(text: &str) -> Result<Vec<Axis>, CliError> {
    text.split(',')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(':').collect();
            let [min, max, steps] = parts[..] else {
                return Err(CliError::Usage(format!("--grid: `{axis}` is not min:max:steps")));
            };
            let steps = steps
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--grid: `{steps}` is not a step count")))?;
            Axis::new(parse_f64(min, "--grid")?, parse_f64(max, "--grid")?, steps).map_err(|_| {
                CliError::Usage(format!(
                    "--grid: `{axis}` needs min < max inside (-pi/4, pi/4) and steps >= 2"
                ))
            })
        })
        .collect()
}

fn resolve(map: &BTreeMap<String, String>, analytic_only: bool) -> Result<RunConfig, CliError> {
    let get = |key: &str| map.get(key).map(String::as_str);
    let deltas = get("delta").map(parse_deltas).transpose()?;
    let grid = get("grid").map(parse_grid).transpose()?;
    let k = match get("k") {
        Some(t) => t
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("--k: `{t}` is not an integer")))?,
        None => deltas
            .as_ref()
            .map(Vec::len)
            .or(grid.as_ref().map(Vec::len))
            .unwrap_or(2),
    };
    if !(2..=MAX_CHANNELS).contains(&k) {
        return Err(CliError::Usage(format!("--k must be 2 or 3, got {k}")));
    }
    if let Some(d) = &deltas {
        if d.len() != k {
            return Err(CliError::Usage(format!("--delta has {} values for k = {k}", d.len())));
        }
    }
    if let Some(g) = &grid {
        if g.len() != k {
            return Err(CliError::Usage(format!("--grid has {} axes for k = {k}", g.len())));
        }
    }
    let input = match get("input") {
        None => None,
        Some(t) => {
            let amps = parse_input(t)?;
            if amps.len() != 1 << k {
                return Err(CliError::Usage(format!(
                    "--input has {} amplitudes, k = {k} needs {}",
                    amps.len(),
                    1 << k
                )));
            }
            Some(InputState::new(amps).map_err(|e| CliError::Usage(format!("--input: {e}")))?)
        }
    };
    let seed = get("seed")
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("--seed: `{t}` is not an unsigned integer")))
        })
        .transpose()?;
    if input.is_some() && seed.is_some() {
        return Err(CliError::Usage("--input and --seed are mutually exclusive".into()));
    }
    let tolerance = get("tolerance").map(|t| parse_f64(t, "--tolerance")).transpose()?;
    if let Some(t) = tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tolerance must be positive, got {t}")));
        }
    }
    let analytic_only = analytic_only || matches!(get("analytic-only").map(str::trim), Some("true" | "1" | "yes"));
    Ok(RunConfig {
        k,
        deltas_given: deltas.is_some(),
        deltas: deltas.unwrap_or_else(|| vec![0.0; k]),
        input,
        seed,
        grid,
        analytic_only,
        tolerance,
        out: get("out").map(PathBuf::from),
        dump_operators: get("dump-operators").map(PathBuf::from),
    })
}

const SHARED_KEYS: [&str; 4] = ["k", "delta", "tolerance", "out"];

fn with_shared(extra: &[&'static str]) -> Vec<&'static str> {
    SHARED_KEYS.iter().chain(extra).copied().collect()
}

fn shared_map(shared: &Shared, extra: &[&'static str]) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = load(shared, &with_shared(extra))?;
    overlay(&mut map, "k", &shared.k);
    overlay(&mut map, "delta", &shared.delta);
    overlay(&mut map, "tolerance", &shared.tolerance);
    overlay(&mut map, "out", &shared.out);
    Ok(map)
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut map = shared_map(&self.shared, &["input", "seed"])?;
        overlay(&mut map, "input", &self.input);
        overlay(&mut map, "seed", &self.seed);
        resolve(&map, false)
    }
}

impl SweepArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut map = shared_map(&self.shared, &["input", "seed", "grid", "analytic-only"])?;
        overlay(&mut map, "input", &self.input);
        overlay(&mut map, "seed", &self.seed);
        overlay(&mut map, "grid", &self.grid);
        let cfg = resolve(&map, self.analytic_only)?;
        if cfg.analytic_only && (cfg.input.is_some() || cfg.seed.is_some()) {
            return Err(CliError::Usage(
                "--analytic-only takes neither --input nor --seed".into(),
            ));
        }
        if cfg.deltas_given {
            return Err(CliError::Usage("sweep takes --grid, not --delta".into()));
        }
        Ok(cfg)
    }
}

impl VerifyArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut map = shared_map(&self.shared, &["dump-operators"])?;
        overlay(&mut map, "dump-operators", &self.dump_operators);
        resolve(&map, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_comments_and_spacing() {
        let map = parse_config_text("# header\nk = 3\n delta=-0.1,0,0.2  # trailing\n\n").unwrap();
        assert_eq!(map["k"], "3");
        assert_eq!(map["delta"], "-0.1,0,0.2");
        assert!(parse_config_text("k 3").is_err());
        assert!(parse_config_text("k = 2\nk = 3").is_err());
    }

    #[test]
    fn input_entries() {
        let v = parse_input("0.5,-0.5:0.5,0:-0.5").unwrap();
        assert_eq!(v[1], Complex64::new(-0.5, 0.5));
        assert_eq!(v[2], Complex64::new(0.0, -0.5));
        assert!(parse_input("a").is_err());
    }

    #[test]
    fn k_follows_delta_length() {
        let mut map = BTreeMap::new();
        map.insert("delta".to_string(), "0,0,0".to_string());
        assert_eq!(resolve(&map, false).unwrap().k, 3);
        map.insert("k".to_string(), "2".to_string());
        assert!(resolve(&map, false).is_err());
    }

    #[test]
    fn grid_axes() {
        let g = parse_grid("-0.3:0.3:3,-0.2:0.2:5").unwrap();
        assert_eq!(g[1].steps(), 5);
        assert!(parse_grid("-0.3:0.3").is_err());
        assert!(parse_grid("-0.9:0.3:3").is_err());
    }

    #[test]
    fn unnormalized_input_is_a_usage_error() {
        let mut map = BTreeMap::new();
        map.insert("input".to_string(), "1,1,0,0".to_string());
        assert!(matches!(resolve(&map, false), Err(CliError::Usage(_))));
    }
}
