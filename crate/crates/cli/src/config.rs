use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use midgraph::Budget;
use num_rational::Ratio;

#[derive(Parser, Debug)]
#[command(name = "midgraph", version, about = "Midpoint-graph hierarchy laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build G_0..G_level, write counts and the level cache.
    Build,
    /// Distance matrix of G_level, or one distance with its rho interval.
    Distances {
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
    },
    /// Exact simplex coordinates of V_level.
    Delta,
    /// Dyadic geodesic between two vertices on the 2^-depth grid.
    Geodesic {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Power-graph edge counts for every built level, m = 1..=power.
    Power,
    /// Clique search in the complement of G_level^power.
    Clique,
    /// Separated-set certificate for G_level and m = power.
    Separated,
    /// Split estimates, an edge-bound certificate (with --k) and the
    /// parameter scan (with --epsilon).
    Bound,
    /// Run the invariant suite; exits 1 on any gating violation.
    Verify,
    /// Export G_level as DOT, CSV or JSON.
    Export,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Flat key=value file with the same keys as the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n0: Option<u32>,
    #[arg(long, global = true)]
    pub level: Option<u32>,
    #[arg(long, global = true)]
    pub power: Option<u32>,
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Rational in (0, 1/16), e.g. 1/32.
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub budget_vertices: Option<u64>,
    #[arg(long, global = true)]
    pub budget_edges: Option<u64>,
    /// Wall-clock cap in seconds for exact clique search.
    #[arg(long, global = true)]
    pub time_cap: Option<u64>,
    #[arg(long, global = true)]
    pub exhaustive: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Greedy,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dot,
    Csv,
    Json,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().unwrap().get_name().to_string()
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&value_name(self))
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&value_name(self))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n0: u32,
    pub level: Option<u32>,
    pub power: Option<u32>,
    pub k: Option<u32>,
    pub epsilon: Option<Ratio<u64>>,
    pub mode: Option<Mode>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Option<Format>,
    pub budget_vertices: u64,
    pub budget_edges: u64,
    pub time_cap: Option<u64>,
    pub exhaustive: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let b = Budget::default();
        RunConfig {
            n0: 2,
            level: None,
            power: None,
            k: None,
            epsilon: None,
            mode: None,
            threads: None,
            seed: 0,
            out: PathBuf::from("."),
            format: None,
            budget_vertices: b.max_vertices,
            budget_edges: b.max_edge_bound,
            time_cap: None,
            exhaustive: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| format!("bad value {value:?} for {key}: {e}"))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, String> {
    T::from_str(value, false).map_err(|e| format!("bad value {value:?} for {key}: {e}"))
}

fn parse_epsilon(value: &str) -> Result<Ratio<u64>, String> {
    value
        .parse::<Ratio<u64>>()
        .map_err(|e| format!("bad value {value:?} for epsilon: {e}"))
}

impl RunConfig {
    /// Applies one `key=value` setting; keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "n0" => self.n0 = parse(key, value)?,
            "level" => self.level = Some(parse(key, value)?),
            "power" => self.power = Some(parse(key, value)?),
            "k" => self.k = Some(parse(key, value)?),
            "epsilon" => self.epsilon = Some(parse_epsilon(value)?),
            "mode" => self.mode = Some(parse_enum(key, value)?),
            "threads" => self.threads = Some(parse(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "format" => self.format = Some(parse_enum(key, value)?),
            "budget-vertices" => self.budget_vertices = parse(key, value)?,
            "budget-edges" => self.budget_edges = parse(key, value)?,
            "time-cap" => self.time_cap = Some(parse(key, value)?),
            "exhaustive" => self.exhaustive = parse(key, value)?,
            _ => return Err(format!("unknown config key {key:?}")),
        }
        Ok(())
    }

    pub fn from_file_str(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| format!("config line {}: {e}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn to_file_string(&self) -> String {
        let mut lines = vec![format!("n0={}", self.n0)];
        let mut opt = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                lines.push(format!("{key}={v}"));
            }
        };
        opt("level", self.level.map(|v| v.to_string()));
        opt("power", self.power.map(|v| v.to_string()));
        opt("k", self.k.map(|v| v.to_string()));
        opt("epsilon", self.epsilon.map(|v| v.to_string()));
        opt("mode", self.mode.map(|v| v.to_string()));
        opt("threads", self.threads.map(|v| v.to_string()));
        opt("format", self.format.map(|v| v.to_string()));
        opt("time-cap", self.time_cap.map(|v| v.to_string()));
        lines.push(format!("seed={}", self.seed));
        lines.push(format!("out={}", self.out.display()));
        lines.push(format!("budget-vertices={}", self.budget_vertices));
        lines.push(format!("budget-edges={}", self.budget_edges));
        lines.push(format!("exhaustive={}", self.exhaustive));
        lines.join("\n") + "\n"
    }

    /// Flags on top of an optional config file on top of the defaults.
    pub fn resolve(flags: &Flags) -> Result<RunConfig, String> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                RunConfig::from_file_str(&text)?
            }
            None => RunConfig::default(),
        };
        let f = flags.clone();
        cfg.n0 = f.n0.unwrap_or(cfg.n0);
        cfg.level = f.level.or(cfg.level);
        cfg.power = f.power.or(cfg.power);
        cfg.k = f.k.or(cfg.k);
        if let Some(e) = &f.epsilon {
            cfg.epsilon = Some(parse_epsilon(e)?);
        }
        cfg.mode = f.mode.or(cfg.mode);
        cfg.threads = f.threads.or(cfg.threads);
        cfg.seed = f.seed.unwrap_or(cfg.seed);
        cfg.out = f.out.unwrap_or(cfg.out);
        cfg.format = f.format.or(cfg.format);
        cfg.budget_vertices = f.budget_vertices.unwrap_or(cfg.budget_vertices);
        cfg.budget_edges = f.budget_edges.unwrap_or(cfg.budget_edges);
        cfg.time_cap = f.time_cap.or(cfg.time_cap);
        cfg.exhaustive |= f.exhaustive;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.n0 == 0 {
            return Err("n0 must be at least 1".into());
        }
        if self.budget_vertices == 0 || self.budget_edges == 0 {
            return Err("budgets must be positive".into());
        }
        if self.threads == Some(0) || self.time_cap == Some(0) {
            return Err("threads and time-cap must be positive".into());
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_vertices: self.budget_vertices,
            max_edge_bound: self.budget_edges,
        }
    }

    pub fn level(&self) -> Result<u32, String> {
        self.level.ok_or_else(|| "--level is required".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_form_round_trips() {
        let cfg = RunConfig {
            level: Some(5),
            power: Some(6),
            k: Some(3),
            epsilon: Some(Ratio::new(1, 32)),
            mode: Some(Mode::Greedy),
            threads: Some(2),
            seed: 7,
            out: PathBuf::from("runs/a"),
            format: Some(Format::Csv),
            time_cap: Some(30),
            exhaustive: true,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_file_str(&cfg.to_file_string()).unwrap(), cfg);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_file_str(&d.to_file_string()).unwrap(), d);
    }

    #[test]
    fn file_errors() {
        assert!(RunConfig::from_file_str("level 5").is_err());
        assert!(RunConfig::from_file_str("colour=blue").is_err());
        assert!(RunConfig::from_file_str("mode=fast").is_err());
        let c = RunConfig::from_file_str("# comment\n\n level = 4 \nepsilon=2/64\n").unwrap();
        assert_eq!((c.level, c.epsilon), (Some(4), Some(Ratio::new(1, 32))));
    }
}
