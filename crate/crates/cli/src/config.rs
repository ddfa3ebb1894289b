//! Run configuration: a JSON file overlaid by command-line flags.

use clap::{Args, ValueEnum};
use plate_tone::ball::{MAX_TAU, MIN_TAU};
use plate_tone::domain::{StarDomain, MAX_MODE};
use plate_tone::solver::{Problem, MAX_DEGREE, MIN_DEGREE};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SWEEP: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    BallTone,
    Properties,
    Bound,
    Asymmetry,
    Sharpness,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::BallTone => "ball-tone",
            Self::Properties => "properties",
            Self::Bound => "bound",
            Self::Asymmetry => "asymmetry",
            Self::Sharpness => "sharpness",
        }
    }
}

/// A perturbation shape: a preset such as `cos3` / `sin4`, or raw coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiSpec {
    Preset(String),
    Coefficients {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl PsiSpec {
    pub fn domain(&self, eps: f64) -> Result<StarDomain, String> {
        match self {
            Self::Preset(name) => {
                let (sine, digits) = if let Some(k) = name.strip_prefix("cos") {
                    (false, k)
                } else if let Some(k) = name.strip_prefix("sin") {
                    (true, k)
                } else {
                    return Err(format!("psi preset {name:?} is not cosK or sinK"));
                };
                let k: usize = digits.parse().map_err(|_| format!("psi preset {name:?} has no mode number"))?;
                if !(1..=MAX_MODE).contains(&k) {
                    return Err(format!("psi mode {k} outside 1..={MAX_MODE}"));
                }
                StarDomain::single_mode(eps, k, sine).map_err(|e| e.to_string())
            }
            Self::Coefficients { cos, sin } => {
                StarDomain::new(eps, cos.clone(), sin.clone()).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub tau: f64,
    pub dim: u32,
    pub problem: Problem,
    pub psi: PsiSpec,
    /// A `{"eps", "cos", "sin"}` file; takes precedence over `psi`.
    pub domain: Option<PathBuf>,
    pub eps: Vec<f64>,
    pub degree: usize,
    /// Number of seeded random domains for `bound`.
    pub random: Option<usize>,
    pub seed: u64,
    /// Directory receiving the report files.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            tau: 1.0,
            dim: 2,
            problem: Problem::Neumann,
            psi: PsiSpec::Preset("cos3".into()),
            domain: None,
            eps: Vec::new(),
            degree: 20,
            random: None,
            seed: DEFAULT_SEED,
            out: None,
        }
    }
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub dim: Option<u32>,
    /// neumann or steklov.
    #[arg(long, global = true)]
    pub problem: Option<String>,
    /// cosK or sinK.
    #[arg(long, global = true)]
    pub psi: Option<String>,
    /// Domain file with eps, cos and sin.
    #[arg(long, global = true)]
    pub domain: Option<PathBuf>,
    /// A value, a comma list or start:stop:count.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Number of random class-P domains for `bound`.
    #[arg(long, global = true)]
    pub random: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
}

/// Parses `0.08`, `0.02,0.05` or `0.02:0.1:5` (inclusive, evenly spaced).
pub fn parse_eps(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad eps value {t:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count.trim().parse().map_err(|_| format!("bad eps count {count:?}"))?;
            match n {
                0 => Err("eps count must be positive".into()),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(format!("eps {s:?} is neither a list nor start:stop:count")),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Applies flags, fills command-dependent defaults and validates.
    pub fn resolve(mut self, command: Option<CommandKind>, o: &Overrides) -> Result<Self, String> {
        if command.is_some() {
            self.command = command;
        }
        if let Some(v) = o.tau {
            self.tau = v;
        }
        if let Some(v) = o.dim {
            self.dim = v;
        }
        if let Some(v) = &o.problem {
            self.problem = v.parse().map_err(|e: plate_tone::Error| e.to_string())?;
        }
        if let Some(v) = &o.psi {
            self.psi = PsiSpec::Preset(v.clone());
        }
        if let Some(v) = &o.domain {
            self.domain = Some(v.clone());
        }
        if let Some(v) = &o.eps {
            self.eps = parse_eps(v)?;
        }
        if let Some(v) = o.degree {
            self.degree = v;
        }
        if let Some(v) = o.random {
            self.random = Some(v);
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        let command = self.command.ok_or("no command given")?;
        if command == CommandKind::Sharpness && self.eps.is_empty() {
            self.eps = DEFAULT_SWEEP.to_vec();
        }
        self.validate(command)?;
        Ok(self)
    }

    fn validate(&self, command: CommandKind) -> Result<(), String> {
        if !(MIN_TAU..=MAX_TAU).contains(&self.tau) {
            return Err(format!("tau = {} outside [{MIN_TAU}, {MAX_TAU}]", self.tau));
        }
        let planar = !matches!(command, CommandKind::BallTone | CommandKind::Properties);
        match (self.dim, planar) {
            (2, _) | (3, false) => {}
            (d, _) => return Err(format!("dim = {d} not supported by {}", command.name())),
        }
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&self.degree) {
            return Err(format!("degree = {} outside [{MIN_DEGREE}, {MAX_DEGREE}]", self.degree));
        }
        if let Some(e) = self.eps.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(format!("eps = {e} must be finite and nonnegative"));
        }
        let needs_shape = matches!(command, CommandKind::Bound | CommandKind::Asymmetry)
            && self.domain.is_none()
            && !(command == CommandKind::Bound && self.random.is_some());
        if needs_shape && self.eps.len() != 1 {
            return Err(format!("{} needs exactly one eps value or a domain file", command.name()));
        }
        if self.random == Some(0) {
            return Err("random count must be positive".into());
        }
        Ok(())
    }

    /// The single domain addressed by `bound` and `asymmetry`.
    pub fn domain(&self) -> Result<StarDomain, String> {
        match &self.domain {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
            None => self.psi.domain(self.eps[0]),
        }
    }

    /// The perturbation shape swept by `sharpness`; its own amplitude is ignored.
    pub fn shape(&self) -> Result<StarDomain, String> {
        match &self.domain {
            Some(_) => {
                let d = self.domain()?;
                d.with_eps(0.0).map_err(|e| e.to_string())
            }
            None => self.psi.domain(0.0),
        }
    }
}
