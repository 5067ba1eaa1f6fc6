//! Experiment plans: scenario, n grid, rates, replication and output
//! settings. A plan can come from a flat `key=value` file, from command-line
//! flags, or both — flags override file entries of the same name.

use std::path::PathBuf;

use aoi_gossip::{AdversarySpec, SimConfig, SimMode};

/// Scenario selector as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Baseline,
    Capture,
    CaptureThinned,
    Mitm,
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Scenario> {
        match s {
            "baseline" => Some(Scenario::Baseline),
            "capture" => Some(Scenario::Capture),
            "capture-thinned" => Some(Scenario::CaptureThinned),
            "mitm" => Some(Scenario::Mitm),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::Capture => "capture",
            Scenario::CaptureThinned => "capture-thinned",
            Scenario::Mitm => "mitm",
        }
    }

    pub fn is_adversarial(&self) -> bool {
        !matches!(self, Scenario::Baseline)
    }
}

/// Tampering realization requested on the command line. `Both` runs the
/// explicit-coin and thinned forms side by side (capture scenarios only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Coin,
    Thinned,
    Both,
}

impl RunMode {
    pub fn parse(s: &str) -> Option<RunMode> {
        match s {
            "coin" => Some(RunMode::Coin),
            "thinned" => Some(RunMode::Thinned),
            "both" => Some(RunMode::Both),
            _ => None,
        }
    }
}

/// One simulation pass of a plan: a CSV scenario label plus engine mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pass {
    pub label: &'static str,
    pub mode: SimMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    pub n_values: Vec<usize>,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    /// Simulated horizon is `horizon_mult * n` seconds.
    pub horizon_mult: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub mode: RunMode,
    pub tolerance: f64,
    /// Worker threads for replications; 0 means available parallelism.
    pub jobs: usize,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn defaults(scenario: Scenario) -> ExperimentPlan {
        // Default grids are sized for a desk-scale reproduction of the age
        // curves: powers of two up to 1024 nodes (256 for MITM, whose
        // interesting range is smaller).
        let max = match scenario {
            Scenario::Mitm => 256,
            _ => 1024,
        };
        let n_values = (2..).map(|e| 1usize << e).take_while(|&n| n <= max).collect();
        ExperimentPlan {
            scenario,
            n_values,
            p: 1.0,
            q: 1.0,
            lambda: 1.0,
            horizon_mult: 1000.0,
            reps: 10,
            master_seed: 42,
            mode: RunMode::Coin,
            tolerance: 0.10,
            jobs: 0,
            csv: None,
            svg: None,
        }
    }

    /// Applies `key=value` entries in order (later entries win). Flag names
    /// double as plan-file keys, without the leading dashes.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "scenario" => {
                let scenario = Scenario::parse(value)
                    .ok_or_else(|| format!("unknown scenario '{value}' (expected baseline, capture, capture-thinned, or mitm)"))?;
                self.scenario = scenario;
            }
            "n" => self.n_values = parse_n_spec(value)?,
            "p" => self.p = parse_f64(key, value)?,
            "q" => self.q = parse_f64(key, value)?,
            "lambda" => self.lambda = parse_f64(key, value)?,
            "horizon-mult" => self.horizon_mult = parse_f64(key, value)?,
            "reps" => self.reps = parse_usize(key, value)?,
            "seed" => {
                self.master_seed = value
                    .parse::<u64>()
                    .map_err(|_| format!("invalid value '{value}' for seed"))?;
            }
            "mode" => {
                self.mode = RunMode::parse(value)
                    .ok_or_else(|| format!("unknown mode '{value}' (expected coin, thinned, or both)"))?;
            }
            "tolerance" => self.tolerance = parse_f64(key, value)?,
            "jobs" => self.jobs = parse_usize(key, value)?,
            "csv" => self.csv = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown plan key '{key}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_values.is_empty() {
            return Err("n grid is empty".into());
        }
        let min_n = if self.scenario.is_adversarial() { 2 } else { 1 };
        if let Some(&bad) = self.n_values.iter().find(|&&n| n < min_n) {
            return Err(format!(
                "n = {bad} too small for scenario {} (minimum {min_n})",
                self.scenario.as_str()
            ));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.horizon_mult.is_finite() && self.horizon_mult > 0.0) {
            return Err(format!(
                "horizon-mult must be positive, got {}",
                self.horizon_mult
            ));
        }
        if self.reps == 0 {
            return Err("reps must be at least 1".into());
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.mode == RunMode::Both
            && !matches!(self.scenario, Scenario::Capture | Scenario::CaptureThinned)
        {
            return Err("mode 'both' only applies to capture scenarios".into());
        }
        Ok(())
    }

    /// The simulation passes this plan expands to.
    pub fn passes(&self) -> Vec<Pass> {
        let coin = Pass {
            label: "capture",
            mode: SimMode::ExplicitCoin,
        };
        let thinned = Pass {
            label: "capture-thinned",
            mode: SimMode::Thinned,
        };
        match (self.scenario, self.mode) {
            (Scenario::Baseline, _) => vec![Pass {
                label: "baseline",
                mode: SimMode::ExplicitCoin,
            }],
            (Scenario::Mitm, _) => vec![Pass {
                label: "mitm",
                mode: SimMode::ExplicitCoin,
            }],
            (Scenario::Capture, RunMode::Coin) => vec![coin],
            (Scenario::Capture, RunMode::Thinned) => vec![thinned],
            (Scenario::CaptureThinned, RunMode::Both) => vec![coin, thinned],
            (Scenario::CaptureThinned, _) => vec![thinned],
            (Scenario::Capture, RunMode::Both) => vec![coin, thinned],
        }
    }

    /// Engine configuration for one pass at one network size.
    pub fn sim_config(&self, n: usize, pass: Pass) -> SimConfig {
        let mut cfg = SimConfig::new(n);
        cfg.lambda = self.lambda;
        cfg.horizon = self.horizon_mult * n as f64;
        cfg.mode = pass.mode;
        cfg.adversary = match self.scenario {
            Scenario::Baseline => AdversarySpec::None,
            Scenario::Capture | Scenario::CaptureThinned => AdversarySpec::NodeCapture {
                p: self.p,
                q: self.q,
            },
            Scenario::Mitm => AdversarySpec::Mitm,
        };
        cfg
    }

    pub fn effective_jobs(&self) -> usize {
        if self.jobs > 0 {
            self.jobs
        } else {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("invalid value '{value}' for {key}"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("invalid value '{value}' for {key}"))
}

/// Parses an n grid: either a comma list ("4,8,16") or an inclusive
/// arithmetic range "start:stop:step".
pub fn parse_n_spec(spec: &str) -> Result<Vec<usize>, String> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range spec '{spec}' must be start:stop:step"));
        }
        let start = parse_usize("n start", parts[0])?;
        let stop = parse_usize("n stop", parts[1])?;
        let step = parse_usize("n step", parts[2])?;
        if step == 0 {
            return Err("n step must be positive".into());
        }
        if stop < start {
            return Err(format!("empty range '{spec}'"));
        }
        Ok((start..=stop).step_by(step).collect())
    } else {
        spec.split(',')
            .map(|part| parse_usize("n", part.trim()))
            .collect()
    }
}

/// Parses a flat plan file: one `key=value` per line, `#` comments allowed.
pub fn parse_plan_file(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got '{line}'", lineno + 1))?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}
