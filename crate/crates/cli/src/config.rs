//! Run configuration: a flat key-value text file with dotted sections
//! (`params.k = 0.0245`), overridable from the command line. Unknown keys
//! are rejected and every value is validated before any computation starts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use triradical::correlations::DiscordOpts;
use triradical::model::{InteractionKind, SensorParams};
use triradical::states::{BlochVector, InitialFamily};

/// Configuration error with enough context to locate the offending line.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type CfgResult<T> = Result<T, ConfigError>;

/// How the sweep draws its qubit states.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SweepFamily {
    Ball,
    ZAxis,
    /// Alternate ball (even indices) and z-axis (odd indices) draws.
    Mixed,
}

impl SweepFamily {
    fn parse(s: &str) -> CfgResult<Self> {
        match s {
            "ball" => Ok(SweepFamily::Ball),
            "zaxis" => Ok(SweepFamily::ZAxis),
            "mixed" => Ok(SweepFamily::Mixed),
            other => Err(ConfigError(format!(
                "sweep.family must be ball, zaxis or mixed, got '{other}'"
            ))),
        }
    }

    pub fn family_for(self, index: usize) -> InitialFamily {
        match self {
            SweepFamily::Ball => InitialFamily::BallUniform,
            SweepFamily::ZAxis => InitialFamily::ZAxis,
            SweepFamily::Mixed => {
                if index.is_multiple_of(2) {
                    InitialFamily::BallUniform
                } else {
                    InitialFamily::ZAxis
                }
            }
        }
    }
}

/// Observables that can be attached to scans, sweeps and yield studies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ObservableKey {
    C1Star,
    Mutual,
    Discord,
    Holevo,
}

impl ObservableKey {
    fn parse(s: &str) -> CfgResult<Self> {
        match s {
            "c1_star" => Ok(ObservableKey::C1Star),
            "mutual" => Ok(ObservableKey::Mutual),
            "discord" => Ok(ObservableKey::Discord),
            "holevo" => Ok(ObservableKey::Holevo),
            other => Err(ConfigError(format!(
                "unknown observable '{other}' (expected c1_star, mutual, discord, holevo)"
            ))),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: SensorParams,
    pub n_theta: usize,
    pub n_phi: usize,
    pub sweep_states: usize,
    pub sweep_family: SweepFamily,
    pub init_family: InitialFamily,
    pub init_bloch: Option<BlochVector>,
    pub env_bloch: BlochVector,
    pub observables: Vec<ObservableKey>,
    pub eps_tail: f64,
    pub n_sub: usize,
    pub discord_opts: DiscordOpts,
    pub verify_samples: usize,
    pub verify_angles: usize,
    pub swap_demo_states: usize,
    pub yields_theta: f64,
    pub yields_phi: f64,
    pub trajectory: bool,
    pub svg: bool,
    pub seed: u64,
    pub threads: usize,
    pub out_dir: String,
    /// Whether params.j_se_tau was given explicitly (the swap default π/4
    /// applies only when it was not).
    j_se_tau_explicit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: SensorParams::default(),
            n_theta: 16,
            n_phi: 9,
            sweep_states: 150,
            sweep_family: SweepFamily::Mixed,
            init_family: InitialFamily::BallUniform,
            init_bloch: None,
            env_bloch: BlochVector::new(0.0, 0.0, 0.0),
            observables: Vec::new(),
            eps_tail: 1e-8,
            n_sub: 8,
            discord_opts: DiscordOpts {
                restarts: 2,
                max_sweeps: 6,
                tol: 1e-4,
                seed: 0,
            },
            verify_samples: 100,
            verify_angles: 100,
            swap_demo_states: 500,
            yields_theta: 0.0,
            yields_phi: 0.0,
            trajectory: false,
            svg: true,
            seed: 1,
            threads: 0,
            out_dir: "out".to_string(),
            j_se_tau_explicit: false,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> CfgResult<f64> {
    let cleaned = match v {
        "pi/2" => return Ok(std::f64::consts::FRAC_PI_2),
        "pi/4" => return Ok(std::f64::consts::FRAC_PI_4),
        other => other,
    };
    cleaned
        .parse::<f64>()
        .map_err(|_| ConfigError(format!("{key}: expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> CfgResult<usize> {
    v.parse::<usize>()
        .map_err(|_| ConfigError(format!("{key}: expected a non-negative integer, got '{v}'")))
}

fn parse_u64(key: &str, v: &str) -> CfgResult<u64> {
    v.parse::<u64>()
        .map_err(|_| ConfigError(format!("{key}: expected a non-negative integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> CfgResult<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(ConfigError(format!(
            "{key}: expected true/false, got '{other}'"
        ))),
    }
}

impl RunConfig {
    /// Parse a config file; `overrides` are `key=value` pairs applied after.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> CfgResult<Self> {
        let mut pairs: Vec<(String, String, String)> = Vec::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(ConfigError(format!(
                        "{}:{}: expected 'key = value', got '{raw}'",
                        p.display(),
                        lineno + 1
                    )));
                };
                pairs.push((
                    k.trim().to_string(),
                    v.trim().to_string(),
                    format!("{}:{}", p.display(), lineno + 1),
                ));
            }
        }
        for (k, v) in overrides {
            pairs.push((k.clone(), v.clone(), "command line".to_string()));
        }

        let mut cfg = RunConfig::default();
        let mut init_bloch = [0.0f64; 3];
        let mut init_bloch_set = false;
        for (key, value, origin) in pairs.iter() {
            cfg.apply(key, value, &mut init_bloch, &mut init_bloch_set)
                .map_err(|e| ConfigError(format!("{origin}: {}", e.0)))?;
        }
        if init_bloch_set {
            cfg.init_bloch = Some(BlochVector::new(init_bloch[0], init_bloch[1], init_bloch[2]));
        }
        // The swap interaction defaults to its perfect-swap calibration when
        // the product was not pinned explicitly.
        if cfg.params.interaction_kind == InteractionKind::Swap && !cfg.j_se_tau_explicit {
            cfg.params.j_se_tau = std::f64::consts::FRAC_PI_4;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(
        &mut self,
        key: &str,
        v: &str,
        init_bloch: &mut [f64; 3],
        init_bloch_set: &mut bool,
    ) -> CfgResult<()> {
        match key {
            "params.j_abc" => self.params.j_abc = parse_f64(key, v)?,
            "params.k" => self.params.k = parse_f64(key, v)?,
            "params.gamma_b0" => self.params.gamma_b0 = parse_f64(key, v)?,
            "params.tau_se" => self.params.tau_se = parse_f64(key, v)?,
            "params.tau_ee" => self.params.tau_ee = parse_f64(key, v)?,
            "params.j_se_tau" => {
                self.params.j_se_tau = parse_f64(key, v)?;
                self.j_se_tau_explicit = true;
            }
            "params.interaction" => {
                self.params.interaction_kind =
                    InteractionKind::parse(v).map_err(|e| ConfigError(e.to_string()))?
            }
            "grid.n_theta" => self.n_theta = parse_usize(key, v)?,
            "grid.n_phi" => self.n_phi = parse_usize(key, v)?,
            "sweep.n_states" => self.sweep_states = parse_usize(key, v)?,
            "sweep.family" => self.sweep_family = SweepFamily::parse(v)?,
            "init.family" => {
                self.init_family =
                    InitialFamily::parse(v).map_err(|e| ConfigError(e.to_string()))?
            }
            "init.bloch_x" => {
                init_bloch[0] = parse_f64(key, v)?;
                *init_bloch_set = true;
            }
            "init.bloch_y" => {
                init_bloch[1] = parse_f64(key, v)?;
                *init_bloch_set = true;
            }
            "init.bloch_z" => {
                init_bloch[2] = parse_f64(key, v)?;
                *init_bloch_set = true;
            }
            "env.bloch_x" => self.env_bloch.x = parse_f64(key, v)?,
            "env.bloch_y" => self.env_bloch.y = parse_f64(key, v)?,
            "env.bloch_z" => self.env_bloch.z = parse_f64(key, v)?,
            "observables" => {
                self.observables = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(ObservableKey::parse)
                    .collect::<CfgResult<Vec<_>>>()?;
            }
            "eps_tail" => self.eps_tail = parse_f64(key, v)?,
            "n_sub" => self.n_sub = parse_usize(key, v)?,
            "discord.restarts" => self.discord_opts.restarts = parse_usize(key, v)?,
            "discord.max_iters" => self.discord_opts.max_sweeps = parse_usize(key, v)?,
            "discord.tol" => self.discord_opts.tol = parse_f64(key, v)?,
            "verify.samples" => self.verify_samples = parse_usize(key, v)?,
            "verify.angles" => self.verify_angles = parse_usize(key, v)?,
            "swap_demo.n_states" => self.swap_demo_states = parse_usize(key, v)?,
            "yields.theta" => self.yields_theta = parse_f64(key, v)?,
            "yields.phi" => self.yields_phi = parse_f64(key, v)?,
            "trajectory" => self.trajectory = parse_bool(key, v)?,
            "svg" => self.svg = parse_bool(key, v)?,
            "seed" => self.seed = parse_u64(key, v)?,
            "threads" => self.threads = parse_usize(key, v)?,
            "out" => self.out_dir = v.to_string(),
            other => {
                return Err(ConfigError(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    fn validate(&self) -> CfgResult<()> {
        self.params
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        if self.n_theta < 4 || self.n_phi < 3 {
            return Err(ConfigError(format!(
                "grid must be at least 4x3, got {}x{}",
                self.n_theta, self.n_phi
            )));
        }
        if !(self.eps_tail > 0.0 && self.eps_tail < 1.0) {
            return Err(ConfigError(format!(
                "eps_tail must lie in (0, 1), got {}",
                self.eps_tail
            )));
        }
        if self.n_sub == 0 {
            return Err(ConfigError("n_sub must be at least 1".to_string()));
        }
        if self.discord_opts.restarts == 0 {
            return Err(ConfigError("discord.restarts must be at least 1".to_string()));
        }
        if let Some(b) = &self.init_bloch {
            if b.norm() > 1.0 + 1e-12 {
                return Err(ConfigError(format!(
                    "init.bloch_* must lie in the unit ball, |r| = {}",
                    b.norm()
                )));
            }
        }
        if self.env_bloch.norm() > 1.0 + 1e-12 {
            return Err(ConfigError(format!(
                "env.bloch_* must lie in the unit ball, |r| = {}",
                self.env_bloch.norm()
            )));
        }
        if self.verify_angles < 6 {
            return Err(ConfigError(
                "verify.angles must be at least 6 (the coordinate axes)".to_string(),
            ));
        }
        Ok(())
    }

    /// Canonical serialization of every resolved value, hashed into output
    /// headers so files are traceable to their exact configuration.
    pub fn canonical_string(&self) -> String {
        let mut map = BTreeMap::new();
        let p = &self.params;
        map.insert("params.j_abc", format!("{:.17e}", p.j_abc));
        map.insert("params.k", format!("{:.17e}", p.k));
        map.insert("params.gamma_b0", format!("{:.17e}", p.gamma_b0));
        map.insert("params.tau_se", format!("{:.17e}", p.tau_se));
        map.insert("params.tau_ee", format!("{:.17e}", p.tau_ee));
        map.insert("params.j_se_tau", format!("{:.17e}", p.j_se_tau));
        map.insert("params.interaction", p.interaction_kind.name().to_string());
        map.insert("grid.n_theta", self.n_theta.to_string());
        map.insert("grid.n_phi", self.n_phi.to_string());
        map.insert("sweep.n_states", self.sweep_states.to_string());
        map.insert("sweep.family", format!("{:?}", self.sweep_family));
        map.insert("init.family", self.init_family.name().to_string());
        if let Some(b) = &self.init_bloch {
            map.insert(
                "init.bloch",
                format!("{:.17e},{:.17e},{:.17e}", b.x, b.y, b.z),
            );
        }
        map.insert(
            "env.bloch",
            format!(
                "{:.17e},{:.17e},{:.17e}",
                self.env_bloch.x, self.env_bloch.y, self.env_bloch.z
            ),
        );
        map.insert("observables", format!("{:?}", self.observables));
        map.insert("eps_tail", format!("{:.17e}", self.eps_tail));
        map.insert("n_sub", self.n_sub.to_string());
        map.insert(
            "discord",
            format!(
                "{},{},{:.17e}",
                self.discord_opts.restarts, self.discord_opts.max_sweeps, self.discord_opts.tol
            ),
        );
        map.insert("verify.samples", self.verify_samples.to_string());
        map.insert("verify.angles", self.verify_angles.to_string());
        map.insert("swap_demo.n_states", self.swap_demo_states.to_string());
        map.insert("yields.theta", format!("{:.17e}", self.yields_theta));
        map.insert("yields.phi", format!("{:.17e}", self.yields_phi));
        map.insert("trajectory", self.trajectory.to_string());
        map.insert("seed", self.seed.to_string());
        let mut s = String::new();
        for (k, v) in map.iter() {
            s.push_str(k);
            s.push('=');
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    /// FNV-1a hash of the canonical configuration.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical_string().as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}
