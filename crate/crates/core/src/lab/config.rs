//! Scenario files.
//!
//! The text format is one `key = value` per line with dotted section keys;
//! `#` starts a comment. Complex numbers are written `re,im` and lists of
//! them are separated by `;`.
//!
//! ```text
//! chain.family = ml
//! chain.n_sites = 4
//! chain.m = 1
//! chain.l = 2
//! psi0.preset = real
//! scan.repro = true
//! scan.steps = 4000
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, CouplingFamily};
use crate::error::{Error, Result};
use crate::packet::WavePacket;
use crate::transfer::CERTIFICATION_TOLERANCE;

/// Norm error above which an explicit initial state is rejected.
pub const NORM_REJECT: f64 = 1e-8;
/// Norm error above which an explicit initial state is renormalized.
pub const NORM_WARN: f64 = 1e-10;

pub const DEFAULT_STEPS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// `(5/6, √(11/36), 0, …)`.
    RealPacket,
    /// `((1+i)/2, 1/5 + i√(23/50), 0, …)`.
    ComplexPacket,
    /// One-based site label.
    Site { site: usize },
    Amplitudes { values: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    /// Defaults to `2τ` when the chain has a closed-form transfer time.
    pub t_max: Option<f64>,
    pub steps: usize,
    /// Forces `t_max = 2τ` and a step count divisible by four so that
    /// `0, τ/2, τ, 3τ/2, 2τ` are grid points.
    pub repro: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub certify: f64,
    pub relations: f64,
    pub spectrum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            certify: CERTIFICATION_TOLERANCE,
            relations: 1e-9,
            spectrum: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub chain: ChainSpec,
    pub psi0: InitialState,
    pub scan: ScanSettings,
    #[serde(default)]
    pub tol: Tolerances,
    #[serde(default)]
    pub output: Outputs,
}

impl ScenarioConfig {
    pub fn new(chain: ChainSpec, psi0: InitialState) -> Self {
        ScenarioConfig {
            chain,
            psi0,
            scan: ScanSettings {
                t_max: None,
                steps: DEFAULT_STEPS,
                repro: false,
            },
            tol: Tolerances::default(),
            output: Outputs::default(),
        }
    }

    /// Reads a `.json` file as JSON and anything else as key-value text.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text)
        } else {
            Self::parse(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::config("json", e.to_string()))?;
        // Deserialisation bypasses the chain constructor.
        let chain = ChainSpec::new(cfg.chain.n_sites(), cfg.chain.j0(), cfg.chain.family().clone())?;
        let cfg = ScenarioConfig { chain, ..cfg };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim().to_string();
            if kv.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::config(key, "given more than once"));
            }
        }
        let mut fields = Fields(kv);
        let cfg = fields.build()?;
        if let Some(key) = fields.0.keys().next() {
            return Err(Error::config(key.clone(), "unknown key"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Key-value echo that parses back to the same scenario.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let c = &self.chain;
        let family = match c.family() {
            CouplingFamily::Christandl => "christandl",
            CouplingFamily::KFamily { .. } => "k",
            CouplingFamily::MlFamily { .. } => "ml",
            CouplingFamily::Custom { .. } => "custom",
        };
        let _ = writeln!(out, "chain.family = {family}");
        let _ = writeln!(out, "chain.n_sites = {}", c.n_sites());
        let _ = writeln!(out, "chain.j0 = {:?}", c.j0());
        match c.family() {
            CouplingFamily::KFamily { k } => {
                let _ = writeln!(out, "chain.k = {k}");
            }
            CouplingFamily::MlFamily { m, l } => {
                let _ = writeln!(out, "chain.m = {m}\nchain.l = {l}");
            }
            CouplingFamily::Custom { values } => {
                let list: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
                let _ = writeln!(out, "chain.couplings = {}", list.join(", "));
            }
            CouplingFamily::Christandl => {}
        }
        match &self.psi0 {
            InitialState::RealPacket => out.push_str("psi0.preset = real\n"),
            InitialState::ComplexPacket => out.push_str("psi0.preset = complex\n"),
            InitialState::Site { site } => {
                let _ = writeln!(out, "psi0.preset = site:{site}");
            }
            InitialState::Amplitudes { values } => {
                let list: Vec<String> = values.iter().map(|v| format!("{:?},{:?}", v.re, v.im)).collect();
                let _ = writeln!(out, "psi0.amplitudes = {}", list.join("; "));
            }
        }
        if let Some(t) = self.scan.t_max {
            let _ = writeln!(out, "scan.t_max = {t:?}");
        }
        let _ = writeln!(out, "scan.steps = {}", self.scan.steps);
        let _ = writeln!(out, "scan.repro = {}", self.scan.repro);
        let _ = writeln!(out, "tol.certify = {:?}", self.tol.certify);
        let _ = writeln!(out, "tol.relations = {:?}", self.tol.relations);
        let _ = writeln!(out, "tol.spectrum = {:?}", self.tol.spectrum);
        if let Some(p) = &self.output.csv {
            let _ = writeln!(out, "output.csv = {}", p.display());
        }
        if let Some(p) = &self.output.report {
            let _ = writeln!(out, "output.report = {}", p.display());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.scan.steps < 2 {
            return Err(Error::config("scan.steps", "need at least 2 steps"));
        }
        if let Some(t) = self.scan.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::config("scan.t_max", "must be finite and positive"));
            }
        }
        for (name, v) in [
            ("tol.certify", self.tol.certify),
            ("tol.relations", self.tol.relations),
            ("tol.spectrum", self.tol.spectrum),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, "tolerance must be finite and positive"));
            }
        }
        self.initial_packet().map(|_| ())
    }

    /// The initial packet, renormalized with a warning when slightly off.
    pub fn initial_packet(&self) -> Result<WavePacket> {
        let n = self.chain.n_sites();
        let packet = match &self.psi0 {
            InitialState::RealPacket => WavePacket::two_site_real(n),
            InitialState::ComplexPacket => WavePacket::two_site_complex(n),
            InitialState::Site { site } => {
                if *site == 0 || *site > n {
                    return Err(Error::config("psi0.preset", format!("site {site} is not in 1..={n}")));
                }
                WavePacket::localized(n, site - 1)
            }
            InitialState::Amplitudes { values } => {
                if values.len() != n {
                    return Err(Error::config(
                        "psi0.amplitudes",
                        format!("expected {n} amplitudes, got {}", values.len()),
                    ));
                }
                let norm: f64 = values.iter().map(|c| c.norm_sqr()).sum();
                if !norm.is_finite() || (norm - 1.0).abs() > NORM_REJECT {
                    return Err(Error::config("psi0.amplitudes", format!("Σ|c|² = {norm} is not 1")));
                }
                if (norm - 1.0).abs() > NORM_WARN {
                    log::warn!("initial state has Σ|c|² = {norm}; renormalizing");
                    WavePacket::normalized(values.clone())
                } else {
                    WavePacket::new(values.clone())
                }
            }
        };
        packet.map_err(|e| match e {
            Error::Validation(msg) => Error::config("psi0", msg),
            other => other,
        })
    }

    pub fn tau(&self) -> Option<f64> {
        self.chain.characteristic_time().ok()
    }

    /// `t_i = i t_max / steps` for `i = 0..=steps`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let (t_max, steps) = if self.scan.repro {
            let tau = self
                .tau()
                .ok_or_else(|| Error::config("scan.repro", "needs a family with a closed-form transfer time"))?;
            if self.scan.t_max.is_some_and(|t| (t - 2.0 * tau).abs() > 1e-12 * tau) {
                log::warn!("reproduction mode overrides scan.t_max with 2τ = {}", 2.0 * tau);
            }
            (2.0 * tau, self.scan.steps.div_ceil(4) * 4)
        } else {
            let t_max = self.scan.t_max.or_else(|| self.tau().map(|t| 2.0 * t)).ok_or_else(|| {
                Error::config("scan.t_max", "required for chains without a closed-form transfer time")
            })?;
            (t_max, self.scan.steps)
        };
        Ok((0..=steps).map(|i| t_max * i as f64 / steps as f64).collect())
    }
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| Error::config(key, "missing"))
    }

    fn parsed<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse()
            .map_err(|e: T::Err| Error::config(key, format!("cannot parse `{value}`: {e}")))
    }

    fn opt<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key).map(|v| Self::parsed(key, &v)).transpose()
    }

    fn req<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.require(key)?;
        Self::parsed(key, &v)
    }

    fn build(&mut self) -> Result<ScenarioConfig> {
        let n: usize = self.req("chain.n_sites")?;
        let j0: f64 = self.opt("chain.j0")?.unwrap_or(1.0);
        let family = match self.require("chain.family")?.to_ascii_lowercase().as_str() {
            "christandl" => CouplingFamily::Christandl,
            "k" => CouplingFamily::KFamily { k: self.req("chain.k")? },
            "ml" => CouplingFamily::MlFamily {
                m: self.req("chain.m")?,
                l: self.req("chain.l")?,
            },
            "custom" => {
                let raw = self.require("chain.couplings")?;
                let values = raw
                    .split(',')
                    .map(|v| Self::parsed("chain.couplings", v.trim()))
                    .collect::<Result<Vec<f64>>>()?;
                CouplingFamily::Custom { values }
            }
            "uniform" => CouplingFamily::Custom {
                values: vec![1.0; n.saturating_sub(1)],
            },
            other => {
                return Err(Error::config(
                    "chain.family",
                    format!("unknown family `{other}` (christandl, k, ml, custom, uniform)"),
                ))
            }
        };
        let chain = ChainSpec::new(n, j0, family)?;

        let psi0 = match (self.take("psi0.preset"), self.take("psi0.amplitudes")) {
            (Some(_), Some(_)) => {
                return Err(Error::config("psi0", "give either psi0.preset or psi0.amplitudes"))
            }
            (None, None) => InitialState::Site { site: 1 },
            (Some(p), None) => match p.as_str() {
                "real" => InitialState::RealPacket,
                "complex" => InitialState::ComplexPacket,
                s => match s.strip_prefix("site:") {
                    Some(j) => InitialState::Site {
                        site: Self::parsed("psi0.preset", j.trim())?,
                    },
                    None => {
                        return Err(Error::config(
                            "psi0.preset",
                            format!("unknown preset `{s}` (real, complex, site:<j>)"),
                        ))
                    }
                },
            },
            (None, Some(raw)) => InitialState::Amplitudes {
                values: parse_complex_list(&raw)?,
            },
        };

        let mut cfg = ScenarioConfig::new(chain, psi0);
        cfg.scan.t_max = self.opt("scan.t_max")?;
        cfg.scan.steps = self.opt("scan.steps")?.unwrap_or(DEFAULT_STEPS);
        cfg.scan.repro = self.opt("scan.repro")?.unwrap_or(false);
        let d = Tolerances::default();
        cfg.tol = Tolerances {
            certify: self.opt("tol.certify")?.unwrap_or(d.certify),
            relations: self.opt("tol.relations")?.unwrap_or(d.relations),
            spectrum: self.opt("tol.spectrum")?.unwrap_or(d.spectrum),
        };
        cfg.output = Outputs {
            csv: self.take("output.csv").map(PathBuf::from),
            report: self.take("output.report").map(PathBuf::from),
        };
        Ok(cfg)
    }
}

fn parse_complex_list(raw: &str) -> Result<Vec<Complex64>> {
    raw.split(';')
        .map(|item| {
            let item = item.trim();
            let (re, im) = item.split_once(',').unwrap_or((item, "0"));
            Ok(Complex64::new(
                Fields::parsed("psi0.amplitudes", re.trim())?,
                Fields::parsed("psi0.amplitudes", im.trim())?,
            ))
        })
        .collect()
}
