//! Run configuration: presets, config files and command-line overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tavis::linalg::C64;
use tavis::model::{basis_vector, singlet, AtomicVector, SystemParams, TwoAtomAmplitudes, EE, EG, GE, GG};
use tavis::propagator::ClosedFormMode;

use crate::error::{CliError, CliResult};

/// Per-atom normalization slack for user-supplied amplitudes.
pub const AMPLITUDE_TOL: f64 = 1e-9;

pub const DEFAULT_TAU_MAX: f64 = 10.0;
pub const DEFAULT_STEPS: usize = 1001;
pub const STDOUT: &str = "-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    Ee,
    Gg,
    Eg,
    Ge,
    Singlet,
    Custom,
}

impl Initial {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ee => "ee",
            Self::Gg => "gg",
            Self::Eg => "eg",
            Self::Ge => "ge",
            Self::Singlet => "singlet",
            Self::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Series,
    Sweep,
    Audit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    Strict,
    Corrected,
}

impl From<AuditMode> for ClosedFormMode {
    fn from(m: AuditMode) -> Self {
        match m {
            AuditMode::Strict => ClosedFormMode::Strict,
            AuditMode::Corrected => ClosedFormMode::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Delta,
    NPhoton,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::NPhoton => "n_photon",
        }
    }
}

/// `param:start:stop:count`, evenly spaced and inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k == self.count - 1 {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }

    fn validate(&self) -> CliResult<()> {
        if self.count < 2 {
            return Err(CliError::invalid(format!(
                "sweep count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::invalid("sweep bounds must be finite"));
        }
        if self.param == SweepParam::NPhoton {
            for v in self.values() {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(CliError::invalid(format!(
                        "n_photon sweep must hit non-negative integers, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [param, start, stop, count] = parts[..] else {
            return Err(CliError::invalid(format!("expected param:start:stop:count, got {s:?}")));
        };
        let param = match param {
            "delta" => SweepParam::Delta,
            "n_photon" => SweepParam::NPhoton,
            other => {
                return Err(CliError::invalid(format!(
                    "cannot sweep {other:?}; use delta or n_photon"
                )))
            }
        };
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| CliError::invalid(format!("bad sweep bound {x:?}")))
        };
        Ok(Self {
            param,
            start: num(start)?,
            stop: num(stop)?,
            count: count
                .parse()
                .map_err(|_| CliError::invalid(format!("bad sweep count {count:?}")))?,
        })
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.param.as_str(), self.start, self.stop, self.count)
    }
}

/// Everything one invocation needs. Amplitudes are `[re, im]` pairs in the
/// order `a1, b1, a2, b2` (`a` ground, `b` excited).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub delta: f64,
    pub n_photon: usize,
    pub initial: Initial,
    pub amplitudes: Option<[[f64; 2]; 4]>,
    pub tau_max: f64,
    pub steps: usize,
    pub fock_cutoff: Option<usize>,
    pub output_path: String,
    pub mode: Mode,
    pub sweep: Option<SweepSpec>,
    pub audit_mode: AuditMode,
}

/// Same keys as [`RunConfig`], all optional; used for files, presets and flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub preset: Option<String>,
    pub delta: Option<f64>,
    pub n_photon: Option<usize>,
    pub initial: Option<Initial>,
    pub amplitudes: Option<[[f64; 2]; 4]>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
    pub fock_cutoff: Option<usize>,
    pub output_path: Option<String>,
    pub mode: Option<Mode>,
    pub sweep: Option<SweepSpec>,
    pub audit_mode: Option<AuditMode>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::invalid(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Values in `top` win.
    pub fn overlay(mut self, top: PartialConfig) -> Self {
        overlay!(
            self,
            top,
            preset,
            delta,
            n_photon,
            initial,
            amplitudes,
            tau_max,
            steps,
            fock_cutoff,
            output_path,
            mode,
            sweep,
            audit_mode
        );
        self
    }

    /// Layers: preset, then `file`, then `flags`. A preset named in either
    /// layer applies; the flag's choice wins.
    pub fn resolve(file: PartialConfig, flags: PartialConfig) -> CliResult<RunConfig> {
        let merged = file.overlay(flags);
        let base = match &merged.preset {
            Some(name) => preset(name)?,
            None => PartialConfig::default(),
        };
        base.overlay(merged).finish()
    }

    pub fn finish(self) -> CliResult<RunConfig> {
        let missing = |k: &str| CliError::invalid(format!("missing required setting {k:?} (or pick a preset)"));
        let cfg = RunConfig {
            delta: self.delta.ok_or_else(|| missing("delta"))?,
            n_photon: self.n_photon.ok_or_else(|| missing("n_photon"))?,
            initial: self.initial.unwrap_or(Initial::Ee),
            amplitudes: self.amplitudes,
            tau_max: self.tau_max.unwrap_or(DEFAULT_TAU_MAX),
            steps: self.steps.unwrap_or(DEFAULT_STEPS),
            fock_cutoff: self.fock_cutoff,
            output_path: self.output_path.unwrap_or_else(|| STDOUT.to_string()),
            mode: self.mode.unwrap_or(Mode::Series),
            sweep: self.sweep,
            audit_mode: self.audit_mode.unwrap_or(AuditMode::Strict),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !self.delta.is_finite() {
            return Err(CliError::invalid("delta must be finite"));
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(CliError::invalid(format!(
                "tau_max must be positive, got {}",
                self.tau_max
            )));
        }
        if self.steps < 2 {
            return Err(CliError::invalid(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        match (self.initial, &self.amplitudes) {
            (Initial::Custom, None) => return Err(CliError::invalid("initial = custom needs amplitudes")),
            (Initial::Custom, Some(_)) => {}
            (_, Some(_)) => return Err(CliError::invalid("amplitudes are only accepted with initial = custom")),
            (_, None) => {}
        }
        self.atomic_vector()?;
        match (self.mode, &self.sweep) {
            (Mode::Sweep, None) => return Err(CliError::invalid("mode = sweep needs a sweep spec")),
            (Mode::Sweep, Some(s)) => {
                s.validate()?;
                for v in s.values() {
                    self.with_sweep_value(s.param, v).params()?;
                }
            }
            _ => {
                self.params()?;
            }
        }
        Ok(())
    }

    pub fn params(&self) -> CliResult<SystemParams> {
        let p = SystemParams::new(self.delta, self.n_photon).map_err(CliError::invalid)?;
        match self.fock_cutoff {
            Some(c) => p.with_fock_cutoff(c).map_err(CliError::invalid),
            None => Ok(p),
        }
    }

    pub fn atomic_vector(&self) -> CliResult<AtomicVector> {
        Ok(match self.initial {
            Initial::Ee => basis_vector(EE),
            Initial::Eg => basis_vector(EG),
            Initial::Ge => basis_vector(GE),
            Initial::Gg => basis_vector(GG),
            Initial::Singlet => singlet(),
            Initial::Custom => {
                let amps = self
                    .amplitudes
                    .ok_or_else(|| CliError::invalid("custom initial state needs amplitudes"))?;
                custom_amplitudes(&amps)?.atomic_vector()
            }
        })
    }

    pub fn with_sweep_value(&self, param: SweepParam, value: f64) -> RunConfig {
        let mut c = self.clone();
        match param {
            SweepParam::Delta => c.delta = value,
            SweepParam::NPhoton => c.n_photon = value as usize,
        }
        c
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

/// Checks each atom against [`AMPLITUDE_TOL`], then rescales it exactly.
pub fn custom_amplitudes(raw: &[[f64; 2]; 4]) -> CliResult<TwoAtomAmplitudes> {
    if raw.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::invalid("amplitudes must be finite"));
    }
    let c = raw.map(|[re, im]| C64::new(re, im));
    let mut atoms = [(c[0], c[1]), (c[2], c[3])];
    for (k, (a, b)) in atoms.iter_mut().enumerate() {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > AMPLITUDE_TOL {
            return Err(CliError::invalid(format!(
                "atom {} amplitudes have |a|^2 + |b|^2 = {norm}, expected 1",
                k + 1
            )));
        }
        let s = norm.sqrt();
        *a /= s;
        *b /= s;
    }
    TwoAtomAmplitudes::new(atoms[0].0, atoms[0].1, atoms[1].0, atoms[1].1).map_err(CliError::invalid)
}

pub const PRESETS: [&str; 13] = [
    "fig1a",
    "fig1b",
    "fig2a",
    "fig2b",
    "fig3a",
    "fig3b",
    "fig4a_text",
    "fig4a_caption",
    "fig4b",
    "fig5a",
    "fig5b",
    "fig6a",
    "fig6b",
];

/// Figure parameter sets. The `fig2*`/`fig5*` sets put `|gg>` in the vacuum,
/// which is stationary; they are kept as stated.
pub fn preset(name: &str) -> CliResult<PartialConfig> {
    let (delta, n, initial) = match name {
        "fig1a" | "fig4a_text" => (0.1, 0, Initial::Ee),
        "fig1b" | "fig4b" => (0.5, 0, Initial::Ee),
        "fig4a_caption" => (1.0, 0, Initial::Ee),
        "fig2a" | "fig5a" => (0.1, 0, Initial::Gg),
        "fig2b" | "fig5b" => (0.5, 0, Initial::Gg),
        "fig3a" | "fig6a" => (0.5, 3, Initial::Ee),
        "fig3b" | "fig6b" => (0.5, 3, Initial::Gg),
        other => {
            return Err(CliError::invalid(format!(
                "unknown preset {other:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(PartialConfig {
        delta: Some(delta),
        n_photon: Some(n),
        initial: Some(initial),
        tau_max: Some(DEFAULT_TAU_MAX),
        steps: Some(DEFAULT_STEPS),
        mode: Some(Mode::Series),
        ..Default::default()
    })
}
