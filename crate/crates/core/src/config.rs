//! Run configuration: a TOML file with `[system]`, `[engine]`, `[sweep]` and
//! `[output]` sections. All rates are in units of κ, which is fixed to 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dark_state::dfs_requirements_double;
use crate::error::{Error, Result};
use crate::fock::FockCutoff;
use crate::model::SystemParams;
use crate::observables::PopulationLabel;

pub const DEFAULT_CUTOFF: usize = 8;
pub const DEFAULT_CONVERGENCE_CUTOFFS: [usize; 4] = [4, 6, 8, 12];

/// How the pump magnitude |E| is chosen at each evaluated point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ERule {
    /// `|E|` as given.
    #[default]
    Fixed,
    /// `|E| = 4Ω_c²/κ`.
    Quadratic,
    /// `|E| = 4uwΩ_c²/√((2uwΔ)² + G_χ²)`, the magnitude that cancels pair
    /// creation against stepwise excitation; the phase stays `φ_D`.
    Dark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Full atom ⊗ Fock-space master equation.
    #[default]
    Full,
    /// Five-state collective-basis master equation.
    Truncated,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Engine::Full),
            "truncated" => Ok(Engine::Truncated),
            _ => Err(Error::Config(format!("unknown engine `{s}` (expected full|truncated)"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Full => "full",
            Engine::Truncated => "truncated",
        })
    }
}

/// Parameters of a single evaluation, before the pump rule is applied.
///
/// Detunings are stored as the sum/difference pair `(Δ_s, Δ)`, and a missing
/// `omega_a` tracks `omega_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub gamma: f64,
    pub chi: f64,
    pub delta_s: f64,
    pub delta: f64,
    pub omega_c: f64,
    pub omega_a: Option<f64>,
    pub e_mag: f64,
    pub phi_d: f64,
    pub x_phase: f64,
    pub e_rule: ERule,
    pub engine: Engine,
    pub cutoff: FockCutoff,
    /// Free chiral coupling; only meaningful for the truncated engine.
    pub g_chi: Option<f64>,
}

impl Default for PointSpec {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            chi: 0.0,
            delta_s: 0.0,
            delta: 0.0,
            omega_c: 0.0,
            omega_a: None,
            e_mag: 0.0,
            phi_d: 0.0,
            x_phase: 0.0,
            e_rule: ERule::Fixed,
            engine: Engine::Full,
            cutoff: FockCutoff::new(DEFAULT_CUTOFF).expect("default cutoff ≥ 2"),
            g_chi: None,
        }
    }
}

impl PointSpec {
    /// Physical parameters with the pump rule applied.
    pub fn system_params(&self) -> Result<SystemParams> {
        let mut p = SystemParams {
            kappa: 1.0,
            gamma: self.gamma,
            chi: self.chi,
            omega_c: self.omega_c,
            omega_a: self.omega_a.unwrap_or(self.omega_c),
            e_mag: self.e_mag,
            phi_d: self.phi_d,
            x_phase: self.x_phase,
            ..SystemParams::default()
        }
        .with_detunings(self.delta_s, self.delta);
        p.validate()?;
        p.e_mag = match self.e_rule {
            ERule::Fixed => self.e_mag,
            ERule::Quadratic => 4.0 * p.omega_c.powi(2) / p.kappa,
            ERule::Dark => dfs_requirements_double(&p)?.required_e.norm(),
        };
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g_chi.is_some() && self.engine != Engine::Truncated {
            return Err(Error::Config("g_chi may only be set with engine = \"truncated\"".into()));
        }
        if let Some(g) = self.g_chi {
            if !g.is_finite() {
                return Err(Error::InvalidParameter { field: "g_chi", reason: format!("must be finite, got {g}") });
            }
        }
        self.system_params().map(|_| ())
    }
}

/// Quantities that can be requested as CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    G2,
    MeanN,
    Purity,
    Leakage,
    Population(PopulationLabel),
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g2" => Ok(Observable::G2),
            "mean_n" => Ok(Observable::MeanN),
            "purity" => Ok(Observable::Purity),
            "leakage" => Ok(Observable::Leakage),
            _ => match s.strip_prefix("pop_") {
                Some(label) => Ok(Observable::Population(label.parse()?)),
                None => Err(Error::Config(format!(
                    "unknown observable `{s}` (expected g2, mean_n, purity, leakage or pop_<label>)"
                ))),
            },
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::G2 => f.write_str("g2"),
            Observable::MeanN => f.write_str("mean_n"),
            Observable::Purity => f.write_str("purity"),
            Observable::Leakage => f.write_str("leakage"),
            Observable::Population(l) => write!(f, "pop_{l}"),
        }
    }
}

pub fn default_observables() -> Vec<Observable> {
    ["g2", "mean_n", "purity", "pop_g1", "pop_psi", "pop_phi"].iter().map(|s| s.parse().expect("valid")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    PhiD,
    DeltaS,
    Gamma,
    OmegaC,
    Chi,
    XPhase,
    GChi,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::PhiD => "phi_d",
            SweepParameter::DeltaS => "delta_s",
            SweepParameter::Gamma => "gamma",
            SweepParameter::OmegaC => "omega_c",
            SweepParameter::Chi => "chi",
            SweepParameter::XPhase => "x_phase",
            SweepParameter::GChi => "g_chi",
        }
    }

    /// Column header with units.
    pub fn column(self) -> String {
        match self {
            SweepParameter::PhiD | SweepParameter::XPhase => format!("{} [rad]", self.name()),
            SweepParameter::Chi => self.name().to_string(),
            _ => format!("{} [kappa]", self.name()),
        }
    }

    pub fn apply(self, spec: &mut PointSpec, value: f64) {
        match self {
            SweepParameter::PhiD => spec.phi_d = value,
            SweepParameter::DeltaS => spec.delta_s = value,
            SweepParameter::Gamma => spec.gamma = value,
            SweepParameter::OmegaC => spec.omega_c = value,
            SweepParameter::Chi => spec.chi = value,
            SweepParameter::XPhase => spec.x_phase = value,
            SweepParameter::GChi => spec.g_chi = Some(value),
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use SweepParameter::*;
        [PhiD, DeltaS, Gamma, OmegaC, Chi, XPhase, GChi]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub base: PointSpec,
    pub outputs: Vec<Observable>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Config(format!("sweep range must satisfy lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 points, got {}", self.points)));
        }
        if self.parameter == SweepParameter::GChi && self.base.engine != Engine::Truncated {
            return Err(Error::Config("sweeping g_chi requires engine = \"truncated\"".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no output observables requested".into()));
        }
        for &v in &[self.lo, self.hi] {
            let mut p = self.base;
            self.parameter.apply(&mut p, v);
            p.validate()?;
        }
        Ok(())
    }

    /// Evenly spaced grid including both end points exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| if i == n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / n as f64 })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemSection,
    pub engine: EngineSection,
    pub sweep: Option<SweepSection>,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub gamma: f64,
    pub chi: f64,
    pub delta_c: Option<f64>,
    pub delta_a: Option<f64>,
    pub delta_s: Option<f64>,
    pub delta: Option<f64>,
    pub omega_c: f64,
    pub omega_a: Option<f64>,
    pub e_mag: f64,
    pub phi_d: f64,
    pub x_phase: f64,
    pub e_rule: ERule,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            chi: 0.0,
            delta_c: None,
            delta_a: None,
            delta_s: None,
            delta: None,
            omega_c: 0.0,
            omega_a: None,
            e_mag: 0.0,
            phi_d: 0.0,
            x_phase: 0.0,
            e_rule: ERule::Fixed,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSection {
    pub kind: Engine,
    pub cutoff: Option<usize>,
    pub g_chi: Option<f64>,
    pub cutoffs: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub observables: Option<Vec<String>>,
}

/// A parsed and resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub point: PointSpec,
    pub sweep: Option<SweepSpec>,
    pub outputs: Vec<Observable>,
    pub cutoffs: Vec<usize>,
}

impl Default for Config {
    fn default() -> Self {
        ConfigFile::default().resolve().expect("defaults are valid")
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        ConfigFile::from_toml_str(s)?.resolve()
    }
}

impl ConfigFile {
    /// Parses without validating, so callers can apply overrides first.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<Config> {
        let s = &self.system;
        let (delta_s, delta) = match (s.delta_c, s.delta_a, s.delta_s, s.delta) {
            (c, a, None, None) => {
                let (c, a) = (c.unwrap_or(0.0), a.unwrap_or(0.0));
                (0.5 * (c + a), 0.5 * (c - a))
            }
            (None, None, ds, d) => (ds.unwrap_or(0.0), d.unwrap_or(0.0)),
            _ => {
                return Err(Error::Config(
                    "give detunings either as delta_c/delta_a or as delta_s/delta, not both".into(),
                ))
            }
        };
        let cutoff = FockCutoff::new(self.engine.cutoff.unwrap_or(DEFAULT_CUTOFF))
            .map_err(|e| Error::Config(format!("[engine] cutoff: {e}")))?;
        let point = PointSpec {
            gamma: s.gamma,
            chi: s.chi,
            delta_s,
            delta,
            omega_c: s.omega_c,
            omega_a: s.omega_a,
            e_mag: s.e_mag,
            phi_d: s.phi_d,
            x_phase: s.x_phase,
            e_rule: s.e_rule,
            engine: self.engine.kind,
            cutoff,
            g_chi: self.engine.g_chi,
        };
        point.validate()?;

        let outputs = match &self.output.observables {
            Some(names) => names.iter().map(|n| n.parse()).collect::<Result<Vec<_>>>()?,
            None => default_observables(),
        };
        let sweep = match &self.sweep {
            Some(sw) => {
                let spec = SweepSpec {
                    parameter: sw.parameter,
                    lo: sw.lo,
                    hi: sw.hi,
                    points: sw.points,
                    base: point,
                    outputs: outputs.clone(),
                };
                spec.validate()?;
                Some(spec)
            }
            None => None,
        };
        let cutoffs = self.engine.cutoffs.clone().unwrap_or_else(|| DEFAULT_CONVERGENCE_CUTOFFS.to_vec());
        for &n in &cutoffs {
            FockCutoff::new(n).map_err(|e| Error::Config(format!("[engine] cutoffs: {e}")))?;
        }
        Ok(Config { point, sweep, outputs, cutoffs })
    }
}
