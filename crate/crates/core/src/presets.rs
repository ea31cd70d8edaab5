//! Built-in parameter sweeps `figure3` … `figure7`.
//! Each preset is a set of curves sharing one grid.

use std::f64::consts::PI;

use crate::config::{ERule, Engine, Observable, PointSpec, SweepParameter, SweepSpec};
use crate::error::{Error, Result};
use crate::fock::FockCutoff;
use crate::sweep::{run_curves, Table};

pub const FIGURE_IDS: [&str; 5] = ["figure3", "figure4", "figure5", "figure6", "figure7"];

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: &'static str,
    pub description: &'static str,
    pub curves: Vec<(String, SweepSpec)>,
}

impl FigurePreset {
    pub fn run(&self) -> Result<Table> {
        let mut t = run_curves(&self.curves)?;
        t.comments.insert(0, format!("{}: {}", self.id, self.description));
        Ok(t)
    }

    pub fn curve(&self, label: &str) -> Option<&SweepSpec> {
        self.curves.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }

    /// Replaces the Fock cutoff of every full-engine curve.
    pub fn with_cutoff(mut self, cutoff: FockCutoff) -> Self {
        for (_, s) in &mut self.curves {
            if s.base.engine == Engine::Full {
                s.base.cutoff = cutoff;
            }
        }
        self
    }
}

fn obs(names: &[&str]) -> Vec<Observable> {
    names.iter().map(|s| s.parse().expect("preset observable")).collect()
}

/// Drives on both emitters, pump magnitude `4Ω_c²/κ`, no chirality, `γ = κ`.
fn dark_base(omega_c: f64) -> PointSpec {
    PointSpec { omega_c, omega_a: None, e_rule: ERule::Quadratic, ..PointSpec::default() }
}

fn sweep(parameter: SweepParameter, lo: f64, hi: f64, points: usize, base: PointSpec, outputs: &[&str]) -> SweepSpec {
    SweepSpec { parameter, lo, hi, points, base, outputs: obs(outputs) }
}

pub fn figure(id: &str) -> Result<FigurePreset> {
    let id = FIGURE_IDS.into_iter().find(|&f| f == id || f.trim_start_matches("figure") == id);
    match id {
        Some("figure3") => Ok(figure3()),
        Some("figure4") => Ok(figure4()),
        Some("figure5") => Ok(figure5()),
        Some("figure6") => Ok(figure6()),
        Some("figure7") => Ok(figure7()),
        _ => Err(Error::Config(format!("unknown figure id (expected one of {})", FIGURE_IDS.join(", ")))),
    }
}

/// ρ_ψψ against Δ_s with the free chiral coupling G_χ = 5κ (truncated engine).
pub fn figure3() -> FigurePreset {
    let base = |delta: f64, omega: f64| PointSpec {
        gamma: 1.0,
        delta,
        omega_c: omega,
        engine: Engine::Truncated,
        cutoff: FockCutoff::new(2).expect("n_max = 2"),
        g_chi: Some(5.0),
        ..PointSpec::default()
    };
    let curves = [("Delta=5 Omega=0.04", 5.0, 0.04), ("Delta=0 Omega=0.04", 0.0, 0.04), ("Delta=0 Omega=0.02", 0.0, 0.02)]
        .into_iter()
        .map(|(l, d, o)| (l.to_string(), sweep(SweepParameter::DeltaS, -10.0, 10.0, 401, base(d, o), &["pop_psi"])))
        .collect();
    FigurePreset { id: "figure3", description: "stationary population of |psi> against Delta_s, G_chi = 5 kappa", curves }
}

/// g²(0) against φ_D. The χ = 1 curve is given with both the quadratic pump rule
/// magnitude and the one that cancels pair creation at those parameters.
pub fn figure4() -> FigurePreset {
    let mut curves: Vec<(String, SweepSpec)> = [0.01, 0.05, 0.1]
        .into_iter()
        .map(|o| (format!("Omega_c={o}"), sweep(SweepParameter::PhiD, -PI, PI, 201, dark_base(o), &["g2"])))
        .collect();
    for (label, rule) in [("chi=1 Delta=1 E=quadratic", ERule::Quadratic), ("chi=1 Delta=1 E=dark", ERule::Dark)] {
        let base = PointSpec { chi: 1.0, delta: 1.0, e_rule: rule, ..dark_base(0.01) };
        curves.push((label.to_string(), sweep(SweepParameter::PhiD, -PI, PI, 201, base, &["g2"])));
    }
    FigurePreset { id: "figure4", description: "g2(0) against the pump phase phi_D", curves }
}

/// g²(0) against Δ_s.
pub fn figure5() -> FigurePreset {
    let curves = [0.01, 0.05, 0.1]
        .into_iter()
        .map(|o| (format!("Omega_c={o}"), sweep(SweepParameter::DeltaS, -1.0, 1.0, 201, dark_base(o), &["g2"])))
        .collect();
    FigurePreset { id: "figure5", description: "g2(0) against Delta_s", curves }
}

/// g²(0) against γ/κ; the grid contains γ = κ exactly.
pub fn figure6() -> FigurePreset {
    let curves = [0.01, 0.03, 0.05]
        .into_iter()
        .map(|o| (format!("Omega_c={o}"), sweep(SweepParameter::Gamma, 0.25, 4.0, 376, dark_base(o), &["g2"])))
        .collect();
    FigurePreset { id: "figure6", description: "g2(0) against the atomic damping gamma", curves }
}

/// Population of |g,1⟩ against Δ_s.
pub fn figure7() -> FigurePreset {
    let curves = [0.03, 0.09]
        .into_iter()
        .map(|o| (format!("Omega_c={o}"), sweep(SweepParameter::DeltaS, -1.0, 1.0, 201, dark_base(o), &["pop_g1", "g2"])))
        .collect();
    FigurePreset { id: "figure7", description: "population of |g,1> against Delta_s", curves }
}
