//! Analytic decoherence-free states and dark-state conditions, with
//! numerical residuals evaluated against the collective-basis operators.
//!
//! A state `|Ψ⟩` is dark when `J|Ψ⟩ = 0` and `H_e|Ψ⟩ = 0`; it lies in a
//! decoherence-free subspace when `J H_e|Ψ⟩ = 0`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::collective::{
    collective_jump_operators, effective_hamiltonian_5, CollectiveAmplitudes, CollectiveLabel, CollectiveParams,
};
use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::{OperatorMatrix, C64, I, ONE, ZERO};
use crate::model::{derive, DerivedParams, SystemParams};

/// Relative tolerance for scalar equalities in the condition checks.
pub const CONDITION_REL_TOL: f64 = 1e-9;

/// `residual` is zero relative to the magnitudes it was formed from.
fn negligible(residual: f64, scale: f64) -> bool {
    residual <= CONDITION_REL_TOL * scale
}

/// Single-excitation decoherence-free state `c₁|1⟩ + c_φ|φ⟩` with
/// `c_φ/c₁ = iΩ_ψ / (2uwΔ − iG_χ)`, normalized.
pub fn dfs_state_single(dp: &DerivedParams) -> Result<CollectiveAmplitudes> {
    if dp.omega_psi == 0.0 {
        return Ok(CollectiveAmplitudes::ground());
    }
    let denom = C64::new(2.0 * dp.u * dp.w * dp.delta, -dp.g_chi);
    if denom.norm() == 0.0 {
        return Err(Error::NoSingleExcitationDfs);
    }
    let ratio = I * dp.omega_psi / denom;
    Ok(CollectiveAmplitudes::from_ground_phi(ONE, ratio).normalized())
}

/// The two single-excitation dark conditions: `Ω_φ = 0` and
/// `Δ_s − (u² − w²)Δ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleDarkConditions {
    pub omega_phi_residual: f64,
    pub shift_residual: f64,
    pub omega_phi_zero: bool,
    pub shift_zero: bool,
}

impl SingleDarkConditions {
    pub fn all(&self) -> bool {
        self.omega_phi_zero && self.shift_zero
    }
}

pub fn dark_conditions_single(params: &SystemParams) -> SingleDarkConditions {
    let dp = derive(params);
    let omega_phi_residual = dp.omega_phi.abs();
    let shift_residual = dp.phi_shift().abs();
    let omega_scale = dp.w * params.omega_c.abs() + dp.u * params.omega_a.abs();
    let shift_scale = params.delta_c.abs() + params.delta_a.abs();
    SingleDarkConditions {
        omega_phi_residual,
        shift_residual,
        omega_phi_zero: negligible(omega_phi_residual, omega_scale),
        shift_zero: negligible(shift_residual, shift_scale),
    }
}

/// What the double-excitation decoherence-free state requires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDfsRequirements {
    pub c_phi_over_c1: C64,
    /// Pump amplitude whose pair-creation pathway cancels the stepwise one.
    pub required_e: C64,
    /// Set when both the detuning exchange and G_χ vanish, so θ is undefined;
    /// only reachable with no drive, where every phase works.
    pub phase_free: bool,
}

/// `c_φ/c₁ = 2uΩ_c e^{i(θ+π/2)}/D` and `E = 4uwΩ_c² e^{i(θ−π/2)}/D` with
/// `D = √((2uwΔ)² + G_χ²)`; requires `uΩ_c = wΩ_a`.
pub fn dfs_requirements_double(params: &SystemParams) -> Result<DoubleDfsRequirements> {
    params.validate()?;
    let dp = derive(params);
    let (uc, wa) = (dp.u * params.omega_c, dp.w * params.omega_a);
    let mismatch = (uc - wa).abs();
    if !negligible(mismatch, uc.abs() + wa.abs()) {
        return Err(Error::NoDoubleExcitationDfs { mismatch });
    }
    let d = dp.coupling_magnitude();
    match dp.theta {
        Some(theta) => Ok(DoubleDfsRequirements {
            c_phi_over_c1: C64::from_polar(2.0 * uc / d, theta + FRAC_PI_2),
            required_e: C64::from_polar(4.0 * dp.u * dp.w * params.omega_c.powi(2) / d, theta - FRAC_PI_2),
            phase_free: false,
        }),
        None if params.omega_c == 0.0 => {
            Ok(DoubleDfsRequirements { c_phi_over_c1: ZERO, required_e: ZERO, phase_free: true })
        }
        None => Err(Error::PhaseUndefined),
    }
}

/// Flags for the specialised dark-state conditions of the double-excitation
/// problem: equal drives, equal damping, `Δ_s = 0` and the matched pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDarkFlags {
    pub equal_drives: bool,
    pub equal_damping: bool,
    pub symmetric_detuning: bool,
    pub pump_matched: bool,
}

impl DoubleDarkFlags {
    pub fn all(&self) -> bool {
        self.equal_drives && self.equal_damping && self.symmetric_detuning && self.pump_matched
    }

    pub fn violated(&self) -> Vec<&'static str> {
        [
            ("equal_drives", self.equal_drives),
            ("equal_damping", self.equal_damping),
            ("symmetric_detuning", self.symmetric_detuning),
            ("pump_matched", self.pump_matched),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkReport {
    /// `‖J H_e|Ψ⟩‖`
    pub dfs_residual: f64,
    /// `‖H_e|Ψ⟩‖`
    pub dark_residual: f64,
    /// `‖J|Ψ⟩‖`
    pub jump_residual: f64,
    pub predicted_state: CollectiveAmplitudes,
    /// `None` when the phase θ is undefined and the drive is nonzero.
    pub required_e: Option<C64>,
    pub flags: DoubleDarkFlags,
}

/// Predicted dark state `c₁|1⟩ + c_φ|φ⟩` with `c_φ/c₁ = iΩ_ψ/(2uwΔ − iG_χ)`,
/// which reduces to `√2 iΩ_c e^{iθ}/√(Δ² + G_χ²)` at equal drives and damping.
/// Without any coupling out of `|φ⟩` the state is `|φ⟩` itself.
fn predicted_state(dp: &DerivedParams) -> CollectiveAmplitudes {
    match dfs_state_single(dp) {
        Ok(s) => s,
        Err(_) => CollectiveAmplitudes::from_ground_phi(ZERO, ONE),
    }
}

pub fn dark_conditions_double(params: &SystemParams) -> Result<DarkReport> {
    params.validate()?;
    let dp = derive(params);
    let cp = CollectiveParams::from_derived(&dp);

    let required_e = match dp.theta {
        Some(theta) => {
            Some(C64::from_polar(4.0 * dp.u * dp.w * params.omega_c.powi(2) / dp.coupling_magnitude(), theta - FRAC_PI_2))
        }
        None if params.omega_c == 0.0 => Some(ZERO),
        None => None,
    };
    let e = params.e();
    let flags = DoubleDarkFlags {
        equal_drives: negligible((params.omega_a - params.omega_c).abs(), params.omega_a.abs() + params.omega_c.abs()),
        equal_damping: negligible((params.kappa - params.gamma).abs(), params.kappa + params.gamma),
        symmetric_detuning: negligible(dp.delta_s.abs(), params.delta_c.abs() + params.delta_a.abs()),
        pump_matched: required_e.is_some_and(|req| negligible((e - req).norm(), req.norm().max(e.norm()))),
    };

    let state = predicted_state(&dp);
    let v = state.to_vector();
    let h = effective_hamiltonian_5(params, &cp);
    let (j, _) = collective_jump_operators(&cp);
    let hv = &h * &v;
    Ok(DarkReport {
        dfs_residual: (&j * &hv).norm(),
        dark_residual: hv.norm(),
        jump_residual: (&j * &v).norm(),
        predicted_state: state,
        required_e,
        flags,
    })
}

/// Closed-form stationary dark state in the collective basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticDarkRho {
    pub rho_11: f64,
    pub rho_phiphi: f64,
    pub rho_1phi: C64,
}

impl AnalyticDarkRho {
    pub fn purity(&self) -> f64 {
        self.rho_11.powi(2) + self.rho_phiphi.powi(2) + 2.0 * self.rho_1phi.norm_sqr()
    }

    /// Density matrix over `{|1⟩, |ψ⟩, |φ⟩, |ξ⟩, |ζ⟩}`.
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let mut m = OperatorMatrix::zeros(5, 5);
        let (one, phi) = (CollectiveLabel::One.index(), CollectiveLabel::Phi.index());
        m[(one, one)] = C64::new(self.rho_11, 0.0);
        m[(phi, phi)] = C64::new(self.rho_phiphi, 0.0);
        m[(one, phi)] = self.rho_1phi;
        m[(phi, one)] = self.rho_1phi.conj();
        DensityMatrix::new(m)
    }
}

/// `ρ₁₁ = D²/N`, `ρ_φφ = 2Ω_c²/N`, `ρ₁φ = √2Ω_c D e^{−i(θ+π/2)}/N` with
/// `D² = G_χ² + Δ²` and `N = D² + 2Ω_c²`. Refuses parameters that are not dark.
pub fn analytic_dark_rho(params: &SystemParams) -> Result<AnalyticDarkRho> {
    let report = dark_conditions_double(params)?;
    if !report.flags.all() {
        return Err(Error::DarkConditionsViolated(report.flags.violated().join(", ")));
    }
    let dp = derive(params);
    let d2 = dp.g_chi.powi(2) + dp.delta.powi(2);
    let n = d2 + 2.0 * params.omega_c.powi(2);
    if n == 0.0 {
        return Ok(AnalyticDarkRho { rho_11: 1.0, rho_phiphi: 0.0, rho_1phi: ZERO });
    }
    let theta = dp.theta.unwrap_or(0.0);
    Ok(AnalyticDarkRho {
        rho_11: d2 / n,
        rho_phiphi: 2.0 * params.omega_c.powi(2) / n,
        rho_1phi: Complex64::from_polar(SQRT_2 * params.omega_c * d2.sqrt() / n, -(theta + FRAC_PI_2)),
    })
}

/// Rates `(ċ_ξ, ċ_ζ) = −i⟨ξ|H_e|Ψ⟩, −i⟨ζ|H_e|Ψ⟩` for `|Ψ⟩ = c₁|1⟩ + c_φ|φ⟩`:
/// the interference of direct pair creation by the pump with stepwise
/// excitation through `|φ⟩`.
pub fn interference_rates(params: &SystemParams, c1: C64, c_phi: C64) -> Result<(C64, C64)> {
    params.validate()?;
    let cp = CollectiveParams::from_derived(&derive(params));
    let h = effective_hamiltonian_5(params, &cp);
    let v = CollectiveAmplitudes::from_ground_phi(c1, c_phi).to_vector();
    let rates: DVector<C64> = (&h * v) * (-I);
    Ok((rates[CollectiveLabel::Xi.index()], rates[CollectiveLabel::Zeta.index()]))
}
