//! Five-state master equation in the collective basis, used both as an
//! independent oracle for the full Fock-space numerics and as the engine for
//! sweeps where the chiral coupling G_χ is a free parameter.

use std::f64::consts::SQRT_2;

use crate::collective::{
    collective_liouvillian, collective_to_product, embed_two_excitations, hamiltonian_from_couplings,
    CollectiveParams, EffectiveCouplings, FIVE,
};
use crate::dynamics::{steady_state, DensityMatrix, Superoperator};
use crate::error::{Error, Result};
use crate::fock::{FockCutoff, OperatorMatrix, C64};
use crate::model::{derive, SystemParams};

/// Density matrix over `{|1⟩, |ψ⟩, |φ⟩, |ξ⟩, |ζ⟩}`.
pub type TruncatedState = DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedParams {
    /// Chiral coupling; not clamped to the value reachable from (κ, γ, χ).
    pub g_chi: f64,
    pub gamma_chi: f64,
    pub delta_s: f64,
    pub delta: f64,
    pub omega_c: f64,
    pub omega_a: f64,
    /// Reduced pump amplitude `Ẽ = E/√2`.
    pub e_tilde: C64,
    pub cp: CollectiveParams,
}

impl TruncatedParams {
    /// Couplings implied by a physical parameter set, default gauge.
    pub fn from_system(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let d = derive(params);
        Ok(Self {
            g_chi: d.g_chi,
            gamma_chi: d.gamma_chi,
            delta_s: d.delta_s,
            delta: d.delta,
            omega_c: params.omega_c,
            omega_a: params.omega_a,
            e_tilde: params.e() / SQRT_2,
            cp: CollectiveParams::from_derived(&d),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g_chi, self.gamma_chi, self.delta_s, self.delta, self.omega_c, self.omega_a];
        if finite.iter().any(|x| !x.is_finite()) || !self.e_tilde.re.is_finite() || !self.e_tilde.im.is_finite() {
            return Err(Error::InvalidParameter { field: "truncated", reason: "non-finite value".into() });
        }
        if self.gamma_chi < 0.0 {
            return Err(Error::InvalidParameter { field: "gamma_chi", reason: format!("{} < 0", self.gamma_chi) });
        }
        CollectiveParams::new(self.cp.u, self.cp.w, self.cp.alpha, self.cp.beta)?;
        Ok(())
    }

    pub fn couplings(&self) -> EffectiveCouplings {
        EffectiveCouplings {
            g_chi: self.g_chi,
            delta_s: self.delta_s,
            delta: self.delta,
            omega_c: self.omega_c,
            omega_a: self.omega_a,
            e: self.e_tilde * SQRT_2,
        }
    }

    pub fn hamiltonian(&self) -> OperatorMatrix {
        hamiltonian_from_couplings(&self.couplings(), &self.cp)
    }

    pub fn liouvillian(&self) -> Superoperator {
        collective_liouvillian(&self.couplings(), self.gamma_chi, &self.cp)
    }
}

/// Effective Rabi frequencies coupling the single- to the double-excitation
/// collective states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRabi {
    pub psi_xi: f64,
    pub psi_zeta: f64,
    pub phi_xi: f64,
    pub phi_zeta: f64,
}

pub fn effective_rabi(cp: &CollectiveParams, omega_c: f64, omega_a: f64) -> EffectiveRabi {
    let CollectiveParams { u, w, alpha, beta } = *cp;
    EffectiveRabi {
        psi_xi: (SQRT_2 * u * alpha + w * beta) * omega_c + u * beta * omega_a,
        psi_zeta: (SQRT_2 * u * beta - w * alpha) * omega_c - u * alpha * omega_a,
        phi_xi: (SQRT_2 * w * alpha - u * beta) * omega_c + w * beta * omega_a,
        phi_zeta: (SQRT_2 * w * beta + u * alpha) * omega_c - w * alpha * omega_a,
    }
}

/// `dρ/dt = −i[H_e, ρ] + Γ_χ D[J]ρ` on the five-state space.
pub fn truncated_rhs(rho: &OperatorMatrix, p: &TruncatedParams) -> Result<OperatorMatrix> {
    if rho.nrows() != FIVE || rho.ncols() != FIVE {
        return Err(Error::DimensionMismatch { expected: FIVE, actual: rho.nrows() });
    }
    p.validate()?;
    p.liouvillian().apply(rho)
}

pub fn truncated_steady(p: &TruncatedParams) -> Result<TruncatedState> {
    p.validate()?;
    steady_state(&p.liouvillian())
}

/// Collective-basis state mapped to the product basis and embedded in the
/// full atom ⊗ field space (zero above two excitations).
pub fn embed_truncated(rho: &TruncatedState, cp: &CollectiveParams, cutoff: FockCutoff) -> Result<DensityMatrix> {
    let product = collective_to_product(rho, cp)?;
    DensityMatrix::new(embed_two_excitations(product.matrix(), cutoff))
}
