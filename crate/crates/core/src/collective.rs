//! Polariton operators `J = u a + w σ₋`, `B = w a − u σ₋` and the five-state
//! collective basis `{|1⟩, |ψ⟩, |φ⟩, |ξ⟩, |ζ⟩}` of the two-excitation space.
//!
//! The underlying product states are `|1⟩ = |g,0⟩`, `|2⟩ = |g,1⟩`,
//! `|3⟩ = |g,2⟩`, `|4⟩ = |e,0⟩`, `|5⟩ = |e,1⟩`, and
//!
//! ```text
//! |ψ⟩ = u|2⟩ + w|4⟩     |φ⟩ = w|2⟩ − u|4⟩
//! |ξ⟩ = α|3⟩ + β|5⟩     |ζ⟩ = β|3⟩ − α|5⟩
//! ```

use std::f64::consts::SQRT_2;

use nalgebra::DVector;

use crate::dynamics::{DensityMatrix, Superoperator};
use crate::error::{Error, Result};
use crate::fock::{BasisLabel, FockCutoff, OperatorMatrix, C64, I, ONE, ZERO};
use crate::model::{derive, DerivedParams, SystemParams};

pub const FIVE: usize = 5;
const UNIT_TOL: f64 = 1e-12;

/// Collective basis states, in matrix index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectiveLabel {
    One,
    Psi,
    Phi,
    Xi,
    Zeta,
}

impl CollectiveLabel {
    pub const ALL: [CollectiveLabel; FIVE] =
        [CollectiveLabel::One, CollectiveLabel::Psi, CollectiveLabel::Phi, CollectiveLabel::Xi, CollectiveLabel::Zeta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            CollectiveLabel::One => "one",
            CollectiveLabel::Psi => "psi",
            CollectiveLabel::Phi => "phi",
            CollectiveLabel::Xi => "xi",
            CollectiveLabel::Zeta => "zeta",
        }
    }
}

impl std::str::FromStr for CollectiveLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CollectiveLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// Mixing weights of the single- (u, w) and double-excitation (α, β) states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveParams {
    pub u: f64,
    pub w: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CollectiveParams {
    pub fn new(u: f64, w: f64, alpha: f64, beta: f64) -> Result<Self> {
        if ((u * u + w * w) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter { field: "u,w", reason: format!("u² + w² = {}", u * u + w * w) });
        }
        if ((alpha * alpha + beta * beta) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter {
                field: "alpha,beta",
                reason: format!("α² + β² = {}", alpha * alpha + beta * beta),
            });
        }
        Ok(Self { u, w, alpha, beta })
    }

    /// The gauge `uβ = √2 wα`, for which `J†|ψ⟩` has no `|ζ⟩` component.
    pub fn default_gauge(u: f64, w: f64) -> Self {
        let n = (u * u + 2.0 * w * w).sqrt();
        Self { u, w, alpha: u / n, beta: SQRT_2 * w / n }
    }

    /// Weights for given damping rates in the default gauge.
    pub fn from_derived(d: &DerivedParams) -> Self {
        Self::default_gauge(d.u, d.w)
    }

    pub fn eta(&self) -> f64 {
        self.alpha * self.u + SQRT_2 * self.w * self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.beta * self.u - SQRT_2 * self.w * self.alpha
    }

    /// Columns are the collective states expanded in `{|1⟩ … |5⟩}`.
    pub fn basis_change(&self) -> OperatorMatrix {
        let Self { u, w, alpha, beta } = *self;
        #[rustfmt::skip]
        let rows = [
            // |1⟩  |ψ⟩  |φ⟩  |ξ⟩    |ζ⟩
            [1.0, 0.0, 0.0, 0.0,   0.0],    // |1⟩ = |g,0⟩
            [0.0, u,   w,   0.0,   0.0],    // |2⟩ = |g,1⟩
            [0.0, 0.0, 0.0, alpha, beta],   // |3⟩ = |g,2⟩
            [0.0, w,   -u,  0.0,   0.0],    // |4⟩ = |e,0⟩
            [0.0, 0.0, 0.0, beta,  -alpha], // |5⟩ = |e,1⟩
        ];
        OperatorMatrix::from_fn(FIVE, FIVE, |r, c| C64::new(rows[r][c], 0.0))
    }
}

/// Amplitudes of a pure state in the collective basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveAmplitudes {
    pub c1: C64,
    pub c_psi: C64,
    pub c_phi: C64,
    pub c_xi: C64,
    pub c_zeta: C64,
}

impl CollectiveAmplitudes {
    pub fn ground() -> Self {
        Self::from_ground_phi(ONE, ZERO)
    }

    pub fn from_ground_phi(c1: C64, c_phi: C64) -> Self {
        Self { c1, c_psi: ZERO, c_phi, c_xi: ZERO, c_zeta: ZERO }
    }

    pub fn to_vector(&self) -> DVector<C64> {
        DVector::from_vec(vec![self.c1, self.c_psi, self.c_phi, self.c_xi, self.c_zeta])
    }

    pub fn from_vector(v: &DVector<C64>) -> Result<Self> {
        if v.len() != FIVE {
            return Err(Error::DimensionMismatch { expected: FIVE, actual: v.len() });
        }
        Ok(Self { c1: v[0], c_psi: v[1], c_phi: v[2], c_xi: v[3], c_zeta: v[4] })
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::from_vector(&self.to_vector().unscale(n)).expect("length five")
    }
}

/// `J` and `B` as 5 × 5 matrices in the collective basis.
pub fn collective_jump_operators(cp: &CollectiveParams) -> (OperatorMatrix, OperatorMatrix) {
    use CollectiveLabel::*;
    let CollectiveParams { u, w, alpha, beta } = *cp;
    let (eta, sigma) = (cp.eta(), cp.sigma());
    let mut j = OperatorMatrix::zeros(FIVE, FIVE);
    let mut b = OperatorMatrix::zeros(FIVE, FIVE);
    let set = |m: &mut OperatorMatrix, to: CollectiveLabel, from: CollectiveLabel, v: f64| {
        m[(to.index(), from.index())] += C64::new(v, 0.0);
    };

    // J = |1⟩⟨ψ| + √2(u|ψ⟩ + w|φ⟩)(η⟨ξ| + σ⟨ζ|) + |φ⟩(α⟨ζ| − β⟨ξ|)
    set(&mut j, One, Psi, 1.0);
    set(&mut j, Psi, Xi, SQRT_2 * u * eta);
    set(&mut j, Psi, Zeta, SQRT_2 * u * sigma);
    set(&mut j, Phi, Xi, SQRT_2 * w * eta - beta);
    set(&mut j, Phi, Zeta, SQRT_2 * w * sigma + alpha);

    // B = |1⟩⟨φ| + (B acting on the two-excitation states, from B|g,2⟩ = √2w|g,1⟩
    // and B|e,1⟩ = w|e,0⟩ − u|g,1⟩)
    let d = w * w - u * u;
    set(&mut b, One, Phi, 1.0);
    set(&mut b, Psi, Xi, SQRT_2 * u * w * alpha + d * beta);
    set(&mut b, Psi, Zeta, SQRT_2 * u * w * beta - d * alpha);
    set(&mut b, Phi, Xi, SQRT_2 * w * (w * alpha - SQRT_2 * u * beta));
    set(&mut b, Phi, Zeta, SQRT_2 * w * (w * beta + SQRT_2 * u * alpha));
    (j, b)
}

/// Damping rates between the double- and single-excitation collective states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveRates {
    pub xi_phi: f64,
    pub xi_psi: f64,
    pub zeta_phi: f64,
    pub zeta_psi: f64,
}

pub fn collective_rates(cp: &CollectiveParams, gamma_chi: f64) -> CollectiveRates {
    let (eta, sigma) = (cp.eta(), cp.sigma());
    let CollectiveParams { u, w, alpha, beta } = *cp;
    CollectiveRates {
        xi_phi: gamma_chi * (SQRT_2 * w * eta - beta).powi(2),
        xi_psi: 2.0 * u * u * gamma_chi * eta * eta,
        zeta_phi: gamma_chi * (SQRT_2 * w * sigma + alpha).powi(2),
        zeta_psi: 2.0 * u * u * gamma_chi * sigma * sigma,
    }
}

/// Coherent couplings entering the collective-basis Hamiltonian. G_χ is free
/// here so that unphysical couplings can be explored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCouplings {
    pub g_chi: f64,
    pub delta_s: f64,
    pub delta: f64,
    pub omega_c: f64,
    pub omega_a: f64,
    pub e: C64,
}

impl EffectiveCouplings {
    pub fn from_system(params: &SystemParams) -> Self {
        let d = derive(params);
        Self {
            g_chi: d.g_chi,
            delta_s: d.delta_s,
            delta: d.delta,
            omega_c: params.omega_c,
            omega_a: params.omega_a,
            e: params.e(),
        }
    }
}

/// Effective Hamiltonian in the collective basis:
///
/// ```text
/// H_e = [Δ_s − (u²−w²)Δ] B†B + [Δ_s + (u²−w²)Δ] J†J + 2uwΔ (B†J + J†B)
///     + (i/2)[E*(wB + uJ)² − h.c.] + i(Ω_ψ J + Ω_φ B − h.c.) + iG_χ(B†J − J†B)
/// ```
pub fn hamiltonian_from_couplings(c: &EffectiveCouplings, cp: &CollectiveParams) -> OperatorMatrix {
    let (j, b) = collective_jump_operators(cp);
    let (u, w) = (cp.u, cp.w);
    let jd = j.adjoint();
    let bd = b.adjoint();
    let split = (u * u - w * w) * c.delta;
    let omega_psi = u * c.omega_c + w * c.omega_a;
    let omega_phi = w * c.omega_c - u * c.omega_a;

    let mut h = (&bd * &b).scale(c.delta_s - split) + (&jd * &j).scale(c.delta_s + split);
    h += (&bd * &j + &jd * &b).scale(2.0 * u * w * c.delta);
    let x = b.scale(w) + j.scale(u);
    let pump = (&x * &x) * c.e.conj();
    h += (&pump - pump.adjoint()) * (0.5 * I);
    let drive = j.scale(omega_psi) + b.scale(omega_phi);
    h += (&drive - drive.adjoint()) * I;
    h += (&bd * &j - &jd * &b) * (I * c.g_chi);
    h
}

pub fn effective_hamiltonian_5(params: &SystemParams, cp: &CollectiveParams) -> OperatorMatrix {
    hamiltonian_from_couplings(&EffectiveCouplings::from_system(params), cp)
}

/// `−i[H_e, ρ] + (Γ_χ/2)(2JρJ† − J†Jρ − ρJ†J)` on the collective basis.
pub fn collective_liouvillian(c: &EffectiveCouplings, gamma_chi: f64, cp: &CollectiveParams) -> Superoperator {
    let (j, _) = collective_jump_operators(cp);
    let mut l = Superoperator::zeros(FIVE);
    l.add_hamiltonian(&hamiltonian_from_couplings(c, cp));
    l.add_dissipator(gamma_chi, &j);
    l
}

/// `U† ρ U`: product basis `{|1⟩…|5⟩}` to collective basis.
pub fn product_to_collective(rho5: &DensityMatrix, cp: &CollectiveParams) -> Result<DensityMatrix> {
    check_five(rho5)?;
    let u = cp.basis_change();
    DensityMatrix::new(u.adjoint() * rho5.matrix() * &u)
}

pub fn collective_to_product(rho: &DensityMatrix, cp: &CollectiveParams) -> Result<DensityMatrix> {
    check_five(rho)?;
    let u = cp.basis_change();
    DensityMatrix::new(&u * rho.matrix() * u.adjoint())
}

fn check_five(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != FIVE {
        return Err(Error::DimensionMismatch { expected: FIVE, actual: rho.dim() });
    }
    Ok(())
}

/// Product states `|1⟩…|5⟩` in the order used throughout this module.
pub const FIVE_STATE_LABELS: [BasisLabel; FIVE] = [
    BasisLabel { atom: crate::fock::Atom::Ground, photons: 0 },
    BasisLabel { atom: crate::fock::Atom::Ground, photons: 1 },
    BasisLabel { atom: crate::fock::Atom::Ground, photons: 2 },
    BasisLabel { atom: crate::fock::Atom::Excited, photons: 0 },
    BasisLabel { atom: crate::fock::Atom::Excited, photons: 1 },
];

/// Indices of `|1⟩…|5⟩` in the full atom ⊗ field space.
pub fn five_state_indices(cutoff: FockCutoff) -> [usize; FIVE] {
    FIVE_STATE_LABELS.map(|l| l.index(cutoff).expect("n_max ≥ 2"))
}

/// Projects a full-space superoperator onto the two-excitation subspace;
/// couplings leaking out of it are dropped.
pub fn restrict_to_two_excitations(l: &Superoperator, cutoff: FockCutoff) -> Result<Superoperator> {
    if l.dim() != cutoff.dim() {
        return Err(Error::DimensionMismatch { expected: cutoff.dim(), actual: l.dim() });
    }
    let d = cutoff.dim();
    let idx = five_state_indices(cutoff);
    let vec_idx: Vec<usize> =
        (0..FIVE * FIVE).map(|k| idx[k % FIVE] + d * idx[k / FIVE]).collect();
    let m = l.matrix();
    let out = nalgebra::DMatrix::from_fn(FIVE * FIVE, FIVE * FIVE, |r, c| m[(vec_idx[r], vec_idx[c])]);
    Superoperator::from_matrix(FIVE, out)
}

/// Block `PρP` of a full-space state on `|1⟩…|5⟩`, not renormalized.
pub fn two_excitation_block(rho: &OperatorMatrix, cutoff: FockCutoff) -> OperatorMatrix {
    let idx = five_state_indices(cutoff);
    OperatorMatrix::from_fn(FIVE, FIVE, |r, c| rho[(idx[r], idx[c])])
}

/// Embeds a five-state operator (product basis) into the full space.
pub fn embed_two_excitations(rho5: &OperatorMatrix, cutoff: FockCutoff) -> OperatorMatrix {
    let idx = five_state_indices(cutoff);
    let mut out = OperatorMatrix::zeros(cutoff.dim(), cutoff.dim());
    for r in 0..FIVE {
        for c in 0..FIVE {
            out[(idx[r], idx[c])] = rho5[(r, c)];
        }
    }
    out
}

/// Superoperator conjugated into the collective basis, `T L T⁻¹` with
/// `T = Uᵀ ⊗ U†`.
pub fn superoperator_to_collective(l: &Superoperator, cp: &CollectiveParams) -> Result<Superoperator> {
    if l.dim() != FIVE {
        return Err(Error::DimensionMismatch { expected: FIVE, actual: l.dim() });
    }
    let u = cp.basis_change();
    let t = u.transpose().kronecker(&u.adjoint());
    let t_inv = u.conjugate().kronecker(&u);
    Superoperator::from_matrix(FIVE, &t * l.matrix() * t_inv)
}

/// Collective state vector `|label⟩` expanded in the full product space.
pub fn collective_state_vector(label: CollectiveLabel, cp: &CollectiveParams, cutoff: FockCutoff) -> DVector<C64> {
    let col = cp.basis_change().column(label.index()).into_owned();
    let idx = five_state_indices(cutoff);
    let mut v = DVector::zeros(cutoff.dim());
    for (k, &i) in idx.iter().enumerate() {
        v[i] = col[k];
    }
    v
}
