//! Physical parameters, the system Hamiltonian and the master-equation
//! Liouvillian.
//!
//! All rates and frequencies are in units of κ.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dynamics::Superoperator;
use crate::error::{Error, Result};
use crate::fock::{CompositeOps, FockCutoff, OperatorMatrix, C64, I};

/// Distance from a multiple of 2π below which the waveguide phase is treated
/// as commensurate (no coherent exchange term, unit cross-coupling).
pub const COMMENSURATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Cavity decay into right-propagating modes.
    pub kappa: f64,
    /// Atomic decay into right-propagating modes.
    pub gamma: f64,
    /// κ_L/κ_R = γ_L/γ_R.
    pub chi: f64,
    pub delta_c: f64,
    pub delta_a: f64,
    pub omega_c: f64,
    pub omega_a: f64,
    /// |E| of the DPO pump coupling.
    pub e_mag: f64,
    /// Phase of E relative to the drives.
    pub phi_d: f64,
    /// k₀·x_ac.
    pub x_phase: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            gamma: 1.0,
            chi: 0.0,
            delta_c: 0.0,
            delta_a: 0.0,
            omega_c: 0.0,
            omega_a: 0.0,
            e_mag: 0.0,
            phi_d: 0.0,
            x_phase: 0.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("chi", self.chi),
            ("delta_c", self.delta_c),
            ("delta_a", self.delta_a),
            ("omega_c", self.omega_c),
            ("omega_a", self.omega_a),
            ("e_mag", self.e_mag),
            ("phi_d", self.phi_d),
            ("x_phase", self.x_phase),
        ];
        for (field, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { field, reason: format!("must be finite, got {v}") });
            }
        }
        let bad = |field: &'static str, reason: &str, v: f64| {
            Err(Error::InvalidParameter { field, reason: format!("{reason}, got {v}") })
        };
        if self.kappa <= 0.0 {
            return bad("kappa", "must be > 0", self.kappa);
        }
        if self.gamma < 0.0 {
            return bad("gamma", "must be ≥ 0", self.gamma);
        }
        if !(0.0..=1.0).contains(&self.chi) {
            return bad("chi", "must lie in [0, 1]", self.chi);
        }
        for (field, v) in [("omega_c", self.omega_c), ("omega_a", self.omega_a), ("e_mag", self.e_mag)] {
            if v < 0.0 {
                return bad(field, "must be ≥ 0", v);
            }
        }
        Ok(())
    }

    /// `E = |E| e^{iφ_D}`.
    pub fn e(&self) -> C64 {
        C64::from_polar(self.e_mag, self.phi_d)
    }

    pub fn delta_s(&self) -> f64 {
        0.5 * (self.delta_c + self.delta_a)
    }

    pub fn delta(&self) -> f64 {
        0.5 * (self.delta_c - self.delta_a)
    }

    /// Sets Δ_c, Δ_a from the sum/difference pair.
    pub fn with_detunings(mut self, delta_s: f64, delta: f64) -> Self {
        self.delta_c = delta_s + delta;
        self.delta_a = delta_s - delta;
        self
    }

    /// `(cos k₀x_ac, sin k₀x_ac)`, exact `(1, 0)` for commensurate spacing.
    pub fn waveguide_phase(&self) -> (f64, f64) {
        let r = self.x_phase.rem_euclid(TAU);
        if r.min(TAU - r) < COMMENSURATE_TOL {
            (1.0, 0.0)
        } else {
            (r.cos(), r.sin())
        }
    }
}

/// Collective-basis quantities derived from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub u: f64,
    pub w: f64,
    pub g_chi: f64,
    pub gamma_chi: f64,
    pub delta_s: f64,
    pub delta: f64,
    pub omega_psi: f64,
    pub omega_phi: f64,
    /// `atan2(G_χ, 2uwΔ)`; `None` when both vanish.
    pub theta: Option<f64>,
}

impl DerivedParams {
    pub fn theta(&self) -> Result<f64> {
        self.theta.ok_or(Error::PhaseUndefined)
    }

    /// `√((2uwΔ)² + G_χ²)`.
    pub fn coupling_magnitude(&self) -> f64 {
        (2.0 * self.u * self.w * self.delta).hypot(self.g_chi)
    }

    /// Energy shift of |φ⟩, `Δ_s − (u² − w²)Δ`.
    pub fn phi_shift(&self) -> f64 {
        self.delta_s - (self.u * self.u - self.w * self.w) * self.delta
    }
}

pub fn derive(params: &SystemParams) -> DerivedParams {
    let SystemParams { kappa, gamma, chi, omega_c, omega_a, .. } = *params;
    let u = (kappa / (kappa + gamma)).sqrt();
    let w = (gamma / (kappa + gamma)).sqrt();
    let g_chi = 0.5 * (1.0 - chi) * (kappa * gamma).sqrt();
    let delta = params.delta();
    let x = 2.0 * u * w * delta;
    let theta = if g_chi == 0.0 && x == 0.0 { None } else { Some(g_chi.atan2(x)) };
    DerivedParams {
        u,
        w,
        g_chi,
        gamma_chi: (1.0 + chi) * (kappa + gamma),
        delta_s: params.delta_s(),
        delta,
        omega_psi: u * omega_c + w * omega_a,
        omega_phi: w * omega_c - u * omega_a,
        theta,
    }
}

/// `Δ_c a†a + Δ_a σ₊σ₋ + (i/2)(E* a² − E a†²) + i(Ω_c a + Ω_a σ₋ − h.c.)`.
pub fn build_hamiltonian(params: &SystemParams, cutoff: FockCutoff) -> OperatorMatrix {
    let ops = CompositeOps::new(cutoff);
    hamiltonian_from_ops(params, &ops)
}

pub(crate) fn hamiltonian_from_ops(params: &SystemParams, ops: &CompositeOps) -> OperatorMatrix {
    let a = &ops.a;
    let sm = &ops.sm;
    let ad = a.adjoint();
    let sp = sm.adjoint();
    let e = params.e();

    let mut h = (&ad * a).scale(params.delta_c) + (&sp * sm).scale(params.delta_a);
    let pump = (a * a) * e.conj();
    h += (&pump - pump.adjoint()) * (0.5 * I);
    let drive = a.scale(params.omega_c) + sm.scale(params.omega_a);
    h += (&drive - drive.adjoint()) * I;
    h
}

/// Liouvillian of the general master equation, valid for any waveguide phase.
///
/// Dissipators at rates κ(1+χ) and γ(1+χ), directional cross terms weighted by
/// `χ√(κγ)cos(k₀x)` (left) and `√(κγ)cos(k₀x)` (right), and the coherent
/// exchange `iΩ_ac[ρ, σ₊a + a†σ₋]` with `Ω_ac = √(κγ) sin(k₀x)`.
pub fn build_liouvillian(params: &SystemParams, cutoff: FockCutoff) -> Superoperator {
    let ops = CompositeOps::new(cutoff);
    let h = hamiltonian_from_ops(params, &ops);
    let a = &ops.a;
    let sm = &ops.sm;
    let ad = a.adjoint();
    let sp = sm.adjoint();
    let id = OperatorMatrix::identity(cutoff.dim(), cutoff.dim());

    let mut l = Superoperator::zeros(cutoff.dim());
    l.add_hamiltonian(&h);
    l.add_dissipator(params.kappa * (1.0 + params.chi), a);
    l.add_dissipator(params.gamma * (1.0 + params.chi), sm);

    let (cos_x, sin_x) = params.waveguide_phase();
    let root = (params.kappa * params.gamma).sqrt();

    if sin_x != 0.0 {
        // iΩ_ac(ρX − Xρ)
        let x = &sp * a + &ad * sm;
        let omega_ac = root * sin_x;
        l.add_sandwich(I * omega_ac, &id, &x);
        l.add_sandwich(-I * omega_ac, &x, &id);
    }

    // Left-propagating: [a, ρσ₊] − [a†, σ₋ρ] = aρσ₊ − ρσ₊a − a†σ₋ρ + σ₋ρa†
    let left = C64::new(params.chi * root * cos_x, 0.0);
    if left != C64::new(0.0, 0.0) {
        l.add_sandwich(left, a, &sp);
        l.add_sandwich(-left, &id, &(&sp * a));
        l.add_sandwich(-left, &(&ad * sm), &id);
        l.add_sandwich(left, sm, &ad);
    }
    // Right-propagating: [σ₋, ρa†] − [σ₊, aρ] = σ₋ρa† − ρa†σ₋ − σ₊aρ + aρσ₊
    let right = C64::new(root * cos_x, 0.0);
    if right != C64::new(0.0, 0.0) {
        l.add_sandwich(right, sm, &ad);
        l.add_sandwich(-right, &id, &(&ad * sm));
        l.add_sandwich(-right, &(&sp * a), &id);
        l.add_sandwich(right, a, &sp);
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{max_abs, steady_state, DensityMatrix};
    use crate::fock::BasisLabel;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn generic() -> SystemParams {
        SystemParams {
            kappa: 1.0,
            gamma: 0.7,
            chi: 0.3,
            delta_c: 0.2,
            delta_a: -0.4,
            omega_c: 0.1,
            omega_a: 0.05,
            e_mag: 0.2,
            phi_d: 0.6,
            x_phase: 0.0,
        }
    }

    /// Master equation transcribed term by term from its printed commutator
    /// form, built by applying it to matrix units.
    pub(crate) fn literal_liouvillian(p: &SystemParams, cutoff: FockCutoff) -> Superoperator {
        let ops = CompositeOps::new(cutoff);
        let h = build_hamiltonian(p, cutoff);
        let (a, s) = (ops.a.clone(), ops.sm.clone());
        let (ad, sp) = (a.adjoint(), s.adjoint());
        let r = (p.kappa * p.gamma).sqrt();
        let comm = |x: &OperatorMatrix, y: &OperatorMatrix| x * y - y * x;
        Superoperator::from_linear_map(cutoff.dim(), |rho| {
            let mut out = -(comm(&h, rho)) * I;
            out += ((&a * rho * &ad).scale(2.0) - rho * &ad * &a - &ad * &a * rho)
                .scale(0.5 * p.kappa * (p.chi + 1.0));
            out += ((&s * rho * &sp).scale(2.0) - rho * &sp * &s - &sp * &s * rho)
                .scale(0.5 * p.gamma * (p.chi + 1.0));
            out -= (comm(&(rho * &ad), &s) + comm(&sp, &(&a * rho))).scale(r);
            out -= (comm(&(rho * &sp), &a) + comm(&ad, &(&s * rho))).scale(p.chi * r);
            out
        })
    }

    #[test]
    fn derived_values() {
        let p = SystemParams { gamma: 1.0, ..Default::default() };
        let d = derive(&p);
        assert_abs_diff_eq!(d.u, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.w, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.g_chi, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.gamma_chi, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.theta().unwrap(), FRAC_PI_2, epsilon = 1e-15);

        for (k, g) in [(1.0, 0.3), (1.0, 4.0)] {
            let d = derive(&SystemParams { kappa: k, gamma: g, chi: 1.0, ..Default::default() });
            assert_eq!(d.g_chi, 0.0);
            assert_abs_diff_eq!(d.u * d.u + d.w * d.w, 1.0, epsilon = 1e-15);
        }

        let d = derive(&SystemParams { chi: 1.0, ..Default::default() });
        assert!(matches!(d.theta(), Err(Error::PhaseUndefined)));

        let p = generic();
        let d = derive(&p);
        assert_abs_diff_eq!(d.omega_psi, d.u * p.omega_c + d.w * p.omega_a, epsilon = 1e-15);
        assert_abs_diff_eq!(d.omega_phi, d.w * p.omega_c - d.u * p.omega_a, epsilon = 1e-15);
        assert_abs_diff_eq!(d.delta_s, -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(d.delta, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn validation_rejects_out_of_range() {
        assert!(SystemParams::default().validate().is_ok());
        for p in [
            SystemParams { chi: 1.5, ..Default::default() },
            SystemParams { kappa: 0.0, ..Default::default() },
            SystemParams { gamma: -0.1, ..Default::default() },
            SystemParams { omega_a: -1.0, ..Default::default() },
            SystemParams { e_mag: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(p.validate(), Err(Error::InvalidParameter { .. })), "{p:?}");
        }
    }

    #[test]
    fn hamiltonian_simple_cases() {
        let cutoff = FockCutoff::new(2).unwrap();
        let zero = build_hamiltonian(&SystemParams::default(), cutoff);
        assert_eq!(max_abs(&zero), 0.0);

        let h = build_hamiltonian(&SystemParams { delta_c: 1.0, ..Default::default() }, cutoff);
        for label in cutoff.labels() {
            let i = label.index(cutoff).unwrap();
            assert_abs_diff_eq!(h[(i, i)].re, label.photons as f64, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(max_abs(&(&h - OperatorMatrix::from_diagonal(&h.diagonal()))), 0.0);
    }

    #[test]
    fn commensurate_phase_is_exact() {
        let cutoff = FockCutoff::new(3).unwrap();
        let p0 = generic();
        let l0 = build_liouvillian(&p0, cutoff);
        for m in [1.0, 2.0, -3.0] {
            let lm = build_liouvillian(&SystemParams { x_phase: TAU * m, ..p0 }, cutoff);
            assert_eq!(l0, lm);
        }
        let lit = literal_liouvillian(&p0, cutoff);
        assert!((l0.matrix() - lit.matrix()).norm() < 1e-13);
    }

    #[test]
    fn cavity_only_decay_relaxes_to_vacuum() {
        let cutoff = FockCutoff::new(4).unwrap();
        let p = SystemParams { gamma: 0.0, delta_c: 0.3, ..Default::default() };
        let rho = steady_state(&build_liouvillian(&p, cutoff));
        // the undriven atom with γ = 0 is also stationary in |e⟩
        assert!(rho.is_err());

        let p = SystemParams { gamma: 0.5, delta_c: 0.3, delta_a: -0.2, ..Default::default() };
        let rho = steady_state(&build_liouvillian(&p, cutoff)).unwrap();
        let vac = DensityMatrix::basis_state(cutoff.dim(), BasisLabel::g(0).index(cutoff).unwrap()).unwrap();
        assert!(rho.frobenius_distance(&vac) < 1e-12);
    }

    #[test]
    fn chi_one_cross_terms_symmetric() {
        // At χ = 1 the cross part is invariant under exchanging which emitter is upstream.
        let cutoff = FockCutoff::new(3).unwrap();
        let p = SystemParams { chi: 1.0, ..generic() };
        let local = {
            let mut l = Superoperator::zeros(cutoff.dim());
            let ops = CompositeOps::new(cutoff);
            l.add_hamiltonian(&build_hamiltonian(&p, cutoff));
            l.add_dissipator(2.0 * p.kappa, &ops.a);
            l.add_dissipator(2.0 * p.gamma, &ops.sm);
            l
        };
        let cross = build_liouvillian(&p, cutoff).matrix() - local.matrix();
        let ops = CompositeOps::new(cutoff);
        // Swap roles: atom upstream of cavity.
        let swapped = Superoperator::from_linear_map(cutoff.dim(), |rho| {
            let (x, y) = (&ops.sm, &ops.a);
            let r = (p.kappa * p.gamma).sqrt();
            let t = |x: &OperatorMatrix, y: &OperatorMatrix| {
                (x * (rho * y.adjoint()) - rho * y.adjoint() * x)
                    - (x.adjoint() * (y * rho) - y * rho * x.adjoint())
            };
            (t(x, y) + t(y, x)).scale(r)
        });
        assert!((cross - swapped.matrix()).norm() < 1e-13);
    }

    #[test]
    fn incommensurate_phase_adds_coherent_exchange() {
        let cutoff = FockCutoff::new(3).unwrap();
        let p = SystemParams { x_phase: 0.9, ..generic() };
        let l = build_liouvillian(&p, cutoff);
        assert!(l.trace_defect() < 1e-13);
        assert!((l.matrix() - build_liouvillian(&generic(), cutoff).matrix()).norm() > 1e-3);
        // sin(π) = 0 up to rounding, cos(π) = −1: cross terms flip sign
        let half = build_liouvillian(&SystemParams { x_phase: std::f64::consts::PI, ..generic() }, cutoff);
        assert!(half.trace_defect() < 1e-13);
    }

    fn params_strategy() -> impl Strategy<Value = SystemParams> {
        (
            0.2f64..3.0,
            0.0f64..3.0,
            0.0f64..=1.0,
            -2.0f64..2.0,
            -2.0f64..2.0,
            0.0f64..0.5,
            0.0f64..0.5,
            0.0f64..0.5,
            -3.2f64..3.2,
            -7.0f64..7.0,
        )
            .prop_map(|(kappa, gamma, chi, delta_c, delta_a, omega_c, omega_a, e_mag, phi_d, x_phase)| {
                SystemParams { kappa, gamma, chi, delta_c, delta_a, omega_c, omega_a, e_mag, phi_d, x_phase }
            })
    }

    fn random_hermitian(dim: usize, seed: &[f64]) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(dim, dim);
        let mut it = seed.iter().cycle();
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = C64::new(*it.next().unwrap(), *it.next().unwrap());
            }
        }
        (&m + m.adjoint()).unscale(2.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn hamiltonian_hermitian(p in params_strategy()) {
            let h = build_hamiltonian(&p, FockCutoff::new(4).unwrap());
            prop_assert!(max_abs(&(&h - h.adjoint())) < 1e-14);
        }

        #[test]
        fn liouvillian_preserves_trace_and_hermiticity(
            p in params_strategy(),
            seed in proptest::collection::vec(-1.0f64..1.0, 16),
        ) {
            let cutoff = FockCutoff::new(3).unwrap();
            let l = build_liouvillian(&p, cutoff);
            let rho = random_hermitian(cutoff.dim(), &seed);
            let out = l.apply(&rho).unwrap();
            prop_assert!(out.trace().norm() < 1e-12);
            prop_assert!(max_abs(&(&out - out.adjoint())) < 1e-12);
            prop_assert!(l.trace_defect() < 1e-12);
        }
    }
}
