//! The analytic dark state against the full Fock-space steady state.

use chiraldark::collective::{collective_state_vector, CollectiveLabel, CollectiveParams};
use chiraldark::config::PointSpec;
use chiraldark::dark_state::{analytic_dark_rho, dfs_requirements_double};
use chiraldark::dynamics::steady_state;
use chiraldark::fock::{FockCutoff, C64};
use chiraldark::model::{build_liouvillian, derive, SystemParams};
use chiraldark::observables::purity;
use chiraldark::sweep::{evaluate, run_convergence};
use proptest::prelude::*;

fn dark(omega: f64, chi: f64, delta: f64) -> SystemParams {
    let p = SystemParams { chi, omega_c: omega, omega_a: omega, ..SystemParams::default() }.with_detunings(0.0, delta);
    let e = dfs_requirements_double(&p).unwrap().required_e;
    SystemParams { e_mag: e.norm(), phi_d: e.arg(), ..p }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Weak driving, measured by the dark-state population ratio
    /// ρ_φφ/ρ₁₁ = 2Ω_c²/(Δ² + G_χ²) ≤ 2·10⁻³.
    #[test]
    fn full_steady_state_is_the_analytic_dark_state(
        ratio in 1e-6f64..2e-3, chi in 0.0f64..0.9, delta in -1.0f64..1.0,
    ) {
        let g = 0.5 * (1.0 - chi);
        let omega = ((delta * delta + g * g) * ratio / 2.0).sqrt();
        let p = dark(omega, chi, delta);
        let cutoff = FockCutoff::new(6).unwrap();
        let rho = steady_state(&build_liouvillian(&p, cutoff)).unwrap();
        prop_assert!(purity(&rho) >= 1.0 - 1e-6);
        let analytic = analytic_dark_rho(&p).unwrap();
        let cp = CollectiveParams::from_derived(&derive(&p));
        let one = collective_state_vector(CollectiveLabel::One, &cp, cutoff);
        let phi = collective_state_vector(CollectiveLabel::Phi, &cp, cutoff);
        let elem = |x: &nalgebra::DVector<C64>, y: &nalgebra::DVector<C64>| (x.adjoint() * rho.matrix() * y)[(0, 0)];
        prop_assert!((elem(&one, &one).re - analytic.rho_11).abs() < 1e-6);
        prop_assert!((elem(&phi, &phi).re - analytic.rho_phiphi).abs() < 1e-6);
        prop_assert!((elem(&one, &phi) - analytic.rho_1phi).norm() < 1e-6);
    }
}

#[test]
fn dark_state_degrades_beyond_weak_driving() {
    // Couplings out of the two-excitation manifold grow with Ω_c/G_χ.
    let p = dark(0.02, 0.9, 0.0);
    let rho = steady_state(&build_liouvillian(&p, FockCutoff::new(8).unwrap())).unwrap();
    let pur = purity(&rho);
    assert!(pur < 0.95, "purity {pur}");
    assert!(analytic_dark_rho(&p).unwrap().purity() > 1.0 - 1e-12);
}

#[test]
fn weak_drive_g2_converges_in_cutoff() {
    let spec = PointSpec { omega_c: 0.01, e_rule: chiraldark::config::ERule::Quadratic, ..PointSpec::default() };
    let table = run_convergence(&spec, &[4, 6, 8, 12]).unwrap();
    let diffs = table.column("diff_g2").unwrap();
    assert!(diffs[2].unwrap() < 1e-8 && diffs[3].unwrap() < 1e-8, "{diffs:?}");
    // The cavity field g2 is not a truncation artifact of the simulator.
    let g2 = table.column("g2").unwrap()[3].unwrap();
    assert!((g2 - 3.2038e-3).abs() < 1e-6, "{g2}");
}

#[test]
fn strong_pump_converges_slowly_but_monotonically() {
    // Below the parametric threshold |E| = κ(1+χ)/2.
    let spec = PointSpec { omega_c: 0.01, e_mag: 0.3, ..PointSpec::default() };
    let table = run_convergence(&spec, &[4, 6, 8, 12, 16]).unwrap();
    let diffs: Vec<f64> = table.column("diff_mean_n").unwrap().into_iter().skip(1).map(Option::unwrap).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
    assert!(diffs[0] > 1e-6, "{diffs:?}");
}

#[test]
fn cavity_g2_independent_of_atom_damping_without_backscatter() {
    let at = |gamma: f64| {
        let spec = PointSpec { gamma, omega_c: 0.01, e_rule: chiraldark::config::ERule::Quadratic, ..PointSpec::default() };
        evaluate(&spec).unwrap().observable("g2".parse().unwrap()).unwrap().unwrap()
    };
    let reference = at(1.0);
    for gamma in [0.25, 0.5, 2.0, 4.0] {
        assert!((at(gamma) - reference).abs() < 1e-9 * reference);
    }
    // With backscattering (χ > 0) the atom does act back on the cavity.
    let chiral = |gamma: f64| {
        let spec = PointSpec { gamma, chi: 0.5, omega_c: 0.01, e_rule: chiraldark::config::ERule::Quadratic, ..PointSpec::default() };
        evaluate(&spec).unwrap().observable("g2".parse().unwrap()).unwrap().unwrap()
    };
    assert!((chiral(0.5) - chiral(2.0)).abs() > 1e-6);
}
