//! Cross-checks of the steady-state solver and integrator against independent
//! computations.

use chiraldark::dynamics::{evolve, evolve_sampled, steady_state, vectorize, DensityMatrix};
use chiraldark::fock::{FockCutoff, OperatorMatrix, C64};
use chiraldark::model::{build_liouvillian, SystemParams};
use chiraldark::observables::purity;

fn driven() -> SystemParams {
    SystemParams {
        gamma: 0.7,
        chi: 0.3,
        delta_c: 0.2,
        delta_a: -0.4,
        omega_c: 0.3,
        omega_a: 0.2,
        e_mag: 0.1,
        phi_d: 0.4,
        ..SystemParams::default()
    }
}

#[test]
fn steady_state_is_the_long_time_limit() {
    let cutoff = FockCutoff::new(4).unwrap();
    let l = build_liouvillian(&driven(), cutoff);
    let ss = steady_state(&l).unwrap();
    let vacuum = DensityMatrix::basis_state(cutoff.dim(), 0).unwrap();
    let late = evolve(&l, &vacuum, 200.0, 1e-10).unwrap();
    let dist = late.frobenius_distance(&ss);
    assert!(dist < 1e-7, "distance {dist:e}");
}

#[test]
fn integrator_matches_matrix_exponential() {
    let cutoff = FockCutoff::new(2).unwrap();
    let l = build_liouvillian(&driven(), cutoff);
    let d = cutoff.dim();
    let rho0 = DensityMatrix::basis_state(d, cutoff.dim() - 1).unwrap();
    let times = [0.0, 0.5, 1.7, 4.0];
    let traj = evolve_sampled(&l, &rho0, &times, 1e-11).unwrap();
    for (t, state) in times.iter().zip(&traj.states) {
        let propagator = (l.matrix() * C64::new(*t, 0.0)).exp();
        let v = propagator * vectorize(rho0.matrix());
        let exact = OperatorMatrix::from_fn(d, d, |r, c| v[r + d * c]);
        let err = (state.matrix() - exact).norm();
        assert!(err < 1e-8, "t = {t}: {err:e}");
    }
}

#[test]
fn evolution_keeps_states_physical() {
    let cutoff = FockCutoff::new(3).unwrap();
    let l = build_liouvillian(&SystemParams { e_mag: 0.4, ..driven() }, cutoff);
    let mixed = DensityMatrix::maximally_mixed(cutoff.dim());
    let traj = evolve_sampled(&l, &mixed, &[0.0, 1.0, 2.0, 5.0, 10.0], 1e-9).unwrap();
    let mut previous = 0.0;
    for s in &traj.states {
        assert!(s.min_eigenvalue() > -1e-9);
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
        previous = purity(s).max(previous);
    }
    assert!(previous <= 1.0 + 1e-12);
    assert!(traj.accepted_steps > 0);
}

#[test]
fn trapped_antisymmetric_population_gives_mixed_state() {
    // Symmetric decay (χ = 1) removes the chiral coupling; without a pump the
    // steady state is an incoherent mixture involving |φ⟩.
    let p = SystemParams { chi: 1.0, omega_c: 0.1, omega_a: 0.05, ..SystemParams::default() };
    let ss = steady_state(&build_liouvillian(&p, FockCutoff::new(5).unwrap())).unwrap();
    let pur = purity(&ss);
    assert!(pur < 1.0 - 1e-4, "purity {pur}");
}
