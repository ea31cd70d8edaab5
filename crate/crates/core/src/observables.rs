//! Intracavity observables: photon number, zero-delay second-order
//! correlation, named populations and purity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::collective::{collective_state_vector, five_state_indices, CollectiveLabel, CollectiveParams};
use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::{Atom, BasisLabel, CompositeOps, FockCutoff};

/// Below this mean photon number g²(0) is reported as undefined.
pub const G2_MIN_PHOTONS: f64 = 1e-14;
const IMAG_TOL: f64 = 1e-12;

fn check_dim(rho: &DensityMatrix, cutoff: FockCutoff) -> Result<()> {
    if rho.dim() != cutoff.dim() {
        return Err(Error::DimensionMismatch { expected: cutoff.dim(), actual: rho.dim() });
    }
    Ok(())
}

/// `Tr(a†a ρ)`.
pub fn mean_n(rho: &DensityMatrix, cutoff: FockCutoff) -> Result<f64> {
    Ok(photon_distribution(rho, cutoff)?.iter().enumerate().map(|(n, p)| n as f64 * p).sum())
}

/// `P(n)`, summed over the atomic state.
pub fn photon_distribution(rho: &DensityMatrix, cutoff: FockCutoff) -> Result<Vec<f64>> {
    check_dim(rho, cutoff)?;
    let m = rho.matrix();
    let fd = cutoff.fock_dim();
    Ok((0..fd).map(|n| m[(n, n)].re + m[(fd + n, fd + n)].re).collect())
}

/// `⟨a†a†aa⟩ / ⟨a†a⟩²`, or `None` for an (almost) empty cavity.
pub fn g2_zero(rho: &DensityMatrix, cutoff: FockCutoff) -> Result<Option<f64>> {
    check_dim(rho, cutoff)?;
    let ops = CompositeOps::new(cutoff);
    let ad = ops.a.adjoint();
    let n = (&ad * &ops.a * rho.matrix()).trace().re;
    if n < G2_MIN_PHOTONS {
        return Ok(None);
    }
    let pairs = (&ad * &ad * &ops.a * &ops.a * rho.matrix()).trace().re;
    Ok(Some(pairs / (n * n)))
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Population outside the five states with at most two excitations.
pub fn leakage(rho: &DensityMatrix, cutoff: FockCutoff) -> Result<f64> {
    check_dim(rho, cutoff)?;
    let kept: f64 = five_state_indices(cutoff).iter().map(|&i| rho.matrix()[(i, i)].re).sum();
    Ok(1.0 - kept)
}

/// A product state `|g,n⟩`/`|e,n⟩` (`g3`, `e0`, …) or a collective state
/// (`one`, `psi`, `phi`, `xi`, `zeta`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PopulationLabel {
    Product { excited: bool, photons: usize },
    Collective(CollectiveKey),
}

/// Orderable wrapper so labels can key sorted maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollectiveKey(usize);

impl CollectiveKey {
    pub fn label(self) -> CollectiveLabel {
        CollectiveLabel::ALL[self.0]
    }
}

impl From<BasisLabel> for PopulationLabel {
    fn from(l: BasisLabel) -> Self {
        PopulationLabel::Product { excited: l.atom == Atom::Excited, photons: l.photons }
    }
}

impl From<CollectiveLabel> for PopulationLabel {
    fn from(l: CollectiveLabel) -> Self {
        PopulationLabel::Collective(CollectiveKey(l.index()))
    }
}

impl FromStr for PopulationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(c) = s.parse::<CollectiveLabel>() {
            return Ok(c.into());
        }
        let unknown = || Error::UnknownLabel(s.to_string());
        let excited = match s.chars().next() {
            Some('g') => false,
            Some('e') => true,
            _ => return Err(unknown()),
        };
        let photons = s[1..].parse().map_err(|_| unknown())?;
        Ok(PopulationLabel::Product { excited, photons })
    }
}

impl fmt::Display for PopulationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopulationLabel::Product { excited, photons } => write!(f, "{}{}", if *excited { 'e' } else { 'g' }, photons),
            PopulationLabel::Collective(k) => f.write_str(k.label().name()),
        }
    }
}

/// `⟨label|ρ|label⟩`; collective labels use the weights in `cp`.
pub fn population(
    rho: &DensityMatrix,
    label: PopulationLabel,
    cutoff: FockCutoff,
    cp: &CollectiveParams,
) -> Result<f64> {
    check_dim(rho, cutoff)?;
    let value = match label {
        PopulationLabel::Product { excited, photons } => {
            let atom = if excited { Atom::Excited } else { Atom::Ground };
            let i = BasisLabel { atom, photons }.index(cutoff)?;
            rho.matrix()[(i, i)]
        }
        PopulationLabel::Collective(k) => {
            let v = collective_state_vector(k.label(), cp, cutoff);
            (v.adjoint() * rho.matrix() * &v)[(0, 0)]
        }
    };
    if value.im.abs() > IMAG_TOL {
        return Err(Error::InvalidDensityMatrix(format!("population of {label} has imaginary part {}", value.im)));
    }
    Ok(value.re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub mean_n: f64,
    pub g2: Option<f64>,
    pub purity: f64,
    pub populations: BTreeMap<PopulationLabel, f64>,
}

impl ObservableSet {
    pub fn compute(
        rho: &DensityMatrix,
        cutoff: FockCutoff,
        cp: &CollectiveParams,
        labels: &[PopulationLabel],
    ) -> Result<Self> {
        let populations =
            labels.iter().map(|&l| Ok((l, population(rho, l, cutoff, cp)?))).collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self { mean_n: mean_n(rho, cutoff)?, g2: g2_zero(rho, cutoff)?, purity: purity(rho), populations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{OperatorMatrix, C64};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn cutoff() -> FockCutoff {
        FockCutoff::new(4).unwrap()
    }

    fn fock(atom: Atom, n: usize) -> DensityMatrix {
        DensityMatrix::basis_state(cutoff().dim(), BasisLabel { atom, photons: n }.index(cutoff()).unwrap()).unwrap()
    }

    fn random_rho(re: &[f64], im: &[f64]) -> DensityMatrix {
        let d = cutoff().dim();
        let m = OperatorMatrix::from_fn(d, d, |r, c| C64::new(re[r + d * c], im[r + d * c]));
        DensityMatrix::from_unnormalized(&m * m.adjoint()).unwrap()
    }

    #[test]
    fn g2_of_number_states() {
        assert_eq!(g2_zero(&fock(Atom::Ground, 1), cutoff()).unwrap(), Some(0.0));
        assert_abs_diff_eq!(g2_zero(&fock(Atom::Excited, 2), cutoff()).unwrap().unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(g2_zero(&fock(Atom::Excited, 0), cutoff()).unwrap(), None);
    }

    #[test]
    fn populations_and_purity() {
        let cp = CollectiveParams::default_gauge(0.6, 0.8);
        let vac = fock(Atom::Ground, 0);
        let g0: PopulationLabel = "g0".parse().unwrap();
        assert_eq!(population(&vac, g0, cutoff(), &cp).unwrap(), 1.0);
        assert_eq!(population(&vac, "one".parse().unwrap(), cutoff(), &cp).unwrap(), 1.0);
        assert_abs_diff_eq!(purity(&vac), 1.0, epsilon = 1e-15);
        let mixed = DensityMatrix::maximally_mixed(6);
        assert_abs_diff_eq!(purity(&mixed), 1.0 / 6.0, epsilon = 1e-15);

        let psi = DensityMatrix::pure(&collective_state_vector(CollectiveLabel::Psi, &cp, cutoff())).unwrap();
        assert_abs_diff_eq!(population(&psi, "psi".parse().unwrap(), cutoff(), &cp).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(population(&psi, "phi".parse().unwrap(), cutoff(), &cp).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(population(&psi, "g1".parse().unwrap(), cutoff(), &cp).unwrap(), 0.36, epsilon = 1e-15);
    }

    #[test]
    fn label_parsing() {
        for s in ["g0", "e3", "psi", "zeta", "one"] {
            assert_eq!(s.parse::<PopulationLabel>().unwrap().to_string(), s);
        }
        for s in ["x1", "g", "gx", ""] {
            assert!(matches!(s.parse::<PopulationLabel>(), Err(Error::UnknownLabel(_))));
        }
        let cp = CollectiveParams::default_gauge(0.6, 0.8);
        let vac = fock(Atom::Ground, 0);
        assert!(population(&vac, "g9".parse().unwrap(), cutoff(), &cp).is_err());
    }

    #[test]
    fn leakage_counts_high_excitations() {
        assert_eq!(leakage(&fock(Atom::Ground, 2), cutoff()).unwrap(), 0.0);
        assert_eq!(leakage(&fock(Atom::Excited, 2), cutoff()).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn populations_complete_and_mean_n_consistent(
            re in proptest::collection::vec(-1.0f64..1.0, 100),
            im in proptest::collection::vec(-1.0f64..1.0, 100),
        ) {
            let rho = random_rho(&re, &im);
            let cp = CollectiveParams::default_gauge(0.6, 0.8);
            let total: f64 = cutoff()
                .labels()
                .map(|l| population(&rho, l.into(), cutoff(), &cp).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            let ops = CompositeOps::new(cutoff());
            let direct = (ops.number() * rho.matrix()).trace().re;
            prop_assert!((mean_n(&rho, cutoff()).unwrap() - direct).abs() < 1e-12);
            prop_assert!(purity(&rho) <= 1.0 + 1e-10);
        }

        #[test]
        fn g2_invariant_under_number_rotation(
            re in proptest::collection::vec(-1.0f64..1.0, 100),
            im in proptest::collection::vec(-1.0f64..1.0, 100),
            t in -3.0f64..3.0,
        ) {
            let rho = random_rho(&re, &im);
            let ops = CompositeOps::new(cutoff());
            let phases = DVector::from_fn(cutoff().dim(), |i, _| C64::from_polar(1.0, t * ops.number()[(i, i)].re));
            let u = OperatorMatrix::from_diagonal(&phases);
            let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
            let (a, b) = (g2_zero(&rho, cutoff()).unwrap().unwrap(), g2_zero(&rotated, cutoff()).unwrap().unwrap());
            prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }
}
