//! Elementary operators on the truncated Fock space, the two-level atom and
//! their tensor product.
//!
//! Composite operators are always `atom ⊗ field`, so a product state
//! `|atom, n⟩` sits at index `atom_index · (n_max + 1) + n` (atom slow,
//! photon fast). Every other module relies on this ordering.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex square matrix acting on a (truncated) Hilbert space.
pub type OperatorMatrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Highest photon number kept in the cavity Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockCutoff {
    n_max: usize,
}

impl FockCutoff {
    /// The two-photon manifold is the smallest space the dark-state analysis lives in.
    pub const MIN_N_MAX: usize = 2;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < Self::MIN_N_MAX {
            return Err(Error::InvalidParameter {
                field: "cutoff",
                reason: format!("n_max must be ≥ {}, got {n_max}", Self::MIN_N_MAX),
            });
        }
        Ok(Self { n_max })
    }

    pub fn n_max(self) -> usize {
        self.n_max
    }

    pub fn fock_dim(self) -> usize {
        self.n_max + 1
    }

    /// Dimension of the atom ⊗ field space.
    pub fn dim(self) -> usize {
        2 * self.fock_dim()
    }

    pub fn labels(self) -> impl Iterator<Item = BasisLabel> {
        (0..self.dim()).map(move |i| BasisLabel::from_index(i, self).expect("index in range"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Ground,
    Excited,
}

impl Atom {
    pub fn index(self) -> usize {
        match self {
            Atom::Ground => 0,
            Atom::Excited => 1,
        }
    }
}

/// Product state `|atom, photons⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub atom: Atom,
    pub photons: usize,
}

impl BasisLabel {
    pub fn new(atom: Atom, photons: usize) -> Self {
        Self { atom, photons }
    }

    pub fn g(photons: usize) -> Self {
        Self::new(Atom::Ground, photons)
    }

    pub fn e(photons: usize) -> Self {
        Self::new(Atom::Excited, photons)
    }

    pub fn index(self, cutoff: FockCutoff) -> Result<usize> {
        if self.photons > cutoff.n_max() {
            return Err(Error::UnknownLabel(format!(
                "{self} exceeds cutoff n_max = {}",
                cutoff.n_max()
            )));
        }
        Ok(self.atom.index() * cutoff.fock_dim() + self.photons)
    }

    pub fn from_index(index: usize, cutoff: FockCutoff) -> Result<Self> {
        if index >= cutoff.dim() {
            return Err(Error::DimensionMismatch { expected: cutoff.dim(), actual: index });
        }
        let atom = if index < cutoff.fock_dim() { Atom::Ground } else { Atom::Excited };
        Ok(Self { atom, photons: index % cutoff.fock_dim() })
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = match self.atom {
            Atom::Ground => 'g',
            Atom::Excited => 'e',
        };
        write!(f, "|{a},{}⟩", self.photons)
    }
}

/// Ladder operator on `n_max + 1` Fock states: `⟨n−1|a|n⟩ = √n`.
///
/// Takes a raw `n_max` so it can be used below the composite-space minimum.
pub fn annihilation(n_max: usize) -> OperatorMatrix {
    let d = n_max + 1;
    OperatorMatrix::from_fn(d, d, |r, c| if c == r + 1 { re((c as f64).sqrt()) } else { ZERO })
}

/// `σ₋ = |g⟩⟨e|` with g at index 0.
pub fn atom_lowering() -> OperatorMatrix {
    let mut s = OperatorMatrix::zeros(2, 2);
    s[(0, 1)] = ONE;
    s
}

pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &OperatorMatrix) -> OperatorMatrix {
    a.adjoint()
}

pub fn identity(dim: usize) -> OperatorMatrix {
    OperatorMatrix::identity(dim, dim)
}

/// Cavity and atom lowering operators embedded in the composite space.
#[derive(Debug, Clone)]
pub struct CompositeOps {
    pub a: OperatorMatrix,
    pub sm: OperatorMatrix,
}

impl CompositeOps {
    pub fn new(cutoff: FockCutoff) -> Self {
        let a = kron(&identity(2), &annihilation(cutoff.n_max()));
        let sm = kron(&atom_lowering(), &identity(cutoff.fock_dim()));
        Self { a, sm }
    }

    pub fn number(&self) -> OperatorMatrix {
        self.a.adjoint() * &self.a
    }
}
