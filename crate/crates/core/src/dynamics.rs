//! Vectorized Lindblad dynamics: density matrices, superoperators, the
//! steady-state solver and an adaptive integrator.
//!
//! Vectorization is column-stacking: `vec(ρ)[i + D·j] = ρ[i, j]`, so that
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{OperatorMatrix, C64, I, ONE, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_FLOOR: f64 = -1e-10;

/// Null-space discrepancy above which the steady state is declared non-unique.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Steady-state residual bound relative to ‖L‖_F.
pub const RESIDUAL_REL_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(OperatorMatrix);

impl DensityMatrix {
    /// Validates every invariant; nothing is repaired.
    pub fn new(m: OperatorMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "not square ({}×{})",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!("anti-Hermitian part {herm:.3e}")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min_eig = min_eigenvalue(&m);
        if min_eig < POSITIVITY_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self(m))
    }

    /// Hermitizes and trace-normalizes `m`, then validates.
    pub fn from_unnormalized(m: OperatorMatrix) -> Result<Self> {
        let h = hermitize(&m);
        let tr = h.trace().re;
        if tr == 0.0 || !tr.is_finite() {
            return Err(Error::InvalidDensityMatrix(format!("cannot normalize, trace {tr}")));
        }
        Self::new(h.unscale(tr))
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &DVector<C64>) -> Result<Self> {
        Self::from_unnormalized(v * v.adjoint())
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: index });
        }
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Self::pure(&v)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(OperatorMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

pub fn hermitize(m: &OperatorMatrix) -> OperatorMatrix {
    (m + m.adjoint()).unscale(2.0)
}

pub(crate) fn max_abs(m: &OperatorMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn min_eigenvalue(m: &OperatorMatrix) -> f64 {
    let h = hermitize(m);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn vectorize(rho: &OperatorMatrix) -> DVector<C64> {
    // nalgebra storage is column-major, which is exactly column stacking.
    DVector::from_column_slice(rho.as_slice())
}

pub fn devectorize(v: &DVector<C64>, dim: usize) -> Result<OperatorMatrix> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, actual: v.len() });
    }
    Ok(OperatorMatrix::from_column_slice(dim, dim, v.as_slice()))
}

/// Dense `D² × D²` generator acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: DMatrix<C64>,
}

impl Superoperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, matrix: DMatrix::zeros(dim * dim, dim * dim) }
    }

    pub fn from_matrix(dim: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let d2 = dim * dim;
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::DimensionMismatch { expected: d2, actual: matrix.nrows() });
        }
        Ok(Self { dim, matrix })
    }

    /// Builds the generator of an arbitrary linear map by applying it to the
    /// matrix units `|k⟩⟨l|`.
    pub fn from_linear_map(dim: usize, map: impl Fn(&OperatorMatrix) -> OperatorMatrix) -> Self {
        let mut out = Self::zeros(dim);
        let mut unit = OperatorMatrix::zeros(dim, dim);
        for l in 0..dim {
            for k in 0..dim {
                unit[(k, l)] = ONE;
                let image = map(&unit);
                unit[(k, l)] = ZERO;
                out.matrix.set_column(k + dim * l, &vectorize(&image));
            }
        }
        out
    }

    /// Hilbert-space dimension D.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Accumulates `ρ ↦ coef · A ρ B`, i.e. `coef · (Bᵀ ⊗ A)`.
    pub fn add_sandwich(&mut self, coef: C64, a: &OperatorMatrix, b: &OperatorMatrix) {
        let d = self.dim;
        let a_nz: Vec<(usize, usize, C64)> = nonzeros(a);
        let b_nz: Vec<(usize, usize, C64)> = nonzeros(b);
        for &(l, j, blj) in &b_nz {
            let cb = coef * blj;
            for &(i, k, aik) in &a_nz {
                self.matrix[(i + d * j, k + d * l)] += cb * aik;
            }
        }
    }

    /// `ρ ↦ coef · A ρ`.
    pub fn add_left(&mut self, coef: C64, a: &OperatorMatrix) {
        let id = OperatorMatrix::identity(self.dim, self.dim);
        self.add_sandwich(coef, a, &id);
    }

    /// `ρ ↦ coef · ρ B`.
    pub fn add_right(&mut self, coef: C64, b: &OperatorMatrix) {
        let id = OperatorMatrix::identity(self.dim, self.dim);
        self.add_sandwich(coef, &id, b);
    }

    /// `ρ ↦ −i[H, ρ]`.
    pub fn add_hamiltonian(&mut self, h: &OperatorMatrix) {
        self.add_left(-I, h);
        self.add_right(I, h);
    }

    /// `ρ ↦ (rate/2)(2cρc† − c†cρ − ρc†c)`.
    pub fn add_dissipator(&mut self, rate: f64, c: &OperatorMatrix) {
        if rate == 0.0 {
            return;
        }
        let cd = c.adjoint();
        let cdc = &cd * c;
        self.add_sandwich(C64::new(rate, 0.0), c, &cd);
        self.add_left(C64::new(-0.5 * rate, 0.0), &cdc);
        self.add_right(C64::new(-0.5 * rate, 0.0), &cdc);
    }

    pub fn apply(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: rho.nrows() });
        }
        devectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `max_l |Σ_k L[(k + D k), l]|`: zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        (0..d * d)
            .map(|col| (0..d).map(|k| self.matrix[(k + d * k, col)]).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }
}

fn nonzeros(m: &OperatorMatrix) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if z != ZERO {
                out.push((r, c, z));
            }
        }
    }
    out
}

/// Solves `L' v = e_row` where `L'` is `L` with row `row` replaced by the
/// trace functional. Dense partial-pivot LU; an exactly singular system shows
/// up as non-finite entries and is reported as `None`.
fn trace_row_solution(l: &DMatrix<C64>, dim: usize, row: usize) -> Option<DVector<C64>> {
    use faer::linalg::solvers::Solve;

    let d2 = dim * dim;
    let a = faer::Mat::<faer::c64>::from_fn(d2, d2, |r, c| {
        if r == row {
            let on_diagonal = c % dim == c / dim;
            faer::c64::new(if on_diagonal { 1.0 } else { 0.0 }, 0.0)
        } else {
            let z = l[(r, c)];
            faer::c64::new(z.re, z.im)
        }
    });
    let mut b = faer::Mat::<faer::c64>::zeros(d2, 1);
    b[(row, 0)] = faer::c64::new(1.0, 0.0);
    let x = a.partial_piv_lu().solve(&b);
    let v = DVector::from_fn(d2, |i, _| C64::new(x[(i, 0)].re, x[(i, 0)].im));
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(v)
}

/// Unique stationary state of a trace-preserving generator.
///
/// One diagonal-element row of L is replaced with the trace functional and the
/// system solved; the same is done with a second, different row. A
/// one-dimensional null space makes both solutions coincide.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let dim = l.dim();
    let first = trace_row_solution(&l.matrix, dim, 0);
    let last = dim - 1;
    let second = trace_row_solution(&l.matrix, dim, last + dim * last);
    let (Some(v1), Some(v2)) = (first, second) else {
        return Err(Error::NonUniqueSteadyState { discrepancy: f64::INFINITY });
    };
    let to_rho = |v: &DVector<C64>| -> Result<OperatorMatrix> {
        let m = hermitize(&devectorize(v, dim)?);
        let tr = m.trace().re;
        Ok(m.unscale(tr))
    };
    let rho1 = to_rho(&v1)?;
    let rho2 = to_rho(&v2)?;
    let discrepancy = (&rho1 - &rho2).norm();
    if discrepancy.is_nan() || discrepancy > DEGENERACY_TOL {
        return Err(Error::NonUniqueSteadyState { discrepancy });
    }
    let residual = (&l.matrix * vectorize(&rho1)).norm();
    let bound = RESIDUAL_REL_TOL * l.frobenius_norm();
    if residual > bound {
        return Err(Error::SteadyStateResidual { residual, bound });
    }
    DensityMatrix::new(rho1)
}

// Dormand–Prince 5(4) tableau; the generator is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Result of an adaptive integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates `vec(ρ̇) = L vec(ρ)` to `t_final` with local error control `tol`.
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t_final: f64, tol: f64) -> Result<DensityMatrix> {
    let traj = evolve_sampled(l, rho0, &[t_final], tol)?;
    Ok(traj.states.into_iter().last().expect("one sample requested"))
}

/// Like [`evolve`], returning the state at each (ascending) sample time.
pub fn evolve_sampled(
    l: &Superoperator,
    rho0: &DensityMatrix,
    sample_times: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), actual: rho0.dim() });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter { field: "tol", reason: format!("must be > 0, got {tol}") });
    }
    if sample_times.iter().any(|t| t.is_nan() || *t < 0.0) || sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            field: "t_final",
            reason: "sample times must be non-negative and ascending".into(),
        });
    }

    let dim = l.dim();
    let m = &l.matrix;
    let mut y = vectorize(rho0.matrix());
    let mut t = 0.0;
    let scale = m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut h = if scale > 0.0 { 0.01 / scale } else { 1.0 };
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), accepted_steps: 0, rejected_steps: 0 };

    for &target in sample_times {
        while t < target {
            let h_try = h.min(target - t);
            let mut k: Vec<DVector<C64>> = Vec::with_capacity(7);
            k.push(m * &y);
            for row in &A[1..] {
                let mut ys = y.clone();
                for (kj, &a) in k.iter().zip(row) {
                    if a != 0.0 {
                        ys.axpy(C64::new(h_try * a, 0.0), kj, ONE);
                    }
                }
                k.push(m * ys);
            }
            let mut y5 = y.clone();
            let mut err = DVector::<C64>::zeros(y.len());
            for s in 0..7 {
                if B5[s] != 0.0 {
                    y5.axpy(C64::new(h_try * B5[s], 0.0), &k[s], ONE);
                }
                let e = B5[s] - B4[s];
                if e != 0.0 {
                    err.axpy(C64::new(h_try * e, 0.0), &k[s], ONE);
                }
            }
            let err_norm = (err
                .iter()
                .zip(y.iter().zip(y5.iter()))
                .map(|(e, (a, b))| {
                    let sc = tol + tol * a.norm().max(b.norm());
                    (e.norm() / sc).powi(2)
                })
                .sum::<f64>()
                / y.len() as f64)
                .sqrt();

            if err_norm <= 1.0 {
                t += h_try;
                // Snap onto the target to avoid a sliver step from rounding.
                if (target - t).abs() <= 1e-12 * target.max(1.0) {
                    t = target;
                }
                y = project_physical(&y5, dim)?;
                traj.accepted_steps += 1;
            } else {
                traj.rejected_steps += 1;
            }
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
            h = h_try * factor;
            if h < 1e-14 * t.max(1.0) {
                return Err(Error::IntegrationFailure { t, step: h });
            }
        }
        traj.times.push(t);
        traj.states.push(DensityMatrix::new(devectorize(&y, dim)?)?);
    }
    Ok(traj)
}

/// Re-imposes Hermiticity and unit trace on a vectorized state.
fn project_physical(v: &DVector<C64>, dim: usize) -> Result<DVector<C64>> {
    let m = hermitize(&devectorize(v, dim)?);
    let tr = m.trace().re;
    Ok(vectorize(&m.unscale(tr)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, vals: &[(f64, f64)]) -> OperatorMatrix {
        let v: Vec<C64> = vals.iter().map(|&(a, b)| C64::new(a, b)).collect();
        OperatorMatrix::from_row_slice(rows, rows, &v)
    }

    #[test]
    fn vectorize_round_trip_and_trace() {
        let rho = cm(2, &[(0.7, 0.0), (0.1, -0.2), (0.1, 0.2), (0.3, 0.0)]);
        let v = vectorize(&rho);
        assert_eq!(v[1], rho[(1, 0)]);
        assert_eq!(devectorize(&v, 2).unwrap(), rho);
        let id = vectorize(&OperatorMatrix::identity(2, 2));
        let tr: C64 = id.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        assert!((tr - rho.trace()).norm() < 1e-15);
        assert!(devectorize(&v, 3).is_err());
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let a = cm(3, &[(0.1, 0.2), (0.3, -0.1), (0.0, 0.5), (1.0, 0.0), (-0.4, 0.4), (0.2, 0.2), (0.6, -0.3), (0.0, 0.0), (0.9, 0.1)]);
        let b = cm(3, &[(0.5, 0.0), (-0.2, 0.7), (0.3, 0.3), (0.1, -0.1), (0.8, 0.2), (-0.6, 0.0), (0.2, 0.4), (0.7, -0.5), (0.0, 1.0)]);
        let rho = cm(3, &[(0.3, 0.1), (0.2, 0.0), (-0.1, 0.4), (0.5, -0.5), (0.1, 0.1), (0.0, -0.2), (0.4, 0.3), (-0.3, 0.0), (0.2, 0.6)]);
        let mut s = Superoperator::zeros(3);
        s.add_sandwich(ONE, &a, &b);
        // (Bᵀ ⊗ A) vec(ρ) against A ρ B computed directly.
        let kron = b.transpose().kronecker(&a);
        assert!((kron - s.matrix()).norm() < 1e-15);
        let got = s.apply(&rho).unwrap();
        assert!((got - &a * &rho * &b).norm() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(cm(2, &[(0.5, 0.0), (0.0, 0.0), (0.0, 0.0), (0.4, 0.0)])).is_err());
        assert!(DensityMatrix::new(cm(2, &[(1.2, 0.0), (0.0, 0.0), (0.0, 0.0), (-0.2, 0.0)])).is_err());
        assert!(DensityMatrix::new(cm(2, &[(0.5, 0.0), (0.1, 0.0), (0.2, 0.0), (0.5, 0.0)])).is_err());
        assert!(DensityMatrix::new(cm(2, &[(0.5, 0.0), (0.1, 0.1), (0.1, -0.1), (0.5, 0.0)])).is_ok());
        assert_eq!(DensityMatrix::maximally_mixed(4).dim(), 4);
    }

    #[test]
    fn degenerate_null_space_detected() {
        // Two decoupled absorbing states: any mixture is stationary.
        let mut l = Superoperator::zeros(3);
        let mut c = OperatorMatrix::zeros(3, 3);
        c[(0, 2)] = ONE;
        l.add_dissipator(1.0, &c);
        assert!(matches!(steady_state(&l), Err(Error::NonUniqueSteadyState { .. })));
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let mut l = Superoperator::zeros(2);
        let mut c = OperatorMatrix::zeros(2, 2);
        c[(0, 1)] = ONE;
        l.add_dissipator(1.0, &c);
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        assert_eq!(evolve(&l, &rho0, 0.0, 1e-8).unwrap(), rho0);
    }

    #[test]
    fn evolve_decay_matches_exponential() {
        let mut l = Superoperator::zeros(2);
        let mut c = OperatorMatrix::zeros(2, 2);
        c[(0, 1)] = ONE;
        l.add_dissipator(1.0, &c);
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        let rho = evolve(&l, &rho0, 1.5, 1e-10).unwrap();
        assert!((rho.matrix()[(1, 1)].re - (-1.5f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn evolve_rejects_bad_inputs() {
        let l = Superoperator::zeros(2);
        let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(evolve(&l, &rho0, 1.0, 0.0).is_err());
        assert!(evolve(&l, &rho0, -1.0, 1e-6).is_err());
        let rho3 = DensityMatrix::basis_state(3, 0).unwrap();
        assert!(evolve(&l, &rho3, 1.0, 1e-6).is_err());
    }
}
