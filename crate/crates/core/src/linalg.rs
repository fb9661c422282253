//! Dense complex linear algebra shared by every other module: validated
//! unitary and Hermitian wrappers, normalized state vectors, the principal
//! logarithm `H = i ln U`, the propagator `exp(-iHT)` and repeated
//! discrete-time stepping.
//!
//! All spectral work goes through Hermitian eigen-decompositions. A unitary
//! is diagonalized through the Hermitian pencil `A + alpha B` built from its
//! commuting Hermitian and anti-Hermitian parts, which always returns an
//! orthonormal eigenbasis, including inside degenerate eigenspaces.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default tolerance for unitarity, Hermiticity and normalization checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenphases closer than this to the branch cut at `-pi` are ambiguous.
pub const BRANCH_CUT_EPS: f64 = 1e-12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Builds a matrix from row slices. Panics on ragged input.
pub fn from_rows(rows: &[Vec<C64>]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute entrywise difference of two equally shaped matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

fn ensure_finite(m: &CMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// `max |M^dagger M - I|`.
pub fn unitarity_residual(m: &CMatrix) -> Result<f64> {
    ensure_square(m)?;
    let g = m.adjoint() * m;
    Ok(max_abs_diff(&g, &identity(m.nrows())))
}

/// `max |H - H^dagger|`.
pub fn hermiticity_residual(m: &CMatrix) -> Result<f64> {
    ensure_square(m)?;
    Ok(max_abs_diff(m, &m.adjoint()))
}

/// True iff `max |M^dagger M - I| <= tol`.
pub fn check_unitary(m: &CMatrix, tol: f64) -> Result<bool> {
    Ok(unitarity_residual(m)? <= tol)
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

/// A square complex matrix certified unitary to within `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
    tolerance: f64,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tolerance: f64) -> Result<Self> {
        ensure_square(&matrix)?;
        ensure_finite(&matrix)?;
        let residual = unitarity_residual(&matrix)?;
        if residual > tolerance {
            return Err(Error::NotUnitary { residual, tolerance });
        }
        Ok(Self { matrix, tolerance })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: identity(n), tolerance: DEFAULT_TOL }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.matrix).expect("square by construction")
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { matrix: self.matrix.adjoint(), tolerance: self.tolerance }
    }

    /// `U^n` by repeated multiplication.
    pub fn pow(&self, n: usize) -> Unitary {
        let mut acc = identity(self.dim());
        for _ in 0..n {
            acc = &self.matrix * acc;
        }
        Unitary { matrix: acc, tolerance: self.tolerance }
    }

    pub fn compose(&self, other: &Unitary) -> Result<Unitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(Unitary { matrix: &self.matrix * &other.matrix, tolerance: self.tolerance.max(other.tolerance) })
    }
}

/// A Hermitian generator together with its time step (`hbar = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
    time_step: f64,
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tolerance: f64) -> Result<Self> {
        ensure_square(&matrix)?;
        ensure_finite(&matrix)?;
        let residual = hermiticity_residual(&matrix)?;
        if residual > tolerance {
            return Err(Error::NotHermitian { residual, tolerance });
        }
        Ok(Self { matrix, time_step: 1.0 })
    }

    pub fn with_time_step(mut self, time_step: f64) -> Self {
        self.time_step = time_step;
        self
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    /// Ascending eigen-energies.
    pub fn energies(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// Ascending eigen-energies with orthonormal eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        hermitian_eigen(&self.matrix)
    }

    /// `<psi|H|psi>`, real for Hermitian `H`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: psi.dim() });
        }
        let a = psi.amplitudes();
        Ok((a.adjoint() * &self.matrix * a)[(0, 0)].re)
    }
}

/// Normalized amplitude vector over an ordered, labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(labels: Vec<String>, amplitudes: CVector) -> Result<Self> {
        if labels.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: labels.len(), actual: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { labels, amplitudes })
    }

    /// Labels the basis `0..n` as decimal strings.
    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        let labels = (0..amplitudes.len()).map(|i| i.to_string()).collect();
        Self::new(labels, amplitudes)
    }

    /// Normalizes `amplitudes` first; fails on the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::from_amplitudes(amplitudes.unscale(norm))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidPort { port: index, dim });
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Self::from_amplitudes(v)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub(crate) fn map(&self, amplitudes: CVector) -> StateVector {
        StateVector { labels: self.labels.clone(), amplitudes }
    }
}

/// Ascending eigenvalues and orthonormal eigenvectors (columns) of a
/// Hermitian matrix. Only the Hermitian part of `m` is used.
///
/// nalgebra's complex tridiagonal QR occasionally returns inaccurate
/// vectors for strongly degenerate spectra, so the result is checked and
/// recomputed with cyclic Jacobi rotations when the residual is too large.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitize(m);
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let (mut values, mut vectors) = (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors);
    let scale = h.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    if eigen_residual(&h, &values, &vectors) > 1e-12 * scale * n.max(1) as f64 {
        (values, vectors) = jacobi_eigen(&h);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    (sorted, vectors)
}

fn eigen_residual(h: &CMatrix, values: &[f64], vectors: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, &e) in values.iter().enumerate() {
        let v = vectors.column(j);
        worst = worst.max((h * v - v * c(e, 0.0)).camax());
    }
    worst
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
fn jacobi_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n, n);
    let total = a.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= 1e-32 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                // Phase on column q makes a_pq real and positive.
                let ph = C64::from_polar(1.0, -apq.arg());
                for i in 0..n {
                    a[(i, q)] *= ph;
                    v[(i, q)] *= ph;
                }
                for j in 0..n {
                    a[(q, j)] *= ph.conj();
                }
                let r = a[(p, q)].re;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                for i in 0..n {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = x * cs - y * sn;
                    a[(i, q)] = x * sn + y * cs;
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x * cs - y * sn;
                    v[(i, q)] = x * sn + y * cs;
                }
                for j in 0..n {
                    let (x, y) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = x * cs - y * sn;
                    a[(q, j)] = x * sn + y * cs;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Spectral decomposition of a unitary: eigenvalues on the unit circle and
/// an orthonormal eigenbasis (columns), in no particular order.
pub fn unitary_eigen_raw(u: &Unitary) -> Result<(Vec<C64>, CMatrix)> {
    let m = u.matrix();
    let n = u.dim();
    let herm = (m + m.adjoint()).unscale(2.0);
    let anti = (m - m.adjoint()) * c(0.0, -0.5);
    // Mixing weights for the pencil; a later one is tried only when an
    // accidental degeneracy of the pencil spoils the residual.
    const ALPHAS: [f64; 4] =
        [0.577_215_664_901_532_9, 1.618_033_988_749_895, -std::f64::consts::FRAC_1_PI, std::f64::consts::E];
    let scale = 1e-9 * (n as f64).max(1.0);
    let mut best = f64::INFINITY;
    for alpha in ALPHAS {
        let pencil = &herm + &anti * c(alpha, 0.0);
        let (_, vecs) = hermitian_eigen(&pencil);
        let values: Vec<C64> = (0..n)
            .map(|j| {
                let v = vecs.column(j);
                let z = (v.adjoint() * m * v)[(0, 0)];
                z / z.norm()
            })
            .collect();
        let lambda = CMatrix::from_diagonal(&CVector::from_vec(values.clone()));
        let residual = max_abs_diff(&(m * &vecs), &(&vecs * lambda));
        if residual <= scale {
            return Ok((values, vecs));
        }
        best = best.min(residual);
    }
    Err(Error::EigenFailure { residual: best })
}

/// Eigenphase in `(-pi, pi]`, folding values within `BRANCH_CUT_EPS` of
/// `-pi` onto `+pi`.
pub fn eigenphase(z: C64) -> f64 {
    let phase = z.arg();
    if phase <= -PI + BRANCH_CUT_EPS {
        PI
    } else {
        phase
    }
}

/// Multiplies by the phase that makes the largest-magnitude entry real and
/// positive. Magnitude ties within `1e-12` go to the earliest entry.
pub fn phase_align_vec(v: &CVector) -> CVector {
    match pivot_index(v.iter()) {
        Some(k) => {
            let z = v[k];
            v * (z.conj() / z.norm())
        }
        None => v.clone(),
    }
}

/// Matrix version of [`phase_align_vec`]; entries are scanned row-major.
pub fn phase_align(m: &CMatrix) -> CMatrix {
    let t = m.transpose();
    match pivot_index(t.iter()) {
        Some(k) => {
            let z = t[k];
            m * (z.conj() / z.norm())
        }
        None => m.clone(),
    }
}

fn pivot_index<'a>(entries: impl Iterator<Item = &'a C64>) -> Option<usize> {
    let mags: Vec<f64> = entries.map(|z| z.norm()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    mags.iter().position(|&m| m >= max - 1e-12)
}

/// True when `a = e^{i chi} b` entrywise to `tol` for some global phase.
///
/// The phase is fixed by aligning the largest-magnitude entry of `b`.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    global_phase_distance(a, b).is_some_and(|d| d <= tol)
}

/// `min_chi max |a - e^{i chi} b|` evaluated at the pivot-determined phase.
pub fn global_phase_distance(a: &CMatrix, b: &CMatrix) -> Option<f64> {
    if a.shape() != b.shape() {
        return None;
    }
    let bt = b.transpose();
    let at = a.transpose();
    let k = pivot_index(bt.iter())?;
    let (za, zb) = (at[k], bt[k]);
    if za.norm() == 0.0 {
        return Some(max_abs_diff(a, b));
    }
    let phase = (za / zb) / (za / zb).norm();
    Some(max_abs_diff(a, &(b * phase)))
}

pub fn vec_equal_up_to_phase(a: &CVector, b: &CVector, tol: f64) -> bool {
    let am = CMatrix::from_column_slice(a.len(), 1, a.as_slice());
    let bm = CMatrix::from_column_slice(b.len(), 1, b.as_slice());
    equal_up_to_phase(&am, &bm, tol)
}

/// How to treat eigenphases that sit on the branch cut at `-pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// Report a [`Error::BranchCut`].
    #[default]
    Strict,
    /// Map the ambiguous eigenphase to `+pi`.
    PositivePi,
}

/// `H = (i/T) ln U` with eigenphases in `(-pi, pi]` and the default time
/// step `T = 1`.
pub fn principal_log_hamiltonian(u: &Unitary) -> Result<Hamiltonian> {
    principal_log_hamiltonian_with(u, 1.0, BranchPolicy::Strict)
}

pub fn principal_log_hamiltonian_with(u: &Unitary, time_step: f64, policy: BranchPolicy) -> Result<Hamiltonian> {
    if !(time_step.is_finite() && time_step > 0.0) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {time_step}")));
    }
    // the wrapper may have been certified with a looser tolerance
    let residual = u.residual();
    if residual > DEFAULT_TOL {
        return Err(Error::NotUnitary { residual, tolerance: DEFAULT_TOL });
    }
    let (values, vecs) = unitary_eigen_raw(u)?;
    let mut energies = Vec::with_capacity(values.len());
    for z in values {
        let phase = z.arg();
        let on_cut = phase <= -PI + BRANCH_CUT_EPS || phase >= PI - BRANCH_CUT_EPS;
        let theta = if on_cut {
            match policy {
                BranchPolicy::Strict => return Err(Error::BranchCut { phase }),
                BranchPolicy::PositivePi => PI,
            }
        } else {
            phase
        };
        // U = e^{-iHT}: eigenvalue e^{i theta} <-> energy -theta / T
        energies.push(-theta / time_step);
    }
    let d = CMatrix::from_diagonal(&CVector::from_iterator(energies.len(), energies.iter().map(|&e| c(e, 0.0))));
    let h = hermitize(&(&vecs * d * vecs.adjoint()));
    Ok(Hamiltonian::new(h)?.with_time_step(time_step))
}

/// `V = exp(-i H T)` by diagonalization of `H`.
pub fn exp_evolution(h: &Hamiltonian, t: f64) -> Result<Unitary> {
    let residual = hermiticity_residual(h.matrix())?;
    if residual > DEFAULT_TOL {
        return Err(Error::NotHermitian { residual, tolerance: DEFAULT_TOL });
    }
    let (energies, vecs) = h.eigen();
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        energies.len(),
        energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    ));
    Unitary::new(&vecs * d * vecs.adjoint())
}

/// `U^n psi0`, applied step by step.
pub fn evolve(u: &Unitary, psi0: &StateVector, n: usize) -> Result<StateVector> {
    if u.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), actual: psi0.dim() });
    }
    let mut amps = psi0.amplitudes().clone();
    for _ in 0..n {
        amps = u.matrix() * amps;
    }
    Ok(psi0.map(amps))
}

/// Lexicographic comparison of complex vectors, real part before imaginary
/// part, with entries closer than `tol` treated as equal.
pub fn lex_cmp(a: &CVector, b: &CVector, tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > tol {
                return p.total_cmp(&q);
            }
        }
    }
    Ordering::Equal
}

/// Deterministic orthonormal basis of the span of the orthonormal columns
/// of `vecs`: pivoted
/// Gram-Schmidt on the projector's columns, smallest index first on ties.
pub fn canonical_basis(vecs: &CMatrix) -> CMatrix {
    let n = vecs.nrows();
    let r = vecs.ncols();
    let proj = vecs * vecs.adjoint();
    let mut chosen: Vec<CVector> = Vec::with_capacity(r);
    for _ in 0..r {
        let residuals: Vec<CVector> = (0..n)
            .map(|i| {
                let mut w = proj.column(i).into_owned();
                for q in &chosen {
                    let overlap = q.dotc(&w);
                    w -= q * overlap;
                }
                w
            })
            .collect();
        let norms: Vec<f64> = residuals.iter().map(|w| w.norm()).collect();
        let max = norms.iter().copied().fold(0.0, f64::max);
        let k = norms.iter().position(|&x| x >= max - 1e-9).unwrap_or(0);
        let mut w = residuals[k].clone();
        // second pass keeps orthogonality at machine precision
        for q in &chosen {
            let overlap = q.dotc(&w);
            w -= q * overlap;
        }
        let w = w.unscale(w.norm());
        chosen.push(phase_align_vec(&w));
    }
    CMatrix::from_columns(&chosen)
}
