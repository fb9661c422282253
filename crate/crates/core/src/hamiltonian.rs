//! Hamiltonians built from multiport transition matrices: the three-site
//! ring, time-reversal doubling and the beam-splitter example.
//!
//! Site indices are zero-based and taken mod `N`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, Hamiltonian, StateVector, Unitary, C64, DEFAULT_TOL};
use crate::scattering::beam_splitter_2x2;

/// `(pi/6) [[1,-2,-2],[-2,1,-2],[-2,-2,1]]`, equal to `i ln U` for the
/// three-port Grover coin.
pub fn three_point_hamiltonian() -> Hamiltonian {
    ring_site_hamiltonian(3).expect("three sites")
}

/// Nearest-neighbour ring operator
/// `(pi/6) sum_m [ |m><m| - 2 (|m+1><m| + |m><m+1|) ]` on `n` sites.
pub fn ring_site_hamiltonian(n: usize) -> Result<Hamiltonian> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("ring needs at least 3 sites, got {n}")));
    }
    let mut h = CMatrix::zeros(n, n);
    let w = PI / 6.0;
    for m in 0..n {
        let next = (m + 1) % n;
        h[(m, m)] += c(w, 0.0);
        h[(next, m)] += c(-2.0 * w, 0.0);
        h[(m, next)] += c(-2.0 * w, 0.0);
    }
    Hamiltonian::new(h)
}

/// Quasi-energy of the three-site ring at quasi-momentum `k`.
pub fn three_point_dispersion(k: f64) -> f64 {
    PI / 6.0 * (1.0 - 4.0 * k.cos())
}

/// Plane wave `e^{imk}/sqrt(N)` on an `N`-site ring.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub k: f64,
    pub sites: usize,
    pub vector: StateVector,
}

/// Index `n` with `k = 2 pi n / sites` (mod `sites`), if `k` is on the grid.
pub fn momentum_index(k: f64, sites: usize) -> Option<usize> {
    let x = k * sites as f64 / (2.0 * PI);
    let n = x.round();
    ((x - n).abs() < 1e-9).then(|| n.rem_euclid(sites as f64) as usize)
}

pub fn momentum_state(k: f64, sites: usize) -> Result<MomentumState> {
    if sites == 0 {
        return Err(Error::InvalidParameter("momentum state needs at least one site".into()));
    }
    if !k.is_finite() || momentum_index(k, sites).is_none() {
        return Err(Error::OffGrid { k, sites });
    }
    let norm = 1.0 / (sites as f64).sqrt();
    let amps = CVector::from_iterator(sites, (0..sites).map(|m| C64::from_polar(norm, m as f64 * k)));
    Ok(MomentumState { k, sites, vector: StateVector::from_amplitudes(amps)? })
}

/// `[[0, U^dagger], [U, 0]]`: Hermitian, unitary and an involution.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversedHamiltonian {
    pub inner: Hamiltonian,
    /// Dimension `d` of the forward block; the operator is `2d x 2d`.
    pub block_dim: usize,
}

impl ReversedHamiltonian {
    pub fn matrix(&self) -> &CMatrix {
        self.inner.matrix()
    }

    /// `V = I cos T - i H sin T`, valid because `H^2 = I`.
    pub fn propagator_closed_form(&self, t: f64) -> Unitary {
        let n = self.inner.dim();
        let m = CMatrix::identity(n, n) * c(t.cos(), 0.0) - self.inner.matrix() * c(0.0, t.sin());
        Unitary::new(m).expect("involutive Hermitian generator gives a unitary")
    }
}

pub fn reversible_double(u: &Unitary) -> Result<ReversedHamiltonian> {
    let residual = u.residual();
    if residual > DEFAULT_TOL {
        return Err(Error::NotUnitary { residual, tolerance: DEFAULT_TOL });
    }
    let d = u.dim();
    let mut h = CMatrix::zeros(2 * d, 2 * d);
    h.view_mut((0, d), (d, d)).copy_from(&u.matrix().adjoint());
    h.view_mut((d, 0), (d, d)).copy_from(u.matrix());
    Ok(ReversedHamiltonian { inner: Hamiltonian::new(h)?, block_dim: d })
}

/// `(1/sqrt 2) [[1, i], [i, 1]]`.
pub fn beamsplitter_2() -> Unitary {
    Unitary::new(beam_splitter_2x2()).expect("splitter is unitary")
}

/// The splitter with all four ports usable in both directions.
pub fn beamsplitter_4() -> Unitary {
    let h = reversible_double(&beamsplitter_2()).expect("unitary input");
    Unitary::new(h.inner.into_matrix()).expect("doubled splitter is unitary")
}
