//! Pauli and Gell-Mann expansions of 2x2 and 3x3 Hermitian matrices.
//!
//! Coefficients come from trace inner products: `d0 = tr(H)/n` and
//! `d_j = tr(H L_j)/2`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs_diff, CMatrix, C64, DEFAULT_TOL};

fn mat3(entries: [(usize, usize, C64); 2]) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    for (i, j, z) in entries {
        m[(i, j)] = z;
    }
    m
}

/// Gell-Mann matrix `L_j`, `j` in `1..=8`. `L_7` is the Hermitian
/// `[[0,0,0],[0,0,-i],[0,i,0]]`; see [`gell_mann_printed`].
pub fn gell_mann(j: usize) -> Result<CMatrix> {
    let (one, i) = (c(1.0, 0.0), c(0.0, 1.0));
    Ok(match j {
        1 => mat3([(0, 1, one), (1, 0, one)]),
        2 => mat3([(0, 1, -i), (1, 0, i)]),
        3 => mat3([(0, 0, one), (1, 1, -one)]),
        4 => mat3([(0, 2, one), (2, 0, one)]),
        5 => mat3([(0, 2, -i), (2, 0, i)]),
        6 => mat3([(1, 2, one), (2, 1, one)]),
        7 => mat3([(1, 2, -i), (2, 1, i)]),
        8 => {
            let s = 1.0 / 3f64.sqrt();
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(s, 0.0), c(s, 0.0), c(-2.0 * s, 0.0)]))
        }
        _ => return Err(Error::InvalidParameter(format!("Gell-Mann index must be 1..=8, got {j}"))),
    })
}

/// The set as printed, where `L_7 = [[0,0,0],[0,0,i],[0,i,0]]` is not Hermitian.
pub fn gell_mann_printed(j: usize) -> Result<CMatrix> {
    if j == 7 {
        let i = c(0.0, 1.0);
        return Ok(mat3([(1, 2, i), (2, 1, i)]));
    }
    gell_mann(j)
}

/// Pauli matrix for `a` in `1..=3` (x, y, z).
pub fn pauli(a: usize) -> Result<CMatrix> {
    let (o, one, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    Ok(match a {
        1 => CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        2 => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        3 => CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        _ => return Err(Error::InvalidParameter(format!("Pauli index must be 1..=3, got {a}"))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliCoefficients {
    pub d0: f64,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GellMannCoefficients {
    pub d0: f64,
    /// `d[j-1]` multiplies `L_j`.
    pub d: [f64; 8],
}

impl GellMannCoefficients {
    /// Coefficient of `L_j`; `j = 0` gives `d0`.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            self.d0
        } else {
            self.d[j - 1]
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.d.iter().zip(&other.d).map(|(a, b)| (a - b).abs()).fold((self.d0 - other.d0).abs(), f64::max)
    }
}

fn check_hermitian(h: &CMatrix, n: usize) -> Result<()> {
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if h.nrows() != n { h.nrows() } else { h.ncols() },
        });
    }
    let residual = max_abs_diff(h, &h.adjoint());
    if residual > DEFAULT_TOL {
        return Err(Error::NotHermitian { residual, tolerance: DEFAULT_TOL });
    }
    Ok(())
}

fn half_trace(h: &CMatrix, g: &CMatrix) -> f64 {
    (h * g).trace().re / 2.0
}

pub fn su3_decompose(h: &CMatrix) -> Result<GellMannCoefficients> {
    check_hermitian(h, 3)?;
    let mut d = [0.0; 8];
    for (j, dj) in d.iter_mut().enumerate() {
        *dj = half_trace(h, &gell_mann(j + 1)?);
    }
    Ok(GellMannCoefficients { d0: h.trace().re / 3.0, d })
}

pub fn su3_reconstruct(coef: &GellMannCoefficients) -> CMatrix {
    let mut m = CMatrix::identity(3, 3) * c(coef.d0, 0.0);
    for (j, dj) in coef.d.iter().enumerate() {
        m += gell_mann(j + 1).expect("index in range") * c(*dj, 0.0);
    }
    m
}

pub fn su2_decompose(h: &CMatrix) -> Result<PauliCoefficients> {
    check_hermitian(h, 2)?;
    Ok(PauliCoefficients {
        d0: h.trace().re / 2.0,
        dx: half_trace(h, &pauli(1)?),
        dy: half_trace(h, &pauli(2)?),
        dz: half_trace(h, &pauli(3)?),
    })
}

pub fn su2_reconstruct(p: &PauliCoefficients) -> CMatrix {
    CMatrix::identity(2, 2) * c(p.d0, 0.0)
        + pauli(1).unwrap() * c(p.dx, 0.0)
        + pauli(2).unwrap() * c(p.dy, 0.0)
        + pauli(3).unwrap() * c(p.dz, 0.0)
}

/// Printed expansion
/// `(1/3){(1 - (4 sqrt2/3) cos k) I + sqrt2[L8/sqrt3 - L3 - (1+cos k)(L1+L6) + sin k (L2-L7)]}`.
pub fn appendix_coefficients(k: f64) -> GellMannCoefficients {
    let s = SQRT_2 / 3.0;
    let hop = -s * (1.0 + k.cos());
    let mut d = [0.0; 8];
    d[0] = hop;
    d[1] = s * k.sin();
    d[2] = -s;
    d[5] = hop;
    d[6] = -s * k.sin();
    d[7] = s / 3f64.sqrt();
    GellMannCoefficients { d0: (1.0 - 4.0 * SQRT_2 / 3.0 * k.cos()) / 3.0, d }
}

/// One row of a coefficient export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub k: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
    pub d7: f64,
    pub d8: f64,
}

impl CoefficientRecord {
    pub fn new(k: f64, g: &GellMannCoefficients) -> Self {
        let d = g.d;
        Self { k, d0: g.d0, d1: d[0], d2: d[1], d3: d[2], d4: d[3], d5: d[4], d6: d[5], d7: d[6], d8: d[7] }
    }
}

pub fn coefficients_json(records: &[CoefficientRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}
