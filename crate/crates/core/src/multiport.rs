//! Closed-form multiport transition matrices and their exit statistics.
//!
//! Ports are zero-based. For the three-port the letter labels alias as
//! `A = 0`, `B = 1`, `C = 2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, canonical_basis, eigenphase, lex_cmp, unitary_eigen_raw, CMatrix, CVector, StateVector, Unitary, C64,
    DEFAULT_TOL,
};
use crate::scattering::{build_unbiased_multiport, effective_smatrix, CalibrationProfile};

/// Which transition matrix a multiport realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiportKind {
    Grover,
    StrictThree,
    /// Solved from the internal beam-splitter ring with explicit vertex phases.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiportSpec {
    pub n: usize,
    pub kind: MultiportKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_phases: Option<Vec<f64>>,
}

impl MultiportSpec {
    pub fn grover(n: usize) -> Self {
        Self { n, kind: MultiportKind::Grover, vertex_phases: None }
    }

    pub fn strict_three() -> Self {
        Self { n: 3, kind: MultiportKind::StrictThree, vertex_phases: None }
    }

    pub fn custom(vertex_phases: Vec<f64>) -> Self {
        Self { n: vertex_phases.len(), kind: MultiportKind::Custom, vertex_phases: Some(vertex_phases) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("multiport needs at least 2 ports, got {}", self.n)));
        }
        match self.kind {
            MultiportKind::StrictThree if self.n != 3 => {
                Err(Error::InvalidParameter(format!("strict_three requires n = 3, got {}", self.n)))
            }
            MultiportKind::Custom => match &self.vertex_phases {
                Some(p) if p.len() == self.n && p.iter().all(|x| x.is_finite()) => Ok(()),
                Some(p) => Err(Error::InvalidParameter(format!(
                    "custom multiport needs {} finite vertex phases, got {}",
                    self.n,
                    p.len()
                ))),
                None => Err(Error::InvalidParameter("custom multiport needs vertex_phases".into())),
            },
            _ => Ok(()),
        }
    }

    pub fn unitary(&self) -> Result<Unitary> {
        self.validate()?;
        match self.kind {
            MultiportKind::Grover => grover_unitary(self.n),
            MultiportKind::StrictThree => Ok(strict_three_port()),
            MultiportKind::Custom => {
                let phases = self.vertex_phases.as_deref().expect("validated");
                effective_smatrix(&build_unbiased_multiport(phases, &CalibrationProfile::GROVER)?)
            }
        }
    }
}

/// Parses `A`/`B`/`C` (case-insensitive) or a decimal port index.
pub fn parse_port(label: &str) -> Option<usize> {
    match label.trim() {
        "A" | "a" => Some(0),
        "B" | "b" => Some(1),
        "C" | "c" => Some(2),
        s => s.parse().ok(),
    }
}

/// The `n`-port Grover coin `(-i/n) [(n-2) on the diagonal, -2 elsewhere]`.
///
/// `n = 2` is accepted and gives the swap `i X`.
pub fn grover_unitary(n: usize) -> Result<Unitary> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("grover_unitary needs n >= 2, got {n}")));
    }
    let scale = c(0.0, -1.0 / n as f64);
    let diag = scale * (n as f64 - 2.0);
    let off = scale * -2.0;
    let m = CMatrix::from_fn(n, n, |i, j| if i == j { diag } else { off });
    Unitary::new(m)
}

/// Three-port with vertex phases that equalize all exit probabilities.
pub fn strict_three_port() -> Unitary {
    let w = C64::from_polar(1.0, -2.0 * PI / 3.0);
    let prefactor = C64::from_polar(1.0 / 3f64.sqrt(), 2.0 * PI / 3.0);
    let m = CMatrix::from_fn(3, 3, |i, j| prefactor * if i == j { w } else { c(1.0, 0.0) });
    Unitary::new(m).expect("strict three-port is unitary")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitDistribution {
    pub input_port: usize,
    pub probabilities: Vec<f64>,
}

impl ExitDistribution {
    pub fn new(input_port: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
            return Err(Error::InvalidParameter("probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { input_port, probabilities })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// Squared magnitudes of column `port` of `u`.
pub fn exit_probabilities(u: &Unitary, port: usize) -> Result<ExitDistribution> {
    if port >= u.dim() {
        return Err(Error::InvalidPort { port, dim: u.dim() });
    }
    let probabilities = u.matrix().column(port).iter().map(|z| z.norm_sqr()).collect();
    ExitDistribution::new(port, probabilities)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: C64,
    /// Eigenphase in `(-pi, pi]`.
    pub phase: f64,
    pub vector: StateVector,
}

/// Complete orthonormal eigen-system of a unitary, ascending in eigenphase.
///
/// Inside a degenerate eigenspace the basis is canonicalized (pivoted
/// Gram-Schmidt, phase-aligned) and then ordered lexicographically, so the
/// output does not depend on the solver's internal basis choice.
pub fn eigensystem(u: &Unitary) -> Result<Vec<Eigenpair>> {
    let residual = u.residual();
    if residual > DEFAULT_TOL {
        return Err(Error::NotUnitary { residual, tolerance: DEFAULT_TOL });
    }
    let (values, vecs) = unitary_eigen_raw(u)?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigenphase(values[a]).total_cmp(&eigenphase(values[b])));

    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let anchor = values[order[start]];
        let mut end = start + 1;
        while end < n && (values[order[end]] - anchor).norm() < 1e-8 {
            end += 1;
        }
        let cols: Vec<CVector> = order[start..end].iter().map(|&i| vecs.column(i).into_owned()).collect();
        let basis = canonical_basis(&CMatrix::from_columns(&cols));
        let mut members: Vec<CVector> = basis.column_iter().map(|v| v.into_owned()).collect();
        members.sort_by(|a, b| lex_cmp(a, b, 1e-9));
        for v in members {
            let value = (v.adjoint() * u.matrix() * &v)[(0, 0)];
            let value = value / value.norm();
            out.push(Eigenpair { value, phase: eigenphase(value), vector: StateVector::from_amplitudes(v)? });
        }
        start = end;
    }
    Ok(out)
}
