//! Periodic chain of three-port multiports in the directed-edge basis
//! `|m, j, D>`, its projection onto direction-blind states `|m, j>`, Bloch
//! Hamiltonians and band analysis.
//!
//! Internal states are ordered `(+1, 0, -1)` everywhere, matching the
//! printed momentum-space matrix. Within a full-chain cell `L` precedes `R`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigen, hermitize, max_abs_diff, CMatrix, CVector, C64};
use crate::su3::{appendix_coefficients, su3_reconstruct};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainLabel {
    pub m: usize,
    pub j: i8,
    pub dir: Direction,
}

impl ChainLabel {
    pub fn new(m: usize, j: i8, dir: Direction) -> Self {
        Self { m, j, dir }
    }
}

impl std::fmt::Display for ChainLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|{},{},{:?}>", self.m, self.j, self.dir)
    }
}

/// Position of branch `j` in the `(+1, 0, -1)` ordering.
pub fn branch_slot(j: i8) -> usize {
    debug_assert!((-1..=1).contains(&j));
    (1 - j as i64) as usize
}

fn slot_branch(s: usize) -> i8 {
    1 - s as i8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainSpace {
    /// `6N` states `|m, j, D>`.
    Full,
    /// `3N` states `|m, j>`.
    Projected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub sites: usize,
    pub space: ChainSpace,
    pub matrix: CMatrix,
    /// Hermiticity residual of the assembled terms before symmetrizing.
    pub raw_hermiticity_residual: f64,
}

impl ChainOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn cell(&self) -> usize {
        match self.space {
            ChainSpace::Full => 6,
            ChainSpace::Projected => 3,
        }
    }

    pub fn full_index(sites: usize, label: ChainLabel) -> usize {
        ((label.m % sites) * 3 + branch_slot(label.j)) * 2 + usize::from(label.dir == Direction::R)
    }

    pub fn projected_index(sites: usize, m: usize, j: i8) -> usize {
        (m % sites) * 3 + branch_slot(j)
    }

    /// Label of a full-chain basis index.
    pub fn full_label(i: usize) -> ChainLabel {
        let dir = if i.is_multiple_of(2) { Direction::L } else { Direction::R };
        let cell = i / 2;
        ChainLabel::new(cell / 3, slot_branch(cell % 3), dir)
    }

    /// One-site translation `|m, ...> -> |m+1, ...>` on this operator's space.
    pub fn shift_operator(&self) -> CMatrix {
        let n = self.dim();
        let cell = self.cell();
        let mut s = CMatrix::zeros(n, n);
        for i in 0..n {
            s[((i + cell) % n, i)] = c(1.0, 0.0);
        }
        s
    }

    /// `max |[H, S]|` for the one-site shift `S`.
    pub fn translation_residual(&self) -> f64 {
        let s = self.shift_operator();
        max_abs_diff(&(&self.matrix * &s), &(&s * &self.matrix))
    }
}

/// One printed term `coef |ket><bra|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainTerm {
    pub coef: f64,
    pub ket: ChainLabel,
    pub bra: ChainLabel,
}

/// Every term of the chain Hamiltonian as printed, for sites `0..sites`,
/// site arithmetic mod `sites`.
pub fn chain_terms(sites: usize) -> Vec<ChainTerm> {
    use Direction::{L, R};
    let mut out = Vec::with_capacity(sites * 18);
    let n = sites as i64;
    for m in 0..sites {
        let at = |dm: i64, j: i8, d: Direction| ChainLabel::new((m as i64 + dm).rem_euclid(n) as usize, j, d);
        let mut push = |coef: f64, ket: ChainLabel, bra: ChainLabel| out.push(ChainTerm { coef, ket, bra });
        for j in [1, 0, -1] {
            push(1.0 / 3.0, at(0, j, R), at(0, j, L));
            push(1.0 / 3.0, at(0, j, L), at(0, j, R));
        }
        let t = -2.0 / 3.0;
        push(t, at(0, 1, R), at(0, 0, L));
        push(t, at(0, 0, R), at(0, 1, L));
        push(t, at(0, -1, R), at(0, 0, R));
        push(t, at(0, 0, L), at(0, -1, L));
        push(t, at(-1, 1, L), at(0, 0, L));
        push(t, at(-1, -1, L), at(0, 0, R));
        push(t, at(-1, 1, L), at(0, 1, L));
        push(t, at(-1, -1, L), at(0, -1, L));
        push(t, at(1, 1, R), at(0, 1, R));
        push(t, at(1, 0, R), at(0, 1, R));
        push(t, at(1, -1, R), at(0, -1, R));
        push(t, at(1, 0, L), at(0, -1, R));
    }
    out
}

/// The printed terms summed into a `6N x 6N` matrix, not symmetrized.
pub fn raw_full_chain(sites: usize) -> Result<CMatrix> {
    if sites < 2 {
        return Err(Error::InvalidParameter(format!("chain needs at least 2 sites, got {sites}")));
    }
    let mut h = CMatrix::zeros(6 * sites, 6 * sites);
    for t in chain_terms(sites) {
        let (r, col) = (ChainOperator::full_index(sites, t.ket), ChainOperator::full_index(sites, t.bra));
        h[(r, col)] += c(t.coef, 0.0);
    }
    Ok(h)
}

/// The chain Hamiltonian on `6N` directed-edge states, symmetrized as
/// `(H + H^dagger)/2`.
pub fn build_full_chain(sites: usize) -> Result<ChainOperator> {
    let raw = raw_full_chain(sites)?;
    Ok(ChainOperator {
        sites,
        space: ChainSpace::Full,
        raw_hermiticity_residual: herm_residual(&raw),
        matrix: hermitize(&raw),
    })
}

/// Isometry `|m, j> -> (|m, j, L> + |m, j, R>)/sqrt 2`.
pub fn projector(sites: usize) -> CMatrix {
    let mut p = CMatrix::zeros(6 * sites, 3 * sites);
    let w = c(1.0 / SQRT_2, 0.0);
    for col in 0..3 * sites {
        p[(2 * col, col)] = w;
        p[(2 * col + 1, col)] = w;
    }
    p
}

pub fn project_chain(full: &ChainOperator) -> Result<ChainOperator> {
    if full.space != ChainSpace::Full || full.dim() != 6 * full.sites {
        return Err(Error::DimensionMismatch { expected: 6 * full.sites, actual: full.dim() });
    }
    let p = projector(full.sites);
    let h = p.adjoint() * &full.matrix * &p;
    Ok(ChainOperator {
        sites: full.sites,
        space: ChainSpace::Projected,
        raw_hermiticity_residual: herm_residual(&h),
        matrix: hermitize(&h),
    })
}

/// The printed momentum-space matrix with prefactor `1/3`, basis `(+1, 0, -1)`.
pub fn bloch_hamiltonian(k: f64) -> CMatrix {
    let r = 2.0 * SQRT_2;
    let d = 1.0 - r * k.cos();
    let h = -r * (k / 2.0).cos();
    let up = C64::from_polar(h, k / 2.0);
    let dn = C64::from_polar(h, -k / 2.0);
    let z = c(0.0, 0.0);
    let m = CMatrix::from_row_slice(3, 3, &[c(d, 0.0), up, z, dn, c(1.0, 0.0), dn, z, up, c(d, 0.0)]);
    m / c(3.0, 0.0)
}

/// Bloch Hamiltonian of a projected chain, `b(k) = sum_D e^{-ikD} H[(D, .), (0, .)]`.
///
/// Hopping blocks are stored at signed distances, so `at` interpolates
/// between grid momenta whenever the range is shorter than half the ring.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBloch {
    pub sites: usize,
    pub blocks: Vec<(i64, CMatrix)>,
}

impl ChainBloch {
    pub fn new(projected: &ChainOperator) -> Result<Self> {
        if projected.space != ChainSpace::Projected {
            return Err(Error::InvalidParameter("Bloch blocks need the projected chain".into()));
        }
        let n = projected.sites;
        let mut blocks = Vec::new();
        for d in 0..n {
            let block = projected.matrix.view((3 * d, 0), (3, 3)).into_owned();
            if block.iter().any(|z| z.norm() > 0.0) {
                let signed = if d > n / 2 { d as i64 - n as i64 } else { d as i64 };
                blocks.push((signed, block));
            }
        }
        blocks.sort_by_key(|(d, _)| *d);
        Ok(Self { sites: n, blocks })
    }

    pub fn at(&self, k: f64) -> CMatrix {
        let mut b = CMatrix::zeros(3, 3);
        for (d, block) in &self.blocks {
            b += block * C64::from_polar(1.0, -k * *d as f64);
        }
        b
    }
}

/// `(E1, E2, E3)` in their printed labelling, not sorted.
pub fn band_energies_closed_form(k: f64) -> [f64; 3] {
    let r = 2.0 * SQRT_2;
    [(1.0 - r * k.cos()) / 3.0, (1.0 - r * (1.0 - k.cos())) / 3.0, (1.0 + r) / 3.0]
}

/// The printed band vectors before normalization.
pub fn printed_band_vectors(k: f64) -> [CVector; 3] {
    let r = 2.0 * SQRT_2;
    let v = |a: f64, b: f64, d: f64| CVector::from_vec(vec![c(a, 0.0), c(b, 0.0), c(d, 0.0)]);
    [v(-1.0, 0.0, 1.0), v(1.0, -r, 1.0), v(-1.0, r * (1.0 + k.cos()), 1.0)]
}

/// Printed band vectors, normalized. They are reproduced as printed and are
/// neither mutually orthogonal nor eigenvectors of [`bloch_hamiltonian`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedEigenvectors {
    pub vectors: [CVector; 3],
    pub tag: &'static str,
}

pub fn band_eigenvectors_closed_form(k: f64) -> PrintedEigenvectors {
    let vectors = printed_band_vectors(k).map(|v| {
        let n = v.norm();
        v / c(n, 0.0)
    });
    PrintedEigenvectors { vectors, tag: "as-printed, unverified" }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandSource {
    /// Printed closed-form energies.
    ClosedForm,
    /// Eigenvalues of [`bloch_hamiltonian`].
    Numerical,
    /// Bloch blocks of the projected chain built term by term; the ring has
    /// as many sites as samples.
    Chain,
    /// Externally supplied data; no re-evaluation between samples.
    Tabulated,
}

impl BandSource {
    pub fn as_str(self) -> &'static str {
        match self {
            BandSource::ClosedForm => "closed_form",
            BandSource::Numerical => "numerical",
            BandSource::Chain => "chain",
            BandSource::Tabulated => "tabulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub k_grid: Vec<f64>,
    /// Ascending per k.
    pub energies: Vec<[f64; 3]>,
    /// Band labels followed across k: printed labels for the closed form,
    /// eigenvector-overlap continuity otherwise.
    pub tracked: Vec<[f64; 3]>,
    /// Orthonormal eigenvectors as columns, ascending; absent for the
    /// closed form, whose printed vectors are not orthonormal.
    pub eigenvectors: Option<Vec<CMatrix>>,
    pub provenance: BandSource,
}

impl BandStructure {
    pub fn len(&self) -> usize {
        self.k_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_grid.is_empty()
    }

    /// Smallest `|tracked[b] - tracked[a]|` over the grid.
    pub fn min_gap(&self, a: usize, b: usize) -> f64 {
        self.tracked.iter().map(|e| (e[b] - e[a]).abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,E1,E2,E3,source\n");
        for (k, e) in self.k_grid.iter().zip(&self.energies) {
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e},{}", k, e[0], e[1], e[2], self.provenance.as_str());
        }
        s
    }
}

fn herm_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

fn sorted3(mut e: [f64; 3]) -> [f64; 3] {
    e.sort_by(f64::total_cmp);
    e
}

fn eig3(m: &CMatrix) -> ([f64; 3], CMatrix) {
    let (vals, vecs) = hermitian_eigen(m);
    ([vals[0], vals[1], vals[2]], vecs)
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
const DEGENERATE_TOL: f64 = 1e-9;

fn track(values: &[[f64; 3]], vectors: &[CMatrix]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<CMatrix> = None;
    for (vals, vecs) in values.iter().zip(vectors) {
        let degenerate = vals.windows(2).any(|w| w[1] - w[0] < DEGENERATE_TOL);
        let perm = match (&prev, degenerate) {
            (Some(p), false) => {
                let overlap = p.adjoint() * vecs;
                let score = |perm: &[usize; 3]| (0..3).map(|b| overlap[(b, perm[b])].norm_sqr()).sum::<f64>();
                let mut best = PERMS[0];
                let mut best_score = score(&best);
                for perm in &PERMS[1..] {
                    let s = score(perm);
                    if s > best_score + 1e-12 {
                        best = *perm;
                        best_score = s;
                    }
                }
                best
            }
            _ => PERMS[0],
        };
        out.push([vals[perm[0]], vals[perm[1]], vals[perm[2]]]);
        let mut cur = CMatrix::zeros(3, 3);
        for (b, &p) in perm.iter().enumerate() {
            cur.set_column(b, &vecs.column(p));
        }
        prev = Some(cur);
    }
    out
}

/// `k_n = 2 pi n / samples` for `n = 0..samples`.
pub fn k_grid(samples: usize) -> Vec<f64> {
    (0..samples).map(|n| 2.0 * PI * n as f64 / samples as f64).collect()
}

pub fn band_structure(source: BandSource, samples: usize) -> Result<BandStructure> {
    if samples < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 samples, got {samples}")));
    }
    let ks = k_grid(samples);
    match source {
        BandSource::ClosedForm => {
            let tracked: Vec<_> = ks.iter().map(|&k| band_energies_closed_form(k)).collect();
            Ok(BandStructure {
                energies: tracked.iter().map(|e| sorted3(*e)).collect(),
                tracked,
                k_grid: ks,
                eigenvectors: None,
                provenance: source,
            })
        }
        BandSource::Numerical | BandSource::Chain => {
            let bloch = match source {
                BandSource::Chain => Some(ChainBloch::new(&project_chain(&build_full_chain(samples)?)?)?),
                _ => None,
            };
            let (energies, vectors): (Vec<_>, Vec<_>) =
                ks.iter().map(|&k| eig3(&bloch.as_ref().map_or_else(|| bloch_hamiltonian(k), |b| b.at(k)))).unzip();
            Ok(BandStructure {
                tracked: track(&energies, &vectors),
                energies,
                k_grid: ks,
                eigenvectors: Some(vectors),
                provenance: source,
            })
        }
        BandSource::Tabulated => Err(Error::InvalidParameter("tabulated bands are supplied, not computed".into())),
    }
}

/// Sorted energies at arbitrary `k` for a computable source.
pub fn band_evaluator(bands: &BandStructure) -> Option<Box<dyn Fn(f64) -> [f64; 3]>> {
    match bands.provenance {
        BandSource::ClosedForm => Some(Box::new(|k| sorted3(band_energies_closed_form(k)))),
        BandSource::Numerical => Some(Box::new(|k| eig3(&bloch_hamiltonian(k)).0)),
        BandSource::Chain => {
            let chain = build_full_chain(bands.len()).and_then(|f| project_chain(&f)).and_then(|p| ChainBloch::new(&p));
            let bloch = chain.ok()?;
            Some(Box::new(move |k| eig3(&bloch.at(k)).0))
        }
        BandSource::Tabulated => None,
    }
}

/// Momenta in `[0, 2 pi)` where adjacent sorted bands meet within `tol`.
///
/// Local minima of each sorted gap on the grid are refined by golden-section
/// search between the neighbouring samples; a grid point whose own gap is
/// within `tol` is kept exactly. Expects a dense grid (64 samples or more).
pub fn crossing_points(bands: &BandStructure, tol: f64) -> Vec<f64> {
    let eval = band_evaluator(bands);
    crossing_points_with(&bands.k_grid, &bands.energies, tol, eval.as_deref())
}

pub fn crossing_points_with(
    k_grid: &[f64],
    energies: &[[f64; 3]],
    tol: f64,
    eval: Option<&dyn Fn(f64) -> [f64; 3]>,
) -> Vec<f64> {
    let n = k_grid.len();
    let mut found: Vec<f64> = Vec::new();
    if n < 3 {
        return found;
    }
    let tau = 2.0 * PI;
    for band in 0..2 {
        let gap = |e: &[f64; 3]| e[band + 1] - e[band];
        for i in 0..n {
            let (ip, inx) = ((i + n - 1) % n, (i + 1) % n);
            let g = gap(&energies[i]);
            if g > gap(&energies[ip]) || g > gap(&energies[inx]) {
                continue;
            }
            if g <= tol {
                found.push(k_grid[i]);
                continue;
            }
            let Some(f) = eval else { continue };
            let lo = k_grid[i] - (k_grid[i] - k_grid[ip]).rem_euclid(tau);
            let hi = k_grid[i] + (k_grid[inx] - k_grid[i]).rem_euclid(tau);
            let k = golden_min(|k| gap(&f(k)), lo, hi, 1e-11);
            if gap(&f(k)) <= tol {
                found.push(k.rem_euclid(tau));
            }
        }
    }
    found.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for k in found {
        let dup = out.iter().any(|&q| {
            let d = (k - q).rem_euclid(tau);
            d.min(tau - d) < 1e-6
        });
        if !dup {
            out.push(k);
        }
    }
    out
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > width {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    (a + b) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub k: f64,
    /// Sorted eigenvalues of the chain's Bloch block.
    pub chain: [f64; 3],
    /// Sorted eigenvalues of the printed matrix.
    pub printed_matrix: [f64; 3],
    /// Sorted closed-form energies.
    pub closed_form: [f64; 3],
    pub chain_vs_closed_form: f64,
    pub printed_matrix_vs_closed_form: f64,
    pub chain_vs_printed_matrix: f64,
    /// `sum(chain) - trace(block)`.
    pub chain_sum_residual: f64,
    /// `E1 + E2 + E3 - 1`.
    pub closed_form_sum_residual: f64,
    pub chain_trace: f64,
    pub printed_matrix_trace: f64,
    /// `|H psi_i - E_i psi_i|` for the normalized printed vectors against the printed matrix.
    pub printed_vector_residuals: [f64; 3],
    /// Largest entry difference between the printed Gell-Mann expansion and the printed matrix.
    pub appendix_vs_printed_matrix: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorCheck {
    pub pair: String,
    pub dot_unnormalized_k0: f64,
    pub orthogonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingSummary {
    pub closed_form: Vec<f64>,
    pub printed_matrix: Vec<f64>,
    pub chain: Vec<f64>,
    pub chain_matches_closed_form: bool,
    pub printed_matrix_matches_closed_form: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub sites: usize,
    pub samples: usize,
    pub raw_hermiticity_residual_full: f64,
    pub raw_hermiticity_residual_projected: f64,
    pub translation_residual_full: f64,
    pub translation_residual_projected: f64,
    pub max_chain_sum_residual: f64,
    pub max_closed_form_sum_residual: f64,
    pub max_chain_vs_closed_form: f64,
    pub max_printed_matrix_vs_closed_form: f64,
    pub max_appendix_vs_printed_matrix: f64,
    pub printed_vector_checks: Vec<VectorCheck>,
    pub psi1_dot_psi3_is_two: bool,
    pub crossings: CrossingSummary,
    pub notes: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn max_abs_diff3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn same_points(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Compares the chain built term by term with the printed momentum-space
/// matrix and closed-form bands. Reports differences; asserts nothing.
pub fn consistency_report(sites: usize, samples: usize) -> Result<ComparisonReport> {
    if sites < 8 {
        return Err(Error::InvalidParameter(format!("report needs at least 8 sites, got {sites}")));
    }
    if samples < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 samples, got {samples}")));
    }
    let full = build_full_chain(sites)?;
    let projected = project_chain(&full)?;
    let raw_projected = {
        let p = projector(sites);
        p.adjoint() * raw_full_chain(sites)? * &p
    };
    let bloch = ChainBloch::new(&projected)?;

    let rows: Vec<ComparisonRow> = k_grid(sites)
        .into_iter()
        .map(|k| {
            let block = bloch.at(k);
            let printed = bloch_hamiltonian(k);
            let chain = eig3(&block).0;
            let (printed_vals, _) = eig3(&printed);
            let labeled = band_energies_closed_form(k);
            let closed = sorted3(labeled);
            let vecs = band_eigenvectors_closed_form(k).vectors;
            let printed_vector_residuals =
                [0, 1, 2].map(|i| (&printed * &vecs[i] - &vecs[i] * c(labeled[i], 0.0)).norm());
            let chain_trace = block.trace().re;
            ComparisonRow {
                k,
                chain,
                printed_matrix: printed_vals,
                closed_form: closed,
                chain_vs_closed_form: max_abs_diff3(&chain, &closed),
                printed_matrix_vs_closed_form: max_abs_diff3(&printed_vals, &closed),
                chain_vs_printed_matrix: max_abs_diff3(&chain, &printed_vals),
                chain_sum_residual: chain.iter().sum::<f64>() - chain_trace,
                closed_form_sum_residual: labeled.iter().sum::<f64>() - 1.0,
                chain_trace,
                printed_matrix_trace: printed.trace().re,
                printed_vector_residuals,
                appendix_vs_printed_matrix: max_abs_diff(&su3_reconstruct(&appendix_coefficients(k)), &printed),
            }
        })
        .collect();

    let raw = printed_band_vectors(0.0);
    let printed_vector_checks: Vec<VectorCheck> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(a, b)| {
            let dot = raw[a].dotc(&raw[b]).re;
            VectorCheck {
                pair: format!("psi{}.psi{}", a + 1, b + 1),
                dot_unnormalized_k0: dot,
                orthogonal: dot.abs() < 1e-12,
            }
        })
        .collect();
    let psi13 = raw[0].dotc(&raw[2]).re;

    let tol = 1e-6;
    let cf = crossing_points(&band_structure(BandSource::ClosedForm, samples)?, tol);
    let pm = crossing_points(&band_structure(BandSource::Numerical, samples)?, tol);
    let ch = crossing_points(&band_structure(BandSource::Chain, sites)?, tol);
    let crossings = CrossingSummary {
        chain_matches_closed_form: same_points(&ch, &cf, 1e-6),
        printed_matrix_matches_closed_form: same_points(&pm, &cf, 1e-6),
        closed_form: cf,
        printed_matrix: pm,
        chain: ch,
    };

    let fold = |f: &dyn Fn(&ComparisonRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(ComparisonReport {
        sites,
        samples,
        raw_hermiticity_residual_full: full.raw_hermiticity_residual,
        raw_hermiticity_residual_projected: herm_residual(&raw_projected),
        translation_residual_full: full.translation_residual(),
        translation_residual_projected: projected.translation_residual(),
        max_chain_sum_residual: fold(&|r| r.chain_sum_residual.abs()),
        max_closed_form_sum_residual: fold(&|r| r.closed_form_sum_residual.abs()),
        max_chain_vs_closed_form: fold(&|r| r.chain_vs_closed_form),
        max_printed_matrix_vs_closed_form: fold(&|r| r.printed_matrix_vs_closed_form),
        max_appendix_vs_printed_matrix: fold(&|r| r.appendix_vs_printed_matrix),
        printed_vector_checks,
        psi1_dot_psi3_is_two: (psi13 - 2.0).abs() < 1e-12,
        crossings,
        notes: vec![
            "chain terms symmetrized as (H + H^dagger)/2 before projection".into(),
            "momentum-space prefactor -i/3 replaced by 1/3".into(),
            "printed band vectors are not mutually orthogonal; chain eigenvectors are authoritative".into(),
        ],
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const E3: f64 = (1.0 + 2.0 * SQRT_2) / 3.0;

    #[test]
    fn index_round_trip() {
        for i in 0..24 {
            let l = ChainOperator::full_label(i);
            assert_eq!(ChainOperator::full_index(4, l), i);
        }
    }

    #[test]
    fn two_site_chain_is_hermitian() {
        let h = build_full_chain(2).unwrap();
        assert_eq!(h.dim(), 12);
        assert!(herm_residual(&h.matrix) <= 1e-12);
        assert!(build_full_chain(1).is_err());
    }

    #[test]
    fn printed_hop_coefficient() {
        let raw = raw_full_chain(6).unwrap();
        let r = ChainOperator::full_index(6, ChainLabel::new(2, 1, Direction::R));
        let l = ChainOperator::full_index(6, ChainLabel::new(2, 0, Direction::L));
        assert_abs_diff_eq!(raw[(r, l)].re, -2.0 / 3.0, epsilon = 1e-15);
        assert!(raw.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn term_magnitudes() {
        let terms = chain_terms(5);
        assert_eq!(terms.len(), 5 * 18);
        for t in terms {
            let a = t.coef.abs();
            assert!((a - 1.0 / 3.0).abs() < 1e-15 || (a - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn raw_terms_are_not_self_adjoint() {
        let h = build_full_chain(8).unwrap();
        assert!(h.raw_hermiticity_residual > 0.1);
        assert!(herm_residual(&h.matrix) < 1e-15);
    }

    #[test]
    fn translation_invariance() {
        for n in [3, 8, 12] {
            let full = build_full_chain(n).unwrap();
            assert!(full.translation_residual() <= 1e-12);
            let p = project_chain(&full).unwrap();
            assert!(p.translation_residual() <= 1e-12);
        }
    }

    #[test]
    fn projection_properties() {
        let p = project_chain(&build_full_chain(8).unwrap()).unwrap();
        assert_eq!(p.dim(), 24);
        assert!(herm_residual(&p.matrix) <= 1e-12);
        for i in 0..24 {
            assert_abs_diff_eq!(p.matrix[(i, i)].re, 1.0 / 3.0, epsilon = 1e-15);
        }
        assert!(project_chain(&p).is_err());
    }

    #[test]
    fn bloch_at_pi() {
        let b = bloch_hamiltonian(PI);
        for (i, want) in [E3, 1.0 / 3.0, E3].iter().enumerate() {
            assert_abs_diff_eq!(b[(i, i)].re, *want, epsilon = 1e-15);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(b[(i, j)].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn bloch_trace() {
        for k in [0.0, 0.4, 1.9, PI, 5.5] {
            let t = bloch_hamiltonian(k).trace();
            assert_abs_diff_eq!(t.re, 1.0 - 4.0 * SQRT_2 / 3.0 * k.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(t.im, 0.0);
            assert!(herm_residual(&bloch_hamiltonian(k)) < 1e-15);
        }
    }

    #[test]
    fn closed_form_examples() {
        for k in k_grid(50) {
            let e = band_energies_closed_form(k);
            assert_abs_diff_eq!(e.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert_eq!(e[2], E3);
        }
        let e = band_energies_closed_form(PI);
        assert_abs_diff_eq!(e[0], e[2], epsilon = 1e-15);
        let e = band_energies_closed_form(PI / 3.0);
        assert_abs_diff_eq!(e[0], (1.0 - SQRT_2) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1], (1.0 - SQRT_2) / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn printed_vectors() {
        let raw = printed_band_vectors(0.7);
        assert_abs_diff_eq!(raw[0].dotc(&raw[1]).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(raw[0].dotc(&raw[2]).re, 2.0, epsilon = 1e-15);
        let v = band_eigenvectors_closed_form(0.7);
        let s = 1.0 / SQRT_2;
        assert!((v.vectors[0][0] - c(-s, 0.0)).norm() < 1e-15);
        assert!((v.vectors[0][2] - c(s, 0.0)).norm() < 1e-15);
        assert_eq!(v.tag, "as-printed, unverified");
    }

    #[test]
    fn closed_form_band_structure() {
        let b = band_structure(BandSource::ClosedForm, 64).unwrap();
        assert_eq!(b.len(), 64);
        assert!(b.tracked.iter().all(|e| e[2] == E3));
        assert!(b.eigenvectors.is_none());
        assert!(band_structure(BandSource::ClosedForm, 2).is_err());
    }

    #[test]
    fn numerical_sum_is_trace() {
        let b = band_structure(BandSource::Numerical, 40).unwrap();
        let vecs = b.eigenvectors.as_ref().unwrap();
        for ((k, e), v) in b.k_grid.iter().zip(&b.energies).zip(vecs) {
            assert_abs_diff_eq!(e.iter().sum::<f64>(), bloch_hamiltonian(*k).trace().re, epsilon = 1e-12);
            let g = v.adjoint() * v;
            assert!(max_abs_diff(&g, &CMatrix::identity(3, 3)) < 1e-10);
        }
    }

    #[test]
    fn chain_bloch_matches_dense_diagonalization() {
        let p = project_chain(&build_full_chain(8).unwrap()).unwrap();
        let (mut all, _) = hermitian_eigen(&p.matrix);
        let bloch = ChainBloch::new(&p).unwrap();
        let mut from_blocks: Vec<f64> = k_grid(8).into_iter().flat_map(|k| eig3(&bloch.at(k)).0).collect();
        all.sort_by(f64::total_cmp);
        from_blocks.sort_by(f64::total_cmp);
        for (a, b) in all.iter().zip(&from_blocks) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn closed_form_crossings() {
        let b = band_structure(BandSource::ClosedForm, 256).unwrap();
        let ks = crossing_points(&b, 1e-6);
        assert_eq!(ks.len(), 3, "{ks:?}");
        for (got, want) in ks.iter().zip([PI / 3.0, PI, 5.0 * PI / 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-8);
        }
    }

    #[test]
    fn exact_grid_crossing_with_zero_tolerance() {
        let b = band_structure(BandSource::ClosedForm, 64).unwrap();
        let ks = crossing_points(&b, 0.0);
        assert!(ks.contains(&PI));
    }

    #[test]
    fn constant_gap_has_no_crossings() {
        let ks = k_grid(64);
        let energies = vec![[0.0, 1.0, 2.0]; 64];
        assert!(crossing_points_with(&ks, &energies, 1e-6, None).is_empty());
        let bands = BandStructure {
            k_grid: ks,
            tracked: energies.clone(),
            energies,
            eigenvectors: None,
            provenance: BandSource::Tabulated,
        };
        assert!(crossing_points(&bands, 1e-3).is_empty());
    }

    #[test]
    fn upper_pair_gap() {
        let b = band_structure(BandSource::ClosedForm, 256).unwrap();
        assert_abs_diff_eq!(b.min_gap(1, 2), 2.0 * SQRT_2 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn tracking_follows_crossing() {
        // Two real bands crossing linearly with fixed eigenvectors.
        let ks = k_grid(32);
        let (values, vectors): (Vec<_>, Vec<_>) = ks
            .iter()
            .map(|&k| {
                let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(k, 0.0), c(PI, 0.0), c(10.0, 0.0)]));
                eig3(&d)
            })
            .unzip();
        let t = track(&values, &vectors);
        for (k, e) in ks.iter().zip(&t) {
            assert_abs_diff_eq!(e[0], *k, epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let csv = band_structure(BandSource::ClosedForm, 4).unwrap().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "k,E1,E2,E3,source");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(",closed_form"));
        let k: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(k, PI / 2.0);
    }

    #[test]
    fn report_is_deterministic() {
        let a = consistency_report(8, 64).unwrap();
        let b = consistency_report(8, 64).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.psi1_dot_psi3_is_two);
        assert!(a.max_closed_form_sum_residual <= 1e-12);
        assert!(a.max_chain_sum_residual <= 1e-10);
        assert_eq!(a.rows.len(), 8);
        assert!(consistency_report(4, 64).is_err());
    }
}
