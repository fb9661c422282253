//! Steady-state solution of coherent scattering networks.
//!
//! A network is a set of lossless nodes (local S-matrices) whose ports are
//! either wired pairwise by internal edges carrying a propagation phase or
//! exposed as external ports. Each internal edge carries two directed modes.
//! Eliminating the internal modes gives
//!
//! ```text
//! S_eff = S_EE + S_EI (I - T_II)^{-1} T_IE
//! ```
//!
//! where `T = P S` includes the edge propagation `P` that moves an outgoing
//! amplitude at one end of an edge to the incoming amplitude at the other.
//! This is the coherent sum over every internal path, with the multiport
//! treated as point-like.

use std::f64::consts::PI;

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, identity, CMatrix, Unitary, C64, DEFAULT_TOL};

/// Singular values of `I - T_II` below this are treated as zero.
pub const RESONANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PortRef {
    pub node: usize,
    pub port: usize,
}

impl PortRef {
    pub fn new(node: usize, port: usize) -> Self {
        Self { node, port }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterNode {
    pub id: String,
    pub smatrix: Unitary,
    pub ports: Vec<String>,
}

impl ScatterNode {
    pub fn new(id: impl Into<String>, smatrix: Unitary, ports: Vec<String>) -> Result<Self> {
        if ports.len() != smatrix.dim() {
            return Err(Error::DimensionMismatch { expected: smatrix.dim(), actual: ports.len() });
        }
        Ok(Self { id: id.into(), smatrix, ports })
    }

    pub fn port_index(&self, name: &str) -> Option<usize> {
        self.ports.iter().position(|p| p == name)
    }
}

/// Undirected connection between two node ports with a one-way propagation
/// phase (applied in both directions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalEdge {
    pub a: PortRef,
    pub b: PortRef,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterNetwork {
    pub nodes: Vec<ScatterNode>,
    pub internal_edges: Vec<InternalEdge>,
    pub external_ports: Vec<PortRef>,
}

/// Dense blocks of a validated network over global port indices.
#[derive(Debug, Clone)]
pub struct NetworkBlocks {
    pub s_ee: CMatrix,
    pub s_ei: CMatrix,
    /// Internal-to-internal transfer including edge propagation.
    pub t_ii: CMatrix,
    /// External-to-internal transfer including edge propagation.
    pub t_ie: CMatrix,
}

impl ScatterNetwork {
    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.nodes
            .iter()
            .map(|n| {
                let o = acc;
                acc += n.smatrix.dim();
                o
            })
            .collect()
    }

    pub fn port_count(&self) -> usize {
        self.nodes.iter().map(|n| n.smatrix.dim()).sum()
    }

    /// Checks that every node port is used exactly once, by one internal
    /// edge or one external slot, and that node matrices are unitary.
    pub fn validate(&self) -> Result<()> {
        let offsets = self.offsets();
        let mut uses = vec![0usize; self.port_count()];
        let mut mark = |p: &PortRef| -> Result<()> {
            let node =
                self.nodes.get(p.node).ok_or_else(|| Error::Validation(format!("unknown node index {}", p.node)))?;
            if p.port >= node.smatrix.dim() {
                return Err(Error::Validation(format!("node {} has no port {}", node.id, p.port)));
            }
            uses[offsets[p.node] + p.port] += 1;
            Ok(())
        };
        for e in &self.internal_edges {
            if !e.phase.is_finite() {
                return Err(Error::Validation("edge phase is not finite".into()));
            }
            mark(&e.a)?;
            mark(&e.b)?;
        }
        for p in &self.external_ports {
            mark(p)?;
        }
        for (ni, node) in self.nodes.iter().enumerate() {
            let residual = node.smatrix.residual();
            if residual > DEFAULT_TOL {
                return Err(Error::Validation(format!("node {} is not unitary (residual {residual:e})", node.id)));
            }
            for p in 0..node.smatrix.dim() {
                match uses[offsets[ni] + p] {
                    1 => {}
                    0 => return Err(Error::Validation(format!("dangling port {}:{}", node.id, node.ports[p]))),
                    k => return Err(Error::Validation(format!("port {}:{} used {k} times", node.id, node.ports[p]))),
                }
            }
        }
        Ok(())
    }

    pub fn blocks(&self) -> Result<NetworkBlocks> {
        self.validate()?;
        let offsets = self.offsets();
        let total = self.port_count();
        let global = |p: &PortRef| offsets[p.node] + p.port;

        let mut s = CMatrix::zeros(total, total);
        for (ni, node) in self.nodes.iter().enumerate() {
            let o = offsets[ni];
            let d = node.smatrix.dim();
            s.view_mut((o, o), (d, d)).copy_from(node.smatrix.matrix());
        }
        // propagation: outgoing at one end becomes incoming at the other
        let mut prop = CMatrix::zeros(total, total);
        for e in &self.internal_edges {
            let (a, b) = (global(&e.a), global(&e.b));
            let z = C64::from_polar(1.0, e.phase);
            prop[(b, a)] += z;
            prop[(a, b)] += z;
        }
        let ext: Vec<usize> = self.external_ports.iter().map(global).collect();
        let mut is_ext = vec![false; total];
        for &e in &ext {
            is_ext[e] = true;
        }
        let int: Vec<usize> = (0..total).filter(|&i| !is_ext[i]).collect();
        let pick = |m: &CMatrix, rows: &[usize], cols: &[usize]| {
            CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
        };
        let t = &prop * &s;
        Ok(NetworkBlocks {
            s_ee: pick(&s, &ext, &ext),
            s_ei: pick(&s, &ext, &int),
            t_ii: pick(&t, &int, &int),
            t_ie: pick(&t, &int, &ext),
        })
    }
}

/// Effective S-matrix over the external ports, in `external_ports` order.
pub fn effective_smatrix(net: &ScatterNetwork) -> Result<Unitary> {
    let b = net.blocks()?;
    let m = if b.t_ii.nrows() == 0 { b.s_ee } else { &b.s_ee + &b.s_ei * steady_state(&b.t_ii, &b.t_ie)? };
    Unitary::new(m)
}

/// Solves `(I - T_II) X = T_IE` for the internal steady-state amplitudes.
///
/// Trapped modes (`T_II z = z`) make the system singular without changing
/// the external response, since energy conservation forces `S_EI z = 0`;
/// the minimum-norm solution is returned. Only a drive with no consistent
/// solution is reported as a resonance.
pub fn steady_state(t_ii: &CMatrix, t_ie: &CMatrix) -> Result<CMatrix> {
    let a = identity(t_ii.nrows()) - t_ii;
    let svd = SVD::new(a.clone(), true, true);
    let x = svd.solve(t_ie, RESONANCE_TOL).map_err(|_| Error::Resonance)?;
    if crate::linalg::max_abs_diff(&(&a * &x), t_ie) > 1e-9 {
        return Err(Error::Resonance);
    }
    Ok(x)
}

/// Free conventions of the internal multiport construction that the printed
/// transition matrices do not pin down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationProfile {
    /// Propagation phase between adjacent beam splitters; the
    /// splitter-to-mirror arm carries half of it each way.
    pub ring_phase: f64,
    /// Sign of the bare mirror reflection.
    pub mirror_sign: f64,
    /// Times the vertex phase shifter is traversed on a round trip.
    pub vertex_passes: u8,
}

impl CalibrationProfile {
    /// Reproduces the Grover coin (with unit global phase) at vertex phase
    /// `-3 pi / 4`, for every port count.
    pub const GROVER: CalibrationProfile = CalibrationProfile { ring_phase: 0.0, mirror_sign: -1.0, vertex_passes: 2 };

    /// Single-pass convention under which vertex phases `pi / 6` give a
    /// strictly unbiased three-port.
    pub const SINGLE_PASS: CalibrationProfile =
        CalibrationProfile { ring_phase: 0.0, mirror_sign: 1.0, vertex_passes: 1 };

    pub fn vertex_reflection(&self, phase: f64) -> C64 {
        C64::from_polar(self.mirror_sign, f64::from(self.vertex_passes) * phase)
    }

    /// All profiles visited by the calibration sweep, in sweep order.
    pub fn sweep() -> Vec<CalibrationProfile> {
        let mut out = Vec::new();
        for vertex_passes in [1u8, 2] {
            for k in 0..4 {
                for mirror_sign in [1.0, -1.0] {
                    out.push(CalibrationProfile { ring_phase: k as f64 * PI / 2.0, mirror_sign, vertex_passes });
                }
            }
        }
        out
    }
}

impl Default for CalibrationProfile {
    fn default() -> Self {
        Self::GROVER
    }
}

pub const SPLITTER_PORTS: [&str; 4] = ["ext", "vertex", "ring_prev", "ring_next"];

/// Symmetric 50:50 splitter, transmission `1/sqrt 2`, reflection `i/sqrt 2`.
pub fn beam_splitter_2x2() -> CMatrix {
    let t = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let r = c(0.0, std::f64::consts::FRAC_1_SQRT_2);
    CMatrix::from_row_slice(2, 2, &[t, r, r, t])
}

/// Four-port splitter over `(ext, vertex, ring_prev, ring_next)`: light from
/// `ext`/`vertex` goes to the ring ports and vice versa.
pub fn beam_splitter_node(id: impl Into<String>) -> ScatterNode {
    let b = beam_splitter_2x2();
    let mut s = CMatrix::zeros(4, 4);
    s.view_mut((2, 0), (2, 2)).copy_from(&b);
    s.view_mut((0, 2), (2, 2)).copy_from(&b.transpose());
    let u = Unitary::new(s).expect("splitter is unitary");
    ScatterNode::new(id, u, SPLITTER_PORTS.iter().map(|s| s.to_string()).collect()).expect("4 ports")
}

/// One-port reflector.
pub fn mirror_node(id: impl Into<String>, reflection: C64) -> Result<ScatterNode> {
    let u = Unitary::new(CMatrix::from_element(1, 1, reflection))?;
    ScatterNode::new(id, u, vec!["m".into()])
}

/// Ring of `phases.len()` splitters, each terminated by a mirror/phase
/// vertex unit, with one external port per splitter.
pub fn build_unbiased_multiport(phases: &[f64], profile: &CalibrationProfile) -> Result<ScatterNetwork> {
    let n = phases.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a multiport ring needs at least 2 vertices, got {n}")));
    }
    let mut nodes = Vec::with_capacity(2 * n);
    for i in 0..n {
        nodes.push(beam_splitter_node(format!("bs{i}")));
    }
    for (i, &phi) in phases.iter().enumerate() {
        nodes.push(mirror_node(format!("mirror{i}"), profile.vertex_reflection(phi))?);
    }
    let mut internal_edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        internal_edges.push(InternalEdge {
            a: PortRef::new(i, 3),
            b: PortRef::new((i + 1) % n, 2),
            phase: profile.ring_phase,
        });
        internal_edges.push(InternalEdge {
            a: PortRef::new(i, 1),
            b: PortRef::new(n + i, 0),
            phase: profile.ring_phase / 2.0,
        });
    }
    let external_ports = (0..n).map(|i| PortRef::new(i, 0)).collect();
    Ok(ScatterNetwork { nodes, internal_edges, external_ports })
}

pub fn build_unbiased_three_port(phases: [f64; 3], profile: &CalibrationProfile) -> Result<ScatterNetwork> {
    build_unbiased_multiport(&phases, profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, ONE};
    use crate::multiport::{grover_unitary, strict_three_port};
    use approx::assert_abs_diff_eq;

    #[test]
    fn lone_splitter_is_its_own_matrix() {
        let bs = beam_splitter_node("bs");
        let net = ScatterNetwork {
            nodes: vec![bs.clone()],
            internal_edges: vec![],
            external_ports: (0..4).map(|p| PortRef::new(0, p)).collect(),
        };
        let s = effective_smatrix(&net).unwrap();
        assert!(max_abs_diff(s.matrix(), bs.smatrix.matrix()) < 1e-15);
    }

    #[test]
    fn splitter_with_looped_vertex() {
        let (theta, phi) = (0.37, -1.1);
        let bs = beam_splitter_node("bs");
        let net = ScatterNetwork {
            nodes: vec![bs.clone(), mirror_node("m", C64::from_polar(1.0, phi)).unwrap()],
            internal_edges: vec![InternalEdge { a: PortRef::new(0, 1), b: PortRef::new(1, 0), phase: theta }],
            external_ports: vec![PortRef::new(0, 0), PortRef::new(0, 2), PortRef::new(0, 3)],
        };
        let s = effective_smatrix(&net).unwrap();
        // the splitter's vertex port does not self-couple, so the loop is
        // traversed once: S_xy + S_xv e^{i(2 theta + phi)} S_vy
        let loop_gain = C64::from_polar(1.0, 2.0 * theta + phi);
        let m = bs.smatrix.matrix();
        let ports = [0, 2, 3];
        for (i, &x) in ports.iter().enumerate() {
            for (j, &y) in ports.iter().enumerate() {
                let want = m[(x, y)] + m[(x, 1)] * loop_gain * m[(1, y)];
                assert!((s.matrix()[(i, j)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_reflector_loop_is_a_geometric_series() {
        // two-port with self-coupling r on the looped port
        let (r, t) = (c(0.6, 0.0), c(0.0, 0.8));
        let node = ScatterNode::new(
            "p",
            Unitary::new(CMatrix::from_row_slice(2, 2, &[r, t, t, r])).unwrap(),
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let (theta, phi) = (0.21, 2.3);
        let net = ScatterNetwork {
            nodes: vec![node, mirror_node("m", C64::from_polar(1.0, phi)).unwrap()],
            internal_edges: vec![InternalEdge { a: PortRef::new(0, 1), b: PortRef::new(1, 0), phase: theta }],
            external_ports: vec![PortRef::new(0, 0)],
        };
        let s = effective_smatrix(&net).unwrap();
        let rho = C64::from_polar(1.0, 2.0 * theta + phi);
        let want = r + t * rho * t / (ONE - r * rho);
        assert!((s.matrix()[(0, 0)] - want).norm() < 1e-14);
        assert_abs_diff_eq!(s.matrix()[(0, 0)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn undriven_cavity_does_not_change_the_response() {
        // a closed mirror-to-mirror cavity beside a splitter with a looped vertex
        let with_cavity = ScatterNetwork {
            nodes: vec![
                beam_splitter_node("bs"),
                mirror_node("m1", ONE).unwrap(),
                mirror_node("m2", ONE).unwrap(),
                mirror_node("m3", ONE).unwrap(),
            ],
            internal_edges: vec![
                InternalEdge { a: PortRef::new(1, 0), b: PortRef::new(2, 0), phase: 0.0 },
                InternalEdge { a: PortRef::new(0, 1), b: PortRef::new(3, 0), phase: 0.0 },
            ],
            external_ports: vec![PortRef::new(0, 0), PortRef::new(0, 2), PortRef::new(0, 3)],
        };
        let bare = ScatterNetwork {
            nodes: vec![beam_splitter_node("bs"), mirror_node("m3", ONE).unwrap()],
            internal_edges: vec![InternalEdge { a: PortRef::new(0, 1), b: PortRef::new(1, 0), phase: 0.0 }],
            external_ports: vec![PortRef::new(0, 0), PortRef::new(0, 2), PortRef::new(0, 3)],
        };
        let a = effective_smatrix(&with_cavity).unwrap();
        let b = effective_smatrix(&bare).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
    }

    #[test]
    fn driven_resonance_is_an_error() {
        let t_ii = CMatrix::from_element(1, 1, ONE);
        let t_ie = CMatrix::from_element(1, 1, ONE);
        assert_eq!(steady_state(&t_ii, &t_ie), Err(Error::Resonance));
    }

    #[test]
    fn dangling_and_duplicate_ports() {
        let mut net = build_unbiased_three_port([0.0; 3], &CalibrationProfile::GROVER).unwrap();
        net.external_ports.pop();
        assert!(matches!(net.validate(), Err(Error::Validation(m)) if m.contains("dangling")));
        net.external_ports.push(PortRef::new(0, 0));
        assert!(matches!(net.validate(), Err(Error::Validation(m)) if m.contains("used 2 times")));
    }

    #[test]
    fn grover_profile_reproduces_printed_three_port() {
        let net = build_unbiased_three_port([-3.0 * PI / 4.0; 3], &CalibrationProfile::GROVER).unwrap();
        let s = effective_smatrix(&net).unwrap();
        assert!(max_abs_diff(s.matrix(), grover_unitary(3).unwrap().matrix()) < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 / 3.0 } else { 2.0 / 3.0 };
                assert_abs_diff_eq!(s.matrix()[(i, j)].norm(), want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_pass_profile_gives_strict_three_port() {
        let net = build_unbiased_three_port([PI / 6.0; 3], &CalibrationProfile::SINGLE_PASS).unwrap();
        let s = effective_smatrix(&net).unwrap();
        assert!(s.matrix().iter().all(|z| (z.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn single_pass_strict_three_port_relative_phases() {
        let net = build_unbiased_three_port([PI / 6.0; 3], &CalibrationProfile::SINGLE_PASS).unwrap();
        let s = effective_smatrix(&net).unwrap();
        let strict = strict_three_port();
        let d = crate::linalg::global_phase_distance(s.matrix(), strict.matrix()).unwrap();
        let conj = crate::linalg::global_phase_distance(s.matrix(), &strict.matrix().map(|z| z.conj())).unwrap();
        // one of the two chiralities of the closed form
        assert!(d.min(conj) < 1e-12, "distance {d}, conjugate {conj}");
    }

    #[test]
    fn grover_profile_at_pi_over_six_is_not_strict() {
        let net = build_unbiased_three_port([PI / 6.0; 3], &CalibrationProfile::GROVER).unwrap();
        let s = effective_smatrix(&net).unwrap();
        assert!(s.matrix().iter().any(|z| (z.norm() - 1.0 / 3f64.sqrt()).abs() > 1e-2));
    }

    #[test]
    fn arbitrary_phases_are_lossless() {
        let phases = [[0.3, -1.2, 2.9], [1.0, 1.0, -0.4], [-3.0, 0.01, 2.2]];
        for profile in [CalibrationProfile::GROVER, CalibrationProfile::SINGLE_PASS] {
            for p in phases {
                let s = effective_smatrix(&build_unbiased_three_port(p, &profile).unwrap()).unwrap();
                assert!(s.residual() < 1e-10);
            }
        }
    }

    #[test]
    fn equal_phases_give_reciprocal_matrix() {
        for phi in [-2.0, 0.4, 1.3] {
            let s =
                effective_smatrix(&build_unbiased_multiport(&[phi; 4], &CalibrationProfile::GROVER).unwrap()).unwrap();
            assert!(max_abs_diff(s.matrix(), &s.matrix().transpose()) < 1e-10);
        }
    }

    #[test]
    fn sweep_contains_both_named_profiles() {
        let sweep = CalibrationProfile::sweep();
        assert_eq!(sweep.len(), 16);
        assert!(sweep.contains(&CalibrationProfile::GROVER));
        assert!(sweep.contains(&CalibrationProfile::SINGLE_PASS));
    }
}
