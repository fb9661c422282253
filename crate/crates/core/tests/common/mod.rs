#![allow(dead_code)]

use multiportlab::linalg::{c, CMatrix, CVector, Unitary, C64};
use multiportlab::scattering::{InternalEdge, PortRef, ScatterNetwork, ScatterNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Standard complex normal via Box-Muller.
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt() / std::f64::consts::SQRT_2;
    C64::from_polar(r, 2.0 * std::f64::consts::PI * u2)
}

/// Haar-distributed unitary: QR of a complex Gaussian with the phases of
/// `diag(R)` divided out.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> Unitary {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Unitary::new(q).expect("QR factor is unitary")
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    (&g + g.adjoint()).unscale(2.0)
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Output at each external port for a unit drive at each external port,
/// summing `bounces` rounds of scatter-then-propagate. Also returns the
/// largest amplitude norm still inside the network.
pub fn bounce_sum(net: &ScatterNetwork, bounces: usize) -> (CMatrix, f64) {
    let sizes: Vec<usize> = net.nodes.iter().map(|n| n.smatrix.dim()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let g = |p: &PortRef| offsets[p.node] + p.port;
    let ext: Vec<usize> = net.external_ports.iter().map(g).collect();
    let mut out = CMatrix::zeros(ext.len(), ext.len());
    let mut leftover: f64 = 0.0;
    for (col, &drive) in ext.iter().enumerate() {
        let mut incoming = CVector::zeros(total);
        incoming[drive] = c(1.0, 0.0);
        for _ in 0..bounces {
            let mut outgoing = CVector::zeros(total);
            for (node, &o) in net.nodes.iter().zip(&offsets) {
                let d = node.smatrix.dim();
                let local = node.smatrix.matrix() * incoming.rows(o, d);
                outgoing.rows_mut(o, d).copy_from(&local);
            }
            for (row, &e) in ext.iter().enumerate() {
                out[(row, col)] += outgoing[e];
            }
            let mut next = CVector::zeros(total);
            for edge in &net.internal_edges {
                let z = C64::from_polar(1.0, edge.phase);
                next[g(&edge.b)] += z * outgoing[g(&edge.a)];
                next[g(&edge.a)] += z * outgoing[g(&edge.b)];
            }
            incoming = next;
        }
        leftover = leftover.max(incoming.norm());
    }
    (out, leftover)
}

/// Random lossless network of at most `max_dim` total ports whose internal
/// feedback decays below `1e-10` within `bounces` rounds.
pub fn random_lossless_network(rng: &mut impl Rng, max_dim: usize, bounces: usize) -> ScatterNetwork {
    loop {
        let mut nodes = Vec::new();
        let mut total = 0;
        let count = rng.gen_range(1..=4);
        for i in 0..count {
            let d = rng.gen_range(2..=4);
            if total + d > max_dim {
                break;
            }
            let ports = (0..d).map(|p| format!("p{p}")).collect();
            nodes.push(ScatterNode::new(format!("n{i}"), random_unitary(rng, d), ports).unwrap());
            total += d;
        }
        let mut free: Vec<PortRef> =
            nodes.iter().enumerate().flat_map(|(i, n)| (0..n.smatrix.dim()).map(move |p| PortRef::new(i, p))).collect();
        let mut edges = Vec::new();
        let pairs = rng.gen_range(0..=free.len().saturating_sub(1) / 2);
        for _ in 0..pairs {
            let a = free.remove(rng.gen_range(0..free.len()));
            let b = free.remove(rng.gen_range(0..free.len()));
            edges.push(InternalEdge { a, b, phase: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI) });
        }
        let net = ScatterNetwork { nodes, internal_edges: edges, external_ports: free };
        if net.external_ports.is_empty() {
            continue;
        }
        if bounce_sum(&net, bounces).1 <= 1e-10 {
            return net;
        }
    }
}
