//! State preparation, walk readout and simulated detector counts.
//!
//! Shot sampling uses ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)` and stream `stream` (0 unless given). Each shot
//! draws one `u64` `x`, forms `u = (x >> 11) * 2^-53` and picks the first
//! port whose cumulative probability exceeds `u`.

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, evolve, CVector, StateVector, Unitary, C64};
use crate::multiport::{grover_unitary, ExitDistribution};

/// Photon at site `m` of `n`.
pub fn prepare_position(m: usize, n: usize) -> Result<StateVector> {
    StateVector::basis(n, m)
}

/// Equal superposition of the `n` single-photon modes.
#[derive(Debug, Clone, PartialEq)]
pub struct WState {
    pub n: usize,
    pub amplitudes: CVector,
}

impl WState {
    /// Occupation string of mode `i`, e.g. `|010>` for `i = 1`, `n = 3`.
    pub fn occupation_label(&self, i: usize) -> String {
        let bits: String = (0..self.n).map(|j| if j == i { '1' } else { '0' }).collect();
        format!("|{bits}>")
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::from_amplitudes(self.amplitudes.clone()).expect("W-state is normalized")
    }
}

pub fn w_state(n: usize) -> Result<WState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("W-state needs at least 2 modes, got {n}")));
    }
    let a = c(1.0 / (n as f64).sqrt(), 0.0);
    Ok(WState { n, amplitudes: CVector::from_element(n, a) })
}

/// `U^steps psi0` in the phase convention of `u`.
pub fn transition_amplitudes(u: &Unitary, psi0: &StateVector, steps: usize) -> Result<StateVector> {
    evolve(u, psi0, steps)
}

/// Exit probabilities after `steps`. `input_port` is the largest-magnitude
/// entry of `psi0` (the first on ties).
pub fn walk_distribution(u: &Unitary, psi0: &StateVector, steps: usize) -> Result<ExitDistribution> {
    let out = evolve(u, psi0, steps)?;
    let mut input = 0;
    for (i, a) in psi0.amplitudes().iter().enumerate() {
        if a.norm() > psi0.amplitudes()[input].norm() + 1e-12 {
            input = i;
        }
    }
    let p = out.probabilities();
    let total: f64 = p.iter().sum();
    ExitDistribution::new(input, p.into_iter().map(|x| x / total).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shots: u64,
    pub counts: Vec<u64>,
    pub seed: u64,
    pub stream: u64,
}

impl ShotRecord {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("port,count\n");
        for (port, n) in self.counts.iter().enumerate() {
            let _ = writeln!(s, "{port},{n}");
        }
        s
    }
}

/// Unit interval draw with 53 random bits.
pub fn unit_draw(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_shots(dist: &ExitDistribution, shots: u64, seed: u64) -> ShotRecord {
    sample_shots_stream(dist, shots, seed, 0)
}

/// Independent substreams of one seed, for parallel sampling.
pub fn sample_shots_stream(dist: &ExitDistribution, shots: u64, seed: u64, stream: u64) -> ShotRecord {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in &dist.probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let last = dist.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; dist.len()];
    if dist.is_empty() {
        return ShotRecord { shots: 0, counts, seed, stream };
    }
    for _ in 0..shots {
        let u = unit_draw(&mut rng);
        let port = cumulative.iter().position(|&cp| u < cp).unwrap_or(last);
        counts[port] += 1;
    }
    ShotRecord { shots, counts, seed, stream }
}

/// Which of the two multiports a photon is heading for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heading {
    Left,
    Right,
}

/// Two multiports joined by three lines; photons bounce between them and
/// reverse direction on every step.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSystem {
    left: [C64; 9],
    right: [C64; 9],
}

impl Default for CompactSystem {
    fn default() -> Self {
        let g = grover_unitary(3).expect("n = 3");
        Self::new(&g, &g).expect("three-ports")
    }
}

impl CompactSystem {
    pub fn new(left: &Unitary, right: &Unitary) -> Result<Self> {
        let pack = |u: &Unitary| -> Result<[C64; 9]> {
            if u.dim() != 3 {
                return Err(Error::DimensionMismatch { expected: 3, actual: u.dim() });
            }
            Ok(std::array::from_fn(|i| u.matrix()[(i / 3, i % 3)]))
        };
        Ok(Self { left: pack(left)?, right: pack(right)? })
    }

    /// Line amplitudes and heading after `steps`, starting toward the right.
    pub fn run(&self, psi0: &[C64; 3], steps: usize) -> ([C64; 3], Heading) {
        let mut v = *psi0;
        let mut heading = Heading::Right;
        for _ in 0..steps {
            let m = match heading {
                Heading::Right => &self.right,
                Heading::Left => &self.left,
            };
            v = [0, 1, 2].map(|r| m[3 * r] * v[0] + m[3 * r + 1] * v[1] + m[3 * r + 2] * v[2]);
            heading = match heading {
                Heading::Right => Heading::Left,
                Heading::Left => Heading::Right,
            };
        }
        (v, heading)
    }
}

/// Evolution in the two-multiport loop; equal to `evolve(grover_unitary(3), psi0, steps)`.
pub fn compact_evolve(psi0: &StateVector, steps: usize) -> Result<StateVector> {
    if psi0.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: psi0.dim() });
    }
    let a = psi0.amplitudes();
    let (v, _) = CompactSystem::default().run(&[a[0], a[1], a[2]], steps);
    Ok(psi0.map(CVector::from_row_slice(&v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::momentum_state;
    use crate::linalg::max_abs_diff_vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn position_states() {
        let e0 = prepare_position(0, 3).unwrap();
        assert_eq!(e0.probabilities(), vec![1.0, 0.0, 0.0]);
        assert_eq!(e0.norm(), 1.0);
        assert!(prepare_position(3, 3).is_err());
        let g = grover_unitary(3).unwrap();
        let out = transition_amplitudes(&g, &e0, 1).unwrap();
        assert!((out.amplitudes()[0] - c(0.0, -1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn w_states() {
        for n in [3, 5, 1024] {
            let w = w_state(n).unwrap();
            let want = 1.0 / (n as f64).sqrt();
            assert!(w.amplitudes.iter().all(|a| a.re == want && a.im == 0.0));
            assert_abs_diff_eq!(w.to_state().norm(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(w_state(3).unwrap().occupation_label(1), "|010>");
        assert!(w_state(1).is_err());
    }

    #[test]
    fn walk_distributions() {
        let g = grover_unitary(3).unwrap();
        let a = prepare_position(0, 3).unwrap();
        let d = walk_distribution(&g, &a, 1).unwrap();
        for (p, want) in d.probabilities.iter().zip([1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-14);
        }
        assert_eq!(walk_distribution(&g, &a, 0).unwrap().probabilities, vec![1.0, 0.0, 0.0]);
        let two = walk_distribution(&g, &a, 2).unwrap();
        assert_abs_diff_eq!(two.probabilities[0], 1.0, epsilon = 1e-14);
        assert!(walk_distribution(&g, &prepare_position(0, 2).unwrap(), 1).is_err());
    }

    #[test]
    fn amplitudes_on_momentum_state() {
        let g = grover_unitary(3).unwrap();
        let k0 = momentum_state(0.0, 3).unwrap().vector;
        let one = transition_amplitudes(&g, &k0, 1).unwrap();
        assert!(max_abs_diff_vec(one.amplitudes(), &(k0.amplitudes() * c(0.0, 1.0))) < 1e-14);
        assert_eq!(transition_amplitudes(&g, &k0, 0).unwrap(), k0);
        let four = transition_amplitudes(&g, &k0, 4).unwrap();
        assert!(max_abs_diff_vec(four.amplitudes(), k0.amplitudes()) < 1e-14);
    }

    #[test]
    fn shot_edge_cases() {
        let d = ExitDistribution::new(0, vec![1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]).unwrap();
        assert_eq!(sample_shots(&d, 0, 1).counts, vec![0, 0, 0]);
        let delta = ExitDistribution::new(0, vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(sample_shots(&delta, 1234, 9).counts, vec![1234, 0, 0]);
        let tail = ExitDistribution::new(0, vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sample_shots(&tail, 50, 9).counts, vec![0, 0, 50]);
    }

    #[test]
    fn shots_are_reproducible_and_streams_differ() {
        let d = ExitDistribution::new(0, vec![1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]).unwrap();
        let a = sample_shots(&d, 1000, 42);
        assert_eq!(a, sample_shots(&d, 1000, 42));
        assert_eq!(a.counts.iter().sum::<u64>(), 1000);
        assert_ne!(a.counts, sample_shots_stream(&d, 1000, 42, 1).counts);
    }

    #[test]
    fn shots_within_five_sigma() {
        let d = ExitDistribution::new(0, vec![1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]).unwrap();
        let r = sample_shots(&d, 90_000, 2024);
        for (n, p) in r.counts.iter().zip(&d.probabilities) {
            let mean = 90_000.0 * p;
            let sigma = (90_000.0 * p * (1.0 - p)).sqrt();
            assert!((*n as f64 - mean).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn csv_export() {
        let r = ShotRecord { shots: 3, counts: vec![1, 2, 0], seed: 0, stream: 0 };
        assert_eq!(r.to_csv(), "port,count\n0,1\n1,2\n2,0\n");
    }

    #[test]
    fn unit_draw_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let u = unit_draw(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn compact_matches_evolve() {
        let g = grover_unitary(3).unwrap();
        let psi = StateVector::normalized(CVector::from_vec(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.7)])).unwrap();
        assert!(
            max_abs_diff_vec(compact_evolve(&psi, 1).unwrap().amplitudes(), &(g.matrix() * psi.amplitudes())) < 1e-15
        );
        for steps in 0..=16 {
            let a = compact_evolve(&psi, steps).unwrap();
            let b = evolve(&g, &psi, steps).unwrap();
            assert!(max_abs_diff_vec(a.amplitudes(), b.amplitudes()) <= 1e-12);
        }
        assert!(compact_evolve(&prepare_position(0, 4).unwrap(), 1).is_err());
    }

    #[test]
    fn heading_alternates() {
        let sys = CompactSystem::default();
        let v = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(sys.run(&v, 3).1, Heading::Left);
        assert_eq!(sys.run(&v, 4).1, Heading::Right);
    }
}
