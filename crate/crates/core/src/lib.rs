pub mod chain;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod linalg;
pub mod multiport;
pub mod netspec;
pub mod scattering;
pub mod su3;
