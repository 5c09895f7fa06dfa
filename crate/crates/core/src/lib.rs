//! Morita equivalences of smooth noncommutative tori and their equivariant
//! spectral triples: exact `SO(n,n|Z)` arithmetic on θ, the symbolic torus
//! algebra, Dirac data transforms, and a numerical Heisenberg module.

pub mod clifford;
pub mod dirac;
pub mod finite_rep;
pub mod heisenberg;
pub mod linalg;
pub mod sonn;
pub mod torus;
