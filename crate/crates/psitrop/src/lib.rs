//! Exact-arithmetic computational tropical geometry on moduli spaces of
//! tropical curves: combinatorial moduli fans, balancing, divisor-cycle
//! intersections, lattice-index push-forwards, and the psi-class degree
//! computations in genus zero and genus one.

pub mod acceptance;
pub mod covers;
pub mod crossratio;
pub mod cycles;
pub mod elliptic;
pub mod error;
pub mod floors;
pub mod graph;
pub mod lattice;
pub mod moduli;
pub mod pencil;
pub mod psi;

pub use error::{Error, Result};
