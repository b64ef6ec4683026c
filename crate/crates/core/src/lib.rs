//! Two-party communication protocols for distributed set joins.
//!
//! Alice holds `A`, Bob holds `B`, and they want the composition join `A∗B`
//! (Boolean matrix multiplication) or the F2 product `AB`. This crate simulates
//! both parties and accounts for every classical bit and qubit they exchange:
//!
//! - [`f2core`]: bit-packed F2 / Boolean matrices, promise instances, oracles.
//! - [`ledger`]: the communication ledger every protocol charges.
//! - [`qsim`]: statevector simulation of distributed Grover search, set
//!   disjointness, graph collision and search over communication instances.
//! - [`joins`]: the output-sensitive Boolean matrix multiplication protocol and
//!   the classical F2 matrix multiplication protocol (Freivalds column
//!   detection plus sparse recovery).
//! - [`reductions`]: constructors and validators for the lower-bound embeddings.
//! - [`fit`]: log-log exponent fitting used by the scaling experiments.

pub mod f2core;
pub mod fit;
pub mod joins;
pub mod ledger;
pub mod qsim;
pub mod reductions;
pub mod seeds;

pub use f2core::{BitMatrix, BitVector, F2Error, JoinInstance, Semiring};
pub use ledger::{CommLedger, Direction, Kind};
