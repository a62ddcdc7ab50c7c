//! Computable rigidity diagnostics for generalized polynomial-like maps.
//!
//! The crate is organised bottom-up:
//!
//! * [`map_engine`] holds [`MapSpec`], evaluation, critical orbits, degenerate
//!   (Chebyshev / power map) classification and Julia set approximations.
//! * [`orbits`] enumerates periodic cycles and their absolute multipliers.
//! * [`markov`] builds symbolic hyperbolic subsystems (the avoiding sets
//!   `A_N` and the bridged sets `B_n`) and certifies their expansion.
//! * [`thermo`] computes pressure, entropy, Bowen dimension and the
//!   dimension of the measure of maximal entropy on those subsystems.
//! * [`rigidity`] decides cohomology, constant-multiplier, affine-structure
//!   and multiplier-preservation criteria, and chains them into a verdict for
//!   a pair of maps.

pub mod error;
pub mod map_engine;
pub mod markov;
pub mod orbits;
pub mod poly;
pub mod region;
pub mod rigidity;
pub mod roots;
pub mod thermo;

mod grid;

pub use error::{Error, Result};
pub use map_engine::{Branch, CriticalOrbit, DegenerateFlags, JuliaApprox, MapSpec};
pub use markov::{BridgePlan, Expansion, MarkovModel, PeriodicWord, State, Transition};
pub use num_complex::Complex64;
pub use orbits::PeriodicOrbit;
pub use poly::Poly;
pub use region::Region;
pub use rigidity::{RigidityVerdict, VerdictKind};
pub use thermo::{PotentialSpec, ThermoReport};
