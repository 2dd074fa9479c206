//! Epicyclic first-order orbits of a hydrogen-like electron driven by
//! circularly polarized light, written in the 2D geometric algebra Cl(2,0),
//! with a direct numerical integrator to check them against.

pub mod clifford;
pub mod coefficients;
pub mod error;
pub mod model;
pub mod oracle;
pub mod orbit;

pub use clifford::{ComplexAmp, Multivector, Vec2};
pub use coefficients::{CoeffSet, Resonance, ResonancePolicy};
pub use error::{Error, Result};
pub use model::{AtomConfig, LightConfig, ScaledConfig};
pub use orbit::{period, solve, Harmonic, OrbitSolution, PeriodResult};
