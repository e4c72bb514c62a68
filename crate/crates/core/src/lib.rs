//! Weighted quasi-arithmetic means and the scales of means invariant under a
//! neutral map and all of its f-roots.
//!
//! * [`generator`]: expression-tree generators with exact domain, range and
//!   monotonicity propagation.
//! * [`mean`]: weighted samples, literal and log-domain means.
//! * [`neutral`]: maps `f^-1(a f + b)`, their k-th f-roots and root ladders.
//! * [`family`]: the one-parameter invariant generator families.
//! * [`solver`]: inversion of `beta -> mean`.
//! * [`verify`]: randomized property suites.
//! * [`cli`]: the `qam` command-line front end.

mod bisect;
pub mod cli;
pub mod error;
pub mod family;
pub mod generator;
pub mod interval;
pub mod mean;
pub mod neutral;
pub mod solver;
pub mod verify;

pub use error::{Error, Extreme, Result};
pub use family::{build, Branch, FamilyCase, FamilySpec, ScaleFamily, ScaleValue};
pub use generator::{is_affine_equivalent, AffineWitness, Expr, Generator, Monotonicity};
pub use interval::Interval;
pub use mean::{mean, power_mean, WeightedSample};
pub use neutral::{is_neutral_for, NeutralMap, NeutralityCheck};
pub use solver::{solve, sweep};
