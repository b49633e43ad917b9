//! Induced emission of a two-level atom falling through a detuned cavity.

pub mod airy;
mod airy_anchors;
pub mod analysis;
pub mod bvp;
pub mod classical;
mod dop853_tableau;
pub mod error;
pub mod linalg;
pub mod mesa;
pub mod model;
pub mod ode;
pub mod overlap;
pub mod scattering;

pub use analysis::{Peak, PeakSet, SolverChoice, Sweep, SweepSpec, SweepVar};
pub use error::{MazerError, Result};
pub use linalg::Scaled;
pub use mesa::{solve_mesa, MesaSolution};
pub use model::{DimensionlessParams, DressedFrame, ModeKind, ModeProfile, PhysicalParams};
pub use scattering::{InteriorSample, ScatteringSolution, Solver};
