//! Local primal-dual interior point method for nonlinear semidefinite programs
//!
//! ```text
//! min f(x)  s.t.  G(x) ⪰ 0,  h(x) = 0
//! ```
//!
//! with search directions from the Newton linearization of the scaled
//! complementarity condition `Ĝ^{1/2} Ŷ Ĝ^{1/2} = μI`, where `Ĝ = P G Pᵀ` and
//! `Ŷ = P⁻ᵀ Y P⁻¹` for one of five scaling matrices `P`.

pub mod error;
pub mod instances;
pub mod model;
pub mod newton;
pub mod pathfollow;
pub mod regularity;
pub mod report;
pub mod scaling;
pub mod symcore;
pub mod verify;

pub use error::{Error, Result};
pub use instances::{builtin, load_instance, AffineSdp, InstanceSpec};
pub use model::{Iterate, Problem};
pub use newton::Direction;
pub use pathfollow::{run, run_with_reference, RunOutcome, SolverConfig, Status, Trace};
pub use regularity::{regularity_report, RegularityReport};
pub use scaling::ScalingKind;
pub use symcore::SymMatrix;
