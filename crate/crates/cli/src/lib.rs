//! Driver library behind the `quaddiv` binary: run configuration, the
//! manufactured-solution convergence study and the verification report.

pub mod config;
pub mod converge;
pub mod verify;

pub use config::{MeshSource, RunConfig};
pub use converge::{run_convergence, ConvergenceRow, ConvergenceStudy};
pub use verify::{local_checks, mesh_info, run_verify};
