//! Time integration of `u_tt = Δ_x u + Δ_K u + F` and its linear variants.

pub mod config;
pub mod data;
pub mod integrator;
pub mod run;
pub mod snapshot;

pub use config::{Mode, RunConfig};
pub use data::{make_admissible_data, InitialData};
pub use run::{run, step, RunOutput};
pub use snapshot::{load_snapshot, save_snapshot};
