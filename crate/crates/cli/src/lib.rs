//! Batch front end: load game, policy and reward documents, run one job and
//! emit a JSON report.

pub mod docs;
pub mod run;

pub use docs::{CliError, GameDoc, LoadedGame, PolicyDoc, RewardDoc};
pub use run::{run, Command, JobSpec, Outcome};
