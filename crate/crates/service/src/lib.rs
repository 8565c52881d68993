//! Command-line entry points and the local HTTP API over a correlation
//! panel project.
//!
//! All state lives in a [`Store`]: one writer at a time applies a mutation
//! to a private copy of the project, then publishes it as a new immutable
//! snapshot with the next revision number. Readers always see a complete
//! snapshot and never block the writer for longer than a pointer swap.

pub mod api;
pub mod cli;
pub mod replay;
pub mod store;

pub use api::router;
pub use store::{Snapshot, Store, StoreError};
