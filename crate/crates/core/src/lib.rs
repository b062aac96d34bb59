//! Decentralized primal-dual solvers for monotone inclusions and convex-concave
//! min-max problems over networks of agents.
//!
//! The crate is organized bottom-up:
//!
//! - [`graph`] and [`mixing`]: agent networks and certified mixing matrices.
//! - [`operators`]: resolvents, smooth couplings and forward operators.
//! - [`pdtr`]: the centralized primal-dual twice-reflected method and the
//!   baselines it reduces to.
//! - [`inclusion`] and [`minmax`]: the decentralized solvers.
//! - [`harness`]: a bulk-synchronous simulator that enforces
//!   neighbor-only communication.
//! - [`experiment`]: configuration files and the commands behind the
//!   `dminmax` binary.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod harness;
pub mod inclusion;
pub mod linalg;
pub mod minmax;
pub mod mixing;
pub mod operators;
pub mod pdtr;
pub mod trace;

pub use error::{Error, Result};
