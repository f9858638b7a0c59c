//! Solver for the Ising-type spinor boundary value problem on multiply
//! connected circle domains.
//!
//! Given a circle domain Omega and square-integrable boundary data f, the
//! library produces the holomorphic F on Omega with
//!
//! ```text
//! Im( (F - f) nu^{1/2} ) = 0   on each boundary circle,
//! ```
//!
//! where nu is the outward unit normal. The construction works by
//! induction over connectivity: an explicit inverse on the disk, a
//! boundary operator of the form identity-plus-compact on a distinguished
//! circle, and superposition of per-component solutions. On top of the
//! solver sits the induced conformal metric ell(w) obtained from the
//! regular part of the solution with a simple pole.

pub mod boundary;
pub mod disk;
pub mod error;
pub mod geometry;
pub mod holo;
pub mod io;
pub mod metric;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
