//! Exact q-divided power algebra, q-connections on finitely presented
//! graded modules, periodicity invariants and bounds, and a desk-scale
//! finite-group cohomology oracle for the transfer-product algebra on
//! `GL_n(F_q)` and symmetric-group cohomology.
//!
//! Everything is computed in exact arithmetic over a prime field; there
//! are no tolerances anywhere. Start with the `examples/` directory for
//! runnable tours of each capability, or the `qdp` binary for the CLI.

pub mod dalg;
pub mod error;
pub mod field;
pub mod gf;
pub mod linalg;
pub mod qarith;
pub mod report;
pub mod specht;
pub mod verify;

pub mod dmod;
pub mod gcoh;
pub use error::QdpError;
pub use qarith::QContext;
pub mod cli;
