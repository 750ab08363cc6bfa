//! Desk-scale modular cohomology of finite groups: bar-resolution oracle,
//! lean free resolutions, restriction/corestriction/inflation/conjugation,
//! cross products, Sylow-reduced stable elements for large groups, the
//! transfer-product algebra on the GL and symmetric families, and the
//! verification suites for its q-derivation structure.

pub mod group;
pub mod bigraded;
pub mod cohomology;
pub mod gmodule;
pub mod lemmas;
pub mod maps;
pub mod stable;
pub mod resolution;

pub use group::{levi_gl, levi_sym, FiniteGroup, GroupHom, GroupSpec, LeviData, Universe};
