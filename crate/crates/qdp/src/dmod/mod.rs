//! Finitely presented graded modules over the q-divided power algebra:
//! Hilbert functions, q-connections and the kernel decomposition, the
//! periodicity invariants `g_r`, `epsilon`, `lambda`, and the bound
//! calculators for maps, homology, spectral sequences, VI-modules and
//! unipotent Specht modules.

mod bounds;
mod connection;
mod invariants;
mod presentation;

pub use bounds::{
    bound_homology_epsilon, bound_spectral_convergence, bound_spectral_epsilon,
    bound_unipotent, bound_vimod, SpectralWindow, UnipotentBound, VimodBound,
};
pub use connection::{
    check_connection_law, connection_kernel_decompose, iterated_connection_check,
    phi_linearity_check, Connection, ConnectionReport, IteratedCheckReport,
    KernelDecomposition,
};
pub use invariants::{epsilon_lambda, g_r, predict_period, EpsilonLambda, PeriodicityCertificate};
pub use presentation::{FPModule, GradedModuleData, ModuleJson};
