//! The bound calculators: homology, spectral sequences, finitely
//! generated coefficient systems, and the unipotent Specht family.
//!
//! ```bash
//! cargo run --release --example periodicity_bounds
//! ```

use qdp::dmod::{
    bound_homology_epsilon, bound_spectral_convergence, bound_spectral_epsilon,
    bound_unipotent, bound_vimod, SpectralWindow,
};
use qdp::qarith::QContext;

fn main() {
    let c32 = QContext::new(3, 2).unwrap();
    let c23 = QContext::new(2, 3).unwrap();

    println!("homology of a three-term complex (ell = 3, q = 2):");
    println!(
        "  eps bound for eps = (0,0,0), lambda = (5,1): {}",
        bound_homology_epsilon(0, 0, 0, 5, 1, &c32)
    );

    println!("\nspectral sequence window (ell = 3, q = 2):");
    let window = SpectralWindow {
        eps1: vec![(0, 0), (1, 2), (2, 0)],
        fl: vec![(0, 1), (1, 1)],
    };
    println!(
        "  page-2 bound at t = 1: {}",
        bound_spectral_epsilon(&window, 1, 1)
    );
    let wide = SpectralWindow {
        eps1: (0..8).map(|t| (t, 0)).collect(),
        fl: (0..8).map(|t| (t, 5)).collect(),
    };
    println!(
        "  convergence bound at t = 4 with column radius 1: {}",
        bound_spectral_convergence(&wide, 4, 1)
    );

    println!("\ncoefficient-system periodicity (generation t0, relations t1, degree delta):");
    for (t, t0, t1, delta, ctx, label) in [
        (1usize, 0usize, 0usize, 1usize, &c32, "ell=3, q=2"),
        (2, 0, 0, 1, &c23, "ell=2, q=3"),
    ] {
        let b = bound_vimod(t, t0, t1, delta, ctx);
        println!(
            "  t = {t}, delta = {delta} ({label}): lambda <= {}, eps <= {}, \
             period {} from degree {}",
            b.lambda_bound, b.epsilon_bound, b.period, b.onset
        );
    }

    println!("\nunipotent Specht periodicity:");
    for (t, d, ctx, label) in [
        (0usize, 1usize, &c32, "ell=3, q=2"),
        (0, 1, &c23, "ell=2, q=3"),
        (2, 0, &c32, "ell=3, q=2"),
    ] {
        let b = bound_unipotent(t, d, ctx);
        println!(
            "  t = {t}, |mu| = {d} ({label}): s = {}, period {} in the range n >= {}",
            b.s, b.period, b.onset
        );
    }
}
