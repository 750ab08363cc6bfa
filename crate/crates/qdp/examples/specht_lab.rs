//! Flag modules, partial-sum maps, unipotent Specht dimensions, their
//! cohomology series, and exact polynomial fits in q^n.
//!
//! ```bash
//! cargo run --release --example specht_lab
//! ```

use qdp::specht::{
    fit_dimension_polynomial, flag_count, specht_cohomology_series, specht_dim,
    specht_dim_sparse, Composition,
};

fn main() {
    println!("flag counts over F_q (exact integers):");
    for (mu, q) in [(vec![1usize, 1], 2u64), (vec![1, 1, 1], 2), (vec![2, 1], 3)] {
        let c = Composition::new(mu.clone());
        println!("  type {:?} over F_{q}: {}", c.parts(), flag_count(&c, q));
    }

    println!("\nunipotent Specht dimensions (kernel intersections, exact):");
    for (mu, q, ell) in [
        (vec![1usize, 1], 2u64, 3u64),
        (vec![1, 1], 3, 2),
        (vec![1, 1, 1], 2, 3),
        (vec![1, 1, 1], 3, 2),
        (vec![2, 1], 2, 3),
        (vec![3], 2, 3),
    ] {
        let c = Composition::new(mu.clone());
        let dim = specht_dim(&c, q, ell, 10_000_000).unwrap();
        println!("  mu = {:?}, q = {q}, ell = {ell}: dim = {dim}", c.parts());
    }
    println!("  (the staircase partitions give the Steinberg dimensions q^3, ...)");

    println!("\ncohomology series with the periodicity prediction:");
    let mu = Composition::new(vec![1]);
    let (series, bound) = specht_cohomology_series(&mu, 0, 2, 3, 1..=3, 10_000_000).unwrap();
    for e in &series {
        println!(
            "  n = {}: dim M = {}, dim H^0 = {:?}",
            e.n, e.dim_coefficient, e.dim_cohomology
        );
    }
    println!(
        "  predicted eventual period {} from n >= {} (far beyond desk scale)",
        bound.period, bound.onset
    );

    println!("\npolynomial fits in X = q^n:");
    for (mu, q, ell, lo, hi) in [
        (vec![1usize], 2u64, 3u64, 2usize, 5usize),
        (vec![2], 2, 3, 4, 7),
        (vec![1, 1], 2, 3, 3, 6),
    ] {
        let c = Composition::new(mu.clone());
        let series: Vec<(usize, u64)> = (lo..=hi)
            .map(|n| {
                let padded = c.padded(n).unwrap();
                (n, specht_dim_sparse(&padded, q, ell, 50_000_000).unwrap() as u64)
            })
            .collect();
        let fit = fit_dimension_polynomial(&series, q).unwrap();
        println!(
            "  mu = {:?}: series {:?} fits degree {} with coefficients {:?}",
            c.parts(),
            series,
            fit.degree,
            fit.coefficient_strings()
        );
    }
}
