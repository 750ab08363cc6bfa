//! The bigraded transfer-product algebra on general linear groups: the
//! degree-zero row realizes the q-divided power algebra, the restriction
//! map is a q-derivation, and each row is free over the degree-zero row
//! with controlled generator degrees.
//!
//! ```bash
//! cargo run --release --example transfer_algebra
//! ```

use qdp::gcoh::bigraded::{verify_free_row, verify_leibniz, verify_unit_row, BigradedE, Family};

fn main() {
    for (family, ell, tmax, nmax) in [
        (Family::Gl { q: 2 }, 3u64, 3usize, 3usize),
        (Family::Gl { q: 3 }, 2, 3, 3),
        (Family::Sym, 2, 2, 5),
    ] {
        let e = BigradedE::new(family, ell, tmax, nmax, 100_000_000).unwrap();
        println!("family {:?}, ell = {ell}:", family);
        for t in 0..=tmax {
            let dims: Vec<usize> = (0..=nmax).map(|n| e.dim(t, n)).collect();
            println!("  dims of H^{t}(G_n): {:?}", dims);
        }

        let unit = verify_unit_row(&e, 5).unwrap();
        println!(
            "  degree-zero products match Gaussian binomials: {} checks, {} failures",
            unit.checked,
            unit.failures.len()
        );

        let rep = verify_leibniz(&e).unwrap();
        println!(
            "  twisted Leibniz rule d(xy) = x d(y) + q^m d(x) y: {} pairs, {} violations",
            rep.pairs_checked,
            rep.violations.len()
        );
        println!(
            "  restriction map surjective in every cell: {}",
            rep.surjectivity_failures.is_empty()
        );

        for t in 0..=tmax {
            let fr = verify_free_row(&e, t).unwrap();
            println!(
                "  row t = {t}: free with kernel degrees {:?} within bound {}",
                fr.kernel_dims, fr.degree_bound
            );
        }
        println!();
    }
}
