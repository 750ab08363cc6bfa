//! The two diagram identities behind the derivation structure, checked
//! exactly: the double-coset decomposition of restriction after
//! corestriction, and the inflation-transfer index ratio.
//!
//! ```bash
//! cargo run --release --example diagram_lemmas
//! ```

use qdp::gcoh::lemmas::{coeffaceability_instance, verify_mid_portion};

fn main() {
    println!("restriction of a transfer through the maximal parabolic");
    println!("decomposes over exactly two double cosets:\n");
    for (n, m, q, ell) in [
        (1usize, 1usize, 2u64, 3u64),
        (1, 2, 2, 3),
        (2, 1, 2, 3),
        (1, 1, 3, 2),
        (1, 2, 3, 2),
        (2, 1, 3, 2),
    ] {
        for t in 0..=2usize {
            let rep = verify_mid_portion(n, m, t, q, ell, 100_000_000).unwrap();
            if t == 0 {
                println!(
                    "  (n, m) = ({n}, {m}), q = {q}, ell = {ell}: {} double cosets",
                    rep.double_cosets
                );
            }
            println!(
                "    t = {t}: middle = top + bottom on {} basis classes: {}",
                rep.dims_checked,
                if rep.holds { "holds" } else { "FAILS" }
            );
        }
    }

    println!("\ncorestriction against inflation picks up the radical index:");
    for (q, ell) in [(2u64, 3u64), (3, 2)] {
        let (_ctx, reps) = coeffaceability_instance(1, 1, q, ell, 2, 100_000_000).unwrap();
        for rep in &reps {
            println!(
                "  q = {q}, ell = {ell}, t = {}: ratio = q^m = {} mod {ell}: {}",
                rep.t,
                rep.expected_ratio,
                if rep.holds { "holds" } else { "FAILS" }
            );
        }
    }
}
