//! Gaussian binomials, the order of q, the b-sequence and the threshold
//! function: the coefficient layer everything else is built on.
//!
//! ```bash
//! cargo run --release --example q_combinatorics
//! ```

use std::sync::Arc;

use qdp::qarith::{order_of_q, q_binomial_int, QContext};

fn main() {
    let ctx = Arc::new(QContext::new(3, 2).unwrap());
    println!("context: ell = {}, q = {}, w = order of q = {}", ctx.ell(), ctx.q_int(), ctx.w());

    println!("\nGaussian binomials [4 choose m]_2 over the integers and mod 3:");
    for m in 0..=4usize {
        println!(
            "  m = {m}: integer {} | mod 3 {}",
            q_binomial_int(4, m, 2),
            ctx.q_binomial(4, m)
        );
    }

    // the q-Pascal identity holds exactly in F_ell with no division
    let (n, m) = (17usize, 6usize);
    let lhs = ctx.q_binomial(n, m);
    let rhs = ctx.field().add(
        ctx.field().mul(ctx.q_pow(m as u64), ctx.q_binomial(n - 1, m)),
        ctx.q_binomial(n - 1, m - 1),
    );
    println!("\nq-Pascal at ({n}, {m}): {lhs} = {rhs}");

    println!("\nb-sequence and thresholds for (ell, q) pairs:");
    for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
        let c = QContext::new(ell, q).unwrap();
        let bs: Vec<u64> = (0..5).map(|i| c.b_value(i)).collect();
        println!(
            "  ell = {ell}, q = {q} (w = {}): b = {:?}, fl(5) = {}, fl(19) = {}",
            c.w(),
            bs,
            c.fl(5),
            c.fl(19)
        );
    }

    println!("\nmiddle binomials vanish at b-sequence steps (ell = 3, q = 2):");
    for r in 1..=2usize {
        let n = ctx.b_value(r) as usize;
        let row: Vec<u64> = (0..=n).map(|i| ctx.q_binomial(n, i)).collect();
        println!("  [b_{r} = {n} choose i]_q mod 3: {:?}", row);
    }
    println!("\nthis vanishing is what makes iterated derivations act like derivations");
    println!("order_of_q(7, 2) = {}", order_of_q(7, 2).unwrap());
}
