//! The q-divided power algebra: products, the degree-lowering derivation,
//! Taylor expansion, and the y-presentation with computed units.
//!
//! ```bash
//! cargo run --release --example divided_powers
//! ```

use std::sync::Arc;

use qdp::dalg::DElement;
use qdp::qarith::QContext;

fn main() {
    let ctx = Arc::new(QContext::new(3, 2).unwrap());
    let show = |label: &str, e: &DElement| {
        let terms: Vec<String> = e
            .terms()
            .map(|(d, c)| {
                if c == 1 {
                    format!("x^[{d}]")
                } else {
                    format!("{c} x^[{d}]")
                }
            })
            .collect();
        println!(
            "  {label} = {}",
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        );
    };

    println!("products over ell = 3, q = 2:");
    let x1 = DElement::basis(&ctx, 1);
    let x2 = DElement::basis(&ctx, 2);
    show("x^[1] x^[1]", &x1.mul(&x1).unwrap()); // (1+q) = 0 mod 3
    show("x^[1] x^[2]", &x1.mul(&x2).unwrap()); // [3 choose 1] = 7 = 1
    show("x^[2] x^[2]", &x2.mul(&x2).unwrap());

    println!("\nthe derivation and its iterates:");
    let e = DElement::from_terms(&ctx, &[(1, 1), (7, 1)]);
    show("e", &e);
    show("d(e)", &e.derive(1));
    show("d^2(e)", &e.derive(2));

    println!("\nTaylor expansion (constant term of each iterated derivative):");
    let a = DElement::from_terms(&ctx, &[(1, 2), (3, 1)]);
    show("a", &a);
    println!("  pairs (coefficient, degree): {:?}", a.taylor_expand());
    let back = DElement::from_taylor(&ctx, &a.taylor_expand());
    assert_eq!(back, a);
    println!("  reconstruction recovers a exactly");

    println!("\ny-presentation (generators y_i = x^[b_i], units computed):");
    for n in [3usize, 7, 12] {
        let out = DElement::basis(&ctx, n).to_y_basis();
        let (u, mono) = &out[0];
        let factors: Vec<String> = mono
            .exponents()
            .iter()
            .map(|&(i, c)| {
                if c == 1 {
                    format!("y_{i}")
                } else {
                    format!("y_{i}^{c}")
                }
            })
            .collect();
        println!("  x^[{n}] = {} * {}", u, factors.join(" "));
    }

    println!("\nnilpotency of the generators (y_i^(b_(i+1)/b_i) = 0):");
    for i in 0..=1usize {
        let e = (ctx.b_value(i + 1) / ctx.b_value(i)) as usize;
        let gen = DElement::basis(&ctx, ctx.b_value(i) as usize);
        let mut acc = DElement::one(&ctx);
        for _ in 0..e {
            acc = acc.mul(&gen).unwrap();
        }
        println!("  y_{i}^{e} = {}", if acc.is_zero() { "0" } else { "nonzero!" });
    }
}
