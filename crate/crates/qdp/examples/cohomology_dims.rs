//! Desk-scale group cohomology: dimensions over a prime field for small
//! and medium groups, with the Sylow-reduced route cross-checked against
//! the direct one.
//!
//! ```bash
//! cargo run --release --example cohomology_dims
//! ```

use qdp::gcoh::group::FiniteGroup;
use qdp::gcoh::stable::CohCtx;

fn main() {
    println!("trivial coefficients, t = 0..4\n");

    let cases: Vec<(&str, std::sync::Arc<FiniteGroup>, u64)> = vec![
        ("GL_1(F_4) = Z/3, ell = 3", FiniteGroup::gl(1, 4).unwrap(), 3),
        ("GL_2(F_2), ell = 3", FiniteGroup::gl(2, 2).unwrap(), 3),
        ("GL_2(F_3), ell = 2", FiniteGroup::gl(2, 3).unwrap(), 2),
        ("GL_3(F_2), ell = 3", FiniteGroup::gl(3, 2).unwrap(), 3),
        ("Sym(4), ell = 2", FiniteGroup::symmetric(4), 2),
        ("Sym(5), ell = 2", FiniteGroup::symmetric(5), 2),
        ("GL_3(F_2), ell = 5 (coprime order)", FiniteGroup::gl(3, 2).unwrap(), 5),
    ];
    for (label, g, ell) in cases {
        let ctx = CohCtx::new(ell, 4, 10_000_000).unwrap();
        let h = ctx.handle(&g);
        println!("H^*({label}): {:?}", h.dims());
    }

    // a large group: 11232 elements, Sylow-reduced
    let g = FiniteGroup::gl(3, 3).unwrap();
    let ctx = CohCtx::new(2, 3, 10_000_000).unwrap();
    let h = ctx.handle(&g);
    println!(
        "\nH^*(GL_3(F_3), F_2) via stable elements in its order-{} Sylow subgroup: {:?}",
        g.sylow(2).order(),
        h.dims()
    );

    // the two routes agree where both are affordable
    let s4 = FiniteGroup::symmetric(4);
    let ctx = CohCtx::new(2, 3, 10_000_000).unwrap();
    let direct = ctx.handle(&s4).dims();
    let stable = ctx.build_stable_for_tests(&s4).dims();
    println!("\nSym(4), ell = 2: direct {:?} vs Sylow-reduced {:?}", direct, stable);
    assert_eq!(direct, stable);
}
