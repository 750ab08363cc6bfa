//! q-connections on graded modules: the connection law, the iterated
//! identity with Gaussian binomial coefficients, and the kernel
//! decomposition certifying freeness.
//!
//! ```bash
//! cargo run --release --example connections
//! ```

use std::sync::Arc;

use qdp::dmod::{
    check_connection_law, connection_kernel_decompose, iterated_connection_check,
    phi_linearity_check, Connection, FPModule,
};
use qdp::qarith::QContext;

fn main() {
    let ctx = Arc::new(QContext::new(3, 2).unwrap());
    let gens = vec![0usize, 2];
    let module = FPModule::free(&ctx, gens.clone());
    let data = module.carrier(40);
    let nabla = Connection::taylor_on_free(&data, &gens, 1);

    let law = check_connection_law(&data, &nabla);
    println!(
        "connection law checked on {} (degree, power) pairs: {} violations",
        law.checked_pairs,
        law.violations.len()
    );

    let dec = connection_kernel_decompose(&data, &nabla).unwrap();
    println!(
        "kernel dimensions by degree: {:?} (total {})",
        &dec.kernel_dims[..6],
        dec.kernel_dims.iter().sum::<usize>()
    );
    println!(
        "multiplication from the kernel is an isomorphism up to degree {}",
        dec.iso_verified_to
    );
    println!(
        "the connection is surjective onto every degree up to {}",
        dec.surjective_verified_to
    );

    for n in 1..=3usize {
        let rep = iterated_connection_check(&data, &nabla, n, 200, 7 + n as u64);
        println!(
            "iterated identity at n = {n}: {} samples, {} failures",
            rep.samples,
            rep.failures.len()
        );
    }

    let rep = phi_linearity_check(&data, &nabla, 200, 99);
    println!(
        "Taylor-coefficient map is module-linear: {} samples, {} failures",
        rep.samples,
        rep.failures.len()
    );

    // iterated connections at a b-sequence step have their own step size
    let b1 = ctx.b_value(1) as usize;
    let free = FPModule::free(&ctx, vec![0]);
    let data1 = free.carrier(40);
    let step = Connection::taylor_on_free(&data1, &[0], b1);
    let law = check_connection_law(&data1, &step);
    println!(
        "\nstep-{b1} connection (iterate at the first b-value): {} violations",
        law.violations.len()
    );
    let dec = connection_kernel_decompose(&data1, &step).unwrap();
    println!(
        "its kernel lives in degrees < {b1}: dims {:?}",
        &dec.kernel_dims[..4]
    );
}
