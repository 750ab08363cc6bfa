//! A wider stability window: the transfer algebra over GL_n(F_2) out to
//! n = 4 (a 20160-element top group), showing the kernel of the
//! restriction map staying within its generation bound and the dimensions
//! stabilizing.
//!
//! This is the heaviest example; expect a couple of minutes.
//!
//! ```bash
//! cargo run --release --example stability_window
//! ```

use qdp::gcoh::bigraded::{verify_free_row, BigradedE, Family};

fn main() {
    let e = BigradedE::new(Family::Gl { q: 2 }, 3, 3, 4, 200_000_000).unwrap();
    for t in 0..=3usize {
        let dims: Vec<usize> = (0..=4).map(|n| e.dim(t, n)).collect();
        println!("dims of H^{t}(GL_n(F_2), F_3) for n = 0..4: {:?}", dims);
    }
    for t in 0..=3usize {
        let fr = verify_free_row(&e, t).unwrap();
        println!(
            "row t = {t}: kernel degrees {:?}, bound {} (q = 2 gives 2t), stable: {}",
            fr.kernel_dims,
            fr.degree_bound,
            fr.stability_failures.is_empty()
        );
    }
}
