//! q-connections on graded modules: the connection law, the kernel
//! decomposition witnessing freeness, and the iterated-connection identity.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::dalg::DElement;
use crate::error::QdpError;
use crate::field::Fp;
use crate::linalg::{Mat, RowSpace};

use super::presentation::GradedModuleData;

/// A degree `-step` connection on a graded module: degree-wise linear maps
/// `M_n -> M_{n-step}`. The step is 1 in the basic case and `b_r` for the
/// iterated connections coming from the vanishing of middle q-binomials.
#[derive(Debug, Clone)]
pub struct Connection {
    step: usize,
    /// maps[n]: M_n -> M_{n-step}; for n < step the target is zero and the
    /// matrix has zero rows.
    maps: Vec<Mat>,
}

impl Connection {
    pub fn new(step: usize, maps: Vec<Mat>) -> Self {
        Connection { step, maps }
    }

    /// The Taylor connection on the carrier of a free module: on each free
    /// summand it lowers the divided-power degree by `step`.
    ///
    /// Only valid when `data` is the carrier of a free module whose basis in
    /// degree n is indexed by `(generator, x^[n - d_j])`; this is exactly
    /// what `FPModule::free(..).carrier(..)` produces.
    pub fn taylor_on_free(
        data: &GradedModuleData,
        gen_degrees: &[usize],
        step: usize,
    ) -> Connection {
        let n_max = data.trunc();
        let mut maps = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let src: Vec<usize> = gen_degrees
                .iter()
                .copied()
                .filter(|&d| d <= n)
                .collect();
            let dst: Vec<usize> = if n >= step {
                gen_degrees
                    .iter()
                    .copied()
                    .filter(|&d| d <= n - step)
                    .collect()
            } else {
                Vec::new()
            };
            let mut m = Mat::zeros(dst.len(), src.len());
            if n >= step {
                // generator order is preserved by the filters
                let mut dst_pos = std::collections::BTreeMap::new();
                let mut counts = std::collections::BTreeMap::new();
                for (i, &d) in dst.iter().enumerate() {
                    let entry = counts.entry(d).or_insert(0usize);
                    dst_pos.insert((d, *entry), i);
                    *entry += 1;
                }
                let mut src_counts = std::collections::BTreeMap::new();
                for (j, &d) in src.iter().enumerate() {
                    let occurrence = {
                        let e = src_counts.entry(d).or_insert(0usize);
                        let v = *e;
                        *e += 1;
                        v
                    };
                    if n - d >= step {
                        if let Some(&i) = dst_pos.get(&(d, occurrence)) {
                            m.set(i, j, 1);
                        }
                    }
                }
            }
            maps.push(m);
        }
        Connection { step, maps }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn map(&self, n: usize) -> &Mat {
        &self.maps[n]
    }

    pub fn apply(&self, n: usize, v: &[Fp], data: &GradedModuleData) -> Vec<Fp> {
        self.maps[n].apply(v, data.ctx().field())
    }
}

/// Report of the connection-law verification.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionReport {
    pub checked_pairs: usize,
    pub violations: Vec<String>,
}

/// Verifies the q-connection law
/// `nabla(m a) = m d(a) + q^{step deg(a)} nabla(m) a`
/// as matrix identities for all `(degree, divided power)` pairs in the
/// window.
pub fn check_connection_law(data: &GradedModuleData, nabla: &Connection) -> ConnectionReport {
    let ctx = data.ctx();
    let f = ctx.field();
    let s = nabla.step();
    let n_max = data.trunc();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for n in 0..=n_max {
        for k in 1..=(n_max - n) {
            // lhs: M_n --x^[k]--> M_{n+k} --nabla--> M_{n+k-s}
            if n + k < s {
                continue;
            }
            let lhs = nabla.map(n + k).matmul(&data.act(k, n), f);
            // m d(x^[k]) = m x^[k-s] when k >= s
            let mut rhs = if k >= s && n + (k - s) <= n_max {
                data.act(k - s, n)
            } else {
                Mat::zeros(lhs.rows, lhs.cols)
            };
            // q^{s k} nabla(m) x^[k]
            if n >= s {
                let tw = f.pow(ctx.q(), (s * k) as u64);
                let term = data.act(k, n - s).matmul(nabla.map(n), f).scale(tw, f);
                rhs = rhs.add_mat(&term, f);
            }
            checked += 1;
            if lhs != rhs {
                violations.push(format!("law fails at degree n={n}, power k={k}"));
            }
        }
    }
    ConnectionReport {
        checked_pairs: checked,
        violations,
    }
}

/// The kernel decomposition certificate.
#[derive(Debug, Clone, Serialize)]
pub struct KernelDecomposition {
    /// kernel dimension in each degree of the window
    pub kernel_dims: Vec<usize>,
    pub max_kernel_degree: Option<usize>,
    /// degrees where the multiplication map kernel (x) subring -> M was
    /// verified an isomorphism
    pub iso_verified_to: usize,
    /// degrees where surjectivity of the connection was verified
    pub surjective_verified_to: usize,
    #[serde(skip)]
    pub kernel_bases: Vec<Mat>,
}

/// Computes `ker(nabla)` degree-wise, verifies that multiplication induces
/// a degree-wise isomorphism from the kernel tensored with the divided
/// power subring attached to the step (`D` itself for step 1, `D_{>= r}`
/// for step `b_r`), and verifies surjectivity of the connection — the
/// computational content of the connection decomposition.
pub fn connection_kernel_decompose(
    data: &GradedModuleData,
    nabla: &Connection,
) -> Result<KernelDecomposition, QdpError> {
    let ctx = data.ctx();
    let f = ctx.field();
    let report = check_connection_law(data, nabla);
    if let Some(first) = report.violations.first() {
        return Err(QdpError::NotAConnection(first.clone()));
    }
    let s = nabla.step();
    // which r has b_r = step
    let r = (0..=ctx.fl(s as i64) + 1)
        .find(|&r| ctx.b_value(r) as usize == s)
        .ok_or_else(|| {
            QdpError::InvalidInput(format!("step {s} is not a b-sequence value"))
        })?;
    let n_max = data.trunc();
    let mut kernel_bases = Vec::with_capacity(n_max + 1);
    let mut kernel_dims = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ker = if n < s {
            Mat::identity(data.dim(n))
        } else {
            nabla.map(n).nullspace(f)
        };
        kernel_dims.push(ker.rows);
        kernel_bases.push(ker);
    }
    // isomorphism check: sum over m with an allowed monomial degree n - m
    for n in 0..=n_max {
        let dim = data.dim(n);
        let mut rows = RowSpace::new(dim, *f);
        let mut count = 0usize;
        for m in 0..=n {
            let k = n - m;
            // degree-k monomial of D_{>= r}: mixed-radix digits all >= r
            let digits = super::invariants::b_digits(ctx, k);
            if digits.iter().any(|&(i, _)| i < r) {
                continue;
            }
            for row in 0..kernel_bases[m].rows {
                let mut v: Vec<Fp> = kernel_bases[m].row(row).to_vec();
                let mut deg = m;
                for &(i, c) in &digits {
                    let step_k = ctx.b_value(i) as usize;
                    for _ in 0..c {
                        v = data.act(step_k, deg).apply(&v, f);
                        deg += step_k;
                    }
                }
                count += 1;
                if !rows.push_row(v) {
                    return Err(QdpError::NotFree(format!(
                        "kernel-times-subring map not injective into degree {n}"
                    )));
                }
            }
        }
        if count != dim {
            return Err(QdpError::NotFree(format!(
                "kernel-times-subring map not surjective onto degree {n}: {count} of {dim}"
            )));
        }
    }
    // surjectivity of the connection in all visible degrees
    for n in s..=n_max {
        let rank = nabla.map(n).rank(f);
        if rank != data.dim(n - s) {
            return Err(QdpError::NotFree(format!(
                "connection not surjective onto degree {}",
                n - s
            )));
        }
    }
    let max_kernel_degree = kernel_dims
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(n, _)| n)
        .next_back();
    Ok(KernelDecomposition {
        kernel_dims,
        max_kernel_degree,
        iso_verified_to: n_max,
        surjective_verified_to: n_max,
        kernel_bases,
    })
}

/// Report of the iterated-connection identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IteratedCheckReport {
    pub iterations: usize,
    pub samples: usize,
    pub failures: Vec<String>,
}

/// Samples pairs `(m, a)` and compares `nabla^n(m a)` against
/// `sum_i q^{(n-i)(deg a - i)} [n choose i]_q nabla^{n-i}(m) d^i(a)`
/// exactly. The identity is for step-1 connections.
pub fn iterated_connection_check(
    data: &GradedModuleData,
    nabla: &Connection,
    iterations: usize,
    samples: usize,
    seed: u64,
) -> IteratedCheckReport {
    assert_eq!(nabla.step(), 1, "iterated identity is stated for step 1");
    let ctx = data.ctx();
    let f = ctx.field();
    let mut rng = StdRng::seed_from_u64(seed);
    let n_max = data.trunc();
    let mut failures = Vec::new();
    let mut done = 0usize;
    let mut attempts = 0usize;

    // nabla^k of a vector in the given degree; requires deg >= k
    let power = |mut v: Vec<Fp>, mut deg: usize, k: usize| -> (Vec<Fp>, usize) {
        for _ in 0..k {
            v = nabla.map(deg).apply(&v, f);
            deg -= 1;
        }
        (v, deg)
    };

    while done < samples && attempts < samples * 40 {
        attempts += 1;
        let deg_m = rng.gen_range(iterations..=iterations.max(n_max / 2));
        if deg_m > n_max || data.dim(deg_m) == 0 {
            continue;
        }
        let deg_a = rng.gen_range(0..=(n_max - deg_m));
        let m: Vec<Fp> = (0..data.dim(deg_m))
            .map(|_| rng.gen_range(0..ctx.ell()))
            .collect();
        let a_coeff = rng.gen_range(1..ctx.ell());
        let a = DElement::from_terms(ctx, &[(deg_a, a_coeff)]);
        done += 1;

        // lhs: nabla^n (m a)
        let ma: Vec<Fp> = data
            .act(deg_a, deg_m)
            .apply(&m, f)
            .iter()
            .map(|&x| f.mul(x, a_coeff))
            .collect();
        let (lhs, lhs_deg) = power(ma, deg_m + deg_a, iterations);

        // rhs: q-Pascal expansion
        let mut rhs = vec![0 as Fp; data.dim(lhs_deg)];
        for i in 0..=iterations.min(deg_a) {
            let da = a.derive(i);
            if da.is_zero() {
                continue;
            }
            let coeff_bin = ctx.q_binomial(iterations, i);
            if coeff_bin == 0 {
                continue;
            }
            let (da_deg, da_coeff) = da.terms().next().unwrap();
            let (w, wdeg) = power(m.clone(), deg_m, iterations - i);
            let prod = data.act(da_deg, wdeg).apply(&w, f);
            let exp = (iterations - i) as u64 * (deg_a - i) as u64;
            let tw = f.mul(f.pow(ctx.q(), exp), f.mul(coeff_bin, da_coeff));
            for (x, &p) in rhs.iter_mut().zip(prod.iter()) {
                *x = f.add(*x, f.mul(tw, p));
            }
        }
        if lhs != rhs {
            failures.push(format!(
                "iterated identity fails: deg(m)={deg_m} deg(a)={deg_a} n={iterations}"
            ));
        }
    }
    IteratedCheckReport {
        iterations,
        samples: done,
        failures,
    }
}

/// Checks that the Taylor-coefficient map is module-linear on sampled
/// pairs: both sides of `Phi(m a) = Phi(m) a` are expanded in coordinates
/// of the degree-wise quotient by the positive part times the module.
pub fn phi_linearity_check(
    data: &GradedModuleData,
    nabla: &Connection,
    samples: usize,
    seed: u64,
) -> IteratedCheckReport {
    assert_eq!(nabla.step(), 1);
    let ctx = data.ctx();
    let f = ctx.field();
    let n_max = data.trunc();
    // degree-wise projections onto M / D_+ M
    let mut projections = Vec::new();
    for n in 0..=n_max {
        let mut span = crate::linalg::RowSpace::new(data.dim(n), *f);
        for k in 1..=n {
            let m = data.act(k, n - k);
            for col in 0..m.cols {
                let v: Vec<Fp> = (0..m.rows).map(|r| m.get(r, col)).collect();
                span.push_row(v);
            }
        }
        projections.push(span);
    }
    // Phi(v in degree deg) = list over j of the reduced class of nabla^j v
    let phi = |mut v: Vec<Fp>, deg: usize| -> Vec<Vec<Fp>> {
        let mut out = Vec::new();
        let mut d = deg;
        loop {
            out.push(projections[d].reduce(v.clone()));
            if d == 0 {
                break;
            }
            v = nabla.map(d).apply(&v, f);
            d -= 1;
        }
        out
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < samples && attempts < samples * 40 {
        attempts += 1;
        let deg_m = rng.gen_range(0..=n_max / 2);
        if data.dim(deg_m) == 0 {
            continue;
        }
        let deg_a = rng.gen_range(0..=(n_max - deg_m));
        let coeff_a = rng.gen_range(1..ctx.ell());
        let m: Vec<Fp> = (0..data.dim(deg_m))
            .map(|_| rng.gen_range(0..ctx.ell()))
            .collect();
        done += 1;
        // lhs: Phi(m a)
        let ma: Vec<Fp> = data
            .act(deg_a, deg_m)
            .apply(&m, f)
            .iter()
            .map(|&x| f.mul(x, coeff_a))
            .collect();
        let lhs = phi(ma, deg_m + deg_a);
        // rhs: Phi(m) . a: (mbar (x) x^[j]) . c x^[k] =
        //      c [j+k choose j] mbar (x) x^[j+k]
        let pm = phi(m.clone(), deg_m);
        let mut rhs: Vec<Vec<Fp>> = lhs.iter().map(|v| vec![0; v.len()]).collect();
        for (j, comp) in pm.iter().enumerate() {
            let tw = f.mul(coeff_a, ctx.q_binomial(j + deg_a, j));
            if tw == 0 {
                continue;
            }
            // the component in degree deg_m - j moves to slot j + deg_a of
            // the product expansion; both expansions index slot by the
            // number of derivative steps, with the base degree matching
            let slot = j + deg_a;
            if slot < rhs.len() {
                for (x, &y) in rhs[slot].iter_mut().zip(comp.iter()) {
                    *x = f.add(*x, f.mul(tw, y));
                }
            }
        }
        if lhs != rhs {
            failures.push(format!(
                "Phi linearity fails at deg(m)={deg_m}, deg(a)={deg_a}"
            ));
        }
    }
    IteratedCheckReport {
        iterations: 1,
        samples: done,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dmod::presentation::FPModule;
    use crate::qarith::QContext;

    fn ctx(ell: u64, q: u64) -> Arc<QContext> {
        Arc::new(QContext::new(ell, q).unwrap())
    }

    #[test]
    fn taylor_connection_satisfies_law() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let c = ctx(ell, q);
            let m = FPModule::free(&c, vec![0]);
            let data = m.carrier(24);
            let nabla = Connection::taylor_on_free(&data, &[0], 1);
            let rep = check_connection_law(&data, &nabla);
            assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn kernel_of_taylor_on_d_is_degree_zero() {
        let c = ctx(3, 2);
        let data = FPModule::free(&c, vec![0]).carrier(24);
        let nabla = Connection::taylor_on_free(&data, &[0], 1);
        let dec = connection_kernel_decompose(&data, &nabla).unwrap();
        assert_eq!(dec.kernel_dims[0], 1);
        assert!(dec.kernel_dims[1..].iter().all(|&d| d == 0));
        assert_eq!(dec.max_kernel_degree, Some(0));
    }

    #[test]
    fn kernel_of_taylor_on_direct_sum() {
        let c = ctx(3, 2);
        let gens = vec![0, 2];
        let data = FPModule::free(&c, gens.clone()).carrier(24);
        let nabla = Connection::taylor_on_free(&data, &gens, 1);
        let dec = connection_kernel_decompose(&data, &nabla).unwrap();
        assert_eq!(dec.kernel_dims[0], 1);
        assert_eq!(dec.kernel_dims[2], 1);
        assert_eq!(dec.max_kernel_degree, Some(2));
        assert_eq!(dec.kernel_dims.iter().sum::<usize>(), 2);
    }

    #[test]
    fn iterated_step_connection_at_b1() {
        // nabla^{b_1} is a connection of step b_1; on the free module the
        // step-b_1 Taylor map realizes it
        let c = ctx(3, 2);
        let b1 = c.b_value(1) as usize;
        let data = FPModule::free(&c, vec![0]).carrier(24);
        let nabla = Connection::taylor_on_free(&data, &[0], b1);
        let rep = check_connection_law(&data, &nabla);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        let dec = connection_kernel_decompose(&data, &nabla).unwrap();
        // free over D_{>=1} on generators in degrees < b_1
        assert_eq!(dec.kernel_dims[..2], [1, 1]);
        assert!(dec.kernel_dims[2..].iter().all(|&d| d == 0));
    }

    #[test]
    fn broken_connection_rejected() {
        let c = ctx(3, 2);
        let data = FPModule::free(&c, vec![0]).carrier(10);
        let mut maps = Connection::taylor_on_free(&data, &[0], 1)
            .maps
            .clone();
        // corrupt one map
        maps[4] = maps[4].scale(2, c.field());
        let bad = Connection::new(1, maps);
        assert!(matches!(
            connection_kernel_decompose(&data, &bad),
            Err(QdpError::NotAConnection(_))
        ));
    }

    #[test]
    fn iterated_identity_on_samples() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let c = ctx(ell, q);
            let data = FPModule::free(&c, vec![0, 1]).carrier(30);
            let nabla = Connection::taylor_on_free(&data, &[0, 1], 1);
            for n in 1..=3usize {
                let rep = iterated_connection_check(&data, &nabla, n, 120, 42);
                assert!(rep.failures.is_empty(), "n={n}: {:?}", rep.failures);
            }
        }
    }
}
