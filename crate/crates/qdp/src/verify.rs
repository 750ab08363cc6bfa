//! The default verification grid: q-combinatorics identities, divided
//! power algebra laws, graded-module invariants on constructed modules
//! and extensions, and the full cohomology suites over both families.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Deserialize;

use crate::dalg::DElement;
use crate::dmod::{
    check_connection_law, connection_kernel_decompose, epsilon_lambda,
    iterated_connection_check, phi_linearity_check, predict_period, Connection, FPModule,
};
use crate::error::QdpError;
use crate::gcoh::bigraded::{verify_free_row, verify_leibniz, verify_unit_row, BigradedE, Family};
use crate::gcoh::lemmas::{coeffaceability_instance, verify_mid_portion};
use crate::qarith::QContext;
use crate::report::{CheckResult, Report};

/// Configuration of a verification run.
#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub budget: u64,
    /// restrict the grid to one q (1 means the symmetric family)
    pub only_q: Option<u64>,
    /// restrict the grid to one ell
    pub only_ell: Option<u64>,
    /// truncation for the module property suites
    pub truncation: usize,
    /// sampled checks per context
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed: 714,
            budget: 10_000_000,
            only_q: None,
            only_ell: None,
            truncation: 60,
            samples: 500,
        }
    }
}

/// The grid contexts: `q = 1` is the symmetric family.
fn grid_cells(config: &RunConfig) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for q in [1u64, 2, 3, 4] {
        for ell in [2u64, 3, 5] {
            if q > 1 && q % ell == 0 {
                continue;
            }
            if let Some(fq) = config.only_q {
                if q != fq {
                    continue;
                }
            }
            if let Some(fl) = config.only_ell {
                if ell != fl {
                    continue;
                }
            }
            out.push((q, ell));
        }
    }
    out
}

/// Runs the whole verification grid; deterministic for a fixed config.
pub fn run_verification_grid(config: &RunConfig) -> Result<Report, QdpError> {
    let mut report = Report::new("verify-all", config.seed);
    for (q, ell) in grid_cells(config) {
        let ctx = Arc::new(QContext::new(ell, q)?);
        qarith_suite(&mut report, &ctx);
        dalg_suite(&mut report, &ctx, config);
        dmod_suite(&mut report, &ctx, config);
        gcoh_suite(&mut report, q, ell, config)?;
    }
    Ok(report)
}

fn tag(ctx: &QContext, name: &str) -> String {
    format!("q={} ell={} {}", ctx.q_int(), ctx.ell(), name)
}

fn qarith_suite(report: &mut Report, ctx: &Arc<QContext>) {
    let f = ctx.field();
    // both Pascal forms and symmetry on the stated grid
    let mut ok = true;
    for n in 1..=60usize {
        for m in 1..n {
            let lhs = ctx.q_binomial(n, m);
            let a = f.add(
                f.mul(ctx.q_pow(m as u64), ctx.q_binomial(n - 1, m)),
                ctx.q_binomial(n - 1, m - 1),
            );
            let b = f.add(
                ctx.q_binomial(n - 1, m),
                f.mul(ctx.q_pow((n - m) as u64), ctx.q_binomial(n - 1, m - 1)),
            );
            if lhs != a || lhs != b || lhs != ctx.q_binomial(n, n - m) {
                ok = false;
            }
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "q-pascal-and-symmetry"),
        ok,
        "Pascal recurrence failed",
    ));
    // vanishing of middle binomials at b-sequence steps
    let mut ok = true;
    for r in 0..=3usize {
        let n = ctx.b_value(r) as usize;
        if n > 200 {
            continue;
        }
        for i in 1..n {
            if ctx.q_binomial(n, i) != 0 {
                ok = false;
            }
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "binomials-vanish-at-b-steps"),
        ok,
        "middle binomial nonzero at a b-step",
    ));
    // fl subadditivity
    let mut ok = true;
    for a in 0..80i64 {
        for b in 0..80i64 {
            if ctx.fl(a + b) > ctx.fl(a).max(ctx.fl(b)) + 1 {
                ok = false;
            }
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "fl-subadditive"),
        ok,
        "fl(a+b) > max(fl a, fl b) + 1",
    ));
}

fn dalg_suite(report: &mut Report, ctx: &Arc<QContext>, config: &RunConfig) {
    let f = ctx.field();
    // q-Leibniz on basis pairs
    let mut ok = true;
    for n in 0..=40usize {
        for m in 0..=40usize {
            let a = DElement::basis(ctx, n);
            let b = DElement::basis(ctx, m);
            let lhs = a.mul(&b).unwrap().derive(1);
            let rhs = a
                .mul(&b.derive(1))
                .unwrap()
                .add(&a.derive(1).mul(&b).unwrap().scale(f.pow(ctx.q(), m as u64)))
                .unwrap();
            if lhs != rhs {
                ok = false;
            }
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "divided-power-q-leibniz"),
        ok,
        "twisted Leibniz rule failed on a basis pair",
    ));
    // Taylor bijection on random elements
    let mut rng = StdRng::seed_from_u64(config.seed ^ 0x7a71);
    let mut ok = true;
    for _ in 0..100 {
        let terms: Vec<(usize, u64)> = (0..rng.gen_range(1..4))
            .map(|_| (rng.gen_range(0..=60usize), rng.gen_range(0..ctx.ell())))
            .collect();
        let a = DElement::from_terms(ctx, &terms);
        if DElement::from_taylor(ctx, &a.taylor_expand()) != a {
            ok = false;
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "taylor-expansion-bijective"),
        ok,
        "expand-reconstruct differs",
    ));
    // y-presentation nilpotency and unit reconstruction
    let mut ok = true;
    for i in 0..=2usize {
        let e = (ctx.b_value(i + 1) / ctx.b_value(i)) as usize;
        let gen = DElement::basis(ctx, ctx.b_value(i) as usize);
        let mut acc = DElement::one(ctx);
        for _ in 0..e {
            acc = acc.mul(&gen).unwrap();
        }
        if !acc.is_zero() {
            ok = false;
        }
    }
    for n in 0..=60usize {
        let out = DElement::basis(ctx, n).to_y_basis();
        if out.len() != 1 {
            ok = false;
            continue;
        }
        let (u, mono) = &out[0];
        if mono.to_delement(ctx).scale(*u) != DElement::basis(ctx, n) {
            ok = false;
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "y-presentation"),
        ok,
        "nilpotency or unit reconstruction failed",
    ));
}

/// A random free module map and its cokernel, giving the short exact
/// sequence `0 -> G -> F -> coker -> 0` when the map is injective.
fn random_injection_ses(
    ctx: &Arc<QContext>,
    rng: &mut StdRng,
    trunc: usize,
) -> Option<(FPModule, FPModule, FPModule)> {
    let n_f = rng.gen_range(1..=3usize);
    let n_g = rng.gen_range(1..=n_f);
    let f_degs: Vec<usize> = (0..n_f).map(|_| rng.gen_range(0..4usize)).collect();
    // map G -> F: column j of the relation matrix of the cokernel is the
    // image of the j-th generator of G
    let g_degs: Vec<usize> = (0..n_g)
        .map(|_| rng.gen_range(0..4usize) + f_degs.iter().min().unwrap())
        .collect();
    let mut rows = Vec::new();
    for &gd in &g_degs {
        let mut row = Vec::new();
        for &fd in &f_degs {
            if gd >= fd {
                let c = rng.gen_range(0..ctx.ell());
                row.push(DElement::from_terms(ctx, &[(gd - fd, c)]));
            } else {
                row.push(DElement::zero(ctx));
            }
        }
        rows.push(row);
    }
    let coker = FPModule::new(ctx, f_degs.clone(), rows.clone()).ok()?;
    let free_f = FPModule::free(ctx, f_degs);
    let free_g = FPModule::free(ctx, g_degs.clone());
    // injectivity of G -> F degree-wise up to the truncation: the rank of
    // the map from G's slice must equal G's dimension
    let data_f = free_f.carrier(trunc);
    let data_g = free_g.carrier(trunc);
    for n in 0..=trunc {
        // matrix of the map in degree n
        let src = data_g.dim(n);
        if src == 0 {
            continue;
        }
        let mut mat = crate::linalg::Mat::zeros(data_f.dim(n), src);
        // basis of G_n: generators j with monomial x^[n - gdeg]
        let mut col = 0usize;
        for (j, &gd) in g_degs.iter().enumerate() {
            if gd > n {
                continue;
            }
            // image: sum over F-generators of x^[n-gd] * row[j][k]
            for (k, entry) in rows[j].iter().enumerate() {
                for (deg, c) in entry.terms() {
                    // x^[n-gd] * c x^[deg] lands at monomial degree
                    // n - fd = (n - gd) + deg
                    let coeff = ctx
                        .field()
                        .mul(c, ctx.q_binomial(n - gd + deg, deg));
                    if coeff == 0 {
                        continue;
                    }
                    // row index: position of (k, n - fdeg_k) in F's basis
                    let mut row_idx = 0usize;
                    let mut found = None;
                    for (kk, &fd) in free_f.gen_degrees().iter().enumerate() {
                        if fd > n {
                            continue;
                        }
                        if kk == k {
                            found = Some(row_idx);
                            break;
                        }
                        row_idx += 1;
                    }
                    if let Some(r) = found {
                        let cur = mat.get(r, col);
                        mat.set(r, col, ctx.field().add(cur, coeff));
                    }
                }
            }
            col += 1;
        }
        if mat.rank(ctx.field()) != src {
            return None;
        }
    }
    Some((free_g, free_f, coker))
}

fn dmod_suite(report: &mut Report, ctx: &Arc<QContext>, config: &RunConfig) {
    let trunc = config.truncation;
    // connection decomposition on free modules with Taylor connections
    let mut rng = StdRng::seed_from_u64(config.seed ^ 0xd0d);
    let mut ok = true;
    let mut law_ok = true;
    for _ in 0..5 {
        let gens: Vec<usize> = (0..rng.gen_range(1..4usize))
            .map(|_| rng.gen_range(0..6usize))
            .collect();
        let m = FPModule::free(ctx, gens.clone());
        let data = m.carrier(trunc);
        let nabla = Connection::taylor_on_free(&data, &gens, 1);
        let rep = check_connection_law(&data, &nabla);
        if !rep.violations.is_empty() {
            law_ok = false;
        }
        match connection_kernel_decompose(&data, &nabla) {
            Ok(dec) => {
                let expect: Vec<usize> = (0..=trunc)
                    .map(|n| gens.iter().filter(|&&d| d == n).count())
                    .collect();
                if dec.kernel_dims != expect {
                    ok = false;
                }
            }
            Err(_) => ok = false,
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "connection-law-on-free-modules"),
        law_ok,
        "connection law violated",
    ));
    report.push(CheckResult::of(
        tag(ctx, "connection-kernel-decomposition"),
        ok,
        "kernel or freeness witness failed",
    ));
    // iterated connection identity, sampled
    let gens = vec![0usize, 1];
    let data = FPModule::free(ctx, gens.clone()).carrier(trunc.min(40));
    let nabla = Connection::taylor_on_free(&data, &gens, 1);
    let mut fails = 0usize;
    for n in 1..=3usize {
        let rep = iterated_connection_check(
            &data,
            &nabla,
            n,
            config.samples / 3,
            config.seed ^ (n as u64),
        );
        fails += rep.failures.len();
    }
    report.push(CheckResult::of(
        tag(ctx, "iterated-connection-identity"),
        fails == 0,
        format!("{fails} sampled failures"),
    ));
    // Phi is module-linear
    let rep = phi_linearity_check(&data, &nabla, config.samples / 2, config.seed ^ 0xf1);
    report.push(CheckResult::of(
        tag(ctx, "taylor-coefficient-map-linear"),
        rep.failures.is_empty(),
        format!("{} failures", rep.failures.len()),
    ));
    // epsilon/lambda on short exact sequences of constructed modules
    let mut built = 0usize;
    let mut ses_ok = true;
    let mut sub_ok = true;
    let mut period_ok = true;
    let mut attempts = 0usize;
    while built < 7 && attempts < 200 {
        attempts += 1;
        let (g, f_mod, coker) = match random_injection_ses(ctx, &mut rng, trunc) {
            Some(x) => x,
            None => continue,
        };
        built += 1;
        let eg = match epsilon_lambda(&g.carrier(trunc)) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let ef = match epsilon_lambda(&f_mod.carrier(trunc)) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let data_m = coker.carrier(trunc);
        let em = match epsilon_lambda(&data_m) {
            Ok(e) => e,
            Err(_) => continue,
        };
        // 0 -> G -> F -> M -> 0
        if ef.epsilon > eg.epsilon.max(em.epsilon) {
            ses_ok = false;
        }
        let lam = |x: &crate::dmod::EpsilonLambda| x.lambda.unwrap_or(i64::MIN);
        if lam(&ef) != lam(&eg).max(lam(&em)) {
            ses_ok = false;
        }
        // subquotient monotonicity: M and G against F
        if lam(&em) > lam(&ef) || lam(&eg) > lam(&ef) {
            sub_ok = false;
        }
        if predict_period(&data_m).is_err() {
            period_ok = false;
        }
    }
    report.push(CheckResult::of(
        tag(ctx, "ses-epsilon-lambda"),
        ses_ok && built >= 5,
        format!("violated on constructed sequences ({built} built)"),
    ));
    report.push(CheckResult::of(
        tag(ctx, "subquotient-lambda-monotone"),
        sub_ok,
        "lambda grew in a subquotient",
    ));
    report.push(CheckResult::of(
        tag(ctx, "periodicity-certificates-consistent"),
        period_ok,
        "a certificate reported a dimension violation",
    ));
}

fn gcoh_suite(
    report: &mut Report,
    q: u64,
    ell: u64,
    config: &RunConfig,
) -> Result<(), QdpError> {
    let family = if q == 1 { Family::Sym } else { Family::Gl { q } };
    let (tmax, nmax) = if q == 1 { (2usize, 5usize) } else { (3, 3) };
    let e = BigradedE::new(family, ell, tmax, nmax, config.budget)?;
    let name = |s: &str| format!("q={q} ell={ell} {s}");
    let leib = verify_leibniz(&e)?;
    report.push(CheckResult::of(
        name("transfer-product-q-leibniz"),
        leib.violations.is_empty(),
        leib.violations.first().cloned().unwrap_or_default(),
    ));
    report.push(CheckResult::of(
        name("restriction-map-surjective"),
        leib.surjectivity_failures.is_empty(),
        leib.surjectivity_failures.first().cloned().unwrap_or_default(),
    ));
    let units = verify_unit_row(&e, 5)?;
    report.push(CheckResult::of(
        name("degree-zero-structure-constants"),
        units.failures.is_empty(),
        units.failures.first().cloned().unwrap_or_default(),
    ));
    for t in 0..=tmax {
        let fr = verify_free_row(&e, t)?;
        report.push(CheckResult::of(
            name(&format!("row-{t}-free-and-bounded")),
            fr.bound_respected && fr.stability_failures.is_empty(),
            format!(
                "kernel degrees {:?} against bound {}",
                fr.kernel_dims, fr.degree_bound
            ),
        ));
    }
    // diagram lemmas on the linear family
    if q > 1 && q <= 3 {
        for (n, m) in [(1usize, 1usize), (1, 2), (2, 1)] {
            for t in 0..=2usize {
                let rep = verify_mid_portion(n, m, t, q, ell, config.budget)?;
                report.push(CheckResult::of(
                    name(&format!("mid-portion-{n}-{m}-t{t}")),
                    rep.holds,
                    rep.witness.clone().unwrap_or_default(),
                ));
            }
        }
        let (_ctx, reps) = coeffaceability_instance(1, 1, q, ell, 2, config.budget)?;
        for rep in reps {
            report.push(CheckResult::of(
                name(&format!("inflation-transfer-t{}", rep.t)),
                rep.holds,
                format!("expected ratio {}", rep.expected_ratio),
            ));
        }
    }
    Ok(())
}
