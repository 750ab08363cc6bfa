//! Periodicity invariants of graded modules: generation degree over the
//! subrings generated by the high divided-power generators, the freeness
//! threshold `epsilon`, the offset `lambda`, and the resulting dimension
//! periodicity certificates.
//!
//! Freeness beyond the truncation is undecidable from a finite window, so
//! `epsilon` is certified degree by degree up to the window bound: the
//! Hilbert series must factor and an explicit basis-lifting witness must
//! hold in every degree of the window. Certificates carry the window.

use serde::Serialize;

use crate::error::QdpError;
use crate::linalg::RowSpace;

use super::presentation::GradedModuleData;

/// Digits of the mixed-radix expansion of `n` in the b-sequence, as
/// `(index, digit)` pairs with nonzero digit.
pub(crate) fn b_digits(ctx: &crate::qarith::QContext, n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut rest = n as u64;
    let mut i = 0usize;
    while rest > 0 {
        let radix = ctx.b_value(i + 1) / ctx.b_value(i);
        let digit = (rest / ctx.b_value(i)) % radix;
        if digit > 0 {
            out.push((i, digit as u32));
            rest -= digit * ctx.b_value(i);
        }
        i += 1;
    }
    out
}

/// Minimal generator counts and representatives of `M` over `D_{>= r}`,
/// degree by degree: in each degree the span of `y_i . M` over `i >= r` is
/// subtracted and unit-vector representatives of the quotient are chosen
/// greedily in index order.
fn generator_data(
    data: &GradedModuleData,
    r: usize,
) -> Vec<(usize, Vec<Vec<crate::field::Fp>>)> {
    let ctx = data.ctx();
    let n_max = data.trunc();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let dim = data.dim(n);
        let mut span = RowSpace::new(dim, *ctx.field());
        let mut i = r;
        loop {
            let b = ctx.b_value(i);
            if b > n as u64 {
                break;
            }
            let k = b as usize;
            let m = data.act(k, n - k);
            for col in 0..m.cols {
                let v: Vec<_> = (0..m.rows).map(|row| m.get(row, col)).collect();
                span.push_row(v);
            }
            i += 1;
        }
        let mut reps = Vec::new();
        for j in 0..dim {
            let mut e = vec![0; dim];
            e[j] = 1;
            if span.push_row(e.clone()) {
                reps.push(e);
            }
        }
        out.push((reps.len(), reps));
    }
    out
}

/// Degree of generation of `M` as a `D_{>= r}`-module within the window.
///
/// Errors with `TruncationTooSmall` when minimal generators still appear at
/// the top degree of the window (the maximum cannot be certified), and
/// returns `None` for the zero module.
pub fn g_r(data: &GradedModuleData, r: usize) -> Result<Option<usize>, QdpError> {
    let counts = generator_data(data, r);
    let n_max = data.trunc();
    if counts[n_max].0 > 0 {
        return Err(QdpError::TruncationTooSmall {
            trunc: n_max,
            reason: format!("minimal D_(>={r})-generators still appear at degree {n_max}"),
        });
    }
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, (c, _))| *c > 0)
        .map(|(n, _)| n)
        .next_back())
}

/// The result of the truncation-certified freeness search.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonLambda {
    pub epsilon: usize,
    /// `g_eps + 1 - b_eps`; `None` for the zero module.
    pub lambda: Option<i64>,
    pub g_eps: Option<usize>,
    pub certified_to: usize,
}

/// Applies the action of the `D_{>= r}`-monomial with the given digits to a
/// vector sitting in degree `deg`.
fn apply_monomial(
    data: &GradedModuleData,
    mut v: Vec<crate::field::Fp>,
    mut deg: usize,
    digits: &[(usize, u32)],
) -> Vec<crate::field::Fp> {
    let ctx = data.ctx();
    for &(i, c) in digits {
        let k = ctx.b_value(i) as usize;
        for _ in 0..c {
            v = data.act(k, deg).apply(&v, ctx.field());
            deg += k;
        }
    }
    v
}

/// Smallest `r` (at most `fl` of the window bound) such that the module is
/// certified free over `D_{>= r}` in every degree of the window, together
/// with `lambda`.
pub fn epsilon_lambda(data: &GradedModuleData) -> Result<EpsilonLambda, QdpError> {
    let ctx = data.ctx();
    let n_max = data.trunc();
    if data.is_zero() {
        return Ok(EpsilonLambda {
            epsilon: 0,
            lambda: None,
            g_eps: None,
            certified_to: n_max,
        });
    }
    let r_cap = ctx.fl(n_max as i64);
    'next_r: for r in 0..=r_cap {
        let gens = generator_data(data, r);
        // freeness witness: for every degree, the monomial-times-generator
        // vectors must be exactly a basis
        for n in 0..=n_max {
            let dim = data.dim(n);
            let mut basis_rows = RowSpace::new(dim, *ctx.field());
            let mut count = 0usize;
            for d in 0..=n {
                if gens[d].0 == 0 {
                    continue;
                }
                let k = n - d;
                let digits = b_digits(ctx, k);
                if digits.iter().any(|&(i, _)| i < r) {
                    continue; // no D_{>= r} monomial in degree k
                }
                for rep in &gens[d].1 {
                    let v = apply_monomial(data, rep.clone(), d, &digits);
                    count += 1;
                    if !basis_rows.push_row(v) {
                        continue 'next_r; // dependent: not free at this r
                    }
                }
            }
            if count != dim {
                continue 'next_r; // Hilbert series does not factor
            }
        }
        // success at this r; certify g_r
        if gens[n_max].0 > 0 {
            return Err(QdpError::TruncationTooSmall {
                trunc: n_max,
                reason: format!(
                    "free over D_(>={r}) on the window but generators appear at degree {n_max}"
                ),
            });
        }
        let g_eps = gens
            .iter()
            .enumerate()
            .filter(|(_, (c, _))| *c > 0)
            .map(|(n, _)| n)
            .next_back();
        let lambda = g_eps.map(|g| g as i64 + 1 - ctx.b_value(r) as i64);
        return Ok(EpsilonLambda {
            epsilon: r,
            lambda,
            g_eps,
            certified_to: n_max,
        });
    }
    Err(QdpError::TruncationTooSmall {
        trunc: n_max,
        reason: format!("no r <= fl({n_max}) = {r_cap} certifies freeness on the window"),
    })
}

/// A dimension-periodicity certificate: period `b_epsilon` from the onset
/// `lambda`, verified on the window.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityCertificate {
    pub epsilon_bound: usize,
    pub lambda_bound: Option<i64>,
    pub period: u64,
    pub onset: i64,
    pub truncation: usize,
    pub dims: Vec<usize>,
}

/// Runs the freeness search and verifies `dim M_n = dim M_m` for congruent
/// degrees past the onset, on the whole window.
pub fn predict_period(data: &GradedModuleData) -> Result<PeriodicityCertificate, QdpError> {
    let el = epsilon_lambda(data)?;
    let ctx = data.ctx();
    let period = ctx.b_value(el.epsilon);
    let onset = el.lambda.unwrap_or(0).max(0);
    let dims = data.dims().to_vec();
    for n in onset as usize..dims.len() {
        for m in n..dims.len() {
            if (m - n) as u64 % period == 0 && dims[n] != dims[m] {
                return Err(QdpError::InvalidInput(format!(
                    "periodicity violated: dim M_{n} = {} but dim M_{m} = {} with period {period}",
                    dims[n], dims[m]
                )));
            }
        }
    }
    Ok(PeriodicityCertificate {
        epsilon_bound: el.epsilon,
        lambda_bound: el.lambda,
        period,
        onset: el.lambda.unwrap_or(0),
        truncation: data.trunc(),
        dims,
    })
}
