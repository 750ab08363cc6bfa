//! Flag permutation modules, the partial-sum maps between them, unipotent
//! Specht modules as kernel intersections, their dimensions over a prime
//! field, cohomology series hooks, and exact dimension-polynomial fitting
//! in the variable `q^n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::QdpError;
use crate::field::{Fp, PrimeField};
use crate::gcoh::gmodule::GModule;
use crate::gcoh::group::FiniteGroup;
use crate::gcoh::stable::CohCtx;
use crate::gf::SmallField;
use crate::linalg::{Mat, RowSpace, SparseRank};
use crate::qarith::{q_binomial_int, QContext};

/// A composition: a list of nonnegative parts. Trailing zeros are
/// stripped for the length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Composition {
        Composition { parts }
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts with trailing zeros removed.
    pub fn len(&self) -> usize {
        let mut l = self.parts.len();
        while l > 0 && self.parts[l - 1] == 0 {
            l -= 1;
        }
        l
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts[..self.len()]
    }

    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn is_partition(&self) -> bool {
        let p = self.parts();
        p.windows(2).all(|w| w[0] >= w[1])
    }

    /// The composition `(n - |mu|, mu)`.
    pub fn padded(&self, n: usize) -> Result<Composition, QdpError> {
        let d = self.size();
        if n < d {
            return Err(QdpError::IndexOutOfRange(format!(
                "cannot pad |mu| = {d} into n = {n}"
            )));
        }
        let mut parts = vec![n - d];
        parts.extend_from_slice(self.parts());
        Ok(Composition::new(parts))
    }

    /// The sorted partition with the same parts.
    pub fn sorted(&self) -> Composition {
        let mut p = self.parts().to_vec();
        p.sort_unstable_by(|a, b| b.cmp(a));
        Composition::new(p)
    }

    /// `mu^{r,i}`: parts `r` and `r+1` replaced by
    /// `(mu_r + mu_{r+1} - i, i)` (1-based `r`).
    pub fn replaced(&self, r: usize, i: usize) -> Composition {
        let mut parts = self.parts.clone();
        while parts.len() < r + 1 {
            parts.push(0);
        }
        let a = self.part(r - 1);
        let b = self.part(r);
        parts[r - 1] = a + b - i;
        parts[r] = i;
        Composition::new(parts)
    }

    /// The kernel index set `K(mu) = {(r, i): 2 <= r <= len, 0 <= i < mu_r}`.
    pub fn kernel_indices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 2..=self.len() {
            for i in 0..self.part(r - 1) {
                out.push((r, i));
            }
        }
        out
    }
}

/// A subspace of `F_q^d` in reduced row-echelon form (rows span).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    pub d: usize,
    pub rows: Vec<Vec<u8>>,
}

impl Subspace {
    pub fn full(d: usize) -> Subspace {
        let mut rows = Vec::new();
        for i in 0..d {
            let mut r = vec![0u8; d];
            r[i] = 1;
            rows.push(r);
        }
        Subspace { d, rows }
    }

    pub fn zero(d: usize) -> Subspace {
        Subspace { d, rows: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Canonical reduced row-echelon form of arbitrary spanning rows.
    pub fn from_rows(d: usize, gf: &SmallField, rows: Vec<Vec<u8>>) -> Subspace {
        let mut ech: Vec<Vec<u8>> = Vec::new();
        for mut v in rows {
            for e in ech.iter() {
                let p = e.iter().position(|&x| x != 0).unwrap();
                let c = v[p];
                if c != 0 {
                    for (x, &y) in v.iter_mut().zip(e.iter()) {
                        *x = gf.sub(*x, gf.mul(c, y));
                    }
                }
            }
            if let Some(p) = v.iter().position(|&x| x != 0) {
                let inv = gf.inv(v[p]);
                for x in v.iter_mut() {
                    *x = gf.mul(*x, inv);
                }
                for e in ech.iter_mut() {
                    let c = e[p];
                    if c != 0 {
                        for (x, &y) in e.iter_mut().zip(v.iter()) {
                            *x = gf.sub(*x, gf.mul(c, y));
                        }
                    }
                }
                ech.push(v);
            }
        }
        ech.sort_by_key(|r| r.iter().position(|&x| x != 0).unwrap());
        Subspace { d, rows: ech }
    }

    pub fn contains(&self, gf: &SmallField, sub: &Subspace) -> bool {
        sub.rows.iter().all(|v| {
            let mut v = v.clone();
            for e in &self.rows {
                let p = e.iter().position(|&x| x != 0).unwrap();
                let c = v[p];
                if c != 0 {
                    for (x, &y) in v.iter_mut().zip(e.iter()) {
                        *x = gf.sub(*x, gf.mul(c, y));
                    }
                }
            }
            v.iter().all(|&x| x == 0)
        })
    }

    /// All subspaces of dimension `k` lying between `lower` and `self`
    /// (both inclusive bounds), enumerated canonically.
    pub fn intermediate_subspaces(
        &self,
        gf: &SmallField,
        lower: &Subspace,
        k: usize,
    ) -> Vec<Subspace> {
        let inner = lower.dim();
        assert!(inner <= k && k <= self.dim());
        let extra = k - inner;
        // complement coordinates of lower inside self: extend lower's rows
        // by rows of self to a basis
        let mut basis = lower.rows.clone();
        let mut ech = Subspace::from_rows(self.d, gf, basis.clone());
        let mut complement = Vec::new();
        for r in &self.rows {
            let before = ech.dim();
            basis.push(r.clone());
            ech = Subspace::from_rows(self.d, gf, basis.clone());
            if ech.dim() > before {
                complement.push(r.clone());
            } else {
                basis.pop();
            }
        }
        let m = complement.len();
        // enumerate echelon forms of rank `extra` in the m quotient coords
        let q = gf.q() as usize;
        let mut out = Vec::new();
        // choose pivot columns (subset of 0..m of size extra), then free
        // entries to the right of pivots in non-pivot columns
        let mut pivots = (0..extra).collect::<Vec<usize>>();
        loop {
            // count free entries
            let mut free_pos = Vec::new();
            for (ri, &p) in pivots.iter().enumerate() {
                for c in (p + 1)..m {
                    if !pivots.contains(&c) {
                        free_pos.push((ri, c));
                    } else if c > p {
                        // entries under later pivots are zero in echelon form
                    }
                }
            }
            let total = (q as u64).pow(free_pos.len() as u32);
            for code in 0..total {
                let mut rows = vec![vec![0u8; m]; extra];
                for (ri, &p) in pivots.iter().enumerate() {
                    rows[ri][p] = 1;
                }
                let mut cc = code;
                for &(ri, c) in &free_pos {
                    rows[ri][c] = (cc % q as u64) as u8;
                    cc /= q as u64;
                }
                // lift quotient rows to ambient vectors and add lower
                let mut amb = lower.rows.clone();
                for row in &rows {
                    let mut v = vec![0u8; self.d];
                    for (ci, &coef) in row.iter().enumerate() {
                        if coef != 0 {
                            for (x, &y) in v.iter_mut().zip(complement[ci].iter()) {
                                *x = gf.add(*x, gf.mul(coef, y));
                            }
                        }
                    }
                    amb.push(v);
                }
                out.push(Subspace::from_rows(self.d, gf, amb));
            }
            // next pivot combination
            let mut i = extra;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if pivots[i] + 1 <= m - (extra - i) {
                    pivots[i] += 1;
                    for j in i + 1..extra {
                        pivots[j] = pivots[j - 1] + 1;
                    }
                    break;
                }
            }
            if extra == 0 {
                return out;
            }
        }
    }

    /// Image under a group element acting on row vectors.
    pub fn apply(&self, gf: &SmallField, mat_code: u64, d: usize) -> Subspace {
        let rows = self
            .rows
            .iter()
            .map(|v| {
                let mut out = vec![0u8; d];
                for (j, o) in out.iter_mut().enumerate() {
                    // (g . v)_j = sum_k g[j][k] v[k]
                    let mut acc = 0u8;
                    for (k, &x) in v.iter().enumerate() {
                        let gjk = ((mat_code >> (4 * (j * d + k))) & 0xf) as u8;
                        acc = gf.add(acc, gf.mul(gjk, x));
                    }
                    *o = acc;
                }
                out
            })
            .collect();
        Subspace::from_rows(d, gf, rows)
    }
}

/// A flag of type `mu`: the proper chain `V_1 .. V_{len-1}` (the full and
/// zero ends are implicit).
pub type Flag = Vec<Subspace>;

/// The permutation module of `GL_d(F_q)` on flags of type `mu`.
pub struct FlagModule {
    pub mu: Composition,
    pub q: u64,
    pub d: usize,
    pub flags: Vec<Flag>,
    index: BTreeMap<Flag, usize>,
    gf: Arc<SmallField>,
}

impl FlagModule {
    pub fn enumerate(mu: &Composition, q: u64, budget: u64) -> Result<FlagModule, QdpError> {
        let d = mu.size();
        let gf = SmallField::get(q)?;
        let expected = flag_count(mu, q);
        if expected > budget.into() {
            return Err(QdpError::BudgetExceeded {
                need: (expected % num_bigint::BigUint::from(u64::MAX)).try_into().unwrap_or(u64::MAX),
                budget,
            });
        }
        let mut flags: Vec<Flag> = Vec::new();
        // recursive chain: V_0 = full; V_i subspace of V_{i-1} with
        // dim V_i = dim V_{i-1} - mu_i
        fn rec(
            gf: &SmallField,
            mu: &Composition,
            level: usize,
            chain: &mut Vec<Subspace>,
            out: &mut Vec<Flag>,
            d: usize,
        ) {
            let len = mu.len();
            if level == len {
                out.push(chain[1..len.max(1)].to_vec());
                return;
            }
            let current = chain.last().unwrap().clone();
            let target_dim = current.dim() - mu.part(level - 1);
            let zero = Subspace::zero(d);
            for w in current.intermediate_subspaces(gf, &zero, target_dim) {
                chain.push(w);
                rec(gf, mu, level + 1, chain, out, d);
                chain.pop();
            }
        }
        if mu.len() <= 1 {
            flags.push(vec![]);
        } else {
            let mut chain = vec![Subspace::full(d)];
            rec(&gf, mu, 1, &mut chain, &mut flags, d);
        }
        flags.sort();
        flags.dedup();
        let index = flags
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        Ok(FlagModule {
            mu: mu.clone(),
            q,
            d,
            flags,
            index,
            gf,
        })
    }

    pub fn dim(&self) -> usize {
        self.flags.len()
    }

    pub fn index_of(&self, f: &Flag) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Permutation action of a `GL_d` element (by matrix code) on flag
    /// indices.
    pub fn act_flag(&self, code: u64, flag_idx: usize) -> usize {
        let moved: Flag = self.flags[flag_idx]
            .iter()
            .map(|s| s.apply(&self.gf, code, self.d))
            .collect();
        *self.index.get(&moved).expect("group action permutes flags")
    }

    /// The permutation coefficient module over the given group (which must
    /// live in the `d x d` matrix universe over `F_q`).
    pub fn as_gmodule(&self, group: &Arc<FiniteGroup>, field: &PrimeField) -> Arc<GModule> {
        let perms: Vec<Vec<u16>> = (0..group.order() as u32)
            .map(|g| {
                let code = group.code(g);
                (0..self.dim())
                    .map(|i| self.act_flag(code, i) as u16)
                    .collect()
            })
            .collect();
        GModule::from_permutations(group, field, perms)
    }
}

/// Number of flags of type `mu` over `F_q`, as an exact integer: the
/// telescoping product of Gaussian binomials.
pub fn flag_count(mu: &Composition, q: u64) -> num_bigint::BigUint {
    let mut total = mu.size();
    let mut acc = num_bigint::BigUint::one();
    for i in 0..mu.len() {
        let part = mu.part(i);
        acc *= q_binomial_int(total, part, q);
        total -= part;
    }
    acc
}

/// The partial-sum map `psi_{r,i}` as a sparse matrix on flag bases:
/// columns indexed by source flags, entries in the target flag module.
pub struct PsiMap {
    pub source: Arc<FlagModule>,
    pub target: Arc<FlagModule>,
    pub r: usize,
    pub i: usize,
    /// per source flag: the target flag indices hit (each with
    /// coefficient 1)
    pub columns: Vec<Vec<u32>>,
}

/// Builds `psi_{r,i}: P_mu -> P_{mu^{r,i}}`, replacing `V_r` by every
/// subspace between `V_{r+1}` and `V_{r-1}` whose dimension over
/// `V_{r+1}` is `i`.
pub fn psi_map(
    source: &Arc<FlagModule>,
    target: &Arc<FlagModule>,
    r: usize,
    i: usize,
) -> Result<PsiMap, QdpError> {
    let mu = &source.mu;
    if r < 1 || r > mu.len() || i > mu.part(r - 1) {
        return Err(QdpError::IndexOutOfRange(format!(
            "psi indices (r={r}, i={i}) out of range for {:?}",
            mu.parts()
        )));
    }
    if target.mu != mu.replaced(r, i) {
        return Err(QdpError::IndexOutOfRange(
            "target flag module has the wrong type".into(),
        ));
    }
    let gf = &source.gf;
    let d = source.d;
    let len = mu.len();
    let target_len = target.mu.len();
    let mut columns = Vec::with_capacity(source.dim());
    for flag in &source.flags {
        // chain with implicit ends: V_0 is the full space, V_len is zero,
        // and V_j = flag[j-1] in between
        let chain_at = |j: usize| -> Subspace {
            if j == 0 {
                Subspace::full(d)
            } else if j < len {
                flag[j - 1].clone()
            } else {
                Subspace::zero(d)
            }
        };
        let upper = chain_at(r - 1);
        let lower = chain_at(r + 1);
        let k = lower.dim() + i;
        let mut hits = Vec::new();
        for w in upper.intermediate_subspaces(gf, &lower, k) {
            let mut new_flag: Flag = Vec::with_capacity(target_len.saturating_sub(1));
            for pos in 1..target_len {
                if pos == r {
                    new_flag.push(w.clone());
                } else {
                    new_flag.push(chain_at(pos));
                }
            }
            let idx = target
                .index_of(&new_flag)
                .expect("replacement produces a flag of the target type");
            hits.push(idx as u32);
        }
        columns.push(hits);
    }
    Ok(PsiMap {
        source: source.clone(),
        target: target.clone(),
        r,
        i,
        columns,
    })
}

impl PsiMap {
    /// Dense matrix over `F_ell` (rows = target flags).
    pub fn matrix(&self, f: &PrimeField) -> Mat {
        let mut m = Mat::zeros(self.target.dim(), self.source.dim());
        for (col, hits) in self.columns.iter().enumerate() {
            for &h in hits {
                let cur = m.get(h as usize, col);
                m.set(h as usize, col, f.add(cur, 1));
            }
        }
        m
    }
}

/// The kernel-intersection description of the unipotent Specht module:
/// basis rows inside the flag module of `mu`.
pub fn specht_kernel_basis(
    mu: &Composition,
    q: u64,
    ell: u64,
    budget: u64,
) -> Result<(Arc<FlagModule>, Mat), QdpError> {
    if !mu.is_partition() {
        return Err(QdpError::NotAPartition(mu.parts().to_vec()));
    }
    let f = PrimeField::new(ell)?;
    let source = Arc::new(FlagModule::enumerate(mu, q, budget)?);
    let mut constraints = RowSpace::new(source.dim(), f);
    for (r, i) in mu.kernel_indices() {
        let tgt_mu = mu.replaced(r - 1, i);
        let target = Arc::new(FlagModule::enumerate(&tgt_mu, q, budget)?);
        let psi = psi_map(&source, &target, r - 1, i)?;
        // rows of the matrix are constraints on the kernel
        let m = psi.matrix(&f);
        for row in 0..m.rows {
            constraints.push_row(m.row(row).to_vec());
        }
    }
    Ok((source, constraints.nullspace()))
}

/// Dimension of the unipotent Specht module over `F_ell`.
pub fn specht_dim(mu: &Composition, q: u64, ell: u64, budget: u64) -> Result<usize, QdpError> {
    let (_, basis) = specht_kernel_basis(mu, q, ell, budget)?;
    Ok(basis.rows)
}

/// Dimension of the kernel intersection for large padded compositions,
/// via sparse rank only (no kernel basis).
pub fn specht_dim_sparse(
    mu: &Composition,
    q: u64,
    ell: u64,
    budget: u64,
) -> Result<usize, QdpError> {
    if !mu.is_partition() {
        return Err(QdpError::NotAPartition(mu.parts().to_vec()));
    }
    let f = PrimeField::new(ell)?;
    let source = Arc::new(FlagModule::enumerate(mu, q, budget)?);
    // constraints transposed: feed columns of the stacked matrix as sparse
    // rows over the concatenated target coordinates
    let mut targets = Vec::new();
    let mut total_rows = 0usize;
    for (r, i) in mu.kernel_indices() {
        let tgt_mu = mu.replaced(r - 1, i);
        let target = Arc::new(FlagModule::enumerate(&tgt_mu, q, budget)?);
        let psi = psi_map(&source, &target, r - 1, i)?;
        total_rows += target.dim();
        targets.push(psi);
    }
    let mut rank = SparseRank::new(source.dim(), f);
    // interleave: process constraint rows target by target; each target row
    // collects the source flags hitting it
    for psi in &targets {
        let mut per_row: Vec<Vec<(u32, Fp)>> = vec![Vec::new(); psi.target.dim()];
        for (col, hits) in psi.columns.iter().enumerate() {
            for &h in hits {
                per_row[h as usize].push((col as u32, 1));
            }
        }
        for row in per_row {
            if !row.is_empty() {
                rank.push_sparse(row);
            }
        }
    }
    let _ = total_rows;
    Ok(source.dim() - rank.rank())
}

/// One entry of the cohomology series.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesEntry {
    pub n: usize,
    pub dim_coefficient: usize,
    pub dim_cohomology: Option<usize>,
    pub skipped: Option<String>,
}

/// `n -> dim H^t(GL_n(F_q), M_{mu[n]})` over the given range, together
/// with the periodicity prediction of the unipotent bound. Entries beyond
/// the group budget are reported as skipped.
pub fn specht_cohomology_series(
    mu: &Composition,
    t: usize,
    q: u64,
    ell: u64,
    n_range: std::ops::RangeInclusive<usize>,
    budget: u64,
) -> Result<(Vec<SeriesEntry>, crate::dmod::UnipotentBound), QdpError> {
    let ctx = QContext::new(ell, q)?;
    let bound = crate::dmod::bound_unipotent(t, mu.size(), &ctx);
    let coh = CohCtx::new(ell, t, budget)?;
    let mut out = Vec::new();
    for n in n_range {
        let padded = mu.padded(n)?;
        if !padded.is_partition() {
            out.push(SeriesEntry {
                n,
                dim_coefficient: 0,
                dim_cohomology: None,
                skipped: Some("padded composition is not a partition".into()),
            });
            continue;
        }
        // group budget: |GL_n(q)| modest
        let order: u128 = {
            let qq = q as u128;
            let qn = qq.pow(n as u32);
            (0..n).map(|i| qn - qq.pow(i as u32)).product()
        };
        if order > 250_000 {
            out.push(SeriesEntry {
                n,
                dim_coefficient: 0,
                dim_cohomology: None,
                skipped: Some(format!("|GL_{n}(F_{q})| = {order} beyond the budget")),
            });
            continue;
        }
        let (flags, basis) = specht_kernel_basis(&padded, q, ell, budget)?;
        let group = FiniteGroup::gl(n, q)?;
        let perm = flags.as_gmodule(&group, &coh.field);
        let module = GModule::submodule(&perm, basis.clone());
        let handle = coh.handle_with_module(&group, &module);
        out.push(SeriesEntry {
            n,
            dim_coefficient: basis.rows,
            dim_cohomology: Some(handle.dim(t)),
            skipped: None,
        });
    }
    Ok((out, bound))
}

/// Result of an exact least-degree interpolation in `X = q^n`.
#[derive(Debug, Clone)]
pub struct PolynomialFit {
    /// coefficients low to high, exact rationals
    pub coefficients: Vec<BigRational>,
    pub degree: usize,
    pub onset: usize,
}

impl PolynomialFit {
    pub fn eval(&self, q: u64, n: usize) -> BigRational {
        let x = BigRational::from(BigInt::from(q).pow(n as u32));
        let mut acc = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(|c| c.to_string()).collect()
    }
}

/// Finds the least degree polynomial `P` with `dim_n = P(q^n)` on a tail
/// of the series, requiring at least `deg + 2` matching tail points;
/// returns the polynomial, its degree, and the onset.
pub fn fit_dimension_polynomial(
    series: &[(usize, u64)],
    q: u64,
) -> Result<PolynomialFit, QdpError> {
    if series.len() < 2 {
        return Err(QdpError::NoStablePolynomial(
            "need at least two points".into(),
        ));
    }
    let max_deg = series.len().saturating_sub(2);
    for deg in 0..=max_deg {
        // interpolate on the last deg + 1 points
        let pts = &series[series.len() - (deg + 1)..];
        let coeffs = match interpolate(pts, q, deg) {
            Some(c) => c,
            None => continue,
        };
        let fit = PolynomialFit {
            coefficients: coeffs,
            degree: deg,
            onset: 0,
        };
        // find the onset: the first index from which every point matches
        let mut onset_idx = series.len();
        for i in (0..series.len()).rev() {
            let (n, v) = series[i];
            if fit.eval(q, n) == BigRational::from(BigInt::from(v)) {
                onset_idx = i;
            } else {
                break;
            }
        }
        let matching = series.len() - onset_idx;
        if matching >= deg + 2 {
            return Ok(PolynomialFit {
                onset: series[onset_idx].0,
                ..fit
            });
        }
    }
    Err(QdpError::NoStablePolynomial(format!(
        "no interpolant of degree <= {max_deg} matches a tail of length degree + 2"
    )))
}

/// Exact Vandermonde solve in `X = q^n` over the rationals.
fn interpolate(points: &[(usize, u64)], q: u64, deg: usize) -> Option<Vec<BigRational>> {
    let k = deg + 1;
    assert_eq!(points.len(), k);
    // augmented matrix
    let mut m: Vec<Vec<BigRational>> = Vec::with_capacity(k);
    for &(n, v) in points {
        let x = BigRational::from(BigInt::from(q).pow(n as u32));
        let mut row = Vec::with_capacity(k + 1);
        let mut acc = BigRational::one();
        for _ in 0..k {
            row.push(acc.clone());
            acc *= &x;
        }
        row.push(BigRational::from(BigInt::from(v)));
        m.push(row);
    }
    // Gaussian elimination
    for col in 0..k {
        let pivot = (col..k).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let pv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= pv.clone();
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let c = m[r][col].clone();
                for cc in 0..=k {
                    let sub = c.clone() * m[col][cc].clone();
                    m[r][cc] -= sub;
                }
            }
        }
    }
    Some((0..k).map(|r| m[r][k].clone()).collect())
}
