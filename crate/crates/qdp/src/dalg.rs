//! The q-divided power algebra in one variable over `F_ell`.
//!
//! Elements are finitely supported combinations of the divided powers
//! `x^[n]`, multiplied by `x^[n] x^[m] = [n+m choose n]_q x^[n+m]`. The
//! degree-lowering map `x^[n] -> x^[n-1]` is the q-derivation that drives
//! all the periodicity machinery, and the `y`-presentation writes the
//! algebra on the generators `y_i = x^[b_i]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::QdpError;
use crate::field::Fp;
use crate::qarith::QContext;

/// A finitely supported element of the algebra: degree -> coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DElement {
    ctx: Arc<QContext>,
    terms: BTreeMap<usize, Fp>,
}

impl DElement {
    pub fn zero(ctx: &Arc<QContext>) -> Self {
        DElement {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<QContext>) -> Self {
        Self::basis(ctx, 0)
    }

    /// The basis element `x^[n]`.
    pub fn basis(ctx: &Arc<QContext>, n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(n, 1);
        DElement {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn from_terms(ctx: &Arc<QContext>, pairs: &[(usize, Fp)]) -> Self {
        let mut e = Self::zero(ctx);
        for &(deg, c) in pairs {
            e.add_term(deg, c);
        }
        e
    }

    pub fn ctx(&self) -> &Arc<QContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, Fp)> + '_ {
        self.terms.iter().map(|(&d, &c)| (d, c))
    }

    pub fn coeff(&self, degree: usize) -> Fp {
        *self.terms.get(&degree).unwrap_or(&0)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// The common degree when the element is homogeneous.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        if self.terms.len() == 1 {
            self.terms.keys().next().copied()
        } else {
            None
        }
    }

    fn add_term(&mut self, degree: usize, c: Fp) {
        if c == 0 {
            return;
        }
        let f = self.ctx.field();
        let entry = self.terms.entry(degree).or_insert(0);
        *entry = f.add(*entry, c % f.ell());
        if *entry == 0 {
            self.terms.remove(&degree);
        }
    }

    pub fn add(&self, other: &DElement) -> Result<DElement, QdpError> {
        if self.ctx != other.ctx {
            return Err(QdpError::ContextMismatch);
        }
        let mut out = self.clone();
        for (d, c) in other.terms() {
            out.add_term(d, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Fp) -> DElement {
        let f = self.ctx.field();
        let mut out = Self::zero(&self.ctx);
        for (d, c) in self.terms() {
            out.add_term(d, f.mul(c, s));
        }
        out
    }

    pub fn sub(&self, other: &DElement) -> Result<DElement, QdpError> {
        self.add(&other.scale(self.ctx.field().neg(1)))
    }

    /// Product by the bilinear extension of the divided-power rule.
    pub fn mul(&self, other: &DElement) -> Result<DElement, QdpError> {
        if self.ctx != other.ctx {
            return Err(QdpError::ContextMismatch);
        }
        let f = self.ctx.field();
        let mut out = Self::zero(&self.ctx);
        for (n, a) in self.terms() {
            for (m, b) in other.terms() {
                let coeff = f.mul(f.mul(a, b), self.ctx.q_binomial(n + m, n));
                out.add_term(n + m, coeff);
            }
        }
        Ok(out)
    }

    /// The derivation `x^[n] -> x^[n-1]`, iterated `iterations` times.
    pub fn derive(&self, iterations: usize) -> DElement {
        let mut out = Self::zero(&self.ctx);
        for (d, c) in self.terms() {
            if d >= iterations {
                out.add_term(d - iterations, c);
            }
        }
        out
    }

    /// The Taylor expansion pairs `(d^n(self) constant term, n)`, computed
    /// honestly by iterating the derivation and reading the degree-0
    /// coefficient.
    pub fn taylor_expand(&self) -> Vec<(Fp, usize)> {
        let mut out = Vec::new();
        let top = match self.max_degree() {
            Some(t) => t,
            None => return out,
        };
        let mut cur = self.clone();
        for n in 0..=top {
            let c = cur.coeff(0);
            if c != 0 {
                out.push((c, n));
            }
            cur = cur.derive(1);
        }
        out
    }

    /// Reconstructs `sum c_n x^[n]` from Taylor pairs.
    pub fn from_taylor(ctx: &Arc<QContext>, pairs: &[(Fp, usize)]) -> DElement {
        let mut out = Self::zero(ctx);
        for &(c, n) in pairs {
            out.add_term(n, c);
        }
        out
    }

    /// Writes the element in the y-basis: each `x^[n]` becomes
    /// `u_n * prod y_i^{c_i}` along the mixed-radix expansion of `n` in the
    /// b-sequence. The unit is computed by explicit multiplication, never
    /// assumed.
    pub fn to_y_basis(&self) -> Vec<(Fp, YMonomial)> {
        let f = self.ctx.field();
        let mut out: BTreeMap<YMonomial, Fp> = BTreeMap::new();
        for (n, c) in self.terms() {
            let mono = YMonomial::expand(&self.ctx, n);
            let unit = mono.normalization_unit(&self.ctx);
            let coeff = f.mul(c, unit);
            let entry = out.entry(mono).or_insert(0);
            *entry = f.add(*entry, coeff);
        }
        out.into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (c, m))
            .collect()
    }
}

/// A monomial `prod y_i^{c_i}` in the generators `y_i = x^[b_i]`, with
/// every exponent below its nilpotency bound `b_{i+1}/b_i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct YMonomial {
    exponents: Vec<(usize, u32)>,
}

impl YMonomial {
    pub fn empty() -> Self {
        YMonomial { exponents: vec![] }
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exponents
    }

    /// The mixed-radix expansion of `n`: digits `c_i < b_{i+1}/b_i` with
    /// `n = sum c_i b_i`.
    pub fn expand(ctx: &QContext, n: usize) -> YMonomial {
        let mut exps = Vec::new();
        let mut rest = n as u64;
        let mut i = 0usize;
        while rest > 0 {
            let radix = ctx.b_value(i + 1) / ctx.b_value(i);
            let digit = (rest / ctx.b_value(i)) % radix;
            if digit > 0 {
                exps.push((i, digit as u32));
                rest -= digit * ctx.b_value(i);
            }
            i += 1;
        }
        YMonomial { exponents: exps }
    }

    /// Total degree `sum c_i b_i`.
    pub fn degree(&self, ctx: &QContext) -> usize {
        self.exponents
            .iter()
            .map(|&(i, c)| (c as u64 * ctx.b_value(i)) as usize)
            .sum()
    }

    /// Evaluates the monomial as a product of divided powers.
    pub fn to_delement(&self, ctx: &Arc<QContext>) -> DElement {
        let mut acc = DElement::one(ctx);
        for &(i, c) in &self.exponents {
            let gen = DElement::basis(ctx, ctx.b_value(i) as usize);
            for _ in 0..c {
                acc = acc.mul(&gen).expect("same context");
            }
        }
        acc
    }

    /// The unit `u` with `x^[deg] = u * prod (x^[b_i])^{c_i}`; panics if the
    /// product degenerates (it cannot, for in-range exponents).
    pub fn normalization_unit(&self, ctx: &Arc<QContext>) -> Fp {
        let prod = self.to_delement(ctx);
        let deg = self.degree(ctx);
        let v = prod.coeff(deg);
        assert!(
            v != 0 && prod.terms.len() == 1,
            "y-monomial product must be a unit multiple of a single divided power"
        );
        ctx.field().inv(v).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx(ell: u64, q: u64) -> Arc<QContext> {
        Arc::new(QContext::new(ell, q).unwrap())
    }

    fn random_element(ctx: &Arc<QContext>, max_deg: usize, rng: &mut StdRng) -> DElement {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            terms.push((rng.gen_range(0..=max_deg), rng.gen_range(0..ctx.ell())));
        }
        DElement::from_terms(ctx, &terms)
    }

    #[test]
    fn basis_product_rule() {
        let c = ctx(3, 2);
        let x1 = DElement::basis(&c, 1);
        // x^[1] x^[1] = (1+q) x^[2] = 0 mod 3 for q = 2
        assert!(x1.mul(&x1).unwrap().is_zero());
        // x^[1] x^[2] = [3 choose 1] x^[3] = 7 x^[3] = x^[3] mod 3
        let x2 = DElement::basis(&c, 2);
        assert_eq!(x1.mul(&x2).unwrap(), DElement::basis(&c, 3));
        // x^[2] x^[2] over ell=2, q=3: [4 choose 2]_3 = 130 is even
        let c23 = ctx(2, 3);
        let y2 = DElement::basis(&c23, 2);
        assert!(y2.mul(&y2).unwrap().is_zero());
    }

    #[test]
    fn context_mismatch_rejected() {
        let a = DElement::basis(&ctx(3, 2), 1);
        let b = DElement::basis(&ctx(5, 2), 1);
        assert!(matches!(a.mul(&b), Err(QdpError::ContextMismatch)));
    }

    #[test]
    fn derive_examples() {
        let c = ctx(3, 2);
        assert_eq!(DElement::basis(&c, 5).derive(1), DElement::basis(&c, 4));
        assert!(DElement::basis(&c, 0).derive(1).is_zero());
        let e = DElement::from_terms(&c, &[(1, 1), (7, 1)]);
        assert_eq!(e.derive(2), DElement::basis(&c, 5));
    }

    #[test]
    fn q_leibniz_on_basis_pairs() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let c = ctx(ell, q);
            let f = c.field();
            for n in 0..=40usize {
                for m in 0..=40usize {
                    let a = DElement::basis(&c, n);
                    let b = DElement::basis(&c, m);
                    let lhs = a.mul(&b).unwrap().derive(1);
                    let rhs = a
                        .mul(&b.derive(1))
                        .unwrap()
                        .add(&a.derive(1).mul(&b).unwrap().scale(f.pow(c.q(), m as u64)))
                        .unwrap();
                    assert_eq!(lhs, rhs, "ell={ell} q={q} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn iterated_derivation_at_b_steps_is_q_derivation() {
        // for n = b_r the middle q-binomials vanish and d^n satisfies the
        // twisted Leibniz rule of degree -n
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let c = ctx(ell, q);
            let f = c.field();
            for r in 0..=2usize {
                let step = c.b_value(r) as usize;
                if step > 8 {
                    continue;
                }
                for n in 0..=16usize {
                    for m in 0..=16usize {
                        let a = DElement::basis(&c, n);
                        let b = DElement::basis(&c, m);
                        let lhs = a.mul(&b).unwrap().derive(step);
                        let rhs = a
                            .mul(&b.derive(step))
                            .unwrap()
                            .add(
                                &a.derive(step)
                                    .mul(&b)
                                    .unwrap()
                                    .scale(f.pow(c.q(), (step * m) as u64)),
                            )
                            .unwrap();
                        assert_eq!(lhs, rhs, "step={step} n={n} m={m} ell={ell}");
                    }
                }
            }
        }
    }

    #[test]
    fn mul_commutative_associative_random() {
        let mut rng = StdRng::seed_from_u64(7);
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let c = ctx(ell, q);
            for _ in 0..50 {
                let a = random_element(&c, 40, &mut rng);
                let b = random_element(&c, 40, &mut rng);
                let d = random_element(&c, 40, &mut rng);
                assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                assert_eq!(
                    a.mul(&b).unwrap().mul(&d).unwrap(),
                    a.mul(&b.mul(&d).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn taylor_expansion_examples_and_bijection() {
        let c = ctx(3, 2);
        assert_eq!(DElement::basis(&c, 4).taylor_expand(), vec![(1, 4)]);
        assert_eq!(DElement::zero(&c).taylor_expand(), vec![]);
        let e = DElement::from_terms(&c, &[(1, 2), (3, 1)]);
        assert_eq!(e.taylor_expand(), vec![(2, 1), (1, 3)]);

        let mut rng = StdRng::seed_from_u64(11);
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let c = ctx(ell, q);
            for _ in 0..40 {
                let a = random_element(&c, 60, &mut rng);
                let back = DElement::from_taylor(&c, &a.taylor_expand());
                assert_eq!(a, back);
            }
        }
    }

    #[test]
    fn y_basis_examples() {
        let c = ctx(3, 2); // b = 1, 2, 6, 18
        // generators map to single monomials with unit 1
        for i in 0..3usize {
            let n = c.b_value(i) as usize;
            let out = DElement::basis(&c, n).to_y_basis();
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].0, 1);
            assert_eq!(out[0].1.exponents(), &[(i, 1)]);
        }
        // x^[0] is the empty monomial
        let out = DElement::one(&c).to_y_basis();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 1);
        assert!(out[0].1.exponents().is_empty());
        // x^[3]: 3 = 1 + 2, and x^[1] x^[2] = x^[3] exactly, so unit 1
        let out = DElement::basis(&c, 3).to_y_basis();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 1);
        assert_eq!(out[0].1.exponents(), &[(0, 1), (1, 1)]);
    }

    #[test]
    fn y_basis_roundtrip_with_units() {
        // reconstructing u * prod y_i^{c_i} must recover x^[n] exactly
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4), (5, 2)] {
            let c = ctx(ell, q);
            for n in 0..=60usize {
                let out = DElement::basis(&c, n).to_y_basis();
                assert_eq!(out.len(), 1);
                let (u, mono) = &out[0];
                let rebuilt = mono.to_delement(&c).scale(*u);
                assert_eq!(rebuilt, DElement::basis(&c, n), "ell={ell} q={q} n={n}");
            }
        }
    }

    #[test]
    fn y_nilpotency_relations() {
        for (ell, q) in [(3u64, 2u64), (2, 3)] {
            let c = ctx(ell, q);
            for i in 0..=2usize {
                let e = (c.b_value(i + 1) / c.b_value(i)) as usize;
                let gen = DElement::basis(&c, c.b_value(i) as usize);
                let mut acc = DElement::one(&c);
                for _ in 0..e {
                    acc = acc.mul(&gen).unwrap();
                }
                assert!(acc.is_zero(), "y_{i}^{e} must vanish (ell={ell} q={q})");
            }
        }
    }
}
