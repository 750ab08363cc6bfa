//! q-combinatorics: q-integers, Gaussian binomials, the order of q, the
//! b-sequence and the threshold function `fl`.
//!
//! Everything downstream (the divided power algebra, module invariants,
//! the cohomology verifier) pulls its coefficients from here. Field-level
//! q-binomials are computed by the Pascal recurrence directly in `F_ell`,
//! so no division ever occurs; integer-level q-binomials use arbitrary
//! precision and exist mainly to serve as oracles and for CLI output.

use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::QdpError;
use crate::field::{prime_power_base, Fp, PrimeField};

/// Smallest `w >= 1` with `q_int^w = 1 mod ell`.
///
/// Errors when `ell` divides `q_int`.
pub fn order_of_q(ell: u64, q_int: u64) -> Result<u32, QdpError> {
    let field = PrimeField::new(ell)?;
    let q = field.reduce(q_int);
    if q == 0 {
        return Err(QdpError::NotInvertible {
            value: q_int,
            modulus: ell,
        });
    }
    let mut w = 1u32;
    let mut acc = q;
    while acc != 1 {
        acc = field.mul(acc, q);
        w += 1;
    }
    Ok(w)
}

/// A fixed choice of `(ell, q)`: the prime field, the image of the prime
/// power `q` in it, and the order `w` of that image.
#[derive(Debug, Serialize, Deserialize)]
pub struct QContext {
    field: PrimeField,
    q: Fp,
    q_int: u64,
    w: u32,
    #[serde(skip)]
    binom_cache: Mutex<Vec<Vec<Fp>>>,
}

impl Clone for QContext {
    fn clone(&self) -> Self {
        QContext {
            field: self.field,
            q: self.q,
            q_int: self.q_int,
            w: self.w,
            binom_cache: Mutex::new(Vec::new()),
        }
    }
}

impl PartialEq for QContext {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.q_int == other.q_int
    }
}
impl Eq for QContext {}

impl QContext {
    /// Builds the context for a prime `ell` and integer `q_int >= 1`.
    ///
    /// `q_int = 1` is the symmetric-group degeneration; values `>= 2` must
    /// be prime powers coprime to `ell`.
    pub fn new(ell: u64, q_int: u64) -> Result<Self, QdpError> {
        let field = PrimeField::new(ell)?;
        if q_int == 0 || field.reduce(q_int) == 0 {
            return Err(QdpError::BadQ { q: q_int, ell });
        }
        if q_int >= 2 && prime_power_base(q_int).is_none() {
            return Err(QdpError::NotPrimePower(q_int));
        }
        let w = order_of_q(ell, q_int)?;
        Ok(QContext {
            field,
            q: field.reduce(q_int),
            q_int,
            w,
            binom_cache: Mutex::new(Vec::new()),
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn ell(&self) -> u64 {
        self.field.ell()
    }

    /// The image of `q` in `F_ell`.
    pub fn q(&self) -> Fp {
        self.q
    }

    pub fn q_int(&self) -> u64 {
        self.q_int
    }

    /// The order of `q` in `F_ell^*`.
    pub fn w(&self) -> u32 {
        self.w
    }

    /// `q^e` in `F_ell`, with `e` allowed to be any nonnegative integer.
    pub fn q_pow(&self, e: u64) -> Fp {
        self.field.pow(self.q, e)
    }

    /// The Gaussian binomial evaluated at `q` in `F_ell`.
    ///
    /// Computed by the Pascal recurrence
    /// `[n m] = q^m [n-1 m] + [n-1 m-1]`, memoized row by row; total on
    /// nonnegative integers (`m > n` gives zero).
    pub fn q_binomial(&self, n: usize, m: usize) -> Fp {
        if m > n {
            return 0;
        }
        let mut cache = self.binom_cache.lock().unwrap();
        while cache.len() <= n {
            let r = cache.len();
            let mut row: Vec<Fp> = vec![0; r + 1];
            row[0] = 1;
            row[r] = 1;
            for m in 1..r {
                let qm = self.field.pow(self.q, m as u64);
                row[m] = self
                    .field
                    .add(self.field.mul(qm, cache[r - 1][m]), cache[r - 1][m - 1]);
            }
            cache.push(row);
        }
        cache[n][m]
    }

    /// The q-integer `[n] = 1 + q + ... + q^{n-1}` in `F_ell`.
    pub fn q_int_of(&self, n: usize) -> Fp {
        self.q_binomial(n, 1.min(n))
    }

    /// `b_i` of the periodicity sequence: `b_0 = 1`; for `w > 1`,
    /// `b_i = w ell^{i-1}`; for `w = 1`, `b_i = ell^i`.
    pub fn b_value(&self, i: usize) -> u64 {
        if i == 0 {
            return 1;
        }
        let ell = self.ell();
        if self.w > 1 {
            self.w as u64 * ell.pow(i as u32 - 1)
        } else {
            ell.pow(i as u32)
        }
    }

    /// Smallest nonnegative `r` with `n <= b_r`; values `<= 1` give 0.
    pub fn fl(&self, n: i64) -> usize {
        if n <= 1 {
            return 0;
        }
        let n = n as u64;
        let mut r = 0usize;
        while self.b_value(r) < n {
            r += 1;
        }
        r
    }
}

/// The b-sequence as a value, for callers that want to hold the prefix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BSequence {
    ell: u64,
    w: u32,
    values: Vec<u64>,
}

impl BSequence {
    pub fn new(ctx: &QContext, len: usize) -> Self {
        BSequence {
            ell: ctx.ell(),
            w: ctx.w(),
            values: (0..len).map(|i| ctx.b_value(i)).collect(),
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// The integer Gaussian binomial `[n m]_q` as an exact big integer,
/// by the integer Pascal recurrence (no division).
pub fn q_binomial_int(n: usize, m: usize, q_int: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q_int);
    // row r holds [r k]_q for k = 0..=r
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for r in 1..=n {
        let mut next: Vec<BigUint> = vec![BigUint::zero(); r + 1];
        next[0] = BigUint::one();
        next[r] = BigUint::one();
        for k in 1..r {
            next[k] = q.pow(k as u32) * &row[k] + &row[k - 1];
        }
        row = next;
    }
    row[m].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: count m-dimensional subspaces of F_q^n by brute
    /// force, for prime q. A subspace is identified with the set of vectors
    /// it contains; we enumerate all echelon-basis candidates by closing
    /// vector subsets under span and deduplicating.
    fn count_subspaces_bruteforce(n: u32, m: u32, q: u64) -> u64 {
        assert!(q == 2 || q == 3, "oracle restricted to prime q");
        let qn = q.pow(n);
        // all vectors of F_q^n encoded in base q
        let add = |a: u64, b: u64| -> u64 {
            let mut out = 0u64;
            let mut mult = 1u64;
            let (mut a, mut b) = (a, b);
            for _ in 0..n {
                out += ((a % q + b % q) % q) * mult;
                a /= q;
                b /= q;
                mult *= q;
            }
            out
        };
        let scale = |c: u64, a: u64| -> u64 {
            let mut out = 0u64;
            let mut mult = 1u64;
            let mut a = a;
            for _ in 0..n {
                out += ((a % q) * c % q) * mult;
                a /= q;
                mult *= q;
            }
            out
        };
        let span = |gens: &[u64]| -> Vec<u64> {
            let mut set = std::collections::BTreeSet::new();
            set.insert(0u64);
            let mut frontier = vec![0u64];
            while let Some(v) = frontier.pop() {
                for g in gens {
                    for c in 1..q {
                        let w = add(v, scale(c, *g));
                        if set.insert(w) {
                            frontier.push(w);
                        }
                    }
                }
            }
            set.into_iter().collect()
        };
        let mut subspaces = std::collections::BTreeSet::new();
        // enumerate all m-subsets of nonzero vectors as generator candidates
        fn rec(
            start: u64,
            left: u32,
            gens: &mut Vec<u64>,
            qn: u64,
            span: &dyn Fn(&[u64]) -> Vec<u64>,
            out: &mut std::collections::BTreeSet<Vec<u64>>,
            target_dim: u32,
            q: u64,
        ) {
            if left == 0 {
                let s = span(gens);
                if s.len() == q.pow(target_dim) as usize {
                    out.insert(s);
                }
                return;
            }
            for v in start..qn {
                gens.push(v);
                rec(v + 1, left - 1, gens, qn, span, out, target_dim, q);
                gens.pop();
            }
        }
        rec(1, m, &mut Vec::new(), qn, &span, &mut subspaces, m, q);
        subspaces.len() as u64
    }

    #[test]
    fn q_binomial_2_1_is_one_plus_q() {
        for (ell, q) in [(3u64, 2u64), (5, 2), (2, 3), (5, 4), (3, 4)] {
            let ctx = QContext::new(ell, q).unwrap();
            assert_eq!(ctx.q_binomial(2, 1), ctx.field().reduce(1 + q));
        }
    }

    #[test]
    fn integer_binomial_counts_subspaces() {
        // frozen from the brute-force subspace count
        assert_eq!(count_subspaces_bruteforce(4, 2, 2), 35);
        assert_eq!(q_binomial_int(4, 2, 2), BigUint::from(35u32));
        assert_eq!(count_subspaces_bruteforce(2, 1, 3), 4);
        assert_eq!(q_binomial_int(2, 1, 3), BigUint::from(4u32));
        assert_eq!(count_subspaces_bruteforce(3, 1, 2), 7);
        assert_eq!(count_subspaces_bruteforce(3, 2, 2), 7);
        assert_eq!(q_binomial_int(3, 2, 2), BigUint::from(7u32));
        // the (4 choose 2)_3 = 130 value used by the divided power tests
        assert_eq!(count_subspaces_bruteforce(4, 2, 3), 130);
        assert_eq!(q_binomial_int(4, 2, 3), BigUint::from(130u32));
    }

    #[test]
    fn field_value_reduces_integer_value() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 2), (5, 4), (3, 4), (5, 3)] {
            let ctx = QContext::new(ell, q).unwrap();
            for n in 0..=20usize {
                for m in 0..=n {
                    let big = q_binomial_int(n, m, q) % BigUint::from(ell);
                    let expect: u64 = big.try_into().unwrap();
                    assert_eq!(ctx.q_binomial(n, m), expect, "n={n} m={m} ell={ell} q={q}");
                }
            }
        }
    }

    #[test]
    fn one_plus_two_vanishes_mod_three() {
        let ctx = QContext::new(3, 2).unwrap();
        assert_eq!(ctx.q_binomial(2, 1), 0);
    }

    #[test]
    fn pascal_both_forms_and_symmetry() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 2), (5, 4), (3, 4)] {
            let ctx = QContext::new(ell, q).unwrap();
            let f = ctx.field();
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
                    assert_eq!(lhs, a);
                    assert_eq!(lhs, b);
                    assert_eq!(lhs, ctx.q_binomial(n, n - m));
                }
            }
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_of_q(3, 2).unwrap(), 2);
        assert_eq!(order_of_q(2, 3).unwrap(), 1);
        assert_eq!(order_of_q(5, 4).unwrap(), 2);
        assert_eq!(order_of_q(5, 2).unwrap(), 4);
        assert!(order_of_q(3, 6).is_err());
    }

    #[test]
    fn b_sequence_examples() {
        let ctx = QContext::new(3, 2).unwrap(); // w = 2
        assert_eq!(
            (0..4).map(|i| ctx.b_value(i)).collect::<Vec<_>>(),
            vec![1, 2, 6, 18]
        );
        let ctx = QContext::new(2, 3).unwrap(); // w = 1
        assert_eq!(
            (0..4).map(|i| ctx.b_value(i)).collect::<Vec<_>>(),
            vec![1, 2, 4, 8]
        );
        let ctx = QContext::new(5, 4).unwrap();
        assert_eq!(ctx.b_value(0), 1);
    }

    #[test]
    fn fl_examples() {
        let ctx = QContext::new(3, 2).unwrap(); // b = 1,2,6,18,54
        assert_eq!(ctx.fl(5), 2);
        assert_eq!(ctx.fl(1), 0);
        assert_eq!(ctx.fl(19), 4);
        assert_eq!(ctx.fl(0), 0);
        assert_eq!(ctx.fl(-7), 0);
        assert_eq!(ctx.fl(2), 1);
        assert_eq!(ctx.fl(18), 3);
    }

    #[test]
    fn fl_subadditive() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 4)] {
            let ctx = QContext::new(ell, q).unwrap();
            for a in 0..60i64 {
                for b in 0..60i64 {
                    assert!(ctx.fl(a + b) <= ctx.fl(a).max(ctx.fl(b)) + 1);
                }
            }
        }
    }

    #[test]
    fn vanishing_at_b_steps() {
        for (ell, q) in [(3u64, 2u64), (2, 3), (5, 2), (5, 4), (3, 4)] {
            let ctx = QContext::new(ell, q).unwrap();
            for r in 0..=3usize {
                let n = ctx.b_value(r) as usize;
                if n > 200 {
                    continue;
                }
                for i in 1..n {
                    assert_eq!(ctx.q_binomial(n, i), 0, "ell={ell} q={q} n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(QContext::new(2, 2).is_err());
        assert!(QContext::new(3, 6).is_err()); // 6 is not a prime power
        assert!(QContext::new(2, 4).is_err()); // 2 divides 4
        assert!(QContext::new(3, 1).is_ok()); // symmetric-group degeneration
        assert_eq!(QContext::new(3, 1).unwrap().w(), 1);
    }
}
