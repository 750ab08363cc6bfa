//! Small Galois fields `F_q` for prime powers q, with table-based arithmetic.
//!
//! These are the entry fields for matrix groups and flag enumeration
//! (`F_2`, `F_3`, `F_4`, ...). Elements are encoded as `u8` values in
//! `0..q`; a value encodes the coefficient vector of a polynomial over
//! `F_p` in base `p`, so `0` and `1` are the field's zero and one.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::QdpError;
use crate::field::prime_power_base;

#[derive(Debug)]
pub struct SmallField {
    q: u16,
    p: u16,
    degree: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn poly_mul_mod(a: u16, b: u16, p: u16, k: u32, reduction: &[u16]) -> u16 {
    // coefficient vectors in base p; reduction holds the coefficients of
    // x^k (the lower part of the monic irreducible, negated).
    let digits = |mut v: u16| -> Vec<u16> {
        let mut d = vec![0u16; 2 * k as usize];
        for slot in d.iter_mut() {
            *slot = v % p;
            v /= p;
        }
        d
    };
    let da = digits(a);
    let db = digits(b);
    let mut prod = vec![0u16; 2 * k as usize];
    for (i, &ca) in da.iter().enumerate().take(k as usize) {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in db.iter().enumerate().take(k as usize) {
            prod[i + j] = (prod[i + j] + ca * cb) % p;
        }
    }
    // reduce degrees >= k downwards
    for d in (k as usize..2 * k as usize).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for (j, &r) in reduction.iter().enumerate() {
            prod[d - k as usize + j] = (prod[d - k as usize + j] + c * r) % p;
        }
    }
    let mut out = 0u16;
    for i in (0..k as usize).rev() {
        out = out * p + prod[i];
    }
    out
}

/// Finds the lexicographically first monic irreducible polynomial of
/// degree `k` over `F_p`, returned as the coefficient vector of
/// `x^k mod f` (i.e. minus the lower part).
fn irreducible_reduction(p: u16, k: u32) -> Vec<u16> {
    // candidate lower parts c_0..c_{k-1}; f = x^k + sum c_i x^i
    let total = (p as u64).pow(k);
    'cand: for code in 0..total {
        let mut c = Vec::with_capacity(k as usize);
        let mut v = code;
        for _ in 0..k {
            c.push((v % p as u64) as u16);
            v /= p as u64;
        }
        // f irreducible iff no factor of degree <= k/2; for k <= 3 testing
        // roots suffices, for k = 4 also exclude quadratic factors.
        let eval = |x: u16| -> u16 {
            let mut acc = 1u16; // monic leading term
            for i in (0..k as usize).rev() {
                acc = (acc * x + c[i]) % p;
            }
            acc
        };
        for x in 0..p {
            if eval(x) == 0 {
                continue 'cand;
            }
        }
        if k == 4 {
            // trial divide by monic irreducible quadratics
            for b in 0..p {
                for a in 0..p {
                    // g = x^2 + a x + b, irreducible over F_p?
                    let mut irr = true;
                    for x in 0..p {
                        if (x * x + a * x + b) % p == 0 {
                            irr = false;
                            break;
                        }
                    }
                    if !irr {
                        continue;
                    }
                    // long-divide f by g and check remainder
                    let mut f = vec![0u16; k as usize + 1];
                    f[k as usize] = 1;
                    for (i, &ci) in c.iter().enumerate() {
                        f[i] = ci;
                    }
                    for d in (2..=k as usize).rev() {
                        let lead = f[d] % p;
                        if lead == 0 {
                            continue;
                        }
                        f[d] = 0;
                        f[d - 1] = (f[d - 1] + (p - lead) * a % p + p) % p;
                        f[d - 2] = (f[d - 2] + (p - lead) * b % p + p) % p;
                    }
                    if f[0] % p == 0 && f[1] % p == 0 {
                        continue 'cand;
                    }
                }
            }
        }
        // reduction vector: x^k = -(lower part)
        return c.iter().map(|&ci| (p - ci % p) % p).collect();
    }
    unreachable!("no irreducible polynomial found");
}

impl SmallField {
    fn build(q: u16) -> Result<Self, QdpError> {
        let p = prime_power_base(q as u64).ok_or(QdpError::NotPrimePower(q as u64))? as u16;
        let mut degree = 0u32;
        let mut m = q;
        while m > 1 {
            m /= p;
            degree += 1;
        }
        let reduction = if degree == 1 {
            vec![0u16]
        } else {
            irreducible_reduction(p, degree)
        };
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        let mut neg = vec![0u8; n];
        let mut inv = vec![0u8; n];
        for a in 0..q {
            for b in 0..q {
                // addition is coefficientwise mod p
                let (mut x, mut y) = (a, b);
                let mut s = 0u16;
                let mut mult = 1u16;
                for _ in 0..degree {
                    s += (x % p + y % p) % p * mult;
                    x /= p;
                    y /= p;
                    mult *= p;
                }
                add[a as usize * n + b as usize] = s as u8;
                let m = if degree == 1 {
                    (a * b) % p
                } else {
                    poly_mul_mod(a, b, p, degree, &reduction)
                };
                mul[a as usize * n + b as usize] = m as u8;
                if m == 1 {
                    inv[a as usize] = b as u8;
                }
                if s == 0 {
                    neg[a as usize] = b as u8;
                }
            }
        }
        Ok(SmallField {
            q,
            p,
            degree,
            add,
            mul,
            neg,
            inv,
        })
    }

    /// Shared, cached field for a given q.
    pub fn get(q: u64) -> Result<Arc<SmallField>, QdpError> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<SmallField>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        if let Some(f) = guard.get(&q) {
            return Ok(f.clone());
        }
        if q > 256 {
            return Err(QdpError::InvalidInput(format!("field size {q} too large")));
        }
        let f = Arc::new(SmallField::build(q as u16)?);
        guard.insert(q, f.clone());
        Ok(f)
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q as u64
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }
}
