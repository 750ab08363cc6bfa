//! Finite groups with exactly enumerated elements.
//!
//! Elements are packed into `u64` codes (permutation images or matrix
//! entries in 4-bit fields, or plain table indices); a group is a sorted
//! list of codes over a shared universe, so subgroups of a common ambient
//! group literally share element codes and inclusions are free. Families:
//! symmetric groups, `GL_n(F_q)`, parabolic subgroups with barred and
//! zeroed blocks, quotients, direct factors (Levi, Young), and raw tables.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use serde::Deserialize;

use crate::error::QdpError;
use crate::gf::SmallField;

static NEXT_GROUP_ID: AtomicU64 = AtomicU64::new(1);

/// Shared universes so that subgroup relations across independently built
/// groups are recognized by pointer identity.
fn mat_universe(n: usize, q: u64) -> Result<Arc<Universe>, QdpError> {
    static CACHE: OnceLock<std::sync::Mutex<HashMap<(usize, u64), Arc<Universe>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(u) = guard.get(&(n, q)) {
        return Ok(u.clone());
    }
    let u = Arc::new(Universe::Mat {
        n,
        field: SmallField::get(q)?,
    });
    guard.insert((n, q), u.clone());
    Ok(u)
}

fn perm_universe(n: usize) -> Arc<Universe> {
    static CACHE: OnceLock<std::sync::Mutex<HashMap<usize, Arc<Universe>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(Universe::Perm { n }))
        .clone()
}

/// The element domain a group lives in.
#[derive(Debug)]
pub enum Universe {
    /// permutations of `0..n`, images packed 4 bits each
    Perm { n: usize },
    /// n x n matrices over F_q, entries packed 4 bits each, row-major
    Mat { n: usize, field: Arc<SmallField> },
    /// abstract finite group given by a multiplication table on 0..size
    Table {
        size: usize,
        mul: Vec<u32>,
        inv: Vec<u32>,
    },
}

impl Universe {
    pub fn mul_code(&self, a: u64, b: u64) -> u64 {
        match self {
            Universe::Perm { n } => {
                let mut out = 0u64;
                for i in 0..*n {
                    let bi = (b >> (4 * i)) & 0xf;
                    let abi = (a >> (4 * bi)) & 0xf;
                    out |= abi << (4 * i);
                }
                out
            }
            Universe::Mat { n, field } => {
                let n = *n;
                let mut out = 0u64;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0u8;
                        for k in 0..n {
                            let x = ((a >> (4 * (i * n + k))) & 0xf) as u8;
                            let y = ((b >> (4 * (k * n + j))) & 0xf) as u8;
                            acc = field.add(acc, field.mul(x, y));
                        }
                        out |= (acc as u64) << (4 * (i * n + j));
                    }
                }
                out
            }
            Universe::Table { size, mul, .. } => {
                mul[a as usize * *size + b as usize] as u64
            }
        }
    }

    pub fn inv_code(&self, a: u64) -> u64 {
        match self {
            Universe::Perm { n } => {
                let mut out = 0u64;
                for i in 0..*n {
                    let ai = (a >> (4 * i)) & 0xf;
                    out |= (i as u64) << (4 * ai);
                }
                out
            }
            Universe::Mat { n, field } => {
                // Gauss-Jordan on the small matrix
                let n = *n;
                let mut m = vec![0u8; n * n];
                let mut inv = vec![0u8; n * n];
                for i in 0..n {
                    inv[i * n + i] = 1;
                    for j in 0..n {
                        m[i * n + j] = ((a >> (4 * (i * n + j))) & 0xf) as u8;
                    }
                }
                for col in 0..n {
                    let pivot = (col..n)
                        .find(|&r| m[r * n + col] != 0)
                        .expect("invertible matrix");
                    for j in 0..n {
                        m.swap(col * n + j, pivot * n + j);
                        inv.swap(col * n + j, pivot * n + j);
                    }
                    let pv = field.inv(m[col * n + col]);
                    for j in 0..n {
                        m[col * n + j] = field.mul(m[col * n + j], pv);
                        inv[col * n + j] = field.mul(inv[col * n + j], pv);
                    }
                    for r in 0..n {
                        if r != col && m[r * n + col] != 0 {
                            let c = m[r * n + col];
                            for j in 0..n {
                                m[r * n + j] = field.sub(m[r * n + j], field.mul(c, m[col * n + j]));
                                inv[r * n + j] =
                                    field.sub(inv[r * n + j], field.mul(c, inv[col * n + j]));
                            }
                        }
                    }
                }
                let mut out = 0u64;
                for (idx, &v) in inv.iter().enumerate() {
                    out |= (v as u64) << (4 * idx);
                }
                out
            }
            Universe::Table { inv, .. } => inv[a as usize] as u64,
        }
    }

    pub fn id_code(&self) -> u64 {
        match self {
            Universe::Perm { n } => {
                let mut out = 0u64;
                for i in 0..*n {
                    out |= (i as u64) << (4 * i);
                }
                out
            }
            Universe::Mat { n, .. } => {
                let mut out = 0u64;
                for i in 0..*n {
                    out |= 1u64 << (4 * (i * n + i));
                }
                out
            }
            Universe::Table { .. } => 0,
        }
    }
}

/// A finite group: a sorted code list over a universe, with generators.
#[derive(Debug)]
pub struct FiniteGroup {
    pub id: u64,
    pub name: String,
    pub universe: Arc<Universe>,
    /// sorted element codes; index into this list is the element index
    codes: Vec<u64>,
    id_idx: u32,
    gens: Vec<u32>,
    mul_table: OnceLock<Vec<u32>>,
    inv_cache: OnceLock<Vec<u32>>,
}

/// Groups small enough to precompute the full multiplication table.
const MUL_TABLE_LIMIT: usize = 1024;

impl FiniteGroup {
    fn assemble(name: String, universe: Arc<Universe>, mut codes: Vec<u64>) -> Arc<FiniteGroup> {
        codes.sort_unstable();
        codes.dedup();
        let id_code = universe.id_code();
        let id_idx = codes.binary_search(&id_code).expect("identity present") as u32;
        let mut g = FiniteGroup {
            id: NEXT_GROUP_ID.fetch_add(1, Ordering::Relaxed),
            name,
            universe,
            codes,
            id_idx,
            gens: Vec::new(),
            mul_table: OnceLock::new(),
            inv_cache: OnceLock::new(),
        };
        g.gens = g.find_generators();
        Arc::new(g)
    }

    /// Greedy small generating set.
    fn find_generators(&self) -> Vec<u32> {
        let n = self.order();
        if n == 1 {
            return Vec::new();
        }
        let mut gens: Vec<u32> = Vec::new();
        let mut reached: HashSet<u32> = HashSet::new();
        reached.insert(self.id_idx);
        let mut frontier: Vec<u32> = vec![self.id_idx];
        for cand in 0..n as u32 {
            if reached.len() == n {
                break;
            }
            if reached.contains(&cand) {
                continue;
            }
            gens.push(cand);
            // grow closure with the new generator
            frontier.clear();
            frontier.extend(reached.iter().copied());
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if reached.insert(y) {
                        frontier.push(y);
                    }
                    let y2 = self.mul(g, x);
                    if reached.insert(y2) {
                        frontier.push(y2);
                    }
                }
            }
        }
        gens
    }

    pub fn order(&self) -> usize {
        self.codes.len()
    }

    pub fn identity(&self) -> u32 {
        self.id_idx
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn code(&self, idx: u32) -> u64 {
        self.codes[idx as usize]
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn index_of_code(&self, code: u64) -> Option<u32> {
        self.codes.binary_search(&code).ok().map(|i| i as u32)
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if let Some(t) = self.mul_table.get() {
            return t[a as usize * self.order() + b as usize];
        }
        if self.order() <= MUL_TABLE_LIMIT {
            let n = self.order();
            let t = self.mul_table.get_or_init(|| {
                let mut t = vec![0u32; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let c = self
                            .universe
                            .mul_code(self.codes[i], self.codes[j]);
                        t[i * n + j] = self.index_of_code(c).expect("closed");
                    }
                }
                t
            });
            return t[a as usize * self.order() + b as usize];
        }
        let c = self
            .universe
            .mul_code(self.codes[a as usize], self.codes[b as usize]);
        self.index_of_code(c).expect("group closed under product")
    }

    pub fn inv(&self, a: u32) -> u32 {
        if self.order() <= MUL_TABLE_LIMIT {
            let inv = self.inv_cache.get_or_init(|| {
                (0..self.order() as u32)
                    .map(|i| {
                        self.index_of_code(self.universe.inv_code(self.codes[i as usize]))
                            .expect("closed under inverse")
                    })
                    .collect()
            });
            return inv[a as usize];
        }
        self.index_of_code(self.universe.inv_code(self.codes[a as usize]))
            .expect("closed under inverse")
    }

    /// `g h g^{-1}` by element indices.
    pub fn conj(&self, g: u32, h: u32) -> u32 {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1usize;
        while x != self.id_idx {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    // ---- constructors ----

    pub fn trivial() -> Arc<FiniteGroup> {
        let uni = Arc::new(Universe::Table {
            size: 1,
            mul: vec![0],
            inv: vec![0],
        });
        Self::assemble("1".into(), uni, vec![0])
    }

    pub fn cyclic(n: usize) -> Arc<FiniteGroup> {
        let mut mul = vec![0u32; n * n];
        let mut inv = vec![0u32; n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = ((i + j) % n) as u32;
            }
            inv[i] = ((n - i) % n) as u32;
        }
        let uni = Arc::new(Universe::Table { size: n, mul, inv });
        Self::assemble(format!("Z/{n}"), uni, (0..n as u64).collect())
    }

    pub fn symmetric(n: usize) -> Arc<FiniteGroup> {
        assert!(n <= 8, "symmetric groups limited to n <= 8");
        let uni = perm_universe(n);
        let mut codes = Vec::new();
        let mut perm: Vec<u64> = (0..n as u64).collect();
        fn heap(k: usize, perm: &mut Vec<u64>, out: &mut Vec<u64>) {
            if k <= 1 {
                let mut code = 0u64;
                for (i, &p) in perm.iter().enumerate() {
                    code |= p << (4 * i);
                }
                out.push(code);
                return;
            }
            for i in 0..k {
                heap(k - 1, perm, out);
                if k % 2 == 0 {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
            }
        }
        if n == 0 {
            codes.push(0);
        } else {
            heap(n, &mut perm, &mut codes);
        }
        Self::assemble(format!("Sym({n})"), uni, codes)
    }

    /// All invertible `n x n` matrices over `F_q`, enumerated by extending
    /// linearly independent row systems.
    pub fn gl(n: usize, q: u64) -> Result<Arc<FiniteGroup>, QdpError> {
        assert!(n >= 1 && n <= 4, "GL limited to 1 <= n <= 4");
        let field = SmallField::get(q)?;
        if q > 9 {
            return Err(QdpError::InvalidInput("q too large for packed codes".into()));
        }
        let qn = (q as usize).pow(n as u32);
        // vectors of F_q^n as arrays of digits
        let vec_of = |code: usize| -> Vec<u8> {
            let mut v = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                v.push((c % q as usize) as u8);
                c /= q as usize;
            }
            v
        };
        let add_vec = |a: &[u8], b: &[u8]| -> Vec<u8> {
            a.iter().zip(b.iter()).map(|(&x, &y)| field.add(x, y)).collect()
        };
        let scale_vec = |c: u8, a: &[u8]| -> Vec<u8> {
            a.iter().map(|&x| field.mul(c, x)).collect()
        };
        let code_of = |v: &[u8]| -> usize {
            let mut c = 0usize;
            for &x in v.iter().rev() {
                c = c * q as usize + x as usize;
            }
            c
        };

        let mut out = Vec::new();
        // depth-first over row choices, tracking the span as a bitset
        struct St {
            rows: Vec<usize>,
            span: Vec<bool>,
        }
        let mut stack = vec![St {
            rows: vec![],
            span: {
                let mut s = vec![false; qn];
                s[0] = true;
                s
            },
        }];
        while let Some(st) = stack.pop() {
            if st.rows.len() == n {
                let mut code = 0u64;
                for (i, &r) in st.rows.iter().enumerate() {
                    let v = vec_of(r);
                    for (j, &x) in v.iter().enumerate() {
                        code |= (x as u64) << (4 * (i * n + j));
                    }
                }
                out.push(code);
                continue;
            }
            for cand in (1..qn).rev() {
                if st.span[cand] {
                    continue;
                }
                let mut span = st.span.clone();
                let cv = vec_of(cand);
                // close span under adding multiples of cand
                let olds: Vec<usize> = span
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect();
                for s in olds {
                    let sv = vec_of(s);
                    for c in 1..q as u8 {
                        let w = add_vec(&sv, &scale_vec(c, &cv));
                        span[code_of(&w)] = true;
                    }
                }
                let mut rows = st.rows.clone();
                rows.push(cand);
                stack.push(St { rows, span });
            }
        }
        let _ = field;
        let uni = mat_universe(n, q)?;
        Ok(Self::assemble(format!("GL({n},F_{q})"), uni, out))
    }

    /// Block upper-triangular subgroup of `GL_d(F_q)` for the given block
    /// sizes; `barred[i]` forces the i-th diagonal block to the identity,
    /// and `zero_blocks` lists 1-based `(i, j)` block positions (above the
    /// diagonal) forced to zero. Zero-size blocks are dropped.
    pub fn parabolic(
        q: u64,
        blocks: &[usize],
        barred: &[bool],
        zero_blocks: &[(usize, usize)],
    ) -> Result<Arc<FiniteGroup>, QdpError> {
        let mut sizes = Vec::new();
        let mut flags = Vec::new();
        let mut keep = Vec::new(); // original index of kept blocks
        for (i, &b) in blocks.iter().enumerate() {
            if b > 0 {
                sizes.push(b);
                flags.push(*barred.get(i).unwrap_or(&false));
                keep.push(i + 1);
            }
        }
        let zeroed: Vec<(usize, usize)> = zero_blocks
            .iter()
            .filter_map(|&(i, j)| {
                let a = keep.iter().position(|&k| k == i)?;
                let b = keep.iter().position(|&k| k == j)?;
                Some((a, b))
            })
            .collect();
        let d: usize = sizes.iter().sum();
        assert!(d >= 1 && d <= 4);
        let field = SmallField::get(q)?;
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0usize, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        // diagonal choices per block
        let mut diag_choices: Vec<Vec<u64>> = Vec::new();
        for (bi, &s) in sizes.iter().enumerate() {
            if flags[bi] {
                diag_choices.push(vec![Self::gl(s.max(1), q)?.universe.id_code()]);
            } else {
                diag_choices.push(Self::gl(s, q)?.codes.clone());
            }
        }
        // free entry positions (above-diagonal blocks not zeroed)
        let mut free_pos: Vec<(usize, usize)> = Vec::new();
        for bi in 0..sizes.len() {
            for bj in (bi + 1)..sizes.len() {
                if zeroed.contains(&(bi, bj)) {
                    continue;
                }
                for r in 0..sizes[bi] {
                    for c in 0..sizes[bj] {
                        free_pos.push((offsets[bi] + r, offsets[bj] + c));
                    }
                }
            }
        }
        let mut out: Vec<u64> = Vec::new();
        // iterate: diagonal block tuple x free entries
        let mut diag_idx = vec![0usize; sizes.len()];
        loop {
            // base matrix with diagonal blocks
            let mut base = 0u64;
            for (bi, &s) in sizes.iter().enumerate() {
                let bc = diag_choices[bi][diag_idx[bi]];
                for r in 0..s {
                    for c in 0..s {
                        let v = (bc >> (4 * (r * s + c))) & 0xf;
                        base |= v << (4 * ((offsets[bi] + r) * d + offsets[bi] + c));
                    }
                }
            }
            // enumerate free entries in base-q counter
            let total = (q as u64).pow(free_pos.len() as u32);
            for counter in 0..total {
                let mut m = base;
                let mut c = counter;
                for &(r, cc) in &free_pos {
                    let v = c % q;
                    c /= q;
                    m |= v << (4 * (r * d + cc));
                }
                out.push(m);
            }
            // advance diagonal indices
            let mut bi = 0;
            loop {
                if bi == sizes.len() {
                    let _ = &field;
                    let uni = mat_universe(d, q)?;
                    let name = format!(
                        "P({:?},q={q}{})",
                        sizes,
                        if flags.iter().any(|&b| b) { ",barred" } else { "" }
                    );
                    return Ok(Self::assemble(name, uni, out));
                }
                diag_idx[bi] += 1;
                if diag_idx[bi] < diag_choices[bi].len() {
                    break;
                }
                diag_idx[bi] = 0;
                bi += 1;
            }
        }
    }

    pub fn from_table(mul: Vec<Vec<u32>>) -> Result<Arc<FiniteGroup>, QdpError> {
        let n = mul.len();
        let mut flat = vec![0u32; n * n];
        for (i, row) in mul.iter().enumerate() {
            if row.len() != n {
                return Err(QdpError::InvalidInput("table not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v as usize >= n {
                    return Err(QdpError::InvalidInput("table entry out of range".into()));
                }
                flat[i * n + j] = v;
            }
        }
        // identity must be 0
        for i in 0..n {
            if flat[i] != i as u32 || flat[i * n] != i as u32 {
                return Err(QdpError::InvalidInput(
                    "element 0 must be the identity".into(),
                ));
            }
        }
        let mut inv = vec![u32::MAX; n];
        for i in 0..n {
            for j in 0..n {
                if flat[i * n + j] == 0 {
                    inv[i] = j as u32;
                }
            }
            if inv[i] == u32::MAX {
                return Err(QdpError::InvalidInput(format!("no inverse for {i}")));
            }
        }
        // associativity spot check on all triples for small tables
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let ab_c = flat[flat[a * n + b] as usize * n + c];
                        let a_bc = flat[a * n + flat[b * n + c] as usize];
                        if ab_c != a_bc {
                            return Err(QdpError::InvalidInput("table not associative".into()));
                        }
                    }
                }
            }
        }
        let uni = Arc::new(Universe::Table {
            size: n,
            mul: flat,
            inv,
        });
        Ok(Self::assemble(format!("Table({n})"), uni, (0..n as u64).collect()))
    }

    /// Subgroup sharing this group's universe, from explicit codes.
    pub fn subgroup_from_codes(&self, name: String, codes: Vec<u64>) -> Arc<FiniteGroup> {
        Self::assemble(name, self.universe.clone(), codes)
    }

    /// Closure of the given element indices, as a subgroup.
    pub fn generated_subgroup(&self, name: String, gen_idx: &[u32]) -> Arc<FiniteGroup> {
        let mut seen: HashSet<u32> = HashSet::new();
        seen.insert(self.id_idx);
        let mut frontier = vec![self.id_idx];
        while let Some(x) = frontier.pop() {
            for &g in gen_idx {
                for y in [self.mul(x, g), self.mul(g, x)] {
                    if seen.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        let codes = seen.iter().map(|&i| self.codes[i as usize]).collect();
        Self::assemble(name, self.universe.clone(), codes)
    }

    /// The Young subgroup of a permutation-universe group: permutations
    /// preserving the consecutive blocks.
    pub fn young_subgroup(&self, parts: &[usize]) -> Arc<FiniteGroup> {
        let n = match &*self.universe {
            Universe::Perm { n } => *n,
            _ => panic!("young subgroup needs a permutation universe"),
        };
        assert_eq!(parts.iter().sum::<usize>(), n);
        let codes: Vec<u64> = self
            .codes
            .iter()
            .copied()
            .filter(|&code| {
                let mut off = 0usize;
                for &p in parts {
                    for i in off..off + p {
                        let img = ((code >> (4 * i)) & 0xf) as usize;
                        if img < off || img >= off + p {
                            return false;
                        }
                    }
                    off += p;
                }
                true
            })
            .collect();
        self.subgroup_from_codes(format!("Young{:?}", parts), codes)
    }

    /// Whether every element of `other` lies in `self` (same universe).
    pub fn contains_group(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.universe, &other.universe)
            && other.codes.iter().all(|&c| self.contains_code(c))
    }

    /// A Sylow ell-subgroup, by normalizer climbing.
    pub fn sylow(self: &Arc<Self>, ell: u64) -> Arc<FiniteGroup> {
        let mut target = 1usize;
        let mut n = self.order();
        while n % ell as usize == 0 {
            n /= ell as usize;
            target *= ell as usize;
        }
        let mut q_codes: Vec<u64> = vec![self.codes[self.id_idx as usize]];
        let mut q_gens: Vec<u32> = Vec::new();
        let mut q_set: HashSet<u32> = [self.id_idx].into_iter().collect();
        while q_set.len() < target {
            // normalizer scan: g normalizes Q iff it conjugates the
            // generators (or the whole set for tiny Q) into Q
            let mut found: Option<u32> = None;
            let check_gens: Vec<u32> = if q_gens.is_empty() {
                vec![]
            } else {
                q_gens.clone()
            };
            'scan: for g in 0..self.order() as u32 {
                if q_set.contains(&g) {
                    // already inside; cannot extend
                    continue;
                }
                for &s in &check_gens {
                    if !q_set.contains(&self.conj(g, s)) {
                        continue 'scan;
                    }
                    if !q_set.contains(&self.conj(self.inv(g), s)) {
                        continue 'scan;
                    }
                }
                // g normalizes Q; find the coset order in N/Q and extract an
                // ell-element of the quotient
                let mut ord = 1usize;
                let mut x = g;
                while !q_set.contains(&x) {
                    x = self.mul(x, g);
                    ord += 1;
                }
                if ord % ell as usize != 0 {
                    continue;
                }
                // g^(ord/ell) has coset order exactly ell
                let mut y = g;
                for _ in 1..(ord / ell as usize) {
                    y = self.mul(y, g);
                }
                found = Some(y);
                break;
            }
            let y = found.expect("Sylow climbing always progresses");
            q_gens.push(y);
            // close
            let mut frontier: Vec<u32> = q_set.iter().copied().collect();
            while let Some(x) = frontier.pop() {
                for &s in &q_gens {
                    for z in [self.mul(x, s), self.mul(s, x)] {
                        if q_set.insert(z) {
                            frontier.push(z);
                        }
                    }
                }
            }
            q_codes = q_set.iter().map(|&i| self.codes[i as usize]).collect();
        }
        let _ = &q_codes;
        let codes: Vec<u64> = q_set.iter().map(|&i| self.codes[i as usize]).collect();
        self.subgroup_from_codes(format!("Syl_{ell}({})", self.name), codes)
    }

    /// Double cosets `H g K` inside this group: canonical representatives
    /// (smallest element index) and sizes, in index order.
    pub fn double_cosets(
        &self,
        h: &FiniteGroup,
        k: &FiniteGroup,
    ) -> Vec<(u32, usize)> {
        let h_idx: Vec<u32> = h
            .codes
            .iter()
            .map(|&c| self.index_of_code(c).expect("H inside G"))
            .collect();
        let k_gens: Vec<u32> = if k.generators().is_empty() {
            vec![]
        } else {
            k.generators()
                .iter()
                .map(|&g| self.index_of_code(k.code(g)).unwrap())
                .collect()
        };
        let h_gens: Vec<u32> = if h.generators().is_empty() {
            vec![]
        } else {
            h.generators()
                .iter()
                .map(|&g| self.index_of_code(h.code(g)).unwrap())
                .collect()
        };
        let _ = h_idx;
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for start in 0..self.order() as u32 {
            if seen[start as usize] {
                continue;
            }
            // BFS closure under left H-gens and right K-gens
            let mut size = 0usize;
            let mut frontier = vec![start];
            seen[start as usize] = true;
            while let Some(x) = frontier.pop() {
                size += 1;
                for &hh in &h_gens {
                    let y = self.mul(hh, x);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        frontier.push(y);
                    }
                }
                for &kk in &k_gens {
                    let y = self.mul(x, kk);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        frontier.push(y);
                    }
                }
            }
            out.push((start, size));
        }
        out
    }

    /// Left coset representatives of `H` in `self` (`g H`), smallest index
    /// first.
    pub fn left_coset_reps(&self, h: &FiniteGroup) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        let h_in_g: Vec<u32> = h
            .codes
            .iter()
            .map(|&c| self.index_of_code(c).expect("H inside G"))
            .collect();
        for g in 0..self.order() as u32 {
            if seen[g as usize] {
                continue;
            }
            reps.push(g);
            for &hh in &h_in_g {
                seen[self.mul(g, hh) as usize] = true;
            }
        }
        reps
    }

    /// Right coset representatives of `H` in `self` (`H g`).
    pub fn right_coset_reps(&self, h: &FiniteGroup) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        let h_in_g: Vec<u32> = h
            .codes
            .iter()
            .map(|&c| self.index_of_code(c).expect("H inside G"))
            .collect();
        for g in 0..self.order() as u32 {
            if seen[g as usize] {
                continue;
            }
            reps.push(g);
            for &hh in &h_in_g {
                seen[self.mul(hh, g) as usize] = true;
            }
        }
        reps
    }

    /// The quotient by a normal subgroup, as a table group, together with
    /// the projection on element indices.
    pub fn quotient(
        self: &Arc<Self>,
        normal: &FiniteGroup,
    ) -> Result<(Arc<FiniteGroup>, Vec<u32>), QdpError> {
        // verify normality
        let n_in_g: Vec<u32> = normal
            .codes
            .iter()
            .map(|&c| {
                self.index_of_code(c)
                    .ok_or_else(|| QdpError::RelationMismatch("N not inside G".into()))
            })
            .collect::<Result<_, _>>()?;
        let n_set: HashSet<u32> = n_in_g.iter().copied().collect();
        for g in 0..self.order() as u32 {
            for &x in &n_in_g {
                if !n_set.contains(&self.conj(g, x)) {
                    return Err(QdpError::RelationMismatch(format!(
                        "subgroup {} not normal in {}",
                        normal.name, self.name
                    )));
                }
            }
        }
        // cosets keyed by canonical (minimal) member index
        let mut coset_of = vec![u32::MAX; self.order()];
        let mut reps: Vec<u32> = Vec::new();
        for g in 0..self.order() as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(g);
            for &x in &n_in_g {
                coset_of[self.mul(g, x) as usize] = c;
            }
        }
        let m = reps.len();
        // identity coset must be index 0 for from_table; reps[coset_of[id]]
        let id_coset = coset_of[self.id_idx as usize];
        if id_coset != 0 {
            reps.swap(0, id_coset as usize);
            for c in coset_of.iter_mut() {
                if *c == 0 {
                    *c = id_coset;
                } else if *c == id_coset {
                    *c = 0;
                }
            }
        }
        let mut mul = vec![vec![0u32; m]; m];
        for (i, &ri) in reps.iter().enumerate() {
            for (j, &rj) in reps.iter().enumerate() {
                mul[i][j] = coset_of[self.mul(ri, rj) as usize];
            }
        }
        let q = Self::from_table(mul)?;
        Ok((q, coset_of))
    }
}

/// JSON group specification for the CLI.
#[derive(Debug, Deserialize)]
#[serde(tag = "family")]
pub enum GroupSpec {
    #[serde(rename = "GL")]
    Gl { n: usize, q: u64 },
    #[serde(rename = "Sym")]
    Sym { n: usize },
    #[serde(rename = "Parabolic")]
    Parabolic {
        q: u64,
        blocks: Vec<usize>,
        #[serde(default)]
        barred: Vec<bool>,
        #[serde(default)]
        zero_blocks: Vec<(usize, usize)>,
    },
    #[serde(rename = "Table")]
    Table { mul: Vec<Vec<u32>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<Arc<FiniteGroup>, QdpError> {
        match self {
            GroupSpec::Gl { n, q } => {
                if *n == 0 {
                    Ok(FiniteGroup::trivial())
                } else {
                    FiniteGroup::gl(*n, *q)
                }
            }
            GroupSpec::Sym { n } => Ok(FiniteGroup::symmetric(*n)),
            GroupSpec::Parabolic {
                q,
                blocks,
                barred,
                zero_blocks,
            } => FiniteGroup::parabolic(*q, blocks, barred, zero_blocks),
            GroupSpec::Table { mul } => FiniteGroup::from_table(mul.clone()),
        }
    }
}

/// An explicit group homomorphism on element indices.
#[derive(Debug)]
pub struct GroupHom {
    pub src: Arc<FiniteGroup>,
    pub dst: Arc<FiniteGroup>,
    images: Vec<u32>,
}

impl GroupHom {
    pub fn new_checked(
        src: Arc<FiniteGroup>,
        dst: Arc<FiniteGroup>,
        images: Vec<u32>,
    ) -> Result<Self, QdpError> {
        if images.len() != src.order() {
            return Err(QdpError::RelationMismatch("image list size".into()));
        }
        // check multiplicativity against the generators
        for &g in src.generators() {
            for x in 0..src.order() as u32 {
                let lhs = images[src.mul(g, x) as usize];
                let rhs = dst.mul(images[g as usize], images[x as usize]);
                if lhs != rhs {
                    return Err(QdpError::RelationMismatch(format!(
                        "not a homomorphism {} -> {}",
                        src.name, dst.name
                    )));
                }
            }
        }
        if images[src.identity() as usize] != dst.identity() {
            return Err(QdpError::RelationMismatch("identity not preserved".into()));
        }
        Ok(GroupHom { src, dst, images })
    }

    /// Inclusion of a subgroup (same universe).
    pub fn inclusion(sub: &Arc<FiniteGroup>, sup: &Arc<FiniteGroup>) -> Result<Self, QdpError> {
        let images = sub
            .codes()
            .iter()
            .map(|&c| {
                sup.index_of_code(c)
                    .ok_or_else(|| QdpError::RelationMismatch("not a subgroup".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupHom {
            src: sub.clone(),
            dst: sup.clone(),
            images,
        })
    }

    /// Quotient projection from coset data.
    pub fn projection(
        src: &Arc<FiniteGroup>,
        dst: &Arc<FiniteGroup>,
        coset_of: Vec<u32>,
    ) -> Self {
        GroupHom {
            src: src.clone(),
            dst: dst.clone(),
            images: coset_of,
        }
    }

    /// Conjugation-style or other code-level map.
    pub fn from_code_map(
        src: &Arc<FiniteGroup>,
        dst: &Arc<FiniteGroup>,
        f: impl Fn(u64) -> u64,
    ) -> Result<Self, QdpError> {
        let images = src
            .codes()
            .iter()
            .map(|&c| {
                dst.index_of_code(f(c))
                    .ok_or_else(|| QdpError::RelationMismatch("image outside target".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroupHom::new_checked(src.clone(), dst.clone(), images)
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.dst.order()];
        for &i in &self.images {
            seen[i as usize] = true;
        }
        seen.iter().all(|&b| b)
    }

    pub fn kernel_codes(&self) -> Vec<u64> {
        (0..self.src.order() as u32)
            .filter(|&i| self.images[i as usize] == self.dst.identity())
            .map(|i| self.src.code(i))
            .collect()
    }
}

/// The block-diagonal Levi subgroup of `GL_{n+m}` isomorphic to
/// `GL_n x GL_m`, together with the projections to the two factors (as
/// factor-group element indices per Levi element).
pub struct LeviData {
    pub levi: Arc<FiniteGroup>,
    pub left: Arc<FiniteGroup>,
    pub right: Arc<FiniteGroup>,
    pub split: Vec<(u32, u32)>,
}

/// Levi of the `(n, m)` parabolic in `GL_{n+m}(F_q)` for `n, m >= 1`,
/// built over the provided factor groups so class data lines up.
pub fn levi_gl_over(
    left: &Arc<FiniteGroup>,
    right: &Arc<FiniteGroup>,
    n: usize,
    m: usize,
    q: u64,
) -> Result<LeviData, QdpError> {
    let d = n + m;
    assert!(n >= 1 && m >= 1);
    let left = left.clone();
    let right = right.clone();
    let ambient_field = SmallField::get(q)?;
    let mut codes = Vec::with_capacity(left.order() * right.order());
    let mut split = Vec::with_capacity(left.order() * right.order());
    let mut pairs: Vec<(u64, (u32, u32))> = Vec::new();
    for (ai, &a) in left.codes().iter().enumerate() {
        for (bi, &b) in right.codes().iter().enumerate() {
            let mut code = 0u64;
            for r in 0..n {
                for c in 0..n {
                    let v = (a >> (4 * (r * n + c))) & 0xf;
                    code |= v << (4 * (r * d + c));
                }
            }
            for r in 0..m {
                for c in 0..m {
                    let v = (b >> (4 * (r * m + c))) & 0xf;
                    code |= v << (4 * ((n + r) * d + (n + c)));
                }
            }
            pairs.push((code, (ai as u32, bi as u32)));
        }
    }
    pairs.sort_unstable_by_key(|&(c, _)| c);
    for (c, s) in pairs {
        codes.push(c);
        split.push(s);
    }
    let _ = ambient_field;
    let uni = mat_universe(d, q)?;
    let levi = FiniteGroup::assemble(format!("Levi({n},{m},q={q})"), uni, codes.clone());
    // codes were sorted, so split lines up with element indices
    Ok(LeviData {
        levi,
        left,
        right,
        split,
    })
}

/// Convenience constructor building fresh factors.
pub fn levi_gl(n: usize, m: usize, q: u64) -> Result<LeviData, QdpError> {
    let left = if n == 0 { FiniteGroup::trivial() } else { FiniteGroup::gl(n, q)? };
    let right = if m == 0 { FiniteGroup::trivial() } else { FiniteGroup::gl(m, q)? };
    levi_gl_over(&left, &right, n, m, q)
}

/// The Young "Levi": `S_n x S_m` inside `S_{n+m}`, with factor projections
/// onto the provided factor groups.
pub fn levi_sym_over(
    left: &Arc<FiniteGroup>,
    right: &Arc<FiniteGroup>,
    n: usize,
    m: usize,
) -> LeviData {
    let big = FiniteGroup::symmetric(n + m);
    let left = left.clone();
    let right = right.clone();
    let sub = big.young_subgroup(&[n, m]);
    let mut split = Vec::with_capacity(sub.order());
    for &code in sub.codes() {
        let mut a = 0u64;
        for i in 0..n {
            a |= ((code >> (4 * i)) & 0xf) << (4 * i);
        }
        let mut b = 0u64;
        for i in 0..m {
            let img = ((code >> (4 * (n + i))) & 0xf) - n as u64;
            b |= img << (4 * i);
        }
        split.push((
            left.index_of_code(a).expect("block perm"),
            right.index_of_code(b).expect("block perm"),
        ));
    }
    LeviData {
        levi: sub,
        left,
        right,
        split,
    }
}

/// Convenience constructor building fresh factors.
pub fn levi_sym(n: usize, m: usize) -> LeviData {
    let left = FiniteGroup::symmetric(n);
    let right = FiniteGroup::symmetric(m);
    levi_sym_over(&left, &right, n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_orders() {
        for n in 0..=5usize {
            let g = FiniteGroup::symmetric(n);
            let fact: usize = (1..=n.max(1)).product();
            assert_eq!(g.order(), fact);
        }
    }

    #[test]
    fn gl_orders() {
        // |GL_n(F_q)| = prod (q^n - q^i)
        let cases = [(1usize, 2u64, 1usize), (2, 2, 6), (3, 2, 168), (2, 3, 48), (1, 4, 3), (2, 4, 180)];
        for (n, q, expect) in cases {
            let g = FiniteGroup::gl(n, q).unwrap();
            assert_eq!(g.order(), expect, "GL({n}, F_{q})");
        }
    }

    #[test]
    fn gl3_f3_order() {
        let g = FiniteGroup::gl(3, 3).unwrap();
        assert_eq!(g.order(), 11232);
    }

    #[test]
    fn group_axioms_spot_checks() {
        let g = FiniteGroup::gl(2, 3).unwrap();
        let e = g.identity();
        for a in 0..g.order() as u32 {
            assert_eq!(g.mul(a, e), a);
            assert_eq!(g.mul(e, a), a);
            assert_eq!(g.mul(a, g.inv(a)), e);
        }
        // associativity sample
        for a in (0..g.order() as u32).step_by(7) {
            for b in (0..g.order() as u32).step_by(11) {
                for c in (0..g.order() as u32).step_by(13) {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn parabolic_orders() {
        // |P_{n,m}| = |GL_n| |GL_m| q^{nm}
        let p = FiniteGroup::parabolic(2, &[1, 1], &[false, false], &[]).unwrap();
        assert_eq!(p.order(), 1 * 1 * 2);
        let p = FiniteGroup::parabolic(2, &[2, 1], &[false, false], &[]).unwrap();
        assert_eq!(p.order(), 6 * 1 * 4);
        let p = FiniteGroup::parabolic(2, &[2, 1], &[false, true], &[]).unwrap();
        assert_eq!(p.order(), 6 * 4);
        let p = FiniteGroup::parabolic(4, &[2, 1], &[false, false], &[]).unwrap();
        assert_eq!(p.order(), 180 * 3 * 16);
        // zero blocks are dropped
        let p = FiniteGroup::parabolic(2, &[0, 1, 1], &[false, false, true], &[]).unwrap();
        assert_eq!(p.order(), 2);
        // zeroed (1,2) block of P_{1,1,1}
        let p3 = FiniteGroup::parabolic(2, &[1, 1, 1], &[false, false, false], &[(1, 2)]).unwrap();
        assert_eq!(p3.order(), 1 * 2 * 2 / 1 * 1); // q^{free: (1,3),(2,3)} = 4
        assert_eq!(p3.order(), 4);
    }

    #[test]
    fn parabolic_is_subgroup_of_gl() {
        let g = FiniteGroup::gl(3, 2).unwrap();
        let p = FiniteGroup::parabolic(2, &[2, 1], &[false, false], &[]).unwrap();
        assert!(g.contains_group(&p));
        let pbar = FiniteGroup::parabolic(2, &[2, 1], &[false, true], &[]).unwrap();
        assert!(p.contains_group(&pbar));
    }

    #[test]
    fn sylow_subgroups() {
        let s4 = FiniteGroup::symmetric(4);
        assert_eq!(s4.sylow(2).order(), 8);
        assert_eq!(s4.sylow(3).order(), 3);
        assert_eq!(s4.sylow(5).order(), 1);
        let g = FiniteGroup::gl(2, 3).unwrap(); // 48 = 16 * 3
        assert_eq!(g.sylow(2).order(), 16);
        assert_eq!(g.sylow(3).order(), 3);
        let g = FiniteGroup::gl(2, 4).unwrap(); // 180 = 4 * 9 * 5
        assert_eq!(g.sylow(3).order(), 9);
        assert_eq!(g.sylow(5).order(), 5);
    }

    #[test]
    fn sylow_of_gl3_f4() {
        let g = FiniteGroup::gl(3, 4).unwrap();
        assert_eq!(g.order(), 181440);
        let p = g.sylow(3);
        assert_eq!(p.order(), 81);
        // closed and inside G
        assert!(g.contains_group(&p));
    }

    #[test]
    fn double_cosets_example() {
        // |P_{1,1bar} \ GL_2(F_2) / P_{1,1}| = 2 with sizes 2 and 4
        let g = FiniteGroup::gl(2, 2).unwrap();
        let h = FiniteGroup::parabolic(2, &[1, 1], &[false, true], &[]).unwrap();
        let k = FiniteGroup::parabolic(2, &[1, 1], &[false, false], &[]).unwrap();
        let dc = g.double_cosets(&h, &k);
        let mut sizes: Vec<usize> = dc.iter().map(|&(_, s)| s).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 4]);
        // G\G/G is one coset
        let dc = g.double_cosets(&g, &g);
        assert_eq!(dc.len(), 1);
    }

    #[test]
    fn mid_portion_coset_counts() {
        // |P_{n+m-1,1bar} \ G_{n+m} / P_{n,m}| = 2 for small (n, m, q)
        for (n, m, q) in [(1usize, 1usize, 2u64), (1, 2, 2), (2, 1, 2), (1, 1, 3)] {
            let g = FiniteGroup::gl(n + m, q).unwrap();
            let h = FiniteGroup::parabolic(q, &[n + m - 1, 1], &[false, true], &[]).unwrap();
            let k = FiniteGroup::parabolic(q, &[n, m], &[false, false], &[]).unwrap();
            let dc = g.double_cosets(&h, &k);
            assert_eq!(dc.len(), 2, "n={n} m={m} q={q}");
        }
    }

    #[test]
    fn quotient_by_unipotent_radical() {
        // P_{1,1bar}(F_3) = affine group of order 6; radical Z/3; quotient Z/2
        let p = FiniteGroup::parabolic(3, &[1, 1], &[false, true], &[]).unwrap();
        assert_eq!(p.order(), 6);
        // radical: matrices with identity diagonal
        let rad_codes: Vec<u64> = p
            .codes()
            .iter()
            .copied()
            .filter(|&c| {
                // diagonal entries are 1
                (c & 0xf) == 1 && ((c >> (4 * 3)) & 0xf) == 1
            })
            .collect();
        let rad = p.subgroup_from_codes("U".into(), rad_codes);
        assert_eq!(rad.order(), 3);
        let (q, proj) = p.quotient(&rad).unwrap();
        assert_eq!(q.order(), 2);
        let hom = GroupHom::projection(&p, &q, proj);
        assert!(hom.is_surjective());
        assert_eq!(hom.kernel_codes().len(), 3);
    }

    #[test]
    fn levi_splits_multiplicatively() {
        let data = levi_gl(2, 1, 2).unwrap();
        assert_eq!(data.levi.order(), 6);
        for a in 0..data.levi.order() as u32 {
            for b in 0..data.levi.order() as u32 {
                let c = data.levi.mul(a, b);
                let (al, ar) = data.split[a as usize];
                let (bl, br) = data.split[b as usize];
                let (cl, cr) = data.split[c as usize];
                assert_eq!(cl, data.left.mul(al, bl));
                assert_eq!(cr, data.right.mul(ar, br));
            }
        }
        let sym = levi_sym(2, 2);
        assert_eq!(sym.levi.order(), 4);
        for a in 0..sym.levi.order() as u32 {
            for b in 0..sym.levi.order() as u32 {
                let c = sym.levi.mul(a, b);
                let (al, ar) = sym.split[a as usize];
                let (bl, br) = sym.split[b as usize];
                let (cl, cr) = sym.split[c as usize];
                assert_eq!(cl, sym.left.mul(al, bl));
                assert_eq!(cr, sym.right.mul(ar, br));
            }
        }
    }

    #[test]
    fn gl2_f2_is_sym3() {
        // GL_2(F_2) has the multiplication structure of Sym(3)
        let g = FiniteGroup::gl(2, 2).unwrap();
        assert_eq!(g.order(), 6);
        let orders: Vec<usize> = (0..6u32).map(|i| g.element_order(i)).collect();
        let mut sorted = orders.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 2, 2, 3, 3]);
    }
}
