//! Exact dense/incremental linear algebra over `F_ell`.
//!
//! All ranks, kernels and solves in the crate go through this module.
//! Pivoting is deterministic (first nonzero in index order) so that every
//! downstream basis choice is reproducible run to run.

use crate::field::{Fp, PrimeField};

/// Dense row-major matrix over `F_ell` with canonical entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Fp>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fp>>, cols: usize) -> Self {
        let r = rows.len();
        let mut m = Mat::zeros(r, cols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&row);
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fp {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fp) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Fp] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Fp] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `self * other` (dimensions must agree).
    pub fn matmul(&self, other: &Mat, f: &PrimeField) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for (c, &b) in orow.iter().enumerate() {
                    if b != 0 {
                        out_row[c] = f.add(out_row[c], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// Matrix applied to a column vector: `self * v`.
    pub fn apply(&self, v: &[Fp], f: &PrimeField) -> Vec<Fp> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0;
            for (c, &x) in self.row(i).iter().enumerate() {
                if x != 0 && v[c] != 0 {
                    acc = f.add(acc, f.mul(x, v[c]));
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn scale(&self, s: Fp, f: &PrimeField) -> Mat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = f.mul(*x, s);
        }
        out
    }

    pub fn add_mat(&self, other: &Mat, f: &PrimeField) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = f.add(*x, y);
        }
        out
    }

    pub fn sub_mat(&self, other: &Mat, f: &PrimeField) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = f.sub(*x, y);
        }
        out
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut m = Mat::zeros(self.rows + other.rows, self.cols);
        m.data[..self.data.len()].copy_from_slice(&self.data);
        m.data[self.data.len()..].copy_from_slice(&other.data);
        m
    }

    pub fn rank(&self, f: &PrimeField) -> usize {
        let mut rs = RowSpace::new(self.cols, *f);
        for r in 0..self.rows {
            rs.push_row(self.row(r).to_vec());
        }
        rs.rank()
    }

    /// Basis of the right kernel `{x : self * x = 0}`, returned as rows.
    pub fn nullspace(&self, f: &PrimeField) -> Mat {
        let mut rs = RowSpace::new(self.cols, *f);
        for r in 0..self.rows {
            rs.push_row(self.row(r).to_vec());
        }
        rs.nullspace()
    }
}

/// Incrementally maintained reduced row echelon basis of a row space.
#[derive(Debug, Clone)]
pub struct RowSpace {
    f: PrimeField,
    cols: usize,
    /// (pivot column, fully reduced row with pivot entry 1), sorted by pivot.
    rows: Vec<(usize, Vec<Fp>)>,
}

impl RowSpace {
    pub fn new(cols: usize, f: PrimeField) -> Self {
        RowSpace {
            f,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Reduces `v` against the current echelon (does not insert).
    pub fn reduce(&self, mut v: Vec<Fp>) -> Vec<Fp> {
        let f = &self.f;
        for x in v.iter_mut() {
            *x = f.reduce(*x);
        }
        for (p, row) in &self.rows {
            let c = v[*p];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row.iter()) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Fp]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Inserts `v`; returns `true` when the rank grew.
    pub fn push_row(&mut self, v: Vec<Fp>) -> bool {
        let mut v = self.reduce(v);
        let pivot = match v.iter().position(|&x| x != 0) {
            Some(p) => p,
            None => return false,
        };
        let inv = self.f.inv(v[pivot]).expect("pivot invertible");
        for x in v.iter_mut() {
            *x = self.f.mul(*x, inv);
        }
        // back-substitute into existing rows to keep the echelon reduced
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(v.iter()) {
                    if y != 0 {
                        *x = self.f.sub(*x, self.f.mul(c, y));
                    }
                }
            }
        }
        let at = self
            .rows
            .binary_search_by_key(&pivot, |(p, _)| *p)
            .unwrap_err();
        self.rows.insert(at, (pivot, v));
        true
    }

    /// The echelon rows as a matrix (a canonical basis of the row space).
    pub fn basis(&self) -> Mat {
        Mat::from_rows(self.rows.iter().map(|(_, r)| r.clone()).collect(), self.cols)
    }

    /// Basis of `{x : r . x = 0 for all rows r}`, as rows; the canonical
    /// free-variable construction from the reduced echelon.
    pub fn nullspace(&self) -> Mat {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots().into_iter().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut out = Mat::zeros(free.len(), self.cols);
        for (k, &j) in free.iter().enumerate() {
            out.set(k, j, 1);
            for (p, row) in &self.rows {
                out.set(k, *p, self.f.neg(row[j]));
            }
        }
        out
    }

    /// Unit coordinates not used as pivots: representatives of the cokernel
    /// `F^cols / rowspace`.
    pub fn cokernel_coords(&self) -> Vec<usize> {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots().into_iter().collect();
        (0..self.cols).filter(|c| !pivot_set.contains(c)).collect()
    }
}

/// Factorization of a matrix `A` for repeated exact solves of `A x = b`.
#[derive(Debug, Clone)]
pub struct Solver {
    f: PrimeField,
    cols: usize,
    /// reduced echelon rows of A with their pivot columns
    rows: Vec<(usize, Vec<Fp>)>,
    /// transform rows: t[i] . b gives the reduced right-hand side entry
    t: Vec<Vec<Fp>>,
    nrows: usize,
    a: Mat,
}

impl Solver {
    pub fn new(a: &Mat, f: &PrimeField) -> Self {
        let mut rows: Vec<(usize, Vec<Fp>)> = Vec::new();
        let mut t: Vec<Vec<Fp>> = Vec::new();
        for i in 0..a.rows {
            let mut v = a.row(i).to_vec();
            let mut tv = vec![0; a.rows];
            tv[i] = 1;
            for ((p, row), trow) in rows.iter().zip(t.iter()) {
                let c = v[*p];
                if c != 0 {
                    for (x, &y) in v.iter_mut().zip(row.iter()) {
                        if y != 0 {
                            *x = f.sub(*x, f.mul(c, y));
                        }
                    }
                    for (x, &y) in tv.iter_mut().zip(trow.iter()) {
                        if y != 0 {
                            *x = f.sub(*x, f.mul(c, y));
                        }
                    }
                }
            }
            if let Some(p) = v.iter().position(|&x| x != 0) {
                let inv = f.inv(v[p]).unwrap();
                for x in v.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                for x in tv.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                // keep reduced
                let mut insert_at = rows.len();
                for (k, (pk, _)) in rows.iter().enumerate() {
                    if *pk > p {
                        insert_at = k;
                        break;
                    }
                }
                for ((_, row), trow) in rows.iter_mut().zip(t.iter_mut()) {
                    let c = row[p];
                    if c != 0 {
                        for (x, &y) in row.iter_mut().zip(v.iter()) {
                            if y != 0 {
                                *x = f.sub(*x, f.mul(c, y));
                            }
                        }
                        for (x, &y) in trow.iter_mut().zip(tv.iter()) {
                            if y != 0 {
                                *x = f.sub(*x, f.mul(c, y));
                            }
                        }
                    }
                }
                rows.insert(insert_at, (p, v));
                t.insert(insert_at, tv);
            }
        }
        Solver {
            f: *f,
            cols: a.cols,
            rows,
            t,
            nrows: a.rows,
            a: a.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// One solution of `A x = b` (free variables zero), or `None` when
    /// inconsistent.
    pub fn solve(&self, b: &[Fp]) -> Option<Vec<Fp>> {
        assert_eq!(b.len(), self.nrows);
        let f = &self.f;
        let mut x = vec![0; self.cols];
        for ((p, _row), trow) in self.rows.iter().zip(self.t.iter()) {
            let mut c = 0;
            for (&ti, &bi) in trow.iter().zip(b.iter()) {
                if ti != 0 && bi != 0 {
                    c = f.add(c, f.mul(ti, bi));
                }
            }
            x[*p] = c;
        }
        if self.a.apply(&x, f) == b {
            Some(x)
        } else {
            None
        }
    }
}

/// Incremental sparse row elimination for rank-only computations over wide
/// coordinate spaces (dense echelon rows would not fit). Rows are kept as
/// sorted `(column, coefficient)` lists; narrow inputs fall back to the
/// dense `RowSpace`.
pub struct SparseRank {
    f: PrimeField,
    cols: usize,
    /// pivot column -> reduced sparse row with leading coefficient 1
    rows: std::collections::BTreeMap<usize, Vec<(u32, Fp)>>,
    dense: Option<RowSpace>,
}

/// Column width below which the dense elimination is used directly.
const SPARSE_FALLBACK_COLS: usize = 500;

impl SparseRank {
    pub fn new(cols: usize, f: PrimeField) -> Self {
        let dense = if cols < SPARSE_FALLBACK_COLS {
            Some(RowSpace::new(cols, f))
        } else {
            None
        };
        SparseRank {
            f,
            cols,
            rows: std::collections::BTreeMap::new(),
            dense,
        }
    }

    pub fn rank(&self) -> usize {
        if let Some(d) = &self.dense {
            return d.rank();
        }
        self.rows.len()
    }

    /// Inserts a sparse row; returns true when the rank grew.
    pub fn push_sparse(&mut self, row: Vec<(u32, Fp)>) -> bool {
        if let Some(d) = &mut self.dense {
            let mut v = vec![0; self.cols];
            for (c, x) in row {
                v[c as usize] = self.f.add(v[c as usize], self.f.reduce(x));
            }
            return d.push_row(v);
        }
        let f = &self.f;
        let mut work: std::collections::BTreeMap<usize, Fp> = std::collections::BTreeMap::new();
        for (c, x) in row {
            let e = work.entry(c as usize).or_insert(0);
            *e = f.add(*e, f.reduce(x));
            if *e == 0 {
                work.remove(&(c as usize));
            }
        }
        loop {
            let (&p, &c) = match work.iter().next() {
                Some((p, c)) => (p, c),
                None => return false,
            };
            match self.rows.get(&p) {
                None => {
                    // new pivot: normalize and store
                    let inv = f.inv(c).unwrap();
                    let stored: Vec<(u32, Fp)> = work
                        .iter()
                        .map(|(&cc, &x)| (cc as u32, f.mul(x, inv)))
                        .collect();
                    self.rows.insert(p, stored);
                    return true;
                }
                Some(pivot_row) => {
                    for &(cc, x) in pivot_row {
                        let e = work.entry(cc as usize).or_insert(0);
                        *e = f.sub(*e, f.mul(c, x));
                        if *e == 0 {
                            work.remove(&(cc as usize));
                        }
                    }
                }
            }
        }
    }
}

/// Basis data for a subquotient `Z / B` of `F^n`, where both spaces are
/// given by spanning rows and `B` is contained in `Z`.
///
/// Representatives are the reduced-echelon rows of `Z` reduced mod `B`:
/// every representative has a unique pivot column with entry 1 and zeros
/// at the pivots of the others, so coordinates read off by elimination.
#[derive(Debug, Clone)]
pub struct Subquotient {
    f: PrimeField,
    pub ambient: usize,
    b: RowSpace,
    /// (pivot, fully reduced representative), sorted by pivot
    reps: Vec<(usize, Vec<Fp>)>,
}

impl Subquotient {
    pub fn new(z_rows: &Mat, b_rows: &Mat, f: &PrimeField) -> Self {
        let n = z_rows.cols;
        assert_eq!(b_rows.cols, n);
        let mut b = RowSpace::new(n, *f);
        for i in 0..b_rows.rows {
            b.push_row(b_rows.row(i).to_vec());
        }
        let mut rep_space = RowSpace::new(n, *f);
        for i in 0..z_rows.rows {
            rep_space.push_row(b.reduce(z_rows.row(i).to_vec()));
        }
        let basis = rep_space.basis();
        let pivots = rep_space.pivots();
        let reps = pivots
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, basis.row(i).to_vec()))
            .collect();
        Subquotient {
            f: *f,
            ambient: n,
            b,
            reps,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Representative vector of the i-th basis element.
    pub fn rep(&self, i: usize) -> &[Fp] {
        &self.reps[i].1
    }

    /// Coordinates of `v` in the chosen basis, or `None` if `v` does not lie
    /// in `Z + B`.
    pub fn coords(&self, v: &[Fp]) -> Option<Vec<Fp>> {
        let f = &self.f;
        let mut r = self.b.reduce(v.to_vec());
        let mut out = vec![0; self.dim()];
        for (i, (p, row)) in self.reps.iter().enumerate() {
            let c = r[*p];
            if c != 0 {
                out[i] = c;
                for (x, &y) in r.iter_mut().zip(row.iter()) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        if r.iter().all(|&x| x == 0) {
            Some(out)
        } else {
            None
        }
    }
}
