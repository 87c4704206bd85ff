//! Matrices and canonical subspaces over the small fields of [`crate::gf`].
//!
//! A subspace is always stored by its reduced row echelon basis, so two
//! subspaces are equal exactly when their structs are equal. Over `F_2` the
//! same basis is also available as packed 16-bit rows for the
//! complementarity hot loop.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{domain, Error, Result};
use crate::exactnum::{big_pow, gaussian_binomial};
use crate::gf::{Field, FieldElem};

/// Largest ambient dimension handled anywhere in the crate.
pub const MAX_DIM: usize = 12;

/// Dense row-major matrix over a [`Field`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatGF {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl MatGF {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatGF {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatGF::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return domain("ragged matrix rows");
        }
        Ok(MatGF {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_u8_rows(rows: &[&[u8]]) -> Result<Self> {
        let rows: Vec<Vec<FieldElem>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| FieldElem(v)).collect())
            .collect();
        MatGF::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn transpose(&self) -> MatGF {
        let mut t = MatGF::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form, rank and pivot columns.
    pub fn rref(&self, field: &Field) -> (MatGF, usize, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(field, &mut m.data, m.rows, m.cols);
        let rank = pivots.len();
        (m, rank, pivots)
    }

    pub fn rank(&self, field: &Field) -> usize {
        let mut scratch = self.data.clone();
        rref_in_place(field, &mut scratch, self.rows, self.cols).len()
    }

    /// Basis of `{ x : self * x = 0 }`, one vector per free column.
    pub fn nullspace(&self, field: &Field) -> Vec<Vec<FieldElem>> {
        let (r, _, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![FieldElem::ZERO; self.cols];
                v[f] = FieldElem::ONE;
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = field.neg(r.get(i, f));
                }
                v
            })
            .collect()
    }
}

/// Gauss-Jordan on a row-major buffer. Returns the pivot columns; the
/// first `pivots.len()` rows hold the reduced basis afterwards.
pub(crate) fn rref_in_place(field: &Field, m: &mut [FieldElem], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::with_capacity(rows.min(cols));
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(src) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
            continue;
        };
        if src != r {
            for k in 0..cols {
                m.swap(src * cols + k, r * cols + k);
            }
        }
        let inv = field.inv_nonzero(m[r * cols + c]);
        for k in c..cols {
            m[r * cols + k] = field.mul(m[r * cols + k], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[i * cols + c];
            if f.is_zero() {
                continue;
            }
            for k in c..cols {
                let t = field.mul(f, m[r * cols + k]);
                m[i * cols + k] = field.sub(m[i * cols + k], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a small row-major buffer, destroying it.
pub(crate) fn rank_in_place(field: &Field, m: &mut [FieldElem], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(src) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
            continue;
        };
        if src != r {
            for k in 0..cols {
                m.swap(src * cols + k, r * cols + k);
            }
        }
        let inv = field.inv_nonzero(m[r * cols + c]);
        for i in r + 1..rows {
            let f = m[i * cols + c];
            if f.is_zero() {
                continue;
            }
            let f = field.mul(f, inv);
            for k in c..cols {
                let t = field.mul(f, m[r * cols + k]);
                m[i * cols + k] = field.sub(m[i * cols + k], t);
            }
        }
        r += 1;
    }
    r
}

/// An `e`-dimensional subspace of `F^d` in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    pivots: Vec<usize>,
    /// `e x d`, row-major.
    basis: Vec<FieldElem>,
}

impl Subspace {
    /// The span of `rows` (any spanning set) in canonical form.
    pub fn span(field: &Field, ambient: usize, rows: &[Vec<FieldElem>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ambient) {
            return domain("spanning vector has the wrong length");
        }
        let mut data = rows.concat();
        let pivots = rref_in_place(field, &mut data, rows.len(), ambient);
        data.truncate(pivots.len() * ambient);
        Ok(Subspace {
            ambient,
            pivots,
            basis: data,
        })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            pivots: Vec::new(),
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let id = MatGF::identity(ambient);
        Subspace {
            ambient,
            pivots: (0..ambient).collect(),
            basis: id.data,
        }
    }

    /// Wraps a basis already in RREF with the given pivots.
    pub(crate) fn from_rref_parts(ambient: usize, pivots: Vec<usize>, basis: Vec<FieldElem>) -> Self {
        debug_assert_eq!(pivots.len() * ambient, basis.len());
        Subspace { ambient, pivots, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_row(&self, i: usize) -> &[FieldElem] {
        &self.basis[i * self.ambient..(i + 1) * self.ambient]
    }

    pub fn basis_flat(&self) -> &[FieldElem] {
        &self.basis
    }

    pub fn basis(&self) -> MatGF {
        MatGF {
            rows: self.dim(),
            cols: self.ambient,
            data: self.basis.clone(),
        }
    }

    /// Basis rows as bit masks (bit `j` = coordinate `j`); `F_2` only.
    pub fn packed(&self) -> PackedBasis {
        PackedBasis::from_flat(&self.basis, self.ambient)
    }

    /// Whether the RREF invariants hold.
    pub fn is_canonical(&self) -> bool {
        let e = self.dim();
        if self.basis.len() != e * self.ambient || !self.pivots.windows(2).all(|w| w[0] < w[1]) {
            return false;
        }
        self.pivots.iter().enumerate().all(|(i, &p)| {
            (0..e).all(|r| self.basis[r * self.ambient + p] == if r == i { FieldElem::ONE } else { FieldElem::ZERO })
                && (0..p).all(|c| self.basis[i * self.ambient + c].is_zero())
        })
    }
}

/// Packed `F_2` basis rows, at most [`MAX_DIM`] of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PackedBasis {
    len: u8,
    rows: [u16; MAX_DIM],
}

impl PackedBasis {
    pub(crate) fn from_flat(basis: &[FieldElem], ambient: usize) -> Self {
        let mut rows = [0u16; MAX_DIM];
        let len = if ambient == 0 { 0 } else { basis.len() / ambient };
        for (i, row) in basis.chunks(ambient.max(1)).enumerate().take(len) {
            rows[i] = row
                .iter()
                .enumerate()
                .fold(0u16, |acc, (j, x)| acc | (u16::from(x.0 & 1) << j));
        }
        PackedBasis { len: len as u8, rows }
    }

    pub fn rows(&self) -> &[u16] {
        &self.rows[..self.len as usize]
    }

    /// Whether `self + other` is a direct sum, by XOR elimination.
    #[inline]
    pub fn complementary(&self, other: &PackedBasis) -> bool {
        // reducer[b] holds a vector whose lowest set bit is b
        let mut reducer = [0u16; 16];
        for &row in self.rows().iter().chain(other.rows()) {
            let mut v = row;
            while v != 0 {
                let b = v.trailing_zeros() as usize;
                if reducer[b] == 0 {
                    reducer[b] = v;
                    break;
                }
                v ^= reducer[b];
            }
            if v == 0 {
                return false;
            }
        }
        true
    }
}

/// Whether `S1 + S2` is direct, i.e. the stacked basis has full rank.
pub fn complementary(field: &Field, s1: &Subspace, s2: &Subspace) -> Result<bool> {
    if s1.ambient != s2.ambient {
        return domain(format!(
            "ambient dimensions differ: {} vs {}",
            s1.ambient, s2.ambient
        ));
    }
    let rows = s1.dim() + s2.dim();
    if rows > s1.ambient {
        return Ok(false);
    }
    if field.q() == 2 {
        return Ok(s1.packed().complementary(&s2.packed()));
    }
    Ok(complementary_generic(field, s1, s2))
}

#[inline]
pub(crate) fn complementary_generic(field: &Field, s1: &Subspace, s2: &Subspace) -> bool {
    let d = s1.ambient;
    let rows = s1.dim() + s2.dim();
    let mut buf = [FieldElem::ZERO; MAX_DIM * MAX_DIM];
    buf[..s1.basis.len()].copy_from_slice(&s1.basis);
    buf[s1.basis.len()..rows * d].copy_from_slice(&s2.basis);
    rank_in_place(field, &mut buf[..rows * d], rows, d) == rows
}

/// The Grassmannian of `e`-subspaces of `F^d`, enumerated in a fixed order:
/// pivot patterns in lexicographic order, and within a pattern the free
/// entries (row-major) as an odometer whose last position turns fastest.
#[derive(Debug, Clone)]
pub struct Grassmannian {
    field: Arc<Field>,
    d: usize,
    e: usize,
    patterns: Vec<Vec<usize>>,
}

/// Default enumeration budget, in units of `q^(e(d-e)) * C(d, e)`.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Enumerate every `e`-subspace of `F^d` exactly once.
pub fn enumerate_subspaces(d: usize, e: usize, field: Arc<Field>, budget: u64) -> Result<Grassmannian> {
    if e > d {
        return domain(format!("subspace dimension {e} exceeds ambient {d}"));
    }
    if d > MAX_DIM {
        return domain(format!("ambient dimension {d} exceeds {MAX_DIM}"));
    }
    let q = field.q() as u64;
    let estimate = big_pow(q, (e * (d - e)) as u64) * binomial(d, e);
    if estimate > BigUint::from(budget) {
        let order = field.order();
        return Err(Error::Budget {
            what: format!("{e}-subspaces of F_{q}^{d}"),
            requested: gaussian_binomial(d as u32, e as u32, order)?,
            estimate,
            budget,
        });
    }
    let mut patterns = Vec::new();
    let mut current = Vec::with_capacity(e);
    fn rec(start: usize, d: usize, e: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == e {
            out.push(cur.clone());
            return;
        }
        for c in start..d {
            if d - c < e - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, d, e, cur, out);
            cur.pop();
        }
    }
    rec(0, d, e, &mut current, &mut patterns);
    Ok(Grassmannian { field, d, e, patterns })
}

impl Grassmannian {
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.e
    }

    pub fn patterns(&self) -> &[Vec<usize>] {
        &self.patterns
    }

    fn free_positions(&self, pattern: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &p) in pattern.iter().enumerate() {
            for c in p + 1..self.d {
                if !pattern.contains(&c) {
                    out.push(i * self.d + c);
                }
            }
        }
        out
    }

    /// Number of subspaces with the given pivot pattern.
    pub fn pattern_len(&self, index: usize) -> u64 {
        let free = self.free_positions(&self.patterns[index]).len();
        (self.field.q() as u64).pow(free as u32)
    }

    pub fn len(&self) -> u64 {
        (0..self.patterns.len()).map(|i| self.pattern_len(i)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `f` with each basis (row-major, `e x d`) of the pattern, in
    /// enumeration order. The buffer is reused between calls.
    pub fn visit_pattern(&self, index: usize, mut f: impl FnMut(&[FieldElem])) {
        let pattern = &self.patterns[index];
        let free = self.free_positions(pattern);
        let mut basis = vec![FieldElem::ZERO; self.e * self.d];
        for (i, &p) in pattern.iter().enumerate() {
            basis[i * self.d + p] = FieldElem::ONE;
        }
        let q = self.field.q() as u8;
        loop {
            f(&basis);
            // odometer, last free position fastest
            let mut k = free.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                let slot = &mut basis[free[k]];
                if slot.0 + 1 < q {
                    slot.0 += 1;
                    break;
                }
                slot.0 = 0;
            }
        }
    }

    /// Calls `f` with every basis in enumeration order.
    pub fn for_each_basis(&self, mut f: impl FnMut(&[FieldElem])) {
        for i in 0..self.patterns.len() {
            self.visit_pattern(i, &mut f);
        }
    }

    /// All subspaces of one pivot pattern.
    pub fn pattern_subspaces(&self, index: usize) -> Vec<Subspace> {
        let pattern = &self.patterns[index];
        let mut out = Vec::with_capacity(self.pattern_len(index).to_usize().unwrap_or(0));
        self.visit_pattern(index, |b| {
            out.push(Subspace::from_rref_parts(self.d, pattern.clone(), b.to_vec()));
        });
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Subspace> + '_ {
        (0..self.patterns.len()).flat_map(move |i| self.pattern_subspaces(i))
    }
}
