//! Exact sparse linear algebra.
//!
//! Matrices act on column vectors (`A·x`) and are stored as sparse rows with no
//! explicit zeros. Row reduction always produces the reduced row echelon form,
//! which is unique for a given row space, so every kernel basis, particular
//! solution and complement chosen here is reproducible.
//!
//! Over ℚ the forward and backward passes keep rows as primitive integer vectors
//! and only divide by the pivots at the very end.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::field::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Sparse vector: entries sorted by index, never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(index: usize, field: Field) -> Self {
        SparseVec {
            entries: vec![(index, field.one())],
        }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    /// Builds from unsorted pairs, summing duplicates and dropping zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += &v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    pub fn to_dense(&self, len: usize, field: Field) -> Vec<Scalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn leading(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + &(y * c);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&v.field().one(), other),
        }
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&-v.field().one(), other),
        }
    }

    pub fn dot(&self, other: &SparseVec) -> Option<Scalar> {
        let mut acc: Option<Scalar> = None;
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if j < i {
                b.next();
            } else {
                let p = x * y;
                acc = Some(match acc {
                    None => p,
                    Some(s) => s + p,
                });
                a.next();
                b.next();
            }
        }
        acc.filter(|s| !s.is_zero())
    }

    /// Shifts every index by `offset`.
    pub fn shifted(&self, offset: usize) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (i + offset, v.clone())).collect(),
        }
    }

    /// Keeps indices in `range`, re-based to start at zero.
    pub fn slice(&self, start: usize, end: usize) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| *i >= start && *i < end)
                .map(|(i, v)| (i - start, v.clone()))
                .collect(),
        }
    }

    pub fn concat(parts: &[(usize, &SparseVec)]) -> SparseVec {
        let mut entries = Vec::new();
        for (offset, part) in parts {
            entries.extend(part.entries.iter().map(|(i, v)| (i + offset, v.clone())));
        }
        SparseVec::from_pairs(entries)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

fn eliminate(field: Field, work: &mut Vec<Scalar>, col: usize, pivot_row: &SparseVec) {
    let a = work[col].clone();
    if a.is_zero() {
        return;
    }
    let pv = pivot_row.get(col).expect("pivot entry").clone();
    match field {
        Field::Rationals => {
            for w in work.iter_mut() {
                *w = &*w * &pv;
            }
            for (i, v) in pivot_row.iter() {
                work[*i] -= &(&a * v);
            }
            field.make_primitive(work);
        }
        Field::Prime(_) => {
            let factor = &a / &pv;
            for (i, v) in pivot_row.iter() {
                work[*i] -= &(&factor * v);
            }
        }
    }
}

/// Row reduces `rows` (each of length `cols`) to RREF.
pub fn echelon_form(field: Field, rows: &[SparseVec], cols: usize) -> Echelon {
    // forward pass: pivot rows keyed by pivot column
    let mut pivot_rows: Vec<(usize, SparseVec)> = Vec::new();
    let mut by_col: HashMap<usize, usize> = HashMap::new();
    for row in rows {
        if row.is_zero() {
            continue;
        }
        let mut work = row.to_dense(cols, field);
        field.make_primitive(&mut work);
        let mut c = 0;
        while c < cols {
            if !work[c].is_zero() {
                match by_col.get(&c) {
                    Some(&k) => eliminate(field, &mut work, c, &pivot_rows[k].1),
                    None => break,
                }
            }
            c += 1;
        }
        if c < cols {
            if let Field::Prime(_) = field {
                let inv = work[c].inv().expect("nonzero pivot");
                for w in work.iter_mut() {
                    *w = &*w * &inv;
                }
            }
            by_col.insert(c, pivot_rows.len());
            pivot_rows.push((c, SparseVec::from_dense(&work)));
        }
    }
    pivot_rows.sort_by_key(|(c, _)| *c);
    // backward pass: clear entries above each pivot
    for k in (0..pivot_rows.len()).rev() {
        let (c, prow) = pivot_rows[k].clone();
        for j in 0..k {
            if pivot_rows[j].1.get(c).is_some() {
                let mut work = pivot_rows[j].1.to_dense(cols, field);
                eliminate(field, &mut work, c, &prow);
                pivot_rows[j].1 = SparseVec::from_dense(&work);
            }
        }
    }
    let mut out_rows = Vec::with_capacity(pivot_rows.len());
    let mut pivots = Vec::with_capacity(pivot_rows.len());
    for (c, row) in pivot_rows {
        let inv = row.get(c).expect("pivot").inv().expect("nonzero pivot");
        out_rows.push(row.scale(&inv));
        pivots.push(c);
    }
    Echelon {
        rows: out_rows,
        pivots,
        cols,
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of `{x : A·x = 0}` read off the RREF: one vector per free column.
    pub fn kernel(&self, field: Field) -> Vec<SparseVec> {
        let pivot_set: std::collections::HashSet<usize> = self.pivots.iter().copied().collect();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut pairs = vec![(free, field.one())];
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                if let Some(v) = row.get(free) {
                    pairs.push((p, -v));
                }
            }
            out.push(SparseVec::from_pairs(pairs));
        }
        out
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Matrix {
            field,
            rows: n,
            cols: n,
            data: (0..n).map(|i| SparseVec::unit(i, field)).collect(),
        }
    }

    pub fn from_rows(field: Field, cols: usize, data: Vec<SparseVec>) -> Self {
        debug_assert!(data.iter().all(|r| r.max_index().is_none_or(|m| m < cols)));
        Matrix {
            field,
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn from_columns(field: Field, rows: usize, columns: &[SparseVec]) -> Self {
        let mut data = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter() {
                data[*i].push((j, v.clone()));
            }
        }
        Matrix {
            field,
            rows,
            cols: columns.len(),
            data: data.into_iter().map(|entries| SparseVec { entries }).collect(),
        }
    }

    pub fn from_i64(field: Field, values: &[Vec<i64>]) -> Self {
        let cols = values.first().map_or(0, |r| r.len());
        let data = values
            .iter()
            .map(|r| {
                let dense: Vec<Scalar> = r.iter().map(|&v| field.from_i64(v)).collect();
                SparseVec::from_dense(&dense)
            })
            .collect();
        Matrix::from_rows(field, cols, data)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data[r].get(c).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn set(&mut self, r: usize, c: usize, value: Scalar) {
        let mut pairs: Vec<(usize, Scalar)> =
            self.data[r].iter().filter(|(i, _)| *i != c).cloned().collect();
        pairs.push((c, value));
        self.data[r] = SparseVec::from_pairs(pairs);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.nnz()).sum()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_columns(self.field, self.cols, &self.data)
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec {
            entries: self
                .data
                .iter()
                .enumerate()
                .filter_map(|(r, row)| row.get(c).map(|v| (r, v.clone())))
                .collect(),
        }
    }

    /// `A·x`.
    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        debug_assert!(x.max_index().is_none_or(|m| m < self.cols));
        SparseVec {
            entries: self
                .data
                .iter()
                .enumerate()
                .filter_map(|(r, row)| row.dot(x).map(|v| (r, v)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = SparseVec::new();
                for (k, v) in row.iter() {
                    acc = acc.add_scaled(v, &other.data[*k]);
                }
                acc
            })
            .collect();
        Ok(Matrix::from_rows(self.field, other.cols, data))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch("add".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Ok(Matrix::from_rows(self.field, self.cols, data))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_rows(self.field, self.cols, self.data.iter().map(|r| r.scale(c)).collect())
    }

    pub fn echelon(&self) -> Echelon {
        echelon_form(self.field, &self.data, self.cols)
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Columns spanning `{x : A·x = 0}`.
    pub fn kernel_basis(&self) -> Matrix {
        let k = self.kernel_vectors();
        Matrix::from_columns(self.field, self.cols, &k)
    }

    pub fn kernel_vectors(&self) -> Vec<SparseVec> {
        self.echelon().kernel(self.field)
    }

    /// Some `X` with `A·X = B`, or `None` if a column of `B` is outside the column
    /// space of `A`. Free variables are set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>, LinalgError> {
        if self.rows != b.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "system has {} rows but right-hand side has {}",
                self.rows, b.rows
            )));
        }
        let augmented: Vec<SparseVec> = self
            .data
            .iter()
            .zip(&b.data)
            .map(|(a, r)| SparseVec::concat(&[(0, a), (self.cols, r)]))
            .collect();
        let ech = echelon_form(self.field, &augmented, self.cols + b.cols);
        if ech.pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = vec![SparseVec::new(); self.cols];
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            x[p] = row.slice(self.cols, self.cols + b.cols);
        }
        Ok(Some(Matrix::from_rows(self.field, b.cols, x)))
    }

    pub fn solve_vec(&self, b: &SparseVec) -> Option<SparseVec> {
        let rhs = Matrix::from_columns(self.field, self.rows, std::slice::from_ref(b));
        self.solve(&rhs).ok().flatten().map(|x| x.column(0))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve(&Matrix::identity(self.field, self.rows)).ok()??;
        if self.mul(&x).ok()? == Matrix::identity(self.field, self.rows) {
            Some(x)
        } else {
            None
        }
    }

    /// `[A | B]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::ShapeMismatch("hstack".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| SparseVec::concat(&[(0, a), (self.cols, b)]))
            .collect();
        Ok(Matrix::from_rows(self.field, self.cols + other.cols, data))
    }
}

/// Precomputed reduction of a fixed matrix `A` for repeated solves of `A·x = b`.
#[derive(Clone, Debug)]
pub struct Solver {
    field: Field,
    rows: usize,
    cols: usize,
    pivots: Vec<usize>,
    // row r of the transform T with (T·A)_r the r-th RREF row
    transform: Vec<SparseVec>,
    // rows spanning the left kernel of A
    obstructions: Vec<SparseVec>,
}

impl Solver {
    pub fn new(a: &Matrix) -> Self {
        let augmented: Vec<SparseVec> = a
            .data
            .iter()
            .enumerate()
            .map(|(i, row)| SparseVec::concat(&[(0, row), (a.cols, &SparseVec::unit(i, a.field))]))
            .collect();
        let ech = echelon_form(a.field, &augmented, a.cols + a.rows);
        let mut pivots = Vec::new();
        let mut transform = Vec::new();
        let mut obstructions = Vec::new();
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            let t = row.slice(a.cols, a.cols + a.rows);
            if p < a.cols {
                pivots.push(p);
                transform.push(t);
            } else {
                obstructions.push(t);
            }
        }
        Solver {
            field: a.field,
            rows: a.rows,
            cols: a.cols,
            pivots,
            transform,
            obstructions,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The solution with all free variables zero, or `None` when inconsistent.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        if self.obstructions.iter().any(|o| o.dot(b).is_some()) {
            return None;
        }
        Some(SparseVec::from_pairs(
            self.transform
                .iter()
                .zip(&self.pivots)
                .filter_map(|(t, &p)| t.dot(b).map(|v| (p, v)))
                .collect(),
        ))
    }
}

/// A subspace of `k^n` held in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_index: HashMap<usize, usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_index: HashMap::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace::spanned_by(field, ambient, &(0..ambient).map(|i| SparseVec::unit(i, field)).collect::<Vec<_>>())
    }

    pub fn spanned_by(field: Field, ambient: usize, vectors: &[SparseVec]) -> Self {
        let ech = echelon_form(field, vectors, ambient);
        let pivot_index = ech.pivots.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        Subspace {
            field,
            ambient,
            rows: ech.rows,
            pivots: ech.pivots,
            pivot_index,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// RREF basis vectors.
    pub fn basis(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Clears every pivot coordinate of `v`; the result is the canonical
    /// representative of `v` modulo this subspace.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        loop {
            let hit = out
                .iter()
                .find_map(|(i, c)| self.pivot_index.get(i).map(|&k| (k, c.clone())));
            match hit {
                Some((k, c)) => out = out.add_scaled(&-c, &self.rows[k]),
                None => return out,
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of `v` in the RREF basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        if !self.contains(v) {
            return None;
        }
        Some(SparseVec::from_pairs(
            self.pivots
                .iter()
                .enumerate()
                .filter_map(|(k, p)| v.get(*p).map(|c| (k, c.clone())))
                .collect(),
        ))
    }

    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        if r.is_zero() {
            return false;
        }
        let mut all = self.rows.clone();
        all.push(r);
        *self = Subspace::spanned_by(self.field, self.ambient, &all);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::spanned_by(self.field, self.ambient, &all)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Standard unit vectors on the non-pivot coordinates: a deterministic
    /// complement.
    pub fn complement_units(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivot_index.contains_key(c)).collect()
    }
}

/// A quotient `numerator / denominator` of nested subspaces with a canonical basis
/// of representatives (reduced modulo the denominator, then in RREF).
#[derive(Clone, Debug)]
pub struct Quotient {
    denominator: Subspace,
    reps: Subspace,
}

impl Quotient {
    pub fn new(numerator: &[SparseVec], denominator: Subspace) -> Self {
        let reduced: Vec<SparseVec> = numerator.iter().map(|v| denominator.reduce(v)).collect();
        let reps = Subspace::spanned_by(denominator.field(), denominator.ambient(), &reduced);
        Quotient { denominator, reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.dim()
    }

    pub fn representatives(&self) -> &[SparseVec] {
        self.reps.basis()
    }

    pub fn denominator(&self) -> &Subspace {
        &self.denominator
    }

    /// Coordinates of the class of `v`; `None` if `v` is not in the numerator.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        self.reps.coordinates(&self.denominator.reduce(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(q(), 3).kernel_basis().cols(), 0);
        assert_eq!(Matrix::zeros(q(), 2, 3).kernel_basis().cols(), 3);
        let a = Matrix::from_i64(q(), &[vec![1, 2], vec![2, 4]]);
        let k = a.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k, Matrix::from_i64(q(), &[vec![-2], vec![1]]));
        assert!(a.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::zeros(q(), 3, 4).rank(), 0);
        assert_eq!(Matrix::identity(q(), 5).rank(), 5);
        assert_eq!(Matrix::from_i64(q(), &[vec![1, 2], vec![2, 4]]).rank(), 1);
        assert!(!Matrix::from_i64(q(), &[vec![1, 2], vec![2, 4]]).is_invertible());
    }

    #[test]
    fn solve_examples() {
        let b = Matrix::from_i64(q(), &[vec![3, 1], vec![-2, 7]]);
        assert_eq!(Matrix::identity(q(), 2).solve(&b).unwrap(), Some(b.clone()));
        let z = Matrix::zeros(q(), 2, 2);
        assert_eq!(z.solve(&b).unwrap(), None);
        let a = Matrix::from_i64(q(), &[vec![1], vec![1]]);
        let rhs = Matrix::from_i64(q(), &[vec![2], vec![2]]);
        assert_eq!(a.solve(&rhs).unwrap(), Some(Matrix::from_i64(q(), &[vec![2]])));
        assert!(matches!(a.solve(&Matrix::zeros(q(), 3, 1)), Err(LinalgError::ShapeMismatch(_))));
    }

    #[test]
    fn inverse_over_prime_field() {
        let f = Field::Prime(5);
        let a = Matrix::from_i64(f, &[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(f, 2));
    }

    #[test]
    fn solver_matches_solve() {
        let f = q();
        let a = Matrix::from_i64(f, &[vec![1, 2, 0], vec![2, 4, 1], vec![3, 6, 1]]);
        let s = Solver::new(&a);
        assert_eq!(s.rank(), 2);
        let b = SparseVec::from_dense(&[f.from_i64(1), f.from_i64(3), f.from_i64(4)]);
        let x = s.solve(&b).unwrap();
        assert_eq!(a.apply(&x), b);
        let bad = SparseVec::from_dense(&[f.from_i64(1), f.from_i64(3), f.from_i64(5)]);
        assert!(s.solve(&bad).is_none());
    }

    #[test]
    fn quotient_coordinates() {
        let f = q();
        let e = |i| SparseVec::unit(i, f);
        let den = Subspace::spanned_by(f, 3, &[e(0).add(&e(1))]);
        let quo = Quotient::new(&[e(0), e(1), e(2)], den);
        assert_eq!(quo.dim(), 2);
        // e0 and e1 agree modulo e0 + e1 up to sign
        let c0 = quo.coordinates(&e(0)).unwrap();
        let c1 = quo.coordinates(&e(1)).unwrap();
        assert_eq!(c0, c1.scale(&f.from_i64(-1)));
        assert!(quo.coordinates(&e(0).add(&e(1))).unwrap().is_zero());
    }
}
