//! Graded algebras `R = R_0 ⊕ R_1 ⊕ ⋯` with `R_0` a product of copies of the field,
//! generated in degree one.
//!
//! Every basis element of `R_d` lives at a single pair of vertices. The basis of
//! `R_1` doubles as the generating set, and each basis element of positive degree
//! carries a factorization `b = Σ c·b′·g` through generators, which is all a module
//! needs to turn generator actions into actions of arbitrary basis elements.

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{Matrix, SparseVec, Subspace};
use crate::presentation::{AlgebraPresentation, Monomial};

/// Safety cap when no truncation is declared.
const DEFAULT_DEGREE_CAP: usize = 64;

/// One homogeneous piece `R_d`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Piece {
    pub labels: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// `b = Σ coeff · left · right`; for `factor` the right factor is a generator, for
/// `lfactor` the left one is.
pub type Factorization = Vec<(Scalar, usize, usize)>;

#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    field: Field,
    vertex_labels: Vec<String>,
    pieces: Vec<Piece>,
    /// `right_mult[d][g]`: right multiplication by generator `g`, `R_d → R_{d+1}`.
    right_mult: Vec<Vec<Matrix>>,
    left_mult: Vec<Vec<Matrix>>,
    /// `factor[d][b] = Σ c·b′·g` with `b′ ∈ R_{d−1}`; empty for `d = 0`.
    factor: Vec<Vec<Factorization>>,
    /// `lfactor[d][b] = Σ c·g·b′`, stored as `(c, g, b′)`.
    lfactor: Vec<Vec<Factorization>>,
    /// The last stored piece is zero, so every higher piece is too.
    complete: bool,
    declared_truncation: Option<usize>,
}

impl GradedAlgebra {
    /// Materializes `P` through internal degree `max_degree`, stopping early once a
    /// piece vanishes.
    pub fn materialize(p: &AlgebraPresentation, max_degree: usize) -> Result<GradedAlgebra> {
        let field = p.field();
        let quiver = &p.quiver;
        let nv = quiver.vertices.len();
        let na = quiver.arrows.len();

        let mut pieces = vec![Piece {
            labels: quiver.vertices.iter().map(|v| format!("e_{v}")).collect(),
            source: (0..nv).collect(),
            target: (0..nv).collect(),
        }];
        let mut right_mult: Vec<Vec<Matrix>> = Vec::new();
        let mut factor: Vec<Vec<Factorization>> = vec![Vec::new()];

        // degree one: the arrows in declaration order
        let r1 = Piece {
            labels: quiver.arrows.iter().map(|a| a.label.clone()).collect(),
            source: quiver.arrows.iter().map(|a| a.source).collect(),
            target: quiver.arrows.iter().map(|a| a.target).collect(),
        };
        right_mult.push(
            (0..na)
                .map(|a| {
                    let mut m = Matrix::zeros(field, na, nv);
                    m.set(a, quiver.arrows[a].source, field.one());
                    m
                })
                .collect(),
        );
        factor.push((0..na).map(|a| vec![(field.one(), quiver.arrows[a].source, a)]).collect());
        pieces.push(r1);

        // relations as (coefficient, first arrow, second arrow)
        let rels: Vec<Vec<(Scalar, usize, usize)>> = p
            .relations
            .iter()
            .map(|r| {
                r.terms
                    .iter()
                    .map(|(m, c)| match m {
                        Monomial::Path(path) => (c.clone(), path[0], path[1]),
                        Monomial::Idempotent(_) => unreachable!("relations are quadratic"),
                    })
                    .collect()
            })
            .collect();

        let mut complete = na == 0;
        let mut d = 2;
        while !complete && d <= max_degree {
            let prev = &pieces[d - 1];
            // candidates b′⊗a with target(b′) = source(a)
            let mut cand_index = vec![vec![None; na]; prev.dim()];
            let mut cands = Vec::new();
            for b in 0..prev.dim() {
                for a in 0..na {
                    if prev.target[b] == quiver.arrows[a].source {
                        cand_index[b][a] = Some(cands.len());
                        cands.push((b, a));
                    }
                }
            }
            let to_cand = |v: &SparseVec, a: usize| -> SparseVec {
                SparseVec::from_pairs(
                    v.iter()
                        .filter_map(|(b, c)| cand_index[*b][a].map(|i| (i, c.clone())))
                        .collect(),
                )
            };
            let mut spanning = Vec::new();
            for b in 0..pieces[d - 2].dim() {
                let unit = SparseVec::unit(b, field);
                for rel in &rels {
                    let mut acc = SparseVec::new();
                    for (c, a1, a2) in rel {
                        let mid = right_mult[d - 2][*a1].apply(&unit);
                        acc = acc.add_scaled(c, &to_cand(&mid, *a2));
                    }
                    if !acc.is_zero() {
                        spanning.push(acc);
                    }
                }
            }
            let ideal = Subspace::spanned_by(field, cands.len(), &spanning);
            let basis = ideal.complement_units();
            let mut position = vec![None; cands.len()];
            for (k, &c) in basis.iter().enumerate() {
                position[c] = Some(k);
            }
            let mut piece = Piece::default();
            let mut fac = Vec::new();
            for &c in &basis {
                let (b, a) = cands[c];
                piece.labels.push(format!("{}*{}", prev.labels[b], quiver.arrows[a].label));
                piece.source.push(prev.source[b]);
                piece.target.push(quiver.arrows[a].target);
                fac.push(vec![(field.one(), b, a)]);
            }
            let mult: Vec<Matrix> = (0..na)
                .map(|a| {
                    let columns: Vec<SparseVec> = (0..prev.dim())
                        .map(|b| match cand_index[b][a] {
                            None => SparseVec::new(),
                            Some(c) => {
                                let red = ideal.reduce(&SparseVec::unit(c, field));
                                SparseVec::from_pairs(
                                    red.iter()
                                        .map(|(i, v)| (position[*i].expect("non-pivot"), v.clone()))
                                        .collect(),
                                )
                            }
                        })
                        .collect();
                    Matrix::from_columns(field, basis.len(), &columns)
                })
                .collect();
            right_mult.push(mult);
            factor.push(fac);
            complete = piece.dim() == 0;
            pieces.push(piece);
            d += 1;
        }
        if !complete {
            match p.truncation {
                Some(declared) if max_degree > declared => {
                    return Err(Error::TruncationExceeded {
                        requested: max_degree,
                        declared,
                    })
                }
                Some(_) => {}
                None => return Err(Error::MissingTruncation(max_degree)),
            }
        }
        Ok(GradedAlgebra::from_parts(
            field,
            quiver.vertices.clone(),
            pieces,
            right_mult,
            factor,
            complete,
            p.truncation,
        ))
    }

    /// Materializes to the declared truncation, or until the algebra vanishes.
    pub fn from_presentation(p: &AlgebraPresentation) -> Result<GradedAlgebra> {
        GradedAlgebra::materialize(p, p.truncation.unwrap_or(DEFAULT_DEGREE_CAP))
    }

    /// Assembles an algebra from right multiplications and factorizations; left
    /// multiplications and left factorizations are derived.
    pub fn from_parts(
        field: Field,
        vertex_labels: Vec<String>,
        pieces: Vec<Piece>,
        right_mult: Vec<Vec<Matrix>>,
        factor: Vec<Vec<Factorization>>,
        complete: bool,
        declared_truncation: Option<usize>,
    ) -> GradedAlgebra {
        let mut alg = GradedAlgebra {
            field,
            vertex_labels,
            pieces,
            right_mult,
            left_mult: Vec::new(),
            factor,
            lfactor: Vec::new(),
            complete,
            declared_truncation,
        };
        alg.derive_left();
        alg
    }

    fn derive_left(&mut self) {
        let field = self.field;
        let ng = self.num_generators();
        let mut left: Vec<Vec<Matrix>> = Vec::new();
        for d in 0..self.right_mult.len() {
            let rows = self.pieces[d + 1].dim();
            let mats = (0..ng)
                .map(|g| {
                    let columns: Vec<SparseVec> = (0..self.pieces[d].dim())
                        .map(|b| {
                            if d == 0 {
                                if self.pieces[1].target[g] == b {
                                    SparseVec::unit(g, field)
                                } else {
                                    SparseVec::new()
                                }
                            } else {
                                let mut acc = SparseVec::new();
                                for (c, b1, g1) in &self.factor[d][b] {
                                    let gb1 = left[d - 1][g].column(*b1);
                                    acc = acc.add_scaled(c, &self.right_mult[d][*g1].apply(&gb1));
                                }
                                acc
                            }
                        })
                        .collect();
                    Matrix::from_columns(field, rows, &columns)
                })
                .collect();
            left.push(mats);
        }
        self.left_mult = left;

        let mut lfactor = vec![Vec::new()];
        for d in 1..self.pieces.len() {
            if d == 1 {
                lfactor.push((0..ng).map(|g| vec![(field.one(), g, self.pieces[1].target[g])]).collect());
                continue;
            }
            let prev = self.pieces[d - 1].dim();
            let mut columns = Vec::new();
            let mut labels = Vec::new();
            for g in 0..ng {
                for b in 0..prev {
                    let col = self.left_mult[d - 1][g].column(b);
                    if !col.is_zero() {
                        columns.push(col);
                        labels.push((g, b));
                    }
                }
            }
            let stacked = Matrix::from_columns(field, self.pieces[d].dim(), &columns);
            let solver = crate::linalg::Solver::new(&stacked);
            let facs = (0..self.pieces[d].dim())
                .map(|b| {
                    let x = solver
                        .solve(&SparseVec::unit(b, field))
                        .expect("algebra generated in degree one");
                    x.iter().map(|(k, c)| (c.clone(), labels[*k].0, labels[*k].1)).collect()
                })
                .collect();
            lfactor.push(facs);
        }
        self.lfactor = lfactor;
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    pub fn num_generators(&self) -> usize {
        self.pieces.get(1).map_or(0, |p| p.dim())
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn declared_truncation(&self) -> Option<usize> {
        self.declared_truncation
    }

    /// Highest degree whose piece is known.
    pub fn max_degree(&self) -> usize {
        self.pieces.len() - 1
    }

    /// Highest degree with a nonzero piece, when the algebra is finite.
    pub fn top_degree(&self) -> Option<usize> {
        self.complete.then(|| self.pieces.len().saturating_sub(2))
    }

    /// Fails unless `R_d` is known.
    pub fn require_degree(&self, d: i64) -> Result<()> {
        if self.complete || d <= self.max_degree() as i64 {
            Ok(())
        } else {
            Err(Error::InsufficientTruncation {
                needed: d,
                available: self.max_degree() as i64,
            })
        }
    }

    pub fn knows_degree(&self, d: usize) -> bool {
        self.complete || d <= self.max_degree()
    }

    pub fn piece(&self, d: usize) -> Option<&Piece> {
        self.pieces.get(d)
    }

    pub fn dim(&self, d: usize) -> usize {
        match self.pieces.get(d) {
            Some(p) => p.dim(),
            None if self.complete => 0,
            None => panic!("degree {d} beyond materialized range"),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        let end = if self.complete { self.pieces.len() - 1 } else { self.pieces.len() };
        self.pieces[..end].iter().map(|p| p.dim()).collect()
    }

    pub fn total_dim(&self) -> Option<usize> {
        self.complete.then(|| self.dims().iter().sum())
    }

    pub fn source(&self, d: usize, b: usize) -> usize {
        self.pieces[d].source[b]
    }

    pub fn target(&self, d: usize, b: usize) -> usize {
        self.pieces[d].target[b]
    }

    pub fn label(&self, d: usize, b: usize) -> &str {
        &self.pieces[d].labels[b]
    }

    pub fn factorization(&self, d: usize, b: usize) -> &Factorization {
        &self.factor[d][b]
    }

    pub fn left_factorization(&self, d: usize, b: usize) -> &Factorization {
        &self.lfactor[d][b]
    }

    fn zero_map(&self, from: usize) -> Matrix {
        Matrix::zeros(self.field, 0, self.dim(from))
    }

    /// Right multiplication by generator `g` on `R_d`.
    pub fn right_mult(&self, d: usize, g: usize) -> Matrix {
        match self.right_mult.get(d) {
            Some(m) => m[g].clone(),
            None if self.complete => self.zero_map(d),
            None => panic!("degree {} beyond materialized range", d + 1),
        }
    }

    pub fn left_mult(&self, d: usize, g: usize) -> Matrix {
        match self.left_mult.get(d) {
            Some(m) => m[g].clone(),
            None if self.complete => self.zero_map(d),
            None => panic!("degree {} beyond materialized range", d + 1),
        }
    }

    pub(crate) fn right_mult_ref(&self, d: usize, g: usize) -> Option<&Matrix> {
        self.right_mult.get(d).map(|m| &m[g])
    }

    /// Right multiplication by the basis element `b ∈ R_k`, as a map `R_i → R_{i+k}`.
    pub fn right_mult_by(&self, i: usize, k: usize, b: usize) -> Matrix {
        let field = self.field;
        if k == 0 {
            let n = self.dim(i);
            let mut m = Matrix::zeros(field, n, n);
            for x in 0..n {
                if self.target(i, x) == b {
                    m.set(x, x, field.one());
                }
            }
            return m;
        }
        if self.dim(i + k) == 0 {
            return Matrix::zeros(field, 0, self.dim(i));
        }
        let mut acc = Matrix::zeros(field, self.dim(i + k), self.dim(i));
        for (c, b1, g) in &self.factor[k][b] {
            let inner = self.right_mult_by(i, k - 1, *b1);
            let step = self.right_mult(i + k - 1, *g).mul(&inner).expect("shapes");
            acc = acc.add(&step.scale(c)).expect("shapes");
        }
        acc
    }

    /// Product `u·v` of homogeneous elements `u ∈ R_i`, `v ∈ R_j`.
    pub fn multiply(&self, i: usize, u: &SparseVec, j: usize, v: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        if !self.knows_degree(i + j) || self.dim(i + j) == 0 {
            return acc;
        }
        for (b, c) in v.iter() {
            acc = acc.add_scaled(c, &self.right_mult_by(i, j, *b).apply(u));
        }
        acc
    }

    /// Reduces a path (as arrow indices) of a quiver presentation to coordinates in
    /// `R_{len}`; only meaningful for algebras built by `materialize`.
    pub fn path_coordinates(&self, path: &[usize]) -> SparseVec {
        let field = self.field;
        let mut v = SparseVec::unit(self.pieces[1].source[path[0]], field);
        for (d, &a) in path.iter().enumerate() {
            if !self.knows_degree(d + 1) || self.dim(d + 1) == 0 {
                return SparseVec::new();
            }
            v = self.right_mult(d, a).apply(&v);
        }
        v
    }

    /// Coordinates of a homogeneous presentation element; `None` if inhomogeneous.
    pub fn element_coordinates(&self, e: &crate::presentation::AlgElem) -> Option<(usize, SparseVec)> {
        let Some(deg) = e.degree() else {
            return Some((0, SparseVec::new()));
        };
        let mut acc = SparseVec::new();
        for (m, c) in &e.terms {
            let v = match m {
                Monomial::Idempotent(v) => SparseVec::unit(*v, self.field),
                Monomial::Path(p) => self.path_coordinates(p),
            };
            acc = acc.add_scaled(c, &v);
        }
        if e.terms.iter().any(|(m, _)| m.length() != deg) {
            return None;
        }
        Some((deg, acc))
    }

    /// The opposite algebra: same pieces with sources and targets exchanged.
    pub fn opposite(&self) -> GradedAlgebra {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                labels: p.labels.clone(),
                source: p.target.clone(),
                target: p.source.clone(),
            })
            .collect();
        let swap = |f: &Vec<Vec<Factorization>>| -> Vec<Vec<Factorization>> {
            f.iter()
                .map(|fs| {
                    fs.iter()
                        .map(|terms| terms.iter().map(|(c, x, y)| (c.clone(), *y, *x)).collect())
                        .collect()
                })
                .collect()
        };
        GradedAlgebra {
            field: self.field,
            vertex_labels: self.vertex_labels.clone(),
            pieces,
            right_mult: self.left_mult.clone(),
            left_mult: self.right_mult.clone(),
            factor: swap(&self.lfactor),
            lfactor: swap(&self.factor),
            complete: self.complete,
            declared_truncation: self.declared_truncation,
        }
    }

    /// Checks `(ab)c = a(bc)` on all basis triples with total degree at most `bound`.
    pub fn check_associativity(&self, bound: usize) -> bool {
        let bound = bound.min(self.pieces.len() - 1);
        for i in 0..=bound {
            for j in 0..=bound - i {
                for k in 0..=bound - i - j {
                    for a in 0..self.dim(i) {
                        for b in 0..self.dim(j) {
                            for c in 0..self.dim(k) {
                                let f = self.field;
                                let (ua, ub, uc) = (SparseVec::unit(a, f), SparseVec::unit(b, f), SparseVec::unit(c, f));
                                let left = self.multiply(i + j, &self.multiply(i, &ua, j, &ub), k, &uc);
                                let right = self.multiply(i, &ua, j + k, &self.multiply(j, &ub, k, &uc));
                                if left != right {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// `R^e = R^op ⊗ R` with product `(a⊗b)(a′⊗b′) = (a′a)⊗(bb′)`.
///
/// A right `R^e`-module is an `R`-bimodule through `m·(a⊗b) = a·m·b`. The vertex
/// `(v, w)` has index `v·n + w`; the basis element `a⊗b` runs from
/// `(target a, source b)` to `(source a, target b)`.
#[derive(Clone, Debug)]
pub struct EnvelopingAlgebra {
    pub algebra: std::sync::Arc<GradedAlgebra>,
    base: GradedAlgebra,
    /// `offsets[n][i]`: index of the first `a⊗b` with `deg a = i` in `(R^e)_n`.
    offsets: Vec<Vec<usize>>,
}

impl EnvelopingAlgebra {
    pub fn new(r: &GradedAlgebra) -> EnvelopingAlgebra {
        let field = r.field();
        let nv = r.num_vertices();
        let rtop = r.pieces.len() - 1;
        // highest known degree of R^e, plus one empty piece when R is finite
        let (known, complete) = if r.complete {
            (2 * rtop.saturating_sub(1) + 1, true)
        } else {
            (rtop, false)
        };
        let rdim = |d: usize| if d < r.pieces.len() { r.pieces[d].dim() } else { 0 };

        let mut offsets = Vec::new();
        let mut pieces = Vec::new();
        for n in 0..=known {
            let mut off = Vec::new();
            let mut piece = Piece::default();
            for i in 0..=n {
                off.push(piece.dim());
                let j = n - i;
                for a in 0..rdim(i) {
                    for b in 0..rdim(j) {
                        piece.labels.push(format!("{}⊗{}", r.pieces[i].labels[a], r.pieces[j].labels[b]));
                        piece.source.push(r.target(i, a) * nv + r.source(j, b));
                        piece.target.push(r.source(i, a) * nv + r.target(j, b));
                    }
                }
            }
            off.push(piece.dim());
            offsets.push(off);
            pieces.push(piece);
        }
        let index = |n: usize, i: usize, a: usize, b: usize| offsets[n][i] + a * rdim(n - i) + b;

        // generators in the basis order of (R^e)_1: (side, x, y) is e_x⊗y for side 0
        // and x⊗e_y for side 1
        let mut gens = Vec::new();
        if known >= 1 {
            for i in 0..=1 {
                for a in 0..rdim(i) {
                    for b in 0..rdim(1 - i) {
                        gens.push((i, a, b));
                    }
                }
            }
        }

        let mut right_mult = Vec::new();
        let mut factor = vec![Vec::new()];
        for n in 0..known {
            let mats = gens
                .iter()
                .map(|&(side, x, y)| {
                    let mut m = Matrix::zeros(field, pieces[n + 1].dim(), pieces[n].dim());
                    for i in 0..=n {
                        let j = n - i;
                        for a in 0..rdim(i) {
                            for b in 0..rdim(j) {
                                let col = index(n, i, a, b);
                                if side == 1 {
                                    // (a⊗b)(α⊗e_w) = (α·a)⊗(b·e_w)
                                    if r.target(j, b) != y || !r.knows_degree(i + 1) || rdim(i + 1) == 0 {
                                        continue;
                                    }
                                    for (a2, c) in r.left_mult(i, x).column(a).iter() {
                                        m.set(index(n + 1, i + 1, *a2, b), col, c.clone());
                                    }
                                } else {
                                    // (a⊗b)(e_v⊗β) = (e_v·a)⊗(b·β)
                                    if r.source(i, a) != x || !r.knows_degree(j + 1) || rdim(j + 1) == 0 {
                                        continue;
                                    }
                                    for (b2, c) in r.right_mult(j, y).column(b).iter() {
                                        m.set(index(n + 1, i, a, *b2), col, c.clone());
                                    }
                                }
                            }
                        }
                    }
                    m
                })
                .collect::<Vec<_>>();
            right_mult.push(mats);
        }
        let gen_index = |side: usize, x: usize, y: usize| -> usize { index(1, side, x, y) };
        for n in 1..=known {
            let mut fac = Vec::new();
            for i in 0..=n {
                let j = n - i;
                for a in 0..rdim(i) {
                    for b in 0..rdim(j) {
                        let terms: Factorization = if j >= 1 {
                            r.factor[j][b]
                                .iter()
                                .map(|(c, b1, beta)| {
                                    (c.clone(), index(n - 1, i, a, *b1), gen_index(0, r.source(i, a), *beta))
                                })
                                .collect()
                        } else {
                            r.lfactor[i][a]
                                .iter()
                                .map(|(c, alpha, a1)| {
                                    (c.clone(), index(n - 1, i - 1, *a1, b), gen_index(1, *alpha, r.target(0, b)))
                                })
                                .collect()
                        };
                        fac.push(terms);
                    }
                }
            }
            factor.push(fac);
        }
        let labels = (0..nv * nv)
            .map(|k| format!("({},{})", r.vertex_labels[k / nv], r.vertex_labels[k % nv]))
            .collect();
        let algebra = GradedAlgebra::from_parts(field, labels, pieces, right_mult, factor, complete, None);
        EnvelopingAlgebra {
            algebra: std::sync::Arc::new(algebra),
            base: r.clone(),
            offsets,
        }
    }

    pub fn base(&self) -> &GradedAlgebra {
        &self.base
    }

    /// Index of `a⊗b` in `(R^e)_n`, `a ∈ R_i`, `b ∈ R_{n−i}`.
    pub fn index(&self, n: usize, i: usize, a: usize, b: usize) -> usize {
        self.offsets[n][i] + a * self.base.dim(n - i) + b
    }

    /// Inverse of `index`: `(i, a, b)`.
    pub fn decode(&self, n: usize, idx: usize) -> (usize, usize, usize) {
        let i = self.offsets[n].iter().rposition(|&o| o <= idx).expect("index in range");
        let rel = idx - self.offsets[n][i];
        let w = self.base.dim(n - i);
        (i, rel / w, rel % w)
    }

    pub fn vertex(&self, v: usize, w: usize) -> usize {
        v * self.base.num_vertices() + w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_algebra;

    const QUANTUM_GF5: &str = "field GF(5)\nunit q = 2\nvertex 1\narrow x: 1 -> 1\narrow y: 1 -> 1\nrelation x*y - q*y*x\nrelation x*x\nrelation y*y\n";

    fn quantum() -> GradedAlgebra {
        GradedAlgebra::from_presentation(&parse_algebra(QUANTUM_GF5).unwrap()).unwrap()
    }

    #[test]
    fn quantum_plane_dims() {
        let r = quantum();
        assert_eq!(r.dims(), vec![1, 2, 1]);
        assert_eq!(r.label(2, 0), "y*x");
        assert!(r.is_complete());
        assert!(r.check_associativity(4));
        // x·y = q·y·x with q = 2
        let f = r.field();
        let xy = r.multiply(1, &SparseVec::unit(0, f), 1, &SparseVec::unit(1, f));
        assert_eq!(xy, SparseVec::unit(0, f).scale(&f.from_i64(2)));
    }

    #[test]
    fn cyclic_radical_square_zero() {
        let p = parse_algebra(
            "field Q\nvertex 1 2\narrow a: 1 -> 2\narrow b: 2 -> 1\nrelation a*b\nrelation b*a\n",
        )
        .unwrap();
        let r = GradedAlgebra::from_presentation(&p).unwrap();
        assert_eq!(r.dims(), vec![2, 2]);
    }

    #[test]
    fn free_loop_needs_truncation() {
        let p = parse_algebra("field Q\nvertex a\narrow x: a -> a\ntruncate 4\n").unwrap();
        let r = GradedAlgebra::from_presentation(&p).unwrap();
        assert_eq!(r.dims(), vec![1, 1, 1, 1, 1]);
        assert!(!r.is_complete());
        assert!(matches!(
            GradedAlgebra::materialize(&p, 6),
            Err(Error::TruncationExceeded { requested: 6, declared: 4 })
        ));
        let bare = parse_algebra("field Q\nvertex a\narrow x: a -> a\n").unwrap();
        assert!(matches!(GradedAlgebra::materialize(&bare, 5), Err(Error::MissingTruncation(5))));
    }

    #[test]
    fn dim_two_equals_paths_minus_relations() {
        let r = quantum();
        // four length-two paths, three independent relations
        assert_eq!(r.dim(2), 4 - 3);
    }

    #[test]
    fn opposite_of_commutative_is_itself() {
        let p = parse_algebra("field Q\nvertex a\narrow x: a -> a\ntruncate 4\n").unwrap();
        let r = GradedAlgebra::from_presentation(&p).unwrap();
        let op = r.opposite();
        for d in 0..4 {
            assert_eq!(op.right_mult(d, 0), r.right_mult(d, 0));
        }
    }

    #[test]
    fn enveloping_dimensions() {
        let r = quantum();
        let e = EnvelopingAlgebra::new(&r);
        assert_eq!(e.algebra.dims(), vec![1, 4, 6, 4, 1]);
        assert_eq!(e.algebra.num_vertices(), 1);
        assert!(e.algebra.check_associativity(4));
        let p = parse_algebra(
            "field Q\nvertex 1 2 3\narrow a: 1 -> 2\narrow b: 2 -> 3\narrow c: 3 -> 1\nrelation a*b\nrelation b*c\nrelation c*a\n",
        )
        .unwrap();
        let r3 = GradedAlgebra::from_presentation(&p).unwrap();
        let e3 = EnvelopingAlgebra::new(&r3);
        assert_eq!(e3.algebra.num_vertices(), 9);
        assert_eq!(e3.algebra.dims(), vec![9, 18, 9]);
        assert!(e3.algebra.check_associativity(2));
        for n in 0..3 {
            for idx in 0..e3.algebra.dim(n) {
                let (i, a, b) = e3.decode(n, idx);
                assert_eq!(e3.index(n, i, a, b), idx);
            }
        }
    }

    #[test]
    fn enveloping_product_rule() {
        // (a⊗b)(a′⊗b′) = (a′a)⊗(bb′) checked on degree-one generators
        let r = quantum();
        let e = EnvelopingAlgebra::new(&r);
        let f = r.field();
        for n in 0..2 {
            for idx in 0..e.algebra.dim(n) {
                let (i, a, b) = e.decode(n, idx);
                for g in 0..e.algebra.num_generators() {
                    let (gi, ga, gb) = e.decode(1, g);
                    let prod = e.algebra.right_mult(n, g).column(idx);
                    let left = r.multiply(gi, &SparseVec::unit(ga, f), i, &SparseVec::unit(a, f));
                    let right = r.multiply(n - i, &SparseVec::unit(b, f), 1 - gi, &SparseVec::unit(gb, f));
                    let mut expect = SparseVec::new();
                    for (x, c) in left.iter() {
                        for (y, d) in right.iter() {
                            expect = expect.add_scaled(&(c * d), &SparseVec::unit(e.index(n + 1, i + gi, *x, *y), f));
                        }
                    }
                    assert_eq!(prod, expect);
                }
            }
        }
    }
}
