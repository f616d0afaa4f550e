//! Hochschild cohomology through the enveloping algebra, the Koszul dual
//! `E_R = Ext_R(R_0, R_0)`, the map `T = R_0 ⊗_R −` and the graded center.
//!
//! `T` sends a summand `R e_v ⊗ e_w R(−d)` of the bimodule resolution to
//! `e_w R(−d)`, which turns the bimodule resolution of `R` into a resolution of
//! `R_0`. A comparison map from the minimal resolution of `R_0` then expresses
//! `T(η)` in the fixed basis of `E_R`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{EnvelopingAlgebra, GradedAlgebra};
use crate::error::{Error, Result};
use crate::extalg::{compose_with_chain, element_is_zero, lift_chain, Bidegree, Element, ExtAlgebra, ExtAlgebraTable, ExtClass, LiftChain};
use crate::gmodule::{FreeModule, GradedModule};
use crate::linalg::{Matrix, SparseVec, Subspace};
use crate::resolution::Resolution;

/// `R` as a right `R^e`-module, `m·(a⊗b) = a·m·b`.
pub fn regular_bimodule(env: &Arc<EnvelopingAlgebra>) -> GradedModule {
    let r = env.base();
    let re = env.algebra.clone();
    let field = r.field();
    let top = r.top_degree().unwrap_or(r.max_degree());
    let vertices: Vec<Vec<usize>> = (0..=top)
        .map(|d| (0..r.dim(d)).map(|b| env.vertex(r.source(d, b), r.target(d, b))).collect())
        .collect();
    let mut actions = Vec::new();
    for d in 0..=top {
        let rows = if d < top { r.dim(d + 1) } else { 0 };
        let mut mats = Vec::new();
        for g in 0..re.num_generators() {
            let (side, x, y) = env.decode(1, g);
            let mut m = Matrix::zeros(field, rows, r.dim(d));
            if d < top {
                let (mult, keep): (Matrix, Box<dyn Fn(usize) -> bool>) = if side == 0 {
                    // e_x⊗β: m ↦ e_x·m·β
                    (r.right_mult(d, y), Box::new(move |b| r.source(d, b) == x))
                } else {
                    // α⊗e_y: m ↦ α·m·e_y
                    (r.left_mult(d, x), Box::new(move |b| r.target(d, b) == y))
                };
                for b in 0..r.dim(d) {
                    if !keep(b) {
                        continue;
                    }
                    for (b2, c) in mult.column(b).iter() {
                        m.set(*b2, b, c.clone());
                    }
                }
            }
            mats.push(m);
        }
        actions.push(mats);
    }
    let known_to = if r.is_complete() { None } else { Some(top as i32) };
    GradedModule::assemble(re, 0, vertices, actions, known_to)
}

/// `HH^*(R) = Ext_{R^e}(R, R)` through homological degree `n_max`.
#[derive(Debug)]
pub struct Hochschild {
    pub algebra: Arc<GradedAlgebra>,
    pub env: Arc<EnvelopingAlgebra>,
    pub ext: ExtAlgebra,
}

pub fn hochschild(alg: &Arc<GradedAlgebra>, n_max: usize) -> Result<Hochschild> {
    let env = Arc::new(EnvelopingAlgebra::new(alg));
    let bimodule = regular_bimodule(&env);
    let ext = ExtAlgebra::new(&bimodule, n_max)?;
    Ok(Hochschild {
        algebra: alg.clone(),
        env,
        ext,
    })
}

impl Hochschild {
    pub fn n_max(&self) -> usize {
        self.ext.n_max()
    }

    /// `dim HH^n` for `n ≤ n_max`.
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.n_max()).map(|n| self.ext.total_dim(n)).collect()
    }

    /// `dim Δ^n_R = dim HH^n_{−n}`.
    pub fn delta_dims(&self) -> Vec<usize> {
        (0..=self.n_max()).map(|n| self.ext.dim((n, -(n as i32)))).collect()
    }

    /// `dim N^n_R`.
    pub fn rest_dims(&self) -> Vec<usize> {
        self.dims().iter().zip(self.delta_dims()).map(|(a, b)| a - b).collect()
    }
}

/// `E_R = Ext_R(R_0, R_0)` through homological degree `n_max`.
pub fn ext_algebra_of_semisimple(alg: &Arc<GradedAlgebra>, n_max: usize) -> Result<ExtAlgebra> {
    ExtAlgebra::new(&GradedModule::semisimple_top(alg.clone()), n_max)
}

/// The map `T: HH^* → E_R` for a fixed pair of computations.
pub struct TMap<'a> {
    hh: &'a Hochschild,
    e: &'a ExtAlgebra,
    /// `T(P^•) → R_0`.
    reduced: Resolution,
    /// Lift of the identity of `R_0` from the minimal resolution into `T(P^•)`.
    comparison: LiftChain,
}

impl<'a> TMap<'a> {
    /// Requires both computations to reach `n_max`.
    pub fn new(hh: &'a Hochschild, e: &'a ExtAlgebra, n_max: usize) -> Result<TMap<'a>> {
        if hh.n_max() < n_max || e.n_max() < n_max {
            return Err(Error::PreconditionFailed(format!(
                "T needs both sides through degree {n_max}, have {} and {}",
                hh.n_max(),
                e.n_max()
            )));
        }
        let reduced = reduce_resolution(hh, e.module(), n_max)?;
        let comparison = lift_chain(e.resolution(), &reduced, &e.identity(), n_max + 1, None)?;
        Ok(TMap {
            hh,
            e,
            reduced,
            comparison,
        })
    }

    /// `T(η)` as a cochain on `T(P^n)`: the `R_0` part of each generator image.
    fn reduce_class(&self, class: &ExtClass) -> ExtClass {
        let alg = &self.hh.algebra;
        let top = self.e.module();
        let free = self.hh.ext.resolution().free(class.n);
        let images = free
            .summands()
            .iter()
            .zip(&class.images)
            .map(|(&(_, d), img)| {
                if d + class.degree != 0 {
                    return SparseVec::new();
                }
                SparseVec::from_pairs(
                    img.iter()
                        .map(|(b, c)| (idempotent_position(alg, top, *b), c.clone()))
                        .collect(),
                )
            })
            .collect();
        ExtClass {
            n: class.n,
            degree: class.degree,
            images,
        }
    }

    /// `T(η)` as a class of `E_R` (a cocycle on the minimal resolution of `R_0`).
    pub fn apply(&self, class: &ExtClass) -> Result<ExtClass> {
        let reduced = self.reduce_class(class);
        compose_with_chain(&self.reduced, self.e.module(), &reduced, self.e.resolution(), &self.comparison)
    }

    /// Coordinates of `T(η)` in the basis of `E_R`.
    pub fn coordinates(&self, class: &ExtClass) -> Result<SparseVec> {
        self.e.coordinates(&self.apply(class)?)
    }
}

/// Position of the idempotent `e_v` (basis index `b` of `R_0`) in the top module.
fn idempotent_position(alg: &GradedAlgebra, top: &GradedModule, b: usize) -> usize {
    let v = alg.source(0, b);
    top.degree_vertices(0).iter().position(|&w| w == v).expect("vertex of R_0")
}

/// `T(P^•)` for the bimodule resolution of `R`, as a fixed resolution of `R_0`.
fn reduce_resolution(hh: &Hochschild, top: &GradedModule, n_max: usize) -> Result<Resolution> {
    let alg = &hh.algebra;
    let env = &hh.env;
    let nv = alg.num_vertices();
    let res = hh.ext.resolution();
    let mut free = Vec::new();
    let mut images = Vec::new();
    for n in 0..=n_max {
        let summands: Vec<(usize, i32)> = res.free(n).summands().iter().map(|&(u, d)| (u % nv, d)).collect();
        let reduced = FreeModule::new(alg.clone(), &summands);
        let imgs: Vec<SparseVec> = if n == 0 {
            res.images(0)
                .iter()
                .zip(res.free(0).summands())
                .map(|(img, &(_, d))| {
                    if d != 0 {
                        return SparseVec::new();
                    }
                    SparseVec::from_pairs(
                        img.iter()
                            .map(|(b, c)| (idempotent_position(alg, top, *b), c.clone()))
                            .collect(),
                    )
                })
                .collect()
        } else {
            let entries = res.entries(n);
            let below: &FreeModule = &free[n - 1];
            let mut cols = vec![SparseVec::new(); res.betti(n)];
            for (j, row) in entries.iter().enumerate() {
                let vj = res.free(n - 1).summands()[j].0 / nv;
                for (k, e) in row.iter().enumerate() {
                    let Some(e) = e else { continue };
                    // keep e_{v_j}⊗b, which becomes b on the summand e_{w_j}R
                    let mut b_part = Vec::new();
                    for (idx, c) in e.coords.iter() {
                        let (i, a, b) = env.decode(e.degree, *idx);
                        if i == 0 && alg.source(0, a) == vj {
                            b_part.push((b, c.clone()));
                        }
                    }
                    if b_part.is_empty() {
                        continue;
                    }
                    let x = below.element(j, e.degree, &SparseVec::from_pairs(b_part))?;
                    cols[k] = cols[k].add(&x);
                }
            }
            cols
        };
        free.push(reduced);
        images.push(imgs);
    }
    Ok(Resolution::from_parts(top.clone(), free, images))
}

/// Homogeneous elements of a bigraded algebra that supercommute with every
/// element of the computed range, sign `(−1)^{nm}` by homological degree.
#[derive(Clone, Debug, Serialize)]
pub struct GradedCenter {
    pub n_max: usize,
    /// Basis (coordinates) of each nonzero slice.
    #[serde(serialize_with = "serialize_slices")]
    pub slices: BTreeMap<Bidegree, Vec<SparseVec>>,
}

fn serialize_slices<S: serde::Serializer>(slices: &BTreeMap<Bidegree, Vec<SparseVec>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(slices.len()))?;
    for ((n, i), basis) in slices {
        seq.serialize_element(&(n, i, basis.len()))?;
    }
    seq.end()
}

impl GradedCenter {
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.n_max)
            .map(|n| self.slices.iter().filter(|(b, _)| b.0 == n).map(|(_, v)| v.len()).sum())
            .collect()
    }

    pub fn slice(&self, b: Bidegree) -> &[SparseVec] {
        self.slices.get(&b).map_or(&[], |v| v.as_slice())
    }
}

fn sign(table: &ExtAlgebraTable, n: usize, m: usize) -> crate::field::Scalar {
    if (n * m).is_multiple_of(2) {
        table.field.one()
    } else {
        -table.field.one()
    }
}

/// Graded center through `n_max`; the table must reach `n_max + 1` so every
/// slice is tested against `E^0` and `E^1`.
pub fn graded_center(table: &ExtAlgebraTable, n_max: usize) -> Result<GradedCenter> {
    if table.n_max < n_max + 1 {
        return Err(Error::PreconditionFailed(format!(
            "the graded center through degree {n_max} needs products through {}",
            n_max + 1
        )));
    }
    let field = table.field;
    let mut slices = BTreeMap::new();
    for (&a, &da) in table.dims.iter().filter(|(b, _)| b.0 <= n_max) {
        // constraints from every v with n + |v| in range; this includes E^0, E^1
        // column i stacks the commutators of basis element i with every v
        let mut columns: Vec<Vec<(usize, SparseVec)>> = vec![Vec::new(); da];
        let mut height = 0;
        for (&b, &db) in table.dims.iter().filter(|(b, _)| a.0 + b.0 <= table.n_max) {
            let key = (a.0 + b.0, a.1 + b.1);
            let s = sign(table, a.0, b.0);
            let width = table.dim(key);
            for j in 0..db {
                let v = table.basis_element(b, j);
                for (i, col) in columns.iter_mut().enumerate() {
                    let u = table.basis_element(a, i);
                    let uv = table.multiply(&u, &v).expect("in range");
                    let vu = table.multiply(&v, &u).expect("in range");
                    let x = uv.get(&key).cloned().unwrap_or_default();
                    let y = vu.get(&key).cloned().unwrap_or_default();
                    col.push((height, x.sub(&y.scale(&s))));
                }
                height += width;
            }
        }
        let columns: Vec<SparseVec> = columns.iter().map(|parts| concat_owned(parts)).collect();
        let kernel = Matrix::from_columns(field, height, &columns).kernel_vectors();
        if !kernel.is_empty() {
            slices.insert(a, kernel);
        }
    }
    Ok(GradedCenter { n_max, slices })
}

fn concat_owned(parts: &[(usize, SparseVec)]) -> SparseVec {
    let refs: Vec<(usize, &SparseVec)> = parts.iter().map(|(o, v)| (*o, v)).collect();
    SparseVec::concat(&refs)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrCentRow {
    pub n: usize,
    pub delta: usize,
    pub center: usize,
    /// Rank of `T` on `Δ^n_R`.
    pub rank: usize,
    /// `T(Δ^n_R)` equals the center slice.
    pub onto: bool,
    /// `T` kills the rest of `HH^n`.
    pub kills_rest: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrCentReport {
    pub rows: Vec<GrCentRow>,
    pub pass: bool,
}

/// Checks that `T` maps `Δ^n_R` bijectively onto `Z_gr(E_R)^n` for `n ≤ n_max`.
pub fn verify_gr_cent(alg: &Arc<GradedAlgebra>, n_max: usize) -> Result<GrCentReport> {
    let hh = hochschild(alg, n_max)?;
    let e = ext_algebra_of_semisimple(alg, n_max + 1)?;
    let center = graded_center(e.table()?, n_max)?;
    let t = TMap::new(&hh, &e, n_max)?;
    let field = alg.field();
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let diag = (n, -(n as i32));
        let width = e.dim(diag);
        let images: Vec<SparseVec> = hh
            .ext
            .basis(diag)
            .iter()
            .map(|c| t.coordinates(c))
            .collect::<Result<_>>()?;
        let span = Subspace::spanned_by(field, width, &images);
        let z = Subspace::spanned_by(field, width, center.slice(diag));
        let off_diagonal_center: usize = center.slices.iter().filter(|(b, _)| b.0 == n && b.1 != diag.1).map(|(_, v)| v.len()).sum();
        let mut kills_rest = true;
        for b in hh.ext.bidegrees().into_iter().filter(|b| b.0 == n && b.1 != diag.1) {
            for c in hh.ext.basis(b) {
                if !t.coordinates(&c)?.is_zero() {
                    kills_rest = false;
                }
            }
        }
        let row = GrCentRow {
            n,
            delta: images.len(),
            center: z.dim() + off_diagonal_center,
            rank: span.dim(),
            onto: span.is_subspace_of(&z) && z.is_subspace_of(&span) && off_diagonal_center == 0,
            kills_rest,
        };
        if row.rank != row.delta || !row.onto || row.delta != row.center || !row.kills_rest {
            return Err(Error::VerificationFailed {
                degree: n,
                message: format!(
                    "dim Δ = {}, rank T = {}, dim Z = {}, onto = {}, T(N) = 0: {}",
                    row.delta, row.rank, row.center, row.onto, row.kills_rest
                ),
            });
        }
        rows.push(row);
    }
    Ok(GrCentReport { rows, pass: true })
}

/// A central element of positive degree whose computed powers are all nonzero.
#[derive(Clone, Debug, Serialize)]
pub struct CenterWitness {
    pub bidegree: Bidegree,
    #[serde(skip)]
    pub coords: SparseVec,
    /// Bidegrees of the nonzero powers `u, u^2, …` within range.
    pub trail: Vec<Bidegree>,
}

/// Searches the center slices of positive degree `≤ degree_bound` for an
/// element with at least two nonzero powers and no zero power up to
/// `power_bound` inside the table's range.
pub fn find_non_nilpotent_center(
    table: &ExtAlgebraTable,
    center: &GradedCenter,
    degree_bound: usize,
    power_bound: usize,
) -> Option<CenterWitness> {
    for (&b, basis) in center.slices.iter().filter(|(b, _)| b.0 >= 1 && b.0 <= degree_bound) {
        let mut candidates: Vec<SparseVec> = basis.clone();
        if basis.len() > 1 {
            let mut sum = SparseVec::new();
            for v in basis {
                sum = sum.add(v);
            }
            candidates.push(sum);
        }
        for coords in candidates {
            let mut x = Element::new();
            x.insert(b, coords.clone());
            let mut trail = Vec::new();
            let mut acc = x.clone();
            let mut ok = true;
            for k in 1..=power_bound {
                if k > 1 {
                    match table.multiply(&acc, &x) {
                        Some(p) => acc = p,
                        None => break,
                    }
                }
                if element_is_zero(&acc) {
                    ok = false;
                    break;
                }
                trail.push((b.0 * k, b.1 * k as i32));
            }
            if ok && trail.len() >= 2 {
                return Some(CenterWitness {
                    bidegree: b,
                    coords,
                    trail,
                });
            }
        }
    }
    None
}
