//! Lifting analysis and periodicity of linear modules.
//!
//! A lifting `l^t` of a diagonal class has entries in `R_0`, so it is a block
//! of scalar matrices indexed by the vertices of the generators. Kernel,
//! image and cokernel are then read off from per-vertex ranks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::GradedAlgebra;
use crate::error::{Error, Result};
use crate::extalg::{ext_group, lift_chain, yoneda, EntryClass, ExtAlgebra, ExtClass, LiftChain};
use crate::field::Scalar;
use crate::gmodule::{hom_space, is_isomorphic_graded, FreeModule, GradedMap, GradedModule, IsoVerdict};
use crate::linalg::{Matrix, SparseVec, Subspace};
use crate::resolution::{Entry, Resolution};

const DELTA_SEED: u64 = 0x64656c74;
const RANDOM_COMBINATIONS: usize = 4;

/// Summand decomposition of an `R_0`-entry map between graded free modules.
/// Multiplicities are keyed by `(vertex, generator degree)` of the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub kernel: BTreeMap<(usize, i32), usize>,
    pub image: BTreeMap<(usize, i32), usize>,
    pub cokernel: BTreeMap<(usize, i32), usize>,
    pub mono: bool,
    pub epi: bool,
    pub iso: bool,
}

impl SplitReport {
    pub fn kernel_rank(&self) -> usize {
        self.kernel.values().sum()
    }

    pub fn image_rank(&self) -> usize {
        self.image.values().sum()
    }

    pub fn cokernel_rank(&self) -> usize {
        self.cokernel.values().sum()
    }
}

/// Splits a degree-`degree` map `⊕ e_{v_k}R(−d_k) → ⊕ e_{w_j}R(−c_j)` given by
/// `entries[j][k]`. Every nonzero entry must lie in `R_0`.
pub fn split_r0_map(
    source: &[(usize, i32)],
    target: &[(usize, i32)],
    entries: &[Vec<Option<Entry>>],
    degree: i32,
    field: crate::field::Field,
) -> Result<SplitReport> {
    // blocks keyed by (vertex, target degree)
    let mut cols: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
    let mut rows: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
    for (k, &(v, d)) in source.iter().enumerate() {
        cols.entry((v, d + degree)).or_default().push(k);
    }
    for (j, &(v, d)) in target.iter().enumerate() {
        rows.entry((v, d)).or_default().push(j);
    }
    for (j, row) in entries.iter().enumerate() {
        for (k, e) in row.iter().enumerate() {
            if let Some(e) = e {
                let (v, d) = source[k];
                if e.degree > 0 || target[j] != (v, d + degree) {
                    return Err(Error::EntriesNotInR0);
                }
            }
        }
    }
    let mut report = SplitReport {
        kernel: BTreeMap::new(),
        image: BTreeMap::new(),
        cokernel: BTreeMap::new(),
        mono: true,
        epi: true,
        iso: true,
    };
    let keys: std::collections::BTreeSet<(usize, i32)> = cols.keys().chain(rows.keys()).copied().collect();
    for key in keys {
        let c = cols.get(&key).cloned().unwrap_or_default();
        let r = rows.get(&key).cloned().unwrap_or_default();
        let mut m = Matrix::zeros(field, r.len(), c.len());
        for (a, &j) in r.iter().enumerate() {
            for (b, &k) in c.iter().enumerate() {
                if let Some(e) = &entries[j][k] {
                    let (_, x) = e.coords.iter().next().expect("nonzero entry");
                    m.set(a, b, x.clone());
                }
            }
        }
        let rank = m.rank();
        let ker = c.len() - rank;
        let cok = r.len() - rank;
        if ker > 0 {
            report.kernel.insert(key, ker);
        }
        if rank > 0 {
            report.image.insert(key, rank);
        }
        if cok > 0 {
            report.cokernel.insert(key, cok);
        }
    }
    report.mono = report.kernel.is_empty();
    report.epi = report.cokernel.is_empty();
    report.iso = report.mono && report.epi;
    Ok(report)
}

/// `split_r0_map` applied to the lifting `l^t` of a chain.
pub fn split_lift(res_m: &Resolution, res_n: &Resolution, chain: &LiftChain, t: usize) -> Result<SplitReport> {
    split_r0_map(
        res_m.free(chain.n + t).summands(),
        res_n.free(t).summands(),
        &chain.entries(res_m, res_n, t),
        chain.degree,
        res_m.module().field(),
    )
}

/// Per-stage data of a lift chain.
#[derive(Clone, Debug, Serialize)]
pub struct StageFlags {
    pub stage: usize,
    pub entries: EntryClass,
    /// `None` when the lift has entries outside `R_0`.
    pub split: Option<SplitReport>,
    pub nonzero: bool,
}

impl StageFlags {
    pub fn mono(&self) -> Option<bool> {
        self.split.as_ref().map(|s| s.mono)
    }

    pub fn epi(&self) -> Option<bool> {
        self.split.as_ref().map(|s| s.epi)
    }

    pub fn iso(&self) -> Option<bool> {
        self.split.as_ref().map(|s| s.iso)
    }
}

/// Which propagation laws apply to a chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// Indecomposable linear source, nonzero diagonal class.
    pub mono: bool,
    /// In addition: infinite projective dimension and no syzygy of the
    /// target's module has a projective summand (window-relative).
    pub epi: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainFlags {
    pub stages: Vec<StageFlags>,
    pub hypotheses: Hypotheses,
    /// First mono stage, if any.
    pub first_mono: Option<usize>,
    /// Last epi stage, if any.
    pub last_epi: Option<usize>,
}

/// Flags every stage and asserts the propagation laws the hypotheses allow.
pub fn chain_flags(res_m: &Resolution, res_n: &Resolution, chain: &LiftChain, hypotheses: Hypotheses) -> Result<ChainFlags> {
    let mut stages = Vec::with_capacity(chain.len());
    for t in 0..chain.len() {
        let entries = chain.classify(res_m, res_n, t);
        let split = match entries {
            EntryClass::Zero | EntryClass::AllInR0 => Some(split_lift(res_m, res_n, chain, t)?),
            _ => None,
        };
        stages.push(StageFlags {
            stage: t,
            entries,
            split,
            nonzero: entries != EntryClass::Zero,
        });
    }
    let first_mono = stages.iter().position(|s| s.mono() == Some(true));
    let last_epi = stages.iter().rposition(|s| s.epi() == Some(true));
    if hypotheses.mono {
        if let Some(j) = first_mono {
            if let Some(bad) = stages[j..].iter().find(|s| s.mono() != Some(true)) {
                return Err(Error::VerificationFailed {
                    degree: bad.stage,
                    message: format!("lifting {j} is a monomorphism but lifting {} is not", bad.stage),
                });
            }
        }
    }
    if hypotheses.epi {
        if let Some(j) = last_epi {
            if let Some(bad) = stages[..=j].iter().find(|s| s.epi() != Some(true)) {
                return Err(Error::VerificationFailed {
                    degree: bad.stage,
                    message: format!("lifting {j} is an epimorphism but lifting {} is not", bad.stage),
                });
            }
        }
    }
    Ok(ChainFlags {
        stages,
        hypotheses,
        first_mono,
        last_epi,
    })
}

/// Outcome of the indecomposability test on `End(M)_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reason")]
pub enum Indecomposability {
    /// `End(M)_0 = k·1 ⊕ V` with `V` a nilpotent ideal.
    Local,
    /// An endomorphism that is neither nilpotent nor invertible was found.
    Decomposable,
    Unknown(String),
}

fn flatten(f: &GradedMap, source: &GradedModule) -> SparseVec {
    let mut parts = Vec::new();
    let mut offset = 0;
    let mut blocks = Vec::new();
    for d in source.lo()..=source.hi() {
        let b = f.block(d);
        let width = b.rows() * b.cols();
        blocks.push((offset, b));
        offset += width;
    }
    for (off, b) in &blocks {
        let mut pairs = Vec::new();
        for c in 0..b.cols() {
            for (r, x) in b.column(c).iter() {
                pairs.push((c * b.rows() + r, x.clone()));
            }
        }
        parts.push((*off, SparseVec::from_pairs(pairs)));
    }
    let refs: Vec<(usize, &SparseVec)> = parts.iter().map(|(o, v)| (*o, v)).collect();
    SparseVec::concat(&refs)
}

fn flat_len(m: &GradedModule) -> usize {
    (m.lo()..=m.hi()).map(|d| m.dim(d) * m.dim(d)).sum()
}

fn is_nilpotent(f: &GradedMap, m: &GradedModule) -> bool {
    let mut p = f.clone();
    for _ in 0..m.total_dim() {
        if p.is_zero() {
            return true;
        }
        p = p.compose(f);
    }
    p.is_zero()
}

/// The scalar `λ` with `a − λ` nilpotent, assuming one exists, read from the
/// trace of a block whose dimension is invertible in the field.
fn residue(a: &GradedMap, m: &GradedModule) -> Option<Scalar> {
    let field = m.field();
    (m.lo()..=m.hi()).find_map(|d| {
        let n = m.dim(d);
        let inv = field.from_i64(n as i64).inv()?;
        let b = a.block(d);
        let mut tr = field.zero();
        for i in 0..n {
            tr += &b.get(i, i);
        }
        Some(&tr * &inv)
    })
}

/// Tests whether the graded endomorphism ring `End(M)_0` is local.
pub fn is_indecomposable(m: &GradedModule) -> Indecomposability {
    if m.is_zero() {
        return Indecomposability::Decomposable;
    }
    let field = m.field();
    let basis = hom_space(m, m, 0);
    let id = m.identity();
    let len = flat_len(m);
    let mut radical = Vec::new();
    for a in &basis {
        let Some(l) = residue(a, m) else {
            return Indecomposability::Unknown("every degree has dimension divisible by the characteristic".into());
        };
        let r = a.add(&id.scale(&-l.clone()));
        if !is_nilpotent(&r, m) {
            if !r.is_iso() {
                return Indecomposability::Decomposable;
            }
            // look for a singular shift a − c with c on the diagonal
            for d in m.lo()..=m.hi() {
                let b = a.block(d);
                for i in 0..b.rows().min(b.cols()) {
                    let f = a.add(&id.scale(&-b.get(i, i)));
                    if !f.is_iso() && !is_nilpotent(&f, m) {
                        return Indecomposability::Decomposable;
                    }
                }
            }
            return Indecomposability::Unknown("an endomorphism is not unipotent up to scalars".into());
        }
        radical.push(r);
    }
    // V = span of the a − λ: closed under products and nilpotent
    let flat: Vec<SparseVec> = radical.iter().map(|r| flatten(r, m)).collect();
    let v = Subspace::spanned_by(field, len, &flat);
    let gens: Vec<GradedMap> = v
        .basis()
        .iter()
        .map(|b| {
            // recover the map from the spanning set
            let coords = solve_in_span(&flat, b, field);
            let mut acc = GradedMap::zero(m, m, 0);
            for (i, x) in coords.iter() {
                acc = acc.add(&radical[*i].scale(x));
            }
            acc
        })
        .collect();
    for x in &gens {
        for y in &gens {
            if !v.contains(&flatten(&x.compose(y), m)) {
                return Indecomposability::Unknown("nilpotent part is not closed under products".into());
            }
        }
    }
    let mut power = gens.clone();
    for _ in 0..=m.total_dim() {
        if power.iter().all(|p| p.is_zero()) {
            return Indecomposability::Local;
        }
        let next: Vec<GradedMap> = power.iter().flat_map(|p| gens.iter().map(move |g| p.compose(g))).collect();
        let flat_next: Vec<SparseVec> = next.iter().map(|p| flatten(p, m)).collect();
        let span = Subspace::spanned_by(field, len, &flat_next);
        power = span
            .basis()
            .iter()
            .map(|b| {
                let coords = solve_in_span(&flat_next, b, field);
                let mut acc = GradedMap::zero(m, m, 0);
                for (i, x) in coords.iter() {
                    acc = acc.add(&next[*i].scale(x));
                }
                acc
            })
            .collect();
    }
    Indecomposability::Unknown("nilpotent part does not vanish in bounded powers".into())
}

fn solve_in_span(vectors: &[SparseVec], target: &SparseVec, field: crate::field::Field) -> SparseVec {
    let rows = vectors.iter().filter_map(|v| v.max_index()).max().unwrap_or(0) + 1;
    let rows = rows.max(target.max_index().map_or(0, |i| i + 1));
    Matrix::from_columns(field, rows, vectors)
        .solve_vec(target)
        .expect("vector lies in the span")
}

fn require_complete(alg: &GradedAlgebra) -> Result<()> {
    if alg.is_complete() {
        Ok(())
    } else {
        Err(Error::PreconditionFailed("the algebra must be finite dimensional".into()))
    }
}

/// Indecomposable projectives `e_vR(−d)` that are direct summands of `X`.
pub fn projective_summands(x: &GradedModule) -> Result<Vec<(usize, i32)>> {
    let alg = x.algebra();
    require_complete(alg)?;
    let mut found = Vec::new();
    if x.is_zero() {
        return Ok(found);
    }
    for d in x.lo()..=x.hi() {
        let mut verts: Vec<usize> = x.degree_vertices(d).to_vec();
        verts.sort_unstable();
        verts.dedup();
        for v in verts {
            let p = FreeModule::new(alg.clone(), &[(v, d)]).module;
            let into = hom_space(&p, x, 0);
            if into.is_empty() {
                continue;
            }
            let out = hom_space(x, &p, 0);
            if into.iter().any(|g| out.iter().any(|f| !f.compose(g).is_zero())) {
                found.push((v, d));
            }
        }
    }
    Ok(found)
}

pub fn has_projective_summand(x: &GradedModule) -> Result<bool> {
    Ok(!projective_summands(x)?.is_empty())
}

fn socle_vertices(m: &GradedModule) -> Vec<usize> {
    let field = m.field();
    let ng = m.algebra().num_generators();
    let mut out = Vec::new();
    for d in m.lo()..=m.hi() {
        let verts = m.degree_vertices(d);
        let mut distinct = verts.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        for v in distinct {
            let cols: Vec<usize> = (0..verts.len()).filter(|&i| verts[i] == v).collect();
            let mut rows = Vec::new();
            for g in 0..ng {
                let a = m.action(d, g);
                for r in 0..a.rows() {
                    let row = a.row(r);
                    let pairs: Vec<(usize, Scalar)> = cols
                        .iter()
                        .enumerate()
                        .filter_map(|(p, &c)| row.get(c).map(|x| (p, x.clone())))
                        .collect();
                    rows.push(SparseVec::from_pairs(pairs));
                }
            }
            let k = cols.len() - Matrix::from_rows(field, cols.len(), rows).rank();
            out.extend(std::iter::repeat_n(v, k));
        }
    }
    out
}

fn socle_permutation(alg: &std::sync::Arc<GradedAlgebra>) -> Option<Vec<usize>> {
    let n = alg.num_vertices();
    let mut perm = Vec::with_capacity(n);
    for v in 0..n {
        let p = FreeModule::new(alg.clone(), &[(v, 0)]).module;
        let soc = socle_vertices(&p);
        if soc.len() != 1 {
            return None;
        }
        perm.push(soc[0]);
    }
    let mut seen = perm.clone();
    seen.sort_unstable();
    seen.dedup();
    (seen.len() == n).then_some(perm)
}

/// Every indecomposable projective on either side has a simple socle and the
/// socles permute the vertices.
pub fn is_selfinjective(alg: &std::sync::Arc<GradedAlgebra>) -> Result<bool> {
    require_complete(alg)?;
    let op = std::sync::Arc::new(alg.opposite());
    Ok(socle_permutation(alg).is_some() && socle_permutation(&op).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum PeriodicityVerdict {
    Periodic { period: usize },
    EventuallyPeriodic { onset: usize, period: usize },
    NotDetected { window: usize },
    Unknown { reason: String },
}

impl PeriodicityVerdict {
    pub fn detected(&self) -> bool {
        matches!(self, PeriodicityVerdict::Periodic { .. } | PeriodicityVerdict::EventuallyPeriodic { .. })
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            PeriodicityVerdict::Periodic { period } | PeriodicityVerdict::EventuallyPeriodic { period, .. } => Some(*period),
            _ => None,
        }
    }

    fn from_hit(onset: usize, period: usize) -> Self {
        if onset == 0 {
            PeriodicityVerdict::Periodic { period }
        } else {
            PeriodicityVerdict::EventuallyPeriodic { onset, period }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicityReport {
    pub verdict: PeriodicityVerdict,
    /// `Ω^{a+n}M ≅ Ω^aM(−n)` searched directly.
    pub direct: PeriodicityVerdict,
    /// Consecutive isomorphic liftings of a diagonal class.
    pub delta: PeriodicityVerdict,
    pub agree: bool,
    pub indecomposable: Indecomposability,
    pub linear: bool,
    pub betti: Vec<usize>,
    pub window: usize,
}

/// `Ω^{a+n}M ≅ Ω^aM(−n)` for the least `n ≤ n_max`, then the least onset, with
/// `a + n ≤ window`.
pub fn direct_periodicity(res: &Resolution, n_max: usize, window: usize) -> Result<PeriodicityVerdict> {
    let mut unknown = false;
    for n in 1..=n_max.min(window) {
        for a in 0..=window - n {
            let top = res.syzygy(a + n)?;
            let base = res.syzygy(a)?.shift(-(n as i32));
            if base.is_zero() {
                continue;
            }
            match is_isomorphic_graded(top, &base) {
                IsoVerdict::Iso(_) => return Ok(PeriodicityVerdict::from_hit(a, n)),
                IsoVerdict::Unknown => unknown = true,
                IsoVerdict::NotIso => {}
            }
        }
    }
    Ok(if unknown {
        PeriodicityVerdict::Unknown {
            reason: "an isomorphism test was inconclusive".into(),
        }
    } else {
        PeriodicityVerdict::NotDetected { window }
    })
}

/// Basis classes of `Δ^n` followed by seeded random combinations.
pub fn delta_candidates(ext: &ExtAlgebra, n: usize, rng: &mut ChaCha8Rng) -> Vec<ExtClass> {
    let b = (n, -(n as i32));
    let dim = ext.dim(b);
    let mut out = ext.basis(b);
    if dim > 1 {
        let field = ext.module().field();
        for _ in 0..RANDOM_COMBINATIONS {
            let coords = SparseVec::from_pairs((0..dim).map(|i| (i, field.from_i64(rng.gen_range(-3..=3)))).collect());
            if !coords.is_zero() {
                out.push(ext.class(b, &coords));
            }
        }
    }
    out
}

/// Least `(n, t)` such that some class in `Δ^n` has isomorphic liftings at
/// stages `t` and `t + 1`.
pub fn delta_periodicity(ext: &ExtAlgebra, n_max: usize, window: usize) -> Result<PeriodicityVerdict> {
    let res = ext.resolution();
    let mut rng = ChaCha8Rng::seed_from_u64(DELTA_SEED);
    for n in 1..=n_max.min(ext.n_max()).min(window) {
        let steps = window - n + 1;
        let mut best: Option<usize> = None;
        for eta in delta_candidates(ext, n, &mut rng) {
            let chain = lift_chain(res, res, &eta, steps, None)?;
            let mut prev = false;
            for t in 0..steps {
                let iso = split_lift(res, res, &chain, t)?.iso;
                if iso && prev {
                    best = Some(best.map_or(t - 1, |b| b.min(t - 1)));
                    break;
                }
                prev = iso;
            }
        }
        if let Some(t) = best {
            return Ok(PeriodicityVerdict::from_hit(t, n));
        }
    }
    Ok(PeriodicityVerdict::NotDetected { window })
}

/// Runs both strategies and reports whether they agree.
pub fn detect_periodicity(m: &GradedModule, n_max: usize, window: usize) -> Result<PeriodicityReport> {
    if n_max == 0 || window == 0 {
        return Err(Error::PreconditionFailed("n_max and window must be positive".into()));
    }
    let res = Resolution::compute(m, window + 1)?;
    let linear = res.is_linear_up_to(window).linear;
    let indecomposable = is_indecomposable(m);
    let betti = (0..=window).map(|k| res.betti(k)).collect();
    let direct = direct_periodicity(&res, n_max, window)?;
    let delta = if linear {
        let ext = ExtAlgebra::from_resolution(res, n_max.min(window))?;
        delta_periodicity(&ext, n_max, window)?
    } else {
        PeriodicityVerdict::Unknown {
            reason: "module is not linear".into(),
        }
    };
    let agree = match (&direct, &delta) {
        (PeriodicityVerdict::Unknown { .. }, _) | (_, PeriodicityVerdict::Unknown { .. }) => true,
        (a, b) => a.detected() == b.detected() && a.period() == b.period(),
    };
    let verdict = if indecomposable != Indecomposability::Local {
        PeriodicityVerdict::Unknown {
            reason: "module is not certified indecomposable".into(),
        }
    } else {
        match &direct {
            PeriodicityVerdict::Unknown { .. } => delta.clone(),
            d => d.clone(),
        }
    };
    Ok(PeriodicityReport {
        verdict,
        direct,
        delta,
        agree,
        indecomposable,
        linear,
        betti,
        window,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Cx1Report {
    /// Least `n > 0` with `Δ^n ≠ 0`.
    pub delta_nonzero_at: Option<usize>,
    pub periodicity: PeriodicityVerdict,
    pub agree: bool,
}

/// For all Betti numbers 1: `Δ^n ≠ 0` for some `n > 0` iff eventually periodic.
pub fn cx1_criterion(m: &GradedModule, n_max: usize, window: usize) -> Result<Cx1Report> {
    let res = Resolution::compute(m, window.max(n_max) + 1)?;
    let profile = res.betti_profile(window.max(n_max));
    if !profile.all_ones {
        return Err(Error::PreconditionFailed(format!("Betti numbers {:?} are not all 1", profile.betti)));
    }
    let ext = ExtAlgebra::from_resolution(res, n_max)?;
    let delta_nonzero_at = (1..=n_max).find(|&n| ext.dim((n, -(n as i32))) > 0);
    let periodicity = detect_periodicity(m, n_max, window)?.verdict;
    Ok(Cx1Report {
        agree: delta_nonzero_at.is_some() == periodicity.detected(),
        delta_nonzero_at,
        periodicity,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Betti1Report {
    pub verdict: PeriodicityVerdict,
    /// Stage `i − n` whose lifting is forced to be a monomorphism.
    pub mono_stage: Option<usize>,
    pub selfinjective: bool,
}

/// `β_i(M) = 1` and a class in `Δ^n`, `n < i`, with nonzero liftings.
pub fn betti1_shortcut(m: &GradedModule, i: usize, n: usize, window: usize) -> Result<Betti1Report> {
    if n == 0 || n >= i {
        return Err(Error::PreconditionFailed(format!("need 1 ≤ n < i, got n = {n}, i = {i}")));
    }
    let window = window.max(i + n);
    let res = Resolution::compute(m, window + 1)?;
    if res.betti(i) != 1 {
        return Err(Error::PreconditionFailed(format!("β_{i} = {}", res.betti(i))));
    }
    if !res.is_linear_up_to(window).linear {
        return Err(Error::PreconditionFailed("module is not linear".into()));
    }
    let selfinjective = m.algebra().is_complete() && is_selfinjective(m.algebra())?;
    let ext = ExtAlgebra::from_resolution(res, n)?;
    let res = ext.resolution();
    let mut rng = ChaCha8Rng::seed_from_u64(DELTA_SEED);
    let steps = window - n + 1;
    for eta in delta_candidates(&ext, n, &mut rng) {
        let chain = lift_chain(res, res, &eta, steps, None)?;
        let hyp = Hypotheses {
            mono: is_indecomposable(m) == Indecomposability::Local,
            epi: false,
        };
        let flags = chain_flags(res, res, &chain, hyp)?;
        if !flags.stages.iter().all(|s| s.nonzero) {
            continue;
        }
        let s = i - n;
        if flags.stages[s].mono() != Some(true) {
            return Err(Error::VerificationFailed {
                degree: s,
                message: "nonzero lifting out of a rank one projective is not a monomorphism".into(),
            });
        }
        // locate the period the certificate promises
        let verdict = if selfinjective {
            let divisors: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
            let mut found = None;
            for d in divisors {
                let top = res.syzygy(d)?;
                if is_isomorphic_graded(top, &m.shift(-(d as i32))).is_iso() {
                    found = Some(d);
                    break;
                }
            }
            match found {
                Some(d) => PeriodicityVerdict::Periodic { period: d },
                None => {
                    return Err(Error::VerificationFailed {
                        degree: n,
                        message: "no period dividing n was found".into(),
                    })
                }
            }
        } else {
            match direct_periodicity(res, n, window)? {
                v @ (PeriodicityVerdict::Periodic { .. } | PeriodicityVerdict::EventuallyPeriodic { .. }) => v,
                _ => PeriodicityVerdict::Unknown {
                    reason: format!("eventually periodic, onset beyond window {window}"),
                },
            }
        };
        return Ok(Betti1Report {
            verdict,
            mono_stage: Some(s),
            selfinjective,
        });
    }
    Ok(Betti1Report {
        verdict: PeriodicityVerdict::NotDetected { window },
        mono_stage: None,
        selfinjective,
    })
}

/// Certificate that `β_{m−i}(N) = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct BettiCertificate {
    pub eta: (usize, i32),
    pub theta: (usize, i32),
    /// Stages `0..=n` whose liftings of `η` are epimorphisms.
    pub epi_stages: Vec<usize>,
    pub conclusion: usize,
    pub betti: usize,
}

/// Checks the hypotheses on `M, N, L` and the conclusion `β_{m−i}(N) = 1`.
#[allow(clippy::too_many_arguments)]
pub fn compare_betti(
    m: &GradedModule,
    n_mod: &GradedModule,
    l: &GradedModule,
    i: usize,
    n: usize,
    mm: usize,
    window: usize,
) -> Result<BettiCertificate> {
    let fail = |which: &str| Error::HypothesisFailed(which.to_string());
    if n == 0 {
        return Err(fail("(ii): n must be at least 1"));
    }
    if !(i <= mm && mm < n + i) {
        return Err(fail("(iii): need i ≤ m < n + i"));
    }
    let top = window.max(mm + 1).max(n + i + 1);
    let res_m = Resolution::compute(m, top)?;
    let res_n = Resolution::compute(n_mod, top)?;
    let res_l = Resolution::compute(l, 0)?;
    for (name, r) in [("M", &res_m), ("N", &res_n)] {
        if !r.is_linear_up_to(top).linear {
            return Err(fail(&format!("{name} is not linear")));
        }
    }
    if !res_l.is_linear_up_to(0).linear {
        return Err(fail("L is not linear"));
    }
    for k in 0..=top {
        if has_projective_summand(res_n.syzygy(k)?)? {
            return Err(fail(&format!("(i): syzygy {k} of N has a projective summand")));
        }
    }
    if res_m.betti(mm) != 1 || res_n.betti(n) != 1 {
        return Err(fail(&format!(
            "(iii): β_{mm}(M) = {}, β_{n}(N) = {}",
            res_m.betti(mm),
            res_n.betti(n)
        )));
    }
    let etas = ext_group(&res_m, n_mod, i, -(i as i32))?.basis();
    let thetas: Vec<ExtClass> = crate::extalg::ext_degrees(&res_n, l, n)
        .into_iter()
        .map(|d| ext_group(&res_n, l, n, d).map(|g| g.basis()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    for eta in &etas {
        for theta in &thetas {
            let p = yoneda(&res_m, eta, &res_n, theta, l)?;
            let group = ext_group(&res_m, l, p.n, p.degree)?;
            let nonzero = group.coordinates(&p).is_some_and(|c| !c.is_zero());
            if !nonzero {
                continue;
            }
            let chain = lift_chain(&res_m, &res_n, eta, n + 1, None)?;
            let hyp = Hypotheses { mono: false, epi: true };
            let flags = chain_flags(&res_m, &res_n, &chain, hyp)?;
            if flags.stages[n].epi() != Some(true) {
                return Err(Error::VerificationFailed {
                    degree: n,
                    message: "lifting into a rank one projective is not onto".into(),
                });
            }
            let epi_stages: Vec<usize> = flags.stages.iter().filter(|s| s.epi() == Some(true)).map(|s| s.stage).collect();
            let conclusion = mm - i;
            let betti = res_n.betti(conclusion);
            if betti != 1 {
                return Err(Error::VerificationFailed {
                    degree: conclusion,
                    message: format!("β_{conclusion}(N) = {betti}"),
                });
            }
            return Ok(BettiCertificate {
                eta: eta.bidegree(),
                theta: theta.bidegree(),
                epi_stages,
                conclusion,
                betti,
            });
        }
    }
    Err(fail("(ii): no product θη is nonzero"))
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleReport {
    pub vertex: String,
    pub betti: Vec<usize>,
    /// Least `n ≥ 1` with `Ω^nS` simple, and the vertex of that simple.
    pub simple_syzygy: Option<(usize, String)>,
    pub period: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleSyzygyReport {
    pub simples: Vec<SimpleReport>,
    pub common_period: Option<usize>,
    pub selfinjective: bool,
    pub koszul_to_window: bool,
    /// One arrow out of and into each vertex, forming one cycle, and `R_2 = 0`.
    pub cyclic_radical_square_zero: bool,
    pub vertex_count: usize,
    /// The literal reading `m = vertex count − 1` of the cycle's index differs
    /// from the computed period.
    pub period_differs_from_index: bool,
    pub window: usize,
}

fn is_connected(alg: &GradedAlgebra) -> bool {
    let n = alg.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for b in 0..alg.dim(1) {
        let (s, t) = (find(&mut parent, alg.source(1, b)), find(&mut parent, alg.target(1, b)));
        parent[s] = t;
    }
    let roots: std::collections::BTreeSet<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    roots.len() <= 1
}

fn is_cyclic_j2(alg: &GradedAlgebra) -> bool {
    let n = alg.num_vertices();
    let mut out = vec![0; n];
    let mut inc = vec![0; n];
    for b in 0..alg.dim(1) {
        out[alg.source(1, b)] += 1;
        inc[alg.target(1, b)] += 1;
    }
    out.iter().all(|&c| c == 1) && inc.iter().all(|&c| c == 1) && is_connected(alg) && alg.dim(2) == 0
}

/// Simple syzygies and periods of all simples over a window.
pub fn simple_syzygy_analysis(alg: &std::sync::Arc<GradedAlgebra>, window: usize) -> Result<SimpleSyzygyReport> {
    let fail = |s: String| Error::HypothesisFailed(s);
    require_complete(alg)?;
    if !is_connected(alg) {
        return Err(fail("the algebra is decomposable".into()));
    }
    let labels = alg.vertex_labels();
    let mut simples = Vec::new();
    for v in 0..alg.num_vertices() {
        let s = GradedModule::simple(alg.clone(), v);
        let res = Resolution::compute(&s, window)?;
        let betti: Vec<usize> = (0..=window).map(|k| res.betti(k)).collect();
        if betti.contains(&0) {
            return Err(fail(format!("simple {} has finite projective dimension within the window", labels[v])));
        }
        for k in 0..=window {
            if has_projective_summand(res.syzygy(k)?)? {
                return Err(fail(format!("syzygy {k} of simple {} has a projective summand", labels[v])));
            }
        }
        if betti.iter().filter(|&&b| b == 1).count() < 2 {
            return Err(fail(format!("Betti number 1 occurs fewer than twice for simple {}", labels[v])));
        }
        let mut simple_syzygy = None;
        let mut period = None;
        for n in 1..=window {
            let om = res.syzygy(n)?;
            if om.total_dim() == 1 && simple_syzygy.is_none() {
                let w = om.degree_vertices(om.lo())[0];
                simple_syzygy = Some((n, labels[w].clone()));
            }
            if period.is_none() && is_isomorphic_graded(om, &s.shift(-(n as i32))).is_iso() {
                period = Some(n);
            }
        }
        simples.push(SimpleReport {
            vertex: labels[v].clone(),
            betti,
            simple_syzygy,
            period,
        });
    }
    let periods: Vec<Option<usize>> = simples.iter().map(|s| s.period).collect();
    let common_period = match periods.first() {
        Some(Some(p)) if periods.iter().all(|q| *q == Some(*p)) => Some(*p),
        _ => None,
    };
    let selfinjective = is_selfinjective(alg)?;
    let koszul_to_window = crate::resolution::koszul_witness(alg, window)?.linear;
    let cyclic = is_cyclic_j2(alg);
    let all_periodic = periods.iter().all(|p| p.is_some());
    if selfinjective && koszul_to_window && all_periodic {
        if let Some(bad) = simples.iter().find(|s| s.betti.iter().any(|&b| b != 1)) {
            return Err(Error::VerificationFailed {
                degree: bad.betti.iter().position(|&b| b != 1).unwrap_or(0),
                message: format!("periodic simple {} over a selfinjective Koszul algebra has a Betti number other than 1", bad.vertex),
            });
        }
        if !cyclic {
            return Err(Error::VerificationFailed {
                degree: 1,
                message: "selfinjective Koszul algebra with periodic simples is not a cycle modulo J²".into(),
            });
        }
    }
    let vertex_count = alg.num_vertices();
    Ok(SimpleSyzygyReport {
        period_differs_from_index: common_period.is_some_and(|p| p + 1 != vertex_count),
        simples,
        common_period,
        selfinjective,
        koszul_to_window,
        cyclic_radical_square_zero: cyclic,
        vertex_count,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{parse_algebra, parse_module};
    use std::sync::Arc;

    const QUANTUM: &str = "field Q\nunit q = 2\nvertex 1\narrow x: 1 -> 1\narrow y: 1 -> 1\nrelation x*y - q*y*x\nrelation x*x\nrelation y*y\n";

    fn algebra(src: &str) -> (crate::presentation::AlgebraPresentation, Arc<GradedAlgebra>) {
        let p = parse_algebra(src).unwrap();
        let a = Arc::new(GradedAlgebra::from_presentation(&p).unwrap());
        (p, a)
    }

    fn module(src: &str, m: &str) -> GradedModule {
        let (p, a) = algebra(src);
        GradedModule::from_presentation(&parse_module(m, &p).unwrap(), a).unwrap()
    }

    fn cycle(n: usize) -> String {
        let mut s = String::from("field Q\nvertex");
        for v in 1..=n {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
        for v in 1..=n {
            s.push_str(&format!("arrow a{v}: {v} -> {}\n", v % n + 1));
        }
        for v in 1..=n {
            s.push_str(&format!("relation a{v}*a{}\n", v % n + 1));
        }
        s
    }

    fn entry(c: i64) -> Option<Entry> {
        Some(Entry {
            degree: 0,
            coords: SparseVec::unit(0, crate::field::Field::Rationals).scale(&crate::field::Field::Rationals.from_i64(c)),
        })
    }

    #[test]
    fn split_of_identity_and_rank_one() {
        let f = crate::field::Field::Rationals;
        let s = [(0, 0), (0, 0)];
        let id = vec![vec![entry(1), None], vec![None, entry(1)]];
        let r = split_r0_map(&s, &s, &id, 0, f).unwrap();
        assert!(r.iso);
        let low = vec![vec![None, None], vec![entry(1), None]];
        let r = split_r0_map(&s, &s, &low, 0, f).unwrap();
        assert_eq!((r.kernel_rank(), r.image_rank(), r.cokernel_rank()), (1, 1, 1));
        assert!(!r.mono && !r.epi);
        let zero = vec![vec![None, None], vec![None, None]];
        let r = split_r0_map(&s, &s, &zero, 0, f).unwrap();
        assert_eq!((r.kernel_rank(), r.image_rank()), (2, 0));
        let rad = vec![vec![Some(Entry { degree: 1, coords: SparseVec::unit(0, f) })]];
        assert!(matches!(split_r0_map(&[(0, 0)], &[(0, 1)], &rad, 1, f), Err(Error::EntriesNotInR0)));
    }

    #[test]
    fn string_module_is_local_and_periodic() {
        let m = module(QUANTUM, "module cokernel [[-y, 0], [x, q*y]]");
        assert_eq!(is_indecomposable(&m), Indecomposability::Local);
        let r = detect_periodicity(&m, 3, 4).unwrap();
        assert_eq!(r.verdict, PeriodicityVerdict::Periodic { period: 1 });
        assert!(r.agree);
    }

    #[test]
    fn decomposable_sum_is_detected() {
        let (_, a) = algebra(QUANTUM);
        let s = GradedModule::simple(a.clone(), 0);
        let sum = GradedModule::direct_sum(&[&s, &s]).unwrap();
        assert_eq!(is_indecomposable(&sum), Indecomposability::Decomposable);
    }

    #[test]
    fn regular_module_is_projective_summand() {
        let (_, a) = algebra(QUANTUM);
        let r = FreeModule::new(a.clone(), &[(0, 0)]).module;
        assert_eq!(projective_summands(&r).unwrap(), vec![(0, 0)]);
        let s = GradedModule::simple(a.clone(), 0);
        assert!(!has_projective_summand(&s).unwrap());
        assert!(is_selfinjective(&a).unwrap());
    }

    #[test]
    fn path_algebra_is_not_selfinjective() {
        let (_, a) = algebra("field Q\nvertex 1 2\narrow a: 1 -> 2\n");
        assert!(!is_selfinjective(&a).unwrap());
    }

    #[test]
    fn cyclic_family_periods() {
        let generic = module(QUANTUM, "module cokernel [[x + y]]");
        let r = detect_periodicity(&generic, 4, 6).unwrap();
        assert_eq!(r.verdict, PeriodicityVerdict::NotDetected { window: 6 });
        let minus = module(&QUANTUM.replace("q = 2", "q = -1"), "module cokernel [[x + y]]");
        let r = detect_periodicity(&minus, 4, 6).unwrap();
        assert_eq!(r.verdict, PeriodicityVerdict::Periodic { period: 1 });
        let gf5 = module(&QUANTUM.replace("field Q", "field GF(5)"), "module cokernel [[x + y]]");
        let r = detect_periodicity(&gf5, 6, 8).unwrap();
        assert_eq!(r.verdict, PeriodicityVerdict::Periodic { period: 4 });
        assert!(r.agree);
        let c = cx1_criterion(&gf5, 6, 8).unwrap();
        assert_eq!(c.delta_nonzero_at, Some(4));
        assert!(c.agree);
    }

    #[test]
    fn cx1_rejects_betti_two() {
        let m = module(QUANTUM, "module cokernel [[-y, 0], [x, q*y]]");
        assert!(matches!(cx1_criterion(&m, 3, 3), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn simples_over_cycles() {
        for n in 2..=4 {
            let (_, a) = algebra(&cycle(n));
            let r = simple_syzygy_analysis(&a, 8).unwrap();
            assert_eq!(r.common_period, Some(n));
            assert!(r.cyclic_radical_square_zero && r.selfinjective);
            for s in &r.simples {
                assert!(s.betti.iter().all(|&b| b == 1));
                assert_eq!(s.simple_syzygy.as_ref().map(|x| x.0), Some(1));
            }
        }
    }

    #[test]
    fn quantum_simple_fails_betti_hypothesis() {
        let (_, a) = algebra(QUANTUM);
        assert!(matches!(simple_syzygy_analysis(&a, 4), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn betti_comparison_on_cycle() {
        let (_, a) = algebra(&cycle(3));
        let s = GradedModule::simple(a.clone(), 0);
        let cert = compare_betti(&s, &s, &s, 0, 3, 1, 6).unwrap();
        assert_eq!(cert.betti, 1);
        let t = GradedModule::simple(a.clone(), 1);
        assert!(matches!(compare_betti(&s, &s, &t, 0, 3, 1, 6), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn mono_propagates_on_string_module() {
        let m = module(QUANTUM, "module cokernel [[-y, 0], [x, q*y]]");
        let ext = ExtAlgebra::new(&m, 1).unwrap();
        let res = ext.resolution();
        for eta in ext.basis((1, -1)) {
            let chain = lift_chain(res, res, &eta, 1, None).unwrap();
            let flags = chain_flags(res, res, &chain, Hypotheses { mono: true, epi: false }).unwrap();
            assert_eq!(flags.stages.len(), 1);
        }
    }
}
