//! Acceptance criteria 1 to 11, one line each.
//!
//! Run with `cargo test -p koszul-ext --test acceptance -- --nocapture` to see
//! the report.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use koszul_ext::extalg::{
    decompose, diagonal_subalgebra, ext_degrees, ext_dim_via_syzygy, ext_group, nilpotency_survey, Element, ExtAlgebra, ExtClass,
};
use koszul_ext::gmodule::{is_isomorphic_graded, GradedModule, IsoVerdict};
use koszul_ext::hochschild::{graded_center, verify_gr_cent};
use koszul_ext::periodicity::{
    chain_flags, cx1_criterion, detect_periodicity, has_projective_summand, is_indecomposable, simple_syzygy_analysis, Hypotheses,
    Indecomposability, PeriodicityVerdict,
};
use koszul_ext::presentation::{parse_algebra, parse_module, AlgebraPresentation};
use koszul_ext::resolution::Resolution;
use koszul_ext::{GradedAlgebra, Matrix, Scalar, SparseVec};

type Check = Result<String, String>;

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn algebra(file: &str) -> (AlgebraPresentation, Arc<GradedAlgebra>) {
    let p = parse_algebra(&corpus(file)).expect("corpus algebra parses");
    let a = Arc::new(GradedAlgebra::from_presentation(&p).expect("corpus algebra materializes"));
    (p, a)
}

fn module(alg: &str, file: &str) -> GradedModule {
    let (p, a) = algebra(alg);
    GradedModule::from_presentation(&parse_module(&corpus(file), &p).expect("corpus module parses"), a).expect("corpus module builds")
}

/// Every (algebra, module) pair in the corpus.
fn corpus_modules() -> Vec<(String, GradedModule)> {
    [
        ("quantum_string.alg", "string.mod"),
        ("quantum_xy.alg", "cyc.mod"),
        ("quantum_xy_neg.alg", "cyc.mod"),
        ("quantum_xy_gf5.alg", "cyc.mod"),
        ("quantum_local.alg", "period_one.mod"),
        ("kx2.alg", "simple1.mod"),
        ("cycle2.alg", "simple1.mod"),
        ("cycle3.alg", "simple1.mod"),
        ("cycle4.alg", "simple1.mod"),
    ]
    .iter()
    .map(|(a, m)| (format!("{a}/{m}"), module(a, m)))
    .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The displayed differential of the string module, row `i` and column `j`
/// holding coordinates in `R_1`.
fn string_matrix(a: &GradedAlgebra, q: &Scalar) -> [[SparseVec; 2]; 2] {
    let field = a.field();
    let x = a.path_coordinates(&[0]);
    let y = a.path_coordinates(&[1]);
    [[y.scale(&-field.one()), SparseVec::new()], [x, y.scale(q)]]
}

/// Matrices `B_n` expressing the displayed generators of `P^n` in the computed
/// ones (column `j` holds the coordinates of displayed generator `j`), found by
/// matching the displayed differential against the computed one degree by
/// degree. Fails if some `B_n` does not exist or is singular.
fn string_bases(res: &Resolution, q: &Scalar, n_max: usize) -> Result<Vec<Matrix>, String> {
    let m = res.module();
    let a = m.algebra();
    let field = m.field();
    let d = string_matrix(a, q);
    let eps = Matrix::from_columns(field, m.dim(0), res.images(0));
    let b0 = eps.inverse().ok_or("augmentation is not a basis of M_0")?;
    let mut bases = vec![b0];
    for n in 1..=n_max {
        let below = res.free(n - 1);
        ensure(res.generator_degrees(n) == vec![n as i32; 2], || format!("P^{n} is not R^2(-{n})"))?;
        let width = below.module.dim(n as i32);
        let prev = &bases[n - 1];
        let mut displayed = Vec::new();
        for j in 0..2 {
            let mut col = SparseVec::new();
            for (i, row) in d.iter().enumerate() {
                for k in 0..2 {
                    let c = prev.get(k, i);
                    if c.is_zero() || row[j].is_zero() {
                        continue;
                    }
                    col = col.add_scaled(&c, &below.element(k, 1, &row[j]).map_err(err)?);
                }
            }
            displayed.push(col);
        }
        let ours = Matrix::from_columns(field, width, res.images(n));
        let target = Matrix::from_columns(field, width, &displayed);
        let b = ours
            .solve(&target)
            .map_err(err)?
            .ok_or_else(|| format!("d^{n} differs from the displayed matrix beyond a change of basis"))?;
        ensure(b.is_invertible(), || format!("change of basis for P^{n} is singular"))?;
        bases.push(b);
    }
    Ok(bases)
}

fn criterion_1() -> Check {
    let m = module("quantum_string.alg", "string.mod");
    let field = m.field();
    let q = field.from_i64(2);
    let res = Resolution::compute(&m, 6).map_err(err)?;
    string_bases(&res, &q, 5)?;
    let betti: Vec<usize> = (0..=5).map(|n| res.betti(n)).collect();
    ensure(betti == vec![2; 6], || format!("Betti numbers {betti:?}"))?;
    for n in 1..=3 {
        let omega = res.syzygy(n).map_err(err)?;
        ensure(matches!(is_isomorphic_graded(omega, &m.shift(-(n as i32))), IsoVerdict::Iso(_)), || {
            format!("Omega^{n} M is not M(-{n})")
        })?;
    }
    Ok(format!("d^1..d^5 match the displayed matrix up to basis, betti {betti:?}, Omega^n M = M(-n) for n <= 3"))
}

/// `η` on the computed generators of `P^1`: the displayed first generator goes
/// to `t_2`, the second to zero.
fn string_eta(b1: &Matrix) -> Result<ExtClass, String> {
    let inv = b1.inverse().ok_or("singular basis change")?;
    let images = (0..2)
        .map(|k| {
            let c = inv.get(0, k);
            if c.is_zero() {
                SparseVec::new()
            } else {
                SparseVec::from_pairs(vec![(1, c)])
            }
        })
        .collect();
    Ok(ExtClass {
        n: 1,
        degree: -1,
        images,
    })
}

fn criterion_2() -> Check {
    let m = module("quantum_string.alg", "string.mod");
    let field = m.field();
    let q = field.from_i64(2);
    let ext = ExtAlgebra::new(&m, 4).map_err(err)?;
    let res = ext.resolution();
    let bases = string_bases(res, &q, 4)?;
    let eta = string_eta(&bases[1])?;
    let coords = ext.coordinates(&eta).map_err(err)?;
    ensure(!coords.is_zero(), || "eta is zero".into())?;
    let square = ext.coordinates(&ext.product(&eta, &eta).map_err(err)?).map_err(err)?;
    ensure(square.is_zero(), || "eta^2 is not zero".into())?;
    let chain = ext.lift_chain(&eta, 4, None).map_err(err)?;
    let minus_inv_q = -(&field.one() / &q);
    let mut exact = true;
    for t in 0..4 {
        let ours = chain.scalar_matrix(res, res, t).map_err(err)?;
        let displayed = bases[t]
            .inverse()
            .expect("invertible")
            .mul(&ours)
            .and_then(|x| x.mul(&bases[t + 1]))
            .map_err(err)?;
        let mut expected = Matrix::zeros(field, 2, 2);
        expected.set(1, 0, minus_inv_q.pow(t as i64));
        let pattern = |x: &Matrix| (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| x.get(i, j).is_zero()).collect::<Vec<_>>();
        ensure(pattern(&displayed) == pattern(&expected) && displayed.rank() == 1, || {
            format!("l^{t} has the wrong shape: {displayed:?}")
        })?;
        exact &= displayed == expected;
    }
    Ok(format!(
        "eta != 0, eta^2 = 0, l^0..l^3 have the displayed rank pattern, entries (-1/q)^t {}",
        if exact { "exactly" } else { "up to scaling" }
    ))
}

fn criterion_3() -> Check {
    let m = module("quantum_string.alg", "string.mod");
    let ext = ExtAlgebra::new(&m, 5).map_err(err)?;
    let s = nilpotency_survey(&ext, 50, 3).map_err(err)?;
    ensure(s.graded_length == 2, || format!("graded length {}", s.graded_length))?;
    ensure(s.nonzero_samples == 50, || format!("only {} nonzero samples", s.nonzero_samples))?;
    ensure(s.within_bound, || "a sample has nonzero cube".into())?;
    Ok(format!("50 samples, x^3 = 0 through degree 5, max index {:?}", s.max_index))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for (name, m) in corpus_modules() {
        let ext = ExtAlgebra::new(&m, 5).map_err(err)?;
        let d = m.graded_length();
        for n in 0..=5usize {
            let delta = ext.dim((n, -(n as i32)));
            let rest: usize = ext.bidegrees().iter().filter(|b| b.0 == n && b.1 != -(n as i32)).map(|&b| ext.dim(b)).sum();
            ensure(ext.total_dim(n) == delta + rest, || format!("{name}: n = {n} does not split"))?;
            for b in ext.bidegrees().into_iter().filter(|b| b.0 == n) {
                ensure(b.1 >= -(n as i32) && b.1 <= -(n as i32) + d, || format!("{name}: slice {b:?} outside the window"))?;
            }
        }
        // a random element is the sum of its two parts
        let mut x = Element::new();
        for b in ext.bidegrees() {
            let coords: Vec<Scalar> = (0..ext.dim(b)).map(|_| m.field().from_i64(rng.gen_range(-2..=2))).collect();
            x.insert(b, SparseVec::from_dense(&coords));
        }
        let (delta, rest) = decompose(&ext, &x).map_err(err)?;
        for (b, v) in &x {
            let back = delta.get(b).or_else(|| rest.get(b)).cloned().unwrap_or_default();
            ensure(&back == v, || format!("{name}: decomposition loses {b:?}"))?;
        }
        count += 1;
    }
    Ok(format!("{count} corpus modules, n <= 5"))
}

fn criterion_5() -> Check {
    let mut groups = 0;
    for (name, m) in corpus_modules() {
        let res = Resolution::compute(&m, 6).map_err(err)?;
        for n in 0..=5 {
            for i in ext_degrees(&res, &m, n) {
                let a = ext_group(&res, &m, n, i).map_err(err)?.dim();
                let b = ext_dim_via_syzygy(&res, &m, n, i).map_err(err)?;
                ensure(a == b, || format!("{name}: Ext^{n}_{i} is {a} by cocycles, {b} by syzygies"))?;
                groups += 1;
            }
        }
    }
    Ok(format!("{groups} graded pieces agree"))
}

fn criterion_6() -> Check {
    let generic = {
        let (_, a) = algebra("quantum_xy.alg");
        let unit = a.field().generic_unit().to_string();
        let p = AlgebraPresentation::with_unit(&corpus("quantum_xy.alg"), "q", &unit).map_err(err)?;
        let a = Arc::new(GradedAlgebra::from_presentation(&p).map_err(err)?);
        GradedModule::from_presentation(&parse_module(&corpus("cyc.mod"), &p).map_err(err)?, a).map_err(err)?
    };
    let ext = ExtAlgebra::new(&generic, 8).map_err(err)?;
    let dims = diagonal_subalgebra(&ext).map_err(err)?.dims;
    let mut expected = vec![0; 9];
    expected[0] = 1;
    ensure(dims == expected, || format!("generic q: diagonal dims {dims:?}"))?;
    let runs = [
        ("generic", generic, PeriodicityVerdict::NotDetected { window: 8 }),
        ("q = -1", module("quantum_xy_neg.alg", "cyc.mod"), PeriodicityVerdict::Periodic { period: 1 }),
        ("GF(5)", module("quantum_xy_gf5.alg", "cyc.mod"), PeriodicityVerdict::Periodic { period: 4 }),
    ];
    let mut seen = Vec::new();
    for (label, m, want) in runs {
        let report = detect_periodicity(&m, 6, 8).map_err(err)?;
        ensure(report.verdict == want, || format!("{label}: {:?}, expected {want:?}", report.verdict))?;
        let cx1 = cx1_criterion(&m, 6, 8).map_err(err)?;
        ensure(cx1.agree, || format!("{label}: cx1 sides disagree"))?;
        seen.push(format!("{label} {:?}", report.verdict));
    }
    Ok(seen.join(", "))
}

fn criterion_7() -> Check {
    let m = module("quantum_local.alg", "period_one.mod");
    let field = m.field();
    let q = field.from_i64(2);
    let ext = ExtAlgebra::new(&m, 7).map_err(err)?;
    ensure(ext.total_dim(0) == 2 && ext.dim((0, 0)) == 1 && ext.dim((0, 1)) == 1, || {
        format!("End(M) has slices {:?}", ext.dims().iter().filter(|(b, _)| b.0 == 0).collect::<Vec<_>>())
    })?;
    ensure(ext.dim((1, -1)) == 1, || format!("dim Ext^1_-1 = {}", ext.dim((1, -1))))?;
    let f = ext.basis((0, 1)).remove(0);
    let mu = ext.basis((1, -1)).remove(0);
    let coords = |c: &ExtClass| ext.coordinates(c).map_err(err);
    let ff = coords(&ext.product(&f, &f).map_err(err)?)?;
    ensure(ff.is_zero(), || "f^2 != 0".into())?;
    let mu_f = coords(&ext.product(&mu, &f).map_err(err)?)?;
    let f_mu = coords(&ext.product(&f, &mu).map_err(err)?)?;
    ensure(!mu_f.is_zero() && !f_mu.is_zero(), || "mu f or f mu vanishes".into())?;
    let relation = if mu_f.add(&f_mu.scale(&q)).is_zero() {
        "mu f + q f mu = 0"
    } else if f_mu.add(&mu_f.scale(&q)).is_zero() {
        "f mu + q mu f = 0 (composition order reversed)"
    } else {
        return Err("neither ordering of mu f + q f mu vanishes".into());
    };
    let center = graded_center(ext.table().map_err(err)?, 6).map_err(err)?;
    ensure(center.dims() == vec![1, 0, 0, 0, 0, 0, 0] && center.slice((0, 0)).len() == 1, || {
        format!("center dims {:?}", center.dims())
    })?;
    Ok(format!("End(M) = <1, f>, f^2 = 0, {relation}, center = k.1 through degree 6"))
}

fn criterion_8() -> Check {
    let mut out = Vec::new();
    for file in ["kx2.alg", "cycle3.alg", "quantum_local.alg"] {
        let (_, a) = algebra(file);
        let report = verify_gr_cent(&a, 4).map_err(|e| format!("{file}: {e}"))?;
        ensure(report.pass, || format!("{file}: failed"))?;
        let dims: Vec<usize> = report.rows.iter().map(|r| r.delta).collect();
        out.push(format!("{file} {dims:?}"));
    }
    Ok(out.join(", "))
}

fn criterion_9() -> Check {
    let mut out = Vec::new();
    for v in 2..=4usize {
        let (_, a) = algebra(&format!("cycle{v}.alg"));
        let r = simple_syzygy_analysis(&a, 8).map_err(err)?;
        for s in &r.simples {
            ensure(s.betti.iter().all(|&b| b == 1), || format!("cycle{v}: simple {} has Betti {:?}", s.vertex, s.betti))?;
            ensure(s.simple_syzygy.is_some(), || format!("cycle{v}: simple {} has no simple syzygy", s.vertex))?;
        }
        ensure(r.common_period == Some(v), || format!("cycle{v}: common period {:?}", r.common_period))?;
        out.push(format!("{v} vertices: period {v}"));
    }
    Ok(out.join(", "))
}

fn random_class(ext: &ExtAlgebra, rng: &mut ChaCha8Rng, max_n: usize) -> Option<ExtClass> {
    let slices: Vec<_> = ext.bidegrees().into_iter().filter(|b| b.0 <= max_n).collect();
    if slices.is_empty() {
        return None;
    }
    let b = slices[rng.gen_range(0..slices.len())];
    let coords: Vec<Scalar> = (0..ext.dim(b)).map(|_| ext.module().field().from_i64(rng.gen_range(-2..=2))).collect();
    Some(ext.class(b, &SparseVec::from_dense(&coords)))
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let modules = corpus_modules();
    let n_max = 4;
    let exts: Vec<ExtAlgebra> = modules.iter().map(|(_, m)| ExtAlgebra::new(m, n_max)).collect::<Result<_, _>>().map_err(err)?;
    for ((name, _), ext) in modules.iter().zip(&exts) {
        let res = ext.resolution();
        ensure(res.is_complex(), || format!("{name}: d^2 != 0"))?;
        ensure(res.is_minimal(), || format!("{name}: not minimal"))?;
        if res.is_linear_up_to(n_max).linear {
            for n in 1..=n_max {
                for row in res.entries(n) {
                    for e in row.iter().flatten() {
                        ensure(e.degree == 1, || format!("{name}: d^{n} has an entry of degree {}", e.degree))?;
                    }
                }
            }
        }
    }
    let (mut triples, mut pairs) = (0, 0);
    while triples < 100 || pairs < 100 {
        let k = rng.gen_range(0..exts.len());
        let ext = &exts[k];
        let name = &modules[k].0;
        let Some(x) = random_class(ext, &mut rng, n_max) else { continue };
        let Some(y) = random_class(ext, &mut rng, n_max - x.n) else { continue };
        let xy = ext.product(&x, &y).map_err(err)?;
        ensure(xy.bidegree() == (x.n + y.n, x.degree + y.degree), || format!("{name}: product bidegree"))?;
        if pairs < 100 {
            let chain = ext.lift_chain(&y, x.n + 1, Some(&mut rng)).map_err(err)?;
            let other = ext.product_with_chain(&x, &chain).map_err(err)?;
            ensure(ext.coordinates(&other).map_err(err)? == ext.coordinates(&xy).map_err(err)?, || {
                format!("{name}: product depends on the lifting")
            })?;
            pairs += 1;
        }
        if triples < 100 && x.n + y.n < n_max {
            let Some(z) = random_class(ext, &mut rng, n_max - x.n - y.n) else { continue };
            let left = ext.product(&xy, &z).map_err(err)?;
            let right = ext.product(&x, &ext.product(&y, &z).map_err(err)?).map_err(err)?;
            ensure(ext.coordinates(&left).map_err(err)? == ext.coordinates(&right).map_err(err)?, || {
                format!("{name}: (xy)z != x(yz)")
            })?;
            triples += 1;
        }
    }
    Ok(format!("{} modules; {triples} associativity triples, {pairs} lifting pairs", modules.len()))
}

fn criterion_11() -> Check {
    let window = 6;
    let top = 3usize;
    let mut chains = 0;
    let mut epi_checked = 0;
    for (name, m) in corpus_modules() {
        let deep = Resolution::compute(&m, top + window + 1).map_err(err)?;
        let linear = deep.is_linear_up_to(top + window).linear;
        let local = is_indecomposable(&m) == Indecomposability::Local;
        let infinite = (0..=window).all(|n| deep.betti(n) > 0);
        let no_projective = m.algebra().is_complete()
            && (0..=window).all(|n| deep.syzygy(n).is_ok_and(|s| has_projective_summand(s).is_ok_and(|p| !p)));
        let ext = ExtAlgebra::from_resolution(deep, top).map_err(err)?;
        let res = ext.resolution();
        let hyp = Hypotheses {
            mono: linear && local,
            epi: linear && local && infinite && no_projective,
        };
        for n in 1..=top {
            for eta in ext.basis((n, -(n as i32))) {
                let chain = ext.lift_chain(&eta, window, None).map_err(err)?;
                let flags = chain_flags(res, res, &chain, hyp).map_err(|e| format!("{name}: {e}"))?;
                let stages = &flags.stages;
                for j in 0..stages.len() {
                    for k in j..stages.len() {
                        if hyp.mono && stages[j].mono() == Some(true) {
                            ensure(stages[k].mono() == Some(true), || format!("{name}: mono at {j} but not at {k}"))?;
                        }
                        if hyp.epi && stages[k].epi() == Some(true) {
                            ensure(stages[j].epi() == Some(true), || format!("{name}: epi at {k} but not at {j}"))?;
                        }
                    }
                }
                epi_checked += hyp.epi as usize;
                chains += 1;
            }
        }
    }
    Ok(format!("{chains} chains over {window} stages, {epi_checked} under the epi hypotheses"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(usize, &str, fn() -> Check); 11] = [
        (1, "string module resolution", criterion_1),
        (2, "nilpotent diagonal class", criterion_2),
        (3, "nilpotency of N_M", criterion_3),
        (4, "diagonal decomposition", criterion_4),
        (5, "Ext dimension oracle", criterion_5),
        (6, "coker(x+y) family", criterion_6),
        (7, "period-one module", criterion_7),
        (8, "graded center vs diagonal of HH", criterion_8),
        (9, "simple syzygies", criterion_9),
        (10, "property suite", criterion_10),
        (11, "lifting propagation", criterion_11),
    ];
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        let start = std::time::Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail} ({secs:.2}s)"),
            Err(why) => {
                println!("criterion {id:>2} FAIL  {title}: {why} ({secs:.2}s)");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
