//! Minimal graded projective resolutions.
//!
//! Stage `n` covers the syzygy `Ω^n` by the free module `P^n` whose generators are
//! a basis of the top of `Ω^n`; the kernel of the cover is the next syzygy.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmodule::{projective_cover, FreeModule, GradedMap, GradedModule};
use crate::linalg::SparseVec;

/// A resolution `⋯ → P^1 → P^0 → M`, either extendable (built by covering
/// syzygies) or fixed (assembled from explicit data).
#[derive(Clone, Debug)]
pub struct Resolution {
    module: GradedModule,
    free: Vec<FreeModule>,
    /// `images[0][k] = ε(g_k) ∈ M`, `images[n][k] = d^n(g_k) ∈ P^{n−1}`.
    images: Vec<Vec<SparseVec>>,
    /// `maps[0] = ε`, `maps[n] = d^n`.
    maps: Vec<GradedMap>,
    /// `syzygies[n] = Ω^n`; `Ω^0 = M`.
    syzygies: Vec<GradedModule>,
    /// Inclusion `Ω^n → P^{n−1}` for `n ≥ 1` (index `n − 1`).
    inclusions: Vec<GradedMap>,
    extendable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearityReport {
    pub linear: bool,
    pub checked_to: usize,
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiProfile {
    pub betti: Vec<usize>,
    pub all_ones: bool,
    /// The Betti numbers in the second half of the window do not exceed those in
    /// the first half; a window-relative heuristic only.
    pub bounded_in_window: bool,
    pub max: usize,
}

/// One entry of a differential: an element of `R` of the given degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub degree: usize,
    pub coords: SparseVec,
}

impl Resolution {
    pub fn new(module: GradedModule) -> Resolution {
        Resolution {
            syzygies: vec![module.clone()],
            module,
            free: Vec::new(),
            images: Vec::new(),
            maps: Vec::new(),
            inclusions: Vec::new(),
            extendable: true,
        }
    }

    /// Resolution of `module` through homological degree `n`.
    pub fn compute(module: &GradedModule, n: usize) -> Result<Resolution> {
        let mut r = Resolution::new(module.clone());
        r.extend(n)?;
        Ok(r)
    }

    /// A fixed complex given by free modules, the augmentation and the generator
    /// images of each differential. It cannot be extended.
    pub fn from_parts(module: GradedModule, free: Vec<FreeModule>, images: Vec<Vec<SparseVec>>) -> Resolution {
        let maps = (0..free.len())
            .map(|n| {
                let target = if n == 0 { &module } else { &free[n - 1].module };
                free[n].map_to(target, &images[n], 0)
            })
            .collect();
        Resolution {
            syzygies: vec![module.clone()],
            module,
            free,
            images,
            maps,
            inclusions: Vec::new(),
            extendable: false,
        }
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    /// Highest computed homological degree, or `None` before the first stage.
    pub fn length(&self) -> Option<usize> {
        self.free.len().checked_sub(1)
    }

    pub fn computed(&self) -> usize {
        self.free.len()
    }

    /// Extends the resolution through homological degree `n`.
    pub fn extend(&mut self, n: usize) -> Result<()> {
        if self.free.len() > n {
            return Ok(());
        }
        if !self.extendable {
            return Err(Error::PreconditionFailed(format!(
                "fixed complex has {} terms, degree {n} requested",
                self.free.len()
            )));
        }
        let alg = self.module.algebra().clone();
        if !alg.is_complete() && !self.module.is_zero() {
            // a module cut off at the truncation only needs room above its generators
            let length = if self.module.is_complete() {
                self.module.graded_length()
            } else {
                let top = self.module.top();
                top.hi() - self.module.lo() + 1
            };
            let needed = (length + n as i32) as i64;
            let available = alg.max_degree() as i64;
            if needed > available {
                return Err(Error::InsufficientTruncation { needed, available });
            }
        }
        while self.free.len() <= n {
            self.step();
        }
        Ok(())
    }

    fn step(&mut self) {
        let stage = self.free.len();
        let cover = projective_cover(&self.syzygies[stage]);
        let free = cover.free;
        let images: Vec<SparseVec> = if stage == 0 {
            cover.images
        } else {
            let inc = &self.inclusions[stage - 1];
            free.summands()
                .iter()
                .zip(&cover.images)
                .map(|(&(_, d), v)| inc.apply(d, v))
                .collect()
        };
        let target = if stage == 0 { &self.module } else { &self.free[stage - 1].module };
        let map = free.map_to(target, &images, 0);
        let (kernel, inclusion) = free.module.kernel_of(&map, target.known_to());
        self.free.push(free);
        self.images.push(images);
        self.maps.push(map);
        self.syzygies.push(kernel);
        self.inclusions.push(inclusion);
    }

    pub fn free(&self, n: usize) -> &FreeModule {
        &self.free[n]
    }

    /// `ε` for `n = 0`, `d^n` otherwise.
    pub fn map(&self, n: usize) -> &GradedMap {
        &self.maps[n]
    }

    pub fn images(&self, n: usize) -> &[SparseVec] {
        &self.images[n]
    }

    /// `Ω^n M`, available for `n ≤` computed stages.
    pub fn syzygy(&self, n: usize) -> Result<&GradedModule> {
        self.syzygies
            .get(n)
            .ok_or_else(|| Error::PreconditionFailed(format!("syzygy {n} not computed")))
    }

    /// `Ω^n → P^{n−1}` for `n ≥ 1`.
    pub fn inclusion(&self, n: usize) -> &GradedMap {
        &self.inclusions[n - 1]
    }

    pub fn betti(&self, n: usize) -> usize {
        self.free.get(n).map_or(0, |f| f.rank())
    }

    pub fn generator_degrees(&self, n: usize) -> Vec<i32> {
        self.free[n].summands().iter().map(|s| s.1).collect()
    }

    /// The resolution has reached a zero term.
    pub fn is_finite(&self) -> bool {
        self.free.iter().any(|f| f.rank() == 0)
    }

    /// Matrix of `d^n` (`n ≥ 1`) with entries in `R`: `entries[j][k]` is the
    /// coefficient of generator `j` of `P^{n−1}` in `d^n(g_k)`.
    pub fn entries(&self, n: usize) -> Vec<Vec<Option<Entry>>> {
        let target = &self.free[n - 1];
        let mut out = vec![vec![None; self.free[n].rank()]; target.rank()];
        for (k, &(_, dk)) in self.free[n].summands().iter().enumerate() {
            for (j, r) in target.decompose(dk, &self.images[n][k]).into_iter().enumerate() {
                if !r.is_zero() {
                    let degree = (dk - target.summands()[j].1) as usize;
                    out[j][k] = Some(Entry { degree, coords: r });
                }
            }
        }
        out
    }

    /// `d^n` written with algebra labels.
    pub fn render(&self, n: usize) -> Vec<Vec<String>> {
        let alg = self.module.algebra();
        self.entries(n)
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        None => "0".to_string(),
                        Some(e) => render_element(alg, e.degree, &e.coords),
                    })
                    .collect()
            })
            .collect()
    }

    /// `d^n ∘ d^{n+1} = 0` and `ε ∘ d^1 = 0` on every computed stage.
    pub fn is_complex(&self) -> bool {
        (1..self.maps.len()).all(|n| self.maps[n - 1].compose(&self.maps[n]).is_zero())
    }

    /// Every differential has entries in the graded radical.
    pub fn is_minimal(&self) -> bool {
        (1..self.free.len()).all(|n| self.entries(n).iter().flatten().flatten().all(|e| e.degree > 0))
    }

    /// Exactness at each computed `P^n` with `n < computed − 1`, by dimension count.
    pub fn is_exact(&self) -> bool {
        if !self.maps.first().is_none_or(|e| e.is_epi()) {
            return false;
        }
        (1..self.maps.len()).all(|n| {
            let f = &self.free[n - 1].module;
            (f.lo()..=f.hi()).all(|d| {
                let kernel = self.maps[n - 1].block(d).kernel_vectors().len();
                self.maps[n].block(d).rank() == kernel
            })
        })
    }

    pub fn is_linear_up_to(&self, n: usize) -> LinearityReport {
        let lo = self.module.lo();
        let top = n.min(self.free.len().saturating_sub(1));
        let first_failure = (0..=top).find(|&k| self.free[k].summands().iter().any(|s| s.1 != lo + k as i32));
        let generated_in_zero = lo == 0 || self.module.is_zero();
        LinearityReport {
            linear: first_failure.is_none() && generated_in_zero && top == n,
            checked_to: top,
            first_failure: if generated_in_zero { first_failure } else { Some(0) },
        }
    }

    pub fn betti_profile(&self, n: usize) -> BettiProfile {
        let betti: Vec<usize> = (0..=n).map(|k| self.betti(k)).collect();
        let half = betti.len() / 2;
        let first = betti[..half.max(1)].iter().max().copied().unwrap_or(0);
        let second = betti[half..].iter().max().copied().unwrap_or(0);
        BettiProfile {
            all_ones: betti.iter().all(|&b| b == 1),
            bounded_in_window: second <= first,
            max: betti.iter().max().copied().unwrap_or(0),
            betti,
        }
    }
}

/// Renders an element of `R_d` given by coordinates.
pub fn render_element(alg: &crate::algebra::GradedAlgebra, d: usize, coords: &SparseVec) -> String {
    let mut out = String::new();
    for (b, c) in coords.iter() {
        let label = alg.label(d, *b);
        let term = if c.is_one() {
            label.to_string()
        } else if (-c.clone()).is_one() {
            format!("-{label}")
        } else {
            format!("{c}*{label}")
        };
        if !out.is_empty() && !term.starts_with('-') {
            out.push('+');
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Syzygies `Ω^0, …, Ω^n` of a module.
pub fn syzygy(module: &GradedModule, n: usize) -> Result<GradedModule> {
    let r = Resolution::compute(module, n)?;
    Ok(r.syzygy(n)?.clone())
}

/// Resolves `R_0` and reports whether every `P^n` is generated in degree `n`.
pub fn koszul_witness(algebra: &Arc<crate::algebra::GradedAlgebra>, bound: usize) -> Result<LinearityReport> {
    let top = GradedModule::semisimple_top(algebra.clone());
    let r = Resolution::compute(&top, bound)?;
    Ok(r.is_linear_up_to(bound))
}

/// Resolutions of several modules side by side.
pub fn resolve_all(modules: &[GradedModule], n: usize) -> Result<Vec<Resolution>> {
    modules.par_iter().map(|m| Resolution::compute(m, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GradedAlgebra;
    use crate::gmodule::is_isomorphic_graded;
    use crate::presentation::{parse_algebra, parse_module};

    const QUANTUM: &str = "field Q\nunit q = 2\nvertex 1\narrow x: 1 -> 1\narrow y: 1 -> 1\nrelation x*y - q*y*x\nrelation x*x\nrelation y*y\n";

    fn setup(src: &str, module: &str) -> GradedModule {
        let p = parse_algebra(src).unwrap();
        let a = Arc::new(GradedAlgebra::from_presentation(&p).unwrap());
        GradedModule::from_presentation(&parse_module(module, &p).unwrap(), a).unwrap()
    }

    #[test]
    fn string_module_has_constant_betti_two() {
        let m = setup(QUANTUM, "module cokernel [[-y, 0], [x, q*y]]");
        let r = Resolution::compute(&m, 4).unwrap();
        assert_eq!(r.betti_profile(4).betti, vec![2; 5]);
        assert!(r.is_complex());
        assert!(r.is_minimal());
        assert!(r.is_exact());
        assert!(r.is_linear_up_to(4).linear);
        for n in 1..=4 {
            for e in r.entries(n).iter().flatten().flatten() {
                assert_eq!(e.degree, 1);
            }
        }
        let omega = r.syzygy(1).unwrap();
        assert!(is_isomorphic_graded(omega, &m.shift(-1)).is_iso());
    }

    #[test]
    fn cyclic_module_has_betti_one() {
        let m = setup(QUANTUM, "module cokernel [[x + y]]");
        let r = Resolution::compute(&m, 4).unwrap();
        assert_eq!(r.betti_profile(4).betti, vec![1; 5]);
        assert!(r.betti_profile(4).all_ones);
    }

    #[test]
    fn projective_stops() {
        let m = setup(QUANTUM, "module regular");
        let r = Resolution::compute(&m, 3).unwrap();
        assert_eq!(r.betti_profile(3).betti, vec![1, 0, 0, 0]);
        assert!(r.is_finite());
    }

    #[test]
    fn shifted_sum_is_not_linear() {
        let m = setup(QUANTUM, "module cokernel [[x + y]]");
        let sum = GradedModule::direct_sum(&[&m, &m.shift(-1)]).unwrap();
        let r = Resolution::compute(&sum, 2).unwrap();
        assert_eq!(r.is_linear_up_to(2).first_failure, Some(0));
    }

    #[test]
    fn quantum_plane_is_koszul_to_four() {
        let p = parse_algebra(QUANTUM).unwrap();
        let a = Arc::new(GradedAlgebra::from_presentation(&p).unwrap());
        assert!(koszul_witness(&a, 4).unwrap().linear);
        let top = GradedModule::semisimple_top(a);
        let r = Resolution::compute(&top, 4).unwrap();
        assert_eq!(r.betti_profile(4).betti, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn cycle_simple_syzygy_is_next_simple() {
        let src = "field Q\nvertex 1 2 3\narrow a: 1 -> 2\narrow b: 2 -> 3\narrow c: 3 -> 1\nrelation a*b\nrelation b*c\nrelation c*a\n";
        let s = setup(src, "module simple 1");
        let omega = syzygy(&s, 1).unwrap();
        let p = parse_algebra(src).unwrap();
        let _ = p;
        assert_eq!(omega.total_dim(), 1);
        assert_eq!(omega.degree_vertices(1), &[1]);
    }

    #[test]
    fn truncated_polynomial_needs_room() {
        let src = "field Q\nvertex 1\narrow x: 1 -> 1\ntruncate 3\n";
        let s = setup(src, "module simple 1");
        assert!(matches!(Resolution::compute(&s, 5), Err(Error::InsufficientTruncation { .. })));
        let r = Resolution::compute(&s, 2).unwrap();
        assert_eq!(r.betti_profile(2).betti, vec![1, 1, 0]);
    }
}
