use std::path::PathBuf;
use std::sync::Arc;

use koszul_ext::hochschild::{ext_algebra_of_semisimple, hochschild, TMap};
use koszul_ext::presentation::parse_algebra;
use koszul_ext::GradedAlgebra;

fn algebra(name: &str) -> Arc<GradedAlgebra> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let p = parse_algebra(&std::fs::read_to_string(path).unwrap()).unwrap();
    Arc::new(GradedAlgebra::from_presentation(&p).unwrap())
}

/// `T(ξη) = T(ξ)T(η)` on all basis pairs through degree 3, and `T(1) = 1`.
fn check_multiplicative(name: &str) {
    let a = algebra(name);
    let n = 3;
    let hh = hochschild(&a, n).unwrap();
    let e = ext_algebra_of_semisimple(&a, n).unwrap();
    let t = TMap::new(&hh, &e, n).unwrap();
    assert_eq!(t.coordinates(&hh.ext.identity()).unwrap(), e.coordinates(&e.identity()).unwrap());
    let mut pairs = 0;
    for b1 in hh.ext.bidegrees() {
        for b2 in hh.ext.bidegrees().into_iter().filter(|b2| b1.0 + b2.0 <= n) {
            for xi in hh.ext.basis(b1) {
                for eta in hh.ext.basis(b2) {
                    let lhs = t.coordinates(&hh.ext.product(&xi, &eta).unwrap()).unwrap();
                    let rhs = e.coordinates(&e.product(&t.apply(&xi).unwrap(), &t.apply(&eta).unwrap()).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "{name}: T fails on {b1:?} x {b2:?}");
                    pairs += 1;
                }
            }
        }
    }
    assert!(pairs > 0);
}

#[test]
fn t_is_multiplicative_for_dual_numbers() {
    check_multiplicative("kx2.alg");
}

#[test]
fn t_is_multiplicative_for_the_three_cycle() {
    check_multiplicative("cycle3.alg");
}

#[test]
fn t_is_multiplicative_for_the_quantum_plane() {
    check_multiplicative("quantum_local.alg");
}

#[test]
fn rest_of_hochschild_cohomology_is_nilpotent() {
    let a = algebra("quantum_string.alg");
    let hh = hochschild(&a, 3).unwrap();
    let s = koszul_ext::extalg::nilpotency_survey(&hh.ext, 20, 5).unwrap();
    assert_eq!(s.graded_length, 3);
    assert!(s.within_bound);
}
