use std::sync::Arc;

use proptest::prelude::*;

use koszul_ext::extalg::{ext_degrees, ext_dim_via_syzygy, ext_group};
use koszul_ext::gmodule::GradedModule;
use koszul_ext::presentation::{parse_algebra, parse_module};
use koszul_ext::resolution::Resolution;
use koszul_ext::{Field, GradedAlgebra, Matrix};

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, cols), rows)
}

fn quantum(p: u64, q: i64) -> (koszul_ext::presentation::AlgebraPresentation, Arc<GradedAlgebra>) {
    let src = format!(
        "field GF({p})\nunit q = {q}\nvertex 1\narrow x: 1 -> 1\narrow y: 1 -> 1\nrelation x*y - q*y*x\nrelation x*x\nrelation y*y\n"
    );
    let pres = parse_algebra(&src).unwrap();
    let a = Arc::new(GradedAlgebra::from_presentation(&pres).unwrap());
    (pres, a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_plus_nullity(values in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| small_matrix(r, c)), prime in prop::sample::select(vec![0u32, 2, 5, 7])) {
        let field = if prime == 0 { Field::Rationals } else { Field::Prime(prime) };
        let cols = values[0].len();
        let a = Matrix::from_i64(field, &values);
        let kernel = a.kernel_vectors();
        prop_assert_eq!(a.rank() + kernel.len(), cols);
        for v in &kernel {
            prop_assert!(a.apply(v).is_zero());
        }
    }

    #[test]
    fn solve_recovers_consistent_systems(values in small_matrix(3, 4), x in prop::collection::vec(-3i64..=3, 4)) {
        let field = Field::Rationals;
        let a = Matrix::from_i64(field, &values);
        let x = Matrix::from_i64(field, &x.iter().map(|v| vec![*v]).collect::<Vec<_>>());
        let b = a.mul(&x).unwrap();
        let y = a.solve(&b).unwrap().expect("consistent");
        prop_assert_eq!(a.mul(&y).unwrap(), b);
    }

    #[test]
    fn cyclic_modules_resolve_linearly(q in 1i64..7, a in 1i64..7, b in 1i64..7) {
        let (pres, alg) = quantum(7, q);
        let text = format!("module cokernel [[{a}*x + {b}*y]]");
        let m = GradedModule::from_presentation(&parse_module(&text, &pres).unwrap(), alg).unwrap();
        let res = Resolution::compute(&m, 5).unwrap();
        prop_assert!(res.is_complex());
        prop_assert!(res.is_exact());
        prop_assert!(res.is_minimal());
        prop_assert!(res.is_linear_up_to(5).linear);
        prop_assert_eq!(res.betti_profile(5).betti, vec![1; 6]);
    }

    #[test]
    fn ext_dimensions_match_the_syzygy_route(q in 1i64..5, a in 0i64..5, b in 1i64..5) {
        let (pres, alg) = quantum(5, q);
        let text = format!("module cokernel [[{a}*x + {b}*y]]");
        let m = GradedModule::from_presentation(&parse_module(&text, &pres).unwrap(), alg).unwrap();
        let res = Resolution::compute(&m, 4).unwrap();
        for n in 0..=3 {
            for i in ext_degrees(&res, &m, n) {
                let d = ext_group(&res, &m, n, i).unwrap().dim();
                prop_assert_eq!(d, ext_dim_via_syzygy(&res, &m, n, i).unwrap());
            }
        }
    }
}
