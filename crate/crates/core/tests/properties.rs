use dualform::prelude::*;
use proptest::prelude::*;

fn space(cells: usize, degree: u32) -> Space {
    function_space(make_interval_mesh(cells, 1.0).unwrap(), Element::lagrange(degree).unwrap())
}

fn arb_space() -> impl Strategy<Value = Space> {
    (1usize..6, 1u32..4).prop_map(|(n, p)| space(n, p))
}

fn arb_space_values() -> impl Strategy<Value = (Space, Vec<f64>)> {
    arb_space().prop_flat_map(|s| (Just(s), prop::collection::vec(-10.0..10.0f64, s.dim())))
}

fn mass(s: Space) -> Form {
    integral(Expr::from(argument(s, 1).unwrap()) * argument(s, 0).unwrap(), Measure::dx()).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn basis_is_a_partition_of_unity(s in arb_space(), x in 0.0..=1.0f64) {
        let sum: f64 = s.tabulate_basis(x).unwrap().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn interpolation_reproduces_functions((s, values) in arb_space_values()) {
        let c = make_function(s, values.clone()).unwrap();
        let got = interpolate(c, s).unwrap();
        prop_assert_eq!(got.values(), values.as_slice());
    }

    #[test]
    fn assembly_is_linear(s in arb_space(), alpha in -5.0..5.0f64, beta in -5.0..5.0f64) {
        let a = mass(s);
        let b = integral(Expr::x() * argument(s, 1).unwrap() * argument(s, 0).unwrap(), Measure::dx()).unwrap();
        let combo = assemble(&form_add(&(alpha * a.clone()), &(beta * b.clone())).unwrap()).unwrap();
        let (ta, tb) = (assemble(&a).unwrap(), assemble(&b).unwrap());
        let want: Vec<f64> = ta.values().iter().zip(tb.values()).map(|(x, y)| alpha * x + beta * y).collect();
        prop_assert!(close(combo.values(), &want, 1e-12));
    }

    #[test]
    fn adjoint_assembles_to_transpose(v in arb_space(), w in arb_space()) {
        let op = delta(argument(w, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap();
        for f in [mass(v), op] {
            let a = assemble(&adjoint(&f).unwrap()).unwrap().into_matrix().unwrap();
            let t = transpose(&assemble(&f).unwrap().into_matrix().unwrap());
            prop_assert_eq!((a.row_space(), a.col_space()), (t.row_space(), t.col_space()));
            prop_assert!(close(a.values(), t.values(), 1e-12));
        }
    }

    #[test]
    fn dual_call_matches_delta((s, values) in arb_space_values(), cf in prop::collection::vec(-1.0..1.0f64, 0..40)) {
        let c = make_function(s, values).unwrap();
        let mut fv = cf;
        fv.resize(s.dim(), 0.5);
        let f = make_cofunction(s.dual(), fv).unwrap();
        let a = assemble(&dual_call(f.clone(), c.clone()).unwrap()).unwrap();
        let b = assemble(&delta(c, f).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cofunction_round_trip((s, values) in arb_space_values()) {
        let f = make_cofunction(s.dual(), values.clone()).unwrap();
        let v = assemble(&Form::from_cofunction(&f).unwrap()).unwrap().into_vector().unwrap();
        prop_assert_eq!(v.space(), s.dual());
        prop_assert_eq!(v.values(), values.as_slice());
    }
}
