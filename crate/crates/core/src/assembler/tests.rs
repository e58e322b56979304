use super::*;
use crate::fem::{function_space, make_interval_mesh, Element};
use crate::symbolic::*;

fn p(degree: u32) -> Element {
    Element::lagrange(degree).unwrap()
}

/// V = P1 on two cells, W = P1 on one cell.
fn spaces() -> (Space, Space) {
    (
        function_space(make_interval_mesh(2, 1.0).unwrap(), p(1)),
        function_space(make_interval_mesh(1, 1.0).unwrap(), p(1)),
    )
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn hat_integrals() {
    let (v, _) = spaces();
    let h = assemble(&integral(Expr::from(argument(v, 0).unwrap()), Measure::dx()).unwrap())
        .unwrap()
        .into_vector()
        .unwrap();
    assert!(h.is_cofunction());
    assert_eq!(h.space(), v.dual());
    assert!(close(h.values(), &[0.25, 0.5, 0.25], 1e-15));
}

#[test]
fn element_mass_matrix() {
    let (_, w) = spaces();
    let mass = integral(
        Expr::from(argument(w, 1).unwrap()) * argument(w, 0).unwrap(),
        Measure::dx(),
    )
    .unwrap();
    let m = assemble(&mass).unwrap().into_matrix().unwrap();
    assert!(close(m.values(), &[1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0], 1e-15));
    assert_eq!(transpose(&m), m);
    let ones = DenseVector::new(w, vec![1.0, 1.0]).unwrap();
    let r = apply(&AssembledTensor::Matrix(m), &ones).unwrap().into_vector().unwrap();
    assert!(close(r.values(), &[0.5, 0.5], 1e-15));
}

#[test]
fn interpolation_matrix() {
    let (v, w) = spaces();
    let m = assemble(&delta(argument(w, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap())
        .unwrap()
        .into_matrix()
        .unwrap();
    assert_eq!(m.values(), &[1.0, 0.0, 0.5, 0.5, 0.0, 1.0]);
    assert_eq!((m.row_space(), m.col_space()), (v.dual(), w));
}

#[test]
fn identity_delta() {
    for (n, deg) in [(1, 1), (3, 1), (2, 2), (3, 3)] {
        let v = function_space(make_interval_mesh(n, 0.7).unwrap(), p(deg));
        let m = assemble(&delta(argument(v, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap())
            .unwrap()
            .into_matrix()
            .unwrap();
        for i in 0..v.dim() {
            for j in 0..v.dim() {
                assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }
}

#[test]
fn interpolation_of_expressions() {
    let (v, _) = spaces();
    let sq = interpolate(Expr::x() * Expr::x(), v).unwrap();
    assert_eq!(sq.values(), &[0.0, 0.25, 1.0]);
    assert!(!sq.is_cofunction());
    assert_eq!(interpolate(Expr::x(), v).unwrap().values(), &[0.0, 0.5, 1.0]);
    assert_eq!(interpolate(2.0, v).unwrap().values(), &[2.0; 3]);
    assert_eq!(interpolate(Expr::x(), v.dual()), Err(Error::PrimalRequired));
}

#[test]
fn cofunction_interpolation_is_transposed() {
    let (v, w) = spaces();
    let f = make_cofunction(v.dual(), vec![1.0, 0.0, 0.0]).unwrap();
    let g = assemble(&delta(argument(w, 0).unwrap(), f).unwrap())
        .unwrap()
        .into_vector()
        .unwrap();
    assert_eq!(g.space(), w.dual());
    assert_eq!(g.values(), &[1.0, 0.0]);
}

#[test]
fn coefficient_against_cofunction() {
    let (v, w) = spaces();
    let c = make_function(w, vec![1.0, 3.0]).unwrap();
    let f = make_cofunction(v.dual(), vec![1.0, 1.0, 1.0]).unwrap();
    let s = assemble(&delta(c, f).unwrap()).unwrap();
    assert_eq!(s.as_scalar(), Some(1.0 + 2.0 + 3.0));
}

#[test]
fn out_of_domain_operand_is_not_interpolable() {
    let v = function_space(make_interval_mesh(2, 2.0).unwrap(), p(1));
    let w = function_space(make_interval_mesh(1, 1.0).unwrap(), p(1));
    let c = make_function(w, vec![1.0, 1.0]).unwrap();
    let err = interpolate(c, v).unwrap_err();
    assert_eq!(err.code(), "NOT_INTERPOLABLE");
}

#[test]
fn external_operators() {
    let (v, _) = spaces();
    let c = make_function(v, vec![1.0, 2.0, 3.0]).unwrap();
    let n = external_operator(vec![c.into()], v, "square-pointwise").unwrap();
    let out = assemble(&n).unwrap().into_vector().unwrap();
    assert_eq!(out.space(), v);
    assert_eq!(out.values(), &[1.0, 4.0, 9.0]);

    // linear in a contained argument: the identity hook yields the identity matrix
    let (_, w) = spaces();
    let lin = external_operator(vec![argument(w, 1).unwrap().into()], v, "identity").unwrap();
    let m = assemble(&lin).unwrap().into_matrix().unwrap();
    assert_eq!(m.values(), &[1.0, 0.0, 0.5, 0.5, 0.0, 1.0]);
}

#[test]
fn cofunction_round_trip() {
    let (v, _) = spaces();
    let f = make_cofunction(v.dual(), vec![0.1, -2.0, 3.5]).unwrap();
    let out = assemble(&Form::from_cofunction(&f).unwrap()).unwrap().into_vector().unwrap();
    assert_eq!(out.values(), &[0.1, -2.0, 3.5]);
    assert_eq!(out.space(), v.dual());
}

#[test]
fn missing_values() {
    let (v, _) = spaces();
    let c = coefficient(v);
    let err = assemble(&integral(Expr::from(c), Measure::dx()).unwrap()).unwrap_err();
    assert_eq!(err.code(), "MISSING_VALUES");
}

#[test]
fn quadrature_degree_override() {
    let (v, _) = spaces();
    let form = integral(Expr::x() * Expr::x() * argument(v, 0).unwrap(), Measure::dx()).unwrap();
    let exact = assemble(&form).unwrap();
    let low = assemble_with(&form, &AssemblyOptions { quadrature_degree: Some(0) }).unwrap();
    assert!(exact.max_abs_diff(&low).unwrap() > 1e-3);
    let err = assemble_with(&form, &AssemblyOptions { quadrature_degree: Some(64) }).unwrap_err();
    assert_eq!(err.code(), "DEGREE");
}

#[test]
fn f1_with_unit_function_is_hat_integrals() {
    let (v, w) = spaces();
    let one = make_function(w, vec![1.0, 1.0]).unwrap();
    let v_ = argument(v.dual(), 0).unwrap();
    let f1 = integral(
        Expr::from(delta(one, v_).unwrap()) * argument(v, 0).unwrap(),
        Measure::dx(),
    )
    .unwrap();
    let direct = integral(Expr::from(argument(v, 0).unwrap()), Measure::dx()).unwrap();
    let a = assemble(&f1).unwrap();
    let b = assemble(&direct).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
}

#[test]
fn f2_is_mass_times_interpolation() {
    let (v, w) = spaces();
    let v_ = argument(v.dual(), 0).unwrap();
    let f2 = integral(
        Expr::from(delta(argument(w, 1).unwrap(), v_.clone()).unwrap()) * argument(v, 0).unwrap(),
        Measure::dx(),
    )
    .unwrap();
    let got = assemble(&f2).unwrap().into_matrix().unwrap();
    let mass = assemble(
        &integral(
            Expr::from(argument(v, 1).unwrap()) * argument(v, 0).unwrap(),
            Measure::dx(),
        )
        .unwrap(),
    )
    .unwrap()
    .into_matrix()
    .unwrap();
    let interp = assemble(&delta(argument(w, 1).unwrap(), v_).unwrap())
        .unwrap()
        .into_matrix()
        .unwrap();
    let expected = mass.matmul(&interp).unwrap();
    assert_eq!(got.shape(), (3, 2));
    assert_eq!((got.row_space(), got.col_space()), (v, w));
    assert!(close(got.values(), expected.values(), 1e-14));

    let t = assemble(&adjoint(&f2).unwrap()).unwrap().into_matrix().unwrap();
    assert!(close(t.values(), transpose(&got).values(), 1e-14));
}

#[test]
fn linear_combination() {
    let (v, _) = spaces();
    let a0 = argument(v, 0).unwrap();
    let f = integral(Expr::from(a0.clone()), Measure::dx()).unwrap();
    let g = integral(Expr::x() * a0, Measure::dx()).unwrap();
    let combo = form_add(&(2.0 * f.clone()), &(-3.0 * g.clone())).unwrap();
    let lhs = assemble(&combo).unwrap().into_vector().unwrap();
    let (fa, ga) = (
        assemble(&f).unwrap().into_vector().unwrap(),
        assemble(&g).unwrap().into_vector().unwrap(),
    );
    let rhs: Vec<f64> = fa.values().iter().zip(ga.values()).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
    assert!(close(lhs.values(), &rhs, 1e-15));
}
