//! Worked examples. Each demo builds one construction, prints its inputs,
//! signature, assembly plan and result, and returns the result tensors.

use std::fmt::Write as _;

use dualform::analysis::{curried_signature, plan, validate};
use dualform::prelude::*;

use crate::tensor_file;

pub const NAMES: &[&str] = &[
    "f0_f1_f2",
    "delta_interp",
    "delta_matrix",
    "delta_adjoint",
    "delta_identity",
    "dual_eval",
    "cofunction_interp",
    "F1",
    "F2",
    "F4_nested",
    "F4_action",
    "cofunction_sum",
];

pub struct Output {
    pub text: String,
    pub tensors: Vec<(String, AssembledTensor)>,
    names: SpaceNames,
}

impl Output {
    fn new(names: SpaceNames) -> Self {
        Output {
            text: String::new(),
            tensors: Vec::new(),
            names,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn form(&mut self, label: &str, f: &Form) -> Result<()> {
        let sig = validate(f).map_err(Error::InvalidForm)?;
        let text = curried_signature(&sig, &self.names);
        let _ = writeln!(self.text, "{label} = {f}");
        let _ = writeln!(self.text, "  signature: {}", text.product);
        let _ = writeln!(self.text, "  operator:  {}", text.operator);
        let p = plan(f)?;
        if p.steps().len() > 1 {
            self.line("  plan:");
            for l in p.render(&self.names).lines() {
                let _ = writeln!(self.text, "    {l}");
            }
        }
        Ok(())
    }

    fn tensor(&mut self, label: &str, t: AssembledTensor) {
        let _ = writeln!(self.text, "{label}:");
        for l in tensor_file::write(&t, &self.names).lines() {
            let _ = writeln!(self.text, "  {l}");
        }
        self.tensors.push((label.to_string(), t));
    }

    fn check(&mut self, what: &str, diff: f64) {
        let _ = writeln!(self.text, "check {what}: max |difference| = {}", tensor_file::number(diff));
    }
}

struct Spaces {
    v: Space,
    w: Space,
}

fn spaces() -> Spaces {
    let p1 = Element::lagrange(1).expect("P1 exists");
    Spaces {
        v: function_space(make_interval_mesh(2, 1.0).expect("valid mesh"), p1),
        w: function_space(make_interval_mesh(1, 1.0).expect("valid mesh"), p1),
    }
}

fn diff(a: &AssembledTensor, b: &AssembledTensor) -> Result<f64> {
    a.max_abs_diff(b)
        .ok_or_else(|| Error::SpaceMismatch("compared tensors differ in layout".into()))
}

fn matrix(t: &AssembledTensor) -> Result<DenseMatrix> {
    t.clone()
        .into_matrix()
        .ok_or_else(|| Error::Arity(format!("expected a matrix, got a {}", t.kind())))
}

pub fn run(name: &str) -> Option<Result<Output>> {
    let f: fn() -> Result<Output> = match name {
        "f0_f1_f2" => f0_f1_f2,
        "delta_interp" => delta_interp,
        "delta_matrix" => delta_matrix,
        "delta_adjoint" => delta_adjoint,
        "delta_identity" => delta_identity,
        "dual_eval" => dual_eval,
        "cofunction_interp" => cofunction_interp,
        "F1" => f1,
        "F2" => f2,
        "F4_nested" => f4_nested,
        "F4_action" => f4_action,
        "cofunction_sum" => cofunction_sum,
        _ => return None,
    };
    Some(f())
}

fn f0_f1_f2() -> Result<Output> {
    let Spaces { v, .. } = spaces();
    let q = function_space(v.mesh(), Element::lagrange(2)?);
    let mut out = Output::new(SpaceNames::new().with("V", v).with("Q", q));
    out.line("V = P1 on 2 cells of [0, 1]; Q = P2 on the same mesh");

    let c = make_function(v, vec![1.0, 2.0, 4.0])?.named("c");
    out.line("c = [1, 2, 4] in V");
    let f0 = integral(Expr::from(&c), Measure::dx())?;
    out.form("f_0", &f0)?;
    let g = assemble(&f0)?;
    out.tensor("f_0 assembled", g.clone());

    let a = argument(v, 0)?.named("a");
    let f1 = integral(Expr::from(a), Measure::dx())?;
    out.form("f_1", &f1)?;
    let h = assemble(&f1)?;
    out.tensor("h = assembled f_1", h.clone());
    let hc = apply(&h, &DenseVector::new(v, c.require_values()?.to_vec())?)?;
    out.tensor("h(c)", hc.clone());
    out.check("h(c) against f_0", diff(&hc, &g)?);

    let u = argument(q, 1)?.named("u");
    let w = argument(q, 0)?.named("w");
    let f2 = integral(Expr::from(u) * w, Measure::dx())?;
    out.form("f_2", &f2)?;
    out.tensor("A = assembled f_2", assemble(&f2)?);
    Ok(out)
}

fn delta_interp() -> Result<Output> {
    let Spaces { v, .. } = spaces();
    let mut out = Output::new(SpaceNames::new().with("V", v));
    let v_ = argument(v.dual(), 0)?.named("v_");
    let e = Expr::x() * Expr::x();
    let f = delta(e, v_)?;
    out.form("interpolation of x^2 into V", &f)?;
    out.tensor("f", assemble(&f)?);
    Ok(out)
}

fn interpolation_operator(s: &Spaces) -> Result<Form> {
    let u = argument(s.w, 1)?.named("u");
    let v_ = argument(s.v.dual(), 0)?.named("v_");
    delta(u, v_)
}

fn names(s: &Spaces) -> SpaceNames {
    SpaceNames::new().with("V", s.v).with("W", s.w)
}

fn delta_matrix() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    out.line("V = P1 on 2 cells, W = P1 on 1 cell");
    let f = interpolation_operator(&s)?;
    out.form("interpolation operator W -> V", &f)?;
    out.tensor("M", assemble(&f)?);
    Ok(out)
}

fn delta_adjoint() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    let f = interpolation_operator(&s)?;
    let fa = adjoint(&f)?;
    out.form("adjoint of the interpolation operator", &fa)?;
    let m = assemble(&f)?;
    let at = assemble(&fa)?;
    out.tensor("assembled adjoint", at.clone());
    let t = AssembledTensor::Matrix(transpose(&matrix(&m)?));
    out.check("against transpose(M)", diff(&at, &t)?);
    Ok(out)
}

fn delta_identity() -> Result<Output> {
    let Spaces { v, .. } = spaces();
    let mut out = Output::new(SpaceNames::new().with("V", v));
    let u = argument(v, 1)?.named("u");
    let v_ = argument(v.dual(), 0)?.named("v_");
    let f = delta(u, v_)?;
    out.form("delta(u, v_) with u in V", &f)?;
    out.tensor("I", assemble(&f)?);
    Ok(out)
}

fn dual_eval() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    let c = make_function(s.w, vec![1.0, 3.0])?.named("c");
    let f = make_cofunction(s.v.dual(), vec![0.25, 0.5, 0.25])?.named("f");
    out.line("c = [1, 3] in W; f = [0.25, 0.5, 0.25] in V*");
    let e = dual_call(f, c)?;
    out.form("f(c)", &e)?;
    out.tensor("f(c)", assemble(&e)?);
    Ok(out)
}

fn cofunction_interp() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    let f = make_cofunction(s.v.dual(), vec![1.0, 0.0, 0.0])?.named("f");
    out.line("f = [1, 0, 0] in V*");
    let w = argument(s.w, 0)?.named("w");
    let g = dual_call(f.clone(), w)?;
    out.form("g = f(w)", &g)?;
    let gt = assemble(&g)?;
    out.tensor("g", gt.clone());
    let m = matrix(&assemble(&interpolation_operator(&s)?)?)?;
    let fv = DenseVector::new(s.v.dual(), f.require_values()?.to_vec())?;
    let mt_f = apply(&AssembledTensor::Matrix(transpose(&m)), &fv)?;
    out.check("g against transpose(M) f", diff(&gt, &mt_f)?);
    Ok(out)
}

fn f1() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    let f = make_function(s.w, vec![1.0, 3.0])?.named("f");
    out.line("f = [1, 3] in W");
    let v_ = argument(s.v.dual(), 0)?.named("v_");
    let v = argument(s.v, 0)?.named("v");
    let inner = delta(f, v_)?;
    let form = integral(Expr::from(inner.clone()) * v.clone(), Measure::dx())?;
    out.form("F_1", &form)?;
    let tmp = assemble(&inner)?;
    out.tensor("tmp = assembled delta(f, v_)", tmp.clone());
    let l = assemble(&form)?;
    out.tensor("l = assembled F_1", l.clone());
    let tmp_c = make_function(
        s.v,
        tmp.into_vector().expect("interpolation yields a function").into_values(),
    )?;
    let direct = replace(&form, &[(Expr::from(inner), Expr::from(tmp_c))])?;
    out.check("l against the substituted form", diff(&l, &assemble(&direct)?)?);
    Ok(out)
}

fn f2_form(s: &Spaces) -> Result<(Form, Form)> {
    let v = argument(s.v, 0)?.named("v");
    let inner = interpolation_operator(s)?;
    Ok((integral(Expr::from(inner.clone()) * v, Measure::dx())?, inner))
}

fn f2() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    let (form, inner) = f2_form(&s)?;
    out.form("F_2", &form)?;
    let tmp_1 = assemble(&inner)?;
    out.tensor("tmp_1 = assembled delta(w, v_)", tmp_1.clone());
    let replaced = replace(
        &form,
        &[(Expr::from(inner), argument(s.v, 1)?.named("v1").into())],
    )?;
    let tmp_2 = assemble(&replaced)?;
    out.tensor("tmp_2 = assembled F_2 with the delta replaced", tmp_2.clone());
    let product = AssembledTensor::Matrix(matrix(&tmp_2)?.matmul(&matrix(&tmp_1)?)?);
    out.tensor("tmp_2 @ tmp_1", product.clone());
    let a = assemble(&form)?;
    out.tensor("A = assembled F_2", a.clone());
    out.check("A against tmp_2 @ tmp_1", diff(&a, &product)?);
    Ok(out)
}

fn mass_v(s: &Spaces) -> Result<Form> {
    let u = argument(s.v, 1)?.named("u");
    let v = argument(s.v, 0)?.named("v");
    integral(Expr::from(u) * v, Measure::dx())
}

fn f4_nested() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    out.line("u = Argument(V, 1), v = Argument(V, 0), w = Argument(W, 0)");
    let w = argument(s.w, 0)?.named("w");
    let form = delta(w, mass_v(&s)?)?;
    out.form("F_4 = delta(w, u*v*dx)", &form)?;
    out.tensor("F_4", assemble(&form)?);
    Ok(out)
}

fn f4_action() -> Result<Output> {
    let s = spaces();
    let mut out = Output::new(names(&s));
    out.line("omega = Argument(V*, 1), w = Argument(W, 0)");
    let w = argument(s.w, 0)?.named("w");
    let omega = argument(s.v.dual(), 1)?.named("omega");
    let outer = delta(w, omega)?;
    let form = action(&outer, mass_v(&s)?)?;
    out.form("F_4 = action(delta(w, omega), u*v*dx)", &form)?;
    let tmp_1 = assemble(&outer)?;
    out.tensor("tmp_1 = assembled delta(w, omega)", tmp_1.clone());
    let tmp_2 = assemble(&mass_v(&s)?)?;
    out.tensor("tmp_2 = assembled u*v*dx", tmp_2.clone());
    let product = AssembledTensor::Matrix(matrix(&tmp_1)?.matmul(&matrix(&tmp_2)?)?);
    out.tensor("tmp_1 @ tmp_2", product.clone());
    let a = assemble(&form)?;
    out.tensor("F_4", a.clone());
    out.check("F_4 against tmp_1 @ tmp_2", diff(&a, &product)?);
    Ok(out)
}

fn cofunction_sum() -> Result<Output> {
    let Spaces { v, .. } = spaces();
    let mut out = Output::new(SpaceNames::new().with("V", v));
    let f = make_cofunction(v.dual(), vec![1.0, -1.0, 2.0])?.named("f");
    out.line("f = [1, -1, 2] in V*");
    let vdx = integral(Expr::from(argument(v, 0)?.named("v")), Measure::dx())?;
    let g = form_add(&Form::from_cofunction(&f)?, &vdx)?;
    out.form("g = f + v*dx", &g)?;
    let gt = assemble(&g)?;
    out.tensor("g", gt.clone());
    let b = assemble(&vdx)?;
    let expected: Vec<f64> = f
        .require_values()?
        .iter()
        .zip(b.values())
        .map(|(x, y)| x + y)
        .collect();
    let expected = AssembledTensor::Vector(DenseVector::new(v.dual(), expected)?);
    out.check("g against f + assembled v*dx", diff(&gt, &expected)?);
    Ok(out)
}
