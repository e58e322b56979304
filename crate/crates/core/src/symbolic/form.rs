use std::fmt;
use std::ops::{Mul, Neg};

use super::expr::Expr;
use super::registry;
use super::terminal::{Argument, Coefficient, Terminal};
use crate::analysis;
use crate::error::{Error, Result};
use crate::fem::{Mesh, Space};

/// A weighted sum of terms sharing one argument signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    terms: Vec<(f64, Term)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Integral(Integral),
    Delta(Delta),
    /// A cofunction used directly as a 1-form; it carries an intrinsic
    /// argument 0 in its primal space.
    Cofunction(Coefficient),
    External(ExternalOperator),
    /// Arguments 0 and 1 of the inner form relabelled in reverse order.
    Adjoint(Box<Form>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub(crate) integrand: Expr,
    pub(crate) mesh: Mesh,
}

impl Integral {
    pub fn integrand(&self) -> &Expr {
        &self.integrand
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }
}

/// `δ(u, v) = v(u)`: the dual operand applied to the operand.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    pub(crate) operand: Expr,
    pub(crate) dual_operand: DualOperand,
}

impl Delta {
    pub fn operand(&self) -> &Expr {
        &self.operand
    }

    pub fn dual_operand(&self) -> &DualOperand {
        &self.dual_operand
    }
}

/// What may fill the dual slot of a delta: anything valued in a dual space.
#[derive(Debug, Clone, PartialEq)]
pub enum DualOperand {
    Coargument(Argument),
    Cofunction(Coefficient),
    /// A form whose argument 0 is primal, read as an operator into the dual.
    Form(Box<Form>),
}

impl DualOperand {
    pub(crate) fn to_expr(&self) -> Expr {
        match self {
            DualOperand::Coargument(a) => a.into(),
            DualOperand::Cofunction(c) => c.into(),
            DualOperand::Form(g) => Expr::Form(g.clone()),
        }
    }

    pub(crate) fn from_expr(e: Expr) -> Result<Self> {
        match e {
            Expr::Terminal(Terminal::Argument(a)) if a.is_coargument() => {
                Ok(DualOperand::Coargument(a))
            }
            Expr::Terminal(Terminal::Coefficient(c)) if c.is_cofunction() => {
                Ok(DualOperand::Cofunction(c))
            }
            Expr::Form(g) => Ok(DualOperand::Form(g)),
            other => Err(Error::SpaceKind(format!(
                "`{other}` cannot fill the dual slot of a delta"
            ))),
        }
    }
}

impl From<Argument> for DualOperand {
    fn from(a: Argument) -> Self {
        DualOperand::Coargument(a)
    }
}

impl From<&Argument> for DualOperand {
    fn from(a: &Argument) -> Self {
        DualOperand::Coargument(a.clone())
    }
}

impl From<Coefficient> for DualOperand {
    fn from(c: Coefficient) -> Self {
        DualOperand::Cofunction(c)
    }
}

impl From<&Coefficient> for DualOperand {
    fn from(c: &Coefficient) -> Self {
        DualOperand::Cofunction(c.clone())
    }
}

impl From<Form> for DualOperand {
    fn from(f: Form) -> Self {
        DualOperand::Form(Box::new(f))
    }
}

/// An operator outside the form language producing a function in
/// `output_space`; as a form it takes an intrinsic coargument in the dual of
/// that space.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalOperator {
    pub(crate) operands: Vec<Expr>,
    pub(crate) output_space: Space,
    pub(crate) evaluator: String,
}

impl ExternalOperator {
    pub fn operands(&self) -> &[Expr] {
        &self.operands
    }

    pub fn output_space(&self) -> Space {
        self.output_space
    }

    pub fn evaluator(&self) -> &str {
        &self.evaluator
    }
}

/// Integration measure over the cells of a mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measure {
    mesh: Option<Mesh>,
}

impl Measure {
    /// `dx` over whatever mesh the integrand lives on.
    pub fn dx() -> Self {
        Measure { mesh: None }
    }

    pub fn dx_over(mesh: Mesh) -> Self {
        Measure { mesh: Some(mesh) }
    }
}

impl Form {
    pub(crate) fn from_terms(terms: Vec<(f64, Term)>) -> Self {
        Form { terms }
    }

    pub(crate) fn single(term: Term) -> Self {
        Form {
            terms: vec![(1.0, term)],
        }
    }

    pub fn terms(&self) -> &[(f64, Term)] {
        &self.terms
    }

    /// A cofunction viewed as a 1-form.
    pub fn from_cofunction(f: &Coefficient) -> Result<Self> {
        if !f.is_cofunction() {
            return Err(Error::SpaceKind(format!("`{f}` is not a cofunction")));
        }
        Ok(Form::single(Term::Cofunction(f.clone())))
    }

    pub fn scaled(&self, alpha: f64) -> Form {
        Form {
            terms: self.terms.iter().map(|(w, t)| (alpha * w, t.clone())).collect(),
        }
    }

    /// True when no term nests another form, so every argument is visible at
    /// the top level.
    pub fn is_flat(&self) -> bool {
        self.terms.iter().all(|(_, t)| match t {
            Term::Integral(i) => !i.integrand.contains_nested(),
            Term::Delta(d) => {
                !d.operand.contains_nested() && !matches!(d.dual_operand, DualOperand::Form(_))
            }
            _ => false,
        })
    }
}

impl Mul<Form> for f64 {
    type Output = Form;

    fn mul(self, rhs: Form) -> Form {
        rhs.scaled(self)
    }
}

impl Neg for Form {
    type Output = Form;

    fn neg(self) -> Form {
        self.scaled(-1.0)
    }
}

/// Integrates `integrand` with `measure`.
pub fn integral(integrand: impl Into<Expr>, measure: Measure) -> Result<Form> {
    let integrand = integrand.into();
    let mut meshes: Vec<Mesh> = Vec::new();
    let mut dual_terminal = None;
    integrand.for_each_terminal(&mut |t| {
        if let Some(s) = t.space() {
            if s.is_dual() {
                dual_terminal.get_or_insert_with(|| t.to_string());
            }
            if !meshes.contains(&s.mesh()) {
                meshes.push(s.mesh());
            }
        }
    });
    if let Some(name) = dual_terminal {
        return Err(Error::SpaceKind(format!(
            "`{name}` lives in a dual space and cannot appear in an integrand"
        )));
    }
    if meshes.len() > 1 {
        return Err(Error::MeshMismatch(format!(
            "integrand `{integrand}` references {} meshes",
            meshes.len()
        )));
    }
    let mesh = match (meshes.first().copied(), measure.mesh) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::MeshMismatch(format!(
                "integrand lives on {a} but the measure is over {b}"
            )))
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => {
            let mut nested = None;
            integrand.for_each_nested(&mut |g| {
                if nested.is_none() {
                    nested = analysis::output_space(g).ok().flatten();
                }
            });
            nested.map(|s| s.mesh()).ok_or_else(|| {
                Error::MeshMismatch(format!("cannot infer a mesh for `{integrand}`"))
            })?
        }
    };
    Ok(Form::single(Term::Integral(Integral { integrand, mesh })))
}

/// Sum of two forms with identical argument signatures.
pub fn form_add(a: &Form, b: &Form) -> Result<Form> {
    let sa = analysis::arguments(a)?;
    let sb = analysis::arguments(b)?;
    if sa.slots() != sb.slots() {
        return Err(Error::SignatureMismatch(format!(
            "cannot add a form over {sa} to a form over {sb}"
        )));
    }
    let mut terms = a.terms.clone();
    terms.extend(b.terms.iter().cloned());
    Ok(Form { terms })
}

/// Generalised dual evaluation `δ(operand, dual_operand)`.
pub fn delta(operand: impl Into<Expr>, dual_operand: impl Into<DualOperand>) -> Result<Form> {
    let operand = operand.into();
    let dual_operand = dual_operand.into();
    let mut bad = None;
    operand.for_each_terminal(&mut |t| {
        if t.space().is_some_and(|s| s.is_dual()) {
            bad.get_or_insert_with(|| t.to_string());
        }
    });
    if let Some(name) = bad {
        return Err(Error::NotInterpolable(format!(
            "`{name}` is dual-valued and cannot be evaluated at nodes"
        )));
    }
    if let DualOperand::Coargument(a) = &dual_operand {
        if !a.is_coargument() {
            return Err(Error::SpaceKind(format!(
                "`{a}` is a primal argument; the dual slot needs a coargument"
            )));
        }
    }
    Ok(Form::single(Term::Delta(Delta {
        operand,
        dual_operand,
    })))
}

/// `f(c)`: evaluation of a cofunction or coargument, sugar for `δ(c, f)`.
pub fn dual_call(f: impl Into<DualOperand>, c: impl Into<Expr>) -> Result<Form> {
    delta(c, f)
}

pub fn external_operator(
    operands: Vec<Expr>,
    output_space: Space,
    evaluator_id: &str,
) -> Result<Form> {
    if !registry::is_registered(evaluator_id) {
        return Err(Error::UnknownEvaluator(evaluator_id.to_string()));
    }
    if output_space.is_dual() {
        return Err(Error::SpaceKind(
            "external operators produce functions in a primal space".into(),
        ));
    }
    Ok(Form::single(Term::External(ExternalOperator {
        operands,
        output_space,
        evaluator: evaluator_id.to_string(),
    })))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Integral(i) => match i.integrand {
                Expr::Sum(_) => write!(f, "({}) * dx", i.integrand),
                _ => write!(f, "{} * dx", i.integrand),
            },
            Term::Delta(d) => write!(f, "Delta({}, {})", d.operand, d.dual_operand),
            Term::Cofunction(c) => c.fmt(f),
            Term::External(e) => {
                write!(f, "{}[", e.evaluator)?;
                for (i, o) in e.operands.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    o.fmt(f)?;
                }
                f.write_str("]")
            }
            Term::Adjoint(g) => write!(f, "adjoint({g})"),
        }
    }
}

impl fmt::Display for DualOperand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualOperand::Coargument(a) => a.fmt(f),
            DualOperand::Cofunction(c) => c.fmt(f),
            DualOperand::Form(g) => g.fmt(f),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, t)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *w == 1.0 {
                t.fmt(f)?;
            } else {
                write!(f, "{w} * ({t})")?;
            }
        }
        Ok(())
    }
}
