//! Structural rewrites of forms: adjoint, action and replace.
//!
//! Argument numbering is scoped. Inside a nested form argument 0 is local to
//! that form (it is consumed by the substitution), while every other number
//! refers to the enclosing form. The walkers below honour this by hiding
//! argument 0 whenever they descend into a nested form.

use super::expr::Expr;
use super::form::{Delta, DualOperand, Form, Term};
use super::terminal::{Argument, Coefficient, Terminal};
use crate::analysis::{self, arguments};
use crate::error::{Error, Result};
use crate::fem::Space;

pub(crate) enum ArgEdit {
    Keep,
    Renumber(u32),
    Replace(Expr),
}

type Edit<'a> = dyn FnMut(&Argument) -> Result<ArgEdit> + 'a;

fn swap01(n: u32) -> u32 {
    match n {
        0 => 1,
        1 => 0,
        n => n,
    }
}

/// Applies `f` to every argument visible in the scope of `form`.
pub(crate) fn edit_arguments(form: &Form, f: &mut Edit<'_>) -> Result<Form> {
    let terms = form
        .terms()
        .iter()
        .map(|(w, t)| Ok((*w, edit_term(t, f)?)))
        .collect::<Result<_>>()?;
    Ok(Form::from_terms(terms))
}

fn edit_nested(form: &Form, f: &mut Edit<'_>) -> Result<Form> {
    edit_arguments(form, &mut |a: &Argument| {
        if a.number() == 0 {
            Ok(ArgEdit::Keep)
        } else {
            f(a)
        }
    })
}

fn edit_term(term: &Term, f: &mut Edit<'_>) -> Result<Term> {
    Ok(match term {
        Term::Integral(i) => {
            let mut i = i.clone();
            i.integrand = edit_expr(&i.integrand, f)?;
            Term::Integral(i)
        }
        Term::Delta(d) => {
            let operand = edit_expr(&d.operand, f)?;
            let dual_operand = match &d.dual_operand {
                DualOperand::Coargument(a) => match f(a)? {
                    ArgEdit::Keep => DualOperand::Coargument(a.clone()),
                    ArgEdit::Renumber(n) => DualOperand::Coargument(a.renumbered(n)),
                    ArgEdit::Replace(e) => DualOperand::from_expr(e)?,
                },
                DualOperand::Cofunction(c) => DualOperand::Cofunction(c.clone()),
                DualOperand::Form(g) => DualOperand::Form(Box::new(edit_nested(g, f)?)),
            };
            Term::Delta(Delta {
                operand,
                dual_operand,
            })
        }
        Term::Cofunction(c) => Term::Cofunction(c.clone()),
        Term::External(e) => {
            let mut e = e.clone();
            e.operands = e
                .operands
                .iter()
                .map(|o| edit_expr(o, f))
                .collect::<Result<_>>()?;
            Term::External(e)
        }
        Term::Adjoint(g) => {
            let inner = edit_arguments(g, &mut |a: &Argument| {
                let global = a.renumbered(swap01(a.number()));
                Ok(match f(&global)? {
                    ArgEdit::Renumber(n) => ArgEdit::Renumber(swap01(n)),
                    other => other,
                })
            })?;
            Term::Adjoint(Box::new(inner))
        }
    })
}

fn edit_expr(expr: &Expr, f: &mut Edit<'_>) -> Result<Expr> {
    expr.try_map(&mut |e| match e {
        Expr::Terminal(Terminal::Argument(a)) => Ok(Some(match f(a)? {
            ArgEdit::Keep => e.clone(),
            ArgEdit::Renumber(n) => a.renumbered(n).into(),
            ArgEdit::Replace(r) => r,
        })),
        Expr::Form(g) => Ok(Some(Expr::Form(Box::new(edit_nested(g, f)?)))),
        _ => Ok(None),
    })
}

/// Adjoint of a 2-form: arguments 0 and 1 exchanged.
///
/// Forms whose arguments are all visible at the top level are relabelled in
/// place; composite forms are wrapped so that nested argument 0 slots keep
/// their meaning. `adjoint(adjoint(F))` returns `F`.
pub fn adjoint(form: &Form) -> Result<Form> {
    let sig = arguments(form)?;
    let numbers: Vec<u32> = sig.ascending().map(|s| s.number).collect();
    if numbers != [0, 1] {
        return Err(Error::Arity(format!(
            "adjoint needs a 2-form with arguments 0 and 1, got {sig}"
        )));
    }
    if let [(w, Term::Adjoint(inner))] = form.terms() {
        if *w == 1.0 {
            return Ok((**inner).clone());
        }
    }
    if form.is_flat() {
        edit_arguments(form, &mut |a: &Argument| {
            Ok(ArgEdit::Renumber(swap01(a.number())))
        })
    } else {
        Ok(Form::single(Term::Adjoint(Box::new(form.clone()))))
    }
}

/// What the highest-numbered argument of a form can be replaced with.
#[derive(Debug, Clone)]
pub enum ActionOperand {
    Coefficient(Coefficient),
    Form(Form),
}

impl From<Coefficient> for ActionOperand {
    fn from(c: Coefficient) -> Self {
        ActionOperand::Coefficient(c)
    }
}

impl From<&Coefficient> for ActionOperand {
    fn from(c: &Coefficient) -> Self {
        ActionOperand::Coefficient(c.clone())
    }
}

impl From<Form> for ActionOperand {
    fn from(f: Form) -> Self {
        ActionOperand::Form(f)
    }
}

impl From<&Form> for ActionOperand {
    fn from(f: &Form) -> Self {
        ActionOperand::Form(f.clone())
    }
}

/// Replaces the highest-numbered argument of `form` with `operand`.
///
/// A form operand is nested in that slot; its own argument 0 is consumed and
/// its remaining arguments continue the numbering of `form`.
pub fn action(form: &Form, operand: impl Into<ActionOperand>) -> Result<Form> {
    let sig = arguments(form)?;
    let Some(top) = sig.highest() else {
        return Err(Error::Arity("the action of a 0-form is undefined".into()));
    };
    let (n, slot_space) = (top.number, top.space);
    let replacement = match operand.into() {
        ActionOperand::Coefficient(c) => {
            if c.space() != slot_space {
                return Err(Error::SpaceMismatch(format!(
                    "argument {n} lives in {slot_space}, `{c}` in {}",
                    c.space()
                )));
            }
            Expr::from(c)
        }
        ActionOperand::Form(g) => {
            let out = analysis::output_space(&g)?;
            if out != Some(slot_space) {
                return Err(Error::SpaceMismatch(format!(
                    "argument {n} lives in {slot_space}; the operand form does not produce a value there"
                )));
            }
            let inner = arguments(&g)?;
            if n == 0 && inner.arity() > 1 {
                return Err(Error::Arity(
                    "a form with free arguments cannot be substituted for argument 0".into(),
                ));
            }
            let shifted = shift_arguments(&g, n)?;
            Expr::Form(Box::new(shifted))
        }
    };

    let mut substituted = false;
    let mut terms = Vec::with_capacity(form.terms().len());
    for (w, t) in form.terms() {
        let term = match t {
            Term::Cofunction(f) if n == 0 => {
                substituted = true;
                Term::Delta(Delta {
                    operand: replacement.clone(),
                    dual_operand: DualOperand::Cofunction(f.clone()),
                })
            }
            Term::External(_) if n == 0 => {
                substituted = true;
                Term::Delta(Delta {
                    operand: Expr::Form(Box::new(Form::single(t.clone()))),
                    dual_operand: DualOperand::from_expr(replacement.clone())?,
                })
            }
            Term::Adjoint(inner) if n <= 1 && has_intrinsic_argument(inner) => {
                return Err(Error::Arity(
                    "action on an intrinsic argument under an adjoint is not supported".into(),
                ));
            }
            _ => edit_term(t, &mut |a: &Argument| {
                if a.number() == n {
                    substituted = true;
                    Ok(ArgEdit::Replace(replacement.clone()))
                } else {
                    Ok(ArgEdit::Keep)
                }
            })?,
        };
        terms.push((*w, term));
    }
    debug_assert!(substituted);
    Ok(Form::from_terms(terms))
}

fn has_intrinsic_argument(form: &Form) -> bool {
    form.terms()
        .iter()
        .any(|(_, t)| matches!(t, Term::Cofunction(_) | Term::External(_)))
}

/// Moves the non-zero arguments of `g` so that its argument 1 takes number
/// `n`, the slot it is substituted into.
fn shift_arguments(g: &Form, n: u32) -> Result<Form> {
    if n == 1 {
        return Ok(g.clone());
    }
    edit_arguments(g, &mut |a: &Argument| {
        Ok(match a.number() {
            0 => ArgEdit::Keep,
            k => ArgEdit::Renumber(k + n - 1),
        })
    })
}

/// Value space of an expression used as a replacement key or value; `None`
/// for scalar-valued expressions that are not tied to a space.
fn value_space(e: &Expr) -> Result<Option<Space>> {
    match e {
        Expr::Terminal(t) => Ok(t.space()),
        Expr::Form(g) => analysis::output_space(g),
        _ => Ok(None),
    }
}

/// Structural substitution of subterms.
pub fn replace(form: &Form, mapping: &[(Expr, Expr)]) -> Result<Form> {
    if mapping.is_empty() {
        return Ok(form.clone());
    }
    for (from, to) in mapping {
        let (a, b) = (value_space(from)?, value_space(to)?);
        let compatible = match (a, b) {
            (Some(s), Some(t)) => s == t,
            (Some(s), None) => !s.is_dual(),
            (None, Some(t)) => !t.is_dual(),
            (None, None) => true,
        };
        if !compatible {
            return Err(Error::SpaceMismatch(format!(
                "cannot replace `{from}` with `{to}`"
            )));
        }
    }
    replace_in_form(form, mapping)
}

fn lookup<'m>(mapping: &'m [(Expr, Expr)], e: &Expr) -> Option<&'m Expr> {
    mapping.iter().find(|(from, _)| from == e).map(|(_, to)| to)
}

fn replace_in_form(form: &Form, mapping: &[(Expr, Expr)]) -> Result<Form> {
    let terms = form
        .terms()
        .iter()
        .map(|(w, t)| Ok((*w, replace_in_term(t, mapping)?)))
        .collect::<Result<_>>()?;
    Ok(Form::from_terms(terms))
}

fn replace_in_term(term: &Term, mapping: &[(Expr, Expr)]) -> Result<Term> {
    Ok(match term {
        Term::Integral(i) => {
            let mut i = i.clone();
            i.integrand = replace_in_expr(&i.integrand, mapping)?;
            Term::Integral(i)
        }
        Term::Delta(d) => {
            let operand = replace_in_expr(&d.operand, mapping)?;
            let as_expr = d.dual_operand.to_expr();
            let dual_operand = match lookup(mapping, &as_expr) {
                Some(to) => DualOperand::from_expr(to.clone())?,
                None => match &d.dual_operand {
                    DualOperand::Form(g) => DualOperand::Form(Box::new(replace_in_form(g, mapping)?)),
                    other => other.clone(),
                },
            };
            Term::Delta(Delta {
                operand,
                dual_operand,
            })
        }
        Term::Cofunction(c) => {
            match lookup(mapping, &Expr::from(c)) {
                Some(Expr::Terminal(Terminal::Coefficient(to))) if to.is_cofunction() => {
                    Term::Cofunction(to.clone())
                }
                Some(Expr::Form(g)) if g.terms().len() == 1 => g.terms()[0].1.clone(),
                Some(other) => {
                    return Err(Error::SpaceMismatch(format!(
                        "cannot replace cofunction `{c}` with `{other}`"
                    )))
                }
                None => term.clone(),
            }
        }
        Term::External(e) => {
            let mut e = e.clone();
            e.operands = e
                .operands
                .iter()
                .map(|o| replace_in_expr(o, mapping))
                .collect::<Result<_>>()?;
            Term::External(e)
        }
        Term::Adjoint(g) => Term::Adjoint(Box::new(replace_in_form(g, mapping)?)),
    })
}

fn replace_in_expr(expr: &Expr, mapping: &[(Expr, Expr)]) -> Result<Expr> {
    expr.try_map(&mut |e| {
        if let Some(to) = lookup(mapping, e) {
            return Ok(Some(to.clone()));
        }
        match e {
            Expr::Form(g) => Ok(Some(Expr::Form(Box::new(replace_in_form(g, mapping)?)))),
            _ => Ok(None),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembler::{assemble, transpose};
    use crate::fem::{function_space, make_interval_mesh, Element};
    use crate::symbolic::{argument, delta, integral, make_function, Measure};

    fn spaces() -> (Space, Space) {
        let p1 = Element::lagrange(1).unwrap();
        (
            function_space(make_interval_mesh(2, 1.0).unwrap(), p1),
            function_space(make_interval_mesh(1, 1.0).unwrap(), p1),
        )
    }

    fn mass(s: Space) -> Form {
        integral(
            Expr::from(argument(s, 1).unwrap()) * argument(s, 0).unwrap(),
            Measure::dx(),
        )
        .unwrap()
    }

    #[test]
    fn adjoint_of_a_delta_relabels() {
        let (v, w) = spaces();
        let d = delta(argument(w, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap();
        let a = adjoint(&d).unwrap();
        let expected = delta(argument(w, 0).unwrap(), argument(v.dual(), 1).unwrap()).unwrap();
        assert_eq!(a, expected);
        assert_eq!(adjoint(&a).unwrap(), d);
    }

    #[test]
    fn adjoint_requires_two_arguments() {
        let (v, _) = spaces();
        let one = integral(Expr::from(argument(v, 0).unwrap()), Measure::dx()).unwrap();
        assert_eq!(adjoint(&one).unwrap_err().code(), "ARITY");
    }

    #[test]
    fn adjoint_of_composite_is_wrapped_and_involutive() {
        let (v, w) = spaces();
        let f2 = integral(
            Expr::from(delta(argument(w, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap())
                * argument(v, 0).unwrap(),
            Measure::dx(),
        )
        .unwrap();
        let a = adjoint(&f2).unwrap();
        assert!(matches!(a.terms(), [(_, Term::Adjoint(_))]));
        assert_eq!(adjoint(&a).unwrap(), f2);
        let sig = arguments(&a).unwrap();
        assert_eq!(sig.get(0).unwrap().space, w);
        assert_eq!(sig.get(1).unwrap().space, v);
    }

    #[test]
    fn action_on_mass_gives_row_sums() {
        let (_, w) = spaces();
        let c = make_function(w, vec![1.0, 1.0]).unwrap();
        let f = action(&mass(w), &c).unwrap();
        let h = assemble(&f).unwrap().into_vector().unwrap();
        assert!((h.values()[0] - 0.5).abs() < 1e-15 && (h.values()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn action_on_one_form_is_integral_of_coefficient() {
        let (v, _) = spaces();
        let f1 = integral(Expr::from(argument(v, 0).unwrap()), Measure::dx()).unwrap();
        let c = make_function(v, vec![1.0, 2.0, 5.0]).unwrap();
        let got = action(&f1, &c).unwrap();
        assert_eq!(got, integral(Expr::from(c), Measure::dx()).unwrap());
        assert_eq!(action(&got, &make_function(v, vec![0.0; 3]).unwrap()).unwrap_err().code(), "ARITY");
    }

    #[test]
    fn action_checks_spaces() {
        let (v, w) = spaces();
        let c = make_function(w, vec![1.0, 1.0]).unwrap();
        assert_eq!(action(&mass(v), &c).unwrap_err().code(), "SPACE_MISMATCH");
    }

    #[test]
    fn action_of_form_nests_with_shifted_numbers() {
        let (v, w) = spaces();
        let omega = argument(w.dual(), 1).unwrap();
        let inner = delta(argument(w, 0).unwrap(), omega).unwrap();
        // output of the mass form over W read as an operator is W*
        let f = action(&inner, mass(w)).unwrap();
        let sig = arguments(&f).unwrap();
        assert_eq!(sig.arity(), 2);
        assert_eq!(sig.get(1).unwrap().space, w);
        let direct = assemble(&f).unwrap().into_matrix().unwrap();
        let m = assemble(&mass(w)).unwrap().into_matrix().unwrap();
        assert!(direct.values().iter().zip(m.values()).all(|(a, b)| (a - b).abs() < 1e-15));
        let _ = v;
    }

    #[test]
    fn cofunction_action_becomes_delta() {
        let (v, _) = spaces();
        let f = crate::symbolic::make_cofunction(v.dual(), vec![1.0, 2.0, 3.0]).unwrap();
        let c = make_function(v, vec![1.0, 1.0, 1.0]).unwrap();
        let r = action(&Form::from_cofunction(&f).unwrap(), &c).unwrap();
        assert_eq!(r, delta(c, f).unwrap());
        assert_eq!(assemble(&r).unwrap().as_scalar(), Some(6.0));
    }

    #[test]
    fn replace_composite_delta_by_argument() {
        let (v, w) = spaces();
        let d = delta(argument(w, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap();
        let f2 = integral(Expr::from(d.clone()) * argument(v, 0).unwrap(), Measure::dx()).unwrap();
        let r = replace(&f2, &[(Expr::from(d.clone()), argument(v, 1).unwrap().into())]).unwrap();
        assert_eq!(r, mass(v));
        assert_eq!(replace(&f2, &[]).unwrap(), f2);
        let bad = replace(&f2, &[(Expr::from(d), argument(w, 1).unwrap().into())]);
        assert_eq!(bad.unwrap_err().code(), "SPACE_MISMATCH");
    }

    #[test]
    fn adjoint_matches_transpose() {
        let (v, w) = spaces();
        let d = delta(argument(w, 1).unwrap(), argument(v.dual(), 0).unwrap()).unwrap();
        let m = assemble(&d).unwrap().into_matrix().unwrap();
        let t = assemble(&adjoint(&d).unwrap()).unwrap().into_matrix().unwrap();
        assert_eq!(t, transpose(&m));
    }
}
