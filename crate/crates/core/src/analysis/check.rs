//! Argument extraction under the consumption rule.
//!
//! A form nested as an operand of another form contributes its arguments
//! except its own argument 0, which the substitution consumes. A top-level
//! form keeps its argument 0.

use std::collections::BTreeMap;

use super::diagnostic::{Code, Diagnostic};
use crate::fem::{Mesh, Space};
use crate::symbolic::{DualOperand, Expr, Form, Term, Terminal};

pub(crate) type Args = BTreeMap<u32, Space>;

#[derive(Clone, Copy)]
enum Valued {
    /// Used where a function is expected; argument 0 must be a coargument.
    Primal,
    /// Used in the dual slot of a delta; argument 0 must be primal.
    Dual,
}

#[derive(Default)]
pub(crate) struct Checker {
    pub(crate) diagnostics: Vec<Diagnostic>,
    path: Vec<usize>,
}

impl Checker {
    fn report(&mut self, code: Code, message: String) {
        self.diagnostics
            .push(Diagnostic::error(code, message, self.path.clone()));
    }

    fn at<T>(&mut self, index: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(index);
        let out = f(self);
        self.path.pop();
        out
    }

    fn union(&mut self, mut a: Args, b: Args) -> Args {
        for (n, s) in b {
            if let Some(prev) = a.get(&n) {
                let msg = if *prev == s {
                    format!("argument {n} occurs twice in a product")
                } else {
                    format!("two arguments numbered {n} ({prev} and {s})")
                };
                self.report(Code::DupArgNumber, msg);
            } else {
                a.insert(n, s);
            }
        }
        a
    }

    /// Arguments of `form` in its own scope, argument 0 included.
    pub(crate) fn form(&mut self, form: &Form) -> Args {
        let mut reference: Option<Args> = None;
        for (i, (_, term)) in form.terms().iter().enumerate() {
            let args = self.at(i, |c| c.term(term));
            match &reference {
                None => reference = Some(args),
                Some(r) if *r != args => self.at(i, |c| {
                    c.report(
                        Code::SignatureMismatch,
                        format!(
                            "term arguments {:?} differ from {:?}",
                            args.keys().collect::<Vec<_>>(),
                            r.keys().collect::<Vec<_>>()
                        ),
                    )
                }),
                Some(_) => {}
            }
        }
        reference.unwrap_or_default()
    }

    fn term(&mut self, term: &Term) -> Args {
        match term {
            Term::Integral(i) => self.at(0, |c| c.expr(i.integrand(), Some(i.mesh()))),
            Term::Delta(d) => {
                let a = self.at(0, |c| c.expr(d.operand(), None));
                let b = self.at(1, |c| match d.dual_operand() {
                    DualOperand::Coargument(arg) => {
                        if !arg.is_coargument() {
                            c.report(
                                Code::SpaceMismatch,
                                format!("`{arg}` in the dual slot is not a coargument"),
                            );
                        }
                        Args::from([(arg.number(), arg.space())])
                    }
                    DualOperand::Cofunction(_) => Args::new(),
                    DualOperand::Form(g) => c.nested(g, Valued::Dual, None),
                });
                self.union(a, b)
            }
            Term::Cofunction(f) => Args::from([(0, f.space().primal())]),
            Term::External(e) => {
                let mut args = Args::from([(0, e.output_space().dual())]);
                for (i, o) in e.operands().iter().enumerate() {
                    let b = self.at(i, |c| c.expr(o, None));
                    args = self.union(args, b);
                }
                args
            }
            Term::Adjoint(g) => {
                let inner = self.at(0, |c| c.form(g));
                inner
                    .into_iter()
                    .map(|(n, s)| (super::swap01(n), s))
                    .collect()
            }
        }
    }

    fn check_mesh(&mut self, what: &dyn std::fmt::Display, space: Space, mesh: Option<Mesh>) {
        if let Some(m) = mesh {
            if space.mesh() != m {
                self.report(
                    Code::MeshMismatch,
                    format!("`{what}` lives on {} but is integrated over {m}", space.mesh()),
                );
            }
        }
    }

    fn expr(&mut self, e: &Expr, mesh: Option<Mesh>) -> Args {
        match e {
            Expr::Terminal(t) => {
                if let Some(s) = t.space() {
                    if s.is_dual() {
                        self.report(
                            Code::SpaceMismatch,
                            format!("`{t}` is dual-valued and cannot be used as a function"),
                        );
                        return Args::new();
                    }
                    self.check_mesh(t, s, mesh);
                }
                match t {
                    Terminal::Argument(a) => Args::from([(a.number(), a.space())]),
                    _ => Args::new(),
                }
            }
            Expr::Sum(children) => {
                let mut reference: Option<Args> = None;
                for (i, c) in children.iter().enumerate() {
                    let args = self.at(i, |k| k.expr(c, mesh));
                    match &reference {
                        None => reference = Some(args),
                        Some(r) if *r != args => self.at(i, |k| {
                            k.report(
                                Code::SignatureMismatch,
                                "summands have different arguments".into(),
                            )
                        }),
                        Some(_) => {}
                    }
                }
                reference.unwrap_or_default()
            }
            Expr::Product(children) => {
                let mut args = Args::new();
                for (i, c) in children.iter().enumerate() {
                    let b = self.at(i, |k| k.expr(c, mesh));
                    args = self.at(i, |k| k.union(args, b));
                }
                args
            }
            Expr::Scale(_, c) => self.at(0, |k| k.expr(c, mesh)),
            Expr::Form(g) => self.nested(g, Valued::Primal, mesh),
        }
    }

    fn nested(&mut self, g: &Form, valued: Valued, mesh: Option<Mesh>) -> Args {
        let before = self.diagnostics.len();
        let mut args = self.at(0, |c| c.form(g));
        let zero = args.remove(&0);
        if self.diagnostics.len() > before {
            // the inner error already explains any kind mismatch
            return args;
        }
        match (zero, valued) {
            (None, _) => self.report(
                Code::SpaceMismatch,
                format!("nested form `{g}` has no argument 0 to consume"),
            ),
            (Some(s), Valued::Primal) if !s.is_dual() => self.report(
                Code::SpaceMismatch,
                format!("nested form `{g}` produces a cofunction where a function is expected"),
            ),
            (Some(s), Valued::Dual) if s.is_dual() => self.report(
                Code::SpaceMismatch,
                format!("nested form `{g}` produces a function where a cofunction is expected"),
            ),
            (Some(s), _) => self.check_mesh(&"nested form value", s, mesh),
        }
        args
    }
}
