//! Lowering of composite forms into a DAG of primitive assemblies and
//! tensor contractions.
//!
//! Nested forms are assembled first, innermost outward. A nested form with
//! no surviving arguments becomes a temporary function (or cofunction)
//! substituted into the enclosing form. One with surviving arguments is
//! replaced by a fresh argument in the dual of its argument-0 space, numbered
//! one past the largest argument of the enclosing term; the enclosing result
//! is then contracted over that argument with the nested result's argument
//! 0 axis.

use std::fmt;

use super::signature::SpaceNames;
use super::{arguments, validate};
use crate::error::{Error, Result};
use crate::fem::Space;
use crate::symbolic::{Argument, Coefficient, Delta, DualOperand, Expr, Form, Term, Terminal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepId(pub usize);

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "%{}", self.0)
    }
}

/// One index of an intermediate tensor. Temporary axes belong to fresh
/// arguments introduced by substitution and are contracted away before the
/// end of the plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub number: u32,
    pub space: Space,
    pub temporary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOp {
    /// Assemble a single term containing no nested forms. `bindings` supply
    /// the values of temporaries from earlier steps.
    Primitive {
        term: Term,
        bindings: Vec<(Coefficient, StepId)>,
        temporaries: Vec<u32>,
    },
    /// Assembly of a cofunction is the identity.
    Identity { cofunction: Coefficient },
    /// Contract temporary axis `number` of `outer` with axis 0 of `inner`.
    Contract {
        outer: StepId,
        inner: StepId,
        number: u32,
    },
    /// Exchange axes 0 and 1.
    Transpose { source: StepId },
    Combine { terms: Vec<(f64, StepId)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub op: StepOp,
    pub axes: Vec<Axis>,
}

/// Steps in topological order; the last one yields the result.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyPlan {
    steps: Vec<Step>,
}

impl AssemblyPlan {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn root(&self) -> StepId {
        StepId(self.steps.len() - 1)
    }

    pub fn step(&self, id: StepId) -> &Step {
        &self.steps[id.0]
    }

    /// Structural check of every contraction and combination.
    pub fn check(&self) -> Result<()> {
        for (i, step) in self.steps.iter().enumerate() {
            let before = |id: &StepId| {
                if id.0 < i {
                    Ok(&self.steps[id.0])
                } else {
                    Err(Error::Contract(format!("step %{i} depends on later step {id}")))
                }
            };
            match &step.op {
                StepOp::Contract {
                    outer,
                    inner,
                    number,
                } => {
                    let o = before(outer)?
                        .axes
                        .iter()
                        .find(|a| a.temporary && a.number == *number)
                        .ok_or_else(|| {
                            Error::Contract(format!("{outer} has no temporary axis #{number}"))
                        })?;
                    let n = before(inner)?
                        .axes
                        .iter()
                        .find(|a| !a.temporary && a.number == 0)
                        .ok_or_else(|| Error::Contract(format!("{inner} has no axis #0")))?;
                    if o.space.dual() != n.space || o.space.dim() != n.space.dim() {
                        return Err(Error::Contract(format!(
                            "%{i}: axis #{number} over {} cannot contract with axis #0 over {}",
                            o.space, n.space
                        )));
                    }
                }
                StepOp::Combine { terms } => {
                    for (_, id) in terms {
                        if before(id)?.axes != step.axes {
                            return Err(Error::Contract(format!(
                                "%{i}: {id} has different axes from the combination"
                            )));
                        }
                    }
                }
                StepOp::Transpose { source } => {
                    before(source)?;
                }
                StepOp::Primitive { bindings, .. } => {
                    for (_, id) in bindings {
                        before(id)?;
                    }
                }
                StepOp::Identity { .. } => {}
            }
        }
        if let Some(last) = self.steps.last() {
            if last.axes.iter().any(|a| a.temporary) {
                return Err(Error::Contract("uncontracted temporary axis in result".into()));
            }
        }
        Ok(())
    }

    /// Human-readable listing with spaces named through `names`.
    pub fn render(&self, names: &SpaceNames) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let body = match &step.op {
                StepOp::Primitive { term, bindings, .. } => {
                    let mut s = format!("assemble {term}");
                    for (c, id) in bindings {
                        s.push_str(&format!(" [{c} := {id}]"));
                    }
                    s
                }
                StepOp::Identity { cofunction } => format!("identity {cofunction}"),
                StepOp::Contract {
                    outer,
                    inner,
                    number,
                } => format!("contract {outer}[#{number}] with {inner}[#0]"),
                StepOp::Transpose { source } => format!("transpose {source}"),
                StepOp::Combine { terms } => terms
                    .iter()
                    .map(|(w, id)| if *w == 1.0 { id.to_string() } else { format!("{w}*{id}") })
                    .collect::<Vec<_>>()
                    .join(" + "),
            };
            let axes = step
                .axes
                .iter()
                .map(|a| {
                    let t = if a.temporary { "~" } else { "" };
                    format!("#{}{t} {}", a.number, names.name(a.space))
                })
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!("%{i} = {body}  -> [{axes}]\n"));
        }
        out
    }
}

impl fmt::Display for AssemblyPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&SpaceNames::new()))
    }
}

/// Lowers a validated form. Identical forms yield identical plans.
pub fn plan(form: &Form) -> Result<AssemblyPlan> {
    validate(form).map_err(Error::InvalidForm)?;
    let mut planner = Planner::default();
    planner.lower_form(form)?;
    let plan = AssemblyPlan {
        steps: planner.steps,
    };
    plan.check()?;
    Ok(plan)
}

#[derive(Default)]
struct Planner {
    steps: Vec<Step>,
    temporaries: u64,
}

/// Collects the side effects of substituting nested forms inside one term.
struct Substitution {
    next_number: u32,
    fresh: Vec<u32>,
    contractions: Vec<(StepId, u32)>,
    bindings: Vec<(Coefficient, StepId)>,
}

impl Substitution {
    fn new(next_number: u32) -> Self {
        Substitution {
            next_number,
            fresh: Vec::new(),
            contractions: Vec::new(),
            bindings: Vec::new(),
        }
    }
}

fn sorted(mut axes: Vec<Axis>) -> Vec<Axis> {
    axes.sort_by_key(|a| (a.number, a.temporary));
    axes
}

/// One past the largest argument number visible outside nested forms.
fn next_free_number<'a>(exprs: impl IntoIterator<Item = &'a Expr>, extra: Option<u32>) -> u32 {
    let mut max: Option<u32> = extra;
    for e in exprs {
        e.for_each_terminal(&mut |t| {
            if let Terminal::Argument(a) = t {
                max = Some(max.map_or(a.number(), |m| m.max(a.number())));
            }
        });
    }
    max.map_or(0, |m| m + 1)
}

/// Whether a nested form with surviving arguments sits below a sum, in which
/// case substituting a fresh argument would break multilinearity.
fn needs_expansion(e: &Expr) -> bool {
    fn has_open_nested(e: &Expr) -> bool {
        let mut found = false;
        e.for_each_nested(&mut |g| {
            if arguments(g).map(|s| s.arity() > 1).unwrap_or(false) {
                found = true;
            }
        });
        found
    }
    fn walk(e: &Expr) -> bool {
        match e {
            Expr::Sum(_) => has_open_nested(e),
            Expr::Form(_) | Expr::Terminal(_) => false,
            _ => e.children().iter().any(walk),
        }
    }
    walk(e)
}

impl Planner {
    fn push(&mut self, op: StepOp, axes: Vec<Axis>) -> StepId {
        self.steps.push(Step {
            op,
            axes: sorted(axes),
        });
        StepId(self.steps.len() - 1)
    }

    fn axes(&self, id: StepId) -> &[Axis] {
        &self.steps[id.0].axes
    }

    fn lower_form(&mut self, form: &Form) -> Result<StepId> {
        let mut parts = Vec::new();
        for (w, term) in form.terms() {
            for (w2, id) in self.lower_term(term)? {
                parts.push((w * w2, id));
            }
        }
        match parts.as_slice() {
            [(w, id)] if *w == 1.0 => Ok(*id),
            [] => Err(Error::Arity("cannot plan an empty form".into())),
            _ => {
                let axes = self.axes(parts[0].1).to_vec();
                Ok(self.push(StepOp::Combine { terms: parts }, axes))
            }
        }
    }

    fn lower_term(&mut self, term: &Term) -> Result<Vec<(f64, StepId)>> {
        match term {
            Term::Cofunction(f) => {
                let axes = vec![Axis {
                    number: 0,
                    space: f.space().primal(),
                    temporary: false,
                }];
                Ok(vec![(1.0, self.push(StepOp::Identity { cofunction: f.clone() }, axes))])
            }
            Term::Adjoint(g) => {
                let source = self.lower_form(g)?;
                let axes = self
                    .axes(source)
                    .iter()
                    .map(|a| Axis {
                        number: super::swap01(a.number),
                        ..*a
                    })
                    .collect();
                Ok(vec![(1.0, self.push(StepOp::Transpose { source }, axes))])
            }
            Term::Integral(i) if needs_expansion(i.integrand()) => i
                .integrand()
                .monomials()
                .into_iter()
                .map(|(w, factors)| {
                    let mut part = i.clone();
                    part.integrand = Expr::from_monomial(1.0, factors);
                    Ok((w, self.lower_primitive(&Term::Integral(part))?))
                })
                .collect(),
            Term::Delta(d) if needs_expansion(d.operand()) => d
                .operand()
                .monomials()
                .into_iter()
                .map(|(w, factors)| {
                    let part = Delta {
                        operand: Expr::from_monomial(1.0, factors),
                        dual_operand: d.dual_operand().clone(),
                    };
                    Ok((w, self.lower_primitive(&Term::Delta(part))?))
                })
                .collect(),
            Term::External(e) if e.operands().iter().any(needs_expansion) => Err(Error::Arity(
                "an argument-bearing nested form under a sum inside an external operand cannot be planned".into(),
            )),
            _ => Ok(vec![(1.0, self.lower_primitive(term)?)]),
        }
    }

    fn temporary(&mut self, space: Space) -> Coefficient {
        self.temporaries += 1;
        Coefficient::temporary(space, self.temporaries, format!("tmp_{}", self.temporaries))
    }

    fn substitute_expr(&mut self, e: &Expr, sub: &mut Substitution) -> Result<Expr> {
        e.try_map(&mut |node| match node {
            Expr::Form(g) => {
                let inner = self.lower_form(g)?;
                let sig = arguments(g)?;
                let zero = sig.get(0).expect("validated nested form has argument 0");
                let value_space = zero.space.dual();
                if sig.arity() == 1 {
                    let tmp = self.temporary(value_space);
                    sub.bindings.push((tmp.clone(), inner));
                    Ok(Some(Expr::from(tmp)))
                } else {
                    let n = sub.next_number;
                    sub.next_number += 1;
                    sub.fresh.push(n);
                    sub.contractions.push((inner, n));
                    self.temporaries += 1;
                    let label = format!("tmp_{}", self.temporaries);
                    Ok(Some(Argument::fresh(value_space, n).named(&label).into()))
                }
            }
            _ => Ok(None),
        })
    }

    fn substitute_dual(&mut self, d: &DualOperand, sub: &mut Substitution) -> Result<DualOperand> {
        // a dual-slot form and an expression-slot form substitute identically:
        // a temporary (co)function or a fresh (co)argument in the value space
        match d {
            DualOperand::Form(_) => DualOperand::from_expr(self.substitute_expr(&d.to_expr(), sub)?),
            other => Ok(other.clone()),
        }
    }

    fn lower_primitive(&mut self, term: &Term) -> Result<StepId> {
        let (replaced, sub) = match term {
            Term::Integral(i) => {
                let mut sub = Substitution::new(next_free_number([i.integrand()], None));
                let mut part = i.clone();
                part.integrand = self.substitute_expr(i.integrand(), &mut sub)?;
                (Term::Integral(part), sub)
            }
            Term::Delta(d) => {
                let coarg = match d.dual_operand() {
                    DualOperand::Coargument(a) => Some(a.number()),
                    _ => None,
                };
                let mut sub = Substitution::new(next_free_number([d.operand()], coarg));
                let operand = self.substitute_expr(d.operand(), &mut sub)?;
                let dual_operand = self.substitute_dual(d.dual_operand(), &mut sub)?;
                (
                    Term::Delta(Delta {
                        operand,
                        dual_operand,
                    }),
                    sub,
                )
            }
            Term::External(e) => {
                // the intrinsic coargument is argument 0
                let mut sub = Substitution::new(next_free_number(e.operands(), Some(0)));
                let mut part = e.clone();
                part.operands = e
                    .operands()
                    .iter()
                    .map(|o| self.substitute_expr(o, &mut sub))
                    .collect::<Result<_>>()?;
                (Term::External(part), sub)
            }
            Term::Cofunction(_) | Term::Adjoint(_) => unreachable!("handled in lower_term"),
        };

        let sig = arguments(&Form::single(replaced.clone()))?;
        let axes = sig
            .ascending()
            .map(|s| Axis {
                number: s.number,
                space: s.space,
                temporary: sub.fresh.contains(&s.number),
            })
            .collect();
        let mut current = self.push(
            StepOp::Primitive {
                term: replaced,
                bindings: sub.bindings,
                temporaries: sub.fresh,
            },
            axes,
        );
        for (inner, number) in sub.contractions {
            let mut axes: Vec<Axis> = self
                .axes(current)
                .iter()
                .filter(|a| !(a.temporary && a.number == number))
                .copied()
                .collect();
            axes.extend(
                self.axes(inner)
                    .iter()
                    .filter(|a| !(a.number == 0 && !a.temporary))
                    .copied(),
            );
            current = self.push(
                StepOp::Contract {
                    outer: current,
                    inner,
                    number,
                },
                axes,
            );
        }
        Ok(current)
    }
}
