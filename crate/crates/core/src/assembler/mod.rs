//! Dense reference assembly.

mod primitive;
pub mod quadrature;
mod tensor;

pub use quadrature::{Quadrature, MAX_QUADRATURE_DEGREE};
pub use tensor::{apply, transpose, AssembledTensor, DenseMatrix, DenseVector};

use primitive::{Context, Overrides};
use tensor::LabeledTensor;

use crate::analysis::{plan, AssemblyPlan, StepOp};
use crate::error::{Error, Result};
use crate::fem::Space;
use crate::symbolic::{argument, delta, Delta, Expr, Form, Term};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Overrides the estimated quadrature degree of every integral.
    pub quadrature_degree: Option<u32>,
}

pub fn assemble(form: &Form) -> Result<AssembledTensor> {
    assemble_with(form, &AssemblyOptions::default())
}

pub fn assemble_with(form: &Form, options: &AssemblyOptions) -> Result<AssembledTensor> {
    execute_plan_with(&plan(form)?, options)
}

pub fn assemble_delta(term: &Delta) -> Result<AssembledTensor> {
    assemble(&Form::single(Term::Delta(term.clone())))
}

/// Nodal interpolation of `e` into the primal space `space`.
pub fn interpolate(e: impl Into<Expr>, space: Space) -> Result<DenseVector> {
    if space.is_dual() {
        return Err(Error::PrimalRequired);
    }
    let form = delta(e, argument(space.dual(), 0)?)?;
    match assemble(&form)? {
        AssembledTensor::Vector(v) => Ok(v),
        other => Err(Error::Arity(format!(
            "interpolated expression must be argument-free, got a {}",
            other.kind()
        ))),
    }
}

pub fn execute_plan(plan: &AssemblyPlan) -> Result<AssembledTensor> {
    execute_plan_with(plan, &AssemblyOptions::default())
}

pub fn execute_plan_with(plan: &AssemblyPlan, options: &AssemblyOptions) -> Result<AssembledTensor> {
    let mut results: Vec<LabeledTensor> = Vec::with_capacity(plan.steps().len());
    for (i, step) in plan.steps().iter().enumerate() {
        let get = |id: crate::analysis::StepId| {
            results
                .get(id.0)
                .ok_or_else(|| Error::Contract(format!("step %{i} reads unexecuted {id}")))
        };
        let tensor = match &step.op {
            StepOp::Primitive { term, bindings, .. } => {
                let mut overrides = Overrides::new();
                for (c, id) in bindings {
                    overrides.insert(c.id(), get(*id)?.data.clone());
                }
                let ctx = Context {
                    overrides: &overrides,
                    quadrature_degree: options.quadrature_degree,
                };
                match term {
                    Term::Integral(t) => primitive::integral(t, &step.axes, &ctx)?,
                    Term::Delta(t) => primitive::delta(t, &step.axes, &ctx)?,
                    Term::External(t) => primitive::external(t, &step.axes, &ctx)?,
                    Term::Cofunction(f) => primitive::identity(f, &step.axes, &ctx)?,
                    Term::Adjoint(_) => {
                        return Err(Error::Contract("adjoint reached primitive assembly".into()))
                    }
                }
            }
            StepOp::Identity { cofunction } => {
                let none = Overrides::new();
                let ctx = Context {
                    overrides: &none,
                    quadrature_degree: None,
                };
                primitive::identity(cofunction, &step.axes, &ctx)?
            }
            StepOp::Contract {
                outer,
                inner,
                number,
            } => get(*outer)?.contract(get(*inner)?, *number)?,
            StepOp::Transpose { source } => get(*source)?.clone().swap01(),
            StepOp::Combine { terms } => {
                let mut acc = LabeledTensor::zeros(step.axes.clone());
                for (w, id) in terms {
                    let t = get(*id)?;
                    if t.axes != acc.axes {
                        return Err(Error::Contract(format!("%{i}: {id} has mismatched axes")));
                    }
                    for (a, b) in acc.data.iter_mut().zip(&t.data) {
                        *a += w * b;
                    }
                }
                acc
            }
        };
        if tensor.axes != step.axes {
            return Err(Error::Contract(format!(
                "%{i} produced axes that differ from the plan"
            )));
        }
        results.push(tensor);
    }
    results
        .pop()
        .ok_or_else(|| Error::Contract("empty plan".into()))?
        .into_assembled()
}

#[cfg(test)]
mod tests;
