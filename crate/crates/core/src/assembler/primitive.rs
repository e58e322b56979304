//! Numerical evaluation of single terms free of nested forms.

use std::collections::HashMap;

use super::quadrature::Quadrature;
use super::tensor::{index_tuples, LabeledTensor};
use crate::analysis::Axis;
use crate::error::{Error, Result};
use crate::fem::{Point, Space};
use crate::symbolic::registry;
use crate::symbolic::{Coefficient, CoefficientId, Delta, DualOperand, Expr, ExternalOperator, Integral, Terminal};

/// Values of temporaries produced by earlier plan steps.
pub(crate) type Overrides = HashMap<CoefficientId, Vec<f64>>;

pub(crate) struct Context<'a> {
    pub(crate) overrides: &'a Overrides,
    pub(crate) quadrature_degree: Option<u32>,
}

impl Context<'_> {
    fn values<'c>(&'c self, c: &'c Coefficient) -> Result<&'c [f64]> {
        match self.overrides.get(&c.id()) {
            Some(v) => Ok(v),
            None => c.require_values(),
        }
    }
}

/// Polynomial degree of an integrand, used to choose the quadrature rule.
pub(crate) fn estimate_degree(e: &Expr) -> u32 {
    match e {
        Expr::Terminal(t) => match t {
            Terminal::Argument(a) => a.space().degree(),
            Terminal::Coefficient(c) => c.space().degree(),
            Terminal::SpatialCoordinate => 1,
            Terminal::Constant(_) => 0,
        },
        Expr::Sum(c) => c.iter().map(estimate_degree).max().unwrap_or(0),
        Expr::Product(c) => c.iter().map(estimate_degree).sum(),
        Expr::Scale(_, c) => estimate_degree(c),
        Expr::Form(_) => 0,
    }
}

/// Evaluates `e` at `point`, resolving argument `n` through `arg`.
fn eval(
    e: &Expr,
    point: &Point,
    ctx: &Context,
    arg: &dyn Fn(u32) -> Result<f64>,
) -> Result<f64> {
    Ok(match e {
        Expr::Terminal(t) => match t {
            Terminal::Argument(a) => arg(a.number())?,
            Terminal::Coefficient(c) => c.space().evaluate(ctx.values(c)?, point)?,
            Terminal::SpatialCoordinate => point.x(),
            Terminal::Constant(v) => *v,
        },
        Expr::Sum(c) => {
            let mut s = 0.0;
            for k in c {
                s += eval(k, point, ctx, arg)?;
            }
            s
        }
        Expr::Product(c) => {
            let mut s = 1.0;
            for k in c {
                s *= eval(k, point, ctx, arg)?;
            }
            s
        }
        Expr::Scale(w, c) => w * eval(c, point, ctx, arg)?,
        Expr::Form(_) => {
            return Err(Error::Contract(
                "nested form reached primitive assembly".into(),
            ))
        }
    })
}

fn axis_position(axes: &[Axis], number: u32) -> Result<usize> {
    axes.iter()
        .position(|a| a.number == number)
        .ok_or_else(|| Error::Contract(format!("argument {number} has no tensor axis")))
}

pub(crate) fn integral(term: &Integral, axes: &[Axis], ctx: &Context) -> Result<LabeledTensor> {
    let degree = match ctx.quadrature_degree {
        Some(d) => d,
        None => estimate_degree(term.integrand()),
    };
    let rule = Quadrature::for_degree(degree)?;
    let mesh = term.mesh();
    let mut out = LabeledTensor::zeros(axes.to_vec());
    let local_dims: Vec<usize> = axes.iter().map(|a| a.space.degree() as usize + 1).collect();
    for c in 0..mesh.n_cells() {
        let (a, b) = mesh.cell_bounds(c);
        let h = b - a;
        let offsets: Vec<usize> = axes.iter().map(|ax| *ax.space.cell_dofs(c).start()).collect();
        for (&xi, &w) in rule.points().iter().zip(rule.weights()) {
            let point = Point::in_cell(mesh, c, xi);
            let tables: Vec<Vec<f64>> = axes
                .iter()
                .map(|ax| ax.space.local_basis_at(&point).map(|(_, t)| t))
                .collect::<Result<_>>()?;
            let mut failure = None;
            index_tuples(&local_dims, |local| {
                if failure.is_some() {
                    return;
                }
                let arg = |n: u32| -> Result<f64> {
                    let k = axis_position(axes, n)?;
                    Ok(tables[k][local[k]])
                };
                match eval(term.integrand(), &point, ctx, &arg) {
                    Ok(v) => {
                        let global: Vec<usize> =
                            local.iter().zip(&offsets).map(|(l, o)| l + o).collect();
                        let pos = out.offset(&global);
                        out.data[pos] += w * h * v;
                    }
                    Err(e) => failure = Some(e),
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
    }
    Ok(out)
}

fn not_interpolable(e: Error) -> Error {
    match e {
        Error::OutOfDomain { x, length } => Error::NotInterpolable(format!(
            "operand undefined at node {x} (outside [0, {length}])"
        )),
        other => other,
    }
}

fn finite(v: f64, point: &Point) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NotInterpolable(format!(
            "operand evaluates to {v} at node {}",
            point.x()
        )))
    }
}

/// Evaluates `e` at `point` with the arguments on `axes` bound to the basis
/// functions selected by `idx`.
fn eval_bound(
    e: &Expr,
    point: &Point,
    ctx: &Context,
    axes: &[Axis],
    idx: &[usize],
) -> Result<f64> {
    let arg = |n: u32| -> Result<f64> {
        let k = axis_position(axes, n)?;
        axes[k].space.basis_value(idx[k], point)
    };
    eval(e, point, ctx, &arg)
        .map_err(not_interpolable)
        .and_then(|v| finite(v, point))
}

pub(crate) fn delta(term: &Delta, axes: &[Axis], ctx: &Context) -> Result<LabeledTensor> {
    let mut out = LabeledTensor::zeros(axes.to_vec());
    let dims = out.dims();
    match term.dual_operand() {
        DualOperand::Coargument(coarg) => {
            let k = axis_position(axes, coarg.number())?;
            let nodes = coarg.space().primal().node_points();
            let mut pos = 0;
            let mut failure = None;
            index_tuples(&dims, |idx| {
                if failure.is_none() {
                    match eval_bound(term.operand(), &nodes[idx[k]], ctx, axes, idx) {
                        Ok(v) => out.data[pos] = v,
                        Err(e) => failure = Some(e),
                    }
                }
                pos += 1;
            });
            failure.map_or(Ok(out), Err)
        }
        DualOperand::Cofunction(f) => {
            let weights = ctx.values(f)?.to_vec();
            let nodes = f.space().primal().node_points();
            let mut pos = 0;
            let mut failure = None;
            index_tuples(&dims, |idx| {
                if failure.is_none() {
                    let mut s = 0.0;
                    for (node, w) in nodes.iter().zip(&weights) {
                        match eval_bound(term.operand(), node, ctx, axes, idx) {
                            Ok(v) => s += w * v,
                            Err(e) => {
                                failure = Some(e);
                                return;
                            }
                        }
                    }
                    out.data[pos] = s;
                }
                pos += 1;
            });
            failure.map_or(Ok(out), Err)
        }
        DualOperand::Form(_) => Err(Error::Contract(
            "nested form reached primitive delta assembly".into(),
        )),
    }
}

pub(crate) fn external(term: &ExternalOperator, axes: &[Axis], ctx: &Context) -> Result<LabeledTensor> {
    let hook = registry::lookup(term.evaluator()).ok_or_else(|| {
        Error::UnknownEvaluator(format!("no evaluator registered as `{}`", term.evaluator()))
    })?;
    let space: Space = term.output_space();
    let nodes = space.node_points();
    let k0 = axis_position(axes, 0)?;
    let mut out = LabeledTensor::zeros(axes.to_vec());
    let mut dims = out.dims();
    dims[k0] = 1;
    let mut failure = None;
    index_tuples(&dims, |idx| {
        if failure.is_some() {
            return;
        }
        let run = || -> Result<Vec<f64>> {
            let values = term
                .operands()
                .iter()
                .map(|o| {
                    nodes
                        .iter()
                        .map(|p| eval_bound(o, p, ctx, axes, idx))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let result = hook(&values).map_err(|m| {
                Error::InvalidArgument(format!("evaluator `{}` failed: {m}", term.evaluator()))
            })?;
            if result.len() != space.dim() {
                return Err(Error::Shape {
                    expected: space.dim(),
                    actual: result.len(),
                });
            }
            Ok(result)
        };
        match run() {
            Ok(result) => {
                let mut full = idx.to_vec();
                for (j, v) in result.into_iter().enumerate() {
                    full[k0] = j;
                    let pos = out.offset(&full);
                    out.data[pos] = v;
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    failure.map_or(Ok(out), Err)
}

pub(crate) fn identity(f: &Coefficient, axes: &[Axis], ctx: &Context) -> Result<LabeledTensor> {
    Ok(LabeledTensor {
        axes: axes.to_vec(),
        data: ctx.values(f)?.to_vec(),
    })
}
