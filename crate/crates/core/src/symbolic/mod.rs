//! The immutable expression and form language.

mod expr;
mod form;
pub mod registry;
mod terminal;
mod transform;

pub use expr::Expr;
pub use form::{
    delta, dual_call, external_operator, form_add, integral, Delta, DualOperand,
    ExternalOperator, Form, Integral, Measure, Term,
};
pub use registry::{register_evaluator, Evaluator};
pub use terminal::{
    argument, coefficient, make_cofunction, make_function, Argument, Coefficient, CoefficientId,
    Terminal, TerminalKind,
};
pub use transform::{action, adjoint, replace, ActionOperand};

