//! Multilinear forms over finite element spaces with dual spaces,
//! cofunctions, coarguments, dual evaluation, adjoint, action and form
//! composition as first-class citizens, together with a dense reference
//! assembler over 1-D Lagrange elements.
//!
//! ```
//! use dualform::prelude::*;
//!
//! let mesh = make_interval_mesh(1, 1.0).unwrap();
//! let v = function_space(mesh, Element::lagrange(1).unwrap());
//! let u = argument(v, 1).unwrap();
//! let w = argument(v, 0).unwrap();
//! let mass = integral(Expr::from(u) * w, Measure::dx()).unwrap();
//! let m = assemble(&mass).unwrap().into_matrix().unwrap();
//! assert!((m.get(0, 1) - 1.0 / 6.0).abs() < 1e-15);
//! ```

pub mod analysis;
pub mod assembler;
mod error;
pub mod fem;
pub mod symbolic;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        arguments, curried_signature, plan, validate, AssemblyPlan, Diagnostic, Signature,
        SpaceNames,
    };
    pub use crate::assembler::{
        apply, assemble, assemble_delta, assemble_with, execute_plan, interpolate, transpose,
        AssembledTensor, AssemblyOptions, DenseMatrix, DenseVector,
    };
    pub use crate::fem::{dual, function_space, make_interval_mesh, Element, Mesh, Space};
    pub use crate::symbolic::{
        action, adjoint, argument, coefficient, delta, dual_call, external_operator, form_add,
        integral, make_cofunction, make_function, replace, Argument, Coefficient, DualOperand,
        Expr, Form, Measure, Term,
    };
    pub use crate::{Error, Result};
}
