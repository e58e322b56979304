//! Argument analysis, well-formedness validation and lowering of composite
//! forms into assembly plans.

mod check;
mod diagnostic;
mod plan;
mod signature;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use plan::{plan, AssemblyPlan, Axis, Step, StepId, StepOp};
pub use signature::{curried_signature, ArgSlot, Signature, SignatureText, SpaceNames};

use check::Checker;

use crate::error::{Error, Result};
use crate::fem::Space;
use crate::symbolic::Form;

pub(crate) fn swap01(n: u32) -> u32 {
    match n {
        0 => 1,
        1 => 0,
        n => n,
    }
}

fn check(form: &Form) -> (Signature, Vec<Diagnostic>) {
    let mut checker = Checker::default();
    let args = checker.form(form);
    let slots = args
        .into_iter()
        .map(|(number, space)| ArgSlot { number, space })
        .collect();
    (Signature::from_slots(slots), checker.diagnostics)
}

/// Surviving arguments of `form` after nested argument 0 slots are consumed.
///
/// Numbers need not be contiguous here; [`validate`] enforces that.
pub fn arguments(form: &Form) -> Result<Signature> {
    let (sig, diags) = check(form);
    if diags.is_empty() {
        Ok(sig)
    } else {
        Err(Error::InvalidForm(diags))
    }
}

/// Signature of a well-formed form, or every violation found.
pub fn validate(form: &Form) -> std::result::Result<Signature, Vec<Diagnostic>> {
    let (sig, mut diags) = check(form);
    if !diags.is_empty() {
        return Err(diags);
    }
    for (expected, slot) in sig.ascending().enumerate() {
        if slot.number != expected as u32 {
            diags.push(Diagnostic::error(
                Code::NumberGap,
                format!(
                    "argument numbers must run 0..{}; found {} where {expected} was expected",
                    sig.arity(),
                    slot.number
                ),
                vec![],
            ));
            break;
        }
    }
    if diags.is_empty() {
        Ok(sig)
    } else {
        Err(diags)
    }
}

/// The space a form produces values in when read as an operator: `V` when
/// argument 0 is a coargument in `V*`, `V*` when it is an argument in `V`.
/// `None` for 0-forms.
pub fn output_space(form: &Form) -> Result<Option<Space>> {
    Ok(arguments(form)?.value_space())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{function_space, make_interval_mesh, Element};
    use crate::symbolic::*;

    struct Fixture {
        v: Space,
        w: Space,
    }

    fn fixture() -> Fixture {
        let p1 = Element::lagrange(1).unwrap();
        Fixture {
            v: function_space(make_interval_mesh(2, 1.0).unwrap(), p1),
            w: function_space(make_interval_mesh(1, 1.0).unwrap(), p1),
        }
    }

    fn codes(diags: &[Diagnostic]) -> Vec<&'static str> {
        diags.iter().map(|d| d.code.as_str()).collect()
    }

    #[test]
    fn one_form() {
        let Fixture { v, .. } = fixture();
        let a = argument(v, 0).unwrap();
        let f1 = integral(Expr::from(a), Measure::dx()).unwrap();
        let sig = validate(&f1).unwrap();
        assert_eq!(sig.slots(), &[ArgSlot { number: 0, space: v }]);
    }

    #[test]
    fn composite_consumes_nested_zero() {
        let Fixture { v, w } = fixture();
        let v_ = argument(v.dual(), 0).unwrap();
        let wa = argument(w, 1).unwrap();
        let va = argument(v, 0).unwrap();
        let f2 = integral(Expr::from(delta(wa, v_).unwrap()) * va, Measure::dx()).unwrap();
        let sig = validate(&f2).unwrap();
        assert_eq!(
            sig.slots(),
            &[ArgSlot { number: 1, space: w }, ArgSlot { number: 0, space: v }]
        );
    }

    #[test]
    fn f3_is_rejected() {
        let Fixture { v, w } = fixture();
        let w_ = argument(w.dual(), 0).unwrap();
        let va = argument(v, 0).unwrap();
        let u = argument(v, 1).unwrap();
        let f3 = integral(Expr::from(u) * delta(va, w_).unwrap(), Measure::dx()).unwrap();
        let diags = validate(&f3).unwrap_err();
        assert_eq!(codes(&diags), ["DUP_ARG_NUMBER"]);
        assert_eq!(diags[0].path, vec![0, 0, 1, 0, 0]);
        let err = arguments(&f3).unwrap_err();
        assert_eq!(err.code(), "DUP_ARG_NUMBER");
    }

    #[test]
    fn cofunction_alone_is_a_one_form() {
        let Fixture { v, .. } = fixture();
        let f = make_cofunction(v.dual(), vec![1.0, 2.0, 3.0]).unwrap();
        let sig = validate(&Form::from_cofunction(&f).unwrap()).unwrap();
        assert_eq!(sig.slots(), &[ArgSlot { number: 0, space: v }]);
    }

    #[test]
    fn gaps_are_reported() {
        let Fixture { v, .. } = fixture();
        let a0 = argument(v, 0).unwrap();
        let a2 = argument(v, 2).unwrap();
        let form = integral(Expr::from(a0) * a2, Measure::dx()).unwrap();
        assert!(arguments(&form).is_ok());
        assert_eq!(codes(&validate(&form).unwrap_err()), ["NUMBER_GAP"]);
    }

    #[test]
    fn mesh_mismatch_inside_replaced_integrand() {
        let Fixture { v, w } = fixture();
        let a = argument(v, 0).unwrap();
        let c = make_function(w, vec![1.0, 1.0]).unwrap();
        let form = integral(Expr::from(a.clone()), Measure::dx()).unwrap();
        // replace bypasses the constructor's mesh inference
        let swapped = replace(&form, &[(a.clone().into(), Expr::from(a) * c)]).unwrap();
        assert_eq!(codes(&validate(&swapped).unwrap_err()), ["MESH_MISMATCH"]);
    }

    #[test]
    fn nested_forms_must_be_function_valued() {
        let Fixture { v, .. } = fixture();
        let a0 = argument(v, 0).unwrap();
        let b1 = argument(v, 1).unwrap();
        let one_form = integral(Expr::from(a0.clone()), Measure::dx()).unwrap();
        let bad = integral(Expr::from(one_form) * b1, Measure::dx_over(v.mesh())).unwrap();
        assert_eq!(codes(&validate(&bad).unwrap_err()), ["SPACE_MISMATCH"]);
    }

    #[test]
    fn mismatched_terms() {
        let Fixture { v, .. } = fixture();
        let a0 = argument(v, 0).unwrap();
        let a1 = argument(v, 1).unwrap();
        let one = integral(Expr::from(a0.clone()), Measure::dx()).unwrap();
        let two = integral(Expr::from(a0) * a1, Measure::dx()).unwrap();
        let both = Form::from_terms(
            one.terms().iter().chain(two.terms()).cloned().collect(),
        );
        assert_eq!(codes(&validate(&both).unwrap_err()), ["SIGNATURE_MISMATCH"]);
    }

    #[test]
    fn output_spaces() {
        let Fixture { v, w } = fixture();
        let v_ = argument(v.dual(), 0).unwrap();
        let interp = delta(argument(w, 1).unwrap(), v_).unwrap();
        assert_eq!(output_space(&interp).unwrap(), Some(v));
        let f1 = integral(Expr::from(argument(v, 0).unwrap()), Measure::dx()).unwrap();
        assert_eq!(output_space(&f1).unwrap(), Some(v.dual()));
        let c = make_function(v, vec![0.0; 3]).unwrap();
        assert_eq!(output_space(&integral(Expr::from(c), Measure::dx()).unwrap()).unwrap(), None);
    }
}
