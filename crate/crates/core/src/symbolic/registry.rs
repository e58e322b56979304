//! Process-wide table of external-operator evaluation hooks.
//!
//! A hook receives, for each operand, the operand's values at the node points
//! of the operator's output space, and returns the coefficient vector of the
//! output function. Linearity in any contained arguments is the registrant's
//! promise; it is not checked.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

pub type Evaluator = Arc<dyn Fn(&[Vec<f64>]) -> Result<Vec<f64>, String> + Send + Sync>;

fn table() -> &'static RwLock<HashMap<String, Evaluator>> {
    static TABLE: OnceLock<RwLock<HashMap<String, Evaluator>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut map: HashMap<String, Evaluator> = HashMap::new();
        map.insert("identity".into(), Arc::new(identity));
        map.insert("square-pointwise".into(), Arc::new(square_pointwise));
        RwLock::new(map)
    })
}

fn single(operands: &[Vec<f64>]) -> Result<&[f64], String> {
    match operands {
        [only] => Ok(only),
        _ => Err(format!("expected one operand, got {}", operands.len())),
    }
}

fn identity(operands: &[Vec<f64>]) -> Result<Vec<f64>, String> {
    single(operands).map(<[f64]>::to_vec)
}

fn square_pointwise(operands: &[Vec<f64>]) -> Result<Vec<f64>, String> {
    single(operands).map(|v| v.iter().map(|x| x * x).collect())
}

/// Registers (or replaces) the hook called `name`.
pub fn register_evaluator(name: &str, hook: Evaluator) {
    table()
        .write()
        .expect("evaluator registry poisoned")
        .insert(name.to_string(), hook);
}

pub fn is_registered(name: &str) -> bool {
    lookup(name).is_some()
}

pub(crate) fn lookup(name: &str) -> Option<Evaluator> {
    table()
        .read()
        .expect("evaluator registry poisoned")
        .get(name)
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_hooks() {
        let sq = lookup("square-pointwise").unwrap();
        assert_eq!(sq(&[vec![1.0, -2.0, 3.0]]).unwrap(), vec![1.0, 4.0, 9.0]);
        let id = lookup("identity").unwrap();
        assert!(id(&[]).is_err());
        assert!(!is_registered("missing"));
    }
}
