use std::fmt;

use crate::fem::Space;

/// One argument of a form: its number and the space it ranges over (a dual
/// space for a coargument).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgSlot {
    pub number: u32,
    pub space: Space,
}

/// Arguments of a form, highest number first, matching the
/// `V_{k-1} × … × V_0 → ℝ` reading.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    slots: Vec<ArgSlot>,
}

impl Signature {
    pub(crate) fn from_slots(mut slots: Vec<ArgSlot>) -> Self {
        slots.sort_by(|a, b| b.number.cmp(&a.number));
        Signature { slots }
    }

    pub fn slots(&self) -> &[ArgSlot] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn highest(&self) -> Option<ArgSlot> {
        self.slots.first().copied()
    }

    pub fn get(&self, number: u32) -> Option<ArgSlot> {
        self.slots.iter().find(|s| s.number == number).copied()
    }

    pub fn ascending(&self) -> impl Iterator<Item = ArgSlot> + '_ {
        self.slots.iter().rev().copied()
    }

    /// Whether the form reads as an operator into a primal space, i.e.
    /// argument 0 is a coargument.
    pub fn maps_into_primal(&self) -> bool {
        self.get(0).is_some_and(|s| s.space.is_dual())
    }

    /// Space in which the form, read as an operator, takes its values.
    pub fn value_space(&self) -> Option<Space> {
        self.get(0).map(|s| s.space.dual())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "#{}: {}", s.number, s.space)?;
        }
        f.write_str("}")
    }
}

/// Display names for spaces; a dual space falls back to its primal name with
/// a `*` suffix.
#[derive(Debug, Clone, Default)]
pub struct SpaceNames {
    names: Vec<(Space, String)>,
}

impl SpaceNames {
    pub fn new() -> Self {
        SpaceNames::default()
    }

    pub fn with(mut self, name: &str, space: Space) -> Self {
        self.insert(name, space);
        self
    }

    pub fn insert(&mut self, name: &str, space: Space) {
        if !self.names.iter().any(|(s, _)| *s == space) {
            self.names.push((space, name.to_string()));
        }
    }

    pub fn name(&self, space: Space) -> String {
        if let Some((_, n)) = self.names.iter().find(|(s, _)| *s == space) {
            return n.clone();
        }
        if let Some((_, n)) = self.names.iter().find(|(s, _)| *s == space.dual()) {
            return format!("{n}*");
        }
        let mesh = space.mesh();
        let base = format!("{}[{}×{}]", space.element(), mesh.n_cells(), mesh.length());
        if space.is_dual() {
            format!("{base}*")
        } else {
            base
        }
    }
}

/// The three readings of a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureText {
    /// `V_{k-1} × … × V_0 → ℝ`
    pub product: String,
    /// `V_{k-1} → … → V_0 → ℝ`
    pub curried: String,
    /// `V_{k-1} × … × V_1 → V_0*`, or `→ V_0` when argument 0 is dual.
    pub operator: String,
}

impl fmt::Display for SignatureText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.product == self.operator {
            f.write_str(&self.product)
        } else {
            write!(f, "{} (operator: {})", self.product, self.operator)
        }
    }
}

pub fn curried_signature(sig: &Signature, names: &SpaceNames) -> SignatureText {
    const REAL: &str = "ℝ";
    if sig.arity() == 0 {
        return SignatureText {
            product: REAL.into(),
            curried: REAL.into(),
            operator: REAL.into(),
        };
    }
    let all: Vec<String> = sig.slots().iter().map(|s| names.name(s.space)).collect();
    let product = format!("{} → {REAL}", all.join(" × "));
    let curried = format!("{} → {REAL}", all.join(" → "));
    let value = names.name(sig.value_space().expect("arity > 0"));
    let inputs = &all[..all.len() - 1];
    let operator = if inputs.is_empty() {
        value
    } else {
        format!("{} → {value}", inputs.join(" × "))
    };
    SignatureText {
        product,
        curried,
        operator,
    }
}
