use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::Space;

/// The six terminal kinds of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminalKind {
    Argument,
    Coargument,
    Coefficient,
    Cofunction,
    SpatialCoordinate,
    Constant,
}

/// Placeholder for an unknown member of a space. In a dual space this is a
/// coargument.
///
/// Equality ignores the display label.
#[derive(Debug, Clone)]
pub struct Argument {
    space: Space,
    number: u32,
    label: Option<Arc<str>>,
}

impl PartialEq for Argument {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.number == other.number
    }
}

impl Argument {
    pub fn space(&self) -> Space {
        self.space
    }

    pub fn number(&self) -> u32 {
        self.number
    }

    pub fn is_coargument(&self) -> bool {
        self.space.is_dual()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn named(mut self, label: &str) -> Self {
        self.label = Some(label.into());
        self
    }

    pub(crate) fn renumbered(&self, number: u32) -> Self {
        Argument {
            number,
            ..self.clone()
        }
    }

    pub(crate) fn fresh(space: Space, number: u32) -> Self {
        Argument {
            space,
            number,
            label: None,
        }
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => f.write_str(l),
            None if self.is_coargument() => write!(f, "coarg_{}", self.number),
            None => write!(f, "arg_{}", self.number),
        }
    }
}

/// Creates argument `number` in `space`; a dual space yields a coargument.
pub fn argument(space: Space, number: i64) -> Result<Argument> {
    if number < 0 {
        return Err(Error::InvalidArgument(format!(
            "argument number must be non-negative, got {number}"
        )));
    }
    let number = u32::try_from(number)
        .map_err(|_| Error::InvalidArgument(format!("argument number {number} too large")))?;
    Ok(Argument {
        space,
        number,
        label: None,
    })
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Identity token of a coefficient. Planner temporaries live in the upper
/// half of the id range so that plans are reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoefficientId(u64);

impl CoefficientId {
    const TEMPORARY: u64 = 1 << 63;

    fn next() -> Self {
        CoefficientId(NEXT_ID.fetch_add(1, Ordering::Relaxed))
    }

    pub(crate) fn temporary(index: u64) -> Self {
        CoefficientId(Self::TEMPORARY | index)
    }

    pub fn is_temporary(&self) -> bool {
        self.0 & Self::TEMPORARY != 0
    }
}

/// A known member of a space: a function (primal) or a cofunction (dual).
///
/// Values are coefficients against the primal basis `{φ_i}` or the dual basis
/// `{φ*_i}` respectively. Equality is by identity token.
#[derive(Debug, Clone)]
pub struct Coefficient {
    id: CoefficientId,
    space: Space,
    values: Option<Arc<[f64]>>,
    label: Option<Arc<str>>,
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Coefficient {
    fn build(space: Space, values: Option<Vec<f64>>) -> Result<Self> {
        if let Some(v) = &values {
            if v.len() != space.dim() {
                return Err(Error::Shape {
                    expected: space.dim(),
                    actual: v.len(),
                });
            }
        }
        Ok(Coefficient {
            id: CoefficientId::next(),
            space,
            values: values.map(Into::into),
            label: None,
        })
    }

    pub(crate) fn temporary(space: Space, index: u64, label: String) -> Self {
        Coefficient {
            id: CoefficientId::temporary(index),
            space,
            values: None,
            label: Some(label.into()),
        }
    }

    pub fn id(&self) -> CoefficientId {
        self.id
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn is_cofunction(&self) -> bool {
        self.space.is_dual()
    }

    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    /// Values, or a missing-values error naming the coefficient.
    pub fn require_values(&self) -> Result<&[f64]> {
        self.values
            .as_deref()
            .ok_or_else(|| Error::MissingValues(self.to_string()))
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn named(mut self, label: &str) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Same coefficient (same identity) carrying `values`.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.space.dim() {
            return Err(Error::Shape {
                expected: self.space.dim(),
                actual: values.len(),
            });
        }
        Ok(Coefficient {
            values: Some(values.into()),
            ..self.clone()
        })
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => f.write_str(l),
            None if self.is_cofunction() => write!(f, "cofunction_{}", self.id.0),
            None => write!(f, "function_{}", self.id.0),
        }
    }
}

/// A function with coefficients `values` in primal `space`.
pub fn make_function(space: Space, values: Vec<f64>) -> Result<Coefficient> {
    if space.is_dual() {
        return Err(Error::SpaceKind("a function lives in a primal space".into()));
    }
    Coefficient::build(space, Some(values))
}

/// A cofunction with dual-basis coefficients `values` in `dual_space`.
pub fn make_cofunction(dual_space: Space, values: Vec<f64>) -> Result<Coefficient> {
    if !dual_space.is_dual() {
        return Err(Error::SpaceKind("a cofunction lives in a dual space".into()));
    }
    Coefficient::build(dual_space, Some(values))
}

/// A known function or cofunction whose values are supplied later.
pub fn coefficient(space: Space) -> Coefficient {
    Coefficient {
        id: CoefficientId::next(),
        space,
        values: None,
        label: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Terminal {
    Argument(Argument),
    Coefficient(Coefficient),
    SpatialCoordinate,
    Constant(f64),
}

impl Terminal {
    pub fn kind(&self) -> TerminalKind {
        match self {
            Terminal::Argument(a) if a.is_coargument() => TerminalKind::Coargument,
            Terminal::Argument(_) => TerminalKind::Argument,
            Terminal::Coefficient(c) if c.is_cofunction() => TerminalKind::Cofunction,
            Terminal::Coefficient(_) => TerminalKind::Coefficient,
            Terminal::SpatialCoordinate => TerminalKind::SpatialCoordinate,
            Terminal::Constant(_) => TerminalKind::Constant,
        }
    }

    pub fn space(&self) -> Option<Space> {
        match self {
            Terminal::Argument(a) => Some(a.space),
            Terminal::Coefficient(c) => Some(c.space),
            _ => None,
        }
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::Argument(a) => a.fmt(f),
            Terminal::Coefficient(c) => c.fmt(f),
            Terminal::SpatialCoordinate => f.write_str("x"),
            Terminal::Constant(v) => write!(f, "{v}"),
        }
    }
}

impl From<Argument> for Terminal {
    fn from(a: Argument) -> Self {
        Terminal::Argument(a)
    }
}

impl From<Coefficient> for Terminal {
    fn from(c: Coefficient) -> Self {
        Terminal::Coefficient(c)
    }
}
