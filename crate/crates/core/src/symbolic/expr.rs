use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::form::Form;
use super::terminal::{Argument, Coefficient, Terminal};

/// Expression tree beneath forms.
///
/// `Form` nodes are forms nested as function-valued operands, e.g. a delta
/// multiplied into an integrand.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Terminal(Terminal),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Scale(f64, Box<Expr>),
    Form(Box<Form>),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Terminal(Terminal::Constant(value))
    }

    pub fn x() -> Expr {
        Expr::Terminal(Terminal::SpatialCoordinate)
    }

    pub fn children(&self) -> &[Expr] {
        match self {
            Expr::Sum(c) | Expr::Product(c) => c,
            Expr::Scale(_, c) => std::slice::from_ref(c),
            _ => &[],
        }
    }

    /// Visits every terminal outside nested forms.
    pub fn for_each_terminal(&self, f: &mut impl FnMut(&Terminal)) {
        match self {
            Expr::Terminal(t) => f(t),
            Expr::Form(_) => {}
            _ => self.children().iter().for_each(|c| c.for_each_terminal(f)),
        }
    }

    /// Visits the outermost nested forms, left to right.
    pub fn for_each_nested(&self, f: &mut impl FnMut(&Form)) {
        match self {
            Expr::Form(g) => f(g),
            _ => self.children().iter().for_each(|c| c.for_each_nested(f)),
        }
    }

    pub fn contains_nested(&self) -> bool {
        let mut found = false;
        self.for_each_nested(&mut |_| found = true);
        found
    }

    /// Rebuilds the tree bottom-up through `f`, which may replace any node.
    pub(crate) fn try_map<E>(
        &self,
        f: &mut impl FnMut(&Expr) -> Result<Option<Expr>, E>,
    ) -> Result<Expr, E> {
        if let Some(replaced) = f(self)? {
            return Ok(replaced);
        }
        Ok(match self {
            Expr::Sum(c) => Expr::Sum(c.iter().map(|e| e.try_map(f)).collect::<Result<_, _>>()?),
            Expr::Product(c) => {
                Expr::Product(c.iter().map(|e| e.try_map(f)).collect::<Result<_, _>>()?)
            }
            Expr::Scale(a, c) => Expr::Scale(*a, Box::new(c.try_map(f)?)),
            leaf => leaf.clone(),
        })
    }

    /// Expands into a sum of monomials: `(weight, factors)`.
    pub(crate) fn monomials(&self) -> Vec<(f64, Vec<Expr>)> {
        match self {
            Expr::Sum(c) => c.iter().flat_map(|e| e.monomials()).collect(),
            Expr::Scale(a, c) => c
                .monomials()
                .into_iter()
                .map(|(w, fs)| (a * w, fs))
                .collect(),
            Expr::Product(c) => c.iter().fold(vec![(1.0, Vec::new())], |acc, e| {
                let rhs = e.monomials();
                acc.iter()
                    .flat_map(|(w, fs)| {
                        rhs.iter().map(move |(w2, fs2)| {
                            let mut all = fs.clone();
                            all.extend(fs2.iter().cloned());
                            (w * w2, all)
                        })
                    })
                    .collect()
            }),
            e => vec![(1.0, vec![e.clone()])],
        }
    }

    pub(crate) fn from_monomial(weight: f64, mut factors: Vec<Expr>) -> Expr {
        let body = match factors.len() {
            0 => Expr::constant(1.0),
            1 => factors.pop().unwrap(),
            _ => Expr::Product(factors),
        };
        if weight == 1.0 {
            body
        } else {
            Expr::Scale(weight, Box::new(body))
        }
    }
}

impl From<Terminal> for Expr {
    fn from(t: Terminal) -> Self {
        Expr::Terminal(t)
    }
}

impl From<Argument> for Expr {
    fn from(a: Argument) -> Self {
        Expr::Terminal(a.into())
    }
}

impl From<&Argument> for Expr {
    fn from(a: &Argument) -> Self {
        Expr::Terminal(a.clone().into())
    }
}

impl From<Coefficient> for Expr {
    fn from(c: Coefficient) -> Self {
        Expr::Terminal(c.into())
    }
}

impl From<&Coefficient> for Expr {
    fn from(c: &Coefficient) -> Self {
        Expr::Terminal(c.clone().into())
    }
}

impl From<Form> for Expr {
    fn from(f: Form) -> Self {
        Expr::Form(Box::new(f))
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::constant(v)
    }
}

impl<R: Into<Expr>> Add<R> for Expr {
    type Output = Expr;

    fn add(self, rhs: R) -> Expr {
        let mut terms = match self {
            Expr::Sum(t) => t,
            e => vec![e],
        };
        match rhs.into() {
            Expr::Sum(t) => terms.extend(t),
            e => terms.push(e),
        }
        Expr::Sum(terms)
    }
}

impl<R: Into<Expr>> Sub<R> for Expr {
    type Output = Expr;

    fn sub(self, rhs: R) -> Expr {
        self + (-rhs.into())
    }
}

impl<R: Into<Expr>> Mul<R> for Expr {
    type Output = Expr;

    fn mul(self, rhs: R) -> Expr {
        let mut factors = match self {
            Expr::Product(t) => t,
            e => vec![e],
        };
        match rhs.into() {
            Expr::Product(t) => factors.extend(t),
            e => factors.push(e),
        }
        Expr::Product(factors)
    }
}

impl Mul<Expr> for f64 {
    type Output = Expr;

    fn mul(self, rhs: Expr) -> Expr {
        Expr::Scale(self, Box::new(rhs))
    }
}

impl Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr::Scale(-1.0, Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Terminal(t) => t.fmt(f),
            Expr::Sum(c) => {
                for (i, e) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    e.fmt(f)?;
                }
                Ok(())
            }
            Expr::Product(c) => {
                for (i, e) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    if matches!(e, Expr::Sum(_)) {
                        write!(f, "({e})")?;
                    } else {
                        e.fmt(f)?;
                    }
                }
                Ok(())
            }
            Expr::Scale(a, e) => match **e {
                Expr::Sum(_) => write!(f, "{a} * ({e})"),
                _ => write!(f, "{a} * {e}"),
            },
            Expr::Form(g) if g.terms().len() == 1 => g.fmt(f),
            Expr::Form(g) => write!(f, "({g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_flatten() {
        let e = Expr::x() + Expr::x() + 1.0;
        assert_eq!(e.children().len(), 3);
        let p = Expr::x() * Expr::x() * Expr::x();
        assert_eq!(p.children().len(), 3);
    }

    #[test]
    fn monomial_expansion() {
        let e = (Expr::x() + 2.0) * (Expr::x() - 1.0);
        let m = e.monomials();
        assert_eq!(m.len(), 4);
        assert_eq!(m[3].0, -1.0);
        let e = 3.0 * Expr::x();
        assert_eq!(e.monomials(), vec![(3.0, vec![Expr::x()])]);
    }
}
