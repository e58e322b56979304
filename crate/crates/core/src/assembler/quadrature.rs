use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest polynomial degree a rule may be requested for.
pub const MAX_QUADRATURE_DEGREE: u32 = 63;

/// Gauss–Legendre rule on the reference cell `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    /// Rule integrating polynomials of degree `degree` exactly.
    pub fn for_degree(degree: u32) -> Result<Self> {
        if degree > MAX_QUADRATURE_DEGREE {
            return Err(Error::Degree {
                requested: degree,
                max: MAX_QUADRATURE_DEGREE,
            });
        }
        Ok(Self::gauss_legendre(degree as usize / 2 + 1))
    }

    /// `n`-point rule, exact to degree `2n - 1`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n > 0, "a quadrature rule needs at least one point");
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            points.push(0.5 * (1.0 - x));
            weights.push(1.0 / ((1.0 - x * x) * dp * dp));
        }
        Quadrature { points, weights }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &Quadrature, f: impl Fn(f64) -> f64) -> f64 {
        rule.points()
            .iter()
            .zip(rule.weights())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=32 {
            let q = Quadrature::gauss_legendre(n);
            let s: f64 = q.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}: {s}");
            assert!(q.points().iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn monomials_are_exact() {
        for degree in 0..=MAX_QUADRATURE_DEGREE {
            let q = Quadrature::for_degree(degree).unwrap();
            let got = integrate(&q, |x| x.powi(degree as i32));
            let exact = 1.0 / (degree as f64 + 1.0);
            assert!((got - exact).abs() < 1e-14, "degree {degree}");
        }
    }

    #[test]
    fn degree_limit() {
        assert_eq!(
            Quadrature::for_degree(64),
            Err(Error::Degree { requested: 64, max: 63 })
        );
    }
}
