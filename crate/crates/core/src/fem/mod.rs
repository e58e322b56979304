//! Interval meshes, Lagrange elements and the primal/dual function spaces
//! built from them.
//!
//! The dual basis of every space is point evaluation at the element nodes, so
//! a dual vector is nothing more than a coefficient array read against those
//! nodes.

mod dofmap;
mod lagrange;

use std::fmt;

pub use dofmap::DofMap;
pub use lagrange::reference_nodes;

use crate::error::{Error, Result};

/// Uniform partition of `[0, length]` into `n_cells` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    n_cells: usize,
    length: f64,
}

impl Mesh {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_vertices(&self) -> usize {
        self.n_cells + 1
    }

    pub fn vertex(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.length
        } else {
            self.length * i as f64 / self.n_cells as f64
        }
    }

    pub fn vertices(&self) -> Vec<f64> {
        (0..self.n_vertices()).map(|i| self.vertex(i)).collect()
    }

    /// Left and right end of cell `c`.
    pub fn cell_bounds(&self, c: usize) -> (f64, f64) {
        (self.vertex(c), self.vertex(c + 1))
    }

    /// Finds the cell containing `x` and the reference coordinate inside it.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let tol = 64.0 * f64::EPSILON * self.length;
        if !x.is_finite() || x < -tol || x > self.length + tol {
            return Err(Error::OutOfDomain {
                x,
                length: self.length,
            });
        }
        let x = x.clamp(0.0, self.length);
        let h = self.length / self.n_cells as f64;
        let mut c = ((x / h).floor() as usize).min(self.n_cells - 1);
        // floor() can land one cell off near a vertex
        if c > 0 && x < self.vertex(c) {
            c -= 1;
        }
        if c + 1 < self.n_cells && x > self.vertex(c + 1) {
            c += 1;
        }
        let (a, b) = self.cell_bounds(c);
        Ok((c, (x - a) / (b - a)))
    }
}

impl fmt::Display for Mesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = if self.n_cells == 1 { "cell" } else { "cells" };
        write!(f, "{} {} of [0, {}]", self.n_cells, cells, self.length)
    }
}

pub fn make_interval_mesh(n_cells: usize, length: f64) -> Result<Mesh> {
    if n_cells == 0 {
        return Err(Error::InvalidArgument("mesh needs at least one cell".into()));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mesh length must be positive, got {length}"
        )));
    }
    Ok(Mesh { n_cells, length })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Lagrange,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Lagrange => f.write_str("Lagrange"),
        }
    }
}

/// Highest Lagrange degree the element tables are built for.
pub const MAX_DEGREE: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    family: Family,
    degree: u32,
}

impl Element {
    pub fn new(family: Family, degree: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::UnsupportedElement(format!(
                "{family} degree {degree} (supported: 1..={MAX_DEGREE})"
            )));
        }
        Ok(Element { family, degree })
    }

    pub fn lagrange(degree: u32) -> Result<Self> {
        Element::new(Family::Lagrange, degree)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Lagrange => write!(f, "P{}", self.degree),
        }
    }
}

/// A finite element space or its dual.
///
/// Equality is structural: two spaces built from equal meshes and elements
/// with the same primal/dual flag are the same space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Space {
    mesh: Mesh,
    element: Element,
    is_dual: bool,
}

pub fn function_space(mesh: Mesh, element: Element) -> Space {
    Space {
        mesh,
        element,
        is_dual: false,
    }
}

pub fn dual(space: Space) -> Space {
    space.dual()
}

impl Space {
    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn element(&self) -> Element {
        self.element
    }

    pub fn degree(&self) -> u32 {
        self.element.degree
    }

    pub fn is_dual(&self) -> bool {
        self.is_dual
    }

    pub fn dim(&self) -> usize {
        self.mesh.n_cells * self.element.degree as usize + 1
    }

    /// The dual space; applying it twice returns the original space.
    pub fn dual(&self) -> Space {
        Space {
            is_dual: !self.is_dual,
            ..*self
        }
    }

    /// The primal member of the `{V, V*}` pair this space belongs to.
    pub fn primal(&self) -> Space {
        Space {
            is_dual: false,
            ..*self
        }
    }

    pub fn dofmap(&self) -> DofMap {
        DofMap::new(self)
    }

    /// Global indices of the basis functions supported on cell `c`,
    /// in local (left-to-right) order.
    pub fn cell_dofs(&self, c: usize) -> std::ops::RangeInclusive<usize> {
        let p = self.element.degree as usize;
        c * p..=c * p + p
    }

    /// Coordinates of the nodes defining the dual basis.
    pub fn node_coordinates(&self) -> Vec<f64> {
        self.node_points().iter().map(|p| p.x()).collect()
    }

    /// Node points tagged with their exact cell location on this mesh.
    pub fn node_points(&self) -> Vec<Point> {
        let p = self.element.degree as usize;
        let xi = reference_nodes(self.element.degree);
        (0..self.dim())
            .map(|g| {
                let (c, k) = if g == self.dim() - 1 {
                    (self.mesh.n_cells - 1, p)
                } else {
                    (g / p, g % p)
                };
                let (a, b) = self.mesh.cell_bounds(c);
                let x = match k {
                    0 => a,
                    k if k == p => b,
                    _ => a + xi[k] * (b - a),
                };
                Point {
                    x,
                    location: Some(Location {
                        mesh: self.mesh,
                        cell: c,
                        xi: xi[k],
                    }),
                }
            })
            .collect()
    }

    /// Values of every basis function at `x`.
    pub fn tabulate_basis(&self, x: f64) -> Result<Vec<f64>> {
        if self.is_dual {
            return Err(Error::PrimalRequired);
        }
        let (c, xi) = self.mesh.locate(x)?;
        let mut out = vec![0.0; self.dim()];
        let local = lagrange::shape_values(self.element.degree, xi);
        for (g, v) in self.cell_dofs(c).zip(local) {
            out[g] = v;
        }
        Ok(out)
    }

    /// Cell containing `point` and the values of the local basis there.
    pub(crate) fn local_basis_at(&self, point: &Point) -> Result<(usize, Vec<f64>)> {
        let (c, xi) = point.locate_on(&self.mesh)?;
        Ok((c, lagrange::shape_values(self.element.degree, xi)))
    }

    /// Value of the primal basis function `j` at `point`.
    pub fn basis_value(&self, j: usize, point: &Point) -> Result<f64> {
        let (c, local) = self.local_basis_at(point)?;
        let dofs = self.cell_dofs(c);
        if dofs.contains(&j) {
            Ok(local[j - dofs.start()])
        } else {
            Ok(0.0)
        }
    }

    /// Value at `point` of the function with coefficients `values`.
    pub fn evaluate(&self, values: &[f64], point: &Point) -> Result<f64> {
        let (c, local) = self.local_basis_at(point)?;
        Ok(self
            .cell_dofs(c)
            .zip(local)
            .map(|(g, phi)| values[g] * phi)
            .sum())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.element, self.mesh)?;
        if self.is_dual {
            f.write_str(" (dual)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Location {
    mesh: Mesh,
    cell: usize,
    xi: f64,
}

/// A point of the domain, optionally remembering the exact cell and
/// reference coordinate it was generated from.
///
/// Node points carry their location so that evaluating a basis on the same
/// mesh reproduces the nodal property bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    x: f64,
    location: Option<Location>,
}

impl Point {
    pub fn new(x: f64) -> Self {
        Point { x, location: None }
    }

    pub(crate) fn in_cell(mesh: Mesh, cell: usize, xi: f64) -> Self {
        let (a, b) = mesh.cell_bounds(cell);
        Point {
            x: a + xi * (b - a),
            location: Some(Location { mesh, cell, xi }),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    fn locate_on(&self, mesh: &Mesh) -> Result<(usize, f64)> {
        match self.location {
            Some(loc) if loc.mesh == *mesh => Ok((loc.cell, loc.xi)),
            _ => mesh.locate(self.x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(degree: u32) -> Element {
        Element::lagrange(degree).unwrap()
    }

    #[test]
    fn uniform_vertices() {
        assert_eq!(make_interval_mesh(2, 1.0).unwrap().vertices(), vec![0.0, 0.5, 1.0]);
        assert_eq!(make_interval_mesh(1, 1.0).unwrap().vertices(), vec![0.0, 1.0]);
        assert_eq!(
            make_interval_mesh(4, 2.0).unwrap().vertices(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
    }

    #[test]
    fn bad_meshes_are_rejected() {
        assert!(matches!(make_interval_mesh(0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_interval_mesh(2, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_interval_mesh(2, -1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_interval_mesh(2, f64::NAN), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dimensions() {
        let m2 = make_interval_mesh(2, 1.0).unwrap();
        let m1 = make_interval_mesh(1, 1.0).unwrap();
        assert_eq!(function_space(m2, p(1)).dim(), 3);
        assert_eq!(function_space(m1, p(1)).dim(), 2);
        assert_eq!(function_space(m2, p(2)).dim(), 5);
        assert!(matches!(Element::lagrange(0), Err(Error::UnsupportedElement(_))));
    }

    #[test]
    fn dual_is_an_involution() {
        let v = function_space(make_interval_mesh(2, 1.0).unwrap(), p(1));
        let vd = dual(v);
        assert!(vd.is_dual());
        assert_eq!(vd.dim(), v.dim());
        assert_eq!(dual(vd), v);
        assert_ne!(vd, v);

        let w = function_space(make_interval_mesh(1, 1.0).unwrap(), p(1));
        assert_eq!(dual(w).dim(), 2);
        assert!(dual(w).is_dual());
    }

    #[test]
    fn tabulation() {
        let v = function_space(make_interval_mesh(2, 1.0).unwrap(), p(1));
        assert_eq!(v.tabulate_basis(0.25).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(v.tabulate_basis(0.5).unwrap(), vec![0.0, 1.0, 0.0]);
        let w = function_space(make_interval_mesh(1, 1.0).unwrap(), p(1));
        assert_eq!(w.tabulate_basis(0.5).unwrap(), vec![0.5, 0.5]);

        assert!(matches!(v.tabulate_basis(1.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(v.tabulate_basis(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(v.dual().tabulate_basis(0.5), Err(Error::PrimalRequired)));
    }

    #[test]
    fn nodes() {
        let m2 = make_interval_mesh(2, 1.0).unwrap();
        let m1 = make_interval_mesh(1, 1.0).unwrap();
        assert_eq!(function_space(m2, p(1)).node_coordinates(), vec![0.0, 0.5, 1.0]);
        assert_eq!(function_space(m1, p(1)).node_coordinates(), vec![0.0, 1.0]);
        assert_eq!(function_space(m1, p(2)).node_coordinates(), vec![0.0, 0.5, 1.0]);
        // dual spaces share the node set
        assert_eq!(
            function_space(m2, p(2)).dual().node_coordinates(),
            function_space(m2, p(2)).node_coordinates()
        );
    }

    #[test]
    fn nodal_property_holds_exactly_through_node_points() {
        for n in 1..=7 {
            for degree in 1..=4 {
                let s = function_space(make_interval_mesh(n, 0.7).unwrap(), p(degree));
                for (i, pt) in s.node_points().iter().enumerate() {
                    for j in 0..s.dim() {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert_eq!(s.basis_value(j, pt).unwrap(), expected, "n={n} p={degree}");
                    }
                }
            }
        }
    }
}
