use super::Space;

/// Cell-to-global numbering of a space, with the coordinate of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    cells: Vec<Vec<usize>>,
    coordinates: Vec<f64>,
}

impl DofMap {
    pub(crate) fn new(space: &Space) -> Self {
        let cells = (0..space.mesh().n_cells())
            .map(|c| space.cell_dofs(c).collect())
            .collect();
        DofMap {
            cells,
            coordinates: space.node_coordinates(),
        }
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }
}

#[cfg(test)]
mod tests {
    use crate::fem::{function_space, make_interval_mesh, Element};

    #[test]
    fn every_index_is_covered() {
        let s = function_space(make_interval_mesh(3, 2.0).unwrap(), Element::lagrange(2).unwrap());
        let map = s.dofmap();
        assert_eq!(map.cell(0), &[0, 1, 2]);
        assert_eq!(map.cell(2), &[4, 5, 6]);
        let mut seen = vec![false; s.dim()];
        for c in 0..map.n_cells() {
            for &g in map.cell(c) {
                seen[g] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
        assert!(map.coordinates().iter().all(|&x| (0.0..=2.0).contains(&x)));
    }
}
