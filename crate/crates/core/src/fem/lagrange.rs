/// Equispaced nodes of the degree-`p` Lagrange element on the reference
/// cell `[0, 1]`.
pub fn reference_nodes(degree: u32) -> Vec<f64> {
    let p = degree as usize;
    (0..=p)
        .map(|k| match k {
            0 => 0.0,
            k if k == p => 1.0,
            k => k as f64 / p as f64,
        })
        .collect()
}

/// Values of the local Lagrange shape functions at reference coordinate `xi`.
pub(crate) fn shape_values(degree: u32, xi: f64) -> Vec<f64> {
    let nodes = reference_nodes(degree);
    (0..nodes.len())
        .map(|k| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, &xm)| (xi - xm) / (nodes[k] - xm))
                .product()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_shapes() {
        assert_eq!(shape_values(1, 0.25), vec![0.75, 0.25]);
        assert_eq!(shape_values(1, 0.0), vec![1.0, 0.0]);
    }

    #[test]
    fn quadratic_shapes_at_quarter() {
        // 2(x-1/2)(x-1), -4x(x-1), 2x(x-1/2) at x = 1/4
        let v = shape_values(2, 0.25);
        let expected = [0.375, 0.75, -0.125];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
