use crate::error::{invalid, Result};

/// Increasing radial nodes in `(0, R]` with `R` as the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
}

/// Builds a grid of `n` nodes on `(0, radius]`.
///
/// `grading == 1` gives the uniform nodes `R/n, 2R/n, ..., R`. Any other
/// `grading` in `(0, 1)` gives geometric nodes `R * grading^(n-1-i)`, so the
/// smallest node is `R * grading^(n-1)`.
pub fn build_grid(radius: f64, n: usize, grading: f64) -> Result<Grid> {
    if !(radius > 0.0) || !radius.is_finite() {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    if n < 16 {
        return invalid(format!("grid needs at least 16 nodes, got {n}"));
    }
    if !(grading > 0.0 && grading <= 1.0) {
        return invalid(format!("grading must lie in (0, 1], got {grading}"));
    }
    let nodes = if grading == 1.0 {
        (1..=n).map(|i| radius * i as f64 / n as f64).collect()
    } else {
        let lg = grading.ln();
        (0..n)
            .map(|i| {
                let e = (n - 1 - i) as f64;
                if e == 0.0 {
                    radius
                } else {
                    radius * (e * lg).exp()
                }
            })
            .collect()
    };
    Ok(Grid { nodes })
}

impl Grid {
    /// Geometric grid of `n` nodes from `r_min` to `radius`.
    pub fn geometric_span(radius: f64, r_min: f64, n: usize) -> Result<Grid> {
        if !(r_min > 0.0 && r_min < radius) {
            return invalid(format!("need 0 < r_min < R, got r_min = {r_min}, R = {radius}"));
        }
        let grading = (r_min / radius).powf(1.0 / (n as f64 - 1.0));
        build_grid(radius, n, grading)
    }

    /// Grid from explicit increasing positive nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Grid> {
        if nodes.len() < 2 {
            return invalid("grid needs at least two nodes");
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("grid nodes must be positive and strictly increasing");
        }
        Ok(Grid { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn min_node(&self) -> f64 {
        self.nodes[0]
    }

    /// Index of the node closest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x < r);
        if i == 0 {
            0
        } else if i == self.nodes.len() {
            i - 1
        } else if (self.nodes[i] - r) < (r - self.nodes[i - 1]) {
            i
        } else {
            i - 1
        }
    }
}
