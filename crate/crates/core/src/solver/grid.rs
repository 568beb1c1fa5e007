//! Graded collocation grid on (0, 1].

use crate::error::{Error, Result};

/// Strictly increasing nodes ending at 1, graded toward both endpoints,
/// with trapezoid weights (exact for piecewise-linear integrands).
#[derive(Debug, Clone)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    grading: f64,
}

impl Grid {
    /// Power-graded grid: node k sits at x_min + (1−x_min)·B(k/(n−1)) with
    /// B(t) = t^γ/(t^γ + (1−t)^γ), which clusters like t^γ at both ends.
    pub fn build(n_nodes: usize, x_min: f64, grading: f64) -> Result<Grid> {
        if n_nodes < 2 {
            return Err(Error::Spec(format!("grid needs ≥ 2 nodes, got {n_nodes}")));
        }
        if !(x_min > 0.0 && x_min < 1.0) {
            return Err(Error::Spec(format!(
                "grid lower cutoff must lie in (0, 1), got {x_min}"
            )));
        }
        if !(grading > 0.0) || !grading.is_finite() {
            return Err(Error::Spec(format!(
                "grading must be positive, got {grading}"
            )));
        }
        let n = n_nodes;
        let mut nodes = Vec::with_capacity(n);
        for k in 0..n {
            let t = k as f64 / (n - 1) as f64;
            let tp = t.powf(grading);
            let up = (1.0 - t).powf(grading);
            let b = if tp + up == 0.0 { t } else { tp / (tp + up) };
            nodes.push(x_min + (1.0 - x_min) * b);
        }
        nodes[0] = x_min;
        *nodes.last_mut().unwrap() = 1.0;
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Spec(
                "grid nodes collapsed; lower n_nodes or grading".into(),
            ));
        }
        Ok(Grid {
            weights: trapezoid_weights(&nodes),
            nodes,
            grading,
        })
    }

    /// Sub-grid of the nodes ≥ y.  Rows of the collocation operator only
    /// look rightward, so a fixed point on the full grid restricts to a
    /// fixed point here.
    pub fn restrict(&self, y: f64) -> Result<Grid> {
        let first = self.nodes.partition_point(|&x| x < y);
        if self.nodes.len() - first < 2 {
            return Err(Error::Spec(format!(
                "restriction to ({y}, 1] leaves fewer than 2 nodes"
            )));
        }
        let nodes: Vec<f64> = self.nodes[first..].to_vec();
        Ok(Grid {
            weights: trapezoid_weights(&nodes),
            nodes,
            grading: self.grading,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index j with `nodes[j] ≤ x < nodes[j+1]` (clamped to the last segment).
    pub fn segment_of(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&v| v <= x);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    /// Piecewise-linear interpolation of node values, clamped at the ends.
    pub fn interp(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        if x <= self.nodes[0] {
            return values[0];
        }
        if x >= 1.0 {
            return *values.last().unwrap();
        }
        let j = self.segment_of(x);
        let t = (x - self.nodes[j]) / (self.nodes[j + 1] - self.nodes[j]);
        values[j] * (1.0 - t) + values[j + 1] * t
    }

    /// ∫ of the piecewise-linear interpolant over [x_min, 1].
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for j in 0..n - 1 {
        let h = nodes[j + 1] - nodes[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    w
}
