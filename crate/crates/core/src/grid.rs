//! Discrete function carrier: values on a strictly increasing node set with
//! monotone-preserving piecewise-cubic Hermite evaluation between nodes.

use crate::domain::Interval;
use crate::error::{Error, Result};

/// A function sampled on a strictly increasing node set.
///
/// Evaluation between nodes uses the Fritsch–Carlson monotone cubic Hermite
/// interpolant (C1, no overshoot on monotone data). At least three nodes are
/// required.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing))]
    slopes: Vec<f64>,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::LengthMismatch {
                nodes: nodes.len(),
                values: values.len(),
            });
        }
        if nodes.len() < 3 {
            return Err(Error::TooFewPoints {
                what: "grid",
                min: 3,
                got: nodes.len(),
            });
        }
        for i in 1..nodes.len() {
            if nodes[i] <= nodes[i - 1] || nodes[i].is_nan() || nodes[i - 1].is_nan() {
                return Err(Error::NodesNotIncreasing { index: i });
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEvaluation { node: nodes[i] });
        }
        let slopes = pchip_slopes(&nodes, &values);
        Ok(Self {
            nodes,
            values,
            slopes,
        })
    }

    /// Samples `f` on `n` uniform nodes over `interval`.
    pub fn sample(interval: &Interval, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = interval.uniform_nodes(n.max(3));
        let values = nodes.iter().map(|&t| f(t)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first_node(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last_node(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Largest absolute value over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when the grid endpoints coincide with `interval` to a relative
    /// tolerance of a few ulps.
    pub fn spans(&self, interval: &Interval) -> bool {
        let scale = interval.length().max(1.0);
        (self.first_node() - interval.a()).abs() <= 1e-12 * scale
            && (self.last_node() - interval.b()).abs() <= 1e-12 * scale
    }

    pub(crate) fn require_span(&self, interval: &Interval) -> Result<()> {
        if self.spans(interval) {
            Ok(())
        } else {
            Err(Error::GridIntervalMismatch {
                expected_a: interval.a(),
                expected_b: interval.b(),
                got_a: self.first_node(),
                got_b: self.last_node(),
            })
        }
    }

    /// Interpolated value at `t`. Arguments outside the node range are
    /// clamped to the nearest endpoint.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.first_node(), self.last_node());
        let i = self.segment_of(t);
        let (c0, c1, c2, c3) = self.hermite_coeffs(i);
        let dt = t - self.nodes[i];
        c0 + dt * (c1 + dt * (c2 + dt * c3))
    }

    /// Second derivative of the interpolant at `t` (piecewise linear,
    /// discontinuous across nodes).
    pub fn second_derivative(&self, t: f64) -> f64 {
        let t = t.clamp(self.first_node(), self.last_node());
        let i = self.segment_of(t);
        let (_, _, c2, c3) = self.hermite_coeffs(i);
        2.0 * c2 + 6.0 * c3 * (t - self.nodes[i])
    }

    /// Three-point second difference at interior node `i` (non-uniform
    /// spacing supported). `i` must satisfy `0 < i < len - 1`.
    pub(crate) fn second_difference(&self, i: usize) -> f64 {
        let hl = self.nodes[i] - self.nodes[i - 1];
        let hr = self.nodes[i + 1] - self.nodes[i];
        2.0 * (self.values[i - 1] * hr - self.values[i] * (hl + hr) + self.values[i + 1] * hl)
            / (hl * hr * (hl + hr))
    }

    fn segment_of(&self, t: f64) -> usize {
        // index of the segment [nodes[i], nodes[i+1]] containing t
        let n = self.nodes.len();
        match self.nodes.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    fn hermite_coeffs(&self, i: usize) -> (f64, f64, f64, f64) {
        let h = self.nodes[i + 1] - self.nodes[i];
        let delta = (self.values[i + 1] - self.values[i]) / h;
        let c2 = (3.0 * delta - 2.0 * self.slopes[i] - self.slopes[i + 1]) / h;
        let c3 = (self.slopes[i] + self.slopes[i + 1] - 2.0 * delta) / (h * h);
        (self.values[i], self.slopes[i], c2, c3)
    }
}

/// Fritsch–Carlson derivative estimates: harmonic-mean weighting inside,
/// clamped one-sided differences at the ends.
fn pchip_slopes(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let h: Vec<f64> = (0..n - 1).map(|i| nodes[i + 1] - nodes[i]).collect();
    let delta: Vec<f64> = (0..n - 1)
        .map(|i| (values[i + 1] - values[i]) / h[i])
        .collect();

    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        d = 0.0;
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        d = 3.0 * d0;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64, n: usize) -> GridFunction {
        let iv = Interval::new(0.0, 1.0).unwrap();
        GridFunction::sample(&iv, n, f).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(GridFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0, 0.5], vec![0.0; 3]).is_err());
        assert!(GridFunction::new(vec![0.0, 0.5, 1.0], vec![0.0; 2]).is_err());
        assert!(GridFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn interpolation_is_exact_at_nodes() {
        let g = grid(|t| t * t * t - 0.3 * t, 17);
        for (&t, &v) in g.nodes().iter().zip(g.values()) {
            assert_eq!(g.eval(t), v);
        }
    }

    #[test]
    fn interpolation_error_for_smooth_data_shrinks() {
        let coarse = grid(|t| (3.0 * t).sin(), 11);
        let fine = grid(|t| (3.0 * t).sin(), 41);
        let err = |g: &GridFunction| {
            (0..1000)
                .map(|k| {
                    let t = k as f64 / 999.0;
                    (g.eval(t) - (3.0 * t).sin()).abs()
                })
                .fold(0.0f64, f64::max)
        };
        assert!(err(&fine) < err(&coarse) / 8.0);
    }

    #[test]
    fn no_overshoot_on_monotone_data() {
        // step-like monotone data: interpolant must stay inside [0, 1]
        let nodes = vec![0.0, 0.3, 0.45, 0.55, 0.7, 1.0];
        let values = vec![0.0, 0.01, 0.1, 0.9, 0.99, 1.0];
        let g = GridFunction::new(nodes, values).unwrap();
        for k in 0..=500 {
            let t = k as f64 / 500.0;
            let v = g.eval(t);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "overshoot at {t}: {v}");
        }
    }

    #[test]
    fn second_difference_exact_for_quadratics() {
        let g = grid(|t| 3.0 * t * t - t + 0.5, 9);
        for i in 1..g.len() - 1 {
            assert!((g.second_difference(i) - 6.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eval_clamps_outside_range() {
        let g = grid(|t| t, 5);
        assert_eq!(g.eval(-1.0), 0.0);
        assert_eq!(g.eval(2.0), 1.0);
    }
}
