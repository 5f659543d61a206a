//! Core domain types: the fractional order and the problem interval.

use crate::error::{Error, Result};

/// Fractional order `alpha`, restricted to the open interval (1, 2).
///
/// The derived quantities used throughout the crate are `beta = alpha - 1`
/// in (0, 1) and the weight exponent `alpha - 2` in (-1, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Order {
    alpha: f64,
}

impl Order {
    /// Rejects non-finite values and both endpoints: `alpha` must satisfy
    /// `1 < alpha < 2` strictly.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 || alpha >= 2.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `alpha - 1`, in (0, 1).
    pub fn beta(&self) -> f64 {
        self.alpha - 1.0
    }

    /// `alpha - 2`, in (-1, 0); exponent of the integrable weight
    /// `(s - a)^(alpha - 2)`.
    pub fn weight_exponent(&self) -> f64 {
        self.alpha - 2.0
    }
}

/// The domain `[a, b]` of the boundary value problem, `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    /// `n` uniformly spaced nodes with both endpoints hit exactly.
    pub fn uniform_nodes(&self, n: usize) -> Vec<f64> {
        let h = self.length() / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| self.a + i as f64 * h).collect();
        nodes[0] = self.a;
        nodes[n - 1] = self.b;
        nodes
    }

    /// Cosine-clustered nodes, denser near both endpoints. Useful when the
    /// solution varies like `(t - a)^alpha` near the left end.
    pub fn cosine_nodes(&self, n: usize) -> Vec<f64> {
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| {
                let theta = std::f64::consts::PI * i as f64 / (n - 1) as f64;
                self.a + self.length() * 0.5 * (1.0 - theta.cos())
            })
            .collect();
        nodes[0] = self.a;
        nodes[n - 1] = self.b;
        nodes
    }
}
