//! Gauss quadrature for the integrable endpoint weight `(s - a)^(alpha - 2)`.
//!
//! With `alpha` in (1, 2) the weight exponent lies in (-1, 0): the weight
//! blows up at `s = a` but remains integrable. A Gauss rule built directly
//! against that weight (a Gauss–Jacobi rule with parameters `(0, alpha - 2)`
//! after the affine map to [-1, 1]) integrates `p(s) (s - a)^(alpha - 2)`
//! exactly for every polynomial `p` of degree at most `2 n - 1`, so the
//! singularity costs nothing in accuracy.
//!
//! Nodes and weights come from the Golub–Welsch algorithm: eigenvalues and
//! first eigenvector components of the symmetric tridiagonal matrix built
//! from the Jacobi three-term recurrence.

use crate::domain::{Interval, Order};
use crate::error::{Error, Result};

/// A positive-weight rule approximating
/// `integral_a^b phi(s) (s - a)^(alpha - 2) ds`.
///
/// All nodes lie strictly inside the interval, all weights are positive, and
/// the weights sum to the exact weight mass `(b - a)^(alpha - 1) / (alpha - 1)`.
#[derive(Debug, Clone)]
pub struct WeightedQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    declared_degree: usize,
    anchor: f64,
    alpha: f64,
}

impl WeightedQuadrature {
    /// Quadrature nodes, strictly increasing, all inside `(a, b)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive quadrature weights (the singular density is folded in).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Polynomial degree up to which the weighted integral of `(s - a)^k`
    /// is exact.
    pub fn declared_degree(&self) -> usize {
        self.declared_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Left endpoint `a` the weight is anchored at.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Builds the Gauss rule for `integral_a^b phi(s) (s - a)^(alpha - 2) ds`
/// with `n_points` nodes. Exact for `phi` polynomial of degree
/// `<= 2 n_points - 1`.
pub fn build_weighted_quadrature(
    interval: &Interval,
    order: &Order,
    n_points: usize,
) -> Result<WeightedQuadrature> {
    let (nodes, weights) = singular_rule(interval.a(), interval.b(), order.alpha(), n_points)?;
    Ok(WeightedQuadrature {
        nodes,
        weights,
        declared_degree: 2 * n_points - 1,
        anchor: interval.a(),
        alpha: order.alpha(),
    })
}

/// Applies the rule to `phi`: returns `sum_j w_j phi(s_j)`.
///
/// A non-finite evaluation of `phi` is reported together with the offending
/// node.
pub fn weighted_integral(rule: &WeightedQuadrature, phi: impl Fn(f64) -> f64) -> Result<f64> {
    let mut acc = 0.0;
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = phi(s);
        if !v.is_finite() {
            return Err(Error::NonFiniteEvaluation { node: s });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Gauss rule on `[a, upper]` for the weight `(s - a)^(alpha - 2)`:
/// returns `(nodes, weights)` with the weight mass folded into the weights.
pub(crate) fn singular_rule(
    a: f64,
    upper: f64,
    alpha: f64,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::TooFewPoints {
            what: "quadrature rule",
            min: 2,
            got: n,
        });
    }
    if upper <= a || !upper.is_finite() || !a.is_finite() {
        return Err(Error::InvalidInterval { a, b: upper });
    }
    let (x, w) = gauss_jacobi_left(n, alpha - 2.0)?;
    let half = 0.5 * (upper - a);
    let scale = half.powf(alpha - 1.0);
    let nodes = x.iter().map(|&xi| a + half * (1.0 + xi)).collect();
    let weights = w.iter().map(|&wi| scale * wi).collect();
    Ok((nodes, weights))
}

/// Gauss–Legendre rule on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi_left(n, 0.0)
}

/// Gauss–Jacobi rule on [-1, 1] for the weight `(1 + x)^b_exp`, `b_exp > -1`
/// (the `(1 - x)` exponent is zero). Golub–Welsch: the recurrence matrix is
/// symmetric tridiagonal; weights are `mu0` times the squared first
/// eigenvector components, where `mu0 = 2^(b_exp + 1) / (b_exp + 1)` is the
/// total weight mass.
pub(crate) fn gauss_jacobi_left(n: usize, b_exp: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    debug_assert!(b_exp > -1.0);
    let a_exp = 0.0_f64;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (b_exp - a_exp) / (2.0 + a_exp + b_exp);
    for k in 0..n - 1 {
        let kp1 = (k + 1) as f64;
        let denom = 2.0 * kp1 + a_exp + b_exp;
        off[k] = 2.0 / denom
            * (kp1 * (kp1 + a_exp) * (kp1 + b_exp) * (kp1 + a_exp + b_exp)
                / ((denom + 1.0) * (denom - 1.0)))
                .sqrt();
        diag[k + 1] = (b_exp * b_exp - a_exp * a_exp) / (denom * (denom + 2.0));
    }

    let mut first_row = vec![0.0; n];
    first_row[0] = 1.0;
    tridiag_eigen_first_row(&mut diag, &mut off, &mut first_row)?;

    let mu0 = 2.0_f64.powf(b_exp + 1.0) / (b_exp + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&first_row)
        .map(|(&x, &z)| (x, mu0 * z * z))
        .collect();
    pairs.sort_unstable_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Ok(pairs.into_iter().unzip())
}

/// QL algorithm with implicit shifts for a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e` the subdiagonal (`e[i]` couples `i` and
/// `i + 1`; `e[n - 1]` is scratch). On return `d` holds the eigenvalues and
/// `z` the first components of the orthonormal eigenvectors, provided `z`
/// came in as the first row of the identity.
fn tridiag_eigen_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigensolverFailed);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Flattened graded composite rule for
/// `integral_a^upper (s - a)^(alpha - 2) psi(s) ds`: returns `(nodes,
/// weights)` with the weight folded in, like [`singular_rule`].
///
/// Panel boundaries are the union of a dyadic sequence shrinking toward the
/// singular endpoint and the caller-supplied `breaks` (points in
/// `(a, upper)` where the integrand may lose smoothness, e.g. interpolation
/// nodes). Each panel carries a Gauss–Legendre rule applied to the full
/// integrand (smooth there), and the innermost sliver is finished with a
/// small singular Gauss rule. This keeps near-machine accuracy even when
/// `psi` has an algebraic endpoint factor such as `(s - a)^(2 - alpha)`,
/// where a single global Gauss rule converges only algebraically.
pub(crate) fn graded_rule_with_breaks(
    a: f64,
    upper: f64,
    alpha: f64,
    panel_points: usize,
    breaks: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    const LEVELS: usize = 48;
    let pts = panel_points.clamp(4, 64);
    let (gx, gw) = gauss_legendre(pts)?;
    let len = upper - a;

    // panel edges as offsets from the singular endpoint, descending; the
    // innermost edge must stay representable above `a`
    let tail = (len * 0.5_f64.powi(LEVELS as i32)).max(8.0 * f64::EPSILON * a.abs());
    let mut edges: Vec<f64> = (0..=LEVELS as i32)
        .map(|k| len * 0.5_f64.powi(k))
        .filter(|&d| d > tail)
        .collect();
    edges.push(tail);
    edges.extend(
        breaks
            .iter()
            .map(|&t| t - a)
            .filter(|&d| d > tail && d < len),
    );
    edges.sort_unstable_by(|p, q| q.partial_cmp(p).unwrap());
    edges.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * len);

    let mut nodes = Vec::with_capacity((edges.len() + 8) * pts);
    let mut weights = Vec::with_capacity((edges.len() + 8) * pts);
    for pair in edges.windows(2) {
        let (hi, lo) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &w) in gx.iter().zip(&gw) {
            let offset = mid + half * x;
            nodes.push(a + offset);
            weights.push(w * half * offset.powf(alpha - 2.0));
        }
    }
    // innermost sliver up to the edge that actually survived dedup: the
    // singular rule soaks up the remaining weight mass, which decays only
    // like sliver^(alpha - 1). Built in offset space so its coverage meets
    // the panel edge exactly; only the evaluation positions get shifted.
    let sliver = *edges.last().unwrap();
    let (tn, tw) = singular_rule(0.0, sliver, alpha, 8)?;
    nodes.extend(tn.iter().map(|&d| a + d));
    weights.extend(tw);
    Ok((nodes, weights))
}

/// [`graded_rule_with_breaks`] without extra breakpoints.
pub(crate) fn graded_rule(
    a: f64,
    upper: f64,
    alpha: f64,
    panel_points: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    graded_rule_with_breaks(a, upper, alpha, panel_points, &[])
}

/// Graded composite quadrature (see [`graded_rule`]) applied to `psi`.
pub(crate) fn graded_weighted_integral(
    a: f64,
    upper: f64,
    alpha: f64,
    panel_points: usize,
    psi: impl Fn(f64) -> f64,
) -> Result<f64> {
    let (nodes, weights) = graded_rule(a, upper, alpha, panel_points)?;
    let mut total = 0.0;
    for (&s, &w) in nodes.iter().zip(&weights) {
        let v = psi(s);
        if !v.is_finite() {
            return Err(Error::NonFiniteEvaluation { node: s });
        }
        total += w * v;
    }
    Ok(total)
}
