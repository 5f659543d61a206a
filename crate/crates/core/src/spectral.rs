//! Lyapunov-type certification and principal-eigenvalue estimation for
//! `T u(t) + q(t) u(t) = 0` with Dirichlet conditions.
//!
//! A nontrivial solution forces the weighted size of `q` to satisfy
//! `integral_a^b |q(s)| (s - a)^(alpha - 2) ds >= 4 / (b - a)`; a report
//! certifying that the inequality FAILS therefore proves that only the
//! trivial solution exists. The principal eigenvalue of the constant-`q`
//! family, estimated by a Nystrom discretization of the equivalent Green
//! integral operator, exercises the inequality on the one family where
//! nontrivial solutions provably exist.

use crate::domain::{Interval, Order};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linear::GreenKernel;
use crate::quad::singular_rule;

const LYAPUNOV_RULE: usize = 128;

/// Outcome of the necessary-condition evaluation.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LyapunovReport {
    /// `integral_a^b |q(s)| (s - a)^(alpha - 2) ds`.
    pub weighted_q_integral: f64,
    /// `4 / (b - a)`.
    pub bound: f64,
    /// `weighted_q_integral - bound`.
    pub margin: f64,
    /// True when `margin >= -1e-10`: the necessary condition holds, so a
    /// nontrivial solution is not excluded. False proves triviality.
    pub certified: bool,
    pub alpha: f64,
    pub interval: Interval,
}

/// `integral_a^b |q(s)| (s - a)^(alpha - 2) ds` by the singular Gauss rule.
pub fn weighted_q_norm(
    q: &dyn Fn(f64) -> f64,
    interval: &Interval,
    order: &Order,
    rule_size: usize,
) -> Result<f64> {
    let (nodes, weights) = singular_rule(interval.a(), interval.b(), order.alpha(), rule_size)?;
    let mut acc = 0.0;
    for (&s, &w) in nodes.iter().zip(&weights) {
        let v = q(s);
        if !v.is_finite() {
            return Err(Error::NonFiniteEvaluation { node: s });
        }
        acc += w * v.abs();
    }
    Ok(acc)
}

/// Evaluates the necessary condition for nontrivial solutions of
/// `T u + q u = 0`, `u(a) = u(b) = 0`.
pub fn lyapunov_check(
    q: &dyn Fn(f64) -> f64,
    interval: &Interval,
    order: &Order,
) -> Result<LyapunovReport> {
    let weighted_q_integral = weighted_q_norm(q, interval, order, LYAPUNOV_RULE)?;
    let bound = 4.0 / interval.length();
    let margin = weighted_q_integral - bound;
    Ok(LyapunovReport {
        weighted_q_integral,
        bound,
        margin,
        certified: margin >= -1e-10,
        alpha: order.alpha(),
        interval: *interval,
    })
}

/// Principal eigenpair of `T u + lambda u = 0` with Dirichlet conditions.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EigenResult {
    /// Smallest positive eigenvalue.
    pub lambda1: f64,
    /// Interior-positive eigenfunction on a uniform grid, sup-norm one.
    pub eigenfunction: GridFunction,
    /// Nystrom discretization size used for `lambda1`.
    pub discretization_size: usize,
    /// `|lambda1(n) - lambda1(2n)|`, a Richardson-style error estimate.
    pub estimated_error: f64,
}

/// Estimates the principal eigenvalue by power iteration on the Nystrom
/// matrix `K[i][j] = G(s_i, s_j) w_j` built from the singular Gauss rule:
/// `lambda1 = 1 / mu_max`. The error estimate compares sizes `n` and `2n`.
pub fn principal_eigenvalue(interval: &Interval, order: &Order, n: usize) -> Result<EigenResult> {
    if n < 8 {
        return Err(Error::TooFewPoints {
            what: "eigenvalue discretization",
            min: 8,
            got: n,
        });
    }
    let (lambda, nodes, _weights, v) = nystrom_principal(interval, order, n)?;
    let (lambda_fine, _, _, _) = nystrom_principal(interval, order, 2 * n)?;

    // eigenvector values at the quadrature nodes, zero-padded to the
    // boundary, interior-positive, sup-norm one
    let mut grid_nodes = Vec::with_capacity(n + 2);
    grid_nodes.push(interval.a());
    grid_nodes.extend(&nodes);
    grid_nodes.push(interval.b());
    let mut values = Vec::with_capacity(n + 2);
    values.push(0.0);
    values.extend(&v);
    values.push(0.0);
    let interior_sum: f64 = values.iter().sum();
    if interior_sum < 0.0 {
        for v in &mut values {
            *v = -*v;
        }
    }
    let sup = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for v in &mut values {
        *v /= sup;
    }
    let eigenfunction = GridFunction::new(grid_nodes, values)?;

    Ok(EigenResult {
        lambda1: lambda,
        eigenfunction,
        discretization_size: n,
        estimated_error: (lambda - lambda_fine).abs(),
    })
}

/// Power iteration for the dominant eigenvalue of the Nystrom matrix.
/// `(lambda1, nodes, weights, eigenvector)` of one Nystrom discretization.
type NystromSolve = (f64, Vec<f64>, Vec<f64>, Vec<f64>);

fn nystrom_principal(interval: &Interval, order: &Order, n: usize) -> Result<NystromSolve> {
    let (nodes, weights) = singular_rule(interval.a(), interval.b(), order.alpha(), n)?;
    let kernel = GreenKernel::new(*interval);
    let mut k = vec![0.0_f64; n * n];
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = kernel.eval(nodes[i], nodes[j])? * weights[j];
        }
    }

    // interior bump as the starting vector: already close to the principal
    // mode, and positive, so no sign ambiguity during the iteration
    let mut v: Vec<f64> = nodes
        .iter()
        .map(|&s| (s - interval.a()) * (interval.b() - s))
        .collect();
    let sup = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    v.iter_mut().for_each(|x| *x /= sup);

    const MAX_STEPS: usize = 10_000;
    const STALL_TOL: f64 = 1e-12;
    let mut mu_prev = 0.0_f64;
    let mut relative_change = f64::INFINITY;
    for step in 0..MAX_STEPS {
        let mut y = vec![0.0_f64; n];
        for i in 0..n {
            let row = &k[i * n..(i + 1) * n];
            y[i] = row.iter().zip(&v).map(|(&a, &b)| a * b).sum();
        }
        // weighted Rayleigh quotient: the similarity transform
        // D^(1/2) K D^(-1/2) with D = diag(w) is symmetric, so this quotient
        // converges quadratically in the eigenvector error
        let num: f64 = weights
            .iter()
            .zip(&v)
            .zip(&y)
            .map(|((&w, &a), &b)| w * a * b)
            .sum();
        let den: f64 = weights.iter().zip(&v).map(|(&w, &a)| w * a * a).sum();
        let mu = num / den;
        let sup = y.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        y.iter_mut().for_each(|x| *x /= sup);
        v = y;
        relative_change = ((mu - mu_prev) / mu).abs();
        if step > 0 && relative_change < 1e-14 {
            return Ok((1.0 / mu, nodes, weights, v));
        }
        mu_prev = mu;
    }
    if relative_change > STALL_TOL {
        Err(Error::PowerIterationStalled {
            steps: MAX_STEPS,
            relative_change,
        })
    } else {
        Ok((1.0 / mu_prev, nodes, weights, v))
    }
}

/// Ratio of the weighted norm of `q = lambda1` to the Lyapunov bound:
/// `lambda1 * (b - a)^(alpha - 1) / (alpha - 1) / (4 / (b - a))`.
///
/// Since the constant `q = lambda1` admits a nontrivial solution, the ratio
/// must be at least one; near `alpha = 2` on the unit interval it approaches
/// `pi^2 / 4`.
pub fn sharpness_probe(interval: &Interval, order: &Order, n: usize) -> Result<f64> {
    let eigen = principal_eigenvalue(interval, order, n)?;
    let mass = interval.length().powf(order.beta()) / order.beta();
    Ok(eigen.lambda1 * mass * interval.length() / 4.0)
}

/// Evaluates `integral_a^b |u''(t)| / u(t) dt / (4 / (b - a))` for a
/// function positive on the interior with `u(a) = u(b) = 0`.
///
/// The integrand is typically singular at the endpoints. Integration starts
/// from a 1%-truncated core and refines toward both endpoints in dyadic
/// shells; when the shell contributions do not decay (or the partial
/// integral exceeds 1e12) the integral is divergent and `f64::INFINITY` is
/// returned; the inequality direction is preserved either way.
///
/// `u_second` supplies `u''` analytically; when absent the interpolant's
/// piecewise second derivative is used.
pub fn borg_ratio(
    u: &GridFunction,
    u_second: Option<&dyn Fn(f64) -> f64>,
    interval: &Interval,
) -> Result<f64> {
    u.require_span(interval)?;
    let scale = u.sup_norm().max(1e-300);
    for (end, value) in [
        (interval.a(), u.values()[0]),
        (interval.b(), *u.values().last().unwrap()),
    ] {
        if value.abs() > 1e-9 * scale {
            return Err(Error::BoundaryNotZero { end, value });
        }
    }
    // positivity on a dense interior sample
    const SAMPLES: usize = 2048;
    let inset = 1e-6 * interval.length();
    for k in 0..SAMPLES {
        let t = interval.a()
            + inset
            + (interval.length() - 2.0 * inset) * k as f64 / (SAMPLES - 1) as f64;
        let v = u.eval(t);
        if v <= 0.0 {
            return Err(Error::PositivityViolation { t, value: v });
        }
    }

    let integrand = |t: f64| -> f64 {
        let upp = match u_second {
            Some(f) => f(t),
            None => u.second_derivative(t),
        };
        upp.abs() / u.eval(t)
    };

    const BLOWUP: f64 = 1e12;
    let eps0 = 0.01 * interval.length();
    let mut total = adaptive_simpson(&integrand, interval.a() + eps0, interval.b() - eps0, 1e-11);

    // dyadic shell refinement toward each endpoint
    for left in [true, false] {
        let mut eps = eps0;
        let mut prev_shell = f64::INFINITY;
        let mut shell = f64::INFINITY;
        let mut resolved = false;
        for _ in 0..40 {
            let next = 0.5 * eps;
            let (lo, hi) = if left {
                (interval.a() + next, interval.a() + eps)
            } else {
                (interval.b() - eps, interval.b() - next)
            };
            prev_shell = shell;
            shell = adaptive_simpson(&integrand, lo, hi, 1e-12);
            total += shell;
            if !total.is_finite() || total.abs() > BLOWUP {
                return Ok(f64::INFINITY);
            }
            eps = next;
            if shell.abs() < 1e-14 * total.abs().max(1.0) {
                resolved = true;
                break;
            }
        }
        if !resolved {
            // geometric extrapolation of the remaining tail; a ratio near or
            // above one means the shell contributions do not die out
            let ratio = (shell / prev_shell).abs();
            if !ratio.is_finite() || ratio > 0.95 {
                return Ok(f64::INFINITY);
            }
            total += shell * ratio / (1.0 - ratio);
        }
    }
    Ok(total / (4.0 / interval.length()))
}

/// Recursive adaptive Simpson quadrature.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, mid: f64, hi: f64) -> f64 {
        (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi))
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let mid = 0.5 * (lo + hi);
        let left = simpson(f, lo, 0.5 * (lo + mid), mid);
        let right = simpson(f, mid, 0.5 * (mid + hi), hi);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, lo, mid, left, 0.5 * tol, depth - 1)
            + recurse(f, mid, hi, right, 0.5 * tol, depth - 1)
    }
    let mid = 0.5 * (lo + hi);
    let whole = simpson(f, lo, mid, hi);
    recurse(f, lo, hi, whole, tol.max(1e-14), 28)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn weighted_norm_examples() {
        let order = Order::new(1.5).unwrap();
        let v = weighted_q_norm(&|_| 1.0, &unit(), &order, 16).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = weighted_q_norm(&|_| 0.0, &unit(), &order, 16).unwrap();
        assert_eq!(v, 0.0);
        let v = weighted_q_norm(&|s| s, &unit(), &order, 16).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lyapunov_small_q_not_certified() {
        // integral 2.0 < bound 4.0: nontrivial solutions are excluded
        let report = lyapunov_check(&|_| 1.0, &unit(), &Order::new(1.5).unwrap()).unwrap();
        assert!((report.weighted_q_integral - 2.0).abs() < 1e-12);
        assert!((report.bound - 4.0).abs() < 1e-15);
        assert!(!report.certified);
        assert!((report.margin + 2.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_classical_scale_q_certified() {
        // q = pi^2 with alpha near 2: integral ~ pi^2 / (alpha - 1) >= 4
        let report =
            lyapunov_check(&|_| PI * PI, &unit(), &Order::new(2.0 - 1e-3).unwrap()).unwrap();
        assert!(report.certified);
        assert!(report.weighted_q_integral > 9.8);
    }

    #[test]
    fn lyapunov_bound_scales_with_interval() {
        let report = lyapunov_check(
            &|_| 1.0,
            &Interval::new(0.0, 2.0).unwrap(),
            &Order::new(1.5).unwrap(),
        )
        .unwrap();
        assert!((report.bound - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_rejects_small_n() {
        assert!(principal_eigenvalue(&unit(), &Order::new(1.5).unwrap(), 7).is_err());
    }

    #[test]
    fn eigen_classical_limit() {
        // alpha -> 2 recovers the classical -u'' = lambda u: lambda1 = pi^2
        let res = principal_eigenvalue(&unit(), &Order::new(1.999).unwrap(), 64).unwrap();
        assert!(
            (res.lambda1 - PI * PI).abs() / (PI * PI) < 5e-3,
            "lambda1 = {}",
            res.lambda1
        );
        assert!(res.lambda1 > 0.0);
        let ef = &res.eigenfunction;
        assert_eq!(ef.values()[0], 0.0);
        assert_eq!(*ef.values().last().unwrap(), 0.0);
        assert!((ef.sup_norm() - 1.0).abs() < 1e-12);
        // interior positive
        assert!(ef.values()[1..ef.len() - 1].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn borg_constant_ratio_for_sine() {
        // |u''|/u = pi^2 for u = sin(pi t): ratio = pi^2 / 4
        let u = GridFunction::sample(&unit(), 201, |t| (PI * t).sin()).unwrap();
        let second = |t: f64| -PI * PI * (PI * t).sin();
        let ratio = borg_ratio(&u, Some(&second), &unit()).unwrap();
        assert!(
            (ratio - PI * PI / 4.0).abs() < 1e-6,
            "ratio = {ratio}, expected {}",
            PI * PI / 4.0
        );
    }

    #[test]
    fn borg_divergent_integral_yields_sentinel() {
        // u = t (1 - t): |u''|/u ~ 2/t near 0, log-divergent
        let u = GridFunction::sample(&unit(), 201, |t| t * (1.0 - t)).unwrap();
        let second = |_: f64| -2.0;
        let ratio = borg_ratio(&u, Some(&second), &unit()).unwrap();
        assert!(ratio.is_infinite() && ratio > 0.0);
    }

    #[test]
    fn borg_rejects_sign_change() {
        let u = GridFunction::sample(&unit(), 201, |t| (2.0 * PI * t).sin()).unwrap();
        let second = |t: f64| -4.0 * PI * PI * (2.0 * PI * t).sin();
        assert!(matches!(
            borg_ratio(&u, Some(&second), &unit()),
            Err(Error::PositivityViolation { .. })
        ));
    }

    #[test]
    fn borg_rejects_nonzero_boundary() {
        let u = GridFunction::sample(&unit(), 31, |t| 1.0 + t * (1.0 - t)).unwrap();
        assert!(matches!(
            borg_ratio(&u, None, &unit()),
            Err(Error::BoundaryNotZero { .. })
        ));
    }
}
