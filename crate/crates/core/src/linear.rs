//! Green kernel of the Dirichlet problem `T u + y = 0`, `u(a) = u(b) = 0`,
//! and the quadrature-based linear solver
//! `u(t) = integral_a^b G(t, s) y(s) (s - a)^(alpha - 2) ds`.

use crate::domain::{Interval, Order};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quad::graded_rule_with_breaks;

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// The two-branch Green kernel
/// `G(t, s) = (1/(b-a)) * { -(b-a)(t-s) + (b-s)(t-a)  for s <= t;
///                          (b-s)(t-a)                 for t < s }`.
///
/// `G` is continuous, vanishes on the rows `t = a` and `t = b`, and satisfies
/// `0 <= G <= b - a` everywhere.
#[derive(Debug, Clone, Copy)]
pub struct GreenKernel {
    interval: Interval,
}

impl GreenKernel {
    pub fn new(interval: Interval) -> Self {
        Self { interval }
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    /// Evaluates the kernel; both branches agree at `s = t` with the value
    /// `(b - t)(t - a)/(b - a)`.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        let (a, b) = (self.interval.a(), self.interval.b());
        for (name, v) in [("t", t), ("s", s)] {
            if !self.interval.contains(v) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    lo: a,
                    hi: b,
                });
            }
        }
        let len = b - a;
        let v = if s <= t {
            (-(len) * (t - s) + (b - s) * (t - a)) / len
        } else {
            (b - s) * (t - a) / len
        };
        Ok(v)
    }
}

/// The linear Dirichlet problem `T u(t) + y(t) = 0`, `u(a) = u(b) = 0` with
/// continuous forcing `y`.
pub struct LinearProblem {
    interval: Interval,
    order: Order,
    forcing: ScalarFn,
}

impl LinearProblem {
    /// The forcing is screened for finiteness on a 10^3-point sample.
    pub fn new(
        interval: Interval,
        order: Order,
        forcing: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        const SAMPLES: usize = 1000;
        let h = interval.length() / (SAMPLES - 1) as f64;
        for k in 0..SAMPLES {
            let t = interval.a() + k as f64 * h;
            if !forcing(t).is_finite() {
                return Err(Error::NonFiniteSample { t, x: f64::NAN });
            }
        }
        Ok(Self {
            interval,
            order,
            forcing: Box::new(forcing),
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn forcing(&self, t: f64) -> f64 {
        (self.forcing)(t)
    }
}

/// Shared assembly for Green-kernel integrals on a fixed output grid: one
/// graded composite rule on the whole interval plus one on `[a, t_i]` for
/// each interior node, so the kernel's slope break at `s = t` always
/// coincides with a panel boundary and algebraic endpoint factors in the
/// forcing (ubiquitous in this problem class, e.g. `(s - a)^(2 - alpha)`
/// terms) are still resolved to near machine accuracy.
pub(crate) struct GreenSolver {
    nodes: Vec<f64>,
    a: f64,
    b: f64,
    local: Vec<Option<(Vec<f64>, Vec<f64>)>>,
    full: (Vec<f64>, Vec<f64>),
}

impl GreenSolver {
    pub(crate) fn new(
        interval: &Interval,
        order: &Order,
        nodes: &[f64],
        rule_size: usize,
    ) -> Result<Self> {
        let (a, b) = (interval.a(), interval.b());
        let alpha = order.alpha();
        let n = nodes.len();
        let interior = &nodes[1..n - 1];
        let full = graded_rule_with_breaks(a, b, alpha, rule_size, interior)?;
        let mut local = Vec::with_capacity(n);
        for (i, &t) in nodes.iter().enumerate() {
            if i == 0 || i == n - 1 {
                local.push(None);
            } else {
                local.push(Some(graded_rule_with_breaks(
                    a,
                    t,
                    alpha,
                    rule_size,
                    &nodes[1..i],
                )?));
            }
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            a,
            b,
            local,
            full,
        })
    }

    pub(crate) fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Evaluates `integral_a^b G(t_i, s) rho(s) y(s) ds` on every grid node,
    /// splitting the integral at `s = t_i`:
    /// `-integral_a^t (t - s) rho y + (t - a)/(b - a) integral_a^b (b - s) rho y`.
    /// The boundary entries come out exactly zero.
    pub(crate) fn apply(&self, y: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
        let mut i_full = 0.0;
        for (&s, &w) in self.full.0.iter().zip(&self.full.1) {
            let v = y(s);
            if !v.is_finite() {
                return Err(Error::NonFiniteEvaluation { node: s });
            }
            i_full += w * (self.b - s) * v;
        }
        let n = self.nodes.len();
        let mut out = vec![0.0; n];
        let interior = out[1..n - 1]
            .iter_mut()
            .zip(&self.nodes[1..n - 1])
            .zip(&self.local[1..n - 1]);
        for ((out_i, &t), rule) in interior {
            let (sn, sw) = rule.as_ref().unwrap();
            let mut i_loc = 0.0;
            for (&s, &w) in sn.iter().zip(sw) {
                let v = y(s);
                if !v.is_finite() {
                    return Err(Error::NonFiniteEvaluation { node: s });
                }
                i_loc += w * (t - s) * v;
            }
            *out_i = -i_loc + (t - self.a) / (self.b - self.a) * i_full;
        }
        Ok(out)
    }
}

/// Solves the linear problem on `n_grid` uniform nodes. The boundary values
/// are exactly zero; interior values are the split weighted-quadrature
/// evaluation of the Green integral.
pub fn solve_linear(
    problem: &LinearProblem,
    n_grid: usize,
    rule_size: usize,
) -> Result<GridFunction> {
    if n_grid < 3 {
        return Err(Error::TooFewPoints {
            what: "solution grid",
            min: 3,
            got: n_grid,
        });
    }
    let nodes = problem.interval.uniform_nodes(n_grid);
    solve_linear_on(problem, &nodes, rule_size)
}

/// Same as [`solve_linear`] on a caller-supplied node set (for example
/// [`Interval::cosine_nodes`] to resolve the `(t - a)^alpha` behaviour near
/// the left endpoint).
pub fn solve_linear_on(
    problem: &LinearProblem,
    nodes: &[f64],
    rule_size: usize,
) -> Result<GridFunction> {
    let solver = GreenSolver::new(&problem.interval, &problem.order, nodes, rule_size)?;
    let values = solver.apply(&|s| problem.forcing(s))?;
    let grid = GridFunction::new(solver.nodes().to_vec(), values)?;
    grid.require_span(&problem.interval)?;
    Ok(grid)
}

/// Outcome of a kernel bounds scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundsCheck {
    Pass { max_observed: f64 },
    Fail { t: f64, s: f64, value: f64 },
}

/// Samples `G` on an `n x n` tensor grid plus the diagonal `s = t` and checks
/// `-1e-12 <= G <= (b - a) + 1e-12`. On failure the witness point is
/// returned.
pub fn check_green_bounds(kernel: &GreenKernel, n_samples: usize) -> Result<BoundsCheck> {
    if n_samples < 10 {
        return Err(Error::TooFewPoints {
            what: "bounds scan",
            min: 10,
            got: n_samples,
        });
    }
    const TOL: f64 = 1e-12;
    let iv = kernel.interval();
    let upper = iv.length() + TOL;
    let grid = iv.uniform_nodes(n_samples);
    let mut max_observed = f64::NEG_INFINITY;
    let mut check = |t: f64, s: f64| -> Result<Option<BoundsCheck>> {
        let g = kernel.eval(t, s)?;
        if g < -TOL || g > upper {
            return Ok(Some(BoundsCheck::Fail { t, s, value: g }));
        }
        max_observed = max_observed.max(g);
        Ok(None)
    };
    for &t in &grid {
        for &s in &grid {
            if let Some(fail) = check(t, s)? {
                return Ok(fail);
            }
        }
        // diagonal point s = t is where the kernel peaks
        if let Some(fail) = check(t, t)? {
            return Ok(fail);
        }
    }
    Ok(BoundsCheck::Pass { max_observed })
}

/// Second-difference residual `r(t) = (t - a)^(2 - alpha) u''(t) + y(t)` on
/// the interior nodes of `u`, excluding a left buffer of 5% of the interval
/// where the degenerate weight amplifies differencing noise.
pub fn residual_linear(u: &GridFunction, problem: &LinearProblem) -> Result<GridFunction> {
    let (nodes, values) = residual_parts(u, &problem.interval, &problem.order, &|t| {
        problem.forcing(t)
    })?;
    GridFunction::new(nodes, values)
}

/// Residual assembly shared with the nonlinear solver, where `y` becomes
/// `t -> f(t, u(t))`.
pub(crate) fn residual_parts(
    u: &GridFunction,
    interval: &Interval,
    order: &Order,
    y: &dyn Fn(f64) -> f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if u.len() < 5 {
        return Err(Error::TooFewPoints {
            what: "residual grid",
            min: 5,
            got: u.len(),
        });
    }
    u.require_span(interval)?;
    let a = interval.a();
    let cutoff = a + 0.05 * interval.length();
    let alpha = order.alpha();
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for i in 1..u.len() - 1 {
        let t = u.nodes()[i];
        if t < cutoff {
            continue;
        }
        nodes.push(t);
        values.push((t - a).powf(2.0 - alpha) * u.second_difference(i) + y(t));
    }
    if nodes.len() < 3 {
        return Err(Error::TooFewPoints {
            what: "residual grid",
            min: 3,
            got: nodes.len(),
        });
    }
    Ok((nodes, values))
}
