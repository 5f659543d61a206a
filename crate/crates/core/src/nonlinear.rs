//! Bracketed solution of the nonlinear Dirichlet problem
//! `T u(t) + f(t, u(t)) = 0`, `u(a) = u(b) = 0`.
//!
//! A verified pair of lower/upper solutions brackets a true solution. The
//! right-hand side is truncated outside the bracket into a continuous,
//! uniformly bounded modification `F`, and the solution is computed as a
//! fixed point of the integral map
//! `u -> integral_a^b G(t, s) (s - a)^(alpha - 2) F(s, u(s)) ds`
//! by damped Picard iteration, with a Newton collocation fallback when the
//! iteration stalls.

use crate::domain::{Interval, Order};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linear::{residual_parts, GreenSolver};

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type BivariateFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The problem data: interval, order, and a continuous right-hand side
/// `f(t, x)`.
pub struct NonlinearProblem {
    interval: Interval,
    order: Order,
    f: BivariateFn,
}

impl NonlinearProblem {
    /// `x_bound` declares the x-range on which `f` is screened for
    /// finiteness (a 10^3-point sample of `[a, b] x [-x_bound, x_bound]`).
    pub fn new(
        interval: Interval,
        order: Order,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        x_bound: f64,
    ) -> Result<Self> {
        const NT: usize = 32;
        const NX: usize = 32;
        for i in 0..NT {
            let t = interval.a() + interval.length() * i as f64 / (NT - 1) as f64;
            for j in 0..NX {
                let x = -x_bound + 2.0 * x_bound * j as f64 / (NX - 1) as f64;
                if !f(t, x).is_finite() {
                    return Err(Error::NonFiniteSample { t, x });
                }
            }
        }
        Ok(Self {
            interval,
            order,
            f: Box::new(f),
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn f(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }
}

/// A verified lower/upper solution pair with `lower <= upper` pointwise and
/// the Dirichlet boundary signs `lower <= 0 <= upper` at both endpoints.
#[derive(Debug, Clone)]
pub struct Bracket {
    lower: GridFunction,
    upper: GridFunction,
}

impl Bracket {
    pub fn new(lower: GridFunction, upper: GridFunction) -> Result<Self> {
        const TOL: f64 = 1e-12;
        // the two grids must describe functions over the same interval
        if (lower.first_node() - upper.first_node()).abs() > TOL
            || (lower.last_node() - upper.last_node()).abs() > TOL
        {
            return Err(Error::GridIntervalMismatch {
                expected_a: lower.first_node(),
                expected_b: lower.last_node(),
                got_a: upper.first_node(),
                got_b: upper.last_node(),
            });
        }
        for (&t, &lo) in lower.nodes().iter().zip(lower.values()) {
            let hi = upper.eval(t);
            if lo > hi + TOL {
                return Err(Error::BracketViolation {
                    t,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        for (&t, &hi) in upper.nodes().iter().zip(upper.values()) {
            let lo = lower.eval(t);
            if lo > hi + TOL {
                return Err(Error::BracketViolation {
                    t,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        for (what, t, v, sign) in [
            (
                "lower solution",
                lower.first_node(),
                lower.values()[0],
                -1.0,
            ),
            (
                "lower solution",
                lower.last_node(),
                *lower.values().last().unwrap(),
                -1.0,
            ),
            ("upper solution", upper.first_node(), upper.values()[0], 1.0),
            (
                "upper solution",
                upper.last_node(),
                *upper.values().last().unwrap(),
                1.0,
            ),
        ] {
            if v * sign < -TOL {
                return Err(Error::BoundarySign { what, t, value: v });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Builds the bracket by sampling two closed-form functions on `n`
    /// uniform nodes.
    pub fn from_fns(
        interval: &Interval,
        n: usize,
        lower: impl Fn(f64) -> f64,
        upper: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        Self::new(
            GridFunction::sample(interval, n, lower)?,
            GridFunction::sample(interval, n, upper)?,
        )
    }

    pub fn lower(&self) -> &GridFunction {
        &self.lower
    }

    pub fn upper(&self) -> &GridFunction {
        &self.upper
    }
}

/// A candidate lower or upper solution: grid values plus second-derivative
/// data (analytic when available, second differences otherwise).
pub struct Candidate {
    grid: GridFunction,
    second: Option<ScalarFn>,
}

impl Candidate {
    /// Grid-only candidate; the second derivative is formed by three-point
    /// differences at interior nodes.
    pub fn from_grid(grid: GridFunction) -> Self {
        Self { grid, second: None }
    }

    pub fn with_second(
        grid: GridFunction,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            grid,
            second: Some(Box::new(second)),
        }
    }

    /// Samples a closed-form candidate and its analytic second derivative.
    pub fn sample(
        interval: &Interval,
        n: usize,
        f: impl Fn(f64) -> f64,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Ok(Self::with_second(
            GridFunction::sample(interval, n, f)?,
            second,
        ))
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }

    fn second_at(&self, i: usize) -> f64 {
        match &self.second {
            Some(f) => f(self.grid.nodes()[i]),
            None => self.grid.second_difference(i),
        }
    }
}

/// Outcome of a differential-inequality verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerifyOutcome {
    Pass,
    /// First node where the inequality fails, with the offending value
    /// (boundary value or differential-inequality left-hand side).
    Fail {
        t: f64,
        value: f64,
    },
}

const VERIFY_TOL: f64 = 1e-9;
const BOUNDARY_TOL: f64 = 1e-12;

/// Checks the lower-solution inequalities:
/// `T sigma(t) + f(t, sigma(t)) >= 0` at all interior nodes and
/// `sigma(a) <= 0`, `sigma(b) <= 0`.
pub fn verify_lower(candidate: &Candidate, problem: &NonlinearProblem) -> Result<VerifyOutcome> {
    verify(candidate, problem, 1.0)
}

/// Mirror of [`verify_lower`] with the inequalities reversed:
/// `T sigma(t) + f(t, sigma(t)) <= 0`, `sigma(a) >= 0`, `sigma(b) >= 0`.
pub fn verify_upper(candidate: &Candidate, problem: &NonlinearProblem) -> Result<VerifyOutcome> {
    verify(candidate, problem, -1.0)
}

fn verify(candidate: &Candidate, problem: &NonlinearProblem, sign: f64) -> Result<VerifyOutcome> {
    let g = candidate.grid();
    g.require_span(problem.interval())?;
    let first = g.values()[0];
    let last = *g.values().last().unwrap();
    if sign * first > BOUNDARY_TOL {
        return Ok(VerifyOutcome::Fail {
            t: g.first_node(),
            value: first,
        });
    }
    if sign * last > BOUNDARY_TOL {
        return Ok(VerifyOutcome::Fail {
            t: g.last_node(),
            value: last,
        });
    }
    let a = problem.interval().a();
    let alpha = problem.order().alpha();
    for i in 1..g.len() - 1 {
        let t = g.nodes()[i];
        let lhs = (t - a).powf(2.0 - alpha) * candidate.second_at(i) + problem.f(t, g.values()[i]);
        if sign * lhs < -VERIFY_TOL {
            return Ok(VerifyOutcome::Fail { t, value: lhs });
        }
    }
    Ok(VerifyOutcome::Pass)
}

/// Continuous, uniformly bounded modification of `f` associated with a
/// bracket: `F(t, x) = f(t, x)` inside the bracket, and outside it the value
/// at the nearest bracket edge plus a bounded penalty of magnitude below 1.
pub struct ModifiedRhs<'p> {
    problem: &'p NonlinearProblem,
    lower: GridFunction,
    upper: GridFunction,
    m0: f64,
    m: f64,
}

impl ModifiedRhs<'_> {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let lo = self.lower.eval(t);
        let hi = self.upper.eval(t);
        if x > hi {
            self.problem.f(t, hi) + (hi - x) / (x - hi + 1.0)
        } else if x < lo {
            self.problem.f(t, lo) + (lo - x) / (lo - x + 1.0)
        } else {
            self.problem.f(t, x)
        }
    }

    /// Estimated supremum of `|f|` over the bracket region.
    pub fn m0(&self) -> f64 {
        self.m0
    }

    /// Uniform bound `M = M0 + 1` on `|F|`.
    pub fn bound(&self) -> f64 {
        self.m
    }

    pub fn interval(&self) -> &Interval {
        self.problem.interval()
    }

    pub fn order(&self) -> &Order {
        self.problem.order()
    }
}

/// Builds the modified right-hand side. `M0` is estimated by maximizing
/// `|f|` over a 200 x 200 sample of the bracket region, inflated by 10% as a
/// computable surrogate for the true supremum.
pub fn modify_rhs<'p>(problem: &'p NonlinearProblem, bracket: &Bracket) -> Result<ModifiedRhs<'p>> {
    const N: usize = 200;
    bracket.lower().require_span(problem.interval())?;
    let iv = problem.interval();
    let mut m0 = 0.0_f64;
    for i in 0..N {
        let t = iv.a() + iv.length() * i as f64 / (N - 1) as f64;
        let lo = bracket.lower().eval(t);
        let hi = bracket.upper().eval(t);
        if lo > hi + 1e-12 {
            return Err(Error::BracketViolation {
                t,
                lower: lo,
                upper: hi,
            });
        }
        for j in 0..N {
            let x = lo + (hi - lo) * j as f64 / (N - 1) as f64;
            let v = problem.f(t, x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { t, x });
            }
            m0 = m0.max(v.abs());
        }
    }
    m0 *= 1.1;
    Ok(ModifiedRhs {
        problem,
        lower: bracket.lower().clone(),
        upper: bracket.upper().clone(),
        m0,
        m: m0 + 1.0,
    })
}

/// One application of the fixed-point map
/// `u -> integral_a^b G(t, s) (s - a)^(alpha - 2) F(s, u(s)) ds`
/// on the grid of `u`. The boundary values of the image are exactly zero and
/// its sup-norm is bounded by `M (b - a)^alpha / (alpha - 1)`.
pub fn apply_fixed_point_map(
    u: &GridFunction,
    modified: &ModifiedRhs<'_>,
    rule_size: usize,
) -> Result<GridFunction> {
    u.require_span(modified.interval())?;
    let solver = GreenSolver::new(modified.interval(), modified.order(), u.nodes(), rule_size)?;
    let values = solver.apply(&|s| modified.eval(s, u.eval(s)))?;
    GridFunction::new(u.nodes().to_vec(), values)
}

/// Iteration scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Plain Picard iteration `u_{k+1} = A u_k`.
    Picard,
    /// `u_{k+1} = (1 - theta) u_k + theta A u_k` with relaxation `theta`.
    DampedPicard,
    /// Newton iteration on the collocation system `u - A u = 0` with a
    /// forward-difference Jacobian.
    NewtonCollocation,
}

/// Knobs for [`solve_nonlinear`].
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Sup-norm update tolerance.
    pub tol: f64,
    /// Relaxation factor for [`Method::DampedPicard`], in (0, 1].
    pub damping: f64,
    pub method: Method,
    pub n_grid: usize,
    pub rule_size: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-8,
            damping: 0.5,
            method: Method::DampedPicard,
            n_grid: 129,
            rule_size: 64,
        }
    }
}

/// Result of a nonlinear solve.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveReport {
    pub solution: GridFunction,
    pub iterations: usize,
    pub final_update_norm: f64,
    /// Sup-norm of the second-difference residual of the original equation,
    /// left buffer excluded.
    pub residual_norm: f64,
    /// True when the solution lies inside the bracket at every grid node
    /// (tolerance 1e-9).
    pub localized: bool,
    /// Scheme that produced the final iterate.
    pub method: Method,
    /// Sup-norm update per iteration.
    pub update_history: Vec<f64>,
}

/// Solves the bracketed problem as a fixed point of the modified integral
/// map. Requires that the bracket has been verified via [`verify_lower`] and
/// [`verify_upper`].
///
/// Damped Picard is the default; if the update norm fails to decrease for
/// five consecutive iterations the solver switches to Newton collocation.
/// Exceeding `max_iter` yields [`Error::NonConvergence`] carrying the state
/// of the iteration (existence theory is non-constructive, so this is a
/// solver failure, not a refutation).
pub fn solve_nonlinear(
    problem: &NonlinearProblem,
    bracket: &Bracket,
    config: &SolverConfig,
) -> Result<SolveReport> {
    if config.n_grid < 5 {
        return Err(Error::TooFewPoints {
            what: "solution grid",
            min: 5,
            got: config.n_grid,
        });
    }
    if config.tol <= 0.0 || config.tol.is_nan() {
        return Err(Error::OutOfRange {
            name: "tol",
            value: config.tol,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if config.damping <= 0.0 || config.damping > 1.0 || config.damping.is_nan() {
        return Err(Error::OutOfRange {
            name: "damping",
            value: config.damping,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let modified = modify_rhs(problem, bracket)?;
    let nodes = problem.interval().uniform_nodes(config.n_grid);
    let solver = GreenSolver::new(
        problem.interval(),
        problem.order(),
        &nodes,
        config.rule_size,
    )?;

    // start in the middle of the localization region, where F = f
    let mut values: Vec<f64> = nodes
        .iter()
        .map(|&t| 0.5 * (bracket.lower().eval(t) + bracket.upper().eval(t)))
        .collect();
    values[0] = 0.0;
    *values.last_mut().unwrap() = 0.0;

    let apply = |vals: &[f64]| -> Result<Vec<f64>> {
        let u = GridFunction::new(nodes.clone(), vals.to_vec())?;
        solver.apply(&|s| modified.eval(s, u.eval(s)))
    };

    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0usize;
    let mut converged = false;
    let mut method_used = config.method;

    if config.method != Method::NewtonCollocation {
        let theta = match config.method {
            Method::Picard => 1.0,
            _ => config.damping,
        };
        while iterations < config.max_iter {
            iterations += 1;
            let au = apply(&values)?;
            let mut update = 0.0_f64;
            for (v, &av) in values.iter_mut().zip(&au) {
                let next = (1.0 - theta) * *v + theta * av;
                update = update.max((next - *v).abs());
                *v = next;
            }
            history.push(update);
            if update < config.tol {
                converged = true;
                break;
            }
            // stall: updates non-decreasing for five straight iterations, or
            // no new best update within twenty (catches period-two bouncing,
            // which never produces a long non-decreasing run)
            let k = history.len();
            let monotone_stall = k >= 6 && (k - 5..k).all(|j| history[j] >= history[j - 1]);
            let bounce_stall = k >= 20 && {
                let best = history[..k - 20]
                    .iter()
                    .fold(f64::INFINITY, |m, &u| m.min(u));
                history[k - 20..].iter().all(|&u| u >= best)
            };
            if monotone_stall || bounce_stall {
                method_used = Method::NewtonCollocation;
                break;
            }
        }
    } else {
        method_used = Method::NewtonCollocation;
    }

    if !converged && method_used == Method::NewtonCollocation {
        // a stalled Picard iterate may sit far outside the bracket, where
        // the truncated map is nearly flat and Newton degenerates; project
        // back into the localization region first
        for (v, &t) in values.iter_mut().zip(&nodes) {
            *v = v.clamp(bracket.lower().eval(t), bracket.upper().eval(t));
        }
        converged = newton_collocation(&apply, &mut values, &mut iterations, &mut history, config)?;
    }

    let solution = GridFunction::new(nodes.clone(), values)?;
    let residual_norm = {
        let sol = solution.clone();
        let (_, rvals) = residual_parts(&solution, problem.interval(), problem.order(), &|t| {
            problem.f(t, sol.eval(t))
        })?;
        rvals.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    };
    let localized = solution
        .nodes()
        .iter()
        .zip(solution.values())
        .all(|(&t, &v)| v >= bracket.lower().eval(t) - 1e-9 && v <= bracket.upper().eval(t) + 1e-9);
    let final_update_norm = history.last().copied().unwrap_or(0.0);
    let report = SolveReport {
        solution,
        iterations,
        final_update_norm,
        residual_norm,
        localized,
        method: method_used,
        update_history: history,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::NonConvergence {
            iterations,
            final_update: final_update_norm,
            report: Box::new(report),
        })
    }
}

/// Newton iteration on the interior collocation system `R(u) = u - A u = 0`.
fn newton_collocation(
    apply: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    values: &mut [f64],
    iterations: &mut usize,
    history: &mut Vec<f64>,
    config: &SolverConfig,
) -> Result<bool> {
    let n = values.len();
    let m = n - 2;
    let residual = |vals: &[f64]| -> Result<Vec<f64>> {
        let au = apply(vals)?;
        Ok((1..n - 1).map(|i| vals[i] - au[i]).collect())
    };
    while *iterations < config.max_iter {
        *iterations += 1;
        let r0 = residual(values)?;
        let mut jac = vec![vec![0.0_f64; m]; m];
        let mut pert = values.to_vec();
        for j in 0..m {
            let eps = 1e-7 * (1.0 + pert[j + 1].abs());
            let saved = pert[j + 1];
            pert[j + 1] = saved + eps;
            let rj = residual(&pert)?;
            pert[j + 1] = saved;
            for (row, (&rji, &r0i)) in jac.iter_mut().zip(rj.iter().zip(&r0)) {
                row[j] = (rji - r0i) / eps;
            }
        }
        let delta = match solve_dense(jac, r0) {
            Some(d) => d,
            None => return Ok(false),
        };
        let mut update = 0.0_f64;
        for (i, d) in delta.iter().enumerate() {
            values[i + 1] -= d;
            update = update.max(d.abs());
        }
        history.push(update);
        if update < config.tol {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Dense LU solve with partial pivoting. Returns `None` for a numerically
/// singular matrix.
fn solve_dense(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let mut p = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[p][col].abs() {
                p = r;
            }
        }
        if a[p][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, p);
        rhs.swap(col, p);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        let pivot = pivot_row[col];
        let (rhs_upper, rhs_lower) = rhs.split_at_mut(col + 1);
        let rhs_pivot = rhs_upper[col];
        for (row, rhs_r) in lower.iter_mut().zip(rhs_lower.iter_mut()) {
            let f = row[col] / pivot;
            if f != 0.0 {
                for (rc, &pc) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *rc -= f * pc;
                }
                *rhs_r -= f * rhs_pivot;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = rhs[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn problem(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> NonlinearProblem {
        NonlinearProblem::new(unit(), Order::new(1.5).unwrap(), f, 10.0).unwrap()
    }

    #[test]
    fn verify_lower_equality_case_passes() {
        let p = problem(|_, _| 0.0);
        let c = Candidate::sample(&unit(), 15, |_| 0.0, |_| 0.0).unwrap();
        assert_eq!(verify_lower(&c, &p).unwrap(), VerifyOutcome::Pass);
    }

    #[test]
    fn verify_lower_sign_violation_fails() {
        let p = problem(|_, _| -1.0);
        let c = Candidate::sample(&unit(), 15, |_| 0.0, |_| 0.0).unwrap();
        match verify_lower(&c, &p).unwrap() {
            VerifyOutcome::Fail { value, .. } => assert!(value < 0.0),
            VerifyOutcome::Pass => panic!("must fail"),
        }
    }

    #[test]
    fn verify_upper_constant_pi_against_sine_rhs() {
        // sigma = pi with f = sin x: T sigma = 0 and sin(pi) = 0
        let p = problem(|_, x| x.sin());
        let c = Candidate::sample(&unit(), 15, |_| std::f64::consts::PI, |_| 0.0).unwrap();
        assert_eq!(verify_upper(&c, &p).unwrap(), VerifyOutcome::Pass);
    }

    #[test]
    fn verify_upper_constant_one_fails_for_unit_rhs() {
        let p = problem(|_, _| 1.0);
        let c = Candidate::sample(&unit(), 15, |_| 1.0, |_| 0.0).unwrap();
        match verify_upper(&c, &p).unwrap() {
            VerifyOutcome::Fail { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            VerifyOutcome::Pass => panic!("0 + 1 <= 0 must fail"),
        }
    }

    #[test]
    fn bracket_rejects_crossing() {
        let lower = GridFunction::sample(&unit(), 9, |t| t).unwrap();
        let upper = GridFunction::sample(&unit(), 9, |_| 0.0).unwrap();
        assert!(Bracket::new(lower, upper).is_err());
    }

    #[test]
    fn bracket_rejects_bad_boundary_sign() {
        // lower solution must be <= 0 at the endpoints
        let res = Bracket::from_fns(&unit(), 9, |_| 0.5, |_| 2.0);
        assert!(matches!(res, Err(Error::BoundarySign { .. })));
    }

    #[test]
    fn modified_rhs_branch_values() {
        let p = problem(|_, _| 0.0);
        // constant bracket [0, 1]
        let bracket = Bracket::from_fns(&unit(), 9, |_| 0.0, |_| 1.0).unwrap();
        let m = modify_rhs(&p, &bracket).unwrap();
        // above: f(t, 1) + (1 - 2)/(2 - 1 + 1) = -0.5
        assert!((m.eval(0.5, 2.0) + 0.5).abs() < 1e-14);
        // below: f(t, 0) + (0 + 3)/(0 + 3 + 1) = 0.75
        assert!((m.eval(0.5, -3.0) - 0.75).abs() < 1e-14);
        // inside the bracket F = f exactly
        assert_eq!(m.eval(0.5, 0.5), 0.0);
        // flat f: m0 = 0, bound = 1
        assert_eq!(m.m0(), 0.0);
        assert_eq!(m.bound(), 1.0);
    }

    #[test]
    fn fixed_point_map_of_zero_rhs_is_zero() {
        let p = problem(|_, _| 0.0);
        let bracket = Bracket::from_fns(&unit(), 9, |_| -1.0, |_| 1.0).unwrap();
        let m = modify_rhs(&p, &bracket).unwrap();
        let u = GridFunction::sample(&unit(), 21, |t| t * (1.0 - t)).unwrap();
        let au = apply_fixed_point_map(&u, &m, 16).unwrap();
        assert!(au.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solve_with_x_independent_rhs_converges_immediately() {
        // f = 1: the fixed point is the linear solution, reached in one
        // Picard step
        let p = problem(|_, _| 1.0);
        let bracket = Bracket::from_fns(&unit(), 9, |_| 0.0, |_| 2.0).unwrap();
        let config = SolverConfig {
            method: Method::Picard,
            n_grid: 41,
            rule_size: 16,
            ..SolverConfig::default()
        };
        let report = solve_nonlinear(&p, &bracket, &config).unwrap();
        assert!(report.iterations <= 2);
        assert!(report.localized);
        let alpha = 1.5;
        let exact = |t: f64| (t - t.powf(alpha)) / (alpha * (alpha - 1.0));
        assert!((report.solution.eval(0.5) - exact(0.5)).abs() < 1e-10);
        assert!((report.solution.eval(0.5) - 0.195262).abs() < 1e-6);
    }

    #[test]
    fn non_convergence_carries_report() {
        let p = problem(|_, _| 1.0);
        let bracket = Bracket::from_fns(&unit(), 9, |_| 0.0, |_| 2.0).unwrap();
        let config = SolverConfig {
            max_iter: 1,
            tol: 1e-15,
            method: Method::DampedPicard,
            n_grid: 21,
            rule_size: 8,
            ..SolverConfig::default()
        };
        match solve_nonlinear(&p, &bracket, &config) {
            Err(Error::NonConvergence { report, .. }) => {
                assert_eq!(report.iterations, 1);
                assert_eq!(report.update_history.len(), 1);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn dense_solver_roundtrip() {
        let a = vec![
            vec![4.0, -2.0, 1.0],
            vec![-2.0, 4.0, -2.0],
            vec![1.0, -2.0, 4.0],
        ];
        let x_true = [1.0, -2.0, 3.0];
        let rhs: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| a[i][j] * x_true[j]).sum())
            .collect();
        let x = solve_dense(a, rhs).unwrap();
        for i in 0..3 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }
}
