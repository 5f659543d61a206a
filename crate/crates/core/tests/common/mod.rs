//! Shared test oracles, independent of the library's quadrature paths:
//! adaptive Simpson with dyadic grading toward the singular endpoint, a
//! shooting eigensolver, and closed-form solutions.

#![allow(dead_code)]

/// Recursive adaptive Simpson quadrature of `f` on `[lo, hi]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
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
    recurse(f, lo, hi, simpson(f, lo, mid, hi), tol.max(1e-15), 32)
}

/// Oracle for `integral_a^b psi(s) (s - a)^(alpha - 2) ds` with an
/// integrable singularity at `s = a`: adaptive Simpson on dyadic shells
/// shrinking toward `a`, plus the analytic leading-order tail. Works in
/// offset space so the weight never suffers `s - a` cancellation.
pub fn weighted_integral_oracle(psi: &dyn Fn(f64) -> f64, a: f64, b: f64, alpha: f64) -> f64 {
    let len = b - a;
    let raw = |d: f64| psi(a + d) * d.powf(alpha - 2.0);
    let mut total = 0.0;
    let mut hi = len;
    let delta_min = 1e-12 * len;
    while hi > delta_min {
        let lo = (0.5 * hi).max(delta_min);
        total += adaptive_simpson(&raw, lo, hi, 1e-14 * len.max(1.0));
        hi = lo;
    }
    // tail integral_0^delta psi (s-a)^(alpha-2): psi is nearly constant there
    total += psi(a + delta_min) * delta_min.powf(alpha - 1.0) / (alpha - 1.0);
    total
}

/// Closed-form solution of `T u + 1 = 0`, `u(a) = u(b) = 0`:
/// `u(t) = ((t - a) (b - a)^(alpha - 1) - (t - a)^alpha) / (alpha (alpha - 1))`.
pub fn unit_forcing_solution(t: f64, a: f64, b: f64, alpha: f64) -> f64 {
    ((t - a) * (b - a).powf(alpha - 1.0) - (t - a).powf(alpha)) / (alpha * (alpha - 1.0))
}

/// Principal eigenvalue of `u'' = -lambda t^(alpha - 2) u`, `u(0) = u(1) = 0`
/// by shooting: series start at `t0`, fixed-step RK4, bisection on the end
/// value. Independent of the Nystrom discretization.
pub fn shooting_lambda1(alpha: f64, mut lo: f64, mut hi: f64) -> f64 {
    let end_value = |lambda: f64| -> f64 {
        let t0 = 1e-4f64;
        let mut u = t0 - lambda * t0.powf(alpha + 1.0) / (alpha * (alpha + 1.0));
        let mut up = 1.0 - lambda * t0.powf(alpha) / alpha;
        let n_steps = 100_000usize;
        let h = (1.0 - t0) / n_steps as f64;
        let f = |t: f64, u: f64| -lambda * t.powf(alpha - 2.0) * u;
        let mut t = t0;
        for _ in 0..n_steps {
            let k1u = up;
            let k1v = f(t, u);
            let k2u = up + 0.5 * h * k1v;
            let k2v = f(t + 0.5 * h, u + 0.5 * h * k1u);
            let k3u = up + 0.5 * h * k2v;
            let k3v = f(t + 0.5 * h, u + 0.5 * h * k2u);
            let k4u = up + h * k3v;
            let k4v = f(t + h, u + h * k3u);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            up += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += h;
        }
        u
    };
    assert!(
        end_value(lo) > 0.0 && end_value(hi) < 0.0,
        "shooting bracket does not straddle the first eigenvalue"
    );
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if end_value(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
