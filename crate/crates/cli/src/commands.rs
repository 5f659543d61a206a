//! Command implementations: build library objects from the resolved config,
//! run the workflow, and emit the artifact files.

use serde_json::json;
use std::time::Instant;

use conformable_bvp::domain::{Interval, Order};
use conformable_bvp::grid::GridFunction;
use conformable_bvp::linear::{
    check_green_bounds, residual_linear, solve_linear, BoundsCheck, GreenKernel, LinearProblem,
};
use conformable_bvp::nonlinear::{
    solve_nonlinear, verify_lower, verify_upper, Bracket, Candidate, Method, NonlinearProblem,
    SolveReport, SolverConfig, VerifyOutcome,
};
use conformable_bvp::spectral::{lyapunov_check, principal_eigenvalue};
use conformable_bvp::Error;

use crate::config::{CommandKind, RunConfig};
use crate::expr::{parse_spec, FuncSpec};
use crate::output::{fmt_f64, OutDir, RunReport};
use crate::CliError;

pub fn run(config: RunConfig) -> Result<(), CliError> {
    let mut out = OutDir::create(&config.out_dir)?;
    match config.command {
        CommandKind::SolveLinear => solve_linear_cmd(config, &mut out),
        CommandKind::SolveNonlinear => solve_nonlinear_cmd(config, &mut out),
        CommandKind::Eigen => eigen_cmd(config, &mut out),
        CommandKind::Lyapunov => lyapunov_cmd(config, &mut out),
        CommandKind::Greens => greens_cmd(config, &mut out),
        CommandKind::Convergence => convergence_cmd(config, &mut out),
    }
}

fn validation(e: Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn interval_and_order(config: &RunConfig) -> Result<(Interval, Order), CliError> {
    let interval = Interval::new(config.a, config.b).map_err(validation)?;
    let order = Order::new(config.alpha.unwrap_or(1.5)).map_err(validation)?;
    Ok((interval, order))
}

/// Parses a function-of-`t` spec; `x` is rejected for these slots.
fn scalar_spec(field: &str, src: &str) -> Result<FuncSpec, CliError> {
    let spec =
        parse_spec(src).map_err(|e| CliError::Validation(format!("field '{field}': {e}")))?;
    if spec.uses_x() {
        return Err(CliError::Validation(format!(
            "field '{field}': the variable x is only meaningful for f"
        )));
    }
    Ok(spec)
}

fn grid_csv_rows(u: &GridFunction) -> Vec<String> {
    u.nodes()
        .iter()
        .zip(u.values())
        .map(|(&t, &v)| format!("{},{}", fmt_f64(t), fmt_f64(v)))
        .collect()
}

fn grid_json(u: &GridFunction) -> serde_json::Value {
    json!({ "t": u.nodes(), "u": u.values() })
}

fn solve_linear_cmd(config: RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let started = Instant::now();
    let (interval, order) = interval_and_order(&config)?;
    let y = scalar_spec("y", config.y.as_deref().unwrap())?;
    let problem =
        LinearProblem::new(interval, order, move |t| y.eval(t, 0.0)).map_err(validation)?;
    let u = solve_linear(&problem, config.n_grid, config.rule_size).map_err(validation)?;
    let residual = residual_linear(&u, &problem).map_err(validation)?;
    let elapsed = started.elapsed().as_millis();

    if config.format.writes_csv() {
        out.write_csv("solution.csv", "t,u", grid_csv_rows(&u))?;
    }
    if config.plot_data {
        let block: Vec<(f64, f64)> = u
            .nodes()
            .iter()
            .copied()
            .zip(u.values().iter().copied())
            .collect();
        out.write_plot_blocks("solution.dat", &[block])?;
    }
    let mid = 0.5 * (config.a + config.b);
    let mut outputs = json!({
        "u_mid": u.eval(mid),
        "sup_norm": u.sup_norm(),
        "residual_sup": residual.sup_norm(),
    });
    if config.format.embeds_data() {
        outputs["solution"] = grid_json(&u);
    }
    out.write_report(RunReport::new(config, outputs, elapsed))
}

fn method_of(config: &RunConfig) -> Method {
    match config.method.as_str() {
        "picard" => Method::Picard,
        "newton" => Method::NewtonCollocation,
        _ => Method::DampedPicard,
    }
}

fn solve_nonlinear_cmd(config: RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let started = Instant::now();
    let (interval, order) = interval_and_order(&config)?;
    let f = parse_spec(config.f.as_deref().unwrap())
        .map_err(|e| CliError::Validation(format!("field 'f': {e}")))?;
    let lower_spec = scalar_spec("lower", config.lower.as_deref().unwrap())?;
    let upper_spec = scalar_spec("upper", config.upper.as_deref().unwrap())?;

    let lower = GridFunction::sample(&interval, config.n_grid, |t| lower_spec.eval(t, 0.0))
        .map_err(validation)?;
    let upper = GridFunction::sample(&interval, config.n_grid, |t| upper_spec.eval(t, 0.0))
        .map_err(validation)?;
    let bracket = Bracket::new(lower, upper).map_err(validation)?;

    let x_bound = 10.0 * (1.0 + bracket.lower().sup_norm().max(bracket.upper().sup_norm()));
    let problem = NonlinearProblem::new(interval, order, move |t, x| f.eval(t, x), x_bound)
        .map_err(validation)?;

    // the bracket must verify as a lower/upper solution pair before the
    // solver may trust it (second derivatives by grid differences here)
    type Verifier = fn(&Candidate, &NonlinearProblem) -> conformable_bvp::Result<VerifyOutcome>;
    let checks: [(&str, GridFunction, Verifier); 2] = [
        ("lower", bracket.lower().clone(), verify_lower),
        ("upper", bracket.upper().clone(), verify_upper),
    ];
    for (name, grid, verify) in checks {
        match verify(&Candidate::from_grid(grid), &problem).map_err(validation)? {
            VerifyOutcome::Pass => {}
            VerifyOutcome::Fail { t, value } => {
                return Err(CliError::Validation(format!(
                    "field '{name}': not a verified {name} solution (violation at t = {t}, value {value})"
                )));
            }
        }
    }

    let solver_config = SolverConfig {
        max_iter: config.max_iter,
        tol: config.tol,
        damping: config.damping,
        method: method_of(&config),
        n_grid: config.n_grid,
        rule_size: config.rule_size,
    };
    let (report, converged) = match solve_nonlinear(&problem, &bracket, &solver_config) {
        Ok(report) => (report, true),
        Err(Error::NonConvergence { report, .. }) => (*report, false),
        Err(other) => return Err(validation(other)),
    };
    let elapsed = started.elapsed().as_millis();
    write_solve_report(config, out, &report, converged, elapsed)?;
    if converged {
        Ok(())
    } else {
        Err(CliError::NonConvergence(format!(
            "no convergence within {} iterations (final update norm {})",
            report.iterations, report.final_update_norm
        )))
    }
}

/// The report and solution files are written even when the iteration ran out
/// of budget, so a failed run still leaves its full state behind.
fn write_solve_report(
    config: RunConfig,
    out: &mut OutDir,
    report: &SolveReport,
    converged: bool,
    elapsed: u128,
) -> Result<(), CliError> {
    if config.format.writes_csv() {
        out.write_csv("solution.csv", "t,u", grid_csv_rows(&report.solution))?;
    }
    if config.plot_data {
        let block: Vec<(f64, f64)> = report
            .solution
            .nodes()
            .iter()
            .copied()
            .zip(report.solution.values().iter().copied())
            .collect();
        out.write_plot_blocks("solution.dat", &[block])?;
    }
    let mid = 0.5 * (config.a + config.b);
    let mut outputs = json!({
        "converged": converged,
        "iterations": report.iterations,
        "final_update_norm": report.final_update_norm,
        "residual_norm": report.residual_norm,
        "localized": report.localized,
        "method": report.method,
        "update_history": report.update_history,
        "u_mid": report.solution.eval(mid),
    });
    if config.format.embeds_data() {
        outputs["solution"] = grid_json(&report.solution);
    }
    out.write_report(RunReport::new(config, outputs, elapsed))
}

fn eigen_cmd(config: RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let started = Instant::now();
    let (interval, order) = interval_and_order(&config)?;
    let result = principal_eigenvalue(&interval, &order, config.n).map_err(|e| match e {
        Error::PowerIterationStalled { .. } => CliError::NonConvergence(e.to_string()),
        other => validation(other),
    })?;
    let elapsed = started.elapsed().as_millis();

    if config.format.writes_csv() {
        out.write_csv(
            "eigen.csv",
            "alpha,a,b,n,lambda1,estimated_error",
            [format!(
                "{},{},{},{},{},{}",
                fmt_f64(order.alpha()),
                fmt_f64(config.a),
                fmt_f64(config.b),
                config.n,
                fmt_f64(result.lambda1),
                fmt_f64(result.estimated_error),
            )],
        )?;
        out.write_csv(
            "eigenfunction.csv",
            "t,u",
            grid_csv_rows(&result.eigenfunction),
        )?;
    }
    if config.plot_data {
        let block: Vec<(f64, f64)> = result
            .eigenfunction
            .nodes()
            .iter()
            .copied()
            .zip(result.eigenfunction.values().iter().copied())
            .collect();
        out.write_plot_blocks("eigenfunction.dat", &[block])?;
    }
    let mut outputs = json!({
        "lambda1": result.lambda1,
        "estimated_error": result.estimated_error,
        "discretization_size": result.discretization_size,
    });
    if config.format.embeds_data() {
        outputs["eigenfunction"] = grid_json(&result.eigenfunction);
    }
    out.write_report(RunReport::new(config, outputs, elapsed))
}

fn lyapunov_cmd(config: RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let started = Instant::now();
    let (interval, order) = interval_and_order(&config)?;
    let q = scalar_spec("q", config.q.as_deref().unwrap())?;
    let report = lyapunov_check(&|t| q.eval(t, 0.0), &interval, &order).map_err(validation)?;
    let elapsed = started.elapsed().as_millis();

    if config.format.writes_csv() {
        out.write_csv(
            "lyapunov.csv",
            "alpha,a,b,weighted_q_integral,bound,margin,certified",
            [format!(
                "{},{},{},{},{},{},{}",
                fmt_f64(report.alpha),
                fmt_f64(config.a),
                fmt_f64(config.b),
                fmt_f64(report.weighted_q_integral),
                fmt_f64(report.bound),
                fmt_f64(report.margin),
                report.certified,
            )],
        )?;
    }
    let outputs = json!({
        "weighted_q_integral": report.weighted_q_integral,
        "bound": report.bound,
        "margin": report.margin,
        "certified": report.certified,
    });
    out.write_report(RunReport::new(config, outputs, elapsed))
}

fn greens_cmd(config: RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let started = Instant::now();
    let interval = Interval::new(config.a, config.b).map_err(validation)?;
    let kernel = GreenKernel::new(interval);
    let outcome = check_green_bounds(&kernel, config.n).map_err(validation)?;
    let elapsed = started.elapsed().as_millis();

    let nodes = interval.uniform_nodes(config.n);
    if config.format.writes_csv() {
        let mut rows = Vec::with_capacity(config.n * config.n);
        for &t in &nodes {
            for &s in &nodes {
                let g = kernel.eval(t, s).map_err(validation)?;
                rows.push(format!("{},{},{}", fmt_f64(t), fmt_f64(s), fmt_f64(g)));
            }
        }
        out.write_csv("greens.csv", "t,s,g", rows)?;
    }
    if config.plot_data {
        // a few kernel rows G(t_i, .) as separate curves
        let mut blocks = Vec::new();
        for frac in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let t = config.a + frac * interval.length();
            let block: Vec<(f64, f64)> = nodes
                .iter()
                .map(|&s| (s, kernel.eval(t, s).unwrap()))
                .collect();
            blocks.push(block);
        }
        out.write_plot_blocks("greens.dat", &blocks)?;
    }
    let outputs = match outcome {
        BoundsCheck::Pass { max_observed } => json!({
            "bounds_ok": true,
            "max_observed": max_observed,
            "upper_bound": interval.length(),
        }),
        BoundsCheck::Fail { t, s, value } => json!({
            "bounds_ok": false,
            "witness": { "t": t, "s": s, "value": value },
        }),
    };
    out.write_report(RunReport::new(config, outputs, elapsed))
}

fn convergence_cmd(config: RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let started = Instant::now();
    let (interval, order) = interval_and_order(&config)?;
    let study = config.study.clone().unwrap_or_else(|| "rule".into());
    let y = scalar_spec("y", config.y.as_deref().unwrap_or("const:1"))?;

    let mut rows: Vec<(usize, f64)> = Vec::new();
    match study.as_str() {
        "rule" => {
            // error of the solve against a much finer quadrature reference
            let problem = {
                let y = y.clone();
                LinearProblem::new(interval, order, move |t| y.eval(t, 0.0)).map_err(validation)?
            };
            let reference = solve_linear(&problem, config.n_grid, 128).map_err(validation)?;
            for &rule in &[4usize, 8, 16, 32, 64] {
                let u = solve_linear(&problem, config.n_grid, rule).map_err(validation)?;
                let err = u
                    .values()
                    .iter()
                    .zip(reference.values())
                    .map(|(&p, &q)| (p - q).abs())
                    .fold(0.0f64, f64::max);
                rows.push((rule, err));
            }
        }
        "grid" => {
            let problem = {
                let y = y.clone();
                LinearProblem::new(interval, order, move |t| y.eval(t, 0.0)).map_err(validation)?
            };
            for &n in &[26usize, 51, 101, 201] {
                let u = solve_linear(&problem, n, config.rule_size).map_err(validation)?;
                let r = residual_linear(&u, &problem).map_err(validation)?;
                rows.push((n, r.sup_norm()));
            }
        }
        "eigen" => {
            for &n in &[16usize, 32, 64, 128] {
                let res = principal_eigenvalue(&interval, &order, n).map_err(validation)?;
                rows.push((n, res.estimated_error));
            }
        }
        _ => unreachable!("validated earlier"),
    }
    let elapsed = started.elapsed().as_millis();

    if config.format.writes_csv() {
        out.write_csv(
            "convergence.csv",
            "n,error",
            rows.iter().map(|&(n, e)| format!("{n},{}", fmt_f64(e))),
        )?;
    }
    if config.plot_data {
        let block: Vec<(f64, f64)> = rows.iter().map(|&(n, e)| (n as f64, e)).collect();
        out.write_plot_blocks("convergence.dat", &[block])?;
    }
    let outputs = json!({
        "study": study,
        "rows": rows.iter().map(|&(n, e)| json!({ "n": n, "error": e })).collect::<Vec<_>>(),
    });
    out.write_report(RunReport::new(config, outputs, elapsed))
}
