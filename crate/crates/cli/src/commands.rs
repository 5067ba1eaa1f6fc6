//! Subcommand implementations. Each one produces its full output text
//! before any file is written, so a failed run never leaves a partial CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use aoi_gossip::{
    asymptotics, build_for, replication_seed, run_replications, solve_baseline, solve_mitm,
    solve_node_capture, summarize, RecursionSolution, ReplicationSummary,
};

use crate::chart;
use crate::csvio::{
    fmt_opt, parse_table, version_comment, SimRow, SolveRow, COMPARE_HEADER, SIM_HEADER,
    SOLVE_HEADER,
};
use crate::plan::{ExperimentPlan, Pass, Scenario};

/// Command failure, carrying the process exit code.
#[derive(Debug)]
pub enum CmdError {
    /// Invalid configuration or input schema (exit 2).
    Usage(String),
    /// Comparison exceeded the tolerance (exit 1).
    Tolerance(String),
    /// Filesystem failure (exit 3).
    Io(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Tolerance(_) => 1,
            CmdError::Usage(_) => 2,
            CmdError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Usage(m) | CmdError::Tolerance(m) | CmdError::Io(m) => m,
        }
    }
}

fn io_err(context: &str, err: std::io::Error) -> CmdError {
    CmdError::Io(format!("{context}: {err}"))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CmdError> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| io_err(&format!("writing {}", path.display()), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_err("writing to stdout", e)),
    }
}

fn solve_for(plan: &ExperimentPlan, n: usize) -> Result<RecursionSolution, CmdError> {
    let sol = match plan.scenario {
        Scenario::Baseline => solve_baseline(n, plan.lambda),
        Scenario::Capture | Scenario::CaptureThinned => {
            solve_node_capture(n, plan.lambda, plan.p, plan.q)
        }
        Scenario::Mitm => solve_mitm(n, plan.lambda),
    };
    sol.map_err(|e| CmdError::Usage(e.to_string()))
}

/// Runs one pass at one size and returns (per-replication reports, summary).
fn run_pass(
    plan: &ExperimentPlan,
    n: usize,
    pass: Pass,
) -> Result<(Vec<aoi_gossip::SimReport>, ReplicationSummary), CmdError> {
    let cfg = plan.sim_config(n, pass);
    let channels = build_for(&cfg).map_err(|e| CmdError::Usage(e.to_string()))?;
    let reports = run_replications(&cfg, &channels, plan.reps, plan.master_seed, plan.effective_jobs())
        .map_err(|e| CmdError::Usage(e.to_string()))?;
    let summary = summarize(&reports);
    Ok((reports, summary))
}

fn pq_columns(plan: &ExperimentPlan) -> (Option<f64>, Option<f64>) {
    match plan.scenario {
        Scenario::Capture | Scenario::CaptureThinned => (Some(plan.p), Some(plan.q)),
        _ => (None, None),
    }
}

/// Builds the full simulate CSV: per replication one data row, then one
/// aggregate row (replication = -1) per (pass, n).
pub fn simulate_csv(plan: &ExperimentPlan) -> Result<String, CmdError> {
    plan.validate().map_err(CmdError::Usage)?;
    let (p, q) = pq_columns(plan);
    let mut out = String::new();
    out.push_str(&version_comment("simulate"));
    out.push('\n');
    out.push_str(SIM_HEADER);
    out.push('\n');
    for pass in plan.passes() {
        for &n in &plan.n_values {
            let (reports, summary) = run_pass(plan, n, pass)?;
            let horizon = plan.horizon_mult * n as f64;
            for (idx, report) in reports.iter().enumerate() {
                let row = SimRow {
                    scenario: pass.label.to_string(),
                    n,
                    lambda: plan.lambda,
                    p,
                    q,
                    seed: replication_seed(plan.master_seed, idx as u64),
                    replication: idx as i64,
                    horizon,
                    v1_hat: Some(report.v1_hat),
                    vn_hat: report.vn_hat,
                    va_hat: report.va_hat,
                    events: Some(report.events),
                    v1_mean: None,
                    v1_stderr: None,
                    vn_mean: None,
                    vn_stderr: None,
                    va_mean: None,
                    va_stderr: None,
                };
                out.push_str(&row.to_line());
                out.push('\n');
            }
            let aggregate = SimRow {
                scenario: pass.label.to_string(),
                n,
                lambda: plan.lambda,
                p,
                q,
                seed: plan.master_seed,
                replication: -1,
                horizon,
                v1_hat: None,
                vn_hat: None,
                va_hat: None,
                events: None,
                v1_mean: Some(summary.v1.mean),
                v1_stderr: Some(summary.v1.stderr),
                vn_mean: summary.vn.map(|s| s.mean),
                vn_stderr: summary.vn.map(|s| s.stderr),
                va_mean: summary.va.map(|s| s.mean),
                va_stderr: summary.va.map(|s| s.stderr),
            };
            out.push_str(&aggregate.to_line());
            out.push('\n');
            eprintln!(
                "simulate {} n={n}: v1={:.4}{}{} ({} reps, {} events)",
                pass.label,
                summary.v1.mean,
                summary
                    .vn
                    .map(|s| format!(" vn={:.4}", s.mean))
                    .unwrap_or_default(),
                summary
                    .va
                    .map(|s| format!(" vA={:.4}", s.mean))
                    .unwrap_or_default(),
                plan.reps,
                summary.total_events,
            );
        }
    }
    Ok(out)
}

pub fn cmd_simulate(plan: &ExperimentPlan) -> Result<(), CmdError> {
    let csv = simulate_csv(plan)?;
    write_text(plan.csv.as_deref(), &csv)?;
    if let Some(svg_path) = &plan.svg {
        let table = parse_table(&csv).map_err(CmdError::Usage)?;
        let series = chart::build_series(&[table]).map_err(CmdError::Usage)?;
        let svg = chart::render_svg(&series, &chart::title_for(&series));
        write_text(Some(svg_path), &svg)?;
    }
    Ok(())
}

/// Builds the exact-solver CSV: one row per n.
pub fn solve_csv(plan: &ExperimentPlan) -> Result<String, CmdError> {
    plan.validate().map_err(CmdError::Usage)?;
    let (p, q) = pq_columns(plan);
    let mut out = String::new();
    out.push_str(&version_comment("solve"));
    out.push('\n');
    out.push_str(SOLVE_HEADER);
    out.push('\n');
    for &n in &plan.n_values {
        let sol = solve_for(plan, n)?;
        let asym = match plan.scenario {
            Scenario::Capture | Scenario::CaptureThinned => {
                Some(asymptotics(n, plan.lambda, plan.p).map_err(|e| CmdError::Usage(e.to_string()))?)
            }
            _ => None,
        };
        let (vskn_min, vskn_max) = sol
            .v_subset_with_target
            .as_ref()
            .map(|w| {
                let min = w.iter().copied().fold(f64::INFINITY, f64::min);
                let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (Some(min), Some(max))
            })
            .unwrap_or((None, None));
        let row = SolveRow {
            scenario: plan.scenario.as_str().to_string(),
            n,
            lambda: plan.lambda,
            p,
            q,
            v1: sol.v1(),
            vn: sol.v_captured,
            va: sol.v_adversary,
            vskn_min,
            vskn_max,
            v1_asym_p1: asym.map(|a| a.v1_at_p1),
            v1_asym_p0: asym.map(|a| a.v1_at_p0),
            v1_lower: asym.map(|a| a.lower),
            v1_upper: asym.map(|a| a.upper),
        };
        out.push_str(&row.to_line());
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_solve(plan: &ExperimentPlan) -> Result<(), CmdError> {
    let csv = solve_csv(plan)?;
    write_text(plan.csv.as_deref(), &csv)
}

struct CompareCheck {
    scenario: String,
    n: usize,
    mode: String,
    metric: &'static str,
    sim_mean: f64,
    sim_stderr: f64,
    exact: f64,
    rel_err: f64,
    pass: bool,
}

/// Runs simulation and solver over the plan, comparing per-n relative
/// errors against the tolerance. With mode `both`, also checks that the
/// explicit-coin and thinned estimates have overlapping 95% confidence
/// intervals. Returns the report text, the CSV, and the overall verdict.
pub fn compare_report(plan: &ExperimentPlan) -> Result<(String, String, bool), CmdError> {
    plan.validate().map_err(CmdError::Usage)?;
    let (p, q) = pq_columns(plan);
    let mut checks: Vec<CompareCheck> = Vec::new();
    for &n in &plan.n_values {
        let exact = solve_for(plan, n)?;
        let mut summaries: Vec<(Pass, ReplicationSummary)> = Vec::new();
        for pass in plan.passes() {
            let (_, summary) = run_pass(plan, n, pass)?;
            summaries.push((pass, summary));
        }
        for (pass, summary) in &summaries {
            let mut push = |metric: &'static str, sim: aoi_gossip::Summary, exact_v: f64| {
                let rel_err = (sim.mean - exact_v).abs() / exact_v;
                checks.push(CompareCheck {
                    scenario: pass.label.to_string(),
                    n,
                    mode: String::new(),
                    metric,
                    sim_mean: sim.mean,
                    sim_stderr: sim.stderr,
                    exact: exact_v,
                    rel_err,
                    pass: rel_err <= plan.tolerance,
                });
            };
            push("v1", summary.v1, exact.v1());
            if let (Some(vn), Some(exact_vn)) = (summary.vn, exact.v_captured) {
                push("vn", vn, exact_vn);
            }
            if let (Some(va), Some(exact_va)) = (summary.va, exact.v_adversary) {
                push("vA", va, exact_va);
            }
        }
        if summaries.len() == 2 {
            let (a, b) = (&summaries[0].1, &summaries[1].1);
            let overlap = a.v1.ci_overlaps(&b.v1);
            checks.push(CompareCheck {
                scenario: plan.scenario.as_str().to_string(),
                n,
                mode: "coin-vs-thinned".to_string(),
                metric: "v1_mode_overlap",
                sim_mean: a.v1.mean,
                sim_stderr: a.v1.stderr,
                exact: b.v1.mean,
                rel_err: (a.v1.mean - b.v1.mean).abs() / b.v1.mean,
                pass: overlap,
            });
        }
    }

    let mut report = String::new();
    let mut csv = String::new();
    csv.push_str(&version_comment("compare"));
    csv.push('\n');
    csv.push_str(COMPARE_HEADER);
    csv.push('\n');
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.pass;
        report.push_str(&format!(
            "{} n={} {}: sim={:.6} exact={:.6} rel_err={:.4} tol={:.4} {}\n",
            c.scenario,
            c.n,
            c.metric,
            c.sim_mean,
            c.exact,
            c.rel_err,
            plan.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        ));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.scenario,
            c.n,
            plan.lambda,
            fmt_opt(p),
            fmt_opt(q),
            c.mode,
            plan.reps,
            plan.horizon_mult * c.n as f64,
            c.metric,
            c.sim_mean,
            c.sim_stderr,
            c.exact,
            c.rel_err,
            plan.tolerance,
            c.pass
        ));
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    report.push_str(&format!(
        "compare: {passed}/{} checks within tolerance\n",
        checks.len()
    ));
    Ok((report, csv, all_pass))
}

pub fn cmd_compare(plan: &ExperimentPlan) -> Result<(), CmdError> {
    let (report, csv, all_pass) = compare_report(plan)?;
    print!("{report}");
    if plan.csv.is_some() {
        write_text(plan.csv.as_deref(), &csv)?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(CmdError::Tolerance(
            "one or more comparisons exceeded the tolerance".into(),
        ))
    }
}

pub fn cmd_plot(inputs: &[PathBuf], output: &Path) -> Result<(), CmdError> {
    if inputs.is_empty() {
        return Err(CmdError::Usage("plot needs at least one --csv input".into()));
    }
    let mut tables = Vec::new();
    for path in inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
        let table = parse_table(&text)
            .map_err(|e| CmdError::Usage(format!("{}: {e}", path.display())))?;
        tables.push(table);
    }
    let series = chart::build_series(&tables).map_err(CmdError::Usage)?;
    let svg = chart::render_svg(&series, &chart::title_for(&series));
    write_text(Some(output), &svg)
}
