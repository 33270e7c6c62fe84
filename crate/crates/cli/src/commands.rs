//! Subcommand implementations. Each returns the text to print on success and
//! an exit status; failures carry their own status.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use tradeflow_core::{
    exchange_flow, feasible_k_interval, integrate_with_events, one_good_money_rates,
    scan_region, scan_region_with_threads, simulate_analytic, FeasibleVolumes, MoneyTracking,
    PiecewiseTrajectory, TimeSeries,
};

use crate::output::{self, CompareRow, SeriesRow};
use crate::scenario::{OneGoodSpec, Scenario, TwoGoodSpec};

/// Largest analytic/numeric discrepancy tolerated by `simulate --both`.
pub const COMPARE_TOL: f64 = 1e-6;

pub const THREADS_ENV: &str = "TRADEFLOW_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    InputError = 1,
    NumericFailure = 2,
    DepletionHalt = 3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            status: Status::InputError,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            status: Status::NumericFailure,
            message: message.into(),
        }
    }
}

/// Text for stdout plus the exit status to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub status: Status,
    pub summary: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Numeric,
    Both,
}

fn one_good(s: &Scenario, command: &str) -> Result<OneGoodSpec, Failure> {
    match s {
        Scenario::OneGood(spec) => Ok(spec.clone()),
        Scenario::TwoGood(_) => Err(Failure::input(format!(
            "{command} needs a one-good scenario"
        ))),
    }
}

fn two_good(s: &Scenario, command: &str) -> Result<TwoGoodSpec, Failure> {
    match s {
        Scenario::TwoGood(spec) => Ok(spec.clone()),
        Scenario::OneGood(_) => Err(Failure::input(format!(
            "{command} needs a two-good scenario"
        ))),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    output::write(path, contents)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn analytic_rows(spec: &OneGoodSpec, traj: &PiecewiseTrajectory) -> Vec<SeriesRow> {
    let switches = traj.switches();
    let initial = spec.initial.expect("checked by caller");
    traj.sample_times(spec.solver.step)
        .into_iter()
        .map(|t| {
            let state = traj.state_at(t);
            // A sample on a switch is labelled with the regime being entered.
            let regime = switches
                .iter()
                .find(|s| s.time == t)
                .map_or_else(|| traj.regime_at(t), |s| s.to);
            SeriesRow {
                t,
                state,
                regime,
                flow: exchange_flow(state),
                money: spec.prices.map(|p| traj.money_at(&p, initial.money, t)),
            }
        })
        .collect()
}

fn numeric_rows(ts: &TimeSeries) -> Vec<SeriesRow> {
    (0..ts.len())
        .map(|i| SeriesRow {
            t: ts.times[i],
            state: ts.states[i],
            regime: ts.regimes[i],
            flow: exchange_flow(ts.states[i]),
            money: ts.money.as_ref().map(|m| m[i]),
        })
        .collect()
}

/// Runs the one-good dynamics and writes the time-series table to `out`.
///
/// With [`Mode::Both`] the numeric series goes to `out`, a per-sample
/// comparison with the closed form to `<out>_compare.csv`, and the run fails
/// when the two differ by more than [`COMPARE_TOL`]. The closed form does not
/// model depletion, so only the numeric solver applies the depletion policy.
pub fn simulate(scenario: &Scenario, mode: Mode, out: &Path, plot: bool) -> Result<Report, Failure> {
    let spec = one_good(scenario, "simulate")?;
    if spec.production.is_none() {
        return Err(Failure::input(
            "simulate needs productions: give p_a and p_b (or eta_star) in [good1]",
        ));
    }
    let Some(initial) = spec.initial else {
        return Err(Failure::input("simulate needs an [initial] section"));
    };
    let econ = spec.econ;
    let horizon = spec.solver.horizon;

    let analytic = match mode {
        Mode::Analytic | Mode::Both => Some(
            simulate_analytic(initial.state, &econ, horizon, spec.solver.event_tol)
                .map_err(|e| Failure::numeric(format!("analytic solution failed: {e}")))?,
        ),
        Mode::Numeric => None,
    };
    let numeric = match mode {
        Mode::Numeric | Mode::Both => {
            let tracking = spec.prices.map(|prices| MoneyTracking {
                prices,
                initial: initial.money,
            });
            Some(
                integrate_with_events(initial.state, &econ, tracking.as_ref(), &spec.solver)
                    .map_err(|e| Failure::numeric(format!("integration failed: {e}")))?,
            )
        }
        Mode::Analytic => None,
    };

    let mut summary = String::new();
    let mut status = Status::Success;
    let rows = match (&analytic, &numeric) {
        (_, Some(ts)) => numeric_rows(ts),
        (Some(traj), None) => analytic_rows(&spec, traj),
        (None, None) => unreachable!(),
    };
    write_file(out, &output::series_csv(&rows))?;
    let _ = writeln!(summary, "wrote {} samples to {}", rows.len(), out.display());

    if let Some(traj) = &analytic {
        for s in traj.switches() {
            let _ = writeln!(
                summary,
                "switch at t = {}: {} -> {}",
                output::fmt_f64(s.time),
                s.from,
                s.to
            );
        }
    }
    if let Some(ts) = &numeric {
        for e in &ts.events {
            let _ = writeln!(summary, "event {e}");
        }
        if ts.halted {
            let t = ts.depletion().map_or(ts.final_time(), |e| e.time);
            let _ = writeln!(summary, "halted on depletion at t = {}", output::fmt_f64(t));
            status = Status::DepletionHalt;
        }
    }

    if let (Some(traj), Some(ts)) = (&analytic, &numeric) {
        let compare: Vec<CompareRow> = ts
            .times
            .iter()
            .zip(&ts.states)
            .map(|(&t, &numeric)| CompareRow {
                t,
                analytic: traj.state_at(t),
                numeric,
            })
            .collect();
        let worst = compare.iter().map(CompareRow::discrepancy).fold(0.0, f64::max);
        let compare_path = output::sibling(out, "_compare.csv");
        write_file(&compare_path, &output::compare_csv(&compare))?;
        let _ = writeln!(
            summary,
            "sup discrepancy {} (tolerance {}), table in {}",
            output::fmt_f64(worst),
            output::fmt_f64(COMPARE_TOL),
            compare_path.display()
        );
        // A halted run is compared up to the halt.
        if worst > COMPARE_TOL || worst.is_nan() {
            return Err(Failure::numeric(format!(
                "{summary}analytic and numeric solutions disagree by {worst:e} > {COMPARE_TOL:e}"
            )));
        }
    }

    if plot {
        let script = output::sibling(out, ".gp");
        write_file(&script, &output::series_plot(out, spec.prices.is_some()))?;
        let _ = writeln!(summary, "gnuplot script in {}", script.display());
    }
    Ok(Report { status, summary })
}

/// Implied productions and money rates at an A-exporting fixed point.
pub fn fixed_point(scenario: &Scenario, eta_star: Option<f64>) -> Result<Report, Failure> {
    let spec = one_good(scenario, "fixed-point")?;
    let from_file = match spec.production {
        Some(crate::scenario::Production::FixedPoint { eta_star }) => Some(eta_star),
        _ => None,
    };
    let Some(eta_star) = eta_star.or(from_file) else {
        return Err(Failure::input(
            "fixed-point needs --eta-star or good1.eta_star in the scenario",
        ));
    };
    let e = spec.econ;
    if !eta_star.is_finite() || eta_star < 1.0 {
        return Err(Failure::input(format!(
            "eta_star must be at least 1 (the exchange threshold), got {eta_star}"
        )));
    }
    let shipped = e.sigma * (eta_star - 1.0);
    let limit = if e.sigma > 0.0 {
        format!("eta_star <= 1 + C_B/sigma = {}", output::fmt_f64(1.0 + e.c_b / e.sigma))
    } else {
        "no limit (sigma = 0)".to_string()
    };
    let fp = tradeflow_core::fixed_point_production(eta_star, e.c_a, e.c_b, e.sigma).map_err(|_| {
        Failure::input(format!(
            "implied P_B = {} < 0: sigma (eta_star - 1) = {} exceeds C_B = {}; need {limit}",
            output::fmt_f64(e.c_b - shipped),
            output::fmt_f64(shipped),
            output::fmt_f64(e.c_b)
        ))
    })?;

    let mut s = String::new();
    let mut line = |name: &str, v: f64| {
        let _ = writeln!(s, "{name:<10} {}", output::fmt_f64(v));
    };
    line("eta_star", eta_star);
    line("P_A", fp.p_a);
    line("P_B", fp.p_b);
    if let Some(prices) = spec.prices {
        let m = one_good_money_rates(&e, &prices, eta_star)
            .map_err(|err| Failure::input(err.to_string()))?;
        line("dm_A/dt", m.dm_a);
        line("dm_B/dt", m.dm_b);
    }
    line("shipped", shipped);
    line("C_B", e.c_b);
    let _ = writeln!(
        s,
        "P_B = 0 threshold: sigma (eta_A - 1) = C_B; {limit}{}",
        if fp.p_b == 0.0 { " (met exactly)" } else { "" }
    );
    Ok(Report {
        status: Status::Success,
        summary: s,
    })
}

/// Reads the thread cap from the environment; unset means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::input(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Scans the grid, writes the node table and checks it against the closed-form interval.
pub fn region(scenario: &Scenario, out: &Path, plot: bool, threads: Option<usize>) -> Result<Report, Failure> {
    let spec = two_good(scenario, "region")?;
    let s = &spec.scenario;
    let map = match threads {
        Some(n) => scan_region_with_threads(s, &spec.grid, n),
        None => scan_region(s, &spec.grid),
    }
    .map_err(|e| Failure::input(format!("region scan failed: {e}")))?;
    write_file(out, &output::region_csv(&map))?;

    let interval = feasible_k_interval(s);
    let disagreements = map
        .nodes()
        .filter(|n| n.result.feasible() != interval.contains(n.result.k))
        .count();

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "wrote {} nodes to {}",
        spec.grid.node_count(),
        out.display()
    );
    match interval {
        FeasibleVolumes::Empty => {
            let _ = writeln!(summary, "feasible k interval: empty region");
        }
        FeasibleVolumes::Interval { lo, hi } => {
            let _ = writeln!(
                summary,
                "feasible k interval: [{}, {}]",
                output::fmt_f64(lo),
                output::fmt_f64(hi)
            );
        }
    }
    let feasible = map.feasible_count();
    if feasible == 0 {
        let _ = writeln!(summary, "empty region: no feasible node on this grid");
    } else {
        let _ = writeln!(summary, "{feasible} feasible nodes");
    }
    if let Some(sigma1) = spec.sigma1 {
        let r = tradeflow_core::feasibility_check(s, sigma1);
        let _ = writeln!(
            summary,
            "at sigma1 = {}, eta_a1 = {}: k = {}, {}",
            output::fmt_f64(sigma1),
            output::fmt_f64(s.eta_a1),
            output::fmt_f64(r.k),
            if r.feasible() { "feasible" } else { "infeasible" }
        );
    }
    if disagreements > 0 {
        return Err(Failure::numeric(format!(
            "{summary}scanner and closed-form interval disagree at {disagreements} nodes"
        )));
    }
    if plot {
        let script: PathBuf = output::sibling(out, ".gp");
        write_file(&script, &output::region_plot(out))?;
        let _ = writeln!(summary, "gnuplot script in {}", script.display());
    }
    Ok(Report {
        status: Status::Success,
        summary,
    })
}
