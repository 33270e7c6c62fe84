use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_GOOD: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/two_good.scenario");

fn tradeflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tradeflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tradeflow_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tradeflow"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Parses a table into its header and rows of fields.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(field: &str) -> f64 {
    field.parse().unwrap()
}

const STEADY: &str = r#"
[model]
kind = "one-good"

[good1]
c_a = 1.0
c_b = 3.0
sigma = 2.0
eta_star = 1.5

[prices1]
x_a = 1.0
y = 2.0
x_b = 3.0

[initial]
eta_a = 1.5
eta_b = 1.0

[solver]
step = 0.01
horizon = 5.0
"#;

const CROSSING: &str = r#"
[model]
kind = "one-good"

[good1]
p_a = 0.25
c_a = 0.0
p_b = 0.0
c_b = 0.25
sigma = 1.0

[initial]
eta_a = 0.5
eta_b = 0.5

[solver]
step = 0.01
horizon = 4.0
depletion_policy = "continue"
"#;

#[test]
fn steady_scenario_gives_constant_series() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(&dir, "steady.scenario", STEADY);
    let out = dir.path().join("steady.csv");
    let o = tradeflow(&["simulate", s(&sc), "--both", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("sup discrepancy 0.0000000000000000e0"), "{}", stdout(&o));

    let (header, rows) = table(&out);
    assert_eq!(header, ["t", "eta_a", "eta_b", "regime", "f", "m_a", "m_b"]);
    assert_eq!(rows.len(), 501);
    for r in &rows {
        assert_eq!((num(&r[1]), num(&r[2])), (1.5, 1.0));
        assert_eq!(r[3], "a_exports");
    }
    let (_, compare) = table(&dir.path().join("steady_compare.csv"));
    assert!(compare.iter().all(|r| num(&r[5]) == 0.0));
}

#[test]
fn crossing_scenario_has_event_row_at_two() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(&dir, "cross.scenario", CROSSING);
    for mode in ["--analytic", "--numeric", "--both"] {
        let out = dir.path().join(format!("cross{mode}.csv"));
        let o = tradeflow(&["simulate", s(&sc), mode, "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(0), "{mode}: {}", stderr(&o));
        let (_, rows) = table(&out);
        let regimes: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
        let first_export = regimes.iter().position(|&r| r == "a_exports").unwrap();
        assert!(regimes[..first_export].iter().all(|&r| r == "no_exchange"));
        assert!(regimes[first_export..].iter().all(|&r| r == "a_exports"));
        let t_event = num(&rows[first_export][0]);
        assert!((t_event - 2.0).abs() <= 1e-8, "{mode}: event at {t_event}");
        assert!((num(&rows[first_export][1]) - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn zero_sigma_analytic_is_a_straight_line() {
    let dir = TempDir::new().unwrap();
    let text = CROSSING.replace("sigma = 1.0", "sigma = 0.0");
    let sc = write_scenario(&dir, "line.scenario", &text);
    let out = dir.path().join("line.csv");
    let o = tradeflow(&["simulate", s(&sc), "--analytic", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&out);
    assert_eq!(header.len(), 5, "no money columns without prices");
    for r in rows {
        let t = num(&r[0]);
        assert!((num(&r[1]) - (0.5 + 0.25 * t)).abs() < 1e-14);
        assert!((num(&r[2]) - (0.5 - 0.25 * t)).abs() < 1e-14);
    }
}

#[test]
fn depletion_halt_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let text = CROSSING
        .replace("\"continue\"", "\"halt\"")
        .replace("c_b = 0.25", "c_b = 0.5");
    let sc = write_scenario(&dir, "halt.scenario", &text);
    let out = dir.path().join("halt.csv");
    let o = tradeflow(&["simulate", s(&sc), "--numeric", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    // B starts at 0.5 and loses 0.5 per unit time before A starts exporting.
    let msg = stdout(&o);
    assert!(msg.contains("halted on depletion at t = 1.0000"), "{msg}");
    let (_, rows) = table(&out);
    assert!((num(&rows.last().unwrap()[0]) - 1.0).abs() < 1e-8);
}

#[test]
fn simulate_outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(&dir, "cross.scenario", CROSSING);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = tradeflow(&["simulate", s(&sc), "--both", "--out", s(out), "--plot"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        fs::read(dir.path().join("a_compare.csv")).unwrap(),
        fs::read(dir.path().join("b_compare.csv")).unwrap()
    );
    let script = fs::read_to_string(dir.path().join("a.gp")).unwrap();
    assert!(script.contains("'a.csv'"));
}

#[test]
fn region_reproduces_the_feasible_interval() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("two_good.csv");
    let o = tradeflow(&["region", TWO_GOOD, "--out", s(&out), "--plot"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let msg = stdout(&o);
    let lo = format!("{:.16e}", 8.0 / 3.0);
    assert!(
        msg.contains(&format!("feasible k interval: [{lo}, 7.0000000000000000e0]")),
        "{msg}"
    );
    let (header, rows) = table(&out);
    assert_eq!(header, ["sigma1", "eta_a1", "k", "dm_a", "dm_b", "p_a2", "p_b1", "feasible"]);
    assert_eq!(rows.len(), 40_000);
    for r in &rows {
        let k = num(&r[0]) * (num(&r[1]) - 1.0);
        assert_eq!(r[7] == "true", (8.0 / 3.0..=7.0).contains(&k));
    }
    assert!(dir.path().join("two_good.gp").exists());
}

#[test]
fn region_is_identical_for_any_thread_count() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    let o = tradeflow_env(&["region", TWO_GOOD, "--out", s(&one)], "TRADEFLOW_THREADS", "1");
    assert_eq!(o.status.code(), Some(0));
    let o = tradeflow_env(&["region", TWO_GOOD, "--out", s(&many)], "TRADEFLOW_THREADS", "7");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&one).unwrap(), fs::read(&many).unwrap());

    let o = tradeflow_env(&["region", TWO_GOOD, "--out", s(&many)], "TRADEFLOW_THREADS", "zero");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn region_below_the_interval_is_empty_but_succeeds() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(TWO_GOOD)
        .unwrap()
        .replace("sigma1_max = 10.0", "sigma1_max = 1.0")
        .replace("eta_a1_max = 10.0", "eta_a1_max = 2.0");
    let sc = write_scenario(&dir, "low.scenario", &text);
    let out = dir.path().join("low.csv");
    let o = tradeflow(&["region", s(&sc), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("empty region"), "{}", stdout(&o));
    let (_, rows) = table(&out);
    assert!(rows.iter().all(|r| r[7] == "false"));
}

#[test]
fn two_by_two_grid_gives_four_rows() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(TWO_GOOD)
        .unwrap()
        .replace("sigma1_steps = 200", "sigma1_steps = 2")
        .replace("eta_a1_steps = 200", "eta_a1_steps = 2");
    let sc = write_scenario(&dir, "small.scenario", &text);
    let out = dir.path().join("small.csv");
    let o = tradeflow(&["region", s(&sc), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(table(&out).1.len(), 4);
}

const FIXED: &str = r#"
[model]
kind = "one-good"

[good1]
c_a = 1.0
c_b = 2.0
sigma = 1.0

[prices1]
x_a = 1.0
y = 2.0
x_b = 3.0
"#;

#[test]
fn fixed_point_at_the_production_threshold() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(&dir, "fp.scenario", FIXED);
    let o = tradeflow(&["fixed-point", s(&sc), "--eta-star", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let msg = stdout(&o);
    assert!(msg.contains("P_B        0.0000000000000000e0"), "{msg}");
    assert!(msg.contains("P_A        3.0000000000000000e0"), "{msg}");
    assert!(msg.contains("dm_B/dt    0.0000000000000000e0"), "{msg}");
    assert!(msg.contains("(met exactly)"), "{msg}");
}

#[test]
fn fixed_point_rejects_bad_stocks() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(&dir, "fp.scenario", FIXED);
    let o = tradeflow(&["fixed-point", s(&sc), "--eta-star", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at least 1"));

    let o = tradeflow(&["fixed-point", s(&sc), "--eta-star", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("implied P_B = -1.0000000000000000e0 < 0"), "{err}");
    assert!(err.contains("eta_star <= 1 + C_B/sigma = 3.0000000000000000e0"), "{err}");
}

#[test]
fn invalid_files_list_every_problem_and_exit_one() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(TWO_GOOD)
        .unwrap()
        .replace("x_a = 1.0", "x_a = 2.0")
        .replace("c_b = 2.0", "c_b = -2.0\ncolour = 3");
    let sc = write_scenario(&dir, "bad.scenario", &text);
    let out = dir.path().join("bad.csv");
    let o = tradeflow(&["region", s(&sc), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("3 problems"), "{err}");
    assert!(err.contains("unknown key `colour` in [good2]"), "{err}");
    assert!(err.contains("good2.c_b: must be non-negative"), "{err}");
    assert!(err.contains("prices1: strict ordering x_a < y < x_b violated"), "{err}");
    assert!(!out.exists());

    let empty = write_scenario(&dir, "empty.scenario", "");
    let o = tradeflow(&["region", s(&empty), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing [model]"));

    let o = tradeflow(&["region", "/nonexistent/x.scenario", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read file"));
}

#[test]
fn usage_errors_are_input_errors() {
    let o = tradeflow(&["simulate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = tradeflow(&["simulate", TWO_GOOD, "--analytic", "--numeric", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = tradeflow(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn commands_reject_the_wrong_scenario_kind() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let o = tradeflow(&["simulate", TWO_GOOD, "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("one-good"));
    let sc = write_scenario(&dir, "cross.scenario", CROSSING);
    let o = tradeflow(&["region", s(&sc), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
