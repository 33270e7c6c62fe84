//! Scenario files.
//!
//! A scenario is a TOML document. `[model] kind` selects the layout:
//!
//! ```toml
//! [model]
//! kind = "one-good"        # or "two-good"
//! h0 = 1.0                 # optional; rates below are divided by it
//!
//! [good1]
//! c_a = 1.0
//! c_b = 2.0
//! sigma = 1.0
//! p_a = 1.5                # explicit productions ...
//! p_b = 1.5
//! # eta_star = 1.5         # ... or the fixed point they should hold
//!
//! [prices1]                # optional for one-good: enables money columns
//! x_a = 1.0
//! y = 2.0
//! x_b = 3.0
//!
//! [initial]
//! eta_a = 0.5
//! eta_b = 0.5
//! m_a = 0.0
//! m_b = 0.0
//!
//! [solver]
//! step = 1e-3
//! event_tol = 1e-10
//! horizon = 10.0
//! depletion_policy = "halt"  # "continue" | "clamp_to_zero" | "halt"
//! ```
//!
//! A two-good file has `[good1]`, `[good2]`, `[prices1]`, `[prices2]` and an
//! optional `[grid]`. There `good1.eta_star` is A's fixed-point stock of good 1,
//! `good2.eta_star` is B's stock of good 2 (default 2) and `good1.sigma`, if
//! given, is the exchange coefficient used for a single-point check.

use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue};
use tradeflow_core::{
    fixed_point_production, validate_scenario, DepletionPolicy, GoodEconomy, GridSpec,
    MoneyState, NormalizedState, PriceSet, SolverOptions, TwoGoodScenario, DEFAULT_ETA_B2,
};

const DEFAULT_HORIZON: f64 = 10.0;
const DEFAULT_GRID_STEPS: usize = 200;

const GOOD_KEYS: &[&str] = &["p_a", "p_b", "c_a", "c_b", "sigma", "eta_star"];
const PRICE_KEYS: &[&str] = &["x_a", "x_b", "y"];
const SCHEMA: &[(&str, &[&str])] = &[
    ("model", &["kind", "h0"]),
    ("good1", GOOD_KEYS),
    ("good2", GOOD_KEYS),
    ("prices1", PRICE_KEYS),
    ("prices2", PRICE_KEYS),
    ("initial", &["eta_a", "eta_b", "m_a", "m_b"]),
    ("solver", &["step", "event_tol", "horizon", "depletion_policy"]),
    (
        "grid",
        &[
            "sigma1_min",
            "sigma1_max",
            "sigma1_steps",
            "eta_a1_min",
            "eta_a1_max",
            "eta_a1_steps",
        ],
    ),
];
const ONE_GOOD_SECTIONS: &[&str] = &["model", "good1", "prices1", "initial", "solver"];
const TWO_GOOD_SECTIONS: &[&str] = &["model", "good1", "good2", "prices1", "prices2", "grid"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    OneGood,
    TwoGood,
}

impl ModelKind {
    fn as_str(self) -> &'static str {
        match self {
            ModelKind::OneGood => "one-good",
            ModelKind::TwoGood => "two-good",
        }
    }
}

/// The document as written, before validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good1: Option<GoodSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good2: Option<GoodSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prices1: Option<PriceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prices2: Option<PriceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GoodSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_star: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PriceSection {
    pub x_a: Option<f64>,
    pub x_b: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialSection {
    pub eta_a: Option<f64>,
    pub eta_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_b: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depletion_policy: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma1_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma1_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma1_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_a1_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_a1_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_a1_steps: Option<usize>,
}

/// How a one-good scenario fixes its productions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Production {
    Explicit,
    /// Productions that hold A's stock at `eta_star` while A exports.
    FixedPoint { eta_star: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialSpec {
    pub state: NormalizedState,
    pub money: MoneyState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneGoodSpec {
    /// Productions are zero when `production` is `None`.
    pub econ: GoodEconomy,
    pub production: Option<Production>,
    pub prices: Option<PriceSet>,
    pub initial: Option<InitialSpec>,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoGoodSpec {
    pub scenario: TwoGoodScenario,
    pub sigma1: Option<f64>,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    OneGood(OneGoodSpec),
    TwoGood(TwoGoodSpec),
}

/// One problem found in a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based line and column.
    pub location: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some((line, col)) => write!(f, "line {line}, column {col}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub source: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.diagnostics.len();
        write!(
            f,
            "{}: {n} problem{}",
            self.source,
            if n == 1 { "" } else { "s" }
        )?;
        for d in &self.diagnostics {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioError {}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// Source positions of every section header and key.
struct Locator<'a> {
    text: &'a str,
    entries: Vec<(String, Option<String>, Range<usize>)>,
}

impl Locator<'_> {
    fn find(&self, section: &str, key: Option<&str>) -> Option<(usize, usize)> {
        let exact = self
            .entries
            .iter()
            .find(|(s, k, _)| s == section && k.as_deref() == key);
        let fallback = || self.entries.iter().find(|(s, k, _)| s == section && k.is_none());
        exact
            .or_else(fallback)
            .map(|(_, _, span)| line_col(self.text, span.start))
    }
}

/// Collects diagnostics with their source positions.
struct Report<'a> {
    locator: Locator<'a>,
    diagnostics: Vec<Diagnostic>,
}

impl Report<'_> {
    fn at(&mut self, section: &str, key: Option<&str>, message: impl Into<String>) {
        let location = self.locator.find(section, key);
        self.diagnostics.push(Diagnostic {
            location,
            message: message.into(),
        });
    }

    fn require(&mut self, section: &str, key: &str, value: Option<f64>) -> Option<f64> {
        if value.is_none() {
            self.at(section, None, format!("[{section}] is missing `{key}`"));
        }
        value
    }

    /// Checks that a present value is finite and, for rates, non-negative.
    fn number(&mut self, section: &str, key: &str, value: Option<f64>, non_negative: bool) -> Option<f64> {
        let v = value?;
        if !v.is_finite() {
            self.at(section, Some(key), format!("{section}.{key} must be finite, got {v}"));
            None
        } else if non_negative && v < 0.0 {
            self.at(section, Some(key), format!("{section}.{key} must be non-negative, got {v}"));
            None
        } else {
            Some(v)
        }
    }
}

/// Walks the raw document, recording positions and flagging unknown names.
fn index<'a>(text: &'a str, doc: &DeTable<'_>) -> (Locator<'a>, Vec<Diagnostic>) {
    let mut entries = Vec::new();
    let mut unknown = Vec::new();
    for (name, value) in doc.iter() {
        let section = name.get_ref().to_string();
        let at = line_col(text, name.span().start);
        let allowed = SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k);
        let DeValue::Table(table) = value.get_ref() else {
            unknown.push(Diagnostic {
                location: Some(at),
                message: format!("unknown top-level key `{section}`; values belong in a section"),
            });
            continue;
        };
        let Some(allowed) = allowed else {
            unknown.push(Diagnostic {
                location: Some(at),
                message: format!("unknown section [{section}]"),
            });
            continue;
        };
        entries.push((section.clone(), None, name.span()));
        for (key, _) in table.iter() {
            let k = key.get_ref().to_string();
            if !allowed.contains(&k.as_str()) {
                unknown.push(Diagnostic {
                    location: Some(line_col(text, key.span().start)),
                    message: format!(
                        "unknown key `{k}` in [{section}] (expected one of: {})",
                        allowed.join(", ")
                    ),
                });
            }
            entries.push((section.clone(), Some(k), key.span()));
        }
    }
    (Locator { text, entries }, unknown)
}

fn syntax_error(text: &str, err: &toml::de::Error) -> Diagnostic {
    Diagnostic {
        location: err.span().map(|s| line_col(text, s.start)),
        message: err.message().trim().to_string(),
    }
}

/// Parses and validates scenario text; `source` names it in diagnostics.
pub fn parse_scenario_str(text: &str, source: &str) -> Result<Scenario, ScenarioError> {
    let fail = |diagnostics| ScenarioError {
        source: source.to_string(),
        diagnostics,
    };
    let doc = DeTable::parse(text).map_err(|e| fail(vec![syntax_error(text, &e)]))?;
    let (locator, unknown) = index(text, doc.get_ref());
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| fail(vec![syntax_error(text, &e)]))?;
    let mut report = Report {
        locator,
        diagnostics: unknown,
    };
    let scenario = validate(&file, &mut report);
    if report.diagnostics.is_empty() {
        Ok(scenario.expect("a scenario without diagnostics is complete"))
    } else {
        Err(fail(report.diagnostics))
    }
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let source = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| ScenarioError {
        source: source.clone(),
        diagnostics: vec![Diagnostic {
            location: None,
            message: format!("cannot read file: {e}"),
        }],
    })?;
    parse_scenario_str(&text, &source)
}

fn validate(file: &ScenarioFile, r: &mut Report<'_>) -> Option<Scenario> {
    let Some(model) = &file.model else {
        r.at("model", None, "missing [model] section");
        return None;
    };
    let h0 = match model.h0 {
        None => 1.0,
        Some(h) if h.is_finite() && h > 0.0 => h,
        Some(h) => {
            r.at("model", Some("h0"), format!("model.h0 must be positive, got {h}"));
            1.0
        }
    };
    let allowed = match model.kind {
        ModelKind::OneGood => ONE_GOOD_SECTIONS,
        ModelKind::TwoGood => TWO_GOOD_SECTIONS,
    };
    let present = [
        ("good2", file.good2.is_some()),
        ("prices2", file.prices2.is_some()),
        ("initial", file.initial.is_some()),
        ("solver", file.solver.is_some()),
        ("grid", file.grid.is_some()),
    ];
    for (section, is_present) in present {
        if is_present && !allowed.contains(&section) {
            r.at(
                section,
                None,
                format!("section [{section}] is not used by {} scenarios", model.kind.as_str()),
            );
        }
    }
    match model.kind {
        ModelKind::OneGood => validate_one_good(file, h0, r).map(Scenario::OneGood),
        ModelKind::TwoGood => validate_two_good(file, h0, r).map(Scenario::TwoGood),
    }
}

fn validate_prices(section: &str, p: &PriceSection, r: &mut Report<'_>) -> Option<PriceSet> {
    let x_a = r.require(section, "x_a", p.x_a);
    let x_b = r.require(section, "x_b", p.x_b);
    let y = r.require(section, "y", p.y);
    let x_a = r.number(section, "x_a", x_a, true);
    let x_b = r.number(section, "x_b", x_b, true);
    let y = r.number(section, "y", y, true);
    Some(PriceSet {
        x_a: x_a?,
        x_b: x_b?,
        y: y?,
    })
}

fn validate_one_good(file: &ScenarioFile, h0: f64, r: &mut Report<'_>) -> Option<OneGoodSpec> {
    let Some(g) = &file.good1 else {
        r.at("model", None, "one-good scenario is missing [good1]");
        return None;
    };
    let c_a = r.require("good1", "c_a", g.c_a);
    let c_b = r.require("good1", "c_b", g.c_b);
    let sigma = r.require("good1", "sigma", g.sigma);
    let c_a = r.number("good1", "c_a", c_a, true).map(|v| v / h0);
    let c_b = r.number("good1", "c_b", c_b, true).map(|v| v / h0);
    let sigma = r.number("good1", "sigma", sigma, true).map(|v| v / h0);
    let p_a = r.number("good1", "p_a", g.p_a, true).map(|v| v / h0);
    let p_b = r.number("good1", "p_b", g.p_b, true).map(|v| v / h0);
    let eta_star = r.number("good1", "eta_star", g.eta_star, false);

    let production = match (g.p_a.is_some() || g.p_b.is_some(), g.eta_star.is_some()) {
        (true, true) => {
            r.at(
                "good1",
                Some("eta_star"),
                "give either p_a and p_b or eta_star in [good1], not both",
            );
            None
        }
        (true, false) => {
            if g.p_a.is_none() || g.p_b.is_none() {
                r.at("good1", None, "[good1] needs both p_a and p_b");
            }
            Some(Production::Explicit)
        }
        (false, true) => eta_star.map(|eta_star| Production::FixedPoint { eta_star }),
        (false, false) => None,
    };

    let prices = file.prices1.as_ref().and_then(|p| {
        let prices = validate_prices("prices1", p, r)?;
        if prices.advantage() != tradeflow_core::Advantage::A {
            r.at(
                "prices1",
                None,
                format!(
                    "prices1: strict ordering x_a < y < x_b violated (x_a = {}, y = {}, x_b = {})",
                    prices.x_a, prices.y, prices.x_b
                ),
            );
        }
        Some(prices)
    });

    let initial = file.initial.as_ref().and_then(|i| {
        let eta_a = r.require("initial", "eta_a", i.eta_a);
        let eta_b = r.require("initial", "eta_b", i.eta_b);
        let eta_a = r.number("initial", "eta_a", eta_a, false);
        let eta_b = r.number("initial", "eta_b", eta_b, false);
        let m_a = r.number("initial", "m_a", i.m_a, false);
        let m_b = r.number("initial", "m_b", i.m_b, false);
        Some(InitialSpec {
            state: NormalizedState {
                eta_a: eta_a?,
                eta_b: eta_b?,
            },
            money: MoneyState {
                m_a: if i.m_a.is_some() { m_a? } else { 0.0 },
                m_b: if i.m_b.is_some() { m_b? } else { 0.0 },
            },
        })
    });

    let solver = validate_solver(file.solver.as_ref(), r);

    let (c_a, c_b, sigma) = (c_a?, c_b?, sigma?);
    let (p_a, p_b) = match production {
        Some(Production::Explicit) => (p_a?, p_b?),
        Some(Production::FixedPoint { eta_star }) => {
            match fixed_point_production(eta_star, c_a, c_b, sigma) {
                Ok(fp) => (fp.p_a, fp.p_b),
                Err(e) => {
                    r.at("good1", Some("eta_star"), format!("good1.eta_star: {e}"));
                    return None;
                }
            }
        }
        None => (0.0, 0.0),
    };
    Some(OneGoodSpec {
        econ: GoodEconomy {
            p_a,
            p_b,
            c_a,
            c_b,
            sigma,
        },
        production,
        prices,
        initial,
        solver: solver?,
    })
}

fn validate_solver(s: Option<&SolverSection>, r: &mut Report<'_>) -> Option<SolverOptions> {
    let mut opts = SolverOptions::with_horizon(DEFAULT_HORIZON);
    let Some(s) = s else {
        return Some(opts);
    };
    let mut ok = true;
    for (key, value, slot) in [
        ("step", s.step, &mut opts.step),
        ("event_tol", s.event_tol, &mut opts.event_tol),
        ("horizon", s.horizon, &mut opts.horizon),
    ] {
        if let Some(v) = value {
            if v.is_finite() && v > 0.0 {
                *slot = v;
            } else {
                r.at("solver", Some(key), format!("solver.{key} must be positive, got {v}"));
                ok = false;
            }
        }
    }
    if let Some(p) = &s.depletion_policy {
        match DepletionPolicy::parse(p) {
            Some(policy) => opts.depletion_policy = policy,
            None => {
                r.at(
                    "solver",
                    Some("depletion_policy"),
                    format!(
                        "solver.depletion_policy must be \"continue\", \"clamp_to_zero\" or \"halt\", got {p:?}"
                    ),
                );
                ok = false;
            }
        }
    }
    if ok {
        if let Err(e) = opts.validate() {
            r.at("solver", None, format!("[solver]: {e}"));
            ok = false;
        }
    }
    ok.then_some(opts)
}

fn validate_two_good(file: &ScenarioFile, h0: f64, r: &mut Report<'_>) -> Option<TwoGoodSpec> {
    for (section, present) in [
        ("good1", file.good1.is_some()),
        ("good2", file.good2.is_some()),
        ("prices1", file.prices1.is_some()),
        ("prices2", file.prices2.is_some()),
    ] {
        if !present {
            r.at("model", None, format!("two-good scenario is missing [{section}]"));
        }
    }
    let empty = GoodSection::default();
    let g1 = file.good1.as_ref().unwrap_or(&empty);
    let g2 = file.good2.as_ref().unwrap_or(&empty);
    for (section, g) in [("good1", g1), ("good2", g2)] {
        for (key, v) in [("p_a", g.p_a), ("p_b", g.p_b)] {
            if v.is_some() {
                r.at(
                    section,
                    Some(key),
                    format!("{section}.{key}: productions are implied by the fixed point in two-good scenarios"),
                );
            }
        }
    }
    if g2.sigma.is_some() {
        r.at(
            "good2",
            Some("sigma"),
            "good2.sigma is set by balanced trade and cannot be given",
        );
    }
    let mut consumptions = |section: &str, g: &GoodSection| {
        if file.good1.is_none() && section == "good1" || file.good2.is_none() && section == "good2" {
            return None;
        }
        let c_a = r.require(section, "c_a", g.c_a);
        let c_b = r.require(section, "c_b", g.c_b);
        let c_a = r.number(section, "c_a", c_a, false);
        let c_b = r.number(section, "c_b", c_b, false);
        Some((c_a? / h0, c_b? / h0))
    };
    let c1 = consumptions("good1", g1);
    let c2 = consumptions("good2", g2);
    let eta_a1 = if file.good1.is_some() {
        r.require("good1", "eta_star", g1.eta_star)
    } else {
        None
    };
    let eta_a1 = r.number("good1", "eta_star", eta_a1, false);
    let eta_b2 = r.number("good2", "eta_star", g2.eta_star, false);
    let sigma1 = r.number("good1", "sigma", g1.sigma, true).map(|v| v / h0);
    let p1 = file.prices1.as_ref().and_then(|p| validate_prices("prices1", p, r));
    let p2 = file.prices2.as_ref().and_then(|p| validate_prices("prices2", p, r));
    let grid = validate_grid(file.grid.as_ref(), h0, r);

    let good = |(c_a, c_b): (f64, f64)| GoodEconomy {
        p_a: 0.0,
        p_b: 0.0,
        c_a,
        c_b,
        sigma: 0.0,
    };
    let scenario = TwoGoodScenario {
        good1: good(c1?),
        good2: good(c2?),
        prices1: p1?,
        prices2: p2?,
        eta_a1: eta_a1?,
        eta_b2: if g2.eta_star.is_some() { eta_b2? } else { DEFAULT_ETA_B2 },
    };
    for v in validate_scenario(&scenario) {
        let (section, key) = match v.field() {
            "eta_a1" => ("good1".to_string(), Some("eta_star".to_string())),
            "eta_b2" => ("good2".to_string(), Some("eta_star".to_string())),
            field => match field.split_once('.') {
                Some((s, k)) => (s.to_string(), Some(k.to_string())),
                None => (field.to_string(), None),
            },
        };
        r.at(&section, key.as_deref(), v.to_string());
    }
    Some(TwoGoodSpec {
        scenario,
        sigma1,
        grid: grid?,
    })
}

fn validate_grid(g: Option<&GridSection>, h0: f64, r: &mut Report<'_>) -> Option<GridSpec> {
    let mut grid = GridSpec::standard(DEFAULT_GRID_STEPS, DEFAULT_GRID_STEPS);
    let Some(g) = g else {
        return Some(grid);
    };
    let mut ok = true;
    for (key, value, slot, scale) in [
        ("sigma1_min", g.sigma1_min, &mut grid.sigma1_min, h0),
        ("sigma1_max", g.sigma1_max, &mut grid.sigma1_max, h0),
        ("eta_a1_min", g.eta_a1_min, &mut grid.eta_min, 1.0),
        ("eta_a1_max", g.eta_a1_max, &mut grid.eta_max, 1.0),
    ] {
        if let Some(v) = value {
            if v.is_finite() {
                *slot = v / scale;
            } else {
                r.at("grid", Some(key), format!("grid.{key} must be finite, got {v}"));
                ok = false;
            }
        }
    }
    if let Some(n) = g.sigma1_steps {
        grid.sigma1_steps = n;
    }
    if let Some(n) = g.eta_a1_steps {
        grid.eta_steps = n;
    }
    if ok {
        if let Err(e) = grid.validate() {
            r.at("grid", None, e.to_string());
            ok = false;
        }
    }
    ok.then_some(grid)
}

impl Scenario {
    /// The document that parses back to this scenario (with `h0 = 1`).
    pub fn to_file(&self) -> ScenarioFile {
        match self {
            Scenario::OneGood(s) => {
                let e = &s.econ;
                let (p_a, p_b, eta_star) = match s.production {
                    Some(Production::Explicit) => (Some(e.p_a), Some(e.p_b), None),
                    Some(Production::FixedPoint { eta_star }) => (None, None, Some(eta_star)),
                    None => (None, None, None),
                };
                ScenarioFile {
                    model: Some(ModelSection {
                        kind: ModelKind::OneGood,
                        h0: None,
                    }),
                    good1: Some(GoodSection {
                        p_a,
                        p_b,
                        c_a: Some(e.c_a),
                        c_b: Some(e.c_b),
                        sigma: Some(e.sigma),
                        eta_star,
                    }),
                    prices1: s.prices.map(price_section),
                    initial: s.initial.map(|i| InitialSection {
                        eta_a: Some(i.state.eta_a),
                        eta_b: Some(i.state.eta_b),
                        m_a: Some(i.money.m_a),
                        m_b: Some(i.money.m_b),
                    }),
                    solver: Some(SolverSection {
                        step: Some(s.solver.step),
                        event_tol: Some(s.solver.event_tol),
                        horizon: Some(s.solver.horizon),
                        depletion_policy: Some(s.solver.depletion_policy.as_str().to_string()),
                    }),
                    ..ScenarioFile::default()
                }
            }
            Scenario::TwoGood(t) => {
                let s = &t.scenario;
                let good = |g: &GoodEconomy, sigma, eta_star| GoodSection {
                    c_a: Some(g.c_a),
                    c_b: Some(g.c_b),
                    sigma,
                    eta_star: Some(eta_star),
                    ..GoodSection::default()
                };
                ScenarioFile {
                    model: Some(ModelSection {
                        kind: ModelKind::TwoGood,
                        h0: None,
                    }),
                    good1: Some(good(&s.good1, t.sigma1, s.eta_a1)),
                    good2: Some(good(&s.good2, None, s.eta_b2)),
                    prices1: Some(price_section(s.prices1)),
                    prices2: Some(price_section(s.prices2)),
                    grid: Some(GridSection {
                        sigma1_min: Some(t.grid.sigma1_min),
                        sigma1_max: Some(t.grid.sigma1_max),
                        sigma1_steps: Some(t.grid.sigma1_steps),
                        eta_a1_min: Some(t.grid.eta_min),
                        eta_a1_max: Some(t.grid.eta_max),
                        eta_a1_steps: Some(t.grid.eta_steps),
                    }),
                    ..ScenarioFile::default()
                }
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("scenario files always serialize")
    }
}

fn price_section(p: PriceSet) -> PriceSection {
    PriceSection {
        x_a: Some(p.x_a),
        x_b: Some(p.x_b),
        y: Some(p.y),
    }
}
