//! Domain types shared by every analysis module.
//!
//! All quantities are stored normalized: stocks are measured in units of the
//! exchange threshold `h0`, vessel sections are 1, and rates are divided by
//! `h0` as well. The `from_raw` constructors perform that conversion.

use std::fmt;

use crate::error::{finite, non_negative, positive, Result};

/// Normalized stock levels `(eta_a, eta_b)` of one good in countries A and B.
///
/// Negative values are representable; what happens when a stock empties is a
/// solver policy (see [`crate::integrator::DepletionPolicy`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedState {
    pub eta_a: f64,
    pub eta_b: f64,
}

impl NormalizedState {
    pub fn new(eta_a: f64, eta_b: f64) -> Result<Self> {
        Ok(Self {
            eta_a: finite("eta_a", eta_a)?,
            eta_b: finite("eta_b", eta_b)?,
        })
    }

    /// Converts raw stock heights to threshold units.
    pub fn from_raw(h_a: f64, h_b: f64, h0: f64) -> Result<Self> {
        let h0 = positive("h0", h0)?;
        Self::new(h_a / h0, h_b / h0)
    }

    /// Exchanges the roles of A and B.
    pub fn swap(self) -> Self {
        Self {
            eta_a: self.eta_b,
            eta_b: self.eta_a,
        }
    }

    pub fn total(self) -> f64 {
        self.eta_a + self.eta_b
    }

    pub fn difference(self) -> f64 {
        self.eta_a - self.eta_b
    }

    pub fn is_finite(self) -> bool {
        self.eta_a.is_finite() && self.eta_b.is_finite()
    }

    /// Largest componentwise absolute difference.
    pub fn distance(self, other: Self) -> f64 {
        (self.eta_a - other.eta_a)
            .abs()
            .max((self.eta_b - other.eta_b).abs())
    }
}

/// Constant per-good rates: productions, consumptions and the exchange coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodEconomy {
    pub p_a: f64,
    pub p_b: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub sigma: f64,
}

impl GoodEconomy {
    pub fn new(p_a: f64, p_b: f64, c_a: f64, c_b: f64, sigma: f64) -> Result<Self> {
        Ok(Self {
            p_a: non_negative("p_a", p_a)?,
            p_b: non_negative("p_b", p_b)?,
            c_a: non_negative("c_a", c_a)?,
            c_b: non_negative("c_b", c_b)?,
            sigma: non_negative("sigma", sigma)?,
        })
    }

    /// Builds an economy from un-normalized rates by dividing everything by `h0`.
    pub fn from_raw(p_a: f64, p_b: f64, c_a: f64, c_b: f64, sigma: f64, h0: f64) -> Result<Self> {
        let h0 = positive("h0", h0)?;
        Self::new(p_a / h0, p_b / h0, c_a / h0, c_b / h0, sigma / h0)
    }

    /// Net domestic accumulation rate in A, `P_A - C_A`.
    pub fn net_a(&self) -> f64 {
        self.p_a - self.c_a
    }

    /// Net domestic accumulation rate in B, `P_B - C_B`.
    pub fn net_b(&self) -> f64 {
        self.p_b - self.c_b
    }

    /// Rate of change of the total stock, which exchange cannot alter.
    pub fn net_total(&self) -> f64 {
        self.net_a() + self.net_b()
    }

    pub fn swap(self) -> Self {
        Self {
            p_a: self.p_b,
            p_b: self.p_a,
            c_a: self.c_b,
            c_b: self.c_a,
            sigma: self.sigma,
        }
    }

    /// Lists every violated invariant, prefixing field names with `prefix`.
    pub fn violations(&self, prefix: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, value) in [
            ("p_a", self.p_a),
            ("p_b", self.p_b),
            ("c_a", self.c_a),
            ("c_b", self.c_b),
            ("sigma", self.sigma),
        ] {
            let field = format!("{prefix}{name}");
            if !value.is_finite() {
                out.push(Violation::NonFinite { field, value });
            } else if value < 0.0 {
                out.push(Violation::Negative { field, value });
            }
        }
        out
    }
}

/// One of the four exchange configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Both stocks at or below threshold; the countries are decoupled.
    NoExchange,
    /// Only A is above threshold and ships its excess to B.
    AExports,
    /// Only B is above threshold and ships its excess to A.
    BExports,
    /// Both above threshold; the flow follows the difference of excesses.
    Bilateral,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::NoExchange,
        Regime::AExports,
        Regime::BExports,
        Regime::Bilateral,
    ];

    pub fn from_flags(a_above: bool, b_above: bool) -> Self {
        match (a_above, b_above) {
            (false, false) => Regime::NoExchange,
            (true, false) => Regime::AExports,
            (false, true) => Regime::BExports,
            (true, true) => Regime::Bilateral,
        }
    }

    pub fn a_above(self) -> bool {
        matches!(self, Regime::AExports | Regime::Bilateral)
    }

    pub fn b_above(self) -> bool {
        matches!(self, Regime::BExports | Regime::Bilateral)
    }

    /// The regime seen after relabeling A as B.
    pub fn swap(self) -> Self {
        Regime::from_flags(self.b_above(), self.a_above())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::NoExchange => "no_exchange",
            Regime::AExports => "a_exports",
            Regime::BExports => "b_exports",
            Regime::Bilateral => "bilateral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Regime::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which country, if any, has the cost advantage for a good.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advantage {
    /// `x_a < y < x_b`
    A,
    /// `x_b < y < x_a`
    B,
    Neither,
}

/// Production costs in each country and the converged international price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceSet {
    pub x_a: f64,
    pub x_b: f64,
    pub y: f64,
}

impl PriceSet {
    pub fn new(x_a: f64, x_b: f64, y: f64) -> Result<Self> {
        Ok(Self {
            x_a: non_negative("x_a", x_a)?,
            x_b: non_negative("x_b", x_b)?,
            y: non_negative("y", y)?,
        })
    }

    /// Strict ordering test; ties count as [`Advantage::Neither`].
    pub fn advantage(&self) -> Advantage {
        if self.x_a < self.y && self.y < self.x_b {
            Advantage::A
        } else if self.x_b < self.y && self.y < self.x_a {
            Advantage::B
        } else {
            Advantage::Neither
        }
    }

    pub fn swap(self) -> Self {
        Self {
            x_a: self.x_b,
            x_b: self.x_a,
            y: self.y,
        }
    }

    pub fn violations(&self, prefix: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, value) in [("x_a", self.x_a), ("x_b", self.x_b), ("y", self.y)] {
            let field = format!("{prefix}{name}");
            if !value.is_finite() {
                out.push(Violation::NonFinite { field, value });
            } else if value < 0.0 {
                out.push(Violation::Negative { field, value });
            }
        }
        out
    }
}

/// Money holdings of the two countries. Debt (negative values) is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MoneyState {
    pub m_a: f64,
    pub m_b: f64,
}

impl MoneyState {
    pub fn new(m_a: f64, m_b: f64) -> Result<Self> {
        Ok(Self {
            m_a: finite("m_a", m_a)?,
            m_b: finite("m_b", m_b)?,
        })
    }
}

/// Default fixed-point stock of good 2 in B when a scenario leaves it unspecified.
pub const DEFAULT_ETA_B2: f64 = 2.0;

/// Two goods with opposite comparative advantages: A exports good 1, B exports good 2.
///
/// Only the consumptions of `good1`/`good2` enter the money analysis; the
/// productions are implied by the fixed-point equations and `sigma` of good 1
/// is usually a scan variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGoodScenario {
    pub good1: GoodEconomy,
    pub good2: GoodEconomy,
    /// Must be A-advantaged.
    pub prices1: PriceSet,
    /// Must be B-advantaged.
    pub prices2: PriceSet,
    /// Fixed-point stock of good 1 in A, above threshold.
    pub eta_a1: f64,
    /// Fixed-point stock of good 2 in B, above threshold.
    pub eta_b2: f64,
}

impl TwoGoodScenario {
    pub fn with_eta_a1(self, eta_a1: f64) -> Self {
        Self { eta_a1, ..self }
    }
}

/// A single failed invariant found by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite { field: String, value: f64 },
    Negative { field: String, value: f64 },
    /// The price set does not have the required strict ordering.
    PriceOrdering {
        field: String,
        required: Advantage,
        prices: PriceSet,
    },
    /// A fixed-point stock must lie strictly above the exchange threshold.
    NotAboveThreshold { field: String, value: f64 },
}

impl Violation {
    pub fn field(&self) -> &str {
        match self {
            Violation::NonFinite { field, .. }
            | Violation::Negative { field, .. }
            | Violation::PriceOrdering { field, .. }
            | Violation::NotAboveThreshold { field, .. } => field,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { field, value } => write!(f, "{field}: must be finite, got {value}"),
            Violation::Negative { field, value } => {
                write!(f, "{field}: must be non-negative, got {value}")
            }
            Violation::PriceOrdering {
                field,
                required,
                prices,
            } => {
                let rule = match required {
                    Advantage::A => "x_a < y < x_b",
                    Advantage::B => "x_b < y < x_a",
                    Advantage::Neither => "no ordering",
                };
                write!(
                    f,
                    "{field}: strict ordering {rule} violated (x_a = {}, y = {}, x_b = {})",
                    prices.x_a, prices.y, prices.x_b
                )
            }
            Violation::NotAboveThreshold { field, value } => {
                write!(f, "{field}: must be > 1, got {value}")
            }
        }
    }
}

/// Checks every structural assumption of a two-good scenario. An empty list means valid.
pub fn validate_scenario(s: &TwoGoodScenario) -> Vec<Violation> {
    let mut out = s.good1.violations("good1.");
    out.extend(s.good2.violations("good2."));

    let p1 = s.prices1.violations("prices1.");
    let p1_ok = p1.is_empty();
    out.extend(p1);
    if p1_ok && s.prices1.advantage() != Advantage::A {
        out.push(Violation::PriceOrdering {
            field: "prices1".into(),
            required: Advantage::A,
            prices: s.prices1,
        });
    }
    let p2 = s.prices2.violations("prices2.");
    let p2_ok = p2.is_empty();
    out.extend(p2);
    if p2_ok && s.prices2.advantage() != Advantage::B {
        out.push(Violation::PriceOrdering {
            field: "prices2".into(),
            required: Advantage::B,
            prices: s.prices2,
        });
    }

    for (field, value) in [("eta_a1", s.eta_a1), ("eta_b2", s.eta_b2)] {
        if !value.is_finite() {
            out.push(Violation::NonFinite {
                field: field.into(),
                value,
            });
        } else if value <= 1.0 {
            out.push(Violation::NotAboveThreshold {
                field: field.into(),
                value,
            });
        }
    }
    out
}
