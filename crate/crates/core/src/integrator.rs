//! Fixed-step classical Runge-Kutta integration of the piecewise field with
//! threshold-crossing and depletion events.
//!
//! When a step changes which side of `eta = 1` a stock is on, the step is
//! shortened by bisection until the crossing is bracketed to within
//! `event_tol`; the shortened step is accepted, the event recorded, and
//! stepping restarts from the crossing.

use std::fmt;

use crate::error::{ModelError, Result};
use crate::exchange::{directed_regime, exchange_flow, rhs};
use crate::model::{GoodEconomy, MoneyState, NormalizedState, PriceSet, Regime};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_EVENT_TOL: f64 = crate::analytic::DEFAULT_EVENT_TOL;

/// What to do when a stock drops below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepletionPolicy {
    /// Keep integrating; negative stocks are allowed.
    Continue,
    /// Record the event and hold the stock at zero from then on.
    ClampToZero,
    /// Record the event and stop at the depletion time.
    #[default]
    Halt,
}

impl DepletionPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            DepletionPolicy::Continue => "continue",
            DepletionPolicy::ClampToZero => "clamp_to_zero",
            DepletionPolicy::Halt => "halt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Continue, Self::ClampToZero, Self::Halt]
            .into_iter()
            .find(|p| p.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub step: f64,
    pub event_tol: f64,
    pub horizon: f64,
    pub depletion_policy: DepletionPolicy,
}

impl SolverOptions {
    /// Default step, tolerance and policy for the given horizon.
    pub fn with_horizon(horizon: f64) -> Self {
        Self {
            step: DEFAULT_STEP,
            event_tol: DEFAULT_EVENT_TOL,
            horizon,
            depletion_policy: DepletionPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("step", self.step),
            ("event_tol", self.event_tol),
            ("horizon", self.horizon),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonPositive { name, value });
            }
        }
        if self.step > self.horizon {
            return Err(ModelError::InvalidInput(format!(
                "step {} exceeds horizon {}",
                self.step, self.horizon
            )));
        }
        if self.event_tol >= self.step {
            return Err(ModelError::InvalidInput(format!(
                "event_tol {} must be smaller than step {}",
                self.event_tol, self.step
            )));
        }
        Ok(())
    }
}

/// Prices and opening balances for co-integrating money holdings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoneyTracking {
    pub prices: PriceSet,
    pub initial: MoneyState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stock {
    A,
    B,
}

impl fmt::Display for Stock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stock::A => "eta_a",
            Stock::B => "eta_b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// A stock crossed the exchange threshold.
    Crossing {
        stock: Stock,
        upward: bool,
        from: Regime,
        to: Regime,
    },
    /// A stock dropped below zero.
    Depletion { stock: Stock },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverEvent {
    pub time: f64,
    pub kind: EventKind,
}

impl fmt::Display for SolverEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EventKind::Crossing {
                stock,
                upward,
                from,
                to,
            } => write!(
                f,
                "t={}: {stock} crossed 1 {} ({from} -> {to})",
                self.time,
                if upward { "upward" } else { "downward" }
            ),
            EventKind::Depletion { stock } => write!(f, "t={}: {stock} depleted", self.time),
        }
    }
}

/// Sampled output of [`integrate_with_events`]; all sample vectors have equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub states: Vec<NormalizedState>,
    pub regimes: Vec<Regime>,
    pub money: Option<Vec<MoneyState>>,
    pub events: Vec<SolverEvent>,
    /// True when integration stopped early on depletion.
    pub halted: bool,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> NormalizedState {
        self.states[self.states.len() - 1]
    }

    pub fn final_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn crossings(&self) -> impl Iterator<Item = &SolverEvent> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Crossing { .. }))
    }

    pub fn depletion(&self) -> Option<&SolverEvent> {
        self.events
            .iter()
            .find(|e| matches!(e.kind, EventKind::Depletion { .. }))
    }
}

#[derive(Debug, Clone, Copy)]
struct Augmented {
    eta: NormalizedState,
    money: MoneyState,
}

#[derive(Debug, Clone, Copy)]
struct Rates {
    deta_a: f64,
    deta_b: f64,
    dm_a: f64,
    dm_b: f64,
}

fn money_rates(state: NormalizedState, econ: &GoodEconomy, prices: &PriceSet) -> (f64, f64) {
    let shipped = econ.sigma * exchange_flow(state);
    (
        -prices.x_a * econ.p_a + prices.y * (econ.c_a + shipped),
        -prices.x_b * econ.p_b + prices.y * (econ.c_b - shipped),
    )
}

fn field(y: &Augmented, econ: &GoodEconomy, prices: Option<&PriceSet>) -> Rates {
    let r = rhs(y.eta, econ);
    let (dm_a, dm_b) = prices.map_or((0.0, 0.0), |p| money_rates(y.eta, econ, p));
    Rates {
        deta_a: r.deta_a,
        deta_b: r.deta_b,
        dm_a,
        dm_b,
    }
}

fn offset(y: &Augmented, k: &Rates, h: f64) -> Augmented {
    Augmented {
        eta: NormalizedState {
            eta_a: y.eta.eta_a + h * k.deta_a,
            eta_b: y.eta.eta_b + h * k.deta_b,
        },
        money: MoneyState {
            m_a: y.money.m_a + h * k.dm_a,
            m_b: y.money.m_b + h * k.dm_b,
        },
    }
}

fn rk4_augmented(y: &Augmented, econ: &GoodEconomy, prices: Option<&PriceSet>, h: f64) -> Augmented {
    let k1 = field(y, econ, prices);
    let k2 = field(&offset(y, &k1, 0.5 * h), econ, prices);
    let k3 = field(&offset(y, &k2, 0.5 * h), econ, prices);
    let k4 = field(&offset(y, &k3, h), econ, prices);
    let w = h / 6.0;
    let combine = |a: f64, b: f64, c: f64, d: f64| w * (a + 2.0 * b + 2.0 * c + d);
    Augmented {
        eta: NormalizedState {
            eta_a: y.eta.eta_a + combine(k1.deta_a, k2.deta_a, k3.deta_a, k4.deta_a),
            eta_b: y.eta.eta_b + combine(k1.deta_b, k2.deta_b, k3.deta_b, k4.deta_b),
        },
        money: MoneyState {
            m_a: y.money.m_a + combine(k1.dm_a, k2.dm_a, k3.dm_a, k4.dm_a),
            m_b: y.money.m_b + combine(k1.dm_b, k2.dm_b, k3.dm_b, k4.dm_b),
        },
    }
}

/// One classical fourth-order Runge-Kutta step of the stock dynamics.
pub fn rk4_step(state: NormalizedState, econ: &GoodEconomy, h: f64) -> NormalizedState {
    let y = Augmented {
        eta: state,
        money: MoneyState::default(),
    };
    rk4_augmented(&y, econ, None, h).eta
}

/// Uses the same rule as the segment classification, so a stock resting on
/// the threshold is not reported as crossing it again and again.
fn leaves(regime: Regime, s: NormalizedState, econ: &GoodEconomy) -> bool {
    directed_regime(s, econ) != regime
}

/// Integrates the stock dynamics (and money, when `money` is given) up to
/// `opts.horizon`, sampling every accepted step and every event.
///
/// Money follows `dm_A/dt = -x_A P_A + y (C_A + sigma f)` and
/// `dm_B/dt = -x_B P_B + y (C_B - sigma f)` in every regime.
pub fn integrate_with_events(
    state0: NormalizedState,
    econ: &GoodEconomy,
    money: Option<&MoneyTracking>,
    opts: &SolverOptions,
) -> Result<TimeSeries> {
    opts.validate()?;
    if !state0.is_finite() {
        return Err(ModelError::InvalidInput(format!(
            "initial state must be finite, got {state0:?}"
        )));
    }
    let prices = money.map(|m| &m.prices);
    let policy = opts.depletion_policy;
    let watch_depletion = policy != DepletionPolicy::Continue;

    let mut y = Augmented {
        eta: state0,
        money: money.map_or(MoneyState::default(), |m| m.initial),
    };
    let mut depleted = [false, false];
    let mut out = TimeSeries {
        times: Vec::new(),
        states: Vec::new(),
        regimes: Vec::new(),
        money: money.map(|_| Vec::new()),
        events: Vec::new(),
        halted: false,
    };

    let newly_depleted = |s: NormalizedState, depleted: &[bool; 2]| -> [bool; 2] {
        [
            watch_depletion && !depleted[0] && s.eta_a < 0.0,
            watch_depletion && !depleted[1] && s.eta_b < 0.0,
        ]
    };

    let mut regime = directed_regime(y.eta, econ);
    let record = |out: &mut TimeSeries, t: f64, y: &Augmented, regime: Regime| {
        out.times.push(t);
        out.states.push(y.eta);
        out.regimes.push(regime);
        if let Some(m) = out.money.as_mut() {
            m.push(y.money);
        }
    };

    // A negative opening stock is a depletion at t = 0.
    let opening = newly_depleted(y.eta, &depleted);
    if opening.iter().any(|&d| d) {
        for (i, stock) in [Stock::A, Stock::B].into_iter().enumerate() {
            if opening[i] {
                out.events.push(SolverEvent {
                    time: 0.0,
                    kind: EventKind::Depletion { stock },
                });
                depleted[i] = true;
            }
        }
        match policy {
            DepletionPolicy::Halt => {
                record(&mut out, 0.0, &y, regime);
                out.halted = true;
                return Ok(out);
            }
            DepletionPolicy::ClampToZero => {
                y.eta.eta_a = y.eta.eta_a.max(0.0);
                y.eta.eta_b = y.eta.eta_b.max(0.0);
                regime = directed_regime(y.eta, econ);
            }
            DepletionPolicy::Continue => {}
        }
    }
    record(&mut out, 0.0, &y, regime);

    let step = opts.step;
    let horizon = opts.horizon;
    let mut t_base = 0.0;
    let mut k: u64 = 0;
    let mut t = 0.0;
    while t < horizon {
        let mut t_next = t_base + (k + 1) as f64 * step;
        if t_next >= horizon - 1e-9 * step {
            t_next = horizon;
        }
        let h = t_next - t;
        let trial = rk4_augmented(&y, econ, prices, h);
        let crossed = leaves(regime, trial.eta, econ);
        let dep = newly_depleted(trial.eta, &depleted);

        if !crossed && !dep.iter().any(|&d| d) {
            y = trial;
            t = t_next;
            k += 1;
            if policy == DepletionPolicy::ClampToZero {
                clamp(&mut y, &mut depleted);
            }
            record(&mut out, t, &y, regime);
            continue;
        }

        // Shorten the step until the first event is bracketed within event_tol.
        let triggers = |hh: f64| {
            let z = rk4_augmented(&y, econ, prices, hh);
            leaves(regime, z.eta, econ) || newly_depleted(z.eta, &depleted).iter().any(|&d| d)
        };
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > opts.event_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if triggers(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        y = rk4_augmented(&y, econ, prices, hi);
        t += hi;
        t_base = t;
        k = 0;

        let dep = newly_depleted(y.eta, &depleted);
        for (i, stock) in [Stock::A, Stock::B].into_iter().enumerate() {
            if dep[i] {
                out.events.push(SolverEvent {
                    time: t,
                    kind: EventKind::Depletion { stock },
                });
                depleted[i] = true;
            }
        }
        if dep.iter().any(|&d| d) && policy == DepletionPolicy::Halt {
            record(&mut out, t, &y, regime);
            out.halted = true;
            return Ok(out);
        }
        if policy == DepletionPolicy::ClampToZero {
            clamp(&mut y, &mut depleted);
        }

        let next = directed_regime(y.eta, econ);
        if next != regime {
            let a_changed = next.a_above() != regime.a_above();
            let b_changed = next.b_above() != regime.b_above();
            for (changed, stock, upward) in [
                (a_changed, Stock::A, next.a_above()),
                (b_changed, Stock::B, next.b_above()),
            ] {
                if changed {
                    out.events.push(SolverEvent {
                        time: t,
                        kind: EventKind::Crossing {
                            stock,
                            upward,
                            from: regime,
                            to: next,
                        },
                    });
                }
            }
            regime = next;
        }
        record(&mut out, t, &y, regime);
    }
    Ok(out)
}

fn clamp(y: &mut Augmented, depleted: &mut [bool; 2]) {
    for (i, eta) in [&mut y.eta.eta_a, &mut y.eta.eta_b].into_iter().enumerate() {
        if *eta < 0.0 {
            *eta = 0.0;
        } else if *eta > 0.0 {
            depleted[i] = false;
        }
    }
}
