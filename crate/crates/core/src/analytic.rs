//! Closed-form solutions of the four regimes and their composition into a
//! piecewise trajectory.
//!
//! Every closed form is written relative to the segment start: the state
//! moves away from `state0` by increments proportional to the start
//! derivative. A state with zero derivative therefore stays bit-identical,
//! and the A/B mirrored cases are exact relabelings of each other.
//!
//! Regime switches are located by bisection on the closed forms. Each
//! component is of the form `a + b t + c exp(-lambda t)`, which has at most
//! one turning point; splitting the search interval at the turning points
//! makes every component monotone on each piece, so no crossing is missed.

use crate::error::{ModelError, Result};
use crate::exchange::{directed_regime, rhs_in_regime, StockRates};
use crate::model::{GoodEconomy, MoneyState, NormalizedState, PriceSet, Regime};

/// Default time tolerance for locating threshold crossings.
pub const DEFAULT_EVENT_TOL: f64 = 1e-10;

/// Hard cap on the number of segments in one trajectory.
pub const MAX_SEGMENTS: usize = 1_000_000;

/// Integration constants of a segment, in segment-local time `tau = t - t_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationConstants {
    /// `eta_a = a1 + (P_A - C_A) tau`, `eta_b = b1 + (P_B - C_B) tau`.
    Linear { a1: f64, b1: f64 },
    /// `eta_a = (P_A - C_A + sigma)/sigma + a2 e^{-sigma tau}`,
    /// `eta_b = (P_A - C_A + P_B - C_B) tau - a2 e^{-sigma tau} + b2`.
    AExports { a2: f64, b2: f64 },
    /// Mirror of [`IntegrationConstants::AExports`] with A and B exchanged:
    /// `eta_b = (P_B - C_B + sigma)/sigma + b2 e^{-sigma tau}`,
    /// `eta_a = (P_A - C_A + P_B - C_B) tau - b2 e^{-sigma tau} + a2`.
    BExports { a2: f64, b2: f64 },
    /// `eta_a + eta_b = total0 + P_s tau`,
    /// `eta_a - eta_b = d_inf + d_amp e^{-2 sigma tau}`.
    Bilateral { total0: f64, d_inf: f64, d_amp: f64 },
}

/// Precomputed closed form of one regime from a given start state.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ClosedForm {
    /// Regime whose dynamics are applied (`NoExchange` whenever `sigma == 0`).
    dynamics: Regime,
    sigma: f64,
    start: NormalizedState,
    rates: StockRates,
}

impl ClosedForm {
    fn new(dynamics: Regime, start: NormalizedState, econ: &GoodEconomy) -> Self {
        let dynamics = if econ.sigma == 0.0 {
            Regime::NoExchange
        } else {
            dynamics
        };
        Self {
            dynamics,
            sigma: econ.sigma,
            start,
            rates: rhs_in_regime(start, econ, dynamics),
        }
    }

    fn at(&self, tau: f64) -> NormalizedState {
        let NormalizedState { eta_a, eta_b } = self.start;
        let StockRates { deta_a, deta_b } = self.rates;
        match self.dynamics {
            Regime::NoExchange => NormalizedState {
                eta_a: eta_a + deta_a * tau,
                eta_b: eta_b + deta_b * tau,
            },
            Regime::AExports => {
                let g = (-self.sigma * tau).exp_m1() / self.sigma;
                NormalizedState {
                    eta_a: eta_a - deta_a * g,
                    eta_b: eta_b + (deta_a + deta_b) * tau + deta_a * g,
                }
            }
            Regime::BExports => {
                let g = (-self.sigma * tau).exp_m1() / self.sigma;
                NormalizedState {
                    eta_a: eta_a + (deta_b + deta_a) * tau + deta_b * g,
                    eta_b: eta_b - deta_b * g,
                }
            }
            Regime::Bilateral => {
                let two_sigma = 2.0 * self.sigma;
                let g = (-two_sigma * tau).exp_m1() / two_sigma;
                let d_total = (deta_a + deta_b) * tau;
                let d_diff = -(deta_a - deta_b) * g;
                NormalizedState {
                    eta_a: eta_a + 0.5 * (d_total + d_diff),
                    eta_b: eta_b + 0.5 * (d_total - d_diff),
                }
            }
        }
    }

    /// Times in `(0, limit)` where a component's derivative changes sign.
    fn turning_times(&self, limit: f64) -> Vec<f64> {
        let StockRates { deta_a, deta_b } = self.rates;
        let total = deta_a + deta_b;
        let diff = deta_a - deta_b;
        let candidates = match self.dynamics {
            Regime::NoExchange => [None, None],
            Regime::AExports => [turning_time(total, -deta_a, self.sigma), None],
            Regime::BExports => [turning_time(total, -deta_b, self.sigma), None],
            Regime::Bilateral => [
                turning_time(total, diff, 2.0 * self.sigma),
                turning_time(total, -diff, 2.0 * self.sigma),
            ],
        };
        let mut out: Vec<f64> = candidates
            .into_iter()
            .flatten()
            .filter(|&t| t > 0.0 && t < limit)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    fn constants(&self, econ: &GoodEconomy) -> IntegrationConstants {
        let NormalizedState { eta_a, eta_b } = self.start;
        match self.dynamics {
            Regime::NoExchange => IntegrationConstants::Linear { a1: eta_a, b1: eta_b },
            Regime::AExports => {
                let a2 = eta_a - (econ.net_a() + self.sigma) / self.sigma;
                IntegrationConstants::AExports { a2, b2: eta_b + a2 }
            }
            Regime::BExports => {
                let b2 = eta_b - (econ.net_b() + self.sigma) / self.sigma;
                IntegrationConstants::BExports { a2: eta_a + b2, b2 }
            }
            Regime::Bilateral => {
                let d_inf = (econ.net_a() - econ.net_b()) / (2.0 * self.sigma);
                IntegrationConstants::Bilateral {
                    total0: eta_a + eta_b,
                    d_inf,
                    d_amp: (eta_a - eta_b) - d_inf,
                }
            }
        }
    }
}

/// Zero of `constant + coeff * exp(-rate t)` for `t > 0`, if any.
fn turning_time(constant: f64, coeff: f64, rate: f64) -> Option<f64> {
    if coeff == 0.0 || rate <= 0.0 {
        return None;
    }
    let q = -constant / coeff;
    if q > 0.0 && q < 1.0 {
        Some(-q.ln() / rate)
    } else {
        None
    }
}

fn check_step(dt: f64) -> Result<()> {
    if dt.is_finite() && dt >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidInput(format!(
            "time increment must be finite and non-negative, got {dt}"
        )))
    }
}

fn solve_exchanging(
    regime: Regime,
    state0: NormalizedState,
    econ: &GoodEconomy,
    dt: f64,
) -> Result<NormalizedState> {
    check_step(dt)?;
    if econ.sigma <= 0.0 {
        return Err(ModelError::ZeroSigma { regime });
    }
    Ok(ClosedForm::new(regime, state0, econ).at(dt))
}

/// Decoupled linear evolution, valid while neither stock exceeds the threshold.
pub fn solve_no_exchange(
    state0: NormalizedState,
    econ: &GoodEconomy,
    dt: f64,
) -> Result<NormalizedState> {
    check_step(dt)?;
    Ok(ClosedForm::new(Regime::NoExchange, state0, econ).at(dt))
}

/// A above threshold, B below: `eta_a` relaxes exponentially at rate `sigma`
/// towards `(P_A - C_A + sigma)/sigma` and B absorbs what A ships.
pub fn solve_a_exports(
    state0: NormalizedState,
    econ: &GoodEconomy,
    dt: f64,
) -> Result<NormalizedState> {
    solve_exchanging(Regime::AExports, state0, econ, dt)
}

/// Mirror image of [`solve_a_exports`].
pub fn solve_b_exports(
    state0: NormalizedState,
    econ: &GoodEconomy,
    dt: f64,
) -> Result<NormalizedState> {
    solve_exchanging(Regime::BExports, state0, econ, dt)
}

/// Both above threshold. The total stock grows linearly (zero eigenvalue) and
/// the difference `eta_a - eta_b` relaxes at rate `2 sigma` towards
/// `(P_d)/(2 sigma)`, `P_d = (P_A - C_A) - (P_B - C_B)`.
pub fn solve_bilateral(
    state0: NormalizedState,
    econ: &GoodEconomy,
    dt: f64,
) -> Result<NormalizedState> {
    solve_exchanging(Regime::Bilateral, state0, econ, dt)
}

/// Dispatches to the closed form of `regime`, falling back to the linear
/// solution when `sigma == 0`.
pub fn solve_regime(
    regime: Regime,
    state0: NormalizedState,
    econ: &GoodEconomy,
    dt: f64,
) -> Result<NormalizedState> {
    check_step(dt)?;
    Ok(ClosedForm::new(regime, state0, econ).at(dt))
}

/// One interval of a piecewise trajectory on which a single regime holds.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSegment {
    pub regime: Regime,
    pub t_start: f64,
    pub t_end: f64,
    pub state_start: NormalizedState,
    pub state_end: NormalizedState,
    pub constants: IntegrationConstants,
    form: ClosedForm,
}

impl RegimeSegment {
    /// State at absolute time `t`; times outside the segment extrapolate the closed form.
    pub fn state_at(&self, t: f64) -> NormalizedState {
        self.form.at(t - self.t_start)
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// A regime switch between two consecutive segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSwitch {
    pub time: f64,
    pub from: Regime,
    pub to: Regime,
    pub state: NormalizedState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseTrajectory {
    pub segments: Vec<RegimeSegment>,
    pub horizon: f64,
    pub econ: GoodEconomy,
}

impl PiecewiseTrajectory {
    fn segment_index(&self, t: f64) -> usize {
        let idx = self.segments.partition_point(|s| s.t_end < t);
        idx.min(self.segments.len() - 1)
    }

    /// Evaluates the trajectory at `t`, clamped to `[0, horizon]`.
    pub fn state_at(&self, t: f64) -> NormalizedState {
        let t = t.clamp(0.0, self.horizon);
        self.segments[self.segment_index(t)].state_at(t)
    }

    pub fn regime_at(&self, t: f64) -> Regime {
        let t = t.clamp(0.0, self.horizon);
        self.segments[self.segment_index(t)].regime
    }

    pub fn initial_state(&self) -> NormalizedState {
        self.segments[0].state_start
    }

    pub fn final_state(&self) -> NormalizedState {
        self.segments[self.segments.len() - 1].state_end
    }

    pub fn switches(&self) -> Vec<RegimeSwitch> {
        self.segments
            .windows(2)
            .map(|w| RegimeSwitch {
                time: w[1].t_start,
                from: w[0].regime,
                to: w[1].regime,
                state: w[1].state_start,
            })
            .collect()
    }

    /// Sample times `k * step` up to the horizon, merged with every switch time.
    pub fn sample_times(&self, step: f64) -> Vec<f64> {
        let n = (self.horizon / step).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
        if times.last().is_some_and(|&t| t < self.horizon) {
            times.push(self.horizon);
        }
        times.extend(self.switches().iter().map(|s| s.time));
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }

    /// Money holdings at `t` when each country pays `x` per unit produced and
    /// earns `y` per unit consumed at home or shipped abroad.
    ///
    /// The cumulative exchange term follows from stock balance:
    /// `int sigma f = (P_A - C_A) t - (eta_a(t) - eta_a(0))`.
    pub fn money_at(&self, prices: &PriceSet, m0: MoneyState, t: f64) -> MoneyState {
        let t = t.clamp(0.0, self.horizon);
        let e = &self.econ;
        let start = self.initial_state();
        let now = self.state_at(t);
        let shipped_by_a = e.net_a() * t - (now.eta_a - start.eta_a);
        let received_by_b = (now.eta_b - start.eta_b) - e.net_b() * t;
        MoneyState {
            m_a: m0.m_a + (-prices.x_a * e.p_a + prices.y * e.c_a) * t + prices.y * shipped_by_a,
            m_b: m0.m_b + (-prices.x_b * e.p_b + prices.y * e.c_b) * t
                - prices.y * received_by_b,
        }
    }
}

/// First time in `(0, limit]` at which the plain classification leaves
/// `regime`, located to within `tol`.
fn find_exit(form: &ClosedForm, regime: Regime, limit: f64, tol: f64) -> Result<Option<f64>> {
    let leaves = |tau: f64| {
        let s = form.at(tau);
        (s.eta_a > 1.0) != regime.a_above() || (s.eta_b > 1.0) != regime.b_above()
    };
    let mut lo = 0.0;
    let mut breakpoints = form.turning_times(limit);
    breakpoints.push(limit);
    for hi in breakpoints {
        if leaves(hi) {
            let mut hi = hi;
            let mut iterations = 0;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if leaves(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                iterations += 1;
                if iterations > 2000 {
                    return Err(ModelError::EventLocalization {
                        time: lo,
                        detail: format!("bisection did not converge on [{lo}, {hi}]"),
                    });
                }
            }
            return Ok(Some(hi));
        }
        lo = hi;
    }
    Ok(None)
}

/// Composes the per-regime closed forms from `state0` up to `horizon`,
/// starting a new segment at every threshold crossing.
pub fn simulate_analytic(
    state0: NormalizedState,
    econ: &GoodEconomy,
    horizon: f64,
    event_tol: f64,
) -> Result<PiecewiseTrajectory> {
    if !state0.is_finite() {
        return Err(ModelError::InvalidInput(format!("initial state must be finite, got {state0:?}")));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(ModelError::NonPositive { name: "horizon", value: horizon });
    }
    if !(event_tol.is_finite() && event_tol > 0.0) {
        return Err(ModelError::NonPositive { name: "event_tol", value: event_tol });
    }

    let mut segments: Vec<RegimeSegment> = Vec::new();
    let mut t = 0.0;
    let mut state = state0;
    loop {
        if segments.len() >= MAX_SEGMENTS {
            return Err(ModelError::TooManySegments { limit: MAX_SEGMENTS, time: t });
        }
        let regime = directed_regime(state, econ);
        let form = ClosedForm::new(regime, state, econ);
        let remaining = horizon - t;
        let exit = find_exit(&form, regime, remaining, event_tol)?;
        let tau = exit.unwrap_or(remaining);
        let t_end = if exit.is_some() { t + tau } else { horizon };
        let end = form.at(tau);
        segments.push(RegimeSegment {
            regime,
            t_start: t,
            t_end,
            state_start: state,
            state_end: end,
            constants: form.constants(econ),
            form,
        });
        if exit.is_none() || t_end >= horizon {
            break;
        }
        t = t_end;
        state = end;
    }
    Ok(PiecewiseTrajectory {
        segments,
        horizon,
        econ: *econ,
    })
}
