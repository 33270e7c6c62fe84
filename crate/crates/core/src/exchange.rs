//! The exchange law and the piecewise right-hand side of the stock dynamics.
//!
//! Exchange switches on when a stock exceeds the threshold `eta = 1`. The
//! threshold itself belongs to the "below" side; because the flow is
//! continuous in both stocks this choice never changes a trajectory.

use crate::model::{GoodEconomy, NormalizedState, Regime};

/// Time derivatives of the two normalized stocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StockRates {
    pub deta_a: f64,
    pub deta_b: f64,
}

impl StockRates {
    pub fn total(self) -> f64 {
        self.deta_a + self.deta_b
    }

    pub fn difference(self) -> f64 {
        self.deta_a - self.deta_b
    }
}

/// Exchange function `f = (eta_a - 1)+ - (eta_b - 1)+`, positive when A ships to B.
pub fn exchange_flow(state: NormalizedState) -> f64 {
    flow_in_regime(state, classify_regime(state))
}

/// The branch formula of `f` belonging to `regime`, evaluated without looking at
/// which region `state` actually lies in.
pub fn flow_in_regime(state: NormalizedState, regime: Regime) -> f64 {
    match regime {
        Regime::NoExchange => 0.0,
        Regime::AExports => state.eta_a - 1.0,
        Regime::BExports => -(state.eta_b - 1.0),
        Regime::Bilateral => state.eta_a - state.eta_b,
    }
}

pub fn classify_regime(state: NormalizedState) -> Regime {
    Regime::from_flags(state.eta_a > 1.0, state.eta_b > 1.0)
}

/// Like [`classify_regime`], except that a stock sitting exactly on the
/// threshold counts as above it when its derivative there is positive.
///
/// This is the classification used at the start of every trajectory segment
/// so that a state on the guard does not spawn a zero-length segment.
pub fn directed_regime(state: NormalizedState, econ: &GoodEconomy) -> Regime {
    let plain = classify_regime(state);
    if state.eta_a != 1.0 && state.eta_b != 1.0 {
        return plain;
    }
    let rates = rhs(state, econ);
    let a_above = state.eta_a > 1.0 || (state.eta_a == 1.0 && rates.deta_a > 0.0);
    let b_above = state.eta_b > 1.0 || (state.eta_b == 1.0 && rates.deta_b > 0.0);
    Regime::from_flags(a_above, b_above)
}

/// Stock derivatives using the branch of `f` for `regime`.
///
/// Written as production minus total outflow so that a fixed point built
/// from the same outflow expression yields derivatives that are exactly zero.
pub fn rhs_in_regime(state: NormalizedState, econ: &GoodEconomy, regime: Regime) -> StockRates {
    let shipped = econ.sigma * flow_in_regime(state, regime);
    StockRates {
        deta_a: econ.p_a - (econ.c_a + shipped),
        deta_b: econ.p_b - (econ.c_b - shipped),
    }
}

/// Normalized balance equations `deta_a = P_A - C_A - sigma f`, `deta_b = P_B - C_B + sigma f`.
pub fn rhs(state: NormalizedState, econ: &GoodEconomy) -> StockRates {
    rhs_in_regime(state, econ, classify_regime(state))
}
