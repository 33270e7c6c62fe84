//! Two-country trade flow model.
//!
//! Each good is held in two communicating stocks; a country ships its excess
//! above a threshold to the other at a rate proportional to the excess (or to
//! the difference of excesses when both are above). The crate provides:
//!
//! - **model**: normalized domain types and scenario validation
//! - **exchange**: the exchange law and the piecewise right-hand side
//! - **analytic**: closed-form per-regime solutions composed across switches
//! - **integrator**: fixed-step RK4 with threshold-crossing events, used as the numeric oracle
//! - **steady**: fixed points and equilibrium structure
//! - **money**: money balances, margins, trade balance and feasibility at fixed points
//! - **region**: feasibility scan of the `(sigma1, eta_a1)` plane

pub mod analytic;
pub mod error;
pub mod exchange;
pub mod integrator;
pub mod model;
pub mod money;
pub mod region;
pub mod steady;

pub use analytic::{
    simulate_analytic, solve_a_exports, solve_b_exports, solve_bilateral, solve_no_exchange,
    solve_regime, IntegrationConstants, PiecewiseTrajectory, RegimeSegment, RegimeSwitch,
};
pub use error::{ModelError, Result};
pub use exchange::{classify_regime, directed_regime, exchange_flow, rhs, StockRates};
pub use integrator::{
    integrate_with_events, rk4_step, DepletionPolicy, EventKind, MoneyTracking, SolverEvent,
    SolverOptions, Stock, TimeSeries,
};
pub use model::{
    validate_scenario, Advantage, GoodEconomy, MoneyState, NormalizedState, PriceSet, Regime,
    TwoGoodScenario, Violation, DEFAULT_ETA_B2,
};
pub use money::{
    balanced_sigma2, feasibility_at, feasibility_check, feasibility_for_volume, margins,
    one_good_money_rates, trade_balances, two_good_money_rates, FeasibilityResult,
    MarginCoefficients, OneGoodMoney, Productions, TradeBalances,
};
pub use region::{
    feasible_k_interval, scan_region, scan_region_with_threads, FeasibleVolumes, GridSpec,
    RegionMap, RegionNode,
};
pub use steady::{
    fixed_point_production, is_steady_state, regime_equilibria, Contracting,
    FixedPointProduction, RegimeEquilibrium,
};
