//! Fixed points: implied productions at an exporting equilibrium, steady-state
//! tests, and the per-regime equilibrium structure of the piecewise system.

use crate::error::{non_negative, ModelError, Result};
use crate::exchange::rhs;
use crate::model::{GoodEconomy, NormalizedState, Regime};

/// Production rates that hold A's stock at `eta_a_star` while A exports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointProduction {
    pub p_a: f64,
    pub p_b: f64,
}

/// Solves `P_A - C_A - sigma (eta* - 1) = 0`, `P_B - C_B + sigma (eta* - 1) = 0`.
///
/// `eta_a_star == 1` (no exchange) is accepted and returns the consumptions.
/// Fails when B would have to produce a negative amount, i.e. when
/// `sigma (eta* - 1) > C_B`.
pub fn fixed_point_production(
    eta_a_star: f64,
    c_a: f64,
    c_b: f64,
    sigma: f64,
) -> Result<FixedPointProduction> {
    if !eta_a_star.is_finite() || eta_a_star < 1.0 {
        return Err(ModelError::InvalidInput(format!(
            "fixed-point stock must be >= 1, got {eta_a_star}"
        )));
    }
    let c_a = non_negative("c_a", c_a)?;
    let c_b = non_negative("c_b", c_b)?;
    let sigma = non_negative("sigma", sigma)?;
    let shipped = sigma * (eta_a_star - 1.0);
    let p_b = c_b - shipped;
    if p_b < 0.0 {
        return Err(ModelError::InfeasibleProduction {
            production: p_b,
            exchanged: shipped,
            consumption: c_b,
        });
    }
    Ok(FixedPointProduction {
        p_a: c_a + shipped,
        p_b,
    })
}

/// True when both stock derivatives are within `tol` of zero.
pub fn is_steady_state(state: NormalizedState, econ: &GoodEconomy, tol: f64) -> Result<bool> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ModelError::NonPositive { name: "tol", value: tol });
    }
    let r = rhs(state, econ);
    Ok(r.deta_a.abs() <= tol && r.deta_b.abs() <= tol)
}

/// The coordinate that the regime's dynamics contract, and its attracting value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contracting {
    /// No contracting direction (decoupled linear drift).
    None,
    EtaA(f64),
    EtaB(f64),
    /// The difference `eta_a - eta_b`.
    Difference(f64),
}

/// Equilibrium structure of one regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeEquilibrium {
    pub regime: Regime,
    pub contracting: Contracting,
    /// Decay rate of the contracting coordinate: 0, sigma or 2 sigma.
    pub contraction_rate: f64,
    /// Whether the attracting value lies inside the regime's region.
    pub attractor_in_region: bool,
    /// Stock derivatives `(deta_a, deta_b)` once the contracting coordinate has settled.
    pub drift: (f64, f64),
    /// True when a set of stationary states exists inside the region.
    pub stationary: bool,
}

impl RegimeEquilibrium {
    pub fn describe(&self) -> String {
        let attractor = match self.contracting {
            Contracting::None => "no contracting coordinate".to_string(),
            Contracting::EtaA(v) => format!("eta_a -> {v}"),
            Contracting::EtaB(v) => format!("eta_b -> {v}"),
            Contracting::Difference(v) => format!("eta_a - eta_b -> {v}"),
        };
        let status = if self.stationary {
            "stationary set exists"
        } else if !self.attractor_in_region {
            "attractor outside region"
        } else {
            "no fixed point (drift)"
        };
        format!(
            "{}: {attractor}, rate {}, drift ({}, {}): {status}",
            self.regime, self.contraction_rate, self.drift.0, self.drift.1
        )
    }
}

fn negligible(x: f64, econ: &GoodEconomy) -> bool {
    let scale = 1.0 + econ.p_a + econ.p_b + econ.c_a + econ.c_b;
    x.abs() <= 1e-12 * scale
}

/// Per-regime equilibrium analysis. With `sigma == 0` only the decoupled
/// regime is meaningful and it alone is returned.
///
/// A full fixed point of an exporting regime additionally needs the importer
/// to be balanced at the attractor, `P_B = C_B - sigma (eta_a* - 1)`; this
/// is reported through `drift` and `stationary`.
pub fn regime_equilibria(econ: &GoodEconomy) -> Vec<RegimeEquilibrium> {
    let net_a = econ.net_a();
    let net_b = econ.net_b();
    let total = econ.net_total();
    let mut out = vec![RegimeEquilibrium {
        regime: Regime::NoExchange,
        contracting: Contracting::None,
        contraction_rate: 0.0,
        attractor_in_region: true,
        drift: (net_a, net_b),
        stationary: negligible(net_a, econ) && negligible(net_b, econ),
    }];
    let sigma = econ.sigma;
    if sigma <= 0.0 {
        return out;
    }

    // Exporter's stock relaxes to 1 + net/sigma; strictly above 1 only if net > 0.
    let eq_a = (net_a + sigma) / sigma;
    let in_a = net_a > 0.0;
    out.push(RegimeEquilibrium {
        regime: Regime::AExports,
        contracting: Contracting::EtaA(eq_a),
        contraction_rate: sigma,
        attractor_in_region: in_a,
        drift: (0.0, total),
        stationary: in_a && negligible(total, econ),
    });
    let eq_b = (net_b + sigma) / sigma;
    let in_b = net_b > 0.0;
    out.push(RegimeEquilibrium {
        regime: Regime::BExports,
        contracting: Contracting::EtaB(eq_b),
        contraction_rate: sigma,
        attractor_in_region: in_b,
        drift: (total, 0.0),
        stationary: in_b && negligible(total, econ),
    });
    // The line eta_a - eta_b = d* always reaches the quadrant {both > 1}.
    let d_star = (net_a - net_b) / (2.0 * sigma);
    out.push(RegimeEquilibrium {
        regime: Regime::Bilateral,
        contracting: Contracting::Difference(d_star),
        contraction_rate: 2.0 * sigma,
        attractor_in_region: true,
        drift: (0.5 * total, 0.5 * total),
        stationary: negligible(total, econ),
    });
    out
}
