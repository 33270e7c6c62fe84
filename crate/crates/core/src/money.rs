//! Money balances at exporting fixed points.
//!
//! For one good, the importer can only avoid losing money by not producing
//! the good at all. With two goods of opposite advantage and balanced trade,
//! both countries' money rates depend on the scenario only through
//! `k = sigma1 (eta_a1 - 1)`, the volume of good 1 shipped per unit time.

use crate::error::{ModelError, Result};
use crate::model::{GoodEconomy, PriceSet, TwoGoodScenario};
use crate::steady::fixed_point_production;

/// Margins `price - cost` per unit of each good in each country.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginCoefficients {
    /// `y1 - x_a1`, positive for a valid scenario.
    pub alpha1: f64,
    /// `y2 - x_a2`, negative.
    pub alpha2: f64,
    /// `y1 - x_b1`, negative.
    pub beta1: f64,
    /// `y2 - x_b2`, positive.
    pub beta2: f64,
}

pub fn margins(s: &TwoGoodScenario) -> MarginCoefficients {
    MarginCoefficients {
        alpha1: s.prices1.y - s.prices1.x_a,
        alpha2: s.prices2.y - s.prices2.x_a,
        beta1: s.prices1.y - s.prices1.x_b,
        beta2: s.prices2.y - s.prices2.x_b,
    }
}

/// Productions and money rates of a single good at an A-exporting fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneGoodMoney {
    pub p_a: f64,
    pub p_b: f64,
    pub dm_a: f64,
    pub dm_b: f64,
}

/// Money rates `dm_A = -x_A P_A + y [C_A + sigma (eta* - 1)]`,
/// `dm_B = -x_B P_B + y [C_B - sigma (eta* - 1)]` with productions taken from
/// the fixed-point equations. Only the consumptions and `sigma` of `econ` are used.
pub fn one_good_money_rates(
    econ: &GoodEconomy,
    prices: &PriceSet,
    eta_a_star: f64,
) -> Result<OneGoodMoney> {
    let fp = fixed_point_production(eta_a_star, econ.c_a, econ.c_b, econ.sigma)?;
    let shipped = econ.sigma * (eta_a_star - 1.0);
    Ok(OneGoodMoney {
        p_a: fp.p_a,
        p_b: fp.p_b,
        dm_a: -prices.x_a * fp.p_a + prices.y * (econ.c_a + shipped),
        dm_b: -prices.x_b * fp.p_b + prices.y * (econ.c_b - shipped),
    })
}

/// Exchange coefficient of good 2 that zeroes both countries' total trade balance:
/// `sigma2 = (eta_a1 - 1)/(eta_b2 - 1) * y1/y2 * sigma1`.
pub fn balanced_sigma2(sigma1: f64, eta_a1: f64, eta_b2: f64, y1: f64, y2: f64) -> Result<f64> {
    if !(eta_b2.is_finite() && eta_b2 > 1.0) {
        return Err(ModelError::InvalidInput(format!(
            "eta_b2 must exceed 1 to balance trade, got {eta_b2}"
        )));
    }
    if !(y2.is_finite() && y2 > 0.0) {
        return Err(ModelError::NonPositive { name: "y2", value: y2 });
    }
    if !(eta_a1.is_finite() && eta_a1 >= 1.0) {
        return Err(ModelError::InvalidInput(format!(
            "eta_a1 must be >= 1, got {eta_a1}"
        )));
    }
    Ok((eta_a1 - 1.0) / (eta_b2 - 1.0) * (y1 / y2) * sigma1)
}

/// Value of each country's net exports of each good per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeBalances {
    pub b_a1: f64,
    pub b_a2: f64,
    pub b_b1: f64,
    pub b_b2: f64,
}

impl TradeBalances {
    pub fn total_a(&self) -> f64 {
        self.b_a1 + self.b_a2
    }

    pub fn total_b(&self) -> f64 {
        self.b_b1 + self.b_b2
    }
}

pub fn trade_balances(s: &TwoGoodScenario, sigma1: f64, sigma2: f64) -> TradeBalances {
    let good1 = s.prices1.y * sigma1 * (s.eta_a1 - 1.0);
    let good2 = s.prices2.y * sigma2 * (s.eta_b2 - 1.0);
    TradeBalances {
        b_a1: good1,
        b_a2: -good2,
        b_b1: -good1,
        b_b2: good2,
    }
}

/// Fixed-point production rates of both goods in both countries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Productions {
    pub p_a1: f64,
    pub p_a2: f64,
    pub p_b1: f64,
    pub p_b2: f64,
}

/// Result of the four fixed-point feasibility conditions at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityResult {
    /// `k = sigma1 (eta_a1 - 1)`.
    pub k: f64,
    pub dm_a: f64,
    pub dm_b: f64,
    pub p_a1: f64,
    pub p_a2: f64,
    pub p_b1: f64,
    pub p_b2: f64,
    pub money_a_ok: bool,
    pub money_b_ok: bool,
    pub prod_a2_ok: bool,
    pub prod_b1_ok: bool,
}

impl FeasibilityResult {
    pub fn feasible(&self) -> bool {
        self.money_a_ok && self.money_b_ok && self.prod_a2_ok && self.prod_b1_ok
    }

    pub fn productions(&self) -> Productions {
        Productions {
            p_a1: self.p_a1,
            p_a2: self.p_a2,
            p_b1: self.p_b1,
            p_b2: self.p_b2,
        }
    }
}

/// Evaluates the balanced-trade fixed point for a given shipped volume `k`.
///
/// Good 2's shipped volume `sigma2 (eta_b2 - 1)` is replaced by `k y1 / y2`,
/// so nothing here depends on `sigma1`, `eta_a1` or `eta_b2` separately.
pub fn feasibility_for_volume(s: &TwoGoodScenario, k: f64) -> FeasibilityResult {
    let m = margins(s);
    let k2 = k * (s.prices1.y / s.prices2.y);
    let p_a1 = s.good1.c_a + k;
    let p_a2 = s.good2.c_a - k2;
    let p_b1 = s.good1.c_b - k;
    let p_b2 = s.good2.c_b + k2;
    let dm_a = m.alpha1 * p_a1 + m.alpha2 * p_a2;
    let dm_b = m.beta1 * p_b1 + m.beta2 * p_b2;
    FeasibilityResult {
        k,
        dm_a,
        dm_b,
        p_a1,
        p_a2,
        p_b1,
        p_b2,
        money_a_ok: dm_a >= 0.0,
        money_b_ok: dm_b >= 0.0,
        prod_a2_ok: p_a2 >= 0.0,
        prod_b1_ok: p_b1 >= 0.0,
    }
}

/// Feasibility at `(sigma1, eta_a1)`, ignoring the scenario's own `eta_a1`.
pub fn feasibility_at(s: &TwoGoodScenario, sigma1: f64, eta_a1: f64) -> FeasibilityResult {
    feasibility_for_volume(s, sigma1 * (eta_a1 - 1.0))
}

/// Money rates `dm_A = alpha1 P_A1 + alpha2 P_A2`, `dm_B = beta1 P_B1 + beta2 P_B2`
/// at the balanced-trade fixed point. Negative productions are reported, not masked.
pub fn two_good_money_rates(s: &TwoGoodScenario, sigma1: f64) -> (f64, f64, Productions) {
    let r = feasibility_check(s, sigma1);
    (r.dm_a, r.dm_b, r.productions())
}

/// Checks `dm_A >= 0`, `dm_B >= 0`, `P_A2 >= 0` and `P_B1 >= 0`.
pub fn feasibility_check(s: &TwoGoodScenario, sigma1: f64) -> FeasibilityResult {
    feasibility_at(s, sigma1, s.eta_a1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::two_good;
    use crate::model::validate_scenario;
    use proptest::prelude::*;

    /// Money rates evaluated from the original per-good equations, with
    /// sigma2 taken from the balance relation instead of being eliminated.
    fn pre_elimination(s: &TwoGoodScenario, sigma1: f64) -> (f64, f64, bool) {
        let sigma2 = balanced_sigma2(sigma1, s.eta_a1, s.eta_b2, s.prices1.y, s.prices2.y).unwrap();
        let (g1, g2, p1, p2) = (s.good1, s.good2, s.prices1, s.prices2);
        let ex1 = sigma1 * (s.eta_a1 - 1.0);
        let ex2 = sigma2 * (s.eta_b2 - 1.0);
        let p_a1 = g1.c_a + ex1;
        let p_a2 = g2.c_a - ex2;
        let p_b1 = g1.c_b - ex1;
        let p_b2 = g2.c_b + ex2;
        let dm_a = -p1.x_a * p_a1 + p1.y * (g1.c_a + ex1) - p2.x_a * p_a2 + p2.y * (g2.c_a - ex2);
        let dm_b = -p1.x_b * p_b1 + p1.y * (g1.c_b - ex1) - p2.x_b * p_b2 + p2.y * (g2.c_b + ex2);
        let ok = dm_a >= 0.0 && dm_b >= 0.0 && p_a2 >= 0.0 && p_b1 >= 0.0;
        (dm_a, dm_b, ok)
    }

    #[test]
    fn two_good_margins() {
        let m = margins(&two_good());
        assert_eq!(m, MarginCoefficients { alpha1: 1.0, alpha2: -1.0, beta1: -1.0, beta2: 2.0 });
    }

    #[test]
    fn symmetric_prices_give_mirrored_margins() {
        let mut s = two_good();
        s.prices1 = PriceSet { x_a: 1.0, x_b: 4.0, y: 3.0 };
        s.prices2 = PriceSet { x_a: 4.0, x_b: 1.0, y: 3.0 };
        let m = margins(&s);
        assert_eq!(m.alpha1, m.beta2);
        assert_eq!(m.alpha2, m.beta1);
    }

    #[test]
    fn one_good_importer_breaks_even_only_without_production() {
        let econ = GoodEconomy { p_a: 0.0, p_b: 0.0, c_a: 1.5, c_b: 2.0, sigma: 1.0 };
        let prices = PriceSet { x_a: 1.0, x_b: 3.0, y: 2.0 };
        // sigma (eta - 1) = C_B
        let r = one_good_money_rates(&econ, &prices, 3.0).unwrap();
        assert_eq!(r.p_b, 0.0);
        assert_eq!(r.dm_b, 0.0);
        assert_eq!(r.dm_a, (2.0 - 1.0) * (1.5 + 2.0));
        // Half the import volume: B still produces and loses money.
        let r = one_good_money_rates(&econ, &prices, 2.0).unwrap();
        assert_eq!(r.p_b, 1.0);
        assert_eq!(r.dm_b, (2.0 - 3.0) * 1.0);
        // Zero margin for A.
        let flat = PriceSet { x_a: 2.0, ..prices };
        assert_eq!(one_good_money_rates(&econ, &flat, 2.0).unwrap().dm_a, 0.0);
        assert!(one_good_money_rates(&econ, &prices, 3.5).is_err());
    }

    #[test]
    fn balanced_sigma2_examples() {
        assert_eq!(balanced_sigma2(1.7, 2.0, 2.0, 3.0, 3.0).unwrap(), 1.7);
        assert_eq!(balanced_sigma2(2.0, 2.5, 2.0, 2.0, 4.0).unwrap(), 1.5);
        assert_eq!(balanced_sigma2(0.0, 2.5, 2.0, 2.0, 4.0).unwrap(), 0.0);
        assert!(balanced_sigma2(1.0, 2.0, 1.0, 2.0, 4.0).is_err());
        assert!(balanced_sigma2(1.0, 2.0, 2.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn trade_balance_examples() {
        let s = two_good();
        let sigma2 = balanced_sigma2(2.0, s.eta_a1, s.eta_b2, 2.0, 4.0).unwrap();
        let b = trade_balances(&s, 2.0, sigma2);
        assert_eq!(b.b_a1, 6.0);
        assert_eq!(b.total_a(), 0.0);
        assert_eq!(b.total_b(), 0.0);
        let zero = trade_balances(&s, 0.0, 0.0);
        assert_eq!([zero.b_a1, zero.b_a2, zero.b_b1, zero.b_b2].map(f64::abs), [0.0; 4]);
    }

    #[test]
    fn reference_money_rates() {
        // sigma1 = 2, eta_a1 = 2.5 => k = 3
        let (dm_a, dm_b, p) = two_good_money_rates(&two_good(), 2.0);
        assert_eq!((dm_a, dm_b), (0.5, 3.0));
        assert_eq!(p, Productions { p_a1: 4.0, p_a2: 3.5, p_b1: 4.0, p_b2: 3.5 });
        // Autarky limit.
        let (dm_a, dm_b, _) = two_good_money_rates(&two_good(), 0.0);
        assert_eq!((dm_a, dm_b), (1.0 - 5.0, -7.0 + 4.0));
    }

    #[test]
    fn zero_alpha2_limit() {
        let mut s = two_good();
        s.prices2.x_a = s.prices2.y;
        for sigma1 in [0.0, 0.5, 3.0] {
            let (dm_a, _, p) = two_good_money_rates(&s, sigma1);
            assert_eq!(dm_a, p.p_a1);
            assert!(dm_a >= 0.0);
        }
    }

    #[test]
    fn two_good_feasibility_examples() {
        let s = two_good().with_eta_a1(2.0);
        let r = feasibility_check(&s, 1.0);
        assert_eq!(r.dm_a, -2.5);
        assert!(!r.money_a_ok && !r.feasible());
        assert!(!pre_elimination(&s, 1.0).2);

        let r = feasibility_check(&two_good(), 2.0);
        assert!(r.feasible());
        assert_eq!((r.dm_a, r.dm_b, r.p_a2, r.p_b1), (0.5, 3.0, 3.5, 4.0));
        assert!(pre_elimination(&two_good(), 2.0).2);

        let r = feasibility_check(&two_good(), 0.0);
        assert!(r.prod_a2_ok && r.prod_b1_ok);
        assert!(!r.money_a_ok && !r.money_b_ok);
    }

    fn arb_valid_scenario() -> impl Strategy<Value = TwoGoodScenario> {
        (
            proptest::collection::vec(0.0..10.0f64, 4),
            (0.0..5.0f64, 0.1..5.0f64, 0.1..5.0f64),
            (0.0..5.0f64, 0.1..5.0f64, 0.1..5.0f64),
            1.01..10.0f64,
            1.01..10.0f64,
        )
            .prop_map(|(c, (x_a1, up1, up1b), (x_b2, up2, up2a), eta_a1, eta_b2)| {
                let mut s = two_good();
                s.good1.c_a = c[0];
                s.good1.c_b = c[1];
                s.good2.c_a = c[2];
                s.good2.c_b = c[3];
                s.prices1 = PriceSet { x_a: x_a1, y: x_a1 + up1, x_b: x_a1 + up1 + up1b };
                s.prices2 = PriceSet { x_b: x_b2, y: x_b2 + up2, x_a: x_b2 + up2 + up2a };
                s.eta_a1 = eta_a1;
                s.eta_b2 = eta_b2;
                s
            })
    }

    proptest! {
        #[test]
        fn valid_scenarios_have_the_margin_sign_pattern(s in arb_valid_scenario()) {
            prop_assert!(validate_scenario(&s).is_empty());
            let m = margins(&s);
            prop_assert!(m.alpha1 > 0.0 && m.alpha2 < 0.0 && m.beta1 < 0.0 && m.beta2 > 0.0);
        }

        #[test]
        fn eliminated_and_direct_rates_agree(s in arb_valid_scenario(), sigma1 in 0.0..10.0f64) {
            let r = feasibility_check(&s, sigma1);
            let (dm_a, dm_b, ok) = pre_elimination(&s, sigma1);
            let tol = 1e-12 * (1.0 + r.k.abs() * 20.0 + 100.0);
            prop_assert!((r.dm_a - dm_a).abs() <= tol);
            prop_assert!((r.dm_b - dm_b).abs() <= tol);
            let clear = [r.dm_a, r.dm_b, r.p_a2, r.p_b1].iter().all(|v| v.abs() > tol);
            if clear {
                prop_assert_eq!(r.feasible(), ok);
            }
        }

        #[test]
        fn result_does_not_depend_on_eta_b2(s in arb_valid_scenario(), sigma1 in 0.0..10.0f64, eta_b2 in 1.01..10.0f64) {
            let other = TwoGoodScenario { eta_b2, ..s };
            prop_assert_eq!(feasibility_check(&s, sigma1), feasibility_check(&other, sigma1));
        }

        #[test]
        fn balance_relation_zeroes_trade(s in arb_valid_scenario(), sigma1 in 0.0..10.0f64) {
            let sigma2 = balanced_sigma2(sigma1, s.eta_a1, s.eta_b2, s.prices1.y, s.prices2.y).unwrap();
            let b = trade_balances(&s, sigma1, sigma2);
            prop_assert!(b.total_a().abs() <= 1e-12 * b.b_a1.abs().max(1.0));
            prop_assert!(b.total_b().abs() <= 1e-12 * b.b_b1.abs().max(1.0));
            prop_assert_eq!(b.total_a(), -b.total_b());
        }
    }
}
