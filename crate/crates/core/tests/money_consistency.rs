use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tradeflow_core::{
    balanced_sigma2, integrate_with_events, simulate_analytic, two_good_money_rates,
    DepletionPolicy, GoodEconomy, MoneyState, MoneyTracking, NormalizedState, PriceSet,
    SolverOptions, TwoGoodScenario,
};

fn two_good_at(eta_a1: f64) -> TwoGoodScenario {
    let good = |c_a, c_b| GoodEconomy {
        p_a: 0.0,
        p_b: 0.0,
        c_a,
        c_b,
        sigma: 0.0,
    };
    TwoGoodScenario {
        good1: good(1.0, 7.0),
        good2: good(5.0, 2.0),
        prices1: PriceSet {
            x_a: 1.0,
            x_b: 3.0,
            y: 2.0,
        },
        prices2: PriceSet {
            x_a: 5.0,
            x_b: 2.0,
            y: 4.0,
        },
        eta_a1,
        eta_b2: 2.0,
    }
}

fn opts(step: f64, horizon: f64) -> SolverOptions {
    SolverOptions {
        step,
        event_tol: 1e-10,
        horizon,
        depletion_policy: DepletionPolicy::Continue,
    }
}

#[test]
fn combined_money_grows_at_the_two_good_rates() {
    let sigma1 = 2.0;
    let s = two_good_at(2.5);
    let (dm_a, dm_b, prod) = two_good_money_rates(&s, sigma1);
    assert!(dm_a >= 0.0 && dm_b >= 0.0);

    let sigma2 = balanced_sigma2(sigma1, s.eta_a1, s.eta_b2, s.prices1.y, s.prices2.y).unwrap();
    let good1 = GoodEconomy {
        p_a: prod.p_a1,
        p_b: prod.p_b1,
        sigma: sigma1,
        ..s.good1
    };
    let good2 = GoodEconomy {
        p_a: prod.p_a2,
        p_b: prod.p_b2,
        sigma: sigma2,
        ..s.good2
    };
    let start1 = NormalizedState {
        eta_a: s.eta_a1,
        eta_b: 0.5,
    };
    let start2 = NormalizedState {
        eta_a: 0.5,
        eta_b: s.eta_b2,
    };
    let track = |prices| MoneyTracking {
        prices,
        initial: MoneyState::default(),
    };
    let horizon = 20.0;
    let ts1 = integrate_with_events(start1, &good1, Some(&track(s.prices1)), &opts(1e-2, horizon)).unwrap();
    let ts2 = integrate_with_events(start2, &good2, Some(&track(s.prices2)), &opts(1e-2, horizon)).unwrap();
    assert!(ts1.events.is_empty() && ts2.events.is_empty());
    assert_eq!(ts1.times, ts2.times);

    let m1 = ts1.money.unwrap();
    let m2 = ts2.money.unwrap();
    let total: Vec<MoneyState> = m1
        .iter()
        .zip(&m2)
        .map(|(a, b)| MoneyState {
            m_a: a.m_a + b.m_a,
            m_b: a.m_b + b.m_b,
        })
        .collect();
    for (w, t) in total.windows(2).zip(ts1.times.windows(2)) {
        let dt = t[1] - t[0];
        assert!((w[1].m_a - w[0].m_a) / dt >= -1e-12);
        assert!((w[1].m_b - w[0].m_b) / dt >= -1e-12);
    }
    let last = total[total.len() - 1];
    assert!((last.m_a - dm_a * horizon).abs() < 1e-9, "{} vs {}", last.m_a, dm_a * horizon);
    assert!((last.m_b - dm_b * horizon).abs() < 1e-9, "{} vs {}", last.m_b, dm_b * horizon);
}

#[test]
fn analytic_and_numeric_money_agree() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let econ = GoodEconomy {
            p_a: r.random_range(0.0..5.0),
            p_b: r.random_range(0.0..5.0),
            c_a: r.random_range(0.0..5.0),
            c_b: r.random_range(0.0..5.0),
            sigma: r.random_range(0.0..5.0),
        };
        let s0 = NormalizedState {
            eta_a: r.random_range(0.0..3.0),
            eta_b: r.random_range(0.0..3.0),
        };
        let prices = PriceSet {
            x_a: r.random_range(0.0..3.0),
            x_b: r.random_range(0.0..3.0),
            y: r.random_range(0.0..3.0),
        };
        let initial = MoneyState { m_a: 2.0, m_b: -1.0 };
        let tracking = MoneyTracking { prices, initial };
        let ts = integrate_with_events(s0, &econ, Some(&tracking), &opts(1e-3, 10.0)).unwrap();
        let traj = simulate_analytic(s0, &econ, 10.0, 1e-10).unwrap();
        for (&t, m) in ts.times.iter().zip(ts.money.as_ref().unwrap()) {
            let exact = traj.money_at(&prices, initial, t);
            assert!((m.m_a - exact.m_a).abs() < 1e-7, "t={t}: {m:?} vs {exact:?}");
            assert!((m.m_b - exact.m_b).abs() < 1e-7, "t={t}: {m:?} vs {exact:?}");
        }
    }
}
