use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tradeflow_core::{
    integrate_with_events, scan_region, simulate_analytic, DepletionPolicy, GoodEconomy, GridSpec,
    NormalizedState, PriceSet, SolverOptions, TwoGoodScenario,
};

fn two_good() -> TwoGoodScenario {
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
        eta_a1: 2.5,
        eta_b2: 2.0,
    }
}

/// Starts below threshold, crosses into A-exports and then into bilateral exchange.
fn crossing() -> (GoodEconomy, NormalizedState) {
    (
        GoodEconomy {
            p_a: 1.0,
            p_b: 0.6,
            c_a: 0.2,
            c_b: 0.3,
            sigma: 1.5,
        },
        NormalizedState {
            eta_a: 0.5,
            eta_b: 0.4,
        },
    )
}

fn region(c: &mut Criterion) {
    let s = two_good();
    let mut group = c.benchmark_group("scan_region");
    for n in [50, 200] {
        let grid = GridSpec::standard(n, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &grid, |b, grid| {
            b.iter(|| scan_region(black_box(&s), grid).unwrap())
        });
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let (econ, s0) = crossing();
    c.bench_function("simulate_analytic/horizon_10", |b| {
        b.iter(|| simulate_analytic(black_box(s0), &econ, 10.0, 1e-10).unwrap())
    });
    let opts = SolverOptions {
        step: 1e-3,
        event_tol: 1e-10,
        horizon: 10.0,
        depletion_policy: DepletionPolicy::Continue,
    };
    c.bench_function("integrate_with_events/step_1e-3", |b| {
        b.iter(|| integrate_with_events(black_box(s0), &econ, None, &opts).unwrap())
    });
}

criterion_group!(benches, region, trajectories);
criterion_main!(benches);
