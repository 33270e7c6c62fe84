//! Criterion benchmarks for the trade flow model live in `benches/`.
