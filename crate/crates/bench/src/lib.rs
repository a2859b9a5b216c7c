//! Criterion benchmarks for riskscale; see `benches/`.
