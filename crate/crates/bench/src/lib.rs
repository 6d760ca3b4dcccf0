//! Criterion benchmarks for the accounting hot paths live in `benches/`.
