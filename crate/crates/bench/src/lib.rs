//! Criterion benchmarks for `tribell-core`; see `benches/`.
