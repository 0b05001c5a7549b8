//! Criterion benchmarks for `cellplan-core`; see `benches/`.
