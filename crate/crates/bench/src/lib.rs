//! Criterion benchmarks for the `a2g-los` crate; see `benches/`.
