//! Criterion benchmarks for `alrep-core`; see `benches/`.
