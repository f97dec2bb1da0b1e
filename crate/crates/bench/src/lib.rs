//! Criterion benchmarks for `ptsp-core`; see `benches/`.
