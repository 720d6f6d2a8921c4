//! Criterion benchmarks for `galilei-core`; see `benches/`.
