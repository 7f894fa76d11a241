//! Criterion benchmarks for the fixcount workspace live in `benches/`.
