//! Criterion benchmarks for the co-existence kernels live in `benches/`.
