//! Criterion benchmarks for the extraction and series kernels; see `benches/`.
