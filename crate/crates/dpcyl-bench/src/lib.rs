//! Benchmarks for the dpcyl pipeline live under `benches/`.
