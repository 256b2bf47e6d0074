//! Benchmarks for `l1curve-core`; see `benches/`.
