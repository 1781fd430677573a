//! Benchmark harness for `kirchhoff-core`; see `benches/`.
