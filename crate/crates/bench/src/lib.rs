//! Benchmark harness for `bellhide-core`; see `benches/`.
