//! Benchmark-only crate: see `benches/pipeline.rs`. The library target
//! exists so the benchmarks have a crate to live in.
