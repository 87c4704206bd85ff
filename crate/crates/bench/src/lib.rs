//! Criterion benchmarks for the qkneser oracles and sweeps; see `benches/`.
