//! Shared fixtures for the criterion benchmarks.

use eqcipher_core::sources::{random_t_source, GeneratorKind};
use eqcipher_core::{CipherParams, DensityOperator};

/// A seeded unitary-conjugated `t`-source and cipher parameters with a `t_k`-bit key.
pub fn channel_fixture(n: u32, t: u32, t_k: u32) -> (DensityOperator, CipherParams) {
    let state = random_t_source(n, t, GeneratorKind::RandomUnitaryConjugated, 0xB3AC)
        .expect("valid generator parameters");
    let params = CipherParams::standard(n, t_k).expect("valid cipher parameters");
    (state, params)
}
