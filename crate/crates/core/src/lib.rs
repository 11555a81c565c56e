//! Exact desk-scale simulation of a keyed Pauli-mask quantum cipher.
//!
//! The cipher encrypts an `n`-qubit state by conjugating it with the Pauli
//! mask `X^a Z^b`, where `a || b = h_i(k)` for a public random index `i` and
//! a secret key `k`, and `{h_i}` is a strongly XOR-universal permutation
//! family over `2n`-bit strings (multiplication in `GF(2^{2n})`).
//!
//! Everything here is computed exactly (no sampling) on small qubit counts:
//!
//! - [`qmatrix`]: Hermitian matrices, Jacobi eigensolver, trace distance,
//!   purity, min-entropy.
//! - [`pauli`]: Pauli masks and their conjugation action as index shuffles.
//! - [`hashfam`]: `GF(2^m)` arithmetic and the XOR-universal family verifier.
//! - [`sources`]: interpretations, flat-source decompositions, random
//!   min-entropy sources.
//! - [`cipher`]: encryption, the exact key-averaged channel and the
//!   indistinguishability / purity metrics.
//! - [`adversary`]: Helstrom distinguishers, security games, the
//!   Goldreich–Levin predicate reduction and witness states.
//! - [`sweep`]: deterministic parameter sweeps with CSV output.

pub mod adversary;
pub mod cipher;
mod error;
pub mod hashfam;
pub mod pauli;
pub mod qmatrix;
pub mod sources;
pub mod sweep;

pub use adversary::{Adversary, BinaryPovm, FunctionTable, GameResult, LabeledPovm};
pub use cipher::{ChannelOutput, CipherParams, Ciphertext, SecurityParams};
pub use error::{Error, Result};
pub use hashfam::{FieldGf2m, KeySpec, PermutationFamily};
pub use pauli::{BitString, PauliMask};
pub use qmatrix::{ComplexMatrix, DensityOperator, Spectrum, C64};
pub use sources::{FlatDecomposition, FlatSource, GeneratorKind, Interpretation};
pub use sweep::{SweepConfig, SweepRow};
