//! The keyed Pauli-mask cipher `E(ρ) = ⟨i, X^a Z^b ρ Z^b X^a⟩` with
//! `a || b = h_i(k)`, its exact key-averaged channel, and the
//! indistinguishability and purity metrics over that channel.
//!
//! The classical index register is kept structural: a channel output is one
//! key-averaged block `ρ_i` per index, and the joint state is
//! `|I|^{-1} Σ_i |i⟩⟨i| ⊗ ρ_i`.

use rayon::prelude::*;

use crate::hashfam::{KeySpec, PermutationFamily};
use crate::pauli::{conjugate, conjugate_into, inverse_conjugate, PauliMask};
use crate::qmatrix::{purity, trace_distance, ComplexMatrix, DensityOperator};
use crate::{Error, Result};

/// Largest message size the exact channel supports.
pub const MAX_QUBITS: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CipherParams {
    n: u32,
    family: PermutationFamily,
    keys: KeySpec,
}

impl CipherParams {
    pub fn new(n: u32, family: PermutationFamily, keys: KeySpec) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::BadParameters(format!(
                "message size {n} outside 1..={MAX_QUBITS} qubits"
            )));
        }
        if family.width() != 2 * n || keys.width() != 2 * n {
            return Err(Error::BadParameters(format!(
                "family and key widths must be 2n = {}",
                2 * n
            )));
        }
        Ok(Self { n, family, keys })
    }

    /// Standard `GF(2^{2n})` family with `t_k`-bit keys.
    pub fn standard(n: u32, t_k: u32) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::BadParameters(format!(
                "message size {n} outside 1..={MAX_QUBITS} qubits"
            )));
        }
        Self::new(n, PermutationFamily::standard(2 * n)?, KeySpec::new(t_k, 2 * n)?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn family(&self) -> &PermutationFamily {
        &self.family
    }

    pub fn keys(&self) -> &KeySpec {
        &self.keys
    }

    pub fn key_bits(&self) -> u32 {
        self.keys.bits()
    }

    pub fn index_count(&self) -> usize {
        self.family.index_count() as usize
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> {
        self.family.indices()
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Mask `X^a Z^b` with `a || b = h_i(embed(key))`.
    pub fn mask(&self, key: u32, index: u32) -> Result<PauliMask> {
        let embedded = self.keys.embed(key)?;
        let ab = self.family.apply(index, embedded).map_err(|e| match e {
            Error::ZeroIndex | Error::BadIndex(_) => Error::BadIndex(index),
            other => other,
        })?;
        PauliMask::from_concatenated(self.n, ab)
    }

    fn check_state(&self, state: &DensityOperator) -> Result<()> {
        if state.n_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.dim(),
            });
        }
        Ok(())
    }
}

/// `(t, ε)` together with the key length used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecurityParams {
    pub t: u32,
    pub epsilon: f64,
    pub t_k: u32,
}

impl SecurityParams {
    pub fn new(n: u32, t: u32, epsilon: f64, t_k: u32) -> Result<Self> {
        if t > n || !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::BadParameters(format!(
                "need 0 <= t <= n and 0 < epsilon <= 1 (t = {t}, epsilon = {epsilon})"
            )));
        }
        Ok(Self { t, epsilon, t_k })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub index: u32,
    pub payload: DensityOperator,
}

pub fn encrypt(
    state: &DensityOperator,
    key: u32,
    index: u32,
    params: &CipherParams,
) -> Result<Ciphertext> {
    params.check_state(state)?;
    let mask = params.mask(key, index)?;
    Ok(Ciphertext {
        index,
        payload: conjugate(state, &mask)?,
    })
}

pub fn decrypt(ct: &Ciphertext, key: u32, params: &CipherParams) -> Result<DensityOperator> {
    params.check_state(&ct.payload)?;
    let mask = params.mask(key, ct.index)?;
    inverse_conjugate(&ct.payload, &mask)
}

/// Key-averaged blocks `ρ_i`, one per family index (block `j` holds index
/// `j + 1`).
#[derive(Clone, Debug)]
pub struct ChannelOutput {
    params: CipherParams,
    blocks: Vec<DensityOperator>,
}

impl ChannelOutput {
    pub(crate) fn from_blocks(params: CipherParams, blocks: Vec<DensityOperator>) -> Self {
        Self { params, blocks }
    }

    pub fn params(&self) -> &CipherParams {
        &self.params
    }

    pub fn blocks(&self) -> &[DensityOperator] {
        &self.blocks
    }

    pub fn block(&self, index: u32) -> Result<&DensityOperator> {
        self.params.family.check_index(index)?;
        Ok(&self.blocks[index as usize - 1])
    }

    /// Dense `|I|^{-1} Σ_i |i⟩⟨i| ⊗ ρ_i`, padded with a zero block to a
    /// power-of-two dimension. Test oracle for small instances only.
    pub fn joint_matrix(&self) -> ComplexMatrix {
        let d = self.params.dim();
        let count = self.blocks.len();
        let size = (count * d).next_power_of_two();
        let mut m = ComplexMatrix::zeros(size);
        let w = 1.0 / count as f64;
        for (j, block) in self.blocks.iter().enumerate() {
            for r in 0..d {
                for c in 0..d {
                    m[(j * d + r, j * d + c)] = block.matrix()[(r, c)] * w;
                }
            }
        }
        m
    }
}

/// `ρ_i = |K|^{-1} Σ_k X^a Z^b ρ Z^b X^a` with `a || b = h_i(k)`, summed in
/// ascending key order.
pub fn channel_block(state: &DensityOperator, params: &CipherParams, index: u32) -> Result<DensityOperator> {
    params.check_state(state)?;
    params.family.check_index(index)?;
    Ok(block_unchecked(state, params, index))
}

fn block_unchecked(state: &DensityOperator, params: &CipherParams, index: u32) -> DensityOperator {
    let mut acc = ComplexMatrix::zeros(params.dim());
    for key in params.keys.keys() {
        let ab = params.family.apply_unchecked(index, key);
        let mask = PauliMask::from_concatenated(params.n, ab).expect("2n-bit mask");
        conjugate_into(state.matrix(), &mask, |dst, v| *dst += v, &mut acc);
    }
    let scale = 1.0 / params.keys.count() as f64;
    for z in acc.entries_mut() {
        *z *= scale;
    }
    DensityOperator::from_matrix_unchecked(params.n, acc)
}

/// The exact average over all `(i, k)`; blocks are computed in parallel,
/// each with a fixed summation order.
pub fn avg_channel(state: &DensityOperator, params: &CipherParams) -> Result<ChannelOutput> {
    params.check_state(state)?;
    let indices: Vec<u32> = params.indices().collect();
    let blocks = indices
        .par_iter()
        .map(|&i| block_unchecked(state, params, i))
        .collect();
    Ok(ChannelOutput {
        params: *params,
        blocks,
    })
}

/// Same as [`avg_channel`] but single-threaded, for callers that already
/// parallelize over states.
pub fn avg_channel_serial(state: &DensityOperator, params: &CipherParams) -> Result<ChannelOutput> {
    params.check_state(state)?;
    let blocks = params
        .indices()
        .map(|i| block_unchecked(state, params, i))
        .collect();
    Ok(ChannelOutput {
        params: *params,
        blocks,
    })
}

/// Per-block trace distances from `I/2^n`, in index order.
pub fn block_distances(out: &ChannelOutput) -> Result<Vec<f64>> {
    let mixed = DensityOperator::maximally_mixed(out.params.n);
    out.blocks
        .iter()
        .map(|b| trace_distance(b, &mixed))
        .collect()
}

/// Trace distance of the joint state from the joint maximally mixed state,
/// `|I|^{-1} Σ_i ‖ρ_i − I/2^n‖_tr`.
pub fn indist_distance(out: &ChannelOutput) -> Result<f64> {
    let per_block = block_distances(out)?;
    Ok(per_block.iter().sum::<f64>() / per_block.len() as f64)
}

/// Trace distance between two channel outputs on the joint space.
pub fn joint_distance(lhs: &ChannelOutput, rhs: &ChannelOutput) -> Result<f64> {
    if lhs.params != rhs.params {
        return Err(Error::BadParameters("channel outputs use different parameters".into()));
    }
    let mut total = 0.0;
    for (a, b) in lhs.blocks.iter().zip(&rhs.blocks) {
        total += trace_distance(a, b)?;
    }
    Ok(total / lhs.blocks.len() as f64)
}

/// `Tr(E(ρ)²) = |I|^{-2} Σ_i Tr(ρ_i²)`.
pub fn joint_purity(out: &ChannelOutput) -> f64 {
    let count = out.blocks.len() as f64;
    out.blocks.iter().map(purity).sum::<f64>() / (count * count)
}

/// `|I|^{-1} (Tr(ρ²)/|K| + 2^{-n})`, the upper bound on [`joint_purity`].
pub fn purity_bound(state: &DensityOperator, params: &CipherParams) -> Result<f64> {
    params.check_state(state)?;
    let keys = params.keys.count() as f64;
    let mixed = 1.0 / params.dim() as f64;
    Ok((purity(state) / keys + mixed) / params.index_count() as f64)
}

/// `√max(0, D·Tr(E(ρ)²) − 1)` with `D = |I|·2^n`; upper-bounds the distance
/// from the joint maximally mixed state.
pub fn implied_epsilon(out: &ChannelOutput) -> f64 {
    let joint_dim = (out.blocks.len() * out.params.dim()) as f64;
    (joint_dim * joint_purity(out) - 1.0).max(0.0).sqrt()
}

/// `⌈n − t + 2·log₂(1/ε)⌉`, clamped to `[0, 2n]`.
pub fn key_length_required(n: u32, t: u32, epsilon: f64) -> Result<u32> {
    if t > n || !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::BadParameters(format!(
            "need 0 <= t <= n and 0 < epsilon <= 1 (n = {n}, t = {t}, epsilon = {epsilon})"
        )));
    }
    let raw = n as f64 - t as f64 + 2.0 * (1.0 / epsilon).log2();
    // absorb log2 round-off so exact powers of two do not round up
    let bits = (raw - 1e-9).ceil().max(0.0);
    Ok((bits as u32).min(2 * n))
}
