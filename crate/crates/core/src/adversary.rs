//! Security games against the cipher: Helstrom distinguishers, exact
//! strong-security gaps, the Goldreich–Levin predicate reduction and the
//! witness states used to move between security notions.
//!
//! Adversaries are finite-outcome POVMs with integer labels. Since the
//! ciphertext index is classical, an [`Adversary`] holds one POVM per family
//! index; all game probabilities are exact traces against channel blocks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cipher::{avg_channel_serial, ChannelOutput, CipherParams};
use crate::pauli::{parity, BitString};
use crate::qmatrix::{
    hermitian_eigen, min_entropy, positive_part_projector, ComplexMatrix, DensityOperator, C64,
    VALIDATION_TOL,
};
use crate::sources::{haar_unitary, hermitize, random_vector, Interpretation};
use crate::{Error, Result};

/// Widest function output the exhaustive reduction accepts.
pub const MAX_OUTPUT_WIDTH: u32 = 8;

/// Two-outcome POVM `{A₀, I − A₀}`.
#[derive(Clone, Debug)]
pub struct BinaryPovm {
    element0: ComplexMatrix,
    element1: ComplexMatrix,
}

impl BinaryPovm {
    /// Requires `0 ≤ A₀ ≤ I`.
    pub fn new(element0: ComplexMatrix) -> Result<Self> {
        let spectrum = hermitian_eigen(&element0)?;
        let (hi, lo) = (spectrum.eigenvalues[0], *spectrum.eigenvalues.last().unwrap());
        if lo < -VALIDATION_TOL || hi > 1.0 + VALIDATION_TOL {
            return Err(Error::BadParameters(format!(
                "POVM element spectrum [{lo}, {hi}] not within [0, 1]"
            )));
        }
        let element1 = ComplexMatrix::identity(element0.dim()).sub(&element0)?;
        Ok(Self { element0, element1 })
    }

    /// Guess 0 with probability `p` regardless of the state.
    pub fn trivial(dim: usize, p: f64) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale(p))
    }

    pub fn element0(&self) -> &ComplexMatrix {
        &self.element0
    }

    pub fn element1(&self) -> &ComplexMatrix {
        &self.element1
    }

    pub fn dim(&self) -> usize {
        self.element0.dim()
    }

    fn check(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        Ok(())
    }
}

/// Projector onto the non-negative eigenspace of `ρ₀ − ρ₁` (outcome 0).
pub fn helstrom_povm(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<BinaryPovm> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            actual: rho1.dim(),
        });
    }
    let diff = rho0.matrix().sub(rho1.matrix())?;
    let projector = positive_part_projector(&diff)?;
    let element1 = ComplexMatrix::identity(diff.dim()).sub(&projector)?;
    Ok(BinaryPovm {
        element0: projector,
        element1,
    })
}

/// `½ Tr(A₀ρ₀) + ½ Tr(A₁ρ₁)`.
pub fn exact_win_probability(
    povm: &BinaryPovm,
    rho0: &DensityOperator,
    rho1: &DensityOperator,
) -> Result<f64> {
    povm.check(rho0)?;
    povm.check(rho1)?;
    let p0 = povm.element0.trace_product(rho0.matrix())?.re;
    let p1 = povm.element1.trace_product(rho1.matrix())?.re;
    Ok(0.5 * p0 + 0.5 * p1)
}

/// Plays the guessing game `trials` times: a fair bit picks the state, the
/// POVM outcome is drawn from the Born distribution, and the guess wins if
/// it equals the bit.
pub fn simulate_guessing_game(
    povm: &BinaryPovm,
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::BadParameters("need at least one trial".into()));
    }
    povm.check(rho0)?;
    povm.check(rho1)?;
    let correct0 = povm.element0.trace_product(rho0.matrix())?.re.clamp(0.0, 1.0);
    let correct1 = povm.element1.trace_product(rho1.matrix())?.re.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0u64;
    for _ in 0..trials {
        let correct = if rng.gen::<bool>() { correct1 } else { correct0 };
        if rng.gen::<f64>() < correct {
            wins += 1;
        }
    }
    Ok(wins as f64 / trials as f64)
}

/// POVM whose outcomes carry integer labels; several elements may share a label.
#[derive(Clone, Debug)]
pub struct LabeledPovm {
    outcomes: Vec<(u32, ComplexMatrix)>,
}

impl LabeledPovm {
    /// Requires PSD elements summing to the identity.
    pub fn new(outcomes: Vec<(u32, ComplexMatrix)>) -> Result<Self> {
        let dim = outcomes
            .first()
            .map(|(_, m)| m.dim())
            .ok_or_else(|| Error::BadParameters("POVM without outcomes".into()))?;
        let mut total = ComplexMatrix::zeros(dim);
        for (_, m) in &outcomes {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: m.dim(),
                });
            }
            let lo = *hermitian_eigen(m)?.eigenvalues.last().unwrap();
            if lo < -VALIDATION_TOL {
                return Err(Error::BadParameters(format!(
                    "POVM element has eigenvalue {lo:e}"
                )));
            }
            total.add_scaled(1.0, m)?;
        }
        let err = total.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if err > VALIDATION_TOL {
            return Err(Error::BadParameters(format!(
                "POVM elements sum to identity only within {err:e}"
            )));
        }
        Ok(Self { outcomes })
    }

    pub fn from_binary(povm: &BinaryPovm) -> Self {
        Self {
            outcomes: vec![(0, povm.element0.clone()), (1, povm.element1.clone())],
        }
    }

    pub fn outcomes(&self) -> &[(u32, ComplexMatrix)] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.dim()
    }

    pub fn labels(&self) -> BTreeSet<u32> {
        self.outcomes.iter().map(|(l, _)| *l).collect()
    }

    /// `Pr[label | ρ]`.
    pub fn label_probability(&self, rho: &DensityOperator, label: u32) -> Result<f64> {
        let mut p = 0.0;
        for (l, m) in &self.outcomes {
            if *l == label {
                p += m.trace_product(rho.matrix())?.re;
            }
        }
        Ok(p)
    }

    /// Post-processes labels through `g`, merging elements that collide.
    pub fn relabel(&self, g: impl Fn(u32) -> u32) -> Self {
        let mut merged: Vec<(u32, ComplexMatrix)> = Vec::new();
        for (l, m) in &self.outcomes {
            let nl = g(*l);
            match merged.iter_mut().find(|(x, _)| *x == nl) {
                Some((_, acc)) => acc.add_scaled(1.0, m).expect("equal dimensions"),
                None => merged.push((nl, m.clone())),
            }
        }
        Self { outcomes: merged }
    }
}

/// One labeled POVM per family index, applied to the matching block.
#[derive(Clone, Debug)]
pub struct Adversary {
    per_index: Vec<LabeledPovm>,
}

impl Adversary {
    pub fn per_index(per_index: Vec<LabeledPovm>) -> Result<Self> {
        if per_index.is_empty() {
            return Err(Error::BadParameters("adversary without measurements".into()));
        }
        Ok(Self { per_index })
    }

    /// The same measurement for every index (ignores the index register).
    pub fn uniform(povm: LabeledPovm, index_count: usize) -> Self {
        Self {
            per_index: vec![povm; index_count],
        }
    }

    /// Per index, the Helstrom measurement between the blocks of two outputs.
    pub fn helstrom(out0: &ChannelOutput, out1: &ChannelOutput) -> Result<Self> {
        let per_index = out0
            .blocks()
            .iter()
            .zip(out1.blocks())
            .map(|(b0, b1)| helstrom_povm(b0, b1).map(|p| LabeledPovm::from_binary(&p)))
            .collect::<Result<Vec<_>>>()?;
        Self::per_index(per_index)
    }

    /// Measures each block in the orthonormal `basis` (columns) and outputs
    /// the maximum-likelihood value of `f` given the outcome, ties to the
    /// smallest value.
    pub fn basis_ml(game: &GameInstance, f: &FunctionTable, basis: &ComplexMatrix) -> Result<Self> {
        f.check_total(game.weights.len())?;
        let d = basis.dim();
        let values: BTreeSet<u32> = f.outputs.iter().copied().collect();
        let projectors: Vec<ComplexMatrix> =
            (0..d).map(|x| ComplexMatrix::outer(&basis.column(x))).collect();
        let mut per_index = Vec::with_capacity(game.parent.blocks().len());
        for block in 0..game.parent.blocks().len() {
            let mut elements: Vec<(u32, ComplexMatrix)> =
                values.iter().map(|&z| (z, ComplexMatrix::zeros(d))).collect();
            for proj in &projectors {
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (slot, &z) in values.iter().enumerate() {
                    let mut score = 0.0;
                    for (j, out) in game.components.iter().enumerate() {
                        if f.outputs[j] == z {
                            score += game.weights[j]
                                * proj.trace_product(out.blocks()[block].matrix())?.re;
                        }
                    }
                    if score > best.0 + 1e-15 {
                        best = (score, slot);
                    }
                }
                elements[best.1].1.add_scaled(1.0, proj)?;
            }
            per_index.push(LabeledPovm { outcomes: elements });
        }
        Self::per_index(per_index)
    }

    pub fn index_count(&self) -> usize {
        self.per_index.len()
    }

    pub fn povm(&self, block: usize) -> &LabeledPovm {
        &self.per_index[block]
    }

    pub fn labels(&self) -> BTreeSet<u32> {
        self.per_index.iter().flat_map(|p| p.labels()).collect()
    }

    /// `Pr[A(E(ρ)) = label] = |I|^{-1} Σ_i Pr[label | ρ_i]`.
    pub fn label_probability(&self, out: &ChannelOutput, label: u32) -> Result<f64> {
        self.check(out)?;
        let mut p = 0.0;
        for (povm, block) in self.per_index.iter().zip(out.blocks()) {
            p += povm.label_probability(block, label)?;
        }
        Ok(p / self.per_index.len() as f64)
    }

    /// The predicate adversary `r ⊙ A(·)`.
    pub fn reduce(&self, r: u32) -> Self {
        Self {
            per_index: self
                .per_index
                .iter()
                .map(|p| p.relabel(|l| parity((r & l) as u64) as u32))
                .collect(),
        }
    }

    fn check(&self, out: &ChannelOutput) -> Result<()> {
        if out.blocks().len() != self.per_index.len() {
            return Err(Error::DimensionMismatch {
                expected: self.per_index.len(),
                actual: out.blocks().len(),
            });
        }
        if out.params().dim() != self.per_index[0].dim() {
            return Err(Error::DimensionMismatch {
                expected: self.per_index[0].dim(),
                actual: out.params().dim(),
            });
        }
        Ok(())
    }
}

/// `f(σ_i)` for each interpretation component `i`, as a `width`-bit value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    outputs: Vec<u32>,
    width: u32,
}

impl FunctionTable {
    pub fn new(outputs: Vec<u32>, width: u32) -> Result<Self> {
        if width == 0 || width > MAX_OUTPUT_WIDTH {
            return Err(Error::BadParameters(format!(
                "output width {width} outside 1..={MAX_OUTPUT_WIDTH}"
            )));
        }
        if let Some(v) = outputs.iter().find(|&&v| v >> width != 0) {
            return Err(Error::BadParameters(format!(
                "value {v} does not fit in {width} bits"
            )));
        }
        Ok(Self { outputs, width })
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// `h_r(i) = r ⊙ f(i)`.
    pub fn predicate(&self, r: u32) -> Self {
        Self {
            outputs: self
                .outputs
                .iter()
                .map(|&v| parity((r & v) as u64) as u32)
                .collect(),
            width: 1,
        }
    }

    fn check_total(&self, components: usize) -> Result<()> {
        if self.outputs.len() != components {
            return Err(Error::BadParameters(format!(
                "function table has {} entries for {components} components",
                self.outputs.len()
            )));
        }
        Ok(())
    }
}

/// The two probabilities of the strong-security game and their gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameResult {
    /// `Σ_i p_i Pr[A(E(σ_i)) = f(σ_i)]`.
    pub p_real: f64,
    /// `Σ_i p_i Pr[A(E(ρ)) = f(σ_i)]`.
    pub p_ideal: f64,
    pub gap: f64,
}

/// Channel outputs of every interpretation component and of the parent,
/// computed once and reused across adversaries and functions.
#[derive(Clone, Debug)]
pub struct GameInstance {
    weights: Vec<f64>,
    components: Vec<ChannelOutput>,
    parent: ChannelOutput,
}

impl GameInstance {
    pub fn new(interp: &Interpretation, params: &CipherParams) -> Result<Self> {
        let mut states: Vec<&DensityOperator> = interp.components().iter().map(|(_, s)| s).collect();
        states.push(interp.parent());
        let mut outputs = states
            .par_iter()
            .map(|s| avg_channel_serial(s, params))
            .collect::<Result<Vec<_>>>()?;
        let parent = outputs.pop().expect("parent output");
        Ok(Self {
            weights: interp.weights().collect(),
            components: outputs,
            parent,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn component_outputs(&self) -> &[ChannelOutput] {
        &self.components
    }

    pub fn parent_output(&self) -> &ChannelOutput {
        &self.parent
    }

    pub fn params(&self) -> &CipherParams {
        self.parent.params()
    }

    /// Key-averaged output of the weighted sub-ensemble selected by `keep`,
    /// normalized; `None` if it carries no weight.
    pub fn conditional_output(&self, keep: impl Fn(usize) -> bool) -> Option<ChannelOutput> {
        let mass: f64 = (0..self.weights.len()).filter(|&j| keep(j)).map(|j| self.weights[j]).sum();
        if mass <= 0.0 {
            return None;
        }
        let mut blocks: Vec<ComplexMatrix> = self
            .parent
            .blocks()
            .iter()
            .map(|b| ComplexMatrix::zeros(b.dim()))
            .collect();
        for (j, out) in self.components.iter().enumerate() {
            if keep(j) {
                for (acc, b) in blocks.iter_mut().zip(out.blocks()) {
                    acc.add_scaled(self.weights[j] / mass, b.matrix()).expect("equal dims");
                }
            }
        }
        Some(ChannelOutput::from_blocks(
            *self.params(),
            blocks
                .into_iter()
                .map(|m| DensityOperator::from_matrix_unchecked(self.params().n(), m))
                .collect(),
        ))
    }

    /// Exact `(p_real, p_ideal, |p_real − p_ideal|)` for adversary `adv`
    /// predicting `f`.
    pub fn gap(&self, adv: &Adversary, f: &FunctionTable) -> Result<GameResult> {
        f.check_total(self.weights.len())?;
        let labels = adv.labels();
        if let Some(z) = f.outputs.iter().find(|z| !labels.contains(z)) {
            return Err(Error::LabelMismatch(format!(
                "value {z} is never output by the adversary"
            )));
        }
        let mut ideal_by_label = std::collections::BTreeMap::new();
        let mut p_real = 0.0;
        let mut p_ideal = 0.0;
        for (j, &z) in f.outputs.iter().enumerate() {
            let w = self.weights[j];
            p_real += w * adv.label_probability(&self.components[j], z)?;
            let q = match ideal_by_label.get(&z) {
                Some(&q) => q,
                None => {
                    let q = adv.label_probability(&self.parent, z)?;
                    ideal_by_label.insert(z, q);
                    q
                }
            };
            p_ideal += w * q;
        }
        Ok(GameResult {
            p_real,
            p_ideal,
            gap: (p_real - p_ideal).abs(),
        })
    }
}

/// Exact strong-security game for one adversary and function.
pub fn strong_security_gap(
    adv: &Adversary,
    f: &FunctionTable,
    interp: &Interpretation,
    params: &CipherParams,
) -> Result<GameResult> {
    GameInstance::new(interp, params)?.gap(adv, f)
}

/// `max_z Pr_i[f(σ_i) = z]`.
pub fn max_f(f: &FunctionTable, interp: &Interpretation) -> Result<f64> {
    f.check_total(interp.len())?;
    let mut mass = std::collections::BTreeMap::<u32, f64>::new();
    for (&z, p) in f.outputs.iter().zip(interp.weights()) {
        *mass.entry(z).or_default() += p;
    }
    Ok(mass.values().copied().fold(0.0, f64::max))
}

#[derive(Clone, Debug)]
pub struct GlReduction {
    /// The selected parity mask, `width` bits.
    pub r: BitString,
    /// `h_r = r ⊙ f`.
    pub predicate: FunctionTable,
    /// The game result of `r ⊙ A` predicting `h_r`.
    pub result: GameResult,
}

/// Exhaustive search over nonzero `r` for the predicate `r ⊙ f` on which the
/// reduced adversary `r ⊙ A` keeps at least half of an `epsilon` gap.
pub fn gl_reduce(
    adv: &Adversary,
    f: &FunctionTable,
    interp: &Interpretation,
    params: &CipherParams,
    epsilon: f64,
) -> Result<GlReduction> {
    gl_reduce_instance(&GameInstance::new(interp, params)?, adv, f, epsilon)
}

pub fn gl_reduce_instance(
    game: &GameInstance,
    adv: &Adversary,
    f: &FunctionTable,
    epsilon: f64,
) -> Result<GlReduction> {
    let required = epsilon / 2.0 - 1e-9;
    let mut best: Option<GlReduction> = None;
    for r in 1..(1u32 << f.width) {
        let predicate = f.predicate(r);
        let reduced = adv.reduce(r);
        let result = match game.gap(&reduced, &predicate) {
            Ok(res) => res,
            // the reduced adversary cannot output a value the predicate takes
            Err(Error::LabelMismatch(_)) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| result.gap > b.result.gap) {
            best = Some(GlReduction {
                r: BitString::new(f.width, r as u64)?,
                predicate,
                result,
            });
        }
    }
    match best {
        Some(b) if b.result.gap >= required => Ok(b),
        _ => Err(Error::NoWitness { required }),
    }
}

#[derive(Clone, Debug)]
pub struct PredicateSplitWitness {
    pub tau0: DensityOperator,
    pub tau1: DensityOperator,
    pub r0: f64,
    pub r1: f64,
    /// `r₀τ₀ + r₁·I/d`.
    pub tau0_prime: DensityOperator,
    /// `r₀ρ + r₁·I/d`.
    pub rho_prime: DensityOperator,
    pub min_entropy_tau0_prime: f64,
    pub min_entropy_rho_prime: f64,
    /// `H∞(τ₀′) ≥ t − 1` and `H∞(ρ′) ≥ t`, within 1e-9 bits.
    pub entropy_ok: bool,
}

/// Splits the interpretation by the predicate `h` into `τ₀`, `τ₁` and builds
/// the mixed-in states `τ₀′` and `ρ′`.
pub fn predicate_split_witness(interp: &Interpretation, h: &FunctionTable, t: u32) -> Result<PredicateSplitWitness> {
    h.check_total(interp.len())?;
    if h.width != 1 {
        return Err(Error::BadParameters("witness needs a one-bit predicate".into()));
    }
    let parent = interp.parent();
    let n = parent.n_qubits();
    let d = parent.dim();
    let mut parts = [ComplexMatrix::zeros(d), ComplexMatrix::zeros(d)];
    let mut mass = [0.0f64; 2];
    for ((p, sigma), &b) in interp.components().iter().zip(&h.outputs) {
        parts[b as usize].add_scaled(*p, sigma.matrix())?;
        mass[b as usize] += p;
    }
    if mass[0] <= 0.0 || mass[1] <= 0.0 {
        return Err(Error::ConstantPredicate);
    }
    let [part0, part1] = parts;
    let tau0 = DensityOperator::from_matrix_unchecked(n, part0.scale(1.0 / mass[0]));
    let tau1 = DensityOperator::from_matrix_unchecked(n, part1.scale(1.0 / mass[1]));
    let (r0, r1) = (mass[0], mass[1]);
    let mixed = DensityOperator::maximally_mixed(n);
    let tau0_prime = DensityOperator::mixture(&[(r0, &tau0), (r1, &mixed)])?;
    let rho_prime = DensityOperator::mixture(&[(r0, parent), (r1, &mixed)])?;
    let h_tau = min_entropy(&tau0_prime)?;
    let h_rho = min_entropy(&rho_prime)?;
    let entropy_ok = h_tau >= t as f64 - 1.0 - 1e-9 && h_rho >= t as f64 - 1e-9;
    Ok(PredicateSplitWitness {
        tau0,
        tau1,
        r0,
        r1,
        tau0_prime,
        rho_prime,
        min_entropy_tau0_prime: h_tau,
        min_entropy_rho_prime: h_rho,
        entropy_ok,
    })
}

pub fn computational_basis(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim)
}

/// Columns `|φ_x⟩ = d^{-1/2} Σ_y e^{2πi xy/d} |y⟩`.
pub fn fourier_basis(dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    let norm = 1.0 / (dim as f64).sqrt();
    for y in 0..dim {
        for x in 0..dim {
            let angle = 2.0 * std::f64::consts::PI * ((x * y) % dim) as f64 / dim as f64;
            m[(y, x)] = C64::from_polar(norm, angle);
        }
    }
    m
}

/// `A₀ = U diag(u) U†` with Haar `U` and `u` uniform in `[0, 1]`.
pub fn random_binary_povm<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> BinaryPovm {
    let u = haar_unitary(dim, rng);
    let diag: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    let a0 = u
        .matmul(&ComplexMatrix::diagonal(&diag))
        .and_then(|m| m.matmul(&u.adjoint()))
        .expect("square matrices");
    let element0 = hermitize(a0);
    let element1 = hermitize(ComplexMatrix::identity(dim).sub(&element0).expect("same dim"));
    BinaryPovm { element0, element1 }
}

/// `A_z = S^{-1/2} G_z S^{-1/2}` with random PSD `G_z` and `S = Σ G_z`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, labels: &[u32], rng: &mut R) -> Result<LabeledPovm> {
    if labels.is_empty() {
        return Err(Error::BadParameters("POVM without outcomes".into()));
    }
    let gs: Vec<ComplexMatrix> = labels
        .iter()
        .map(|_| {
            let mut g = ComplexMatrix::zeros(dim);
            for _ in 0..dim {
                g.add_scaled(1.0, &ComplexMatrix::outer(&random_vector(dim, rng)))
                    .expect("same dim");
            }
            g
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim);
    for g in &gs {
        total.add_scaled(1.0, g)?;
    }
    let inv_sqrt = hermitian_eigen(&total)?.reconstruct_with(|l| 1.0 / l.sqrt());
    let outcomes = labels
        .iter()
        .zip(&gs)
        .map(|(&l, g)| {
            let m = inv_sqrt.matmul(g)?.matmul(&inv_sqrt)?;
            Ok((l, hermitize(m)))
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledPovm::new(outcomes)
}
