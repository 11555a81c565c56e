//! Min-entropy sources: interpretations of density operators, flat-source
//! decompositions and seeded generators of `t`-sources.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qmatrix::{
    hermitian_eigen, ComplexMatrix, DensityOperator, ARITH_TOL, C64, VALIDATION_TOL,
};
use crate::{Error, Result};

/// Below this a residual coordinate is treated as exhausted.
const PEEL_EPS: f64 = 1e-15;

/// An ensemble `{(p_i, σ_i)}` with `Σ p_i σ_i = ρ`.
#[derive(Clone, Debug)]
pub struct Interpretation {
    parent: DensityOperator,
    components: Vec<(f64, DensityOperator)>,
}

impl Interpretation {
    pub fn new(parent: DensityOperator, components: Vec<(f64, DensityOperator)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInterpretation("no components".into()));
        }
        if let Some((p, _)) = components.iter().find(|(p, _)| p.is_nan() || *p <= 0.0) {
            return Err(Error::InvalidInterpretation(format!(
                "non-positive weight {p}"
            )));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > ARITH_TOL {
            return Err(Error::InvalidInterpretation(format!(
                "weights sum to {total}"
            )));
        }
        let mut mix = ComplexMatrix::zeros(parent.dim());
        for (p, sigma) in &components {
            if sigma.dim() != parent.dim() {
                return Err(Error::DimensionMismatch {
                    expected: parent.dim(),
                    actual: sigma.dim(),
                });
            }
            mix.add_scaled(*p, sigma.matrix())?;
        }
        let err = mix.max_abs_diff(parent.matrix())?;
        if err > VALIDATION_TOL {
            return Err(Error::InvalidInterpretation(format!(
                "mixture differs from parent by {err:e}"
            )));
        }
        Ok(Self { parent, components })
    }

    /// The ensemble `{(1, ρ)}`.
    pub fn trivial(parent: DensityOperator) -> Self {
        Self {
            components: vec![(1.0, parent.clone())],
            parent,
        }
    }

    /// Builds the parent as the mixture of the components.
    pub fn from_components(components: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let terms: Vec<(f64, &DensityOperator)> = components.iter().map(|(p, s)| (*p, s)).collect();
        let parent = DensityOperator::mixture(&terms)?;
        Self::new(parent, components)
    }

    pub fn parent(&self) -> &DensityOperator {
        &self.parent
    }

    pub fn components(&self) -> &[(f64, DensityOperator)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.components.iter().map(|(p, _)| *p)
    }
}

/// Uniform distribution over `2^t` basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSource {
    pub t: u32,
    /// Ascending basis indices.
    pub support: Vec<usize>,
}

impl FlatSource {
    pub fn new(t: u32, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        if support.len() != 1usize << t {
            return Err(Error::BadParameters(format!(
                "flat source of entropy {t} needs {} distinct points, got {}",
                1usize << t,
                support.len()
            )));
        }
        Ok(Self { t, support })
    }

    pub fn point_mass(&self) -> f64 {
        1.0 / self.support.len() as f64
    }
}

/// `Σ q_j · uniform(F_j)`, optionally relative to an orthonormal basis
/// (columns of `basis`); `None` means the computational basis.
#[derive(Clone, Debug)]
pub struct FlatDecomposition {
    pub t: u32,
    pub dim: usize,
    pub terms: Vec<(f64, FlatSource)>,
    pub basis: Option<ComplexMatrix>,
    /// Mass left unpeeled (numerical dust).
    pub residual: f64,
}

impl FlatDecomposition {
    /// The distribution `Σ q_j uniform(F_j)`, summed in term order.
    pub fn reconstruct_weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (q, flat) in &self.terms {
            let mass = q * flat.point_mass();
            for &s in &flat.support {
                out[s] += mass;
            }
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|(q, _)| q).sum()
    }

    /// Largest `|reconstructed - input|` against the given weights.
    pub fn residual_against(&self, weights: &[f64]) -> f64 {
        self.reconstruct_weights()
            .iter()
            .zip(weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The flat state `2^{-t} Σ_{s ∈ F_j} |v_s><v_s|` of term `j`.
    pub fn term_state(&self, j: usize) -> Result<DensityOperator> {
        let (_, flat) = self
            .terms
            .get(j)
            .ok_or_else(|| Error::BadParameters(format!("no term {j}")))?;
        self.flat_state(flat)
    }

    /// `Σ q_j (flat state)_j`.
    pub fn reconstruct_state(&self) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for (q, flat) in &self.terms {
            acc.add_scaled(*q, self.flat_state(flat)?.matrix())?;
        }
        Ok(acc)
    }

    fn flat_state(&self, flat: &FlatSource) -> Result<DensityOperator> {
        if !self.dim.is_power_of_two() {
            return Err(Error::BadParameters(format!(
                "dimension {} is not a qubit register",
                self.dim
            )));
        }
        let n = self.dim.trailing_zeros();
        let w = flat.point_mass();
        let m = match &self.basis {
            None => {
                let mut diag = vec![0.0; self.dim];
                for &s in &flat.support {
                    diag[s] = w;
                }
                ComplexMatrix::diagonal(&diag)
            }
            Some(basis) => {
                let mut m = ComplexMatrix::zeros(self.dim);
                for &s in &flat.support {
                    m.add_scaled(w, &ComplexMatrix::outer(&basis.column(s)))?;
                }
                m
            }
        };
        Ok(DensityOperator::from_matrix_unchecked(n, m))
    }
}

/// Writes `weights` (max weight ≤ `2^{-t}`) as a convex combination of flat
/// distributions on `2^t` points by repeatedly peeling the top `2^t`
/// coordinates.
///
/// Each peel removes `w/2^t` from each of the current top `2^t` coordinates,
/// with `w` the largest amount that keeps the residual admissible, so every
/// step zeroes a coordinate or saturates another.
pub fn decompose_flat(weights: &[f64], t: u32) -> Result<FlatDecomposition> {
    let k = 1usize
        .checked_shl(t)
        .filter(|_| t < 63)
        .ok_or_else(|| Error::BadParameters(format!("entropy {t} too large")))?;
    let n = weights.len();
    if n < k {
        return Err(Error::BadParameters(format!(
            "{n} points cannot hold a flat source on {k} points"
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -ARITH_TOL) {
        return Err(Error::BadParameters(format!("invalid weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > ARITH_TOL {
        return Err(Error::MassNotNormalized(total));
    }
    let max_weight = weights.iter().copied().fold(0.0, f64::max);
    let cap = 1.0 / k as f64;
    if max_weight > cap + ARITH_TOL {
        return Err(Error::EntropyTooLow { max_weight, t });
    }

    let mut residual: Vec<f64> = weights.iter().map(|&w| w.max(0.0)).collect();
    let mut terms = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let max_steps = n * k + n + 8;
    for _ in 0..max_steps {
        let mass: f64 = residual.iter().sum();
        if mass <= PEEL_EPS {
            break;
        }
        order.sort_by(|&i, &j| residual[j].total_cmp(&residual[i]).then(i.cmp(&j)));
        let kth = residual[order[k - 1]];
        let next = if n > k { residual[order[k]] } else { 0.0 };
        let per_point = ((mass - k as f64 * next) / k as f64).min(kth);
        if per_point <= PEEL_EPS {
            break;
        }
        let mut support = order[..k].to_vec();
        for &s in &support {
            residual[s] = (residual[s] - per_point).max(0.0);
        }
        support.sort_unstable();
        terms.push((per_point * k as f64, FlatSource { t, support }));
    }
    let residual_mass = residual.iter().sum();
    Ok(FlatDecomposition {
        t,
        dim: n,
        terms,
        basis: None,
        residual: residual_mass,
    })
}

/// Flat decomposition of `ρ` in its own eigenbasis.
pub fn decompose_state(rho: &DensityOperator, t: u32) -> Result<FlatDecomposition> {
    let spectrum = hermitian_eigen(rho.matrix())?;
    let top = spectrum.eigenvalues[0];
    if t >= 63 || top > (-(t as f64)).exp2() + ARITH_TOL {
        return Err(Error::EntropyTooLow { max_weight: top, t });
    }
    let weights: Vec<f64> = spectrum.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut decomposition = decompose_flat(&weights, t)?;
    decomposition.basis = Some(spectrum.eigenvectors);
    Ok(decomposition)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentBoundReport {
    /// `max_i p_i · λ_max(σ_i)`.
    pub worst: f64,
    /// `2^{-t}`.
    pub bound: f64,
    pub pass: bool,
}

/// Checks `p_i · λ_max(σ_i) ≤ 2^{-t}` over all components.
pub fn check_component_bound(interp: &Interpretation, t: u32) -> Result<ComponentBoundReport> {
    let mut worst = 0.0f64;
    for (p, sigma) in interp.components() {
        worst = worst.max(p * sigma.max_eigenvalue()?);
    }
    let bound = (-(t as f64)).exp2();
    Ok(ComponentBoundReport {
        worst,
        bound,
        pass: worst <= bound + ARITH_TOL,
    })
}

/// How [`random_t_source`] draws a state of min-entropy at least `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Uniform on a random set of `2^t` computational basis states.
    FlatRandomSupport,
    /// Random diagonal spectrum capped at `2^{-t}`.
    RandomDiagonal,
    /// Random capped spectrum in a Haar-random basis.
    RandomUnitaryConjugated,
    /// At least one eigenvalue exactly `2^{-t}`, random basis.
    AdversarialNearThreshold,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::FlatRandomSupport,
        GeneratorKind::RandomDiagonal,
        GeneratorKind::RandomUnitaryConjugated,
        GeneratorKind::AdversarialNearThreshold,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorKind::FlatRandomSupport => "flat-random-support",
            GeneratorKind::RandomDiagonal => "random-diagonal",
            GeneratorKind::RandomUnitaryConjugated => "random-unitary-conjugated",
            GeneratorKind::AdversarialNearThreshold => "adversarial-near-threshold",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "flat-random-support" | "flat" => Ok(GeneratorKind::FlatRandomSupport),
            "random-diagonal" | "diagonal" => Ok(GeneratorKind::RandomDiagonal),
            "random-unitary-conjugated" | "unitary" => Ok(GeneratorKind::RandomUnitaryConjugated),
            "adversarial-near-threshold" | "near-threshold" => {
                Ok(GeneratorKind::AdversarialNearThreshold)
            }
            other => Err(Error::Parse(format!("unknown generator kind {other:?}"))),
        }
    }
}

/// Seeded `t`-source on `n` qubits; the stream is ChaCha8 keyed by `seed`.
pub fn random_t_source(n: u32, t: u32, kind: GeneratorKind, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_t_source_with(n, t, kind, &mut rng)
}

pub fn random_t_source_with<R: Rng + ?Sized>(
    n: u32,
    t: u32,
    kind: GeneratorKind,
    rng: &mut R,
) -> Result<DensityOperator> {
    if n > 10 || t > n {
        return Err(Error::BadParameters(format!(
            "need 0 <= t <= n <= 10, got n = {n}, t = {t}"
        )));
    }
    let d = 1usize << n;
    let k = 1usize << t;
    let cap = 1.0 / k as f64;
    match kind {
        GeneratorKind::FlatRandomSupport => {
            let mut diag = vec![0.0; d];
            for s in sample(rng, d, k).iter() {
                diag[s] = cap;
            }
            Ok(DensityOperator::from_matrix_unchecked(n, ComplexMatrix::diagonal(&diag)))
        }
        GeneratorKind::RandomDiagonal => {
            let diag = capped_distribution(d, 1.0, cap, rng);
            Ok(DensityOperator::from_matrix_unchecked(n, ComplexMatrix::diagonal(&diag)))
        }
        GeneratorKind::RandomUnitaryConjugated => {
            let spectrum = capped_distribution(d, 1.0, cap, rng);
            Ok(rotate_spectrum(n, &spectrum, rng))
        }
        GeneratorKind::AdversarialNearThreshold => {
            let saturated = rng.gen_range(1..=k);
            let rest_mass = (1.0 - saturated as f64 * cap).max(0.0);
            let mut spectrum = vec![cap; saturated];
            if d > saturated {
                spectrum.extend(capped_distribution(d - saturated, rest_mass, cap, rng));
            }
            Ok(rotate_spectrum(n, &spectrum, rng))
        }
    }
}

/// Random weights summing to `mass`, each at most `cap` (needs `mass ≤ len·cap`).
fn capped_distribution<R: Rng + ?Sized>(len: usize, mass: f64, cap: f64, rng: &mut R) -> Vec<f64> {
    if mass <= 0.0 {
        return vec![0.0; len];
    }
    let sharpness: f64 = rng.gen_range(1.0..4.0);
    let raw: Vec<f64> = (0..len)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            (-u.ln()).powf(sharpness)
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| mass * x / sum).collect();
    let top = w.iter().copied().fold(0.0, f64::max);
    let mean = mass / len as f64;
    let alpha = if top > cap && top > mean {
        ((top - cap) / (top - mean)).min(1.0)
    } else {
        0.0
    };
    w.iter()
        .map(|&x| if alpha >= 1.0 { mean } else { (1.0 - alpha) * x + alpha * mean })
        .collect()
}

fn rotate_spectrum<R: Rng + ?Sized>(n: u32, spectrum: &[f64], rng: &mut R) -> DensityOperator {
    let u = haar_unitary(spectrum.len(), rng);
    let m = u
        .matmul(&ComplexMatrix::diagonal(spectrum))
        .and_then(|m| m.matmul(&u.adjoint()))
        .expect("square matrices of equal size");
    DensityOperator::from_matrix_unchecked(n, hermitize(m))
}

pub(crate) fn hermitize(mut m: ComplexMatrix) -> ComplexMatrix {
    let d = m.dim();
    for r in 0..d {
        m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
        for c in (r + 1)..d {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
    }
    m
}

/// Haar-random unitary: Gram–Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..d).map(|_| random_vector(d, rng)).collect();
    for j in 0..d {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: C64 = done[i].iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, e) in rest[0].iter_mut().zip(&done[i]) {
                *x -= proj * e;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(d);
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            u[(r, c)] = *z;
        }
    }
    u
}

/// Complex Gaussian vector (unnormalized).
pub fn random_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    (0..d)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(n: u32, rng: &mut R) -> DensityOperator {
    DensityOperator::pure(&random_vector(1usize << n, rng)).expect("nonzero Gaussian vector")
}

/// A random ensemble of `pure_components` pure states, mixed with the
/// maximally mixed state (as basis states) just enough for the parent to
/// reach min-entropy `t`.
pub fn random_interpretation<R: Rng + ?Sized>(
    n: u32,
    t: u32,
    pure_components: usize,
    rng: &mut R,
) -> Result<Interpretation> {
    if t > n || pure_components == 0 {
        return Err(Error::BadParameters(format!(
            "need t <= n and at least one component (n = {n}, t = {t})"
        )));
    }
    let d = 1usize << n;
    let raw: Vec<f64> = (0..pure_components)
        .map(|_| -rng.gen_range(f64::MIN_POSITIVE..1.0f64).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    let states: Vec<DensityOperator> = (0..pure_components)
        .map(|_| random_pure_state(n, rng))
        .collect();
    let mut mix = ComplexMatrix::zeros(d);
    for (w, s) in raw.iter().zip(&states) {
        mix.add_scaled(w / sum, s.matrix())?;
    }
    let top = hermitian_eigen(&mix)?.eigenvalues[0];
    let cap = (-(t as f64)).exp2();
    let floor = 1.0 / d as f64;
    let alpha = if top > cap {
        ((top - cap) / (top - floor) + 1e-12).min(1.0)
    } else {
        0.0
    };
    let mut components: Vec<(f64, DensityOperator)> = Vec::new();
    if alpha < 1.0 {
        for (w, s) in raw.iter().zip(states) {
            components.push(((1.0 - alpha) * w / sum, s));
        }
    }
    if alpha > 0.0 {
        for j in 0..d {
            components.push((alpha / d as f64, DensityOperator::basis(n, j)?));
        }
    }
    Interpretation::from_components(components)
}

/// Parses a comma-separated list of decimal weights, e.g. `"0.5,0.25,0.25,0"`.
pub fn parse_weights(literal: &str) -> Result<Vec<f64>> {
    literal
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad weight {s:?}: {e}")))
        })
        .collect()
}
