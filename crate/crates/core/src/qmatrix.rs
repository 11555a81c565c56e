//! Dense complex matrices, Hermitian eigendecomposition and the scalar
//! functionals of density operators (trace distance, purity, min-entropy).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for validating inputs (Hermiticity of arbitrary matrices,
/// reconstruction of ensembles).
pub const VALIDATION_TOL: f64 = 1e-10;
/// Tolerance for arithmetic identities on density operators.
pub const ARITH_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.entries[r * self.dim + c]
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m[(j, j)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (j, &v) in values.iter().enumerate() {
            m[(j, j)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|v><v|` (not normalized).
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = v[r] * v[c].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub(crate) fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|j| self[(j, j)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`, entrywise in ascending flat index.
    pub fn add_scaled(&mut self, s: f64, other: &Self) -> Result<()> {
        self.check_same_dim(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
        Ok(())
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                acc += self[(r, c)] * other[(c, r)];
            }
        }
        Ok(acc)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|M[x,y] - conj(M[y,x])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let mut out = Self::zeros(da * db);
        for r1 in 0..da {
            for c1 in 0..da {
                let a = self[(r1, c1)];
                for r2 in 0..db {
                    for c2 in 0..db {
                        out[(r1 * db + r2, c1 * db + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending; column `j` of `eigenvectors` belongs to
/// `eigenvalues[j]` and has its first non-negligible component real positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    /// `Σ λ_j v_j v_j†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|lambda| lambda)
    }

    /// `Σ g(λ_j) v_j v_j†`.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.eigenvectors.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = g(lambda);
            if w == 0.0 {
                continue;
            }
            for r in 0..d {
                let vr = self.eigenvectors[(r, j)] * w;
                for c in 0..d {
                    out[(r, c)] += vr * self.eigenvectors[(c, j)].conj();
                }
            }
        }
        out
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<Spectrum> {
    let defect = m.hermitian_defect();
    if defect > VALIDATION_TOL {
        return Err(Error::NonHermitian(defect));
    }
    let d = m.dim();
    let mut a = m.clone();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    for r in 0..d {
        a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
        for c in (r + 1)..d {
            let avg = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(d);
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    let mut converged = d <= 1;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = ComplexMatrix::zeros(d);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(a[(src, src)].re);
        let phase = (0..d)
            .map(|r| v[(r, src)])
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(C64::new(1.0, 0.0));
        for r in 0..d {
            eigenvectors[(r, col)] = v[(r, src)] * phase;
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p,q]` with the unitary `G = diag(1, e^{-iφ}) R(θ)` on the
/// (p, q) plane: `a <- G† a G`, `v <- v G`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let d = a.dim();
    // a <- a G (columns p, q)
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // a <- G† a (rows p, q)
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n_qubits: u32,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.dim())?;
        let defect = matrix.hermitian_defect();
        if defect > ARITH_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ARITH_TOL || tr.im.abs() > ARITH_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let spectrum = hermitian_eigen(&matrix)?;
        let smallest = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if smallest < -ARITH_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {smallest:e}"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Wraps a matrix known to be a density operator by construction
    /// (unitary conjugates and convex mixtures of valid states).
    pub(crate) fn from_matrix_unchecked(n_qubits: u32, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), 1usize << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: u32) -> Self {
        let d = 1usize << n_qubits;
        Self::from_matrix_unchecked(n_qubits, ComplexMatrix::diagonal(&vec![1.0 / d as f64; d]))
    }

    /// Computational basis state `|j><j|`.
    pub fn basis(n_qubits: u32, j: usize) -> Result<Self> {
        let d = 1usize << n_qubits;
        if j >= d {
            return Err(Error::BadParameters(format!(
                "basis index {j} out of range for {n_qubits} qubits"
            )));
        }
        let mut m = ComplexMatrix::zeros(d);
        m[(j, j)] = C64::new(1.0, 0.0);
        Ok(Self::from_matrix_unchecked(n_qubits, m))
    }

    /// `|ψ><ψ|` for the normalized `amplitudes`.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let v: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        Ok(Self::from_matrix_unchecked(n_qubits, ComplexMatrix::outer(&v)))
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let n_qubits = qubits_for_dim(weights.len())?;
        if weights.iter().any(|&w| w < -ARITH_TOL) {
            return Err(Error::InvalidDensity("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > ARITH_TOL {
            return Err(Error::MassNotNormalized(total));
        }
        Ok(Self::from_matrix_unchecked(n_qubits, ComplexMatrix::diagonal(weights)))
    }

    /// Convex mixture `Σ w_j ρ_j`; weights must be non-negative and sum to 1.
    pub fn mixture(terms: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::BadParameters("empty mixture".into()))?;
        let n = first.1.n_qubits;
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > ARITH_TOL || terms.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::MassNotNormalized(total));
        }
        let mut acc = ComplexMatrix::zeros(first.1.dim());
        for (w, rho) in terms {
            if rho.n_qubits != n {
                return Err(Error::DimensionMismatch {
                    expected: first.1.dim(),
                    actual: rho.dim(),
                });
            }
            acc.add_scaled(*w, &rho.matrix)?;
        }
        Ok(Self::from_matrix_unchecked(n, acc))
    }

    /// `U ρ U†` for a unitary `u` (unitarity is the caller's contract).
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self::from_matrix_unchecked(self.n_qubits, m))
    }

    #[inline]
    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eigen(&self.matrix)
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?.eigenvalues[0])
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

fn qubits_for_dim(dim: usize) -> Result<u32> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidDensity(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros())
}

/// `½ Σ |λ_j(ρ - σ)|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    rho.check_same_dim(sigma)?;
    let diff = rho.matrix.sub(&sigma.matrix)?;
    hermitian_trace_norm(&diff).map(|norm| 0.5 * norm)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn hermitian_trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// `Tr(ρ²)`, computed as the squared Frobenius norm.
pub fn purity(rho: &DensityOperator) -> f64 {
    rho.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
}

/// `-log₂ λ_max(ρ)` in bits.
pub fn min_entropy(rho: &DensityOperator) -> Result<f64> {
    let top = rho.max_eigenvalue()?;
    Ok(-top.log2())
}

pub fn maximally_mixed(n_qubits: u32) -> DensityOperator {
    DensityOperator::maximally_mixed(n_qubits)
}

/// Projector onto the eigenspace of non-negative eigenvalues of `m`.
pub fn positive_part_projector(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eigen(m)?;
    Ok(spectrum.reconstruct_with(|l| if l >= 0.0 { 1.0 } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d);
        for r in 0..d {
            m[(r, r)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for col in (r + 1)..d {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(r, col)] = z;
                m[(col, r)] = z.conj();
            }
        }
        m
    }

    fn plus() -> DensityOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::pure(&[c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn eigen_identity() {
        let s = hermitian_eigen(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn eigen_diagonal() {
        let s = hermitian_eigen(&ComplexMatrix::diagonal(&[0.25, 0.75])).unwrap();
        assert_eq!(s.eigenvalues, vec![0.75, 0.25]);
    }

    #[test]
    fn eigen_all_halves_matches_characteristic_polynomial() {
        // λ² - λ + (0.25 - 0.25) = 0  =>  λ ∈ {1, 0}
        let m = ComplexMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let s = hermitian_eigen(&m).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!(s.eigenvalues[1].abs() < 1e-14);
    }

    #[test]
    fn eigen_complex_2x2_closed_form() {
        // [[a, z], [z*, b]] has eigenvalues (a+b)/2 ± sqrt(((a-b)/2)² + |z|²).
        let (a, b, z) = (0.3, -0.7, c(0.2, -0.9));
        let m = ComplexMatrix::from_entries(2, vec![c(a, 0.0), z, z.conj(), c(b, 0.0)]).unwrap();
        let s = hermitian_eigen(&m).unwrap();
        let mid = (a + b) / 2.0;
        let rad = (((a - b) / 2.0).powi(2) + z.norm_sqr()).sqrt();
        assert!((s.eigenvalues[0] - (mid + rad)).abs() < 1e-13);
        assert!((s.eigenvalues[1] - (mid - rad)).abs() < 1e-13);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn eigen_random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &d in &[1usize, 2, 3, 5, 8, 16, 33, 64] {
            let m = random_hermitian(d, &mut rng);
            let s = hermitian_eigen(&m).unwrap();
            assert!(s.reconstruct().max_abs_diff(&m).unwrap() <= 1e-10, "d={d}");
            let gram = s.eigenvectors.adjoint().matmul(&s.eigenvectors).unwrap();
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(d)).unwrap() <= 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigen_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(12, &mut rng);
        let a = hermitian_eigen(&m).unwrap();
        let b = hermitian_eigen(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DensityOperator::basis(1, 0).unwrap();
        let one = DensityOperator::basis(1, 1).unwrap();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        // sqrt(1 - |<0|+>|²) = sqrt(1/2)
        let expected = (1.0f64 - 0.5).sqrt();
        assert!((trace_distance(&zero, &plus()).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(1);
        let b = DensityOperator::maximally_mixed(2);
        assert!(matches!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&maximally_mixed(1)) - 0.5).abs() < 1e-15);
        assert!((purity(&plus()) - 1.0).abs() < 1e-14);
        let rho = DensityOperator::diagonal(&[0.5, 0.25, 0.125, 0.125]).unwrap();
        let oracle: f64 = [0.5f64, 0.25, 0.125, 0.125].iter().map(|x| x * x).sum();
        assert_eq!(oracle, 0.34375);
        assert!((purity(&rho) - oracle).abs() < 1e-15);
    }

    #[test]
    fn min_entropy_examples() {
        for n in 0..4 {
            assert!((min_entropy(&maximally_mixed(n)).unwrap() - n as f64).abs() < 1e-12);
        }
        assert!(min_entropy(&plus()).unwrap().abs() < 1e-12);
        let rho = DensityOperator::diagonal(&[0.5, 0.25, 0.125, 0.125]).unwrap();
        assert!((min_entropy(&rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_shapes() {
        assert_eq!(maximally_mixed(0).matrix().entries(), &[c(1.0, 0.0)]);
        let m1 = maximally_mixed(1);
        assert_eq!(m1.matrix(), &ComplexMatrix::diagonal(&[0.5, 0.5]));
        let m2 = maximally_mixed(2);
        assert_eq!(m2.matrix(), &ComplexMatrix::diagonal(&[0.25; 4]));
    }

    #[test]
    fn density_validation_rejects_bad_inputs() {
        let not_psd = ComplexMatrix::diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityOperator::new(not_psd),
            Err(Error::InvalidDensity(_))
        ));
        let bad_trace = ComplexMatrix::diagonal(&[0.5, 0.4]);
        assert!(DensityOperator::new(bad_trace).is_err());
        let odd = ComplexMatrix::diagonal(&[0.5, 0.25, 0.25]);
        assert!(DensityOperator::new(odd).is_err());
        assert!(DensityOperator::new(ComplexMatrix::diagonal(&[0.5, 0.5])).is_ok());
    }

    #[test]
    fn helstrom_projector_attains_trace_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = 4;
            let a = random_hermitian(d, &mut rng);
            let b = random_hermitian(d, &mut rng);
            // make two density operators: exp-free PSD via A A† / tr
            let pa = a.matmul(&a.adjoint()).unwrap();
            let pb = b.matmul(&b.adjoint()).unwrap();
            let rho = DensityOperator::new(pa.scale(1.0 / pa.trace().re)).unwrap();
            let sigma = DensityOperator::new(pb.scale(1.0 / pb.trace().re)).unwrap();
            let diff = rho.matrix().sub(sigma.matrix()).unwrap();
            let proj = positive_part_projector(&diff).unwrap();
            let complement = ComplexMatrix::identity(d).sub(&proj).unwrap();
            let best = diff
                .trace_product(&proj)
                .unwrap()
                .re
                .abs()
                .max(diff.trace_product(&complement).unwrap().re.abs());
            assert!((best - trace_distance(&rho, &sigma).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn min_entropy_threshold_bounds_max_eigenvalue() {
        let rho = DensityOperator::diagonal(&[0.25, 0.25, 0.25, 0.125, 0.125, 0.0, 0.0, 0.0])
            .unwrap();
        let h = min_entropy(&rho).unwrap();
        assert!(rho.max_eigenvalue().unwrap() <= 2f64.powf(-h) + 1e-12);
    }
}
