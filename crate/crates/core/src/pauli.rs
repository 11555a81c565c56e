//! Pauli masks `X^a Z^b` on `n` qubits.
//!
//! Bit `n-1-j` of `a` (most significant first) selects `X` on qubit `j`, the
//! same ordering as the tensor factors, so basis index `x` reads as the
//! bit string `x₁…xₙ`. Only conjugation actions are exposed, so global
//! phases never appear.

use std::fmt;
use std::str::FromStr;

use crate::qmatrix::{ComplexMatrix, DensityOperator, C64};
use crate::{Error, Result};

/// Fixed-width bit string, most significant bit first when printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    width: u32,
    value: u64,
}

impl BitString {
    pub fn new(width: u32, value: u64) -> Result<Self> {
        if width > 64 || (width < 64 && value >> width != 0) {
            return Err(Error::BadParameters(format!(
                "{value:#b} does not fit in {width} bits"
            )));
        }
        Ok(Self { width, value })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.value
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::Parse(format!("bit string too long: {s}")));
        }
        let mut value = 0u64;
        for ch in s.chars() {
            value = (value << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::Parse(format!("bad bit {other:?} in {s:?}"))),
                };
        }
        Ok(Self {
            width: s.len() as u32,
            value,
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in (0..self.width).rev() {
            write!(f, "{}", (self.value >> j) & 1)?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// `(-1)^{parity(x_part AND z_part)}`: the sign picked up when moving
/// `Z^{z_part}` past `X^{x_part}`, i.e. `Z^z X^x = sign · X^x Z^z`.
pub fn commutation_sign(x_part: &BitString, z_part: &BitString) -> Result<i8> {
    if x_part.width != z_part.width {
        return Err(Error::LengthMismatch(
            x_part.width as usize,
            z_part.width as usize,
        ));
    }
    Ok(if parity(x_part.value & z_part.value) { -1 } else { 1 })
}

/// The operator `X^a Z^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliMask {
    n_qubits: u32,
    a: u32,
    b: u32,
}

impl PauliMask {
    pub fn new(n_qubits: u32, a: u32, b: u32) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 16 {
            return Err(Error::BadParameters(format!(
                "mask width {n_qubits} outside 1..=16"
            )));
        }
        let limit = 1u32 << n_qubits;
        if a >= limit || b >= limit {
            return Err(Error::BadParameters(format!(
                "mask parts ({a}, {b}) do not fit in {n_qubits} bits"
            )));
        }
        Ok(Self { n_qubits, a, b })
    }

    pub fn identity(n_qubits: u32) -> Result<Self> {
        Self::new(n_qubits, 0, 0)
    }

    /// Splits a `2n`-bit string as `a || b`: `a` the high `n` bits, `b` the
    /// low `n` bits.
    pub fn from_concatenated(n_qubits: u32, ab: u32) -> Result<Self> {
        let low = (1u32 << n_qubits) - 1;
        Self::new(n_qubits, ab >> n_qubits, ab & low)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn x_part(&self) -> u32 {
        self.a
    }

    pub fn z_part(&self) -> u32 {
        self.b
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Dense `X^a Z^b`. Test oracle only; conjugation never uses it.
    pub fn dense(&self) -> ComplexMatrix {
        let d = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(d);
        // X^a Z^b |y> = (-1)^{b·y} |y ⊕ a>
        for y in 0..d {
            let sign = if parity((self.b as u64) & y as u64) { -1.0 } else { 1.0 };
            m[(y ^ self.a as usize, y)] = C64::new(sign, 0.0);
        }
        m
    }

    fn check(&self, rho: &DensityOperator) -> Result<()> {
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1usize << self.n_qubits,
                actual: rho.dim(),
            });
        }
        Ok(())
    }
}

/// `X^a Z^b ρ Z^b X^a` as an index shuffle with sign flips:
/// `out[x,y] = (-1)^{b·(x⊕y)} ρ[x⊕a, y⊕a]`.
pub fn conjugate(rho: &DensityOperator, m: &PauliMask) -> Result<DensityOperator> {
    m.check(rho)?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    conjugate_into(rho.matrix(), m, |dst, v| *dst = v, &mut out);
    Ok(DensityOperator::from_matrix_unchecked(rho.n_qubits(), out))
}

/// Conjugation by the adjoint `Z^b X^a`:
/// `out[x,y] = (-1)^{b·x} (-1)^{b·y} ρ[x⊕a, y⊕a]`.
pub fn inverse_conjugate(rho: &DensityOperator, m: &PauliMask) -> Result<DensityOperator> {
    m.check(rho)?;
    let d = rho.dim();
    let (a, b) = (m.a as usize, m.b as u64);
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(d);
    for x in 0..d {
        let sx = parity(b & x as u64);
        for y in 0..d {
            let sy = parity(b & y as u64);
            let v = src[(x ^ a, y ^ a)];
            out[(x, y)] = if sx != sy { -v } else { v };
        }
    }
    Ok(DensityOperator::from_matrix_unchecked(rho.n_qubits(), out))
}

/// Accumulates the conjugation of `src` by `m` into `dst` via `op(dst_entry, value)`.
#[inline]
pub(crate) fn conjugate_into(
    src: &ComplexMatrix,
    m: &PauliMask,
    op: impl Fn(&mut C64, C64),
    dst: &mut ComplexMatrix,
) {
    let d = src.dim();
    let (a, b) = (m.a as usize, m.b as u64);
    let src = src.entries();
    let dst = dst.entries_mut();
    for x in 0..d {
        let row = (x ^ a) * d;
        for y in 0..d {
            let v = src[row + (y ^ a)];
            let v = if parity(b & (x ^ y) as u64) { -v } else { v };
            op(&mut dst[x * d + y], v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{hermitian_eigen, maximally_mixed};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: u32, rng: &mut impl Rng) -> DensityOperator {
        let d = 1usize << n;
        let mut g = ComplexMatrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                g[(r, c)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let p = g.matmul(&g.adjoint()).unwrap();
        let tr = p.trace().re;
        DensityOperator::new(p.scale(1.0 / tr)).unwrap()
    }

    fn dense_conjugate(rho: &DensityOperator, m: &PauliMask) -> ComplexMatrix {
        let p = m.dense();
        p.matmul(rho.matrix()).unwrap().matmul(&p.adjoint()).unwrap()
    }

    #[test]
    fn bit_flip() {
        let m = PauliMask::new(1, 1, 0).unwrap();
        let out = conjugate(&DensityOperator::basis(1, 0).unwrap(), &m).unwrap();
        assert_eq!(out, DensityOperator::basis(1, 1).unwrap());
    }

    #[test]
    fn identity_mask_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_state(2, &mut rng);
        let id = PauliMask::identity(2).unwrap();
        assert_eq!(conjugate(&rho, &id).unwrap(), rho);
        assert_eq!(inverse_conjugate(&rho, &id).unwrap(), rho);
    }

    #[test]
    fn phase_flip_maps_plus_to_minus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOperator::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let minus = DensityOperator::pure(&[C64::new(h, 0.0), C64::new(-h, 0.0)]).unwrap();
        let z = PauliMask::new(1, 0, 1).unwrap();
        let out = conjugate(&plus, &z).unwrap();
        let oracle = dense_conjugate(&plus, &z);
        assert!(out.matrix().max_abs_diff(&oracle).unwrap() < 1e-15);
        assert!(out.matrix().max_abs_diff(minus.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn matches_dense_oracle_for_small_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=2u32 {
            let rho = random_state(n, &mut rng);
            for a in 0..(1u32 << n) {
                for b in 0..(1u32 << n) {
                    let m = PauliMask::new(n, a, b).unwrap();
                    let fast = conjugate(&rho, &m).unwrap();
                    let diff = fast.matrix().max_abs_diff(&dense_conjugate(&rho, &m)).unwrap();
                    assert!(diff <= 1e-12, "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let n = rng.gen_range(1..=3);
            let rho = random_state(n, &mut rng);
            let m = PauliMask::new(n, rng.gen_range(0..1 << n), rng.gen_range(0..1 << n)).unwrap();
            let back = inverse_conjugate(&conjugate(&rho, &m).unwrap(), &m).unwrap();
            worst = worst.max(back.matrix().max_abs_diff(rho.matrix()).unwrap());
        }
        assert!(worst <= 1e-15);
    }

    #[test]
    fn round_trip_two_qubits_against_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_state(2, &mut rng);
        let m = PauliMask::new(2, 0b01, 0b10).unwrap();
        let p = m.dense();
        // (Z^b X^a) (X^a Z^b ρ Z^b X^a) (X^a Z^b) = ρ
        let enc = dense_conjugate(&rho, &m);
        let dec = p.adjoint().matmul(&enc).unwrap().matmul(&p).unwrap();
        assert!(dec.max_abs_diff(rho.matrix()).unwrap() < 1e-15);
        let fast = inverse_conjugate(&conjugate(&rho, &m).unwrap(), &m).unwrap();
        assert_eq!(fast.matrix(), rho.matrix());
    }

    #[test]
    fn commutation_sign_examples() {
        let s = |x: &str, z: &str| {
            commutation_sign(&x.parse().unwrap(), &z.parse().unwrap()).unwrap()
        };
        assert_eq!(s("000", "101"), 1);
        assert_eq!(s("1", "1"), -1);
        assert_eq!(s("110", "011"), -1);
        assert!(matches!(
            commutation_sign(&"10".parse().unwrap(), &"1".parse().unwrap()),
            Err(Error::LengthMismatch(2, 1))
        ));
    }

    #[test]
    fn commutation_sign_matches_dense_exchange() {
        // Z^d X^c == sign · X^c Z^d on three qubits, for all c, d.
        for c in 0..8u32 {
            for d in 0..8u32 {
                let x_only = PauliMask::new(3, c, 0).unwrap().dense();
                let z_only = PauliMask::new(3, 0, d).unwrap().dense();
                let lhs = z_only.matmul(&x_only).unwrap();
                let rhs = x_only.matmul(&z_only).unwrap();
                let sign = commutation_sign(
                    &BitString::new(3, c as u64).unwrap(),
                    &BitString::new(3, d as u64).unwrap(),
                )
                .unwrap();
                assert_eq!(sign * sign, 1);
                let diff = lhs.max_abs_diff(&rhs.scale(sign as f64)).unwrap();
                assert!(diff == 0.0, "c={c:03b} d={d:03b}");
            }
        }
    }

    #[test]
    fn spectrum_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(3, &mut rng);
        let before = hermitian_eigen(rho.matrix()).unwrap().eigenvalues;
        let m = PauliMask::new(3, 0b101, 0b011).unwrap();
        let after = hermitian_eigen(conjugate(&rho, &m).unwrap().matrix())
            .unwrap()
            .eigenvalues;
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn full_twirl_gives_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=3u32 {
            let rho = random_state(n, &mut rng);
            let d = 1usize << n;
            let mut acc = ComplexMatrix::zeros(d);
            for a in 0..(1u32 << n) {
                for b in 0..(1u32 << n) {
                    let m = PauliMask::new(n, a, b).unwrap();
                    acc.add_scaled(1.0 / (d * d) as f64, conjugate(&rho, &m).unwrap().matrix())
                        .unwrap();
                }
            }
            assert!(acc.max_abs_diff(maximally_mixed(n).matrix()).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn mismatched_qubits_rejected() {
        let m = PauliMask::new(2, 1, 1).unwrap();
        assert!(matches!(
            conjugate(&maximally_mixed(1), &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn concatenated_split_convention() {
        let m = PauliMask::from_concatenated(2, 0b1001).unwrap();
        assert_eq!((m.x_part(), m.z_part()), (0b10, 0b01));
    }

    #[test]
    fn bit_string_display_round_trips() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.value(), 6);
        assert_eq!(b.to_string(), "0110");
    }
}
