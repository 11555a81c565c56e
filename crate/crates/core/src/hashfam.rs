//! Permutation families over `m`-bit strings built from `GF(2^m)`
//! multiplication, `h_i(x) = i·x` for nonzero `i`, and an exact verifier for
//! the XOR-universality property the cipher relies on.

use num_rational::Ratio;

use crate::{Error, Result};

/// Largest width for which exhaustive checks are offered.
pub const MAX_EXHAUSTIVE_WIDTH: u32 = 12;

/// Fixed irreducible moduli, indexed by field degree.
const STANDARD_MODULI: &[(u32, u32)] = &[
    (2, 0b111),                 // x^2 + x + 1
    (4, 0b1_0011),              // x^4 + x + 1
    (6, 0b100_0011),            // x^6 + x + 1
    (8, 0x11B),                 // x^8 + x^4 + x^3 + x + 1
    (10, 0b100_0000_1001),      // x^10 + x^3 + 1
    (12, 0b1_0000_0101_0011),   // x^12 + x^6 + x^4 + x + 1
];

/// `GF(2^m)` represented as polynomials modulo an irreducible `modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldGf2m {
    m: u32,
    modulus: u32,
}

impl FieldGf2m {
    /// Checks that `modulus` has degree exactly `m` and no factor of degree
    /// `1..=m/2`.
    pub fn new(m: u32, modulus: u32) -> Result<Self> {
        if m == 0 || m > 31 {
            return Err(Error::BadParameters(format!("field degree {m} outside 1..=31")));
        }
        if m > MAX_EXHAUSTIVE_WIDTH {
            return Err(Error::DomainTooLarge(m));
        }
        if degree(modulus as u64) != Some(m) || !is_irreducible(modulus as u64) {
            return Err(Error::ReducibleModulus { m, modulus });
        }
        Ok(Self { m, modulus })
    }

    /// The fixed modulus for `m ∈ {2, 4, 6, 8, 10, 12}`, re-verified.
    pub fn standard(m: u32) -> Result<Self> {
        if m > MAX_EXHAUSTIVE_WIDTH {
            return Err(Error::DomainTooLarge(m));
        }
        let modulus = STANDARD_MODULI
            .iter()
            .find(|(deg, _)| *deg == m)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::BadParameters(format!("no standard modulus for m = {m}")))?;
        Self::new(m, modulus)
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> u32 {
        1 << self.m
    }

    /// Carry-less product reduced by the modulus.
    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let mut acc: u64 = 0;
        let (x, mut y) = (x as u64, y as u64);
        let mut shift = 0;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x << shift;
            }
            y >>= 1;
            shift += 1;
        }
        reduce(acc, self.modulus as u64, self.m) as u32
    }

    /// `x^{-1} = x^{2^m - 2}`; `None` for zero.
    pub fn inverse(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let mut result = 1;
        let mut base = x;
        let mut e = self.order() - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(result)
    }
}

fn degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

fn reduce(mut p: u64, modulus: u64, m: u32) -> u64 {
    while let Some(deg) = degree(p) {
        if deg < m {
            break;
        }
        p ^= modulus << (deg - m);
    }
    p
}

/// Remainder of carry-less division.
fn poly_rem(p: u64, q: u64) -> u64 {
    let dq = degree(q).expect("nonzero divisor");
    reduce(p, q, dq)
}

/// Exhaustive trial division by every polynomial of degree `1..=deg/2`.
fn is_irreducible(p: u64) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    for div_deg in 1..=d / 2 {
        for q in (1u64 << div_deg)..(1u64 << (div_deg + 1)) {
            if poly_rem(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

/// `{h_i : x ↦ i·x}` over nonzero `i ∈ GF(2^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermutationFamily {
    field: FieldGf2m,
}

impl PermutationFamily {
    pub fn new(field: FieldGf2m) -> Self {
        Self { field }
    }

    pub fn standard(m: u32) -> Result<Self> {
        FieldGf2m::standard(m).map(Self::new)
    }

    pub fn field(&self) -> &FieldGf2m {
        &self.field
    }

    pub fn width(&self) -> u32 {
        self.field.m
    }

    /// `|I| = 2^m - 1`.
    pub fn index_count(&self) -> u32 {
        self.field.order() - 1
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> {
        1..self.field.order()
    }

    pub fn check_index(&self, i: u32) -> Result<()> {
        match i {
            0 => Err(Error::ZeroIndex),
            i if i >= self.field.order() => Err(Error::BadIndex(i)),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, i: u32, x: u32) -> Result<u32> {
        self.check_index(i)?;
        if x >= self.field.order() {
            return Err(Error::BadParameters(format!(
                "input {x} wider than {} bits",
                self.field.m
            )));
        }
        Ok(self.field.mul(i, x))
    }

    /// `apply` without range checks, for hot loops over validated inputs.
    #[inline]
    pub(crate) fn apply_unchecked(&self, i: u32, x: u32) -> u32 {
        self.field.mul(i, x)
    }
}

/// Uniform `t_k`-bit keys zero-padded into the low bits of an `m`-bit domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeySpec {
    t_k: u32,
    width: u32,
}

impl KeySpec {
    pub fn new(t_k: u32, width: u32) -> Result<Self> {
        if t_k > width {
            return Err(Error::BadParameters(format!(
                "key length {t_k} exceeds domain width {width}"
            )));
        }
        Ok(Self { t_k, width })
    }

    pub fn bits(&self) -> u32 {
        self.t_k
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// `|K| = 2^{t_k}`.
    pub fn count(&self) -> u32 {
        1 << self.t_k
    }

    pub fn keys(&self) -> impl Iterator<Item = u32> {
        0..self.count()
    }

    pub fn embed(&self, key: u32) -> Result<u32> {
        if key >= self.count() {
            return Err(Error::BadKey {
                key,
                bits: self.t_k,
            });
        }
        Ok(key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorUniversalityReport {
    pub m: u32,
    pub t_k: u32,
    /// `max_{a≠0} Pr_{i,k,k'}[h_i(k) ⊕ h_i(k') = a]`.
    pub max_prob: Ratio<u64>,
    /// `2^{-m}`.
    pub bound: Ratio<u64>,
    /// `max_{x≠y, a≠0} Pr_i[h_i(x) ⊕ h_i(y) = a]` over fixed inputs; this
    /// exceeds `bound` for the multiplication family.
    pub literal_worst: Ratio<u64>,
    pub pass: bool,
}

/// Exact, integer-arithmetic check of the key-averaged XOR-universality
/// property.
///
/// For every `a`, counts triples `(i, k, k')` with `h_i(k) ⊕ h_i(k') = a`.
/// Since `h_i` is `GF(2)`-linear, `h_i(k) ⊕ h_i(k') = h_i(k ⊕ k')`, so the
/// count is assembled from the multiplicities of `k ⊕ k'` over key pairs.
pub fn verify_xor_universal(
    fam: &PermutationFamily,
    keys: &KeySpec,
) -> Result<XorUniversalityReport> {
    let m = fam.width();
    if m > MAX_EXHAUSTIVE_WIDTH {
        return Err(Error::DomainTooLarge(m));
    }
    if keys.width() != m {
        return Err(Error::BadParameters(format!(
            "key domain width {} differs from family width {m}",
            keys.width()
        )));
    }
    let order = fam.field().order() as usize;

    let embedded: Vec<u32> = keys.keys().map(|k| keys.embed(k)).collect::<Result<_>>()?;
    let mut diff_mult = vec![0u64; order];
    for &k in &embedded {
        for &k2 in &embedded {
            diff_mult[(k ^ k2) as usize] += 1;
        }
    }

    let mut counts = vec![0u64; order];
    let mut literal_hits = 0u64;
    for delta in 1..order as u32 {
        let mut per_delta = vec![0u64; order];
        for i in fam.indices() {
            let a = fam.apply_unchecked(i, delta) as usize;
            per_delta[a] += 1;
            counts[a] += diff_mult[delta as usize];
        }
        literal_hits = literal_hits.max(per_delta[1..].iter().copied().max().unwrap_or(0));
    }
    // k = k' contributes only to a = 0, counted for completeness.
    counts[0] += diff_mult[0] * fam.index_count() as u64;

    let total = fam.index_count() as u64 * (embedded.len() as u64).pow(2);
    let worst = counts[1..].iter().copied().max().unwrap_or(0);
    let max_prob = Ratio::new(worst, total);
    let bound = Ratio::new(1, order as u64);
    Ok(XorUniversalityReport {
        m,
        t_k: keys.bits(),
        max_prob,
        bound,
        literal_worst: Ratio::new(literal_hits, fam.index_count() as u64),
        pass: max_prob <= bound,
    })
}
