//! Arithmetic in `F_q` for prime `q` and binary extensions `q = 2^k`,
//! plus element enumeration and sampling under the sparse coefficient
//! distribution: zero with probability `p0`, each nonzero element with
//! probability `(1 - p0) / (q - 1)`.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

/// Conventional irreducible moduli for `GF(2^k)`, `2 <= k <= 8`, as bitmasks
/// including the leading term. One fixed modulus per `k` keeps serialized
/// elements portable across runs.
const BINARY_MODULI: [(u32, u32); 7] = [
    (2, 0b111),
    (3, 0b1011),
    (4, 0b10011),
    (5, 0b100101),
    (6, 0b1000011),
    (7, 0b10000011),
    (8, 0b100011011),
];

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("unsupported field order {0}: expected a prime < 2^16 or 2^k with 2 <= k <= 8")]
    UnsupportedOrder(u64),
    #[error("value {value} out of range for F_{q}")]
    OutOfRange { value: u64, q: u16 },
    #[error("mismatched field specs: F_{0} vs F_{1}")]
    MismatchedFields(u16, u16),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("sparsity must lie in [0, 1], got {0}")]
    InvalidSparsity(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Prime,
    BinaryExtension,
}

/// An element of `F_q`. Carries the field order so that cross-field misuse
/// is detectable; the spec for a given `q` is canonical, so `q` alone
/// identifies the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u16,
    q: u16,
}

impl FieldElement {
    pub fn value(&self) -> u16 {
        self.value
    }

    pub fn field_order(&self) -> u16 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The finite field `F_q`. Immutable after construction (including the
/// log/antilog tables for binary extensions), so it can be shared freely
/// across threads behind an [`Arc`].
pub struct FieldSpec {
    q: u16,
    kind: FieldKind,
    modulus: u32,
    // log[a] for a in 1..q and exp[e] for e in 0..2(q-1); empty for primes.
    log: Vec<u16>,
    exp: Vec<u16>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("kind", &self.kind)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        // One canonical modulus per order, so the order determines the spec.
        self.q == other.q
    }
}

impl Eq for FieldSpec {}

/// Carry-less multiply of two polynomials over `F_2`, reduced by the
/// degree-`k` modulus. Only used while building the tables.
fn clmul_mod(mut a: u32, mut b: u32, modulus: u32, k: u32) -> u32 {
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << k) != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn is_prime(n: u16) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u32;
    while d * d <= n as u32 {
        if (n as u32).is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    /// Build the field of order `q`: any prime below `2^16`, or `2^k` with
    /// `2 <= k <= 8` using the fixed conventional modulus.
    pub fn new(q: u64) -> Result<Arc<FieldSpec>, FieldError> {
        if let Some(&(k, modulus)) = BINARY_MODULI.iter().find(|&&(k, _)| 1u64 << k == q) {
            return Ok(Arc::new(Self::new_binary(k, modulus)));
        }
        let q16 = u16::try_from(q).map_err(|_| FieldError::UnsupportedOrder(q))?;
        if !is_prime(q16) {
            return Err(FieldError::UnsupportedOrder(q));
        }
        Ok(Arc::new(FieldSpec {
            q: q16,
            kind: FieldKind::Prime,
            modulus: 0,
            log: Vec::new(),
            exp: Vec::new(),
        }))
    }

    fn new_binary(k: u32, modulus: u32) -> FieldSpec {
        let q = 1u16 << k;
        let order = (q - 1) as u32;
        // Find a multiplicative generator. The conventional modulus is not
        // always primitive (x is not a generator of GF(256) under
        // x^8+x^4+x^3+x+1), so search from 2 upward.
        let generator = (2..q as u32)
            .find(|&g| {
                let mut x = g;
                let mut steps = 1u32;
                while x != 1 {
                    x = clmul_mod(x, g, modulus, k);
                    steps += 1;
                }
                steps == order
            })
            .expect("every finite field has a multiplicative generator");

        let mut log = vec![0u16; q as usize];
        let mut exp = vec![0u16; 2 * order as usize];
        let mut x = 1u32;
        for e in 0..order {
            exp[e as usize] = x as u16;
            exp[(e + order) as usize] = x as u16;
            log[x as usize] = e as u16;
            x = clmul_mod(x, generator, modulus, k);
        }
        FieldSpec {
            q,
            kind: FieldKind::BinaryExtension,
            modulus,
            log,
            exp,
        }
    }

    pub fn q(&self) -> u16 {
        self.q
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Irreducible-polynomial bitmask; 0 for prime fields.
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value >= self.q as u64 {
            return Err(FieldError::OutOfRange { value, q: self.q });
        }
        Ok(FieldElement {
            value: value as u16,
            q: self.q,
        })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, q: self.q }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, q: self.q }
    }

    fn check(&self, a: FieldElement) -> Result<u16, FieldError> {
        if a.q != self.q {
            return Err(FieldError::MismatchedFields(a.q, self.q));
        }
        Ok(a.value)
    }

    fn wrap(&self, value: u16) -> FieldElement {
        FieldElement { value, q: self.q }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.add_raw(self.check(a)?, self.check(b)?)))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.sub_raw(self.check(a)?, self.check(b)?)))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.mul_raw(self.check(a)?, self.check(b)?)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let v = self.check(a)?;
        self.inv_raw(v).map(|x| self.wrap(x)).ok_or(FieldError::ZeroInverse)
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let num = self.check(a)?;
        let den = self.check(b)?;
        let inv = self.inv_raw(den).ok_or(FieldError::ZeroInverse)?;
        Ok(self.wrap(self.mul_raw(num, inv)))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.neg_raw(self.check(a)?)))
    }

    /// All `q` elements exactly once, zero first, ascending value order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |value| FieldElement { value, q: self.q })
    }

    pub(crate) fn add_raw(&self, a: u16, b: u16) -> u16 {
        match self.kind {
            FieldKind::Prime => ((a as u32 + b as u32) % self.q as u32) as u16,
            FieldKind::BinaryExtension => a ^ b,
        }
    }

    pub(crate) fn sub_raw(&self, a: u16, b: u16) -> u16 {
        match self.kind {
            FieldKind::Prime => {
                ((a as u32 + self.q as u32 - b as u32) % self.q as u32) as u16
            }
            FieldKind::BinaryExtension => a ^ b,
        }
    }

    pub(crate) fn neg_raw(&self, a: u16) -> u16 {
        self.sub_raw(0, a)
    }

    pub(crate) fn mul_raw(&self, a: u16, b: u16) -> u16 {
        match self.kind {
            FieldKind::Prime => ((a as u64 * b as u64) % self.q as u64) as u16,
            FieldKind::BinaryExtension => {
                if a == 0 || b == 0 {
                    0
                } else {
                    self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
                }
            }
        }
    }

    pub(crate) fn inv_raw(&self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        match self.kind {
            FieldKind::Prime => {
                // Fermat: a^(q-2).
                let mut result = 1u64;
                let mut base = a as u64;
                let mut e = self.q as u32 - 2;
                while e > 0 {
                    if e & 1 != 0 {
                        result = result * base % self.q as u64;
                    }
                    base = base * base % self.q as u64;
                    e >>= 1;
                }
                Some(result as u16)
            }
            FieldKind::BinaryExtension => {
                let order = self.q as usize - 1;
                Some(self.exp[(order - self.log[a as usize] as usize) % order])
            }
        }
    }

    pub(crate) fn div_raw(&self, a: u16, b: u16) -> Option<u16> {
        self.inv_raw(b).map(|inv| self.mul_raw(a, inv))
    }
}

/// The sparse coefficient distribution: `Pr{0} = p0` and
/// `Pr{t} = (1 - p0) / (q - 1)` for each nonzero `t`.
#[derive(Debug, Clone)]
pub struct SparseDist {
    field: Arc<FieldSpec>,
    p0: BigRational,
    p0_f64: f64,
}

impl SparseDist {
    pub fn new(field: Arc<FieldSpec>, p0: BigRational) -> Result<SparseDist, FieldError> {
        if p0 < BigRational::zero() || p0 > BigRational::one() {
            return Err(FieldError::InvalidSparsity(p0.to_string()));
        }
        let p0_f64 = p0.to_f64().expect("p0 in [0,1] converts to f64");
        Ok(SparseDist { field, p0, p0_f64 })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn p0(&self) -> &BigRational {
        &self.p0
    }

    pub fn p0_f64(&self) -> f64 {
        self.p0_f64
    }

    /// Draw one coefficient: zero with probability `p0`, otherwise uniform
    /// over the `q - 1` nonzero elements. The caller owns the rng stream.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        if rng.gen_bool(self.p0_f64) {
            self.field.zero()
        } else {
            let value = rng.gen_range(1..self.field.q());
            FieldElement {
                value,
                q: self.field.q(),
            }
        }
    }
}
