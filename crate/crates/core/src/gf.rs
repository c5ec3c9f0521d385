//! Arithmetic in the small characteristic-2 fields used by the engine.
//!
//! `Gf8` is GF(2)[η]/(η³ + η + 1) with the integer codec `4·b2 + 2·b1 + b0`,
//! so η is `2`. `Gf64` uses the smallest degree-6 modulus over GF(2) that
//! admits a generator β with β⁹ a root of t³ + t + 1; the embedding
//! GF(8) → GF(64) sends η to β⁹. `Gf2` and `Gf4` exist so the classification
//! code can be cross-checked against brute force over GF(2).
//!
//! Multiplication goes through full product tables built once at startup.
//! Addition is exclusive-or.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, MulAssign};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer {value} is not a valid element codec for a field of order {order}")]
    BadCodec { value: usize, order: usize },
    #[error("no degree-6 modulus admits a generator whose ninth power is a root of t^3+t+1")]
    NoGf64Generator,
}

/// The operations exposed through [`Gf8::op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Div,
}

/// Common interface of the finite fields used by the generic geometry code.
pub trait Field:
    Copy
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + MulAssign
    + 'static
{
    /// Number of elements.
    const ORDER: usize;

    /// Element with integer codec `i`. Panics if `i >= ORDER`.
    fn from_index(i: usize) -> Self;
    fn index(self) -> usize;

    fn zero() -> Self {
        Self::from_index(0)
    }
    fn one() -> Self {
        Self::from_index(1)
    }
    fn is_zero(self) -> bool {
        self.index() == 0
    }

    /// Multiplicative inverse, `None` for zero.
    fn inv(self) -> Option<Self>;

    fn div(self, rhs: Self) -> Result<Self, FieldError> {
        rhs.inv().map(|r| self * r).ok_or(FieldError::DivisionByZero)
    }

    /// The absolute Frobenius, `x ↦ x²`.
    fn frobenius(self) -> Self {
        self * self
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Square root; squaring is a bijection in characteristic 2.
    fn sqrt(self) -> Self {
        // x^(ORDER/2) squared is x^ORDER = x.
        self.pow((Self::ORDER / 2) as u64)
    }

    fn elements() -> Box<dyn Iterator<Item = Self>> {
        Box::new((0..Self::ORDER).map(Self::from_index))
    }

    fn nonzero_elements() -> Box<dyn Iterator<Item = Self>> {
        Box::new((1..Self::ORDER).map(Self::from_index))
    }
}

/// A field together with a degree-2 extension and a fixed embedding.
pub trait HasQuadraticExtension: Field {
    type Ext: Field;
    fn embed(self) -> Self::Ext;
}

/// Carry-less product of two GF(2) polynomials packed in bits.
const fn clmul(a: u16, b: u16) -> u16 {
    let mut r = 0u16;
    let mut i = 0;
    while i < 8 {
        if (b >> i) & 1 == 1 {
            r ^= a << i;
        }
        i += 1;
    }
    r
}

/// Reduce `a` modulo the polynomial `modulus` of degree `deg`.
const fn reduce(mut a: u16, modulus: u16, deg: u32) -> u16 {
    let mut bit = 15i32;
    while bit >= deg as i32 {
        if (a >> bit) & 1 == 1 {
            a ^= modulus << (bit as u32 - deg);
        }
        bit -= 1;
    }
    a
}

const GF8_MODULUS: u16 = 0b1011;

const GF8_MUL: [[u8; 8]; 8] = {
    let mut t = [[0u8; 8]; 8];
    let mut a = 0;
    while a < 8 {
        let mut b = 0;
        while b < 8 {
            t[a][b] = reduce(clmul(a as u16, b as u16), GF8_MODULUS, 3) as u8;
            b += 1;
        }
        a += 1;
    }
    t
};

const GF8_INV: [u8; 8] = {
    let mut t = [0u8; 8];
    let mut a = 1;
    while a < 8 {
        let mut b = 1;
        while b < 8 {
            if GF8_MUL[a][b] == 1 {
                t[a] = b as u8;
            }
            b += 1;
        }
        a += 1;
    }
    t
};

/// Element of GF(8) = GF(2)[η]/(η³ + η + 1).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Gf8(u8);

impl TryFrom<u8> for Gf8 {
    type Error = FieldError;
    fn try_from(v: u8) -> Result<Self, FieldError> {
        Gf8::new(v)
    }
}

impl From<Gf8> for u8 {
    fn from(v: Gf8) -> u8 {
        v.0
    }
}

impl Gf8 {
    pub const ZERO: Gf8 = Gf8(0);
    pub const ONE: Gf8 = Gf8(1);
    /// The chosen root of η³ + η + 1.
    pub const ETA: Gf8 = Gf8(2);

    pub fn new(codec: u8) -> Result<Gf8, FieldError> {
        if codec < 8 {
            Ok(Gf8(codec))
        } else {
            Err(FieldError::BadCodec {
                value: codec as usize,
                order: 8,
            })
        }
    }

    /// `η^k`, with negative exponents allowed.
    pub fn eta_pow(k: i64) -> Gf8 {
        Gf8::ETA.pow(k.rem_euclid(7) as u64)
    }

    #[inline(always)]
    pub const fn to_u8(self) -> u8 {
        self.0
    }

    /// Discrete logarithm base η, `None` for zero.
    pub fn log_eta(self) -> Option<u8> {
        (0..7u8).find(|&k| Gf8::eta_pow(k as i64) == self)
    }

    /// Single entry point for the four table operations.
    pub fn op(kind: FieldOp, a: Gf8, b: Gf8) -> Result<Gf8, FieldError> {
        match kind {
            FieldOp::Add => Ok(a + b),
            FieldOp::Mul => Ok(a * b),
            FieldOp::Inv => a.inv().ok_or(FieldError::DivisionByZero),
            FieldOp::Div => a.div(b),
        }
    }

    #[inline(always)]
    pub(crate) const fn mul_raw(a: u8, b: u8) -> u8 {
        GF8_MUL[a as usize][b as usize]
    }
}

impl Field for Gf8 {
    const ORDER: usize = 8;
    fn from_index(i: usize) -> Self {
        assert!(i < 8, "GF(8) codec out of range: {i}");
        Gf8(i as u8)
    }
    fn index(self) -> usize {
        self.0 as usize
    }
    fn inv(self) -> Option<Self> {
        (self.0 != 0).then(|| Gf8(GF8_INV[self.0 as usize]))
    }
    fn sqrt(self) -> Self {
        // a^8 = a, so (a^4)^2 = a.
        let a2 = self * self;
        a2 * a2
    }
}

impl Add for Gf8 {
    type Output = Gf8;
    #[inline(always)]
    fn add(self, rhs: Gf8) -> Gf8 {
        Gf8(self.0 ^ rhs.0)
    }
}
impl AddAssign for Gf8 {
    #[inline(always)]
    fn add_assign(&mut self, rhs: Gf8) {
        self.0 ^= rhs.0;
    }
}
impl Mul for Gf8 {
    type Output = Gf8;
    #[inline(always)]
    fn mul(self, rhs: Gf8) -> Gf8 {
        Gf8(GF8_MUL[self.0 as usize][rhs.0 as usize])
    }
}
impl MulAssign for Gf8 {
    #[inline(always)]
    fn mul_assign(&mut self, rhs: Gf8) {
        *self = *self * rhs;
    }
}

impl fmt::Debug for Gf8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log_eta() {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(1) => write!(f, "η"),
            Some(k) => write!(f, "η^{k}"),
        }
    }
}
impl fmt::Display for Gf8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Tables for GF(64), selected deterministically at first use.
pub struct Gf64Tables {
    /// Modulus as a 7-bit GF(2) polynomial (bit 6 set).
    pub modulus: u16,
    /// Integer codec of the generator β.
    pub beta: u8,
    mul: [[u8; 64]; 64],
    inv: [u8; 64],
    exp: [u8; 63],
    log: [u8; 64],
    embed: [u8; 8],
}

fn is_irreducible_deg6(modulus: u16) -> bool {
    // No factor of degree 1..=3 (enough for degree 6).
    for d in 1..=3u32 {
        for low in 0..(1u16 << d) {
            let f = (1u16 << d) | low;
            if reduce(modulus, f, d) == 0 {
                return false;
            }
        }
    }
    true
}

fn build_gf64() -> Result<Gf64Tables, FieldError> {
    for modulus in (0b100_0000u16..0b1000_0000).filter(|&m| is_irreducible_deg6(m)) {
        let mut mul = [[0u8; 64]; 64];
        for (a, row) in mul.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = reduce(clmul(a as u16, b as u16), modulus, 6) as u8;
            }
        }
        let pow = |x: u8, e: u32| (0..e).fold(1u8, |acc, _| mul[acc as usize][x as usize]);
        for beta in 2u8..64 {
            let order = (1..=63u32).find(|&e| pow(beta, e) == 1).unwrap_or(0);
            if order != 63 {
                continue;
            }
            let b9 = pow(beta, 9);
            let b9_cubed = mul[mul[b9 as usize][b9 as usize] as usize][b9 as usize];
            if b9_cubed ^ b9 ^ 1 != 0 {
                continue;
            }
            let mut exp = [0u8; 63];
            let mut log = [0u8; 64];
            let mut acc = 1u8;
            for (k, e) in exp.iter_mut().enumerate() {
                *e = acc;
                log[acc as usize] = k as u8;
                acc = mul[acc as usize][beta as usize];
            }
            let mut inv = [0u8; 64];
            for a in 1..64usize {
                inv[a] = exp[(63 - log[a] as usize) % 63];
            }
            let b18 = mul[b9 as usize][b9 as usize];
            let mut embed = [0u8; 8];
            for (e, slot) in embed.iter_mut().enumerate() {
                let mut v = 0u8;
                if e & 1 != 0 {
                    v ^= 1;
                }
                if e & 2 != 0 {
                    v ^= b9;
                }
                if e & 4 != 0 {
                    v ^= b18;
                }
                *slot = v;
            }
            return Ok(Gf64Tables {
                modulus,
                beta,
                mul,
                inv,
                exp,
                log,
                embed,
            });
        }
    }
    Err(FieldError::NoGf64Generator)
}

static GF64: LazyLock<Gf64Tables> =
    LazyLock::new(|| build_gf64().expect("GF(64) table construction"));

/// The GF(64) tables; built on first access.
pub fn gf64_tables() -> &'static Gf64Tables {
    &GF64
}

/// Element of GF(64) in the fixed polynomial basis.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf64(u8);

impl Gf64 {
    pub const ZERO: Gf64 = Gf64(0);
    pub const ONE: Gf64 = Gf64(1);

    pub fn new(codec: u8) -> Result<Gf64, FieldError> {
        if codec < 64 {
            Ok(Gf64(codec))
        } else {
            Err(FieldError::BadCodec {
                value: codec as usize,
                order: 64,
            })
        }
    }

    pub fn beta() -> Gf64 {
        Gf64(GF64.beta)
    }

    /// `β^k`, negative exponents allowed.
    pub fn beta_pow(k: i64) -> Gf64 {
        Gf64(GF64.exp[k.rem_euclid(63) as usize])
    }

    pub fn log_beta(self) -> Option<u8> {
        (self.0 != 0).then(|| GF64.log[self.0 as usize])
    }

    #[inline(always)]
    pub const fn to_u8(self) -> u8 {
        self.0
    }
}

impl Field for Gf64 {
    const ORDER: usize = 64;
    fn from_index(i: usize) -> Self {
        assert!(i < 64, "GF(64) codec out of range: {i}");
        Gf64(i as u8)
    }
    fn index(self) -> usize {
        self.0 as usize
    }
    fn inv(self) -> Option<Self> {
        (self.0 != 0).then(|| Gf64(GF64.inv[self.0 as usize]))
    }
}

impl Add for Gf64 {
    type Output = Gf64;
    #[inline(always)]
    fn add(self, rhs: Gf64) -> Gf64 {
        Gf64(self.0 ^ rhs.0)
    }
}
impl AddAssign for Gf64 {
    #[inline(always)]
    fn add_assign(&mut self, rhs: Gf64) {
        self.0 ^= rhs.0;
    }
}
impl Mul for Gf64 {
    type Output = Gf64;
    #[inline(always)]
    fn mul(self, rhs: Gf64) -> Gf64 {
        Gf64(GF64.mul[self.0 as usize][rhs.0 as usize])
    }
}
impl MulAssign for Gf64 {
    #[inline(always)]
    fn mul_assign(&mut self, rhs: Gf64) {
        *self = *self * rhs;
    }
}

impl fmt::Debug for Gf64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log_beta() {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(k) => write!(f, "β^{k}"),
        }
    }
}

/// The field homomorphism GF(8) → GF(64) with η ↦ β⁹.
pub fn embed_gf8(a: Gf8) -> Gf64 {
    Gf64(GF64.embed[a.0 as usize])
}

impl HasQuadraticExtension for Gf8 {
    type Ext = Gf64;
    fn embed(self) -> Gf64 {
        embed_gf8(self)
    }
}

/// GF(2), for small-field rehearsals of the geometric machinery.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Gf2(u8);

impl Field for Gf2 {
    const ORDER: usize = 2;
    fn from_index(i: usize) -> Self {
        assert!(i < 2);
        Gf2(i as u8)
    }
    fn index(self) -> usize {
        self.0 as usize
    }
    fn inv(self) -> Option<Self> {
        (self.0 == 1).then_some(self)
    }
}
impl Add for Gf2 {
    type Output = Gf2;
    fn add(self, rhs: Gf2) -> Gf2 {
        Gf2(self.0 ^ rhs.0)
    }
}
impl AddAssign for Gf2 {
    fn add_assign(&mut self, rhs: Gf2) {
        self.0 ^= rhs.0;
    }
}
impl Mul for Gf2 {
    type Output = Gf2;
    fn mul(self, rhs: Gf2) -> Gf2 {
        Gf2(self.0 & rhs.0)
    }
}
impl MulAssign for Gf2 {
    fn mul_assign(&mut self, rhs: Gf2) {
        self.0 &= rhs.0;
    }
}

/// GF(4) = GF(2)[ω]/(ω² + ω + 1).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Gf4(u8);

const GF4_MUL: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];

impl Field for Gf4 {
    const ORDER: usize = 4;
    fn from_index(i: usize) -> Self {
        assert!(i < 4);
        Gf4(i as u8)
    }
    fn index(self) -> usize {
        self.0 as usize
    }
    fn inv(self) -> Option<Self> {
        match self.0 {
            0 => None,
            1 => Some(Gf4(1)),
            2 => Some(Gf4(3)),
            _ => Some(Gf4(2)),
        }
    }
}
impl Add for Gf4 {
    type Output = Gf4;
    fn add(self, rhs: Gf4) -> Gf4 {
        Gf4(self.0 ^ rhs.0)
    }
}
impl AddAssign for Gf4 {
    fn add_assign(&mut self, rhs: Gf4) {
        self.0 ^= rhs.0;
    }
}
impl Mul for Gf4 {
    type Output = Gf4;
    fn mul(self, rhs: Gf4) -> Gf4 {
        Gf4(GF4_MUL[self.0 as usize][rhs.0 as usize])
    }
}
impl MulAssign for Gf4 {
    fn mul_assign(&mut self, rhs: Gf4) {
        *self = *self * rhs;
    }
}

impl HasQuadraticExtension for Gf2 {
    type Ext = Gf4;
    fn embed(self) -> Gf4 {
        Gf4(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all8() -> Vec<Gf8> {
        Gf8::elements().collect()
    }
    fn all64() -> Vec<Gf64> {
        Gf64::elements().collect()
    }

    #[test]
    fn gf8_examples() {
        assert_eq!(Gf8::op(FieldOp::Add, Gf8::ETA, Gf8::ETA), Ok(Gf8::ZERO));
        // η·η⁴ = η⁵: 2·6 = 7 under the codec.
        assert_eq!(Gf8::eta_pow(4).to_u8(), 6);
        assert_eq!(Gf8::eta_pow(5).to_u8(), 7);
        assert_eq!(Gf8::op(FieldOp::Mul, Gf8(2), Gf8(6)), Ok(Gf8(7)));
        assert_eq!(Gf8::op(FieldOp::Inv, Gf8::ETA, Gf8::ZERO), Ok(Gf8(5)));
        assert_eq!(Gf8(2) * Gf8(5), Gf8::ONE);
        assert_eq!(
            Gf8::op(FieldOp::Div, Gf8::ONE, Gf8::ZERO),
            Err(FieldError::DivisionByZero)
        );
        assert_eq!(
            Gf8::op(FieldOp::Inv, Gf8::ZERO, Gf8::ZERO),
            Err(FieldError::DivisionByZero)
        );
        assert!(Gf8::new(8).is_err());
    }

    #[test]
    fn eta_is_root_and_generator() {
        let e = Gf8::ETA;
        assert_eq!(e * e * e + e + Gf8::ONE, Gf8::ZERO);
        let powers: std::collections::BTreeSet<_> = (0..7).map(Gf8::eta_pow).collect();
        assert_eq!(powers.len(), 7);
        assert_eq!(Gf8::eta_pow(7), Gf8::ONE);
    }

    #[test]
    fn gf8_field_axioms_exhaustive() {
        for a in all8() {
            assert_eq!(a + a, Gf8::ZERO);
            if !a.is_zero() {
                assert_eq!(a * a.inv().unwrap(), Gf8::ONE);
            }
            for b in all8() {
                assert_eq!(a * b, b * a);
                for c in all8() {
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                    assert_eq!((a + b) + c, a + (b + c));
                }
            }
        }
    }

    #[test]
    fn gf64_field_axioms_exhaustive() {
        for a in all64() {
            if !a.is_zero() {
                assert_eq!(a * a.inv().unwrap(), Gf64::ONE);
            }
            for b in all64() {
                assert_eq!(a * b, b * a);
                for c in [Gf64(1), Gf64(7), Gf64(33), Gf64(63)] {
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
        }
    }

    #[test]
    fn sqrt_examples_and_property() {
        assert_eq!(Gf8::ZERO.sqrt(), Gf8::ZERO);
        assert_eq!(Gf8::ONE.sqrt(), Gf8::ONE);
        assert_eq!(Gf8::eta_pow(2).sqrt(), Gf8::ETA);
        for a in all8() {
            let r = a.sqrt();
            assert_eq!(r * r, a);
        }
        for a in all64() {
            let r = a.sqrt();
            assert_eq!(r * r, a);
        }
    }

    #[test]
    fn gf64_generator_choice() {
        let t = gf64_tables();
        // Smallest irreducible sextic x^6 + x + 1 admits such a generator.
        assert_eq!(t.modulus, 0b100_0011);
        let beta = Gf64::beta();
        let mut seen = std::collections::BTreeSet::new();
        let mut acc = Gf64::ONE;
        for _ in 0..63 {
            seen.insert(acc);
            acc *= beta;
        }
        assert_eq!(seen.len(), 63);
        assert_eq!(acc, Gf64::ONE);
        let b9 = beta.pow(9);
        assert_eq!(b9 * b9 * b9 + b9 + Gf64::ONE, Gf64::ZERO);
    }

    #[test]
    fn embedding_is_homomorphism() {
        assert_eq!(embed_gf8(Gf8::ZERO), Gf64::ZERO);
        assert_eq!(embed_gf8(Gf8::ONE), Gf64::ONE);
        assert_eq!(embed_gf8(Gf8::ETA), Gf64::beta_pow(9));
        let mut image = std::collections::BTreeSet::new();
        for a in all8() {
            image.insert(embed_gf8(a));
            assert_eq!(embed_gf8(a.sqrt()), embed_gf8(a).sqrt());
            for b in all8() {
                assert_eq!(embed_gf8(a + b), embed_gf8(a) + embed_gf8(b));
                assert_eq!(embed_gf8(a * b), embed_gf8(a) * embed_gf8(b));
            }
        }
        assert_eq!(image.len(), 8);
    }

    #[test]
    fn frobenius_orbits_and_fixed_points() {
        for a in all8() {
            assert_eq!(a.frobenius().frobenius().frobenius(), a);
        }
        let fixed8: Vec<_> = all8().into_iter().filter(|a| a.frobenius() == *a).collect();
        assert_eq!(fixed8, vec![Gf8::ZERO, Gf8::ONE]);

        let image: std::collections::BTreeSet<_> = all8().into_iter().map(embed_gf8).collect();
        for a in all64() {
            let mut x = a;
            for _ in 0..6 {
                x = x.frobenius();
            }
            assert_eq!(x, a);
            // Fixed by x ↦ x^8 exactly on the embedded GF(8).
            let f3 = a.frobenius().frobenius().frobenius();
            assert_eq!(f3 == a, image.contains(&a));
        }
        let fixed64 = all64().into_iter().filter(|a| a.frobenius() == *a).count();
        assert_eq!(fixed64, 2);

        let mut orbit = std::collections::BTreeSet::new();
        let mut x = Gf64::beta();
        for _ in 0..6 {
            orbit.insert(x);
            x = x.frobenius();
        }
        assert_eq!(orbit.len(), 6);
    }

    #[test]
    fn small_fields() {
        for a in Gf4::elements() {
            for b in Gf4::elements() {
                for c in Gf4::elements() {
                    assert_eq!(a * (b + c), a * b + a * c);
                    assert_eq!((a * b) * c, a * (b * c));
                }
            }
            if !a.is_zero() {
                assert_eq!(a * a.inv().unwrap(), Gf4::one());
            }
        }
        let w = Gf4::from_index(2);
        assert_eq!(w * w + w + Gf4::one(), Gf4::zero());
    }
}
