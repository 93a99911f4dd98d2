//! Coefficient rings shared by the polynomial, matrix and counting layers.
//!
//! A [`CoeffRing`] is a run-time descriptor (modulus, field, ...) together with
//! an element type. Elements never carry their ring; every operation goes
//! through the descriptor, and two descriptors compare equal exactly when the
//! rings coincide. Accumulators let hot loops defer modular reduction.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

// Conversions go through the ring value, which carries the modulus.
#[allow(clippy::wrong_self_convention)]
pub trait CoeffRing: Clone + PartialEq + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;
    /// Lazily reduced sum of products.
    type Acc: Clone + Send;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Image of an integer.
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Image of a rational, `None` when the denominator is not invertible.
    fn from_rational(&self, v: &BigRational) -> Option<Self::Elem>;
    /// Multiplicative inverse, `None` for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn acc_zero(&self) -> Self::Acc;
    fn acc_mul_add(&self, acc: &mut Self::Acc, a: &Self::Elem, b: &Self::Elem);
    fn acc_reduce(&self, acc: &Self::Acc) -> Self::Elem;

    /// Short tag naming the domain, used in mismatch errors.
    fn tag(&self) -> String;
    /// Coefficient text in the polynomial grammar.
    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("{} vs {}", self.tag(), other.tag())))
        }
    }
}

/// Rings whose elements are residues modulo an integer (used for traces and
/// congruences).
#[allow(clippy::wrong_self_convention)]
pub trait ResidueRing: CoeffRing {
    fn modulus(&self) -> BigUint;
    fn to_biguint(&self, a: &Self::Elem) -> BigUint;
    fn from_biguint(&self, v: &BigUint) -> Self::Elem;
}

/// `Z/mZ` for `2 <= m < 2^63`, elements stored reduced in `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Zmod {
    m: u64,
    /// Largest accumulator value that can absorb one more product.
    acc_limit: u128,
}

impl Zmod {
    pub fn new(m: u64) -> Result<Self> {
        if !(2..1 << 63).contains(&m) {
            return Err(Error::Domain(format!("native modulus {m} out of range")));
        }
        let max_prod = (m as u128 - 1) * (m as u128 - 1);
        Ok(Zmod { m, acc_limit: u128::MAX - max_prod })
    }

    /// `None` when the modulus does not fit the native representation.
    pub fn try_from_biguint(m: &BigUint) -> Option<Self> {
        m.to_u64().and_then(|v| Zmod::new(v).ok())
    }

    #[inline]
    pub fn m(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.m as i128) as u64
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }
}

impl CoeffRing for Zmod {
    type Elem = u64;
    type Acc = u128;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.m - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulmod(*a, *b)
    }

    fn from_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.m);
        v.mod_floor(&m).to_u64().unwrap()
    }

    fn from_rational(&self, v: &BigRational) -> Option<u64> {
        let num = self.from_bigint(v.numer());
        let den = self.from_bigint(v.denom());
        self.inv(&den).map(|d| self.mul(&num, &d))
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        let g = (*a as i128).extended_gcd(&(self.m as i128));
        if g.gcd != 1 {
            return None;
        }
        Some(self.reduce_i128(g.x))
    }

    #[inline]
    fn acc_zero(&self) -> u128 {
        0
    }
    #[inline]
    fn acc_mul_add(&self, acc: &mut u128, a: &u64, b: &u64) {
        if *acc > self.acc_limit {
            *acc %= self.m as u128;
        }
        *acc += *a as u128 * *b as u128;
    }
    #[inline]
    fn acc_reduce(&self, acc: &u128) -> u64 {
        (*acc % self.m as u128) as u64
    }

    fn tag(&self) -> String {
        format!("Z/{}", self.m)
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

impl ResidueRing for Zmod {
    fn modulus(&self) -> BigUint {
        BigUint::from(self.m)
    }
    fn to_biguint(&self, a: &u64) -> BigUint {
        BigUint::from(*a)
    }
    fn from_biguint(&self, v: &BigUint) -> u64 {
        (v % self.m).to_u64().unwrap()
    }
}

/// `Z/mZ` for arbitrary moduli. Slow; used when `p^l` exceeds the native range.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZmodBig {
    m: BigUint,
}

impl ZmodBig {
    pub fn new(m: BigUint) -> Result<Self> {
        if m < BigUint::from(2u32) {
            return Err(Error::Domain("modulus must be at least 2".into()));
        }
        Ok(ZmodBig { m })
    }
}

impl CoeffRing for ZmodBig {
    type Elem = BigUint;
    type Acc = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.m - b
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.m - a
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.m
    }
    fn from_bigint(&self, v: &BigInt) -> BigUint {
        let m = BigInt::from_biguint(Sign::Plus, self.m.clone());
        v.mod_floor(&m).to_biguint().unwrap()
    }
    fn from_rational(&self, v: &BigRational) -> Option<BigUint> {
        let num = self.from_bigint(v.numer());
        let den = self.from_bigint(v.denom());
        self.inv(&den).map(|d| self.mul(&num, &d))
    }
    fn inv(&self, a: &BigUint) -> Option<BigUint> {
        mod_inverse(a, &self.m)
    }
    fn acc_zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn acc_mul_add(&self, acc: &mut BigUint, a: &BigUint, b: &BigUint) {
        *acc += a * b;
    }
    fn acc_reduce(&self, acc: &BigUint) -> BigUint {
        acc % &self.m
    }
    fn tag(&self) -> String {
        format!("Z/{}", self.m)
    }
    fn fmt_elem(&self, a: &BigUint) -> String {
        a.to_string()
    }
}

impl ResidueRing for ZmodBig {
    fn modulus(&self) -> BigUint {
        self.m.clone()
    }
    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn from_biguint(&self, v: &BigUint) -> BigUint {
        v % &self.m
    }
}

/// The field of rationals.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type Elem = BigRational;
    type Acc = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_rational(&self, v: &BigRational) -> Option<BigRational> {
        Some(v.clone())
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn acc_zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn acc_mul_add(&self, acc: &mut BigRational, a: &BigRational, b: &BigRational) {
        *acc += a * b;
    }
    fn acc_reduce(&self, acc: &BigRational) -> BigRational {
        acc.clone()
    }
    fn tag(&self) -> String {
        "Q".into()
    }
    fn fmt_elem(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a % m);
    let mi = BigInt::from_biguint(Sign::Plus, m.clone());
    let g = a.extended_gcd(&mi);
    if !g.gcd.is_one() {
        return None;
    }
    g.x.mod_floor(&mi).to_biguint()
}

/// `b^e mod m` for native moduli.
pub fn pow_mod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    let mut base = (b % m) as u128;
    let mut acc = 1u128 % m as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| n % 2 == 1 && is_prime_u64(n)).collect()
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod_u64(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Generalised binomial coefficient `binom(n, k)` for integer `n` and `k >= 0`.
pub fn binomial(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n) - BigInt::from(j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Exact integer `base^exp`.
pub fn big_pow(base: u64, exp: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Integer square root test: `Some(r)` with `r^2 = n` when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}
