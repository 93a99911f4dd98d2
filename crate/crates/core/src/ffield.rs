//! Finite fields `F_{p^e}` as `F_p[x]/(m)`, univariate polynomial helpers, and
//! table-driven small fields for enumeration.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{is_prime_u64, pow_mod_u64, CoeffRing};
use crate::error::{domain_err, Error, Result};

/// `F_{p^e}` with a fixed irreducible modulus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldDesc {
    p: u64,
    e: u32,
    /// Low-to-high coefficients of the monic modulus without its leading 1.
    /// Empty for the prime field.
    modulus: Vec<u64>,
    order: BigUint,
}

impl FieldDesc {
    /// `F_p[x]/(m)` for a given monic irreducible `m` (low-to-high).
    pub fn with_modulus(p: u64, m: &[u64]) -> Result<Self> {
        let fp = crate::arith::Zmod::new(p)?;
        if !is_prime_u64(p) || m.last() != Some(&1) || !is_irreducible(&fp, m) {
            return Err(domain_err!("{m:?} is not a monic irreducible modulus over F_{p}"));
        }
        let e = (m.len() - 1) as u32;
        let order = num_traits::pow(BigUint::from(p), e as usize);
        let modulus = if e == 1 { Vec::new() } else { m[..m.len() - 1].to_vec() };
        Ok(FieldDesc { p, e, modulus, order })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Full monic modulus, low-to-high (empty for `e = 1`).
    pub fn modulus(&self) -> Vec<u64> {
        if self.e == 1 {
            return Vec::new();
        }
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Field order when it fits a machine word.
    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    pub fn zero(&self) -> FFElement {
        FFElement { coords: vec![0; self.e as usize] }
    }

    pub fn one(&self) -> FFElement {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> FFElement {
        let mut c = vec![0; self.e as usize];
        c[0] = v % self.p;
        FFElement { coords: c }
    }

    pub fn from_i64(&self, v: i64) -> FFElement {
        self.from_u64(v.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FFElement> {
        if coords.len() != self.e as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(domain_err!("coordinates {coords:?} do not describe an element of F_{}^{}", self.p, self.e));
        }
        Ok(FFElement { coords: coords.to_vec() })
    }

    /// The generator `x` of the extension (equal to `0` when `e = 1`).
    pub fn gen(&self) -> FFElement {
        let mut c = vec![0; self.e as usize];
        if self.e > 1 {
            c[1] = 1;
        }
        FFElement { coords: c }
    }

    /// Element with base-`p` digits of `index` as coordinates.
    pub fn element(&self, mut index: u64) -> FFElement {
        let mut c = vec![0; self.e as usize];
        for v in c.iter_mut() {
            *v = index % self.p;
            index /= self.p;
        }
        FFElement { coords: c }
    }

    pub fn index(&self, x: &FFElement) -> u64 {
        x.coords.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: &FFElement, b: &FFElement) -> FFElement {
        let p = self.p;
        FFElement { coords: a.coords.iter().zip(&b.coords).map(|(&x, &y)| add_mod(x, y, p)).collect() }
    }

    pub fn sub(&self, a: &FFElement, b: &FFElement) -> FFElement {
        let p = self.p;
        FFElement { coords: a.coords.iter().zip(&b.coords).map(|(&x, &y)| add_mod(x, p - y, p)).collect() }
    }

    pub fn neg(&self, a: &FFElement) -> FFElement {
        let p = self.p;
        FFElement { coords: a.coords.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect() }
    }

    pub fn mul(&self, a: &FFElement, b: &FFElement) -> FFElement {
        let p = self.p as u128;
        let e = self.e as usize;
        if e == 1 {
            return FFElement { coords: vec![(a.coords[0] as u128 * b.coords[0] as u128 % p) as u64] };
        }
        let mut prod = vec![0u128; 2 * e - 1];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // x^e = -(m_0 + m_1 x + ... + m_{e-1} x^{e-1})
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (j, &m) in self.modulus.iter().enumerate() {
                let t = c * m as u128 % p;
                prod[k - e + j] = (prod[k - e + j] + p - t) % p;
            }
        }
        FFElement { coords: prod[..e].iter().map(|&v| v as u64).collect() }
    }

    pub fn pow(&self, a: &FFElement, e: &BigUint) -> FFElement {
        let mut acc = self.one();
        for bit in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(bit) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn pow_u64(&self, a: &FFElement, e: u64) -> FFElement {
        self.pow(a, &BigUint::from(e))
    }

    pub fn inv(&self, a: &FFElement) -> Option<FFElement> {
        if a.is_zero() {
            return None;
        }
        Some(self.pow(a, &(&self.order - 2u32)))
    }

    /// `a^p`.
    pub fn frobenius(&self, a: &FFElement) -> FFElement {
        if self.e == 1 {
            return a.clone();
        }
        self.pow_u64(a, self.p)
    }

    /// Subfield embedding is not tracked; this checks membership of `F_p`.
    pub fn as_base(&self, a: &FFElement) -> Option<u64> {
        if a.coords[1..].iter().all(|&c| c == 0) {
            Some(a.coords[0])
        } else {
            None
        }
    }

    pub fn quadratic_character(&self, a: &FFElement) -> Result<i32> {
        if self.p == 2 {
            return Err(domain_err!("quadratic character needs odd characteristic"));
        }
        if a.is_zero() {
            return Ok(0);
        }
        let r = self.pow(a, &((&self.order - 1u32) >> 1));
        Ok(if r == self.one() { 1 } else { -1 })
    }

    /// `N(a) = a^((p^e - 1)/(p - 1))`.
    pub fn norm_to_base(&self, a: &FFElement) -> u64 {
        if a.is_zero() {
            return 0;
        }
        let n = self.pow(a, &((&self.order - 1u32) / (self.p - 1)));
        self.as_base(&n).expect("norm lies in the prime field")
    }

    /// Uniformly random element.
    pub fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> FFElement {
        FFElement { coords: (0..self.e).map(|_| rng.gen_range(0..self.p)).collect() }
    }

    pub fn ring(&self) -> GfRing {
        GfRing { desc: self.clone() }
    }
}

fn add_mod(x: u64, y: u64, p: u64) -> u64 {
    let s = x as u128 + y as u128;
    (if s >= p as u128 { s - p as u128 } else { s }) as u64
}

/// Element of a [`FieldDesc`], as low-to-high coordinates in the power basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FFElement {
    coords: Vec<u64>,
}

impl FFElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// `F_{p^e}` with the lexicographically smallest monic irreducible modulus,
/// comparing coefficients from the constant term upwards.
pub fn field_construct(p: u64, e: u32) -> Result<FieldDesc> {
    if !is_prime_u64(p) {
        return Err(domain_err!("{p} is not prime"));
    }
    if e == 0 {
        return Err(domain_err!("extension degree must be positive"));
    }
    let order = num_traits::pow(BigUint::from(p), e as usize);
    if e == 1 {
        return Ok(FieldDesc { p, e, modulus: Vec::new(), order });
    }
    let fp = crate::arith::Zmod::new(p)?;
    let mut low = vec![0u64; e as usize];
    loop {
        let mut f = low.clone();
        f.push(1);
        if is_irreducible(&fp, &f) {
            return Ok(FieldDesc { p, e, modulus: low, order });
        }
        // base-p counter with the constant term as the leading digit
        let mut k = 0;
        loop {
            if k == low.len() {
                return Err(Error::Inconsistent(format!("no irreducible of degree {e} over F_{p}")));
            }
            low[k] += 1;
            if low[k] < p {
                break;
            }
            low[k] = 0;
            k += 1;
        }
        if low.iter().all(|&c| c == 0) {
            return Err(Error::Inconsistent(format!("no irreducible of degree {e} over F_{p}")));
        }
    }
}

/// Rabin's irreducibility test for a monic polynomial over a finite field of
/// order `ring_order`.
pub fn is_irreducible<R: FiniteField>(ring: &R, f: &[R::Elem]) -> bool {
    let n = degree(ring, f);
    let Some(n) = n else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![ring.zero(), ring.one()];
    let q = ring.field_order();
    let frob = |g: &Vec<R::Elem>, times: usize| -> Vec<R::Elem> {
        let mut r = g.clone();
        for _ in 0..times {
            r = powmod(ring, &r, &q, f);
        }
        r
    };
    if !poly_eq(ring, &frob(&x, n), &x) {
        return false;
    }
    let mut m = n;
    let mut r = 2;
    let mut primes = Vec::new();
    while r * r <= m {
        if m % r == 0 {
            primes.push(r);
            while m % r == 0 {
                m /= r;
            }
        }
        r += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for r in primes {
        let h = sub(ring, &frob(&x, n / r), &x);
        let g = gcd(ring, &h, f);
        if degree(ring, &g) != Some(0) {
            return false;
        }
    }
    true
}

/// Coefficient rings that are finite fields.
pub trait FiniteField: CoeffRing {
    fn field_order(&self) -> BigUint;
    fn characteristic(&self) -> u64;
    fn random_elem<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;
}

impl FiniteField for crate::arith::Zmod {
    fn field_order(&self) -> BigUint {
        BigUint::from(self.m())
    }

    fn characteristic(&self) -> u64 {
        self.m()
    }

    fn random_elem<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.m())
    }
}

/// [`FieldDesc`] as a coefficient ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GfRing {
    desc: FieldDesc,
}

impl GfRing {
    pub fn desc(&self) -> &FieldDesc {
        &self.desc
    }
}

impl CoeffRing for GfRing {
    type Elem = FFElement;
    type Acc = FFElement;

    fn zero(&self) -> FFElement {
        self.desc.zero()
    }

    fn one(&self) -> FFElement {
        self.desc.one()
    }

    fn is_zero(&self, a: &FFElement) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &FFElement, b: &FFElement) -> FFElement {
        self.desc.add(a, b)
    }

    fn sub(&self, a: &FFElement, b: &FFElement) -> FFElement {
        self.desc.sub(a, b)
    }

    fn neg(&self, a: &FFElement) -> FFElement {
        self.desc.neg(a)
    }

    fn mul(&self, a: &FFElement, b: &FFElement) -> FFElement {
        self.desc.mul(a, b)
    }

    fn from_bigint(&self, v: &BigInt) -> FFElement {
        let r = v.mod_floor(&BigInt::from(self.desc.p)).to_u64().unwrap();
        self.desc.from_u64(r)
    }

    fn from_rational(&self, v: &BigRational) -> Option<FFElement> {
        let d = self.from_bigint(v.denom());
        let inv = self.desc.inv(&d)?;
        Some(self.desc.mul(&self.from_bigint(v.numer()), &inv))
    }

    fn inv(&self, a: &FFElement) -> Option<FFElement> {
        self.desc.inv(a)
    }

    fn acc_zero(&self) -> FFElement {
        self.desc.zero()
    }

    fn acc_mul_add(&self, acc: &mut FFElement, a: &FFElement, b: &FFElement) {
        *acc = self.desc.add(acc, &self.desc.mul(a, b));
    }

    fn acc_reduce(&self, acc: &FFElement) -> FFElement {
        acc.clone()
    }

    fn tag(&self) -> String {
        format!("F_{}^{}", self.desc.p, self.desc.e)
    }

    fn fmt_elem(&self, a: &FFElement) -> String {
        match self.desc.as_base(a) {
            Some(v) => v.to_string(),
            None => format!("{:?}", a.coords),
        }
    }
}

impl FiniteField for GfRing {
    fn field_order(&self) -> BigUint {
        self.desc.order.clone()
    }

    fn characteristic(&self) -> u64 {
        self.desc.p
    }

    fn random_elem<G: Rng + ?Sized>(&self, rng: &mut G) -> FFElement {
        self.desc.random(rng)
    }
}

// Univariate polynomials as low-to-high coefficient vectors.

pub fn trim<R: CoeffRing>(ring: &R, mut f: Vec<R::Elem>) -> Vec<R::Elem> {
    while f.last().is_some_and(|c| ring.is_zero(c)) {
        f.pop();
    }
    f
}

/// `None` for the zero polynomial.
pub fn degree<R: CoeffRing>(ring: &R, f: &[R::Elem]) -> Option<usize> {
    f.iter().rposition(|c| !ring.is_zero(c))
}

pub fn poly_eq<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> bool {
    let n = a.len().max(b.len());
    let z = ring.zero();
    (0..n).all(|i| a.get(i).unwrap_or(&z) == b.get(i).unwrap_or(&z))
}

pub fn add<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    let z = ring.zero();
    trim(ring, (0..n).map(|i| ring.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect())
}

pub fn sub<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    let z = ring.zero();
    trim(ring, (0..n).map(|i| ring.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect())
}

pub fn mul<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ring.add(&out[i + j], &ring.mul(x, y));
        }
    }
    trim(ring, out)
}

pub fn scale<R: CoeffRing>(ring: &R, a: &[R::Elem], c: &R::Elem) -> Vec<R::Elem> {
    trim(ring, a.iter().map(|x| ring.mul(x, c)).collect())
}

/// Quotient and remainder; the divisor must have an invertible leading coefficient.
pub fn divrem<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> (Vec<R::Elem>, Vec<R::Elem>) {
    let db = degree(ring, b).expect("division by zero polynomial");
    let lead_inv = ring.inv(&b[db]).expect("leading coefficient must be a unit");
    let mut r = trim(ring, a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![ring.zero(); r.len() - db];
    while let Some(dr) = degree(ring, &r) {
        if dr < db {
            break;
        }
        let c = ring.mul(&r[dr], &lead_inv);
        let shift = dr - db;
        for (j, bj) in b[..=db].iter().enumerate() {
            r[shift + j] = ring.sub(&r[shift + j], &ring.mul(&c, bj));
        }
        q[shift] = c;
        r = trim(ring, r);
    }
    (trim(ring, q), r)
}

pub fn rem<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    divrem(ring, a, b).1
}

pub fn monic<R: CoeffRing>(ring: &R, a: &[R::Elem]) -> Vec<R::Elem> {
    match degree(ring, a) {
        None => Vec::new(),
        Some(d) => {
            let inv = ring.inv(&a[d]).expect("field coefficient");
            scale(ring, &a[..=d], &inv)
        }
    }
}

/// Monic gcd over a field.
pub fn gcd<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let mut x = trim(ring, a.to_vec());
    let mut y = trim(ring, b.to_vec());
    while !y.is_empty() {
        let r = rem(ring, &x, &y);
        x = y;
        y = r;
    }
    monic(ring, &x)
}

pub fn mulmod<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem], m: &[R::Elem]) -> Vec<R::Elem> {
    rem(ring, &mul(ring, a, b), m)
}

/// `a^e mod m`.
pub fn powmod<R: CoeffRing>(ring: &R, a: &[R::Elem], e: &BigUint, m: &[R::Elem]) -> Vec<R::Elem> {
    let mut acc = rem(ring, &[ring.one()], m);
    let base = rem(ring, a, m);
    for bit in (0..e.bits()).rev() {
        acc = mulmod(ring, &acc, &acc, m);
        if e.bit(bit) {
            acc = mulmod(ring, &acc, &base, m);
        }
    }
    acc
}

pub fn derivative<R: CoeffRing>(ring: &R, a: &[R::Elem]) -> Vec<R::Elem> {
    trim(ring, a.iter().enumerate().skip(1).map(|(k, c)| ring.mul(&ring.from_i64(k as i64), c)).collect())
}

pub fn eval<R: CoeffRing>(ring: &R, a: &[R::Elem], x: &R::Elem) -> R::Elem {
    a.iter().rev().fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, x), c))
}

/// `T^(Q^i) mod g` where `Q` is the field order, by repeated `Q`-th powering.
fn frobenius_power<R: FiniteField>(ring: &R, g: &[R::Elem], i: u32) -> Vec<R::Elem> {
    let q = ring.field_order();
    let mut t = rem(ring, &[ring.zero(), ring.one()], g);
    for _ in 0..i {
        t = powmod(ring, &t, &q, g);
    }
    t
}

/// Number of distinct roots of `g` in the degree-`i` extension of its field.
pub fn count_roots<R: FiniteField>(ring: &R, g: &[R::Elem], i: u32) -> Result<usize> {
    let Some(d) = degree(ring, g) else {
        return Err(domain_err!("the zero polynomial has no root count"));
    };
    if d == 0 {
        return Ok(0);
    }
    let g = monic(ring, g);
    let t = frobenius_power(ring, &g, i);
    let h = sub(ring, &t, &[ring.zero(), ring.one()]);
    Ok(degree(ring, &gcd(ring, &h, &g)).unwrap_or(d))
}

/// Distinct roots of `g` lying in the coefficient field, found by
/// equal-degree splitting.
pub fn roots<R: FiniteField, G: Rng + ?Sized>(ring: &R, g: &[R::Elem], rng: &mut G) -> Vec<R::Elem> {
    let Some(d) = degree(ring, g) else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let g = monic(ring, g);
    let t = frobenius_power(ring, &g, 1);
    let h = sub(ring, &t, &[ring.zero(), ring.one()]);
    let split = gcd(ring, &h, &g);
    let mut out = Vec::new();
    split_linear(ring, &split, rng, &mut out);
    out
}

fn split_linear<R: FiniteField, G: Rng + ?Sized>(ring: &R, f: &[R::Elem], rng: &mut G, out: &mut Vec<R::Elem>) {
    let Some(d) = degree(ring, f) else { return };
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(ring.neg(&f[0]));
        return;
    }
    let q = ring.field_order();
    let exp: BigUint = (&q - 1u32) >> 1;
    loop {
        let a = ring.random_elem(rng);
        let shifted = vec![a, ring.one()];
        let w = powmod(ring, &shifted, &exp, f);
        let w = sub(ring, &w, &[ring.one()]);
        let h = gcd(ring, &w, f);
        let dh = degree(ring, &h).unwrap_or(0);
        if dh > 0 && dh < d {
            let (other, _) = divrem(ring, f, &h);
            split_linear(ring, &h, rng, out);
            split_linear(ring, &other, rng, out);
            return;
        }
    }
}

/// Irreducible factors of a squarefree monic `f` whose factors all have
/// degree `k` (Cantor-Zassenhaus, odd characteristic).
pub fn equal_degree_factors<R: FiniteField, G: Rng + ?Sized>(
    ring: &R,
    f: &[R::Elem],
    k: usize,
    rng: &mut G,
) -> Vec<Vec<R::Elem>> {
    let f = monic(ring, f);
    let d = degree(ring, &f).unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    if d == k {
        return vec![f];
    }
    let q = ring.field_order();
    let exp: BigUint = (num_traits::pow(q, k) - 1u32) >> 1;
    loop {
        let a: Vec<R::Elem> = (0..d).map(|_| ring.random_elem(rng)).collect();
        let a = trim(ring, a);
        if degree(ring, &a).unwrap_or(0) == 0 {
            continue;
        }
        let w = sub(ring, &powmod(ring, &a, &exp, &f), &[ring.one()]);
        let h = gcd(ring, &w, &f);
        let dh = degree(ring, &h).unwrap_or(0);
        if dh > 0 && dh < d {
            let (other, _) = divrem(ring, &f, &h);
            let mut out = equal_degree_factors(ring, &h, k, rng);
            out.extend(equal_degree_factors(ring, &other, k, rng));
            return out;
        }
    }
}

/// Distinct-degree factorization of a squarefree monic `f`: pairs
/// `(k, product of the degree-k irreducible factors)`.
pub fn distinct_degree<R: FiniteField>(ring: &R, f: &[R::Elem]) -> Vec<(usize, Vec<R::Elem>)> {
    let mut out = Vec::new();
    let mut rest = monic(ring, f);
    let q = ring.field_order();
    let x = vec![ring.zero(), ring.one()];
    let mut t = x.clone();
    let mut k = 0;
    while let Some(d) = degree(ring, &rest) {
        if d == 0 {
            break;
        }
        k += 1;
        if 2 * k > d {
            out.push((d, rest.clone()));
            break;
        }
        t = powmod(ring, &t, &q, &rest);
        let g = gcd(ring, &sub(ring, &t, &x), &rest);
        if degree(ring, &g).unwrap_or(0) > 0 {
            rest = divrem(ring, &rest, &g).0;
            t = rem(ring, &t, &rest);
            out.push((k, g));
        }
    }
    out
}

/// Table-driven field of order below `2^24`, elements encoded by their
/// base-`p` index. Multiplication by discrete logarithms, addition by Zech
/// logarithms.
#[derive(Clone, Debug)]
pub struct SmallField {
    desc: FieldDesc,
    q: u32,
    /// `exp[k]` = index of `g^k`, `k < q - 1`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`.
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, `u32::MAX` when `1 + g^k = 0`.
    zech: Vec<u32>,
}

pub const ZERO_LOG: u32 = u32::MAX;

impl SmallField {
    pub const MAX_ORDER: u64 = 1 << 24;

    pub fn new(desc: &FieldDesc) -> Result<Self> {
        let q = desc
            .order_u64()
            .filter(|&q| q <= Self::MAX_ORDER)
            .ok_or_else(|| Error::Resource(format!("field F_{}^{} is too large for tables", desc.p, desc.e)))?;
        let g = primitive_element(desc);
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; n];
        let mut log = vec![ZERO_LOG; q as usize];
        let mut x = desc.one();
        for (k, slot) in exp.iter_mut().enumerate() {
            let ix = desc.index(&x) as u32;
            *slot = ix;
            log[ix as usize] = k as u32;
            x = desc.mul(&x, &g);
        }
        let one = desc.one();
        let zech = (0..n)
            .map(|k| {
                let y = desc.add(&one, &desc.element(exp[k] as u64));
                if y.is_zero() {
                    ZERO_LOG
                } else {
                    log[desc.index(&y) as usize]
                }
            })
            .collect();
        Ok(SmallField { desc: desc.clone(), q: q as u32, exp, log, zech })
    }

    pub fn desc(&self) -> &FieldDesc {
        &self.desc
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Log of the element with the given index (`ZERO_LOG` for zero).
    pub fn log(&self, index: u32) -> u32 {
        self.log[index as usize]
    }

    pub fn exp(&self, l: u32) -> u32 {
        if l == ZERO_LOG {
            0
        } else {
            self.exp[l as usize]
        }
    }

    /// Product in log form.
    #[inline]
    pub fn lmul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO_LOG || b == ZERO_LOG {
            return ZERO_LOG;
        }
        let s = a as u64 + b as u64;
        let n = (self.q - 1) as u64;
        (if s >= n { s - n } else { s }) as u32
    }

    /// Sum in log form.
    #[inline]
    pub fn ladd(&self, a: u32, b: u32) -> u32 {
        if a == ZERO_LOG {
            return b;
        }
        if b == ZERO_LOG {
            return a;
        }
        let n = self.q - 1;
        let d = if b >= a { b - a } else { b + n - a };
        let z = self.zech[d as usize];
        if z == ZERO_LOG {
            ZERO_LOG
        } else {
            self.lmul(a, z)
        }
    }

    /// `log` of an integer constant.
    pub fn log_of_int(&self, v: i64) -> u32 {
        let r = v.rem_euclid(self.desc.p as i64) as u32;
        self.log[r as usize]
    }

    /// Quadratic character of an element in log form.
    #[inline]
    pub fn chi_log(&self, a: u32) -> i32 {
        if a == ZERO_LOG {
            0
        } else if a.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Smallest-index generator of the multiplicative group.
pub fn primitive_element(desc: &FieldDesc) -> FFElement {
    let n = &desc.order - 1u32;
    let factors = prime_factors_big(&n);
    let mut k = 1u64;
    loop {
        let x = desc.element(k);
        if !x.is_zero() && factors.iter().all(|f| desc.pow(&x, &(&n / f)) != desc.one()) {
            return x;
        }
        k += 1;
    }
}

/// Distinct prime factors by trial division (the inputs here are field
/// orders minus one, small enough for that).
pub fn prime_factors_big(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut d = BigUint::from(2u32);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            out.push(d.clone());
            while (&m % &d).is_zero() {
                m /= &d;
            }
        }
        d += 1u32;
    }
    if m > BigUint::one() {
        out.push(m);
    }
    out
}

/// Legendre symbol via Euler's criterion for native primes.
pub fn chi_prime(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        0
    } else if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Zmod;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zp(p: u64, v: &[i64]) -> Vec<u64> {
        v.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect()
    }

    #[test]
    fn construct_prime_field() {
        let f = field_construct(7, 1).unwrap();
        assert!(f.modulus().is_empty());
        assert!(field_construct(9, 1).is_err());
    }

    #[test]
    fn construct_is_lexicographically_first() {
        // oracle: monic quadratics over F_5 in the same order, first without roots
        let mut expected = None;
        for idx in 0..25u64 {
            let (c0, c1) = (idx % 5, idx / 5);
            if (0..5u64).all(|x| (x * x + c1 * x + c0) % 5 != 0) {
                expected = Some(vec![c0, c1, 1]);
                break;
            }
        }
        let f = field_construct(5, 2).unwrap();
        assert_eq!(Some(f.modulus()), expected);
        // x^2 + 2 is irreducible over F_5
        let fp = Zmod::new(5).unwrap();
        assert!(is_irreducible(&fp, &[2, 0, 1]));
    }

    #[test]
    fn degree_three_field() {
        let f = field_construct(3, 3).unwrap();
        let x = f.gen();
        assert_eq!(f.pow_u64(&x, 27), x);
        assert_ne!(f.pow_u64(&x, 3), x);
    }

    #[test]
    fn quadratic_character_examples() {
        let f = field_construct(7, 1).unwrap();
        assert_eq!(f.quadratic_character(&f.zero()).unwrap(), 0);
        assert_eq!(f.quadratic_character(&f.one()).unwrap(), 1);
        assert_eq!(f.quadratic_character(&f.from_u64(3)).unwrap(), -1);
        assert!(field_construct(2, 2).unwrap().quadratic_character(&field_construct(2, 2).unwrap().one()).is_err());
    }

    #[test]
    fn character_sums_vanish() {
        for (p, e) in [(3u64, 1u32), (3, 2), (5, 3), (7, 3), (11, 2)] {
            let f = field_construct(p, e).unwrap();
            let q = f.order_u64().unwrap();
            let mut s = 0;
            for k in 0..q {
                s += f.quadratic_character(&f.element(k)).unwrap();
            }
            assert_eq!(s, 0, "p={p} e={e}");
            for a in (1..q).step_by(7) {
                for b in (1..q).step_by(5) {
                    let (x, y) = (f.element(a), f.element(b));
                    let lhs = f.quadratic_character(&f.mul(&x, &y)).unwrap();
                    let rhs = f.quadratic_character(&x).unwrap() * f.quadratic_character(&y).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn norm_is_conjugate_product() {
        for (p, e) in [(5u64, 2u32), (5, 3), (3, 4), (2, 6), (11, 2)] {
            let f = field_construct(p, e).unwrap();
            for k in 0..f.order_u64().unwrap() {
                let x = f.element(k);
                let mut prod = f.one();
                let mut c = x.clone();
                for _ in 0..e {
                    prod = f.mul(&prod, &c);
                    c = f.frobenius(&c);
                }
                assert_eq!(f.as_base(&prod).unwrap(), f.norm_to_base(&x));
            }
        }
        let f = field_construct(5, 2).unwrap();
        assert_eq!(f.norm_to_base(&f.from_u64(3)), 4);
        assert_eq!(f.norm_to_base(&f.zero()), 0);
    }

    #[test]
    fn count_roots_examples() {
        let fp = Zmod::new(7).unwrap();
        assert_eq!(count_roots(&fp, &zp(7, &[-1, 0, 1]), 1).unwrap(), 2);
        assert_eq!(count_roots(&fp, &zp(7, &[-3, 0, 1]), 1).unwrap(), 0);
        assert_eq!(count_roots(&fp, &zp(7, &[-3, 0, 1]), 2).unwrap(), 2);
        let mut g = vec![0u64; 8];
        g[1] = 6;
        g[7] = 1;
        assert_eq!(count_roots(&fp, &g, 1).unwrap(), 7);
        assert!(count_roots(&fp, &[], 1).is_err());
    }

    #[test]
    fn count_roots_over_extension() {
        let f = field_construct(3, 2).unwrap();
        let r = f.ring();
        // T^2 - x where x generates F_9: a root exists in F_81 but not F_9
        let g = vec![f.neg(&f.gen()), f.zero(), f.one()];
        let chi = f.quadratic_character(&f.gen()).unwrap();
        assert_eq!(count_roots(&r, &g, 1).unwrap(), if chi == 1 { 2 } else { 0 });
        assert_eq!(count_roots(&r, &g, 2).unwrap(), 2);
    }

    #[test]
    fn split_products_count_fully() {
        let fp = Zmod::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut g = vec![1u64];
        for r in [2u64, 5, 7, 10] {
            g = mul(&fp, &g, &[11 - r, 1]);
        }
        assert_eq!(count_roots(&fp, &g, 1).unwrap(), 4);
        let mut rs = roots(&fp, &g, &mut rng);
        rs.sort();
        assert_eq!(rs, vec![2, 5, 7, 10]);
    }

    #[test]
    fn distinct_degree_splits_by_degree() {
        let fp = Zmod::new(5).unwrap();
        // (x - 1)(x^2 + 2)(x^2 + 3)
        let f = mul(&fp, &mul(&fp, &[4, 1], &[2, 0, 1]), &[3, 0, 1]);
        let parts = distinct_degree(&fp, &f);
        let degs: Vec<(usize, usize)> = parts.iter().map(|(k, g)| (*k, degree(&fp, g).unwrap())).collect();
        assert_eq!(degs, vec![(1, 1), (2, 4)]);
    }

    #[test]
    fn small_field_tables_agree() {
        for (p, e) in [(7u64, 1u32), (5, 2), (3, 3), (7, 2)] {
            let f = field_construct(p, e).unwrap();
            let t = SmallField::new(&f).unwrap();
            let q = t.order();
            for a in 0..q {
                for b in (0..q).step_by(3) {
                    let (x, y) = (f.element(a as u64), f.element(b as u64));
                    let s = t.exp(t.ladd(t.log(a), t.log(b)));
                    assert_eq!(s as u64, f.index(&f.add(&x, &y)));
                    let m = t.exp(t.lmul(t.log(a), t.log(b)));
                    assert_eq!(m as u64, f.index(&f.mul(&x, &y)));
                }
                assert_eq!(t.chi_log(t.log(a)), f.quadratic_character(&f.element(a as u64)).unwrap());
            }
        }
    }

    #[test]
    fn equal_degree_split() {
        let r = Zmod::new(7).unwrap();
        // x^2 + 1 and x^2 + x + 3 are irreducible over F_7
        let a = vec![1u64, 0, 1];
        let b = vec![3u64, 1, 1];
        let f = mul(&r, &a, &b);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut parts = equal_degree_factors(&r, &f, 2, &mut rng);
        parts.sort();
        assert_eq!(parts, vec![vec![1, 0, 1], vec![3, 1, 1]]);
        let k = FieldDesc::with_modulus(7, &b).unwrap();
        assert_eq!(k.e(), 2);
        let x = k.gen();
        assert!(eval(&k.ring(), &[k.from_u64(3), k.one(), k.one()], &x).is_zero());
        assert!(FieldDesc::with_modulus(7, &f).is_err());
    }
}
