//! Residues modulo `p^l`, Teichmüller lifts, and the coefficient vectors that
//! turn power traces into point counts.
//!
//! Two vectors are produced here. The characteristic vector
//! `((-1)^(k+1) binom(l,k))_k` expands `(1 - x)^l`, which is `1 mod p^l` when
//! `x = 0 mod p` and `0 mod p^l` when `x = 1 mod p`. The Eulerian vector is the
//! first row of the inverse of the Pascal-like matrix
//! `P_b[r][c] = binom(b + 2r, c)`; combined with the powers `x^(b + 2k - 2)`
//! of `x = ±(1 + sp)` it isolates the sign `±1` modulo `p^l`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{binomial, factorial, is_prime_u64, mod_inverse, Zmod, ZmodBig};
use crate::error::{domain_err, Error, Result};

/// The prime `p` and the number `l` of `p`-adic digits carried.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PadicContext {
    p: u64,
    l: u32,
    modulus: BigUint,
}

impl PadicContext {
    pub fn new(p: u64, l: u32) -> Result<Self> {
        if p < 3 || !is_prime_u64(p) {
            return Err(domain_err!("p = {p} must be an odd prime"));
        }
        if l == 0 {
            return Err(domain_err!("precision must be at least one digit"));
        }
        let modulus = num_traits::pow(BigUint::from(p), l as usize);
        Ok(PadicContext { p, l, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `p^l`.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Native residue ring when `p^l < 2^63`.
    pub fn native_ring(&self) -> Option<Zmod> {
        Zmod::try_from_biguint(&self.modulus)
    }

    pub fn big_ring(&self) -> ZmodBig {
        ZmodBig::new(self.modulus.clone()).expect("p^l >= 3")
    }

    pub fn int(&self, v: &BigInt) -> PadicInt {
        let m = BigInt::from(self.modulus.clone());
        PadicInt { ctx: self.clone(), residue: v.mod_floor(&m).to_biguint().unwrap() }
    }

    pub fn from_u64(&self, v: u64) -> PadicInt {
        self.int(&BigInt::from(v))
    }

    pub fn from_biguint(&self, v: &BigUint) -> PadicInt {
        PadicInt { ctx: self.clone(), residue: v % &self.modulus }
    }

    /// Reduction of a `p`-integral rational.
    pub fn rational(&self, v: &BigRational) -> Result<PadicInt> {
        let den = self.int(v.denom());
        let inv = mod_inverse(&den.residue, &self.modulus)
            .ok_or_else(|| domain_err!("denominator {} is not a p-adic unit", v.denom()))?;
        let num = self.int(v.numer());
        Ok(self.from_biguint(&(num.residue * inv)))
    }
}

/// An element of `Z/p^l`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PadicInt {
    ctx: PadicContext,
    residue: BigUint,
}

impl PadicInt {
    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    /// Representative in `[0, p^l)`.
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    /// Representative in `(-p^l/2, p^l/2]`.
    pub fn symmetric(&self) -> BigInt {
        let r = BigInt::from(self.residue.clone());
        let m = BigInt::from(self.ctx.modulus.clone());
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    fn check(&self, other: &PadicInt) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::DomainMismatch(format!(
                "Z/{}^{} vs Z/{}^{}",
                self.ctx.p, self.ctx.l, other.ctx.p, other.ctx.l
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(self.ctx.from_biguint(&(&self.residue + &other.residue)))
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(self.ctx.from_biguint(&(&self.residue + &self.ctx.modulus - &other.residue)))
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(self.ctx.from_biguint(&(&self.residue * &other.residue)))
    }

    pub fn neg(&self) -> PadicInt {
        self.ctx.from_biguint(&(&self.ctx.modulus - &self.residue))
    }

    pub fn pow(&self, e: &BigUint) -> PadicInt {
        PadicInt { ctx: self.ctx.clone(), residue: self.residue.modpow(e, &self.ctx.modulus) }
    }

    pub fn is_unit(&self) -> bool {
        !(&self.residue % self.ctx.p).is_zero()
    }

    /// Exact division by a unit.
    pub fn div(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        let inv = mod_inverse(&other.residue, &self.ctx.modulus)
            .ok_or_else(|| domain_err!("division by the non-unit {}", other.residue))?;
        Ok(self.ctx.from_biguint(&(&self.residue * inv)))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.ctx.p, self.ctx.l)
    }
}

/// The `(p-1)`-th root of unity in `Z/p^l` reducing to `x`.
pub fn teichmuller_lift(x: u64, ctx: &PadicContext) -> Result<PadicInt> {
    if x.is_multiple_of(ctx.p) {
        return Err(domain_err!("zero has no Teichmüller lift"));
    }
    let e = num_traits::pow(BigUint::from(ctx.p), (ctx.l - 1) as usize);
    Ok(ctx.from_u64(x).pow(&e))
}

/// Exact square matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(domain_err!("matrix is not square"));
        }
        Ok(RationalMatrix { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.rows[r][c]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= &a[col][col];
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &a[col][col];
                for c in col..n {
                    let t = &factor * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|r| (0..n).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(piv, col);
            inv.swap(piv, col);
            let d = a[col][col].clone();
            for c in 0..n {
                a[col][c] = &a[col][c] / &d;
                inv[col][c] = &inv[col][c] / &d;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let t = &factor * &a[col][c];
                    a[r][c] -= t;
                    let t = &factor * &inv[col][c];
                    inv[r][c] -= t;
                }
            }
        }
        Some(RationalMatrix { rows: inv })
    }
}

/// `P_b[r][c] = binom(b + 2r, c)` for `0 <= r, c < l`.
pub fn pascal_matrix(b: i64, l: usize) -> RationalMatrix {
    let rows = (0..l)
        .map(|r| (0..l).map(|c| BigRational::from_integer(binomial(b + 2 * r as i64, c as u64))).collect())
        .collect();
    RationalMatrix { rows }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoefficientKind {
    Characteristic,
    Eulerian { b: u64 },
}

/// Weights applied to the power traces in the counting congruences.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoefficientVector {
    pub ctx: PadicContext,
    pub values: Vec<PadicInt>,
    pub kind: CoefficientKind,
}

/// `((-1)^(k+1) binom(l, k))_{k = 1..l}` as integers.
pub fn char_fn_integers(l: usize) -> Vec<BigInt> {
    (1..=l)
        .map(|k| {
            let b = binomial(l as i64, k as u64);
            if k % 2 == 1 {
                b
            } else {
                -b
            }
        })
        .collect()
}

pub fn char_fn_coefficients(ctx: &PadicContext) -> CoefficientVector {
    let values = char_fn_integers(ctx.l as usize).iter().map(|v| ctx.int(v)).collect();
    CoefficientVector { ctx: ctx.clone(), values, kind: CoefficientKind::Characteristic }
}

/// `C_l = (2l)! / (2^(2l-1) l! (l-1)!)`.
pub fn eulerian_constant(l: usize) -> BigRational {
    let l64 = l as u64;
    let num = factorial(2 * l64);
    let den = num_traits::pow(BigInt::from(2), 2 * l - 1) * factorial(l64) * factorial(l64 - 1);
    BigRational::new(num, den)
}

/// Closed form `C_l (-1)^(k+1) binom(l-1, k-1) / (2k-1)` of the `b = 1` vector.
pub fn eulerian_closed_form(l: usize) -> Vec<BigRational> {
    let c = eulerian_constant(l);
    (1..=l)
        .map(|k| {
            let sign = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            let b = binomial(l as i64 - 1, k as u64 - 1);
            &c * BigRational::new(sign * b, BigInt::from(2 * k as i64 - 1))
        })
        .collect()
}

/// First row of the exact inverse of `P_b`.
pub fn eulerian_rational(l: usize, b: i64) -> Result<Vec<BigRational>> {
    let inv = pascal_matrix(b, l)
        .inverse()
        .ok_or_else(|| Error::Inconsistent(format!("Pascal-like matrix P_{b} of size {l} is singular")))?;
    Ok(inv.rows[0].clone())
}

/// Eulerian coefficient vector `A_{b,k}` reduced into `Z/p^l`, `l` taken from `ctx`.
pub fn eulerian_coefficients(ctx: &PadicContext, b: u64) -> Result<CoefficientVector> {
    if b.is_multiple_of(2) {
        return Err(domain_err!("shift parameter b = {b} must be odd"));
    }
    let l = ctx.l as usize;
    // The closed form divides by 2k - 1, which is only safe while p > 2l - 1.
    let rational =
        if b == 1 && ctx.p > 2 * l as u64 - 1 { eulerian_closed_form(l) } else { eulerian_rational(l, b as i64)? };
    let values = rational.iter().map(|v| ctx.rational(v)).collect::<Result<Vec<_>>>()?;
    Ok(CoefficientVector { ctx: ctx.clone(), values, kind: CoefficientKind::Eulerian { b } })
}

/// True when every denominator is a power of two.
pub fn denominators_are_powers_of_two(v: &[BigRational]) -> bool {
    v.iter().all(|x| {
        let d = x.denom().abs();
        let d = d.to_biguint().unwrap();
        d.count_ones() == 1
    })
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(v: &BigInt, p: u64) -> u32 {
    let mut n = v.abs();
    let p = BigInt::from(p);
    let mut k = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        k += 1;
    }
    k
}

#[allow(dead_code)]
fn as_u64(v: &BigUint) -> u64 {
    v.to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn teichmuller_examples() {
        let ctx = PadicContext::new(5, 2).unwrap();
        assert_eq!(teichmuller_lift(1, &ctx).unwrap().residue(), &BigUint::from(1u32));
        // oracle: 3^5 mod 25
        assert_eq!(teichmuller_lift(3, &ctx).unwrap().residue(), &BigUint::from(18u32));
        assert_eq!(teichmuller_lift(4, &ctx).unwrap().residue(), &BigUint::from(24u32));
        assert!(teichmuller_lift(5, &ctx).is_err());
    }

    #[test]
    fn teichmuller_grid() {
        for p in [3u64, 5, 7, 11] {
            for l in [1u32, 2, 5] {
                let ctx = PadicContext::new(p, l).unwrap();
                for x in 1..p {
                    let w = teichmuller_lift(x, &ctx).unwrap();
                    assert_eq!(w.pow(&BigUint::from(p - 1)).residue(), &BigUint::one());
                    assert_eq!(w.residue() % p, BigUint::from(x));
                }
            }
        }
    }

    #[test]
    fn char_fn_examples() {
        let ints = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect::<Vec<_>>();
        assert_eq!(char_fn_integers(1), ints(vec![1]));
        assert_eq!(char_fn_integers(3), ints(vec![3, -3, 1]));
        assert_eq!(char_fn_integers(5), ints(vec![5, -10, 10, -5, 1]));
    }

    #[test]
    fn pascal_examples() {
        let m = pascal_matrix(1, 2);
        assert_eq!(m.rows(), &[vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]]);
        assert_eq!(pascal_matrix(1, 3).determinant(), q(8, 1));
        assert_eq!(pascal_matrix(3, 1).rows(), &[vec![q(1, 1)]]);
    }

    #[test]
    fn eulerian_examples() {
        assert_eq!(eulerian_rational(1, 1).unwrap(), vec![q(1, 1)]);
        assert_eq!(eulerian_rational(2, 1).unwrap(), vec![q(3, 2), q(-1, 2)]);
        let ctx = PadicContext::new(7, 2).unwrap();
        let v = eulerian_coefficients(&ctx, 1).unwrap();
        let res: Vec<u64> = v.values.iter().map(|x| as_u64(x.residue())).collect();
        assert_eq!(res, vec![26, 24]);
        assert!(eulerian_coefficients(&ctx, 2).is_err());
        assert!(PadicContext::new(2, 3).is_err());
    }

    #[test]
    fn small_p_uses_matrix_path() {
        // p = 3 divides 2k - 1 = 3 at k = 2, the matrix path must still work.
        let ctx = PadicContext::new(3, 4).unwrap();
        let v = eulerian_coefficients(&ctx, 1).unwrap();
        let direct: Vec<PadicInt> = eulerian_rational(4, 1).unwrap().iter().map(|x| ctx.rational(x).unwrap()).collect();
        assert_eq!(v.values, direct);
    }

    #[test]
    fn pascal_inverse_is_two_integral() {
        for l in 1..=10 {
            for b in (1..=9).step_by(2) {
                let inv = pascal_matrix(b, l).inverse().expect("invertible");
                for row in inv.rows() {
                    assert!(denominators_are_powers_of_two(row), "l={l} b={b}");
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_inverse() {
        for l in 1..=10 {
            assert_eq!(eulerian_closed_form(l), eulerian_rational(l, 1).unwrap(), "l={l}");
        }
    }

    #[test]
    fn char_fn_row_combination() {
        // The char-fn vector combines the rows binom(k, j), k = 1..l, into (1, 0, ..., 0).
        for l in 1..=8usize {
            let coef = char_fn_integers(l);
            for j in 0..l {
                let s: BigInt = (1..=l).map(|k| &coef[k - 1] * binomial(k as i64, j as u64)).sum();
                assert_eq!(s, if j == 0 { BigInt::one() } else { BigInt::zero() }, "l={l} j={j}");
            }
        }
    }
}
