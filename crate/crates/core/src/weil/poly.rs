//! Integer and rational polynomials (low-to-high coefficient vectors),
//! Sturm counting and a floating-point root finder used only for estimates.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntPoly = Vec<BigInt>;
pub type QPoly = Vec<BigRational>;

pub fn trim<T: Zero>(mut a: Vec<T>) -> Vec<T> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn from_i64(c: &[i64]) -> IntPoly {
    trim(c.iter().map(|&v| BigInt::from(v)).collect())
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

pub fn pow(a: &[BigInt], e: usize) -> IntPoly {
    let mut out = vec![BigInt::one()];
    for _ in 0..e {
        out = mul(&out, a);
    }
    out
}

/// Quotient and remainder by a monic divisor.
pub fn divrem_monic(a: &[BigInt], b: &[BigInt]) -> (IntPoly, IntPoly) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
    }
    (trim(q), trim(r))
}

/// `a / b` when `b` is monic and divides `a`.
pub fn div_exact_monic(a: &[BigInt], b: &[BigInt]) -> Option<IntPoly> {
    let (q, r) = divrem_monic(a, b);
    r.is_empty().then_some(q)
}

pub fn eval(a: &[BigInt], x: &BigInt) -> BigInt {
    a.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn to_q(a: &[BigInt]) -> QPoly {
    a.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn q_derivative(a: &[BigRational]) -> QPoly {
    trim(a.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
}

fn q_rem(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &c * bj;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn q_div(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() <= db {
        return Vec::new();
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / &b[db];
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &c * bj;
        }
        q[k] = c;
    }
    trim(q)
}

fn q_normalize(a: QPoly) -> QPoly {
    match a.last() {
        Some(l) => {
            let s = l.abs();
            a.iter().map(|c| c / &s).collect()
        }
        None => a,
    }
}

fn q_gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = q_rem(&x, &y);
        x = y;
        y = q_normalize(r);
    }
    q_normalize(x)
}

fn q_eval(a: &[BigRational], x: &BigRational) -> BigRational {
    a.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn sturm_sequence(a: &[BigRational]) -> Vec<QPoly> {
    let mut seq = vec![q_normalize(a.to_vec()), q_normalize(q_derivative(a))];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = q_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(q_normalize(r.into_iter().map(|c| -c).collect()));
    }
    seq
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| {
            let v = q_eval(p, x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// True when every complex root of `a` is real and lies in `[lo, hi]`.
pub fn real_rooted_in(a: &[BigInt], lo: &BigInt, hi: &BigInt) -> bool {
    let a = trim(a.to_vec());
    if a.len() <= 1 {
        return !a.is_empty();
    }
    let qa = to_q(&a);
    let g = q_gcd(&qa, &q_derivative(&qa));
    let mut sq = q_div(&qa, &g);
    for end in [lo, hi] {
        let e = BigRational::from_integer(end.clone());
        if q_eval(&sq, &e).is_zero() {
            sq = q_div(&sq, &[-e, BigRational::one()]);
        }
    }
    let deg = sq.len() - 1;
    if deg == 0 {
        return true;
    }
    let seq = sturm_sequence(&sq);
    let (l, h) = (BigRational::from_integer(lo.clone()), BigRational::from_integer(hi.clone()));
    sign_changes(&seq, &l) - sign_changes(&seq, &h) == deg
}

pub fn derivative(a: &[BigInt]) -> IntPoly {
    trim(a.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
}

/// Clear denominators and remove the content.
fn primitive(a: &[BigRational]) -> IntPoly {
    use num_integer::Integer;
    let den = a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let v: IntPoly = a.iter().map(|c| (c * &den).to_integer()).collect();
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        v
    } else {
        v.into_iter().map(|c| c / &g).collect()
    }
}

/// Greatest common divisor over `Q`, as a primitive integer polynomial.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    primitive(&q_gcd(&to_q(a), &to_q(b)))
}

/// Product of the distinct irreducible factors over `Q`.
pub fn squarefree_part(a: &[BigInt]) -> IntPoly {
    let qa = to_q(a);
    let g = q_gcd(&qa, &q_derivative(&qa));
    primitive(&q_div(&qa, &g))
}

pub fn to_f64(a: &[BigInt]) -> Vec<f64> {
    a.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
}

pub fn eval_f64(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// All complex roots by Aberth iteration. Accuracy degrades near multiple
/// roots, so results are only ever used as estimates.
pub fn roots_f64(a: &[f64]) -> Vec<Complex64> {
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = a[n];
    let c: Vec<f64> = a.iter().map(|v| v / lead).collect();
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            d = d * x + p;
            p = p * x + ck;
        }
        (p, d)
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, d) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / d;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn division_and_powers() {
        let x1 = from_i64(&[-1, 1]);
        let p = pow(&x1, 3);
        assert_eq!(p, from_i64(&[-1, 3, -3, 1]));
        assert_eq!(div_exact_monic(&p, &x1).unwrap(), pow(&x1, 2));
        assert!(div_exact_monic(&p, &from_i64(&[1, 1])).is_none());
        assert_eq!(eval(&p, &b(3)), b(8));
    }

    #[test]
    fn sturm_counts() {
        // (x - 1)^2 (x + 2)(x - 5)
        let p = mul(&pow(&from_i64(&[-1, 1]), 2), &mul(&from_i64(&[2, 1]), &from_i64(&[-5, 1])));
        assert!(real_rooted_in(&p, &b(-2), &b(5)));
        assert!(!real_rooted_in(&p, &b(-1), &b(5)));
        assert!(!real_rooted_in(&from_i64(&[1, 0, 1]), &b(-10), &b(10)));
        assert!(real_rooted_in(&from_i64(&[-4, 0, 1]), &b(-2), &b(2)));
    }

    #[test]
    fn aberth_finds_roots() {
        let p = to_f64(&mul(&from_i64(&[1, 0, 1]), &from_i64(&[-6, 1, 1])));
        let mut r: Vec<(f64, f64)> = roots_f64(&p).iter().map(|z| (z.re, z.im)).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [(-3.0, 0.0), (0.0, -1.0), (0.0, 1.0), (2.0, 0.0)];
        for (g, w) in r.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-9 && (g.1 - w.1).abs() < 1e-9, "{r:?}");
        }
    }
}
