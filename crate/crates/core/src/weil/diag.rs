//! Picard-rank bounds and the real/complex multiplication tests.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{self, IntPoly};
use super::{exceptional_factor, trace_polynomial, WeilPolynomial};
use crate::arith::{big_pow, exact_sqrt, legendre};
use crate::error::{domain_err, Result};

/// Search bound for the root-power square test.
pub const DEFAULT_F_MAX: u32 = 24;

fn euler_phi(mut m: u64) -> u64 {
    let mut out = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            while m.is_multiple_of(d) {
                m /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// `Phi_m`, low-to-high.
pub fn cyclotomic(m: u64) -> IntPoly {
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly::div_exact_monic(&num, &cyclotomic(d)).expect("cyclotomic divisors");
        }
    }
    num
}

/// `q^{phi(m)} Phi_m(T / q)`: eigenvalues `q` times primitive `m`-th roots of unity.
fn scaled_cyclotomic(m: u64, q: u64) -> IntPoly {
    let c = cyclotomic(m);
    let d = c.len() - 1;
    c.iter().enumerate().map(|(k, v)| v * big_pow(q, (d - k) as u64)).collect()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SplitResult {
    /// Eigenvalues of the form `q` times a root of unity.
    pub algebraic: WeilPolynomial,
    pub transcendental: WeilPolynomial,
    pub picard_upper: u32,
    /// Orders `m` of the cyclotomic factors, with multiplicity.
    pub orders: Vec<u64>,
}

/// Split off every factor `q^{phi(m)} Phi_m(T/q)` by exact division.
pub fn split_algebraic(chi: &WeilPolynomial) -> SplitResult {
    let q = chi.q();
    let d = chi.degree() as u64;
    let mut rest = chi.eigen();
    let mut alg = vec![BigInt::one()];
    let mut orders = Vec::new();
    for m in 1..=(2 * d * d + 2) {
        if euler_phi(m) > d {
            continue;
        }
        let f = scaled_cyclotomic(m, q);
        while rest.len() >= f.len() {
            match poly::div_exact_monic(&rest, &f) {
                Some(quot) => {
                    rest = quot;
                    alg = poly::mul(&alg, &f);
                    orders.push(m);
                }
                None => break,
            }
        }
    }
    let algebraic = WeilPolynomial::from_eigen(q, &alg).expect("monic");
    let transcendental = WeilPolynomial::from_eigen(q, &rest).expect("monic");
    SplitResult { picard_upper: algebraic.degree() as u32, algebraic, transcendental, orders }
}

/// `#X(F_p) != 1 mod p`.
pub fn is_ordinary(n1: &BigInt, p: u64) -> bool {
    n1.mod_floor(&BigInt::from(p)) != BigInt::one()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct QuadraticField {
    /// Squarefree `D` of `Q(sqrt D)`.
    pub d: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Inert,
    Split,
    Ramified,
}

impl Splitting {
    pub fn name(self) -> &'static str {
        match self {
            Splitting::Inert => "inert",
            Splitting::Split => "split",
            Splitting::Ramified => "ramified",
        }
    }
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(domain_err!("Q(sqrt {d}) is not a quadratic field"));
        }
        let a = d.unsigned_abs();
        if (2..).take_while(|k| k * k <= a).any(|k| a.is_multiple_of(k * k)) {
            return Err(domain_err!("{d} is not squarefree"));
        }
        Ok(QuadraticField { d })
    }

    /// Behaviour of an odd prime, from the Legendre symbol `(D | p)`.
    pub fn splitting(&self, p: u64) -> Splitting {
        match legendre(self.d, p) {
            1 => Splitting::Split,
            -1 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    }
}

/// A cyclic cubic field `Q(theta)` with a generator of its Galois group
/// given as a polynomial in `theta`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CubicField {
    pub label: &'static str,
    /// `theta^3 + c2 theta^2 + c1 theta + c0`, stored `[c0, c1, c2]`.
    pub min_poly: [i64; 3],
    /// `sigma(theta)` as `[a0, a1, a2]`.
    pub sigma: [i64; 3],
}

impl CubicField {
    /// `Q(zeta_7 + zeta_7^{-1})`.
    pub const REAL_7: CubicField = CubicField { label: "Q(zeta7)+", min_poly: [-1, -2, 1], sigma: [-2, 0, 1] };
    /// `Q(zeta_9 + zeta_9^{-1})`.
    pub const REAL_9: CubicField = CubicField { label: "Q(zeta9)+", min_poly: [1, -3, 0], sigma: [-2, 0, 1] };
    /// The cubic subfield of `Q(zeta_19)`, generated by a Gauss period.
    pub const CUBIC_19: CubicField =
        CubicField { label: "cubic in Q(zeta19)", min_poly: [-7, -6, 1], sigma: [4, 0, -1] };

    fn mul(&self, a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
        let mut c = vec![BigInt::zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                c[i + j] += &a[i] * &b[j];
            }
        }
        for k in (3..5).rev() {
            let top = std::mem::take(&mut c[k]);
            for (j, m) in self.min_poly.iter().enumerate() {
                c[k - 3 + j] -= &top * m;
            }
        }
        [c[0].clone(), c[1].clone(), c[2].clone()]
    }

    fn apply_sigma(&self, a: &[BigInt; 3]) -> [BigInt; 3] {
        let s = self.sigma.map(BigInt::from);
        let s2 = self.mul(&s, &s);
        std::array::from_fn(|k| {
            &a[0] * if k == 0 { BigInt::one() } else { BigInt::zero() } + &a[1] * &s[k] + &a[2] * &s2[k]
        })
    }

    /// Real embeddings `theta_0, sigma(theta_0), sigma^2(theta_0)`.
    fn conjugates(&self) -> [f64; 3] {
        let mp = [self.min_poly[0] as f64, self.min_poly[1] as f64, self.min_poly[2] as f64, 1.0];
        let t0 = poly::roots_f64(&mp).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let s = |x: f64| self.sigma[0] as f64 + self.sigma[1] as f64 * x + self.sigma[2] as f64 * x * x;
        [t0, s(t0), s(s(t0))]
    }

    /// True if the monic cubic `r` (low-to-high) splits into linear factors
    /// over this field. Numeric search, exact confirmation.
    pub fn splits(&self, r: &[BigInt]) -> bool {
        if r.len() != 4 || !r[3].is_one() {
            return false;
        }
        let roots: Vec<f64> = poly::roots_f64(&poly::to_f64(r)).iter().map(|z| z.re).collect();
        let th = self.conjugates();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for perm in perms {
            let Some(x) = solve3(&th, &[roots[perm[0]], roots[perm[1]], roots[perm[2]]]) else {
                continue;
            };
            if x.iter().any(|v| !v.is_finite() || (v - v.round()).abs() > 1e-4) {
                continue;
            }
            let y0: [BigInt; 3] = x.map(|v| BigInt::from(v.round() as i64));
            let y1 = self.apply_sigma(&y0);
            let y2 = self.apply_sigma(&y1);
            let add = |a: &[BigInt; 3], b: &[BigInt; 3]| -> [BigInt; 3] { std::array::from_fn(|k| &a[k] + &b[k]) };
            let e1 = add(&add(&y0, &y1), &y2);
            let e2 = add(&add(&self.mul(&y0, &y1), &self.mul(&y0, &y2)), &self.mul(&y1, &y2));
            let e3 = self.mul(&self.mul(&y0, &y1), &y2);
            let rational = |e: &[BigInt; 3]| e[1].is_zero() && e[2].is_zero();
            if rational(&e1) && rational(&e2) && rational(&e3) && r[2] == -&e1[0] && r[1] == e2[0] && r[0] == -&e3[0] {
                return true;
            }
        }
        false
    }
}

/// `x0 + x1 t_k + x2 t_k^2 = s_k`.
fn solve3(t: &[f64; 3], s: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[1.0, t[0], t[0] * t[0], s[0]], [1.0, t[1], t[1] * t[1], s[1]], [1.0, t[2], t[2] * t[2], s[2]]];
    for c in 0..3 {
        let piv = (c..3).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        a.swap(c, piv);
        if a[c][c].abs() < 1e-12 {
            return None;
        }
        for r in 0..3 {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..4 {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Endomorphism field of the transcendental lattice.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndoField {
    /// Real multiplication by `Q(sqrt D)`.
    Real { field: QuadraticField },
    /// Complex multiplication by an imaginary quadratic field.
    Imaginary { field: QuadraticField },
    /// Complex multiplication by `L(i)` for a cyclic cubic `L`.
    CmSextic { real: CubicField },
}

impl EndoField {
    /// The quadratic field that decides inert and split primes.
    pub fn quadratic(&self) -> QuadraticField {
        match self {
            EndoField::Real { field } | EndoField::Imaginary { field } => *field,
            EndoField::CmSextic { .. } => QuadraticField { d: -1 },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "class", content = "f", rename_all = "snake_case")]
pub enum RmClass {
    /// The transcendental factor is `g * conj(g)` for a quadratic `g` over `E`.
    SplitsConjugate,
    /// Raising the roots to this power makes the factor a square.
    PowerSquare(u32),
    Neither,
    NotApplicable,
}

/// `4 P = (2A)^2 - D (2B)^2` with `A` monic quadratic, `B` linear nonzero.
fn norm_form(p: &[BigInt], d: i64) -> bool {
    let roots = poly::roots_f64(&poly::to_f64(p));
    let sd = Complex64::new(d as f64, 0.0).sqrt();
    for (i, j, k, l) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        let (s, pr) = (roots[i] + roots[j], roots[i] * roots[j]);
        let (s2, pr2) = (roots[k] + roots[l], roots[k] * roots[l]);
        let vals = [-(s + s2), pr + pr2, -(s - s2) / sd, (pr - pr2) / sd];
        if vals.iter().any(|z| z.im.abs() > 1e-3 * (1.0 + z.re.abs()) || (z.re - z.re.round()).abs() > 1e-3) {
            continue;
        }
        let v: Vec<BigInt> = vals.iter().map(|z| BigInt::from(z.re.round() as i128)).collect();
        if v[2].is_zero() && v[3].is_zero() {
            continue;
        }
        let a2 = vec![v[1].clone(), v[0].clone(), BigInt::from(2)];
        let b2 = vec![v[3].clone(), v[2].clone()];
        let rhs = poly::sub(&poly::mul(&a2, &a2), &poly::mul(&b2, &b2).iter().map(|c| c * d).collect::<Vec<_>>());
        let lhs: IntPoly = p.iter().map(|c| c * 4).collect();
        if lhs == rhs {
            return true;
        }
    }
    false
}

/// Monic integer quartic that is the square of a monic quadratic.
fn is_square_quartic(p: &[BigInt]) -> bool {
    if p.len() != 5 {
        return false;
    }
    let two = BigInt::from(2);
    let (u, r) = p[3].div_rem(&two);
    if !r.is_zero() {
        return false;
    }
    let (v, r) = (&p[2] - &u * &u).div_rem(&two);
    r.is_zero() && p[1] == &u * &v * 2 && p[0] == &v * &v
}

/// The two alternatives for a degree-4 transcendental factor over a field
/// with real multiplication by `e`.
pub fn rm_split_test(chi_tr: &WeilPolynomial, e: &QuadraticField, f_max: u32) -> RmClass {
    if chi_tr.degree() != 4 {
        return RmClass::NotApplicable;
    }
    if norm_form(&chi_tr.eigen(), e.d) {
        return RmClass::SplitsConjugate;
    }
    for f in 1..=f_max {
        let pf = if f == 1 { chi_tr.clone() } else { chi_tr.base_extend(f) };
        if is_square_quartic(&pf.eigen()) {
            return RmClass::PowerSquare(f);
        }
    }
    RmClass::Neither
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum CmPattern {
    /// Eigenvalues in the CM field.
    A,
    /// `(t^2 - p^2)^3`.
    B,
    /// `t^6 + a p^2 t^3 + p^6`.
    C,
    /// `t^6 - p^6`.
    D,
}

/// Shape of a degree-6 factor in eigenvalue form.
pub fn cm_classify_sextic(chi_tr: &WeilPolynomial, cubic: Option<&CubicField>) -> Result<Option<CmPattern>> {
    if chi_tr.degree() != 6 {
        return Err(domain_err!("expected a degree-6 factor, got degree {}", chi_tr.degree()));
    }
    let q = chi_tr.q();
    let p = chi_tr.eigen();
    let qb = BigInt::from(q);
    let q2 = &qb * &qb;
    let q6 = big_pow(q, 6);
    let mut d_shape = vec![BigInt::zero(); 7];
    d_shape[0] = -&q6;
    d_shape[6] = BigInt::one();
    if p == d_shape {
        return Ok(Some(CmPattern::D));
    }
    if p == poly::pow(&[-&q2, BigInt::zero(), BigInt::one()], 3) {
        return Ok(Some(CmPattern::B));
    }
    if [1, 2, 4, 5].iter().all(|&k| p[k].is_zero()) && p[0] == q6 {
        let (a, r): (BigInt, BigInt) = p[3].div_rem(&q2);
        let disc: BigInt = &a * &a - &q2 * 4u32;
        if r.is_zero() && disc.is_negative() && exact_sqrt(&-disc).is_some() {
            return Ok(Some(CmPattern::C));
        }
    }
    if let (Some(l), Some(r)) = (cubic, trace_polynomial(&p, &qb)) {
        if l.splits(&r) {
            return Ok(Some(CmPattern::A));
        }
    }
    Ok(None)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Diagnostics {
    pub ordinary: bool,
    pub picard_upper: u32,
    pub algebraic: WeilPolynomial,
    pub transcendental: WeilPolynomial,
    pub rm_class: RmClass,
    pub cm_pattern: Option<CmPattern>,
}

/// Diagnostics from the Weil polynomial of the part of `H^2` not spanned by
/// exceptional curves over the nodes (the whole of `H^2` for a smooth
/// sextic), the node orbits, and `#X(F_p)` of the singular model.
pub fn diagnose(reduced: &WeilPolynomial, orbits: &[u32], n1: &BigInt, field: Option<&EndoField>) -> Diagnostics {
    let q = reduced.q();
    let full = reduced.mul(&exceptional_factor(q, orbits));
    let split = split_algebraic(&full);
    // the resolution has n1 + (rational nodes) q points
    let rational = orbits.iter().filter(|&&s| s == 1).count() as u64;
    let ordinary = is_ordinary(&(n1 + BigInt::from(rational * q)), q);
    let rm_class = match field {
        Some(EndoField::Real { field }) if split.transcendental.degree() == 4 => {
            rm_split_test(&split.transcendental, field, DEFAULT_F_MAX)
        }
        _ => RmClass::NotApplicable,
    };
    let cm_pattern = match field {
        Some(EndoField::Real { .. }) | None => None,
        Some(f) => {
            let cubic = match f {
                EndoField::CmSextic { real } => Some(real),
                _ => None,
            };
            match split.transcendental.degree() {
                6 => cm_classify_sextic(&split.transcendental, cubic).ok().flatten(),
                0 => sextic_in(reduced),
                _ => None,
            }
        }
    };
    Diagnostics {
        ordinary,
        picard_upper: split.picard_upper,
        algebraic: split.algebraic,
        transcendental: split.transcendental,
        rm_class,
        cm_pattern,
    }
}

/// For a fully algebraic polynomial: which of the two cyclotomic sextic
/// shapes divides it.
fn sextic_in(chi: &WeilPolynomial) -> Option<CmPattern> {
    let q = chi.q();
    let qb = BigInt::from(q);
    let p = chi.eigen();
    let mut d_shape = vec![BigInt::zero(); 7];
    d_shape[0] = -big_pow(q, 6);
    d_shape[6] = BigInt::one();
    if poly::div_exact_monic(&p, &d_shape).is_some() {
        return Some(CmPattern::D);
    }
    let b_shape = poly::pow(&[-(&qb * &qb), BigInt::zero(), BigInt::one()], 3);
    poly::div_exact_monic(&p, &b_shape).map(|_| CmPattern::B)
}

impl RmClass {
    pub fn name(&self) -> String {
        match self {
            RmClass::SplitsConjugate => "splits-conjugate".into(),
            RmClass::PowerSquare(f) => format!("power-square({f})"),
            RmClass::Neither => "neither".into(),
            RmClass::NotApplicable => "n/a".into(),
        }
    }
}
