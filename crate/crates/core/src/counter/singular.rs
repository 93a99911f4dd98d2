//! Singular points of plane curves over `F_p`: which are ordinary double
//! points, and how Frobenius permutes them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{CoeffRing, Zmod};
use crate::error::{domain_err, Error, Result};
use crate::ffield::{self, FFElement, FieldDesc};
use crate::mpoly::MultiPoly;

/// Random coordinate changes tried after the identity.
const RETRIES: usize = 400;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Singularities {
    /// Only ordinary double points, as Frobenius orbits of the given sizes
    /// (sorted). Empty for a smooth curve.
    Nodes(Vec<u32>),
    /// A worse singularity, a non-reduced curve, or points that could not be
    /// separated.
    Other(String),
}

impl Singularities {
    pub fn is_smooth(&self) -> bool {
        matches!(self, Singularities::Nodes(o) if o.is_empty())
    }

    pub fn is_nodal(&self) -> bool {
        matches!(self, Singularities::Nodes(_))
    }

    /// Number of nodes over the algebraic closure.
    pub fn node_count(&self) -> u32 {
        match self {
            Singularities::Nodes(o) => o.iter().sum(),
            Singularities::Other(_) => 0,
        }
    }

    /// Nodes defined over `F_{p^i}`.
    pub fn fixed_nodes(&self, i: u32) -> u32 {
        match self {
            Singularities::Nodes(o) => o.iter().filter(|&&s| i.is_multiple_of(s)).sum(),
            Singularities::Other(_) => 0,
        }
    }

    pub fn orbits(&self) -> &[u32] {
        match self {
            Singularities::Nodes(o) => o,
            Singularities::Other(_) => &[],
        }
    }
}

type Poly = Vec<u64>;

/// `f(x, y, 1)` as a polynomial in `y` with coefficients in `F_p[x]`.
fn chart(f: &MultiPoly<Zmod>) -> Vec<Poly> {
    let dy = f.degree_in(1) as usize;
    let dx = f.degree_in(0) as usize;
    let mut out = vec![vec![0u64; dx + 1]; dy + 1];
    for (e, c) in f.terms() {
        out[e[1] as usize][e[0] as usize] = *c;
    }
    let r = f.ring();
    out.into_iter().map(|c| ffield::trim(r, c)).collect()
}

fn is_zero_bi(a: &[Poly]) -> bool {
    a.iter().all(|c| c.is_empty())
}

fn deg_y(a: &[Poly]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_empty())
}

/// `Res_y(a, b)` by fraction-free elimination on the Sylvester matrix.
fn resultant_y(r: &Zmod, a: &[Poly], b: &[Poly]) -> Poly {
    let (Some(m), Some(n)) = (deg_y(a), deg_y(b)) else {
        return Vec::new();
    };
    if m == 0 {
        return poly_pow(r, &a[0], n);
    }
    if n == 0 {
        return poly_pow(r, &b[0], m);
    }
    let size = m + n;
    let mut mat = vec![vec![Poly::new(); size]; size];
    for i in 0..n {
        for k in 0..=m {
            mat[i][i + k] = a[m - k].clone();
        }
    }
    for i in 0..m {
        for k in 0..=n {
            mat[n + i][i + k] = b[n - k].clone();
        }
    }
    let mut negate = false;
    let mut prev: Poly = vec![1];
    for k in 0..size - 1 {
        let Some(piv) = (k..size).find(|&i| !mat[i][k].is_empty()) else {
            return Vec::new();
        };
        if piv != k {
            mat.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let t =
                    ffield::sub(r, &ffield::mul(r, &mat[k][k], &mat[i][j]), &ffield::mul(r, &mat[i][k], &mat[k][j]));
                let (q, rem) = ffield::divrem(r, &t, &prev);
                debug_assert!(rem.is_empty());
                mat[i][j] = q;
            }
            mat[i][k] = Vec::new();
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    if negate {
        ffield::scale(r, &det, &r.neg(&1))
    } else {
        det
    }
}

fn poly_pow(r: &Zmod, a: &[u64], n: usize) -> Poly {
    let mut out = vec![1u64];
    for _ in 0..n {
        out = ffield::mul(r, &out, a);
    }
    out
}

/// Product of the distinct monic irreducible factors of `g`.
fn radical(r: &Zmod, g: &[u64]) -> Poly {
    let g = ffield::monic(r, g);
    if ffield::degree(r, &g).unwrap_or(0) == 0 {
        return vec![1];
    }
    let d = ffield::trim(r, ffield::derivative(r, &g));
    if d.is_empty() {
        // g is a p-th power
        let p = r.m() as usize;
        let h: Poly = g.iter().step_by(p).copied().collect();
        return radical(r, &h);
    }
    let c = ffield::gcd(r, &g, &d);
    let (w, _) = ffield::divrem(r, &g, &c);
    let rc = radical(r, &c);
    let common = ffield::gcd(r, &w, &rc);
    let (w, _) = ffield::divrem(r, &w, &common);
    ffield::monic(r, &ffield::mul(r, &w, &rc))
}

/// `f(A T)` for a 3x3 matrix `A`.
fn transform(f: &MultiPoly<Zmod>, a: &[[u64; 3]; 3]) -> Result<MultiPoly<Zmod>> {
    let r = f.ring();
    let forms: Vec<MultiPoly<Zmod>> = (0..3)
        .map(|k| MultiPoly::from_terms(r, 3, (0..3).map(|j| (unit(j), a[k][j])).collect()))
        .collect::<Result<_>>()?;
    let mut out = MultiPoly::zero(r, 3);
    for (e, c) in f.terms() {
        let mut t = MultiPoly::constant(r, 3, *c);
        for k in 0..3 {
            t = t.mul(&forms[k].pow(e[k] as u64))?;
        }
        out = out.add(&t)?;
    }
    Ok(out)
}

fn unit(j: usize) -> Vec<u32> {
    let mut e = vec![0u32; 3];
    e[j] = 1;
    e
}

fn det3(r: &Zmod, a: &[[u64; 3]; 3]) -> u64 {
    let m = |x: u64, y: u64| r.mul(&x, &y);
    let t0 = m(a[0][0], r.sub(&m(a[1][1], a[2][2]), &m(a[1][2], a[2][1])));
    let t1 = m(a[0][1], r.sub(&m(a[1][0], a[2][2]), &m(a[1][2], a[2][0])));
    let t2 = m(a[0][2], r.sub(&m(a[1][0], a[2][1]), &m(a[1][1], a[2][0])));
    r.add(&r.sub(&t0, &t1), &t2)
}

/// True if the curve has a singular point on the line `T2 = 0`.
fn singular_at_infinity(forms: &[MultiPoly<Zmod>]) -> Result<bool> {
    let r = forms[0].ring();
    // at (1 : 0 : 0)
    if forms.iter().all(|g| g.evaluate(&[1, 0, 0]).map(|v| v == 0).unwrap_or(false)) {
        return Ok(true);
    }
    // at (x : 1 : 0)
    let mut common: Option<Poly> = None;
    for g in forms {
        let mut c = vec![0u64; g.degree_in(0) as usize + 1];
        for (e, v) in g.terms() {
            if e[2] == 0 {
                c[e[0] as usize] = r.add(&c[e[0] as usize], v);
            }
        }
        let c = ffield::trim(r, c);
        common = Some(match common {
            None => c,
            Some(h) => ffield::gcd(r, &h, &c),
        });
    }
    let h = common.unwrap_or_default();
    Ok(h.is_empty() || ffield::degree(r, &h).unwrap_or(0) > 0)
}

/// Coefficients in `y` of `g(x0, y)` for `x0` in `k`.
fn specialize_x(k: &FieldDesc, g: &[Poly], x0: &FFElement) -> Vec<FFElement> {
    let ring = k.ring();
    let lifted: Vec<Vec<FFElement>> = g.iter().map(|c| c.iter().map(|&v| k.from_u64(v)).collect()).collect();
    let vals = lifted.iter().map(|c| ffield::eval(&ring, c, x0)).collect();
    ffield::trim(&ring, vals)
}

enum Attempt {
    Done(Singularities),
    Retry(String),
}

fn analyze_once(f: &MultiPoly<Zmod>, rng: &mut ChaCha8Rng) -> Result<Attempt> {
    let r = *f.ring();
    let d = f.homogeneous_degree()?;
    let fx = f.partial_derivative(0)?;
    let fy = f.partial_derivative(1)?;
    let fz = f.partial_derivative(2)?;
    // the leading coefficient in y must be a nonzero constant
    if f.coeff(&[0, d, 0]) == 0 {
        return Ok(Attempt::Retry("y^d coefficient vanishes".into()));
    }
    if singular_at_infinity(&[f.clone(), fx.clone(), fy.clone(), fz])? {
        return Ok(Attempt::Retry("singular point on the line at infinity".into()));
    }
    let g = chart(f);
    let gx = chart(&fx);
    let gy = chart(&fy);
    let mut big_g: Option<Poly> = None;
    for (a, b) in [(&g, &gx), (&g, &gy), (&gx, &gy)] {
        if is_zero_bi(a) || is_zero_bi(b) {
            continue;
        }
        let res = resultant_y(&r, a, b);
        if res.is_empty() {
            continue;
        }
        big_g = Some(match big_g {
            None => res,
            Some(h) => ffield::gcd(&r, &h, &res),
        });
    }
    let Some(big_g) = big_g else {
        return Ok(Attempt::Retry("all resultants vanish".into()));
    };
    let rad = radical(&r, &big_g);
    let mut orbits = Vec::new();
    for (k, part) in ffield::distinct_degree(&r, &rad) {
        for factor in ffield::equal_degree_factors(&r, &part, k, rng) {
            let (field, x0) = if k == 1 {
                let fd = FieldDesc::with_modulus(r.m(), &[0, 1])?;
                let x0 = fd.from_u64(r.neg(&factor[0]));
                (fd, x0)
            } else {
                let fd = FieldDesc::with_modulus(r.m(), &factor)?;
                let x0 = fd.gen();
                (fd, x0)
            };
            let ring = field.ring();
            let h0 = specialize_x(&field, &g, &x0);
            let h1 = specialize_x(&field, &gx, &x0);
            let h2 = specialize_x(&field, &gy, &x0);
            let h = ffield::gcd(&ring, &ffield::gcd(&ring, &h0, &h1), &h2);
            let e = match ffield::degree(&ring, &h) {
                None => return Ok(Attempt::Retry("curve contains a vertical line".into())),
                Some(0) => continue,
                Some(e) => e,
            };
            // distinct singular points above x0
            let h = ffield::monic(&ring, &h);
            let dh = ffield::derivative(&ring, &h);
            if dh.is_empty() {
                return Ok(Attempt::Retry("inseparable fibre".into()));
            }
            let h = if e == 1 { h } else { ffield::divrem(&ring, &h, &ffield::gcd(&ring, &h, &dh)).0 };
            // nodes are exactly the points where the affine Hessian is nonzero
            let second = |a: usize, b: usize| -> Result<Vec<FFElement>> {
                let d2 = f.partial_derivative(a)?.partial_derivative(b)?;
                Ok(specialize_x(&field, &chart(&d2), &x0))
            };
            let (hxx, hxy, hyy) = (second(0, 0)?, second(0, 1)?, second(1, 1)?);
            let det = ffield::sub(&ring, &ffield::mul(&ring, &hxx, &hyy), &ffield::mul(&ring, &hxy, &hxy));
            if ffield::degree(&ring, &ffield::gcd(&ring, &h, &det)) != Some(0) {
                return Ok(Attempt::Done(Singularities::Other(format!(
                    "non-nodal singular point over F_{}^{}",
                    r.m(),
                    k
                ))));
            }
            for (j, part) in ffield::distinct_degree(&ring, &h) {
                let count = ffield::degree(&ring, &part).unwrap_or(0) / j;
                orbits.extend(std::iter::repeat_n((k * j) as u32, count));
            }
        }
    }
    orbits.sort();
    Ok(Attempt::Done(Singularities::Nodes(orbits)))
}

/// Singular points of the plane curve `f = 0` over the algebraic closure of
/// `F_p`. Works on the chart `T2 = 1` after a coordinate change that moves
/// all singular points off the line at infinity and separates their
/// `T0`-coordinates.
pub fn analyze_curve(f: &MultiPoly<Zmod>) -> Result<Singularities> {
    if f.nvars() != 3 {
        return Err(domain_err!("expected a ternary form"));
    }
    let r = *f.ring();
    let p = r.m();
    if f.is_zero() {
        return Err(domain_err!("the zero form defines no curve"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e0de5 ^ p);
    let mut last = String::new();
    for attempt in 0..=RETRIES {
        let g = if attempt == 0 {
            f.clone()
        } else {
            let a = loop {
                let a: [[u64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..p)));
                if det3(&r, &a) != 0 {
                    break a;
                }
            };
            transform(f, &a)?
        };
        match analyze_once(&g, &mut rng)? {
            Attempt::Done(s) => return Ok(s),
            Attempt::Retry(why) => last = why,
        }
    }
    Ok(Singularities::Other(format!("singular locus not resolved: {last}")))
}

/// Convenience check used by callers that only accept nodal curves.
pub fn require_nodal(f: &MultiPoly<Zmod>) -> Result<Vec<u32>> {
    match analyze_curve(f)? {
        Singularities::Nodes(o) => Ok(o),
        Singularities::Other(why) => Err(Error::Unsupported(why)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse;

    /// Product of the `*`-separated parenthesised factors.
    fn curve(text: &str, p: u64) -> MultiPoly<Zmod> {
        let r = Zmod::new(p).unwrap();
        text.split(")*(")
            .map(|t| parse(t.trim_matches(|c| c == '(' || c == ')'), &r, Some(3)).unwrap())
            .reduce(|a, b| a.mul(&b).unwrap())
            .unwrap()
    }

    #[test]
    fn fermat_is_smooth() {
        for p in [7u64, 11, 13] {
            assert!(analyze_curve(&curve("T0^6 + T1^6 + T2^6", p)).unwrap().is_smooth());
        }
    }

    #[test]
    fn three_lines_meet_in_three_nodes() {
        let s = analyze_curve(&curve("T0*T1*T2", 7)).unwrap();
        assert_eq!(s, Singularities::Nodes(vec![1, 1, 1]));
    }

    #[test]
    fn conjugate_lines() {
        // T0^2 - 3 T1^2 splits over F_49 only: the two lines meet at (0:0:1)
        let s = analyze_curve(&curve("T0^2 - 3*T1^2", 7)).unwrap();
        assert_eq!(s.node_count(), 1);
        // two conics through four points in a degree-2 orbit pair
        let s = analyze_curve(&curve("(T0^2 - 3*T1^2 + T2^2)*(T0^2 + T1^2 - 2*T2^2)", 7)).unwrap();
        assert_eq!(s.node_count(), 4);
        assert!(s.is_nodal());
    }

    #[test]
    fn six_lines_have_fifteen_nodes() {
        let f = curve("(T0 + T1)*(T0 - T1)*(T0 + 2*T2)*(T1 + 3*T2)*(T0 + T1 + T2)*(T0 - 2*T1 + 3*T2)", 101);
        let s = analyze_curve(&f).unwrap();
        assert_eq!(s.node_count(), 15);
        assert_eq!(s.fixed_nodes(1), 15);
    }

    #[test]
    fn cusp_and_tacnode_are_not_nodes() {
        let s = analyze_curve(&curve("T1^2*T2 - T0^3", 11)).unwrap();
        assert!(matches!(s, Singularities::Other(_)));
        let s = analyze_curve(&curve("(T1*T2 - T0^2)*(T1*T2 - T0^2 - T1^2)", 11)).unwrap();
        assert!(matches!(s, Singularities::Other(_)));
    }

    #[test]
    fn double_line_is_rejected() {
        let s = analyze_curve(&curve("T0^2*T1*T2", 13)).unwrap();
        assert!(matches!(s, Singularities::Other(_)));
    }

    #[test]
    fn resultant_of_linear_forms() {
        let r = Zmod::new(7).unwrap();
        // Res_y(y - x, y + x) = -2x up to sign convention
        let a = vec![vec![0, 6], vec![1]];
        let b = vec![vec![0, 1], vec![1]];
        let res = resultant_y(&r, &a, &b);
        assert_eq!(ffield::degree(&r, &res), Some(1));
        assert_eq!(res[0], 0);
    }

    #[test]
    fn radical_of_powers() {
        let r = Zmod::new(5).unwrap();
        // (x + 1)^5 (x + 2)^2
        let a = poly_pow(&r, &[1, 1], 5);
        let b = poly_pow(&r, &[2, 1], 2);
        let g = ffield::mul(&r, &a, &b);
        assert_eq!(radical(&r, &g), ffield::mul(&r, &[1, 1], &[2, 1]));
    }
}
