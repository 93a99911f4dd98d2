use std::collections::HashMap;

use crate::arith::{CoeffRing, Rationals, Zmod};
use crate::error::{domain_err, Result};
use crate::mpoly::{reduce_mod_p, MultiPoly, PowerLadder};
use crate::traceop::mem_cap;

/// Window half-width: the window around the center of `F^e` is the set of
/// exponents `2e + y` with `y_k <= WINDOW` and `sum y = 0`.
const WINDOW: i64 = 6;
/// Steps that remain when the center is read off by one final product.
const FINISH: u64 = 3;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CentralCoefficient {
    /// Coefficient of `(T0 T1 T2)^(p-1)` in `F^((p-1)/2)`, in `[0, p)`.
    pub value: u64,
    /// True when the windowed recurrence degenerated and the full power was used.
    pub fallback: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PrimeClass {
    Ordinary,
    NonOrdinary,
    /// A coefficient denominator vanishes mod `p`, or the sextic does.
    Bad,
}

impl PrimeClass {
    pub fn name(&self) -> &'static str {
        match self {
            PrimeClass::Ordinary => "ordinary",
            PrimeClass::NonOrdinary => "non-ordinary",
            PrimeClass::Bad => "bad",
        }
    }
}

fn check_sextic(f: &MultiPoly<Zmod>) -> Result<u64> {
    let p = f.ring().m();
    if f.nvars() != 3 || f.homogeneous_degree()? != 6 {
        return Err(domain_err!("expected a ternary sextic form"));
    }
    if f.is_zero() {
        return Err(domain_err!("the sextic vanishes mod {p}"));
    }
    if p < 3 || p.is_multiple_of(2) {
        return Err(domain_err!("p must be an odd prime"));
    }
    Ok(p)
}

/// Reference value from the full power of the chart `T0 = 1`.
pub fn central_coefficient_direct(f: &MultiPoly<Zmod>) -> Result<u64> {
    let p = check_sextic(f)?;
    let e = (p - 1) / 2;
    let g = f.dehomogenize(0)?;
    let mut ladder = PowerLadder::new(&g, e, mem_cap())?;
    let power = ladder.advance_to(e)?;
    let c = (p - 1) as u32;
    Ok(power.get(&[c, c]).copied().unwrap_or(0))
}

/// Exponents of `F^e` near `(2e, 2e, 2e)`, stored by offset.
struct Window {
    /// Offsets `(y0, y1)`; `y2 = -y0 - y1`.
    offsets: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
}

impl Window {
    fn new() -> Self {
        let mut offsets = Vec::new();
        for y0 in -2 * WINDOW..=WINDOW {
            for y1 in -2 * WINDOW..=WINDOW {
                if -y0 - y1 <= WINDOW {
                    offsets.push((y0, y1));
                }
            }
        }
        let index = offsets.iter().enumerate().map(|(k, &o)| (o, k)).collect();
        Window { offsets, index }
    }
}

/// Absolute exponent of an offset at exponent `e`, `None` if negative.
fn absolute(e: u64, y: (i64, i64)) -> Option<[i64; 3]> {
    let c = 2 * e as i64;
    let m = [c + y.0, c + y.1, c - y.0 - y.1];
    m.iter().all(|&x| x >= 0).then_some(m)
}

struct Stepper<'a> {
    ring: Zmod,
    terms: &'a [([i64; 3], u64)],
    win: &'a Window,
}

impl Stepper<'_> {
    /// Value of `F^e` at offset `y`, with `cur` known on the window.
    fn value(&self, e: u64, cur: &[u64], y: (i64, i64)) -> Option<u64> {
        if absolute(e, y).is_none() {
            return Some(0);
        }
        self.win.index.get(&y).map(|&k| cur[k])
    }

    /// `F^(e+1)` on the window from `F^e`, or `None` if the relations do not
    /// determine it.
    fn step(&self, e: u64, cur: &[u64]) -> Option<Vec<u64>> {
        let r = &self.ring;
        let e1 = e + 1;
        let n = self.win.offsets.len();
        let mut out: Vec<Option<u64>> = vec![None; n];
        // interior: F^(e+1) = F * F^e where the whole stencil is known
        for (k, &y) in self.win.offsets.iter().enumerate() {
            if absolute(e1, y).is_none() {
                out[k] = Some(0);
                continue;
            }
            let mut acc = 0u64;
            let mut ok = true;
            for (u, c) in self.terms {
                // offset of m - u relative to 2e
                let z = (y.0 + 2 - u[0], y.1 + 2 - u[1]);
                match self.value(e, cur, z) {
                    Some(v) => acc = r.add(&acc, &r.mul(c, &v)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out[k] = Some(acc);
            }
        }
        let unknown: Vec<usize> = (0..n).filter(|&k| out[k].is_none()).collect();
        if unknown.is_empty() {
            return Some(out.into_iter().map(Option::unwrap).collect());
        }
        let col: HashMap<usize, usize> = unknown.iter().enumerate().map(|(c, &k)| (k, c)).collect();
        let nu_count = unknown.len();
        // relations sum_u f_u (nu_j - (e1 + 1) u_j) g_{nu - u} = 0, nu relative to 2 e1
        let mut nus: Vec<(i64, i64)> = Vec::new();
        for &y in &self.win.offsets {
            for (u, _) in self.terms {
                nus.push((y.0 + u[0], y.1 + u[1]));
            }
        }
        nus.sort();
        nus.dedup();
        let p = r.m() as i64;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        'nu: for &nu in &nus {
            let mut pts = Vec::with_capacity(self.terms.len());
            for (u, c) in self.terms {
                let y = (nu.0 - u[0], nu.1 - u[1]);
                if absolute(e1, y).is_none() {
                    continue;
                }
                match self.win.index.get(&y) {
                    Some(&k) => pts.push((k, u, *c)),
                    None => continue 'nu,
                }
            }
            if !pts.iter().any(|(k, _, _)| col.contains_key(k)) {
                continue;
            }
            let abs = [2 * e1 as i64 + nu.0, 2 * e1 as i64 + nu.1];
            for j in 0..2 {
                let mut row = vec![0u64; nu_count + 1];
                for &(k, u, c) in &pts {
                    let w = (abs[j] - (e1 as i64 + 1) * u[j]).rem_euclid(p) as u64;
                    let w = r.mul(&c, &w);
                    match col.get(&k) {
                        Some(&cc) => row[cc] = r.add(&row[cc], &w),
                        // known values move to the right-hand side
                        None => row[nu_count] = r.sub(&row[nu_count], &r.mul(&w, &out[k].unwrap())),
                    }
                }
                if row[..nu_count].iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
        let sol = solve(r, rows, nu_count)?;
        for (c, &k) in unknown.iter().enumerate() {
            out[k] = Some(sol[c]);
        }
        Some(out.into_iter().map(Option::unwrap).collect())
    }
}

/// Unique solution of an overdetermined system mod `p`, rows `[a | b]`.
fn solve(r: &Zmod, mut rows: Vec<Vec<u64>>, n: usize) -> Option<Vec<u64>> {
    for c in 0..n {
        let piv = (c..rows.len()).find(|&i| rows[i][c] != 0)?;
        rows.swap(c, piv);
        let inv = r.inv(&rows[c][c])?;
        for x in rows[c].iter_mut() {
            *x = r.mul(x, &inv);
        }
        let pivot_row = rows[c].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != c && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = r.sub(x, &r.mul(&f, y));
                }
            }
        }
    }
    // the remaining equations must be consistent
    if rows[n..].iter().any(|row| row[n] != 0) {
        return None;
    }
    Some(rows[..n].iter().map(|row| row[n]).collect())
}

/// Coefficient of `(T0 T1 T2)^(p-1)` in `F^((p-1)/2)` by a moving window of
/// constant size around the center of `F^e`. Boundary coefficients of the
/// window are recovered from `F d(F^e)/dT_j = e (dF/dT_j) F^e`; when these
/// relations degenerate the full power is used instead.
pub fn central_coefficient(f: &MultiPoly<Zmod>) -> Result<CentralCoefficient> {
    let p = check_sextic(f)?;
    let ring = *f.ring();
    let target = (p - 1) / 2;
    let terms: Vec<([i64; 3], u64)> = f.terms().map(|(e, c)| ([e[0] as i64, e[1] as i64, e[2] as i64], *c)).collect();
    let win = Window::new();
    let stepper = Stepper { ring, terms: &terms, win: &win };
    let mut cur: Vec<u64> = win.offsets.iter().map(|&y| u64::from(y == (0, 0))).collect();
    let mut e = 0u64;
    while target - e > FINISH {
        match stepper.step(e, &cur) {
            Some(next) => {
                cur = next;
                e += 1;
            }
            None => return Ok(CentralCoefficient { value: central_coefficient_direct(f)?, fallback: true }),
        }
    }
    // center of F^target = F^e * F^j, j <= FINISH
    let j = target - e;
    let fj = f.pow(j);
    let mut acc = 0u64;
    for (w, c) in fj.terms() {
        let y = (2 * j as i64 - w[0] as i64, 2 * j as i64 - w[1] as i64);
        let v = stepper.value(e, &cur, y).expect("final stencil lies in the window");
        acc = ring.add(&acc, &ring.mul(c, &v));
    }
    Ok(CentralCoefficient { value: acc, fallback: false })
}

/// Ordinary / non-ordinary classification of the reductions of a rational
/// sextic at each prime.
pub fn nonordinary_scan(f: &MultiPoly<Rationals>, primes: &[u64]) -> Result<Vec<(u64, PrimeClass)>> {
    if f.nvars() != 3 || f.homogeneous_degree()? != 6 {
        return Err(domain_err!("expected a ternary sextic form"));
    }
    let mut out = Vec::with_capacity(primes.len());
    for &p in primes {
        let class = match reduce_mod_p(f, p) {
            Some(g) if !g.is_zero() => {
                if central_coefficient(&g)?.value == 0 {
                    PrimeClass::NonOrdinary
                } else {
                    PrimeClass::Ordinary
                }
            }
            _ => PrimeClass::Bad,
        };
        out.push((p, class));
    }
    Ok(out)
}
