//! Sparse multivariate polynomials over a run-time coefficient ring, plus the
//! dense power ladder used for the large powers of a branch or hypersurface
//! equation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{CoeffRing, Rationals};
use crate::error::{domain_err, Error, Result};

/// Exponent vector with graded-lex order: total degree first, then
/// lexicographic with `T0` most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exps(pub Vec<u32>);

impl Exps {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exps {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exps {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in variables `T0..T{n-1}`, optionally followed by named
/// parameter symbols.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<R: CoeffRing> {
    ring: R,
    nvars: usize,
    symbols: Vec<String>,
    terms: BTreeMap<Exps, R::Elem>,
}

impl<R: CoeffRing> MultiPoly<R> {
    pub fn zero(ring: &R, nvars: usize) -> Self {
        MultiPoly { ring: ring.clone(), nvars, symbols: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, nvars: usize, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(ring: &R, nvars: usize) -> Self {
        Self::constant(ring, nvars, ring.one())
    }

    /// The variable `T_k`.
    pub fn var(ring: &R, nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Self::zero(ring, nvars);
        p.add_term(e, ring.one());
        p
    }

    pub fn from_terms(ring: &R, nvars: usize, terms: Vec<(Vec<u32>, R::Elem)>) -> Result<Self> {
        let mut p = Self::zero(ring, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(domain_err!("exponent vector {e:?} has the wrong length for {nvars} variables"));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn like(&self, terms: BTreeMap<Exps, R::Elem>) -> Self {
        MultiPoly { ring: self.ring.clone(), nvars: self.nvars, symbols: self.symbols.clone(), terms }
    }

    /// Adds `c * T^e` in place.
    pub fn add_term(&mut self, e: Vec<u32>, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        let key = Exps(e);
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = self.ring.add(v, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// Total number of variables including parameter symbols.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Number of `T` variables.
    pub fn n_t_vars(&self) -> usize {
        self.nvars - self.symbols.len()
    }

    pub fn var_name(&self, k: usize) -> String {
        let nt = self.n_t_vars();
        if k < nt {
            format!("T{k}")
        } else {
            self.symbols[k - nt].clone()
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[u32], &R::Elem)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn coeff(&self, e: &[u32]) -> R::Elem {
        self.terms.get(&Exps(e.to_vec())).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|e| e.degree())
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|e| e.0[k]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    /// Degree of a homogeneous polynomial; error otherwise.
    pub fn homogeneous_degree(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(domain_err!("the zero polynomial has no degree"));
        }
        if !self.is_homogeneous() {
            return Err(domain_err!("polynomial is not homogeneous"));
        }
        Ok(self.total_degree().unwrap())
    }

    fn check(&self, other: &Self) -> Result<()> {
        self.ring.ensure_same(&other.ring)?;
        if self.nvars != other.nvars || self.symbols != other.symbols {
            return Err(Error::DomainMismatch(format!(
                "variable sets differ ({} vs {} variables)",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.like(self.terms.iter().map(|(e, c)| (e.clone(), self.ring.neg(c))).collect())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = self.like(BTreeMap::new());
        for (e, v) in &self.terms {
            out.add_term(e.0.clone(), self.ring.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let ring = &self.ring;
        let mut acc: std::collections::HashMap<Vec<u32>, R::Acc> = std::collections::HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect();
                let slot = acc.entry(e).or_insert_with(|| ring.acc_zero());
                ring.acc_mul_add(slot, c1, c2);
            }
        }
        let mut out = self.like(BTreeMap::new());
        for (e, a) in acc {
            out.add_term(e, ring.acc_reduce(&a));
        }
        Ok(out)
    }

    /// `g^m` by square-and-multiply.
    pub fn pow(&self, m: u64) -> Self {
        let mut acc = self.like(BTreeMap::new());
        acc.add_term(vec![0; self.nvars], self.ring.one());
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// `g(T^n)`: every exponent multiplied by `n`.
    pub fn quasi_power(&self, n: u32) -> Self {
        self.like(self.terms.iter().map(|(e, c)| (Exps(e.0.iter().map(|x| x * n).collect()), c.clone())).collect())
    }

    /// `g * g^(q) * ... * g^(q^(r-1))`.
    pub fn quasi_norm(&self, q: u32, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(domain_err!("quasi norm needs r >= 1"));
        }
        let mut out = self.clone();
        let mut qk = 1u32;
        for _ in 1..r {
            qk = qk.checked_mul(q).ok_or_else(|| domain_err!("quasi norm exponent overflow"))?;
            out = out.mul(&self.quasi_power(qk))?;
        }
        Ok(out)
    }

    pub fn partial_derivative(&self, k: usize) -> Result<Self> {
        if k >= self.nvars {
            return Err(domain_err!("variable index {k} out of range"));
        }
        let mut out = self.like(BTreeMap::new());
        for (e, c) in &self.terms {
            if e.0[k] == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[k] -= 1;
            out.add_term(d, self.ring.mul(c, &self.ring.from_i64(e.0[k] as i64)));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[R::Elem]) -> Result<R::Elem> {
        if point.len() != self.nvars {
            return Err(domain_err!("point has {} coordinates, expected {}", point.len(), self.nvars));
        }
        let ring = &self.ring;
        let mut s = ring.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    t = ring.mul(&t, &ring.pow(x, k as u64));
                }
            }
            s = ring.add(&s, &t);
        }
        Ok(s)
    }

    /// Substitutes `T_k = c` and drops the variable.
    pub fn substitute(&self, k: usize, c: &R::Elem) -> Result<Self> {
        if k >= self.nvars {
            return Err(domain_err!("variable index {k} out of range"));
        }
        let ring = &self.ring;
        let mut out = MultiPoly {
            ring: ring.clone(),
            nvars: self.nvars - 1,
            symbols: self.symbols.clone(),
            terms: BTreeMap::new(),
        };
        if k >= self.n_t_vars() {
            out.symbols.remove(k - self.n_t_vars());
        }
        for (e, v) in &self.terms {
            let mut d = e.0.clone();
            let x = d.remove(k);
            out.add_term(d, ring.mul(v, &ring.pow(c, x as u64)));
        }
        Ok(out)
    }

    /// Keeps the variables in `support` and sets the others to zero.
    pub fn restrict_to(&self, support: &[usize]) -> Self {
        let mut out =
            MultiPoly { ring: self.ring.clone(), nvars: support.len(), symbols: Vec::new(), terms: BTreeMap::new() };
        for (e, v) in &self.terms {
            if (0..self.nvars).all(|k| support.contains(&k) || e.0[k] == 0) {
                out.add_term(support.iter().map(|&k| e.0[k]).collect(), v.clone());
            }
        }
        out
    }

    /// Affine chart `T_j = 1`.
    pub fn dehomogenize(&self, chart: usize) -> Result<Self> {
        self.homogeneous_degree()?;
        self.substitute(chart, &self.ring.one())
    }

    /// Coefficientwise map into another ring; `None` from `f` aborts.
    pub fn try_map<S: CoeffRing>(
        &self,
        ring: &S,
        mut f: impl FnMut(&R::Elem) -> Option<S::Elem>,
    ) -> Option<MultiPoly<S>> {
        let mut out =
            MultiPoly { ring: ring.clone(), nvars: self.nvars, symbols: self.symbols.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            out.add_term(e.0.clone(), f(c)?);
        }
        Some(out)
    }

    pub fn map<S: CoeffRing>(&self, ring: &S, mut f: impl FnMut(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        self.try_map(ring, |c| Some(f(c))).unwrap()
    }

    /// Total degree of `T` variables only (parameters ignored).
    pub fn t_degree(&self) -> Option<u32> {
        let nt = self.n_t_vars();
        self.terms.keys().map(|e| e.0[..nt].iter().sum()).max()
    }
}

impl MultiPoly<Rationals> {
    /// Substitutes rational values for all parameter symbols.
    pub fn specialize_symbols(&self, values: &[BigRational]) -> Result<Self> {
        if values.len() != self.symbols.len() {
            return Err(domain_err!("expected {} parameter values, got {}", self.symbols.len(), values.len()));
        }
        let mut out = self.clone();
        for v in values {
            out = out.substitute(out.n_t_vars(), v)?;
        }
        Ok(out)
    }

    /// Lcm of denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

/// `f` over `F_p` lifted to the residue ring `target` (coefficients taken as
/// representatives in `[0, p)`), then restricted to the chart `T_chart = 1`.
pub fn lift_and_dehomogenize<S: CoeffRing>(
    f: &MultiPoly<crate::arith::Zmod>,
    chart: usize,
    target: &S,
) -> Result<MultiPoly<S>> {
    let lifted = f.map(target, |c| target.from_i64(*c as i64));
    lifted.dehomogenize(chart)
}

// --- text format ---

/// Parses the polynomial grammar into rational coefficients.
pub fn parse_rational(text: &str) -> Result<MultiPoly<Rationals>> {
    parse_with(text, &Rationals, None, &[])
}

/// Parses over `ring`; the number of `T` variables is inferred unless given.
pub fn parse<R: CoeffRing>(text: &str, ring: &R, nvars: Option<usize>) -> Result<MultiPoly<R>> {
    parse_with(text, ring, nvars, &[])
}

/// Parses with extra named parameter symbols, stored after the `T` variables.
pub fn parse_with<R: CoeffRing>(text: &str, ring: &R, nvars: Option<usize>, symbols: &[&str]) -> Result<MultiPoly<R>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split into signed terms
    let mut raw_terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && !(cur.is_empty() && i == 0) {
            if cur.is_empty() {
                return Err(Error::Parse(format!("dangling sign near position {i}")));
            }
            if cur.ends_with('^') || cur.ends_with('*') || cur.ends_with('/') {
                return Err(Error::Parse(format!("misplaced sign near position {i}")));
            }
            raw_terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && i == 0 {
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse("polynomial ends with a sign".into()));
    }
    raw_terms.push((neg, cur));

    let mut parsed: Vec<(BigRational, Vec<(usize, u32)>)> = Vec::new();
    let mut max_t: Option<usize> = None;
    for (neg, t) in &raw_terms {
        let mut coef = BigRational::one();
        let mut vars = Vec::new();
        for factor in t.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in term '{t}'")));
            }
            let first = factor.chars().next().unwrap();
            if first.is_ascii_digit() {
                coef *= parse_number(factor)?;
            } else {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => {
                        let e: u32 = e.parse().map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?;
                        (n, e)
                    }
                    None => (factor, 1),
                };
                if let Some(rest) = name.strip_prefix('T') {
                    let k: usize = rest.parse().map_err(|_| Error::Parse(format!("bad variable '{name}'")))?;
                    max_t = Some(max_t.map_or(k, |m| m.max(k)));
                    vars.push((k, exp));
                } else if let Some(pos) = symbols.iter().position(|&sym| sym == name) {
                    vars.push((usize::MAX - pos, exp));
                } else {
                    return Err(Error::Parse(format!("unknown symbol '{name}'")));
                }
            }
        }
        if *neg {
            coef = -coef;
        }
        parsed.push((coef, vars));
    }
    let inferred = max_t.map_or(1, |m| m + 1);
    let nt = match nvars {
        Some(n) => {
            if let Some(t) = max_t.filter(|_| inferred > n) {
                return Err(Error::Parse(format!("variable T{t} outside the declared {n} variables")));
            }
            n
        }
        None => inferred,
    };
    let total = nt + symbols.len();
    let mut out = MultiPoly {
        ring: ring.clone(),
        nvars: total,
        symbols: symbols.iter().map(|s| s.to_string()).collect(),
        terms: BTreeMap::new(),
    };
    for (coef, vars) in parsed {
        let mut e = vec![0u32; total];
        for (k, x) in vars {
            let idx = if k >= usize::MAX - symbols.len() { nt + (usize::MAX - k) } else { k };
            e[idx] += x;
        }
        let c = ring
            .from_rational(&coef)
            .ok_or_else(|| domain_err!("coefficient {coef} is not defined in {}", ring.tag()))?;
        out.add_term(e, c);
    }
    Ok(out)
}

fn parse_number(tok: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("malformed number '{tok}'"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

impl<R: CoeffRing> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut cs = self.ring.fmt_elem(c);
            let negative = cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono: Vec<String> =
                e.0.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(k, &x)| if x == 1 { self.var_name(k) } else { format!("{}^{x}", self.var_name(k)) })
                    .collect();
            if mono.is_empty() {
                write!(f, "{cs}")?;
            } else if cs == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{cs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Rational polynomial reduced modulo `p`, `None` when a denominator vanishes.
pub fn reduce_mod_p(f: &MultiPoly<Rationals>, p: u64) -> Option<MultiPoly<crate::arith::Zmod>> {
    let ring = crate::arith::Zmod::new(p).ok()?;
    f.try_map(&ring, |c| ring.from_rational(c))
}

/// Lifts of integer coefficients as signed values, used where sign matters
/// for formatting (e.g. `-1` rather than `p - 1`).
pub fn symmetric_residue(c: u64, p: u64) -> i64 {
    if c > p / 2 {
        c as i64 - p as i64
    } else {
        c as i64
    }
}

// --- dense powers ---

/// Dense coefficient array of a polynomial in `n` variables, padded so that
/// shifting by any exponent of the multiplier stays in bounds.
#[derive(Clone, Debug)]
pub struct DensePoly<R: CoeffRing> {
    nvars: usize,
    side: usize,
    pad: usize,
    strides: Vec<usize>,
    degree: u32,
    data: Vec<R::Elem>,
}

impl<R: CoeffRing> DensePoly<R> {
    fn offset(&self, e: &[u32]) -> usize {
        e.iter().zip(&self.strides).map(|(&x, &s)| (x as usize + self.pad) * s).sum()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Coefficient at `e` (zero outside the support box).
    pub fn get(&self, e: &[u32]) -> Option<&R::Elem> {
        if e.iter().map(|&x| x as u64).sum::<u64>() > self.degree as u64 {
            return None;
        }
        Some(&self.data[self.offset(e)])
    }

    pub fn to_sparse(&self, ring: &R) -> MultiPoly<R> {
        let mut out = MultiPoly::zero(ring, self.nvars);
        for_each_simplex_row(self.nvars, self.degree, |prefix, run| {
            let mut e = prefix.to_vec();
            e.push(0);
            for b in 0..run {
                e[self.nvars - 1] = b as u32;
                let c = &self.data[self.offset(&e)];
                if !ring.is_zero(c) {
                    out.add_term(e.clone(), c.clone());
                }
            }
        });
        out
    }
}

/// Calls `f(prefix, run)` for every row of the simplex of total degree
/// `<= deg`: `prefix` holds the first `n - 1` exponents, `run` the number of
/// admissible values of the last one.
pub fn for_each_simplex_row(n: usize, deg: u32, mut f: impl FnMut(&[u32], usize)) {
    if n == 0 {
        return;
    }
    let mut prefix = vec![0u32; n - 1];
    loop {
        let s: u32 = prefix.iter().sum();
        f(&prefix, (deg - s) as usize + 1);
        // odometer on the prefix, keeping the sum <= deg
        let mut k = n - 1;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            prefix[k] += 1;
            if prefix.iter().sum::<u32>() <= deg {
                break;
            }
            prefix[k] = 0;
        }
    }
}

/// Successive powers `F^e` computed by repeated multiplication with `F`.
pub struct PowerLadder<R: CoeffRing> {
    ring: R,
    base: Vec<(Vec<u32>, R::Elem)>,
    base_offsets: Vec<usize>,
    exponent: u64,
    current: DensePoly<R>,
    scratch: Vec<R::Elem>,
}

impl<R: CoeffRing> PowerLadder<R> {
    /// Ladder for the powers of `f` (homogeneous or not) up to `max_exp`.
    /// `mem_cap` bounds the bytes of the two dense buffers.
    pub fn new(f: &MultiPoly<R>, max_exp: u64, mem_cap: u64) -> Result<Self> {
        let ring = f.ring().clone();
        let n = f.nvars();
        let d = f.total_degree().unwrap_or(0) as u64;
        let max_deg = d
            .checked_mul(max_exp)
            .filter(|&m| m < u32::MAX as u64)
            .ok_or_else(|| Error::Resource(format!("power degree {d} * {max_exp} overflows")))?;
        let pad = d as usize;
        let side = max_deg as usize + 1 + pad;
        let cells = (side as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let bytes = cells.saturating_mul(2 * std::mem::size_of::<R::Elem>().max(8) as u128);
        if bytes > mem_cap as u128 {
            return Err(Error::Resource(format!(
                "dense power of degree {max_deg} in {n} variables needs {bytes} bytes (cap {mem_cap})"
            )));
        }
        let cells = cells as usize;
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * side;
        }
        let mut current = DensePoly { nvars: n, side, pad, strides, degree: 0, data: vec![ring.zero(); cells.max(1)] };
        let o = current.offset(&vec![0; n]);
        current.data[o] = ring.one();
        let base: Vec<(Vec<u32>, R::Elem)> = f.terms().map(|(e, c)| (e.to_vec(), c.clone())).collect();
        let base_offsets =
            base.iter().map(|(e, _)| e.iter().zip(&current.strides).map(|(&x, &s)| x as usize * s).sum()).collect();
        let scratch = vec![ring.zero(); cells.max(1)];
        Ok(PowerLadder { ring, base, base_offsets, exponent: 0, current, scratch })
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn current(&self) -> &DensePoly<R> {
        &self.current
    }

    /// Multiplies the current power by `F` once.
    pub fn step(&mut self) {
        let ring = &self.ring;
        let n = self.current.nvars;
        let d = self.base.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0);
        let new_deg = self.current.degree + d;
        let old = &self.current.data;
        let out = &mut self.scratch;
        let strides = &self.current.strides;
        let pad = self.current.pad;
        let mut acc: Vec<R::Acc> = Vec::new();
        for_each_simplex_row(n, new_deg, |prefix, run| {
            let row: usize = prefix.iter().zip(strides).map(|(&x, &s)| (x as usize + pad) * s).sum::<usize>() + pad;
            acc.clear();
            acc.resize(run, ring.acc_zero());
            for ((_, c), &off) in self.base.iter().zip(&self.base_offsets) {
                let src = &old[row - off..row - off + run];
                for (a, x) in acc.iter_mut().zip(src) {
                    ring.acc_mul_add(a, c, x);
                }
            }
            for (b, a) in acc.iter().enumerate() {
                out[row + b] = ring.acc_reduce(a);
            }
        });
        std::mem::swap(&mut self.current.data, &mut self.scratch);
        self.current.degree = new_deg;
        self.exponent += 1;
    }

    /// Advances to `F^e`; `e` must not be below the current exponent.
    pub fn advance_to(&mut self, e: u64) -> Result<&DensePoly<R>> {
        if e < self.exponent {
            return Err(Error::Inconsistent(format!("ladder is already at F^{}", self.exponent)));
        }
        let cap = self.current.side - 1 - self.current.pad;
        let d = self.base.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0) as u64;
        if d * e > cap as u64 {
            return Err(Error::Resource(format!("ladder was sized for degree {cap}, F^{e} needs {}", d * e)));
        }
        while self.exponent < e {
            self.step();
        }
        Ok(&self.current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Zmod;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EX24: &str = "6*T0^6 + 6*T0^5*T1 + 2*T0^5*T2 + 6*T0^4*T1^2 + 5*T0^4*T2^2 + 5*T0^3*T1^3 + T0^2*T1^4 + 6*T0*T1^5 + 5*T0*T2^5 + 3*T1^6 + 5*T2^6";

    fn random_poly(ring: &Zmod, nvars: usize, deg: u32, rng: &mut ChaCha8Rng, homogeneous: bool) -> MultiPoly<Zmod> {
        let mut p = MultiPoly::zero(ring, nvars);
        for_each_simplex_row(nvars, deg, |prefix, run| {
            for b in 0..run {
                let mut e = prefix.to_vec();
                e.push(b as u32);
                if homogeneous && e.iter().sum::<u32>() != deg {
                    continue;
                }
                p.add_term(e, rng.gen_range(0..ring.m()));
            }
        });
        p
    }

    #[test]
    fn parse_examples() {
        let p = parse_rational("T0^6 - 2*T1^6").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.homogeneous_degree().unwrap(), 6);
        let ex = parse_rational(EX24).unwrap();
        assert_eq!(ex.len(), 11);
        let q = parse_rational("1/8*T1^2").unwrap();
        assert_eq!(q.coeff(&[0, 2]), BigRational::new(1.into(), 8.into()));
        assert!(parse_rational("2**T0").is_err());
        assert!(parse_rational("T0 + x").is_err());
        assert!(parse_rational("T0^").is_err());
        assert!(parse_rational("T0 +").is_err());
    }

    #[test]
    fn format_round_trip() {
        for text in [EX24, "T0^6 - 2*T1^6", "-1/3*T0*T2 + 7 - T1", "T0^2 + 2*T0*T1 + 1/8*T1^2"] {
            let p = parse_rational(text).unwrap();
            let s = p.to_string();
            let again = parse_with(&s, &Rationals, Some(p.nvars()), &[]).unwrap();
            assert_eq!(again, p, "{text} -> {s}");
            assert_eq!(again.to_string(), s);
        }
        let ring = Zmod::new(7).unwrap();
        let p = parse(EX24, &ring, None).unwrap();
        assert_eq!(parse(&p.to_string(), &ring, None).unwrap(), p);
    }

    #[test]
    fn symbols_parse_and_specialize() {
        let p = parse_with("1/8*a^2*T1^2 + a*b*T0*T2", &Rationals, Some(3), &["a", "b"]).unwrap();
        assert_eq!(p.nvars(), 5);
        let s = p.to_string();
        assert_eq!(parse_with(&s, &Rationals, Some(3), &["a", "b"]).unwrap(), p);
        let v =
            p.specialize_symbols(&[BigRational::from_integer(2.into()), BigRational::from_integer(3.into())]).unwrap();
        assert_eq!(v.to_string(), "6*T0*T2 + 1/2*T1^2");
    }

    #[test]
    fn dehomogenize_examples() {
        let fp = Zmod::new(5).unwrap();
        let f = parse("T0^2 + T1^2", &fp, None).unwrap();
        let target = Zmod::new(125).unwrap();
        let g = lift_and_dehomogenize(&f, 0, &target).unwrap();
        assert_eq!(g.nvars(), 1);
        assert_eq!(g.to_string(), "T0^2 + 1");
        let h = parse("T0*T1", &fp, None).unwrap();
        assert_eq!(lift_and_dehomogenize(&h, 1, &target).unwrap().to_string(), "T0");
        let f7 = Zmod::new(7).unwrap();
        let ex = parse(EX24, &f7, None).unwrap();
        let g = lift_and_dehomogenize(&ex, 0, &f7).unwrap();
        assert_eq!(g.len(), 11);
        assert!(lift_and_dehomogenize(&parse("T0^2 + T1", &fp, None).unwrap(), 0, &target).is_err());
    }

    #[test]
    fn power_examples() {
        let r = Zmod::new(343).unwrap();
        let g = parse("1 + T0", &r, None).unwrap();
        assert_eq!(g.pow(0), MultiPoly::one(&r, 1));
        assert_eq!(g.pow(3).to_string(), "T0^3 + 3*T0^2 + 3*T0 + 1");
    }

    #[test]
    fn power_is_additive_in_exponent() {
        let r = Zmod::new(49).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let g = random_poly(&r, 2, 3, &mut rng, false);
            let (a, b) = (rng.gen_range(0..5), rng.gen_range(0..5));
            assert_eq!(g.pow(a + b), g.pow(a).mul(&g.pow(b)).unwrap());
        }
    }

    #[test]
    fn quasi_power_examples_and_homomorphism() {
        let r = Zmod::new(7).unwrap();
        let g = parse("T0 + 2*T1", &r, None).unwrap();
        assert_eq!(g.quasi_power(3).to_string(), "T0^3 + 2*T1^3");
        assert_eq!(g.quasi_power(1), g);
        let c = MultiPoly::constant(&r, 2, 5);
        assert_eq!(c.quasi_power(4), c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let g = random_poly(&r, 2, 3, &mut rng, false);
            let h = random_poly(&r, 2, 2, &mut rng, false);
            let n = rng.gen_range(1..5);
            assert_eq!(g.mul(&h).unwrap().quasi_power(n), g.quasi_power(n).mul(&h.quasi_power(n)).unwrap());
            assert_eq!(g.add(&h).unwrap().quasi_power(n), g.quasi_power(n).add(&h.quasi_power(n)).unwrap());
        }
    }

    #[test]
    fn quasi_norm_examples_and_recursion() {
        let r = Zmod::new(27).unwrap();
        let g = parse("T0 + 1", &r, None).unwrap();
        assert_eq!(g.quasi_norm(3, 1).unwrap(), g);
        let expect = g.mul(&parse("T0^3 + 1", &r, None).unwrap()).unwrap();
        assert_eq!(g.quasi_norm(3, 2).unwrap(), expect);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let g = random_poly(&r, 2, 2, &mut rng, false);
            for k in 1..3 {
                let lhs = g.quasi_norm(3, k + 1).unwrap();
                let rhs = g.quasi_power(3u32.pow(k)).mul(&g.quasi_norm(3, k).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn derivative_and_evaluation() {
        let r = Zmod::new(11).unwrap();
        let g = parse("T0^2*T1", &r, None).unwrap();
        assert_eq!(g.partial_derivative(0).unwrap().to_string(), "2*T0*T1");
        let s = parse("T0 + T1", &r, None).unwrap();
        assert_eq!(s.evaluate(&[1, 1]).unwrap(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let f = random_poly(&r, 3, 6, &mut rng, true);
            let mut euler = MultiPoly::zero(&r, 3);
            for k in 0..3 {
                euler = euler.add(&MultiPoly::var(&r, 3, k).mul(&f.partial_derivative(k).unwrap()).unwrap()).unwrap();
            }
            assert_eq!(euler, f.scale(&6));
        }
    }

    #[test]
    fn degree_bookkeeping() {
        let r = Zmod::new(49).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = random_poly(&r, 2, 3, &mut rng, false);
        g.add_term(vec![3, 0], 1);
        for m in 0..5 {
            assert_eq!(g.pow(m).total_degree(), Some(3 * m as u32));
        }
    }

    #[test]
    fn ladder_matches_sparse_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            let r = Zmod::new(7u64.pow(4)).unwrap();
            let f = random_poly(&r, n, 3, &mut rng, false);
            let mut ladder = PowerLadder::new(&f, 6, 1 << 30).unwrap();
            for e in [0u64, 1, 2, 5, 6] {
                let d = ladder.advance_to(e).unwrap().to_sparse(&r);
                assert_eq!(d, f.pow(e), "n={n} e={e}");
            }
            assert!(ladder.advance_to(7).is_err());
            assert!(ladder.advance_to(2).is_err());
        }
        let r = Zmod::new(7).unwrap();
        let f = random_poly(&r, 2, 6, &mut rng, false);
        assert!(PowerLadder::new(&f, 1000, 1 << 20).is_err());
    }

    #[test]
    fn simplex_rows_cover_simplex() {
        let mut count = 0;
        for_each_simplex_row(3, 4, |_, run| count += run);
        assert_eq!(count, 35);
    }
}
