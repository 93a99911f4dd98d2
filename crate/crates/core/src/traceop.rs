//! Matrices of the trace operator `M_{g,1} = kappa . m_g` on truncated
//! monomial bases, their power traces, and the two counting congruences.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{binomial, CoeffRing, ResidueRing, Zmod, ZmodBig};
use crate::error::{Error, Result};
use crate::mpoly::{for_each_simplex_row, DensePoly, MultiPoly};
use crate::ring::{CoefficientKind, CoefficientVector, PadicContext, PadicInt};

/// Default memory cap for dense matrices and power buffers, in bytes.
pub const DEFAULT_MEM_CAP: u64 = 13 * (1 << 30);

/// Environment variable overriding [`DEFAULT_MEM_CAP`].
pub const MEM_CAP_ENV: &str = "K3ZETA_MEM_CAP_BYTES";

pub fn mem_cap() -> u64 {
    std::env::var(MEM_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MEM_CAP)
}

/// Monomials of total degree `<= D` in `N` variables, graded-lex ascending.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree_bound: u32,
    monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree_bound: u32) -> Self {
        let mut monomials = Vec::new();
        for d in 0..=degree_bound {
            let mut level = Vec::new();
            if nvars == 0 {
                if d == 0 {
                    level.push(Vec::new());
                }
            } else {
                for_each_simplex_row(nvars, d, |prefix, _| {
                    let s: u32 = prefix.iter().sum();
                    let mut e = prefix.to_vec();
                    e.push(d - s);
                    level.push(e);
                });
            }
            level.sort_by(|a, b| b.cmp(a));
            monomials.extend(level);
        }
        let index = monomials.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        MonomialBasis { nvars, degree_bound, monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn monomial(&self, k: usize) -> &[u32] {
        &self.monomials[k]
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

/// `D = ceil(deg_g / (q - 1))`.
pub fn degree_bound(deg_g: u64, q: u64) -> u32 {
    deg_g.div_ceil(q - 1) as u32
}

pub fn basis_for(deg_g: u64, q: u64, nvars: usize) -> MonomialBasis {
    MonomialBasis::new(nvars, degree_bound(deg_g, q))
}

/// `binom(D + N, N)` without building the basis.
pub fn basis_dim(deg_g: u64, q: u64, nvars: usize) -> BigInt {
    let d = degree_bound(deg_g, q) as i64;
    binomial(d + nvars as i64, nvars as u64)
}

/// Anything that can report coefficients by exponent vector.
pub trait CoeffSource<R: CoeffRing> {
    fn source_nvars(&self) -> usize;
    fn source_degree(&self) -> u32;
    fn coeff_at(&self, ring: &R, e: &[u32]) -> R::Elem;
}

impl<R: CoeffRing> CoeffSource<R> for MultiPoly<R> {
    fn source_nvars(&self) -> usize {
        self.nvars()
    }

    fn source_degree(&self) -> u32 {
        self.total_degree().unwrap_or(0)
    }

    fn coeff_at(&self, _ring: &R, e: &[u32]) -> R::Elem {
        self.coeff(e)
    }
}

impl<R: CoeffRing> CoeffSource<R> for DensePoly<R> {
    fn source_nvars(&self) -> usize {
        self.nvars()
    }

    fn source_degree(&self) -> u32 {
        self.degree()
    }

    fn coeff_at(&self, ring: &R, e: &[u32]) -> R::Elem {
        self.get(e).cloned().unwrap_or_else(|| ring.zero())
    }
}

/// Dense square matrix of `M_{g,1}` in the basis.
#[derive(Clone, Debug)]
pub struct TraceMatrix<R: CoeffRing> {
    ring: R,
    basis: MonomialBasis,
    entries: Vec<R::Elem>,
}

impl<R: CoeffRing> TraceMatrix<R> {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn entry(&self, row: usize, col: usize) -> &R::Elem {
        &self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[R::Elem] {
        &self.entries
    }

    pub fn from_entries(ring: &R, basis: MonomialBasis, entries: Vec<R::Elem>) -> Result<Self> {
        if entries.len() != basis.dim() * basis.dim() {
            return Err(Error::Inconsistent("entry count does not match the basis".into()));
        }
        Ok(TraceMatrix { ring: ring.clone(), basis, entries })
    }

    pub fn trace(&self) -> R::Elem {
        let n = self.dim();
        (0..n).fold(self.ring.zero(), |acc, k| self.ring.add(&acc, &self.entries[k * n + k]))
    }
}

/// Bytes needed to hold the working set of the power-trace computation.
pub fn matrix_bytes(dim: u64, elem_bytes: u64) -> u128 {
    (dim as u128) * (dim as u128) * elem_bytes as u128 * 5
}

/// Matrix of `M_{g,1}` for `g` given by any coefficient source.
pub fn build_matrix_from<R: CoeffRing, S: CoeffSource<R> + Sync + ?Sized>(
    ring: &R,
    g: &S,
    q: u64,
    cap: u64,
) -> Result<TraceMatrix<R>> {
    let nvars = g.source_nvars();
    let deg = g.source_degree() as u64;
    let dim_big = basis_dim(deg, q, nvars);
    let dim = dim_big.to_u64().unwrap_or(u64::MAX);
    let elem = std::mem::size_of::<R::Elem>().max(8) as u64;
    if matrix_bytes(dim, elem) > cap as u128 {
        return Err(Error::Resource(format!(
            "trace matrix of dimension {dim_big} exceeds the memory cap of {cap} bytes"
        )));
    }
    let basis = basis_for(deg, q, nvars);
    Ok(build_matrix_with_basis(ring, g, q, basis))
}

/// Matrix of `M_{g,1}` on a caller-chosen basis.
pub fn build_matrix_with_basis<R: CoeffRing, S: CoeffSource<R> + Sync + ?Sized>(
    ring: &R,
    g: &S,
    q: u64,
    basis: MonomialBasis,
) -> TraceMatrix<R> {
    let nvars = basis.nvars();
    let n = basis.dim();
    let q32 = q as u32;
    let mut entries = vec![ring.zero(); n * n];
    entries.par_chunks_mut(n.max(1)).enumerate().for_each(|(row, out)| {
        let target: Vec<u32> = basis.monomial(row).iter().map(|&x| x * q32).collect();
        let mut e = vec![0u32; nvars];
        for (col, slot) in out.iter_mut().enumerate() {
            let m = basis.monomial(col);
            if target.iter().zip(m).all(|(&t, &x)| t >= x) {
                for k in 0..nvars {
                    e[k] = target[k] - m[k];
                }
                *slot = g.coeff_at(ring, &e);
            }
        }
    });
    TraceMatrix { ring: ring.clone(), basis, entries }
}

pub fn build_matrix<R: CoeffRing>(g: &MultiPoly<R>, q: u64) -> Result<TraceMatrix<R>> {
    build_matrix_from(g.ring(), g, q, mem_cap())
}

/// Sum of the coefficients of `g` at exponents divisible by `q^i - 1`.
pub fn trace_direct<R: CoeffRing>(g: &MultiPoly<R>, i: u32, q: u64) -> R::Elem {
    let m = q.pow(i) - 1;
    g.terms()
        .filter(|(e, _)| e.iter().all(|&x| (x as u64).is_multiple_of(m)))
        .fold(g.ring().zero(), |acc, (_, c)| g.ring().add(&acc, c))
}

/// Rings with a matrix-product kernel.
pub trait MatKernel: CoeffRing {
    /// `A * B` for row-major `n x n` matrices.
    fn matmul(&self, a: &[Self::Elem], b: &[Self::Elem], n: usize) -> Vec<Self::Elem> {
        generic_matmul(self, a, b, n)
    }

    /// `tr(A * B)`.
    fn trace_of_product(&self, a: &[Self::Elem], b: &[Self::Elem], n: usize) -> Self::Elem {
        let mut acc = self.acc_zero();
        for i in 0..n {
            for j in 0..n {
                self.acc_mul_add(&mut acc, &a[i * n + j], &b[j * n + i]);
            }
        }
        self.acc_reduce(&acc)
    }
}

pub fn generic_matmul<R: CoeffRing>(ring: &R, a: &[R::Elem], b: &[R::Elem], n: usize) -> Vec<R::Elem> {
    let mut bt = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            bt.push(b[k * n + j].clone());
        }
    }
    let mut c = vec![ring.zero(); n * n];
    c.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        let ar = &a[i * n..(i + 1) * n];
        for (j, slot) in row.iter_mut().enumerate() {
            let br = &bt[j * n..(j + 1) * n];
            let mut acc = ring.acc_zero();
            for (x, y) in ar.iter().zip(br) {
                ring.acc_mul_add(&mut acc, x, y);
            }
            *slot = ring.acc_reduce(&acc);
        }
    });
    c
}

impl MatKernel for ZmodBig {}
impl MatKernel for crate::arith::Rationals {}
impl MatKernel for crate::ffield::GfRing {}

impl MatKernel for Zmod {
    fn matmul(&self, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
        zmod_matmul(self.m(), a, b, n)
    }

    fn trace_of_product(&self, a: &[u64], b: &[u64], n: usize) -> u64 {
        let m = self.m();
        let chunk = safe_chunk(m);
        let mut total: u128 = 0;
        for i in 0..n {
            let mut acc: u128 = 0;
            let mut cnt = 0usize;
            for j in 0..n {
                acc += a[i * n + j] as u128 * b[j * n + i] as u128;
                cnt += 1;
                if cnt == chunk {
                    acc %= m as u128;
                    cnt = 0;
                }
            }
            total = (total + acc % m as u128) % m as u128;
        }
        total as u64
    }
}

/// Number of products of residues below `m` that fit a `u128` accumulator.
fn safe_chunk(m: u64) -> usize {
    let sq = (m as u128 - 1) * (m as u128 - 1);
    if sq == 0 {
        return usize::MAX;
    }
    ((u128::MAX - m as u128) / sq).clamp(1, 1 << 30) as usize
}

const TILE: usize = 64;

/// Blocked product modulo `m < 2^63` with `u128` accumulators and lazy
/// reduction.
pub fn zmod_matmul(m: u64, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let mut bt = vec![0u64; n * n];
    for k in 0..n {
        for j in 0..n {
            bt[j * n + k] = b[k * n + j];
        }
    }
    let chunk = safe_chunk(m).min(n.max(1));
    let m128 = m as u128;
    let mut c = vec![0u64; n * n];
    // rows in groups of four
    c.par_chunks_mut(4 * n.max(1)).enumerate().for_each(|(blk, out)| {
        let r0 = blk * 4;
        let rows = out.len() / n.max(1);
        let ar: Vec<&[u64]> = (0..rows).map(|r| &a[(r0 + r) * n..(r0 + r + 1) * n]).collect();
        for jt in (0..n).step_by(TILE) {
            let jend = (jt + TILE).min(n);
            for j in jt..jend {
                let br = &bt[j * n..(j + 1) * n];
                if rows == 4 {
                    let mut acc = [0u128; 4];
                    let mut k0 = 0;
                    while k0 < n {
                        let k1 = (k0 + chunk).min(n);
                        let (mut s0, mut s1, mut s2, mut s3) = (0u128, 0u128, 0u128, 0u128);
                        for k in k0..k1 {
                            let y = br[k] as u128;
                            s0 += ar[0][k] as u128 * y;
                            s1 += ar[1][k] as u128 * y;
                            s2 += ar[2][k] as u128 * y;
                            s3 += ar[3][k] as u128 * y;
                        }
                        acc[0] = (acc[0] + s0 % m128) % m128;
                        acc[1] = (acc[1] + s1 % m128) % m128;
                        acc[2] = (acc[2] + s2 % m128) % m128;
                        acc[3] = (acc[3] + s3 % m128) % m128;
                        k0 = k1;
                    }
                    for r in 0..4 {
                        out[r * n + j] = acc[r] as u64;
                    }
                } else {
                    for r in 0..rows {
                        let mut acc = 0u128;
                        let mut k0 = 0;
                        while k0 < n {
                            let k1 = (k0 + chunk).min(n);
                            let mut s = 0u128;
                            for k in k0..k1 {
                                s += ar[r][k] as u128 * br[k] as u128;
                            }
                            acc = (acc + s % m128) % m128;
                            k0 = k1;
                        }
                        out[r * n + j] = acc as u64;
                    }
                }
            }
        }
    });
    c
}

/// `tr(M^i)` for `i = 1..n` as residues.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceSequence {
    pub ctx: PadicContext,
    pub values: Vec<PadicInt>,
}

/// Smallest set `S` of exponents with `1 in S`, each other element a sum of
/// two earlier ones, such that every `i <= n` is in `S` or a sum of two
/// elements of `S`. Products needed = `|S| - 1`.
pub fn trace_chain(n: u32) -> Vec<u32> {
    if n <= 2 {
        return vec![1];
    }
    for size in 2..=8usize {
        let mut chain = vec![1u32];
        if let Some(c) = search_chain(&mut chain, size, n) {
            return c;
        }
    }
    (1..=n.div_ceil(2)).collect()
}

fn covers(chain: &[u32], n: u32) -> bool {
    (1..=n).all(|i| chain.contains(&i) || chain.iter().any(|&a| a < i && chain.contains(&(i - a))))
}

fn search_chain(chain: &mut Vec<u32>, size: usize, n: u32) -> Option<Vec<u32>> {
    if chain.len() == size {
        return if covers(chain, n) { Some(chain.clone()) } else { None };
    }
    let last = *chain.last().unwrap();
    // the largest element must reach at least n/2
    let mut cands: Vec<u32> = Vec::new();
    for &a in chain.iter() {
        for &b in chain.iter() {
            let s = a + b;
            if s > last && s <= n && !cands.contains(&s) {
                cands.push(s);
            }
        }
    }
    cands.sort();
    for s in cands {
        chain.push(s);
        if let Some(c) = search_chain(chain, size, n) {
            return Some(c);
        }
        chain.pop();
    }
    None
}

fn to_padic<R: ResidueRing>(ctx: &PadicContext, ring: &R, v: &R::Elem) -> PadicInt {
    ctx.from_biguint(&ring.to_biguint(v))
}

fn check_ring<R: ResidueRing>(ctx: &PadicContext, ring: &R) -> Result<()> {
    if &ring.modulus() != ctx.modulus() {
        return Err(Error::DomainMismatch(format!(
            "matrix ring Z/{} does not match p^l = {}",
            ring.modulus(),
            ctx.modulus()
        )));
    }
    Ok(())
}

/// `tr(M^i)`, `i = 1..n`, via the powers in [`trace_chain`] and traces of
/// products.
pub fn power_traces<R: ResidueRing + MatKernel>(
    m: &TraceMatrix<R>,
    n: u32,
    ctx: &PadicContext,
) -> Result<TraceSequence> {
    check_ring(ctx, m.ring())?;
    let ring = m.ring();
    let dim = m.dim();
    let chain = trace_chain(n);
    let mut powers: Vec<(u32, Vec<R::Elem>)> = vec![(1, m.entries.clone())];
    for &s in &chain[1..] {
        let (a, b) = chain_split(&powers, s);
        let prod = ring.matmul(&powers[a].1, &powers[b].1, dim);
        powers.push((s, prod));
    }
    let mut values = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let v = if let Some(p) = powers.iter().find(|(e, _)| *e == i) {
            (0..dim).fold(ring.zero(), |acc, k| ring.add(&acc, &p.1[k * dim + k]))
        } else {
            let (a, b) = chain_split(&powers, i);
            ring.trace_of_product(&powers[a].1, &powers[b].1, dim)
        };
        values.push(to_padic(ctx, ring, &v));
    }
    Ok(TraceSequence { ctx: ctx.clone(), values })
}

fn chain_split<E>(powers: &[(u32, E)], s: u32) -> (usize, usize) {
    for (ia, (a, _)) in powers.iter().enumerate() {
        if *a < s {
            if let Some(ib) = powers.iter().position(|(b, _)| *b == s - a) {
                return (ia, ib);
            }
        }
    }
    unreachable!("exponent {s} is not reachable from the chain")
}

/// Reference implementation: `M^(i+1) = M * M^i`.
pub fn power_traces_iterated<R: ResidueRing + MatKernel>(
    m: &TraceMatrix<R>,
    n: u32,
    ctx: &PadicContext,
) -> Result<TraceSequence> {
    check_ring(ctx, m.ring())?;
    let ring = m.ring();
    let dim = m.dim();
    let mut cur = m.entries.clone();
    let mut values = Vec::new();
    for i in 1..=n {
        if i > 1 {
            cur = ring.matmul(&m.entries, &cur, dim);
        }
        let t = (0..dim).fold(ring.zero(), |acc, k| ring.add(&acc, &cur[k * dim + k]));
        values.push(to_padic(ctx, ring, &t));
    }
    Ok(TraceSequence { ctx: ctx.clone(), values })
}

fn torus_factor(ctx: &PadicContext, n_vars: usize, i: u32) -> PadicInt {
    let qi = BigInt::from(ctx.p()).pow(i);
    ctx.int(&num_traits::pow(qi - 1, n_vars))
}

fn check_traces(traces: &[TraceSequence], ctx: &PadicContext, i: u32) -> Result<()> {
    if traces.len() != ctx.l() as usize {
        return Err(Error::Inconsistent(format!("expected {} trace sequences, got {}", ctx.l(), traces.len())));
    }
    for t in traces {
        if &t.ctx != ctx {
            return Err(Error::DomainMismatch("trace sequence context differs".into()));
        }
        if t.values.len() < i as usize || i == 0 {
            return Err(Error::Inconsistent(format!("no trace for i = {i}")));
        }
    }
    Ok(())
}

/// `(q^i - 1)^N [1 + sum_k (-1)^k binom(l, k) tr M_k^i] mod p^l`, the number of
/// torus points on the hypersurface.
pub fn hypersurface_congruence(
    traces: &[TraceSequence],
    ctx: &PadicContext,
    n_vars: usize,
    i: u32,
) -> Result<PadicInt> {
    check_traces(traces, ctx, i)?;
    let l = ctx.l() as i64;
    let mut s = ctx.from_u64(1);
    for (k, t) in traces.iter().enumerate() {
        let k = k as u64 + 1;
        let mut c = binomial(l, k);
        if k % 2 == 1 {
            c = -c;
        }
        s = s.add(&ctx.int(&c).mul(&t.values[i as usize - 1])?)?;
    }
    torus_factor(ctx, n_vars, i).mul(&s)
}

/// `(q^i - 1)^N [1 + sum_k A_{b,k} tr M_k^i] mod p^l`, the number of points of
/// the double cover over the torus.
pub fn doublecover_congruence(
    traces: &[TraceSequence],
    coeffs: &CoefficientVector,
    ctx: &PadicContext,
    n_vars: usize,
    i: u32,
) -> Result<PadicInt> {
    if !matches!(coeffs.kind, CoefficientKind::Eulerian { .. }) {
        return Err(Error::Inconsistent("double cover congruence needs Eulerian coefficients".into()));
    }
    if &coeffs.ctx != ctx {
        return Err(Error::DomainMismatch("coefficient context differs".into()));
    }
    check_traces(traces, ctx, i)?;
    let mut s = ctx.from_u64(1);
    for (a, t) in coeffs.values.iter().zip(traces) {
        s = s.add(&a.mul(&t.values[i as usize - 1])?)?;
    }
    torus_factor(ctx, n_vars, i).mul(&s)
}

/// Residue ring for `ctx`, native when possible.
pub enum ResidueBackend {
    Native(Zmod),
    Big(ZmodBig),
}

impl ResidueBackend {
    pub fn for_ctx(ctx: &PadicContext) -> Self {
        match ctx.native_ring() {
            Some(z) => ResidueBackend::Native(z),
            None => ResidueBackend::Big(ctx.big_ring()),
        }
    }
}

/// Least non-negative residue as a big integer.
pub fn residue_of(v: &PadicInt) -> BigUint {
    v.residue().clone()
}

pub fn is_zero_residue(v: &PadicInt) -> bool {
    v.residue().is_zero()
}
