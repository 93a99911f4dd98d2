use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use super::plan::{count_interval, digits_for, multipliers};
use super::{
    naive_stratum_count, strata, stratum_poly, stratum_size, CountBound, CountResult, Method, ModelKind, VarietyModel,
};
use crate::arith::{big_pow, legendre, ResidueRing, Zmod};
use crate::error::{Error, Result};
use crate::ffield::{self, field_construct, SmallField};
use crate::mpoly::{MultiPoly, PowerLadder};
use crate::ring::{eulerian_coefficients, PadicContext, PadicInt};
use crate::traceop::{
    build_matrix_from, doublecover_congruence, hypersurface_congruence, mem_cap, power_traces, MatKernel,
    ResidueBackend, TraceSequence,
};

/// Line tori of double covers are enumerated directly up to this many points.
const LINE_NAIVE_LIMIT: u64 = 1 << 22;

#[derive(Clone, Debug)]
pub struct PadicOptions {
    /// Interval the counts are resolved in.
    pub bound: CountBound,
    /// Forces the number of p-adic digits.
    pub l: Option<u32>,
    /// Forces the odd shift `b` of the double-cover exponents.
    pub b: Option<u64>,
    /// Memory cap in bytes for dense powers and trace matrices.
    pub mem_cap: u64,
}

impl Default for PadicOptions {
    fn default() -> Self {
        PadicOptions { bound: CountBound::Elementary, l: None, b: None, mem_cap: mem_cap() }
    }
}

impl PadicOptions {
    pub fn with_bound(bound: CountBound) -> Self {
        PadicOptions { bound, ..Default::default() }
    }
}

/// Integers in the interval that share the computed residue.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountCandidates {
    pub i: u32,
    pub modulus: BigUint,
    pub residue: BigUint,
    pub interval: (BigInt, BigInt),
    pub candidates: Vec<BigInt>,
}

impl CountCandidates {
    fn into_result(self) -> Result<CountResult> {
        if self.candidates.len() != 1 {
            return Err(Error::Precision(format!(
                "{} integers in [{}, {}] are congruent to {} mod {} for i = {}",
                self.candidates.len(),
                self.interval.0,
                self.interval.1,
                self.residue,
                self.modulus,
                self.i
            )));
        }
        Ok(CountResult {
            i: self.i,
            count: self.candidates[0].clone(),
            method: Method::Padic,
            residue_modulus: Some(self.modulus),
            residue: Some(self.residue),
            interval: Some(self.interval),
        })
    }
}

fn exponents(kind: ModelKind, p: u64, l: u32, a: u64, b: u64) -> Vec<u64> {
    (1..=l as u64)
        .map(|k| match kind {
            ModelKind::Hypersurface => k * a * (p - 1),
            ModelKind::DoubleCover => (b + 2 * k - 2) * (p - 1) / 2,
        })
        .collect()
}

fn traces_in<R: ResidueRing + MatKernel>(
    ring: &R,
    g: &MultiPoly<Zmod>,
    exps: &[u64],
    n: u32,
    ctx: &PadicContext,
    cap: u64,
) -> Result<Vec<TraceSequence>> {
    let lifted = g.map(ring, |c| ring.from_i64(*c as i64));
    let mut ladder = PowerLadder::new(&lifted, *exps.last().unwrap(), cap)?;
    let mut out = Vec::with_capacity(exps.len());
    for &e in exps {
        let power = ladder.advance_to(e)?;
        let m = build_matrix_from(ring, power, ctx.p(), cap)?;
        out.push(power_traces(&m, n, ctx)?);
    }
    Ok(out)
}

/// Residues mod `p^l` of the torus counts of `g` (a polynomial in `m`
/// variables over `F_p`, all of them nonzero on the torus) for `i = 1..=n`.
/// `mult` is `a` for hypersurfaces and the odd shift `b` for double covers.
pub fn torus_residues(
    kind: ModelKind,
    g: &MultiPoly<Zmod>,
    ctx: &PadicContext,
    mult: u64,
    n: u32,
    cap: u64,
) -> Result<Vec<PadicInt>> {
    let p = ctx.p();
    if g.ring().m() != p {
        return Err(Error::DomainMismatch(format!("polynomial over Z/{} but p = {p}", g.ring().m())));
    }
    let l = ctx.l();
    let exps = exponents(kind, p, l, mult, mult);
    let traces = match ResidueBackend::for_ctx(ctx) {
        ResidueBackend::Native(r) => traces_in(&r, g, &exps, n, ctx, cap)?,
        ResidueBackend::Big(r) => traces_in(&r, g, &exps, n, ctx, cap)?,
    };
    let nv = g.nvars();
    match kind {
        ModelKind::Hypersurface => (1..=n).map(|i| hypersurface_congruence(&traces, ctx, nv, i)).collect(),
        ModelKind::DoubleCover => {
            let coeffs = eulerian_coefficients(ctx, mult)?;
            (1..=n).map(|i| doublecover_congruence(&traces, &coeffs, ctx, nv, i)).collect()
        }
    }
}

/// Largest possible weight of a torus stratum of dimension `m`.
fn stratum_max(kind: ModelKind, p: u64, i: u32, support: &[usize]) -> BigInt {
    let s = stratum_size(p, i, support);
    match kind {
        ModelKind::Hypersurface => s,
        ModelKind::DoubleCover => s * 2u32,
    }
}

/// Exact count of a one-dimensional torus, for every `i <= n`.
fn line_counts(kind: ModelKind, g: &MultiPoly<Zmod>, n: u32, cap: u64) -> Result<Vec<BigInt>> {
    let p = g.ring().m();
    let ring = g.ring();
    let mut coeffs = vec![0u64; g.total_degree().unwrap_or(0) as usize + 1];
    for (e, c) in g.terms() {
        coeffs[e[0] as usize] = *c;
    }
    let coeffs = ffield::trim(ring, coeffs);
    let mut out = Vec::with_capacity(n as usize);
    match kind {
        ModelKind::Hypersurface => {
            for i in 1..=n {
                let qi = big_pow(p, i as u64);
                let c = if coeffs.is_empty() {
                    qi - 1
                } else {
                    let at_zero = coeffs[0] == 0;
                    BigInt::from(ffield::count_roots(ring, &coeffs, i)? - at_zero as usize)
                };
                out.push(c);
            }
        }
        ModelKind::DoubleCover => {
            let mut pending = Vec::new();
            for i in 1..=n {
                let small = p.checked_pow(i).filter(|&q| q <= LINE_NAIVE_LIMIT);
                match small {
                    Some(_) => {
                        let sf = SmallField::new(&field_construct(p, i)?)?;
                        out.push(naive_stratum_count(kind, g, &sf));
                    }
                    None => {
                        out.push(BigInt::zero());
                        pending.push(i);
                    }
                }
            }
            if let Some(&top) = pending.last() {
                let width = big_pow(p, top as u64) * 2u32;
                let l = digits_for(p, &width);
                let (_, b) = multipliers(p, l);
                let ctx = PadicContext::new(p, l)?;
                let res = torus_residues(kind, g, &ctx, b, top, cap)?;
                let m = BigInt::from(ctx.modulus().clone());
                for i in pending {
                    // the count lies in [0, 2(q^i - 1)], narrower than p^l
                    out[i as usize - 1] = BigInt::from(res[i as usize - 1].residue().clone()).mod_floor(&m);
                }
            }
        }
    }
    Ok(out)
}

/// Counts and candidate lists for `i = 1..=n`.
pub fn padic_count_candidates(model: &VarietyModel, n: u32, opts: &PadicOptions) -> Result<Vec<CountCandidates>> {
    if n == 0 {
        return Err(Error::Domain("need at least one extension degree".into()));
    }
    let p = model.p();
    let kind = model.kind();
    let intervals = (1..=n).map(|i| count_interval(model, i, opts.bound)).collect::<Result<Vec<_>>>()?;
    let width = intervals.iter().map(|(lo, hi)| hi - lo).max().unwrap();
    let l = opts.l.unwrap_or_else(|| digits_for(p, &width));
    let (a, b0) = multipliers(p, l);
    let b = opts.b.unwrap_or(b0);
    if kind == ModelKind::DoubleCover && (b.is_multiple_of(2) || b * (p - 1) / 2 < l as u64) {
        return Err(Error::Domain(format!("shift b = {b} must be odd with b (p-1)/2 >= {l}")));
    }
    let mult = match kind {
        ModelKind::Hypersurface => a,
        ModelKind::DoubleCover => b,
    };
    let ctx = PadicContext::new(p, l)?;
    let modulus = BigInt::from(ctx.modulus().clone());
    let d = model.degree();
    let mut exact = vec![BigInt::zero(); n as usize];
    let mut torus = vec![BigInt::zero(); n as usize];
    let mut torus_max = vec![BigInt::zero(); n as usize];
    for s in strata(model.n()) {
        let g = stratum_poly(model.f(), &s);
        match s.len() {
            1 => {
                let mut e = vec![0u32; model.n() + 1];
                e[s[0]] = d;
                let c = model.f().coeff(&e);
                for i in 1..=n {
                    exact[i as usize - 1] += match kind {
                        ModelKind::Hypersurface => (c == 0) as i64,
                        ModelKind::DoubleCover => 1 + (legendre(c as i64, p) as i64).pow(i),
                    };
                }
            }
            2 => {
                for (slot, c) in exact.iter_mut().zip(line_counts(kind, &g, n, opts.mem_cap)?) {
                    *slot += c;
                }
            }
            _ => {
                let res = torus_residues(kind, &g, &ctx, mult, n, opts.mem_cap)?;
                for i in 1..=n {
                    let k = i as usize - 1;
                    torus[k] += BigInt::from(res[k].residue().clone());
                    torus_max[k] += stratum_max(kind, p, i, &s);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let k = i as usize - 1;
        let (lo, hi) = intervals[k].clone();
        let residue = (&exact[k] + &torus[k]).mod_floor(&modulus);
        // the torus part lies in [0, torus_max] as well
        let tlo = (&lo - &exact[k]).max(BigInt::zero());
        let thi = (&hi - &exact[k]).min(torus_max[k].clone());
        let mut candidates = Vec::new();
        if tlo <= thi {
            let r = torus[k].mod_floor(&modulus);
            let mut t = &tlo + (&r - &tlo).mod_floor(&modulus);
            while t <= thi {
                candidates.push(&t + &exact[k]);
                t += &modulus;
            }
        }
        out.push(CountCandidates {
            i,
            modulus: ctx.modulus().clone(),
            residue: residue.to_biguint().unwrap(),
            interval: (lo, hi),
            candidates,
        });
    }
    Ok(out)
}

/// Resolved counts; fails with a precision error if a residue does not
/// determine the count within its interval.
pub fn padic_count(model: &VarietyModel, n: u32, opts: &PadicOptions) -> Result<Vec<CountResult>> {
    padic_count_candidates(model, n, opts)?.into_iter().map(CountCandidates::into_result).collect()
}

pub fn padic_count_hypersurface(model: &VarietyModel, n: u32, opts: &PadicOptions) -> Result<Vec<CountResult>> {
    if model.kind() != ModelKind::Hypersurface {
        return Err(Error::Domain("expected a hypersurface".into()));
    }
    padic_count(model, n, opts)
}

pub fn padic_count_doublecover(model: &VarietyModel, n: u32, opts: &PadicOptions) -> Result<Vec<CountResult>> {
    if model.kind() != ModelKind::DoubleCover {
        return Err(Error::Domain("expected a double cover".into()));
    }
    padic_count(model, n, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::naive_count;
    use crate::mpoly::parse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(kind: ModelKind, text: &str, p: u64) -> VarietyModel {
        VarietyModel::new(kind, parse(text, &Zmod::new(p).unwrap(), Some(3)).unwrap()).unwrap()
    }

    fn random_form(p: u64, nvars: usize, d: u32, rng: &mut ChaCha8Rng) -> MultiPoly<Zmod> {
        let mut f = MultiPoly::zero(&Zmod::new(p).unwrap(), nvars);
        crate::mpoly::for_each_simplex_row(nvars - 1, d, |prefix, run| {
            for b in 0..run {
                let mut e = prefix.to_vec();
                e.push(b as u32);
                let rest = d - e.iter().sum::<u32>();
                e.push(rest);
                f.add_term(e, rng.gen_range(0..p));
            }
        });
        f
    }

    #[test]
    fn hyperplane_is_a_line() {
        let m = model(ModelKind::Hypersurface, "T0", 5);
        let r = padic_count_hypersurface(&m, 3, &PadicOptions::default()).unwrap();
        for (i, c) in r.iter().enumerate() {
            assert_eq!(c.count, BigInt::from(5u64.pow(i as u32 + 1) + 1));
        }
    }

    #[test]
    fn plane_cubic_within_hasse() {
        let m = model(ModelKind::Hypersurface, "T0^3 + T1^3 + T2^3", 7);
        let opts = PadicOptions::with_bound(CountBound::Betti { b: 2 });
        let r = padic_count_hypersurface(&m, 2, &opts).unwrap();
        for c in &r {
            assert_eq!(c.count, naive_count(&m, c.i).unwrap().count);
            let m_mod = BigInt::from(c.residue_modulus.clone().unwrap());
            assert_eq!(c.count.mod_floor(&m_mod), BigInt::from(c.residue.clone().unwrap()));
        }
        assert!((&r[0].count - 8i32) * (&r[0].count - 8i32) <= BigInt::from(28));
    }

    #[test]
    fn random_quartic_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2 {
            let f = random_form(11, 3, 4, &mut rng);
            let m = VarietyModel::hypersurface(f).unwrap();
            let r = padic_count_hypersurface(&m, 2, &PadicOptions::default()).unwrap();
            for c in &r {
                assert_eq!(c.count, naive_count(&m, c.i).unwrap().count);
            }
        }
    }

    #[test]
    fn example_surface_small() {
        let m = model(ModelKind::DoubleCover, crate::EXAMPLE_SEXTIC, 7);
        let opts = PadicOptions::with_bound(CountBound::K3Weil { w: 22 });
        let r = padic_count_doublecover(&m, 2, &opts).unwrap();
        assert_eq!(r[0].count, BigInt::from(60));
        assert_eq!(r[1].count, BigInt::from(2488));
    }

    #[test]
    fn degenerate_square_monomial() {
        for c in [1u64, 3] {
            let m = model(ModelKind::DoubleCover, &format!("{c}*T0^2*T1^2*T2^2"), 7);
            let r = padic_count_doublecover(&m, 2, &PadicOptions::default()).unwrap();
            for x in &r {
                assert_eq!(x.count, naive_count(&m, x.i).unwrap().count);
            }
        }
    }

    #[test]
    fn random_double_covers_of_the_line_and_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (p, nv, d) in [(7u64, 2usize, 4u32), (11, 2, 6), (7, 3, 4)] {
            let f = random_form(p, nv, d, &mut rng);
            let m = VarietyModel::double_cover(f).unwrap();
            let r = padic_count_doublecover(&m, 2, &PadicOptions::default()).unwrap();
            for x in &r {
                assert_eq!(x.count, naive_count(&m, x.i).unwrap().count, "p={p} nv={nv} i={}", x.i);
            }
        }
    }

    #[test]
    fn forced_low_precision_gives_candidates() {
        let m = model(ModelKind::DoubleCover, crate::EXAMPLE_SEXTIC, 7);
        let opts = PadicOptions { l: Some(1), ..PadicOptions::with_bound(CountBound::K3Weil { w: 22 }) };
        let c = padic_count_candidates(&m, 1, &opts).unwrap();
        assert!(c[0].candidates.len() > 1);
        assert!(c[0].candidates.contains(&BigInt::from(60)));
        assert!(matches!(padic_count(&m, 1, &opts), Err(Error::Precision(_))));
    }
}
