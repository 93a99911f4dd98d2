use num_bigint::BigInt;

use super::{naive_stratum_count, strata, stratum_poly, CountResult, Method, ModelKind, VarietyModel};
use crate::arith::{is_prime_u64, pow_mod_u64, Zmod};
use crate::error::{Error, Result};
use crate::ffield::{field_construct, SmallField, ZERO_LOG};
use crate::mpoly::MultiPoly;

/// Largest table a convolution count will enumerate, in points.
const FFT_BUDGET: u64 = 1 << 30;

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Cyclic convolution over `(Z/p)^i`, indices read as base-`p` digit vectors.
/// Reference implementation, `O(q^2)`.
pub fn direct_convolution(a: &[u64], b: &[u64], p: u64) -> Vec<u128> {
    let q = a.len();
    assert_eq!(q, b.len());
    let digits = |mut x: usize| {
        let mut d = Vec::new();
        while x > 0 {
            d.push(x % p as usize);
            x /= p as usize;
        }
        d
    };
    let add = |x: usize, y: usize| {
        let (dx, dy) = (digits(x), digits(y));
        let mut r = 0usize;
        let mut scale = 1usize;
        for k in 0..dx.len().max(dy.len()) {
            let s = (dx.get(k).copied().unwrap_or(0) + dy.get(k).copied().unwrap_or(0)) % p as usize;
            r += s * scale;
            scale *= p as usize;
        }
        r
    };
    let mut out = vec![0u128; q];
    for (x, &ax) in a.iter().enumerate() {
        if ax == 0 {
            continue;
        }
        for (y, &by) in b.iter().enumerate() {
            out[add(x, y)] += ax as u128 * by as u128;
        }
    }
    out
}

/// Smallest prime `P = k p + 1` above `bound`.
fn transform_prime(p: u64, bound: u64) -> Option<u64> {
    let mut k = bound / p + 1;
    loop {
        let cand = k.checked_mul(p)?.checked_add(1)?;
        if cand >= 1 << 62 {
            return None;
        }
        if cand > bound && is_prime_u64(cand) {
            return Some(cand);
        }
        k += 1;
    }
}

/// Element of order exactly `p` in `(Z/P)^*`.
fn root_of_order(p: u64, modp: u64) -> u64 {
    let e = (modp - 1) / p;
    (2..modp).map(|g| pow_mod_u64(g, e, modp)).find(|&w| w != 1).unwrap()
}

/// In-place length-`p` DFT along every digit axis.
fn transform(v: &mut [u64], p: u64, modp: u64, w: u64) {
    let q = v.len();
    let p_us = p as usize;
    let pows: Vec<u64> = (0..p).map(|k| pow_mod_u64(w, k, modp)).collect();
    let mut buf = vec![0u64; p_us];
    let mut stride = 1usize;
    while stride < q {
        for block in (0..q).step_by(stride * p_us) {
            for off in 0..stride {
                let base = block + off;
                for (k, slot) in buf.iter_mut().enumerate() {
                    let mut acc: u128 = 0;
                    for t in 0..p_us {
                        acc += v[base + t * stride] as u128 * pows[(t * k) % p_us] as u128;
                    }
                    *slot = (acc % modp as u128) as u64;
                }
                for t in 0..p_us {
                    v[base + t * stride] = buf[t];
                }
            }
        }
        stride *= p_us;
    }
}

/// Convolution over `(Z/p)^i` by a digit-wise number-theoretic transform.
/// Exact as long as every output is below `bound`.
pub fn ntt_convolution(a: &[u64], b: &[u64], p: u64, bound: u64) -> Result<Vec<u64>> {
    let q = a.len() as u64;
    let modp = transform_prime(p, bound)
        .ok_or_else(|| Error::Resource(format!("no transform prime above {bound} fits in 62 bits")))?;
    let w = root_of_order(p, modp);
    let mut fa: Vec<u64> = a.iter().map(|x| x % modp).collect();
    let mut fb: Vec<u64> = b.iter().map(|x| x % modp).collect();
    transform(&mut fa, p, modp, w);
    transform(&mut fb, p, modp, w);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = mulm(*x, *y, modp);
    }
    let winv = pow_mod_u64(w, p - 1, modp);
    transform(&mut fa, p, modp, winv);
    let qinv = pow_mod_u64(q % modp, modp - 2, modp);
    Ok(fa.into_iter().map(|x| mulm(x, qinv, modp)).collect())
}

/// Components of the variable co-occurrence graph of `g`.
fn components(g: &MultiPoly<Zmod>) -> Vec<Vec<usize>> {
    let n = g.nvars();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for (e, _) in g.terms() {
        let vars: Vec<usize> = (0..n).filter(|&k| e[k] > 0).collect();
        for w in vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for k in 0..n {
        let r = find(&mut parent, k);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(k);
    }
    groups
}

/// Value distribution of `g` (in the listed variables) over `F_q^k`:
/// `out[v]` = number of points where `g` takes the element of index `v`.
fn value_table(g: &[(Vec<u32>, u32)], nv: usize, sf: &SmallField) -> Vec<u64> {
    let q = sf.order() as usize;
    let mut out = vec![0u64; q];
    let mut x = vec![0u32; nv];
    loop {
        let logs: Vec<u32> = x.iter().map(|&ix| sf.log(ix)).collect();
        let mut v = ZERO_LOG;
        for (e, c) in g {
            let mut t = *c;
            for (k, &ek) in e.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                if logs[k] == ZERO_LOG {
                    t = ZERO_LOG;
                    break;
                }
                t = sf.lmul(t, ((logs[k] as u64 * ek as u64) % (q as u64 - 1)) as u32);
            }
            v = sf.ladd(v, t);
        }
        out[sf.exp(v) as usize] += 1;
        let mut k = 0;
        loop {
            if k == nv {
                return out;
            }
            x[k] += 1;
            if (x[k] as usize) < q {
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

/// `#X(F_{p^i})` for a model whose chart `T0 = 1` is decoupled, i.e. splits
/// as `f1(A) + f2(B)` over disjoint variable sets. The affine part comes from
/// the convolution of the two value distributions, the hyperplane `T0 = 0`
/// is counted naively.
pub fn fft_count(model: &VarietyModel, i: u32) -> Result<CountResult> {
    if i == 0 {
        return Err(Error::Domain("extension degree must be positive".into()));
    }
    let p = model.p();
    let g = model.f().dehomogenize(0)?;
    let comps = components(&g);
    if comps.len() < 2 {
        return Err(Error::Unsupported("the chart T0 = 1 is not a decoupled polynomial".into()));
    }
    // split the components into two groups of balanced size
    let mut comps = comps;
    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let (mut ga, mut gb): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    for c in comps {
        if ga.len() <= gb.len() {
            ga.extend(c);
        } else {
            gb.extend(c);
        }
    }
    let desc = field_construct(p, i)?;
    let sf = SmallField::new(&desc)?;
    let q = sf.order() as u64;
    let n = g.nvars() as u32;
    let enum_cost = q.checked_pow(ga.len() as u32).unwrap_or(u64::MAX);
    if enum_cost > FFT_BUDGET {
        return Err(Error::Resource(format!("value tables over F_{p}^{i} exceed the enumeration budget")));
    }
    let bound = q
        .checked_pow(n)
        .filter(|&b| b < 1 << 62)
        .ok_or_else(|| Error::Resource(format!("affine count over F_{p}^{i} overflows the transform modulus")))?;
    let split = |group: &[usize], with_const: bool| -> Vec<(Vec<u32>, u32)> {
        g.terms()
            .filter(|(e, _)| {
                let deg: u32 = e.iter().sum();
                if deg == 0 {
                    with_const
                } else {
                    group.iter().any(|&k| e[k] > 0)
                }
            })
            .map(|(e, c)| (group.iter().map(|&k| e[k]).collect(), sf.log(*c as u32)))
            .collect()
    };
    let c1 = value_table(&split(&ga, true), ga.len(), &sf);
    let c2 = value_table(&split(&gb, false), gb.len(), &sf);
    let conv = ntt_convolution(&c1, &c2, p, bound)?;
    let affine = match model.kind() {
        ModelKind::Hypersurface => BigInt::from(conv[0]),
        ModelKind::DoubleCover => {
            let mut s = BigInt::from(bound);
            for (c, &v) in conv.iter().enumerate() {
                match sf.chi_log(sf.log(c as u32)) {
                    1 => s += v,
                    -1 => s -= v,
                    _ => {}
                }
            }
            s
        }
    };
    let mut total = affine;
    for s in strata(model.n()).into_iter().filter(|s| s[0] != 0) {
        total += naive_stratum_count(model.kind(), &stratum_poly(model.f(), &s), &sf);
    }
    Ok(CountResult::exact(i, total, Method::Fft))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::naive_count;
    use crate::mpoly::parse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transform_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (p, i) in [(3u64, 2u32), (5, 2), (7, 1), (3, 3)] {
            let q = p.pow(i) as usize;
            let a: Vec<u64> = (0..q).map(|_| rng.gen_range(0..50)).collect();
            let b: Vec<u64> = (0..q).map(|_| rng.gen_range(0..50)).collect();
            let d = direct_convolution(&a, &b, p);
            let f = ntt_convolution(&a, &b, p, 1 << 20).unwrap();
            assert_eq!(d.iter().map(|&x| x as u64).collect::<Vec<_>>(), f);
        }
    }

    #[test]
    fn example_surface() {
        let f = parse(crate::EXAMPLE_SEXTIC, &Zmod::new(7).unwrap(), None).unwrap();
        let m = VarietyModel::double_cover(f).unwrap();
        assert_eq!(fft_count(&m, 1).unwrap().count, BigInt::from(60));
        assert_eq!(fft_count(&m, 2).unwrap().count, BigInt::from(2488));
    }

    #[test]
    fn missing_variable_degenerates() {
        // f2 = 0: the T2 table is concentrated at 0
        let f = parse("T0^4 + 3*T0*T1^3 + T1^4", &Zmod::new(11).unwrap(), Some(3)).unwrap();
        for kind in [ModelKind::Hypersurface, ModelKind::DoubleCover] {
            let m = VarietyModel::new(kind, f.clone()).unwrap();
            assert_eq!(fft_count(&m, 1).unwrap().count, naive_count(&m, 1).unwrap().count);
        }
    }

    #[test]
    fn random_decoupled_quartics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = Zmod::new(11).unwrap();
        for _ in 0..5 {
            let mut f = MultiPoly::zero(&r, 3);
            for a in 0..=4u32 {
                f.add_term(vec![a, 4 - a, 0], rng.gen_range(0..11));
                if a < 4 {
                    f.add_term(vec![a, 0, 4 - a], rng.gen_range(0..11));
                }
            }
            f.add_term(vec![0, 0, 4], 1);
            for kind in [ModelKind::Hypersurface, ModelKind::DoubleCover] {
                let m = VarietyModel::new(kind, f.clone()).unwrap();
                for i in 1..=2 {
                    assert_eq!(fft_count(&m, i).unwrap().count, naive_count(&m, i).unwrap().count);
                }
            }
        }
    }

    #[test]
    fn coupled_is_rejected() {
        let f = parse("T0^2 + T1*T2", &Zmod::new(7).unwrap(), None).unwrap();
        let m = VarietyModel::double_cover(f).unwrap();
        assert!(matches!(fft_count(&m, 1), Err(Error::Unsupported(_))));
    }
}
