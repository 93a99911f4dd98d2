use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{projective_size, strata, stratum_poly, CountResult, Method, ModelKind, VarietyModel};
use crate::arith::Zmod;
use crate::error::{Error, Result};
use crate::ffield::{self, field_construct, SmallField, ZERO_LOG};
use crate::mpoly::MultiPoly;

/// Largest number of point evaluations a naive count may perform.
pub const NAIVE_BUDGET: u64 = 2_000_000_000;

/// Terms of a polynomial over `F_p` with log-encoded coefficients in `F_{p^i}`.
struct LogTerms {
    coef: Vec<u32>,
    exps: Vec<Vec<u32>>,
}

impl LogTerms {
    fn new(f: &MultiPoly<Zmod>, sf: &SmallField) -> Self {
        let mut coef = Vec::new();
        let mut exps = Vec::new();
        for (e, c) in f.terms() {
            // F_p sits in F_{p^i} as the elements with index < p
            coef.push(sf.log(*c as u32));
            exps.push(e.to_vec());
        }
        LogTerms { coef, exps }
    }
}

/// Sum over the torus `(F_q^*)^m` of the point weight: `[f = 0]` for
/// hypersurfaces, `1 + chi(f)` for double covers. `f` has `m` variables.
pub fn naive_stratum_count(kind: ModelKind, f: &MultiPoly<Zmod>, sf: &SmallField) -> BigInt {
    let terms = LogTerms::new(f, sf);
    let m = f.nvars();
    let n = (sf.order() - 1) as u64;
    let weight = |v: u32| -> i64 {
        match kind {
            ModelKind::Hypersurface => (v == ZERO_LOG) as i64,
            ModelKind::DoubleCover => 1 + sf.chi_log(v) as i64,
        }
    };
    if m == 0 {
        let v = terms.coef.iter().fold(ZERO_LOG, |acc, &c| sf.ladd(acc, c));
        return BigInt::from(weight(v));
    }
    let nt = terms.coef.len();
    let mut total: i128 = 0;
    let mut outer = vec![0u64; m - 1];
    let mut cur = vec![0u32; nt];
    loop {
        // term logs with the last coordinate at log 0
        for t in 0..nt {
            if terms.coef[t] == ZERO_LOG {
                cur[t] = ZERO_LOG;
                continue;
            }
            let mut s = terms.coef[t] as u64;
            for (k, &l) in outer.iter().enumerate() {
                s += terms.exps[t][k] as u64 * l;
            }
            cur[t] = (s % n) as u32;
        }
        let steps: Vec<u32> = terms.exps.iter().map(|e| (e[m - 1] as u64 % n) as u32).collect();
        let mut partial: i64 = 0;
        for _ in 0..n {
            let mut v = ZERO_LOG;
            for t in 0..nt {
                v = sf.ladd(v, cur[t]);
            }
            partial += weight(v);
            for t in 0..nt {
                if cur[t] != ZERO_LOG {
                    let s = cur[t] + steps[t];
                    cur[t] = if s >= n as u32 { s - n as u32 } else { s };
                }
            }
        }
        total += partial as i128;
        // odometer on the outer coordinates
        let mut k = 0;
        loop {
            if k == outer.len() {
                return BigInt::from(total);
            }
            outer[k] += 1;
            if outer[k] < n {
                break;
            }
            outer[k] = 0;
            k += 1;
        }
    }
}

fn check_budget(model: &VarietyModel, i: u32) -> Result<()> {
    let pts = projective_size(model.p(), i, model.n());
    let evals = pts * BigInt::from(model.f().len().max(1));
    if evals.to_u64().is_none_or(|e| e > NAIVE_BUDGET) {
        return Err(Error::Resource(format!(
            "naive count over F_{}^{i} needs {evals} evaluations (budget {NAIVE_BUDGET})",
            model.p()
        )));
    }
    Ok(())
}

/// Naive `#X(F_{p^i})` by enumerating the points of `P^N` stratum by stratum.
pub fn naive_count(model: &VarietyModel, i: u32) -> Result<CountResult> {
    if i == 0 {
        return Err(Error::Domain("extension degree must be positive".into()));
    }
    check_budget(model, i)?;
    let desc = field_construct(model.p(), i)?;
    let sf = SmallField::new(&desc)?;
    let mut total = BigInt::from(0);
    for s in strata(model.n()) {
        total += naive_stratum_count(model.kind(), &stratum_poly(model.f(), &s), &sf);
    }
    Ok(CountResult::exact(i, total, Method::Naive))
}

/// Points of a hypersurface over `F_{p^i}`, each normalized so that its first
/// nonzero coordinate is 1 and given by the indices of its coordinates
/// (base-`p` digits of the power-basis coordinates).
pub fn list_points(model: &VarietyModel, i: u32) -> Result<Vec<Vec<u64>>> {
    if model.kind() != ModelKind::Hypersurface {
        return Err(Error::Unsupported("points are listed for hypersurfaces only".into()));
    }
    check_budget(model, i)?;
    let desc = field_construct(model.p(), i)?;
    let ring = desc.ring();
    let q = desc.order_u64().unwrap();
    let n = model.n();
    let f = model.f().map(&ring, |c| desc.from_u64(*c));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    // prefixes (x_0 .. x_{N-1}) != 0 normalized, last coordinate solved for
    let total_prefix = q.pow(n as u32);
    for idx in 1..total_prefix {
        let mut digits = Vec::with_capacity(n);
        let mut r = idx;
        for _ in 0..n {
            digits.push(r % q);
            r /= q;
        }
        digits.reverse();
        let first = digits.iter().position(|&d| d != 0).unwrap();
        if digits[first] != 1 {
            continue;
        }
        let prefix: Vec<_> = digits.iter().map(|&d| desc.element(d)).collect();
        let mut g = f.clone();
        for x in &prefix {
            g = g.substitute(0, x)?;
        }
        // univariate coefficients in the last coordinate
        let deg = g.total_degree().unwrap_or(0) as usize;
        let mut coeffs = vec![desc.zero(); deg + 1];
        for (e, c) in g.terms() {
            coeffs[e[0] as usize] = c.clone();
        }
        let coeffs = ffield::trim(&ring, coeffs);
        let mut roots: Vec<u64> = if coeffs.is_empty() {
            (0..q).collect()
        } else {
            ffield::roots(&ring, &coeffs, &mut rng).iter().map(|x| desc.index(x)).collect()
        };
        roots.sort();
        for t in roots {
            let mut pt = digits.clone();
            pt.push(t);
            out.push(pt);
        }
    }
    // the point (0 : ... : 0 : 1)
    let mut e = vec![0u32; n + 1];
    e[n] = model.degree();
    if model.f().coeff(&e) == 0 {
        let mut pt = vec![0u64; n];
        pt.push(1);
        out.push(pt);
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse;
    use rand::Rng;

    fn hyp(text: &str, p: u64, nvars: usize) -> VarietyModel {
        VarietyModel::hypersurface(parse(text, &Zmod::new(p).unwrap(), Some(nvars)).unwrap()).unwrap()
    }

    /// Brute force over all of `F_p^(N+1) \ 0`, divided by `p - 1`.
    fn oracle(model: &VarietyModel) -> i64 {
        let p = model.p();
        let n = model.n() + 1;
        let mut total = 0i64;
        for idx in 1..p.pow(n as u32) {
            let mut x = Vec::new();
            let mut r = idx;
            for _ in 0..n {
                x.push(r % p);
                r /= p;
            }
            let v = model.f().evaluate(&x).unwrap();
            total += match model.kind() {
                ModelKind::Hypersurface => (v == 0) as i64,
                ModelKind::DoubleCover => 1 + crate::arith::legendre(v as i64, p) as i64,
            };
        }
        total / (p as i64 - 1)
    }

    #[test]
    fn example_surface_counts() {
        let r = Zmod::new(7).unwrap();
        let f = parse(crate::EXAMPLE_SEXTIC, &r, None).unwrap();
        let m = VarietyModel::double_cover(f).unwrap();
        assert_eq!(naive_count(&m, 1).unwrap().count, BigInt::from(60));
        assert_eq!(naive_count(&m, 2).unwrap().count, BigInt::from(2488));
    }

    #[test]
    fn conic_without_points() {
        // -1 is a non-residue mod 7
        let m = hyp("T0^2 + T1^2", 7, 2);
        assert_eq!(naive_count(&m, 1).unwrap().count, BigInt::from(0));
        assert_eq!(naive_count(&m, 2).unwrap().count, BigInt::from(2));
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [5u64, 7] {
            for kind in [ModelKind::Hypersurface, ModelKind::DoubleCover] {
                for _ in 0..4 {
                    let r = Zmod::new(p).unwrap();
                    let mut f = MultiPoly::zero(&r, 3);
                    for a in 0..=4u32 {
                        for b in 0..=4 - a {
                            f.add_term(vec![a, b, 4 - a - b], rng.gen_range(0..p));
                        }
                    }
                    if f.is_zero() {
                        continue;
                    }
                    let m = VarietyModel::new(kind, f).unwrap();
                    assert_eq!(naive_count(&m, 1).unwrap().count, BigInt::from(oracle(&m)));
                }
            }
        }
    }

    #[test]
    fn list_points_examples() {
        let m = hyp("T0", 5, 2);
        assert_eq!(list_points(&m, 1).unwrap(), vec![vec![0, 1]]);
        let m = hyp("T0^2 + T1^2", 5, 2);
        assert_eq!(list_points(&m, 1).unwrap().len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let r = Zmod::new(7).unwrap();
            let mut f = MultiPoly::zero(&r, 3);
            for a in 0..=2u32 {
                for b in 0..=2 - a {
                    f.add_term(vec![a, b, 2 - a - b], rng.gen_range(0..7));
                }
            }
            if f.is_zero() {
                continue;
            }
            let m = VarietyModel::hypersurface(f).unwrap();
            let pts = list_points(&m, 1).unwrap();
            assert_eq!(BigInt::from(pts.len()), naive_count(&m, 1).unwrap().count);
            for pt in &pts {
                assert_eq!(m.f().evaluate(pt).unwrap(), 0);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let m = hyp("T0^2 + T1*T2 + T3^2", 31, 4);
        assert!(matches!(naive_count(&m, 3), Err(Error::Resource(_))));
    }
}
