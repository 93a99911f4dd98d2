use num_bigint::BigInt;

use super::{projective_size, ModelKind, VarietyModel};
use crate::arith::big_pow;
use crate::error::{domain_err, Result};

/// A priori bound on `#X(F_{q^i})` used to lift a residue to an integer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CountBound {
    /// `|#X - 1 - q^{2i}| <= w q^i` for a degree-2 K3 surface. `w = 22` when
    /// the branch sextic is smooth, `22 - r` for a sextic with `r` nodes.
    K3Weil { w: u32 },
    /// Smooth hypersurface with middle primitive Betti number `b`:
    /// `|#X - #P^{N-1}| <= b q^{i(N-1)/2}`. For plane curves `b = 2g`.
    Betti { b: u64 },
    /// `0 <= #X <= #P^N`, or `2 #P^N` for a double cover.
    Elementary,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrecisionPlan {
    /// p-adic digits.
    pub l: u32,
    /// Hypersurface exponent multiplier `ceil(l / (p - 1))`.
    pub a: u64,
    /// Smallest odd `b` with `b (p - 1) / 2 >= l`.
    pub b: u64,
    /// Interval for `#X(F_{p^i})`, `i = 1..=n`.
    pub intervals: Vec<(BigInt, BigInt)>,
}

/// Interval containing `#X(F_{p^i})` under `bound`.
pub fn count_interval(model: &VarietyModel, i: u32, bound: CountBound) -> Result<(BigInt, BigInt)> {
    let p = model.p();
    let qi = big_pow(p, i as u64);
    match bound {
        CountBound::K3Weil { w } => {
            if !model.is_k3() {
                return Err(domain_err!("the K3 bound applies to double covers of P^2 branched along a sextic"));
            }
            let c = &qi * &qi + 1u32;
            let r = &qi * w;
            Ok((&c - &r, c + r))
        }
        CountBound::Betti { b } => {
            if model.kind() != ModelKind::Hypersurface {
                return Err(domain_err!("Betti bounds apply to hypersurfaces"));
            }
            let c = projective_size(p, i, model.n() - 1);
            // floor(b q^{i(N-1)/2})
            let r = (BigInt::from(b) * BigInt::from(b) * num_traits::pow(qi, model.n() - 1)).sqrt();
            Ok((&c - &r, c + r))
        }
        CountBound::Elementary => {
            let hi = projective_size(p, i, model.n());
            let hi = match model.kind() {
                ModelKind::Hypersurface => hi,
                ModelKind::DoubleCover => hi * 2u32,
            };
            Ok((BigInt::from(0), hi))
        }
    }
}

/// Smallest `l` with `p^l > width`.
pub fn digits_for(p: u64, width: &BigInt) -> u32 {
    let mut l = 1u32;
    let mut pl = BigInt::from(p);
    while &pl <= width {
        pl *= p;
        l += 1;
    }
    l
}

pub fn multipliers(p: u64, l: u32) -> (u64, u64) {
    let l = l as u64;
    let a = l.div_ceil(p - 1);
    let half = (p - 1) / 2;
    let mut b = l.div_ceil(half).max(1);
    if b.is_multiple_of(2) {
        b += 1;
    }
    (a, b)
}

/// Precision sufficient to determine `#X(F_{p^i})` for all `i <= n`.
pub fn precision_plan(model: &VarietyModel, n: u32, bound: CountBound) -> Result<PrecisionPlan> {
    if n == 0 {
        return Err(domain_err!("need at least one extension degree"));
    }
    let intervals = (1..=n).map(|i| count_interval(model, i, bound)).collect::<Result<Vec<_>>>()?;
    let width = intervals.iter().map(|(lo, hi)| hi - lo).max().unwrap();
    let l = digits_for(model.p(), &width);
    let (a, b) = multipliers(model.p(), l);
    Ok(PrecisionPlan { l, a, b, intervals })
}
