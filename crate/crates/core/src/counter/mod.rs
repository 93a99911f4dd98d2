//! Point counting on hypersurfaces and double covers of projective space:
//! naive and convolution baselines, torus stratification and the p-adic
//! trace-formula pipeline.

mod central;
mod fft;
mod naive;
mod padic;
mod plan;
pub mod singular;

use num_bigint::{BigInt, BigUint};

use crate::arith::{is_prime_u64, Zmod};
use crate::error::{domain_err, Result};
use crate::mpoly::MultiPoly;

pub use central::{central_coefficient, central_coefficient_direct, nonordinary_scan, CentralCoefficient, PrimeClass};
pub use fft::{direct_convolution, fft_count, ntt_convolution};
pub use naive::{list_points, naive_count, naive_stratum_count, NAIVE_BUDGET};
pub use padic::{
    padic_count, padic_count_candidates, padic_count_doublecover, padic_count_hypersurface, torus_residues,
    CountCandidates, PadicOptions,
};
pub use plan::{count_interval, digits_for, multipliers, precision_plan, CountBound, PrecisionPlan};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModelKind {
    /// `f = 0` in `P^N`.
    Hypersurface,
    /// `W^2 = f` over `P^N`, counted on the weighted projective model.
    DoubleCover,
}

/// A hypersurface or double cover of `P^N` over `F_p`.
#[derive(Clone, PartialEq, Debug)]
pub struct VarietyModel {
    kind: ModelKind,
    f: MultiPoly<Zmod>,
    degree: u32,
}

impl VarietyModel {
    pub fn new(kind: ModelKind, f: MultiPoly<Zmod>) -> Result<Self> {
        let p = f.ring().m();
        if p < 3 || !is_prime_u64(p) {
            return Err(domain_err!("coefficients must lie in F_p for an odd prime p, got Z/{p}"));
        }
        if !f.symbols().is_empty() {
            return Err(domain_err!("unspecialized parameters {:?}", f.symbols()));
        }
        if f.nvars() < 2 {
            return Err(domain_err!("need at least two homogeneous coordinates"));
        }
        let degree = f.homogeneous_degree()?;
        if kind == ModelKind::DoubleCover && degree % 2 == 1 {
            return Err(domain_err!("a double cover needs a branch form of even degree, got {degree}"));
        }
        Ok(VarietyModel { kind, f, degree })
    }

    pub fn hypersurface(f: MultiPoly<Zmod>) -> Result<Self> {
        Self::new(ModelKind::Hypersurface, f)
    }

    pub fn double_cover(f: MultiPoly<Zmod>) -> Result<Self> {
        Self::new(ModelKind::DoubleCover, f)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn f(&self) -> &MultiPoly<Zmod> {
        &self.f
    }

    pub fn p(&self) -> u64 {
        self.f.ring().m()
    }

    /// Dimension `N` of the ambient projective space.
    pub fn n(&self) -> usize {
        self.f.nvars() - 1
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// True for a double cover of `P^2` branched along a sextic.
    pub fn is_k3(&self) -> bool {
        self.kind == ModelKind::DoubleCover && self.n() == 2 && self.degree == 6
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    Naive,
    Fft,
    Padic,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Fft => "fft",
            Method::Padic => "padic",
        }
    }
}

/// `#X(F_{p^i})` together with how it was obtained.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountResult {
    pub i: u32,
    pub count: BigInt,
    pub method: Method,
    /// `p^l` for p-adic counts.
    pub residue_modulus: Option<BigUint>,
    /// Residue of the total count modulo `p^l`.
    pub residue: Option<BigUint>,
    /// Interval the count was resolved in.
    pub interval: Option<(BigInt, BigInt)>,
}

impl CountResult {
    pub fn exact(i: u32, count: BigInt, method: Method) -> Self {
        CountResult { i, count, method, residue_modulus: None, residue: None, interval: None }
    }
}

/// Supports of the strata of `P^N`: every nonempty subset of the coordinates,
/// by size and then lexicographically. A point lies in the stratum of the
/// coordinates where it is nonzero.
pub fn strata(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> =
        (1u32..(1 << (n + 1))).map(|mask| (0..=n).filter(|k| mask & (1 << k) != 0).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// `(q^i - 1)^(|S| - 1)`, the size of a stratum.
pub fn stratum_size(p: u64, i: u32, support: &[usize]) -> BigInt {
    let qi = BigInt::from(p).pow(i);
    num_traits::pow(qi - 1, support.len() - 1)
}

/// `#P^N(F_{p^i})`.
pub fn projective_size(p: u64, i: u32, n: usize) -> BigInt {
    let qi = BigInt::from(p).pow(i);
    (num_traits::pow(qi.clone(), n + 1) - 1u32) / (qi - 1u32)
}

/// Restriction of `f` to a stratum, on the chart where its first coordinate is 1.
pub fn stratum_poly(f: &MultiPoly<Zmod>, support: &[usize]) -> MultiPoly<Zmod> {
    let r = f.restrict_to(support);
    r.substitute(0, &1).expect("support is nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strata_partition_projective_space() {
        for n in 1..=3 {
            for p in [3u64, 5, 7] {
                for i in 1..=3 {
                    let total: BigInt = strata(n).iter().map(|s| stratum_size(p, i, s)).sum();
                    assert_eq!(total, projective_size(p, i, n));
                }
            }
        }
        assert_eq!(strata(2).len(), 7);
        assert_eq!(strata(2)[0], vec![0]);
        assert_eq!(strata(2)[6], vec![0, 1, 2]);
    }

    #[test]
    fn model_validation() {
        let r = Zmod::new(7).unwrap();
        let f = crate::mpoly::parse("T0^2 + T1*T2", &r, None).unwrap();
        assert!(VarietyModel::double_cover(f.clone()).is_ok());
        let g = crate::mpoly::parse("T0^3 + T1^2*T2", &r, None).unwrap();
        assert!(VarietyModel::double_cover(g.clone()).is_err());
        assert!(VarietyModel::hypersurface(g).is_ok());
        let h = crate::mpoly::parse("T0^3 + T1", &r, None).unwrap();
        assert!(VarietyModel::hypersurface(h).is_err());
        let r9 = Zmod::new(9).unwrap();
        let k = crate::mpoly::parse("T0^2 + T1^2", &r9, None).unwrap();
        assert!(VarietyModel::hypersurface(k).is_err());
    }
}
