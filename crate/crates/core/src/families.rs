//! The K3 family presets, their specialisation modulo `p`, and parameter
//! spaces for scans.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_prime_u64 as is_prime, Rationals};
use crate::counter::singular::{analyze_curve, Singularities};
use crate::counter::VarietyModel;
use crate::error::{domain_err, Result};
use crate::mpoly::{parse_with, reduce_mod_p, MultiPoly};
use crate::weil::{CubicField, EndoField, QuadraticField, Splitting};

/// A family `W^2 = f(T0, T1, T2)` with `f` a product of factors.
#[derive(Clone, Debug)]
pub struct FamilyPreset {
    /// Command-line key.
    pub key: &'static str,
    pub name: &'static str,
    /// Formal parameter symbols.
    pub params: &'static [&'static str],
    factors: &'static [&'static str],
    pub field: EndoField,
    /// Whether the parameter space is enumerated by scans.
    pub enumerable: bool,
}

const fn real(d: i64) -> EndoField {
    EndoField::Real { field: QuadraticField { d } }
}

const T012: &str = "T0*T1*T2";

pub static PRESETS: [FamilyPreset; 9] = [
    FamilyPreset {
        key: "v2a",
        name: "V_a^(2)",
        params: &["a"],
        factors: &[
            "1/8*a^2*T1^2 - 1/2*a*T1^2 + 1/4*T1^2 + a^2*T1*T2 - 2*a*T1*T2 + 2*T1*T2 + a^2*T2^2 - 4*a*T2^2 + 2*T2^2",
            "1/8*a^2*T0^2 + 1/2*a*T0^2 + 1/4*T0^2 + a^2*T0*T2 + 2*a*T0*T2 + 2*T0*T2 + a^2*T2^2 + 4*a*T2^2 + 2*T2^2",
            "2*T0^2 + a^2*T0*T1 + 2*T0*T1 + a^2*T1^2",
        ],
        field: real(2),
        enumerable: true,
    },
    FamilyPreset {
        key: "v5a",
        name: "V_a^(5)",
        params: &["a"],
        factors: &[
            "T1^2 + a*T1*T2 + 5/16*a^2*T2^2 + 5/4*a*T2^2 + 5/4*T2^2",
            "T0^2 + T0*T2 + 1/320*a^2*T2^2 + 1/16*a*T2^2 + 5/16*T2^2",
            "T0^2 + T0*T1 + 1/20*T1^2",
        ],
        field: real(5),
        enumerable: true,
    },
    FamilyPreset {
        key: "v13",
        name: "V^(13)",
        params: &[],
        factors: &["25*T1^2 + 26*T1*T2 + 13*T2^2", "T0^2 + 2*T0*T2 + 13*T2^2", "9*T0^2 + 26*T0*T1 + 13*T1^2"],
        field: real(13),
        enumerable: true,
    },
    FamilyPreset {
        key: "v2ab",
        name: "V_{a,b}^(2)",
        params: &["a", "b"],
        factors: &[
            T012,
            "-a*T0^2*T1 + a*T0^2*T2 + 2*a*T0*T1^2 - 3*a*T0*T1*T2 + a*T0*T2^2 + a*T1^3 - 4*a*T1^2*T2 \
             + 5*a*T1*T2^2 - 2*a*T2^3 + b*T0^3 - 2*b*T0^2*T1 - b*T0*T1^2 + 3*b*T0*T1*T2 - b*T0*T2^2 \
             + b*T1^2*T2 - b*T1*T2^2",
        ],
        field: real(2),
        enumerable: true,
    },
    FamilyPreset {
        key: "v3ab",
        name: "V_{a,b}^(3)",
        params: &["a", "b"],
        factors: &[
            T012,
            "a^2*T0^3 - 2*a^2*T0^2*T2 - a^2*T0*T1^2 - a^2*T0*T2^2 - 2*a^2*T1^2*T2 + 2*a^2*T2^3 \
             + 6*a*b*T0^2*T1 + 6*a*b*T0^2*T2 + 6*a*b*T0*T1^2 + 6*a*b*T1^2*T2 - 6*a*b*T2^3 \
             - 3*b^2*T0^2*T1 - 6*b^2*T0^2*T2 + 3*b^2*T1^3 - 6*b^2*T1^2*T2 - 3*b^2*T1*T2^2 + 6*b^2*T2^3",
        ],
        field: real(3),
        enumerable: true,
    },
    FamilyPreset {
        key: "vm1ab",
        name: "V_{a,b}^(-1)",
        params: &["a1", "a2", "a3", "b1", "b2", "b3"],
        factors: &[T012, "T0 + T1 + T2", "a1*T0 + a2*T1 + a3*T2", "b1*T0 + b2*T1 + b3*T2"],
        field: EndoField::Imaginary { field: QuadraticField { d: -1 } },
        enumerable: false,
    },
    FamilyPreset {
        key: "mu7",
        name: "V^(-1,mu7)",
        params: &[],
        factors: &[T012, "7*T0^3 - 7*T0^2*T1 + 49*T0^2*T2 - 21*T0*T1*T2 + 98*T0*T2^2 + T1^3 - 7*T1^2*T2 + 49*T2^3"],
        field: EndoField::CmSextic { real: CubicField::REAL_7 },
        enumerable: true,
    },
    FamilyPreset {
        key: "mu9",
        name: "V^(-1,mu9)",
        params: &[],
        factors: &[T012, "T0^3 - 3*T0^2*T2 - 3*T0*T1^2 - 3*T0*T1*T2 + T1^3 + 9*T1^2*T2 + 6*T1*T2^2 + T2^3"],
        field: EndoField::CmSextic { real: CubicField::REAL_9 },
        enumerable: true,
    },
    FamilyPreset {
        key: "mu19",
        name: "V^(-1,mu19)",
        params: &[],
        factors: &[
            T012,
            "49*T0^3 - 304*T0^2*T1 + 570*T0^2*T2 + 361*T0*T1^2 - 2793*T0*T1*T2 + 2033*T0*T2^2 \
             + 361*T1^3 + 2888*T1^2*T2 - 5415*T1*T2^2 + 2299*T2^3",
        ],
        field: EndoField::CmSextic { real: CubicField::CUBIC_19 },
        enumerable: true,
    },
];

/// Looks a preset up by key or display name.
pub fn preset(name: &str) -> Result<&'static FamilyPreset> {
    PRESETS
        .iter()
        .find(|f| f.key == name || f.name == name)
        .ok_or_else(|| domain_err!("unknown family '{name}'; known: {}", keys().join(", ")))
}

pub fn keys() -> Vec<&'static str> {
    PRESETS.iter().map(|f| f.key).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusion {
    /// `p = 2` or `p` divides a coefficient denominator.
    BadPrime,
    /// The sextic vanishes identically.
    Degenerate,
    /// The `V_{a,b}^(-1)` side conditions fail modulo `p`.
    SideCondition,
    /// The branch curve has a singularity other than ordinary nodes.
    Singular,
}

impl Exclusion {
    pub fn name(self) -> &'static str {
        match self {
            Exclusion::BadPrime => "bad-prime",
            Exclusion::Degenerate => "degenerate",
            Exclusion::SideCondition => "side-condition",
            Exclusion::Singular => "singular",
        }
    }
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A nodal specialisation: the double cover and the Frobenius orbit sizes
/// of the nodes of its branch curve.
#[derive(Clone, Debug)]
pub struct Specialized {
    pub model: VarietyModel,
    pub orbits: Vec<u32>,
}

#[derive(Clone, Debug)]
pub enum Specialization {
    Model(Specialized),
    Excluded(Exclusion, String),
}

impl FamilyPreset {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// The sextic with the parameters as formal symbols.
    pub fn template(&self) -> MultiPoly<Rationals> {
        let mut f: Option<MultiPoly<Rationals>> = None;
        for text in self.factors {
            let g = parse_with(text, &Rationals, Some(3), self.params).expect("preset factors parse");
            f = Some(match f {
                None => g,
                Some(f) => f.mul(&g).expect("same ring"),
            });
        }
        f.expect("presets have factors")
    }

    /// Primes dividing a coefficient denominator of the template.
    pub fn bad_denominator_primes(&self) -> Vec<u64> {
        let mut n = self.template().denominator_lcm().to_u64().expect("small denominators");
        let mut out = Vec::new();
        let mut d = 2;
        while n > 1 {
            if n.is_multiple_of(d) {
                out.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        out
    }

    pub fn splitting_class(&self, p: u64) -> Splitting {
        splitting_class(p, &self.field)
    }

    /// Substitutes `params` (as residues) and reduces modulo `p`.
    pub fn specialize(&self, p: u64, params: &[i64]) -> Result<Specialization> {
        if !is_prime(p) {
            return Err(domain_err!("{p} is not prime"));
        }
        if params.len() != self.arity() {
            return Err(domain_err!("{} takes {} parameters, got {}", self.name, self.arity(), params.len()));
        }
        if p == 2 || self.bad_denominator_primes().contains(&p) {
            return Ok(Specialization::Excluded(
                Exclusion::BadPrime,
                format!("{} has bad reduction at {p}", self.name),
            ));
        }
        if self.key == "vm1ab" && !side_conditions_hold(params, p) {
            return Ok(Specialization::Excluded(Exclusion::SideCondition, "side conditions fail".into()));
        }
        let values: Vec<BigRational> = params.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
        let f = self.template().specialize_symbols(&values)?;
        let f = reduce_mod_p(&f, p).ok_or_else(|| domain_err!("denominator vanishes mod {p}"))?;
        if f.is_zero() {
            return Ok(Specialization::Excluded(Exclusion::Degenerate, "the sextic vanishes identically".into()));
        }
        match analyze_curve(&f)? {
            Singularities::Nodes(orbits) => {
                Ok(Specialization::Model(Specialized { model: VarietyModel::double_cover(f)?, orbits }))
            }
            Singularities::Other(why) => Ok(Specialization::Excluded(Exclusion::Singular, why)),
        }
    }

    /// Every parameter tuple scanned at `p`: `a` in `F_p` for one parameter,
    /// representatives of `P^1(F_p)` for two, the empty tuple for none.
    pub fn parameter_space(&self, p: u64) -> Result<Vec<Vec<i64>>> {
        let p = p as i64;
        match (self.enumerable, self.arity()) {
            (true, 0) => Ok(vec![Vec::new()]),
            (true, 1) => Ok((0..p).map(|a| vec![a]).collect()),
            (true, 2) => Ok(std::iter::once(vec![0, 1]).chain((0..p).map(|b| vec![1, b])).collect()),
            _ => Err(domain_err!("{} has no enumerated parameter space; pass explicit values", self.name)),
        }
    }

    /// A deterministic subsample of `k` tuples of the parameter space, in
    /// enumeration order.
    pub fn sample_parameters(&self, p: u64, k: usize) -> Result<Vec<Vec<i64>>> {
        let all = self.parameter_space(p)?;
        if k >= all.len() {
            return Ok(all);
        }
        let seed = self.key.bytes().fold(p, |h, b| h.wrapping_mul(0x100000001b3).wrapping_add(b as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, all.len(), k).into_vec();
        idx.sort_unstable();
        Ok(idx.into_iter().map(|i| all[i].clone()).collect())
    }
}

fn side_conditions_hold(v: &[i64], p: u64) -> bool {
    let (a1, a2, a3, b1, b2, b3) = (v[0] as i128, v[1] as i128, v[2] as i128, v[3] as i128, v[4] as i128, v[5] as i128);
    let p = p as i128;
    (a1 * b3 + a2 * b1 - 2 * a3 * b1) % p == 0 && (a1 * b2 + a2 * b3 - 2 * a3 * b2) % p == 0
}

/// Behaviour of `p` in the quadratic field attached to `field`.
pub fn splitting_class(p: u64, field: &EndoField) -> Splitting {
    field.quadratic().splitting(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Zmod;
    use crate::mpoly::parse;

    #[test]
    fn transcription_round_trip() {
        for f in &PRESETS {
            let t = f.template();
            assert_eq!(t.t_degree(), Some(6), "{}", f.name);
            let again = parse_with(&t.to_string(), &Rationals, Some(3), f.params).unwrap();
            assert_eq!(again, t, "{}", f.name);
        }
    }

    #[test]
    fn fixed_sextic() {
        let f = preset("v13").unwrap();
        let Specialization::Model(s) = f.specialize(23, &[]).unwrap() else { panic!() };
        let want = parse("25*T1^2 + 26*T1*T2 + 13*T2^2", &Zmod::new(23).unwrap(), Some(3))
            .unwrap()
            .mul(&parse("T0^2 + 2*T0*T2 + 13*T2^2", &Zmod::new(23).unwrap(), Some(3)).unwrap())
            .unwrap()
            .mul(&parse("9*T0^2 + 26*T0*T1 + 13*T1^2", &Zmod::new(23).unwrap(), Some(3)).unwrap())
            .unwrap();
        assert_eq!(s.model.f(), &want);
        assert_eq!(s.orbits.iter().sum::<u32>(), 15);
    }

    #[test]
    fn exclusions() {
        let v2 = preset("V_a^(2)").unwrap();
        assert!(matches!(v2.specialize(2, &[1]).unwrap(), Specialization::Excluded(Exclusion::BadPrime, _)));
        assert_eq!(v2.bad_denominator_primes(), vec![2]);
        assert_eq!(preset("v5a").unwrap().bad_denominator_primes(), vec![2, 5]);
        let v2ab = preset("v2ab").unwrap();
        assert!(matches!(v2ab.specialize(19, &[0, 0]).unwrap(), Specialization::Excluded(Exclusion::Degenerate, _)));
        let vm1 = preset("vm1ab").unwrap();
        assert!(matches!(
            vm1.specialize(19, &[1, 2, 3, 1, 1, 1]).unwrap(),
            Specialization::Excluded(Exclusion::SideCondition, _)
        ));
        assert!(vm1.parameter_space(19).is_err());
        assert!(v2.specialize(21, &[1]).is_err());
        assert!(v2.specialize(19, &[]).is_err());
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(splitting_class(29, &real(2)), Splitting::Inert);
        assert_eq!(splitting_class(19, &real(13)), Splitting::Inert);
        assert_eq!(splitting_class(13, &real(3)), Splitting::Split);
        assert_eq!(preset("mu9").unwrap().splitting_class(13), Splitting::Split);
        assert_eq!(preset("mu9").unwrap().splitting_class(19), Splitting::Inert);
    }

    #[test]
    fn node_counts() {
        for (key, params, nodes) in [("v2a", vec![3], 15), ("mu7", vec![], 15)] {
            let Specialization::Model(s) = preset(key).unwrap().specialize(19, &params).unwrap() else {
                panic!("{key}")
            };
            assert_eq!(s.orbits.iter().sum::<u32>(), nodes, "{key}");
        }
        // three lines and a cubic: 12 nodes, 13 when the cubic is nodal
        let f = preset("v3ab").unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for t in f.parameter_space(19).unwrap() {
            if let Specialization::Model(s) = f.specialize(19, &t).unwrap() {
                seen.insert(s.orbits.iter().sum::<u32>());
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![12, 13]);
        // a1 b3 + a2 b1 - 2 a3 b1 = 0 and a1 b2 + a2 b3 - 2 a3 b2 = 0
        let vm1 = preset("vm1ab").unwrap();
        let Specialization::Model(s) = vm1.specialize(101, &[1, 5, 2, 3, -5, -3]).unwrap() else { panic!() };
        assert_eq!(s.orbits.iter().sum::<u32>(), 15);
    }

    #[test]
    fn parameter_spaces() {
        let f = preset("v3ab").unwrap();
        let all = f.parameter_space(7).unwrap();
        assert_eq!(all.len(), 8);
        let s = f.sample_parameters(19, 4).unwrap();
        assert_eq!(s, f.sample_parameters(19, 4).unwrap());
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|t| f.parameter_space(19).unwrap().contains(t)));
        assert_eq!(preset("mu9").unwrap().parameter_space(13).unwrap(), vec![Vec::<i64>::new()]);
    }
}
