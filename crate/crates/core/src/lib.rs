// Dense linear algebra reads better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod counter;
pub mod error;
pub mod families;
pub mod ffield;
pub mod mpoly;
pub mod ring;
pub mod scan;
pub mod traceop;
pub mod weil;

pub use error::{Error, Result};

/// A degree-2 K3 surface over `F_7` whose chart `T0 = 1` is decoupled.
pub const EXAMPLE_SEXTIC: &str = "6*T0^6 + 6*T0^5*T1 + 2*T0^5*T2 + 6*T0^4*T1^2 + 5*T0^4*T2^2 + 5*T0^3*T1^3 \
    + T0^2*T1^4 + 6*T0*T1^5 + 5*T0*T2^5 + 3*T1^6 + 5*T2^6";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_is_a_smooth_sextic_mod_seven() {
        let f = mpoly::parse_rational(EXAMPLE_SEXTIC).unwrap();
        assert_eq!(f.homogeneous_degree().unwrap(), 6);
        let f7 = mpoly::reduce_mod_p(&f, 7).unwrap();
        assert!(counter::singular::analyze_curve(&f7).unwrap().is_smooth());
    }
}
