use k3zeta::arith::Zmod;
use k3zeta::counter::{
    fft_count, naive_count, padic_count, padic_count_doublecover, CountBound, ModelKind, PadicOptions, VarietyModel,
};
use k3zeta::mpoly::{parse, MultiPoly};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn example() -> VarietyModel {
    let f = parse(k3zeta::EXAMPLE_SEXTIC, &Zmod::new(7).unwrap(), None).unwrap();
    VarietyModel::double_cover(f).unwrap()
}

#[test]
fn example_surface_first_four_counts() {
    let opts = PadicOptions::with_bound(CountBound::K3Weil { w: 22 });
    let r = padic_count_doublecover(&example(), 4, &opts).unwrap();
    let counts: Vec<BigInt> = r.iter().map(|c| c.count.clone()).collect();
    assert_eq!(counts, [60, 2488, 118587, 5765828].map(BigInt::from).to_vec());
    for c in &r {
        let m = BigInt::from(c.residue_modulus.clone().unwrap());
        assert_eq!(&c.count % &m, BigInt::from(c.residue.clone().unwrap()));
        let (lo, hi) = c.interval.clone().unwrap();
        assert!(lo <= c.count && c.count <= hi);
    }
}

#[test]
fn three_methods_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in [7u64, 11] {
        let r = Zmod::new(p).unwrap();
        // decoupled on the chart T0 = 1
        let mut f = MultiPoly::zero(&r, 3);
        for a in 0..=6u32 {
            f.add_term(vec![a, 6 - a, 0], rng.gen_range(0..p));
            if a < 6 {
                f.add_term(vec![a, 0, 6 - a], rng.gen_range(0..p));
            }
        }
        for kind in [ModelKind::Hypersurface, ModelKind::DoubleCover] {
            let m = VarietyModel::new(kind, f.clone()).unwrap();
            let padic = padic_count(&m, 2, &PadicOptions::default()).unwrap();
            for i in 1..=2 {
                let naive = naive_count(&m, i).unwrap().count;
                assert_eq!(fft_count(&m, i).unwrap().count, naive);
                assert_eq!(padic[i as usize - 1].count, naive, "p={p} {kind:?} i={i}");
            }
        }
    }
}
