use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

use rmlab::bounds::{binom_tail_bound, union_bound};
use rmlab::channels::BmsChannel;
use rmlab::decoders::{exact_analysis, Engine};
use rmlab::rational::ratio;
use rmlab::rmcode::{EnumerationCap, RmCode};
use rmlab::spectrum::exact_distribution;

fn symmetric_table(a1: u64, b1: u64, a2: u64, b2: u64) -> BmsChannel {
    let s = a1 + b1 + a2 + b2;
    let r = |x: u64| ratio(x, s);
    BmsChannel::table(
        vec![[r(a1), r(b1)], [r(b1), r(a1)], [r(a2), r(b2)], [r(b2), r(a2)]],
        vec![1, 0, 3, 2],
    )
    .unwrap()
}

fn small_code() -> impl Strategy<Value = RmCode> {
    prop_oneof![Just((1u32, 0u32)), Just((2, 0)), Just((2, 1)), Just((2, 2)), Just((3, 1))]
        .prop_map(|(n, v)| RmCode::new(n, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_engine_audits_hold_on_bsc(code in small_code(), num in 0u64..=20, den in 1u64..=20) {
        prop_assume!(num <= den);
        let ch = BmsChannel::bsc(ratio(num, den)).unwrap();
        let a = exact_analysis(&code, &ch, EnumerationCap::default(), Engine::Generic, true).unwrap();
        for c in a.checks() {
            prop_assert!(c.holds(), "{}", c);
        }
        for t in 0..=code.length() as u64 {
            let s = a.distance_split(t).unwrap();
            prop_assert!(s.sum_check().holds());
            prop_assert!(s.fraction_check().holds(), "{}", s.fraction_check());
        }
    }

    #[test]
    fn exact_engine_audits_hold_on_tables(
        n in 1u32..=2,
        a1 in 0u64..6, b1 in 0u64..6, a2 in 0u64..6, b2 in 1u64..6,
    ) {
        let code = RmCode::new(n, 1.min(n)).unwrap();
        let ch = symmetric_table(a1, b1, a2, b2);
        let a = exact_analysis(&code, &ch, EnumerationCap::default(), Engine::Generic, true).unwrap();
        for c in a.checks() {
            prop_assert!(c.holds(), "{}", c);
        }
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        for (_, p) in a.report.values() {
            prop_assert!(*p >= zero && *p <= one);
        }
    }

    #[test]
    fn cumulative_is_monotone(n in 1u32..=4, v in 0u32..=4, a in 0u64..=32, b in 0u64..=32) {
        prop_assume!(v <= n);
        let d = exact_distribution(&RmCode::new(n, v).unwrap(), EnumerationCap::default()).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(d.cumulative(&ratio(lo, 32)) <= d.cumulative(&ratio(hi, 32)));
    }

    #[test]
    fn union_bound_is_monotone_in_z(z1 in 0.0f64..1.0, z2 in 0.0f64..1.0, w in 0usize..=16) {
        let d = exact_distribution(&RmCode::new(4, 2).unwrap(), EnumerationCap::default()).unwrap();
        let (lo, hi) = (z1.min(z2), z1.max(z2));
        prop_assert!(union_bound(&d, lo, w).unwrap().sum <= union_bound(&d, hi, w).unwrap().sum);
    }

    #[test]
    fn entropy_tail_bound_beyond_thirty(n in 31u64..=120, frac in 0.0f64..=0.5) {
        let k = (n as f64 * frac).floor() as u64;
        let t = binom_tail_bound(n, k).unwrap();
        prop_assert!(t.holds);
        prop_assert!(t.exact >= BigUint::from(1u8));
    }
}
