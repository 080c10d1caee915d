use proptest::prelude::*;

use diagforms::arith::{primes_1mod4, SubsetKind};
use diagforms::forms::class_group_info;
use diagforms::genus::reconstruct_r;
use diagforms::lfunc::{l_value, l_value_with_terms, main_term, ProductCharacter};
use diagforms::moments::moment_report;
use diagforms::sieve::{rep_counts, rep_counts_with, union_count, RepTable, SieveOptions};
use diagforms::ShapeZ;

fn shape_strategy(max: u64) -> impl Strategy<Value = ShapeZ> {
    (2..=max).prop_filter_map("not a shape", |z| ShapeZ::new(z).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sieve_matches_direct_count(z in shape_strategy(400), bound in 1u64..3000) {
        let t = rep_counts(bound, z).unwrap();
        for n in 1..=bound {
            let mut raw = 0u32;
            let mut y = 0u64;
            while z.z() * y * y <= n {
                let rest = n - z.z() * y * y;
                let x = rest.isqrt();
                if x * x == rest {
                    raw += match (x, y) {
                        (0, 0) => 1,
                        (0, _) | (_, 0) => 2,
                        _ => 4,
                    };
                }
                y += 1;
            }
            prop_assert_eq!(u32::from(t.get(n)), raw / 2);
        }
    }

    #[test]
    fn sharding_is_invisible(z in shape_strategy(200), bound in 1u64..20_000, shards in 1usize..9, width in 1u64..5000) {
        let base = rep_counts(bound, z).unwrap();
        let opts = SieveOptions { shards, segment_width: width };
        prop_assert_eq!(rep_counts_with(bound, z, opts).unwrap(), base);
    }

    #[test]
    fn cache_round_trip(z in shape_strategy(200), bound in 1u64..5000) {
        let t = rep_counts(bound, z).unwrap();
        let mut bytes = Vec::new();
        t.write_cache(&mut bytes).unwrap();
        let back = RepTable::read_cache(bytes.as_slice()).unwrap();
        let mut again = Vec::new();
        back.write_cache(&mut again).unwrap();
        prop_assert_eq!(back, t);
        prop_assert_eq!(again, bytes);
    }

    #[test]
    fn union_dominates_each_shape(a in shape_strategy(100), b in shape_strategy(100), bound in 1u64..5000) {
        let n = union_count(bound, &[a, b]);
        let na = rep_counts(bound, a).unwrap().nonzero().count() as u64;
        let nb = rep_counts(bound, b).unwrap().nonzero().count() as u64;
        prop_assert!(n >= na.max(nb) && n <= na + nb);
    }

    #[test]
    fn reconstruction_matches_sieve(z in shape_strategy(300)) {
        prop_assume!(class_group_info(z).one_class_per_genus);
        let r = reconstruct_r(z, 2000).unwrap();
        let t = rep_counts(2000, z).unwrap();
        for n in 1..=2000u64 {
            prop_assert_eq!(r.get(n), i64::from(t.get(n)));
        }
    }

    #[test]
    fn cauchy_schwarz_holds(bound in 10u64..20_000, cutoff in 5u64..80) {
        let ps = primes_1mod4(cutoff, SubsetKind::P).unwrap();
        let m = moment_report(bound, &ps).unwrap();
        prop_assert!(m.cauchy_schwarz_holds());
    }

    #[test]
    fn l_values_bracket_each_other(a in shape_strategy(150), b in shape_strategy(150), s in 1u32..=2, terms in 100u64..20_000) {
        prop_assume!(a != b);
        let chi = ProductCharacter::from_discriminants(vec![a.discriminant(), b.discriminant()]);
        let best = l_value(&chi, s, 1e-10).unwrap();
        let rough = l_value_with_terms(&chi, s, terms, 1).unwrap();
        prop_assert!((rough.value - best.value).abs() <= rough.tail_bound + best.tail_bound);
    }

    #[test]
    fn main_term_linear_in_x(a in shape_strategy(100), b in shape_strategy(100), x in 1u64..1_000_000) {
        prop_assume!(a != b);
        let m1 = main_term(a, b, x, 1e-8).unwrap();
        let m2 = main_term(a, b, 2 * x, 1e-8).unwrap();
        prop_assert!(m1.value > 0.0);
        prop_assert!((m2.value - 2.0 * m1.value).abs() <= 1e-12 * m2.value);
    }
}
