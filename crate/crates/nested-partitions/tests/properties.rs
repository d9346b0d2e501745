//! Property tests over random small types and elements.

use proptest::prelude::*;

use nested_partitions::partition::{Endomorphism, LeafMapOutcome, PartitionType};
use nested_partitions::perm::Perm;
use nested_partitions::predicates::stratum;

fn small_type() -> impl Strategy<Value = PartitionType> {
    prop::collection::vec(1u32..=3, 1..=3)
        .prop_map(|levels| PartitionType::new(&levels).unwrap())
}

fn endo(ty: PartitionType) -> impl Strategy<Value = Endomorphism> {
    let slots: Vec<std::ops::Range<u32>> = (1..=ty.depth())
        .flat_map(|j| {
            let n = ty.levels()[j - 1];
            let anchors = ty.level_size(j - 1).unwrap();
            std::iter::repeat(1..n + 1).take((anchors * n as u64) as usize)
        })
        .collect();
    slots.prop_map(move |digits| {
        let mut iter = digits.into_iter();
        Endomorphism::from_local_maps(&ty, |v| {
            let n = ty.levels()[v.level()] as usize;
            let table: Vec<u32> = (0..n).map(|_| iter.next().unwrap()).collect();
            nested_partitions::partition::LocalMap::from_one_based(&table).unwrap()
        })
        .unwrap()
    })
}

fn type_and_endos() -> impl Strategy<Value = (PartitionType, Vec<Endomorphism>)> {
    small_type().prop_flat_map(|ty| {
        let es = prop::collection::vec(endo(ty.clone()), 3);
        (Just(ty), es)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_is_associative((_ty, es) in type_and_endos()) {
        let (f, g, h) = (&es[0], &es[1], &es[2]);
        prop_assert_eq!(
            f.compose(g).unwrap().compose(h).unwrap(),
            f.compose(&g.compose(h).unwrap()).unwrap()
        );
    }

    #[test]
    fn composition_matches_pointwise_leaf_action((_ty, es) in type_and_endos()) {
        let (f, g) = (&es[0], &es[1]);
        let fg = f.compose(g).unwrap();
        let (fm, gm) = (f.leaf_map(), g.leaf_map());
        let pointwise: Vec<u64> = gm.iter().map(|&x| fm[x as usize]).collect();
        prop_assert_eq!(fg.leaf_map(), pointwise);
    }

    #[test]
    fn leaf_map_round_trips((_ty, es) in type_and_endos()) {
        let f = &es[0];
        let back = Endomorphism::from_leaf_map(f.partition_type(), &f.leaf_map()).unwrap();
        prop_assert_eq!(back, LeafMapOutcome::Accepted(f.clone()));
    }

    #[test]
    fn json_round_trips((_ty, es) in type_and_endos()) {
        let f = &es[0];
        let s = serde_json::to_string(f).unwrap();
        let back: Endomorphism = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&back, f);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn strata_are_multiplicative_floors((_ty, es) in type_and_endos()) {
        // P_j(fg) <=> P_j(f) & P_j(g) means the stratum of a product is
        // the minimum of the strata.
        let (f, g) = (&es[0], &es[1]);
        let fg = f.compose(g).unwrap();
        prop_assert_eq!(stratum(&fg), stratum(f).min(stratum(g)));
    }

    #[test]
    fn commuting_squares_hold((_ty, es) in type_and_endos()) {
        prop_assert!(es[0].verify_commuting());
    }

    #[test]
    fn perm_products_apply_left_to_right(
        a_seed in prop::collection::vec(0u32..10000, 5),
        b_seed in prop::collection::vec(0u32..10000, 5),
        i in 0usize..5
    ) {
        let to_perm = |seed: &[u32]| {
            let mut v: Vec<u32> = (0..5).collect();
            for (pos, &s) in seed.iter().enumerate().rev() {
                v.swap(pos, (s as usize) % (pos + 1));
            }
            Perm::from_images(v).unwrap()
        };
        let (a, b) = (to_perm(&a_seed), to_perm(&b_seed));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.apply(i), b.apply(a.apply(i)));
        prop_assert_eq!(ab.sign(), a.sign().add(b.sign()));
    }
}
