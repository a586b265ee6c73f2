use morita_core::exactla::Order;
use morita_core::families::{doubled_tree, SideTree};
use morita_core::morita::{o2_generic, o2_report, o2_shortcut, o2_tree_order, DoubledTreeModel};
use morita_core::surfhom::{o1_order, HomologyModel};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairs_to_zero(rho: &[BigInt], v: &[BigInt]) -> bool {
    rho.iter().zip(v).map(|(a, b)| a * b).sum::<BigInt>().is_even()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engines_agree_on_doubled_trees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = SideTree::random(&mut rng, 3);
        let (g, sigma) = doubled_tree(&side, rng.gen_range(1..=3));
        prop_assert!(o1_order(&HomologyModel::new(&g).unwrap(), &sigma).unwrap().is_one());
        let model = DoubledTreeModel::new(&g, &sigma).unwrap();
        let (short, short_rel) = o2_shortcut(&model).unwrap();
        let (generic, generic_rel) = o2_generic(&model).unwrap();
        prop_assert_eq!(&short.order, &generic.order);
        prop_assert_eq!(&short.invariant_factors, &generic.invariant_factors);
        prop_assert_eq!(o2_tree_order(&g, &sigma).unwrap(), short.order.clone());
        let report = o2_report(&g, &sigma).unwrap();
        if let Some(rho) = &report.certificate {
            prop_assert_eq!(&short.order, &Order::Finite(BigInt::from(2)));
            prop_assert!(short_rel.iter().chain(&generic_rel).all(|r| pairs_to_zero(rho, r)));
            prop_assert!(!pairs_to_zero(rho, &short.class));
            prop_assert!(!pairs_to_zero(rho, &generic.class));
        }
    }
}
