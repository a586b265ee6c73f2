mod common;

use common::{brute_force_automorphisms, brute_force_order, random_graph, random_subset};
use morita_core::stablegraph::{check_automorphism, contract_edges, count_automorphisms, specializes_to, validate_stable};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn contraction_preserves_genus_and_stability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 6, 5, true);
        prop_assert!(validate_stable(&g, None).unwrap().valid);
        let subset = random_subset(&mut rng, &g);
        let c = contract_edges(&g, &subset).unwrap();
        prop_assert_eq!(c.genus(), g.genus());
        prop_assert_eq!(c.edges.len(), g.edges.len() - subset.len());
        prop_assert!(validate_stable(&c, Some(g.genus() as u64)).unwrap().valid);
    }

    #[test]
    fn specialization_reflexive_and_transitive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 5, 3, false);
        prop_assert!(specializes_to(&g, &g));
        let g1 = contract_edges(&g, &random_subset(&mut rng, &g)).unwrap();
        let g2 = contract_edges(&g1, &random_subset(&mut rng, &g1)).unwrap();
        prop_assert!(specializes_to(&g1, &g));
        prop_assert!(specializes_to(&g2, &g1));
        prop_assert!(specializes_to(&g2, &g));
    }

    #[test]
    fn automorphism_orders_divide_group_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 6, 3, false);
        let all = brute_force_automorphisms(&g);
        prop_assert_eq!(all.len() as u64, count_automorphisms(&g));
        for sigma in &all {
            let report = check_automorphism(&g, sigma);
            prop_assert!(report.valid, "{:?}", report.violations);
            prop_assert_eq!(report.order, brute_force_order(&g, sigma));
            prop_assert_eq!(all.len() as u64 % report.order, 0);
        }
    }
}
