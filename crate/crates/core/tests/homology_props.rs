mod common;

use common::{brute_force_automorphisms, random_graph};
use morita_core::exactla::{column_lattice_basis, hnf_basis_contains};
use morita_core::families::{doubled_tree, SideTree};
use morita_core::stablegraph::check_automorphism;
use morita_core::surfhom::{
    automorphism_matrix, coinvariant_relations, o1_class, o1_class_along, o1_class_from, twist_matrix, HomologyModel,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_matches_genus(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 7, 6, true);
        prop_assume!(g.edges.len() <= 12);
        let model = HomologyModel::new(&g).unwrap();
        prop_assert_eq!(model.rank() as i64, 2 * g.genus());
    }

    #[test]
    fn twist_and_automorphism_matrices(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 5, 4, true);
        let model = HomologyModel::new(&g).unwrap();
        let t = twist_matrix(&model);
        let n = model.rank();
        let tm = t.minus_identity();
        prop_assert!(tm.mul(&tm).is_zero());
        let all = brute_force_automorphisms(&g);
        let sigma = &all[rng.gen_range(0..all.len())];
        let s = automorphism_matrix(&model, sigma).unwrap();
        let det = s.determinant().unwrap();
        prop_assert!(det == BigInt::one() || det == -BigInt::one());
        let s_inv = s.unimodular_inverse().unwrap();
        prop_assert_eq!(s.mul(&t).mul(&s_inv), t.clone());
        let order = check_automorphism(&g, sigma).order as u32;
        prop_assert!(s.pow(2 * order).is_identity());

        // Changing the basepoint or the walk moves the class inside (S − 1)H + (T − 1)H.
        let relations = column_lattice_basis(&coinvariant_relations(&s, &t));
        let base = o1_class(&model, sigma).unwrap();
        let differs = |c: &[BigInt]| {
            let d: Vec<BigInt> = c.iter().zip(&base).map(|(x, y)| x - y).collect();
            hnf_basis_contains(&relations, &d)
        };
        for b in 0..g.vertices.len() {
            prop_assert!(differs(&o1_class_from(&model, sigma, b).unwrap()));
        }
        let v0 = 0;
        let target = model.vertex(&sigma.vertex_map[&g.vertices[v0].id]).unwrap();
        for &e in &model.non_tree_edges {
            for a in 0..g.vertices.len() {
                let mut walk = model.tree_path(v0, a);
                walk.extend(model.fundamental_cycle(e));
                walk.extend(model.tree_path(a, target));
                if model.check_walk(v0, target, &walk) {
                    prop_assert!(differs(&o1_class_along(&model, sigma, v0, &walk).unwrap()));
                }
            }
        }
        prop_assert_eq!(n, 2 * g.genus() as usize);
    }

    #[test]
    fn doubled_tree_class_vector_vanishes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = SideTree::random(&mut rng, 5);
        let (g, sigma) = doubled_tree(&side, rng.gen_range(1..=3));
        let model = HomologyModel::new(&g).unwrap();
        prop_assert!(o1_class(&model, &sigma).unwrap().iter().all(Zero::is_zero));
    }
}
