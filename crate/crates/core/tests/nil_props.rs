use morita_core::nilq::{eval_word, free_reduce, reduced_rank, NilElement, NilEndo};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn element(rng: &mut ChaCha8Rng, genus: usize) -> NilElement {
    NilElement {
        genus,
        h: (0..2 * genus).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect(),
        w: (0..reduced_rank(genus)).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect(),
    }
}

fn word(rng: &mut ChaCha8Rng, genus: usize, len: usize) -> Vec<i32> {
    (0..len)
        .map(|_| {
            let k = rng.gen_range(1..=2 * genus as i32);
            if rng.gen_bool(0.5) {
                k
            } else {
                -k
            }
        })
        .collect()
}

/// Generators of automorphisms: a_i ↦ a_i b_i, b_i ↦ b_i a_i⁻¹, and conjugations.
fn endo(rng: &mut ChaCha8Rng, genus: usize) -> NilEndo {
    let mut phi = NilEndo::identity(genus);
    for _ in 0..4 {
        let i = rng.gen_range(1..=genus as i32);
        let mut words: Vec<Vec<i32>> = (1..=2 * genus as i32).map(|k| vec![k]).collect();
        let step = match rng.gen_range(0..3) {
            0 => {
                words[2 * i as usize - 2] = vec![2 * i - 1, 2 * i];
                NilEndo::from_words(genus, &words).unwrap()
            }
            1 => {
                words[2 * i as usize - 1] = vec![2 * i, -(2 * i - 1)];
                NilEndo::from_words(genus, &words).unwrap()
            }
            _ => NilEndo::conjugation(&element(rng, genus)),
        };
        phi = step.compose(&phi);
    }
    phi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_laws(seed in any::<u64>(), genus in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (element(&mut rng, genus), element(&mut rng, genus), element(&mut rng, genus));
        let id = NilElement::identity(genus);
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&id), x.clone());
        prop_assert_eq!(id.mul(&x), x.clone());
        prop_assert_eq!(x.mul(&x.inverse()), id.clone());
        prop_assert_eq!(x.commutator(&y), x.mul(&y).mul(&x.inverse()).mul(&y.inverse()));
        let c = NilElement::central(genus, x.w.clone());
        prop_assert!(c.commutator(&y).is_identity());
        prop_assert!(c.mul(&y).mul(&c.inverse()).mul(&y.inverse()).is_identity());
    }

    #[test]
    fn words_and_endomorphisms(seed in any::<u64>(), genus in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = word(&mut rng, genus, 12);
        // Insert cancelling pairs so free reduction has work to do.
        for _ in 0..3 {
            let k = word(&mut rng, genus, 1)[0];
            let at = rng.gen_range(0..=w.len());
            w.splice(at..at, [k, -k]);
        }
        prop_assert_eq!(eval_word(&w, genus).unwrap(), eval_word(&free_reduce(&w), genus).unwrap());
        let u = word(&mut rng, genus, 6);
        let uw: Vec<i32> = u.iter().chain(&w).copied().collect();
        prop_assert_eq!(eval_word(&uw, genus).unwrap(), eval_word(&u, genus).unwrap().mul(&eval_word(&w, genus).unwrap()));

        let phi = endo(&mut rng, genus);
        let (x, y) = (element(&mut rng, genus), element(&mut rng, genus));
        prop_assert_eq!(phi.apply(&x.mul(&y)), phi.apply(&x).mul(&phi.apply(&y)));
    }
}
