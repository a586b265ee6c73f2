use std::collections::BTreeSet;

use morita_core::fingcoh::corpus::{self, NamedGroup};
use morita_core::fingcoh::{
    cyclic_witness, h1_finite, is_cocycle, prime_factors, random_p_module, restrict_h1, FiniteCocycle, FiniteGroup, FiniteModule,
};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pick(rng: &mut ChaCha8Rng, max_order: usize) -> NamedGroup {
    let groups: Vec<NamedGroup> = corpus::bundled().into_iter().filter(|g| g.group.order() <= max_order).collect();
    groups[rng.gen_range(0..groups.len())].clone()
}

/// All vectors of the module, as coordinate tuples.
fn elements(module: &FiniteModule) -> Vec<Vec<BigInt>> {
    module.moduli.iter().fold(vec![Vec::new()], |acc, m| {
        let m = m.to_u64().unwrap();
        acc.into_iter()
            .flat_map(|prefix| {
                (0..m).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(BigInt::from(x));
                    v
                })
            })
            .collect()
    })
}

/// Extends generator values by f(gs) = f(g) + g·f(s) without any consistency checks.
fn extend(group: &FiniteGroup, module: &FiniteModule, gens: &[usize], values: &[Vec<BigInt>]) -> FiniteCocycle {
    let n = group.order();
    let mut f: Vec<Option<Vec<BigInt>>> = vec![None; n];
    f[group.identity()] = Some(vec![BigInt::from(0); module.rank()]);
    let mut queue = std::collections::VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        for (s, v) in gens.iter().zip(values) {
            let gs = group.mul(g, *s);
            if f[gs].is_none() {
                let base = f[g].clone().unwrap();
                let next: Vec<BigInt> = base.iter().zip(module.act(g, v)).map(|(a, b)| a + b).collect();
                f[gs] = Some(module.reduce(&next));
                queue.push_back(gs);
            }
        }
    }
    FiniteCocycle { values: f.into_iter().map(Option::unwrap).collect() }
}

fn prime_of(module: &FiniteModule) -> usize {
    prime_factors(module.moduli[0].to_usize().unwrap())[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn h1_cardinality_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let named = pick(&mut rng, 12);
        let group = &named.group;
        let module = random_p_module(group, &mut rng, 2);
        let size = module.cardinality().to_u64().unwrap();
        let gens = group.generators().to_vec();
        prop_assume!(size.pow(gens.len() as u32) <= 20_000);
        let all = elements(&module);
        let mut cocycles = 0u64;
        let mut tuple = vec![0usize; gens.len()];
        loop {
            let values: Vec<Vec<BigInt>> = tuple.iter().map(|&i| all[i].clone()).collect();
            if is_cocycle(group, &module, &extend(group, &module, &gens, &values)) {
                cocycles += 1;
            }
            let mut k = 0;
            while k < tuple.len() && tuple[k] + 1 == all.len() {
                tuple[k] = 0;
                k += 1;
            }
            if k == tuple.len() {
                break;
            }
            tuple[k] += 1;
        }
        let fixed = all.iter().filter(|a| (0..group.order()).all(|g| &module.act(g, a) == *a)).count() as u64;
        let coboundaries = size / fixed;
        let h1 = h1_finite(group, &module).unwrap();
        prop_assert_eq!(h1.cardinality(), BigInt::from(cocycles / coboundaries), "{}", named.name);
        for class in h1.classes() {
            let f = h1.cocycle(&class).unwrap();
            prop_assert!(is_cocycle(group, &module, &f));
            prop_assert_eq!(h1.class_of(&f).unwrap(), class);
        }
    }

    #[test]
    fn sylow_restriction_detects_classes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let named = pick(&mut rng, 24);
        let group = &named.group;
        let module = random_p_module(group, &mut rng, 4);
        let p = prime_of(&module);
        let sylow = group.sylow_subgroup(p);
        let order = group.order();
        let mut rest = order;
        while rest.is_multiple_of(p) {
            rest /= p;
        }
        prop_assert_eq!(sylow.len(), order / rest);
        let h1 = h1_finite(group, &module).unwrap();
        for _ in 0..8 {
            let class = h1.random_class(&mut rng);
            if h1.is_zero(&class) {
                continue;
            }
            prop_assert!(!restrict_h1(group, &module, &h1, &class, &sylow).unwrap().is_zero(), "{}", named.name);
            let w = cyclic_witness(group, &module, &h1, &class).unwrap();
            prop_assert!(!restrict_h1(group, &module, &h1, &class, &w.elements).unwrap().is_zero());
        }
    }

    #[test]
    fn inflation_restriction_on_central_subgroups(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let named = pick(&mut rng, 24);
        let group = &named.group;
        let centre: Vec<usize> = group.center().into_iter().filter(|&z| prime_factors(group.element_order(z)) == vec![group.element_order(z)]).collect();
        prop_assume!(!centre.is_empty());
        let z = centre[rng.gen_range(0..centre.len())];
        let zsub = group.cyclic_subgroup(z);
        let (quotient, projection) = group.quotient(&zsub).unwrap();
        let base = random_p_module(&quotient, &mut rng, 3);
        let module = base.inflate(&projection);
        let module = FiniteModule::new(group, module.moduli.clone(), module.action.clone()).unwrap();
        let hg = h1_finite(group, &module).unwrap();
        let hq = h1_finite(&quotient, &base).unwrap();
        prop_assume!(hg.cardinality() <= BigInt::from(4096));
        // Exactness at H¹(G, A): the kernel of restriction to Z is the image of inflation.
        let kernel = hg
            .classes()
            .into_iter()
            .filter(|c| restrict_h1(group, &module, &hg, c, &zsub).unwrap().is_zero())
            .count();
        prop_assert_eq!(BigInt::from(kernel), hq.cardinality(), "{}", named.name);
        let mut images = BTreeSet::new();
        for beta in hq.classes() {
            let f = hq.cocycle(&beta).unwrap();
            let inflated = FiniteCocycle { values: projection.iter().map(|&q| f.values[q].clone()).collect() };
            let alpha = hg.class_of(&inflated).unwrap();
            prop_assert!(restrict_h1(group, &module, &hg, &alpha, &zsub).unwrap().is_zero());
            images.insert(alpha);
        }
        prop_assert_eq!(BigInt::from(images.len()), hq.cardinality());
    }
}
