use morita_core::exactla::{
    cokernel_order_of, column_lattice_basis, hnf_basis_contains, in_column_span, smith_normal_form, IntMatrix, Order,
};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r).prop_map(|rows| IntMatrix::from_rows(&rows)))
}

fn scaled(c: &[BigInt], k: &BigInt) -> Vec<BigInt> {
    c.iter().map(|x| x * k).collect()
}

fn primes_of(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn smith_form_reconstructs_and_is_idempotent(m in matrix(8)) {
        let (d, u, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert!(u.determinant().unwrap().magnitude().is_one());
        prop_assert!(v.determinant().unwrap().magnitude().is_one());
        let (d2, _, _) = smith_normal_form(&d);
        prop_assert_eq!(d2, d);
    }

    #[test]
    fn cokernel_orders_are_minimal(m in matrix(8), seed in prop::collection::vec(-9i64..=9, 8)) {
        let c: Vec<BigInt> = seed.iter().take(m.rows()).map(|&x| BigInt::from(x)).collect();
        prop_assume!(c.len() == m.rows());
        let basis = column_lattice_basis(&m);
        let order = cokernel_order_of(&m, &c).unwrap();
        prop_assert_eq!(order.is_one(), hnf_basis_contains(&basis, &c));
        prop_assert_eq!(order.is_one(), in_column_span(&m, &c).unwrap());
        match order {
            Order::Finite(n) => {
                prop_assert!(hnf_basis_contains(&basis, &scaled(&c, &n)));
                let n64 = n.to_u64().unwrap();
                for p in primes_of(n64) {
                    prop_assert!(!hnf_basis_contains(&basis, &scaled(&c, &BigInt::from(n64 / p))));
                }
                for k in 1..n64.min(5000) {
                    prop_assert!(!hnf_basis_contains(&basis, &scaled(&c, &BigInt::from(k))));
                }
            }
            Order::Infinite => {
                for k in 1..=50u32 {
                    prop_assert!(!hnf_basis_contains(&basis, &scaled(&c, &BigInt::from(k))));
                }
            }
        }
    }
}
