mod common;

use std::collections::HashMap;

use common::{all_partitions, product_by_pieri};
use interalign::schubert::{
    count_solutions, existence_witness, incidence_class, lr_coefficient, schur_multiply_in_box, GrassmannianShape,
    Partition,
};
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn lr_rule_matches_pieri_expansion() {
    let mut checked = 0;
    for total in 0..=10 {
        for a in 0..=total {
            for lambda in all_partitions(a) {
                for mu in all_partitions(total - a) {
                    let oracle = product_by_pieri(&lambda, &mu);
                    for nu in all_partitions(total) {
                        let expect = oracle.get(nu.parts()).copied().unwrap_or(0);
                        assert_eq!(lr_coefficient(&lambda, &mu, &nu) as i64, expect, "{lambda} {mu} {nu}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn lr_symmetry_and_conjugation() {
    for total in 0..=12 {
        for a in 0..=total {
            for lambda in all_partitions(a) {
                for mu in all_partitions(total - a) {
                    for nu in all_partitions(total) {
                        let c = lr_coefficient(&lambda, &mu, &nu);
                        assert_eq!(c, lr_coefficient(&mu, &lambda, &nu));
                        if total <= 10 {
                            assert_eq!(c, lr_coefficient(&lambda.conjugate(), &mu.conjugate(), &nu.conjugate()));
                        }
                    }
                }
            }
        }
    }
}

fn box_mul(a: &HashMap<Partition, u64>, b: &HashMap<Partition, u64>, g: GrassmannianShape) -> HashMap<Partition, u64> {
    let mut out = HashMap::new();
    for (x, cx) in a {
        for (y, cy) in b {
            for (z, c) in schur_multiply_in_box(x, y, g) {
                *out.entry(z).or_insert(0) += cx * cy * c;
            }
        }
    }
    out
}

fn arb_box_partition(d: usize, w: usize) -> impl Strategy<Value = Partition> {
    proptest::collection::vec(0..=w, d).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn conjugation_is_an_involution(mut v in proptest::collection::vec(0usize..12, 0..10)) {
        v.sort_unstable_by(|a, b| b.cmp(a));
        let p = Partition::new(v).unwrap();
        prop_assert_eq!(p.conjugate().conjugate(), p.clone());
        prop_assert_eq!(p.conjugate().size(), p.size());
    }

    #[test]
    fn box_product_is_associative_g25(a in arb_box_partition(2, 3), b in arb_box_partition(2, 3), c in arb_box_partition(2, 3)) {
        let g = GrassmannianShape::new(2, 5).unwrap();
        let one = |p: &Partition| HashMap::from([(p.clone(), 1u64)]);
        prop_assert_eq!(box_mul(&box_mul(&one(&a), &one(&b), g), &one(&c), g), box_mul(&one(&a), &box_mul(&one(&b), &one(&c), g), g));
    }

    #[test]
    fn box_product_is_associative_g36(a in arb_box_partition(3, 3), b in arb_box_partition(3, 3), c in arb_box_partition(3, 3)) {
        let g = GrassmannianShape::new(3, 6).unwrap();
        let one = |p: &Partition| HashMap::from([(p.clone(), 1u64)]);
        prop_assert_eq!(box_mul(&box_mul(&one(&a), &one(&b), g), &one(&c), g), box_mul(&one(&a), &box_mul(&one(&b), &one(&c), g), g));
    }
}

#[test]
fn incidence_terms_have_codimension_d_squared() {
    for d in 1..=5 {
        let class = incidence_class(d);
        assert!(class.iter().all(|(a, b)| a.size() + b.size() == d * d && a.fits(d, d) && b.fits(d, d)));
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn three_user_counts_are_central_binomials() {
    for d in 1..=3 {
        assert_eq!(count_solutions(3, d, 2 * d).unwrap(), BigUint::from(binomial(2 * d as u64, d as u64)));
    }
}

#[test]
fn witness_exists_on_the_feasible_boundary() {
    for k in 3..=8usize {
        for d in 1..=4 {
            let n = ((k + 1) * d).div_ceil(2);
            for extra in 0..2 {
                existence_witness(k, d, n + extra).unwrap_or_else(|e| panic!("K={k} d={d} N={}: {e}", n + extra));
            }
        }
    }
}
