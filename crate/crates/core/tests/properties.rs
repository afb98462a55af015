use heatwalk::class_walk::{count_s, transition_counts};
use heatwalk::free_prob::{word_moment, Word};
use heatwalk::laurent::LaurentPolyN;
use heatwalk::noncross::{enumerate_nc, kreweras, kreweras_by_search};
use heatwalk::tensor_rep::{brauer_compose, BrauerDiagram};
use heatwalk::{compose, leq_abs, Partition, Permutation};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::sample::Index;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn partition(max_n: usize) -> impl Strategy<Value = Partition> {
    (1..=max_n, any::<Index>()).prop_map(|(n, i)| {
        let all = Partition::all(n);
        all[i.index(all.len())].clone()
    })
}

fn laurent() -> impl Strategy<Value = LaurentPolyN> {
    prop::collection::vec((-4i64..=4, -20i64..=20), 0..5).prop_map(|terms| {
        terms.into_iter().fold(LaurentPolyN::zero(), |acc, (e, c)| {
            &acc + &LaurentPolyN::monomial(e, BigRational::from_integer(c.into()))
        })
    })
}

fn brauer(n: usize) -> impl Strategy<Value = BrauerDiagram> {
    let all = BrauerDiagram::all(n);
    any::<Index>().prop_map(move |i| all[i.index(all.len())].clone())
}

proptest! {
    #[test]
    fn composition_is_associative(a in perm(6), b in perm(6), c in perm(6)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_and_cycle_notation(a in perm(7)) {
        prop_assert!(compose(&a, &a.inverse()).unwrap().is_identity());
        let back = Permutation::parse_cycles(&a.to_string(), Some(7)).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(a.cycle_type().size(), 7);
        prop_assert_eq!(a.norm() + a.cycle_count(), 7);
    }

    #[test]
    fn transposition_changes_cycle_count_by_one(a in perm(6), x in 0usize..6, y in 0usize..6) {
        prop_assume!(x != y);
        let mut b = a.clone();
        b.mul_transposition_in_place(x, y);
        let diff = b.cycle_count() as i64 - a.cycle_count() as i64;
        prop_assert!(diff == 1 || diff == -1);
    }

    #[test]
    fn absolute_order_is_reflexive_and_bounded(a in perm(5)) {
        prop_assert!(leq_abs(&Permutation::identity(5), &a).unwrap());
        prop_assert!(leq_abs(&a, &a).unwrap());
    }

    #[test]
    fn partition_text_round_trip(p in partition(12)) {
        let back: Partition = p.to_string().parse().unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(p.conjugate().conjugate(), p.clone());
        prop_assert_eq!(p.representative().cycle_type(), p);
    }

    #[test]
    fn walk_counts_sum_to_all_walks(l in partition(6), k in 0usize..7) {
        let n = l.size();
        let total: BigUint = (0..=(k + n) / 2).map(|d| count_s(&l, k, d)).sum();
        prop_assert_eq!(total, BigUint::from(n * (n - 1) / 2).pow(k as u32));
    }

    #[test]
    fn class_graph_is_reversible(n in 1usize..7, i in any::<Index>(), j in any::<Index>()) {
        // |C_a|·m(a→b) = |C_b|·m(b→a): both count pairs (σ, τ) with σ ∈ C_a, στ ∈ C_b.
        let all = Partition::all(n);
        let (a, b) = (&all[i.index(all.len())], &all[j.index(all.len())]);
        let m = transition_counts(n);
        let lhs = a.class_size() * BigUint::from(m.count(a, b));
        let rhs = b.class_size() * BigUint::from(m.count(b, a));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kreweras_is_a_rank_reversing_bijection(n in 1usize..8, i in any::<Index>()) {
        let all = enumerate_nc(n).unwrap();
        let p = &all[i.index(all.len())];
        let k = kreweras(p);
        prop_assert_eq!(p.rank() + k.rank(), n - 1);
        prop_assert_eq!(kreweras_by_search(p).unwrap(), k.clone());
        let back: heatwalk::noncross::NCPartition = k.to_string().parse().unwrap();
        prop_assert_eq!(back, k);
    }

    #[test]
    fn laurent_ring_laws(a in laurent(), b in laurent(), c in laurent(), x in 1i64..6) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        let at = BigRational::from_integer(BigInt::from(x));
        prop_assert_eq!((&a * &b).eval(&at), a.eval(&at) * b.eval(&at));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn brauer_composition_is_associative(a in brauer(3), b in brauer(3), c in brauer(3)) {
        let (ab, l1) = brauer_compose(&a, &b).unwrap();
        let (abc, l2) = brauer_compose(&ab, &c).unwrap();
        let (bc, l3) = brauer_compose(&b, &c).unwrap();
        let (abc2, l4) = brauer_compose(&a, &bc).unwrap();
        prop_assert_eq!(abc, abc2);
        prop_assert_eq!(l1 + l2, l3 + l4);
    }

    #[test]
    fn words_are_tracial(letters in prop::collection::vec(0usize..2, 2..7), s in 0.1f64..1.5, t in 0.1f64..1.5, r in 0usize..6) {
        prop_assume!(letters.contains(&0) && letters.contains(&1));
        let w = Word::new(letters, vec![s, t]).unwrap();
        let base = word_moment(&w).unwrap();
        let rotated = word_moment(&w.rotate(r % w.len())).unwrap();
        prop_assert!((base - rotated).abs() < 1e-12);
        prop_assert!(base.abs() <= 1.0 + 1e-12);
    }
}
