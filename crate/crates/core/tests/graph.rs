use proptest::prelude::*;
use ptsp_core::graph::{cover_is_tour, tour_arcs};
use ptsp_core::{ArcSpace, Cycle, NodeSubset};

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Number of permutations of `n` points without fixed points.
fn derangements(n: usize) -> usize {
    let (mut a, mut b) = (1usize, 0usize);
    for k in 2..=n {
        let c = (k - 1) * (a + b);
        a = b;
        b = c;
    }
    if n == 0 {
        1
    } else {
        b
    }
}

#[test]
fn counts_match_closed_forms() {
    for n in 4..=7 {
        let sp = ArcSpace::new(n).unwrap();
        let m = n - 1;
        let cycles: usize = (2..=m).map(|k| binom(m, k) * factorial(k - 1)).sum();
        assert_eq!(sp.all_cycles().unwrap().len(), cycles, "n = {n}");
        assert_eq!(sp.all_subsets().unwrap().len(), (1 << m) - m - 1);
        assert_eq!(sp.tours(9).unwrap().len(), factorial(m));
        assert_eq!(sp.cycle_covers().unwrap().len(), derangements(n));
        assert_eq!(sp.num_arcs(), n * m);
        assert_eq!(sp.num_a1(), m * (m - 1));
    }
}

#[test]
fn tours_are_exactly_the_hamiltonian_covers() {
    let sp = ArcSpace::new(5).unwrap();
    let covers = sp.cycle_covers().unwrap();
    assert_eq!(covers.iter().filter(|c| cover_is_tour(c)).count(), 24);
    for t in sp.tours(9).unwrap() {
        assert_eq!(t[0], 1);
        assert_eq!(tour_arcs(&t).len(), 5);
    }
}

#[test]
fn small_n_rejected() {
    assert!(ArcSpace::new(3).is_err());
    assert!(ArcSpace::new(4).is_ok());
}

#[test]
fn cap_is_enforced() {
    let sp = ArcSpace::new(10).unwrap();
    assert!(sp.tours(9).is_err());
    let sp = ArcSpace::new(ptsp_core::graph::ENUMERATION_CAP + 1).unwrap();
    assert!(matches!(sp.all_cycles(), Err(ptsp_core::Error::Capacity { .. })));
}

proptest! {
    #[test]
    fn cycle_rotation_is_canonical(rot in 0usize..4, perm in Just(vec![3usize, 5, 2, 4]).prop_shuffle()) {
        let mut nodes = perm.clone();
        nodes.rotate_left(rot);
        let a = Cycle::new(perm).unwrap();
        let b = Cycle::new(nodes).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.nodes()[0], 2);
        prop_assert_eq!(a.reverse().reverse(), a);
    }

    #[test]
    fn cut_sizes(mask in 1u64..63, n in 4usize..=7) {
        let sp = ArcSpace::new(n).unwrap();
        let s = NodeSubset::from_nodes((1..=n).filter(|v| mask >> (v - 1) & 1 == 1));
        prop_assume!(!s.is_empty() && s.len() < n);
        let k = s.len();
        prop_assert_eq!(sp.delta_plus(s).unwrap().len(), k * (n - k));
        prop_assert_eq!(sp.delta_minus(s).unwrap().len(), k * (n - k));
        prop_assert_eq!(sp.arcs_within(s).len(), k * (k - 1));
    }
}
