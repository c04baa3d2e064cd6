//! The structural conjugacy decision for even groups, run with the finite
//! shortcut disabled and checked against class tables.

use coxkit::diagram::{CoxeterMatrix, Entry};
use coxkit::evenconj::{ConjConfig, ConjDecision, EvenConjugacy};
use coxkit::finite::FiniteGroup;
use coxkit::words::{CoxeterGroup, Element};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fin(k: u32) -> Entry {
    Entry::Finite(k)
}

fn structural() -> ConjConfig {
    ConjConfig {
        finite_cap: 1,
        ..ConjConfig::default()
    }
}

#[test]
fn structural_route_matches_class_tables() {
    let groups = [
        CoxeterMatrix::from_edges(2, &[(0, 1, fin(4))]),
        CoxeterMatrix::from_edges(2, &[(0, 1, fin(6))]),
        CoxeterMatrix::from_edges(3, &[(0, 1, fin(4))]),
        CoxeterMatrix::from_edges(3, &[(0, 1, fin(6))]),
        CoxeterMatrix::from_edges(4, &[(0, 1, fin(4)), (2, 3, fin(8))]),
    ];
    for m in groups {
        let group = CoxeterGroup::new(m.clone());
        let table = FiniteGroup::new(&group, 10_000).unwrap().unwrap();
        let mut dec = EvenConjugacy::new(group.clone(), structural()).unwrap();
        for a in 0..table.order() {
            for b in 0..table.order() {
                let (x, y) = (table.element(a), table.element(b));
                let d = dec.decide(x, y).unwrap();
                assert_eq!(d.verdict(), Some(table.is_conjugate(a, b)), "{m:?}: {x} vs {y}");
                assert!(d.verify(&group, x, y).unwrap(), "{m:?}: {x} vs {y}");
            }
        }
    }
}

fn random_element(g: &CoxeterGroup, rng: &mut ChaCha8Rng, max_len: usize) -> Element {
    let len = rng.gen_range(0..=max_len);
    let letters: Vec<usize> = (0..len).map(|_| rng.gen_range(0..g.rank())).collect();
    g.element(&letters).unwrap()
}

#[test]
fn infinite_even_groups_never_refute_true_conjugates() {
    let groups = [
        CoxeterMatrix::from_edges(3, &[(0, 1, fin(4)), (1, 2, Entry::Infinity), (0, 2, fin(2))]),
        CoxeterMatrix::from_edges(4, &[(0, 1, fin(4)), (1, 2, fin(6)), (2, 3, Entry::Infinity), (0, 3, fin(2))]),
        CoxeterMatrix::from_fn(3, |_, _| Entry::Infinity),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in groups {
        let group = CoxeterGroup::new(m.clone());
        let mut dec = EvenConjugacy::new(group.clone(), ConjConfig::default()).unwrap();
        for _ in 0..150 {
            let x = random_element(&group, &mut rng, 6);
            let g = random_element(&group, &mut rng, 4);
            let y = group.conjugate(&g, &x).unwrap();
            let d = dec.decide(&x, &y).unwrap();
            assert!(!matches!(d, ConjDecision::NotConjugate(_)), "{m:?}: {x} vs {y}");
            assert!(d.verify(&group, &x, &y).unwrap());

            let z = random_element(&group, &mut rng, 6);
            let d = dec.decide(&x, &z).unwrap();
            assert!(d.verify(&group, &x, &z).unwrap(), "{m:?}: {x} vs {z}: {d}");
        }
    }
}

#[test]
fn distinct_generators_in_even_groups_are_not_conjugate() {
    let m = CoxeterMatrix::from_edges(3, &[(0, 1, fin(4)), (1, 2, Entry::Infinity), (0, 2, fin(6))]);
    let group = CoxeterGroup::new(m);
    let mut dec = EvenConjugacy::new(group.clone(), structural()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let (x, y) = (group.generator(i), group.generator(j));
            let d = dec.decide(&x, &y).unwrap();
            assert_eq!(d.verdict(), Some(i == j));
            assert!(d.verify(&group, &x, &y).unwrap());
        }
    }
}
