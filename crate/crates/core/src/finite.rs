//! Finite Coxeter groups held as explicit multiplication tables.
//!
//! Elements are numbered in ShortLex order of their canonical words, so
//! index 0 is the identity and index `i + 1` is generator `i` whenever all
//! generators are distinct.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use crate::diagram::{CoxeterMatrix, IndexSet};
use crate::error::EngineError;
use crate::words::{CoxeterGroup, Element, Enumeration};

/// Default cap on the size of groups that are enumerated into tables.
pub const DEFAULT_FINITE_CAP: usize = 20_000;

/// A set of element indices, as a bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: Vec<u64>,
}

impl ElementSet {
    pub fn empty(size: usize) -> Self {
        ElementSet {
            bits: vec![0; size.div_ceil(64)],
        }
    }

    pub fn full(size: usize) -> Self {
        let mut s = ElementSet::empty(size);
        for i in 0..size {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &ElementSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| k * 64 + b)
        })
    }
}

/// An enumerated finite Coxeter group.
#[derive(Debug)]
pub struct FiniteGroup {
    group: CoxeterGroup,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    /// `right[i * n + s]` is the index of `elements[i] · s`.
    right: Vec<u32>,
    left: Vec<u32>,
    inverse: Vec<u32>,
    classes: OnceLock<Vec<u32>>,
}

impl FiniteGroup {
    /// Enumerate `group`; `None` if it has more than `cap` elements.
    pub fn new(group: &CoxeterGroup, cap: usize) -> Result<Option<FiniteGroup>, EngineError> {
        let elements = match group.enumerate_group(cap)? {
            Enumeration::Finite(v) => v,
            Enumeration::Infinite(_) => return Ok(None),
        };
        let n = group.rank();
        let index: HashMap<Element, usize> =
            elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut right = vec![0u32; elements.len() * n];
        for (i, e) in elements.iter().enumerate() {
            for s in 0..n {
                let p = group.mul_gen(e, s)?;
                right[i * n + s] = index[&p] as u32;
            }
        }
        let mut inverse = vec![0u32; elements.len()];
        for (i, e) in elements.iter().enumerate() {
            let mut cur = 0usize;
            for &s in e.letters().iter().rev() {
                cur = right[cur * n + s as usize] as usize;
            }
            inverse[i] = cur as u32;
        }
        let mut left = vec![0u32; elements.len() * n];
        for i in 0..elements.len() {
            for s in 0..n {
                // s · u = (u⁻¹ s)⁻¹
                let u_inv_s = right[inverse[i] as usize * n + s];
                left[i * n + s] = inverse[u_inv_s as usize];
            }
        }
        Ok(Some(FiniteGroup {
            group: group.clone(),
            elements,
            index,
            right,
            left,
            inverse,
            classes: OnceLock::new(),
        }))
    }

    /// Enumerate the Coxeter group of `matrix`.
    pub fn from_matrix(matrix: &CoxeterMatrix, cap: usize) -> Result<Option<FiniteGroup>, EngineError> {
        FiniteGroup::new(&CoxeterGroup::new(matrix.clone()), cap)
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Index of the element spelled by an arbitrary word.
    pub fn index_of_letters(&self, letters: &[u8]) -> usize {
        letters.iter().fold(0, |cur, &s| self.mul_gen(cur, s as usize))
    }

    pub fn generator(&self, s: usize) -> usize {
        self.mul_gen(0, s)
    }

    pub fn mul_gen(&self, a: usize, s: usize) -> usize {
        self.right[a * self.rank() + s] as usize
    }

    pub fn gen_mul(&self, s: usize, a: usize) -> usize {
        self.left[a * self.rank() + s] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.elements[b]
            .letters()
            .iter()
            .fold(a, |cur, &s| self.mul_gen(cur, s as usize))
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `g x g⁻¹`.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inverse(g))
    }

    pub fn conj_by_gen(&self, s: usize, x: usize) -> usize {
        self.gen_mul(s, self.mul_gen(x, s))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut cur = a;
        let mut k = 1;
        while cur != 0 {
            cur = self.mul(cur, a);
            k += 1;
        }
        k
    }

    /// Conjugacy class label of every element.
    pub fn class_labels(&self) -> &[u32] {
        self.classes.get_or_init(|| {
            let mut label = vec![u32::MAX; self.order()];
            let mut next = 0u32;
            for start in 0..self.order() {
                if label[start] != u32::MAX {
                    continue;
                }
                label[start] = next;
                let mut stack = vec![start];
                while let Some(x) = stack.pop() {
                    for s in 0..self.rank() {
                        let y = self.conj_by_gen(s, x);
                        if label[y] == u32::MAX {
                            label[y] = next;
                            stack.push(y);
                        }
                    }
                }
                next += 1;
            }
            label
        })
    }

    pub fn is_conjugate(&self, a: usize, b: usize) -> bool {
        let labels = self.class_labels();
        labels[a] == labels[b]
    }

    pub fn class_count(&self) -> usize {
        self.class_labels().iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Some `g` with `g a g⁻¹ = b`, found by breadth-first search through the
    /// class of `a` under conjugation by generators.
    pub fn conjugator(&self, a: usize, b: usize) -> Option<usize> {
        if !self.is_conjugate(a, b) {
            return None;
        }
        // via[x] = (previous element, generator)
        let mut via: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([a]);
        via.insert(a, (a, usize::MAX));
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for s in 0..self.rank() {
                let y = self.conj_by_gen(s, x);
                if let std::collections::hash_map::Entry::Vacant(e) = via.entry(y) {
                    e.insert((x, s));
                    queue.push_back(y);
                }
            }
        }
        // b = s_k … s_1 a s_1 … s_k, so g = s_k … s_1.
        let mut gens = Vec::new();
        let mut cur = b;
        while cur != a {
            let (prev, s) = via[&cur];
            gens.push(s);
            cur = prev;
        }
        Some(gens.iter().fold(0, |g, &s| self.mul_gen(g, s)))
    }

    /// The subgroup generated by the given elements.
    pub fn subgroup(&self, gens: &[usize]) -> ElementSet {
        let mut set = ElementSet::empty(self.order());
        set.insert(0);
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.contains(y) {
                    set.insert(y);
                    stack.push(y);
                }
            }
        }
        set
    }

    pub fn standard_parabolic(&self, subset: IndexSet) -> ElementSet {
        let mut set = ElementSet::empty(self.order());
        for (i, e) in self.elements.iter().enumerate() {
            if e.support().is_subset(subset) {
                set.insert(i);
            }
        }
        set
    }

    /// `g W_J g⁻¹`.
    pub fn parabolic(&self, g: usize, subset: IndexSet) -> ElementSet {
        let mut set = ElementSet::empty(self.order());
        for (i, e) in self.elements.iter().enumerate() {
            if e.support().is_subset(subset) {
                set.insert(self.conj(g, i));
            }
        }
        set
    }

    /// Elements conjugate to some generator.
    pub fn reflections(&self) -> Vec<usize> {
        let labels = self.class_labels();
        let gen_classes: Vec<u32> = (0..self.rank()).map(|s| labels[self.generator(s)]).collect();
        (0..self.order()).filter(|&i| gen_classes.contains(&labels[i])).collect()
    }

    pub fn involutions(&self) -> Vec<usize> {
        (1..self.order()).filter(|&i| self.mul(i, i) == 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Entry;

    fn b3() -> FiniteGroup {
        let m = CoxeterMatrix::from_edges(3, &[(0, 1, Entry::Finite(4)), (1, 2, Entry::Finite(3))]);
        FiniteGroup::from_matrix(&m, 1000).unwrap().unwrap()
    }

    #[test]
    fn tables_are_consistent() {
        let g = b3();
        assert_eq!(g.order(), 48);
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inverse(a)), 0);
            for s in 0..3 {
                assert_eq!(g.gen_mul(s, a), g.mul(g.generator(s), a));
            }
        }
    }

    #[test]
    fn conjugator_is_verified() {
        let g = b3();
        for a in 0..g.order() {
            for b in 0..g.order() {
                if let Some(c) = g.conjugator(a, b) {
                    assert_eq!(g.conj(c, a), b);
                }
            }
        }
        // B3 has 10 conjugacy classes
        assert_eq!(g.class_count(), 10);
        assert_eq!(g.reflections().len(), 9);
    }

    #[test]
    fn infinite_is_none() {
        let m = CoxeterMatrix::dihedral(Entry::Infinity);
        assert!(FiniteGroup::from_matrix(&m, 50).unwrap().is_none());
    }

    #[test]
    fn parabolic_sets() {
        let g = b3();
        assert_eq!(g.standard_parabolic(IndexSet::from_bits(0b011)).len(), 8);
        assert_eq!(g.parabolic(5, IndexSet::from_bits(0b110)).len(), 6);
        let sub = g.subgroup(&[g.generator(0), g.generator(2)]);
        assert_eq!(sub.len(), 4);
    }
}
