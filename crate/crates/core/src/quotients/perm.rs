//! Permutation groups used as finite images.

use std::collections::HashSet;
use std::fmt;

/// A permutation of `0..degree`, acting on the right: `p.apply(i)` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    /// `g⁻¹ self g`, the conjugate that relabels points through `g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut lens = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }
}

impl fmt::Display for Perm {
    /// Cycle notation on 1-based points; `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.0[i] as usize;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// Outcome of an image-level conjugacy test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageConjugacy {
    /// Distinct cycle types.
    CycleType,
    /// The class of the first element, of the given size, misses the second.
    ClassExhausted(usize),
    Conjugate,
    /// The class grew beyond the cap.
    TooLarge,
}

/// Conjugacy of `a` and `b` in the group generated by `gens`: compare cycle
/// types, then close the class of `a` under conjugation by the generators.
pub fn conjugate_in(gens: &[Perm], a: &Perm, b: &Perm, cap: usize) -> ImageConjugacy {
    if a == b {
        return ImageConjugacy::Conjugate;
    }
    if a.cycle_type() != b.cycle_type() {
        return ImageConjugacy::CycleType;
    }
    let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    let mut seen: HashSet<Perm> = HashSet::from([a.clone()]);
    let mut stack = vec![a.clone()];
    while let Some(x) = stack.pop() {
        for g in &gens {
            let y = x.conjugate_by(g);
            if y == *b {
                return ImageConjugacy::Conjugate;
            }
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return ImageConjugacy::TooLarge;
                }
                stack.push(y);
            }
        }
    }
    ImageConjugacy::ClassExhausted(seen.len())
}

/// Order of the group generated by `gens`, if at most `cap`.
pub fn group_order(gens: &[Perm], degree: usize, cap: usize) -> Option<usize> {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(y);
            }
        }
    }
    Some(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Perm {
        Perm::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn composition_and_cycles() {
        let a = p(&[1, 0, 2]);
        let b = p(&[0, 2, 1]);
        let ab = a.then(&b);
        assert_eq!(ab.cycle_type(), vec![3]);
        assert_eq!(ab.then(&ab.inverse()), Perm::identity(3));
        assert_eq!(ab.to_string(), "(1 3 2)");
        assert!(Perm::from_images(vec![0, 0]).is_none());
    }

    #[test]
    fn conjugacy_in_s3() {
        let gens = [p(&[1, 0, 2]), p(&[0, 2, 1])];
        assert_eq!(conjugate_in(&gens, &gens[0], &gens[1], 100), ImageConjugacy::Conjugate);
        let id = Perm::identity(3);
        assert_eq!(conjugate_in(&gens, &gens[0], &id, 100), ImageConjugacy::CycleType);
        assert_eq!(group_order(&gens, 3, 100), Some(6));
    }

    #[test]
    fn same_cycle_type_not_conjugate() {
        // In the Klein four-group generated by (12) and (34), the two transpositions are not conjugate.
        let gens = [p(&[1, 0, 2, 3]), p(&[0, 1, 3, 2])];
        assert_eq!(
            conjugate_in(&gens, &gens[0], &gens[1], 100),
            ImageConjugacy::ClassExhausted(1)
        );
    }
}
