//! Word problem and element arithmetic.
//!
//! Elements are stored by their canonical form: the ShortLex-least reduced
//! word, with generators ordered by their index in the Coxeter matrix.
//!
//! Products are computed one letter at a time with the exchange condition.
//! To decide whether `s` is a right descent of a reduced word `w = w' t`,
//! note that `w` factors as `v x` with `v` minimal in `v W_{s,t}` and `x`
//! the alternating word ending in `t`; `s` is a descent exactly when `x` is
//! the longest element of `W_{s,t}`, i.e. when `m_st` letters alternate
//! out of `w` from the right. Each peel is a descent question about a
//! strictly shorter word, so the recursion terminates. Canonical forms are
//! then read off greedily: the first letter of the ShortLex normal form is
//! the least left descent.
//!
//! [`CoxeterGroup::tits_reduce`] implements the classical braid-class
//! search independently and serves as a cross-check.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::cmp::Ordering;

use crate::diagram::{CoxeterMatrix, Entry, IndexSet};
use crate::error::{EngineError, ParseError};

/// Default cap on exchange-condition steps per operation.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

/// A finite sequence of generator indices (0-based).
///
/// Serializes as whitespace separated 1-based indices, `e` for the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&l| l as u8).collect())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn support(&self) -> IndexSet {
        self.0.iter().map(|&l| l as usize).collect()
    }

    /// Parse the 1-based text form, checking letters against `rank`.
    pub fn parse(text: &str, rank: usize) -> Result<Word, ParseError> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let i: usize = tok
                .parse()
                .map_err(|_| ParseError::Other(format!("malformed letter `{tok}`")))?;
            if i == 0 || i > rank {
                return Err(ParseError::Other(format!("letter {i} out of range for rank {rank}")));
            }
            letters.push((i - 1) as u8);
        }
        Ok(Word(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(|l| (l + 1).to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// ShortLex order: shorter first, then lexicographic.
pub fn shortlex_cmp(a: &[u8], b: &[u8]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A group element, held as its canonical word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element(Word);

impl Element {
    pub fn identity() -> Self {
        Element(Word::empty())
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn letters(&self) -> &[u8] {
        self.0.letters()
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters used by the canonical word. Every reduced word of an element
    /// has the same support.
    pub fn support(&self) -> IndexSet {
        self.0.support()
    }

    /// Rename letters through `map` (old index to new index). Only valid when
    /// the renaming preserves the relative order of the letters in use, so
    /// that canonical forms stay canonical.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Element {
        Element(Word(self.letters().iter().map(|&l| map(l as usize) as u8).collect()))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(self.letters(), other.letters())
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Outcome of [`CoxeterGroup::enumerate_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    /// All elements, in ShortLex order.
    Finite(Vec<Element>),
    /// More than `cap` elements exist.
    Infinite(usize),
}

/// Outcome of [`CoxeterGroup::conjugate_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugatorSearch {
    /// `g` with `g x g⁻¹ = y`, the ShortLex-least such conjugator.
    Found(Element),
    NotFoundWithin(usize),
}

struct Meter {
    used: u64,
    budget: u64,
}

impl Meter {
    fn new(budget: u64) -> Self {
        Meter { used: 0, budget }
    }

    fn tick(&mut self) -> Result<(), EngineError> {
        self.used += 1;
        if self.used > self.budget {
            Err(EngineError::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }
}

/// A Coxeter system together with the step budget applied to every operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterGroup {
    matrix: CoxeterMatrix,
    steps: u64,
}

impl CoxeterGroup {
    pub fn new(matrix: CoxeterMatrix) -> Self {
        CoxeterGroup {
            matrix,
            steps: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn with_step_budget(mut self, steps: u64) -> Self {
        self.steps = steps.max(1);
        self
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn step_budget(&self) -> u64 {
        self.steps
    }

    pub fn generator(&self, i: usize) -> Element {
        assert!(i < self.rank(), "generator {i} out of range");
        Element(Word(vec![i as u8]))
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.rank()).map(|i| self.generator(i)).collect()
    }

    fn check_letters(&self, w: &[u8]) -> Result<(), EngineError> {
        match w.iter().find(|&&l| l as usize >= self.rank()) {
            Some(&l) => Err(EngineError::InvalidLetter {
                letter: l as usize,
                rank: self.rank(),
            }),
            None => Ok(()),
        }
    }

    /// If `s` is a right descent of the reduced word `w`, a reduced word for `w s`.
    fn exchange(&self, w: &[u8], s: u8, meter: &mut Meter) -> Result<Option<Vec<u8>>, EngineError> {
        meter.tick()?;
        let Some((&t, head)) = w.split_last() else {
            return Ok(None);
        };
        if t == s {
            return Ok(Some(head.to_vec()));
        }
        let m = match self.matrix.m(s as usize, t as usize) {
            Entry::Infinity => return Ok(None),
            Entry::Finite(m) => m as usize,
        };
        let mut rest = head.to_vec();
        let mut peeled = 1;
        let mut next = s;
        while peeled < m {
            match self.exchange(&rest, next, meter)? {
                Some(shorter) => {
                    rest = shorter;
                    peeled += 1;
                    next = if next == s { t } else { s };
                }
                None => return Ok(None),
            }
        }
        // w = rest · (longest element of W_{s,t}); drop its final s.
        for i in 0..m - 1 {
            rest.push(if (m - 2 - i) % 2 == 0 { t } else { s });
        }
        Ok(Some(rest))
    }

    fn push_letter(&self, w: &mut Vec<u8>, s: u8, meter: &mut Meter) -> Result<(), EngineError> {
        match self.exchange(w, s, meter)? {
            Some(shorter) => *w = shorter,
            None => w.push(s),
        }
        Ok(())
    }

    /// ShortLex normal form of a reduced word.
    fn normal_form(&self, reduced: &[u8], meter: &mut Meter) -> Result<Element, EngineError> {
        let mut rest_inv: Vec<u8> = reduced.iter().rev().copied().collect();
        let mut out = Vec::with_capacity(reduced.len());
        while !rest_inv.is_empty() {
            let mut advanced = false;
            for s in 0..self.rank() as u8 {
                if let Some(shorter) = self.exchange(&rest_inv, s, meter)? {
                    out.push(s);
                    rest_inv = shorter;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "non-identity element without a left descent");
        }
        Ok(Element(Word(out)))
    }

    fn reduce_letters(&self, letters: &[u8], meter: &mut Meter) -> Result<Element, EngineError> {
        self.check_letters(letters)?;
        let mut w = Vec::with_capacity(letters.len());
        for &s in letters {
            self.push_letter(&mut w, s, meter)?;
        }
        self.normal_form(&w, meter)
    }

    /// The canonical element represented by `w`.
    pub fn reduce(&self, w: &Word) -> Result<Element, EngineError> {
        self.reduce_letters(w.letters(), &mut Meter::new(self.steps))
    }

    /// Convenience: reduce a slice of 0-based letters.
    pub fn element(&self, letters: &[usize]) -> Result<Element, EngineError> {
        self.reduce(&Word::from_indices(letters))
    }

    pub fn is_reduced(&self, w: &Word) -> Result<bool, EngineError> {
        self.check_letters(w.letters())?;
        let mut meter = Meter::new(self.steps);
        let mut acc = Vec::with_capacity(w.len());
        for &s in w.letters() {
            if self.exchange(&acc, s, &mut meter)?.is_some() {
                return Ok(false);
            }
            acc.push(s);
        }
        Ok(true)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, EngineError> {
        let mut meter = Meter::new(self.steps);
        let mut w = a.letters().to_vec();
        for &s in b.letters() {
            self.push_letter(&mut w, s, &mut meter)?;
        }
        self.normal_form(&w, &mut meter)
    }

    /// Product of several elements, left to right.
    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a Element>) -> Result<Element, EngineError> {
        let mut meter = Meter::new(self.steps);
        let mut w = Vec::new();
        for f in factors {
            for &s in f.letters() {
                self.push_letter(&mut w, s, &mut meter)?;
            }
        }
        self.normal_form(&w, &mut meter)
    }

    pub fn invert(&self, a: &Element) -> Result<Element, EngineError> {
        let rev: Vec<u8> = a.letters().iter().rev().copied().collect();
        self.normal_form(&rev, &mut Meter::new(self.steps))
    }

    /// `g x g⁻¹`.
    pub fn conjugate(&self, g: &Element, x: &Element) -> Result<Element, EngineError> {
        let mut meter = Meter::new(self.steps);
        let mut w = g.letters().to_vec();
        for &s in x.letters().iter().chain(g.letters().iter().rev()) {
            self.push_letter(&mut w, s, &mut meter)?;
        }
        self.normal_form(&w, &mut meter)
    }

    pub fn power(&self, a: &Element, k: usize) -> Result<Element, EngineError> {
        let mut meter = Meter::new(self.steps);
        let mut w = Vec::new();
        for _ in 0..k {
            for &s in a.letters() {
                self.push_letter(&mut w, s, &mut meter)?;
            }
        }
        self.normal_form(&w, &mut meter)
    }

    /// `a s` for a generator `s`.
    pub fn mul_gen(&self, a: &Element, s: usize) -> Result<Element, EngineError> {
        let mut meter = Meter::new(self.steps);
        let mut w = a.letters().to_vec();
        self.push_letter(&mut w, s as u8, &mut meter)?;
        self.normal_form(&w, &mut meter)
    }

    pub fn right_descents(&self, a: &Element) -> Result<IndexSet, EngineError> {
        let mut meter = Meter::new(self.steps);
        let mut out = IndexSet::EMPTY;
        for s in 0..self.rank() {
            if self.exchange(a.letters(), s as u8, &mut meter)?.is_some() {
                out.insert(s);
            }
        }
        Ok(out)
    }

    pub fn left_descents(&self, a: &Element) -> Result<IndexSet, EngineError> {
        let rev: Vec<u8> = a.letters().iter().rev().copied().collect();
        let mut meter = Meter::new(self.steps);
        let mut out = IndexSet::EMPTY;
        for s in 0..self.rank() {
            if self.exchange(&rev, s as u8, &mut meter)?.is_some() {
                out.insert(s);
            }
        }
        Ok(out)
    }

    /// Order of `a` if it is at most `max`.
    pub fn order(&self, a: &Element, max: usize) -> Result<Option<usize>, EngineError> {
        if a.is_identity() {
            return Ok(Some(1));
        }
        let mut meter = Meter::new(self.steps);
        let mut w = Vec::new();
        for k in 1..=max {
            for &s in a.letters() {
                self.push_letter(&mut w, s, &mut meter)?;
            }
            if w.is_empty() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Words obtained from `w` by one braid move.
    fn braid_neighbours(&self, w: &[u8]) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            let (a, b) = (w[i], w[i + 1]);
            if a == b {
                continue;
            }
            let Entry::Finite(m) = self.matrix.m(a as usize, b as usize) else {
                continue;
            };
            let m = m as usize;
            if i + m > w.len() {
                continue;
            }
            let alternates = (0..m).all(|k| w[i + k] == if k % 2 == 0 { a } else { b });
            if alternates {
                let mut v = w.to_vec();
                for k in 0..m {
                    v[i + k] = if k % 2 == 0 { b } else { a };
                }
                out.push(v);
            }
        }
        out
    }

    /// Explore the braid class of `w`. Stops early with the first word
    /// containing two equal adjacent letters, returned as `Err(word)`.
    fn explore_braid_class(&self, w: &[u8], budget: &mut usize) -> Result<Result<BTreeSet<Vec<u8>>, Vec<u8>>, EngineError> {
        let has_square = |v: &[u8]| v.windows(2).any(|p| p[0] == p[1]);
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w.to_vec());
        queue.push_back(w.to_vec());
        while let Some(v) = queue.pop_front() {
            if *budget == 0 {
                return Err(EngineError::BudgetExceeded { budget: self.steps });
            }
            *budget -= 1;
            if has_square(&v) {
                return Ok(Err(v));
            }
            for nb in self.braid_neighbours(&v) {
                if seen.insert(nb.clone()) {
                    queue.push_back(nb);
                }
            }
        }
        Ok(Ok(seen.into_iter().collect()))
    }

    /// All reduced words braid-equivalent to the reduced word `w`.
    ///
    /// `budget` bounds the number of words visited.
    pub fn braid_class(&self, w: &Word, budget: usize) -> Result<BTreeSet<Word>, EngineError> {
        self.check_letters(w.letters())?;
        let mut budget = budget;
        match self.explore_braid_class(w.letters(), &mut budget)? {
            Ok(class) => Ok(class.into_iter().map(Word).collect()),
            Err(_) => Err(EngineError::NotReduced),
        }
    }

    /// Reduction by braid-class search alone: search the class for two equal
    /// adjacent letters, cancel them, and repeat; the result is the ShortLex
    /// least word of the final class. Exponential, used as an oracle.
    pub fn tits_reduce(&self, w: &Word) -> Result<Element, EngineError> {
        self.check_letters(w.letters())?;
        let mut budget = self.steps as usize;
        let mut current = w.letters().to_vec();
        loop {
            match self.explore_braid_class(&current, &mut budget)? {
                Ok(class) => {
                    let least = class
                        .into_iter()
                        .min_by(|a, b| shortlex_cmp(a, b))
                        .expect("braid class contains its seed");
                    return Ok(Element(Word(least)));
                }
                Err(with_square) => {
                    let p = with_square
                        .windows(2)
                        .position(|p| p[0] == p[1])
                        .expect("word flagged as containing a square");
                    current = with_square;
                    current.drain(p..p + 2);
                }
            }
        }
    }

    /// The reflections `r_i = s_1 … s_{i-1} s_i s_{i-1} … s_1` along the
    /// canonical word of `w`.
    pub fn reflections_of(&self, w: &Element) -> Result<Vec<Element>, EngineError> {
        let letters = w.letters();
        (0..letters.len())
            .map(|i| {
                let mut v = letters[..=i].to_vec();
                v.extend(letters[..i].iter().rev());
                self.reduce(&Word(v))
            })
            .collect()
    }

    /// Elements of the next length, given all elements of the current length.
    fn next_sphere(&self, sphere: &[Element]) -> Result<Vec<Element>, EngineError> {
        let mut next: BTreeSet<Element> = BTreeSet::new();
        let mut meter = Meter::new(self.steps);
        for u in sphere {
            for s in 0..self.rank() as u8 {
                if self.exchange(u.letters(), s, &mut meter)?.is_none() {
                    let mut w = u.letters().to_vec();
                    w.push(s);
                    next.insert(self.normal_form(&w, &mut meter)?);
                }
            }
        }
        Ok(next.into_iter().collect())
    }

    /// Breadth-first enumeration from the identity. Returns every element if
    /// there are at most `cap` of them.
    pub fn enumerate_group(&self, cap: usize) -> Result<Enumeration, EngineError> {
        let mut all = vec![Element::identity()];
        let mut sphere = all.clone();
        while !sphere.is_empty() {
            sphere = self.next_sphere(&sphere)?;
            all.extend(sphere.iter().cloned());
            if all.len() > cap {
                return Ok(Enumeration::Infinite(cap));
            }
        }
        Ok(Enumeration::Finite(all))
    }

    /// All elements of length at most `radius`, in ShortLex order.
    pub fn ball(&self, radius: usize) -> Result<Vec<Element>, EngineError> {
        let mut all = vec![Element::identity()];
        let mut sphere = all.clone();
        for _ in 0..radius {
            sphere = self.next_sphere(&sphere)?;
            if sphere.is_empty() {
                break;
            }
            all.extend(sphere.iter().cloned());
        }
        Ok(all)
    }

    /// Search for `g` with `ℓ(g) <= radius` and `g x g⁻¹ = y`.
    pub fn conjugate_search(&self, x: &Element, y: &Element, radius: usize) -> Result<ConjugatorSearch, EngineError> {
        if x == y {
            return Ok(ConjugatorSearch::Found(Element::identity()));
        }
        // The sign character separates odd from even lengths.
        if x.length() % 2 != y.length() % 2 {
            return Ok(ConjugatorSearch::NotFoundWithin(radius));
        }
        let mut sphere = vec![Element::identity()];
        for _ in 0..radius {
            sphere = self.next_sphere(&sphere)?;
            if sphere.is_empty() {
                break;
            }
            for g in &sphere {
                if &self.conjugate(g, x)? == y {
                    return Ok(ConjugatorSearch::Found(g.clone()));
                }
            }
        }
        Ok(ConjugatorSearch::NotFoundWithin(radius))
    }
}
