//! Finite quotients of Coxeter groups and the search for conjugacy-separating
//! homomorphisms.
//!
//! A [`FiniteQuotientHom`] records where each generator goes in an explicit
//! finite image. Images are either finite Coxeter groups held as tables
//! (specializations and retractions) or permutation groups (abelianization
//! and coset actions). Every hom checks all relators of the source
//! presentation when it is built.

pub mod coset;
pub mod perm;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{self, CoxeterMatrix, Entry, IndexSet};
use crate::error::EngineError;
use crate::evenconj::{Retraction, RetractionError};
use crate::finite::FiniteGroup;
use crate::words::{Element, Word};

use coset::{todd_coxeter, CosetEnumeration};
use perm::{conjugate_in, group_order, ImageConjugacy, Perm};

/// Default cap on the order of table-held images.
pub const DEFAULT_IMAGE_CAP: usize = 5_000;
/// Default cap on cosets during enumeration.
pub const DEFAULT_COSET_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("matrix is not even")]
    NotEven,
    #[error("target rank {found} differs from source rank {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("target entry ({}, {}) = {lowered} does not divide {original}", .i + 1, .j + 1)]
    Divisibility { i: usize, j: usize, original: Entry, lowered: Entry },
    #[error("target matrix is not spherical")]
    NotSpherical,
    #[error("image has more than {0} elements")]
    ImageTooLarge(usize),
    #[error("relator for ({}, {}) is not killed in the image", .i + 1, .j + 1)]
    RelatorFails { i: usize, j: usize },
    #[error(transparent)]
    Retraction(#[from] RetractionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// How a quotient was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientKind {
    /// Onto `(Z/2)^k`, one factor per class of generators joined by odd entries.
    Abelianization,
    /// Identity on generators onto the finite Coxeter group of the target.
    Specialization(CoxeterMatrix),
    /// The canonical retraction onto a finite standard parabolic.
    RetractionToFinite(IndexSet),
    /// Retraction onto `W_I` followed by a specialization of `W_I`.
    RetractSpecialize { subset: IndexSet, target: CoxeterMatrix },
    /// Action of the specialization `target` on the cosets of its standard
    /// parabolic `W_J`.
    PermRep { target: CoxeterMatrix, subgroup: IndexSet, index: usize },
}

impl QuotientKind {
    pub fn name(&self) -> &'static str {
        match self {
            QuotientKind::Abelianization => "abelianization",
            QuotientKind::Specialization(_) => "specialization",
            QuotientKind::RetractionToFinite(_) => "retraction",
            QuotientKind::RetractSpecialize { .. } => "retraction+specialization",
            QuotientKind::PermRep { .. } => "coset-action",
        }
    }
}

fn one_line(m: &CoxeterMatrix) -> String {
    m.to_text().lines().skip(1).collect::<Vec<_>>().join(" / ")
}

impl fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientKind::Abelianization => f.write_str("abelianization"),
            QuotientKind::Specialization(t) => write!(f, "specialization [{}]", one_line(t)),
            QuotientKind::RetractionToFinite(i) => write!(f, "retraction onto {i}"),
            QuotientKind::RetractSpecialize { subset, target } => {
                write!(f, "retraction onto {subset} then specialization [{}]", one_line(target))
            }
            QuotientKind::PermRep { target, subgroup, index } => write!(
                f,
                "coset action of [{}] on {index} cosets of {subgroup}",
                one_line(target)
            ),
        }
    }
}

#[derive(Debug, Clone)]
enum Image {
    /// `gens[i]` indexes the image of generator `i` in `group`.
    Table { group: Arc<FiniteGroup>, gens: Vec<usize> },
    Perms { gens: Vec<Perm> },
}

/// An element of a quotient image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageElement {
    /// Index into a table-held finite Coxeter group.
    Table(usize),
    Perm(Perm),
}

/// A homomorphism from `W` onto an explicit finite group.
#[derive(Debug, Clone)]
pub struct FiniteQuotientHom {
    kind: QuotientKind,
    source: CoxeterMatrix,
    image: Image,
    order: usize,
}

/// Image-level verdict on a pair of elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageVerdict {
    Conjugate,
    /// Not conjugate: distinct cycle types.
    CycleType,
    /// Not conjugate: the class of the first image, of this size, misses the second.
    ClassExhausted(usize),
    /// Not conjugate: distinct classes in a table-held image.
    DistinctClasses,
    /// The class closure exceeded its cap.
    Inconclusive,
}

impl ImageVerdict {
    pub fn separates(self) -> bool {
        matches!(
            self,
            ImageVerdict::CycleType | ImageVerdict::ClassExhausted(_) | ImageVerdict::DistinctClasses
        )
    }
}

impl fmt::Display for ImageVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageVerdict::Conjugate => f.write_str("conjugate"),
            ImageVerdict::CycleType => f.write_str("cycle types differ"),
            ImageVerdict::ClassExhausted(k) => write!(f, "class of size {k} exhausted"),
            ImageVerdict::DistinctClasses => f.write_str("distinct conjugacy classes"),
            ImageVerdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

impl FiniteQuotientHom {
    fn build(kind: QuotientKind, source: &CoxeterMatrix, image: Image, order: usize) -> Result<Self, QuotientError> {
        let hom = FiniteQuotientHom {
            kind,
            source: source.clone(),
            image,
            order,
        };
        if let Some((i, j)) = hom.failing_relator() {
            return Err(QuotientError::RelatorFails { i, j });
        }
        Ok(hom)
    }

    pub fn kind(&self) -> &QuotientKind {
        &self.kind
    }

    pub fn source(&self) -> &CoxeterMatrix {
        &self.source
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.source.rank()
    }

    /// First `(i, j)` whose relator `(s_i s_j)^{m_ij}` survives, if any.
    /// Covers all `n²` relators, the diagonal ones included.
    pub fn failing_relator(&self) -> Option<(usize, usize)> {
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                if let Entry::Finite(k) = self.source.m(i, j) {
                    let pair = self.mul(&self.generator_image(i), &self.generator_image(j));
                    let mut acc = self.identity();
                    for _ in 0..k {
                        acc = self.mul(&acc, &pair);
                    }
                    if !self.is_identity(&acc) {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }

    fn identity(&self) -> ImageElement {
        match &self.image {
            Image::Table { .. } => ImageElement::Table(0),
            Image::Perms { gens } => ImageElement::Perm(Perm::identity(gens.first().map_or(0, Perm::degree))),
        }
    }

    fn is_identity(&self, e: &ImageElement) -> bool {
        match e {
            ImageElement::Table(i) => *i == 0,
            ImageElement::Perm(p) => p.is_identity(),
        }
    }

    fn mul(&self, a: &ImageElement, b: &ImageElement) -> ImageElement {
        match (&self.image, a, b) {
            (Image::Table { group, .. }, ImageElement::Table(a), ImageElement::Table(b)) => {
                ImageElement::Table(group.mul(*a, *b))
            }
            (Image::Perms { .. }, ImageElement::Perm(a), ImageElement::Perm(b)) => ImageElement::Perm(a.then(b)),
            _ => panic!("image element from a different quotient"),
        }
    }

    pub fn generator_image(&self, s: usize) -> ImageElement {
        match &self.image {
            Image::Table { gens, .. } => ImageElement::Table(gens[s]),
            Image::Perms { gens } => ImageElement::Perm(gens[s].clone()),
        }
    }

    /// Image of the element spelled by `letters`.
    pub fn image_of_letters(&self, letters: &[u8]) -> ImageElement {
        match &self.image {
            Image::Table { group, gens } => {
                ImageElement::Table(letters.iter().fold(0, |cur, &s| group.mul(cur, gens[s as usize])))
            }
            Image::Perms { gens } => {
                let degree = gens.first().map_or(0, Perm::degree);
                ImageElement::Perm(
                    letters
                        .iter()
                        .fold(Perm::identity(degree), |cur, &s| cur.then(&gens[s as usize])),
                )
            }
        }
    }

    pub fn image(&self, x: &Element) -> ImageElement {
        self.image_of_letters(x.letters())
    }

    /// Conjugacy of two image elements in the image group.
    pub fn image_conjugacy(&self, a: &ImageElement, b: &ImageElement) -> ImageVerdict {
        match (&self.image, a, b) {
            (Image::Table { group, .. }, ImageElement::Table(a), ImageElement::Table(b)) => {
                if group.is_conjugate(*a, *b) {
                    ImageVerdict::Conjugate
                } else {
                    ImageVerdict::DistinctClasses
                }
            }
            (Image::Perms { gens }, ImageElement::Perm(a), ImageElement::Perm(b)) => {
                match conjugate_in(gens, a, b, self.order) {
                    ImageConjugacy::Conjugate => ImageVerdict::Conjugate,
                    ImageConjugacy::CycleType => ImageVerdict::CycleType,
                    ImageConjugacy::ClassExhausted(k) => ImageVerdict::ClassExhausted(k),
                    ImageConjugacy::TooLarge => ImageVerdict::Inconclusive,
                }
            }
            _ => panic!("image element from a different quotient"),
        }
    }

    /// Re-check non-conjugacy of two image elements by brute force over the
    /// whole image: no `g` satisfies `g a g⁻¹ = b`.
    pub fn brute_force_separates(&self, a: &ImageElement, b: &ImageElement) -> bool {
        match (&self.image, a, b) {
            (Image::Table { group, .. }, ImageElement::Table(a), ImageElement::Table(b)) => {
                (0..group.order()).all(|g| group.conj(g, *a) != *b)
            }
            (Image::Perms { gens }, ImageElement::Perm(a), ImageElement::Perm(b)) => {
                let degree = gens.first().map_or(0, Perm::degree);
                let id = Perm::identity(degree);
                let mut seen = std::collections::HashSet::from([id.clone()]);
                let mut stack = vec![id];
                while let Some(g) = stack.pop() {
                    if a.conjugate_by(&g) == *b {
                        return false;
                    }
                    for s in gens {
                        let h = g.then(s);
                        if seen.insert(h.clone()) {
                            stack.push(h);
                        }
                    }
                }
                true
            }
            _ => false,
        }
    }

    pub fn format_image(&self, e: &ImageElement) -> String {
        match (&self.image, e) {
            (Image::Table { group, .. }, ImageElement::Table(i)) => group.element(*i).to_string(),
            (_, ImageElement::Perm(p)) => p.to_string(),
            _ => "?".into(),
        }
    }

    /// `i -> image` for every generator.
    pub fn generator_table(&self) -> Vec<String> {
        (0..self.rank())
            .map(|s| format!("{} -> {}", s + 1, self.format_image(&self.generator_image(s))))
            .collect()
    }
}

fn check_rank(m: &CoxeterMatrix, target: &CoxeterMatrix) -> Result<(), QuotientError> {
    if m.rank() != target.rank() {
        return Err(QuotientError::RankMismatch {
            expected: m.rank(),
            found: target.rank(),
        });
    }
    Ok(())
}

/// Whether `target` is obtained from `m` by lowering entries within
/// divisibility: every target entry is finite and divides the source entry
/// when that is finite.
pub fn check_divisibility(m: &CoxeterMatrix, target: &CoxeterMatrix) -> Result<(), QuotientError> {
    check_rank(m, target)?;
    for i in 0..m.rank() {
        for j in i + 1..m.rank() {
            let (a, b) = (m.m(i, j), target.m(i, j));
            let ok = match (a, b) {
                (_, Entry::Infinity) => false,
                (Entry::Infinity, Entry::Finite(_)) => true,
                (Entry::Finite(a), Entry::Finite(b)) => a % b == 0,
            };
            if !ok {
                return Err(QuotientError::Divisibility {
                    i,
                    j,
                    original: a,
                    lowered: b,
                });
            }
        }
    }
    Ok(())
}

fn enumerate_target(target: &CoxeterMatrix, cap: usize) -> Result<Arc<FiniteGroup>, QuotientError> {
    if !diagram::classify(target).is_spherical() {
        return Err(QuotientError::NotSpherical);
    }
    match FiniteGroup::from_matrix(target, cap)? {
        Some(g) => Ok(Arc::new(g)),
        None => Err(QuotientError::ImageTooLarge(cap)),
    }
}

/// The quotient map `W(m) -> W(target)` that is the identity on generators.
pub fn specialize(m: &CoxeterMatrix, target: &CoxeterMatrix, cap: usize) -> Result<FiniteQuotientHom, QuotientError> {
    check_divisibility(m, target)?;
    let group = enumerate_target(target, cap)?;
    let gens = (0..m.rank()).map(|s| group.generator(s)).collect();
    let order = group.order();
    FiniteQuotientHom::build(
        QuotientKind::Specialization(target.clone()),
        m,
        Image::Table { group, gens },
        order,
    )
}

/// `W` onto itself, for a finite `W` already held as a table.
pub fn regular_quotient(group: Arc<FiniteGroup>) -> FiniteQuotientHom {
    let m = group.group().matrix().clone();
    let gens = (0..m.rank()).map(|s| group.generator(s)).collect();
    let order = group.order();
    FiniteQuotientHom::build(QuotientKind::Specialization(m.clone()), &m, Image::Table { group, gens }, order)
        .expect("relators hold in the group itself")
}

/// Classes of generators forced equal in the abelianization: the components
/// of the graph joining `s, t` whenever `m_st` is odd.
pub fn odd_classes(m: &CoxeterMatrix) -> Vec<usize> {
    let n = m.rank();
    let mut class: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if matches!(m.m(i, j), Entry::Finite(k) if k % 2 == 1) && class[j] > class[i] {
                    class[j] = class[i];
                    changed = true;
                }
            }
        }
    }
    // renumber to 0..k
    let mut seen: Vec<usize> = Vec::new();
    class
        .iter()
        .map(|c| match seen.iter().position(|x| x == c) {
            Some(p) => p,
            None => {
                seen.push(*c);
                seen.len() - 1
            }
        })
        .collect()
}

/// The abelianization `W -> (Z/2)^k`, acting on `2k` points.
pub fn abelianize(m: &CoxeterMatrix) -> Result<FiniteQuotientHom, QuotientError> {
    let class = odd_classes(m);
    let k = class.iter().map(|c| c + 1).max().unwrap_or(0);
    let gens = class
        .iter()
        .map(|&c| {
            let mut images: Vec<u32> = (0..2 * k as u32).collect();
            images.swap(2 * c, 2 * c + 1);
            Perm::from_images(images).expect("a transposition")
        })
        .collect();
    let order = 1usize.checked_shl(k as u32).unwrap_or(usize::MAX);
    FiniteQuotientHom::build(QuotientKind::Abelianization, m, Image::Perms { gens }, order)
}

/// The abelianization of an even group onto `(Z/2)^n`, `s_i` flipping coordinate `i`.
pub fn abelianize_even(m: &CoxeterMatrix) -> Result<FiniteQuotientHom, QuotientError> {
    if !m.is_even() {
        return Err(QuotientError::NotEven);
    }
    abelianize(m)
}

/// The canonical retraction onto a finite standard parabolic `W_I`.
pub fn retraction_quotient(m: &CoxeterMatrix, subset: IndexSet, cap: usize) -> Result<FiniteQuotientHom, QuotientError> {
    let (restricted, _) = m.restrict(subset);
    retract_then(m, subset, &restricted, cap, QuotientKind::RetractionToFinite(subset))
}

/// Retraction onto `W_I` followed by the specialization of `W_I` to `target`,
/// a matrix on `I` in increasing index order.
pub fn retract_specialize(
    m: &CoxeterMatrix,
    subset: IndexSet,
    target: &CoxeterMatrix,
    cap: usize,
) -> Result<FiniteQuotientHom, QuotientError> {
    let (restricted, _) = m.restrict(subset);
    check_divisibility(&restricted, target)?;
    let kind = QuotientKind::RetractSpecialize {
        subset,
        target: target.clone(),
    };
    retract_then(m, subset, target, cap, kind)
}

fn retract_then(
    m: &CoxeterMatrix,
    subset: IndexSet,
    target: &CoxeterMatrix,
    cap: usize,
    kind: QuotientKind,
) -> Result<FiniteQuotientHom, QuotientError> {
    Retraction::new(m, subset)?;
    let group = enumerate_target(target, cap)?;
    let positions: Vec<usize> = subset.iter().collect();
    let gens = (0..m.rank())
        .map(|s| match positions.iter().position(|&p| p == s) {
            Some(k) => group.generator(k),
            None => 0,
        })
        .collect();
    let order = group.order();
    FiniteQuotientHom::build(kind, m, Image::Table { group, gens }, order)
}

/// The action of the spherical specialization `target` on the cosets of its
/// standard parabolic `W_J`, found by coset enumeration.
pub fn coset_action(
    m: &CoxeterMatrix,
    target: &CoxeterMatrix,
    subgroup: IndexSet,
    coset_cap: usize,
    image_cap: usize,
) -> Result<FiniteQuotientHom, QuotientError> {
    check_divisibility(m, target)?;
    let gens: Vec<Word> = subgroup.iter().map(|s| Word::from_indices(&[s])).collect();
    let table = match todd_coxeter(target, &gens, coset_cap) {
        CosetEnumeration::Complete(t) => t,
        CosetEnumeration::CapExceeded(c) => return Err(QuotientError::ImageTooLarge(c)),
    };
    let perms = table.actions().to_vec();
    let order = group_order(&perms, table.index(), image_cap).ok_or(QuotientError::ImageTooLarge(image_cap))?;
    let kind = QuotientKind::PermRep {
        target: target.clone(),
        subgroup,
        index: table.index(),
    };
    FiniteQuotientHom::build(kind, m, Image::Perms { gens: perms }, order)
}

/// Spherical matrices obtained from `m` by lowering entries within
/// divisibility. Infinite entries are replaced by values in `2..=6`.
/// Candidates are generated in order of how many entries leave their base
/// value (the entry itself, or 2 for infinity), at most `limit` are returned,
/// sorted by group order.
pub fn specialization_targets(m: &CoxeterMatrix, limit: usize) -> Vec<(CoxeterMatrix, u128)> {
    let n = m.rank();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let options: Vec<Vec<u32>> = pairs
        .iter()
        .map(|&(i, j)| match m.m(i, j) {
            Entry::Finite(v) => {
                let mut d: Vec<u32> = (2..=v).filter(|d| v % d == 0).collect();
                // base value first
                d.sort_by_key(|&x| (x != v, x));
                d
            }
            Entry::Infinity => vec![2, 3, 4, 5, 6],
        })
        .collect();
    let mut found: Vec<(CoxeterMatrix, u128)> = Vec::new();
    let mut examined = 0usize;
    let budget = limit.saturating_mul(50).max(1000);
    let deviating: Vec<usize> = (0..pairs.len()).filter(|&p| options[p].len() > 1).collect();
    'outer: for k in 0..=deviating.len() {
        for chosen in combinations(deviating.len(), k) {
            // every chosen pair takes a non-base option
            let mut choice = vec![0usize; pairs.len()];
            let mut stack: Vec<usize> = vec![1; k];
            loop {
                for (slot, &c) in chosen.iter().enumerate() {
                    choice[deviating[c]] = stack[slot];
                }
                let values: Vec<u32> = (0..pairs.len()).map(|p| options[p][choice[p]]).collect();
                let target = CoxeterMatrix::from_fn(n, |i, j| {
                    if i == j {
                        return Entry::Finite(1);
                    }
                    let (a, b) = (i.min(j), i.max(j));
                    let p = pairs.iter().position(|&q| q == (a, b)).expect("pair index");
                    Entry::Finite(values[p])
                });
                examined += 1;
                if let Some(order) = diagram::spherical_order(&target, target.full_set()) {
                    found.push((target, order));
                    if found.len() >= limit {
                        break 'outer;
                    }
                }
                if examined >= budget {
                    break 'outer;
                }
                // odometer over non-base options
                let mut slot = 0;
                loop {
                    if slot == k {
                        break;
                    }
                    let p = deviating[chosen[slot]];
                    if stack[slot] + 1 < options[p].len() {
                        stack[slot] += 1;
                        break;
                    }
                    stack[slot] = 1;
                    slot += 1;
                }
                if slot == k {
                    break;
                }
            }
        }
    }
    found.sort_by_key(|(_, o)| *o);
    found
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The stages of a separation search, in the order they run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Abelianization,
    Retractions,
    CosetActions,
    Specializations,
    Compositions,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Abelianization,
        Stage::Retractions,
        Stage::CosetActions,
        Stage::Specializations,
        Stage::Compositions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Abelianization => "abelian",
            Stage::Retractions => "retract",
            Stage::CosetActions => "coset",
            Stage::Specializations => "special",
            Stage::Compositions => "compose",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown plan stage `{s}` (expected abelian, retract, coset, special or compose)"))
    }
}

/// Which quotient families to try and how large they may get.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPlan {
    pub stages: Vec<Stage>,
    /// Cap on the order of any image.
    pub image_cap: usize,
    pub coset_cap: usize,
    /// Number of specialization targets drawn from the generator.
    pub specializations: usize,
}

impl Default for SearchPlan {
    fn default() -> Self {
        SearchPlan {
            stages: Stage::ALL.to_vec(),
            image_cap: DEFAULT_IMAGE_CAP,
            coset_cap: DEFAULT_COSET_CAP,
            specializations: 24,
        }
    }
}

impl SearchPlan {
    /// Parse a comma-separated list of stage names.
    pub fn with_stages(mut self, text: &str) -> Result<Self, String> {
        self.stages = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        Ok(self)
    }

    pub fn describe(&self) -> String {
        self.stages.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")
    }
}

/// A verified separation: the images of `x` and `y` are not conjugate.
#[derive(Debug, Clone)]
pub struct SeparationWitness {
    pub hom: FiniteQuotientHom,
    pub x_img: ImageElement,
    pub y_img: ImageElement,
    pub verdict: ImageVerdict,
}

impl SeparationWitness {
    /// Recompute everything from scratch: relators, images of `x` and `y`,
    /// and non-conjugacy by brute force over the image.
    pub fn verify(&self, m: &CoxeterMatrix, x: &Element, y: &Element) -> bool {
        self.hom.source() == m
            && self.hom.failing_relator().is_none()
            && self.hom.image(x) == self.x_img
            && self.hom.image(y) == self.y_img
            && self.hom.brute_force_separates(&self.x_img, &self.y_img)
    }

    pub fn to_text(&self) -> String {
        let mut out = vec![
            format!("quotient: {}", self.hom.kind()),
            format!("image_order: {}", self.hom.order()),
        ];
        for line in self.hom.generator_table() {
            out.push(format!("generator_image: {line}"));
        }
        out.push(format!("x_image: {}", self.hom.format_image(&self.x_img)));
        out.push(format!("y_image: {}", self.hom.format_image(&self.y_img)));
        out.push(format!("image_verdict: {}", self.verdict));
        out.join("\n")
    }
}

/// One line of a search transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub quotient: String,
    pub verdict: ImageVerdict,
}

#[derive(Debug, Clone)]
pub enum SeparationResult {
    Witness(Box<SeparationWitness>),
    NotFound { tried: usize },
}

/// Candidate quotients of one group, built once and reused across queries.
#[derive(Debug, Clone)]
pub struct Separator {
    matrix: CoxeterMatrix,
    plan: SearchPlan,
    homs: Vec<FiniteQuotientHom>,
}

impl Separator {
    pub fn new(m: &CoxeterMatrix, plan: &SearchPlan) -> Separator {
        let mut homs = Vec::new();
        let targets = if plan
            .stages
            .iter()
            .any(|s| matches!(s, Stage::CosetActions | Stage::Specializations))
        {
            specialization_targets(m, plan.specializations)
        } else {
            Vec::new()
        };
        for stage in &plan.stages {
            match stage {
                Stage::Abelianization => homs.extend(abelianize(m).ok()),
                Stage::Retractions => {
                    for subset in m.full_set().subsets() {
                        if subset.is_empty() || subset == m.full_set() {
                            continue;
                        }
                        if diagram::spherical_order(m, subset).is_some_and(|o| o <= plan.image_cap as u128) {
                            homs.extend(retraction_quotient(m, subset, plan.image_cap).ok());
                        }
                    }
                }
                Stage::CosetActions => {
                    for (target, _) in &targets {
                        for s in 0..m.rank() {
                            let j = target.full_set().without(s);
                            homs.extend(coset_action(m, target, j, plan.coset_cap, plan.image_cap).ok());
                        }
                    }
                }
                Stage::Specializations => {
                    for (target, order) in &targets {
                        if *order <= plan.image_cap as u128 {
                            homs.extend(specialize(m, target, plan.image_cap).ok());
                        }
                    }
                }
                Stage::Compositions => {
                    for subset in m.full_set().subsets() {
                        if subset.len() < 2 || subset == m.full_set() || Retraction::new(m, subset).is_err() {
                            continue;
                        }
                        let (restricted, _) = m.restrict(subset);
                        if diagram::classify(&restricted).is_spherical() {
                            continue;
                        }
                        for (target, order) in specialization_targets(&restricted, plan.specializations / 2 + 1) {
                            if order <= plan.image_cap as u128 {
                                homs.extend(retract_specialize(m, subset, &target, plan.image_cap).ok());
                            }
                        }
                    }
                }
            }
        }
        Separator {
            matrix: m.clone(),
            plan: plan.clone(),
            homs,
        }
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn plan(&self) -> &SearchPlan {
        &self.plan
    }

    pub fn candidates(&self) -> &[FiniteQuotientHom] {
        &self.homs
    }

    /// First quotient in plan order separating `x` from `y`, with the
    /// transcript of every quotient tried.
    pub fn separate_with_transcript(&self, x: &Element, y: &Element) -> (SeparationResult, Vec<TranscriptEntry>) {
        let mut transcript = Vec::new();
        for hom in &self.homs {
            let (a, b) = (hom.image(x), hom.image(y));
            let verdict = hom.image_conjugacy(&a, &b);
            transcript.push(TranscriptEntry {
                quotient: hom.kind().to_string(),
                verdict,
            });
            if verdict.separates() {
                let witness = SeparationWitness {
                    hom: hom.clone(),
                    x_img: a,
                    y_img: b,
                    verdict,
                };
                return (SeparationResult::Witness(Box::new(witness)), transcript);
            }
        }
        let tried = transcript.len();
        (SeparationResult::NotFound { tried }, transcript)
    }

    pub fn separate(&self, x: &Element, y: &Element) -> SeparationResult {
        self.separate_with_transcript(x, y).0
    }
}

/// One-shot separation search.
pub fn separate(m: &CoxeterMatrix, x: &Element, y: &Element, plan: &SearchPlan) -> SeparationResult {
    Separator::new(m, plan).separate(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::CoxeterGroup;

    fn fin(v: u32) -> Entry {
        Entry::Finite(v)
    }

    fn right_angled() -> CoxeterMatrix {
        CoxeterMatrix::from_edges(3, &[(0, 1, fin(2)), (0, 2, Entry::Infinity), (1, 2, Entry::Infinity)])
    }

    fn el(g: &CoxeterGroup, letters: &[usize]) -> Element {
        g.element(letters).unwrap()
    }

    #[test]
    fn specialization_examples() {
        let b2 = CoxeterMatrix::dihedral(fin(4));
        let iso = specialize(&b2, &b2, 100).unwrap();
        assert_eq!(iso.order(), 8);
        let lowered = specialize(&b2, &CoxeterMatrix::dihedral(fin(2)), 100).unwrap();
        assert_eq!(lowered.order(), 4);
        assert!(matches!(
            specialize(&b2, &CoxeterMatrix::dihedral(fin(3)), 100),
            Err(QuotientError::Divisibility { .. })
        ));
        let ra = right_angled();
        let commuting = CoxeterMatrix::from_fn(3, |i, j| fin(if i == j { 1 } else { 2 }));
        assert_eq!(specialize(&ra, &commuting, 100).unwrap().order(), 8);
        let free = CoxeterMatrix::dihedral(Entry::Infinity);
        assert_eq!(
            specialize(&free, &free, 100).unwrap_err(),
            QuotientError::Divisibility {
                i: 0,
                j: 1,
                original: Entry::Infinity,
                lowered: Entry::Infinity
            }
        );
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(abelianize_even(&right_angled()).unwrap().order(), 8);
        let b2 = CoxeterMatrix::dihedral(fin(4));
        assert_eq!(abelianize_even(&b2).unwrap().order(), 4);
        assert_eq!(
            abelianize_even(&CoxeterMatrix::dihedral(fin(3))).unwrap_err(),
            QuotientError::NotEven
        );
        // odd entries merge generators
        assert_eq!(abelianize(&CoxeterMatrix::dihedral(fin(3))).unwrap().order(), 2);
    }

    #[test]
    fn witnesses_in_right_angled_group() {
        let m = right_angled();
        let g = CoxeterGroup::new(m.clone());
        let sep = Separator::new(&m, &SearchPlan::default());
        for (x, y) in [(el(&g, &[0]), el(&g, &[2])), (el(&g, &[0, 1]), el(&g, &[2]))] {
            match sep.separate(&x, &y) {
                SeparationResult::Witness(w) => {
                    assert!(w.verify(&m, &x, &y));
                    assert_eq!(w.hom.kind(), &QuotientKind::Abelianization);
                }
                SeparationResult::NotFound { .. } => panic!("expected a witness"),
            }
        }
    }

    #[test]
    fn conjugate_pair_is_never_separated() {
        let m = CoxeterMatrix::from_edges(3, &[(0, 1, fin(4)), (0, 2, Entry::Infinity), (1, 2, fin(2))]);
        let g = CoxeterGroup::new(m.clone());
        let x = el(&g, &[1]);
        let y = el(&g, &[0, 1, 0]);
        assert!(matches!(separate(&m, &x, &y, &SearchPlan::default()), SeparationResult::NotFound { .. }));
    }

    #[test]
    fn retraction_quotient_separates_generators_of_b2_factor() {
        // B2 x A1: s1 and s3 have equal parity but different retraction images
        let m = CoxeterMatrix::from_edges(3, &[(0, 1, fin(4))]);
        let hom = retraction_quotient(&m, IndexSet::from_bits(0b011), 100).unwrap();
        assert_eq!(hom.order(), 8);
        let g = CoxeterGroup::new(m.clone());
        let (a, b) = (hom.image(&el(&g, &[0])), hom.image(&el(&g, &[2])));
        assert!(hom.image_conjugacy(&a, &b).separates());
        assert!(hom.brute_force_separates(&a, &b));
    }

    #[test]
    fn odd_retraction_is_rejected() {
        let a2 = CoxeterMatrix::from_edges(3, &[(0, 1, fin(3))]);
        assert!(matches!(
            retraction_quotient(&a2, IndexSet::singleton(0), 100),
            Err(QuotientError::Retraction(_))
        ));
    }

    #[test]
    fn coset_action_of_dihedral_group() {
        let b2 = CoxeterMatrix::dihedral(fin(4));
        let hom = coset_action(&b2, &b2, IndexSet::singleton(0), 100, 100).unwrap();
        assert_eq!(hom.order(), 8);
        assert!(matches!(hom.kind(), QuotientKind::PermRep { index: 4, .. }));
    }

    #[test]
    fn specialization_targets_are_spherical_and_sorted() {
        let m = right_angled();
        let targets = specialization_targets(&m, 10);
        assert!(!targets.is_empty());
        assert_eq!(targets[0].1, 8);
        for pair in targets.windows(2) {
            assert!(pair[0].1 <= pair[1].1);
        }
        for (t, _) in &targets {
            assert!(check_divisibility(&m, t).is_ok());
        }
    }

    #[test]
    fn plan_parsing() {
        let plan = SearchPlan::default().with_stages("abelian,coset").unwrap();
        assert_eq!(plan.stages, vec![Stage::Abelianization, Stage::CosetActions]);
        assert!(SearchPlan::default().with_stages("bogus").is_err());
        assert_eq!(SearchPlan::default().describe(), "abelian,retract,coset,special,compose");
    }
}
