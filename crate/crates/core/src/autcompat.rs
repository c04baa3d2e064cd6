//! Automorphisms and the compatibility relations between Coxeter generating
//! sets: reflection-, angle- and parabolic-compatibility, inner-by-graph and
//! inner decisions, and the small-words pointwise-inner test.
//!
//! Finite groups are handled exactly through their multiplication tables.
//! In infinite groups witnesses come from bounded searches, and a negative
//! answer is only given together with a finite obstruction that the word
//! engine can re-check.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{self, CoxeterMatrix, Entry, IndexSet};
use crate::error::{EngineError, ParseError};
use crate::evenconj::{ConjConfig, ConjDecision, ConjError, EvenConjugacy, NonConjugacyCertificate};
use crate::finite::{ElementSet, FiniteGroup, DEFAULT_FINITE_CAP};
use crate::parabolic::{Essential, EssentialCertificate, ParabolicCatalog, ParabolicEngine};
use crate::quotients::{SearchPlan, SeparationResult, Separator};
use crate::words::{ConjugatorSearch, CoxeterGroup, Element, Word};

/// Rank cap for the small-words enumeration, which is factorial in the rank.
pub const SMALLWORDS_MAX_RANK: usize = 6;

/// Default radius for compatibility witness searches.
pub const DEFAULT_COMPAT_RADIUS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("not an automorphism: {0}")]
    NotAutomorphism(InvalidReason),
    #[error("invalid generating set: {0}")]
    InvalidGeneratingSet(String),
    #[error("matrix is not crystallographic")]
    NotCrystallographic,
    #[error("rank {0} exceeds the small-words cap of {SMALLWORDS_MAX_RANK}")]
    RankTooLarge(usize),
    #[error("inconsistent result: {0}")]
    Contradiction(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl From<ConjError> for AutError {
    fn from(e: ConjError) -> Self {
        match e {
            ConjError::Engine(e) => AutError::Engine(e),
            other => AutError::Contradiction(other.to_string()),
        }
    }
}

/// An automorphism given by the images of the generators and of its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSpec {
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

impl AutomorphismSpec {
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Self {
        AutomorphismSpec { images, inverse_images }
    }

    pub fn identity(rank: usize) -> Self {
        let gens: Vec<Word> = (0..rank).map(|i| Word::from_indices(&[i])).collect();
        AutomorphismSpec::new(gens.clone(), gens)
    }

    /// The inner automorphism `x ↦ g x g⁻¹`.
    pub fn inner(group: &CoxeterGroup, g: &Element) -> Result<Self, EngineError> {
        let g_inv = group.invert(g)?;
        let mut images = Vec::new();
        let mut inverse = Vec::new();
        for s in group.generators() {
            images.push(group.conjugate(g, &s)?.word().clone());
            inverse.push(group.conjugate(&g_inv, &s)?.word().clone());
        }
        Ok(AutomorphismSpec::new(images, inverse))
    }

    /// The diagram automorphism `s_i ↦ s_{perm[i]}`.
    pub fn graph(perm: &[usize]) -> Self {
        let mut inverse = vec![Word::empty(); perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = Word::from_indices(&[i]);
        }
        let images = perm.iter().map(|&p| Word::from_indices(&[p])).collect();
        AutomorphismSpec::new(images, inverse)
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn inverse(&self) -> Self {
        AutomorphismSpec::new(self.inverse_images.clone(), self.images.clone())
    }

    pub fn apply(&self, group: &CoxeterGroup, x: &Element) -> Result<Element, EngineError> {
        substitute(group, &self.images, x)
    }

    pub fn apply_inverse(&self, group: &CoxeterGroup, x: &Element) -> Result<Element, EngineError> {
        substitute(group, &self.inverse_images, x)
    }

    /// Parse `i -> word` lines: one per generator for `α`, a blank line,
    /// then one per generator for `α⁻¹`. Lines starting with `#` are ignored.
    pub fn parse(text: &str, rank: usize) -> Result<Self, ParseError> {
        let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if !blocks.last().is_some_and(Vec::is_empty) {
                    blocks.push(Vec::new());
                }
                continue;
            }
            blocks.last_mut().expect("at least one block").push((k + 1, line));
        }
        blocks.retain(|b| !b.is_empty());
        match blocks.len() {
            0 => return Err(ParseError::Empty),
            2 => {}
            n => {
                return Err(ParseError::Other(format!(
                    "expected two blocks (images, inverse images) separated by a blank line, found {n}"
                )))
            }
        }
        let images = parse_block(&blocks[0], rank)?;
        let inverse = parse_block(&blocks[1], rank)?;
        Ok(AutomorphismSpec::new(images, inverse))
    }

    pub fn to_text(&self) -> String {
        let block = |ws: &[Word]| -> String {
            ws.iter()
                .enumerate()
                .map(|(i, w)| format!("{} -> {}\n", i + 1, w))
                .collect()
        };
        format!("{}\n{}", block(&self.images), block(&self.inverse_images))
    }
}

fn parse_block(lines: &[(usize, &str)], rank: usize) -> Result<Vec<Word>, ParseError> {
    let mut out: Vec<Option<Word>> = vec![None; rank];
    for &(line, text) in lines {
        let bad = |message: String| ParseError::Line { line, message };
        let (lhs, rhs) = text
            .split_once("->")
            .ok_or_else(|| bad("expected `i -> word`".into()))?;
        let i: usize = lhs
            .trim()
            .parse()
            .map_err(|_| bad(format!("malformed generator `{}`", lhs.trim())))?;
        if i == 0 || i > rank {
            return Err(bad(format!("generator {i} out of range for rank {rank}")));
        }
        if out[i - 1].is_some() {
            return Err(bad(format!("generator {i} given twice")));
        }
        let w = Word::parse(rhs, rank).map_err(|e| bad(e.to_string()))?;
        out[i - 1] = Some(w);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, w)| {
            w.ok_or_else(|| ParseError::Other(format!("no image given for generator {}", i + 1)))
        })
        .collect()
}

/// The element obtained by replacing each letter `s_i` of `x` by `words[i]`.
fn substitute(group: &CoxeterGroup, words: &[Word], x: &Element) -> Result<Element, EngineError> {
    let mut letters = Vec::new();
    for &l in x.letters() {
        letters.extend_from_slice(words[l as usize].letters());
    }
    group.reduce(&Word::new(letters))
}

/// Why a specification is not an automorphism (generators 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    Rank { expected: usize, found: usize },
    /// `(φ(s_i) φ(s_j))^{m_ij} ≠ 1` for `φ = α`, or `α⁻¹` when `inverse`.
    Relator { i: usize, j: usize, inverse: bool },
    /// `α(α⁻¹(s_i)) ≠ s_i` when `forward`, else `α⁻¹(α(s_i)) ≠ s_i`.
    NotInverse { i: usize, forward: bool },
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::Rank { expected, found } => {
                write!(f, "{found} images given for rank {expected}")
            }
            InvalidReason::Relator { i, j, inverse } => write!(
                f,
                "relator ({i},{j}) fails for the {}",
                if *inverse { "inverse map" } else { "map" }
            ),
            InvalidReason::NotInverse { i, forward } => {
                if *forward {
                    write!(f, "α(α⁻¹(s{i})) ≠ s{i}")
                } else {
                    write!(f, "α⁻¹(α(s{i})) ≠ s{i}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutVerdict {
    Verified,
    Invalid(InvalidReason),
}

fn relators_hold(group: &CoxeterGroup, elems: &[Element]) -> Result<Option<(usize, usize)>, EngineError> {
    let m = group.matrix();
    for i in 0..elems.len() {
        for j in i..elems.len() {
            if let Entry::Finite(k) = m.m(i, j) {
                let p = group.multiply(&elems[i], &elems[j])?;
                if !group.power(&p, k as usize)?.is_identity() {
                    return Ok(Some((i, j)));
                }
            }
        }
    }
    Ok(None)
}

/// Check that `α` and `α⁻¹` respect every relator and are mutually inverse
/// on the generators, which makes both of them automorphisms.
pub fn verify_automorphism(group: &CoxeterGroup, spec: &AutomorphismSpec) -> Result<AutVerdict, EngineError> {
    let n = group.rank();
    for found in [spec.images.len(), spec.inverse_images.len()] {
        if found != n {
            return Ok(AutVerdict::Invalid(InvalidReason::Rank { expected: n, found }));
        }
    }
    let reduce_all = |ws: &[Word]| -> Result<Vec<Element>, EngineError> {
        ws.iter().map(|w| group.reduce(w)).collect()
    };
    let a = reduce_all(&spec.images)?;
    let b = reduce_all(&spec.inverse_images)?;
    for (elems, inverse) in [(&a, false), (&b, true)] {
        if let Some((i, j)) = relators_hold(group, elems)? {
            return Ok(AutVerdict::Invalid(InvalidReason::Relator {
                i: i + 1,
                j: j + 1,
                inverse,
            }));
        }
    }
    for i in 0..n {
        let s = group.generator(i);
        if spec.apply(group, &b[i])? != s {
            return Ok(AutVerdict::Invalid(InvalidReason::NotInverse { i: i + 1, forward: true }));
        }
        if spec.apply_inverse(group, &a[i])? != s {
            return Ok(AutVerdict::Invalid(InvalidReason::NotInverse { i: i + 1, forward: false }));
        }
    }
    Ok(AutVerdict::Verified)
}

fn require_automorphism(group: &CoxeterGroup, spec: &AutomorphismSpec) -> Result<(), AutError> {
    match verify_automorphism(group, spec)? {
        AutVerdict::Verified => Ok(()),
        AutVerdict::Invalid(r) => Err(AutError::NotAutomorphism(r)),
    }
}

/// Where a generating set comes from. Membership in its standard parabolic
/// subgroups is decidable exactly for the first two kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetOrigin {
    /// The standard generators.
    Standard,
    /// `α(S)`; `z ∈ ⟨α(s_j) : j ∈ J⟩` iff `supp(α⁻¹(z)) ⊆ J`.
    Image(AutomorphismSpec),
    Arbitrary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    pub elements: Vec<Element>,
    pub origin: SetOrigin,
}

impl GeneratingSet {
    pub fn standard(group: &CoxeterGroup) -> Self {
        GeneratingSet {
            elements: group.generators(),
            origin: SetOrigin::Standard,
        }
    }

    pub fn image(group: &CoxeterGroup, spec: &AutomorphismSpec) -> Result<Self, EngineError> {
        let elements = spec
            .images()
            .iter()
            .map(|w| group.reduce(w))
            .collect::<Result<_, _>>()?;
        Ok(GeneratingSet {
            elements,
            origin: SetOrigin::Image(spec.clone()),
        })
    }

    /// An arbitrary list, recognised as standard when it is exactly `S`.
    pub fn arbitrary(group: &CoxeterGroup, elements: Vec<Element>) -> Self {
        let origin = if elements == group.generators() {
            SetOrigin::Standard
        } else {
            SetOrigin::Arbitrary
        };
        GeneratingSet { elements, origin }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The image of `z` under the isomorphism sending this set to `S`, when
    /// it is known.
    fn coordinates(&self, group: &CoxeterGroup, z: &Element) -> Result<Option<Element>, EngineError> {
        Ok(match &self.origin {
            SetOrigin::Standard => Some(z.clone()),
            SetOrigin::Image(spec) => Some(spec.apply_inverse(group, z)?),
            SetOrigin::Arbitrary => None,
        })
    }

    /// The smallest `J` with `z ∈ ⟨X_J⟩`, when decidable.
    fn support_of(&self, group: &CoxeterGroup, z: &Element) -> Result<Option<IndexSet>, EngineError> {
        Ok(self.coordinates(group, z)?.map(|c| c.support()))
    }
}

/// How elements of the two sets may be matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Matching {
    /// The definitions as stated: targets range over all of `S2`.
    #[default]
    Set,
    /// The `i`-th element of `S1` may only be matched with the `i`-th of `S2`.
    Indexed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSetPair {
    pub s1: GeneratingSet,
    pub s2: GeneratingSet,
    pub matching: Matching,
}

impl GeneratingSetPair {
    pub fn new(s1: GeneratingSet, s2: GeneratingSet) -> Self {
        GeneratingSetPair {
            s1,
            s2,
            matching: Matching::Set,
        }
    }

    /// `S1 = S`, `S2 = α(S)`.
    pub fn automorphism(group: &CoxeterGroup, spec: &AutomorphismSpec) -> Result<Self, EngineError> {
        Ok(GeneratingSetPair::new(GeneratingSet::standard(group), GeneratingSet::image(group, spec)?))
    }

    pub fn indexed(mut self) -> Self {
        self.matching = Matching::Indexed;
        self
    }

    fn targets(&self, i: usize) -> Vec<usize> {
        match self.matching {
            Matching::Indexed => (i < self.s2.len()).then_some(i).into_iter().collect(),
            Matching::Set => {
                let mut t: Vec<usize> = (0..self.s2.len()).filter(|&k| k != i).collect();
                if i < self.s2.len() {
                    t.insert(0, i);
                }
                t
            }
        }
    }
}

/// `w s1[generator] w⁻¹ = s2[target]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionWitness {
    pub generator: usize,
    pub target: usize,
    pub conjugator: Element,
}

/// `w s1[i] w⁻¹ = s2[k]` and `w s1[j] w⁻¹ = s2[l]` for `pair = (i, j)`,
/// `targets = (k, l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleWitness {
    pub pair: (usize, usize),
    pub targets: (usize, usize),
    pub conjugator: Element,
}

/// `w ⟨S1_{j1}⟩ w⁻¹ = ⟨S2_{j2}⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicWitness {
    pub j1: IndexSet,
    pub j2: IndexSet,
    pub conjugator: Element,
}

#[derive(Debug, Clone)]
pub struct ReflectionFailure {
    pub generator: usize,
    /// One certificate per candidate target; empty when decided by
    /// exhausting a finite group.
    pub certificates: Vec<(usize, NonConjugacyCertificate)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AngleFailure {
    NotReflectionCompatible,
    Pair(usize, usize),
}

#[derive(Debug, Clone)]
pub enum ParabolicFailure {
    /// No conjugate of `⟨S1_J⟩` is generated by a subset of `S2`, found by
    /// exhausting a finite group.
    Subset(IndexSet),
    /// `⟨S2_K⟩` for proper `K` contains an element whose standard
    /// coordinates are essential, so it is not parabolic for `S1`.
    NotParabolic {
        subset: IndexSet,
        element: Element,
        certificate: EssentialCertificate,
    },
}

#[derive(Debug, Clone)]
pub enum Relation<Y, N> {
    Yes(Y),
    No(N),
    Unknown(usize),
}

impl<Y, N> Relation<Y, N> {
    pub fn verdict(&self) -> Option<bool> {
        match self {
            Relation::Yes(_) => Some(true),
            Relation::No(_) => Some(false),
            Relation::Unknown(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Relation::Yes(_) => "yes",
            Relation::No(_) => "no",
            Relation::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompatReport {
    pub reflection: Relation<Vec<ReflectionWitness>, ReflectionFailure>,
    pub angle: Relation<Vec<AngleWitness>, AngleFailure>,
    pub parabolic: Relation<Vec<ParabolicWitness>, ParabolicFailure>,
}

impl CompatReport {
    /// Re-check every witness and certificate with the word engine (finite
    /// tables for arbitrary sets in finite groups).
    pub fn verify(&self, group: &CoxeterGroup, pair: &GeneratingSetPair) -> Result<bool, EngineError> {
        let (s1, s2) = (&pair.s1.elements, &pair.s2.elements);
        match &self.reflection {
            Relation::Yes(ws) => {
                for w in ws {
                    if group.conjugate(&w.conjugator, &s1[w.generator])? != s2[w.target] {
                        return Ok(false);
                    }
                }
            }
            Relation::No(f) => {
                for (k, cert) in &f.certificates {
                    if !cert.verify(group, &s1[f.generator], &s2[*k])? {
                        return Ok(false);
                    }
                }
            }
            Relation::Unknown(_) => {}
        }
        if let Relation::Yes(ws) = &self.angle {
            for w in ws {
                if group.conjugate(&w.conjugator, &s1[w.pair.0])? != s2[w.targets.0]
                    || group.conjugate(&w.conjugator, &s1[w.pair.1])? != s2[w.targets.1]
                {
                    return Ok(false);
                }
            }
        }
        match &self.parabolic {
            Relation::Yes(ws) => {
                let mut members = Membership::new(group);
                for w in ws {
                    let w_inv = group.invert(&w.conjugator)?;
                    for j in w.j1.iter() {
                        let z = group.conjugate(&w.conjugator, &s1[j])?;
                        if !members.contains(&pair.s2, w.j2, &z)? {
                            return Ok(false);
                        }
                    }
                    for k in w.j2.iter() {
                        let z = group.conjugate(&w_inv, &s2[k])?;
                        if !members.contains(&pair.s1, w.j1, &z)? {
                            return Ok(false);
                        }
                    }
                }
            }
            Relation::No(ParabolicFailure::NotParabolic {
                subset,
                element,
                certificate,
            }) => {
                let z = group.product(subset.iter().map(|k| &s2[k]))?;
                if subset.len() >= s2.len() || pair.s1.coordinates(group, &z)?.as_ref() != Some(element) {
                    return Ok(false);
                }
                if !certificate.verify(group, element)? {
                    return Ok(false);
                }
            }
            _ => {}
        }
        Ok(true)
    }
}

/// Membership in `⟨X_J⟩`, by supports when the origin allows it and by
/// finite tables otherwise.
struct Membership<'a> {
    group: &'a CoxeterGroup,
    finite: Option<Option<FiniteGroup>>,
}

impl<'a> Membership<'a> {
    fn new(group: &'a CoxeterGroup) -> Self {
        Membership { group, finite: None }
    }

    fn contains(&mut self, set: &GeneratingSet, j: IndexSet, z: &Element) -> Result<bool, EngineError> {
        if let Some(supp) = set.support_of(self.group, z)? {
            return Ok(supp.is_subset(j));
        }
        if self.finite.is_none() {
            self.finite = Some(FiniteGroup::new(self.group, DEFAULT_FINITE_CAP)?);
        }
        let Some(Some(fg)) = &self.finite else {
            return Ok(false);
        };
        let gens: Vec<usize> = j.iter().map(|k| fg.index_of_letters(set.elements[k].letters())).collect();
        Ok(fg.subgroup(&gens).contains(fg.index_of_letters(z.letters())))
    }
}

/// Whether `set` (indices into `fg`) is a Coxeter generating set: distinct
/// involutions generating the group, whose Coxeter group of the induced
/// matrix has the same order.
pub fn is_coxeter_generating_set(fg: &FiniteGroup, set: &[usize]) -> bool {
    if set.is_empty() {
        return fg.order() == 1;
    }
    let distinct = set.iter().enumerate().all(|(i, a)| !set[..i].contains(a));
    if !distinct || set.iter().any(|&t| t == 0 || fg.mul(t, t) != 0) {
        return false;
    }
    if fg.subgroup(set).len() != fg.order() {
        return false;
    }
    let m = induced_matrix(fg, set);
    diagram::spherical_order(&m, m.full_set()) == Some(fg.order() as u128)
}

/// The matrix of orders `ord(t_i t_j)` for distinct involutions `t_i`.
pub fn induced_matrix(fg: &FiniteGroup, set: &[usize]) -> CoxeterMatrix {
    CoxeterMatrix::from_fn(set.len(), |i, j| {
        Entry::Finite(fg.element_order(fg.mul(set[i], set[j])) as u32)
    })
}

/// Every Coxeter generating set of at most `max_size` elements, as sorted
/// index lists.
pub fn coxeter_generating_sets(fg: &FiniteGroup, max_size: usize) -> Vec<Vec<usize>> {
    fn extend(fg: &FiniteGroup, invs: &[usize], start: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() && is_coxeter_generating_set(fg, cur) {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for k in start..invs.len() {
            cur.push(invs[k]);
            extend(fg, invs, k + 1, cur, max, out);
            cur.pop();
        }
    }
    let invs = fg.involutions();
    let mut out = Vec::new();
    extend(fg, &invs, 0, &mut Vec::new(), max_size, &mut out);
    out
}

fn finite_indices(fg: &FiniteGroup, set: &GeneratingSet) -> Vec<usize> {
    set.elements.iter().map(|e| fg.index_of_letters(e.letters())).collect()
}

/// The compatibility relations of `pair.s1` with `pair.s2`. Finite groups
/// are decided exactly; otherwise witnesses are searched for among
/// conjugators of length at most `radius`.
pub fn compat_report(group: &CoxeterGroup, pair: &GeneratingSetPair, radius: usize) -> Result<CompatReport, AutError> {
    for (name, set) in [("S1", &pair.s1), ("S2", &pair.s2)] {
        for e in &set.elements {
            if e.is_identity() || !group.multiply(e, e)?.is_identity() {
                return Err(AutError::InvalidGeneratingSet(format!("{name} contains {e}, not an involution")));
            }
        }
    }
    if pair.matching == Matching::Indexed && pair.s1.len() != pair.s2.len() {
        return Err(AutError::InvalidGeneratingSet("indexed matching needs sets of equal size".into()));
    }
    match FiniteGroup::new(group, DEFAULT_FINITE_CAP)? {
        Some(fg) => finite_report(&fg, pair),
        None => InfiniteSearch::new(group, radius).report(pair),
    }
}

fn finite_report(fg: &FiniteGroup, pair: &GeneratingSetPair) -> Result<CompatReport, AutError> {
    let s1 = finite_indices(fg, &pair.s1);
    let s2 = finite_indices(fg, &pair.s2);
    for (name, set) in [("S1", &s1), ("S2", &s2)] {
        if !is_coxeter_generating_set(fg, set) {
            return Err(AutError::InvalidGeneratingSet(format!("{name} is not a Coxeter generating set")));
        }
    }
    let el = |i: usize| fg.element(i).clone();

    let mut refl = Vec::new();
    let mut refl_fail = None;
    for i in 0..s1.len() {
        let hit = pair
            .targets(i)
            .into_iter()
            .find_map(|k| fg.conjugator(s1[i], s2[k]).map(|w| (k, w)));
        match hit {
            Some((k, w)) => refl.push(ReflectionWitness {
                generator: i,
                target: k,
                conjugator: el(w),
            }),
            None => {
                refl_fail = Some(ReflectionFailure {
                    generator: i,
                    certificates: Vec::new(),
                });
                break;
            }
        }
    }
    let reflection = match refl_fail {
        Some(f) => Relation::No(f),
        None => Relation::Yes(refl),
    };

    let angle = if reflection.verdict() == Some(false) {
        Relation::No(AngleFailure::NotReflectionCompatible)
    } else {
        let position = |x: usize| s2.iter().position(|&t| t == x);
        let mut ws = Vec::new();
        let mut fail = None;
        'pairs: for i in 0..s1.len() {
            for j in i + 1..s1.len() {
                for w in 0..fg.order() {
                    let (a, b) = (fg.conj(w, s1[i]), fg.conj(w, s1[j]));
                    let targets = match pair.matching {
                        Matching::Indexed => (a == s2[i] && b == s2[j]).then_some((i, j)),
                        Matching::Set => position(a).zip(position(b)),
                    };
                    if let Some(targets) = targets {
                        ws.push(AngleWitness {
                            pair: (i, j),
                            targets,
                            conjugator: el(w),
                        });
                        break;
                    }
                }
                if ws.last().map(|w| w.pair) != Some((i, j)) {
                    fail = Some(AngleFailure::Pair(i, j));
                    break 'pairs;
                }
            }
        }
        match fail {
            Some(f) => Relation::No(f),
            None => Relation::Yes(ws),
        }
    };

    let mut sub2: HashMap<IndexSet, ElementSet> = HashMap::new();
    let full2 = IndexSet::full(s2.len());
    let mut para = Vec::new();
    let mut para_fail = None;
    for j1 in IndexSet::full(s1.len()).subsets() {
        let gens: Vec<usize> = j1.iter().map(|k| s1[k]).collect();
        let h1 = fg.subgroup(&gens);
        let members: Vec<usize> = h1.iter().collect();
        let candidates: Vec<IndexSet> = match pair.matching {
            Matching::Indexed => vec![j1],
            Matching::Set => {
                let mut c: Vec<IndexSet> = full2.subsets().filter(|&j| j != j1).collect();
                if j1.is_subset(full2) {
                    c.insert(0, j1);
                }
                c
            }
        };
        let mut found = None;
        'cand: for j2 in candidates {
            let h2 = sub2.entry(j2).or_insert_with(|| {
                let gens: Vec<usize> = j2.iter().map(|k| s2[k]).collect();
                fg.subgroup(&gens)
            });
            if h2.len() != h1.len() {
                continue;
            }
            for w in 0..fg.order() {
                if members.iter().all(|&h| h2.contains(fg.conj(w, h))) {
                    found = Some(ParabolicWitness {
                        j1,
                        j2,
                        conjugator: el(w),
                    });
                    break 'cand;
                }
            }
        }
        match found {
            Some(w) => para.push(w),
            None => {
                para_fail = Some(ParabolicFailure::Subset(j1));
                break;
            }
        }
    }
    let parabolic = match para_fail {
        Some(f) => Relation::No(f),
        None => Relation::Yes(para),
    };
    Ok(CompatReport {
        reflection,
        angle,
        parabolic,
    })
}

/// Bounded searches in an infinite group, caching the conjugator ball and
/// the non-conjugacy machinery.
struct InfiniteSearch<'a> {
    group: &'a CoxeterGroup,
    radius: usize,
    ball: Option<Vec<Element>>,
    even: Option<Option<EvenConjugacy>>,
    separator: Option<Separator>,
}

impl<'a> InfiniteSearch<'a> {
    fn new(group: &'a CoxeterGroup, radius: usize) -> Self {
        InfiniteSearch {
            group,
            radius,
            ball: None,
            even: None,
            separator: None,
        }
    }

    fn ball(&mut self) -> Result<&[Element], EngineError> {
        if self.ball.is_none() {
            self.ball = Some(self.group.ball(self.radius)?);
        }
        Ok(self.ball.as_deref().expect("ball computed"))
    }

    /// A checkable proof that `x` and `y` are not conjugate, if one is found.
    fn certify_distinct(&mut self, x: &Element, y: &Element) -> Result<Option<NonConjugacyCertificate>, AutError> {
        if self.even.is_none() {
            let config = ConjConfig {
                radius: self.radius.min(ConjConfig::default().radius),
                ..ConjConfig::default()
            };
            self.even = Some(EvenConjugacy::new(self.group.clone(), config).ok());
        }
        if let Some(Some(dec)) = &mut self.even {
            return Ok(match dec.decide(x, y)? {
                ConjDecision::NotConjugate(c) => Some(c),
                _ => None,
            });
        }
        let sep = self
            .separator
            .get_or_insert_with(|| Separator::new(self.group.matrix(), &SearchPlan::default()));
        Ok(match sep.separate(x, y) {
            SeparationResult::Witness(w) => Some(NonConjugacyCertificate::Quotient(w)),
            SeparationResult::NotFound { .. } => None,
        })
    }

    fn essential(&mut self, x: &Element) -> Result<Option<EssentialCertificate>, AutError> {
        let mut engine = ParabolicEngine::new(self.group.clone(), self.radius.min(8));
        Ok(match engine.is_essential(x)? {
            Essential::Yes(c) => Some(c),
            _ => None,
        })
    }

    fn report(&mut self, pair: &GeneratingSetPair) -> Result<CompatReport, AutError> {
        let group = self.group;
        let radius = self.radius;
        let (s1, s2) = (&pair.s1.elements, &pair.s2.elements);

        let mut refl = Vec::new();
        let mut reflection = None;
        for i in 0..s1.len() {
            let targets = pair.targets(i);
            let mut hit = None;
            for g in self.ball()? {
                let c = group.conjugate(g, &s1[i])?;
                if let Some(&k) = targets.iter().find(|&&k| s2[k] == c) {
                    hit = Some((k, g.clone()));
                    break;
                }
            }
            if let Some((k, g)) = hit {
                refl.push(ReflectionWitness {
                    generator: i,
                    target: k,
                    conjugator: g,
                });
                continue;
            }
            let mut certificates = Vec::new();
            for &k in &targets {
                match self.certify_distinct(&s1[i], &s2[k])? {
                    Some(c) => certificates.push((k, c)),
                    None => break,
                }
            }
            reflection = Some(if certificates.len() == targets.len() {
                Relation::No(ReflectionFailure {
                    generator: i,
                    certificates,
                })
            } else {
                Relation::Unknown(radius)
            });
            if matches!(reflection, Some(Relation::No(_))) {
                break;
            }
        }
        let reflection = reflection.unwrap_or(Relation::Yes(refl));

        let angle = match reflection {
            Relation::No(_) => Relation::No(AngleFailure::NotReflectionCompatible),
            Relation::Unknown(r) => Relation::Unknown(r),
            Relation::Yes(_) => {
                let mut ws = Vec::new();
                let mut complete = true;
                for i in 0..s1.len() {
                    for j in i + 1..s1.len() {
                        let st = group.multiply(&s1[i], &s1[j])?;
                        let spherical = match pair.s1.origin {
                            SetOrigin::Standard => !group.matrix().m(i, j).is_infinite(),
                            _ => group.order(&st, 64)?.is_some(),
                        };
                        if !spherical {
                            continue;
                        }
                        let mut hit = None;
                        for g in self.ball()? {
                            let a = group.conjugate(g, &s1[i])?;
                            let b = group.conjugate(g, &s1[j])?;
                            let targets = match pair.matching {
                                Matching::Indexed => (a == s2[i] && b == s2[j]).then_some((i, j)),
                                Matching::Set => s2
                                    .iter()
                                    .position(|t| *t == a)
                                    .zip(s2.iter().position(|t| *t == b)),
                            };
                            if let Some(t) = targets {
                                hit = Some((t, g.clone()));
                                break;
                            }
                        }
                        match hit {
                            Some((targets, g)) => ws.push(AngleWitness {
                                pair: (i, j),
                                targets,
                                conjugator: g,
                            }),
                            None => complete = false,
                        }
                    }
                }
                if complete {
                    Relation::Yes(ws)
                } else {
                    Relation::Unknown(radius)
                }
            }
        };

        let parabolic = self.parabolic(pair)?;
        Ok(CompatReport {
            reflection,
            angle,
            parabolic,
        })
    }

    fn parabolic(&mut self, pair: &GeneratingSetPair) -> Result<Relation<Vec<ParabolicWitness>, ParabolicFailure>, AutError> {
        let group = self.group;
        let (s1, s2) = (&pair.s1.elements, &pair.s2.elements);
        if pair.s1.origin == SetOrigin::Arbitrary || pair.s2.origin == SetOrigin::Arbitrary {
            return Ok(Relation::Unknown(self.radius));
        }
        let mut ws = Vec::new();
        let mut complete = true;
        for j1 in IndexSet::full(s1.len()).subsets() {
            let mut hit = None;
            for g in self.ball()? {
                let mut j2 = IndexSet::from_bits(0);
                for j in j1.iter() {
                    let z = group.conjugate(g, &s1[j])?;
                    let supp = pair.s2.support_of(group, &z)?.expect("origin is known");
                    j2 = j2.union(supp);
                }
                if pair.matching == Matching::Indexed {
                    if !j2.is_subset(j1) {
                        continue;
                    }
                    j2 = j1;
                }
                let g_inv = group.invert(g)?;
                let mut back = true;
                for k in j2.iter() {
                    let z = group.conjugate(&g_inv, &s2[k])?;
                    if !pair.s1.support_of(group, &z)?.expect("origin is known").is_subset(j1) {
                        back = false;
                        break;
                    }
                }
                if back {
                    hit = Some(ParabolicWitness {
                        j1,
                        j2,
                        conjugator: g.clone(),
                    });
                    break;
                }
            }
            match hit {
                Some(w) => ws.push(w),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            return Ok(Relation::Yes(ws));
        }
        // If the sets were parabolic-compatible, every ⟨S2_K⟩ would be a
        // parabolic subgroup for S1; one containing an element whose
        // S1-coordinates are essential would then be everything.
        let full = IndexSet::full(s2.len());
        for k in full.subsets().filter(|&k| k != full && k.len() >= 2) {
            let z = group.product(k.iter().map(|i| &s2[i]))?;
            let element = pair.s1.coordinates(group, &z)?.expect("origin is known");
            if let Some(certificate) = self.essential(&element)? {
                return Ok(Relation::No(ParabolicFailure::NotParabolic {
                    subset: k,
                    element,
                    certificate,
                }));
            }
        }
        Ok(Relation::Unknown(self.radius))
    }
}

/// Which hypothesis of the inner-by-graph criterion fails (generators and
/// subsets refer to `S`).
#[derive(Debug, Clone)]
pub enum FailedCondition {
    /// `α(W_K)` is not a parabolic subgroup. `certificate` is absent when
    /// this was found by exhausting the parabolic subgroups of a finite group.
    Parabolic {
        subset: IndexSet,
        certificate: Option<ParabolicCertificate>,
    },
    /// `α(s_i s_j)` is not conjugate to any product of two generators.
    Rotation { pair: (usize, usize) },
}

/// Proofs that `α(W_K)` is not parabolic in an infinite group.
#[derive(Debug, Clone)]
pub enum ParabolicCertificate {
    /// `K = {s}` and `α(s)` is not conjugate to any generator.
    NotReflection(Vec<(usize, NonConjugacyCertificate)>),
    /// `α(s_{k1} ⋯ s_{kr})` is essential while `K` is proper.
    Essential { element: Element, certificate: EssentialCertificate },
}

impl FailedCondition {
    pub fn condition(&self) -> u8 {
        match self {
            FailedCondition::Parabolic { .. } => 1,
            FailedCondition::Rotation { .. } => 2,
        }
    }
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailedCondition::Parabolic { subset, .. } => {
                write!(f, "condition 1: image of W_{{{subset}}} is not parabolic")
            }
            FailedCondition::Rotation { pair: (i, j) } => write!(
                f,
                "condition 2: image of s{}s{} is not conjugate to a product of two generators",
                i + 1,
                j + 1
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub enum GraphVerdict {
    /// `w α(s_i) w⁻¹ = s_{permutation[i]}` for every `i`.
    InnerByGraph { conjugator: Element, permutation: Vec<usize> },
    NotInnerByGraph(FailedCondition),
    Unknown(usize),
}

impl GraphVerdict {
    pub fn verdict(&self) -> Option<bool> {
        match self {
            GraphVerdict::InnerByGraph { .. } => Some(true),
            GraphVerdict::NotInnerByGraph(_) => Some(false),
            GraphVerdict::Unknown(_) => None,
        }
    }

    /// Check a positive witness with the word engine.
    pub fn verify(&self, group: &CoxeterGroup, spec: &AutomorphismSpec) -> Result<bool, EngineError> {
        match self {
            GraphVerdict::InnerByGraph {
                conjugator,
                permutation,
            } => {
                for (i, w) in spec.images().iter().enumerate() {
                    let a = group.reduce(w)?;
                    if group.conjugate(conjugator, &a)? != group.generator(permutation[i]) {
                        return Ok(false);
                    }
                }
                let graph = AutomorphismSpec::graph(permutation);
                Ok(verify_automorphism(group, &graph)? == AutVerdict::Verified)
            }
            GraphVerdict::NotInnerByGraph(FailedCondition::Parabolic {
                subset,
                certificate: Some(ParabolicCertificate::Essential { element, certificate }),
            }) => {
                let c = group.product(subset.iter().map(|k| group.generator(k)).collect::<Vec<_>>().iter())?;
                Ok(subset.len() < group.rank()
                    && spec.apply(group, &c)? == *element
                    && certificate.verify(group, element)?)
            }
            GraphVerdict::NotInnerByGraph(FailedCondition::Parabolic {
                subset,
                certificate: Some(ParabolicCertificate::NotReflection(certs)),
            }) => {
                let Some(k) = subset.iter().next() else {
                    return Ok(false);
                };
                let a = group.reduce(&spec.images()[k])?;
                if subset.len() != 1 || certs.len() != group.rank() {
                    return Ok(false);
                }
                for (i, c) in certs {
                    if !c.verify(group, &a, &group.generator(*i))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(true),
        }
    }
}

/// The table of `α` on a finite group: `table[x] = α(x)`.
fn finite_table(fg: &FiniteGroup, spec: &AutomorphismSpec) -> Vec<usize> {
    let gens: Vec<usize> = spec.images().iter().map(|w| fg.index_of_letters(w.letters())).collect();
    fg.elements()
        .iter()
        .map(|e| e.letters().iter().fold(0, |acc, &l| fg.mul(acc, gens[l as usize])))
        .collect()
}

/// The first `w`, in ShortLex order, with `w α(S) w⁻¹ = S`, preferring one
/// that fixes every generator.
fn finite_graph_witness(fg: &FiniteGroup, table: &[usize]) -> Option<(usize, Vec<usize>)> {
    let n = fg.rank();
    let gens: Vec<usize> = (0..n).map(|i| fg.generator(i)).collect();
    let images: Vec<usize> = gens.iter().map(|&g| table[g]).collect();
    let perm_for = |w: usize| -> Option<Vec<usize>> {
        images
            .iter()
            .map(|&a| gens.iter().position(|&g| g == fg.conj(w, a)))
            .collect()
    };
    let identity: Vec<usize> = (0..n).collect();
    let mut first = None;
    for w in 0..fg.order() {
        if let Some(p) = perm_for(w) {
            if p == identity {
                return Some((w, p));
            }
            first.get_or_insert((w, p));
        }
    }
    first
}

/// The first `K` (by bits) with `α(W_K)` not a parabolic subgroup.
fn finite_condition_one(catalog: &ParabolicCatalog, table: &[usize]) -> Option<IndexSet> {
    let fg = catalog.group();
    IndexSet::full(fg.rank()).subsets().find(|&k| {
        let std = fg.standard_parabolic(k);
        let mut image = ElementSet::empty(fg.order());
        for x in std.iter() {
            image.insert(table[x]);
        }
        catalog.find(&image).is_none()
    })
}

/// A spherical pair `(i, j)` whose rotation is not sent into the class of
/// any `s't'`.
fn finite_condition_two(fg: &FiniteGroup, table: &[usize]) -> Option<(usize, usize)> {
    let n = fg.rank();
    let labels = fg.class_labels();
    let mut rotations = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                rotations.push(labels[fg.mul(fg.generator(a), fg.generator(b))]);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let x = table[fg.mul(fg.generator(i), fg.generator(j))];
            if !rotations.contains(&labels[x]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn finite_graph_failure(fg: Arc<FiniteGroup>, table: &[usize]) -> Result<FailedCondition, AutError> {
    let catalog = ParabolicCatalog::new(fg.clone());
    if let Some(subset) = finite_condition_one(&catalog, table) {
        return Ok(FailedCondition::Parabolic {
            subset,
            certificate: None,
        });
    }
    if let Some(pair) = finite_condition_two(&fg, table) {
        return Ok(FailedCondition::Rotation { pair });
    }
    Err(AutError::Contradiction(
        "both conditions hold but no conjugator maps α(S) onto S".into(),
    ))
}

/// Whether `α` is inner-by-graph: `α = conj_g ∘ δ` for a diagram
/// automorphism `δ`.
pub fn inner_by_graph(group: &CoxeterGroup, spec: &AutomorphismSpec, radius: usize) -> Result<GraphVerdict, AutError> {
    require_automorphism(group, spec)?;
    if let Some(fg) = FiniteGroup::new(group, DEFAULT_FINITE_CAP)? {
        let table = finite_table(&fg, spec);
        if let Some((w, permutation)) = finite_graph_witness(&fg, &table) {
            return Ok(GraphVerdict::InnerByGraph {
                conjugator: fg.element(w).clone(),
                permutation,
            });
        }
        return Ok(GraphVerdict::NotInnerByGraph(finite_graph_failure(Arc::new(fg), &table)?));
    }
    let mut search = InfiniteSearch::new(group, radius);
    if let Some(failure) = infinite_condition_one(&mut search, spec)? {
        return Ok(GraphVerdict::NotInnerByGraph(failure));
    }
    infinite_graph_witness(&mut search, spec)
}

/// Certified failures of condition 1 in an infinite group.
fn infinite_condition_one(search: &mut InfiniteSearch, spec: &AutomorphismSpec) -> Result<Option<FailedCondition>, AutError> {
    let group = search.group;
    let pair = GeneratingSetPair::new(GeneratingSet::image(group, spec)?, GeneratingSet::standard(group));
    let report = search.report(&pair)?;
    if let Relation::No(f) = report.reflection {
        return Ok(Some(FailedCondition::Parabolic {
            subset: IndexSet::singleton(f.generator),
            certificate: Some(ParabolicCertificate::NotReflection(f.certificates)),
        }));
    }
    // With S1 = α(S) and S2 = S the failure is phrased through α⁻¹; redo it
    // directly on α so the certificate is about α(W_K).
    let n = group.rank();
    let full = IndexSet::full(n);
    for k in full.subsets().filter(|&k| k != full && k.len() >= 2) {
        let c = group.product(k.iter().map(|i| group.generator(i)).collect::<Vec<_>>().iter())?;
        let element = spec.apply(group, &c)?;
        if let Some(certificate) = search.essential(&element)? {
            return Ok(Some(FailedCondition::Parabolic {
                subset: k,
                certificate: Some(ParabolicCertificate::Essential { element, certificate }),
            }));
        }
    }
    Ok(None)
}

fn infinite_graph_witness(search: &mut InfiniteSearch, spec: &AutomorphismSpec) -> Result<GraphVerdict, AutError> {
    let group = search.group;
    let gens = group.generators();
    let images: Vec<Element> = spec.images().iter().map(|w| group.reduce(w)).collect::<Result<_, _>>()?;
    let identity: Vec<usize> = (0..gens.len()).collect();
    let mut first = None;
    for w in search.ball()? {
        let mut perm = Vec::with_capacity(gens.len());
        for a in &images {
            let c = group.conjugate(w, a)?;
            match gens.iter().position(|g| *g == c) {
                Some(p) => perm.push(p),
                None => break,
            }
        }
        if perm.len() == gens.len() {
            if perm == identity {
                return Ok(GraphVerdict::InnerByGraph {
                    conjugator: w.clone(),
                    permutation: perm,
                });
            }
            first.get_or_insert((w.clone(), perm));
        }
    }
    Ok(match first {
        Some((conjugator, permutation)) => GraphVerdict::InnerByGraph {
            conjugator,
            permutation,
        },
        None => GraphVerdict::Unknown(search.radius),
    })
}

/// Inner-by-graph decided from condition 1 alone, valid for crystallographic
/// matrices.
pub fn cryst_shortcut(group: &CoxeterGroup, spec: &AutomorphismSpec, radius: usize) -> Result<GraphVerdict, AutError> {
    if !group.matrix().is_crystallographic() {
        return Err(AutError::NotCrystallographic);
    }
    require_automorphism(group, spec)?;
    if let Some(fg) = FiniteGroup::new(group, DEFAULT_FINITE_CAP)? {
        let fg = Arc::new(fg);
        let table = finite_table(&fg, spec);
        let catalog = ParabolicCatalog::new(fg.clone());
        if let Some(subset) = finite_condition_one(&catalog, &table) {
            return Ok(GraphVerdict::NotInnerByGraph(FailedCondition::Parabolic {
                subset,
                certificate: None,
            }));
        }
        return match finite_graph_witness(&fg, &table) {
            Some((w, permutation)) => Ok(GraphVerdict::InnerByGraph {
                conjugator: fg.element(w).clone(),
                permutation,
            }),
            None => Err(AutError::Contradiction(
                "parabolic subgroups are preserved but no conjugator maps α(S) onto S".into(),
            )),
        };
    }
    let mut search = InfiniteSearch::new(group, radius);
    if let Some(failure) = infinite_condition_one(&mut search, spec)? {
        return Ok(GraphVerdict::NotInnerByGraph(failure));
    }
    infinite_graph_witness(&mut search, spec)
}

#[derive(Debug, Clone)]
pub enum SmallWordsVerdict {
    /// `α(x) = g x g⁻¹` for all `x`.
    Inner(Element),
    /// `α(word)` is not conjugate to `word`; the certificate is absent when
    /// decided in a finite group by class labels.
    NotPointwiseSmall {
        word: Element,
        certificate: Option<NonConjugacyCertificate>,
    },
    Unknown(usize),
}

impl SmallWordsVerdict {
    pub fn verify(&self, group: &CoxeterGroup, spec: &AutomorphismSpec) -> Result<bool, EngineError> {
        match self {
            SmallWordsVerdict::Inner(g) => {
                for (i, w) in spec.images().iter().enumerate() {
                    if group.conjugate(g, &group.generator(i))? != group.reduce(w)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SmallWordsVerdict::NotPointwiseSmall { word, certificate } => {
                let letters = word.letters();
                let distinct = letters.iter().enumerate().all(|(i, l)| !letters[..i].contains(l));
                let image = spec.apply(group, word)?;
                Ok(distinct
                    && match certificate {
                        Some(c) => c.verify(group, word, &image)?,
                        None => match FiniteGroup::new(group, DEFAULT_FINITE_CAP)? {
                            Some(fg) => !fg.is_conjugate(
                                fg.index_of_letters(word.letters()),
                                fg.index_of_letters(image.letters()),
                            ),
                            None => false,
                        },
                    })
            }
            SmallWordsVerdict::Unknown(_) => Ok(true),
        }
    }
}

/// All orderings of all subsets of `0..n`, shortest first.
pub fn distinct_generator_words(n: usize) -> Vec<Vec<usize>> {
    fn grow(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for s in 0..n {
            if !used[s] {
                used[s] = true;
                cur.push(s);
                grow(n, cur, used, out);
                cur.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    grow(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out.sort_by_key(Vec::len);
    out
}

/// Test `α(w) ~ w` on every product of pairwise distinct generators; if all
/// pass, look for `g` with `α = conj_g`.
pub fn smallwords_inner(group: &CoxeterGroup, spec: &AutomorphismSpec, radius: usize) -> Result<SmallWordsVerdict, AutError> {
    let n = group.rank();
    if n > SMALLWORDS_MAX_RANK {
        return Err(AutError::RankTooLarge(n));
    }
    require_automorphism(group, spec)?;
    let words = distinct_generator_words(n);
    if let Some(fg) = FiniteGroup::new(group, DEFAULT_FINITE_CAP)? {
        let table = finite_table(&fg, spec);
        for w in &words {
            let x = fg.index_of_letters(&w.iter().map(|&s| s as u8).collect::<Vec<_>>());
            if !fg.is_conjugate(x, table[x]) {
                return Ok(SmallWordsVerdict::NotPointwiseSmall {
                    word: fg.element(x).clone(),
                    certificate: None,
                });
            }
        }
        let gens: Vec<usize> = (0..n).map(|i| fg.generator(i)).collect();
        return match (0..fg.order()).find(|&g| gens.iter().all(|&s| fg.conj(g, s) == table[s])) {
            Some(g) => Ok(SmallWordsVerdict::Inner(fg.element(g).clone())),
            None => Err(AutError::Contradiction(
                "every small word keeps its class but α is not inner".into(),
            )),
        };
    }
    let mut search = InfiniteSearch::new(group, radius);
    let mut undecided = false;
    for w in &words {
        let x = group.element(w)?;
        let y = spec.apply(group, &x)?;
        if x == y || matches!(group.conjugate_search(&x, &y, radius)?, ConjugatorSearch::Found(_)) {
            continue;
        }
        match search.certify_distinct(&x, &y)? {
            Some(c) => {
                return Ok(SmallWordsVerdict::NotPointwiseSmall {
                    word: x,
                    certificate: Some(c),
                })
            }
            None => undecided = true,
        }
    }
    if undecided {
        return Ok(SmallWordsVerdict::Unknown(radius));
    }
    let images: Vec<Element> = spec.images().iter().map(|w| group.reduce(w)).collect::<Result<_, _>>()?;
    for g in search.ball()? {
        let mut all = true;
        for (i, a) in images.iter().enumerate() {
            if group.conjugate(g, &group.generator(i))? != *a {
                all = false;
                break;
            }
        }
        if all {
            return Ok(SmallWordsVerdict::Inner(g.clone()));
        }
    }
    Ok(SmallWordsVerdict::Unknown(radius))
}

/// Every automorphism of a finite Coxeter group, found by trying all
/// involution tuples that satisfy the relators and generate the group.
pub fn finite_automorphisms(fg: &FiniteGroup) -> Vec<AutomorphismSpec> {
    let m = fg.group().matrix().clone();
    let n = fg.rank();
    let invs = fg.involutions();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn go(fg: &FiniteGroup, m: &CoxeterMatrix, invs: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == fg.rank() {
            if fg.subgroup(cur).len() == fg.order() {
                out.push(cur.clone());
            }
            return;
        }
        for &t in invs {
            let ok = (0..i).all(|j| {
                let k = m.m(i, j).finite().expect("finite group has finite entries") as usize;
                cur[j] != t && k % fg.element_order(fg.mul(t, cur[j])) == 0
            });
            if ok {
                cur.push(t);
                go(fg, m, invs, cur, out);
                cur.pop();
            }
        }
    }
    let mut tuples = Vec::new();
    go(fg, &m, &invs, &mut cur, &mut tuples);
    for t in tuples {
        let images: Vec<Word> = t.iter().map(|&x| fg.element(x).word().clone()).collect();
        let forward = AutomorphismSpec::new(images.clone(), images.clone());
        let table = finite_table(fg, &forward);
        let mut inv = vec![0; fg.order()];
        for (x, &y) in table.iter().enumerate() {
            inv[y] = x;
        }
        let inverse = (0..n).map(|i| fg.element(inv[fg.generator(i)]).word().clone()).collect();
        out.push(AutomorphismSpec::new(images, inverse));
    }
    out
}

/// Whether `α` preserves every conjugacy class of a finite group.
pub fn is_class_preserving(fg: &FiniteGroup, spec: &AutomorphismSpec) -> bool {
    let table = finite_table(fg, spec);
    let labels = fg.class_labels();
    (0..fg.order()).all(|x| labels[x] == labels[table[x]])
}

/// Some `g` with `α = conj_g`, by exhausting a finite group.
pub fn finite_inner_conjugator(fg: &FiniteGroup, spec: &AutomorphismSpec) -> Option<usize> {
    let table = finite_table(fg, spec);
    let gens: Vec<usize> = (0..fg.rank()).map(|i| fg.generator(i)).collect();
    (0..fg.order()).find(|&g| gens.iter().all(|&s| fg.conj(g, s) == table[s]))
}
