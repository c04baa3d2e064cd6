//! Canonical retractions and a conjugacy decision procedure for even
//! Coxeter groups.
//!
//! For `I ⊆ S` the retraction `ρ_I` fixes the generators in `I` and kills
//! the rest. It is a homomorphism exactly when every finite `m_st` with
//! `s ∈ I`, `t ∉ I` is even, so it always is in an even group.
//!
//! The decision procedure reduces to smaller standard parabolics: for
//! `x ∈ W_I` and `y ∈ W_J`, `x` and `y` are conjugate in `W` iff
//!
//! 1. `x` and `ρ_I(y)` are conjugate in `W_I`,
//! 2. `ρ_J(x)` and `y` are conjugate in `W_J`,
//! 3. `ρ_{I∩J}(x)` and `ρ_{I∩J}(y)` are conjugate in `W_{I∩J}`.
//!
//! Necessity follows by applying each retraction to a conjugation equation.
//! Sufficiency is constructive: with `a x a⁻¹ = ρ_I(y)`,
//! `c ρ_{I∩J}(x) c⁻¹ = ρ_{I∩J}(y)` and `b ρ_J(x) b⁻¹ = y`, the product
//! `b c⁻¹ a` conjugates `x` to `y`, because `ρ_I(y) = ρ_{I∩J}(y)` for
//! `y ∈ W_J` and `ρ_J(x) = ρ_{I∩J}(x)` for `x ∈ W_I`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{self, CoxeterMatrix, Entry, IndexSet};
use crate::error::EngineError;
use crate::finite::{FiniteGroup, DEFAULT_FINITE_CAP};
use crate::quotients::{self, SearchPlan, SeparationResult, SeparationWitness, Separator};
use crate::words::{ConjugatorSearch, CoxeterGroup, Element, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetractionError {
    #[error("retraction onto {subset} is not a homomorphism: m({s},{t}) = {m} is odd")]
    OddEntry { subset: IndexSet, s: usize, t: usize, m: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjError {
    #[error("matrix is not even")]
    NotEven,
    #[error("element {element} does not lie in W_{subset}")]
    NotInParabolic { element: String, subset: IndexSet },
    #[error(transparent)]
    Retraction(#[from] RetractionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// The canonical retraction `ρ_I`, checked to be a homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Retraction {
    subset: IndexSet,
}

impl Retraction {
    pub fn new(m: &CoxeterMatrix, subset: IndexSet) -> Result<Self, RetractionError> {
        for s in subset.iter() {
            for t in 0..m.rank() {
                if subset.contains(t) {
                    continue;
                }
                if let Entry::Finite(v) = m.m(s, t) {
                    if v % 2 == 1 {
                        return Err(RetractionError::OddEntry {
                            subset,
                            s: s + 1,
                            t: t + 1,
                            m: v,
                        });
                    }
                }
            }
        }
        Ok(Retraction { subset })
    }

    pub fn subset(&self) -> IndexSet {
        self.subset
    }

    /// Delete the letters outside `I`.
    pub fn apply_word(&self, w: &Word) -> Word {
        Word::new(
            w.letters()
                .iter()
                .copied()
                .filter(|&s| self.subset.contains(s as usize))
                .collect(),
        )
    }

    pub fn apply(&self, group: &CoxeterGroup, w: &Element) -> Result<Element, EngineError> {
        group.reduce(&self.apply_word(w.word()))
    }
}

/// `ρ_I(w)`.
pub fn retract(group: &CoxeterGroup, subset: IndexSet, w: &Element) -> Result<Element, ConjError> {
    Ok(Retraction::new(group.matrix(), subset)?.apply(group, w)?)
}

/// Check `ρ_I ∘ ρ_J = ρ_J ∘ ρ_I = ρ_{I∩J}` on every generator.
pub fn retractions_commute_check(
    group: &CoxeterGroup,
    i: IndexSet,
    j: IndexSet,
) -> Result<bool, ConjError> {
    let m = group.matrix();
    let (ri, rj) = (Retraction::new(m, i)?, Retraction::new(m, j)?);
    let rij = Retraction::new(m, i.intersection(j))?;
    for s in group.generators() {
        let ij = ri.apply(group, &rj.apply(group, &s)?)?;
        let ji = rj.apply(group, &ri.apply(group, &s)?)?;
        if ij != ji || ij != rij.apply(group, &s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Map an element of `W_K` to the restricted group on `K`, whose generators
/// are the members of `K` in increasing order.
pub fn to_local(subset: IndexSet, x: &Element) -> Element {
    let positions: Vec<usize> = subset.iter().collect();
    x.relabel(|s| positions.iter().position(|&p| p == s).expect("letter inside the subset"))
}

/// Inverse of [`to_local`].
pub fn to_global(subset: IndexSet, x: &Element) -> Element {
    let positions: Vec<usize> = subset.iter().collect();
    x.relabel(|s| positions[s])
}

fn require_in(x: &Element, subset: IndexSet) -> Result<(), ConjError> {
    if x.support().is_subset(subset) {
        Ok(())
    } else {
        Err(ConjError::NotInParabolic {
            element: x.to_string(),
            subset,
        })
    }
}

/// Answer of a conjugacy oracle for a standard parabolic `W_K`.
#[derive(Debug, Clone)]
pub enum OracleAnswer {
    /// `g ∈ W_K` with `g u g⁻¹ = v`, in ambient labels.
    Conjugate(Element),
    /// Not conjugate in `W_K`; the certificate, when given, refers to the
    /// restricted group on `K`.
    NotConjugate(Option<NonConjugacyCertificate>),
    Unknown,
}

/// Result of evaluating the three conditions.
#[derive(Debug, Clone)]
pub enum CriterionOutcome {
    /// All three hold; `conjugator` sends `x` to `y`.
    Holds { conjugator: Element },
    /// Condition `condition` (1, 2 or 3) fails in the given parabolic.
    Fails {
        condition: u8,
        subset: IndexSet,
        certificate: Option<NonConjugacyCertificate>,
    },
    /// The oracle could not decide condition `condition`.
    Undetermined { condition: u8 },
}

impl CriterionOutcome {
    pub fn holds(&self) -> Option<bool> {
        match self {
            CriterionOutcome::Holds { .. } => Some(true),
            CriterionOutcome::Fails { .. } => Some(false),
            CriterionOutcome::Undetermined { .. } => None,
        }
    }
}

/// Evaluate the three conditions for `x ∈ W_I`, `y ∈ W_J`. The oracle is
/// asked `(K, u, v)` and must decide conjugacy of `u` and `v` in `W_K`.
pub fn retr_criterion<F>(
    group: &CoxeterGroup,
    i: IndexSet,
    j: IndexSet,
    x: &Element,
    y: &Element,
    mut oracle: F,
) -> Result<CriterionOutcome, ConjError>
where
    F: FnMut(IndexSet, &Element, &Element) -> Result<OracleAnswer, ConjError>,
{
    require_in(x, i)?;
    require_in(y, j)?;
    let m = group.matrix();
    let k = i.intersection(j);
    let (ri, rj, rk) = (Retraction::new(m, i)?, Retraction::new(m, j)?, Retraction::new(m, k)?);
    let rho_i_y = ri.apply(group, y)?;
    let rho_j_x = rj.apply(group, x)?;
    let rho_k_x = rk.apply(group, x)?;
    let rho_k_y = rk.apply(group, y)?;
    let queries = [
        (1u8, i, x.clone(), rho_i_y),
        (3u8, k, rho_k_x, rho_k_y),
        (2u8, j, rho_j_x, y.clone()),
    ];
    let mut parts = Vec::with_capacity(3);
    for (condition, subset, u, v) in queries {
        match oracle(subset, &u, &v)? {
            OracleAnswer::Conjugate(g) => {
                debug_assert!(g.support().is_subset(subset));
                parts.push(g);
            }
            OracleAnswer::NotConjugate(certificate) => {
                return Ok(CriterionOutcome::Fails {
                    condition,
                    subset,
                    certificate,
                })
            }
            OracleAnswer::Unknown => return Ok(CriterionOutcome::Undetermined { condition }),
        }
    }
    // parts = [a, c, b]; b c⁻¹ a sends x to y
    let c_inv = group.invert(&parts[1])?;
    let conjugator = group.product([&parts[2], &c_inv, &parts[0]])?;
    assert_eq!(
        &group.conjugate(&conjugator, x)?,
        y,
        "composed conjugator must send x to y"
    );
    Ok(CriterionOutcome::Holds { conjugator })
}

/// A machine-checkable proof that two elements are not conjugate.
#[derive(Debug, Clone)]
pub enum NonConjugacyCertificate {
    /// `x^k = 1` but `y^k ≠ 1` (or the reverse when `swapped`).
    OrderMismatch { k: usize, swapped: bool },
    /// A finite quotient in which the images are not conjugate.
    Quotient(Box<SeparationWitness>),
    /// With `x' = g x g⁻¹` and `y' = h y h⁻¹`, the retractions `ρ_K(x')` and
    /// `ρ_K(y')` are not conjugate in `W_K`; `inner` proves this in the
    /// restricted group. `condition` records which of the three conditions
    /// this instance is, if any.
    Retraction {
        subset: IndexSet,
        x_conjugator: Element,
        y_conjugator: Element,
        condition: Option<u8>,
        inner: Box<NonConjugacyCertificate>,
    },
}

impl NonConjugacyCertificate {
    /// Check the certificate with the word engine alone.
    pub fn verify(&self, group: &CoxeterGroup, x: &Element, y: &Element) -> Result<bool, EngineError> {
        match self {
            NonConjugacyCertificate::OrderMismatch { k, swapped } => {
                let (a, b) = if *swapped { (y, x) } else { (x, y) };
                Ok(group.power(a, *k)?.is_identity() && !group.power(b, *k)?.is_identity())
            }
            NonConjugacyCertificate::Quotient(w) => Ok(w.verify(group.matrix(), x, y)),
            NonConjugacyCertificate::Retraction {
                subset,
                x_conjugator,
                y_conjugator,
                inner,
                ..
            } => {
                let Ok(r) = Retraction::new(group.matrix(), *subset) else {
                    return Ok(false);
                };
                let xp = group.conjugate(x_conjugator, x)?;
                let yp = group.conjugate(y_conjugator, y)?;
                let u = to_local(*subset, &r.apply(group, &xp)?);
                let v = to_local(*subset, &r.apply(group, &yp)?);
                let (restricted, _) = group.matrix().restrict(*subset);
                let sub = CoxeterGroup::new(restricted).with_step_budget(group.step_budget());
                inner.verify(&sub, &u, &v)
            }
        }
    }

    /// Indented multi-line rendering.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        self.render(0, &mut out);
        out.join("\n")
    }

    fn render(&self, depth: usize, out: &mut Vec<String>) {
        let pad = "  ".repeat(depth);
        match self {
            NonConjugacyCertificate::OrderMismatch { k, swapped } => {
                let (a, b) = if *swapped { ("y", "x") } else { ("x", "y") };
                out.push(format!("{pad}order: {a}^{k} = e, {b}^{k} != e"));
            }
            NonConjugacyCertificate::Quotient(w) => {
                for line in w.to_text().lines() {
                    out.push(format!("{pad}{line}"));
                }
            }
            NonConjugacyCertificate::Retraction {
                subset,
                x_conjugator,
                y_conjugator,
                condition,
                inner,
            } => {
                match condition {
                    Some(c) => out.push(format!("{pad}retraction: {subset} (failed condition {c})")),
                    None => out.push(format!("{pad}retraction: {subset}")),
                }
                out.push(format!("{pad}x_conjugator: {x_conjugator}"));
                out.push(format!("{pad}y_conjugator: {y_conjugator}"));
                inner.render(depth + 1, out);
            }
        }
    }
}

/// Outcome of the conjugacy decision.
#[derive(Debug, Clone)]
pub enum ConjDecision {
    /// `g x g⁻¹ = y`, verified.
    Conjugate(Element),
    NotConjugate(NonConjugacyCertificate),
    Unknown { radius: usize },
}

impl ConjDecision {
    pub fn is_unknown(&self) -> bool {
        matches!(self, ConjDecision::Unknown { .. })
    }

    pub fn verdict(&self) -> Option<bool> {
        match self {
            ConjDecision::Conjugate(_) => Some(true),
            ConjDecision::NotConjugate(_) => Some(false),
            ConjDecision::Unknown { .. } => None,
        }
    }

    /// Re-check the attached certificate with the word engine.
    pub fn verify(&self, group: &CoxeterGroup, x: &Element, y: &Element) -> Result<bool, EngineError> {
        match self {
            ConjDecision::Conjugate(g) => Ok(&group.conjugate(g, x)? == y),
            ConjDecision::NotConjugate(c) => c.verify(group, x, y),
            ConjDecision::Unknown { .. } => Ok(true),
        }
    }
}

impl fmt::Display for ConjDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjDecision::Conjugate(g) => write!(f, "conjugate by {g}"),
            ConjDecision::NotConjugate(c) => write!(f, "not conjugate\n{}", c.to_text()),
            ConjDecision::Unknown { radius } => write!(f, "unknown within radius {radius}"),
        }
    }
}

/// Budgets for the decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjConfig {
    /// Length bound for conjugator searches.
    pub radius: usize,
    /// Groups up to this order are decided by brute force.
    pub finite_cap: usize,
    /// Powers tried when comparing element orders.
    pub order_cap: usize,
    pub plan: SearchPlan,
}

impl Default for ConjConfig {
    fn default() -> Self {
        ConjConfig {
            radius: 8,
            finite_cap: DEFAULT_FINITE_CAP,
            order_cap: 64,
            plan: SearchPlan::default(),
        }
    }
}

/// Conjugacy decisions in one even Coxeter group, caching the finite
/// tables, conjugator balls and sub-deciders it builds along the way.
#[derive(Debug)]
pub struct EvenConjugacy {
    group: CoxeterGroup,
    config: ConjConfig,
    finite: Option<Option<Arc<FiniteGroup>>>,
    ball: Option<Vec<Element>>,
    separator: Option<Separator>,
    subs: HashMap<IndexSet, Box<EvenConjugacy>>,
}

impl EvenConjugacy {
    pub fn new(group: CoxeterGroup, config: ConjConfig) -> Result<Self, ConjError> {
        if !group.matrix().is_even() {
            return Err(ConjError::NotEven);
        }
        Ok(EvenConjugacy {
            group,
            config,
            finite: None,
            ball: None,
            separator: None,
            subs: HashMap::new(),
        })
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn config(&self) -> &ConjConfig {
        &self.config
    }

    /// The enumerated group, if its order is within the finite cap.
    pub fn finite_group(&mut self) -> Result<Option<Arc<FiniteGroup>>, ConjError> {
        if self.finite.is_none() {
            let spherical = diagram::spherical_order(self.group.matrix(), self.group.matrix().full_set());
            let fg = match spherical {
                Some(o) if o <= self.config.finite_cap as u128 => {
                    FiniteGroup::new(&self.group, self.config.finite_cap)?.map(Arc::new)
                }
                _ => None,
            };
            self.finite = Some(fg);
        }
        Ok(self.finite.clone().flatten())
    }

    fn ball(&mut self) -> Result<&[Element], ConjError> {
        if self.ball.is_none() {
            self.ball = Some(self.group.ball(self.config.radius)?);
        }
        Ok(self.ball.as_deref().expect("ball just computed"))
    }

    fn sub(&mut self, subset: IndexSet) -> Result<&mut EvenConjugacy, ConjError> {
        if !self.subs.contains_key(&subset) {
            let (restricted, _) = self.group.matrix().restrict(subset);
            let group = CoxeterGroup::new(restricted).with_step_budget(self.group.step_budget());
            let child = EvenConjugacy::new(group, self.config.clone())?;
            self.subs.insert(subset, Box::new(child));
        }
        Ok(self.subs.get_mut(&subset).expect("sub-decider just inserted"))
    }

    /// Decide conjugacy of `u, v ∈ W_K` inside `W_K`, answering in ambient labels.
    pub fn decide_in(&mut self, subset: IndexSet, u: &Element, v: &Element) -> Result<OracleAnswer, ConjError> {
        require_in(u, subset)?;
        require_in(v, subset)?;
        if subset == self.group.matrix().full_set() {
            return Ok(match self.decide(u, v)? {
                ConjDecision::Conjugate(g) => OracleAnswer::Conjugate(g),
                ConjDecision::NotConjugate(c) => OracleAnswer::NotConjugate(Some(c)),
                ConjDecision::Unknown { .. } => OracleAnswer::Unknown,
            });
        }
        let (lu, lv) = (to_local(subset, u), to_local(subset, v));
        let answer = self.sub(subset)?.decide(&lu, &lv)?;
        Ok(match answer {
            ConjDecision::Conjugate(g) => OracleAnswer::Conjugate(to_global(subset, &g)),
            ConjDecision::NotConjugate(c) => OracleAnswer::NotConjugate(Some(c)),
            ConjDecision::Unknown { .. } => OracleAnswer::Unknown,
        })
    }

    /// Decide whether `x` and `y` are conjugate.
    pub fn decide(&mut self, x: &Element, y: &Element) -> Result<ConjDecision, ConjError> {
        let decision = self.decide_unchecked(x, y)?;
        debug_assert!(decision.verify(&self.group, x, y)?, "certificate must verify");
        if let ConjDecision::Conjugate(g) = &decision {
            assert_eq!(&self.group.conjugate(g, x)?, y, "conjugator must verify");
        }
        Ok(decision)
    }

    fn decide_unchecked(&mut self, x: &Element, y: &Element) -> Result<ConjDecision, ConjError> {
        if x == y {
            return Ok(ConjDecision::Conjugate(Element::identity()));
        }
        let m = self.group.matrix().clone();
        let full = m.full_set();

        // the abelianization is cheap and catches parity and support classes
        let ab = quotients::abelianize(&m).expect("abelianization always exists");
        let (ax, ay) = (ab.image(x), ab.image(y));
        let verdict = ab.image_conjugacy(&ax, &ay);
        if verdict.separates() {
            let w = SeparationWitness {
                hom: ab,
                x_img: ax,
                y_img: ay,
                verdict,
            };
            return Ok(ConjDecision::NotConjugate(NonConjugacyCertificate::Quotient(Box::new(w))));
        }

        let comps = diagram::components(&m, full);
        if comps.len() > 1 {
            return self.decide_componentwise(&comps, x, y);
        }

        if let Some(fg) = self.finite_group()? {
            return Ok(Self::decide_finite(&fg, x, y));
        }

        if let Some(cert) = self.order_mismatch(x, y)? {
            return Ok(ConjDecision::NotConjugate(cert));
        }

        let (g, i) = self.parabolic_conjugate(x)?;
        let (h, j) = self.parabolic_conjugate(y)?;
        let xp = self.group.conjugate(&g, x)?;
        let yp = self.group.conjugate(&h, y)?;
        if i != full && j != full {
            let outcome = {
                let group = self.group.clone();
                retr_criterion(&group, i, j, &xp, &yp, |k, u, v| self.decide_in(k, u, v))?
            };
            match outcome {
                CriterionOutcome::Holds { conjugator } => {
                    // y = h⁻¹ y' h and y' = z x' z⁻¹ with x' = g x g⁻¹
                    let h_inv = self.group.invert(&h)?;
                    let total = self.group.product([&h_inv, &conjugator, &g])?;
                    return Ok(ConjDecision::Conjugate(total));
                }
                CriterionOutcome::Fails {
                    condition,
                    subset,
                    certificate: Some(inner),
                } => {
                    return Ok(ConjDecision::NotConjugate(NonConjugacyCertificate::Retraction {
                        subset,
                        x_conjugator: g,
                        y_conjugator: h,
                        condition: Some(condition),
                        inner: Box::new(inner),
                    }))
                }
                _ => {}
            }
        } else if i != full || j != full {
            // only one side lies in a proper parabolic K: compare ρ_K of both
            let k = if i != full { i } else { j };
            if let Some(cert) = self.retraction_separates(k, &g, &h, &xp, &yp, None)? {
                return Ok(ConjDecision::NotConjugate(cert));
            }
        }

        self.fallback(x, y)
    }

    fn decide_finite(fg: &Arc<FiniteGroup>, x: &Element, y: &Element) -> ConjDecision {
        let (a, b) = (
            fg.index_of_letters(x.letters()),
            fg.index_of_letters(y.letters()),
        );
        match fg.conjugator(a, b) {
            Some(g) => ConjDecision::Conjugate(fg.element(g).clone()),
            None => {
                let hom = quotients::regular_quotient(fg.clone());
                let (x_img, y_img) = (hom.image(x), hom.image(y));
                let verdict = hom.image_conjugacy(&x_img, &y_img);
                let w = SeparationWitness {
                    hom,
                    x_img,
                    y_img,
                    verdict,
                };
                ConjDecision::NotConjugate(NonConjugacyCertificate::Quotient(Box::new(w)))
            }
        }
    }

    fn decide_componentwise(&mut self, comps: &[IndexSet], x: &Element, y: &Element) -> Result<ConjDecision, ConjError> {
        let mut parts = Vec::new();
        let mut unknown = false;
        for &c in comps {
            let r = Retraction::new(self.group.matrix(), c)?;
            let (u, v) = (r.apply(&self.group, x)?, r.apply(&self.group, y)?);
            match self.decide_in(c, &u, &v)? {
                OracleAnswer::Conjugate(g) => parts.push(g),
                OracleAnswer::NotConjugate(Some(inner)) => {
                    return Ok(ConjDecision::NotConjugate(NonConjugacyCertificate::Retraction {
                        subset: c,
                        x_conjugator: Element::identity(),
                        y_conjugator: Element::identity(),
                        condition: None,
                        inner: Box::new(inner),
                    }))
                }
                OracleAnswer::NotConjugate(None) | OracleAnswer::Unknown => unknown = true,
            }
        }
        if unknown {
            return Ok(ConjDecision::Unknown {
                radius: self.config.radius,
            });
        }
        Ok(ConjDecision::Conjugate(self.group.product(parts.iter())?))
    }

    fn order_mismatch(&self, x: &Element, y: &Element) -> Result<Option<NonConjugacyCertificate>, ConjError> {
        let cap = self.config.order_cap;
        let ox = self.group.order(x, cap)?;
        let oy = self.group.order(y, cap)?;
        let cert = match (ox, oy) {
            (Some(a), Some(b)) if a != b => {
                // the smaller order kills one side only
                if a < b {
                    NonConjugacyCertificate::OrderMismatch { k: a, swapped: false }
                } else {
                    NonConjugacyCertificate::OrderMismatch { k: b, swapped: true }
                }
            }
            (Some(a), None) => NonConjugacyCertificate::OrderMismatch { k: a, swapped: false },
            (None, Some(b)) => NonConjugacyCertificate::OrderMismatch { k: b, swapped: true },
            _ => return Ok(None),
        };
        Ok(Some(cert))
    }

    /// A conjugate of `x` with the smallest support found within the radius,
    /// as `(g, supp(g x g⁻¹))`.
    fn parabolic_conjugate(&mut self, x: &Element) -> Result<(Element, IndexSet), ConjError> {
        let full = self.group.matrix().full_set();
        if x.support() != full {
            return Ok((Element::identity(), x.support()));
        }
        let group = self.group.clone();
        let mut best = (Element::identity(), full);
        for g in self.ball()? {
            let support = group.conjugate(g, x)?.support();
            if support.len() < best.1.len() {
                best = (g.clone(), support);
            }
        }
        Ok(best)
    }

    /// Certificate from `ρ_K(g x g⁻¹)` and `ρ_K(h y h⁻¹)` being non-conjugate in `W_K`.
    fn retraction_separates(
        &mut self,
        k: IndexSet,
        g: &Element,
        h: &Element,
        xp: &Element,
        yp: &Element,
        condition: Option<u8>,
    ) -> Result<Option<NonConjugacyCertificate>, ConjError> {
        let r = Retraction::new(self.group.matrix(), k)?;
        let (u, v) = (r.apply(&self.group, xp)?, r.apply(&self.group, yp)?);
        if let OracleAnswer::NotConjugate(Some(inner)) = self.decide_in(k, &u, &v)? {
            return Ok(Some(NonConjugacyCertificate::Retraction {
                subset: k,
                x_conjugator: g.clone(),
                y_conjugator: h.clone(),
                condition,
                inner: Box::new(inner),
            }));
        }
        Ok(None)
    }

    fn fallback(&mut self, x: &Element, y: &Element) -> Result<ConjDecision, ConjError> {
        if let ConjugatorSearch::Found(g) = self.group.conjugate_search(x, y, self.config.radius)? {
            return Ok(ConjDecision::Conjugate(g));
        }
        let full = self.group.matrix().full_set();
        let id = Element::identity();
        for s in 0..self.group.rank() {
            let k = full.without(s);
            if let Some(cert) = self.retraction_separates(k, &id, &id, x, y, None)? {
                return Ok(ConjDecision::NotConjugate(cert));
            }
        }
        if self.separator.is_none() {
            self.separator = Some(Separator::new(self.group.matrix(), &self.config.plan));
        }
        let sep = self.separator.as_ref().expect("separator just built");
        if let SeparationResult::Witness(w) = sep.separate(x, y) {
            return Ok(ConjDecision::NotConjugate(NonConjugacyCertificate::Quotient(w)));
        }
        Ok(ConjDecision::Unknown {
            radius: self.config.radius,
        })
    }
}

/// One-shot conjugacy decision in an even Coxeter group.
pub fn decide_conjugacy_even(
    group: &CoxeterGroup,
    x: &Element,
    y: &Element,
    config: &ConjConfig,
) -> Result<ConjDecision, ConjError> {
    EvenConjugacy::new(group.clone(), config.clone())?.decide(x, y)
}

/// Conjugacy in any Coxeter group. Finite groups are decided exactly and
/// even ones by [`EvenConjugacy`]; otherwise a bounded conjugator search is
/// followed by the finite-quotient separator.
pub fn decide_conjugacy(
    group: &CoxeterGroup,
    x: &Element,
    y: &Element,
    config: &ConjConfig,
) -> Result<ConjDecision, ConjError> {
    if group.matrix().is_even() {
        return decide_conjugacy_even(group, x, y, config);
    }
    if let Some(fg) = FiniteGroup::new(group, config.finite_cap)? {
        return Ok(EvenConjugacy::decide_finite(&Arc::new(fg), x, y));
    }
    if let ConjugatorSearch::Found(g) = group.conjugate_search(x, y, config.radius)? {
        return Ok(ConjDecision::Conjugate(g));
    }
    Ok(match quotients::separate(group.matrix(), x, y, &config.plan) {
        SeparationResult::Witness(w) => ConjDecision::NotConjugate(NonConjugacyCertificate::Quotient(w)),
        SeparationResult::NotFound { .. } => ConjDecision::Unknown { radius: config.radius },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: u32) -> Entry {
        Entry::Finite(v)
    }

    fn b2_a1() -> CoxeterGroup {
        CoxeterGroup::new(CoxeterMatrix::from_edges(3, &[(0, 1, fin(4))]))
    }

    fn set(bits: u32) -> IndexSet {
        IndexSet::from_bits(bits)
    }

    #[test]
    fn retract_examples() {
        let g = CoxeterGroup::new(CoxeterMatrix::from_edges(
            3,
            &[(0, 1, fin(4)), (0, 2, Entry::Infinity)],
        ));
        let w = g.element(&[0, 2, 1]).unwrap();
        assert_eq!(retract(&g, set(0b011), &w).unwrap(), g.element(&[0, 1]).unwrap());
        assert!(retract(&g, IndexSet::EMPTY, &w).unwrap().is_identity());
        let inside = g.element(&[0, 1, 0]).unwrap();
        assert_eq!(retract(&g, set(0b011), &inside).unwrap(), inside);
    }

    #[test]
    fn retraction_kills_relators() {
        let g = CoxeterGroup::new(CoxeterMatrix::from_edges(
            4,
            &[(0, 1, fin(4)), (1, 2, fin(6)), (2, 3, Entry::Infinity), (0, 3, fin(4))],
        ));
        for subset in g.matrix().full_set().subsets() {
            let r = Retraction::new(g.matrix(), subset).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if let Entry::Finite(k) = g.matrix().m(i, j) {
                        let rel: Vec<u8> = (0..k).flat_map(|_| [i as u8, j as u8]).collect();
                        assert!(g.reduce(&r.apply_word(&Word::new(rel))).unwrap().is_identity());
                    }
                }
            }
        }
    }

    #[test]
    fn odd_entry_rejected() {
        let m = CoxeterMatrix::from_edges(2, &[(0, 1, fin(3))]);
        assert!(Retraction::new(&m, IndexSet::singleton(0)).is_err());
        assert!(Retraction::new(&m, m.full_set()).is_ok());
    }

    #[test]
    fn retractions_commute() {
        let g = CoxeterGroup::new(CoxeterMatrix::from_edges(
            4,
            &[(0, 1, fin(4)), (1, 2, fin(6)), (2, 3, Entry::Infinity)],
        ));
        for i in g.matrix().full_set().subsets() {
            for j in g.matrix().full_set().subsets() {
                assert!(retractions_commute_check(&g, i, j).unwrap());
            }
        }
    }

    fn brute_oracle(
        fg: &FiniteGroup,
    ) -> impl FnMut(IndexSet, &Element, &Element) -> Result<OracleAnswer, ConjError> + '_ {
        move |k, u, v| {
            let (a, b) = (fg.index_of_letters(u.letters()), fg.index_of_letters(v.letters()));
            for g in 0..fg.order() {
                if fg.element(g).support().is_subset(k) && fg.conj(g, a) == b {
                    return Ok(OracleAnswer::Conjugate(fg.element(g).clone()));
                }
            }
            Ok(OracleAnswer::NotConjugate(None))
        }
    }

    #[test]
    fn criterion_examples() {
        let g = b2_a1();
        let fg = FiniteGroup::new(&g, 100).unwrap().unwrap();
        let s1 = g.generator(0);
        let s3 = g.generator(2);
        let out = retr_criterion(&g, set(0b011), set(0b100), &s1, &s3, brute_oracle(&fg)).unwrap();
        assert!(matches!(out, CriterionOutcome::Fails { condition: 1, .. }));
        let out = retr_criterion(&g, set(0b011), set(0b011), &s1, &s1, brute_oracle(&fg)).unwrap();
        assert!(matches!(out, CriterionOutcome::Holds { .. }));
        // s1 and s2 s1 s2 inside W_{1,2}
        let y = g.element(&[1, 0, 1]).unwrap();
        let out = retr_criterion(&g, set(0b001), set(0b011), &s1, &y, brute_oracle(&fg)).unwrap();
        match out {
            CriterionOutcome::Holds { conjugator } => assert_eq!(g.conjugate(&conjugator, &s1).unwrap(), y),
            other => panic!("expected Holds, got {other:?}"),
        }
    }

    #[test]
    fn decide_b2_a1_exhaustively() {
        let g = b2_a1();
        let fg = FiniteGroup::new(&g, 100).unwrap().unwrap();
        let mut d = EvenConjugacy::new(g.clone(), ConjConfig::default()).unwrap();
        for a in 0..fg.order() {
            for b in 0..fg.order() {
                let (x, y) = (fg.element(a), fg.element(b));
                let decision = d.decide(x, y).unwrap();
                assert_eq!(decision.verdict(), Some(fg.is_conjugate(a, b)));
                assert!(decision.verify(&g, x, y).unwrap());
            }
        }
    }

    #[test]
    fn decide_examples_in_infinite_groups() {
        let g = CoxeterGroup::new(CoxeterMatrix::from_edges(
            3,
            &[(0, 1, fin(2)), (0, 2, Entry::Infinity), (1, 2, Entry::Infinity)],
        ));
        let config = ConjConfig::default();
        let d = decide_conjugacy_even(&g, &g.generator(0), &g.generator(1), &config).unwrap();
        assert!(matches!(d, ConjDecision::NotConjugate(NonConjugacyCertificate::Quotient(_))));
        // different finite orders: s1 s2 has order 2, s1 s3 infinite
        let x = g.element(&[0, 1]).unwrap();
        let y = g.element(&[0, 2]).unwrap();
        let d = decide_conjugacy_even(&g, &x, &y, &config).unwrap();
        assert_eq!(d.verdict(), Some(false));
        assert!(d.verify(&g, &x, &y).unwrap());
        // a conjugate pair deep in the group
        let c = g.element(&[2, 0, 2, 1]).unwrap();
        let y = g.conjugate(&c, &x).unwrap();
        let d = decide_conjugacy_even(&g, &x, &y, &config).unwrap();
        assert!(matches!(d, ConjDecision::Conjugate(_)));
        assert!(d.verify(&g, &x, &y).unwrap());
    }

    #[test]
    fn odd_matrix_is_rejected() {
        let g = CoxeterGroup::new(CoxeterMatrix::dihedral(fin(3)));
        let s = g.generator(0);
        assert_eq!(
            decide_conjugacy_even(&g, &s, &s, &ConjConfig::default()).unwrap_err(),
            ConjError::NotEven
        );
    }
}
