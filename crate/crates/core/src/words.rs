//! Words over idempotent letters and the rewriting system presenting IG(E).
//!
//! A letter is the canonical id of an idempotent of the monoid and stands for
//! its generator `ē`. The defining relations are `ē f̄ = (ef)‾` for every
//! basic pair `(e, f)`; a [`RewriteStep`] applies one of them in either
//! direction. A [`DerivationCertificate`] is a replayable chain of such steps.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::biorder::BiorderedSet;
use crate::endo::{compose, ElementId, MonoidTable};
use crate::error::{Error, Result};

/// Nonempty word of idempotent letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IdemWord(Vec<ElementId>);

impl IdemWord {
    pub fn new(monoid: &MonoidTable, letters: Vec<ElementId>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Invalid("words must be nonempty".into()));
        }
        if let Some(&x) = letters.iter().find(|&&x| !monoid.is_idempotent(x)) {
            return Err(Error::Invalid(format!("letter {x} is not an idempotent")));
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[ElementId] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<ElementId> {
        self.0
    }
}

impl fmt::Display for IdemWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.0))
    }
}

pub fn render(word: &[ElementId]) -> String {
    let parts: Vec<String> = word.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `e f -> ef`
    Contract,
    /// `ef -> e f`
    Expand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RewriteStep {
    pub pos: usize,
    pub dir: Direction,
    pub e: ElementId,
    pub f: ElementId,
}

impl RewriteStep {
    pub fn contract(pos: usize, e: ElementId, f: ElementId) -> Self {
        Self {
            pos,
            dir: Direction::Contract,
            e,
            f,
        }
    }

    pub fn expand(pos: usize, e: ElementId, f: ElementId) -> Self {
        Self {
            pos,
            dir: Direction::Expand,
            e,
            f,
        }
    }

    /// The step undoing this one.
    pub fn inverse(self) -> Self {
        let dir = match self.dir {
            Direction::Contract => Direction::Expand,
            Direction::Expand => Direction::Contract,
        };
        Self { dir, ..self }
    }

    pub fn shifted(self, offset: usize) -> Self {
        Self {
            pos: self.pos + offset,
            ..self
        }
    }
}

/// Applies one relation of the presentation, validating the basic-pair
/// justification and the letters at the position.
pub fn apply_step(
    monoid: &MonoidTable,
    bio: &BiorderedSet,
    word: &[ElementId],
    step: RewriteStep,
) -> Result<Vec<ElementId>> {
    let RewriteStep { pos, dir, e, f } = step;
    if !bio.is_basic(monoid, e, f) {
        return Err(Error::Invalid(format!("({e}, {f}) is not a basic pair")));
    }
    let ef = monoid.mul(e, f);
    let mut out = Vec::with_capacity(word.len() + 1);
    match dir {
        Direction::Contract => {
            if pos + 1 >= word.len() {
                return Err(Error::Invalid(format!(
                    "cannot contract at {pos} in a word of length {}",
                    word.len()
                )));
            }
            if (word[pos], word[pos + 1]) != (e, f) {
                return Err(Error::Invalid(format!(
                    "letters at {pos} are ({}, {}), not ({e}, {f})",
                    word[pos],
                    word[pos + 1]
                )));
            }
            out.extend_from_slice(&word[..pos]);
            out.push(ef);
            out.extend_from_slice(&word[pos + 2..]);
        }
        Direction::Expand => {
            if pos >= word.len() {
                return Err(Error::Invalid(format!(
                    "cannot expand at {pos} in a word of length {}",
                    word.len()
                )));
            }
            if word[pos] != ef {
                return Err(Error::Invalid(format!(
                    "letter at {pos} is {}, but {e}*{f} = {ef}",
                    word[pos]
                )));
            }
            out.extend_from_slice(&word[..pos]);
            out.extend_from_slice(&[e, f]);
            out.extend_from_slice(&word[pos + 1..]);
        }
    }
    Ok(out)
}

/// Image of a word under the natural map to the monoid.
pub fn phi_eval(monoid: &MonoidTable, word: &[ElementId]) -> Result<ElementId> {
    monoid
        .product(word)
        .ok_or_else(|| Error::Invalid("cannot evaluate the empty word".into()))
}

/// Every step applicable to `word` that keeps its length within `max_len`:
/// contractions first, by position, then expansions by position.
pub fn applicable_steps(
    monoid: &MonoidTable,
    bio: &BiorderedSet,
    word: &[ElementId],
    max_len: usize,
) -> Vec<RewriteStep> {
    let mut steps = Vec::new();
    for pos in 0..word.len().saturating_sub(1) {
        let (e, f) = (word[pos], word[pos + 1]);
        if bio.is_basic(monoid, e, f) {
            steps.push(RewriteStep::contract(pos, e, f));
        }
    }
    if word.len() < max_len {
        for (pos, &x) in word.iter().enumerate() {
            for &(e, f) in bio.expansions(monoid, x) {
                steps.push(RewriteStep::expand(pos, e, f));
            }
        }
    }
    steps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationCertificate {
    pub start: Vec<ElementId>,
    pub steps: Vec<RewriteStep>,
    pub end: Vec<ElementId>,
}

impl DerivationCertificate {
    pub fn empty(word: Vec<ElementId>) -> Self {
        Self {
            start: word.clone(),
            steps: Vec::new(),
            end: word,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same derivation read backwards.
    pub fn reversed(&self) -> Self {
        Self {
            start: self.end.clone(),
            steps: self.steps.iter().rev().map(|s| s.inverse()).collect(),
            end: self.start.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Outcome of checking a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Valid,
    /// `step` is `None` when the steps replay but the end word differs, or
    /// when the start word itself is malformed.
    Invalid {
        step: Option<usize>,
        reason: String,
    },
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid)
    }
}

/// Replays a certificate from scratch.
///
/// Deliberately does not use the monoid's multiplication table or the cached
/// basic-pair table: every justification is recomputed by composing the
/// endomorphisms themselves.
pub fn verify_certificate(monoid: &MonoidTable, cert: &DerivationCertificate) -> Verification {
    let group = monoid.group();
    let endo = |id: ElementId| monoid.get(id).ok();
    let times = |a: ElementId, b: ElementId| -> Option<ElementId> {
        Some(monoid.id_of(&compose(group, endo(a)?, endo(b)?).ok()?))
    };
    let is_idem = |a: ElementId| times(a, a) == Some(a);
    let invalid = |step, reason: String| Verification::Invalid { step, reason };

    if cert.start.is_empty() {
        return invalid(None, "empty start word".into());
    }
    if let Some(&x) = cert.start.iter().find(|&&x| !is_idem(x)) {
        return invalid(None, format!("start letter {x} is not idempotent"));
    }
    let mut word = cert.start.clone();
    for (n, step) in cert.steps.iter().enumerate() {
        let RewriteStep { pos, dir, e, f } = *step;
        if !is_idem(e) || !is_idem(f) {
            return invalid(Some(n), format!("({e}, {f}) are not both idempotent"));
        }
        let (Some(ef), Some(fe)) = (times(e, f), times(f, e)) else {
            return invalid(Some(n), "letters out of range".into());
        };
        if ![ef, fe].iter().any(|&x| x == e || x == f) {
            return invalid(Some(n), format!("({e}, {f}) is not a basic pair"));
        }
        match dir {
            Direction::Contract => {
                if word.get(pos) != Some(&e) || word.get(pos + 1) != Some(&f) {
                    return invalid(Some(n), format!("no ({e}, {f}) at position {pos}"));
                }
                word.splice(pos..pos + 2, [ef]);
            }
            Direction::Expand => {
                if word.get(pos) != Some(&ef) {
                    return invalid(Some(n), format!("no {ef} at position {pos}"));
                }
                word.splice(pos..pos + 1, [e, f]);
            }
        }
    }
    if word != cert.end {
        return invalid(
            None,
            format!("replay ends at {} not {}", render(&word), render(&cert.end)),
        );
    }
    Verification::Valid
}

/// Incrementally builds a certificate, validating each step as it goes.
pub struct CertBuilder<'a> {
    monoid: &'a MonoidTable,
    bio: &'a BiorderedSet,
    start: Vec<ElementId>,
    word: Vec<ElementId>,
    steps: Vec<RewriteStep>,
}

impl<'a> CertBuilder<'a> {
    pub fn new(monoid: &'a MonoidTable, bio: &'a BiorderedSet, start: Vec<ElementId>) -> Self {
        Self {
            monoid,
            bio,
            word: start.clone(),
            start,
            steps: Vec::new(),
        }
    }

    pub fn word(&self) -> &[ElementId] {
        &self.word
    }

    pub fn step(&mut self, step: RewriteStep) -> Result<&mut Self> {
        self.word = apply_step(self.monoid, self.bio, &self.word, step)?;
        self.steps.push(step);
        Ok(self)
    }

    pub fn contract(&mut self, pos: usize, e: ElementId, f: ElementId) -> Result<&mut Self> {
        self.step(RewriteStep::contract(pos, e, f))
    }

    pub fn expand(&mut self, pos: usize, e: ElementId, f: ElementId) -> Result<&mut Self> {
        self.step(RewriteStep::expand(pos, e, f))
    }

    /// Applies `cert` to the factor of the current word starting at `pos`.
    pub fn splice(&mut self, pos: usize, cert: &DerivationCertificate) -> Result<&mut Self> {
        let len = cert.start.len();
        if self.word.get(pos..pos + len) != Some(cert.start.as_slice()) {
            return Err(Error::Invalid(format!(
                "cannot splice {} at {pos} into {}",
                render(&cert.start),
                render(&self.word)
            )));
        }
        for &s in &cert.steps {
            self.step(s.shifted(pos))?;
        }
        Ok(self)
    }

    pub fn splice_reversed(
        &mut self,
        pos: usize,
        cert: &DerivationCertificate,
    ) -> Result<&mut Self> {
        self.splice(pos, &cert.reversed())
    }

    pub fn finish(self) -> DerivationCertificate {
        DerivationCertificate {
            start: self.start,
            steps: self.steps,
            end: self.word,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    /// Longest intermediate word; `None` means the longer input plus 4.
    pub max_word_len: Option<usize>,
    pub max_states: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_word_len: None,
            max_states: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Found(DerivationCertificate),
    /// The words evaluate to different elements, so they are different in
    /// IG(E) as well.
    Unequal {
        lhs: ElementId,
        rhs: ElementId,
    },
    /// Nothing found within the bounds. Says nothing about equality.
    NotFound {
        explored: usize,
        /// True if the state cap was hit, false if the length-bounded space
        /// was exhausted.
        capped: bool,
    },
}

struct Side {
    words: Vec<Vec<ElementId>>,
    parent: Vec<Option<(usize, RewriteStep)>>,
    index: HashMap<Vec<ElementId>, usize>,
    frontier: VecDeque<usize>,
}

impl Side {
    fn new(root: Vec<ElementId>) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Self {
            words: vec![root],
            parent: vec![None],
            index,
            frontier: VecDeque::from([0]),
        }
    }

    /// Steps from the root to node `at`.
    fn path(&self, mut at: usize) -> Vec<RewriteStep> {
        let mut out = Vec::new();
        while let Some((prev, step)) = self.parent[at] {
            out.push(step);
            at = prev;
        }
        out.reverse();
        out
    }
}

/// Bounded bidirectional breadth-first search for a derivation `w1 ~ w2`.
pub fn derive_equal(
    monoid: &MonoidTable,
    bio: &BiorderedSet,
    w1: &[ElementId],
    w2: &[ElementId],
    bounds: SearchBounds,
) -> Result<Derivation> {
    for w in [w1, w2] {
        IdemWord::new(monoid, w.to_vec())?;
    }
    let (lhs, rhs) = (phi_eval(monoid, w1)?, phi_eval(monoid, w2)?);
    if lhs != rhs {
        return Ok(Derivation::Unequal { lhs, rhs });
    }
    if w1 == w2 {
        return Ok(Derivation::Found(DerivationCertificate::empty(w1.to_vec())));
    }
    let max_len = bounds.max_word_len.unwrap_or(w1.len().max(w2.len()) + 4);

    let mut sides = [Side::new(w1.to_vec()), Side::new(w2.to_vec())];
    let explored = |sides: &[Side; 2]| sides[0].words.len() + sides[1].words.len();
    loop {
        let (a, b) = match (sides[0].frontier.is_empty(), sides[1].frontier.is_empty()) {
            (true, true) => {
                return Ok(Derivation::NotFound {
                    explored: explored(&sides),
                    capped: false,
                })
            }
            (false, true) => (0, 1),
            (true, false) => (1, 0),
            (false, false) if sides[0].frontier.len() <= sides[1].frontier.len() => (0, 1),
            _ => (1, 0),
        };
        let level: Vec<usize> = sides[a].frontier.drain(..).collect();
        for node in level {
            let word = sides[a].words[node].clone();
            for step in applicable_steps(monoid, bio, &word, max_len) {
                let next = apply_step(monoid, bio, &word, step)?;
                if sides[a].index.contains_key(&next) {
                    continue;
                }
                let id = sides[a].words.len();
                sides[a].words.push(next.clone());
                sides[a].parent.push(Some((node, step)));
                sides[a].index.insert(next.clone(), id);
                sides[a].frontier.push_back(id);
                if let Some(&meet) = sides[b].index.get(&next) {
                    let (fwd, bwd) = if a == 0 { (id, meet) } else { (meet, id) };
                    let mut steps = sides[0].path(fwd);
                    steps.extend(sides[1].path(bwd).into_iter().rev().map(|s| s.inverse()));
                    return Ok(Derivation::Found(DerivationCertificate {
                        start: w1.to_vec(),
                        steps,
                        end: w2.to_vec(),
                    }));
                }
                if explored(&sides) >= bounds.max_states {
                    return Ok(Derivation::NotFound {
                        explored: explored(&sides),
                        capped: true,
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::structure::Structure;

    fn z2() -> Structure {
        Structure::build(&FiniteGroup::cyclic(2).unwrap(), 3).unwrap()
    }

    #[test]
    fn phi_examples() {
        let s = z2();
        let (m, r) = (&s.monoid, &s.rees);
        let e11 = s.e11();
        assert_eq!(phi_eval(m, &[r.e(2, 1)]).unwrap(), r.e(2, 1));
        assert_eq!(phi_eval(m, &[e11, e11]).unwrap(), e11);
        let i = r.column_for_tuple(&[1, 0]).unwrap();
        let w = [e11, r.e(i, 1), e11];
        assert_eq!(phi_eval(m, &w).unwrap(), m.a_of(1));
        assert!(phi_eval(m, &[]).is_err());
    }

    #[test]
    fn step_examples() {
        let s = z2();
        let (m, b, r) = (&s.monoid, &s.bio, &s.rees);
        let (e11, e12) = (r.e(0, 0), r.e(0, 1));
        assert_eq!(m.mul(e11, e12), e12);
        let w = apply_step(m, b, &[e11, e12], RewriteStep::contract(0, e11, e12)).unwrap();
        assert_eq!(w, vec![e12]);

        // e_12 e_l1 = e_11 whenever p_2l is the identity, but the pair is only
        // basic for l = 1; otherwise the equality needs a longer derivation.
        for l in r.rows().filter(|&l| r.p(1, l) == 0) {
            let el1 = r.e(l, 0);
            assert_eq!(m.mul(e12, el1), e11);
            let expanded = apply_step(m, b, &[e11], RewriteStep::expand(0, e12, el1));
            if l == 0 {
                assert_eq!(expanded.unwrap(), vec![e12, el1]);
            } else {
                assert!(expanded.is_err());
            }
        }

        let step = RewriteStep::contract(0, e11, e12);
        let there = apply_step(m, b, &[e11, e12], step).unwrap();
        let back = apply_step(m, b, &there, step.inverse()).unwrap();
        assert_eq!(back, vec![e11, e12]);
    }

    #[test]
    fn step_errors() {
        let s = z2();
        let (m, b, r) = (&s.monoid, &s.bio, &s.rees);
        let (e11, e12) = (r.e(0, 0), r.e(0, 1));
        assert!(apply_step(m, b, &[e11], RewriteStep::contract(0, e11, e12)).is_err());
        assert!(apply_step(m, b, &[e11, e12], RewriteStep::contract(0, e12, e11)).is_err());
        assert!(apply_step(m, b, &[e11], RewriteStep::expand(0, e11, e12)).is_err());
        assert!(apply_step(m, b, &[e11], RewriteStep::expand(3, e11, e11)).is_err());
        // not basic: e_11 and e_22 where the square is not a band
        let i = r.column_for_tuple(&[1, 0]).unwrap();
        let x = r.e(i, 1);
        if !b.is_basic(m, e11, x) {
            assert!(apply_step(m, b, &[e11, x], RewriteStep::contract(0, e11, x)).is_err());
        }
    }

    #[test]
    fn search_finds_inverse_relation() {
        let s = z2();
        let (m, b, r) = (&s.monoid, &s.bio, &s.rees);
        let e11 = s.e11();
        for i in r.rows() {
            for j in r.cols() {
                let w = [e11, r.e(i, j), e11, r.e(0, j), r.e(i, 0)];
                match derive_equal(m, b, &w, &[e11], SearchBounds::default()).unwrap() {
                    Derivation::Found(cert) => {
                        assert!(verify_certificate(m, &cert).is_valid());
                        assert!(cert.len() <= 4);
                    }
                    other => panic!("({i},{j}): {other:?}"),
                }
            }
        }
    }

    #[test]
    fn search_edge_cases() {
        let s = z2();
        let (m, b, r) = (&s.monoid, &s.bio, &s.rees);
        let e11 = s.e11();
        let w = [e11, r.e(2, 1)];
        match derive_equal(m, b, &w, &w, SearchBounds::default()).unwrap() {
            Derivation::Found(c) => assert!(c.is_empty()),
            other => panic!("{other:?}"),
        }
        let d = derive_equal(
            m,
            b,
            &[r.e(0, 1), r.e(2, 0)],
            &[e11],
            SearchBounds::default(),
        );
        assert!(matches!(d.unwrap(), Derivation::Unequal { .. }));
        assert!(derive_equal(m, b, &[m.identity() + 1], &[e11], SearchBounds::default()).is_err());
        let tight = SearchBounds {
            max_word_len: Some(5),
            max_states: 3,
        };
        let far = [e11, r.e(3, 2), e11, r.e(0, 2), r.e(3, 0)];
        assert!(matches!(
            derive_equal(m, b, &far, &[e11], tight).unwrap(),
            Derivation::NotFound { capped: true, .. }
        ));
    }

    #[test]
    fn forged_certificates_fail() {
        let s = z2();
        let (m, b, r) = (&s.monoid, &s.bio, &s.rees);
        let e11 = s.e11();
        let w = vec![e11, r.e(1, 2), e11, r.e(0, 2), r.e(1, 0)];
        let Derivation::Found(cert) =
            derive_equal(m, b, &w, &[e11], SearchBounds::default()).unwrap()
        else {
            panic!("search failed")
        };
        assert!(verify_certificate(m, &cert).is_valid());
        assert!(verify_certificate(m, &cert.reversed()).is_valid());

        let mut bad_end = cert.clone();
        bad_end.end = vec![r.e(0, 1)];
        assert!(matches!(
            verify_certificate(m, &bad_end),
            Verification::Invalid { step: None, .. }
        ));

        // a pair whose products avoid both factors
        let i = r.column_for_tuple(&[1, 0]).unwrap();
        let (x, y) = (r.e(0, 0), r.e(i, 1));
        assert!(!b.is_basic(m, x, y));
        let forged = DerivationCertificate {
            start: vec![x, y],
            steps: vec![RewriteStep::contract(0, x, y)],
            end: vec![m.mul(x, y)],
        };
        assert!(matches!(
            verify_certificate(m, &forged),
            Verification::Invalid { step: Some(0), .. }
        ));

        let json = cert.to_json();
        assert_eq!(DerivationCertificate::from_json(&json).unwrap(), cert);
    }

    #[test]
    fn builder_splices_and_rejects_mismatch() {
        let s = z2();
        let (m, b, r) = (&s.monoid, &s.bio, &s.rees);
        let (e11, e12) = (r.e(0, 0), r.e(0, 1));
        let inner = {
            let mut c = CertBuilder::new(m, b, vec![e11, e12]);
            c.contract(0, e11, e12).unwrap();
            c.finish()
        };
        let mut outer = CertBuilder::new(m, b, vec![e12, e11, e12]);
        outer.splice(1, &inner).unwrap();
        assert_eq!(outer.word(), &[e12, e12]);
        assert!(outer.splice(1, &inner).is_err());
        outer.splice_reversed(1, &inner).unwrap();
        let cert = outer.finish();
        assert_eq!(cert.end, vec![e12, e11, e12]);
        assert!(verify_certificate(m, &cert).is_valid());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]
            #[test]
            fn steps_preserve_phi(letters in proptest::collection::vec(0usize..25, 1..7), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..8)) {
                thread_local!(static S: Structure = z2());
                S.with(|s| {
                    let (m, b) = (&s.monoid, &s.bio);
                    let mut word: Vec<_> = letters.iter().map(|&k| m.idempotents()[k]).collect();
                    let image = phi_eval(m, &word).unwrap();
                    for pick in &picks {
                        let steps = applicable_steps(m, b, &word, 10);
                        if steps.is_empty() { break; }
                        let step = steps[pick.index(steps.len())];
                        let next = apply_step(m, b, &word, step).unwrap();
                        prop_assert_eq!(phi_eval(m, &next).unwrap(), image);
                        prop_assert_eq!(apply_step(m, b, &next, step.inverse()).unwrap(), word.clone());
                        word = next;
                    }
                    Ok(())
                })?;
            }
        }
    }
}
