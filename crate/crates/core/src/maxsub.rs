//! The maximal subgroup of IG(E) at `ē_11`.
//!
//! Generators `w_a` are represented by fixed canonical words. A [`Reducer`]
//! precomputes certificates for the building blocks (one per cell of `P`,
//! one per pair of group elements, one per factor shape) and uses them to
//! rewrite any word of rank-1 letters whose image lies in `H_11` to the
//! canonical word of its value. [`verify_theorem`] runs the structural audits,
//! the lemma replays and the certified isomorphism checks for one `(G, n)`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::biorder::classify_squares;
use crate::endo::{compose, monoid_size, ElementId, HClassIso, DEFAULT_MONOID_CAP};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GElem};
use crate::lemmas::{replay, replay_all, Lemma, LemmaInstance, Selection};
use crate::rees::{Col, ReesCoords, ReesDecomposition, Row};
use crate::structure::Structure;
use crate::words::{
    apply_step, phi_eval, verify_certificate, CertBuilder, DerivationCertificate, RewriteStep,
    SearchBounds, Verification,
};

/// The group element named by `ē_11 ē_ij ē_11`, i.e. `p_ji^{-1}`.
pub fn g_of(rees: &ReesDecomposition, i: Row, j: Col) -> GElem {
    rees.group().inv(rees.p(j, i))
}

/// Row `i_a` of the canonical word `[ē_11, ē(i_a, 2), ē_11]` of `w_a`.
pub fn canonical_row(rees: &ReesDecomposition, a: GElem) -> Row {
    let g = rees.group();
    let mut tuple = vec![g.identity(); rees.n() - 1];
    tuple[0] = g.inv(a);
    rees.column_for_tuple(&tuple).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WGenerator {
    pub a: GElem,
    pub word: Vec<ElementId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionTrace {
    pub input: Vec<ElementId>,
    /// `(i_t, j_t)` of the letters between the outer `ē_11`s.
    pub factors: Vec<(Row, Col)>,
    pub result: GElem,
    pub certificate: DerivationCertificate,
}

/// Value of a word of rank-1 idempotents whose image is in `H_11`:
/// `Π_t p_{j_{t-1} i_t} p_{j_t i_t}^{-1}` with `j_0 = 1`.
pub fn evaluate(s: &Structure, word: &[ElementId]) -> Result<GElem> {
    let coords = d_coords(s, word)?;
    if coords.first().map(|c| c.i) != Some(0) || coords.last().map(|c| c.j) != Some(0) {
        return Err(Error::Invalid(format!(
            "image of {word:?} is not in the H-class of e_11"
        )));
    }
    let (g, r) = (s.group(), &s.rees);
    let mut acc = g.identity();
    let mut prev = 0;
    for c in coords {
        acc = g.mul(acc, g.mul(r.p(prev, c.i), g.inv(r.p(c.j, c.i))));
        prev = c.j;
    }
    Ok(acc)
}

fn d_coords(s: &Structure, word: &[ElementId]) -> Result<Vec<ReesCoords>> {
    if word.is_empty() {
        return Err(Error::Invalid("words must be nonempty".into()));
    }
    word.iter()
        .map(|&x| {
            s.monoid.get(x)?;
            if !s.monoid.is_idempotent(x) || s.monoid.rank(x) != 1 {
                return Err(Error::Invalid(format!(
                    "letter {x} is outside the rank-1 D-class"
                )));
            }
            s.rees.to_coords(&s.monoid, x)
        })
        .collect()
}

/// Precomputed certificates for rewriting words into canonical form.
pub struct Reducer<'a> {
    s: &'a Structure,
    canonical: Vec<Vec<ElementId>>,
    rows: Vec<Row>,
    /// `[e11, eij, e11] ~ canonical(g_of(i, j))`, indexed `i * n + j`
    bridges: Vec<DerivationCertificate>,
    /// `canonical(u) canonical(v) ~ canonical(uv)`, indexed `u * |G| + v`
    homs: Vec<DerivationCertificate>,
    /// `[e11, e1j', eij, e11] ~ canonical(p_j'i g_of(i, j))`,
    /// indexed `(j' * |I| + i) * n + j`
    factors: Vec<DerivationCertificate>,
}

impl<'a> Reducer<'a> {
    pub fn new(s: &'a Structure) -> Result<Self> {
        Self::with_bounds(s, SearchBounds::default())
    }

    pub fn with_bounds(s: &'a Structure, bounds: SearchBounds) -> Result<Self> {
        if s.n() < 3 {
            return Err(Error::RankTooSmall(s.n()));
        }
        let (g, r) = (s.group(), &s.rees);
        let e11 = s.e11();
        let rows: Vec<Row> = g.elements().map(|a| canonical_row(r, a)).collect();
        let canonical: Vec<Vec<ElementId>> = g
            .elements()
            .map(|a| {
                if a == g.identity() {
                    vec![e11]
                } else {
                    vec![e11, r.e(rows[a], 1), e11]
                }
            })
            .collect();
        let mut red = Self {
            s,
            canonical,
            rows,
            bridges: Vec::new(),
            homs: Vec::new(),
            factors: Vec::new(),
        };
        let n = s.n();
        red.bridges = (0..r.row_count() * n)
            .into_par_iter()
            .map(|x| red.make_bridge(x / n, x % n, bounds))
            .collect::<Result<_>>()?;
        let m = g.order();
        red.homs = (0..m * m)
            .into_par_iter()
            .map(|x| red.make_hom(x / m, x % m, bounds))
            .collect::<Result<_>>()?;
        let rc = r.row_count();
        red.factors = (0..n * rc * n)
            .into_par_iter()
            .map(|x| red.make_factor(x / (rc * n), (x / n) % rc, x % n))
            .collect::<Result<_>>()?;
        Ok(red)
    }

    pub fn structure(&self) -> &Structure {
        self.s
    }

    pub fn canonical(&self, a: GElem) -> &[ElementId] {
        &self.canonical[a]
    }

    pub fn generator(&self, a: GElem) -> WGenerator {
        WGenerator {
            a,
            word: self.canonical[a].clone(),
        }
    }

    pub fn g_of(&self, i: Row, j: Col) -> WGenerator {
        self.generator(g_of(&self.s.rees, i, j))
    }

    pub fn bridge(&self, i: Row, j: Col) -> &DerivationCertificate {
        &self.bridges[i * self.s.n() + j]
    }

    pub fn hom(&self, u: GElem, v: GElem) -> &DerivationCertificate {
        &self.homs[u * self.s.group().order() + v]
    }

    pub fn factor(&self, j0: Col, i: Row, j: Col) -> &DerivationCertificate {
        let n = self.s.n();
        &self.factors[(j0 * self.s.rees.row_count() + i) * n + j]
    }

    fn builder(&self, start: Vec<ElementId>) -> CertBuilder<'a> {
        CertBuilder::new(&self.s.monoid, &self.s.bio, start)
    }

    fn make_bridge(&self, i: Row, j: Col, bounds: SearchBounds) -> Result<DerivationCertificate> {
        let r = &self.s.rees;
        let a = g_of(r, i, j);
        let e11 = self.s.e11();
        if a == self.s.group().identity() {
            replay(self.s, LemmaInstance::TrivialEntry { i, j }, bounds)
        } else if (i, j) == (self.rows[a], 1) {
            Ok(DerivationCertificate::empty(vec![e11, r.e(i, j), e11]))
        } else {
            let inst = LemmaInstance::EqualEntries {
                i,
                j,
                i2: self.rows[a],
                j2: 1,
            };
            replay(self.s, inst, bounds)
        }
    }

    fn make_hom(&self, u: GElem, v: GElem, bounds: SearchBounds) -> Result<DerivationCertificate> {
        let g = self.s.group();
        let e11 = self.s.e11();
        let (cu, cv) = (self.canonical(u), self.canonical(v));
        let mut b = self.builder([cu, cv].concat());
        if u == g.identity() {
            b.contract(0, e11, e11)?;
        } else if v == g.identity() {
            b.contract(cu.len() - 1, e11, e11)?;
        } else {
            let inst = LemmaInstance::Multiplicative { u, v };
            let mult = replay(self.s, inst, bounds)?;
            // rows of the multiplicative relation's start word
            let i = self.s.rees.to_coords(&self.s.monoid, mult.start[1])?.i;
            let l = self.s.rees.to_coords(&self.s.monoid, mult.start[4])?.i;
            b.splice_reversed(0, self.bridge(i, 1))?;
            b.splice_reversed(3, self.bridge(l, 2))?;
            b.splice(0, &mult)?;
            b.splice(0, self.bridge(i, 2))?;
        }
        let cert = b.finish();
        self.check_end(&cert, g.mul(u, v))?;
        Ok(cert)
    }

    fn make_factor(&self, j0: Col, i: Row, j: Col) -> Result<DerivationCertificate> {
        let (g, r) = (self.s.group(), &self.s.rees);
        let e11 = self.s.e11();
        let (e1j0, eij0, eij) = (r.e(0, j0), r.e(i, j0), r.e(i, j));
        let b_val = r.p(j0, i);
        let mut b = self.builder(vec![e11, e1j0, eij, e11]);
        b.splice_reversed(0, self.hom(b_val, g.inv(b_val)))?;
        let p = self.canonical(b_val).len();
        b.splice_reversed(p, self.bridge(i, j0))?;
        b.contract(p + 2, e11, e1j0)?;
        b.contract(p + 1, eij0, e1j0)?;
        b.contract(p + 1, eij0, eij)?;
        b.splice(p, self.bridge(i, j))?;
        let gij = g_of(r, i, j);
        b.splice(0, self.hom(b_val, gij))?;
        let cert = b.finish();
        self.check_end(&cert, g.mul(b_val, gij))?;
        Ok(cert)
    }

    fn check_end(&self, cert: &DerivationCertificate, a: GElem) -> Result<()> {
        if cert.end != self.canonical[a] {
            return Err(Error::Falsified(format!(
                "derivation ends at {:?}, not at the canonical word of {a}",
                cert.end
            )));
        }
        Ok(())
    }

    /// Rewrites `word` to the canonical word of its value, with a certificate.
    pub fn reduce(&self, word: &[ElementId]) -> Result<ReductionTrace> {
        let s = self.s;
        let (g, r, m) = (s.group(), &s.rees, &s.monoid);
        let result = evaluate(s, word)?;
        let e11 = s.e11();
        let mut b = self.builder(word.to_vec());
        if word[0] != e11 {
            b.expand(0, e11, word[0])?;
        }
        let last = *word.last().unwrap();
        if last != e11 {
            let end = b.word().len() - 1;
            b.expand(end, last, e11)?;
        }
        let sandwiched = b.word().to_vec();
        let inner = sandwiched.get(1..sandwiched.len() - 1).unwrap_or(&[]);
        let factors: Vec<(Row, Col)> = inner
            .iter()
            .map(|&x| r.to_coords(m, x).map(|c| (c.i, c.j)))
            .collect::<Result<_>>()?;
        match sandwiched.len() {
            1 => {}
            2 => {
                b.contract(0, e11, e11)?;
            }
            _ => {
                b.expand(0, e11, e11)?;
                let mut pos = 2;
                for &(i, j) in &factors[..factors.len() - 1] {
                    let (x, e1j) = (r.e(i, j), r.e(0, j));
                    b.expand(pos, x, e1j)?;
                    b.expand(pos + 1, e11, e1j)?;
                    b.expand(pos + 1, e11, e11)?;
                    pos += 4;
                }
                let mut values = Vec::with_capacity(factors.len());
                let mut prev = 0;
                for &(i, j) in &factors {
                    values.push((prev, i, j));
                    prev = j;
                }
                for (t, &(j0, i, j)) in values.iter().enumerate().rev() {
                    b.splice(4 * t, self.factor(j0, i, j))?;
                }
                let value = |&(j0, i, j): &(Col, Row, Col)| g.mul(r.p(j0, i), g_of(r, i, j));
                let mut acc = value(&values[0]);
                for v in &values[1..] {
                    let x = value(v);
                    b.splice(0, self.hom(acc, x))?;
                    acc = g.mul(acc, x);
                }
                if acc != result {
                    return Err(Error::Falsified(format!(
                        "factor values multiply to {acc}, formula gives {result}"
                    )));
                }
            }
        }
        let certificate = b.finish();
        self.check_end(&certificate, result)?;
        Ok(ReductionTrace {
            input: word.to_vec(),
            factors,
            result,
            certificate,
        })
    }

    /// Whether the reduction value agrees with `psi(phi_eval(word))`.
    pub fn eval_is_phi(&self, word: &[ElementId]) -> Result<bool> {
        let trace = self.reduce(word)?;
        let image = phi_eval(&self.s.monoid, word)?;
        Ok(self.s.monoid.psi(image) == Some(trace.result))
    }
}

#[derive(Debug, Clone)]
pub struct TheoremOptions {
    pub seed: u64,
    /// Number of random words for the injectivity and invariance checks.
    pub words: usize,
    /// Random rewrite steps applied to each of those words.
    pub perturbations: usize,
    pub max_word_len: usize,
    pub lemmas: Selection,
    pub search: SearchBounds,
    pub cap: u128,
    /// Where to write certificate files; nothing is written if `None`.
    pub out_dir: Option<PathBuf>,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            words: 1000,
            perturbations: 100,
            max_word_len: 8,
            lemmas: Selection::All,
            search: SearchBounds::default(),
            cap: DEFAULT_MONOID_CAP,
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Verified,
    Falsified,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TheoremCounts {
    pub group_order: usize,
    pub elements: usize,
    pub idempotents: usize,
    pub d_class: usize,
    pub rows: usize,
    pub cols: usize,
    pub squares: usize,
    pub lemma_instances: usize,
    pub words: usize,
    pub rewrite_steps: usize,
    pub certificate_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub group: String,
    pub n: usize,
    pub counts: TheoremCounts,
    pub audits: Vec<Audit>,
    pub certificates: Vec<String>,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn failures(&self) -> impl Iterator<Item = &Audit> {
        self.audits.iter().filter(|a| !a.pass)
    }
}

type Check<'a> = Box<dyn Fn() -> Result<(String, TheoremCounts)> + Send + Sync + 'a>;

fn ok(detail: String) -> Result<(String, TheoremCounts)> {
    Ok((detail, TheoremCounts::default()))
}

fn fail<T>(msg: String) -> Result<T> {
    Err(Error::Falsified(msg))
}

fn check_cert(s: &Structure, cert: &DerivationCertificate) -> Result<()> {
    match verify_certificate(&s.monoid, cert) {
        Verification::Valid => Ok(()),
        Verification::Invalid { step, reason } => {
            fail(format!("certificate rejected at step {step:?}: {reason}"))
        }
    }
}

/// A random word of rank-1 idempotents whose image lies in `H_11`.
fn random_h_word(s: &Structure, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<ElementId> {
    let r = &s.rees;
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len)
        .map(|t| {
            let i = if t == 0 {
                0
            } else {
                rng.gen_range(0..r.row_count())
            };
            let j = if t + 1 == len {
                0
            } else {
                rng.gen_range(0..s.n())
            };
            r.e(i, j)
        })
        .collect()
}

/// A random valid rewrite step that keeps every letter in the rank-1 D-class.
fn random_d_step(
    s: &Structure,
    word: &[ElementId],
    rng: &mut ChaCha8Rng,
    max_len: usize,
) -> Option<RewriteStep> {
    let m = &s.monoid;
    for _ in 0..64 {
        if word.len() > 1 && (word.len() >= max_len || rng.gen_bool(0.5)) {
            let pos = rng.gen_range(0..word.len() - 1);
            let (e, f) = (word[pos], word[pos + 1]);
            if s.bio.is_basic(m, e, f) {
                return Some(RewriteStep::contract(pos, e, f));
            }
        } else if word.len() < max_len {
            let pos = rng.gen_range(0..word.len());
            let options = s.bio.expansions(m, word[pos]);
            let &(e, f) = &options[rng.gen_range(0..options.len())];
            if m.rank(e) == 1 && m.rank(f) == 1 {
                return Some(RewriteStep::expand(pos, e, f));
            }
        }
    }
    None
}

struct WordOutcome {
    image: ElementId,
    end: Vec<ElementId>,
    steps: usize,
    walk: usize,
}

fn check_word(
    red: &Reducer,
    word: Vec<ElementId>,
    seed: u64,
    opts: &TheoremOptions,
) -> Result<WordOutcome> {
    let s = red.structure();
    let m = &s.monoid;
    let image = phi_eval(m, &word)?;
    let expected = m
        .psi(image)
        .ok_or_else(|| Error::Falsified(format!("{word:?} does not map into H_11")))?;
    let trace = red.reduce(&word)?;
    check_cert(s, &trace.certificate)?;
    if trace.result != expected {
        return fail(format!(
            "{word:?} reduces to {} but psi(phi) = {expected}",
            trace.result
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = word;
    let cap = opts.max_word_len + 8;
    let mut walk = 0;
    for _ in 0..opts.perturbations {
        let Some(step) = random_d_step(s, &current, &mut rng, cap) else {
            continue;
        };
        current = apply_step(m, &s.bio, &current, step)?;
        walk += 1;
        let value = evaluate(s, &current)?;
        if value != expected || m.psi(phi_eval(m, &current)?) != Some(expected) {
            return fail(format!(
                "rewriting to {current:?} changed the value from {expected} to {value}"
            ));
        }
    }
    let end_trace = red.reduce(&current)?;
    check_cert(s, &end_trace.certificate)?;
    if end_trace.certificate.end != trace.certificate.end {
        return fail(format!("{current:?} reduces to a different canonical word"));
    }
    Ok(WordOutcome {
        image,
        end: trace.certificate.end.clone(),
        steps: trace.certificate.len() + end_trace.certificate.len(),
        walk,
    })
}

#[derive(Serialize)]
struct HomEntry<'a> {
    u: GElem,
    v: GElem,
    uv: GElem,
    certificate: &'a DerivationCertificate,
}

#[derive(Serialize)]
struct BridgeEntry<'a> {
    /// 1-based row and column.
    i: usize,
    j: usize,
    a: GElem,
    certificate: &'a DerivationCertificate,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String> {
    std::fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invalid(format!("cannot serialize {name}: {e}")))?;
    std::fs::write(dir.join(name), text + "\n")?;
    Ok(name.to_string())
}

/// Certifies, for one `(G, n)`, that the maximal subgroup of IG(E) at `ē_11`
/// is isomorphic to `G`.
pub fn verify_theorem(
    group: &FiniteGroup,
    n: usize,
    opts: &TheoremOptions,
) -> Result<TheoremReport> {
    if n < 3 {
        return Err(Error::RankTooSmall(n));
    }
    let falsified = |name: &str, e: Error| TheoremReport {
        group: group.name().to_string(),
        n,
        counts: TheoremCounts::default(),
        audits: vec![Audit {
            name: name.to_string(),
            pass: false,
            detail: e.to_string(),
        }],
        certificates: Vec::new(),
        verdict: Verdict::Falsified,
    };
    let built = match Structure::build_capped(group, n, opts.cap) {
        Ok(s) => s,
        Err(e @ Error::Falsified(_)) => return Ok(falsified("construction", e)),
        Err(e) => return Err(e),
    };
    let s = &built;
    let red = match Reducer::with_bounds(s, opts.search) {
        Ok(red) => red,
        Err(e @ (Error::Falsified(_) | Error::Invalid(_))) => {
            return Ok(falsified("generators", e))
        }
        Err(e) => return Err(e),
    };
    let red = &red;
    let (g, m, r) = (s.group(), &s.monoid, &s.rees);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let words: Vec<(Vec<ElementId>, u64)> = (0..opts.words)
        .map(|_| (random_h_word(s, &mut rng, opts.max_word_len), rng.gen()))
        .collect();

    let mut checks: Vec<(String, Check)> = vec![
        (
            "group-axioms".into(),
            Box::new(|| {
                FiniteGroup::from_file(g.to_file())?;
                ok(format!("order {}", g.order()))
            }),
        ),
        (
            "monoid-size".into(),
            Box::new(|| {
                let expected = monoid_size(g.order(), n).unwrap_or(0);
                if m.len() as u128 != expected {
                    return fail(format!("{} elements, expected {expected}", m.len()));
                }
                ok(format!("{} elements", m.len()))
            }),
        ),
        (
            "idempotents".into(),
            Box::new(|| {
                let brute: Vec<ElementId> = (0..m.len())
                    .into_par_iter()
                    .filter(|&a| {
                        let x = m.element(a);
                        compose(g, x, x).map(|y| &y == x).unwrap_or(false)
                    })
                    .collect();
                if brute != m.idempotents() {
                    return fail(format!(
                        "{} idempotents by direct check, {} in the table",
                        brute.len(),
                        m.idempotents().len()
                    ));
                }
                ok(format!("{} idempotents", brute.len()))
            }),
        ),
        (
            "greens-relations".into(),
            Box::new(|| {
                let (generic, structural) = (m.greens_generic(), m.greens_structural());
                let d = generic.discrepancies(&structural);
                if d != [0; 4] {
                    return fail(format!("R/L/H/D discrepancies {d:?}"));
                }
                HClassIso::verify(m, &structural)?;
                let e11 = s.e11();
                let dclass = structural.d.class_containing(e11);
                let expected = r.row_count() * g.order() * n;
                let h_ok = dclass.iter().all(|&a| {
                    let h = structural.h.class_containing(a);
                    h.len() == g.order() && h.iter().filter(|&&x| m.is_idempotent(x)).count() == 1
                });
                if dclass.len() != expected || !h_ok {
                    return fail(format!(
                        "rank-1 D-class has {} elements, expected {expected} in H-classes of size {}",
                        dclass.len(),
                        g.order()
                    ));
                }
                ok(format!(
                    "{} classes of D agree; rank-1 D-class {} = {} x {} x {}",
                    structural.d.class_count(),
                    dclass.len(),
                    r.row_count(),
                    g.order(),
                    n
                ))
            }),
        ),
        (
            "rees-coordinates".into(),
            Box::new(|| {
                let d = m.rank_one();
                let coords: Vec<ReesCoords> = d
                    .iter()
                    .map(|&a| r.to_coords(m, a))
                    .collect::<Result<_>>()?;
                for (&a, &c) in d.iter().zip(&coords) {
                    if r.from_coords(m, c)? != a {
                        return fail(format!("coordinates of {a} do not round-trip"));
                    }
                }
                let bad = (0..d.len())
                    .into_par_iter()
                    .flat_map_iter(|x| (0..d.len()).map(move |y| (x, y)))
                    .find_any(|&(x, y)| {
                        let prod = r.rees_mul(coords[x], coords[y]);
                        r.from_coords(m, prod).ok() != Some(m.mul(d[x], d[y]))
                    });
                if let Some((x, y)) = bad {
                    return fail(format!("Rees product of {} and {} is wrong", d[x], d[y]));
                }
                ok(format!(
                    "{} elements, {} products",
                    d.len(),
                    d.len() * d.len()
                ))
            }),
        ),
        (
            "squares".into(),
            Box::new(|| {
                let rep = classify_squares(m, r, &s.bio)?;
                let counts = TheoremCounts {
                    squares: rep.total,
                    ..Default::default()
                };
                Ok((
                    format!(
                        "{} squares, {} rectangular bands, all singular exactly when banded",
                        rep.total, rep.rect_band
                    ),
                    counts,
                ))
            }),
        ),
        (
            "basic-pairs".into(),
            Box::new(|| {
                let es = m.idempotents();
                let mut pairs = 0;
                for &e in es {
                    for &f in es {
                        if s.bio.is_basic(m, e, f) {
                            pairs += 1;
                            if !m.is_idempotent(m.mul(e, f)) {
                                return fail(format!("basic product {e}*{f} is not idempotent"));
                            }
                        }
                    }
                }
                ok(format!("{pairs} basic pairs"))
            }),
        ),
    ];
    for lemma in Lemma::ALL {
        checks.push((
            format!("lemma:{}", lemma.id()),
            Box::new(move || {
                let rep = replay_all(s, lemma, opts.lemmas, opts.search)?;
                if !rep.passed() {
                    return fail(format!(
                        "{} of {} instances failed, first: {}",
                        rep.failures.len(),
                        rep.instances,
                        rep.failures[0]
                    ));
                }
                let counts = TheoremCounts {
                    lemma_instances: rep.instances,
                    certificate_steps: rep.total_steps,
                    ..Default::default()
                };
                Ok((
                    format!(
                        "{} ({}): {} instances certified",
                        lemma.name(),
                        lemma.id(),
                        rep.instances
                    ),
                    counts,
                ))
            }),
        ));
    }
    checks.push((
        "generators".into(),
        Box::new(|| {
            let e11 = s.e11();
            for i in r.rows() {
                for j in r.cols() {
                    let cert = red.bridge(i, j);
                    check_cert(s, cert)?;
                    let a = g_of(r, i, j);
                    let start = vec![e11, r.e(i, j), e11];
                    if cert.start != start || cert.end != red.canonical(a) {
                        return fail(format!(
                            "bridge at ({}, {}) has wrong endpoints",
                            i + 1,
                            j + 1
                        ));
                    }
                    if m.psi(phi_eval(m, &start)?) != Some(a) {
                        return fail(format!(
                            "e11 e({},{}) e11 does not evaluate to {a}",
                            i + 1,
                            j + 1
                        ));
                    }
                }
            }
            ok(format!("{} cells of P certified", r.row_count() * n))
        }),
    ));
    checks.push((
        "surjectivity".into(),
        Box::new(|| {
            for a in g.elements() {
                let word = red.canonical(a);
                if m.psi(phi_eval(m, word)?) != Some(a) {
                    return fail(format!("canonical word of {a} evaluates elsewhere"));
                }
                let trace = red.reduce(word)?;
                check_cert(s, &trace.certificate)?;
                if trace.result != a {
                    return fail(format!("canonical word of {a} reduces to {}", trace.result));
                }
            }
            ok(format!("all {} elements realized", g.order()))
        }),
    ));
    checks.push((
        "homomorphism".into(),
        Box::new(|| {
            let mut steps = 0;
            for u in g.elements() {
                for v in g.elements() {
                    let cert = red.hom(u, v);
                    check_cert(s, cert)?;
                    let uv = g.mul(u, v);
                    let start = [red.canonical(u), red.canonical(v)].concat();
                    if cert.start != start || cert.end != red.canonical(uv) {
                        return fail(format!(
                            "product certificate for ({u}, {v}) has wrong endpoints"
                        ));
                    }
                    if evaluate(s, &start)? != uv {
                        return fail(format!("w_{u} w_{v} does not evaluate to {uv}"));
                    }
                    steps += cert.len();
                }
            }
            let counts = TheoremCounts {
                certificate_steps: steps,
                ..Default::default()
            };
            Ok((
                format!("{} products certified", g.order() * g.order()),
                counts,
            ))
        }),
    ));
    checks.push((
        "injectivity".into(),
        Box::new(|| {
            let outcomes: Vec<WordOutcome> = words
                .par_iter()
                .map(|(w, seed)| check_word(red, w.clone(), *seed, opts))
                .collect::<Result<_>>()?;
            let mut by_image: BTreeMap<ElementId, &[ElementId]> = BTreeMap::new();
            for o in &outcomes {
                let end = by_image.entry(o.image).or_insert(&o.end);
                if *end != o.end.as_slice() {
                    return fail(format!(
                        "words with image {} reduce to different canonical words",
                        o.image
                    ));
                }
            }
            let counts = TheoremCounts {
                words: outcomes.len(),
                rewrite_steps: outcomes.iter().map(|o| o.walk).sum(),
                certificate_steps: outcomes.iter().map(|o| o.steps).sum(),
                ..Default::default()
            };
            Ok((
                format!(
                    "{} random words, {} distinct images, {} rewrite steps; value constant and equal to psi(phi) throughout",
                    outcomes.len(),
                    by_image.len(),
                    counts.rewrite_steps
                ),
                counts,
            ))
        }),
    ));

    let results: Vec<Result<(String, TheoremCounts)>> =
        checks.par_iter().map(|(_, check)| check()).collect();
    let mut counts = TheoremCounts {
        group_order: g.order(),
        elements: m.len(),
        idempotents: m.idempotents().len(),
        d_class: r.row_count() * g.order() * n,
        rows: r.row_count(),
        cols: n,
        ..Default::default()
    };
    let mut audits = Vec::with_capacity(checks.len());
    for ((name, _), result) in checks.iter().zip(results) {
        match result {
            Ok((detail, c)) => {
                counts.squares += c.squares;
                counts.lemma_instances += c.lemma_instances;
                counts.words += c.words;
                counts.rewrite_steps += c.rewrite_steps;
                counts.certificate_steps += c.certificate_steps;
                audits.push(Audit {
                    name: name.clone(),
                    pass: true,
                    detail,
                });
            }
            Err(e @ Error::ResourceBound { .. }) => return Err(e),
            Err(e) => audits.push(Audit {
                name: name.clone(),
                pass: false,
                detail: e.to_string(),
            }),
        }
    }
    let verdict = if audits.iter().all(|a| a.pass) {
        Verdict::Verified
    } else {
        Verdict::Falsified
    };

    let mut certificates = Vec::new();
    if let Some(dir) = &opts.out_dir {
        let homs: Vec<HomEntry> = g
            .elements()
            .flat_map(|u| g.elements().map(move |v| (u, v)))
            .map(|(u, v)| HomEntry {
                u,
                v,
                uv: g.mul(u, v),
                certificate: red.hom(u, v),
            })
            .collect();
        certificates.push(write_json(dir, "homomorphism.json", &homs)?);
        let bridges: Vec<BridgeEntry> = r
            .rows()
            .flat_map(|i| r.cols().map(move |j| (i, j)))
            .map(|(i, j)| BridgeEntry {
                i: i + 1,
                j: j + 1,
                a: g_of(r, i, j),
                certificate: red.bridge(i, j),
            })
            .collect();
        certificates.push(write_json(dir, "generators.json", &bridges)?);
        let sample: Vec<ReductionTrace> = words
            .iter()
            .take(20)
            .map(|(w, _)| red.reduce(w))
            .collect::<Result<_>>()?;
        certificates.push(write_json(dir, "reductions.json", &sample)?);
    }

    Ok(TheoremReport {
        group: g.name().to_string(),
        n,
        counts,
        audits,
        certificates,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Structure {
        Structure::build(&FiniteGroup::cyclic(2).unwrap(), 3).unwrap()
    }

    fn quick() -> TheoremOptions {
        TheoremOptions {
            words: 60,
            perturbations: 20,
            ..Default::default()
        }
    }

    #[test]
    fn generator_examples() {
        let s = z2();
        let r = &s.rees;
        for j in r.cols() {
            assert_eq!(g_of(r, 0, j), 0);
        }
        for i in r.rows() {
            assert_eq!(g_of(r, i, 0), 0);
        }
        let i = r.column_for_tuple(&[1, 0]).unwrap();
        assert_eq!(g_of(r, i, 1), 1);
        assert_eq!(canonical_row(r, 1), i);
    }

    #[test]
    fn generators_depend_only_on_p() {
        let s = Structure::build(&FiniteGroup::symmetric(3).unwrap(), 3).unwrap();
        let r = &s.rees;
        for i in r.rows() {
            for j in r.cols() {
                let a = g_of(r, i, j);
                let word = [s.e11(), r.e(i, j), s.e11()];
                assert_eq!(s.monoid.psi(phi_eval(&s.monoid, &word).unwrap()), Some(a));
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let s = z2();
        let red = Reducer::new(&s).unwrap();
        let e11 = s.e11();
        let t = red.reduce(&[e11]).unwrap();
        assert_eq!(t.result, 0);
        assert!(t.certificate.is_empty());

        let i = s.rees.column_for_tuple(&[1, 0]).unwrap();
        let t = red.reduce(&[e11, s.rees.e(i, 1), e11]).unwrap();
        assert_eq!(t.result, 1);
        assert_eq!(t.factors, vec![(i, 1)]);
        assert!(verify_certificate(&s.monoid, &t.certificate).is_valid());

        let w = [red.canonical(1), red.canonical(1)].concat();
        let t = red.reduce(&w).unwrap();
        assert_eq!(t.result, 0);
        assert_eq!(t.certificate.end, vec![e11]);
        assert!(verify_certificate(&s.monoid, &t.certificate).is_valid());
        assert!(red.eval_is_phi(&w).unwrap());
    }

    #[test]
    fn reduce_unsandwiched_words() {
        let s = z2();
        let red = Reducer::new(&s).unwrap();
        let r = &s.rees;
        let i = r.column_for_tuple(&[1, 1]).unwrap();
        for word in [
            vec![r.e(0, 2), r.e(i, 0)],
            vec![r.e(0, 1), r.e(i, 2), r.e(3, 1), r.e(2, 0)],
            vec![s.e11(), s.e11()],
            vec![r.e(0, 1), r.e(1, 0)],
        ] {
            let t = red.reduce(&word).unwrap();
            assert!(verify_certificate(&s.monoid, &t.certificate).is_valid());
            assert_eq!(t.certificate.start, word);
            assert!(red.eval_is_phi(&word).unwrap());
        }
    }

    #[test]
    fn reduce_rejects_bad_words() {
        let s = z2();
        let red = Reducer::new(&s).unwrap();
        let r = &s.rees;
        assert!(red.reduce(&[r.e(1, 0)]).is_err());
        assert!(red.reduce(&[s.e11(), r.e(0, 1)]).is_err());
        assert!(red.reduce(&[s.monoid.identity()]).is_err());
        assert!(red.reduce(&[]).is_err());
    }

    #[test]
    fn theorem_z2() {
        let rep = verify_theorem(&FiniteGroup::cyclic(2).unwrap(), 3, &quick()).unwrap();
        assert_eq!(
            rep.verdict,
            Verdict::Verified,
            "{:?}",
            rep.failures().collect::<Vec<_>>()
        );
        assert_eq!(rep.counts.group_order, 2);
        assert_eq!(rep.counts.elements, 216);
    }

    #[test]
    fn theorem_trivial_group() {
        let rep = verify_theorem(&FiniteGroup::cyclic(1).unwrap(), 3, &quick()).unwrap();
        assert_eq!(rep.verdict, Verdict::Verified);
    }

    #[test]
    fn theorem_refuses_rank_two() {
        let err = verify_theorem(&FiniteGroup::cyclic(2).unwrap(), 2, &quick()).unwrap_err();
        assert!(matches!(err, Error::RankTooSmall(2)));
        assert!(err.to_string().contains("requires n ≥ 3"));
    }

    #[test]
    fn theorem_writes_certificates() {
        let dir = std::env::temp_dir().join(format!("igact-theorem-{}", std::process::id()));
        let opts = TheoremOptions {
            out_dir: Some(dir.clone()),
            ..quick()
        };
        let rep = verify_theorem(&FiniteGroup::cyclic(2).unwrap(), 3, &opts).unwrap();
        assert_eq!(rep.certificates.len(), 3);
        for name in &rep.certificates {
            assert!(dir.join(name).exists());
        }
        std::fs::remove_dir_all(dir).unwrap();
    }
}
