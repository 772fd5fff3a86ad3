//! Certified replays of the rewriting arguments about the rank-1 D-class.
//!
//! Each relation is established by a proof script: a fixed list of rewrite
//! templates over named letters, possibly invoking other scripts on a factor
//! of the word. The scripts are plain data; [`bind`] resolves the names for a
//! concrete instance and checks its hypotheses, and [`replay`] runs the
//! script through a [`CertBuilder`] so that every emitted step is validated.
//! If a script step fails, [`replay`] falls back to bounded search.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::biorder::{find_oriented, ESquare, Orientation};
use crate::endo::ElementId;
use crate::error::{Error, Result};
use crate::group::GElem;
use crate::rees::{Col, Row};
use crate::structure::Structure;
use crate::words::{
    derive_equal, verify_certificate, CertBuilder, Derivation, DerivationCertificate, SearchBounds,
    Verification,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// `ef = g` among rank-1 idempotents gives `ē f̄ ~ ḡ`.
    BasicProduct,
    /// `(ē11 ēij ē11)(ē1j ēi1) ~ ē11`.
    Inverse,
    /// `p_ji = 1` gives `ē11 ēij ē11 ~ ē11`.
    TrivialEntry,
    /// `p_ji = p_jl` gives `ē11 ēij ē11 ~ ē11 ēlj ē11`.
    SharedRowEntry,
    /// `p_ji = p_ki` gives `ē11 ēij ē11 ~ ē11 ēik ē11`.
    SharedColumnEntry,
    /// `p_ji = p_j'i'` gives `ē11 ēij ē11 ~ ē11 ēi'j' ē11`.
    EqualEntries,
    /// `w_u w_v ~ w_uv`.
    Multiplicative,
}

impl Lemma {
    pub const ALL: [Lemma; 7] = [
        Lemma::BasicProduct,
        Lemma::Inverse,
        Lemma::TrivialEntry,
        Lemma::SharedRowEntry,
        Lemma::SharedColumnEntry,
        Lemma::EqualEntries,
        Lemma::Multiplicative,
    ];

    /// Numeric id used on the command line.
    pub fn id(self) -> &'static str {
        match self {
            Lemma::BasicProduct => "3.2",
            Lemma::Inverse => "3.5",
            Lemma::TrivialEntry => "3.6",
            Lemma::SharedRowEntry => "3.7i",
            Lemma::SharedColumnEntry => "3.7ii",
            Lemma::EqualEntries => "3.8",
            Lemma::Multiplicative => "3.9",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Lemma::BasicProduct => "basic-product",
            Lemma::Inverse => "inverse",
            Lemma::TrivialEntry => "trivial-entry",
            Lemma::SharedRowEntry => "shared-row-entry",
            Lemma::SharedColumnEntry => "shared-column-entry",
            Lemma::EqualEntries => "equal-entries",
            Lemma::Multiplicative => "multiplicative",
        }
    }

    pub fn parse(s: &str) -> Option<Lemma> {
        let s = match s {
            "3.7(i)" => "3.7i",
            "3.7(ii)" => "3.7ii",
            other => other,
        };
        Lemma::ALL
            .into_iter()
            .find(|l| l.id() == s || l.name() == s)
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One concrete instance. Rows and columns are 0-based Rees indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum LemmaInstance {
    BasicProduct { e: ElementId, f: ElementId },
    Inverse { i: Row, j: Col },
    TrivialEntry { i: Row, j: Col },
    SharedRowEntry { i: Row, l: Row, j: Col },
    SharedColumnEntry { i: Row, j: Col, k: Col },
    EqualEntries { i: Row, j: Col, i2: Row, j2: Col },
    Multiplicative { u: GElem, v: GElem },
}

impl LemmaInstance {
    pub fn lemma(&self) -> Lemma {
        match self {
            LemmaInstance::BasicProduct { .. } => Lemma::BasicProduct,
            LemmaInstance::Inverse { .. } => Lemma::Inverse,
            LemmaInstance::TrivialEntry { .. } => Lemma::TrivialEntry,
            LemmaInstance::SharedRowEntry { .. } => Lemma::SharedRowEntry,
            LemmaInstance::SharedColumnEntry { .. } => Lemma::SharedColumnEntry,
            LemmaInstance::EqualEntries { .. } => Lemma::EqualEntries,
            LemmaInstance::Multiplicative { .. } => Lemma::Multiplicative,
        }
    }

    fn from_args(lemma: Lemma, args: &[Val]) -> Result<Self> {
        use Val::*;
        Ok(match (lemma, args) {
            (Lemma::BasicProduct, &[Letter(e), Letter(f)]) => LemmaInstance::BasicProduct { e, f },
            (Lemma::Inverse, &[Row(i), Col(j)]) => LemmaInstance::Inverse { i, j },
            (Lemma::TrivialEntry, &[Row(i), Col(j)]) => LemmaInstance::TrivialEntry { i, j },
            (Lemma::SharedRowEntry, &[Row(i), Row(l), Col(j)]) => {
                LemmaInstance::SharedRowEntry { i, l, j }
            }
            (Lemma::SharedColumnEntry, &[Row(i), Col(j), Col(k)]) => {
                LemmaInstance::SharedColumnEntry { i, j, k }
            }
            (Lemma::EqualEntries, &[Row(i), Col(j), Row(i2), Col(j2)]) => {
                LemmaInstance::EqualEntries { i, j, i2, j2 }
            }
            _ => {
                return Err(Error::Invalid(format!(
                    "bad script arguments for {lemma}: {args:?}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Letter(ElementId),
    Row(Row),
    Col(Col),
}

#[derive(Debug, Clone, Copy)]
enum Item {
    Contract(usize, &'static str, &'static str),
    Expand(usize, &'static str, &'static str),
    Sub {
        pos: usize,
        lemma: Lemma,
        args: &'static [&'static str],
        reversed: bool,
    },
}

#[derive(Debug, Clone, Copy)]
struct Script {
    start: &'static [&'static str],
    end: &'static [&'static str],
    items: &'static [Item],
}

use Item::{Contract, Expand, Sub};

// ē f̄ -> ē k̄ ḡ -> ē ḡ -> ḡ, with k an up-down witness of [[e, g], [h, f]].
const BASIC_PRODUCT: Script = Script {
    start: &["e", "f"],
    end: &["g"],
    items: &[
        Expand(1, "k", "g"),
        Contract(0, "e", "k"),
        Contract(0, "e", "g"),
    ],
};

const INVERSE: Script = Script {
    start: &["e11", "eij", "e11", "e1j", "ei1"],
    end: &["e11"],
    items: &[
        Contract(2, "e11", "e1j"),
        Contract(1, "eij", "e1j"),
        Contract(1, "eij", "ei1"),
        Contract(0, "e11", "ei1"),
    ],
};

const TRIVIAL_ENTRY: Script = Script {
    start: &["e11", "eij", "e11"],
    end: &["e11"],
    items: &[
        Expand(2, "e11", "e11"),
        Sub {
            pos: 3,
            lemma: Lemma::BasicProduct,
            args: &["e1j", "ei1"],
            reversed: true,
        },
        Sub {
            pos: 0,
            lemma: Lemma::Inverse,
            args: &["i", "j"],
            reversed: false,
        },
    ],
};

// ē_ij ~ ē_i1 ē_lj because [[e_i1, e_ij], [e_l1, e_lj]] is a rectangular band
const SHARED_ROW_ENTRY: Script = Script {
    start: &["e11", "eij", "e11"],
    end: &["e11", "elj", "e11"],
    items: &[
        Sub {
            pos: 1,
            lemma: Lemma::BasicProduct,
            args: &["ei1", "elj"],
            reversed: true,
        },
        Contract(0, "e11", "ei1"),
    ],
};

const SHARED_COLUMN_ENTRY: Script = Script {
    start: &["e11", "eij", "e11"],
    end: &["e11", "eik", "e11"],
    items: &[
        Sub {
            pos: 1,
            lemma: Lemma::BasicProduct,
            args: &["eik", "e1j"],
            reversed: true,
        },
        Contract(2, "e1j", "e11"),
    ],
};

// through the row k whose column of P is (1, a, .., a)
const EQUAL_ENTRIES: Script = Script {
    start: &["e11", "eij", "e11"],
    end: &["e11", "ei2j2", "e11"],
    items: &[
        Sub {
            pos: 0,
            lemma: Lemma::SharedRowEntry,
            args: &["i", "k", "j"],
            reversed: false,
        },
        Sub {
            pos: 0,
            lemma: Lemma::SharedColumnEntry,
            args: &["k", "j", "j2"],
            reversed: false,
        },
        Sub {
            pos: 0,
            lemma: Lemma::SharedRowEntry,
            args: &["i2", "k", "j2"],
            reversed: true,
        },
    ],
};

const IDENTICAL: Script = Script {
    start: &["e11", "eij", "e11"],
    end: &["e11", "eij", "e11"],
    items: &[],
};

// columns 2 and 3 of P at rows i = (u^-1, v^-1 u^-1, 1..) and l = (1, v^-1, 1..)
const MULTIPLICATIVE: Script = Script {
    start: &["e11", "ei2", "e11", "e11", "el3", "e11"],
    end: &["e11", "ei3", "e11"],
    items: &[
        Contract(2, "e11", "e11"),
        Sub {
            pos: 2,
            lemma: Lemma::BasicProduct,
            args: &["e12", "el1"],
            reversed: true,
        },
        Contract(1, "ei2", "e12"),
        Contract(2, "el1", "el3"),
        Sub {
            pos: 1,
            lemma: Lemma::BasicProduct,
            args: &["ei2", "el3"],
            reversed: false,
        },
    ],
};

struct Bindings {
    script: Script,
    values: HashMap<&'static str, Val>,
}

impl Bindings {
    fn new(script: Script) -> Self {
        Self {
            script,
            values: HashMap::new(),
        }
    }

    fn set(&mut self, name: &'static str, v: Val) -> &mut Self {
        self.values.insert(name, v);
        self
    }

    fn letter(&self, name: &str) -> Result<ElementId> {
        match self.values.get(name) {
            Some(Val::Letter(x)) => Ok(*x),
            other => Err(Error::Invalid(format!("{name} is bound to {other:?}"))),
        }
    }

    fn word(&self, names: &[&str]) -> Result<Vec<ElementId>> {
        names.iter().map(|n| self.letter(n)).collect()
    }

    fn args(&self, names: &[&str]) -> Result<Vec<Val>> {
        names
            .iter()
            .map(|n| {
                self.values
                    .get(n)
                    .copied()
                    .ok_or_else(|| Error::Invalid(format!("{n} is unbound")))
            })
            .collect()
    }
}

fn check_row(s: &Structure, i: Row) -> Result<()> {
    if i < s.rees.row_count() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("row {} does not exist", i + 1)))
    }
}

fn check_col(s: &Structure, j: Col) -> Result<()> {
    if j < s.n() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("column {} does not exist", j + 1)))
    }
}

fn hypothesis(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what()))
    }
}

/// Resolves the script names for an instance after checking its hypotheses.
fn bind(s: &Structure, inst: LemmaInstance) -> Result<Bindings> {
    let (m, r) = (&s.monoid, &s.rees);
    let e11 = s.e11();
    let letter = |i, j| Val::Letter(r.e(i, j));
    let b = match inst {
        LemmaInstance::BasicProduct { e, f } => {
            for x in [e, f] {
                m.get(x)?;
                hypothesis(m.is_idempotent(x) && m.rank(x) == 1, || {
                    format!("{x} is not a rank-1 idempotent")
                })?;
            }
            let g = m.mul(e, f);
            hypothesis(m.is_idempotent(g), || {
                format!("{e}*{f} = {g} is not idempotent")
            })?;
            let (ce, cf) = (r.to_coords(m, e)?, r.to_coords(m, f)?);
            let sq = ESquare::from_rees(r, ce.i, cf.i, ce.j, cf.j);
            debug_assert_eq!((sq.e, sq.f, sq.g), (e, g, f));
            let k = find_oriented(m, &s.bio, &sq, Orientation::UpDown)
                .ok_or_else(|| Error::Falsified(format!("no up-down witness for {sq:?}")))?;
            let mut b = Bindings::new(BASIC_PRODUCT);
            b.set("e", Val::Letter(e))
                .set("f", Val::Letter(f))
                .set("g", Val::Letter(g))
                .set("k", Val::Letter(k));
            b
        }
        LemmaInstance::Inverse { i, j } | LemmaInstance::TrivialEntry { i, j } => {
            check_row(s, i)?;
            check_col(s, j)?;
            let script = if let LemmaInstance::TrivialEntry { .. } = inst {
                hypothesis(r.p(j, i) == 0, || {
                    format!("p[{}][{}] is not the identity", j + 1, i + 1)
                })?;
                TRIVIAL_ENTRY
            } else {
                INVERSE
            };
            let mut b = Bindings::new(script);
            b.set("e11", Val::Letter(e11))
                .set("eij", letter(i, j))
                .set("e1j", letter(0, j))
                .set("ei1", letter(i, 0))
                .set("i", Val::Row(i))
                .set("j", Val::Col(j));
            b
        }
        LemmaInstance::SharedRowEntry { i, l, j } => {
            check_row(s, i)?;
            check_row(s, l)?;
            check_col(s, j)?;
            hypothesis(r.p(j, i) == r.p(j, l), || {
                format!("p[{j1}][{}] != p[{j1}][{}]", i + 1, l + 1, j1 = j + 1)
            })?;
            let mut b = Bindings::new(SHARED_ROW_ENTRY);
            b.set("e11", Val::Letter(e11))
                .set("eij", letter(i, j))
                .set("elj", letter(l, j))
                .set("ei1", letter(i, 0));
            b
        }
        LemmaInstance::SharedColumnEntry { i, j, k } => {
            check_row(s, i)?;
            check_col(s, j)?;
            check_col(s, k)?;
            hypothesis(r.p(j, i) == r.p(k, i), || {
                format!("p[{}][{i1}] != p[{}][{i1}]", j + 1, k + 1, i1 = i + 1)
            })?;
            let mut b = Bindings::new(SHARED_COLUMN_ENTRY);
            b.set("e11", Val::Letter(e11))
                .set("eij", letter(i, j))
                .set("eik", letter(i, k))
                .set("e1j", letter(0, j));
            b
        }
        LemmaInstance::EqualEntries { i, j, i2, j2 } => {
            check_row(s, i)?;
            check_row(s, i2)?;
            check_col(s, j)?;
            check_col(s, j2)?;
            let a = r.p(j, i);
            hypothesis(a == r.p(j2, i2), || {
                format!("p[{}][{}] != p[{}][{}]", j + 1, i + 1, j2 + 1, i2 + 1)
            })?;
            let script = if (i, j) == (i2, j2) {
                IDENTICAL
            } else {
                EQUAL_ENTRIES
            };
            let mut b = Bindings::new(script);
            b.set("e11", Val::Letter(e11))
                .set("eij", letter(i, j))
                .set("ei2j2", letter(i2, j2))
                .set("i", Val::Row(i))
                .set("j", Val::Col(j))
                .set("i2", Val::Row(i2))
                .set("j2", Val::Col(j2))
                .set("k", Val::Row(r.constant_column(a)));
            b
        }
        LemmaInstance::Multiplicative { u, v } => {
            if s.n() < 3 {
                return Err(Error::RankTooSmall(s.n()));
            }
            let g = s.group();
            g.try_inv(u)?;
            g.try_inv(v)?;
            let (iu, iv) = (g.inv(u), g.inv(v));
            let mut ti = vec![g.identity(); s.n() - 1];
            ti[0] = iu;
            ti[1] = g.mul(iv, iu);
            let mut tl = vec![g.identity(); s.n() - 1];
            tl[1] = iv;
            let (i, l) = (r.column_for_tuple(&ti)?, r.column_for_tuple(&tl)?);
            let mut b = Bindings::new(MULTIPLICATIVE);
            b.set("e11", Val::Letter(e11))
                .set("e12", letter(0, 1))
                .set("ei2", letter(i, 1))
                .set("ei3", letter(i, 2))
                .set("el1", letter(l, 0))
                .set("el3", letter(l, 2));
            b
        }
    };
    Ok(b)
}

// `bounds` of `None` disables the search fallback in sub-derivations
fn run_script(
    s: &Structure,
    b: &Bindings,
    bounds: Option<SearchBounds>,
) -> Result<DerivationCertificate> {
    let script = b.script;
    let mut builder = CertBuilder::new(&s.monoid, &s.bio, b.word(script.start)?);
    for item in script.items {
        match *item {
            Contract(pos, e, f) => {
                builder.contract(pos, b.letter(e)?, b.letter(f)?)?;
            }
            Expand(pos, e, f) => {
                builder.expand(pos, b.letter(e)?, b.letter(f)?)?;
            }
            Sub {
                pos,
                lemma,
                args,
                reversed,
            } => {
                let sub = LemmaInstance::from_args(lemma, &b.args(args)?)?;
                let cert = match bounds {
                    Some(bounds) => replay(s, sub, bounds)?,
                    None => replay_scripted(s, sub)?,
                };
                if reversed {
                    builder.splice_reversed(pos, &cert)?;
                } else {
                    builder.splice(pos, &cert)?;
                }
            }
        }
    }
    let cert = builder.finish();
    let end = b.word(script.end)?;
    if cert.end != end {
        return Err(Error::Invalid(format!(
            "script ended at {:?}, expected {end:?}",
            cert.end
        )));
    }
    Ok(cert)
}

/// Start and end words of an instance, without running its script.
pub fn statement(s: &Structure, inst: LemmaInstance) -> Result<(Vec<ElementId>, Vec<ElementId>)> {
    let b = bind(s, inst)?;
    Ok((b.word(b.script.start)?, b.word(b.script.end)?))
}

/// Follows the proof script only, with no search fallback.
pub fn replay_scripted(s: &Structure, inst: LemmaInstance) -> Result<DerivationCertificate> {
    run_script(s, &bind(s, inst)?, None)
}

/// Emits a certificate for one instance, following its proof script and
/// falling back to bounded search if a scripted step is rejected.
pub fn replay(
    s: &Structure,
    inst: LemmaInstance,
    bounds: SearchBounds,
) -> Result<DerivationCertificate> {
    let b = match bind(s, inst) {
        Ok(b) => b,
        Err(e @ (Error::Hypothesis(_) | Error::Invalid(_) | Error::RankTooSmall(_))) => {
            return Err(e)
        }
        Err(Error::OutOfRange { id, order }) => {
            return Err(Error::Invalid(format!(
                "element {id} out of range ({order})"
            )))
        }
        Err(other) => return search_fallback(s, inst, bounds, other),
    };
    match run_script(s, &b, Some(bounds)) {
        Ok(cert) => Ok(cert),
        Err(err) => search_fallback(s, inst, bounds, err),
    }
}

fn search_fallback(
    s: &Structure,
    inst: LemmaInstance,
    bounds: SearchBounds,
    cause: Error,
) -> Result<DerivationCertificate> {
    let (start, end) = match inst {
        // the script-free statement of the basic-product relation
        LemmaInstance::BasicProduct { e, f } => (vec![e, f], vec![s.monoid.mul(e, f)]),
        _ => {
            let b = bind(s, inst).map_err(|_| Error::Falsified(format!("{inst:?}: {cause}")))?;
            (b.word(b.script.start)?, b.word(b.script.end)?)
        }
    };
    match derive_equal(&s.monoid, &s.bio, &start, &end, bounds)? {
        Derivation::Found(cert) => Ok(cert),
        other => Err(Error::Falsified(format!(
            "{inst:?}: script failed ({cause}) and search gave {other:?}"
        ))),
    }
}

/// Every instance whose hypotheses hold, in a fixed order.
pub fn all_instances(s: &Structure, lemma: Lemma) -> Vec<LemmaInstance> {
    let r = &s.rees;
    let m = &s.monoid;
    let rows = || r.rows();
    let cols = || r.cols();
    let mut out = Vec::new();
    match lemma {
        Lemma::BasicProduct => {
            for i in rows() {
                for j in cols() {
                    for k in rows() {
                        for l in cols() {
                            let (e, f) = (r.e(i, j), r.e(k, l));
                            if m.is_idempotent(m.mul(e, f)) {
                                out.push(LemmaInstance::BasicProduct { e, f });
                            }
                        }
                    }
                }
            }
        }
        Lemma::Inverse | Lemma::TrivialEntry => {
            for i in rows() {
                for j in cols() {
                    if lemma == Lemma::Inverse {
                        out.push(LemmaInstance::Inverse { i, j });
                    } else if r.p(j, i) == 0 {
                        out.push(LemmaInstance::TrivialEntry { i, j });
                    }
                }
            }
        }
        Lemma::SharedRowEntry => {
            for j in cols() {
                for i in rows() {
                    for l in rows().filter(|&l| r.p(j, l) == r.p(j, i)) {
                        out.push(LemmaInstance::SharedRowEntry { i, l, j });
                    }
                }
            }
        }
        Lemma::SharedColumnEntry => {
            for i in rows() {
                for j in cols() {
                    for k in cols().filter(|&k| r.p(k, i) == r.p(j, i)) {
                        out.push(LemmaInstance::SharedColumnEntry { i, j, k });
                    }
                }
            }
        }
        Lemma::EqualEntries => {
            let cells: Vec<(Row, Col)> = rows().flat_map(|i| cols().map(move |j| (i, j))).collect();
            for &(i, j) in &cells {
                for &(i2, j2) in &cells {
                    if r.p(j, i) == r.p(j2, i2) {
                        out.push(LemmaInstance::EqualEntries { i, j, i2, j2 });
                    }
                }
            }
        }
        Lemma::Multiplicative => {
            if s.n() >= 3 {
                for u in s.group().elements() {
                    for v in s.group().elements() {
                        out.push(LemmaInstance::Multiplicative { u, v });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    All,
    /// A seeded uniform sample without replacement (or everything, if fewer).
    Sample {
        size: usize,
        seed: u64,
    },
}

pub fn select_instances(s: &Structure, lemma: Lemma, selection: Selection) -> Vec<LemmaInstance> {
    let mut all = all_instances(s, lemma);
    if let Selection::Sample { size, seed } = selection {
        if all.len() > size {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            all.shuffle(&mut rng);
            all.truncate(size);
        }
    }
    all
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub name: String,
    pub instances: usize,
    pub certified: usize,
    pub total_steps: usize,
    pub failures: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.certified == self.instances
    }
}

/// Replays and independently verifies every selected instance.
pub fn replay_all(
    s: &Structure,
    lemma: Lemma,
    selection: Selection,
    bounds: SearchBounds,
) -> Result<LemmaReport> {
    if lemma == Lemma::Multiplicative && s.n() < 3 {
        return Err(Error::RankTooSmall(s.n()));
    }
    let instances = select_instances(s, lemma, selection);
    let outcomes: Vec<std::result::Result<usize, String>> = instances
        .par_iter()
        .map(|&inst| {
            let cert = replay(s, inst, bounds).map_err(|e| format!("{inst:?}: {e}"))?;
            let (start, end) = statement(s, inst).map_err(|e| e.to_string())?;
            if cert.start != start || cert.end != end {
                return Err(format!("{inst:?}: certificate proves the wrong equation"));
            }
            match verify_certificate(&s.monoid, &cert) {
                Verification::Valid => Ok(cert.len()),
                Verification::Invalid { step, reason } => {
                    Err(format!("{inst:?}: step {step:?}: {reason}"))
                }
            }
        })
        .collect();
    let mut report = LemmaReport {
        lemma: lemma.id().to_string(),
        name: lemma.name().to_string(),
        instances: instances.len(),
        certified: 0,
        total_steps: 0,
        failures: Vec::new(),
    };
    for outcome in outcomes {
        match outcome {
            Ok(steps) => {
                report.certified += 1;
                report.total_steps += steps;
            }
            Err(msg) => report.failures.push(msg),
        }
    }
    Ok(report)
}
