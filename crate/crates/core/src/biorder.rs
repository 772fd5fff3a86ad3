//! The biordered set `E(S)` of End F_n(G): basic products, E-squares in the
//! rank-1 D-class, rectangular bands and singular squares.

use rayon::prelude::*;
use serde::Serialize;

use crate::endo::{ElementId, GreenPartitions, MonoidTable};
use crate::error::{Error, Result};
use crate::rees::{Col, ReesDecomposition, Row};

/// Idempotents with their basic-pair structure cached.
#[derive(Debug, Clone)]
pub struct BiorderedSet {
    idempotents: Vec<ElementId>,
    /// `basic[a * |E| + b]` for idempotent indices `a`, `b`.
    basic: Vec<bool>,
    /// For each idempotent index, the basic pairs `(e, f)` with `ef` equal to it.
    expansions: Vec<Vec<(ElementId, ElementId)>>,
}

/// Basic flags against every idempotent, and `(index, e, f)` expansions.
type BasicRow = (Vec<bool>, Vec<(usize, ElementId, ElementId)>);

impl BiorderedSet {
    /// Builds the basic-pair table and checks that every basic product is
    /// again idempotent.
    pub fn new(monoid: &MonoidTable) -> Result<Self> {
        let idempotents = monoid.idempotents().to_vec();
        let size = idempotents.len();
        let rows: Vec<BasicRow> = idempotents
            .par_iter()
            .map(|&e| {
                let mut basic = vec![false; size];
                let mut exp = Vec::new();
                for (b, &f) in idempotents.iter().enumerate() {
                    let ef = monoid.mul(e, f);
                    let fe = monoid.mul(f, e);
                    if ef == e || ef == f || fe == e || fe == f {
                        basic[b] = true;
                        exp.push((ef, e, f));
                    }
                }
                (basic, exp)
            })
            .collect();
        let mut basic = Vec::with_capacity(size * size);
        let mut expansions = vec![Vec::new(); size];
        for (row, exp) in rows {
            basic.extend(row);
            for (ef, e, f) in exp {
                let Some(k) = monoid.idempotent_index(ef) else {
                    return Err(Error::Falsified(format!(
                        "basic product of {e} and {f} is not idempotent"
                    )));
                };
                expansions[k].push((e, f));
            }
        }
        Ok(Self {
            idempotents,
            basic,
            expansions,
        })
    }

    pub fn idempotents(&self) -> &[ElementId] {
        &self.idempotents
    }

    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }

    /// `{e, f} ∩ {ef, fe} ≠ ∅`; false if either argument is not idempotent.
    pub fn is_basic(&self, monoid: &MonoidTable, e: ElementId, f: ElementId) -> bool {
        match (monoid.idempotent_index(e), monoid.idempotent_index(f)) {
            (Some(a), Some(b)) => self.basic[a * self.len() + b],
            _ => false,
        }
    }

    /// Basic pairs whose product is `x`.
    pub fn expansions(&self, monoid: &MonoidTable, x: ElementId) -> &[(ElementId, ElementId)] {
        monoid
            .idempotent_index(x)
            .map_or(&[], |k| self.expansions[k].as_slice())
    }
}

/// `(e, f, g, h)` with `e R f L g R h L e`, drawn as `[[e, f], [h, g]]`.
///
/// Built from rows `i, k` and columns `j, l` of the Rees coordinates as
/// `e = e_ij`, `f = e_il`, `g = e_kl`, `h = e_kj`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ESquare {
    pub e: ElementId,
    pub f: ElementId,
    pub g: ElementId,
    pub h: ElementId,
    pub rows: [Row; 2],
    pub cols: [Col; 2],
}

impl ESquare {
    pub fn from_rees(rees: &ReesDecomposition, i: Row, k: Row, j: Col, l: Col) -> Self {
        Self {
            e: rees.e(i, j),
            f: rees.e(i, l),
            g: rees.e(k, l),
            h: rees.e(k, j),
            rows: [i, k],
            cols: [j, l],
        }
    }

    pub fn members(&self) -> [ElementId; 4] {
        [self.e, self.f, self.g, self.h]
    }

    /// Checks `e R f L g R h L e` against a set of Green's partitions.
    pub fn satisfies_greens(&self, greens: &GreenPartitions) -> bool {
        greens.r.same(self.e, self.f)
            && greens.l.same(self.f, self.g)
            && greens.r.same(self.g, self.h)
            && greens.l.same(self.h, self.e)
    }
}

pub fn enumerate_esquares(rees: &ReesDecomposition) -> Vec<ESquare> {
    let mut out = Vec::with_capacity(rees.row_count().pow(2) * rees.n().pow(2));
    for i in rees.rows() {
        for k in rees.rows() {
            for j in rees.cols() {
                for l in rees.cols() {
                    out.push(ESquare::from_rees(rees, i, k, j, l));
                }
            }
        }
    }
    out
}

/// Decides whether the square is a rectangular band via `eg = f`, and checks
/// on the way that the other three equalities agree and that a positive
/// answer really is closed under multiplication.
pub fn is_rectangular_band(monoid: &MonoidTable, sq: &ESquare) -> Result<bool> {
    let ESquare { e, f, g, h, .. } = *sq;
    let tests = [
        monoid.mul(e, g) == f,
        monoid.mul(g, e) == h,
        monoid.mul(f, h) == e,
        monoid.mul(h, f) == g,
    ];
    if tests.iter().any(|&t| t != tests[0]) {
        return Err(Error::Falsified(format!(
            "square {sq:?}: the four equalities disagree {tests:?}"
        )));
    }
    if tests[0] {
        let members = sq.members();
        for &x in &members {
            for &y in &members {
                if !members.contains(&monoid.mul(x, y)) {
                    return Err(Error::Falsified(format!(
                        "square {sq:?} passes eg = f but is not closed"
                    )));
                }
            }
        }
    }
    Ok(tests[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    UpDown,
    LeftRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SingularWitness {
    pub k: ElementId,
    pub orientation: Orientation,
}

/// Up-down: `ek = e, fk = f, ke = h, kf = g`.
/// Left-right: `ke = e, kh = h, ek = f, hk = g`.
pub fn witness_holds(
    monoid: &MonoidTable,
    sq: &ESquare,
    k: ElementId,
    orientation: Orientation,
) -> bool {
    let ESquare { e, f, g, h, .. } = *sq;
    let m = |a, b| monoid.mul(a, b);
    monoid.is_idempotent(k)
        && match orientation {
            Orientation::UpDown => m(e, k) == e && m(f, k) == f && m(k, e) == h && m(k, f) == g,
            Orientation::LeftRight => m(k, e) == e && m(k, h) == h && m(e, k) == f && m(h, k) == g,
        }
}

/// First idempotent (any rank, canonical order) singularizing the square,
/// trying up-down before left-right for each candidate.
pub fn find_singularizer(
    monoid: &MonoidTable,
    bio: &BiorderedSet,
    sq: &ESquare,
) -> Option<SingularWitness> {
    bio.idempotents().iter().find_map(|&k| {
        [Orientation::UpDown, Orientation::LeftRight]
            .into_iter()
            .find(|&o| witness_holds(monoid, sq, k, o))
            .map(|orientation| SingularWitness { k, orientation })
    })
}

pub fn find_oriented(
    monoid: &MonoidTable,
    bio: &BiorderedSet,
    sq: &ESquare,
    orientation: Orientation,
) -> Option<ElementId> {
    bio.idempotents()
        .iter()
        .copied()
        .find(|&k| witness_holds(monoid, sq, k, orientation))
}

/// Every singularizing idempotent with its orientation(s).
pub fn all_singularizers(
    monoid: &MonoidTable,
    bio: &BiorderedSet,
    sq: &ESquare,
) -> Vec<SingularWitness> {
    bio.idempotents()
        .iter()
        .flat_map(|&k| {
            [Orientation::UpDown, Orientation::LeftRight]
                .into_iter()
                .filter(move |&o| witness_holds(monoid, sq, k, o))
                .map(move |orientation| SingularWitness { k, orientation })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareRecord {
    /// 1-based row indices `[i, k]`.
    pub rows: [usize; 2],
    /// 1-based column indices `[j, l]`.
    pub cols: [usize; 2],
    pub rect_band: bool,
    pub singular: bool,
    pub witness_id: Option<ElementId>,
    pub orientation: Option<Orientation>,
    pub up_down: bool,
    pub left_right: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareReport {
    pub group: String,
    pub n: usize,
    pub total: usize,
    pub rect_band: usize,
    pub singular: usize,
    pub up_down: usize,
    pub left_right: usize,
    pub squares: Vec<SquareRecord>,
}

/// Classifies every E-square of the rank-1 D-class.
///
/// Fails if any square breaks one of: the four-equality test, the sandwich
/// criterion, "singular iff rectangular band", or "singular implies an
/// up-down witness".
pub fn classify_squares(
    monoid: &MonoidTable,
    rees: &ReesDecomposition,
    bio: &BiorderedSet,
) -> Result<SquareReport> {
    let squares = enumerate_esquares(rees);
    let squares: Vec<SquareRecord> = squares
        .par_iter()
        .map(|sq| classify_one(monoid, rees, bio, sq))
        .collect::<Result<_>>()?;
    let count = |p: fn(&SquareRecord) -> bool| squares.iter().filter(|s| p(s)).count();
    Ok(SquareReport {
        group: monoid.group().name().to_string(),
        n: monoid.n(),
        total: squares.len(),
        rect_band: count(|s| s.rect_band),
        singular: count(|s| s.singular),
        up_down: count(|s| s.up_down),
        left_right: count(|s| s.left_right),
        squares,
    })
}

fn classify_one(
    monoid: &MonoidTable,
    rees: &ReesDecomposition,
    bio: &BiorderedSet,
    sq: &ESquare,
) -> Result<SquareRecord> {
    let rect_band = is_rectangular_band(monoid, sq)?;
    let [i, k] = sq.rows;
    let [j, l] = sq.cols;
    if rees.rect_band_criterion(i, k, j, l) != rect_band {
        return Err(Error::Falsified(format!(
            "sandwich criterion disagrees with multiplication on {sq:?}"
        )));
    }
    let witness = find_singularizer(monoid, bio, sq);
    let up_down = find_oriented(monoid, bio, sq, Orientation::UpDown).is_some();
    let left_right = find_oriented(monoid, bio, sq, Orientation::LeftRight).is_some();
    let singular = witness.is_some();
    if singular != rect_band {
        return Err(Error::Falsified(format!(
            "square {sq:?}: singular = {singular} but rectangular band = {rect_band}"
        )));
    }
    if singular && !up_down {
        return Err(Error::Falsified(format!(
            "singular square {sq:?} has no up-down witness"
        )));
    }
    Ok(SquareRecord {
        rows: [i + 1, k + 1],
        cols: [j + 1, l + 1],
        rect_band,
        singular,
        witness_id: witness.map(|w| w.k),
        orientation: witness.map(|w| w.orientation),
        up_down,
        left_right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::Endomorphism;
    use crate::group::FiniteGroup;

    struct Fixture {
        m: MonoidTable,
        r: ReesDecomposition,
        b: BiorderedSet,
    }

    fn fixture(g: FiniteGroup) -> Fixture {
        let m = MonoidTable::enumerate(&g, 3).unwrap();
        let r = ReesDecomposition::decompose(&m).unwrap();
        let b = BiorderedSet::new(&m).unwrap();
        Fixture { m, r, b }
    }

    fn id(m: &MonoidTable, coeffs: &[usize], targets: &[usize]) -> ElementId {
        m.id_of(&Endomorphism::from_notation(coeffs, targets).unwrap())
    }

    #[test]
    fn basic_pairs_close() {
        let Fixture { m, b, .. } = fixture(FiniteGroup::cyclic(2).unwrap());
        assert_eq!(b.len(), 25);
        for &e in b.idempotents() {
            for &f in b.idempotents() {
                if b.is_basic(&m, e, f) {
                    assert!(m.is_idempotent(m.mul(e, f)));
                    assert!(b.expansions(&m, m.mul(e, f)).contains(&(e, f)));
                }
            }
        }
    }

    #[test]
    fn square_counts_and_greens() {
        let z2 = fixture(FiniteGroup::cyclic(2).unwrap());
        let squares = enumerate_esquares(&z2.r);
        assert_eq!(squares.len(), 144);
        let greens = z2.m.greens_generic();
        assert!(squares.iter().all(|sq| sq.satisfies_greens(&greens)));

        let trivial = fixture(FiniteGroup::cyclic(1).unwrap());
        assert_eq!(enumerate_esquares(&trivial.r).len(), 9);
    }

    #[test]
    fn rect_band_examples() {
        let Fixture { m, r, .. } = fixture(FiniteGroup::cyclic(2).unwrap());
        let row = |t: [usize; 2]| r.column_for_tuple(&t).unwrap();
        let degenerate = ESquare::from_rees(&r, row([0, 1]), row([1, 1]), 2, 2);
        assert_eq!(degenerate.e, degenerate.f);
        assert!(is_rectangular_band(&m, &degenerate).unwrap());
        let yes = ESquare::from_rees(&r, row([0, 0]), row([0, 1]), 0, 1);
        assert!(is_rectangular_band(&m, &yes).unwrap());
        let no = ESquare::from_rees(&r, row([0, 0]), row([1, 0]), 0, 1);
        assert!(!is_rectangular_band(&m, &no).unwrap());
    }

    #[test]
    fn singularizer_examples() {
        let Fixture { m, r, b } = fixture(FiniteGroup::cyclic(2).unwrap());
        let sq = ESquare::from_rees(&r, 0, r.column_for_tuple(&[0, 1]).unwrap(), 0, 1);
        assert_eq!(sq.e, id(&m, &[0, 0, 0], &[1, 1, 1]));
        assert_eq!(sq.f, id(&m, &[0, 0, 0], &[2, 2, 2]));
        assert_eq!(sq.g, id(&m, &[0, 0, 1], &[2, 2, 2]));
        assert_eq!(sq.h, id(&m, &[0, 0, 1], &[1, 1, 1]));

        // the witness built in the proof: x1 -> x1, x2 -> x2, x_i -> g_i x2
        let constructed = id(&m, &[0, 0, 1], &[1, 2, 2]);
        assert!(witness_holds(&m, &sq, constructed, Orientation::UpDown));

        // the first witness in canonical order happens to be left-right
        let first = find_singularizer(&m, &b, &sq).unwrap();
        assert_eq!(first.k, id(&m, &[0, 0, 0], &[2, 2, 3]));
        assert_eq!(first.orientation, Orientation::LeftRight);
        let first_up_down = find_oriented(&m, &b, &sq, Orientation::UpDown).unwrap();
        assert_eq!(first_up_down, id(&m, &[0, 0, 1], &[1, 2, 1]));
        let all = all_singularizers(&m, &b, &sq);
        assert!(all.contains(&SingularWitness {
            k: constructed,
            orientation: Orientation::UpDown
        }));

        // degenerate (e, e, g, g): k = g works up-down
        let deg = ESquare::from_rees(&r, 1, 2, 1, 1);
        assert!(witness_holds(&m, &deg, deg.g, Orientation::UpDown));

        // a non-band square has no witness at all
        let no = ESquare::from_rees(&r, 0, r.column_for_tuple(&[1, 0]).unwrap(), 0, 1);
        assert!(find_singularizer(&m, &b, &no).is_none());
    }

    #[test]
    fn classify_z2_and_trivial() {
        let z2 = fixture(FiniteGroup::cyclic(2).unwrap());
        let report = classify_squares(&z2.m, &z2.r, &z2.b).unwrap();
        assert_eq!(report.total, 144);
        assert_eq!(report.rect_band, 96);
        assert_eq!(report.singular, report.rect_band);
        assert_eq!(report.up_down, report.singular);

        let brute = {
            let r = &z2.r;
            let mut count = 0;
            for i in r.rows() {
                for k in r.rows() {
                    for j in 0..3 {
                        for l in 0..3 {
                            let d = |t: usize| (r.p(t, i) + 2 - r.p(t, k)) % 2;
                            if d(j) == d(l) {
                                count += 1;
                            }
                        }
                    }
                }
            }
            count
        };
        assert_eq!(report.rect_band, brute);

        let t = fixture(FiniteGroup::cyclic(1).unwrap());
        let report = classify_squares(&t.m, &t.r, &t.b).unwrap();
        assert_eq!((report.total, report.rect_band, report.singular), (9, 9, 9));
    }
}
