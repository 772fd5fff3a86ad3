//! The rank-1 D-class of End F_n(G) as a Rees matrix semigroup
//! `M(H_11; I, J; P)`.
//!
//! Rows `I` are the normalized kernel tuples `(c_2, .., c_n)` in
//! lexicographic order (row 0 is the all-identity tuple); columns `J` are the
//! generator indices. Both are 0-based here. The sandwich matrix is stored
//! as `p[j][i]` and satisfies `p[j][i] = c_j(i)` with `c_1 = 1`.

use serde::Serialize;

use crate::endo::{ElementId, Endomorphism, MonoidTable};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GElem};

pub type Row = usize;
pub type Col = usize;

/// Rees coordinates `(i, g, j)` of a rank-1 element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ReesCoords {
    pub i: Row,
    pub g: GElem,
    pub j: Col,
}

#[derive(Debug, Clone)]
pub struct ReesDecomposition {
    group: FiniteGroup,
    n: usize,
    rows: Vec<Vec<GElem>>,
    p: Vec<Vec<GElem>>,
    idempotents: Vec<Vec<ElementId>>,
}

/// JSON fragment: `I` as tuples of ids, `P` row-major.
#[derive(Debug, Clone, Serialize)]
pub struct ReesReport {
    pub rows: Vec<Vec<GElem>>,
    pub p: Vec<Vec<GElem>>,
}

impl ReesDecomposition {
    /// Coordinatizes the rank-1 D-class of `monoid` and audits the result.
    pub fn decompose(monoid: &MonoidTable) -> Result<Self> {
        let group = monoid.group().clone();
        let n = monoid.n();
        let m = group.order();

        let mut rows: Vec<Vec<GElem>> = monoid
            .rank_one()
            .into_iter()
            .map(|a| kernel_tuple(&group, monoid.element(a)))
            .collect();
        rows.sort();
        rows.dedup();
        let expected = m.pow(n as u32 - 1);
        if rows.len() != expected {
            return Err(Error::Falsified(format!(
                "rank-1 D-class has {} R-classes, expected |G|^(n-1) = {expected}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if tuple_index(m, row) != i {
                return Err(Error::Falsified(format!(
                    "row {i} is out of lexicographic order"
                )));
            }
        }

        let p: Vec<Vec<GElem>> = (0..n)
            .map(|j| {
                rows.iter()
                    .map(|row| if j == 0 { group.identity() } else { row[j - 1] })
                    .collect()
            })
            .collect();

        let idempotents = (0..rows.len())
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let coeffs = (0..n)
                            .map(|t| group.mul(coord(&group, &rows[i], t), group.inv(p[j][i])))
                            .collect();
                        monoid.id_of(&Endomorphism::new(coeffs, vec![j; n]).unwrap())
                    })
                    .collect()
            })
            .collect();

        let rees = Self {
            group,
            n,
            rows,
            p,
            idempotents,
        };
        rees.audit(monoid)?;
        Ok(rees)
    }

    fn audit(&self, monoid: &MonoidTable) -> Result<()> {
        let one = self.group.identity();
        for i in self.rows() {
            if self.p[0][i] != one {
                return Err(Error::Falsified(format!("p[1][{i}] is not the identity")));
            }
        }
        for j in self.cols() {
            if self.p[j][0] != one {
                return Err(Error::Falsified(format!("p[{j}][1] is not the identity")));
            }
        }
        let e11 = self.e(0, 0);
        for i in self.rows() {
            for j in self.cols() {
                let e = self.e(i, j);
                if monoid.mul(e, e) != e {
                    return Err(Error::Falsified(format!("e({i},{j}) is not idempotent")));
                }
                let c = self.to_coords(monoid, e)?;
                if (c.i, c.j) != (i, j) || c.g != self.group.inv(self.p[j][i]) {
                    return Err(Error::Falsified(format!(
                        "e({i},{j}) has coordinates {c:?}"
                    )));
                }
                // sandwich entry by definition: q_j r_i = e_1j e_i1 read through psi
                let q_r = monoid.mul(self.e(0, j), self.e(i, 0));
                if monoid.psi(q_r) != Some(self.p[j][i]) {
                    return Err(Error::Falsified(format!(
                        "p[{j}][{i}] disagrees with e_1j e_i1"
                    )));
                }
            }
        }
        debug_assert_eq!(e11, 0);
        // each H-class of D holds exactly one idempotent
        let mut seen = vec![0usize; self.rows.len() * self.n];
        for &e in monoid.idempotents() {
            if monoid.rank(e) == 1 {
                let c = self.to_coords(monoid, e)?;
                seen[c.i * self.n + c.j] += 1;
                if e != self.e(c.i, c.j) {
                    return Err(Error::Falsified(format!(
                        "idempotent {e} in H({},{}) is not the closed form",
                        c.i, c.j
                    )));
                }
            }
        }
        if let Some(pos) = seen.iter().position(|&s| s != 1) {
            return Err(Error::Falsified(format!(
                "H({},{}) has {} idempotents",
                pos / self.n,
                pos % self.n,
                seen[pos]
            )));
        }
        // column coverage: the tuples (p_2i, .., p_ni) enumerate G^(n-1)
        let mut cols: Vec<Vec<GElem>> = self
            .rows()
            .map(|i| (1..self.n).map(|j| self.p[j][i]).collect())
            .collect();
        cols.sort();
        cols.dedup();
        if cols.len() != self.rows.len() {
            return Err(Error::Falsified("columns of P repeat a tuple".into()));
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> std::ops::Range<Row> {
        0..self.rows.len()
    }

    pub fn cols(&self) -> std::ops::Range<Col> {
        0..self.n
    }

    /// Kernel tuple `(c_2, .., c_n)` of row `i`.
    pub fn row_tuple(&self, i: Row) -> &[GElem] {
        &self.rows[i]
    }

    /// Sandwich entry `p_{j,i}`.
    #[inline]
    pub fn p(&self, j: Col, i: Row) -> GElem {
        self.p[j][i]
    }

    pub fn matrix(&self) -> &[Vec<GElem>] {
        &self.p
    }

    /// The idempotent of `H_ij`: `x_t -> c_t c_j^{-1} x_j`.
    #[inline]
    pub fn e(&self, i: Row, j: Col) -> ElementId {
        self.idempotents[i][j]
    }

    pub fn idempotent_e(&self, monoid: &MonoidTable, i: Row, j: Col) -> Result<Endomorphism> {
        if i >= self.rows.len() || j >= self.n {
            return Err(Error::Invalid(format!("no H-class ({i},{j})")));
        }
        Ok(monoid.element(self.e(i, j)).clone())
    }

    /// The row whose kernel tuple is `tuple`; its column of `P` reads
    /// `(1, tuple..)`.
    pub fn column_for_tuple(&self, tuple: &[GElem]) -> Result<Row> {
        if tuple.len() + 1 != self.n || tuple.iter().any(|&g| g >= self.group.order()) {
            return Err(Error::Invalid(format!(
                "expected a tuple of {} group elements",
                self.n - 1
            )));
        }
        let i = tuple_index(self.group.order(), tuple);
        debug_assert_eq!(self.rows[i], tuple);
        Ok(i)
    }

    /// Row whose column of `P` is `(1, a, .., a)`.
    pub fn constant_column(&self, a: GElem) -> Row {
        self.column_for_tuple(&vec![a; self.n - 1]).unwrap()
    }

    pub fn to_coords(&self, monoid: &MonoidTable, a: ElementId) -> Result<ReesCoords> {
        let endo = monoid.element(a);
        if endo.rank() != 1 {
            return Err(Error::Invalid(format!("{endo} is not of rank 1")));
        }
        let i = tuple_index(self.group.order(), &kernel_tuple(&self.group, endo));
        Ok(ReesCoords {
            i,
            g: endo.coeffs()[0],
            j: endo.targets()[0],
        })
    }

    pub fn from_coords(&self, monoid: &MonoidTable, c: ReesCoords) -> Result<ElementId> {
        if c.i >= self.rows.len() || c.j >= self.n || c.g >= self.group.order() {
            return Err(Error::Invalid(format!("coordinates out of range: {c:?}")));
        }
        let coeffs = (0..self.n)
            .map(|t| self.group.mul(coord(&self.group, &self.rows[c.i], t), c.g))
            .collect();
        Ok(monoid.id_of(&Endomorphism::new(coeffs, vec![c.j; self.n])?))
    }

    /// `(i,g,j)(k,h,l) = (i, g p_jk h, l)`.
    pub fn rees_mul(&self, x: ReesCoords, y: ReesCoords) -> ReesCoords {
        let mid = self.group.mul(self.group.mul(x.g, self.p[x.j][y.i]), y.g);
        ReesCoords {
            i: x.i,
            g: mid,
            j: y.j,
        }
    }

    /// Whether `e_ij, e_il, e_kj, e_kl` form a rectangular band, decided by
    /// `p_ji^{-1} p_jk = p_li^{-1} p_lk`.
    pub fn rect_band_criterion(&self, i: Row, k: Row, j: Col, l: Col) -> bool {
        let g = &self.group;
        g.mul(g.inv(self.p[j][i]), self.p[j][k]) == g.mul(g.inv(self.p[l][i]), self.p[l][k])
    }

    pub fn report(&self) -> ReesReport {
        ReesReport {
            rows: self.rows.clone(),
            p: self.p.clone(),
        }
    }
}

/// `(c_2, .., c_n)` with `c_t = g_t g_1^{-1}`, for a rank-1 endomorphism.
fn kernel_tuple(group: &FiniteGroup, a: &Endomorphism) -> Vec<GElem> {
    let lead = group.inv(a.coeffs()[0]);
    a.coeffs()[1..]
        .iter()
        .map(|&c| group.mul(c, lead))
        .collect()
}

fn coord(group: &FiniteGroup, row: &[GElem], t: usize) -> GElem {
    if t == 0 {
        group.identity()
    } else {
        row[t - 1]
    }
}

fn tuple_index(m: usize, tuple: &[GElem]) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * m + g)
}
