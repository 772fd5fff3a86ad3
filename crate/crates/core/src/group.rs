//! Finite groups given by validated Cayley tables.
//!
//! Elements are the ids `0..order` and the identity is always id 0. Every
//! downstream normal form (kernel keys, sandwich entries, Rees coordinates)
//! relies on that convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Id of an element of a [`FiniteGroup`].
pub type GElem = usize;

/// Largest group order the built-in symmetric family will materialize.
pub const DEFAULT_GROUP_CAP: usize = 5040;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<GElem>,
    inverses: Vec<GElem>,
    names: Option<Vec<String>>,
}

/// On-disk form of a group: `{ "name": str, "order": int, "table": [[int]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// The cyclic group Z_m written additively.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("cyclic group order must be positive".into()));
        }
        let table = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a + b) % m))
            .collect();
        Self::from_flat(format!("Z{m}"), m, table, None)
    }

    pub fn symmetric(k: usize) -> Result<Self> {
        Self::symmetric_capped(k, DEFAULT_GROUP_CAP)
    }

    /// S_k with permutations ranked by lexicographic one-line notation.
    ///
    /// The product `p * q` applies `p` first and then `q`, matching the
    /// left-to-right composition used for endomorphisms.
    pub fn symmetric_capped(k: usize, cap: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid(
                "symmetric group degree must be positive".into(),
            ));
        }
        let order = (1..=k as u128).product::<u128>();
        if order > cap as u128 {
            return Err(Error::ResourceBound {
                what: format!("S{k}"),
                size: order,
                cap: cap as u128,
            });
        }
        let perms = lex_permutations(k);
        let rank = |p: &[usize]| -> usize {
            perms
                .binary_search_by(|q| q.as_slice().cmp(p))
                .expect("permutations are closed under composition")
        };
        let order = perms.len();
        let mut table = Vec::with_capacity(order * order);
        let mut scratch = vec![0; k];
        for p in &perms {
            for q in &perms {
                for (x, slot) in scratch.iter_mut().enumerate() {
                    *slot = q[p[x]];
                }
                table.push(rank(&scratch));
            }
        }
        let names = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<String>())
            .collect();
        Self::from_flat(format!("S{k}"), order, table, Some(names))
    }

    /// Parses and validates a group document.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GroupFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: GroupFile) -> Result<Self> {
        let GroupFile { name, order, table } = file;
        if order == 0 {
            return Err(Error::InvalidGroup("order must be positive".into()));
        }
        if table.len() != order || table.iter().any(|row| row.len() != order) {
            return Err(Error::InvalidGroup(format!(
                "table must be {order}x{order}"
            )));
        }
        let flat = table.into_iter().flatten().collect();
        Self::from_flat(name, order, flat, None)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            name: self.name.clone(),
            order: self.order,
            table: self
                .table
                .chunks(self.order)
                .map(|row| row.to_vec())
                .collect(),
        }
    }

    fn from_flat(
        name: String,
        order: usize,
        table: Vec<GElem>,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let at = |a: usize, b: usize| table[a * order + b];
        if let Some(&bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::OutOfRange { id: bad, order });
        }
        for a in 0..order {
            if at(0, a) != a || at(a, 0) != a {
                return Err(Error::InvalidGroup(format!(
                    "element 0 is not a two-sided identity (fails at {a})"
                )));
            }
        }
        let mut seen = vec![false; order];
        for a in 0..order {
            seen.fill(false);
            for b in 0..order {
                if std::mem::replace(&mut seen[at(a, b)], true) {
                    return Err(Error::InvalidGroup(format!(
                        "not a Latin square: row {a} repeats {}",
                        at(a, b)
                    )));
                }
            }
            seen.fill(false);
            for b in 0..order {
                if std::mem::replace(&mut seen[at(b, a)], true) {
                    return Err(Error::InvalidGroup(format!(
                        "not a Latin square: column {a} repeats {}",
                        at(b, a)
                    )));
                }
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    let lhs = at(ab, c);
                    let rhs = at(a, at(b, c));
                    if lhs != rhs {
                        return Err(Error::NonAssociative { a, b, c, lhs, rhs });
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| at(a, b) == 0 && at(b, a) == 0)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        if let Some(names) = &names {
            if names.len() != order {
                return Err(Error::InvalidGroup("label count differs from order".into()));
            }
        }
        Ok(Self {
            name,
            order,
            table,
            inverses,
            names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GElem {
        0
    }

    pub fn elements(&self) -> std::ops::Range<GElem> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: GElem, b: GElem) -> GElem {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: GElem) -> GElem {
        self.inverses[a]
    }

    /// Range-checked multiplication.
    pub fn try_mul(&self, a: GElem, b: GElem) -> Result<GElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn try_inv(&self, a: GElem) -> Result<GElem> {
        self.check(a)?;
        Ok(self.inv(a))
    }

    fn check(&self, a: GElem) -> Result<()> {
        if a < self.order {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                id: a,
                order: self.order,
            })
        }
    }

    /// `a^k` by repeated multiplication.
    pub fn pow(&self, a: GElem, k: usize) -> GElem {
        (0..k).fold(self.identity(), |acc, _| self.mul(acc, a))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Display label: the permutation for symmetric groups, the id otherwise.
    pub fn label(&self, a: GElem) -> String {
        match &self.names {
            Some(names) => names[a].clone(),
            None => a.to_string(),
        }
    }
}

fn lex_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // next permutation in lexicographic order
        let Some(pivot) = (0..k.saturating_sub(1))
            .rev()
            .find(|&i| current[i] < current[i + 1])
        else {
            break;
        };
        let succ = (pivot + 1..k)
            .rev()
            .find(|&i| current[i] > current[pivot])
            .unwrap();
        current.swap(pivot, succ);
        current[pivot + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_of(g: &FiniteGroup) -> Vec<Vec<usize>> {
        g.to_file().table
    }

    #[test]
    fn cyclic_fixtures() {
        assert_eq!(table_of(&FiniteGroup::cyclic(1).unwrap()), vec![vec![0]]);
        assert_eq!(
            table_of(&FiniteGroup::cyclic(2).unwrap()),
            vec![vec![0, 1], vec![1, 0]]
        );
        let z4 = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(z4.mul(2, 3), 1);
        assert_eq!(z4.inv(1), 3);
        assert_eq!(FiniteGroup::cyclic(2).unwrap().mul(1, 1), 0);
        assert!(FiniteGroup::cyclic(0).is_err());
    }

    #[test]
    fn symmetric_fixtures() {
        let s1 = FiniteGroup::symmetric(1).unwrap();
        assert_eq!(s1.order(), 1);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert!(s3.elements().all(|x| s3.pow(x, 6) == 0));
        assert_eq!(s3.label(0), "123");
        let s4 = FiniteGroup::symmetric(4).unwrap();
        assert_eq!(s4.order(), 24);
    }

    #[test]
    fn symmetric_respects_cap() {
        let err = FiniteGroup::symmetric_capped(5, 100).unwrap_err();
        assert!(matches!(err, Error::ResourceBound { size: 120, .. }));
    }

    #[test]
    fn identity_is_self_inverse() {
        for g in [
            FiniteGroup::cyclic(5).unwrap(),
            FiniteGroup::symmetric(3).unwrap(),
        ] {
            assert_eq!(g.inv(0), 0);
        }
    }

    #[test]
    fn range_checks() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert!(matches!(
            z2.try_mul(0, 2),
            Err(Error::OutOfRange { id: 2, order: 2 })
        ));
        assert!(z2.try_inv(7).is_err());
        assert_eq!(z2.try_mul(1, 1).unwrap(), 0);
    }

    #[test]
    fn parses_valid_document() {
        let g = FiniteGroup::from_json(r#"{"name":"Z2","order":2,"table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.name(), "Z2");
    }

    #[test]
    fn rejects_latin_violation() {
        let err = FiniteGroup::from_json(r#"{"name":"bad","order":2,"table":[[0,1],[1,1]]}"#)
            .unwrap_err();
        assert!(
            matches!(err, Error::InvalidGroup(ref m) if m.contains("Latin")),
            "{err}"
        );
    }

    #[test]
    fn rejects_missing_identity() {
        let err = FiniteGroup::from_json(r#"{"name":"shift","order":2,"table":[[1,0],[0,1]]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(ref m) if m.contains("identity")));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            FiniteGroup::from_json("{\"order\": 2}"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            FiniteGroup::from_json(r#"{"name":"x","order":2,"table":[[0,1]]}"#),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            FiniteGroup::from_json(r#"{"name":"x","order":2,"table":[[0,1],[1,5]]}"#),
            Err(Error::OutOfRange { id: 5, .. })
        ));
    }

    // Order-5 loop found by exhaustive search over Latin squares with identity 0.
    // Lexicographically first failing triple is (1, 1, 2).
    #[test]
    fn rejects_nonassociative_loop_with_triple() {
        let doc = r#"{"name":"loop5","order":5,"table":[
            [0,1,2,3,4],[1,0,3,4,2],[2,3,4,0,1],[3,4,1,2,0],[4,2,0,1,3]]}"#;
        match FiniteGroup::from_json(doc).unwrap_err() {
            Error::NonAssociative { a, b, c, lhs, rhs } => {
                assert_eq!((a, b, c), (1, 1, 2));
                assert_ne!(lhs, rhs);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn round_trips_through_file() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let text = serde_json::to_string(&s3.to_file()).unwrap();
        let back = FiniteGroup::from_json(&text).unwrap();
        assert_eq!(back.order(), 6);
        assert!(s3
            .elements()
            .all(|a| s3.elements().all(|b| back.mul(a, b) == s3.mul(a, b))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn groups() -> Vec<FiniteGroup> {
            vec![
                FiniteGroup::cyclic(1).unwrap(),
                FiniteGroup::cyclic(6).unwrap(),
                FiniteGroup::cyclic(7).unwrap(),
                FiniteGroup::symmetric(3).unwrap(),
                FiniteGroup::symmetric(4).unwrap(),
            ]
        }

        proptest! {
            #[test]
            fn associative_and_inverse_involution(which in 0usize..5, a in 0usize..64, b in 0usize..64, c in 0usize..64) {
                let g = &groups()[which];
                let (a, b, c) = (a % g.order(), b % g.order(), c % g.order());
                prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                prop_assert_eq!(g.inv(g.inv(a)), a);
                prop_assert_eq!(g.mul(a, g.inv(a)), 0);
            }
        }
    }
}
