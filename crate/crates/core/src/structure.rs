use crate::biorder::BiorderedSet;
use crate::endo::{ElementId, MonoidTable, DEFAULT_MONOID_CAP};
use crate::error::Result;
use crate::group::FiniteGroup;
use crate::rees::ReesDecomposition;

/// Everything built from a `(G, n)` pair: the monoid, its rank-1 Rees
/// coordinates and its biordered set.
#[derive(Debug, Clone)]
pub struct Structure {
    pub monoid: MonoidTable,
    pub rees: ReesDecomposition,
    pub bio: BiorderedSet,
}

impl Structure {
    pub fn build(group: &FiniteGroup, n: usize) -> Result<Self> {
        Self::build_capped(group, n, DEFAULT_MONOID_CAP)
    }

    pub fn build_capped(group: &FiniteGroup, n: usize, cap: u128) -> Result<Self> {
        let monoid = MonoidTable::enumerate_capped(group, n, cap)?;
        let rees = ReesDecomposition::decompose(&monoid)?;
        let bio = BiorderedSet::new(&monoid)?;
        Ok(Self { monoid, rees, bio })
    }

    pub fn group(&self) -> &FiniteGroup {
        self.monoid.group()
    }

    pub fn n(&self) -> usize {
        self.monoid.n()
    }

    /// `e_11`, which is also canonical element 0.
    pub fn e11(&self) -> ElementId {
        self.rees.e(0, 0)
    }
}
