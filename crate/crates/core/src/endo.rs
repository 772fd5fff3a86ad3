//! Endomorphisms of the free left G-act F_n(G) and the monoid they form.
//!
//! An endomorphism is determined by where it sends the free generators:
//! `x_i -> g_i x_{t(i)}`. We store the coefficient tuple `(g_1, .., g_n)` and
//! the target function `t` (0-based internally, 1-based when displayed).
//! Composition is left to right: `ab` means "apply `a`, then `b`".

use std::collections::HashMap;
use std::fmt;

use bitvec::prelude::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GElem};

/// Canonical id of a monoid element (its index in [`MonoidTable::elements`]).
pub type ElementId = usize;

/// Default bound on `(m*n)^n`, the size of End F_n(G).
pub const DEFAULT_MONOID_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endomorphism {
    coeffs: Vec<GElem>,
    targets: Vec<usize>,
}

impl Endomorphism {
    /// Builds `x_i -> coeffs[i] x_{targets[i]}` with 0-based targets.
    pub fn new(coeffs: Vec<GElem>, targets: Vec<usize>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 || targets.len() != n {
            return Err(Error::Invalid(format!(
                "endomorphism needs n > 0 coefficients and n targets (got {} and {})",
                coeffs.len(),
                targets.len()
            )));
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= n) {
            return Err(Error::OutOfRange { id: t, order: n });
        }
        Ok(Self { coeffs, targets })
    }

    /// Same as [`Endomorphism::new`] but with targets written 1-based, as in
    /// the `(g_1,..,g_n | t_1,..,t_n)` notation.
    pub fn from_notation(coeffs: &[GElem], targets: &[usize]) -> Result<Self> {
        if targets.contains(&0) {
            return Err(Error::Invalid("targets are 1-based".into()));
        }
        Self::new(coeffs.to_vec(), targets.iter().map(|t| t - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            coeffs: vec![0; n],
            targets: (0..n).collect(),
        }
    }

    pub fn rank_n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[GElem] {
        &self.coeffs
    }

    /// 0-based targets.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Applies the endomorphism to the act element `g x_i`.
    pub fn apply(&self, group: &FiniteGroup, (g, i): (GElem, usize)) -> (GElem, usize) {
        (group.mul(g, self.coeffs[i]), self.targets[i])
    }

    /// Number of distinct targets, i.e. the rank of the image subact.
    pub fn rank(&self) -> usize {
        self.image_key().0.len()
    }

    pub fn image_key(&self) -> ImageKey {
        let mut hit = self.targets.clone();
        hit.sort_unstable();
        hit.dedup();
        ImageKey(hit)
    }

    /// Fibers of the target function, each normalized by the coefficient of
    /// its least index.
    pub fn kernel_key(&self, group: &FiniteGroup) -> KernelKey {
        let n = self.rank_n();
        let mut block_of = vec![usize::MAX; n];
        let mut leader_of_target: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut family = vec![0; n];
        for i in 0..n {
            let blocks = leader_of_target.len();
            let (block, leader) = *leader_of_target
                .entry(self.targets[i])
                .or_insert((blocks, i));
            block_of[i] = block;
            family[i] = group.mul(self.coeffs[i], group.inv(self.coeffs[leader]));
        }
        KernelKey { block_of, family }
    }

    fn validate_against(&self, group: &FiniteGroup) -> Result<()> {
        match self.coeffs.iter().find(|&&c| c >= group.order()) {
            Some(&c) => Err(Error::OutOfRange {
                id: c,
                order: group.order(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(
            f,
            "({} | {})",
            join(&mut self.coeffs.iter().copied()),
            join(&mut self.targets.iter().map(|t| t + 1))
        )
    }
}

/// `ab`: apply `a` then `b`.
pub fn compose(group: &FiniteGroup, a: &Endomorphism, b: &Endomorphism) -> Result<Endomorphism> {
    if a.rank_n() != b.rank_n() {
        return Err(Error::Mismatch(format!(
            "cannot compose endomorphisms of F_{} and F_{}",
            a.rank_n(),
            b.rank_n()
        )));
    }
    a.validate_against(group)?;
    b.validate_against(group)?;
    let (coeffs, targets) = (0..a.rank_n())
        .map(|i| {
            let t = a.targets[i];
            (group.mul(a.coeffs[i], b.coeffs[t]), b.targets[t])
        })
        .unzip();
    Ok(Endomorphism { coeffs, targets })
}

/// The set of generator indices hit by the target function (0-based, sorted).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ImageKey(pub Vec<usize>);

/// Canonical form of the kernel congruence.
///
/// `block_of[i]` numbers the fibers of the target function in order of their
/// least element; `family[i] = g_i * g_{i0}^{-1}` where `i0` is the least
/// element of the fiber containing `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelKey {
    pub block_of: Vec<usize>,
    pub family: Vec<GElem>,
}

impl KernelKey {
    /// The fibers as sorted lists of 0-based indices.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let count = self.block_of.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(i);
        }
        blocks
    }
}

/// A partition of the monoid, stored as one class label per element.
/// Labels are assigned in order of first occurrence along canonical ids, so
/// two partitions are equal iff their label vectors are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Normalizes arbitrary hashable class keys into a partition.
    pub fn from_keys<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut seen = HashMap::new();
        let labels: Vec<usize> = keys
            .into_iter()
            .map(|k| {
                let next = seen.len();
                *seen.entry(k).or_insert(next)
            })
            .collect();
        Self {
            count: seen.len(),
            labels,
        }
    }

    pub fn class_of(&self, a: ElementId) -> usize {
        self.labels[a]
    }

    pub fn same(&self, a: ElementId, b: ElementId) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn class_count(&self) -> usize {
        self.count
    }

    pub fn classes(&self) -> Vec<Vec<ElementId>> {
        let mut out = vec![Vec::new(); self.count];
        for (a, &c) in self.labels.iter().enumerate() {
            out[c].push(a);
        }
        out
    }

    pub fn class_containing(&self, a: ElementId) -> Vec<ElementId> {
        let c = self.labels[a];
        (0..self.labels.len())
            .filter(|&b| self.labels[b] == c)
            .collect()
    }

    /// Number of elements on which two partitions first disagree, counted as
    /// pairs `(a, first element of a's class)` whose relation differs.
    pub fn discrepancies(&self, other: &Partition) -> usize {
        if self.labels.len() != other.labels.len() {
            return self.labels.len().max(other.labels.len());
        }
        let mut rep_self: HashMap<usize, ElementId> = HashMap::new();
        let mut rep_other: HashMap<usize, ElementId> = HashMap::new();
        let mut bad = 0;
        for a in 0..self.labels.len() {
            let r1 = *rep_self.entry(self.labels[a]).or_insert(a);
            let r2 = *rep_other.entry(other.labels[a]).or_insert(a);
            if r1 != r2 {
                bad += 1;
            }
        }
        bad
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenPartitions {
    pub r: Partition,
    pub l: Partition,
    pub h: Partition,
    pub d: Partition,
}

impl GreenPartitions {
    pub fn discrepancies(&self, other: &GreenPartitions) -> [usize; 4] {
        [
            self.r.discrepancies(&other.r),
            self.l.discrepancies(&other.l),
            self.h.discrepancies(&other.h),
            self.d.discrepancies(&other.d),
        ]
    }
}

/// End F_n(G), fully materialized in canonical-id order.
///
/// The canonical id is a mixed-radix number: the coefficient tuple (base
/// `m`, first coordinate most significant) followed by the target tuple
/// (base `n`). Element `0` is therefore `e_11 = (1,..,1 | 1,..,1)`.
#[derive(Debug, Clone)]
pub struct MonoidTable {
    group: FiniteGroup,
    n: usize,
    targets_radix: usize,
    elements: Vec<Endomorphism>,
    idempotents: Vec<ElementId>,
    idempotent_index: Vec<Option<usize>>,
}

impl MonoidTable {
    pub fn enumerate(group: &FiniteGroup, n: usize) -> Result<Self> {
        Self::enumerate_capped(group, n, DEFAULT_MONOID_CAP)
    }

    pub fn enumerate_capped(group: &FiniteGroup, n: usize, cap: u128) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("rank must be at least 1".into()));
        }
        let size = monoid_size(group.order(), n);
        if size.is_none_or(|s| s > cap) {
            return Err(Error::ResourceBound {
                what: format!("End F_{n}({})", group.name()),
                size: size.unwrap_or(u128::MAX),
                cap,
            });
        }
        let size = size.unwrap() as usize;
        let targets_radix = n.pow(n as u32);
        let m = group.order();
        let elements: Vec<Endomorphism> = (0..size)
            .into_par_iter()
            .map(|id| decode(id, m, n, targets_radix))
            .collect();
        let mut table = Self {
            group: group.clone(),
            n,
            targets_radix,
            elements,
            idempotents: Vec::new(),
            idempotent_index: vec![None; size],
        };
        table.idempotents = (0..size)
            .into_par_iter()
            .filter(|&a| table.mul(a, a) == a)
            .collect();
        for (k, &e) in table.idempotents.iter().enumerate() {
            table.idempotent_index[e] = Some(k);
        }
        Ok(table)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Endomorphism] {
        &self.elements
    }

    pub fn element(&self, id: ElementId) -> &Endomorphism {
        &self.elements[id]
    }

    pub fn get(&self, id: ElementId) -> Result<&Endomorphism> {
        self.elements.get(id).ok_or(Error::OutOfRange {
            id,
            order: self.elements.len(),
        })
    }

    pub fn idempotents(&self) -> &[ElementId] {
        &self.idempotents
    }

    pub fn is_idempotent(&self, id: ElementId) -> bool {
        self.idempotent_index.get(id).is_some_and(|k| k.is_some())
    }

    /// Position of `id` in [`MonoidTable::idempotents`].
    pub fn idempotent_index(&self, id: ElementId) -> Option<usize> {
        self.idempotent_index.get(id).copied().flatten()
    }

    pub fn identity(&self) -> ElementId {
        self.id_of(&Endomorphism::identity(self.n))
    }

    pub fn id_of(&self, a: &Endomorphism) -> ElementId {
        let m = self.group.order();
        let c = a.coeffs.iter().fold(0, |acc, &g| acc * m + g);
        let t = a.targets.iter().fold(0, |acc, &t| acc * self.n + t);
        c * self.targets_radix + t
    }

    /// Product of two elements by id, without allocating.
    #[inline]
    pub fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        let (a, b) = (&self.elements[a], &self.elements[b]);
        let m = self.group.order();
        let mut c = 0;
        let mut t = 0;
        for i in 0..self.n {
            let via = a.targets[i];
            c = c * m + self.group.mul(a.coeffs[i], b.coeffs[via]);
            t = t * self.n + b.targets[via];
        }
        c * self.targets_radix + t
    }

    pub fn product(&self, word: &[ElementId]) -> Option<ElementId> {
        word.iter().copied().reduce(|acc, x| self.mul(acc, x))
    }

    pub fn rank(&self, a: ElementId) -> usize {
        self.elements[a].rank()
    }

    /// Green's relations from the definitions: `a R b` iff `aM = bM`,
    /// `a L b` iff `Ma = Mb`, `H = R ∩ L`, `D` the join of `R` and `L`.
    ///
    /// Quadratic in the monoid size; this is the oracle the structural
    /// computation is checked against.
    pub fn greens_generic(&self) -> GreenPartitions {
        let size = self.len();
        let right: Vec<BitVec> = (0..size)
            .into_par_iter()
            .map(|a| {
                let mut ideal = bitvec![0; size];
                for s in 0..size {
                    ideal.set(self.mul(a, s), true);
                }
                ideal
            })
            .collect();
        let left: Vec<BitVec> = (0..size)
            .into_par_iter()
            .map(|a| {
                let mut ideal = bitvec![0; size];
                for s in 0..size {
                    ideal.set(self.mul(s, a), true);
                }
                ideal
            })
            .collect();
        let r = Partition::from_keys(right.iter());
        let l = Partition::from_keys(left.iter());
        let h = Partition::from_keys((0..size).map(|a| (r.class_of(a), l.class_of(a))));

        let mut uf = UnionFind::new(size);
        let mut first_r = HashMap::new();
        let mut first_l = HashMap::new();
        for a in 0..size {
            let fr = *first_r.entry(r.class_of(a)).or_insert(a);
            let fl = *first_l.entry(l.class_of(a)).or_insert(a);
            uf.union(a, fr);
            uf.union(a, fl);
        }
        let d = Partition::from_keys((0..size).map(|a| uf.find(a)));
        GreenPartitions { r, l, h, d }
    }

    /// Green's relations read off images, kernels and ranks.
    pub fn greens_structural(&self) -> GreenPartitions {
        let kernels: Vec<KernelKey> = self
            .elements
            .par_iter()
            .map(|a| a.kernel_key(&self.group))
            .collect();
        let images: Vec<ImageKey> = self.elements.par_iter().map(|a| a.image_key()).collect();
        GreenPartitions {
            r: Partition::from_keys(kernels.iter()),
            l: Partition::from_keys(images.iter()),
            h: Partition::from_keys(kernels.iter().zip(images.iter())),
            d: Partition::from_keys(images.iter().map(|i| i.0.len())),
        }
    }

    /// Elements of rank 1, in canonical order.
    pub fn rank_one(&self) -> Vec<ElementId> {
        (0..self.len()).filter(|&a| self.rank(a) == 1).collect()
    }

    /// `a_g = (g,..,g | 1,..,1)`, the element of `H_11` that corresponds to `g`.
    pub fn a_of(&self, g: GElem) -> ElementId {
        self.id_of(&Endomorphism {
            coeffs: vec![g; self.n],
            targets: vec![0; self.n],
        })
    }

    /// The identification `H_11 -> G`, `a_g -> g`; `None` outside `H_11`.
    pub fn psi(&self, a: ElementId) -> Option<GElem> {
        let e = &self.elements[a];
        let g = e.coeffs[0];
        (e.targets.iter().all(|&t| t == 0) && e.coeffs.iter().all(|&c| c == g)).then_some(g)
    }

    pub fn dump(&self) -> MonoidDump {
        MonoidDump {
            group: self.group.name().to_string(),
            n: self.n,
            elements: self
                .elements
                .iter()
                .enumerate()
                .map(|(id, e)| DumpedElement {
                    id,
                    coeffs: e.coeffs.clone(),
                    targets: e.targets.iter().map(|t| t + 1).collect(),
                    idempotent: self.is_idempotent(id),
                })
                .collect(),
        }
    }
}

/// The isomorphism `psi: H_11 -> G` together with the evidence that it is one.
#[derive(Debug, Clone)]
pub struct HClassIso {
    /// `elements[g]` is the id of `a_g`.
    pub elements: Vec<ElementId>,
}

impl HClassIso {
    /// Checks that `g -> a_g` is a bijection onto the H-class of `e_11` and a
    /// homomorphism.
    pub fn verify(monoid: &MonoidTable, greens: &GreenPartitions) -> Result<Self> {
        let group = monoid.group();
        let e11 = monoid.a_of(group.identity());
        let elements: Vec<ElementId> = group.elements().map(|g| monoid.a_of(g)).collect();
        let class = greens.h.class_containing(e11);
        let mut sorted = elements.clone();
        sorted.sort_unstable();
        if sorted != class {
            return Err(Error::Falsified(format!(
                "H-class of e_11 has {} elements, expected the {} maps a_g",
                class.len(),
                elements.len()
            )));
        }
        for g in group.elements() {
            if monoid.psi(elements[g]) != Some(g) {
                return Err(Error::Falsified(format!("psi(a_{g}) != {g}")));
            }
            for h in group.elements() {
                if monoid.mul(elements[g], elements[h]) != elements[group.mul(g, h)] {
                    return Err(Error::Falsified(format!("a_{g} a_{h} != a_(gh)")));
                }
            }
        }
        Ok(Self { elements })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonoidDump {
    pub group: String,
    pub n: usize,
    pub elements: Vec<DumpedElement>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DumpedElement {
    pub id: ElementId,
    pub coeffs: Vec<GElem>,
    pub targets: Vec<usize>,
    pub idempotent: bool,
}

/// `(m*n)^n`, or `None` on overflow.
pub fn monoid_size(m: usize, n: usize) -> Option<u128> {
    (m as u128)
        .checked_mul(n as u128)?
        .checked_pow(u32::try_from(n).ok()?)
}

fn decode(mut id: usize, m: usize, n: usize, targets_radix: usize) -> Endomorphism {
    let mut t = id % targets_radix;
    id /= targets_radix;
    let mut coeffs = vec![0; n];
    let mut targets = vec![0; n];
    for i in (0..n).rev() {
        coeffs[i] = id % m;
        id /= m;
        targets[i] = t % n;
        t /= n;
    }
    Endomorphism { coeffs, targets }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        Self {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(coeffs: &[usize], targets: &[usize]) -> Endomorphism {
        Endomorphism::from_notation(coeffs, targets).unwrap()
    }

    fn z(m: usize) -> FiniteGroup {
        FiniteGroup::cyclic(m).unwrap()
    }

    /// Applies `a` then `b` to every act element and reads the result back
    /// off the generators.
    fn compose_by_action(g: &FiniteGroup, a: &Endomorphism, b: &Endomorphism) -> Endomorphism {
        let n = a.rank_n();
        for h in g.elements() {
            for i in 0..n {
                let via = b.apply(g, a.apply(g, (h, i)));
                let direct = {
                    let (c, t) = a.apply(g, (0, i));
                    let (c2, t2) = b.apply(g, (c, t));
                    (g.mul(h, c2), t2)
                };
                assert_eq!(via, direct, "action is not a G-map");
            }
        }
        let (coeffs, targets) = (0..n).map(|i| b.apply(g, a.apply(g, (0, i)))).unzip();
        Endomorphism::new(coeffs, targets).unwrap()
    }

    fn kernel_pairs(g: &FiniteGroup, a: &Endomorphism) -> BitVec {
        let n = a.rank_n();
        let act: Vec<(usize, usize)> = g
            .elements()
            .flat_map(|h| (0..n).map(move |i| (h, i)))
            .collect();
        let mut bits = bitvec![0; act.len() * act.len()];
        for (x, &p) in act.iter().enumerate() {
            for (y, &q) in act.iter().enumerate() {
                bits.set(x * act.len() + y, a.apply(g, p) == a.apply(g, q));
            }
        }
        bits
    }

    #[test]
    fn compose_examples() {
        let g = z(2);
        let a = e(&[0, 1, 0], &[1, 1, 1]);
        let b = e(&[0, 0, 0], &[2, 2, 2]);
        let ab = compose(&g, &a, &b).unwrap();
        assert_eq!(ab, e(&[0, 1, 0], &[2, 2, 2]));
        assert_eq!(ab, compose_by_action(&g, &a, &b));
        assert_eq!(compose(&g, &Endomorphism::identity(3), &a).unwrap(), a);
        let p = e(&[0, 0, 0], &[1, 1, 1]);
        assert_eq!(compose(&g, &p, &p).unwrap(), p);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let g = z(2);
        let err = compose(&g, &Endomorphism::identity(3), &Endomorphism::identity(2));
        assert!(matches!(err, Err(Error::Mismatch(_))));
        let bad = Endomorphism::new(vec![5, 0], vec![0, 1]).unwrap();
        assert!(compose(&g, &bad, &bad).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Endomorphism::identity(3).rank(), 3);
        assert_eq!(e(&[0, 1, 0], &[1, 1, 1]).rank(), 1);
        assert_eq!(e(&[0, 1, 0], &[1, 2, 1]).rank(), 2);
    }

    #[test]
    fn key_examples() {
        let g = z(2);
        let a = e(&[1, 0, 1], &[2, 2, 2]);
        assert_eq!(a.image_key(), ImageKey(vec![1]));
        let k = a.kernel_key(&g);
        assert_eq!(k.blocks(), vec![vec![0, 1, 2]]);
        assert_eq!(k.family, vec![0, 1, 0]);

        let id = Endomorphism::identity(3).kernel_key(&g);
        assert_eq!(id.blocks(), vec![vec![0], vec![1], vec![2]]);
        assert!(id.family.iter().all(|&x| x == 0));
    }

    #[test]
    fn kernel_key_agrees_with_kernel_pairs() {
        for g in [z(2), FiniteGroup::symmetric(3).unwrap()] {
            let monoid = MonoidTable::enumerate(&g, if g.order() > 2 { 2 } else { 3 }).unwrap();
            let keys: Vec<KernelKey> = monoid.elements().iter().map(|a| a.kernel_key(&g)).collect();
            let pairs: Vec<BitVec> = monoid
                .elements()
                .iter()
                .map(|a| kernel_pairs(&g, a))
                .collect();
            for a in 0..monoid.len() {
                for b in 0..monoid.len() {
                    assert_eq!(keys[a] == keys[b], pairs[a] == pairs[b], "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let trivial = MonoidTable::enumerate(&z(1), 3).unwrap();
        assert_eq!(trivial.len(), 27);
        assert_eq!(trivial.idempotents().len(), 10);
        let z2 = MonoidTable::enumerate(&z(2), 3).unwrap();
        assert_eq!(z2.len(), 216);
        let brute = z2
            .elements()
            .iter()
            .filter(|a| compose(&z(2), a, a).unwrap() == **a)
            .count();
        assert_eq!(brute, 25);
        assert_eq!(z2.idempotents().len(), 25);
        assert_eq!(z2.element(0), &e(&[0, 0, 0], &[1, 1, 1]));
        assert_eq!(z2.element(z2.identity()), &Endomorphism::identity(3));
    }

    #[test]
    fn enumeration_respects_cap() {
        let err = MonoidTable::enumerate_capped(&z(2), 3, 100).unwrap_err();
        assert!(matches!(err, Error::ResourceBound { size: 216, .. }));
    }

    #[test]
    fn ids_round_trip() {
        let m = MonoidTable::enumerate(&FiniteGroup::symmetric(3).unwrap(), 2).unwrap();
        for (id, a) in m.elements().iter().enumerate() {
            assert_eq!(m.id_of(a), id);
        }
        assert!(m.elements().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mul_matches_compose() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let m = MonoidTable::enumerate(&g, 2).unwrap();
        for a in 0..m.len() {
            for b in (0..m.len()).step_by(7) {
                let c = compose(&g, m.element(a), m.element(b)).unwrap();
                assert_eq!(m.element(m.mul(a, b)), &c);
            }
        }
    }

    #[test]
    fn greens_on_singleton_monoid() {
        let m = MonoidTable::enumerate(&z(1), 1).unwrap();
        assert_eq!(m.len(), 1);
        let gp = m.greens_generic();
        for p in [&gp.r, &gp.l, &gp.h, &gp.d] {
            assert_eq!(p.class_count(), 1);
        }
        assert_eq!(gp, m.greens_structural());
    }

    #[test]
    fn greens_examples_z2() {
        let g = z(2);
        let m = MonoidTable::enumerate(&g, 3).unwrap();
        let generic = m.greens_generic();
        let structural = m.greens_structural();
        assert_eq!(generic, structural);

        let a = m.id_of(&e(&[0, 1, 0], &[1, 1, 1]));
        let b = m.id_of(&e(&[1, 0, 1], &[2, 2, 2]));
        assert!(generic.r.same(a, b));
        assert!(!generic.l.same(a, b));

        let rank_one = m.rank_one();
        assert_eq!(rank_one.len(), 24);
        let d = generic.d.class_containing(a);
        assert_eq!(d, rank_one);
        let count = |p: &Partition| {
            let mut cs: Vec<usize> = rank_one.iter().map(|&x| p.class_of(x)).collect();
            cs.sort_unstable();
            cs.dedup();
            cs.len()
        };
        assert_eq!(count(&generic.r), 4);
        assert_eq!(count(&generic.l), 3);
        assert_eq!(count(&generic.h), 12);

        // The H-class of the identity is the group of units.
        let units: Vec<_> = (0..m.len()).filter(|&x| m.rank(x) == 3).collect();
        assert_eq!(generic.h.class_containing(m.identity()), units);
    }

    #[test]
    fn h11_is_isomorphic_to_group() {
        for g in [z(2), z(3), FiniteGroup::symmetric(3).unwrap()] {
            let m = MonoidTable::enumerate(&g, 3).unwrap();
            let iso = HClassIso::verify(&m, &m.greens_structural()).unwrap();
            assert_eq!(m.psi(iso.elements[0]), Some(0));
            assert_eq!(iso.elements[0], 0);
        }
        let g = z(2);
        let m = MonoidTable::enumerate(&g, 3).unwrap();
        assert_eq!(m.psi(m.id_of(&e(&[1, 1, 1], &[1, 1, 1]))), Some(1));
        let g = z(3);
        let m = MonoidTable::enumerate(&g, 3).unwrap();
        assert_eq!(m.psi(m.mul(m.a_of(1), m.a_of(2))), Some(0));
    }

    #[test]
    fn compose_is_associative_on_z2() {
        let m = MonoidTable::enumerate(&z(2), 3).unwrap();
        let size = m.len();
        let bad = (0..size)
            .into_par_iter()
            .filter(|&a| {
                (0..size).any(|b| {
                    let ab = m.mul(a, b);
                    (0..size).any(|c| m.mul(ab, c) != m.mul(a, m.mul(b, c)))
                })
            })
            .count();
        assert_eq!(bad, 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_is_submultiplicative(a in 0usize..5832, b in 0usize..5832, c in 0usize..5832) {
                thread_local! {
                    static M: MonoidTable =
                        MonoidTable::enumerate(&FiniteGroup::symmetric(3).unwrap(), 3).unwrap();
                }
                M.with(|m| {
                    let ab = m.mul(a, b);
                    prop_assert!(m.rank(ab) <= m.rank(a).min(m.rank(b)));
                    prop_assert_eq!(m.mul(ab, c), m.mul(a, m.mul(b, c)));
                    Ok(())
                })?;
            }
        }
    }
}
