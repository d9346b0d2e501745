//! Nested partitions over arbitrary finite rooted trees, and the generic
//! respect checker.
//!
//! A nested partition of a set `X` assigns a block `P_t` to every tree
//! vertex `t`, with the root block equal to `X` and every non-leaf block the
//! disjoint union of its children's blocks. Leaves may sit at unequal
//! depths. A map respects two such partitions when every source block lands
//! inside a single same-level target block; the checker also builds the
//! induced per-level maps and verifies their commuting squares.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::partition::{points_at_level, PartitionType, Point};

/// A nested partition of a finite set, parametrized by a rooted tree.
/// Vertex 0 is the root; `parent[v]` is `None` exactly for the root.
#[derive(Clone, Debug)]
pub struct NestedPartition<X: Ord + Clone> {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
    blocks: Vec<BTreeSet<X>>,
}

impl<X: Ord + Clone + Hash + Debug> NestedPartition<X> {
    /// Validates the two defining conditions: the root block is the whole
    /// set, and every non-leaf block is the disjoint union of its children's
    /// blocks.
    pub fn new(parent: Vec<Option<usize>>, blocks: Vec<Vec<X>>) -> Result<Self> {
        if parent.len() != blocks.len() || parent.is_empty() {
            return Err(Error::MalformedPartition(
                "vertex and block counts differ or are empty".into(),
            ));
        }
        if parent[0].is_some() || parent.iter().skip(1).any(|p| p.is_none()) {
            return Err(Error::MalformedPartition(
                "vertex 0 must be the unique root".into(),
            ));
        }
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut level = vec![0usize; n];
        for v in 1..n {
            let p = parent[v].unwrap();
            if p >= v {
                return Err(Error::MalformedPartition(format!(
                    "parent {p} of vertex {v} must precede it"
                )));
            }
            children[p].push(v);
            level[v] = level[p] + 1;
        }
        let block_sets: Vec<BTreeSet<X>> = blocks
            .into_iter()
            .map(|b| {
                let set: BTreeSet<X> = b.iter().cloned().collect();
                if set.len() != b.len() {
                    Err(Error::MalformedPartition("duplicate block element".into()))
                } else {
                    Ok(set)
                }
            })
            .collect::<Result<_>>()?;
        for v in 0..n {
            if children[v].is_empty() {
                if block_sets[v].is_empty() {
                    return Err(Error::MalformedPartition(format!(
                        "leaf {v} has an empty block"
                    )));
                }
                continue;
            }
            let mut union = BTreeSet::new();
            let mut total = 0usize;
            for &c in &children[v] {
                total += block_sets[c].len();
                union.extend(block_sets[c].iter().cloned());
            }
            if union.len() != total || union != block_sets[v] {
                return Err(Error::MalformedPartition(format!(
                    "block of vertex {v} is not the disjoint union of its children"
                )));
            }
        }
        Ok(NestedPartition {
            parent,
            children,
            level,
            blocks: block_sets,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn level_of(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn block(&self, v: usize) -> &BTreeSet<X> {
        &self.blocks[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn ground_set(&self) -> &BTreeSet<X> {
        &self.blocks[0]
    }

    fn max_level(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// The derived set at depth `k`: children of non-leaf level-`k` vertices
    /// together with the points of level-`k` leaf blocks.
    fn derived_set(&self, k: usize) -> Vec<DerivedElem<X>> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            if self.level[v] != k {
                continue;
            }
            if self.is_leaf(v) {
                out.extend(self.blocks[v].iter().cloned().map(DerivedElem::Ground));
            } else {
                out.extend(self.children[v].iter().map(|&c| DerivedElem::Vertex(c)));
            }
        }
        out
    }

    /// The projection from the depth-`(k+1)` derived set to the depth-`k`
    /// one: vertices go to their parent, ground points to the leaf whose
    /// block contains them.
    fn project(&self, elem: &DerivedElem<X>) -> DerivedElem<X> {
        match elem {
            DerivedElem::Vertex(v) => {
                DerivedElem::Vertex(self.parent[*v].expect("level >= 1"))
            }
            DerivedElem::Ground(x) => DerivedElem::Vertex(self.leaf_of(x)),
        }
    }

    fn leaf_of(&self, x: &X) -> usize {
        let mut v = 0usize;
        'descend: while !self.is_leaf(v) {
            for &c in &self.children[v] {
                if self.blocks[c].contains(x) {
                    v = c;
                    continue 'descend;
                }
            }
            unreachable!("element belongs to some child block");
        }
        v
    }
}

/// An element of a derived level set: either a tree vertex one level down,
/// or a ground point under a leaf.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum DerivedElem<X: Ord + Clone> {
    Vertex(usize),
    Ground(X),
}

/// Why a map fails to respect two nested partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RespectViolation {
    /// Source vertex whose block image straddles target blocks (or has no
    /// same-level home).
    pub vertex: usize,
    pub level: usize,
}

/// The verdict of [`respects_map`], with the induced data on success.
#[derive(Clone, Debug)]
pub enum RespectOutcome {
    Respects {
        /// For each source vertex, the same-level target vertex containing
        /// its image.
        vertex_map: Vec<usize>,
        /// Whether every commuting square of the induced level maps holds.
        squares_commute: bool,
    },
    Violation(RespectViolation),
}

impl RespectOutcome {
    pub fn respects(&self) -> bool {
        matches!(self, RespectOutcome::Respects { .. })
    }
}

/// Checks that `f` respects the two nested partitions: every source block
/// must land inside a single same-level target block. On success the induced
/// maps between the derived level sets are built and their commuting squares
/// verified.
pub fn respects_map<X, Y>(
    f: impl Fn(&X) -> Y,
    source: &NestedPartition<X>,
    target: &NestedPartition<Y>,
) -> Result<RespectOutcome>
where
    X: Ord + Clone + Hash + Debug,
    Y: Ord + Clone + Hash + Debug,
{
    let ground = source.ground_set();
    for x in ground {
        let y = f(x);
        if !target.ground_set().contains(&y) {
            return Err(Error::MalformedPartition(format!(
                "image of {x:?} is outside the target ground set"
            )));
        }
    }
    let mut vertex_map = vec![usize::MAX; source.vertex_count()];
    for s in 0..source.vertex_count() {
        let image: BTreeSet<Y> = source.block(s).iter().map(&f).collect();
        let lvl = source.level_of(s);
        let home = (0..target.vertex_count())
            .filter(|&t| target.level_of(t) == lvl)
            .find(|&t| image.is_subset(target.block(t)));
        match home {
            Some(t) => vertex_map[s] = t,
            None => {
                return Ok(RespectOutcome::Violation(RespectViolation {
                    vertex: s,
                    level: lvl,
                }))
            }
        }
    }
    // Induced maps on the derived sets and their commuting squares. Ground
    // points are only representable on the target side when their leaf's
    // home is a same-level target leaf; other shapes fall outside the
    // induced-map formalism and are skipped.
    let depth = source.max_level().max(target.max_level());
    let apply = |elem: &DerivedElem<X>| -> Option<DerivedElem<Y>> {
        match elem {
            DerivedElem::Vertex(v) => Some(DerivedElem::Vertex(vertex_map[*v])),
            DerivedElem::Ground(x) => {
                let s = source.leaf_of(x);
                let t = vertex_map[s];
                if target.is_leaf(t) && target.level_of(t) == source.level_of(s) {
                    Some(DerivedElem::Ground(f(x)))
                } else {
                    None
                }
            }
        }
    };
    let mut squares_commute = true;
    for k in 0..depth {
        for elem in source.derived_set(k + 1) {
            let down_then_map = apply(&source.project(&elem));
            let map_then_down = apply(&elem).map(|e| target.project(&e));
            if let (Some(a), Some(b)) = (down_then_map, map_then_down) {
                if a != b {
                    squares_commute = false;
                }
            }
        }
    }
    Ok(RespectOutcome::Respects {
        vertex_map,
        squares_commute,
    })
}

/// The standard uniformly nested partition of a type, as a generic tree:
/// vertices are the points of all levels, the block of a point is the set of
/// leaf ranks below it.
pub fn standard_partition(ty: &PartitionType) -> Result<NestedPartition<u64>> {
    let k = ty.depth();
    let mut parent = Vec::new();
    let mut blocks: Vec<Vec<u64>> = Vec::new();
    let mut index: BTreeMap<Point, usize> = BTreeMap::new();
    for j in 0..=k {
        let width: u64 = ty.levels()[j..].iter().map(|&n| n as u64).product();
        for p in points_at_level(ty, j)? {
            let id = parent.len();
            let par = if j == 0 {
                None
            } else {
                Some(index[&p.project()?])
            };
            parent.push(par);
            let lo = p.rank(ty)? * width;
            blocks.push((lo..lo + width).collect());
            index.insert(p, id);
        }
    }
    NestedPartition::new(parent, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{Endomorphism, LeafMapOutcome};

    fn two_blocks() -> NestedPartition<u32> {
        // Root {1,2,3,4} with children {1,2} and {3,4}.
        NestedPartition::new(
            vec![None, Some(0), Some(0)],
            vec![vec![1, 2, 3, 4], vec![1, 2], vec![3, 4]],
        )
        .unwrap()
    }

    #[test]
    fn identity_respects_itself() {
        let p = two_blocks();
        let out = respects_map(|&x| x, &p, &p).unwrap();
        match out {
            RespectOutcome::Respects {
                vertex_map,
                squares_commute,
            } => {
                assert_eq!(vertex_map, vec![0, 1, 2]);
                assert!(squares_commute);
            }
            RespectOutcome::Violation(v) => panic!("unexpected violation {v:?}"),
        }
    }

    #[test]
    fn block_splitting_map_is_rejected() {
        let p = two_blocks();
        // 2 -> 3 splits the block {1,2} across both target blocks.
        let out = respects_map(|&x| if x == 2 { 3 } else { x }, &p, &p).unwrap();
        match out {
            RespectOutcome::Violation(v) => {
                assert_eq!(v.vertex, 1);
                assert_eq!(v.level, 1);
            }
            RespectOutcome::Respects { .. } => panic!("expected a violation"),
        }
    }

    #[test]
    fn malformed_partitions_are_rejected() {
        // Children do not cover the parent block.
        assert!(NestedPartition::new(
            vec![None, Some(0)],
            vec![vec![1, 2, 3], vec![1, 2]],
        )
        .is_err());
        // Overlapping children.
        assert!(NestedPartition::new(
            vec![None, Some(0), Some(0)],
            vec![vec![1, 2, 3], vec![1, 2], vec![2, 3]],
        )
        .is_err());
    }

    #[test]
    fn unequal_leaf_depths_are_allowed() {
        // Root {1,2,3}; child A = {1,2} with two grandchildren; child B = {3}
        // is a depth-1 leaf.
        let p = NestedPartition::new(
            vec![None, Some(0), Some(0), Some(1), Some(1)],
            vec![vec![1, 2, 3], vec![1, 2], vec![3], vec![1], vec![2]],
        )
        .unwrap();
        let out = respects_map(|&x| x, &p, &p).unwrap();
        assert!(out.respects());
    }

    #[test]
    fn agrees_with_the_leaf_map_filter_on_2_2() {
        let ty = PartitionType::new(&[2, 2]).unwrap();
        let std = standard_partition(&ty).unwrap();
        let mut accepted = 0u32;
        for code in 0..256u32 {
            let images: Vec<u64> = (0..4)
                .map(|i| ((code >> (2 * i)) & 3) as u64)
                .collect();
            let generic = respects_map(|&x| images[x as usize], &std, &std).unwrap();
            let direct = Endomorphism::from_leaf_map(&ty, &images).unwrap();
            match (&generic, &direct) {
                (RespectOutcome::Respects { squares_commute, .. }, LeafMapOutcome::Accepted(_)) => {
                    assert!(squares_commute);
                    accepted += 1;
                }
                (RespectOutcome::Violation(_), LeafMapOutcome::Rejected { .. }) => {}
                other => panic!("checkers disagree: {other:?}"),
            }
        }
        assert_eq!(accepted, 64);
    }
}
