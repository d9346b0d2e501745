//! Uniformly nested partitions in their standard model, and their
//! endomorphism monoid.
//!
//! A type `(n_1, ..., n_k)` describes the partition whose level-`j` points are
//! tuples in `[1..n_1] x ... x [1..n_j]`; the projection drops the last
//! coordinate. An endomorphism is stored canonically as its table of local
//! maps: one self-map of `[1..n_j]` per level-`(j-1)` point. Level maps are
//! recovered by the inductive rule
//! `f_j(v, i) = (f_{j-1}(v), f[v](i))`,
//! and composition acts on local maps by
//! `(fg)[v] = f[g_{j-1}(v)] o g[v]` (apply `g` first).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Default cap on the number of leaves of a partition type.
pub const DEFAULT_LEAF_BOUND: u64 = 1_000_000;

#[derive(Debug)]
struct TypeInner {
    levels: Vec<u32>,
    /// `level_sizes[j] = n_1 * ... * n_j`, with `level_sizes[0] = 1`.
    level_sizes: Vec<u64>,
    /// Start of the level-`j` block inside the flat local-map table.
    level_offsets: Vec<usize>,
    table_len: usize,
}

/// The type `(n_1, ..., n_k)` of a uniformly nested partition.
///
/// Cheap to clone; all derived sizes are computed exactly at construction and
/// oversized types are rejected up front.
#[derive(Clone)]
pub struct PartitionType(Arc<TypeInner>);

impl PartitionType {
    pub fn new(levels: &[u32]) -> Result<Self> {
        Self::with_leaf_bound(levels, DEFAULT_LEAF_BOUND)
    }

    pub fn with_leaf_bound(levels: &[u32], bound: u64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyType);
        }
        if levels.contains(&0) {
            return Err(Error::ZeroLevel);
        }
        let mut level_sizes = Vec::with_capacity(levels.len() + 1);
        level_sizes.push(1u64);
        let mut acc: u128 = 1;
        for &n in levels {
            acc = acc.saturating_mul(n as u128);
            if acc > bound as u128 {
                return Err(Error::TooLarge {
                    leaves: acc,
                    bound,
                });
            }
            level_sizes.push(acc as u64);
        }
        let mut level_offsets = Vec::with_capacity(levels.len());
        let mut table_len = 0usize;
        for (j, &n) in levels.iter().enumerate() {
            level_offsets.push(table_len);
            table_len += level_sizes[j] as usize * n as usize;
        }
        Ok(PartitionType(Arc::new(TypeInner {
            levels: levels.to_vec(),
            level_sizes,
            level_offsets,
            table_len,
        })))
    }

    /// Nesting depth `k`.
    pub fn depth(&self) -> usize {
        self.0.levels.len()
    }

    /// The sizes `(n_1, ..., n_k)`.
    pub fn levels(&self) -> &[u32] {
        &self.0.levels
    }

    /// `n_j` for `1 <= j <= k`.
    pub fn level(&self, j: usize) -> Result<u32> {
        if j == 0 || j > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: j,
                depth: self.depth(),
            });
        }
        Ok(self.0.levels[j - 1])
    }

    /// Number of level-`j` points, `0 <= j <= k`.
    pub fn level_size(&self, j: usize) -> Result<u64> {
        if j > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: j,
                depth: self.depth(),
            });
        }
        Ok(self.0.level_sizes[j])
    }

    pub fn leaf_count(&self) -> u64 {
        self.0.level_sizes[self.depth()]
    }

    /// Length of the flat local-map table of an endomorphism.
    pub fn table_len(&self) -> usize {
        self.0.table_len
    }

    fn slot(&self, j: usize, anchor_rank: u64) -> usize {
        let n = self.0.levels[j - 1] as usize;
        self.0.level_offsets[j - 1] + anchor_rank as usize * n
    }

    /// `|P(n)| = prod_j n_j ^ (n_j * n_1...n_{j-1})`, if it fits in `u128`.
    pub fn monoid_size(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for (j, &n) in self.0.levels.iter().enumerate() {
            let exp = (n as u64).checked_mul(self.0.level_sizes[j])?;
            acc = acc.checked_mul(checked_pow(n as u128, exp)?)?;
        }
        Some(acc)
    }

    /// `|P_j(n)|`: endomorphisms invertible through level `j`.
    pub fn invertible_count(&self, j: usize) -> Result<Option<u128>> {
        if j > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: j,
                depth: self.depth(),
            });
        }
        let mut acc: Option<u128> = Some(1);
        for (s, &n) in self.0.levels.iter().enumerate() {
            let factor = if s < j {
                checked_pow_factorial(n as u128, self.0.level_sizes[s])
            } else {
                (n as u64)
                    .checked_mul(self.0.level_sizes[s])
                    .and_then(|e| checked_pow(n as u128, e))
            };
            acc = acc.zip(factor).and_then(|(a, f)| a.checked_mul(f));
        }
        Ok(acc)
    }

    /// `|P_k(n)|`, the number of automorphisms.
    pub fn automorphism_count(&self) -> Option<u128> {
        self.invertible_count(self.depth()).ok().flatten()
    }
}

fn checked_pow(base: u128, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn checked_pow_factorial(n: u128, copies: u64) -> Option<u128> {
    let mut fact: u128 = 1;
    for i in 2..=n {
        fact = fact.checked_mul(i)?;
    }
    checked_pow(fact, copies)
}

impl PartialEq for PartitionType {
    fn eq(&self, other: &Self) -> bool {
        self.0.levels == other.0.levels
    }
}
impl Eq for PartitionType {}
impl Hash for PartitionType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.levels.hash(state);
    }
}
impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}
impl fmt::Debug for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A point of the standard partition: a tuple `(v_1, ..., v_j)` with
/// `1 <= v_i <= n_i`. The empty tuple is the unique level-0 point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<u32>,
}

impl Point {
    pub fn root() -> Self {
        Point { coords: Vec::new() }
    }

    pub fn new(coords: Vec<u32>) -> Self {
        Point { coords }
    }

    pub fn level(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    /// Checks membership in the given type at this point's level.
    pub fn validate(&self, ty: &PartitionType) -> Result<()> {
        if self.level() > ty.depth() {
            return Err(Error::InvalidPoint {
                point: self.to_string(),
            });
        }
        for (i, &c) in self.coords.iter().enumerate() {
            if c == 0 || c > ty.levels()[i] {
                return Err(Error::InvalidPoint {
                    point: self.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Mixed-radix rank among the points of this level, counting from 0.
    ///
    /// The rank is a bijection onto `0..n_1*...*n_j`, with the last
    /// coordinate varying fastest.
    pub fn rank(&self, ty: &PartitionType) -> Result<u64> {
        self.validate(ty)?;
        let mut r = 0u64;
        for (i, &c) in self.coords.iter().enumerate() {
            r = r * ty.levels()[i] as u64 + (c - 1) as u64;
        }
        Ok(r)
    }

    /// Inverse of [`Point::rank`].
    pub fn from_rank(ty: &PartitionType, level: usize, mut rank: u64) -> Result<Self> {
        if level > ty.depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: ty.depth(),
            });
        }
        if rank >= ty.level_size(level)? {
            return Err(Error::InvalidPoint {
                point: format!("rank {rank} at level {level}"),
            });
        }
        let mut coords = vec![0u32; level];
        for i in (0..level).rev() {
            let n = ty.levels()[i] as u64;
            coords[i] = (rank % n) as u32 + 1;
            rank /= n;
        }
        Ok(Point { coords })
    }

    /// Drops the last coordinate. The root point has no projection.
    pub fn project(&self) -> Result<Point> {
        if self.coords.is_empty() {
            return Err(Error::ProjectRoot);
        }
        Ok(Point {
            coords: self.coords[..self.coords.len() - 1].to_vec(),
        })
    }

    /// Appends one coordinate.
    pub fn child(&self, i: u32) -> Point {
        let mut coords = self.coords.clone();
        coords.push(i);
        Point { coords }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All points of level `j` in ascending mixed-radix order.
pub fn points_at_level(ty: &PartitionType, j: usize) -> Result<Vec<Point>> {
    let size = ty.level_size(j)?;
    (0..size).map(|r| Point::from_rank(ty, j, r)).collect()
}

/// Projection onto the first `j` coordinates, as a free function.
pub fn project(ty: &PartitionType, p: &Point) -> Result<Point> {
    p.validate(ty)?;
    p.project()
}

/// A self-map of `[1..n]`, stored as a 0-based image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalMap {
    table: Vec<u32>,
}

impl LocalMap {
    pub fn identity(n: usize) -> Self {
        LocalMap {
            table: (0..n as u32).collect(),
        }
    }

    /// Builds from a 1-based image table, e.g. `[2, 2]` is the constant 2.
    pub fn from_one_based(table: &[u32]) -> Result<Self> {
        let n = table.len() as u32;
        let mut t = Vec::with_capacity(table.len());
        for &v in table {
            if v == 0 || v > n {
                return Err(Error::EntryOutOfRange { value: v, max: n });
            }
            t.push(v - 1);
        }
        Ok(LocalMap { table: t })
    }

    pub fn constant(n: usize, value: u32) -> Result<Self> {
        if value == 0 || value > n as u32 {
            return Err(Error::EntryOutOfRange {
                value,
                max: n as u32,
            });
        }
        Ok(LocalMap {
            table: vec![value - 1; n],
        })
    }

    pub fn transposition(n: usize, a: u32, b: u32) -> Result<Self> {
        Ok(LocalMap::from_perm(&Perm::transposition(n, a, b)?))
    }

    pub fn from_perm(p: &Perm) -> Self {
        LocalMap {
            table: p.images().to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.table.len()
    }

    /// Image of a 1-based point.
    pub fn apply_one_based(&self, i: u32) -> u32 {
        self.table[(i - 1) as usize] + 1
    }

    pub fn to_one_based(&self) -> Vec<u32> {
        self.table.iter().map(|&v| v + 1).collect()
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        for &v in &self.table {
            if seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    pub fn as_perm(&self) -> Result<Perm> {
        Perm::from_images(self.table.clone())
    }

    /// Standard composition: applies `other` first, then `self`.
    pub fn compose(&self, other: &LocalMap) -> Result<LocalMap> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(LocalMap {
            table: other
                .table
                .iter()
                .map(|&v| self.table[v as usize])
                .collect(),
        })
    }

    fn raw(&self) -> &[u32] {
        &self.table
    }
}

impl fmt::Debug for LocalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

/// An endomorphism of the standard uniformly nested partition, stored as its
/// local-map table: for each level `j` and each level-`(j-1)` point `v`, the
/// self-map `f[v]` of `[1..n_j]`. The table is flat, levels in order, anchors
/// in ascending rank order.
#[derive(Clone)]
pub struct Endomorphism {
    ty: PartitionType,
    locals: Vec<u32>,
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.ty == other.ty && self.locals == other.locals
    }
}
impl Eq for Endomorphism {}
impl Hash for Endomorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.locals.hash(state);
    }
}
impl PartialOrd for Endomorphism {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Endomorphism {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ty
            .levels()
            .cmp(other.ty.levels())
            .then_with(|| self.locals.cmp(&other.locals))
    }
}

/// Outcome of inducing an endomorphism from a bare leaf map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafMapOutcome {
    Accepted(Endomorphism),
    /// The image of the block over `block` straddles two same-level blocks.
    Rejected {
        level: usize,
        block: Point,
    },
}

impl LeafMapOutcome {
    pub fn accepted(self) -> Option<Endomorphism> {
        match self {
            LeafMapOutcome::Accepted(e) => Some(e),
            LeafMapOutcome::Rejected { .. } => None,
        }
    }
}

impl Endomorphism {
    pub fn identity(ty: &PartitionType) -> Self {
        let mut locals = Vec::with_capacity(ty.table_len());
        for j in 1..=ty.depth() {
            let n = ty.levels()[j - 1];
            for _ in 0..ty.level_size(j - 1).unwrap() {
                locals.extend(0..n);
            }
        }
        Endomorphism {
            ty: ty.clone(),
            locals,
        }
    }

    pub fn partition_type(&self) -> &PartitionType {
        &self.ty
    }

    /// Builds an endomorphism by asking for the local map at every anchor.
    pub fn from_local_maps(
        ty: &PartitionType,
        mut get: impl FnMut(&Point) -> LocalMap,
    ) -> Result<Self> {
        let mut locals = Vec::with_capacity(ty.table_len());
        for j in 1..=ty.depth() {
            let n = ty.levels()[j - 1] as usize;
            for v in points_at_level(ty, j - 1)? {
                let m = get(&v);
                if m.degree() != n {
                    return Err(Error::LocalMapSize {
                        anchor: v.to_string(),
                        got: m.degree(),
                        expected: n,
                    });
                }
                locals.extend_from_slice(m.raw());
            }
        }
        Ok(Endomorphism {
            ty: ty.clone(),
            locals,
        })
    }

    /// Builds an endomorphism from an explicit anchor-to-map table.
    /// Every anchor must appear exactly once.
    pub fn from_local_table(ty: &PartitionType, entries: &[(Point, LocalMap)]) -> Result<Self> {
        let mut slots: Vec<Option<&LocalMap>> = vec![None; total_anchor_count(ty)];
        for (v, m) in entries {
            v.validate(ty)?;
            let j = v.level() + 1;
            if j > ty.depth() {
                return Err(Error::InvalidPoint {
                    point: v.to_string(),
                });
            }
            let idx = anchor_index(ty, j, v.rank(ty)?);
            if slots[idx].is_some() {
                return Err(Error::DuplicateLocalMap {
                    anchor: v.to_string(),
                });
            }
            slots[idx] = Some(m);
        }
        let mut iter = slots.into_iter();
        let mut missing: Option<String> = None;
        let endo = Endomorphism::from_local_maps(ty, |v| match iter.next().flatten() {
            Some(m) => m.clone(),
            None => {
                if missing.is_none() {
                    missing = Some(v.to_string());
                }
                LocalMap::identity(ty.levels()[v.level()] as usize)
            }
        })?;
        if let Some(anchor) = missing {
            return Err(Error::MissingLocalMap { anchor });
        }
        Ok(endo)
    }

    /// The local map `f[v]` at a level-`(j-1)` anchor.
    pub fn local(&self, v: &Point) -> Result<LocalMap> {
        v.validate(&self.ty)?;
        let j = v.level() + 1;
        if j > self.ty.depth() {
            return Err(Error::InvalidPoint {
                point: v.to_string(),
            });
        }
        let n = self.ty.levels()[j - 1] as usize;
        let s = self.ty.slot(j, v.rank(&self.ty)?);
        Ok(LocalMap {
            table: self.locals[s..s + n].to_vec(),
        })
    }

    fn local_slice(&self, j: usize, anchor_rank: u64) -> &[u32] {
        let n = self.ty.levels()[j - 1] as usize;
        let s = self.ty.slot(j, anchor_rank);
        &self.locals[s..s + n]
    }

    /// The induced map on level-`j` ranks. Level 0 is the identity on the
    /// singleton.
    pub fn level_map(&self, j: usize) -> Result<Vec<u64>> {
        if j > self.ty.depth() {
            return Err(Error::LevelOutOfRange {
                level: j,
                depth: self.ty.depth(),
            });
        }
        let mut map = vec![0u64];
        for s in 1..=j {
            let n = self.ty.levels()[s - 1] as u64;
            let mut next = Vec::with_capacity(map.len() * n as usize);
            for (anchor, &img) in map.iter().enumerate() {
                let local = self.local_slice(s, anchor as u64);
                for i in 0..n as usize {
                    next.push(img * n + local[i] as u64);
                }
            }
            map = next;
        }
        Ok(map)
    }

    /// The induced self-map of the leaf set, by rank.
    pub fn leaf_map(&self) -> Vec<u64> {
        self.level_map(self.ty.depth()).expect("depth in range")
    }

    /// Composition `self o g`: apply `g` first, then `self`.
    pub fn compose(&self, g: &Endomorphism) -> Result<Endomorphism> {
        if self.ty != g.ty {
            return Err(Error::TypeMismatch {
                left: self.ty.to_string(),
                right: g.ty.to_string(),
            });
        }
        let ty = &self.ty;
        let mut locals = Vec::with_capacity(ty.table_len());
        // g's level-(j-1) map, extended level by level as we go.
        let mut g_map = vec![0u64];
        for j in 1..=ty.depth() {
            let n = ty.levels()[j - 1] as usize;
            let mut next = Vec::with_capacity(g_map.len() * n);
            for (anchor, &img) in g_map.iter().enumerate() {
                let g_local = g.local_slice(j, anchor as u64);
                let f_local = self.local_slice(j, img);
                for i in 0..n {
                    let gi = g_local[i];
                    locals.push(f_local[gi as usize]);
                    next.push(img * n as u64 + gi as u64);
                }
            }
            g_map = next;
        }
        Ok(Endomorphism {
            ty: ty.clone(),
            locals,
        })
    }

    /// Recomputes every level map explicitly and checks the commuting squares
    /// `rho_j o f_{j+1} = f_j o rho_j`.
    pub fn verify_commuting(&self) -> bool {
        let k = self.ty.depth();
        for j in 0..k {
            let fj = self.level_map(j).unwrap();
            let fj1 = self.level_map(j + 1).unwrap();
            let n = self.ty.levels()[j] as u64;
            for (rank, &img) in fj1.iter().enumerate() {
                if img / n != fj[rank / n as usize] {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the level-`j` map is a bijection.
    pub fn is_level_invertible(&self, j: usize) -> Result<bool> {
        if j > self.ty.depth() {
            return Err(Error::LevelOutOfRange {
                level: j,
                depth: self.ty.depth(),
            });
        }
        // f_j is bijective iff every local map at levels <= j is.
        for s in 1..=j {
            let anchors = self.ty.level_size(s - 1)?;
            for a in 0..anchors {
                let local = self.local_slice(s, a);
                let mut seen = vec![false; local.len()];
                for &v in local {
                    if seen[v as usize] {
                        return Ok(false);
                    }
                    seen[v as usize] = true;
                }
            }
        }
        Ok(true)
    }

    /// Accepts a bare self-map of the leaf ranks iff it respects the
    /// partition, returning the induced endomorphism; rejection names the
    /// first violating block in (level, rank) order.
    pub fn from_leaf_map(ty: &PartitionType, images: &[u64]) -> Result<LeafMapOutcome> {
        let leaves = ty.leaf_count();
        if images.len() as u64 != leaves {
            return Err(Error::InvalidInput(format!(
                "leaf map has {} entries, expected {leaves}",
                images.len()
            )));
        }
        if let Some(&bad) = images.iter().find(|&&v| v >= leaves) {
            return Err(Error::InvalidInput(format!(
                "leaf image {bad} out of range 0..{leaves}"
            )));
        }
        let k = ty.depth();
        // level_maps[j] = induced map on level-j ranks, if consistent.
        let mut level_maps: Vec<Vec<u64>> = Vec::with_capacity(k + 1);
        level_maps.push(vec![0]);
        for j in 1..=k {
            // Leaves under a level-j point form a contiguous rank range of
            // this width.
            let width: u64 = ty.levels()[j..].iter().map(|&n| n as u64).product();
            let points = ty.level_size(j)?;
            let mut map = Vec::with_capacity(points as usize);
            for p in 0..points {
                let lo = p * width;
                let prefix = images[lo as usize] / width;
                for x in lo..lo + width {
                    if images[x as usize] / width != prefix {
                        return Ok(LeafMapOutcome::Rejected {
                            level: j,
                            block: Point::from_rank(ty, j, p)?,
                        });
                    }
                }
                map.push(prefix);
            }
            level_maps.push(map);
        }
        let mut locals = Vec::with_capacity(ty.table_len());
        for j in 1..=k {
            let n = ty.levels()[j - 1] as u64;
            for anchor in 0..ty.level_size(j - 1)? {
                for i in 0..n {
                    locals.push((level_maps[j][(anchor * n + i) as usize] % n) as u32);
                }
            }
        }
        Ok(LeafMapOutcome::Accepted(Endomorphism {
            ty: ty.clone(),
            locals,
        }))
    }

    /// All endomorphisms in ascending canonical (flat local table) order.
    pub fn enumerate(ty: &PartitionType) -> Result<EndoIter> {
        match ty.monoid_size() {
            Some(total) if total <= 100_000_000 => Ok(EndoIter {
                ty: ty.clone(),
                radices: table_radices(ty),
                state: Some(vec![0u32; ty.table_len()]),
            }),
            other => Err(Error::Infeasible {
                what: "monoid size".into(),
                size: other.unwrap_or(u128::MAX),
                bound: 100_000_000,
            }),
        }
    }

    /// All automorphisms (every local map a permutation), ascending.
    pub fn enumerate_automorphisms(ty: &PartitionType) -> Result<Vec<Endomorphism>> {
        match ty.automorphism_count() {
            Some(total) if total <= 10_000_000 => {}
            other => {
                return Err(Error::Infeasible {
                    what: "automorphism count".into(),
                    size: other.unwrap_or(u128::MAX),
                    bound: 10_000_000,
                })
            }
        }
        // Odometer over anchors, each digit ranging over S_{n_j}.
        let mut perms_per_level: Vec<Vec<Perm>> = Vec::new();
        for &n in ty.levels() {
            perms_per_level.push(Perm::all(n as usize));
        }
        let mut anchor_levels = Vec::new();
        for j in 1..=ty.depth() {
            for _ in 0..ty.level_size(j - 1)? {
                anchor_levels.push(j);
            }
        }
        let mut digits = vec![0usize; anchor_levels.len()];
        let mut out = Vec::new();
        loop {
            let mut locals = Vec::with_capacity(ty.table_len());
            for (slot, &d) in digits.iter().enumerate() {
                let j = anchor_levels[slot];
                locals.extend_from_slice(perms_per_level[j - 1][d].images());
            }
            out.push(Endomorphism {
                ty: ty.clone(),
                locals,
            });
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < perms_per_level[anchor_levels[i] - 1].len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// A uniformly random endomorphism: each local-map entry independent
    /// uniform.
    pub fn random<R: Rng>(ty: &PartitionType, rng: &mut R) -> Endomorphism {
        let mut locals = Vec::with_capacity(ty.table_len());
        for j in 1..=ty.depth() {
            let n = ty.levels()[j - 1];
            for _ in 0..ty.level_size(j - 1).unwrap() * n as u64 {
                locals.push(rng.gen_range(0..n));
            }
        }
        Endomorphism {
            ty: ty.clone(),
            locals,
        }
    }
}

fn total_anchor_count(ty: &PartitionType) -> usize {
    (0..ty.depth())
        .map(|j| ty.level_size(j).unwrap() as usize)
        .sum()
}

fn anchor_index(ty: &PartitionType, j: usize, rank: u64) -> usize {
    (0..j - 1)
        .map(|s| ty.level_size(s).unwrap() as usize)
        .sum::<usize>()
        + rank as usize
}

fn table_radices(ty: &PartitionType) -> Vec<u32> {
    let mut radices = Vec::with_capacity(ty.table_len());
    for j in 1..=ty.depth() {
        let n = ty.levels()[j - 1];
        for _ in 0..ty.level_size(j - 1).unwrap() * n as u64 {
            radices.push(n);
        }
    }
    radices
}

/// Iterator over all endomorphisms of a type in canonical order.
pub struct EndoIter {
    ty: PartitionType,
    radices: Vec<u32>,
    state: Option<Vec<u32>>,
}

impl Iterator for EndoIter {
    type Item = Endomorphism;

    fn next(&mut self) -> Option<Endomorphism> {
        let state = self.state.as_mut()?;
        let out = Endomorphism {
            ty: self.ty.clone(),
            locals: state.clone(),
        };
        // Odometer increment, last digit fastest.
        let mut i = state.len();
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            state[i] += 1;
            if state[i] < self.radices[i] {
                break;
            }
            state[i] = 0;
        }
        Some(out)
    }
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo{}{{", self.ty)?;
        let mut first = true;
        for j in 1..=self.ty.depth() {
            for v in points_at_level(&self.ty, j - 1).unwrap() {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{v}:{:?}", self.local(&v).unwrap())?;
            }
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct LocalEntryJson {
    v: Vec<u32>,
    map: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct EndoJson {
    #[serde(rename = "type")]
    ty: Vec<u32>,
    local: Vec<LocalEntryJson>,
}

impl Serialize for Endomorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut local = Vec::new();
        for j in 1..=self.ty.depth() {
            for v in points_at_level(&self.ty, j - 1).map_err(serde::ser::Error::custom)? {
                let m = self.local(&v).map_err(serde::ser::Error::custom)?;
                local.push(LocalEntryJson {
                    v: v.coords().to_vec(),
                    map: m.to_one_based(),
                });
            }
        }
        EndoJson {
            ty: self.ty.levels().to_vec(),
            local,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Endomorphism {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = EndoJson::deserialize(deserializer)?;
        let ty = PartitionType::new(&raw.ty).map_err(D::Error::custom)?;
        let entries: Vec<(Point, LocalMap)> = raw
            .local
            .into_iter()
            .map(|e| {
                let m = LocalMap::from_one_based(&e.map).map_err(D::Error::custom)?;
                Ok((Point::new(e.v), m))
            })
            .collect::<std::result::Result<_, D::Error>>()?;
        Endomorphism::from_local_table(&ty, &entries).map_err(D::Error::custom)
    }
}
