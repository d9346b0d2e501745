//! Elementary endomorphisms and the level decomposition.
//!
//! `bracket(g, v)` acts by `g` on the fiber over the anchor `v` and fixes
//! every other local map. `t_level(f, j)` keeps the level-`j` local maps of
//! `f` and is trivial elsewhere; every endomorphism factors through its
//! levels, deepest level applied first (see [`recompose`]).

use crate::error::{Error, Result};
use crate::partition::{Endomorphism, LocalMap, PartitionType, Point};

/// The endomorphism with local map `g` at the anchor `v` and the identity at
/// every other anchor. `v` sits at level `j-1` and `g` must be a self-map of
/// `[1..n_j]`.
pub fn bracket(ty: &PartitionType, g: &LocalMap, v: &Point) -> Result<Endomorphism> {
    v.validate(ty)?;
    let j = v.level() + 1;
    if j > ty.depth() {
        return Err(Error::WrongLevel {
            point: v.to_string(),
            expected: ty.depth().saturating_sub(1),
        });
    }
    let n = ty.level(j)? as usize;
    if g.degree() != n {
        return Err(Error::LocalMapSize {
            anchor: v.to_string(),
            got: g.degree(),
            expected: n,
        });
    }
    Endomorphism::from_local_maps(ty, |w| {
        if w == v {
            g.clone()
        } else {
            LocalMap::identity(ty.levels()[w.level()] as usize)
        }
    })
}

/// The level-`j` aggregate of `f`: local maps of `f` at level `j`, identity
/// elsewhere. Equals the product of `bracket(f[v], v)` over all level-`(j-1)`
/// anchors `v`; those factors commute, so the table is assembled directly.
pub fn t_level(f: &Endomorphism, j: usize) -> Result<Endomorphism> {
    let ty = f.partition_type();
    if j == 0 || j > ty.depth() {
        return Err(Error::LevelOutOfRange {
            level: j,
            depth: ty.depth(),
        });
    }
    Endomorphism::from_local_maps(ty, |w| {
        if w.level() + 1 == j {
            f.local(w).expect("anchor is valid")
        } else {
            LocalMap::identity(ty.levels()[w.level()] as usize)
        }
    })
}

/// The level factors `[t_1(f), ..., t_k(f)]` of `f`.
///
/// Recomposing with the deepest level applied first recovers `f` exactly:
/// `f = t_1(f) o t_2(f) o ... o t_k(f)` under right-to-left composition.
pub fn decompose(f: &Endomorphism) -> Vec<Endomorphism> {
    (1..=f.partition_type().depth())
        .map(|j| t_level(f, j).expect("level in range"))
        .collect()
}

/// Folds the factors of [`decompose`] back together: the last factor (the
/// deepest level) is applied first.
pub fn recompose(parts: &[Endomorphism]) -> Result<Endomorphism> {
    let mut iter = parts.iter().rev();
    let mut acc = iter
        .next()
        .ok_or_else(|| Error::InvalidInput("empty factor list".into()))?
        .clone();
    for t in iter {
        acc = t.compose(&acc)?;
    }
    Ok(acc)
}
