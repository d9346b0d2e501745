//! Level-invertibility predicates, strata, and the step witnesses used by
//! the rank engine.
//!
//! `P_j(f)` holds iff the level-`j` map of `f` is a bijection. Each `P_j` is
//! multiplicative in both directions (`P_j(fg) <=> P_j(f) & P_j(g)`), and
//! `P_j` implies `P_{j-1}`, so the largest satisfied level stratifies the
//! monoid.

use std::fmt;

use rayon::prelude::*;

use crate::elementary::bracket;
use crate::error::{Error, Result};
use crate::partition::{Endomorphism, LocalMap, PartitionType, Point};

/// Whether the level-`j` map of `f` is invertible, `1 <= j <= k`.
pub fn pred_level(f: &Endomorphism, j: usize) -> Result<bool> {
    if j == 0 {
        return Err(Error::LevelOutOfRange {
            level: 0,
            depth: f.partition_type().depth(),
        });
    }
    f.is_level_invertible(j)
}

/// A predicate built from the level-invertibility family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredicateId {
    /// `P_j`: the level-`j` map is invertible.
    Level(usize),
    /// A finite conjunction of `P_j`'s.
    Conjunction(Vec<usize>),
}

impl PredicateId {
    pub fn eval(&self, f: &Endomorphism) -> Result<bool> {
        match self {
            PredicateId::Level(j) => pred_level(f, *j),
            PredicateId::Conjunction(js) => {
                for &j in js {
                    if !pred_level(f, j)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateId::Level(j) => write!(f, "P_{j}"),
            PredicateId::Conjunction(js) => {
                for (i, j) in js.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "P_{j}")?;
                }
                Ok(())
            }
        }
    }
}

/// The largest `j` with `P_j(f)` true; 0 if already `P_1` fails. Depth `k`
/// means `f` is an automorphism.
pub fn stratum(f: &Endomorphism) -> usize {
    let k = f.partition_type().depth();
    let mut best = 0;
    for j in 1..=k {
        if f.is_level_invertible(j).expect("level in range") {
            best = j;
        } else {
            break;
        }
    }
    best
}

/// Outcome of an exhaustive primitivity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimitivityOutcome {
    Primitive { pairs_checked: u64 },
    Counterexample { a: Endomorphism, b: Endomorphism },
}

impl PrimitivityOutcome {
    pub fn is_primitive(&self) -> bool {
        matches!(self, PrimitivityOutcome::Primitive { .. })
    }
}

/// Exhaustively tests `P(ab) <=> P(a) & P(b)` over all ordered pairs of the
/// monoid. Returns the first violating pair in row-major enumeration order,
/// regardless of worker count.
pub fn check_primitive(
    pred: &PredicateId,
    ty: &PartitionType,
    workers: usize,
) -> Result<PrimitivityOutcome> {
    check_primitive_with(|f| pred.eval(f), ty, workers)
}

/// [`check_primitive`] over an arbitrary predicate.
pub fn check_primitive_with(
    pred: impl Fn(&Endomorphism) -> Result<bool> + Sync,
    ty: &PartitionType,
    workers: usize,
) -> Result<PrimitivityOutcome> {
    let size = ty.monoid_size().unwrap_or(u128::MAX);
    if size > 20_000 {
        return Err(Error::Infeasible {
            what: "monoid size".into(),
            size,
            bound: 20_000,
        });
    }
    let elems: Vec<Endomorphism> = Endomorphism::enumerate(ty)?.collect();
    let values: Vec<bool> = elems.iter().map(&pred).collect::<Result<_>>()?;
    let n = elems.len();
    let check_row = |i: usize| -> Option<usize> {
        let a = &elems[i];
        for (j, b) in elems.iter().enumerate() {
            let ab = a.compose(b).expect("same type");
            let lhs = pred(&ab).expect("predicate evaluates");
            if lhs != (values[i] && values[j]) {
                return Some(i * n + j);
            }
        }
        None
    };
    let first = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        pool.install(|| (0..n).into_par_iter().filter_map(check_row).min())
    } else {
        (0..n).filter_map(check_row).min()
    };
    Ok(match first {
        Some(idx) => PrimitivityOutcome::Counterexample {
            a: elems[idx / n].clone(),
            b: elems[idx % n].clone(),
        },
        None => PrimitivityOutcome::Primitive {
            pairs_checked: (n as u64) * (n as u64),
        },
    })
}

/// The witness `[tau, u]` with `tau` collapsing 1 onto 2 inside `[1..n_j]`
/// and `u = (1,...,1)` at level `j-1`. Its stratum is exactly `j-1`.
pub fn step_witness(ty: &PartitionType, j: usize) -> Result<Endomorphism> {
    let n = ty.level(j)?;
    if n < 2 {
        return Err(Error::UnsupportedConstruction { level: j, size: n });
    }
    let mut table = vec![0u32; n as usize];
    for (i, t) in table.iter_mut().enumerate() {
        *t = if i == 0 { 2 } else { i as u32 + 1 };
    }
    let tau = LocalMap::from_one_based(&table)?;
    let u = Point::new(vec![1; j - 1]);
    bracket(ty, &tau, &u)
}

/// The involutive automorphism that transports the fiber over `(1,...,1)` to
/// the fiber over `v` (both at level `j-1`) and back, acting identically on
/// all deeper coordinates.
///
/// At each level `s <= j-1` it applies the transposition `(1, v_s)` inside
/// the blocks along both prefix paths; every deeper local map is the
/// identity. This makes `h` an involution in the automorphism group with
/// `h_{j-1}(1,...,1) = v`, and conjugation by `h` moves a level-`j` bracket
/// anchored at `(1,...,1)` to the same bracket anchored at `v`.
pub fn conjugator_h(ty: &PartitionType, j: usize, v: &Point) -> Result<Endomorphism> {
    if j == 0 || j > ty.depth() {
        return Err(Error::LevelOutOfRange {
            level: j,
            depth: ty.depth(),
        });
    }
    v.validate(ty)?;
    if v.level() != j - 1 {
        return Err(Error::WrongLevel {
            point: v.to_string(),
            expected: j - 1,
        });
    }
    let coords = v.coords().to_vec();
    Endomorphism::from_local_maps(ty, |w| {
        let s = w.level() + 1;
        let n = ty.levels()[s - 1] as usize;
        if s > j - 1 {
            return LocalMap::identity(n);
        }
        let on_u_path = w.coords().iter().all(|&c| c == 1);
        let on_v_path = w.coords() == &coords[..s - 1];
        if on_u_path || on_v_path {
            LocalMap::transposition(n, 1, coords[s - 1]).expect("coordinate in range")
        } else {
            LocalMap::identity(n)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::points_at_level;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ty(levels: &[u32]) -> PartitionType {
        PartitionType::new(levels).unwrap()
    }

    #[test]
    fn identity_satisfies_every_level() {
        let t = ty(&[2, 2]);
        let id = Endomorphism::identity(&t);
        assert!(pred_level(&id, 1).unwrap());
        assert!(pred_level(&id, 2).unwrap());
        assert_eq!(stratum(&id), 2);
        assert!(pred_level(&id, 0).is_err());
        assert!(pred_level(&id, 3).is_err());
    }

    #[test]
    fn constant_top_fails_all_levels() {
        let t = ty(&[2, 2]);
        let f = Endomorphism::from_local_table(
            &t,
            &[
                (Point::root(), LocalMap::constant(2, 2).unwrap()),
                (Point::new(vec![1]), LocalMap::identity(2)),
                (Point::new(vec![2]), LocalMap::transposition(2, 1, 2).unwrap()),
            ],
        )
        .unwrap();
        assert!(!pred_level(&f, 1).unwrap());
        assert!(!pred_level(&f, 2).unwrap());
        assert_eq!(stratum(&f), 0);
    }

    #[test]
    fn level_invertibility_matches_explicit_level_maps() {
        // Oracle: bijectivity of the explicitly computed level map.
        let t = ty(&[2, 2]);
        for f in Endomorphism::enumerate(&t).unwrap() {
            for j in 1..=2 {
                let map = f.level_map(j).unwrap();
                let mut seen = vec![false; map.len()];
                let mut bijective = true;
                for &x in &map {
                    if seen[x as usize] {
                        bijective = false;
                        break;
                    }
                    seen[x as usize] = true;
                }
                assert_eq!(pred_level(&f, j).unwrap(), bijective);
            }
        }
    }

    #[test]
    fn inclusion_chain_over_2_2_and_3_3_samples() {
        let t = ty(&[2, 2]);
        for f in Endomorphism::enumerate(&t).unwrap() {
            if pred_level(&f, 2).unwrap() {
                assert!(pred_level(&f, 1).unwrap());
            }
        }
        let t33 = ty(&[3, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let f = Endomorphism::random(&t33, &mut rng);
            if pred_level(&f, 2).unwrap() {
                assert!(pred_level(&f, 1).unwrap());
            }
        }
    }

    #[test]
    fn brackets_are_automorphisms_iff_their_map_is() {
        let t = ty(&[2, 2]);
        for v in points_at_level(&t, 1).unwrap() {
            for code in 0..4u32 {
                let table = [code % 2 + 1, code / 2 + 1];
                let g = LocalMap::from_one_based(&table).unwrap();
                let b = bracket(&t, &g, &v).unwrap();
                assert_eq!(
                    pred_level(&b, 2).unwrap(),
                    g.is_permutation(),
                    "anchor {v}, map {g:?}"
                );
                assert_eq!(stratum(&b) == 2, g.is_permutation());
            }
        }
        // Depth-3 anchors over (3,3): all 27 self-maps of [1..3].
        let t33 = ty(&[3, 3]);
        for v in points_at_level(&t33, 1).unwrap() {
            for code in 0..27u32 {
                let table = [code % 3 + 1, code / 3 % 3 + 1, code / 9 + 1];
                let g = LocalMap::from_one_based(&table).unwrap();
                let b = bracket(&t33, &g, &v).unwrap();
                assert_eq!(pred_level(&b, 2).unwrap(), g.is_permutation());
            }
        }
    }

    #[test]
    fn level_predicates_are_primitive_over_2_2() {
        let t = ty(&[2, 2]);
        for pred in [
            PredicateId::Level(1),
            PredicateId::Level(2),
            PredicateId::Conjunction(vec![1, 2]),
        ] {
            let outcome = check_primitive(&pred, &t, 1).unwrap();
            assert_eq!(
                outcome,
                PrimitivityOutcome::Primitive {
                    pairs_checked: 4096
                },
                "{pred}"
            );
        }
    }

    #[test]
    fn primitivity_check_is_worker_independent() {
        let t = ty(&[2, 2]);
        let pred = PredicateId::Level(1);
        let seq = check_primitive(&pred, &t, 1).unwrap();
        let par = check_primitive(&pred, &t, 4).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn non_primitive_predicate_yields_first_counterexample() {
        // "is the constant-1 map" is not primitive; the scan must return the
        // first violating pair in row-major enumeration order.
        let t = ty(&[2]);
        let is_c1 = |f: &Endomorphism| Ok(f.leaf_map() == vec![0, 0]);
        let elems: Vec<Endomorphism> = Endomorphism::enumerate(&t).unwrap().collect();
        let mut first = None;
        'outer: for a in &elems {
            for b in &elems {
                let ab = a.compose(b).unwrap();
                if (ab.leaf_map() == vec![0, 0])
                    != (a.leaf_map() == vec![0, 0] && b.leaf_map() == vec![0, 0])
                {
                    first = Some((a.clone(), b.clone()));
                    break 'outer;
                }
            }
        }
        let (ea, eb) = first.expect("constant predicate is not primitive");
        for workers in [1, 3] {
            match check_primitive_with(is_c1, &t, workers).unwrap() {
                PrimitivityOutcome::Counterexample { a, b } => {
                    assert_eq!((a, b), (ea.clone(), eb.clone()));
                }
                other => panic!("expected a counterexample, got {other:?}"),
            }
        }
    }

    #[test]
    fn stratum_examples() {
        let t = ty(&[2, 2]);
        // Invertible top, collapsing second level: stratum 1.
        let f = Endomorphism::from_local_table(
            &t,
            &[
                (Point::root(), LocalMap::transposition(2, 1, 2).unwrap()),
                (Point::new(vec![1]), LocalMap::constant(2, 1).unwrap()),
                (Point::new(vec![2]), LocalMap::identity(2)),
            ],
        )
        .unwrap();
        assert_eq!(stratum(&f), 1);
    }

    #[test]
    fn strata_partition_the_monoid() {
        let t = ty(&[2, 2]);
        let mut counts = [0u64; 3];
        for f in Endomorphism::enumerate(&t).unwrap() {
            counts[stratum(&f)] += 1;
        }
        // |P| = 64, |P_1| = 32, |P_2| = 8.
        assert_eq!(counts, [32, 24, 8]);
    }

    #[test]
    fn step_witness_shape_and_stratum() {
        let t = ty(&[2, 2]);
        let w1 = step_witness(&t, 1).unwrap();
        assert_eq!(w1.level_map(1).unwrap(), vec![1, 1]); // 1 -> 2, 2 -> 2
        assert_eq!(
            w1.local(&Point::new(vec![1])).unwrap(),
            LocalMap::identity(2)
        );
        assert_eq!(
            w1.local(&Point::new(vec![2])).unwrap(),
            LocalMap::identity(2)
        );
        for j in 1..=2 {
            assert_eq!(stratum(&step_witness(&t, j).unwrap()), j - 1);
        }
    }

    #[test]
    fn step_witness_collapses_one_fiber_of_3_3() {
        let t = ty(&[3, 3]);
        let w = step_witness(&t, 2).unwrap();
        // Only the fiber over (1) is touched: (1,1) -> (1,2).
        let leaf = w.leaf_map();
        let expect: Vec<u64> = (0..9)
            .map(|r| if r == 0 { 1 } else { r })
            .collect();
        assert_eq!(leaf, expect);
        assert_eq!(stratum(&w), 1);
    }

    #[test]
    fn step_witness_needs_a_nontrivial_level() {
        let t = ty(&[1, 2]);
        assert!(matches!(
            step_witness(&t, 1),
            Err(Error::UnsupportedConstruction { level: 1, size: 1 })
        ));
        assert!(step_witness(&t, 2).is_ok());
    }

    #[test]
    fn conjugator_at_the_anchor_itself_is_identity() {
        let t = ty(&[2, 2]);
        let h = conjugator_h(&t, 2, &Point::new(vec![1])).unwrap();
        assert_eq!(h, Endomorphism::identity(&t));
    }

    #[test]
    fn conjugator_swaps_blocks_over_2_2() {
        let t = ty(&[2, 2]);
        let h = conjugator_h(&t, 2, &Point::new(vec![2])).unwrap();
        // Swaps the blocks (1,.) and (2,.) pointwise.
        assert_eq!(h.leaf_map(), vec![2, 3, 0, 1]);
        let hh = h.compose(&h).unwrap();
        assert_eq!(hh, Endomorphism::identity(&t));
    }

    #[test]
    fn conjugation_identity_everywhere_at_desk_scale() {
        for levels in [vec![2u32, 2], vec![3, 3]] {
            let t = ty(&levels);
            let id = Endomorphism::identity(&t);
            for j in 1..=t.depth() {
                let w = step_witness(&t, j).unwrap();
                for v in points_at_level(&t, j - 1).unwrap() {
                    let h = conjugator_h(&t, j, &v).unwrap();
                    assert_eq!(h.compose(&h).unwrap(), id, "h^2 at j={j}, v={v}");
                    assert_eq!(stratum(&h), t.depth(), "h must be an automorphism");
                    let tau = w.local(&Point::new(vec![1; j - 1])).unwrap();
                    let lhs = bracket(&t, &tau, &v).unwrap();
                    let rhs = h.compose(&w).unwrap().compose(&h).unwrap();
                    assert_eq!(lhs, rhs, "conjugation at j={j}, v={v}");
                }
            }
        }
    }

    #[test]
    fn subsemigroup_of_level_invertibles_is_closed() {
        let t = ty(&[2, 2]);
        let p1: Vec<Endomorphism> = Endomorphism::enumerate(&t)
            .unwrap()
            .filter(|f| pred_level(f, 1).unwrap())
            .collect();
        for a in &p1 {
            for b in &p1 {
                assert!(pred_level(&a.compose(b).unwrap(), 1).unwrap());
            }
        }
    }
}
