//! Wreath products over a generic finite-group interface, the recovery
//! lemmas with word certificates, the correspondence between automorphisms
//! of a nested partition and iterated wreath products, the parity
//! homomorphism, and the `k`-element generating set of the automorphism
//! group.
//!
//! Permutations multiply left to right throughout this module (see
//! [`crate::perm`]); endomorphisms still compose right to left. The
//! correspondence `phi` between the two worlds therefore reverses products:
//! `phi(f.compose(g)) = phi(g) * phi(f)`, checked exhaustively in the tests
//! and recorded as [`WREATH_ORIENTATION`].

use std::fmt;
use std::hash::Hash;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::elementary::bracket;
use crate::error::{Error, Result};
use crate::partition::{Endomorphism, LocalMap, PartitionType, Point};
use crate::perm::{ParityVector, Perm};
use crate::rank::{closure, ClosureOptions, ClosureReport};

/// How the endomorphism/wreath correspondence transports composition.
pub const WREATH_ORIENTATION: &str = "phi(f.compose(g)) = phi(g) * phi(f)";

/// A finite group given by its operations. Instances are expected to be
/// cheap handles; elements carry the data.
pub trait Group {
    type Elem: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;

    /// Group order, when it fits in `u128`.
    fn order(&self) -> Option<u128>;

    /// Full enumeration for desk-scale instances.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// Order of an element, by iterated multiplication.
    fn order_of(&self, a: &Self::Elem) -> u64 {
        let id = self.identity();
        let mut acc = a.clone();
        let mut n = 1u64;
        while acc != id {
            acc = self.mul(&acc, a);
            n += 1;
        }
        n
    }

    fn pow(&self, a: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut result = self.identity();
        let mut square = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(&result, &square);
            }
            square = self.mul(&square, &square);
            exp >>= 1;
        }
        result
    }

    /// Spot-checks the axioms over a small deterministic sample.
    fn spot_check(&self, sample: &[Self::Elem]) -> Result<()> {
        let id = self.identity();
        for x in sample {
            if self.mul(&id, x) != *x || self.mul(x, &id) != *x {
                return Err(Error::InvalidInput("identity law fails".into()));
            }
            if self.mul(x, &self.inverse(x)) != id {
                return Err(Error::InvalidInput("inverse law fails".into()));
            }
        }
        for x in sample {
            for y in sample {
                for z in sample {
                    let xy_z = self.mul(&self.mul(x, y), z);
                    let x_yz = self.mul(x, &self.mul(y, z));
                    if xy_z != x_yz {
                        return Err(Error::InvalidInput("associativity fails".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The symmetric group on `{1..degree}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetricGroup {
    pub degree: usize,
}

impl SymmetricGroup {
    pub fn new(degree: usize) -> Self {
        SymmetricGroup { degree }
    }
}

impl Group for SymmetricGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.mul(b).expect("degrees agree")
    }

    fn inverse(&self, a: &Perm) -> Perm {
        a.inverse()
    }

    fn order(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for i in 2..=self.degree as u128 {
            acc = acc.checked_mul(i)?;
        }
        Some(acc)
    }

    fn elements(&self) -> Option<Vec<Perm>> {
        if self.degree <= 8 {
            Some(Perm::all(self.degree))
        } else {
            None
        }
    }
}

/// An element of `G wr S_m`: a base tuple and a top permutation. The top
/// permutation acts on positions from the left, so
/// `(h)pi * (g)sigma = (h_i * g_{i^pi})_i * (pi sigma)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WreathElem<E> {
    pub base: Vec<E>,
    pub top: Perm,
}

/// The wreath product `G wr S_m` over a generic base group.
#[derive(Clone, Debug)]
pub struct WreathProduct<G: Group> {
    base: G,
    degree: usize,
}

impl<G: Group> WreathProduct<G> {
    pub fn new(base: G, degree: usize) -> Result<Self> {
        let w = WreathProduct { base, degree };
        // Axiom spot check on a deterministic sample of mixed elements.
        let mut sample = vec![w.identity()];
        if degree >= 2 {
            sample.push(w.top_perm(&Perm::transposition(degree, 1, 2)?)?);
            sample.push(w.top_perm(&Perm::full_cycle(degree))?);
        }
        w.spot_check(&sample)?;
        Ok(w)
    }

    pub fn base_group(&self) -> &G {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `[g, i]`: the base tuple with `g` in slot `i` (1-based), identity top.
    pub fn embed(&self, g: &G::Elem, position: usize) -> Result<WreathElem<G::Elem>> {
        if position == 0 || position > self.degree {
            return Err(Error::EntryOutOfRange {
                value: position as u32,
                max: self.degree as u32,
            });
        }
        let mut base = vec![self.base.identity(); self.degree];
        base[position - 1] = g.clone();
        Ok(WreathElem {
            base,
            top: Perm::identity(self.degree),
        })
    }

    /// A top permutation with identity base.
    pub fn top_perm(&self, p: &Perm) -> Result<WreathElem<G::Elem>> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: p.degree(),
                right: self.degree,
            });
        }
        Ok(WreathElem {
            base: vec![self.base.identity(); self.degree],
            top: p.clone(),
        })
    }

    pub fn element(&self, base: Vec<G::Elem>, top: Perm) -> Result<WreathElem<G::Elem>> {
        if base.len() != self.degree || top.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: base.len(),
                right: self.degree,
            });
        }
        Ok(WreathElem { base, top })
    }
}

impl<G: Group> Group for WreathProduct<G> {
    type Elem = WreathElem<G::Elem>;

    fn identity(&self) -> Self::Elem {
        WreathElem {
            base: vec![self.base.identity(); self.degree],
            top: Perm::identity(self.degree),
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert_eq!(a.base.len(), self.degree);
        debug_assert_eq!(b.base.len(), self.degree);
        let base = (0..self.degree)
            .map(|i| self.base.mul(&a.base[i], &b.base[a.top.apply(i)]))
            .collect();
        WreathElem {
            base,
            top: a.top.mul(&b.top).expect("degrees agree"),
        }
    }

    fn inverse(&self, a: &Self::Elem) -> Self::Elem {
        let top = a.top.inverse();
        let base = (0..self.degree)
            .map(|i| self.base.inverse(&a.base[top.apply(i)]))
            .collect();
        WreathElem { base, top }
    }

    fn order(&self) -> Option<u128> {
        // |G|^m * m!
        let g = self.base.order()?;
        let mut acc: u128 = 1;
        for _ in 0..self.degree {
            acc = acc.checked_mul(g)?;
        }
        for i in 2..=self.degree as u128 {
            acc = acc.checked_mul(i)?;
        }
        Some(acc)
    }

    fn elements(&self) -> Option<Vec<Self::Elem>> {
        if self.order()? > 1_000_000 {
            return None;
        }
        let base_elems = self.base.elements()?;
        let tops = SymmetricGroup::new(self.degree).elements()?;
        let mut tuples: Vec<Vec<G::Elem>> = vec![Vec::new()];
        for _ in 0..self.degree {
            let mut next = Vec::with_capacity(tuples.len() * base_elems.len());
            for t in &tuples {
                for e in &base_elems {
                    let mut t2 = t.clone();
                    t2.push(e.clone());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let mut out = Vec::with_capacity(tuples.len() * tops.len());
        for t in &tuples {
            for p in &tops {
                out.push(WreathElem {
                    base: t.clone(),
                    top: p.clone(),
                });
            }
        }
        Some(out)
    }
}

/// An element of an iterated wreath product, nested to a runtime depth.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Nested {
    Perm(Perm),
    Wreath { base: Vec<Nested>, top: Perm },
}

impl Nested {
    pub fn top(&self) -> &Perm {
        match self {
            Nested::Perm(p) => p,
            Nested::Wreath { top, .. } => top,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Nested::Perm(p) => p.is_identity(),
            Nested::Wreath { base, top } => {
                top.is_identity() && base.iter().all(|b| b.is_identity())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NestedJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<Vec<NestedJson>>,
    top: Vec<u32>,
}

impl From<&Nested> for NestedJson {
    fn from(n: &Nested) -> NestedJson {
        match n {
            Nested::Perm(p) => NestedJson {
                base: None,
                top: p.to_one_based(),
            },
            Nested::Wreath { base, top } => NestedJson {
                base: Some(base.iter().map(NestedJson::from).collect()),
                top: top.to_one_based(),
            },
        }
    }
}

impl NestedJson {
    fn into_nested(self) -> Result<Nested> {
        let top = Perm::from_one_based(&self.top)?;
        match self.base {
            None => Ok(Nested::Perm(top)),
            Some(base) => Ok(Nested::Wreath {
                base: base
                    .into_iter()
                    .map(NestedJson::into_nested)
                    .collect::<Result<_>>()?,
                top,
            }),
        }
    }
}

impl Serialize for Nested {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NestedJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Nested {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        NestedJson::deserialize(deserializer)?
            .into_nested()
            .map_err(D::Error::custom)
    }
}

/// The iterated wreath product `S_{n_k} wr ... wr S_{n_1}` attached to a
/// partition type: the top factor permutes the level-1 blocks.
#[derive(Clone, Debug)]
pub struct IteratedWreath {
    levels: Vec<u32>,
}

impl IteratedWreath {
    pub fn new(ty: &PartitionType) -> Self {
        Self::from_levels(ty.levels()).expect("partition types have valid levels")
    }

    pub fn from_levels(levels: &[u32]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyType);
        }
        let iw = IteratedWreath {
            levels: levels.to_vec(),
        };
        let mut sample = vec![iw.identity()];
        let m = levels[0] as usize;
        if m >= 2 {
            sample.push(Self::lift_top(levels, &Perm::transposition(m, 1, 2)?)?);
            sample.push(Self::lift_top(levels, &Perm::full_cycle(m))?);
        }
        iw.spot_check(&sample)?;
        Ok(iw)
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Validates the recursive shape of an element.
    pub fn contains(&self, x: &Nested) -> bool {
        match (x, self.levels.len()) {
            (Nested::Perm(p), 1) => p.degree() == self.levels[0] as usize,
            (Nested::Wreath { base, top }, k) if k >= 2 => {
                let m = self.levels[0] as usize;
                if top.degree() != m || base.len() != m {
                    return false;
                }
                let inner = IteratedWreath {
                    levels: self.levels[1..].to_vec(),
                };
                base.iter().all(|b| inner.contains(b))
            }
            _ => false,
        }
    }

    fn identity_nested(levels: &[u32]) -> Nested {
        let m = levels[0] as usize;
        if levels.len() == 1 {
            Nested::Perm(Perm::identity(m))
        } else {
            Nested::Wreath {
                base: vec![Self::identity_nested(&levels[1..]); m],
                top: Perm::identity(m),
            }
        }
    }

    /// The element with the given top permutation and identity base.
    pub fn lift_top(levels: &[u32], p: &Perm) -> Result<Nested> {
        let m = levels[0] as usize;
        if p.degree() != m {
            return Err(Error::DegreeMismatch {
                left: p.degree(),
                right: m,
            });
        }
        if levels.len() == 1 {
            Ok(Nested::Perm(p.clone()))
        } else {
            Ok(Nested::Wreath {
                base: vec![Self::identity_nested(&levels[1..]); m],
                top: p.clone(),
            })
        }
    }

    /// Embeds an element of the one-level-deeper product at `position`
    /// (1-based) with identity top.
    pub fn embed_nested(levels: &[u32], inner: Nested, position: usize) -> Result<Nested> {
        if levels.len() < 2 {
            return Err(Error::InvalidInput(
                "embedding needs at least two levels".into(),
            ));
        }
        let m = levels[0] as usize;
        if position == 0 || position > m {
            return Err(Error::EntryOutOfRange {
                value: position as u32,
                max: m as u32,
            });
        }
        let mut base = vec![Self::identity_nested(&levels[1..]); m];
        base[position - 1] = inner;
        Ok(Nested::Wreath {
            base,
            top: Perm::identity(m),
        })
    }

    fn mul_nested(a: &Nested, b: &Nested) -> Nested {
        match (a, b) {
            (Nested::Perm(x), Nested::Perm(y)) => Nested::Perm(x.mul(y).expect("degrees agree")),
            (Nested::Wreath { base: h, top: pi }, Nested::Wreath { base: g, top: sigma }) => {
                let m = h.len();
                let base = (0..m)
                    .map(|i| Self::mul_nested(&h[i], &g[pi.apply(i)]))
                    .collect();
                Nested::Wreath {
                    base,
                    top: pi.mul(sigma).expect("degrees agree"),
                }
            }
            _ => panic!("mismatched nesting depth"),
        }
    }

    fn inverse_nested(a: &Nested) -> Nested {
        match a {
            Nested::Perm(p) => Nested::Perm(p.inverse()),
            Nested::Wreath { base, top } => {
                let inv_top = top.inverse();
                let m = base.len();
                let new_base = (0..m)
                    .map(|i| Self::inverse_nested(&base[inv_top.apply(i)]))
                    .collect();
                Nested::Wreath {
                    base: new_base,
                    top: inv_top,
                }
            }
        }
    }
}

impl Group for IteratedWreath {
    type Elem = Nested;

    fn identity(&self) -> Nested {
        Self::identity_nested(&self.levels)
    }

    fn mul(&self, a: &Nested, b: &Nested) -> Nested {
        Self::mul_nested(a, b)
    }

    fn inverse(&self, a: &Nested) -> Nested {
        Self::inverse_nested(a)
    }

    fn order(&self) -> Option<u128> {
        // |S_{n_k} wr ... wr S_{n_1}| = prod_j (n_j!)^(n_1...n_{j-1})
        let mut acc: u128 = 1;
        let mut copies: u128 = 1;
        for &n in &self.levels {
            let mut fact: u128 = 1;
            for i in 2..=n as u128 {
                fact = fact.checked_mul(i)?;
            }
            for _ in 0..copies {
                acc = acc.checked_mul(fact)?;
            }
            copies = copies.checked_mul(n as u128)?;
        }
        Some(acc)
    }

    fn elements(&self) -> Option<Vec<Nested>> {
        if self.order()? > 1_000_000 {
            return None;
        }
        fn go(levels: &[u32]) -> Vec<Nested> {
            let m = levels[0] as usize;
            let tops = Perm::all(m);
            if levels.len() == 1 {
                return tops.into_iter().map(Nested::Perm).collect();
            }
            let inner = go(&levels[1..]);
            let mut tuples: Vec<Vec<Nested>> = vec![Vec::new()];
            for _ in 0..m {
                let mut next = Vec::with_capacity(tuples.len() * inner.len());
                for t in &tuples {
                    for e in &inner {
                        let mut t2 = t.clone();
                        t2.push(e.clone());
                        next.push(t2);
                    }
                }
                tuples = next;
            }
            let mut out = Vec::with_capacity(tuples.len() * tops.len());
            for t in &tuples {
                for p in &tops {
                    out.push(Nested::Wreath {
                        base: t.clone(),
                        top: p.clone(),
                    });
                }
            }
            out
        }
        Some(go(&self.levels))
    }
}

/// The iterated wreath product isomorphic to the automorphism group of the
/// partition of this type.
pub fn iterated(ty: &PartitionType) -> IteratedWreath {
    IteratedWreath::new(ty)
}

/// Transports an automorphism into the iterated wreath product. Fails on
/// a non-invertible input, naming the first bad level.
///
/// The transport reverses products: see [`WREATH_ORIENTATION`].
pub fn endo_to_wreath(f: &Endomorphism) -> Result<Nested> {
    let ty = f.partition_type();
    for j in 1..=ty.depth() {
        if !f.is_level_invertible(j)? {
            return Err(Error::NotInvertible { level: j });
        }
    }
    fn go(f: &Endomorphism, prefix: &Point, levels: &[u32]) -> Nested {
        let top = f
            .local(prefix)
            .expect("prefix valid")
            .as_perm()
            .expect("invertible local map");
        if levels.len() == 1 {
            return Nested::Perm(top);
        }
        let base = (1..=levels[0])
            .map(|i| go(f, &prefix.child(i), &levels[1..]))
            .collect();
        Nested::Wreath { base, top }
    }
    Ok(go(f, &Point::root(), ty.levels()))
}

/// Inverse of [`endo_to_wreath`].
pub fn wreath_to_endo(ty: &PartitionType, x: &Nested) -> Result<Endomorphism> {
    let iw = IteratedWreath::new(ty);
    if !iw.contains(x) {
        return Err(Error::InvalidInput(
            "element shape does not match the partition type".into(),
        ));
    }
    Endomorphism::from_local_maps(ty, |v| {
        let mut cur = x;
        for &c in v.coords() {
            match cur {
                Nested::Wreath { base, .. } => cur = &base[(c - 1) as usize],
                Nested::Perm(_) => unreachable!("shape was validated"),
            }
        }
        LocalMap::from_perm(cur.top())
    })
}

/// The levelwise sign vector of an automorphism: slot `j` is the sign of the
/// induced permutation of the level-`j` points.
pub fn parity(f: &Endomorphism) -> Result<ParityVector> {
    let ty = f.partition_type();
    let mut signs = Vec::with_capacity(ty.depth());
    for j in 1..=ty.depth() {
        if !f.is_level_invertible(j)? {
            return Err(Error::NotInvertible { level: j });
        }
        let map = f.level_map(j)?;
        let table: Vec<u32> = map.iter().map(|&v| v as u32).collect();
        signs.push(Perm::from_images(table)?.sign());
    }
    Ok(ParityVector(signs))
}

/// The cycle of odd order generating `S_n` together with a transposition:
/// the full cycle for odd `n`, the cycle `(2,...,n)` for even `n`.
pub fn odd_cycle(n: usize) -> Perm {
    if n % 2 == 1 {
        Perm::full_cycle(n)
    } else {
        let cycle: Vec<u32> = (2..=n as u32).collect();
        Perm::from_cycles(n, &[&cycle]).expect("valid cycle")
    }
}

/// The `k`-element generating set of the automorphism group, returned as
/// endomorphisms.
///
/// Every level size must be at least 3: the construction anchors at
/// coordinate 3 and its recovery lemma needs degree >= 3. For depth 1 the
/// set degenerates to the single transposition `(1,2)`, which cannot
/// generate `S_n` for `n >= 3`; callers are expected to surface the failed
/// closure rather than patch the construction.
pub fn group_generators(ty: &PartitionType) -> Result<Vec<Endomorphism>> {
    let levels = ty.levels();
    for (idx, &n) in levels.iter().enumerate() {
        if n < 3 {
            return Err(Error::UnsupportedConstruction {
                level: idx + 1,
                size: n,
            });
        }
    }
    let k = ty.depth();
    let mut gens = Vec::with_capacity(k);
    for j in 1..k {
        // The generator for layer j: inside the subproduct on levels j..k,
        // embed the odd cycle of layer j+1 at slot 3 and multiply by the
        // top transposition (1,2); then push it down along the path
        // (3,...,3) to the full product.
        let sub = &levels[j - 1..];
        let m = sub[0] as usize;
        let tau_lift = IteratedWreath::lift_top(&sub[1..], &odd_cycle(sub[1] as usize))?;
        let embedded = IteratedWreath::embed_nested(sub, tau_lift, 3)?;
        let top = IteratedWreath::lift_top(sub, &Perm::transposition(m, 1, 2)?)?;
        let mut g = IteratedWreath::mul_nested(&embedded, &top);
        for s in (0..j - 1).rev() {
            g = IteratedWreath::embed_nested(&levels[s..], g, 3)?;
        }
        gens.push(wreath_to_endo(ty, &g)?);
    }
    // The last generator: a transposition embedded along the path (2,...,2),
    // multiplied by the full top cycle when there is a top to move.
    let g_tilde = if k == 1 {
        Nested::Perm(Perm::transposition(levels[0] as usize, 1, 2)?)
    } else {
        let mut sigma_hat = Nested::Perm(Perm::transposition(levels[k - 1] as usize, 1, 2)?);
        for s in (1..k - 1).rev() {
            sigma_hat = IteratedWreath::embed_nested(&levels[s..], sigma_hat, 2)?;
        }
        let embedded = IteratedWreath::embed_nested(levels, sigma_hat, 2)?;
        let cycle = IteratedWreath::lift_top(levels, &Perm::full_cycle(levels[0] as usize))?;
        IteratedWreath::mul_nested(&embedded, &cycle)
    };
    gens.push(wreath_to_endo(ty, &g_tilde)?);
    Ok(gens)
}

/// The two commuting factors of `x = [g, i] * pi` recovered as powers of
/// `x`, together with the exponent certificate.
#[derive(Clone, Debug)]
pub struct CoprimeSplit<E> {
    /// `[g, i]`, equal to `x ^ exponent_embedded`.
    pub embedded: WreathElem<E>,
    /// `pi` as a wreath element, equal to `x ^ exponent_top`.
    pub top_part: WreathElem<E>,
    pub certificate: CoprimeCertificate,
}

/// The arithmetic behind a [`CoprimeSplit`]: Bezout coefficients for the two
/// orders, reduced modulo the order of the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoprimeCertificate {
    pub order_embedded: u64,
    pub order_top: u64,
    pub bezout: (i64, i64),
    pub element_order: u64,
    pub exponent_top: u64,
    pub exponent_embedded: u64,
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Splits `x = [g, i] * pi` into its embedded and top parts, where the order
/// of `g` is coprime to the order of `pi` and `pi` fixes `i`. Both parts are
/// returned as explicit powers of `x`, re-verified by multiplication.
pub fn coprime_split<G: Group>(
    w: &WreathProduct<G>,
    x: &WreathElem<G::Elem>,
    position: usize,
) -> Result<CoprimeSplit<G::Elem>> {
    if position == 0 || position > w.degree() {
        return Err(Error::EntryOutOfRange {
            value: position as u32,
            max: w.degree() as u32,
        });
    }
    let base_id = w.base_group().identity();
    for (slot, e) in x.base.iter().enumerate() {
        if slot != position - 1 && *e != base_id {
            return Err(Error::InvalidInput(format!(
                "base slot {} is not the identity",
                slot + 1
            )));
        }
    }
    if x.top.apply(position - 1) != position - 1 {
        return Err(Error::PositionMoved { position });
    }
    let g = &x.base[position - 1];
    let order_g = w.base_group().order_of(g);
    let order_top = x.top.order();
    let (gcd, p, q) = extended_gcd(order_g as i64, order_top as i64);
    if gcd != 1 {
        return Err(Error::NotCoprime {
            left: order_g,
            right: order_top,
        });
    }
    // The two factors commute, so the order of x is the product.
    let element_order = order_g * order_top;
    let exponent_top = (p * order_g as i64).rem_euclid(element_order as i64) as u64;
    let exponent_embedded = (q * order_top as i64).rem_euclid(element_order as i64) as u64;
    let top_part = w.pow(x, exponent_top);
    let embedded = w.pow(x, exponent_embedded);
    let expect_top = w.top_perm(&x.top)?;
    let expect_embedded = w.embed(g, position)?;
    if top_part != expect_top || embedded != expect_embedded {
        return Err(Error::InvalidInput(
            "power certificate failed verification".into(),
        ));
    }
    if w.mul(&embedded, &top_part) != *x {
        return Err(Error::InvalidInput(
            "split does not multiply back to the input".into(),
        ));
    }
    Ok(CoprimeSplit {
        embedded,
        top_part,
        certificate: CoprimeCertificate {
            order_embedded: order_g,
            order_top,
            bezout: (p, q),
            element_order,
            exponent_top,
            exponent_embedded,
        },
    })
}

/// A letter of a word over the two recovery generators.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Letter {
    A,
    AInv,
    B,
}

/// A word in `{a, a^-1, b}` with its evaluator.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    fn push_power(&mut self, letter: Letter, count: usize) {
        self.0.extend(std::iter::repeat_n(letter, count));
    }

    fn concat(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn eval<G: Group>(
        &self,
        w: &WreathProduct<G>,
        a: &WreathElem<G::Elem>,
        b: &WreathElem<G::Elem>,
    ) -> WreathElem<G::Elem> {
        let a_inv = w.inverse(a);
        let mut acc = w.identity();
        for letter in &self.0 {
            let factor = match letter {
                Letter::A => a,
                Letter::AInv => &a_inv,
                Letter::B => b,
            };
            acc = w.mul(&acc, factor);
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let letter = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == letter {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match (letter, run) {
                (Letter::A, 1) => write!(f, "a")?,
                (Letter::A, r) => write!(f, "a^{r}")?,
                (Letter::AInv, 1) => write!(f, "a^-1")?,
                (Letter::AInv, r) => write!(f, "a^-{r}")?,
                (Letter::B, 1) => write!(f, "b")?,
                (Letter::B, r) => write!(f, "b^{r}")?,
            }
            i += run;
        }
        Ok(())
    }
}

/// A recovered element together with the word over `{a, a^-1, b}` that
/// evaluates to it.
#[derive(Clone, Debug)]
pub struct RecoveredElement<E> {
    pub element: WreathElem<E>,
    pub word: Word,
}

/// The four elements recovered from the pair `a = [sigma,2](1,...,m)`,
/// `b = [g,3](1,2)`, each with a verified word certificate, plus the list of
/// intermediate identities that were checked by multiplication.
#[derive(Clone, Debug)]
pub struct RecoveryWitness<E> {
    pub a: WreathElem<E>,
    pub b: WreathElem<E>,
    /// `[g, 3]`.
    pub embedded_g: RecoveredElement<E>,
    /// `[sigma, 1]`.
    pub sigma_first: RecoveredElement<E>,
    /// The full cycle `(1,...,m)`.
    pub full_cycle: RecoveredElement<E>,
    /// The transposition `(1,2)`.
    pub transposition: RecoveredElement<E>,
    pub coprime_certificate: CoprimeCertificate,
    pub verified_identities: Vec<String>,
}

/// From `a = [sigma,2](1,...,m)` and `b = [g,3](1,2)` with `g` of odd order,
/// `sigma` of order 2 and `m >= 3`, recovers `[g,3]`, `[sigma,1]`,
/// `(1,...,m)` and `(1,2)` as explicit words in `{a, b, a^-1}`. All
/// intermediate identities are re-verified by multiplication; any mismatch
/// is an error.
pub fn strannaya_extract<G: Group>(
    w: &WreathProduct<G>,
    g: &G::Elem,
    sigma: &G::Elem,
) -> Result<RecoveryWitness<G::Elem>> {
    let m = w.degree();
    if m < 3 {
        return Err(Error::DegreeTooSmall { need: 3, got: m });
    }
    let base = w.base_group();
    let order_g = base.order_of(g);
    if order_g % 2 == 0 {
        return Err(Error::OrderNotOdd { order: order_g });
    }
    let order_sigma = base.order_of(sigma);
    if order_sigma != 2 {
        return Err(Error::OrderNotTwo { order: order_sigma });
    }
    let cycle = Perm::full_cycle(m);
    let transposition_12 = Perm::transposition(m, 1, 2)?;
    let a = w.mul(&w.embed(sigma, 2)?, &w.top_perm(&cycle)?);
    let b = w.mul(&w.embed(g, 3)?, &w.top_perm(&transposition_12)?);

    let mut verified = Vec::new();
    let check = |verified: &mut Vec<String>,
                     name: &str,
                     got: &WreathElem<G::Elem>,
                     expect: &WreathElem<G::Elem>|
     -> Result<()> {
        if got == expect {
            verified.push(name.to_string());
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("identity `{name}` failed")))
        }
    };

    // a^m spreads sigma over every slot.
    let a_m = w.pow(&a, m as u64);
    let all_sigma = w.element(vec![sigma.clone(); m], Perm::identity(m))?;
    check(&mut verified, "a^m = (sigma,...,sigma)", &a_m, &all_sigma)?;

    // (ab)^{m-1} fills slots 2..m with sigma*g.
    let ab = w.mul(&a, &b);
    let ab_pow = w.pow(&ab, m as u64 - 1);
    let sigma_g = base.mul(sigma, g);
    let mut tuple = vec![sigma_g.clone(); m];
    tuple[0] = base.identity();
    let expect_ab = w.element(tuple, Perm::identity(m))?;
    check(
        &mut verified,
        "(ab)^{m-1} = (e, sigma g, ..., sigma g)",
        &ab_pow,
        &expect_ab,
    )?;

    // Their product isolates sigma in slot 1 with g everywhere else.
    let mixed = w.mul(&a_m, &ab_pow);
    let mut tuple = vec![g.clone(); m];
    tuple[0] = sigma.clone();
    let expect_mixed = w.element(tuple, Perm::identity(m))?;
    check(
        &mut verified,
        "a^m (ab)^{m-1} = (sigma, g, ..., g)",
        &mixed,
        &expect_mixed,
    )?;

    // Raising to the odd order of g kills the g's and keeps sigma.
    let sigma_first_elem = w.pow(&mixed, order_g);
    let expect_sigma_first = w.embed(sigma, 1)?;
    check(
        &mut verified,
        "(a^m (ab)^{m-1})^{|g|} = [sigma, 1]",
        &sigma_first_elem,
        &expect_sigma_first,
    )?;

    // Conjugation assembles the bare cycle.
    let a_inv = w.inverse(&a);
    let a_sq = w.mul(&a, &a);
    let cycle_elem = w.mul(&w.mul(&a_inv, &sigma_first_elem), &a_sq);
    let expect_cycle = w.top_perm(&cycle)?;
    check(
        &mut verified,
        "a^-1 [sigma,1] a^2 = (1,...,m)",
        &cycle_elem,
        &expect_cycle,
    )?;

    // b alone yields [g,3] and (1,2) through the coprime split.
    let split = coprime_split(w, &b, 3)?;
    verified.push("b-powers give [g,3] and (1,2)".to_string());

    let mut sigma_word = Word::default();
    {
        let mut block = Word::default();
        block.push_power(Letter::A, m);
        for _ in 0..m - 1 {
            block.push_power(Letter::A, 1);
            block.push_power(Letter::B, 1);
        }
        for _ in 0..order_g {
            sigma_word.concat(&block);
        }
    }
    let mut cycle_word = Word::default();
    cycle_word.push_power(Letter::AInv, 1);
    cycle_word.concat(&sigma_word);
    cycle_word.push_power(Letter::A, 2);

    let mut embedded_word = Word::default();
    embedded_word.push_power(Letter::B, split.certificate.exponent_embedded as usize);
    let mut transposition_word = Word::default();
    transposition_word.push_power(Letter::B, split.certificate.exponent_top as usize);

    // Every word certificate must re-evaluate to its element.
    for (name, word, elem) in [
        ("word for [g,3]", &embedded_word, &split.embedded),
        ("word for (1,2)", &transposition_word, &split.top_part),
        ("word for [sigma,1]", &sigma_word, &sigma_first_elem),
        ("word for (1,...,m)", &cycle_word, &cycle_elem),
    ] {
        if word.eval(w, &a, &b) != *elem {
            return Err(Error::InvalidInput(format!("{name} failed to re-evaluate")));
        }
        verified.push(name.to_string());
    }

    Ok(RecoveryWitness {
        a,
        b,
        embedded_g: RecoveredElement {
            element: split.embedded.clone(),
            word: embedded_word,
        },
        sigma_first: RecoveredElement {
            element: sigma_first_elem,
            word: sigma_word,
        },
        full_cycle: RecoveredElement {
            element: cycle_elem,
            word: cycle_word,
        },
        transposition: RecoveredElement {
            element: split.top_part.clone(),
            word: transposition_word,
        },
        coprime_certificate: split.certificate,
        verified_identities: verified,
    })
}

/// Outcome of a generation check in `G wr S_m`.
#[derive(Clone, Debug)]
pub struct GenCheckOutcome {
    pub report: ClosureReport,
    pub expected_order: u128,
    pub matches: bool,
}

/// Verifies by closure that the embedded generators `[g_t, i_t]` together
/// with the given top permutations generate the whole wreath product,
/// comparing the closure size against `|G|^m * m!`.
pub fn gen_check<G>(
    w: &WreathProduct<G>,
    group_gens: &[G::Elem],
    positions: &[usize],
    perm_gens: &[Perm],
    opts: &ClosureOptions,
) -> Result<GenCheckOutcome>
where
    G: Group + Sync,
{
    if group_gens.len() != positions.len() {
        return Err(Error::InvalidInput(
            "one anchor position per group generator is required".into(),
        ));
    }
    let expected_order = w.order().ok_or(Error::OrderOverflow)?;
    if expected_order > opts.bound as u128 {
        return Err(Error::Infeasible {
            what: "wreath product order".into(),
            size: expected_order,
            bound: opts.bound as u128,
        });
    }
    let mut gens = Vec::new();
    for (g, &i) in group_gens.iter().zip(positions) {
        gens.push(w.embed(g, i)?);
    }
    for p in perm_gens {
        gens.push(w.top_perm(p)?);
    }
    let identity = w.identity();
    let result = closure(
        &gens,
        Some(&identity),
        |x, y| w.mul(x, y),
        &ClosureOptions {
            target_size: Some(expected_order as u64),
            ..opts.clone()
        },
    )?;
    let matches = result.report.size as u128 == expected_order;
    Ok(GenCheckOutcome {
        report: result.report,
        expected_order,
        matches,
    })
}

/// The wreath-product image of an elementary bracket, used to cross-check
/// the correspondence on embedded generators.
pub fn bracket_to_wreath(ty: &PartitionType, g: &Perm, v: &Point) -> Result<Nested> {
    let local = LocalMap::from_perm(g);
    endo_to_wreath(&bracket(ty, &local, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Parity;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn s3_wr_s3() -> WreathProduct<SymmetricGroup> {
        WreathProduct::new(SymmetricGroup::new(3), 3).unwrap()
    }

    fn random_elem<R: Rng>(w: &WreathProduct<SymmetricGroup>, rng: &mut R) -> WreathElem<Perm> {
        let n = w.base_group().degree;
        let m = w.degree();
        let perm_of = |rng: &mut R, d: usize| {
            let mut v: Vec<u32> = (0..d as u32).collect();
            for i in (1..d).rev() {
                v.swap(i, rng.gen_range(0..=i));
            }
            Perm::from_images(v).unwrap()
        };
        let base = (0..m).map(|_| perm_of(rng, n)).collect();
        WreathElem {
            base,
            top: perm_of(rng, m),
        }
    }

    #[test]
    fn identity_law() {
        let w = s3_wr_s3();
        let mut rng = StdRng::seed_from_u64(1);
        let id = w.identity();
        for _ in 0..50 {
            let x = random_elem(&w, &mut rng);
            assert_eq!(w.mul(&id, &x), x);
            assert_eq!(w.mul(&x, &id), x);
            assert_eq!(w.mul(&x, &w.inverse(&x)), id);
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        let w = s3_wr_s3();
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = random_elem(&w, &mut rng);
            let y = random_elem(&w, &mut rng);
            let z = random_elem(&w, &mut rng);
            assert_eq!(w.mul(&w.mul(&x, &y), &z), w.mul(&x, &w.mul(&y, &z)));
        }
    }

    #[test]
    fn top_slides_past_embeds() {
        // pi [g,i] = [g, i pi^-1] pi
        let w = s3_wr_s3();
        let g = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        for pi in Perm::all(3) {
            let top = w.top_perm(&pi).unwrap();
            for i in 1..=3usize {
                let lhs = w.mul(&top, &w.embed(&g, i).unwrap());
                let j = pi.inverse().apply(i - 1) + 1;
                let rhs = w.mul(&w.embed(&g, j).unwrap(), &top);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn distinct_positions_commute() {
        let w = s3_wr_s3();
        let g = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let h = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let x = w.embed(&g, 1).unwrap();
        let y = w.embed(&h, 2).unwrap();
        assert_eq!(w.mul(&x, &y), w.mul(&y, &x));
    }

    #[test]
    fn transposition_conjugation_moves_the_anchor() {
        // (i,j) [g,i] (i,j) = [g,j]
        let w = s3_wr_s3();
        let g = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let t = w.top_perm(&Perm::transposition(3, 1, 3).unwrap()).unwrap();
        let lhs = w.mul(&w.mul(&t, &w.embed(&g, 1).unwrap()), &t);
        assert_eq!(lhs, w.embed(&g, 3).unwrap());
    }

    #[test]
    fn embed_of_identity_is_identity() {
        let w = s3_wr_s3();
        let id3 = Perm::identity(3);
        assert_eq!(w.embed(&id3, 2).unwrap(), w.identity());
    }

    #[test]
    fn coprime_split_matches_the_worked_exponents() {
        // g = (1,2,3) of order 3, pi = (1,2), i = 3: x^3 = pi, x^4 = [g,3].
        let w = s3_wr_s3();
        let g = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let pi = Perm::transposition(3, 1, 2).unwrap();
        let x = w.mul(&w.embed(&g, 3).unwrap(), &w.top_perm(&pi).unwrap());
        let split = coprime_split(&w, &x, 3).unwrap();
        assert_eq!(split.certificate.exponent_top, 3);
        assert_eq!(split.certificate.exponent_embedded, 4);
        assert_eq!(split.top_part, w.top_perm(&pi).unwrap());
        assert_eq!(split.embedded, w.embed(&g, 3).unwrap());
        assert_eq!(w.pow(&x, 3), split.top_part);
        assert_eq!(w.pow(&x, 4), split.embedded);
    }

    #[test]
    fn coprime_split_identity_slot() {
        let w = s3_wr_s3();
        let pi = Perm::transposition(3, 1, 2).unwrap();
        let x = w.top_perm(&pi).unwrap();
        let split = coprime_split(&w, &x, 3).unwrap();
        assert_eq!(split.embedded, w.identity());
        assert_eq!(split.top_part, x);
    }

    #[test]
    fn coprime_split_order_five_and_two() {
        // In S_5 wr S_4: g a 5-cycle, pi = (1,2), anchored at 3.
        // Bezout 1*5 + (-2)*2 = 1, so x^5 = pi and x^6 = [g,3].
        let w = WreathProduct::new(SymmetricGroup::new(5), 4).unwrap();
        let g = Perm::full_cycle(5);
        let pi = Perm::transposition(4, 1, 2).unwrap();
        let x = w.mul(&w.embed(&g, 3).unwrap(), &w.top_perm(&pi).unwrap());
        let split = coprime_split(&w, &x, 3).unwrap();
        assert_eq!(split.certificate.bezout, (1, -2));
        assert_eq!(split.certificate.exponent_top, 5);
        assert_eq!(split.certificate.exponent_embedded, 6);
    }

    #[test]
    fn coprime_split_error_cases() {
        let w = s3_wr_s3();
        let g = Perm::transposition(3, 1, 2).unwrap(); // order 2
        let pi = Perm::transposition(3, 1, 2).unwrap(); // order 2
        let x = w.mul(&w.embed(&g, 3).unwrap(), &w.top_perm(&pi).unwrap());
        assert!(matches!(
            coprime_split(&w, &x, 3),
            Err(Error::NotCoprime { left: 2, right: 2 })
        ));
        let moved = w.mul(
            &w.embed(&Perm::full_cycle(3), 1).unwrap(),
            &w.top_perm(&pi).unwrap(),
        );
        assert!(matches!(
            coprime_split(&w, &moved, 1),
            Err(Error::PositionMoved { position: 1 })
        ));
    }

    #[test]
    fn recovery_in_s3_wr_s4() {
        let w = WreathProduct::new(SymmetricGroup::new(3), 4).unwrap();
        let g = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let sigma = Perm::transposition(3, 1, 2).unwrap();
        let witness = strannaya_extract(&w, &g, &sigma).unwrap();
        assert_eq!(witness.embedded_g.element, w.embed(&g, 3).unwrap());
        assert_eq!(witness.sigma_first.element, w.embed(&sigma, 1).unwrap());
        assert_eq!(
            witness.full_cycle.element,
            w.top_perm(&Perm::full_cycle(4)).unwrap()
        );
        assert_eq!(
            witness.transposition.element,
            w.top_perm(&Perm::transposition(4, 1, 2).unwrap()).unwrap()
        );
        assert!(witness
            .verified_identities
            .iter()
            .any(|s| s.contains("a^m")));
        // The word certificates are explicit and re-evaluate.
        assert_eq!(
            witness.embedded_g.word.eval(&w, &witness.a, &witness.b),
            witness.embedded_g.element
        );
        assert_eq!(
            witness.full_cycle.word.eval(&w, &witness.a, &witness.b),
            witness.full_cycle.element
        );
    }

    #[test]
    fn recovery_rejects_bad_orders() {
        let w = s3_wr_s3();
        let even = Perm::transposition(3, 1, 2).unwrap();
        let odd = Perm::full_cycle(3);
        assert!(matches!(
            strannaya_extract(&w, &even, &even),
            Err(Error::OrderNotOdd { order: 2 })
        ));
        assert!(matches!(
            strannaya_extract(&w, &odd, &odd),
            Err(Error::OrderNotTwo { order: 3 })
        ));
        let w2 = WreathProduct::new(SymmetricGroup::new(3), 2).unwrap();
        assert!(matches!(
            strannaya_extract(&w2, &odd, &even),
            Err(Error::DegreeTooSmall { need: 3, got: 2 })
        ));
    }

    #[test]
    fn word_display_compresses_runs() {
        let mut word = Word::default();
        word.push_power(Letter::A, 3);
        word.push_power(Letter::B, 1);
        word.push_power(Letter::AInv, 2);
        assert_eq!(word.to_string(), "a^3 b a^-2");
    }

    #[test]
    fn iterated_orders() {
        let t22 = PartitionType::new(&[2, 2]).unwrap();
        assert_eq!(iterated(&t22).order(), Some(8));
        let t33 = PartitionType::new(&[3, 3]).unwrap();
        assert_eq!(iterated(&t33).order(), Some(1296));
        let t4 = PartitionType::new(&[4]).unwrap();
        assert_eq!(iterated(&t4).order(), Some(24));
        assert_eq!(iterated(&t22).elements().map(|v| v.len()), Some(8usize));
    }

    #[test]
    fn iterated_group_laws() {
        let t = PartitionType::new(&[2, 3]).unwrap();
        let iw = iterated(&t);
        let elems = iw.elements().unwrap();
        assert_eq!(elems.len() as u128, iw.order().unwrap());
        let id = iw.identity();
        for x in &elems {
            assert_eq!(iw.mul(x, &iw.inverse(x)), id);
        }
        // Associativity spot sample.
        for i in (0..elems.len()).step_by(7) {
            for j in (0..elems.len()).step_by(11) {
                for k in (0..elems.len()).step_by(13) {
                    let (x, y, z) = (&elems[i], &elems[j], &elems[k]);
                    assert_eq!(iw.mul(&iw.mul(x, y), z), iw.mul(x, &iw.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn identity_endo_maps_to_identity_element() {
        let t = PartitionType::new(&[2, 2]).unwrap();
        let id = Endomorphism::identity(&t);
        assert_eq!(endo_to_wreath(&id).unwrap(), iterated(&t).identity());
        assert_eq!(wreath_to_endo(&t, &iterated(&t).identity()).unwrap(), id);
    }

    #[test]
    fn correspondence_is_a_bijection() {
        for levels in [vec![2u32, 2], vec![2, 3]] {
            let t = PartitionType::new(&levels).unwrap();
            let iw = iterated(&t);
            let autos = Endomorphism::enumerate_automorphisms(&t).unwrap();
            assert_eq!(autos.len() as u128, iw.order().unwrap());
            let mut images: Vec<Nested> = Vec::new();
            for f in &autos {
                let x = endo_to_wreath(f).unwrap();
                assert!(iw.contains(&x));
                assert_eq!(wreath_to_endo(&t, &x).unwrap(), *f);
                images.push(x);
            }
            images.sort();
            images.dedup();
            assert_eq!(images.len(), autos.len());
        }
    }

    #[test]
    fn correspondence_reverses_products() {
        // phi(f o g) = phi(g) * phi(f), exhaustively; the opposite
        // orientation must fail somewhere, pinning the convention.
        for levels in [vec![2u32, 2], vec![2, 3]] {
            let t = PartitionType::new(&levels).unwrap();
            let iw = iterated(&t);
            let autos = Endomorphism::enumerate_automorphisms(&t).unwrap();
            let mut opposite_fails = false;
            for f in &autos {
                let pf = endo_to_wreath(f).unwrap();
                for g in &autos {
                    let pg = endo_to_wreath(g).unwrap();
                    let composed = endo_to_wreath(&f.compose(g).unwrap()).unwrap();
                    assert_eq!(composed, iw.mul(&pg, &pf));
                    if composed != iw.mul(&pf, &pg) {
                        opposite_fails = true;
                    }
                }
            }
            assert!(opposite_fails, "orientation must be observable");
        }
    }

    #[test]
    fn brackets_become_nested_embeds() {
        let t = PartitionType::new(&[2, 3]).unwrap();
        let sigma = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let x = bracket_to_wreath(&t, &sigma, &Point::new(vec![2])).unwrap();
        match x {
            Nested::Wreath { base, top } => {
                assert!(top.is_identity());
                assert_eq!(base[0], Nested::Perm(Perm::identity(3)));
                assert_eq!(base[1], Nested::Perm(sigma.clone()));
            }
            Nested::Perm(_) => panic!("depth-2 element expected"),
        }
        // Depth 3, anchored two levels down: the embed nests along the
        // anchor path, outermost position first.
        let t3 = PartitionType::new(&[2, 2, 3]).unwrap();
        let y = bracket_to_wreath(&t3, &sigma, &Point::new(vec![2, 1])).unwrap();
        let expect = IteratedWreath::embed_nested(
            t3.levels(),
            IteratedWreath::embed_nested(&t3.levels()[1..], Nested::Perm(sigma.clone()), 1)
                .unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(y, expect);
    }

    #[test]
    fn depth_three_correspondence() {
        let t = PartitionType::new(&[2, 2, 2]).unwrap();
        let iw = iterated(&t);
        let autos = Endomorphism::enumerate_automorphisms(&t).unwrap();
        assert_eq!(autos.len() as u128, iw.order().unwrap()); // 128
        for f in autos.iter().step_by(7) {
            let x = endo_to_wreath(f).unwrap();
            assert!(iw.contains(&x));
            assert_eq!(wreath_to_endo(&t, &x).unwrap(), *f);
        }
        // Product transport on a sample of pairs.
        for f in autos.iter().step_by(13) {
            for g in autos.iter().step_by(17) {
                assert_eq!(
                    endo_to_wreath(&f.compose(g).unwrap()).unwrap(),
                    iw.mul(&endo_to_wreath(g).unwrap(), &endo_to_wreath(f).unwrap())
                );
            }
        }
    }

    #[test]
    fn rejects_non_automorphisms() {
        let t = PartitionType::new(&[2, 2]).unwrap();
        let f = Endomorphism::from_local_table(
            &t,
            &[
                (Point::root(), LocalMap::constant(2, 2).unwrap()),
                (Point::new(vec![1]), LocalMap::identity(2)),
                (Point::new(vec![2]), LocalMap::identity(2)),
            ],
        )
        .unwrap();
        assert!(matches!(
            endo_to_wreath(&f),
            Err(Error::NotInvertible { level: 1 })
        ));
        assert!(matches!(parity(&f), Err(Error::NotInvertible { level: 1 })));
    }

    #[test]
    fn parity_of_identity_is_trivial() {
        let t = PartitionType::new(&[3, 3]).unwrap();
        let p = parity(&Endomorphism::identity(&t)).unwrap();
        assert!(p.is_trivial());
    }

    #[test]
    fn level_brackets_have_triangular_parity() {
        let t = PartitionType::new(&[2, 2]).unwrap();
        for j in 1..=2usize {
            let u = Point::new(vec![1; j - 1]);
            let g = bracket(&t, &LocalMap::transposition(2, 1, 2).unwrap(), &u).unwrap();
            let pv = parity(&g).unwrap();
            for (s, sign) in pv.0.iter().enumerate() {
                if s + 1 < j {
                    assert_eq!(*sign, Parity::Even);
                }
                if s + 1 == j {
                    assert_eq!(*sign, Parity::Odd);
                }
            }
        }
    }

    #[test]
    fn parity_is_a_surjective_homomorphism() {
        use std::collections::BTreeSet;
        // Exhaustive homomorphism check on (2,2); image size 4 on both.
        let t = PartitionType::new(&[2, 2]).unwrap();
        let autos = Endomorphism::enumerate_automorphisms(&t).unwrap();
        let mut image = BTreeSet::new();
        for f in &autos {
            let pf = parity(f).unwrap();
            image.insert(format!("{pf}"));
            for g in &autos {
                let pg = parity(g).unwrap();
                let pfg = parity(&f.compose(g).unwrap()).unwrap();
                assert_eq!(pfg, pf.add(&pg));
            }
        }
        assert_eq!(image.len(), 4);

        let t33 = PartitionType::new(&[3, 3]).unwrap();
        let mut image33 = BTreeSet::new();
        for f in Endomorphism::enumerate_automorphisms(&t33).unwrap() {
            image33.insert(format!("{}", parity(&f).unwrap()));
        }
        assert_eq!(image33.len(), 4);
    }

    #[test]
    fn odd_cycle_rule() {
        assert_eq!(odd_cycle(3), Perm::full_cycle(3));
        assert_eq!(odd_cycle(3).order(), 3);
        // tau for n = 4 is (2,3,4), of odd order 3.
        let tau4 = odd_cycle(4);
        assert_eq!(tau4, Perm::from_cycles(4, &[&[2, 3, 4]]).unwrap());
        assert_eq!(tau4.order(), 3);
        assert_eq!(odd_cycle(5).order(), 5);
        assert_eq!(odd_cycle(6).order(), 5);
    }

    #[test]
    fn group_generators_refuse_small_levels() {
        let t = PartitionType::new(&[2, 2]).unwrap();
        assert!(matches!(
            group_generators(&t),
            Err(Error::UnsupportedConstruction { level: 1, size: 2 })
        ));
        let t2 = PartitionType::new(&[3, 2]).unwrap();
        assert!(matches!(
            group_generators(&t2),
            Err(Error::UnsupportedConstruction { level: 2, size: 2 })
        ));
    }

    #[test]
    fn group_generators_shapes() {
        let t = PartitionType::new(&[3, 3]).unwrap();
        let gens = group_generators(&t).unwrap();
        assert_eq!(gens.len(), 2);
        for g in &gens {
            assert!(g.is_level_invertible(2).unwrap());
        }
        // First generator: top transposition with the odd cycle at (3).
        let g1 = &gens[0];
        assert_eq!(
            g1.local(&Point::root()).unwrap(),
            LocalMap::transposition(3, 1, 2).unwrap()
        );
        assert_eq!(
            g1.local(&Point::new(vec![3])).unwrap(),
            LocalMap::from_perm(&Perm::full_cycle(3))
        );
        // Last generator: full top cycle with a transposition at (2).
        let gt = &gens[1];
        assert_eq!(
            gt.local(&Point::root()).unwrap(),
            LocalMap::from_perm(&Perm::full_cycle(3))
        );
        assert_eq!(
            gt.local(&Point::new(vec![2])).unwrap(),
            LocalMap::transposition(3, 1, 2).unwrap()
        );
        // Depth 1 degenerates to the bare transposition.
        let t3 = PartitionType::new(&[3]).unwrap();
        let gens3 = group_generators(&t3).unwrap();
        assert_eq!(gens3.len(), 1);
        assert_eq!(
            gens3[0].local(&Point::root()).unwrap(),
            LocalMap::transposition(3, 1, 2).unwrap()
        );
    }

    #[test]
    fn gen_check_with_a_trivial_base_reduces_to_the_top() {
        use crate::rank::ClosureOptions;
        let w = WreathProduct::new(SymmetricGroup::new(1), 3).unwrap();
        let perm_gens = vec![Perm::transposition(3, 1, 2).unwrap(), Perm::full_cycle(3)];
        let out = gen_check(&w, &[], &[], &perm_gens, &ClosureOptions::default()).unwrap();
        assert_eq!(out.expected_order, 6);
        assert!(out.matches);
    }

    #[test]
    fn group_generators_close_on_4_3() {
        use crate::rank::{closure, ClosureOptions};
        let t = PartitionType::new(&[4, 3]).unwrap();
        let gens = group_generators(&t).unwrap();
        assert_eq!(gens.len(), 2);
        let out = closure(
            &gens,
            Some(&Endomorphism::identity(&t)),
            |a: &Endomorphism, b: &Endomorphism| a.compose(b).unwrap(),
            &ClosureOptions {
                target_size: Some(31_104),
                ..Default::default()
            },
        )
        .unwrap();
        // |S_3 wr S_4| = 6^4 * 24
        assert_eq!(out.report.size, 31_104);
    }

    #[test]
    fn nested_json_round_trip() {
        let t = PartitionType::new(&[2, 3]).unwrap();
        let f = Endomorphism::enumerate_automorphisms(&t).unwrap()[37].clone();
        let x = endo_to_wreath(&f).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let back: Nested = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        // Depth-1 elements carry no base key.
        let y = Nested::Perm(Perm::full_cycle(3));
        assert_eq!(serde_json::to_string(&y).unwrap(), r#"{"top":[2,3,1]}"#);
    }
}
