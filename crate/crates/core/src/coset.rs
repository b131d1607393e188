//! Finite groups given by an explicit carrier, subgroup closure, and
//! double-coset partitions `H\G/K`.
//!
//! The engine never looks inside an element. Elements are compared and
//! ordered through their `Eq`/`Ord`/`Hash` impls, which act as the canonical
//! encoding; the carrier is kept sorted so every result is independent of
//! the order in which elements were supplied.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::error::{Error, Result};

/// Anything that can live in a [`FiniteGroup`].
pub trait Element: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static {}

impl<T> Element for T where T: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static {}

/// The group law.
pub type GroupOp<E> = Arc<dyn Fn(&E, &E) -> E + Send + Sync>;

/// Subsets larger than this are not checked pairwise for closure unless the
/// caller opts into [`Verification::Trusted`].
pub const VERIFY_LIMIT: usize = 10_000;

/// How `H` and `K` passed as plain sets are validated before counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verification {
    /// Pairwise closure check; sets above [`VERIFY_LIMIT`] are rejected.
    #[default]
    Checked,
    /// Only membership in `G` is checked. The caller vouches that the sets
    /// are subgroups.
    Trusted,
}

#[derive(Clone)]
pub struct FiniteGroup<E: Element> {
    elements: Vec<E>,
    index: HashMap<E, usize>,
    identity: E,
    op: GroupOp<E>,
}

impl<E: Element> Debug for FiniteGroup<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.elements.len())
            .field("identity", &self.identity)
            .finish()
    }
}

impl<E: Element> FiniteGroup<E> {
    /// Wraps an explicit carrier. Duplicates are dropped and the carrier is
    /// sorted; closure under `op` is the caller's responsibility (see
    /// [`FiniteGroup::is_closed`]).
    pub fn from_elements(
        elements: impl IntoIterator<Item = E>,
        identity: E,
        op: GroupOp<E>,
    ) -> Result<Self> {
        let mut elements: Vec<E> = elements.into_iter().collect();
        elements.sort();
        elements.dedup();
        let index: HashMap<E, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        if !index.contains_key(&identity) {
            return Err(Error::invalid(format!(
                "identity {identity:?} is not in the carrier"
            )));
        }
        Ok(FiniteGroup {
            elements,
            index,
            identity,
            op,
        })
    }

    /// The group generated by `gens` under `op`, found by breadth-first
    /// multiplication. Fails once more than `cap` elements have been stored.
    pub fn generated_by(gens: &[E], identity: E, op: GroupOp<E>, cap: usize) -> Result<Self> {
        let elements = closure_under(
            std::slice::from_ref(&identity),
            gens,
            &*op,
            |_| true,
            cap,
            "subgroup closure",
        )?;
        FiniteGroup::from_elements(elements, identity, op)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Carrier in canonical (sorted) order.
    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn identity(&self) -> &E {
        &self.identity
    }

    pub fn op(&self) -> &GroupOp<E> {
        &self.op
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains_key(e)
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn mul(&self, a: &E, b: &E) -> E {
        (self.op)(a, b)
    }

    /// Inverse by walking the powers of `a` back to the identity.
    pub fn inverse(&self, a: &E) -> Option<E> {
        if !self.contains(a) {
            return None;
        }
        let mut prev = self.identity.clone();
        let mut cur = a.clone();
        for _ in 0..self.order() {
            if cur == self.identity {
                return Some(prev);
            }
            prev = cur.clone();
            cur = self.mul(&cur, a);
        }
        None
    }

    /// Quadratic check of the group axioms that the constructor does not
    /// enforce: closure, two-sided identity, and inverses.
    pub fn is_closed(&self) -> bool {
        is_subgroup_set(self, &self.elements)
    }

    /// Smallest subset containing `gens` and the identity that is closed
    /// under the group law. Returned in canonical order.
    pub fn subgroup_closure(&self, gens: &[E]) -> Result<Vec<E>> {
        for g in gens {
            if !self.contains(g) {
                return Err(Error::invalid(format!(
                    "generator {g:?} is not in the group"
                )));
            }
        }
        closure_under(
            std::slice::from_ref(&self.identity),
            gens,
            &*self.op,
            |e| self.contains(e),
            usize::MAX,
            "subgroup closure",
        )
    }

    /// A small generating set picked greedily: walk the carrier and keep
    /// every element not already in the span of those kept so far.
    pub fn generating_set(&self) -> Vec<E> {
        let mut gens: Vec<E> = Vec::new();
        let mut span: HashSet<E> = HashSet::default();
        span.insert(self.identity.clone());
        let mut members: Vec<E> = vec![self.identity.clone()];
        // Visit elements with a fixed stride so that early picks are spread
        // out over the canonical order rather than clustered near the start.
        let n = self.order();
        let stride = coprime_stride(n);
        for step in 0..n {
            let e = &self.elements[(step * stride) % n];
            if span.contains(e) {
                continue;
            }
            gens.push(e.clone());
            // The old span is closed under the old generators, so only its
            // products with the new one can be new.
            let mut queue: VecDeque<E> = VecDeque::new();
            for x in members.clone() {
                let y = self.mul(&x, e);
                if span.insert(y.clone()) {
                    members.push(y.clone());
                    queue.push_back(y);
                }
            }
            while let Some(x) = queue.pop_front() {
                for g in &gens {
                    let y = self.mul(&x, g);
                    if span.insert(y.clone()) {
                        members.push(y.clone());
                        queue.push_back(y);
                    }
                }
            }
            if members.len() == n {
                break;
            }
        }
        gens
    }

    /// Direct product of `factors`, elements being tuples (as `Vec`s) with
    /// componentwise multiplication.
    pub fn product(factors: &[FiniteGroup<E>], cap: usize) -> Result<FiniteGroup<Vec<E>>> {
        let needed: u128 = factors.iter().map(|g| g.order() as u128).product();
        if needed > cap as u128 {
            return Err(Error::limit("direct product", needed, cap));
        }
        let mut tuples: Vec<Vec<E>> = vec![Vec::new()];
        for f in factors {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    f.elements.iter().map(move |e| {
                        let mut t = t.clone();
                        t.push(e.clone());
                        t
                    })
                })
                .collect();
        }
        let identity: Vec<E> = factors.iter().map(|f| f.identity.clone()).collect();
        let ops: Vec<GroupOp<E>> = factors.iter().map(|f| f.op.clone()).collect();
        FiniteGroup::from_elements(tuples, identity, tuple_op(ops))
    }
}

/// Componentwise law on tuples.
pub fn tuple_op<E: Element>(ops: Vec<GroupOp<E>>) -> GroupOp<Vec<E>> {
    Arc::new(move |a: &Vec<E>, b: &Vec<E>| {
        ops.iter()
            .zip(a.iter().zip(b))
            .map(|(op, (x, y))| op(x, y))
            .collect()
    })
}

/// Embeds per-factor generators into the product: each generator of factor
/// `i` becomes a tuple with the identity in every other slot.
pub fn product_generators<E: Element>(identities: &[E], factor_gens: &[Vec<E>]) -> Vec<Vec<E>> {
    let mut out = Vec::new();
    for (i, gens) in factor_gens.iter().enumerate() {
        for g in gens {
            let mut t = identities.to_vec();
            t[i] = g.clone();
            out.push(t);
        }
    }
    out
}

fn coprime_stride(n: usize) -> usize {
    if n <= 2 {
        return 1;
    }
    let mut s = (n as f64 * 0.618_033_988_7) as usize;
    s = s.max(1);
    while crate::finite_ring::gcd(s as i64, n as i64) != 1 {
        s += 1;
    }
    s
}

/// Breadth-first closure of `seeds` under right multiplication by `gens`.
fn closure_under<E: Element>(
    seeds: &[E],
    gens: &[E],
    op: &(dyn Fn(&E, &E) -> E + Send + Sync),
    allowed: impl Fn(&E) -> bool,
    cap: usize,
    what: &str,
) -> Result<Vec<E>> {
    let mut seen: HashSet<E> = HashSet::default();
    let mut queue: VecDeque<E> = VecDeque::new();
    for s in seeds.iter().chain(gens) {
        if seen.insert(s.clone()) {
            queue.push_back(s.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = op(&x, g);
            if !allowed(&y) {
                return Err(Error::Internal(format!(
                    "{what}: product {y:?} left the ambient group"
                )));
            }
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::limit(what, seen.len() as u128, cap));
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<E> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

fn is_subgroup_set<E: Element>(g: &FiniteGroup<E>, set: &[E]) -> bool {
    let members: HashSet<&E> = set.iter().collect();
    if !members.contains(&g.identity) {
        return false;
    }
    for a in set {
        if g.mul(a, &g.identity) != *a || g.mul(&g.identity, a) != *a {
            return false;
        }
        for b in set {
            if !members.contains(&g.mul(a, b)) {
                return false;
            }
        }
    }
    // In a finite set closed under an associative law with identity, every
    // element has finite order, so inverses are powers and already present.
    true
}

fn verify_subgroup<E: Element>(
    g: &FiniteGroup<E>,
    set: &[E],
    name: &str,
    verification: Verification,
) -> Result<()> {
    if set.is_empty() {
        return Err(Error::invalid(format!("{name} is empty")));
    }
    if let Some(bad) = set.iter().find(|e| !g.contains(e)) {
        return Err(Error::invalid(format!(
            "{name} contains {bad:?}, which is not in G"
        )));
    }
    if verification == Verification::Trusted {
        return Ok(());
    }
    if set.len() > VERIFY_LIMIT {
        return Err(Error::invalid(format!(
            "{name} has {} elements, above the verification limit {VERIFY_LIMIT}; pass Verification::Trusted to skip the check",
            set.len()
        )));
    }
    if !is_subgroup_set(g, set) {
        return Err(Error::invalid(format!("{name} is not a subgroup of G")));
    }
    Ok(())
}

/// Orbits of `x -> l * x` and `x -> x * r` over the given left and right
/// actors, as carrier indices. Orbits come out ordered by their smallest
/// element and each is sorted.
fn orbit_partition<E: Element>(g: &FiniteGroup<E>, left: &[E], right: &[E]) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if block_of[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        block_of[start] = id;
        let mut block = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            if block.len() == n {
                break;
            }
            let x = &g.elements[i];
            let images = left
                .iter()
                .map(|l| g.mul(l, x))
                .chain(right.iter().map(|r| g.mul(x, r)));
            for y in images {
                let j = g.index[&y];
                if block_of[j] == usize::MAX {
                    block_of[j] = id;
                    block.push(j);
                    queue.push_back(j);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

fn materialize<E: Element>(g: &FiniteGroup<E>, blocks: Vec<Vec<usize>>) -> Vec<Vec<E>> {
    blocks
        .into_iter()
        .map(|b| b.into_iter().map(|i| g.elements[i].clone()).collect())
        .collect()
}

/// Partition of `G` into double cosets `H g K`, with `H` and `K` supplied as
/// full subsets. Both are validated according to `verification`.
pub fn double_coset_partition<E: Element>(
    g: &FiniteGroup<E>,
    h: &[E],
    k: &[E],
    verification: Verification,
) -> Result<Vec<Vec<E>>> {
    verify_subgroup(g, h, "H", verification)?;
    verify_subgroup(g, k, "K", verification)?;
    Ok(materialize(g, orbit_partition(g, h, k)))
}

pub fn double_coset_count<E: Element>(
    g: &FiniteGroup<E>,
    h: &[E],
    k: &[E],
    verification: Verification,
) -> Result<usize> {
    verify_subgroup(g, h, "H", verification)?;
    verify_subgroup(g, k, "K", verification)?;
    Ok(orbit_partition(g, h, k).len())
}

/// Same partition as [`double_coset_partition`], but with `H` and `K` given
/// by generating sets. Generated subgroups need no validation beyond
/// membership of the generators, and the cost drops to
/// `|G| * (|h_gens| + |k_gens|)` multiplications.
pub fn double_coset_partition_generated<E: Element>(
    g: &FiniteGroup<E>,
    h_gens: &[E],
    k_gens: &[E],
) -> Result<Vec<Vec<E>>> {
    check_members(g, h_gens, "H generator")?;
    check_members(g, k_gens, "K generator")?;
    Ok(materialize(g, orbit_partition(g, h_gens, k_gens)))
}

pub fn double_coset_count_generated<E: Element>(
    g: &FiniteGroup<E>,
    h_gens: &[E],
    k_gens: &[E],
) -> Result<usize> {
    check_members(g, h_gens, "H generator")?;
    check_members(g, k_gens, "K generator")?;
    Ok(orbit_partition(g, h_gens, k_gens).len())
}

/// Sizes of the double-coset blocks, in block order.
pub fn block_sizes<E>(blocks: &[Vec<E>]) -> Vec<usize> {
    blocks.iter().map(Vec::len).collect()
}

fn check_members<E: Element>(g: &FiniteGroup<E>, xs: &[E], what: &str) -> Result<()> {
    match xs.iter().find(|e| !g.contains(e)) {
        Some(bad) => Err(Error::invalid(format!("{what} {bad:?} is not in G"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(Z/m)^x` on plain integers.
    fn units_mod(m: u64) -> FiniteGroup<u64> {
        let elems: Vec<u64> = (0..m)
            .filter(|&a| crate::finite_ring::gcd(a as i64, m as i64) == 1 || m == 1)
            .collect();
        FiniteGroup::from_elements(elems, 1 % m, Arc::new(move |a, b| a * b % m)).unwrap()
    }

    fn pairs(m: u64) -> FiniteGroup<Vec<u64>> {
        let u = units_mod(m);
        FiniteGroup::product(&[u.clone(), u], usize::MAX).unwrap()
    }

    fn pm_one_squared(m: u64) -> Vec<Vec<u64>> {
        let mut s = vec![];
        for a in [1 % m, (m - 1) % m] {
            for b in [1 % m, (m - 1) % m] {
                s.push(vec![a, b]);
            }
        }
        s.sort();
        s.dedup();
        s
    }

    fn diagonal(m: u64) -> Vec<Vec<u64>> {
        units_mod(m)
            .elements()
            .iter()
            .map(|&u| vec![u, u])
            .collect()
    }

    #[test]
    fn closure_examples() {
        let g = units_mod(8);
        assert_eq!(g.subgroup_closure(&[]).unwrap(), vec![1]);
        assert_eq!(
            g.subgroup_closure(g.elements()).unwrap(),
            g.elements().to_vec()
        );
        assert_eq!(g.subgroup_closure(&[3]).unwrap(), vec![1, 3]);
        assert!(matches!(
            g.subgroup_closure(&[2]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn trivial_partitions() {
        let g = pairs(7);
        let all = g.elements().to_vec();
        let e = vec![g.identity().clone()];
        let p = double_coset_partition(&g, &all, &all, Verification::Checked).unwrap();
        assert_eq!(block_sizes(&p), vec![g.order()]);
        let p = double_coset_partition(&g, &e, &e, Verification::Checked).unwrap();
        assert_eq!(p.len(), g.order());
        assert!(p.iter().all(|b| b.len() == 1));

        let triv = FiniteGroup::from_elements([0u8], 0, Arc::new(|_, _| 0)).unwrap();
        assert_eq!(
            double_coset_count(&triv, &[0], &[0], Verification::Checked).unwrap(),
            1
        );
    }

    #[test]
    fn pullback_cosets_mod_5_and_7() {
        for (m, expect) in [(5, 2), (7, 3)] {
            let g = pairs(m);
            let p =
                double_coset_partition(&g, &pm_one_squared(m), &diagonal(m), Verification::Checked)
                    .unwrap();
            assert_eq!(p.len(), expect, "m = {m}");
            let gens = double_coset_count_generated(&g, &pm_one_squared(m), &diagonal(m)).unwrap();
            assert_eq!(gens, expect);
        }
    }

    #[test]
    fn rejects_non_subgroups() {
        let g = pairs(5);
        let bad = vec![vec![1, 1], vec![2, 1]];
        let err = double_coset_count(&g, &bad, &diagonal(5), Verification::Checked).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        let outside = vec![vec![0, 1]];
        assert!(double_coset_count(&g, &outside, &diagonal(5), Verification::Trusted).is_err());
        assert!(double_coset_count_generated(&g, &outside, &[]).is_err());
        assert!(double_coset_count(&g, &[], &diagonal(5), Verification::Checked).is_err());
    }

    #[test]
    fn verification_limit_requires_trust() {
        let g = units_mod(30_011); // prime, so 30010 units
        let all = g.elements().to_vec();
        let e = vec![1u64];
        assert!(double_coset_count(&g, &all, &e, Verification::Checked).is_err());
        assert_eq!(
            double_coset_count(&g, &all, &e, Verification::Trusted).unwrap(),
            1
        );
    }

    #[test]
    fn single_coset_iff_hk_is_g() {
        for m in [5u64, 7, 8, 9, 12, 15] {
            let g = pairs(m);
            let h = pm_one_squared(m);
            let k = diagonal(m);
            let mut hk: Vec<Vec<u64>> = h
                .iter()
                .flat_map(|x| k.iter().map(|y| g.mul(x, y)))
                .collect();
            hk.sort();
            hk.dedup();
            let count = double_coset_count(&g, &h, &k, Verification::Checked).unwrap();
            assert_eq!(count == 1, hk.len() == g.order(), "m = {m}");
        }
    }

    #[test]
    fn generating_set_spans_group() {
        for m in [1u64, 2, 8, 15, 24, 97] {
            let g = units_mod(m);
            let gens = g.generating_set();
            assert_eq!(g.subgroup_closure(&gens).unwrap(), g.elements().to_vec());
        }
        let g = pairs(24);
        let gens = g.generating_set();
        assert_eq!(g.subgroup_closure(&gens).unwrap().len(), g.order());
    }

    #[test]
    fn inverse_and_axioms() {
        let g = units_mod(21);
        assert!(g.is_closed());
        for a in g.elements() {
            let b = g.inverse(a).unwrap();
            assert_eq!(g.mul(a, &b), 1);
        }
        assert_eq!(g.inverse(&3), None);
        let not_closed =
            FiniteGroup::from_elements([1u64, 2], 1, Arc::new(|a, b| a * b % 7)).unwrap();
        assert!(!not_closed.is_closed());
        assert!(FiniteGroup::from_elements([2u64], 1, Arc::new(|a, b| a * b)).is_err());
    }

    #[test]
    fn generated_by_respects_cap() {
        let op: GroupOp<u64> = Arc::new(|a, b| a * b % 101);
        let g = FiniteGroup::generated_by(&[2], 1, op.clone(), 1000).unwrap();
        assert_eq!(g.order(), 100);
        let err = FiniteGroup::generated_by(&[2], 1, op, 50).unwrap_err();
        assert!(err.is_resource_limit());
    }
}
