//! Genus counts of orders `L` with `m*G ⊆ L ⊆ G = prod_i Mat(r_i, Z)`.
//!
//! The order is represented only through its finite image `L/mG` inside
//! `G/mG`, given by ring generators. The number of isomorphism classes in
//! the genus of `L` is
//!
//! ```text
//! g(L) = g(G) * #( Im(G^x) \ (G/mG)^x / (L/mG)^x ),
//! ```
//!
//! with `g(G) = 1` for a product of full integer matrix rings, and
//! `Im(G^x)` the residue matrices of determinant `±1` in each block.

use std::collections::VecDeque;

use rustc_hash::FxHashSet as HashSet;

use serde::{Deserialize, Serialize};

use crate::coset::{self, FiniteGroup, GroupOp};
use crate::error::{Error, Limits, Result};
use crate::finite_ring::totient;
use crate::matrix_mod::{self, MatModM, MAX_DET_SIZE};

/// One element of `G/mG`: a matrix per block.
pub type MatTuple = Vec<MatModM>;

/// An order given by its conductor level `m`, block sizes, and generators of
/// the subring `L/mG ⊆ prod_i Mat(r_i, Z/m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSpec {
    m: u64,
    blocks: Vec<usize>,
    generators: Vec<MatTuple>,
}

/// On-disk form: `{"m":6,"blocks":[1,1],"generators":[[[1],[1]]]}`, each
/// matrix a flat row-major integer list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderSpecFile {
    m: i64,
    blocks: Vec<i64>,
    generators: Vec<Vec<Vec<i64>>>,
}

impl OrderSpec {
    pub fn new(m: u64, blocks: Vec<usize>, generators: Vec<MatTuple>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("conductor level m must be at least 1"));
        }
        if blocks.is_empty() {
            return Err(Error::invalid("an order needs at least one block"));
        }
        for &r in &blocks {
            if r == 0 {
                return Err(Error::invalid("block sizes must be at least 1"));
            }
            if r > MAX_DET_SIZE {
                return Err(Error::UnsupportedSize(r));
            }
        }
        for (gi, tuple) in generators.iter().enumerate() {
            if tuple.len() != blocks.len() {
                return Err(Error::invalid(format!(
                    "generator {gi} has {} components but there are {} blocks",
                    tuple.len(),
                    blocks.len()
                )));
            }
            for (bi, (a, &r)) in tuple.iter().zip(&blocks).enumerate() {
                if a.size() != r || a.modulus() != m {
                    return Err(Error::invalid(format!(
                        "generator {gi}, block {bi}: expected a {r}x{r} matrix mod {m}, got {}x{} mod {}",
                        a.size(),
                        a.size(),
                        a.modulus()
                    )));
                }
            }
        }
        Ok(OrderSpec {
            m,
            blocks,
            generators,
        })
    }

    /// Builds a spec from raw integers; every entry is reduced mod `m`.
    pub fn from_integers(m: i64, blocks: &[i64], generators: &[Vec<Vec<i64>>]) -> Result<Self> {
        if m < 1 {
            return Err(Error::invalid(format!(
                "conductor level m must be at least 1, got {m}"
            )));
        }
        let m = m as u64;
        let blocks: Vec<usize> = blocks
            .iter()
            .map(|&r| {
                if r < 1 {
                    Err(Error::invalid(format!(
                        "block sizes must be at least 1, got {r}"
                    )))
                } else {
                    Ok(r as usize)
                }
            })
            .collect::<Result<_>>()?;
        let mut tuples = Vec::with_capacity(generators.len());
        for (gi, raw) in generators.iter().enumerate() {
            if raw.len() != blocks.len() {
                return Err(Error::invalid(format!(
                    "generator {gi} has {} components but there are {} blocks",
                    raw.len(),
                    blocks.len()
                )));
            }
            let tuple = raw
                .iter()
                .zip(&blocks)
                .map(|(entries, &r)| {
                    if r > MAX_DET_SIZE {
                        return Err(Error::UnsupportedSize(r));
                    }
                    MatModM::new(r, m, entries)
                })
                .collect::<Result<MatTuple>>()?;
            tuples.push(tuple);
        }
        OrderSpec::new(m, blocks, tuples)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: OrderSpecFile = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("malformed order spec JSON: {e}")))?;
        OrderSpec::from_integers(raw.m, &raw.blocks, &raw.generators)
    }

    /// Compact JSON in the same layout [`OrderSpec::from_json`] reads.
    pub fn to_json(&self) -> String {
        let raw = OrderSpecFile {
            m: self.m as i64,
            blocks: self.blocks.iter().map(|&r| r as i64).collect(),
            generators: self
                .generators
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|a| a.entries().iter().map(|&e| e as i64).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("order spec serializes")
    }

    /// The whole of `G/mG`: generated by every matrix unit of every block.
    pub fn maximal(m: u64, blocks: Vec<usize>) -> Result<Self> {
        let mut gens = Vec::new();
        for (bi, &r) in blocks.iter().enumerate() {
            for i in 0..r {
                for j in 0..r {
                    let mut t = zero_tuple(m, &blocks);
                    let mut e = vec![0i64; r * r];
                    e[i * r + j] = 1;
                    t[bi] = MatModM::new(r, m, &e)?;
                    gens.push(t);
                }
            }
        }
        OrderSpec::new(m, blocks, gens)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn generators(&self) -> &[MatTuple] {
        &self.generators
    }

    /// Same order with one more subring generator.
    pub fn with_generator(&self, extra: MatTuple) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push(extra);
        OrderSpec::new(self.m, self.blocks.clone(), gens)
    }

    pub fn identity_tuple(&self) -> MatTuple {
        identity_tuple(self.m, &self.blocks)
    }
}

pub fn identity_tuple(m: u64, blocks: &[usize]) -> MatTuple {
    blocks.iter().map(|&r| MatModM::identity(r, m)).collect()
}

pub fn zero_tuple(m: u64, blocks: &[usize]) -> MatTuple {
    blocks.iter().map(|&r| MatModM::zero(r, m)).collect()
}

fn tuple_add(a: &MatTuple, b: &MatTuple) -> MatTuple {
    a.iter().zip(b).map(|(x, y)| x.add_unchecked(y)).collect()
}

fn tuple_mul(a: &MatTuple, b: &MatTuple) -> MatTuple {
    a.iter().zip(b).map(|(x, y)| x.mul_unchecked(y)).collect()
}

fn tuple_op() -> GroupOp<MatTuple> {
    std::sync::Arc::new(|a: &MatTuple, b: &MatTuple| tuple_mul(a, b))
}

/// Number of elements of the whole ring `prod_i Mat(r_i, Z/m)`.
pub fn ambient_ring_size(m: u64, blocks: &[usize]) -> u128 {
    blocks
        .iter()
        .map(|&r| matrix_mod::matrix_space_size(r, m))
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// `L/mG` as an explicit set, in canonical order.
///
/// The subring generated by `gens` is the smallest additive subgroup that
/// contains the identity and is stable under left multiplication by each
/// generator. It is grown one spanning vector at a time: whenever a vector
/// outside the current span is found, the span absorbs its multiples and the
/// vector's left products with every generator are queued.
pub fn subring_closure(spec: &OrderSpec, limits: &Limits) -> Result<Vec<MatTuple>> {
    let zero = zero_tuple(spec.m, &spec.blocks);
    let mut span: HashSet<MatTuple> = HashSet::default();
    span.insert(zero.clone());
    let mut members: Vec<MatTuple> = vec![zero];
    let mut pending: VecDeque<MatTuple> = VecDeque::from([spec.identity_tuple()]);
    pending.extend(spec.generators.iter().cloned());

    while let Some(v) = pending.pop_front() {
        if span.contains(&v) {
            continue;
        }
        // span := span + Z*v, by adding successive multiples of v to the
        // old members until a multiple falls back into the old span.
        let base = members.clone();
        let mut step = v.clone();
        while !span.contains(&step) {
            for s in &base {
                let x = tuple_add(s, &step);
                if span.insert(x.clone()) {
                    members.push(x);
                }
            }
            if members.len() > limits.cap {
                return Err(Error::limit(
                    "subring closure",
                    members.len() as u128,
                    limits.cap,
                ));
            }
            step = tuple_add(&step, &v);
        }
        for g in &spec.generators {
            pending.push_back(tuple_mul(g, &v));
        }
    }
    members.sort();
    Ok(members)
}

/// The unit group of the finite ring `subring`.
///
/// An element of a finite subring that is invertible in the ambient ring
/// already has its inverse in the subring (left multiplication by it is an
/// injective, hence bijective, map of the subring), so membership reduces to
/// every block having a unit determinant.
pub fn subring_units(
    subring: &[MatTuple],
    m: u64,
    blocks: &[usize],
) -> Result<FiniteGroup<MatTuple>> {
    let mut units = Vec::new();
    for a in subring {
        let mut invertible = true;
        for x in a {
            if !x.is_invertible()? {
                invertible = false;
                break;
            }
        }
        if invertible {
            units.push(a.clone());
        }
    }
    FiniteGroup::from_elements(units, identity_tuple(m, blocks), tuple_op())
}

/// `(G/mG)^x = prod_i GL(r_i, Z/m)` as tuples.
pub fn ambient_units(m: u64, blocks: &[usize], limits: &Limits) -> Result<FiniteGroup<MatTuple>> {
    let factors = blocks
        .iter()
        .map(|&r| matrix_mod::enumerate_gl(r, m, limits))
        .collect::<Result<Vec<_>>>()?;
    FiniteGroup::product(&factors, limits.cap)
}

/// Generators of `Im(G^x)`, the image of `prod_i GL(r_i, Z)`.
pub fn global_unit_generators(m: u64, blocks: &[usize]) -> Result<Vec<MatTuple>> {
    let per_block = blocks
        .iter()
        .map(|&r| matrix_mod::elementary_generators(r, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(coset::product_generators(
        &identity_tuple(m, blocks),
        &per_block,
    ))
}

/// The double cosets `Im(G^x) \ (G/mG)^x / (L/mG)^x`, in canonical order.
pub fn double_cosets(spec: &OrderSpec, limits: &Limits) -> Result<Vec<Vec<MatTuple>>> {
    let g = ambient_units(spec.m, &spec.blocks, limits)?;
    let h_gens = global_unit_generators(spec.m, &spec.blocks)?;
    let ring = subring_closure(spec, limits)?;
    let k = subring_units(&ring, spec.m, &spec.blocks)?;
    if let Some(bad) = k.elements().iter().find(|x| !g.contains(x)) {
        return Err(Error::Internal(format!(
            "subring unit {bad:?} is not in GL"
        )));
    }
    let k_gens = k.generating_set();
    coset::double_coset_partition_generated(&g, &h_gens, &k_gens)
}

/// `g(L, G)`: the number of double cosets.
pub fn genus_relative(spec: &OrderSpec, limits: &Limits) -> Result<u64> {
    Ok(double_cosets(spec, limits)?.len() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GenusResult {
    /// `g(L, G)`
    pub relative_count: u64,
    /// `g(G)`, always 1 for products of integer matrix rings.
    pub maximal_count: u64,
    pub total: u64,
    /// `1` when `m <= 2`, else `(phi(m)/2)^k`.
    pub bound: u64,
}

/// Upper bound on the genus of any order at level `m` with `k` blocks.
pub fn genus_bound(m: u64, k: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("conductor level m must be at least 1"));
    }
    if m <= 2 {
        return Ok(1);
    }
    let half = totient(m)? / 2;
    Ok(half.checked_pow(k as u32).unwrap_or(u64::MAX))
}

pub fn genus(spec: &OrderSpec, limits: &Limits) -> Result<GenusResult> {
    let relative_count = genus_relative(spec, limits)?;
    let maximal_count = 1;
    let total = relative_count * maximal_count;
    let bound = genus_bound(spec.m, spec.blocks.len())?;
    if total < 1 || total > bound {
        return Err(Error::Internal(format!(
            "genus {total} violates the bound {bound} for m = {} with {} blocks",
            spec.m,
            spec.blocks.len()
        )));
    }
    Ok(GenusResult {
        relative_count,
        maximal_count,
        total,
        bound,
    })
}

/// `Z x_m Z = {(a, b) : a ≡ b mod m}` inside `Z x Z`.
pub fn pullback_spec(m: u64) -> Result<OrderSpec> {
    if m == 0 {
        return Err(Error::invalid("conductor level m must be at least 1"));
    }
    OrderSpec::new(m, vec![1, 1], vec![identity_tuple(m, &[1, 1])])
}

/// Closed form for the genus of `Z x_m Z`: `1` for `m <= 2`, else `phi(m)/2`.
pub fn genus_pullback_formula(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("conductor level m must be at least 1"));
    }
    if m <= 2 {
        Ok(1)
    } else {
        Ok(totient(m)? / 2)
    }
}
