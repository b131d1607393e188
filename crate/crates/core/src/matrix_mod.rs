//! Square matrices over `Z/m`, the groups `GL(r, Z/m)`, and the image of
//! `GL(r, Z)` in them.

use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;

use crate::coset::{FiniteGroup, GroupOp};
use crate::error::{Error, Limits, Result};
use crate::finite_ring::Residue;

/// Largest size for which determinants (and hence `GL` membership) are supported.
pub const MAX_DET_SIZE: usize = 4;

/// Largest modulus accepted for matrices; keeps every intermediate sum of
/// products inside 128-bit arithmetic.
pub const MAX_MATRIX_MODULUS: u64 = 1 << 31;

/// An `r x r` matrix over `Z/m`, entries row-major and canonical.
///
/// Field order matters: the derived `Ord`/`Hash` make the row-major entry
/// tuple the canonical key for group enumeration.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatModM {
    modulus: u64,
    size: usize,
    entries: Entries,
}

type Entries = ArrayVec<u64, { MAX_DET_SIZE * MAX_DET_SIZE }>;

impl fmt::Debug for MatModM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}mod{}", self.rows(), self.modulus)
    }
}

impl MatModM {
    /// Builds a matrix from row-major integers, reducing each mod `m`.
    pub fn new(size: usize, modulus: u64, entries: &[i64]) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("matrix size must be at least 1"));
        }
        if modulus == 0 || modulus > MAX_MATRIX_MODULUS {
            return Err(Error::invalid(format!(
                "matrix modulus must lie in 1..={MAX_MATRIX_MODULUS}, got {modulus}"
            )));
        }
        if size > MAX_DET_SIZE {
            return Err(Error::UnsupportedSize(size));
        }
        if entries.len() != size * size {
            return Err(Error::invalid(format!(
                "a {size}x{size} matrix needs {} entries, got {}",
                size * size,
                entries.len()
            )));
        }
        let entries = entries
            .iter()
            .map(|&e| (e as i128).rem_euclid(modulus as i128) as u64)
            .collect();
        Ok(MatModM {
            modulus,
            size,
            entries,
        })
    }

    pub(crate) fn from_raw(size: usize, modulus: u64, entries: Entries) -> Self {
        debug_assert_eq!(entries.len(), size * size);
        debug_assert!(entries.iter().all(|&e| e < modulus));
        MatModM {
            modulus,
            size,
            entries,
        }
    }

    /// Panics if `size` exceeds [`MAX_DET_SIZE`]; use [`MatModM::new`] for
    /// unchecked input.
    pub fn zero(size: usize, modulus: u64) -> Self {
        MatModM::from_raw(size, modulus, (0..size * size).map(|_| 0).collect())
    }

    /// Panics if `size` exceeds [`MAX_DET_SIZE`].
    pub fn identity(size: usize, modulus: u64) -> Self {
        let mut m = MatModM::zero(size, modulus);
        for i in 0..size {
            m.entries[i * size + i] = 1 % modulus;
        }
        m
    }

    pub fn diagonal(modulus: u64, diag: &[i64]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![0i64; n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = d;
        }
        MatModM::new(n, modulus, &entries)
    }

    /// The transvection `I + c * e_ij` (zero-based indices, `i != j`).
    pub fn elementary(size: usize, modulus: u64, i: usize, j: usize, c: i64) -> Result<Self> {
        if i == j || i >= size || j >= size {
            return Err(Error::invalid(format!(
                "no elementary matrix E_({i},{j}) of size {size}"
            )));
        }
        let mut m = MatModM::identity(size, modulus);
        m.entries[i * size + j] = (c as i128).rem_euclid(modulus as i128) as u64;
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries
            .chunks(self.size)
            .map(<[u64]>::to_vec)
            .collect()
    }

    fn check_compatible(&self, other: &MatModM) -> Result<()> {
        if self.size != other.size || self.modulus != other.modulus {
            return Err(Error::invalid(format!(
                "cannot combine a {}x{} matrix mod {} with a {}x{} matrix mod {}",
                self.size, self.size, self.modulus, other.size, other.size, other.modulus
            )));
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &MatModM) -> Result<MatModM> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn mat_add(&self, other: &MatModM) -> Result<MatModM> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &MatModM) -> MatModM {
        let n = self.size;
        let m = self.modulus as u128;
        let mut out = Entries::new();
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u128 * other.entries[k * n + j] as u128;
                }
                out.push((acc % m) as u64);
            }
        }
        MatModM::from_raw(n, self.modulus, out)
    }

    pub(crate) fn add_unchecked(&self, other: &MatModM) -> MatModM {
        let m = self.modulus as u128;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| ((a as u128 + b as u128) % m) as u64)
            .collect();
        MatModM::from_raw(self.size, self.modulus, entries)
    }

    /// Determinant by cofactor expansion along the first row. No division is
    /// needed, so this is valid for composite moduli.
    pub fn det(&self) -> Result<Residue> {
        if self.size > MAX_DET_SIZE {
            return Err(Error::UnsupportedSize(self.size));
        }
        let m = self.modulus as i128;
        let e = |i: usize, j: usize| self.entries[i * self.size + j] as i128;
        let d = match self.size {
            1 => e(0, 0),
            2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
            _ => {
                let rows: ArrayVec<usize, MAX_DET_SIZE> = (0..self.size).collect();
                cofactor_det(&self.entries, self.size, &rows, &rows, m)
            }
        };
        Ok(residue_of(d % m, self.modulus))
    }

    pub fn is_invertible(&self) -> Result<bool> {
        Ok(self.det()?.is_unit())
    }
}

fn residue_of(v: i128, m: u64) -> Residue {
    Residue::from_reduced(v.rem_euclid(m as i128) as u64, m)
}

fn cofactor_det(e: &[u64], n: usize, rows: &[usize], cols: &[usize], m: i128) -> i128 {
    if rows.len() == 1 {
        return e[rows[0] * n + cols[0]] as i128 % m;
    }
    let r0 = rows[0];
    let rest = &rows[1..];
    let mut acc: i128 = 0;
    for (ci, &c) in cols.iter().enumerate() {
        let a = e[r0 * n + c] as i128;
        if a == 0 {
            continue;
        }
        let minor_cols: ArrayVec<usize, MAX_DET_SIZE> =
            cols.iter().copied().filter(|&x| x != c).collect();
        let term = a * cofactor_det(e, n, rest, &minor_cols, m) % m;
        acc = if ci % 2 == 0 {
            (acc + term) % m
        } else {
            (acc - term) % m
        };
    }
    acc.rem_euclid(m)
}

/// Group law for matrices of one fixed size and modulus.
pub fn matrix_op() -> GroupOp<MatModM> {
    Arc::new(|a: &MatModM, b: &MatModM| a.mul_unchecked(b))
}

fn check_shape(r: usize, m: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("matrix size r must be at least 1"));
    }
    if r > MAX_DET_SIZE {
        return Err(Error::UnsupportedSize(r));
    }
    if m == 0 || m > MAX_MATRIX_MODULUS {
        return Err(Error::invalid(format!(
            "modulus m must lie in 1..={MAX_MATRIX_MODULUS}, got {m}"
        )));
    }
    Ok(())
}

/// Number of matrices `m^(r^2)` a full scan of `Mat(r, Z/m)` visits.
pub fn matrix_space_size(r: usize, m: u64) -> u128 {
    (m as u128).checked_pow((r * r) as u32).unwrap_or(u128::MAX)
}

/// `GL(r, Z/m)` by exhaustive scan of all `m^(r^2)` matrices.
pub fn enumerate_gl(r: usize, m: u64, limits: &Limits) -> Result<FiniteGroup<MatModM>> {
    check_shape(r, m)?;
    let total = matrix_space_size(r, m);
    limits.ensure(&format!("scan of Mat({r}, Z/{m})"), total)?;
    let cells = r * r;
    let mut digits: Entries = (0..cells).map(|_| 0).collect();
    let mut out = Vec::new();
    for _ in 0..total {
        let a = MatModM::from_raw(r, m, digits.clone());
        if a.is_invertible()? {
            out.push(a);
        }
        // Odometer increment, last entry fastest: yields row-major order.
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    FiniteGroup::from_elements(out, MatModM::identity(r, m), matrix_op())
}

/// Generators of the image of `GL(r, Z)`: all transvections `E_ij(1)` with
/// `i != j`, followed by `diag(-1, 1, ..., 1)`. For `r = 1` this is just `-1`.
pub fn elementary_generators(r: usize, m: u64) -> Result<Vec<MatModM>> {
    check_shape(r, m)?;
    let mut gens = Vec::with_capacity(r * (r - 1) + 1);
    for i in 0..r {
        for j in 0..r {
            if i != j {
                gens.push(MatModM::elementary(r, m, i, j, 1)?);
            }
        }
    }
    let mut diag = vec![1i64; r];
    diag[0] = -1;
    gens.push(MatModM::diagonal(m, &diag)?);
    Ok(gens)
}

/// Subgroup of `GL(r, Z/m)` generated by [`elementary_generators`]: the
/// image of the global units `GL(r, Z)` modulo `m`.
pub fn stable_image(r: usize, m: u64, limits: &Limits) -> Result<FiniteGroup<MatModM>> {
    check_shape(r, m)?;
    let gens = elementary_generators(r, m)?;
    FiniteGroup::generated_by(&gens, MatModM::identity(r, m), matrix_op(), limits.cap)
}

/// Order of `GL(r, Z/m)` from the prime factorization of `m`:
/// `prod_{p^k || m} p^((k-1) r^2) * prod_{i<r} (p^r - p^i)`.
pub fn gl_order_formula(r: usize, m: u64) -> u128 {
    let mut order: u128 = 1;
    let mut rest = m;
    let mut p = 2;
    while rest > 1 {
        if rest.is_multiple_of(p) {
            let mut k = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            let p = p as u128;
            let r2 = (r * r) as u32;
            order *= p.pow((k - 1) * r2);
            for i in 0..r as u32 {
                order *= p.pow(r as u32) - p.pow(i);
            }
        }
        p += 1;
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(r: usize, m: u64, e: &[i64]) -> MatModM {
        MatModM::new(r, m, e).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let a = mat(2, 9, &[2, 7, 3, 4]);
        assert_eq!(MatModM::identity(2, 9).mat_mul(&a).unwrap(), a);
        let d = MatModM::diagonal(5, &[-1, 1]).unwrap();
        assert_eq!(d.mat_mul(&d).unwrap(), MatModM::identity(2, 5));
        let e = MatModM::elementary(2, 3, 0, 1, 1).unwrap();
        assert_eq!(
            e.mat_mul(&e).unwrap(),
            MatModM::elementary(2, 3, 0, 1, 2).unwrap()
        );
        // direct 2x2 product: [[1,1],[0,1]]^2 = [[1,2],[0,1]]
        assert_eq!(e.mat_mul(&e).unwrap().entries(), &[1, 2, 0, 1]);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = MatModM::identity(2, 5);
        assert!(a.mat_mul(&MatModM::identity(2, 7)).is_err());
        assert!(a.mat_mul(&MatModM::identity(3, 5)).is_err());
        assert!(MatModM::new(2, 5, &[1, 2, 3]).is_err());
    }

    #[test]
    fn determinant_examples() {
        for r in 1..=4 {
            for m in [1, 2, 7, 24] {
                assert_eq!(MatModM::identity(r, m).det().unwrap().value(), 1 % m);
            }
        }
        assert_eq!(
            MatModM::diagonal(7, &[-1, 1])
                .unwrap()
                .det()
                .unwrap()
                .value(),
            6
        );
        assert_eq!(mat(2, 6, &[1, 1, 0, 1]).det().unwrap().value(), 1);
        assert_eq!(MatModM::new(5, 3, &[0; 25]), Err(Error::UnsupportedSize(5)));
    }

    fn leibniz_det(a: &MatModM) -> u64 {
        // Sum over permutations, independent of the cofactor recursion.
        let n = a.size();
        let m = a.modulus() as i128;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut acc: i128 = 0;
        loop {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let mut term: i128 = 1;
            for (i, &p) in perm.iter().enumerate() {
                term = term * a.get(i, p) as i128 % m;
            }
            acc += if inversions % 2 == 0 { term } else { -term };
            // next permutation
            let Some(i) = (0..n.saturating_sub(1))
                .rev()
                .find(|&i| perm[i] < perm[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        acc.rem_euclid(m) as u64
    }

    #[test]
    fn gl_orders_by_scan() {
        assert_eq!(enumerate_gl(2, 2, &Limits::default()).unwrap().order(), 6);
        assert_eq!(enumerate_gl(2, 3, &Limits::default()).unwrap().order(), 48);
        for m in 1..=30 {
            let g = enumerate_gl(1, m, &Limits::default()).unwrap();
            assert_eq!(g.order() as u64, crate::finite_ring::totient(m).unwrap());
        }
        for (r, m) in [(2, 4), (2, 6), (2, 12), (3, 2), (3, 3)] {
            let g = enumerate_gl(r, m, &Limits::default()).unwrap();
            assert_eq!(g.order() as u128, gl_order_formula(r, m), "GL({r}, Z/{m})");
        }
    }

    #[test]
    fn gl_scan_respects_cap() {
        let err = enumerate_gl(3, 5, &Limits::with_cap(1000)).unwrap_err();
        assert!(err.is_resource_limit());
        assert_eq!(
            enumerate_gl(5, 2, &Limits::default()).unwrap_err(),
            Error::UnsupportedSize(5)
        );
    }

    #[test]
    fn gl_is_a_group() {
        let g = enumerate_gl(2, 4, &Limits::default()).unwrap();
        assert!(g.contains(&MatModM::identity(2, 4)));
        assert!(g.is_closed());
        for a in g.elements() {
            let inv = g.inverse(a).unwrap();
            assert_eq!(a.mat_mul(&inv).unwrap(), MatModM::identity(2, 4));
        }
    }

    #[test]
    fn generator_lists() {
        let g = elementary_generators(2, 7).unwrap();
        assert_eq!(
            g,
            vec![
                MatModM::elementary(2, 7, 0, 1, 1).unwrap(),
                MatModM::elementary(2, 7, 1, 0, 1).unwrap(),
                MatModM::diagonal(7, &[-1, 1]).unwrap(),
            ]
        );
        assert_eq!(elementary_generators(1, 5).unwrap(), vec![mat(1, 5, &[4])]);
        let g3 = elementary_generators(3, 2).unwrap();
        assert_eq!(g3.len(), 7);
        assert_eq!(g3[6], MatModM::identity(3, 2));
    }

    #[test]
    fn stable_image_examples() {
        let s = stable_image(1, 12, &Limits::default()).unwrap();
        assert_eq!(s.elements(), &[mat(1, 12, &[1]), mat(1, 12, &[11])]);
        assert_eq!(stable_image(2, 2, &Limits::default()).unwrap().order(), 6);
        assert_eq!(stable_image(2, 5, &Limits::default()).unwrap().order(), 240);
        assert_eq!(stable_image(1, 1, &Limits::default()).unwrap().order(), 1);
    }

    #[test]
    fn stable_image_is_det_pm_one() {
        for (r, m) in [(1, 9), (2, 6), (2, 8), (3, 2)] {
            let gl = enumerate_gl(r, m, &Limits::default()).unwrap();
            let pm = crate::finite_ring::plus_minus_one(m).unwrap();
            let expected: Vec<MatModM> = gl
                .elements()
                .iter()
                .filter(|a| pm.contains(&a.det().unwrap()))
                .cloned()
                .collect();
            let got = stable_image(r, m, &Limits::default()).unwrap();
            assert_eq!(got.elements(), &expected[..], "r={r} m={m}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_mat(r: usize, m: u64) -> impl Strategy<Value = MatModM> {
            proptest::collection::vec(0..m as i64, r * r)
                .prop_map(move |e| MatModM::new(r, m, &e).unwrap())
        }

        fn arb_pair() -> impl Strategy<Value = (MatModM, MatModM)> {
            (1usize..=4, 1u64..30).prop_flat_map(|(r, m)| (arb_mat(r, m), arb_mat(r, m)))
        }

        proptest! {
            #[test]
            fn det_is_multiplicative((a, b) in arb_pair()) {
                let ab = a.mat_mul(&b).unwrap();
                prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
            }

            #[test]
            fn det_matches_leibniz((a, _b) in arb_pair()) {
                prop_assert_eq!(a.det().unwrap().value(), leibniz_det(&a));
            }

            #[test]
            fn mul_is_associative((a, b) in arb_pair()) {
                let c = b.mat_add(&a).unwrap();
                prop_assert_eq!(a.mat_mul(&b).unwrap().mat_mul(&c).unwrap(), a.mat_mul(&b.mat_mul(&c).unwrap()).unwrap());
            }
        }
    }
}
