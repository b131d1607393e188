//! Self-checks bundled with the library: every published genus value and
//! bound, recomputed through the double-coset engine and compared against
//! closed forms. The CLI `check` verb runs [`run_all`].

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::Atom;
use crate::coset::{self, FiniteGroup, Verification};
use crate::error::{Limits, Result};
use crate::finite_ring::{gcd, plus_minus_one, totient};
use crate::matrix_mod::{self, MatModM};
use crate::order_genus::{
    genus, genus_bound, genus_pullback_formula, pullback_spec, MatTuple, OrderSpec,
};

pub const DEFAULT_SEED: u64 = 0x006e_7573_5f6b_6974;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {} (expected: {}; actual: {}; {} ms of {} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.expected,
            self.actual,
            self.elapsed.as_millis(),
            self.budget.as_millis()
        )
    }
}

/// Runs `body`, which reports `(ok, expected, actual)`, and folds the time
/// budget into the verdict. Engine errors count as failures.
fn timed(
    id: u32,
    name: &'static str,
    budget: Duration,
    body: impl FnOnce() -> Result<(bool, String, String)>,
) -> CheckOutcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (ok, expected, actual) = match result {
        Ok(r) => r,
        Err(e) => (false, "no error".into(), format!("error: {e}")),
    };
    CheckOutcome {
        id,
        name,
        passed: ok && elapsed <= budget,
        expected,
        actual,
        elapsed,
        budget,
    }
}

fn mismatches(list: &[String]) -> String {
    if list.is_empty() {
        "all match".into()
    } else {
        list.join(", ")
    }
}

pub fn pullback_identity(limits: &Limits) -> CheckOutcome {
    timed(
        1,
        "pullback genus equals phi(m)/2 for m in 1..=30",
        Duration::from_secs(5),
        || {
            let mut bad = Vec::new();
            for m in 1..=30 {
                let brute = genus(&pullback_spec(m)?, limits)?.total;
                let formula = genus_pullback_formula(m)?;
                if brute != formula {
                    bad.push(format!("m={m}: brute={brute} formula={formula}"));
                }
            }
            Ok((
                bad.is_empty(),
                "brute == formula for all 30 levels".into(),
                mismatches(&bad),
            ))
        },
    )
}

/// Published values of `g(A(v))` by `d = gcd(v, 24)`.
pub fn atom_a_expected_genus(v: u64) -> u64 {
    match gcd(v as i64, 24) {
        1 => 4,
        2 | 3 => 2,
        _ => 1,
    }
}

pub fn atom_a_table(limits: &Limits) -> CheckOutcome {
    timed(
        2,
        "g(A(v)) is 4, 2, 1 by gcd(v,24) for v in 1..=12",
        Duration::from_secs(5),
        || {
            let mut bad = Vec::new();
            let mut got = Vec::new();
            for v in 1..=12 {
                let g = Atom::atom_a(v, 8)?.genus(limits)?;
                got.push(g.to_string());
                if g != atom_a_expected_genus(v) {
                    bad.push(format!("v={v}: {g}"));
                }
            }
            let expected: Vec<String> = (1..=12)
                .map(|v| atom_a_expected_genus(v).to_string())
                .collect();
            Ok((bad.is_empty(), expected.join(" "), got.join(" ")))
        },
    )
}

pub fn genus_one_catalog(limits: &Limits) -> CheckOutcome {
    timed(
        3,
        "Moore and Chang atoms have genus 1",
        Duration::from_secs(1),
        || {
            let mut atoms = Vec::new();
            for a in [2, 3, 4, 8] {
                atoms.push(Atom::moore(a, 4)?);
            }
            atoms.push(Atom::chang_full(1, 1, 4)?);
            atoms.push(Atom::chang_r_eta(1, 4)?);
            atoms.push(Atom::chang_eta_s(2, 4)?);
            atoms.push(Atom::chang_eta(4)?);
            atoms.push(Atom::chang_eta_sq(4)?);
            let mut bad = Vec::new();
            for a in &atoms {
                let g = a.genus(limits)?;
                if g != 1 {
                    bad.push(format!("{a}: {g}"));
                }
            }
            Ok((
                bad.is_empty(),
                format!("genus 1 for {} atoms", atoms.len()),
                mismatches(&bad),
            ))
        },
    )
}

pub type StableImageFn = dyn Fn(usize, u64, &Limits) -> Result<FiniteGroup<MatModM>>;

pub fn stable_image_characterization(limits: &Limits) -> CheckOutcome {
    stable_image_characterization_with(limits, &matrix_mod::stable_image)
}

/// Compares `stable_image` against `{A in GL(r, Z/m) : det A = ±1}` by
/// exhaustive set comparison. The image function is a parameter so the
/// check itself can be exercised against a faulty implementation.
pub fn stable_image_characterization_with(
    limits: &Limits,
    stable_image: &StableImageFn,
) -> CheckOutcome {
    timed(
        4,
        "elementary closure equals det = ±1 in GL(r, Z/m)",
        Duration::from_secs(60),
        || {
            let cases: Vec<(usize, u64)> = (2..=12)
                .map(|m| (2, m))
                .chain((2..=4).map(|m| (3, m)))
                .collect();
            let mut bad = Vec::new();
            for &(r, m) in &cases {
                let gl = matrix_mod::enumerate_gl(r, m, limits)?;
                let pm = plus_minus_one(m)?;
                let mut expected = Vec::new();
                for a in gl.elements() {
                    if pm.contains(&a.det()?) {
                        expected.push(a.clone());
                    }
                }
                let got = stable_image(r, m, limits)?;
                if got.elements() != expected.as_slice() {
                    bad.push(format!(
                        "r={r} m={m}: {} vs {}",
                        got.order(),
                        expected.len()
                    ));
                }
            }
            Ok((
                bad.is_empty(),
                format!("{} (r, m) cases equal", cases.len()),
                mismatches(&bad),
            ))
        },
    )
}

/// A random tuple of matrices with entries uniform in `0..m`.
pub fn random_tuple(rng: &mut impl Rng, m: u64, blocks: &[usize]) -> MatTuple {
    blocks
        .iter()
        .map(|&r| {
            let e: Vec<i64> = (0..r * r).map(|_| rng.gen_range(0..m) as i64).collect();
            MatModM::new(r, m, &e).expect("entries are in range")
        })
        .collect()
}

/// A random order spec with `1..=max_gens` random generators.
pub fn random_spec(rng: &mut impl Rng, m: u64, blocks: &[usize], max_gens: usize) -> OrderSpec {
    let n = rng.gen_range(1..=max_gens);
    let gens = (0..n).map(|_| random_tuple(rng, m, blocks)).collect();
    OrderSpec::new(m, blocks.to_vec(), gens).expect("shapes match")
}

pub fn small_level_rule(limits: &Limits, seed: u64) -> CheckOutcome {
    timed(
        5,
        "g = 1 for 50 random orders with m in {2,3,4,6}",
        Duration::from_secs(60),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = Vec::new();
            for _ in 0..50 {
                let m = *[2u64, 3, 4, 6].choose(&mut rng).unwrap();
                let blocks: &[usize] = if rng.gen_bool(0.5) { &[1, 1] } else { &[2] };
                let spec = random_spec(&mut rng, m, blocks, 2);
                let g = genus(&spec, limits)?.total;
                if g != 1 {
                    bad.push(format!("{}: {g}", spec.to_json()));
                }
            }
            Ok((bad.is_empty(), "50 x genus 1".into(), mismatches(&bad)))
        },
    )
}

pub fn bound_and_monotonicity(limits: &Limits, seed: u64) -> CheckOutcome {
    timed(
        6,
        "g <= (phi(m)/2)^k and adding generators never raises g",
        Duration::from_secs(120),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shapes: [&[usize]; 3] = [&[1, 1], &[1, 1, 1], &[2]];
            let mut bad = Vec::new();
            for _ in 0..50 {
                let m = *[5u64, 8, 12, 24].choose(&mut rng).unwrap();
                let blocks = *shapes.choose(&mut rng).unwrap();
                let spec = random_spec(&mut rng, m, blocks, 2);
                let g = genus(&spec, limits)?.total;
                let bound = genus_bound(m, blocks.len())?;
                if g < 1 || g > bound {
                    bad.push(format!("{}: g={g} > bound {bound}", spec.to_json()));
                }
                let bigger = spec.with_generator(random_tuple(&mut rng, m, blocks))?;
                let g2 = genus(&bigger, limits)?.total;
                if g2 > g {
                    bad.push(format!("{}: grew from {g} to {g2}", bigger.to_json()));
                }
            }
            Ok((
                bad.is_empty(),
                "50 orders within bound, monotone".into(),
                mismatches(&bad),
            ))
        },
    )
}

/// A random group of order at most 2000, as tuples of matrices:
/// a product of one or two unit groups `(Z/a)^x`, or a small `GL(r, Z/m)`.
pub fn random_small_group(rng: &mut impl Rng, limits: &Limits) -> Result<FiniteGroup<MatTuple>> {
    let factors = loop {
        let choice = rng.gen_range(0..3);
        let factors = match choice {
            0 => vec![matrix_mod::enumerate_gl(
                1,
                rng.gen_range(1..=2000),
                limits,
            )?],
            1 => vec![
                matrix_mod::enumerate_gl(1, rng.gen_range(1..=60), limits)?,
                matrix_mod::enumerate_gl(1, rng.gen_range(1..=60), limits)?,
            ],
            _ => {
                let (r, m) = *[(2usize, 2u64), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2)]
                    .choose(rng)
                    .unwrap();
                vec![matrix_mod::enumerate_gl(r, m, limits)?]
            }
        };
        let order: usize = factors.iter().map(FiniteGroup::order).product();
        if order <= 2000 {
            break factors;
        }
    };
    FiniteGroup::product(&factors, limits.cap)
}

/// A random subgroup: trivial, whole, or generated by up to two random elements.
pub fn random_subgroup<E: coset::Element>(
    rng: &mut impl Rng,
    g: &FiniteGroup<E>,
) -> Result<Vec<E>> {
    match rng.gen_range(0..6) {
        0 => Ok(vec![g.identity().clone()]),
        1 => Ok(g.elements().to_vec()),
        _ => {
            let n = rng.gen_range(1..=2);
            let gens: Vec<E> = (0..n)
                .map(|_| g.elements()[rng.gen_range(0..g.order())].clone())
                .collect();
            g.subgroup_closure(&gens)
        }
    }
}

/// Checks the partition invariants for one `(G, H, K)`; returns a
/// description of the first violation.
pub fn partition_violation<E: coset::Element>(
    g: &FiniteGroup<E>,
    h: &[E],
    k: &[E],
    rng: &mut impl Rng,
) -> Result<Option<String>> {
    let blocks = coset::double_coset_partition(g, h, k, Verification::Checked)?;
    let mut all: Vec<E> = blocks.iter().flatten().cloned().collect();
    let total = all.len();
    all.sort();
    all.dedup();
    if all.len() != total {
        return Ok(Some("blocks overlap".into()));
    }
    if all != g.elements() {
        return Ok(Some("blocks do not cover G".into()));
    }
    if coset::block_sizes(&blocks).iter().sum::<usize>() != g.order() {
        return Ok(Some("block sizes do not sum to |G|".into()));
    }

    let mut shuffled = g.elements().to_vec();
    shuffled.shuffle(rng);
    let g2 = FiniteGroup::from_elements(shuffled, g.identity().clone(), g.op().clone())?;
    let (mut h2, mut k2) = (h.to_vec(), k.to_vec());
    h2.shuffle(rng);
    k2.shuffle(rng);
    if coset::double_coset_partition(&g2, &h2, &k2, Verification::Checked)? != blocks {
        return Ok(Some("partition changed under carrier shuffling".into()));
    }

    let whole = g.elements();
    if coset::double_coset_count(g, whole, whole, Verification::Trusted)? != 1 {
        return Ok(Some("H = K = G does not give one block".into()));
    }
    let e = [g.identity().clone()];
    if coset::double_coset_count(g, &e, &e, Verification::Checked)? != g.order() {
        return Ok(Some("H = K = {e} does not give |G| blocks".into()));
    }
    Ok(None)
}

pub fn double_coset_properties(limits: &Limits, seed: u64) -> CheckOutcome {
    timed(
        7,
        "double-coset partition invariants on 200 random cases",
        Duration::from_secs(120),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = Vec::new();
            for case in 0..200 {
                let g = random_small_group(&mut rng, limits)?;
                let h = random_subgroup(&mut rng, &g)?;
                let k = random_subgroup(&mut rng, &g)?;
                if let Some(why) = partition_violation(&g, &h, &k, &mut rng)? {
                    bad.push(format!("case {case} (|G|={}): {why}", g.order()));
                }
            }
            Ok((bad.is_empty(), "200 cases hold".into(), mismatches(&bad)))
        },
    )
}

pub fn same_genus_coherence(limits: &Limits) -> CheckOutcome {
    timed(
        8,
        "same_genus on A(v) has the gcd(v,24) fibers as classes",
        Duration::from_secs(1),
        || {
            let atoms: Vec<Atom> = (1..=12)
                .map(|v| Atom::atom_a(v, 8))
                .collect::<Result<_>>()?;
            let d = |v: u64| gcd(v as i64, 24);
            let mut bad = Vec::new();
            for (i, a) in atoms.iter().enumerate() {
                for (j, b) in atoms.iter().enumerate() {
                    let want = d(i as u64 + 1) == d(j as u64 + 1);
                    if a.same_genus(b) != want {
                        bad.push(format!("{a} vs {b}"));
                    }
                    for c in &atoms {
                        if a.same_genus(b) && b.same_genus(c) && !a.same_genus(c) {
                            bad.push(format!("not transitive: {a} {b} {c}"));
                        }
                    }
                }
            }
            let genera: Vec<u64> = atoms
                .iter()
                .map(|a| a.genus(limits))
                .collect::<Result<_>>()?;
            for i in 0..12 {
                for j in 0..12 {
                    if atoms[i].same_genus(&atoms[j]) && genera[i] != genera[j] {
                        bad.push(format!("{} and {} differ in g", atoms[i], atoms[j]));
                    }
                }
            }
            let mut classes: Vec<u64> = (1..=12).map(d).collect();
            classes.sort_unstable();
            classes.dedup();
            Ok((
                bad.is_empty(),
                format!("{} classes, g constant on each", classes.len()),
                mismatches(&bad),
            ))
        },
    )
}

/// All eight checks in order; `seed` drives the randomized ones (5 to 7).
pub fn run_all(limits: &Limits, seed: u64) -> Vec<CheckOutcome> {
    vec![
        pullback_identity(limits),
        atom_a_table(limits),
        genus_one_catalog(limits),
        stable_image_characterization(limits),
        small_level_rule(limits, seed),
        bound_and_monotonicity(limits, seed),
        double_coset_properties(limits, seed),
        same_genus_coherence(limits),
    ]
}

/// One row of the `A(v)` table: `(v, d, m, g from the engine, g from phi(m)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct AtomARow {
    pub v: u64,
    pub d: u64,
    pub m: u64,
    pub brute: u64,
    pub formula: u64,
}

pub fn atom_a_rows(limits: &Limits) -> Result<Vec<AtomARow>> {
    (1..=12)
        .map(|v| {
            let d = gcd(v as i64, 24);
            let m = 24 / d;
            let brute = Atom::atom_a(v, 8)?.genus(limits)?;
            let formula = genus_pullback_formula(m)?;
            Ok(AtomARow {
                v,
                d,
                m,
                brute,
                formula,
            })
        })
        .collect()
}

/// `|GL(r, Z/m)| * |{±1}| == |Im| * phi(m)`.
pub fn determinant_fibration_holds(r: usize, m: u64, limits: &Limits) -> Result<bool> {
    let gl = matrix_mod::enumerate_gl(r, m, limits)?.order() as u64;
    let im = matrix_mod::stable_image(r, m, limits)?.order() as u64;
    Ok(im * totient(m)? == gl * plus_minus_one(m)?.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broken_stable_image_fails_check_four() {
        // Only the transvections: misses diag(-1, 1), so det = -1 is absent.
        let broken = |r: usize, m: u64, limits: &Limits| {
            let gens: Vec<MatModM> = matrix_mod::elementary_generators(r, m)?
                .into_iter()
                .filter(|g| g.det().map(|d| d.value() == 1 % m).unwrap_or(false))
                .collect();
            FiniteGroup::generated_by(
                &gens,
                MatModM::identity(r, m),
                matrix_mod::matrix_op(),
                limits.cap,
            )
        };
        let out = stable_image_characterization_with(&Limits::default(), &broken);
        assert!(!out.passed, "{}", out.line());
        assert_eq!(out.id, 4);
    }

    #[test]
    fn fast_checks_pass() {
        let lim = Limits::default();
        for out in [
            pullback_identity(&lim),
            atom_a_table(&lim),
            genus_one_catalog(&lim),
            same_genus_coherence(&lim),
        ] {
            assert!(out.passed, "{}", out.line());
        }
    }

    #[test]
    fn fibration_identity() {
        for (r, m) in [(1, 12), (2, 2), (2, 5), (2, 9), (3, 3)] {
            assert!(determinant_fibration_holds(r, m, &Limits::default()).unwrap());
        }
    }

    #[test]
    fn table_rows_agree() {
        let rows = atom_a_rows(&Limits::default()).unwrap();
        assert_eq!(
            rows[0],
            AtomARow {
                v: 1,
                d: 1,
                m: 24,
                brute: 4,
                formula: 4
            }
        );
        assert_eq!(
            rows[11],
            AtomARow {
                v: 12,
                d: 12,
                m: 2,
                brute: 1,
                formula: 1
            }
        );
        assert_eq!(
            rows[8],
            AtomARow {
                v: 9,
                d: 3,
                m: 8,
                brute: 2,
                formula: 2
            }
        );
        assert!(rows.iter().all(|r| r.brute == r.formula));
    }

    #[test]
    fn errors_become_failures() {
        let failing = |_: usize, _: u64, _: &Limits| -> Result<FiniteGroup<MatModM>> {
            Err(crate::Error::Internal("boom".into()))
        };
        let out = stable_image_characterization_with(&Limits::default(), &failing);
        assert!(!out.passed);
        assert!(out.actual.contains("boom"));
    }
}
