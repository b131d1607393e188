//! Catalog of small stable polyhedral atoms: Moore atoms, the Chang atoms,
//! the double Chang atom `C(eta^2)`, and the atoms `A(v)` with attaching map
//! `v * nu` (`nu` of order 24).
//!
//! For each atom the catalog records its rational wedge of spheres, whether
//! it is torsion, and its reduced endomorphism ring, which is either torsion,
//! `Z`, or a pullback ring `Z x_m Z`. Genus counts of pullback rings are
//! delegated to the double-coset engine in [`crate::order_genus`].

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::finite_ring::gcd;
use crate::order_genus::{genus, pullback_spec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AtomKind {
    /// `S^n`
    Sphere,
    /// `M^{n+1}(a)`: cofiber of `a: S^n -> S^n`.
    Moore { a: u64 },
    /// `C^{n+1}(2^r eta 2^s)`
    ChangFull { r: u32, s: u32 },
    /// `C^{n+1}(2^r eta)`
    ChangREta { r: u32 },
    /// `C^{n+1}(eta 2^s)`
    ChangEtaS { s: u32 },
    /// `C^{n+1}(eta)`: cofiber of `eta: S^n -> S^{n-1}`.
    ChangEta,
    /// `C(eta^2)`: cofiber of `eta^2: S^n -> S^{n-2}`.
    ChangEtaSq,
    /// `A^{n+1}(v)`, `0 < v <= 12`.
    AtomA { v: u64 },
}

/// A catalog atom together with its suspension index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Atom {
    kind: AtomKind,
    top_dim: i64,
}

/// The reduced endomorphism ring `Es(X)/nil(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndoDescription {
    Torsion,
    Integers,
    /// `Z x_m Z`
    Pullback {
        m: u64,
    },
}

impl Atom {
    pub fn new(kind: AtomKind, top_dim: i64) -> Result<Self> {
        match kind {
            AtomKind::Moore { a } if a < 2 => {
                return Err(Error::invalid(format!("Moore atom needs a >= 2, got {a}")))
            }
            AtomKind::ChangFull { r, s } if r < 1 || s < 1 => {
                return Err(Error::invalid(format!(
                    "C(2^r.eta.2^s) needs r, s >= 1, got r={r} s={s}"
                )))
            }
            AtomKind::ChangREta { r } if r < 1 => {
                return Err(Error::invalid(format!("C(2^r.eta) needs r >= 1, got {r}")))
            }
            AtomKind::ChangEtaS { s } if s < 1 => {
                return Err(Error::invalid(format!("C(eta.2^s) needs s >= 1, got {s}")))
            }
            AtomKind::AtomA { v } if !(1..=12).contains(&v) => {
                return Err(Error::invalid(format!("A(v) needs 0 < v <= 12, got {v}")))
            }
            _ => {}
        }
        let min_dim = match kind {
            AtomKind::AtomA { .. } | AtomKind::ChangEtaSq => 4,
            _ => 2,
        };
        if top_dim < min_dim {
            return Err(Error::invalid(format!(
                "{} needs suspension index n >= {min_dim}, got {top_dim}",
                kind_label(&kind)
            )));
        }
        Ok(Atom { kind, top_dim })
    }

    pub fn sphere(n: i64) -> Result<Self> {
        Atom::new(AtomKind::Sphere, n)
    }

    pub fn moore(a: u64, n: i64) -> Result<Self> {
        Atom::new(AtomKind::Moore { a }, n)
    }

    pub fn chang_full(r: u32, s: u32, n: i64) -> Result<Self> {
        Atom::new(AtomKind::ChangFull { r, s }, n)
    }

    pub fn chang_r_eta(r: u32, n: i64) -> Result<Self> {
        Atom::new(AtomKind::ChangREta { r }, n)
    }

    pub fn chang_eta_s(s: u32, n: i64) -> Result<Self> {
        Atom::new(AtomKind::ChangEtaS { s }, n)
    }

    pub fn chang_eta(n: i64) -> Result<Self> {
        Atom::new(AtomKind::ChangEta, n)
    }

    pub fn chang_eta_sq(n: i64) -> Result<Self> {
        Atom::new(AtomKind::ChangEtaSq, n)
    }

    pub fn atom_a(v: u64, n: i64) -> Result<Self> {
        Atom::new(AtomKind::AtomA { v }, n)
    }

    pub fn kind(&self) -> AtomKind {
        self.kind
    }

    pub fn top_dim(&self) -> i64 {
        self.top_dim
    }

    /// Dimensions `n` with `dim_Q pi_n^S(X) ⊗ Q != 0`, with multiplicity.
    /// Sorted ascending.
    pub fn rational_wedge(&self) -> Vec<i64> {
        let n = self.top_dim;
        match self.kind {
            AtomKind::Sphere => vec![n],
            AtomKind::Moore { .. } | AtomKind::ChangFull { .. } => vec![],
            // 2^r is a rational iso on S^{n-1}; only the top cell survives.
            AtomKind::ChangREta { .. } => vec![n + 1],
            // 2^s kills S^n rationally; the bottom cell survives.
            AtomKind::ChangEtaS { .. } => vec![n - 1],
            AtomKind::ChangEta => vec![n - 1, n + 1],
            AtomKind::ChangEtaSq => vec![n - 2, n + 1],
            AtomKind::AtomA { .. } => vec![n - 3, n + 1],
        }
    }

    pub fn is_torsion(&self) -> bool {
        matches!(
            self.kind,
            AtomKind::Moore { .. } | AtomKind::ChangFull { .. }
        )
    }

    pub fn endo_order(&self) -> EndoDescription {
        match self.kind {
            AtomKind::Moore { .. } | AtomKind::ChangFull { .. } => EndoDescription::Torsion,
            AtomKind::Sphere | AtomKind::ChangREta { .. } | AtomKind::ChangEtaS { .. } => {
                EndoDescription::Integers
            }
            AtomKind::ChangEta | AtomKind::ChangEtaSq => EndoDescription::Pullback { m: 2 },
            AtomKind::AtomA { v } => EndoDescription::Pullback {
                m: 24 / gcd(v as i64, 24),
            },
        }
    }

    /// `g(X)`, computed from the reduced endomorphism ring.
    pub fn genus(&self, limits: &Limits) -> Result<u64> {
        match self.endo_order() {
            EndoDescription::Torsion | EndoDescription::Integers => Ok(1),
            EndoDescription::Pullback { m } => Ok(genus(&pullback_spec(m)?, limits)?.total),
        }
    }

    /// Whether two atoms lie in one genus. Beyond identical atoms, the only
    /// nontrivial coincidences in the catalog are `A(v) ~ A(v')` in equal
    /// dimension with `gcd(v, 24) == gcd(v', 24)`.
    pub fn same_genus(&self, other: &Atom) -> bool {
        if self == other {
            return true;
        }
        match (self.kind, other.kind) {
            (AtomKind::AtomA { v }, AtomKind::AtomA { v: w }) => {
                self.top_dim == other.top_dim && gcd(v as i64, 24) == gcd(w as i64, 24)
            }
            _ => false,
        }
    }
}

pub fn rational_wedge(atom: &Atom) -> Vec<i64> {
    atom.rational_wedge()
}

pub fn is_torsion(atom: &Atom) -> bool {
    atom.is_torsion()
}

pub fn endo_order(atom: &Atom) -> EndoDescription {
    atom.endo_order()
}

pub fn genus_of_atom(atom: &Atom, limits: &Limits) -> Result<u64> {
    atom.genus(limits)
}

pub fn same_genus(a: &Atom, b: &Atom) -> bool {
    a.same_genus(b)
}

/// Splits a wedge into its torsion atoms and the rest, keeping input order.
pub fn torsion_split(atoms: &[Atom]) -> (Vec<Atom>, Vec<Atom>) {
    atoms.iter().copied().partition(Atom::is_torsion)
}

/// Sphere dimensions of `B_0` of the wedge, with multiplicity, ascending.
pub fn b0_of_wedge(atoms: &[Atom]) -> Vec<i64> {
    let mut dims: Vec<i64> = atoms.iter().flat_map(Atom::rational_wedge).collect();
    dims.sort_unstable();
    dims
}

fn kind_label(kind: &AtomKind) -> String {
    match *kind {
        AtomKind::Sphere => "S".into(),
        AtomKind::Moore { a } => format!("M({a})"),
        AtomKind::ChangFull { r, s } => format!("C(2^{r}.eta.2^{s})"),
        AtomKind::ChangREta { r } => format!("C(2^{r}.eta)"),
        AtomKind::ChangEtaS { s } => format!("C(eta.2^{s})"),
        AtomKind::ChangEta => "C(eta)".into(),
        AtomKind::ChangEtaSq => "C(eta2)".into(),
        AtomKind::AtomA { v } => format!("A({v})"),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AtomKind::Sphere => write!(f, "S{}", self.top_dim),
            kind => write!(f, "{}@{}", kind_label(&kind), self.top_dim),
        }
    }
}

/// A name that does not follow the atom grammar.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse atom {input:?}: {message} at position {position} (found {token:?})")]
pub struct AtomParseError {
    pub input: String,
    pub position: usize,
    pub token: String,
    pub message: String,
}

impl From<AtomParseError> for Error {
    fn from(e: AtomParseError) -> Self {
        Error::InvalidArgument(e.to_string())
    }
}

/// Cursor over an atom name. Grammar:
///
/// ```text
/// S<n> | M(<a>)@<n> | C(2^r.eta.2^s)@<n> | C(2^r.eta)@<n> | C(eta.2^s)@<n>
///      | C(eta)@<n> | C(eta2)@<n> | A(<v>)@<n>
/// ```
struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn token_here(&self) -> String {
        let rest = self.rest();
        if rest.is_empty() {
            return "end of input".into();
        }
        let c = rest.chars().next().unwrap();
        if c.is_ascii_alphanumeric() {
            rest.chars()
                .take_while(char::is_ascii_alphanumeric)
                .collect()
        } else {
            c.to_string()
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, AtomParseError> {
        Err(self.fail_at(self.pos, self.token_here(), message))
    }

    fn fail_at(
        &self,
        position: usize,
        token: String,
        message: impl Into<String>,
    ) -> AtomParseError {
        AtomParseError {
            input: self.input.to_string(),
            position,
            token,
            message: message.into(),
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), AtomParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.fail(format!("expected {lit:?}"))
        }
    }

    fn number(&mut self) -> Result<(u64, usize), AtomParseError> {
        let start = self.pos;
        let digits: String = self
            .rest()
            .chars()
            .take_while(char::is_ascii_digit)
            .collect();
        if digits.is_empty() {
            return self.fail("expected a number");
        }
        self.pos += digits.len();
        digits
            .parse()
            .map(|v| (v, start))
            .map_err(|_| self.fail_at(start, digits.clone(), "number out of range"))
    }

    fn small(&mut self) -> Result<(u32, usize), AtomParseError> {
        let (v, at) = self.number()?;
        u32::try_from(v)
            .map(|v| (v, at))
            .map_err(|_| self.fail_at(at, v.to_string(), "exponent out of range"))
    }

    fn dimension(&mut self) -> Result<(i64, usize), AtomParseError> {
        self.expect("@")?;
        let (n, at) = self.number()?;
        let n = i64::try_from(n)
            .map_err(|_| self.fail_at(at, n.to_string(), "dimension out of range"))?;
        Ok((n, at))
    }

    fn finish(&self) -> Result<(), AtomParseError> {
        if self.rest().is_empty() {
            Ok(())
        } else {
            self.fail("unexpected trailing input")
        }
    }

    fn parse(&mut self) -> Result<(AtomKind, i64, usize), AtomParseError> {
        if self.eat("S") {
            let (n, at) = self.number()?;
            self.finish()?;
            let n = i64::try_from(n)
                .map_err(|_| self.fail_at(at, n.to_string(), "dimension out of range"))?;
            return Ok((AtomKind::Sphere, n, at));
        }
        let kind = if self.eat("M(") {
            let (a, _) = self.number()?;
            self.expect(")")?;
            AtomKind::Moore { a }
        } else if self.eat("A(") {
            let (v, _) = self.number()?;
            self.expect(")")?;
            AtomKind::AtomA { v }
        } else if self.eat("C(") {
            if self.eat("eta2)") {
                AtomKind::ChangEtaSq
            } else if self.eat("eta)") {
                AtomKind::ChangEta
            } else if self.eat("eta.2^") {
                let (s, _) = self.small()?;
                self.expect(")")?;
                AtomKind::ChangEtaS { s }
            } else if self.eat("2^") {
                let (r, _) = self.small()?;
                self.expect(".eta")?;
                if self.eat(".2^") {
                    let (s, _) = self.small()?;
                    self.expect(")")?;
                    AtomKind::ChangFull { r, s }
                } else {
                    self.expect(")")?;
                    AtomKind::ChangREta { r }
                }
            } else {
                return self.fail("expected \"eta\", \"eta2\", \"eta.2^s\" or \"2^r.eta\"");
            }
        } else {
            return self.fail("expected an atom name: S, M(, C( or A(");
        };
        let (n, at) = self.dimension()?;
        self.finish()?;
        Ok((kind, n, at))
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { input: s, pos: 0 };
        let (kind, n, _) = p.parse()?;
        Atom::new(kind, n)
    }
}

pub fn parse_atom(s: &str) -> Result<Atom> {
    s.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Atom {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_round_trip() {
        for name in [
            "S7",
            "M(3)@5",
            "C(2^1.eta.2^2)@6",
            "C(2^3.eta)@4",
            "C(eta.2^2)@4",
            "C(eta)@9",
            "C(eta2)@9",
            "A(5)@10",
        ] {
            assert_eq!(a(name).to_string(), name);
        }
        assert_eq!(
            a("C(2^1.eta.2^2)@6").kind(),
            AtomKind::ChangFull { r: 1, s: 2 }
        );
    }

    #[test]
    fn parse_errors_name_token_and_position() {
        let err = |s: &str| match s.parse::<Atom>() {
            Err(Error::InvalidArgument(msg)) => msg,
            other => panic!("{s}: {other:?}"),
        };
        let msg = err("Q(3)@4");
        assert!(msg.contains("position 0") && msg.contains("\"Q\""), "{msg}");
        let msg = err("M(x)@4");
        assert!(msg.contains("position 2") && msg.contains("\"x\""), "{msg}");
        let msg = err("C(eta)#4");
        assert!(msg.contains("position 6") && msg.contains("\"#\""), "{msg}");
        let msg = err("A(5)@10zz");
        assert!(msg.contains("position 7") && msg.contains("zz"), "{msg}");
        let msg = err("C(2^1.eta");
        assert!(msg.contains("end of input"), "{msg}");
        assert!(err("C(nu)@4").contains("position 2"));
    }

    #[test]
    fn parameter_ranges() {
        assert!("A(13)@6".parse::<Atom>().is_err());
        assert!("A(0)@6".parse::<Atom>().is_err());
        assert!("A(5)@3".parse::<Atom>().is_err());
        assert!("C(eta2)@3".parse::<Atom>().is_err());
        assert!("M(1)@4".parse::<Atom>().is_err());
        assert!("C(2^0.eta)@4".parse::<Atom>().is_err());
        assert!("S1".parse::<Atom>().is_err());
        assert!("C(eta)@2".parse::<Atom>().is_ok());
    }

    #[test]
    fn rational_wedges() {
        assert_eq!(a("S4").rational_wedge(), vec![4]);
        assert_eq!(a("A(5)@10").rational_wedge(), vec![7, 11]);
        assert!(a("M(4)@3").rational_wedge().is_empty());
        assert_eq!(a("C(eta)@6").rational_wedge(), vec![5, 7]);
        assert_eq!(a("C(eta2)@6").rational_wedge(), vec![4, 7]);
    }

    #[test]
    fn torsion_and_endo() {
        assert!(a("M(3)@4").is_torsion());
        assert!(a("C(2^1.eta.2^2)@4").is_torsion());
        assert!(!a("S5").is_torsion());
        assert_eq!(
            a("C(eta)@4").endo_order(),
            EndoDescription::Pullback { m: 2 }
        );
        assert_eq!(
            a("A(5)@6").endo_order(),
            EndoDescription::Pullback { m: 24 }
        );
        assert_eq!(a("A(4)@6").endo_order(), EndoDescription::Pullback { m: 6 });
        assert_eq!(a("C(2^2.eta)@4").endo_order(), EndoDescription::Integers);
    }

    #[test]
    fn atom_a_genera() {
        let lim = Limits::default();
        assert_eq!(a("A(1)@6").genus(&lim).unwrap(), 4);
        assert_eq!(a("A(3)@6").genus(&lim).unwrap(), 2);
        assert_eq!(a("A(8)@6").genus(&lim).unwrap(), 1);
    }

    #[test]
    fn same_genus_examples() {
        assert!(a("A(5)@7").same_genus(&a("A(7)@7")));
        assert!(!a("A(2)@7").same_genus(&a("A(3)@7")));
        assert!(!a("A(5)@7").same_genus(&a("A(7)@8")));
        assert!(a("S4").same_genus(&a("S4")));
        assert!(!a("M(2)@4").same_genus(&a("M(4)@4")));
    }

    #[test]
    fn splits_and_b0() {
        let (t, f) = torsion_split(&[a("M(2)@4"), a("S3")]);
        assert_eq!((t, f), (vec![a("M(2)@4")], vec![a("S3")]));
        assert_eq!(torsion_split(&[]), (vec![], vec![]));
        let (t, f) = torsion_split(&[a("C(2^1.eta.2^1)@4"), a("C(eta)@4"), a("M(4)@4")]);
        assert_eq!(t, vec![a("C(2^1.eta.2^1)@4"), a("M(4)@4")]);
        assert_eq!(f, vec![a("C(eta)@4")]);

        assert_eq!(b0_of_wedge(&[a("A(5)@8"), a("S9")]), vec![5, 9, 9]);
        assert!(b0_of_wedge(&[a("M(2)@4"), a("M(3)@4")]).is_empty());
        assert_eq!(b0_of_wedge(&[a("C(eta)@8")]), vec![7, 9]);
    }
}
