//! Canonical expression storage: generator symbols, normally-ordered words,
//! and sparse sums with coefficients in `Q[k]`.
//!
//! A [`Monomial`] is a right-nested normally-ordered word of derived
//! generators, stored flat. Canonical monomials are sorted by the total
//! order on [`DerivGen`] (family, indices, derivative order), contain no
//! adjacent equal odd entries, and contain at most one dummy symbol, which
//! is last. [`Expression`]s map canonical monomials to coefficients and are
//! the unique normal forms the whole crate compares for equality.

use crate::{rat, Error, Rat, Result};
use num::traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// A polynomial in the level `k` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct KPoly {
    terms: BTreeMap<u32, Rat>,
}

impl KPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        KPoly::default()
    }

    /// The constant polynomial one.
    pub fn one() -> Self {
        KPoly::constant(rat(1))
    }

    /// A constant polynomial.
    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        KPoly { terms }
    }

    /// The monomial `c * k^pow`.
    pub fn k_pow(c: Rat, pow: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(pow, c);
        }
        KPoly { terms }
    }

    /// Whether this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c * k^pow` in place.
    pub fn add_term(&mut self, pow: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(pow).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&pow);
        }
    }

    /// Add another polynomial in place.
    pub fn add_assign(&mut self, other: &KPoly) {
        for (p, c) in &other.terms {
            self.add_term(*p, c.clone());
        }
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &KPoly) -> KPoly {
        let mut out = KPoly::zero();
        for (p, c) in &self.terms {
            for (q, d) in &other.terms {
                out.add_term(p + q, c.clone() * d.clone());
            }
        }
        out
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, c: &Rat) -> KPoly {
        if c.is_zero() {
            return KPoly::zero();
        }
        KPoly {
            terms: self
                .terms
                .iter()
                .map(|(p, v)| (*p, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Negation.
    pub fn neg(&self) -> KPoly {
        self.scale(&rat(-1))
    }

    /// Multiply by `k^pow`.
    pub fn shift_k(&self, pow: u32) -> KPoly {
        KPoly {
            terms: self.terms.iter().map(|(p, v)| (p + pow, v.clone())).collect(),
        }
    }

    /// Iterate over `(k-power, coefficient)` pairs, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (&u32, &Rat)> {
        self.terms.iter()
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (p, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if *p == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*k^{p}")?;
            }
        }
        Ok(())
    }
}

/// Generator family. The declaration order fixes the normal-ordering rank:
/// currents, then lowering ghosts, then raising ghosts, then W-sector
/// currents, then the extraction dummy.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    /// Current `(E_{a,b})~` of the affine sector; any `a, b`.
    Cur,
    /// Charged ghost `phi_{E_{a,b}}` of negative charge; requires `a < b`.
    PhiD,
    /// Charged ghost `phi^{a,b}` of positive charge; requires `a < b`
    /// (it corresponds to the lower unit `E_{b,a}` up to sign).
    PhiU,
    /// W-sector current `J_{a,b}` with `a >= b`.
    JGen,
    /// Central even dummy used to extract determinant coefficients.
    Dummy,
}

/// An underived generator symbol.
///
/// `a`/`b` are the printed indices: `Cur[a,b]`, `PhiD[a,b]`, `Phi[a,b]`,
/// `J[a,b]`; the dummy carries `a = b = 0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Generator {
    /// Family of the symbol.
    pub fam: Family,
    /// First printed index.
    pub a: u8,
    /// Second printed index.
    pub b: u8,
}

impl Generator {
    /// Current `(E_{a,b})~`.
    pub fn cur(a: u8, b: u8) -> Self {
        Generator { fam: Family::Cur, a, b }
    }

    /// Ghost `phi_{E_{a,b}}` (`a < b`).
    pub fn phi_d(a: u8, b: u8) -> Self {
        Generator { fam: Family::PhiD, a, b }
    }

    /// Ghost `phi^{a,b}` (`a < b`).
    pub fn phi_u(a: u8, b: u8) -> Self {
        Generator { fam: Family::PhiU, a, b }
    }

    /// W-sector current `J_{a,b}` (`a >= b`).
    pub fn j(a: u8, b: u8) -> Self {
        Generator { fam: Family::JGen, a, b }
    }

    /// Extraction dummy.
    pub fn dummy() -> Self {
        Generator { fam: Family::Dummy, a: 0, b: 0 }
    }

    /// Super parity of the symbol.
    pub fn parity(self) -> u8 {
        let s = (self.a as u16 + self.b as u16) % 2;
        match self.fam {
            Family::Cur | Family::JGen | Family::PhiU => ((s + 1) % 2) as u8,
            Family::PhiD => s as u8,
            Family::Dummy => 0,
        }
    }

    /// Twice the conformal weight of the symbol.
    pub fn weight2(self) -> i64 {
        let (a, b) = (self.a as i64, self.b as i64);
        match self.fam {
            Family::Cur | Family::JGen | Family::PhiD => a - b + 1,
            Family::PhiU => b - a,
            Family::Dummy => 0,
        }
    }

    /// Charge (ghost number): `+1` for raising ghosts, `-1` for lowering
    /// ghosts, `0` otherwise.
    pub fn charge(self) -> i64 {
        match self.fam {
            Family::PhiU => 1,
            Family::PhiD => -1,
            _ => 0,
        }
    }

    /// Twice the bigrade `(p, q)` of the symbol.
    pub fn bigrade2(self) -> (i64, i64) {
        let (a, b) = (self.a as i64, self.b as i64);
        match self.fam {
            Family::Cur | Family::JGen => (b - a, a - b),
            Family::PhiU => (a - b + 1, b - a + 1),
            Family::PhiD => (b - a - 2, a - b),
            Family::Dummy => (0, 0),
        }
    }
}

/// A generator with a number of odd derivatives applied: `S^d g`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DerivGen {
    /// Underlying symbol.
    pub g: Generator,
    /// Number of applications of the odd derivative `S`.
    pub d: u8,
}

impl DerivGen {
    /// The underived symbol `g`.
    pub fn plain(g: Generator) -> Self {
        DerivGen { g, d: 0 }
    }

    /// Super parity: `S` is odd, so each derivative flips parity.
    pub fn parity(self) -> u8 {
        ((self.g.parity() as u16 + self.d as u16) % 2) as u8
    }

    /// Twice the conformal weight: each `S` adds one half.
    pub fn weight2(self) -> i64 {
        self.g.weight2() + self.d as i64
    }

    /// Charge of the underlying symbol (derivatives preserve it).
    pub fn charge(self) -> i64 {
        self.g.charge()
    }
}

/// A normally-ordered word of derived generators, right-nested when read as
/// iterated normally-ordered products. The empty word is the vacuum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<DerivGen>);

impl Monomial {
    /// The vacuum word.
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    /// A single-symbol word.
    pub fn atom(g: DerivGen) -> Self {
        Monomial(vec![g])
    }

    /// Whether the word is the vacuum.
    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the word is empty (vacuum).
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Super parity of the word (sum of symbol parities).
    pub fn parity(&self) -> u8 {
        (self.0.iter().map(|g| g.parity() as u16).sum::<u16>() % 2) as u8
    }

    /// Twice the conformal weight of the word.
    pub fn weight2(&self) -> i64 {
        self.0.iter().map(|g| g.weight2()).sum()
    }

    /// Charge of the word.
    pub fn charge(&self) -> i64 {
        self.0.iter().map(|g| g.charge()).sum()
    }

    /// Filtration degree: number of non-dummy symbols plus total derivative
    /// order carried by them.
    pub fn filtration_degree(&self) -> i64 {
        self.0
            .iter()
            .filter(|g| g.g.fam != Family::Dummy)
            .map(|g| 1 + g.d as i64)
            .sum()
    }

    /// Whether the word is canonical: sorted, no adjacent equal odd symbols,
    /// at most one dummy and only in the last position.
    pub fn is_canonical(&self) -> bool {
        for w in self.0.windows(2) {
            if w[0] > w[1] {
                return false;
            }
            if w[0] == w[1] && w[0].parity() == 1 {
                return false;
            }
        }
        let dummies = self.0.iter().filter(|g| g.g.fam == Family::Dummy).count();
        dummies <= 1
            && (dummies == 0 || self.0.last().map(|g| g.g.fam) == Some(Family::Dummy))
    }
}

/// A canonical expression: a finite sum of canonical monomials with nonzero
/// coefficients in `Q[k]`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Expression {
    terms: BTreeMap<Monomial, KPoly>,
}

impl Expression {
    /// The zero expression.
    pub fn zero() -> Self {
        Expression::default()
    }

    /// A scalar multiple of the vacuum.
    pub fn scalar(c: KPoly) -> Self {
        let mut out = Expression::zero();
        out.add_term(Monomial::vacuum(), c);
        out
    }

    /// The single underived generator `g`.
    pub fn gen(g: Generator) -> Self {
        Expression::mono(Monomial::atom(DerivGen::plain(g)), KPoly::one())
    }

    /// A single monomial with coefficient.
    pub fn mono(m: Monomial, c: KPoly) -> Self {
        let mut out = Expression::zero();
        out.add_term(m, c);
        out
    }

    /// Whether this is the zero expression.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Add `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: KPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Add another expression in place.
    pub fn add_assign(&mut self, other: &Expression) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// Sum.
    pub fn add(&self, other: &Expression) -> Expression {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// Difference.
    pub fn sub(&self, other: &Expression) -> Expression {
        let mut out = self.clone();
        out.add_assign(&other.neg());
        out
    }

    /// Negation.
    pub fn neg(&self) -> Expression {
        self.scale_k(&KPoly::constant(rat(-1)))
    }

    /// Multiply every coefficient by a polynomial in `k`.
    pub fn scale_k(&self, c: &KPoly) -> Expression {
        if c.is_zero() {
            return Expression::zero();
        }
        let mut out = Expression::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul(c));
        }
        out
    }

    /// Multiply every coefficient by a rational.
    pub fn scale(&self, c: &Rat) -> Expression {
        self.scale_k(&KPoly::constant(c.clone()))
    }

    /// Iterate over `(monomial, coefficient)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &KPoly)> {
        self.terms.iter()
    }

    /// Super parity if all monomials agree, error otherwise; zero is even.
    pub fn parity(&self) -> Result<u8> {
        let mut p: Option<u8> = None;
        for (m, _) in self.iter() {
            let q = m.parity();
            match p {
                None => p = Some(q),
                Some(r) if r == q => {}
                Some(r) => {
                    return Err(Error::NonHomogeneous(format!(
                        "expression mixes parities {r} and {q}"
                    )))
                }
            }
        }
        Ok(p.unwrap_or(0))
    }

    /// Twice the conformal weight if homogeneous, error otherwise.
    ///
    /// Scalars count as weight zero, so a homogeneous nonzero weight rules
    /// out vacuum terms.
    pub fn weight2(&self) -> Result<i64> {
        let mut w: Option<i64> = None;
        for (m, _) in self.iter() {
            let v = m.weight2();
            match w {
                None => w = Some(v),
                Some(u) if u == v => {}
                Some(u) => {
                    return Err(Error::NonHomogeneous(format!(
                        "expression mixes weights {}/2 and {}/2",
                        u, v
                    )))
                }
            }
        }
        Ok(w.unwrap_or(0))
    }

    /// Charge if homogeneous, error otherwise.
    pub fn charge(&self) -> Result<i64> {
        let mut w: Option<i64> = None;
        for (m, _) in self.iter() {
            let v = m.charge();
            match w {
                None => w = Some(v),
                Some(u) if u == v => {}
                Some(u) => {
                    return Err(Error::NonHomogeneous(format!(
                        "expression mixes charges {u} and {v}"
                    )))
                }
            }
        }
        Ok(w.unwrap_or(0))
    }

    /// Filtration degree if all monomials agree, error otherwise.
    pub fn filtration_degree(&self) -> Result<i64> {
        let mut w: Option<i64> = None;
        for (m, _) in self.iter() {
            let v = m.filtration_degree();
            match w {
                None => w = Some(v),
                Some(u) if u == v => {}
                Some(u) => {
                    return Err(Error::NonHomogeneous(format!(
                        "expression mixes filtration degrees {u} and {v}"
                    )))
                }
            }
        }
        Ok(w.unwrap_or(0))
    }

    /// Assert (in debug builds) that every stored monomial is canonical.
    pub fn debug_check_canonical(&self) {
        debug_assert!(
            self.terms.keys().all(Monomial::is_canonical),
            "non-canonical monomial stored"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kpoly_ring_ops() {
        let a = KPoly::k_pow(rat(2), 1); // 2k
        let b = KPoly::k_pow(rat(3), 2); // 3k^2
        let mut s = a.clone();
        s.add_assign(&b);
        assert_eq!(s.mul(&a), {
            // (2k + 3k^2) * 2k = 4k^2 + 6k^3
            let mut t = KPoly::k_pow(rat(4), 2);
            t.add_assign(&KPoly::k_pow(rat(6), 3));
            t
        });
        let mut z = a.clone();
        z.add_assign(&a.neg());
        assert!(z.is_zero());
    }

    #[test]
    fn generator_metadata() {
        // Currents: parity (a+b+1) mod 2, weight (a-b+1)/2.
        assert_eq!(Generator::cur(1, 1).parity(), 1);
        assert_eq!(Generator::cur(2, 1).parity(), 0);
        assert_eq!(Generator::cur(2, 1).weight2(), 2);
        // Ghosts.
        assert_eq!(Generator::phi_d(1, 2).parity(), 1);
        assert_eq!(Generator::phi_d(1, 3).parity(), 0);
        assert_eq!(Generator::phi_d(1, 2).weight2(), 0);
        assert_eq!(Generator::phi_u(1, 2).parity(), 0);
        assert_eq!(Generator::phi_u(1, 2).weight2(), 1);
        assert_eq!(Generator::phi_u(1, 3).weight2(), 2);
        // Charges.
        assert_eq!(Generator::phi_u(1, 2).charge(), 1);
        assert_eq!(Generator::phi_d(1, 2).charge(), -1);
        assert_eq!(Generator::cur(1, 1).charge(), 0);
        // S flips parity and adds half a weight.
        let s1 = DerivGen { g: Generator::j(2, 2), d: 1 };
        assert_eq!(s1.parity(), (Generator::j(2, 2).parity() + 1) % 2);
        assert_eq!(s1.weight2(), Generator::j(2, 2).weight2() + 1);
        // Bigrade sums: charge = p + q over 2.
        for g in [
            Generator::cur(1, 2),
            Generator::phi_d(2, 3),
            Generator::phi_u(1, 3),
            Generator::j(3, 1),
        ] {
            let (p2, q2) = g.bigrade2();
            assert_eq!((p2 + q2) / 2, g.charge(), "{g:?}");
        }
    }

    #[test]
    fn monomial_canonicity() {
        let a = DerivGen::plain(Generator::j(1, 1));
        let b = DerivGen::plain(Generator::j(2, 1));
        assert!(Monomial(vec![a, b]).is_canonical());
        assert!(!Monomial(vec![b, a]).is_canonical());
        // Equal odd symbols may not be adjacent; J[1,1] is odd.
        assert_eq!(a.parity(), 1);
        assert!(!Monomial(vec![a, a]).is_canonical());
        // Equal even symbols may repeat; J[2,1] is even.
        assert_eq!(b.parity(), 0);
        assert!(Monomial(vec![b, b]).is_canonical());
        // Dummy must be last.
        let x = DerivGen::plain(Generator::dummy());
        assert!(Monomial(vec![a, x]).is_canonical());
        assert!(!Monomial(vec![x, a]).is_canonical());
    }

    #[test]
    fn expression_sums_cancel() {
        let m = Monomial::atom(DerivGen::plain(Generator::cur(1, 2)));
        let e = Expression::mono(m.clone(), KPoly::one());
        assert!(e.add(&e.neg()).is_zero());
        let two = e.add(&e);
        assert_eq!(two, e.scale(&rat(2)));
    }

    #[test]
    fn homogeneity_errors() {
        let a = Expression::gen(Generator::j(1, 1));
        let b = Expression::gen(Generator::j(2, 1));
        let mixed = a.add(&b);
        assert!(mixed.parity().is_err());
        assert!(mixed.weight2().is_err());
        assert!(a.parity().is_ok());
        assert_eq!(a.weight2().unwrap(), 1);
        assert_eq!(Expression::zero().weight2().unwrap(), 0);
    }
}
