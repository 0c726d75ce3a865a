//! Jacobi identity checker over two independent lambda-parameters.
//!
//! The identity reads
//!
//! ```text
//! [a_Lambda [b_Gamma c]] = -(-1)^{p(a)} [[a_Lambda b]_{Lambda+Gamma} c]
//!                          + (-1)^{(p(a)+1)(p(b)+1)} [b_Gamma [a_Lambda c]]
//! ```
//!
//! with `Lambda = (lambda, chi)` and `Gamma = (gamma, eta)` two pairs of
//! formal variables, `chi^2 = -lambda`, `eta^2 = -gamma`, `chi eta = -eta
//! chi`, and the even variables central. Values live in polynomials with
//! monomials `lambda^{j0} chi^{j1} gamma^{k0} eta^{k1}` (normal order as
//! written), which [`LambdaPoly2`] stores by key `(j0, j1, k0, k1)`.

use super::algebra::{factorial, Algebra};
use super::expr::Expression;
use crate::{Rat, Result};
use std::collections::BTreeMap;

/// Polynomial in two lambda-pairs with expression coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LambdaPoly2 {
    terms: BTreeMap<(u32, u8, u32, u8), Expression>,
}

impl LambdaPoly2 {
    /// Add a coefficient in place.
    pub fn add_term(&mut self, key: (u32, u8, u32, u8), e: Expression) {
        if e.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(e);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&e);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Whether all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate over `(key, coefficient)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u8, u32, u8), &Expression)> {
        self.terms.iter()
    }
}

fn binom(m: u32, t: u32) -> Rat {
    factorial(m) / (factorial(t) * factorial(m - t))
}

impl Algebra {
    /// `[a_Lambda [b_Gamma c]]` assembled into the two-parameter ring.
    ///
    /// Sign bookkeeping throughout this file: a formal variable moving
    /// across the odd bracket symbol contributes `-1`, and moving across a
    /// field argument contributes that field's parity sign. Here the outer
    /// `eta^{k1}` crosses the symbol and `a` in `[a_Lambda .]`, hence
    /// `(-1)^{k1 (p(a)+1)}`; normal-ordering `chi^{j1}` past `eta^{k1}`
    /// contributes `(-1)^{j1 k1}`.
    fn jac_left(&self, a: &Expression, b: &Expression, c: &Expression, pa: u8) -> LambdaPoly2 {
        let mut acc = LambdaPoly2::default();
        let p_bc = self.bracket(b, c);
        for ((k0, k1), e) in p_bc.iter() {
            let q = self.bracket(a, e);
            for ((j0, j1), f) in q.iter() {
                let mut neg = false;
                if *k1 == 1 && (pa + 1) % 2 == 1 {
                    neg = !neg;
                }
                if *k1 == 1 && *j1 == 1 {
                    neg = !neg;
                }
                acc.add_term(
                    (*j0, *j1, *k0, *k1),
                    if neg { f.neg() } else { f.clone() },
                );
            }
        }
        acc
    }

    /// `[b_Gamma [a_Lambda c]]` assembled into the two-parameter ring.
    ///
    /// The inner `chi^{j1}` crosses the symbol and `b` in `[b_Gamma .]`:
    /// `(-1)^{j1 (p(b)+1)}`.
    fn jac_right(&self, a: &Expression, b: &Expression, c: &Expression, pb: u8) -> LambdaPoly2 {
        let mut acc = LambdaPoly2::default();
        let p_ac = self.bracket(a, c);
        for ((j0, j1), e) in p_ac.iter() {
            let r = self.bracket(b, e);
            for ((k0, k1), f) in r.iter() {
                let neg = *j1 == 1 && (pb + 1) % 2 == 1;
                acc.add_term(
                    (*j0, *j1, *k0, *k1),
                    if neg { f.neg() } else { f.clone() },
                );
            }
        }
        acc
    }

    /// `[[a_Lambda b]_{Lambda+Gamma} c]` assembled into the two-parameter
    /// ring by substituting `lambda -> lambda + gamma`, `chi -> chi + eta`
    /// in the inner bracket's variables.
    ///
    /// The outer `chi^{j1}` of `[a_Lambda b]` crosses only the bracket
    /// symbol in `[. _{Lambda+Gamma} c]` (the argument `c` stays to its
    /// right), hence a plain `(-1)^{j1}`.
    fn jac_middle(&self, a: &Expression, b: &Expression, c: &Expression) -> LambdaPoly2 {
        let mut acc = LambdaPoly2::default();
        let p_ab = self.bracket(a, b);
        for ((j0, j1), e) in p_ab.iter() {
            let n = self.bracket(e, c);
            let sign0 = *j1 == 1;
            for ((m0, m1), f) in n.iter() {
                for t in 0..=*m0 {
                    let coef = binom(*m0, t);
                    let scaled = f.scale(&coef);
                    let scaled = if sign0 { scaled.neg() } else { scaled };
                    if *m1 == 0 {
                        acc.add_term((j0 + t, *j1, m0 - t, 0), scaled);
                    } else {
                        // chi-part of (chi + eta).
                        if *j1 == 0 {
                            acc.add_term((j0 + t, 1, m0 - t, 0), scaled.clone());
                        } else {
                            // chi chi = -lambda.
                            acc.add_term((j0 + t + 1, 0, m0 - t, 0), scaled.neg());
                        }
                        // eta-part of (chi + eta).
                        acc.add_term((j0 + t, *j1, m0 - t, 1), scaled);
                    }
                }
            }
        }
        acc
    }

    /// The Jacobi defect `lhs - rhs`; zero iff the identity holds for the
    /// (parity-homogeneous) triple.
    pub fn jacobi_defect(
        &self,
        a: &Expression,
        b: &Expression,
        c: &Expression,
    ) -> Result<LambdaPoly2> {
        let pa = a.parity()?;
        let pb = b.parity()?;
        c.parity()?;
        let left = self.jac_left(a, b, c, pa);
        let middle = self.jac_middle(a, b, c);
        let right = self.jac_right(a, b, c, pb);

        let mut defect = left;
        // lhs - rhs = left + (-1)^{p(a)} middle - (-1)^{(p(a)+1)(p(b)+1)} right.
        for (key, e) in middle.iter() {
            let term = if pa == 1 { e.neg() } else { e.clone() };
            defect.add_term(*key, term);
        }
        let sign_right = ((pa + 1) % 2) * ((pb + 1) % 2) == 1;
        for (key, e) in right.iter() {
            let term = if sign_right { e.neg() } else { e.clone() };
            defect.add_term(*key, term.neg());
        }
        Ok(defect)
    }
}
