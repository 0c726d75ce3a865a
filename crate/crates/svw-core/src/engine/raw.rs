//! Raw (non-canonical) term trees and canonicalization.
//!
//! [`RawTerm`] is the input shape for the canonicalizer and the parser:
//! arbitrary nestings of sums, scalar multiples, normally-ordered pairs and
//! odd derivatives of generator symbols. [`Algebra::canonicalize`] reduces a
//! tree to the unique canonical [`Expression`].
//!
//! [`Algebra::canonicalize_shuffled`] evaluates the same tree under a
//! randomized reduction schedule: normally-ordered words are rebuilt by
//! splitting at random positions using the quasi-associativity identity for
//! composite factors. Agreement with the deterministic schedule over many
//! seeds is the confluence evidence for the rewrite system.

use super::algebra::{factorial, Algebra};
use super::expr::{DerivGen, Expression, KPoly, Monomial};
use crate::rat;
use rand::Rng;

/// A not-necessarily-canonical term tree.
#[derive(Clone, Debug)]
pub enum RawTerm {
    /// A derived generator symbol.
    Atom(DerivGen),
    /// A scalar multiple of the vacuum.
    Scalar(KPoly),
    /// Normally-ordered product `:left right:` with explicit nesting.
    No(Box<RawTerm>, Box<RawTerm>),
    /// Odd derivative `S(inner)`.
    SDeriv(Box<RawTerm>),
    /// Sum of subterms.
    Sum(Vec<RawTerm>),
    /// Scalar multiple of a subterm.
    Scaled(KPoly, Box<RawTerm>),
}

impl RawTerm {
    /// Right-nested normally-ordered product of a list of factors.
    pub fn word(mut factors: Vec<RawTerm>) -> RawTerm {
        match factors.len() {
            0 => RawTerm::Scalar(KPoly::one()),
            1 => factors.pop().unwrap(),
            _ => {
                let mut acc = factors.pop().unwrap();
                while let Some(f) = factors.pop() {
                    acc = RawTerm::No(Box::new(f), Box::new(acc));
                }
                acc
            }
        }
    }
}

/// Encode a canonical expression as a raw tree (used to test idempotence of
/// canonicalization).
pub fn raw_of_expression(e: &Expression) -> RawTerm {
    let mut parts = Vec::new();
    for (m, c) in e.iter() {
        let word = RawTerm::word(m.0.iter().map(|g| RawTerm::Atom(*g)).collect());
        parts.push(RawTerm::Scaled(c.clone(), Box::new(word)));
    }
    RawTerm::Sum(parts)
}

impl Algebra {
    /// Reduce a raw term tree to canonical form.
    pub fn canonicalize(&self, t: &RawTerm) -> Expression {
        match t {
            RawTerm::Atom(g) => Expression::mono(Monomial::atom(*g), KPoly::one()),
            RawTerm::Scalar(c) => Expression::scalar(c.clone()),
            RawTerm::No(a, b) => self.nomul(&self.canonicalize(a), &self.canonicalize(b)),
            RawTerm::SDeriv(a) => self.s_derive(&self.canonicalize(a)),
            RawTerm::Sum(parts) => {
                let mut out = Expression::zero();
                for p in parts {
                    out.add_assign(&self.canonicalize(p));
                }
                out
            }
            RawTerm::Scaled(c, a) => self.canonicalize(a).scale_k(c),
        }
    }

    /// Reduce a raw term tree under a randomized schedule; the result must
    /// equal [`Algebra::canonicalize`] on the same input.
    pub fn canonicalize_shuffled<R: Rng>(&self, t: &RawTerm, rng: &mut R) -> Expression {
        match t {
            RawTerm::Atom(g) => Expression::mono(Monomial::atom(*g), KPoly::one()),
            RawTerm::Scalar(c) => Expression::scalar(c.clone()),
            RawTerm::No(a, b) => {
                let ea = self.canonicalize_shuffled(a, rng);
                let eb = self.canonicalize_shuffled(b, rng);
                self.nomul_shuffled(&ea, &eb, rng)
            }
            RawTerm::SDeriv(a) => {
                let e = self.canonicalize_shuffled(a, rng);
                self.s_derive(&e)
            }
            RawTerm::Sum(parts) => {
                let mut order: Vec<usize> = (0..parts.len()).collect();
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                let mut out = Expression::zero();
                for i in order {
                    out.add_assign(&self.canonicalize_shuffled(&parts[i], rng));
                }
                out
            }
            RawTerm::Scaled(c, a) => self.canonicalize_shuffled(a, rng).scale_k(c),
        }
    }

    /// Normally-ordered product evaluated by splitting left words at random
    /// positions, using quasi-associativity for composite factors:
    /// `:(AB)C: = :A(:BC:): + sum_j A_{(-2-j|1)}(B_{(j|1)}C)
    ///  + (-1)^{p(A)p(B)} sum_j B_{(-2-j|1)}(A_{(j|1)}C)`.
    fn nomul_shuffled<R: Rng>(&self, x: &Expression, y: &Expression, rng: &mut R) -> Expression {
        let mut out = Expression::zero();
        for (u, cu) in x.iter() {
            for (v, cv) in y.iter() {
                out.add_assign(&self.nomul_mono_shuffled(u, v, rng).scale_k(&cu.mul(cv)));
            }
        }
        out
    }

    fn nomul_mono_shuffled<R: Rng>(
        &self,
        u: &Monomial,
        v: &Monomial,
        rng: &mut R,
    ) -> Expression {
        if u.len() < 2 {
            // No split freedom; fall back to the deterministic product.
            return self.nomul(
                &Expression::mono(u.clone(), KPoly::one()),
                &Expression::mono(v.clone(), KPoly::one()),
            );
        }
        let t = rng.gen_range(1..u.len());
        let a = Monomial(u.0[..t].to_vec());
        let b = Monomial(u.0[t..].to_vec());
        let a_expr = Expression::mono(a.clone(), KPoly::one());
        let b_expr = Expression::mono(b.clone(), KPoly::one());
        let v_expr = Expression::mono(v.clone(), KPoly::one());

        // Main term :A (:BC:): with the inner product also shuffled.
        let bc = self.nomul_mono_shuffled(&b, v, rng);
        let mut out = self.nomul_shuffled(&a_expr, &bc, rng);

        // Quasi-associativity corrections for composite A and B. Together
        // with the main term these assemble ::AB:C:.
        let p_bv = self.bracket(&b_expr, &v_expr);
        for ((j, j1), e) in p_bv.iter() {
            if *j1 != 1 {
                continue;
            }
            // A_{(-2-j|1)}(j! e) = :(T^{j+1}A/(j+1)!)(j! e):
            let ta = self.t_pow(&a_expr, j + 1);
            let c = factorial(*j) / factorial(j + 1);
            out.add_assign(&self.nomul(&ta, e).scale(&c));
        }
        let sign = if a.parity() * b.parity() == 1 { rat(-1) } else { rat(1) };
        let p_av = self.bracket(&a_expr, &v_expr);
        for ((j, j1), e) in p_av.iter() {
            if *j1 != 1 {
                continue;
            }
            let tb = self.t_pow(&b_expr, j + 1);
            let c = sign.clone() * (factorial(*j) / factorial(j + 1));
            out.add_assign(&self.nomul(&tb, e).scale(&c));
        }

        // The word u denotes the right-nested product, which differs from
        // :AB: by re-association defects once the split is past the head:
        // :uC: = ::AB:C: - :(:AB: - u)C:. The defect :AB: - u only has
        // words shorter than u, so the recursion terminates.
        let mut d = self.nomul(&a_expr, &b_expr);
        d.add_assign(&Expression::mono(u.clone(), KPoly::one()).neg());
        if !d.is_zero() {
            out.add_assign(&self.nomul_shuffled(&d, &v_expr, rng).neg());
        }
        out
    }
}
