//! The lambda-bracket engine: extends a defining atom table to arbitrary
//! canonical expressions.
//!
//! All rewriting is driven by four identities of SUSY lambda-calculus:
//!
//! * sesquilinearity, to strip odd derivatives off bracket arguments;
//! * skew-symmetry, to reverse bracket orientation;
//! * the non-commutative Wick formula, to open normally-ordered words on
//!   the right;
//! * quasi-commutativity / quasi-associativity, to reorder words into the
//!   canonical sorted form.
//!
//! Negative products are normalized as `X_{(-1|1)}Y = :XY:`,
//! `X_{(-2-m|1)}Y = :(T^{m+1}X/(m+1)!) Y:` and
//! `X_{(-1-m|0)}Y = :((T^m S/m!) X) Y:`.

use super::expr::{DerivGen, Expression, Family, Generator, KPoly, Monomial};
use crate::lca::{BracketTable, LambdaPoly};
use crate::{rat, ratio, Error, Rat, Result};
use std::collections::HashMap;
use std::sync::Mutex;

/// A bracket table together with the memo caches that make the recursive
/// evaluation practical. All public expression operations live here.
pub struct Algebra {
    /// The defining brackets of the sector's atoms.
    pub table: BracketTable,
    memo: Mutex<HashMap<(Monomial, Monomial), LambdaPoly>>,
}

impl Algebra {
    /// Wrap a defining table.
    pub fn new(table: BracketTable) -> Self {
        Algebra {
            table,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Rank parameter of the underlying gl(n+1|n).
    pub fn n(&self) -> u32 {
        self.table.n
    }

    // ------------------------------------------------------------------
    // Derivatives.
    // ------------------------------------------------------------------

    /// The odd derivative `S`, an odd derivation of the normally-ordered
    /// product: `S(:ab:) = :S(a)b: + (-1)^{p(a)} :a S(b):`.
    pub fn s_derive(&self, x: &Expression) -> Expression {
        let mut out = Expression::zero();
        for (m, c) in x.iter() {
            let mut sign = rat(1);
            for t in 0..m.len() {
                let mut w = m.0.clone();
                w[t].d += 1;
                out.add_assign(&self.canonicalize_word(&w).scale(&sign).scale_k(c));
                if m.0[t].parity() == 1 {
                    sign = -sign;
                }
            }
        }
        out
    }

    /// The even derivative `T = S^2`.
    pub fn t_derive(&self, x: &Expression) -> Expression {
        self.s_derive(&self.s_derive(x))
    }

    /// `T^m x`.
    pub fn t_pow(&self, x: &Expression, m: u32) -> Expression {
        let mut out = x.clone();
        for _ in 0..m {
            out = self.t_derive(&out);
        }
        out
    }

    /// Apply an odd derivation to a canonical expression, given its images
    /// on plain atoms. The derivation satisfies `D(:AB:) = :D(A)B: +
    /// (-1)^{p(A)} :A D(B):` and anticommutes with the odd derivative, so
    /// `D(S^d g) = (-1)^d S^d(D(g))`.
    pub fn apply_odd_derivation(
        &self,
        img: &mut dyn FnMut(Generator) -> Expression,
        x: &Expression,
    ) -> Expression {
        let mut out = Expression::zero();
        for (m, c) in x.iter() {
            out.add_assign(&self.odd_derivation_word(img, &m.0).scale_k(c));
        }
        out
    }

    fn odd_derivation_word(
        &self,
        img: &mut dyn FnMut(Generator) -> Expression,
        w: &[DerivGen],
    ) -> Expression {
        if w.is_empty() {
            return Expression::zero();
        }
        let head = w[0];
        let rest = &w[1..];
        let mut head_img = img(head.g);
        for _ in 0..head.d {
            head_img = self.s_derive(&head_img);
        }
        if head.d % 2 == 1 {
            head_img = head_img.neg();
        }
        let rest_expr = Expression::mono(Monomial(rest.to_vec()), KPoly::one());
        let mut out = self.nomul(&head_img, &rest_expr);
        let mut tail = self.odd_derivation_word(img, rest);
        if head.parity() == 1 {
            tail = tail.neg();
        }
        let head_expr = Expression::mono(Monomial::atom(head), KPoly::one());
        out.add_assign(&self.nomul(&head_expr, &tail));
        out
    }

    // ------------------------------------------------------------------
    // Normally-ordered products and canonicalization of words.
    // ------------------------------------------------------------------

    /// Normally-ordered product `:xy:` of canonical expressions, returned
    /// in canonical form.
    pub fn nomul(&self, x: &Expression, y: &Expression) -> Expression {
        let mut out = Expression::zero();
        for (u, cu) in x.iter() {
            for (v, cv) in y.iter() {
                out.add_assign(&self.nomul_mono(u, v).scale_k(&cu.mul(cv)));
            }
        }
        out
    }

    /// `:uv:` for canonical words `u`, `v` (coefficient one).
    fn nomul_mono(&self, u: &Monomial, v: &Monomial) -> Expression {
        if u.is_vacuum() {
            return Expression::mono(v.clone(), KPoly::one());
        }
        if v.is_vacuum() {
            return Expression::mono(u.clone(), KPoly::one());
        }
        if u.len() == 1 {
            return self.insert_atom(u.0[0], &Expression::mono(v.clone(), KPoly::one()));
        }
        // u = g (x) u'. Quasi-associativity with a = g, b = u', c = v:
        // :(g(x)u') v: = :g (:u'v:): + sum_j g_{(-2-j|1)}(u'_{(j|1)}v)
        //              + (-1)^{p(g)p(u')} sum_j u'_{(-2-j|1)}(g_{(j|1)}v).
        let g = u.0[0];
        let u_tail = Monomial(u.0[1..].to_vec());
        let mut out = self.insert_atom(g, &self.nomul_mono(&u_tail, v));

        let p1 = self.bracket_words(&u_tail, v);
        for ((j, j1), e) in p1.iter() {
            if *j1 != 1 {
                continue;
            }
            // g_{(-2-j|1)} (j! e) = :(T^{j+1}g/(j+1)!) (j! e):
            let mut gd = g;
            gd.d += 2 * (*j as u8 + 1);
            let c = factorial(*j) / factorial(j + 1);
            out.add_assign(&self.insert_atom(gd, e).scale(&c));
        }

        let p2 = self.bracket_words(&Monomial::atom(g), v);
        let sign = if g.parity() * u_tail.parity() == 1 { rat(-1) } else { rat(1) };
        for ((j, j1), e) in p2.iter() {
            if *j1 != 1 {
                continue;
            }
            // u'_{(-2-j|1)} (j! e) = :(T^{j+1}u'/(j+1)!) (j! e):
            let tail_t = self.t_pow(
                &Expression::mono(u_tail.clone(), KPoly::one()),
                *j + 1,
            );
            let c = factorial(*j) / factorial(j + 1) * sign.clone();
            out.add_assign(&self.nomul(&tail_t, e).scale(&c));
        }
        out
    }

    /// Prepend one symbol to a canonical expression, restoring canonical
    /// order via quasi-commutativity and quasi-associativity.
    fn insert_atom(&self, x: DerivGen, e: &Expression) -> Expression {
        let mut out = Expression::zero();
        for (v, c) in e.iter() {
            out.add_assign(&self.insert_atom_mono(x, v).scale_k(c));
        }
        out
    }

    fn insert_atom_mono(&self, x: DerivGen, v: &Monomial) -> Expression {
        if v.is_vacuum() {
            return Expression::mono(Monomial::atom(x), KPoly::one());
        }
        let h = v.0[0];
        if x < h || (x == h && x.parity() == 0) {
            let mut w = Vec::with_capacity(v.len() + 1);
            w.push(x);
            w.extend_from_slice(&v.0);
            return Expression::mono(Monomial(w), KPoly::one());
        }
        let tail = Monomial(v.0[1..].to_vec());
        if x == h {
            // Odd square: :x(:xr:): = (1/2):QC(x,x)r: - QA(x,x,r).
            let qc = self.quasi_comm_defect(x, x);
            let mut out = self
                .nomul(&qc, &Expression::mono(tail.clone(), KPoly::one()))
                .scale(&ratio(1, 2));
            out.add_assign(&self.quasi_assoc_defect(x, x, &tail).neg());
            return out;
        }
        // Deep swap x > h:
        // :x(:hr:): = (-1)^{p(x)p(h)} [ :h(:xr:): + QA(h,x,r) ]
        //           + :QC(x,h)r: - QA(x,h,r).
        let sign = if x.parity() * h.parity() == 1 { rat(-1) } else { rat(1) };
        let mut out = self.insert_atom(h, &self.insert_atom_mono(x, &tail));
        out.add_assign(&self.quasi_assoc_defect(h, x, &tail));
        out = out.scale(&sign);
        let qc = self.quasi_comm_defect(x, h);
        out.add_assign(&self.nomul(&qc, &Expression::mono(tail.clone(), KPoly::one())));
        out.add_assign(&self.quasi_assoc_defect(x, h, &tail).neg());
        out
    }

    /// Quasi-commutativity defect
    /// `QC(a,b) = :ab: - (-1)^{p(a)p(b)} :ba:
    ///          = (-1)^{p(a)p(b)} sum_{j>=1} ((-T)^j/j!) (b_{(j-1|1)}a)`.
    fn quasi_comm_defect(&self, a: DerivGen, b: DerivGen) -> Expression {
        let p = self.bracket_words(&Monomial::atom(b), &Monomial::atom(a));
        let sign = if a.parity() * b.parity() == 1 { rat(-1) } else { rat(1) };
        let mut out = Expression::zero();
        for ((m, j1), e) in p.iter() {
            if *j1 != 1 {
                continue;
            }
            // j = m+1: (-1)^j/j! T^j (m! e).
            let j = m + 1;
            let c = sign.clone()
                * rat(if j % 2 == 1 { -1 } else { 1 })
                * (factorial(*m) / factorial(j));
            out.add_assign(&self.t_pow(e, j).scale(&c));
        }
        out
    }

    /// Quasi-associativity defect
    /// `QA(a,b,r) = ::ab:r: - :a(:br:):
    ///  = sum_{j>=0} a_{(-2-j|1)}(b_{(j|1)}r)
    ///  + (-1)^{p(a)p(b)} sum_{j>=0} b_{(-2-j|1)}(a_{(j|1)}r)`
    /// for atomic `a`, `b` and a canonical word `r`.
    fn quasi_assoc_defect(&self, a: DerivGen, b: DerivGen, r: &Monomial) -> Expression {
        let mut out = Expression::zero();
        let p1 = self.bracket_words(&Monomial::atom(b), r);
        for ((j, j1), e) in p1.iter() {
            if *j1 != 1 {
                continue;
            }
            let mut ad = a;
            ad.d += 2 * (*j as u8 + 1);
            let c = factorial(*j) / factorial(j + 1);
            out.add_assign(&self.insert_atom(ad, e).scale(&c));
        }
        let sign = if a.parity() * b.parity() == 1 { rat(-1) } else { rat(1) };
        let p2 = self.bracket_words(&Monomial::atom(a), r);
        for ((j, j1), e) in p2.iter() {
            if *j1 != 1 {
                continue;
            }
            let mut bd = b;
            bd.d += 2 * (*j as u8 + 1);
            let c = sign.clone() * (factorial(*j) / factorial(j + 1));
            out.add_assign(&self.insert_atom(bd, e).scale(&c));
        }
        out
    }

    /// Canonicalize a bare word (not necessarily sorted) by right-to-left
    /// insertion.
    pub fn canonicalize_word(&self, w: &[DerivGen]) -> Expression {
        let mut acc = Expression::scalar(KPoly::one());
        for &g in w.iter().rev() {
            acc = self.insert_atom(g, &acc);
        }
        acc
    }

    // ------------------------------------------------------------------
    // Lambda-brackets.
    // ------------------------------------------------------------------

    /// The lambda-bracket `[x_Lambda y]` of canonical expressions.
    pub fn bracket(&self, x: &Expression, y: &Expression) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for (u, cu) in x.iter() {
            for (v, cv) in y.iter() {
                out.add_assign(&self.bracket_words(u, v).scale_k(&cu.mul(cv)));
            }
        }
        out
    }

    /// `[u_Lambda v]` for canonical words.
    fn bracket_words(&self, u: &Monomial, v: &Monomial) -> LambdaPoly {
        if u.is_vacuum() || v.is_vacuum() {
            return LambdaPoly::zero();
        }
        if let Some(hit) = self.memo.lock().unwrap().get(&(u.clone(), v.clone())) {
            return hit.clone();
        }
        let result = self.bracket_words_uncached(u, v);
        self.memo
            .lock()
            .unwrap()
            .insert((u.clone(), v.clone()), result.clone());
        result
    }

    fn bracket_words_uncached(&self, u: &Monomial, v: &Monomial) -> LambdaPoly {
        if u.len() == 1 && v.len() == 1 {
            return self.bracket_atoms(u.0[0], v.0[0]);
        }
        if v.len() >= 2 {
            return self.wick(u, v);
        }
        // u composite, v an atom: skew-symmetry.
        let p = self.bracket_words(v, u);
        self.skew_transform(&p, u.parity(), v.parity())
    }

    /// Atom-level bracket: strip derivatives by sesquilinearity, then look
    /// up the defining table.
    ///
    /// `[Sa_Lambda b] = chi [a_Lambda b]` and
    /// `[a_Lambda Sb] = -(-1)^{p(a)} (S + chi) [a_Lambda b]`.
    fn bracket_atoms(&self, x: DerivGen, y: DerivGen) -> LambdaPoly {
        if x.g.fam == Family::Dummy || y.g.fam == Family::Dummy {
            return LambdaPoly::zero();
        }
        if x.d > 0 {
            let mut x0 = x;
            x0.d -= 1;
            return self.bracket_words(&Monomial::atom(x0), &Monomial::atom(y)).chi_mul();
        }
        if y.d > 0 {
            let mut y0 = y;
            y0.d -= 1;
            let p = self.bracket_words(&Monomial::atom(x), &Monomial::atom(y0));
            let sc = self.apply_s_plus_chi(&p);
            return if x.parity() == 1 { sc } else { sc.neg() };
        }
        self.table.base_bracket(x.g, y.g)
    }

    /// Non-commutative Wick formula for `[u_Lambda :b c:]` with `b` the head
    /// atom of `v` and `c` its tail:
    /// `[u_Lambda :bc:] = sum_{k>=0} (lambda^k/k!) ([u_Lambda b]_{(k-1|1)} c)
    ///  + (-1)^{(p(u)+1)p(b)} :b [u_Lambda c]:`.
    fn wick(&self, u: &Monomial, v: &Monomial) -> LambdaPoly {
        let b = v.0[0];
        let c = Monomial(v.0[1..].to_vec());
        let c_expr = Expression::mono(c.clone(), KPoly::one());
        let mut out = LambdaPoly::zero();

        // First term: for each coefficient of [u_Lambda b], take its
        // products with c, in place under the chi of its key. The k=0
        // summand is the normally-ordered product; for k >= 1 only the
        // chi-degree-one products of [e_Lambda c] contribute, shifted by
        // lambda^k/k.
        let p_ab = self.bracket_words(u, &Monomial::atom(b));
        for ((j0, j1), e) in p_ab.iter() {
            out.add_term(*j0, *j1, self.nomul(e, &c_expr));
            let q = self.bracket(e, &c_expr);
            for ((m, m1), f) in q.iter() {
                if *m1 != 1 {
                    continue;
                }
                // lambda^{m+1}/(m+1)! * (m! f) = lambda^{m+1} f / (m+1).
                let scaled = f.scale(&ratio(1, *m as i64 + 1));
                out.add_term(j0 + m + 1, *j1, scaled);
            }
        }

        // Second term: :b [u_Lambda c]: with the Koszul sign for moving b
        // past u (as an odd bracket) and past the chi of each key.
        let p_uc = self.bracket_words(u, &c);
        let base_sign = ((u.parity() + 1) % 2) * b.parity() == 1;
        for ((j0, j1), e) in p_uc.iter() {
            let koszul = *j1 == 1 && b.parity() == 1;
            let neg = base_sign ^ koszul;
            let term = self.insert_atom(b, e);
            out.add_term(*j0, *j1, if neg { term.neg() } else { term });
        }
        out
    }

    // ------------------------------------------------------------------
    // Operators on lambda-polynomials.
    // ------------------------------------------------------------------

    /// Apply `S` to a lambda-polynomial value, using `{S, chi} = 2 lambda`:
    /// on `lambda^{j0} e` it gives `lambda^{j0} S(e)`; on
    /// `lambda^{j0} chi e` it gives `2 lambda^{j0+1} e - lambda^{j0} chi S(e)`.
    pub fn s_op(&self, p: &LambdaPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for ((j0, j1), e) in p.iter() {
            if *j1 == 0 {
                out.add_term(*j0, 0, self.s_derive(e));
            } else {
                out.add_term(j0 + 1, 0, e.scale(&rat(2)));
                out.add_term(*j0, 1, self.s_derive(e).neg());
            }
        }
        out
    }

    /// Apply `T = S^2` to every coefficient.
    pub fn t_op(&self, p: &LambdaPoly) -> LambdaPoly {
        p.map(|e| self.t_derive(e))
    }

    /// The operator `S + chi` used by sesquilinearity in the right slot.
    pub fn apply_s_plus_chi(&self, p: &LambdaPoly) -> LambdaPoly {
        self.s_op(p).add(&p.chi_mul())
    }

    /// Skew-symmetry transform: given `[a_Lambda b]` and the parities of
    /// `a`, `b`, produce `[b_Lambda a] = (-1)^{p(a)p(b)}
    /// sum ((-lambda-T)^{j0} (-chi-S)^{j1} / j0!) (a_{(j0|j1)} b)`.
    pub fn skew_transform(&self, p: &LambdaPoly, pa: u8, pb: u8) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for ((j0, j1), e) in p.iter() {
            let mut q = LambdaPoly::single(0, 0, e.clone());
            for _ in 0..*j1 {
                q = q.chi_mul().add(&self.s_op(&q)).neg();
            }
            for _ in 0..*j0 {
                q = q.lambda_mul(1).add(&self.t_op(&q)).neg();
            }
            out.add_assign(&q);
        }
        if pa * pb == 1 {
            out.neg()
        } else {
            out
        }
    }

    // ------------------------------------------------------------------
    // n-th products.
    // ------------------------------------------------------------------

    /// The `(j0|j1)`-th product `X_{(j0|j1)} Y`.
    ///
    /// For `j0 >= 0` this is `j0!` times the `(j0, j1)` bracket coefficient;
    /// negative `j0` yield normally-ordered products of derivatives.
    pub fn nth_product(&self, x: &Expression, j0: i64, j1: u8, y: &Expression) -> Result<Expression> {
        if j1 > 1 {
            return Err(Error::BadProduct(format!(
                "chi-degree j1 must be 0 or 1, got {j1}"
            )));
        }
        if j0 >= 0 {
            let p = self.bracket(x, y);
            return Ok(p.get(j0 as u32, j1).scale(&factorial(j0 as u32)));
        }
        if j1 == 1 {
            // X_{(-1|1)}Y = :XY:, X_{(-2-m|1)}Y = :(T^{m+1}X/(m+1)!)Y:.
            let m = (-j0 - 1) as u32;
            let tx = self.t_pow(x, m).scale(&(rat(1) / factorial(m)));
            Ok(self.nomul(&tx, y))
        } else {
            // X_{(-1-m|0)}Y = :((T^m S/m!)X)Y:.
            let m = (-j0 - 1) as u32;
            let sx = self.s_derive(x);
            let tx = self.t_pow(&sx, m).scale(&(rat(1) / factorial(m)));
            Ok(self.nomul(&tx, y))
        }
    }

    /// Clear the bracket memo (used by tests that compare fresh instances).
    pub fn clear_memo(&self) {
        self.memo.lock().unwrap().clear();
    }
}

/// Exact factorial as a rational.
pub fn factorial(m: u32) -> Rat {
    let mut f = rat(1);
    for i in 2..=m as i64 {
        f *= rat(i);
    }
    f
}
