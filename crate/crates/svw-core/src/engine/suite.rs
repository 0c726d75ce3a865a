//! The lambda-calculus axiom suite: skew-symmetry, Jacobi, Wick,
//! quasi-commutativity/associativity, confluence of canonicalization, and
//! weight/charge bookkeeping, all checked exactly over a given sector.

use super::algebra::{factorial, Algebra};
use super::expr::{DerivGen, Expression, Family, KPoly, Monomial};
use super::raw::{raw_of_expression, RawTerm};
use crate::lca::LambdaPoly;
use crate::rat;
use crate::report::Report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sample a random atom (derivative order up to `max_d`).
pub fn rand_atom<R: Rng>(alg: &Algebra, rng: &mut R, max_d: u8) -> DerivGen {
    let atoms = alg.table.atoms();
    loop {
        let g = atoms[rng.gen_range(0..atoms.len())];
        if g.fam == Family::Dummy {
            continue;
        }
        return DerivGen {
            g,
            d: rng.gen_range(0..=max_d),
        };
    }
}

/// Sample a random canonical word of length `1..=max_len`.
pub fn rand_word<R: Rng>(alg: &Algebra, rng: &mut R, max_len: usize, max_d: u8) -> Monomial {
    loop {
        let len = rng.gen_range(1..=max_len);
        let mut w: Vec<DerivGen> = (0..len).map(|_| rand_atom(alg, rng, max_d)).collect();
        w.sort();
        let m = Monomial(w);
        if m.is_canonical() {
            return m;
        }
    }
}

fn mono_expr(m: &Monomial) -> Expression {
    Expression::mono(m.clone(), KPoly::one())
}

/// Sample a random raw term tree of bounded depth.
pub fn rand_raw<R: Rng>(alg: &Algebra, rng: &mut R, depth: u32) -> RawTerm {
    if depth == 0 {
        return RawTerm::Atom(rand_atom(alg, rng, 1));
    }
    match rng.gen_range(0..6) {
        0 | 1 => RawTerm::No(
            Box::new(rand_raw(alg, rng, depth - 1)),
            Box::new(rand_raw(alg, rng, depth - 1)),
        ),
        2 => RawTerm::SDeriv(Box::new(rand_raw(alg, rng, depth - 1))),
        3 => RawTerm::Sum(vec![
            rand_raw(alg, rng, depth - 1),
            rand_raw(alg, rng, depth - 1),
        ]),
        4 => RawTerm::Scaled(
            KPoly::k_pow(rat(rng.gen_range(-3..=3i64)), rng.gen_range(0..=1)),
            Box::new(rand_raw(alg, rng, depth - 1)),
        ),
        _ => RawTerm::Atom(rand_atom(alg, rng, 1)),
    }
}

impl Algebra {
    /// The non-commutative Wick formula assembled literally from public
    /// operations, for comparison against the engine's bracket:
    /// `[x_Lambda :bc:] = sum_{k>=0} (lambda^k/k!) ([x_Lambda b]_{(k-1|1)} c)
    ///  + (-1)^{(p(x)+1)p(b)} :b [x_Lambda c]:`.
    pub fn wick_formula(
        &self,
        x: &Expression,
        b: DerivGen,
        c: &Expression,
    ) -> crate::Result<LambdaPoly> {
        let px = x.parity()?;
        let b_expr = mono_expr(&Monomial::atom(b));
        let mut out = LambdaPoly::zero();
        let p_xb = self.bracket(x, &b_expr);
        for ((j0, j1), e) in p_xb.iter() {
            out.add_term(*j0, *j1, self.nomul(e, c));
            let q = self.bracket(e, c);
            for ((m, m1), f) in q.iter() {
                if *m1 != 1 {
                    continue;
                }
                out.add_term(j0 + m + 1, *j1, f.scale(&(rat(1) / rat(*m as i64 + 1))));
            }
        }
        let p_xc = self.bracket(x, c);
        let base_sign = ((px + 1) % 2) * b.parity() == 1;
        for ((j0, j1), e) in p_xc.iter() {
            let koszul = *j1 == 1 && b.parity() == 1;
            let neg = base_sign ^ koszul;
            let term = self.nomul(&b_expr, e);
            out.add_term(*j0, *j1, if neg { term.neg() } else { term });
        }
        Ok(out)
    }

    /// Quasi-commutativity defect from public operations:
    /// `:XY: - (-1)^{p(X)p(Y)} :YX:
    ///  = (-1)^{p(X)p(Y)} sum_{j>=1} ((-T)^j/j!) (Y_{(j-1|1)} X)`.
    pub fn quasi_comm_formula(&self, x: &Expression, y: &Expression) -> crate::Result<Expression> {
        let sign = if x.parity()? * y.parity()? == 1 { rat(-1) } else { rat(1) };
        let p = self.bracket(y, x);
        let mut out = Expression::zero();
        for ((m, m1), e) in p.iter() {
            if *m1 != 1 {
                continue;
            }
            let j = m + 1;
            let c = sign.clone()
                * rat(if j % 2 == 1 { -1 } else { 1 })
                * (factorial(*m) / factorial(j));
            out.add_assign(&self.t_pow(e, j).scale(&c));
        }
        Ok(out)
    }

    /// Quasi-associativity defect from public operations:
    /// `::XY:Z: - :X(:YZ:):
    ///  = sum_{j>=0} X_{(-2-j|1)}(Y_{(j|1)}Z)
    ///  + (-1)^{p(X)p(Y)} sum_{j>=0} Y_{(-2-j|1)}(X_{(j|1)}Z)`.
    pub fn quasi_assoc_formula(
        &self,
        x: &Expression,
        y: &Expression,
        z: &Expression,
    ) -> crate::Result<Expression> {
        let sign = if x.parity()? * y.parity()? == 1 { rat(-1) } else { rat(1) };
        let mut out = Expression::zero();
        let p_yz = self.bracket(y, z);
        for ((j, j1), e) in p_yz.iter() {
            if *j1 != 1 {
                continue;
            }
            let prod = self.nth_product(x, -2 - *j as i64, 1, &e.scale(&factorial(*j)))?;
            out.add_assign(&prod);
        }
        let p_xz = self.bracket(x, z);
        for ((j, j1), e) in p_xz.iter() {
            if *j1 != 1 {
                continue;
            }
            let prod = self.nth_product(y, -2 - *j as i64, 1, &e.scale(&factorial(*j)))?;
            out.add_assign(&prod.scale(&sign));
        }
        Ok(out)
    }
}

fn fmt_poly(p: &LambdaPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.iter()
        .map(|((j0, j1), e)| format!("({j0},{j1}): {}", crate::exprio::print(e)))
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Run the axiom suite for one sector.
///
/// `trials` controls every randomized family (Wick triples, quasi-products,
/// confluence shuffles); `seed` makes them reproducible.
pub fn axiom_suite(alg: &Algebra, seed: u64, trials: u32) -> Report {
    let mut report = Report::default();
    let atoms: Vec<DerivGen> = alg
        .table
        .atoms()
        .iter()
        .filter(|g| g.fam != Family::Dummy)
        .map(|g| DerivGen::plain(*g))
        .collect();

    report.check("table_skew_consistency", || {
        for &g in alg.table.atoms() {
            for &h in alg.table.atoms() {
                let ab = alg.table.base_bracket(g, h);
                let ba = alg.table.base_bracket(h, g);
                let via_skew = alg.skew_transform(
                    &ab,
                    DerivGen::plain(g).parity(),
                    DerivGen::plain(h).parity(),
                );
                if via_skew != ba {
                    return Err(format!(
                        "entry [{g:?}, {h:?}]: skew transform gives {} but table holds {}",
                        fmt_poly(&via_skew),
                        fmt_poly(&ba)
                    ));
                }
            }
        }
        Ok(Some(format!("{} atoms", alg.table.atoms().len())))
    });

    report.check("skew_involution_table", || {
        for (&(g, h), p) in alg.table.iter_entries() {
            let pg = DerivGen::plain(g).parity();
            let ph = DerivGen::plain(h).parity();
            let twice = alg.skew_transform(&alg.skew_transform(p, pg, ph), ph, pg);
            if twice != *p {
                return Err(format!(
                    "entry [{g:?}, {h:?}]: applying the skew transform twice gives {} instead of {}",
                    fmt_poly(&twice),
                    fmt_poly(p)
                ));
            }
        }
        Ok(None)
    });

    report.check("skew_involution_operator", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157);
        for _ in 0..trials.min(50) {
            let w = rand_word(alg, &mut rng, 2, 1);
            let mut p = LambdaPoly::zero();
            p.add_term(rng.gen_range(0..2), rng.gen_range(0..2), mono_expr(&w));
            let pa = rng.gen_range(0..2u8);
            let pb = rng.gen_range(0..2u8);
            let twice = alg.skew_transform(&alg.skew_transform(&p, pa, pb), pb, pa);
            if twice != p {
                return Err(format!(
                    "double skew transform moved {} to {}",
                    fmt_poly(&p),
                    fmt_poly(&twice)
                ));
            }
        }
        Ok(None)
    });

    report.check("skew_symmetry_brackets", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        for _ in 0..trials.min(60) {
            let u = rand_word(alg, &mut rng, 2, 1);
            let v = rand_word(alg, &mut rng, 2, 1);
            let xu = mono_expr(&u);
            let xv = mono_expr(&v);
            let uv = alg.bracket(&xu, &xv);
            let vu = alg.bracket(&xv, &xu);
            let via_skew = alg.skew_transform(&uv, u.parity(), v.parity());
            if via_skew != vu {
                return Err(format!(
                    "[{}, {}]: skew of forward bracket {} != reverse bracket {}",
                    crate::exprio::print(&xu),
                    crate::exprio::print(&xv),
                    fmt_poly(&via_skew),
                    fmt_poly(&vu)
                ));
            }
        }
        Ok(None)
    });

    report.check("sesquilinearity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x53);
        for _ in 0..trials.min(60) {
            let u = rand_word(alg, &mut rng, 2, 1);
            let v = rand_word(alg, &mut rng, 2, 1);
            let xu = mono_expr(&u);
            let xv = mono_expr(&v);
            let base = alg.bracket(&xu, &xv);
            let left = alg.bracket(&alg.s_derive(&xu), &xv);
            if left != base.chi_mul() {
                return Err(format!(
                    "[S{}, {}] = {} but chi[.,.] = {}",
                    crate::exprio::print(&xu),
                    crate::exprio::print(&xv),
                    fmt_poly(&left),
                    fmt_poly(&base.chi_mul())
                ));
            }
            let right = alg.bracket(&xu, &alg.s_derive(&xv));
            let expect = {
                let sc = alg.apply_s_plus_chi(&base);
                if u.parity() == 1 {
                    sc
                } else {
                    sc.neg()
                }
            };
            if right != expect {
                return Err(format!(
                    "[{}, S{}] = {} but -(-1)^p (S+chi)[.,.] = {}",
                    crate::exprio::print(&xu),
                    crate::exprio::print(&xv),
                    fmt_poly(&right),
                    fmt_poly(&expect)
                ));
            }
        }
        Ok(None)
    });

    report.check("jacobi", || {
        let mut count = 0u64;
        if alg.n() == 1 {
            for a in &atoms {
                for b in &atoms {
                    for c in &atoms {
                        let defect = alg
                            .jacobi_defect(
                                &mono_expr(&Monomial::atom(*a)),
                                &mono_expr(&Monomial::atom(*b)),
                                &mono_expr(&Monomial::atom(*c)),
                            )
                            .map_err(|e| e.to_string())?;
                        if !defect.is_zero() {
                            return Err(format!(
                                "defect at triple ({a:?}, {b:?}, {c:?}) has {} nonzero keys",
                                defect.iter().count()
                            ));
                        }
                        count += 1;
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1ac0b1);
        let sampled = if alg.n() == 1 { trials.min(50) } else { trials };
        for _ in 0..sampled {
            let a = rand_word(alg, &mut rng, 1, 1);
            let b = rand_word(alg, &mut rng, 1, 1);
            let c = rand_word(alg, &mut rng, 2, 1);
            let defect = alg
                .jacobi_defect(&mono_expr(&a), &mono_expr(&b), &mono_expr(&c))
                .map_err(|e| e.to_string())?;
            if !defect.is_zero() {
                return Err(format!(
                    "defect at random triple ({}, {}, {})",
                    crate::exprio::print(&mono_expr(&a)),
                    crate::exprio::print(&mono_expr(&b)),
                    crate::exprio::print(&mono_expr(&c))
                ));
            }
            count += 1;
        }
        Ok(Some(format!("{count} triples")))
    });

    report.check("wick_consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x71c4);
        for _ in 0..trials {
            let x = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let b = rand_atom(alg, &mut rng, 1);
            let c = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let lhs = alg.bracket(&x, &alg.nomul(&mono_expr(&Monomial::atom(b)), &c));
            let rhs = alg.wick_formula(&x, b, &c).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!(
                    "[{} _ :{} {}:]: engine {} vs formula {}",
                    crate::exprio::print(&x),
                    crate::exprio::print(&mono_expr(&Monomial::atom(b))),
                    crate::exprio::print(&c),
                    fmt_poly(&lhs),
                    fmt_poly(&rhs)
                ));
            }
        }
        Ok(Some(format!("{trials} triples")))
    });

    report.check("quasi_commutativity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9c0);
        for _ in 0..trials {
            let x = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let y = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let sign = if x.parity().unwrap() * y.parity().unwrap() == 1 {
                rat(-1)
            } else {
                rat(1)
            };
            let lhs = alg.nomul(&x, &y).sub(&alg.nomul(&y, &x).scale(&sign));
            let rhs = alg.quasi_comm_formula(&x, &y).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!(
                    "(:{x_}{y_}: - sign :{y_}{x_}:) = {} but formula gives {}",
                    crate::exprio::print(&lhs),
                    crate::exprio::print(&rhs),
                    x_ = crate::exprio::print(&x),
                    y_ = crate::exprio::print(&y),
                ));
            }
        }
        Ok(Some(format!("{trials} pairs")))
    });

    report.check("quasi_associativity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x45450);
        for _ in 0..trials {
            let x = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let y = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let z = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let lhs = alg
                .nomul(&alg.nomul(&x, &y), &z)
                .sub(&alg.nomul(&x, &alg.nomul(&y, &z)));
            let rhs = alg
                .quasi_assoc_formula(&x, &y, &z)
                .map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!(
                    "associator of ({}, {}, {}) = {} but formula gives {}",
                    crate::exprio::print(&x),
                    crate::exprio::print(&y),
                    crate::exprio::print(&z),
                    crate::exprio::print(&lhs),
                    crate::exprio::print(&rhs)
                ));
            }
        }
        Ok(Some(format!("{trials} triples")))
    });

    report.check("confluence_shuffles", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0f);
        for trial in 0..trials {
            let raw = rand_raw(alg, &mut rng, 3);
            let base = alg.canonicalize(&raw);
            let shuffled = alg.canonicalize_shuffled(&raw, &mut rng);
            if base != shuffled {
                return Err(format!(
                    "trial {trial}: schedules disagree: {} vs {}",
                    crate::exprio::print(&base),
                    crate::exprio::print(&shuffled)
                ));
            }
        }
        Ok(Some(format!("{trials} shuffles")))
    });

    report.check("canonicalize_idempotent", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1d3);
        for _ in 0..trials.min(60) {
            let raw = rand_raw(alg, &mut rng, 3);
            let once = alg.canonicalize(&raw);
            let twice = alg.canonicalize(&raw_of_expression(&once));
            if once != twice {
                return Err(format!(
                    "canonical form not fixed: {} vs {}",
                    crate::exprio::print(&once),
                    crate::exprio::print(&twice)
                ));
            }
            once.debug_check_canonical();
        }
        Ok(None)
    });

    report.check("nth_product_conventions", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x17);
        for _ in 0..trials.min(60) {
            let x = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            let y = mono_expr(&rand_word(alg, &mut rng, 2, 1));
            // (-1|1): the normally-ordered product.
            let a = alg.nth_product(&x, -1, 1, &y).map_err(|e| e.to_string())?;
            if a != alg.nomul(&x, &y) {
                return Err("(-1|1)-product differs from :xy:".into());
            }
            // (-2|1): :(Tx)y:.
            let b = alg.nth_product(&x, -2, 1, &y).map_err(|e| e.to_string())?;
            if b != alg.nomul(&alg.t_derive(&x), &y) {
                return Err("(-2|1)-product differs from :(Tx)y:".into());
            }
            // (-1|0): :(Sx)y:.
            let c = alg.nth_product(&x, -1, 0, &y).map_err(|e| e.to_string())?;
            if c != alg.nomul(&alg.s_derive(&x), &y) {
                return Err("(-1|0)-product differs from :(Sx)y:".into());
            }
            // Non-negative products match bracket coefficients with j0!.
            let p = alg.bracket(&x, &y);
            if let Some(j0) = p.max_j0() {
                let got = alg
                    .nth_product(&x, j0 as i64, 1, &y)
                    .map_err(|e| e.to_string())?;
                if got != p.get(j0, 1).scale(&factorial(j0)) {
                    return Err("(j0|1)-product differs from j0! * coefficient".into());
                }
            }
            if alg.nth_product(&x, 0, 2, &y).is_ok() {
                return Err("chi-degree 2 was not rejected".into());
            }
        }
        Ok(None)
    });

    report.check("weight_charge_bookkeeping", || {
        for (&(g, h), p) in alg.table.iter_entries() {
            let wg = DerivGen::plain(g).weight2();
            let wh = DerivGen::plain(h).weight2();
            let cg = g.charge();
            let ch = h.charge();
            for ((j0, j1), e) in p.iter() {
                let expect_w = wg + wh - 2 * (*j0 as i64) - (*j1 as i64) - 1;
                match e.weight2() {
                    Ok(w) if w == expect_w || e.is_zero() => {}
                    Ok(w) => {
                        return Err(format!(
                            "entry [{g:?},{h:?}] key ({j0},{j1}): weight {w}/2, expected {expect_w}/2"
                        ))
                    }
                    Err(err) => return Err(err.to_string()),
                }
                match e.charge() {
                    Ok(c) if c == cg + ch => {}
                    Ok(c) => {
                        return Err(format!(
                            "entry [{g:?},{h:?}] key ({j0},{j1}): charge {c}, expected {}",
                            cg + ch
                        ))
                    }
                    Err(err) => return Err(err.to_string()),
                }
            }
        }
        Ok(None)
    });

    report.check("operator_algebra", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0b);
        for _ in 0..trials.min(40) {
            let w = rand_word(alg, &mut rng, 2, 1);
            let mut p = LambdaPoly::zero();
            p.add_term(rng.gen_range(0..2), rng.gen_range(0..2), mono_expr(&w));
            // S^2 = T.
            if alg.s_op(&alg.s_op(&p)) != alg.t_op(&p) {
                return Err("S^2 != T on a lambda-polynomial".into());
            }
            // chi^2 = -lambda.
            if p.chi_mul().chi_mul() != p.lambda_mul(1).neg() {
                return Err("chi^2 != -lambda".into());
            }
            // {S, chi} = 2 lambda.
            let anti = alg.s_op(&p.chi_mul()).add(&alg.s_op(&p).chi_mul());
            if anti != p.lambda_mul(1).scale(&rat(2)) {
                return Err("{S, chi} != 2 lambda".into());
            }
        }
        Ok(None)
    });

    report
}
