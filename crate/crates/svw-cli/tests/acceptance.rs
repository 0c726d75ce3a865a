//! Acceptance checks: the golden rank-one generators, the differential
//! identities at ranks one and two, the structural theorems, the Miura
//! factorization, and byte-determinism of the `svw` binary. Prints one
//! pass/fail line per criterion; every comparison is bit-exact.

use std::process::Command;
use std::time::Instant;
use svw_core::brst::{complex, identity_suite};
use svw_core::engine::{axiom_suite, Algebra};
use svw_core::exprio;
use svw_core::lca::current_table;
use svw_core::liesuper::{principal_data, FormMode};
use svw_core::wgen::{golden_rank_one, strip_off_diagonal, w_context, w_table};
use svw_core::{Expression, Family, Generator, KPoly};

#[derive(Default)]
struct Criteria {
    lines: Vec<(bool, String)>,
}

impl Criteria {
    fn run(
        &mut self,
        label: &str,
        budget_ms: Option<u128>,
        f: impl FnOnce() -> Result<String, String>,
    ) {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_millis();
        let (mut pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let budget = match budget_ms {
            Some(b) => {
                if ms >= b {
                    pass = false;
                }
                format!(", budget {b} ms")
            }
            None => String::new(),
        };
        let status = if pass { "pass" } else { "FAIL" };
        self.lines
            .push((pass, format!("[{status}] {label}: {detail} ({ms} ms{budget})")));
    }
}

fn rat(n: i64) -> svw_core::Rat {
    svw_core::Rat::from_integer(n.into())
}

fn sign(e: i64) -> svw_core::Rat {
    if e.rem_euclid(2) == 1 {
        rat(-1)
    } else {
        rat(1)
    }
}

#[test]
fn acceptance_criteria() {
    let mut c = Criteria::default();

    c.run("1 rank-one golden generators", Some(5_000), || {
        let ctx = w_context(1, FormMode::Rescaled).map_err(|e| e.to_string())?;
        let ws = ctx.generators().map_err(|e| e.to_string())?;
        for (p, text) in golden_rank_one() {
            let expect = ctx
                .alg
                .canonicalize(&exprio::parse(text, 1).map_err(|e| e.to_string())?);
            if ws[p as usize] != expect {
                return Err(format!("W_{p} differs from the recorded closed form"));
            }
        }
        if ws[3] != Expression::scalar(KPoly::k_pow(rat(1), 3)) {
            return Err("W_3 is not the scalar k^3".into());
        }
        for (p, w) in ws.iter().enumerate() {
            let back = ctx
                .alg
                .canonicalize(&exprio::parse(&exprio::print(w), 1).map_err(|e| e.to_string())?);
            if &back != w {
                return Err(format!("parse(print(W_{p})) round trip failed"));
            }
        }
        Ok("W_0, W_1, W_2, W_3 bit-exact; print/parse round trip".into())
    });

    c.run("2 Q^2 = 0 on every generator, n in {1,2}", Some(60_000), || {
        use rand::SeedableRng;
        let mut atoms = 0usize;
        let mut words = 0usize;
        for n in [1u32, 2] {
            for mode in [FormMode::Rescaled, FormMode::Supertrace] {
                let cx = complex(n, mode).map_err(|e| e.to_string())?;
                for &g in cx.alg.table.atoms() {
                    let qq = cx.q(&cx.q(&Expression::gen(g)));
                    if !qq.is_zero() {
                        return Err(format!("Q^2 != 0 on {g:?} at n={n}"));
                    }
                    atoms += 1;
                }
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xACC2);
                for _ in 0..100 {
                    let w = svw_core::engine::suite::rand_word(&cx.alg, &mut rng, 3, 1);
                    let x = Expression::mono(w, KPoly::one());
                    if !cx.q(&cx.q(&x)).is_zero() {
                        return Err(format!("Q^2 != 0 on a random word at n={n}"));
                    }
                    let mut anti = cx.alg.s_derive(&cx.q(&x));
                    anti.add_assign(&cx.q(&cx.alg.s_derive(&x)));
                    if !anti.is_zero() {
                        return Err(format!(
                            "S(Q(x)) + Q(S(x)) != 0 on a random word at n={n}"
                        ));
                    }
                    words += 1;
                }
            }
        }
        Ok(format!(
            "{atoms} generator instances and {words} random monomials (with S Q = -Q S), both form modes"
        ))
    });

    c.run("3 Q(W_p) = 0, n in {1,2}", Some(930_000), || {
        let t1 = Instant::now();
        let ctx = w_context(1, FormMode::Rescaled).map_err(|e| e.to_string())?;
        let ws = ctx.generators().map_err(|e| e.to_string())?;
        for (p, w) in ws.iter().enumerate() {
            if !ctx.q_w(w).is_zero() {
                return Err(format!("Q(W_{p}) != 0 at n=1"));
            }
        }
        let t1 = t1.elapsed().as_millis();
        if t1 >= 30_000 {
            return Err(format!("n=1 closure took {t1} ms, budget 30000 ms"));
        }
        let t2 = Instant::now();
        let ctx = w_context(2, FormMode::Supertrace).map_err(|e| e.to_string())?;
        let ws = ctx.generators().map_err(|e| e.to_string())?;
        for (p, w) in ws.iter().enumerate() {
            if !ctx.q_w(w).is_zero() {
                return Err(format!("Q(W_{p}) != 0 at n=2"));
            }
        }
        let t2 = t2.elapsed().as_millis();
        if t2 >= 900_000 {
            return Err(format!("n=2 closure took {t2} ms, budget 900000 ms"));
        }
        Ok(format!(
            "n=1 in {t1} ms (budget 30000), n=2 under the supertrace form in {t2} ms (budget 900000)"
        ))
    });

    c.run("4 differential identity suite, n in {1,2}", None, || {
        let mut checks = 0usize;
        for n in [1u32, 2] {
            for mode in [FormMode::Rescaled, FormMode::Supertrace] {
                let report = identity_suite(n, mode, 0xACC4, 10);
                if let Some(item) = report.first_failure() {
                    return Err(format!(
                        "{} failed at n={n}: {}",
                        item.name,
                        item.detail.as_deref().unwrap_or("")
                    ));
                }
                checks += report.items.len();
            }
        }
        Ok(format!(
            "{checks} checks: d brackets, dressed currents, Q(J) closed form, both modes"
        ))
    });

    c.run("5 axiom suite with exhaustive Jacobi and 200 shuffles", Some(300_000), || {
        let pd = principal_data(1, FormMode::Rescaled).map_err(|e| e.to_string())?;
        let complex_alg = Algebra::new(current_table(&pd));
        let cx = complex(1, FormMode::Rescaled).map_err(|e| e.to_string())?;
        let w_alg = Algebra::new(w_table(&cx).map_err(|e| e.to_string())?);
        let mut checks = 0usize;
        for (name, alg) in [("complex", &complex_alg), ("w", &w_alg)] {
            let report = axiom_suite(alg, 0xACC5, 200);
            if let Some(item) = report.first_failure() {
                return Err(format!(
                    "{} failed in the {name} sector: {}",
                    item.name,
                    item.detail.as_deref().unwrap_or("")
                ));
            }
            checks += report.items.len();
        }
        Ok(format!("{checks} checks over both sectors"))
    });

    c.run("6 weights, leading terms, band structure, n in {1,2}", None, || {
        for n in [1u32, 2] {
            let ctx = w_context(n, FormMode::Rescaled).map_err(|e| e.to_string())?;
            let ws = ctx.generators().map_err(|e| e.to_string())?;
            let two_n = 2 * n as i64;
            for (p, w) in ws.iter().enumerate().take(two_n as usize + 1) {
                let p_i = p as i64;
                if w.weight2().map_err(|e| e.to_string())? != two_n + 1 - p_i {
                    return Err(format!("W_{p} does not have weight (2n+1-p)/2 at n={n}"));
                }
                let mut linear = Expression::zero();
                for (m, coeff) in w.iter() {
                    for dg in &m.0 {
                        if dg.g.fam != Family::JGen {
                            return Err(format!("W_{p} contains a non-J atom at n={n}"));
                        }
                        if dg.g.a as i64 - dg.g.b as i64 > two_n - p_i {
                            return Err(format!(
                                "W_{p} leaves the band i - j <= 2n - p at n={n}"
                            ));
                        }
                    }
                    if m.len() == 1 && m.0[0].d == 0 {
                        linear.add_term(m.clone(), coeff.clone());
                    }
                }
                let depth = two_n - p_i;
                let mut expect = Expression::zero();
                for l in 1..=(p_i + 1) {
                    expect.add_assign(
                        &Expression::gen(Generator::j((depth + l) as u8, l as u8))
                            .scale(&sign(depth * l))
                            .scale_k(&KPoly::k_pow(rat(1), p as u32)),
                    );
                }
                if linear != expect {
                    return Err(format!("W_{p} linear part mismatch at n={n}"));
                }
            }
        }
        Ok("weight(W_p) = (2n+1-p)/2, linear parts, band confinement".into())
    });

    c.run("7 Miura factorization, n in {1,2}", None, || {
        for n in [1u32, 2] {
            let ctx = w_context(n, FormMode::Rescaled).map_err(|e| e.to_string())?;
            let ws = ctx.generators().map_err(|e| e.to_string())?;
            let miura = ctx.miura_generators().map_err(|e| e.to_string())?;
            for (p, w) in ws.iter().enumerate() {
                if strip_off_diagonal(w) != miura[p] {
                    return Err(format!(
                        "diagonal part of W_{p} differs from the Miura coefficient at n={n}"
                    ));
                }
            }
        }
        Ok("diagonal parts equal the (kS +/- J_ii) product coefficients, all p".into())
    });

    c.run("8 byte-identical CLI output under fixed seed", None, || {
        let bin = env!("CARGO_BIN_EXE_svw");
        let verify_args = [
            "verify",
            "--n",
            "2",
            "--suite",
            "walgebra",
            "--seed",
            "7",
            "--form-mode",
            "supertrace",
        ];
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = Command::new(bin)
                .args(verify_args)
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("verify run failed with {:?}", out.status));
            }
            outputs.push(out.stdout);
        }
        if outputs[0] != outputs[1] {
            return Err("verify stdout differs across thread counts".into());
        }
        let mut gens = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin)
                .args(["gens", "--n", "2", "--format", "json"])
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("gens run failed with {:?}", out.status));
            }
            gens.push(out.stdout);
        }
        if gens[0] != gens[1] {
            return Err("gens stdout differs across runs".into());
        }
        Ok("verify (1 vs 4 rayon threads) and gens json byte-identical".into())
    });

    let mut failed = 0usize;
    for (pass, line) in &c.lines {
        println!("{line}");
        if !pass {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
