//! Axiom suite over the defining sectors: skew-symmetry, Jacobi, Wick,
//! quasi-commutativity/associativity, confluence, and bookkeeping.

use svw_core::brst::complex;
use svw_core::engine::{axiom_suite, Algebra};
use svw_core::lca::current_table;
use svw_core::liesuper::{principal_data, FormMode};
use svw_core::wgen::w_table;

fn assert_report(report: svw_core::Report) {
    for item in &report.items {
        eprintln!(
            "{} {} ({} ms){}",
            if item.pass { "PASS" } else { "FAIL" },
            item.name,
            item.millis,
            item.detail
                .as_deref()
                .map(|d| format!(": {d}"))
                .unwrap_or_default()
        );
    }
    assert!(report.all_pass(), "{:?}", report.first_failure());
}

#[test]
fn complex_sector_gl21() {
    let pd = principal_data(1, FormMode::Rescaled).unwrap();
    let alg = Algebra::new(current_table(&pd));
    assert_report(axiom_suite(&alg, 0xA110, 120));
}

#[test]
fn complex_sector_gl21_supertrace_form() {
    let pd = principal_data(1, FormMode::Supertrace).unwrap();
    let alg = Algebra::new(current_table(&pd));
    assert_report(axiom_suite(&alg, 0xA111, 60));
}

#[test]
fn w_sector_gl21() {
    let cx = complex(1, FormMode::Rescaled).unwrap();
    let alg = Algebra::new(w_table(&cx).unwrap());
    assert_report(axiom_suite(&alg, 0xA112, 120));
}

#[test]
fn w_sector_gl32() {
    let cx = complex(2, FormMode::Supertrace).unwrap();
    let alg = Algebra::new(w_table(&cx).unwrap());
    assert_report(axiom_suite(&alg, 0xA114, 40));
}

#[test]
fn complex_sector_gl32() {
    let pd = principal_data(2, FormMode::Rescaled).unwrap();
    let alg = Algebra::new(current_table(&pd));
    assert_report(axiom_suite(&alg, 0xA113, 60));
}
