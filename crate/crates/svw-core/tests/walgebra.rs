//! W-algebra generator suite across ranks and form normalizations.

use svw_core::liesuper::FormMode;
use svw_core::wgen::walgebra_suite;

fn run(n: u32, mode: FormMode) {
    let report = walgebra_suite(n, mode);
    for item in &report.items {
        let status = if item.pass { "pass" } else { "FAIL" };
        let detail = item.detail.as_deref().unwrap_or("");
        println!("  [{status}] {} ({} ms) {detail}", item.name, item.millis);
    }
    assert!(
        report.all_pass(),
        "first failure: {:?}",
        report.first_failure()
    );
}

#[test]
fn walgebra_gl21() {
    run(1, FormMode::Rescaled);
}

#[test]
fn walgebra_gl21_supertrace_form() {
    run(1, FormMode::Supertrace);
}

#[test]
fn walgebra_gl32() {
    run(2, FormMode::Rescaled);
}

#[test]
fn walgebra_gl32_supertrace_form() {
    run(2, FormMode::Supertrace);
}
