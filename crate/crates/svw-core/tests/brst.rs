//! BRST identity suite across ranks and form normalizations.

use svw_core::brst::identity_suite;
use svw_core::liesuper::FormMode;

fn run(n: u32, mode: FormMode, seed: u64, trials: u32) {
    let report = identity_suite(n, mode, seed, trials);
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
fn brst_identities_gl21() {
    run(1, FormMode::Rescaled, 0xB125, 40);
}

#[test]
fn brst_identities_gl21_supertrace_form() {
    run(1, FormMode::Supertrace, 0xB126, 25);
}

#[test]
fn brst_identities_gl32() {
    run(2, FormMode::Rescaled, 0xB127, 12);
}

#[test]
fn brst_identities_gl32_supertrace_form() {
    run(2, FormMode::Supertrace, 0xB128, 12);
}
