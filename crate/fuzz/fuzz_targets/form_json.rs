#![no_main]

//! Quadratic-form files are untrusted input; parsing must never panic,
//! and accepted forms must satisfy the type invariants (symmetric,
//! nondegenerate, consistent standard-shape metadata).

use libfuzzer_sys::fuzz_target;
use wittkit::io::parse_form;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(form) = parse_form(text) {
        assert!(form.dim() >= 1);
        if let Some(alphas) = form.standard_coeffs() {
            assert_eq!(alphas.len() + 2, form.dim());
        }
    }
});
