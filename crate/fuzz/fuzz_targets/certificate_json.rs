#![no_main]

//! Certificate files are the main third-party input surface: parsing and
//! verification must never panic, whatever the bytes claim.

use libfuzzer_sys::fuzz_target;
use wittkit::cert::{parse_certificate, verify_certificate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cert) = parse_certificate(text) {
        // Verification with a small factor bound; outcome is irrelevant,
        // absence of panics is the property.
        let _ = verify_certificate(&cert, 10_000);
    }
});
