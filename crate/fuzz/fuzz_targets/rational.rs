#![no_main]

//! The "num/den" rational literal parser must never panic and must only
//! produce canonical values (reduced, positive denominator).

use libfuzzer_sys::fuzz_target;
use wittkit::arith::{rat_from_str, rat_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = rat_from_str(text) {
        // Canonical print/parse round trip.
        let printed = rat_to_string(&value);
        let again = rat_from_str(&printed).expect("canonical form reparses");
        assert_eq!(value, again);
    }
});
