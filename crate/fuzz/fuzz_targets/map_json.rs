#![no_main]

//! Orthogonal-map files: a parsed map must re-certify (orthogonality,
//! determinant claim, word product) against the reference form or be
//! rejected; either way, no panic.

use libfuzzer_sys::fuzz_target;
use wittkit::arith::rat_i64;
use wittkit::io::MapJson;
use wittkit::quad::QuadraticForm;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(json) = serde_json::from_str::<MapJson>(text) else {
        return;
    };
    let form = QuadraticForm::standard(&[rat_i64(1), rat_i64(1), rat_i64(1)]).unwrap();
    if let Ok(map) = json.to_map(&form) {
        // Anything accepted is genuinely orthogonal: spot check one image.
        let a = form.anchor_a();
        let image = map.apply(&a);
        assert_eq!(form.evaluate(&image).unwrap(), form.evaluate(&a).unwrap());
    }
});
