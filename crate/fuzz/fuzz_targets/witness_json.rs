#![no_main]

use libfuzzer_sys::fuzz_target;
use specdyn::spacing::SpacingWitness;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(w) = SpacingWitness::from_json(text) {
            let again = SpacingWitness::from_json(&w.to_json()).expect("round trip");
            assert_eq!(w.indices, again.indices);
        }
    }
});
