#![no_main]

use libfuzzer_sys::fuzz_target;
use specdyn::measure::PointMeasure;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(mu) = PointMeasure::from_json(text) {
            let again = PointMeasure::from_json(&mu.to_json()).expect("round trip");
            assert_eq!(mu.atoms(), again.atoms());
        }
    }
});
