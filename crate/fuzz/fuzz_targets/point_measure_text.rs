#![no_main]

use libfuzzer_sys::fuzz_target;
use specdyn::measure::PointMeasure;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(mu) = PointMeasure::parse_text(text) {
            // a successfully parsed measure must round-trip
            let again = PointMeasure::parse_text(&mu.to_text()).expect("round trip");
            assert_eq!(mu.atoms().len(), again.atoms().len());
        }
    }
});
