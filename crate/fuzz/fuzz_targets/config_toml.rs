#![no_main]

use libfuzzer_sys::fuzz_target;
use specdyn::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::from_toml(text) {
            // a validated config must survive re-serialization with the
            // same canonical hash
            let again = ExperimentConfig::from_toml(&cfg.to_toml()).expect("round trip");
            assert_eq!(cfg.hash(), again.hash());
        }
    }
});
