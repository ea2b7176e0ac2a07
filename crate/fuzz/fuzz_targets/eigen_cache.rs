#![no_main]

use libfuzzer_sys::fuzz_target;
use specdyn::eigen::EigenSystem;

fuzz_target!(|data: &[u8]| {
    if let Ok((eig, key)) = EigenSystem::decode_cache(data) {
        let bytes = eig.encode_cache(&key);
        let (again, key2) = EigenSystem::decode_cache(&bytes).expect("round trip");
        assert_eq!(key, key2);
        assert_eq!(eig.eigenvalues(), again.eigenvalues());
    }
});
