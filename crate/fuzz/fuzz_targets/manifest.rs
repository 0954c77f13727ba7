#![no_main]

use libfuzzer_sys::fuzz_target;
use rrcma::harness::logs::encode_manifest;
use rrcma::harness::parse_manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_manifest(text) {
        let _ = encode_manifest(&m);
    }
});
