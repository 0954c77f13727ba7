#![no_main]

use libfuzzer_sys::fuzz_target;
use rrcma::harness::{parse_config_str, ExperimentConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pairs) = parse_config_str(text) {
        let mut cfg = ExperimentConfig::default();
        for (k, v) in &pairs {
            let _ = cfg.set(k, v);
        }
        let _ = cfg.validate();
    }
});
