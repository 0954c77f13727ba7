#![no_main]

use libfuzzer_sys::fuzz_target;
use rrcma::harness::logs::{encode_trajectory, parse_trajectory};

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = parse_trajectory(data) {
        if points.iter().all(|p| !p.best_f.is_nan()) {
            let bytes = encode_trajectory(&points).expect("encode");
            assert_eq!(parse_trajectory(&bytes).expect("re-parse"), points);
        }
    }
});
