#![no_main]

use libfuzzer_sys::fuzz_target;
use rrcma::harness::logs::{encode_events, parse_event_line};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if let Ok(event) = parse_event_line(line) {
        // whatever parses must survive a write/read round trip
        if let Ok(text) = encode_events(std::slice::from_ref(&event)) {
            let again = parse_event_line(text.trim_end()).expect("re-parse");
            assert_eq!(again, event);
        }
    }
});
