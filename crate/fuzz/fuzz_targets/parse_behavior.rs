#![no_main]

use bell_adj::io::{behavior_from_csv, behavior_from_json, parse_behavior};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = behavior_from_json("fuzz", text);
    let _ = behavior_from_csv("fuzz", text, None);
    if let Ok(b) = parse_behavior("fuzz", text) {
        assert!(b.as_slice().iter().all(|p| p.is_finite() && *p >= 0.0));
    }
});
