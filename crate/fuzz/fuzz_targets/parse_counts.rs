#![no_main]

use bell_adj::io::{counts_from_csv, counts_from_json, counts_to_csv, parse_counts};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = counts_from_json("fuzz", text);
    let _ = counts_from_csv("fuzz", text, None);
    if let Ok(c) = parse_counts("fuzz", text) {
        // Anything accepted must survive a round trip.
        let again = counts_from_csv("fuzz", &counts_to_csv(&c), Some(c.scenario())).unwrap();
        assert_eq!(again, c);
    }
});
