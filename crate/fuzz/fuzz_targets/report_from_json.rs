#![no_main]

use bell_adj::chart::{render_svg, ChartOptions};
use bell_adj::AdjudicationReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = AdjudicationReport::from_json(text) {
        // Validated reports must render in both axis modes.
        let _ = render_svg(&r, &ChartOptions::default());
        let _ = render_svg(&r, &ChartOptions { log_y: true, ..ChartOptions::default() });
    }
});
