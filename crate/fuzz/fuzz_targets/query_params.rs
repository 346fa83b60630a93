#![no_main]

use libfuzzer_sys::fuzz_target;
use rnnheat_service::params::{parse_heatmap_query, parse_region_query};

fuzz_target!(|data: &[u8]| {
    let Ok(q) = std::str::from_utf8(data) else { return };
    if let Ok(h) = parse_heatmap_query(Some(q)) {
        assert!(h.threshold.is_none_or(f64::is_finite));
    }
    if let Ok(r) = parse_region_query(Some(q)) {
        assert!(r.x.is_finite() && r.y.is_finite());
    }
});
