#![no_main]

use libfuzzer_sys::fuzz_target;
use rnnheat_core::export::RegionDoc;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = RegionDoc::from_json(text) {
        // Canonical output must be a fixed point.
        let once = doc.to_json();
        let again = RegionDoc::from_json(&once).expect("canonical output parses").to_json();
        assert_eq!(once, again);
    }
});
