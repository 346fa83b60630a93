#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((w, h, px)) = rnnheat_core::render::decode_ppm(&mut &data[..]) {
        assert_eq!(px.len(), w * h * 3);
    }
});
