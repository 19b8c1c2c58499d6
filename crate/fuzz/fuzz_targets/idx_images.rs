#![no_main]

use libfuzzer_sys::fuzz_target;
use riemann_inexact::idx::{encode_idx_images, parse_idx_images, parse_idx_labels};

fuzz_target!(|data: &[u8]| {
    if let Ok(images) = parse_idx_images(data) {
        assert_eq!(images.pixels.len(), images.count * images.rows * images.cols);
        let again = parse_idx_images(&encode_idx_images(&images)).expect("re-encoded images parse");
        assert_eq!(again, images);
    }
    let _ = parse_idx_labels(data);
});
