#![no_main]

use finespec_cli::args::{parse_k_range, parse_lambda, parse_resolution, parse_window};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_lambda(text);
        let _ = parse_window(text);
        let _ = parse_resolution(text);
        let _ = parse_k_range(text);
    }
});
