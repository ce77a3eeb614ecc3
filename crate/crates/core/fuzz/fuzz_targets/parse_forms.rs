#![no_main]

use fermat_pp3::eliminate::parse::parse_forms;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_forms(text);
    }
});
