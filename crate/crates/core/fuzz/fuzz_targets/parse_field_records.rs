#![no_main]

use fermat_pp3::screen::parse_field_records;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_field_records(text);
    }
});
