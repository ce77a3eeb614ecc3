#![no_main]

use fermat_pp3::ring::QuadraticField;
use libfuzzer_sys::fuzz_target;

// First byte picks the field; the rest is the element text.
fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let d = [1, 7, 19, 43, 67][sel as usize % 5];
    let k = QuadraticField::new(d).unwrap();
    if let Ok(z) = k.parse_element(text) {
        assert_eq!(k.parse_element(&z.coords()).unwrap(), z);
    }
});
