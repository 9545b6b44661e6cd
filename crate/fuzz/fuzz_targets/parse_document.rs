#![no_main]

use libfuzzer_sys::fuzz_target;
use porphyry_core::defsys::validate;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = porphyry_core::parse_document(src) {
        let _ = validate(&doc.system);
    }
});
