#![no_main]

use libfuzzer_sys::fuzz_target;
use porphyry_core::parser::infer_symbols;
use porphyry_core::parse_formula;

// Anything that parses must print back to an equal formula.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(syms) = infer_symbols(src) else { return };
    let Ok(f) = parse_formula(src, &syms) else { return };
    let printed = f.to_string();
    let again = parse_formula(&printed, &syms).expect("printed formula reparses");
    assert_eq!(f, again, "{printed}");
});
