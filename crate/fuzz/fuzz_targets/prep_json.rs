//! Fuzzes the preparation JSON decoder: parsing must never panic, and any
//! accepted state (normalization is checked on construction) must round-trip
//! bit-exactly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use walker_core::Preparation;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(prep) = Preparation::from_json(text) {
        let again = Preparation::from_json(&prep.to_json()).expect("accepted state re-parses");
        assert_eq!(prep, again);
    }
});
