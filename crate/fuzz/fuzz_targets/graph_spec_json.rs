//! Fuzzes the graph-specification JSON decoder: parsing must never panic,
//! and anything that parses and validates must survive a serialize/parse
//! round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use walker_core::GraphSpec;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = serde_json::from_str::<GraphSpec>(text) {
        if spec.validate().is_ok() {
            // validated specs contain only finite numbers, so this cannot fail
            let json = serde_json::to_string(&spec).unwrap();
            let again: GraphSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, again);
        }
    }
});
