//! Fuzzes the sweep-configuration JSON decoder: parsing and validation must
//! never panic, and serialization must be idempotent for anything whose
//! rendered form parses back (non-finite numbers render as null and don't).

#![no_main]

use libfuzzer_sys::fuzz_target;
use walker_core::SweepConfig;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = SweepConfig::from_json(text) {
        let _ = config.validate();
        let json = config.to_json();
        if let Ok(again) = SweepConfig::from_json(&json) {
            assert_eq!(json, again.to_json());
        }
    }
});
