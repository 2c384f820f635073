#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::dse::{enumerate_grid, GridSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = GridSpec::from_json(text) else {
        return;
    };
    if spec.validate().is_ok() && spec.size() <= 10_000 {
        assert_eq!(enumerate_grid(&spec).len(), spec.size());
    }
});
