#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::cost::CostProfile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = CostProfile::from_json(text) {
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(CostProfile::from_json(&json).unwrap(), p);
    }
});
