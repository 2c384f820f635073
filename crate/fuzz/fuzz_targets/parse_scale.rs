#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::Scale;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(a) = text.parse::<Scale>() {
        assert!(a.to_f64() > 0.0);
        assert_eq!(a.to_string().parse::<Scale>().unwrap(), a);
    }
});
