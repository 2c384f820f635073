#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::eval::Distribution;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = text.parse::<Distribution>() {
        assert_eq!(d.to_string().parse::<Distribution>().unwrap(), d);
    }
});
