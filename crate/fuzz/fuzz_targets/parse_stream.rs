#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::ThermometerStream;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = text.parse::<ThermometerStream>() {
        let again: ThermometerStream = s.to_string().parse().expect("display re-parses");
        assert_eq!(again, s);
        assert_eq!(ThermometerStream::from_bits(&s.bits(), s.alpha()).unwrap(), s);
    }
});
