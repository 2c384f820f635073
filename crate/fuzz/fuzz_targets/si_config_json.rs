#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::gelu::SIConfig;
use sc_forge::ThermometerStream;

// A config that validates must evaluate every input level to a stream.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = SIConfig::from_json(text) else {
        return;
    };
    if cfg.b_in > 4096 {
        return;
    }
    for n in 0..=cfg.b_in {
        let x = ThermometerStream::new(cfg.b_in, n, cfg.alpha_in).unwrap();
        let y = cfg.apply(&x).unwrap();
        assert_eq!(y.ones(), cfg.level_table[n]);
    }
});
