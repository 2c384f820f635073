#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::cli::RunManifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = RunManifest::from_json(text) {
        let _ = m.job();
        let _ = m.digest();
    }
});
