#![no_main]

use libfuzzer_sys::fuzz_target;
use sc_forge::eval::parse_vectors;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_vectors(text, None) {
        assert!(rows.iter().flatten().all(|v| v.is_finite()));
        let m = rows[0].len();
        let uniform = rows.iter().all(|r| r.len() == m);
        assert_eq!(parse_vectors(text, Some(m)).is_ok(), uniform);
    }
});
