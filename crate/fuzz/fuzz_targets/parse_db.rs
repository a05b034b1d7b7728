#![no_main]

use libfuzzer_sys::fuzz_target;
use recipe_core::format::{parse_db, write_db};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kb) = parse_db(text) {
        assert_eq!(parse_db(&write_db(&kb)).as_ref(), Ok(&kb));
    }
});
