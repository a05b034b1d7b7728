#![no_main]

use libfuzzer_sys::fuzz_target;
use recipe_core::format::{compile_kb, parse_db, write_db};

// Anything that compiles must survive a trip through the database format.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kb) = compile_kb(text) {
        let db = write_db(&kb);
        let back = parse_db(&db).expect("written database parses");
        assert_eq!(back, kb);
    }
});
