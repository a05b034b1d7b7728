#![no_main]

use libfuzzer_sys::fuzz_target;
use recipe_core::format::parse_supplies;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let supplies = parse_supplies(&text);
    let again: String = supplies.iter().map(|s| format!("{s}\n")).collect();
    assert_eq!(parse_supplies(&again), supplies);
});
