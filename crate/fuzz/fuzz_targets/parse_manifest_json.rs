#![no_main]
use libfuzzer_sys::fuzz_target;
use wtail::io::parse_manifest_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = parse_manifest_json(text) {
            let _ = m.plan.validate();
        }
    }
});
