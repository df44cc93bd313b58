#![no_main]
use libfuzzer_sys::fuzz_target;
use wtail::io::{parse_boxplot_json, write_boxplot_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(out) = parse_boxplot_json(text) else { return };
    let mut buf = Vec::new();
    write_boxplot_json(&mut buf, &out).unwrap();
    let back = parse_boxplot_json(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(out.k_hat, back.k_hat);
});
