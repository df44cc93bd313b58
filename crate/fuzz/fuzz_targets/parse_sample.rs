#![no_main]
use libfuzzer_sys::fuzz_target;
use wtail::io::parse_sample_text;
use wtail::OrderedSample;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(values) = parse_sample_text(text) else { return };
    assert!(values.iter().all(|v| v.is_finite()));
    // Anything that passes validation must support a full fit.
    if let Ok(s) = OrderedSample::new(values) {
        let k = (s.len() / 2).max(2);
        let _ = wtail::tail::ls_fit(&s, k);
    }
});
