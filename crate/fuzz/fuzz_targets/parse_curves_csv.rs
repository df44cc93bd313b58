#![no_main]
use libfuzzer_sys::fuzz_target;
use wtail::io::{read_curves_csv, write_curves_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_curves_csv(data) else { return };
    let mut buf = Vec::new();
    write_curves_csv(&mut buf, &rows).unwrap();
    let back = read_curves_csv(&buf[..]).unwrap();
    assert_eq!(rows.len(), back.len());
});
