#![no_main]
use libfuzzer_sys::fuzz_target;
use wtail::io::read_amse_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_amse_csv(data);
});
