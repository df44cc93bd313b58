#![no_main]
use libfuzzer_sys::fuzz_target;
use wtail::distributions::DistributionSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 256 {
        return;
    }
    if let Ok(spec) = s.parse::<DistributionSpec>() {
        let again: DistributionSpec = spec.to_string().parse().expect("display output reparses");
        assert_eq!(spec, again);
        let meta = spec.tail_meta();
        assert!(meta.theta > 0.0);
        let _ = spec.true_quantile(1e-3);
    }
});
