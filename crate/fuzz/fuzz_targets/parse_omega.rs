#![no_main]

use libfuzzer_sys::fuzz_target;
use qfern::sync::FrequencyVector;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(omega) = FrequencyVector::parse(text) {
        let sum: f64 = omega.values().iter().sum();
        assert!(omega.values().iter().all(|x| x.is_finite()));
        assert_eq!(omega.values().len(), omega.original().len());
        let scale = omega.original().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        assert!(sum.abs() <= 1e-9 * scale * omega.len() as f64);
    }
});
