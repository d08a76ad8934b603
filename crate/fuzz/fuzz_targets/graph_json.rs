#![no_main]

use libfuzzer_sys::fuzz_target;
use qfern::WeightedGraph;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = serde_json::from_slice::<WeightedGraph>(data) {
        let text = serde_json::to_string(&g).unwrap();
        let again: WeightedGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(g, again);
    }
});
