#![no_main]

use libfuzzer_sys::fuzz_target;
use qfern::graph::{format_graph, parse_graph};

// Any accepted graph must survive format -> parse bit-exactly.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = parse_graph(text) {
        let again = parse_graph(&format_graph(&g)).expect("formatted graph must parse");
        assert_eq!(g, again);
    }
});
