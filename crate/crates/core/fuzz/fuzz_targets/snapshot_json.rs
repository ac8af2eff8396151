#![no_main]

use convex_pseudolattice::experiments::svg::svg_string;
use convex_pseudolattice::experiments::Snapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(snapshot) = Snapshot::from_json_str(text) {
        let _ = svg_string(&snapshot);
    }
});
