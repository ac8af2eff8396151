#![no_main]

use convex_pseudolattice::{InscribedChainPair, PairRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(record) = serde_json::from_slice::<PairRecord>(data) else { return };
    if let Ok(pair) = InscribedChainPair::from_record(&record) {
        pair.validate().expect("accepted records validate");
        let back = InscribedChainPair::from_record(&pair.to_record()).expect("round trip");
        assert_eq!(back.wedge_count(), pair.wedge_count());
    }
});
