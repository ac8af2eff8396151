#![no_main]

use convex_pseudolattice::experiments::ingest_csv;
use convex_pseudolattice::experiments::sweep::steps_to_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(trials) = ingest_csv(data) else { return };
    let refs: Vec<(u64, &[_])> = trials.iter().map(|(t, s)| (*t, s.as_slice())).collect();
    let bytes = steps_to_csv(&refs).expect("ingested rows serialize");
    let again = ingest_csv(bytes.as_slice()).expect("serialized rows re-ingest");
    let refs2: Vec<(u64, &[_])> = again.iter().map(|(t, s)| (*t, s.as_slice())).collect();
    assert_eq!(steps_to_csv(&refs2).unwrap(), bytes);
});
