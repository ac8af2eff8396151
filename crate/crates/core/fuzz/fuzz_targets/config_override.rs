#![no_main]

use convex_pseudolattice::experiments::config::parse_override;
use convex_pseudolattice::experiments::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_override(text);
    let mut cfg = ExperimentConfig::default();
    let before = cfg.clone();
    match cfg.apply_override(text) {
        Ok(()) => cfg.validate().expect("override keeps the config valid"),
        Err(_) => assert_eq!(cfg, before, "failed override must not change the config"),
    }
});
