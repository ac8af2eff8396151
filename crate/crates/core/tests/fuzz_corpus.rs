//! Replays the checked-in fuzz seeds through the same checks as the fuzz targets.

use std::path::{Path, PathBuf};

use convex_pseudolattice::experiments::config::parse_override;
use convex_pseudolattice::experiments::svg::svg_string;
use convex_pseudolattice::experiments::sweep::steps_to_csv;
use convex_pseudolattice::experiments::{ingest_csv, ExperimentConfig, Snapshot};
use convex_pseudolattice::{InscribedChainPair, PairRecord};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("seed-"))
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_json_seeds_parse_and_round_trip() {
    for (path, bytes) in seeds("config_json") {
        let cfg = ExperimentConfig::from_json_str(std::str::from_utf8(&bytes).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap(), cfg);
    }
}

#[test]
fn override_seeds_apply() {
    for (path, bytes) in seeds("config_override") {
        let text = std::str::from_utf8(&bytes).unwrap();
        parse_override(text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut cfg = ExperimentConfig::default();
        cfg.apply_override(text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
    }
}

#[test]
fn sweep_csv_seeds_ingest_and_reserialize() {
    for (path, bytes) in seeds("sweep_csv") {
        let trials = ingest_csv(bytes.as_slice()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let refs: Vec<(u64, &[_])> = trials.iter().map(|(t, s)| (*t, s.as_slice())).collect();
        let again = steps_to_csv(&refs).unwrap();
        assert_eq!(again, bytes, "{} is not in canonical form", path.display());
    }
}

#[test]
fn pair_json_seeds_rebuild() {
    for (path, bytes) in seeds("pair_json") {
        let record: PairRecord = serde_json::from_slice(&bytes).unwrap();
        let pair = InscribedChainPair::from_record(&record).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        pair.validate().unwrap();
    }
}

#[test]
fn snapshot_seeds_render() {
    for (path, bytes) in seeds("snapshot_json") {
        let snapshot = Snapshot::from_json_str(std::str::from_utf8(&bytes).unwrap()).unwrap();
        let svg = svg_string(&snapshot).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        roxmltree::Document::parse(&svg).unwrap();
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(ExperimentConfig::from_json_str("{\"horizon\": \"many\"}").is_err());
    assert!(ExperimentConfig::from_json_str("{\"wedges\": 0}").is_err());
    assert!(parse_override("horizon").is_err());
    assert!(parse_override("=3").is_err());
    assert!(ingest_csv(&b"trial,n\n0,1\n"[..]).is_err());
    let record = PairRecord {
        root: convex_pseudolattice::Triangle::canonical(),
        inner: vec![],
        outer: vec![],
        ell: 1.0,
    };
    assert!(InscribedChainPair::from_record(&record).is_err());
}
