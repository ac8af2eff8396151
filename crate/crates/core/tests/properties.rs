use convex_pseudolattice::admissible::{canonical_triple, split_ratios, AdmissibleBand};
use convex_pseudolattice::chain::initial_pair;
use convex_pseudolattice::experiments::sweep::steps_to_csv;
use convex_pseudolattice::experiments::{ingest_csv, ExperimentConfig};
use convex_pseudolattice::geometry::{doubled_area, segment_bound_check, AffineMap, Point, Triangle};
use convex_pseudolattice::sampler::{sample_triangle, SeededGenerator};
use convex_pseudolattice::{run, RunConfig};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -100.0..100.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

/// Triangles whose doubled area is not tiny relative to their bounding box.
fn fat_triangle() -> impl Strategy<Value = Triangle> {
    (point(), point(), point())
        .prop_filter("too thin", |(a, b, c)| {
            let scale = a.dist(*b).max(b.dist(*c)).max(c.dist(*a));
            doubled_area(*a, *b, *c).abs() > 1e-3 * scale * scale
        })
        .prop_map(|(a, b, c)| Triangle::new(a, b, c).unwrap())
}

fn tol(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn doubled_area_is_antisymmetric(a in point(), b in point(), c in point()) {
        let s = doubled_area(a, b, c);
        let bound = tol(1e4);
        prop_assert!((s + doubled_area(b, a, c)).abs() <= bound);
        prop_assert!((s - doubled_area(b, c, a)).abs() <= bound);
    }

    #[test]
    fn doubled_area_scales_by_determinant(
        a in point(), b in point(), c in point(),
        m in prop::array::uniform4(-3.0..3.0f64), shift in point(),
    ) {
        let map = AffineMap::new([[m[0], m[1]], [m[2], m[3]]], shift);
        let det = m[0] * m[3] - m[1] * m[2];
        let mapped = doubled_area(map.apply(a), map.apply(b), map.apply(c));
        prop_assert!((mapped - det * doubled_area(a, b, c)).abs() <= tol(1e6));
    }

    #[test]
    fn uniform_samples_stay_inside(t in fat_triangle(), seed in any::<u64>()) {
        let mut rng = SeededGenerator::new(seed, 0);
        for _ in 0..32 {
            prop_assert!(t.contains(sample_triangle(&t, &mut rng), 1e-9));
        }
    }

    #[test]
    fn canonical_split_matches_closed_form(t in -0.5..0.5f64, tau in -0.125..0.125f64) {
        let (q, p, r) = canonical_triple(t, tau);
        let x_p = (t * t - tau - 1.0) / (2.0 * (t + 1.0));
        let x_r = (t * t - tau - 1.0) / (2.0 * (t - 1.0));
        prop_assert!((p.x - x_p).abs() <= 1e-12);
        prop_assert!((r.x - x_r).abs() <= 1e-12);
        prop_assert!((q.x - t).abs() <= 1e-12 && (q.y - (t * t + tau)).abs() <= 1e-12);
        // Q lies on PR.
        prop_assert!(doubled_area(p, q, r).abs() <= 1e-12);
    }

    #[test]
    fn band_points_split_sides_in_range(t in fat_triangle(), alpha in 1e-3..10.0f64, seed in any::<u64>()) {
        let pair = initial_pair(&t).unwrap();
        let w = pair.wedges()[0];
        let band = AdmissibleBand::new(0, &w, alpha).unwrap();
        let mut rng = SeededGenerator::new(seed, 1);
        for _ in 0..16 {
            let (q, p, r) = band.sample(&mut rng).unwrap();
            let ratios = split_ratios(&w, p, q, r);
            for k in 0..3 {
                prop_assert!((ratios[k] + ratios[k + 3] - 1.0).abs() <= 1e-9);
                prop_assert!(ratios[k] >= 0.125 - 1e-9 && ratios[k] <= 0.875 + 1e-9);
            }
            prop_assert!(band.test(q).is_some());
        }
    }

    #[test]
    fn segment_bound_holds_for_balanced_splits(
        t in fat_triangle(),
        x in 0.125..=0.875f64, y in 0.125..=0.875f64, z in 0.125..=0.875f64,
    ) {
        let p = t.a.lerp(t.c, x);
        let r = t.b.lerp(t.c, z);
        let q = p.lerp(r, y);
        prop_assert_eq!(segment_bound_check(&t, p, q, r).unwrap(), true);
    }

    #[test]
    fn insertion_decrement_is_bounded(t in fat_triangle(), alpha in 1e-3..10.0f64, seed in any::<u64>()) {
        let mut pair = initial_pair(&t).unwrap();
        let mut rng = SeededGenerator::new(seed, 2);
        for _ in 0..8 {
            let i = (seed as usize) % pair.wedge_count();
            let w = pair.wedges()[i];
            let band = AdmissibleBand::new(i, &w, alpha).unwrap();
            let (q, p, r) = band.sample(&mut rng).unwrap();
            let before = pair.ell();
            let ins = pair.insert(i, q, p, r).unwrap();
            prop_assert!(ins.decrement >= -1e-12 * before);
            prop_assert!(ins.decrement <= alpha * (1.0 + 1e-9));
            prop_assert!(pair.ell() <= before * (1.0 + 1e-12));
        }
        prop_assert!(pair.validate().is_ok());
    }

    #[test]
    fn runs_survive_csv_round_trip(seed in any::<u64>(), horizon in 1usize..40) {
        let summary = run(&RunConfig::new(Triangle::canonical(), horizon, seed)).unwrap();
        let bytes = steps_to_csv(&[(0, &summary.steps)]).unwrap();
        let back = ingest_csv(bytes.as_slice()).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].1, &summary.steps);
        for pair in summary.ell_trajectory.windows(2) {
            prop_assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn config_overrides_round_trip(horizon in 1usize..5000, seed in any::<u64>(), sigmas in 0.0..10.0f64) {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_override(&format!("horizon={horizon}")).unwrap();
        cfg.apply_override(&format!("seed={seed}")).unwrap();
        cfg.apply_override(&format!("tolerances.area_sigmas={sigmas:?}")).unwrap();
        prop_assert_eq!(cfg.horizon, horizon);
        prop_assert_eq!(cfg.seed, seed);
        prop_assert_eq!(cfg.tolerances.area_sigmas, sigmas);
        let back = ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
