//! Admissible insertion points for a wedge.
//!
//! In canonical coordinates (`A = (-1, 1)`, `B = (1, 1)`, apex `C = (0, -1)`)
//! the admissible region is the parabola band `Q = (t, t^2 + tau)` with
//! `|t| <= 1/2` and `|tau| <= delta`. The line through `Q` parallel to the
//! tangent of `y = x^2` at `t` meets `AC` in `P` and `BC` in `R`. Every ratio
//! of the resulting split is within `delta` of `(1 +- t) / 2`, so all of them
//! stay in `[1/8, 7/8]` and the affine-length decrement is at most
//! `(64/3) delta^2 S^(1/3) <= alpha`.
//!
//! The band is a sufficient condition only. Its exact plain area is
//! `delta * S / 2` for a wedge of doubled area `S`.

use rand::Rng;

use crate::chain::Wedge;
use crate::error::AdmissibleError;
use crate::geometry::{canonical_map, AffineMap, Point};

/// Half-width of the `t` interval.
pub const T_HALF_RANGE: f64 = 0.5;

/// Largest band half-height.
pub const DELTA_MAX: f64 = 1.0 / 8.0;

/// Slack on the band tests, in canonical units.
const BAND_SLACK: f64 = 1e-12;

/// Normalized decrement `1 - (s1/s)^(1/3) - (s2/s)^(1/3)`.
pub fn err(s: f64, s1: f64, s2: f64) -> Result<f64, AdmissibleError> {
    if !(s > 0.0) {
        return Err(AdmissibleError::NonPositiveArea(s));
    }
    for v in [s1, s2] {
        if v < 0.0 {
            return Err(AdmissibleError::Negative(v));
        }
    }
    Ok(1.0 - (s1 / s).cbrt() - (s2 / s).cbrt())
}

/// Residual of the identity
/// `(x+y+z)/3 - (xyz)^(1/3) = (1/6)(x^(1/3)+y^(1/3)+z^(1/3)) * sum of squared pairwise cube-root differences`.
pub fn amgm_expansion_residual(x: f64, y: f64, z: f64) -> Result<f64, AdmissibleError> {
    for v in [x, y, z] {
        if v < 0.0 {
            return Err(AdmissibleError::Negative(v));
        }
    }
    let (a, b, c) = (x.cbrt(), y.cbrt(), z.cbrt());
    let lhs = (x + y + z) / 3.0 - a * b * c;
    let rhs = (a + b + c) * ((a - b).powi(2) + (b - c).powi(2) + (c - a).powi(2)) / 6.0;
    Ok((lhs - rhs).abs())
}

/// Band half-height `min(1/8, sqrt(alpha / s^(1/3)) / 8)`.
pub fn delta_for(alpha: f64, s: f64) -> f64 {
    if !(alpha > 0.0) || !(s > 0.0) {
        return 0.0;
    }
    ((alpha / s.cbrt()).sqrt() / 8.0).min(DELTA_MAX)
}

/// Plain area of the band region inside wedge `w` for budget `alpha`.
pub fn admissible_area(w: &Wedge, alpha: f64) -> f64 {
    delta_for(alpha, w.s) * w.s / 2.0
}

/// Band point and its split points in canonical coordinates.
pub fn canonical_triple(t: f64, tau: f64) -> (Point, Point, Point) {
    let q = Point::new(t, t * t + tau);
    let num = t * t - tau - 1.0;
    let xp = num / (2.0 * (t + 1.0));
    let xr = num / (2.0 * (t - 1.0));
    (q, Point::new(xp, -2.0 * xp - 1.0), Point::new(xr, 2.0 * xr - 1.0))
}

/// The admissible band of one wedge, with its maps cached.
///
/// Canonical coordinates are computed from offsets relative to the wedge's
/// chain-start vertex, and split points are interpolated along the wedge's
/// own sides, so thin wedges far from the origin keep `P`, `R` on their
/// segments to rounding of the local differences.
#[derive(Debug, Clone)]
pub struct AdmissibleBand {
    pub wedge_index: usize,
    pub delta: f64,
    pub t_range: (f64, f64),
    /// Wedge coordinates to canonical coordinates.
    pub map: AffineMap,
    pub inverse: AffineMap,
    pub region_area: f64,
    wedge: Wedge,
}

const CANON_START: Point = Point::new(-1.0, 1.0);

impl AdmissibleBand {
    pub fn new(wedge_index: usize, w: &Wedge, alpha: f64) -> Result<Self, AdmissibleError> {
        let map = canonical_map(&w.triangle())?;
        let inverse = map.inverse()?;
        let delta = delta_for(alpha, w.s);
        // canonical band area 2 delta, pulled back through the map's area ratio
        let region_area = 2.0 * delta / map.area_scale();
        Ok(Self {
            wedge_index,
            delta,
            t_range: (-T_HALF_RANGE, T_HALF_RANGE),
            map,
            inverse,
            region_area,
            wedge: *w,
        })
    }

    pub fn to_canonical(&self, q: Point) -> Point {
        self.map.apply_linear(q - self.wedge.c_prev) + CANON_START
    }

    pub fn from_canonical(&self, c: Point) -> Point {
        self.wedge.c_prev + self.inverse.apply_linear(c - CANON_START)
    }

    /// `P` on the incoming side and `R` on the outgoing side for band parameters `(t, tau)`.
    fn split_points(&self, t: f64, tau: f64) -> (Point, Point, f64) {
        let (_, pc, rc) = canonical_triple(t, tau);
        // canonical AC runs over x in [-1, 0], BC over x in [0, 1]
        let ap = pc.x + 1.0;
        let br = 1.0 - rc.x;
        let p = self.wedge.c_prev.lerp(self.wedge.apex, ap);
        let r = self.wedge.c_next.lerp(self.wedge.apex, br);
        (p, r, (t - pc.x) / (rc.x - pc.x))
    }

    /// Returns the split points `(P, R)` when `q` lies in the band.
    pub fn test(&self, q: Point) -> Option<(Point, Point)> {
        if self.delta <= 0.0 || !q.is_finite() {
            return None;
        }
        let c = self.to_canonical(q);
        let t = c.x;
        if t.abs() > T_HALF_RANGE + BAND_SLACK {
            return None;
        }
        let tau = c.y - t * t;
        if tau.abs() > self.delta + BAND_SLACK {
            return None;
        }
        let (p, r, _) = self.split_points(t, tau);
        Some((p, r))
    }

    /// Uniform draw from the band, returned as `(Q, P, R)` in wedge coordinates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Point, Point, Point), AdmissibleError> {
        if !(self.delta > 0.0) {
            return Err(AdmissibleError::ZeroBudget);
        }
        let t = rng.random_range(-T_HALF_RANGE..=T_HALF_RANGE);
        let tau = rng.random_range(-self.delta..=self.delta);
        let (p, r, along) = self.split_points(t, tau);
        Ok((p.lerp(r, along), p, r))
    }
}

/// Band admissibility test for a single wedge.
pub fn is_admissible(w: &Wedge, q: Point, alpha: f64) -> Option<(Point, Point)> {
    AdmissibleBand::new(0, w, alpha).ok()?.test(q)
}

/// Uniform draw from the admissible band of `w`.
pub fn sample_admissible<R: Rng + ?Sized>(
    w: &Wedge,
    alpha: f64,
    rng: &mut R,
) -> Result<(Point, Point, Point), AdmissibleError> {
    if !(alpha > 0.0) {
        return Err(AdmissibleError::ZeroBudget);
    }
    AdmissibleBand::new(0, w, alpha)?.sample(rng)
}

/// The six split ratios `[AP:AC, PQ:PR, RC:BC, PC:AC, QR:PR, BR:BC]` with
/// `A = c_prev`, `B = c_next`, `C = apex`.
pub fn split_ratios(w: &Wedge, p: Point, q: Point, r: Point) -> [f64; 6] {
    let (a, b, c) = (w.c_prev, w.c_next, w.apex);
    let ac = a.dist(c);
    let bc = b.dist(c);
    let pr = p.dist(r);
    [
        a.dist(p) / ac,
        p.dist(q) / pr,
        r.dist(c) / bc,
        p.dist(c) / ac,
        q.dist(r) / pr,
        b.dist(r) / bc,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Wedge;
    use crate::geometry::Triangle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canonical_wedge() -> Wedge {
        Wedge::from_triangle(&Triangle::canonical()).unwrap()
    }

    #[test]
    fn err_examples() {
        assert!(err(8.0, 1.0, 1.0).unwrap().abs() < 1e-15);
        assert_eq!(err(3.0, 3.0, 0.0).unwrap(), 0.0);
        assert!(err(4.0, 0.5, 0.5).unwrap().abs() < 1e-15);
        assert!(err(0.0, 1.0, 1.0).is_err());
        assert!(err(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn amgm_examples() {
        assert!(amgm_expansion_residual(1.0, 1.0, 1.0).unwrap() < 1e-15);
        assert!(amgm_expansion_residual(1.0, 0.0, 0.0).unwrap() < 1e-15);
        assert!(amgm_expansion_residual(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn delta_examples() {
        let s: f64 = 27.0;
        assert_eq!(delta_for(s.cbrt(), s), 1.0 / 8.0);
        assert_eq!(delta_for(0.0, s), 0.0);
        assert!((delta_for(s.cbrt() / 4.0, s) - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(delta_for(100.0, s), 1.0 / 8.0);
    }

    #[test]
    fn area_examples() {
        let w = canonical_wedge();
        assert_eq!(admissible_area(&w, 0.0), 0.0);
        // alpha >= S^(1/3) clamps delta to 1/8
        assert!((admissible_area(&w, 10.0) - 0.25).abs() < 1e-15);
        let band = AdmissibleBand::new(0, &w, 10.0).unwrap();
        assert!((band.region_area - 0.25).abs() < 1e-15);
    }

    #[test]
    fn canonical_origin_is_admissible() {
        let w = canonical_wedge();
        for alpha in [1e-9, 0.1, 5.0] {
            let (p, r) = is_admissible(&w, Point::new(0.0, 0.0), alpha).unwrap();
            assert!(p.dist(Point::new(-0.5, 0.0)) < 1e-12);
            assert!(r.dist(Point::new(0.5, 0.0)) < 1e-12);
        }
        assert!(is_admissible(&w, Point::new(0.0, 0.0), 0.0).is_none());
    }

    #[test]
    fn rejections() {
        let w = canonical_wedge();
        assert!(is_admissible(&w, Point::new(0.6, 0.36), 10.0).is_none());
        // delta = 1/16 needs alpha / S^(1/3) = 1/4
        let alpha = w.s.cbrt() / 4.0;
        assert!((delta_for(alpha, w.s) - 1.0 / 16.0).abs() < 1e-15);
        assert!(is_admissible(&w, Point::new(0.0, 0.2), alpha).is_none());
    }

    #[test]
    fn sample_round_trip_and_ratios() {
        let t = Triangle::new(Point::new(0.0, 0.0), Point::new(3.0, 1.0), Point::new(1.0, -2.0)).unwrap();
        let w = Wedge::from_triangle(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..2000 {
            let alpha = w.s.cbrt() * 10f64.powf(-3.0 + 3.5 * (i as f64 / 2000.0));
            let (q, p, r) = sample_admissible(&w, alpha, &mut rng).unwrap();
            let (p2, r2) = is_admissible(&w, q, alpha).expect("sampled point must be admissible");
            assert!(p.dist(p2) < 1e-9 && r.dist(r2) < 1e-9);
            for ratio in split_ratios(&w, p, q, r) {
                assert!((1.0 / 8.0 - 1e-12..=7.0 / 8.0 + 1e-12).contains(&ratio), "ratio {ratio}");
            }
        }
        assert_eq!(sample_admissible(&w, 0.0, &mut rng), Err(AdmissibleError::ZeroBudget));
    }

    #[test]
    fn sampled_t_has_zero_mean() {
        let w = canonical_wedge();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| sample_admissible(&w, 1.0, &mut rng).unwrap().0.x).sum::<f64>() / n as f64;
        // Var(t) = 1/12 for t uniform on [-1/2, 1/2]
        let sigma = (1.0 / 12.0 / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * sigma, "mean {mean}");
    }
}
