//! Planar primitives: pseudo-scalar products, signed doubled areas, affine
//! maps onto the canonical triangle, convexity predicates.
//!
//! Orientation convention: for a triangle `ABC` the signed doubled area is
//! `S(ABC) = AC x CB`. The canonical triangle `A = (-1, 1)`, `B = (1, 1)`,
//! `C = (0, -1)` has `S = +4` (plain area 2).

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Relative tolerance for degeneracy tests, applied to squared bounding-box scale.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Minimum `|sin|` of a turn angle for it to count as strictly convex.
pub const TURN_TOL: f64 = 1e-12;

/// Ratio bound of the segment-shrinkage lemma.
pub const SHRINK_FACTOR: f64 = 399.0 / 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: Point) -> f64 {
        (*self - other).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Pseudo-scalar (2D cross) product `u.x * v.y - u.y * v.x`.
#[inline]
pub fn cross(u: Point, v: Point) -> f64 {
    u.x * v.y - u.y * v.x
}

/// Signed doubled area `S(abc) = (c - a) x (b - c)`.
#[inline]
pub fn doubled_area(a: Point, b: Point, c: Point) -> f64 {
    cross(c - a, b - c)
}

fn bbox_scale(points: &[Point]) -> f64 {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        lo_x = lo_x.min(p.x);
        hi_x = hi_x.max(p.x);
        lo_y = lo_y.min(p.y);
        hi_y = hi_y.max(p.y);
    }
    (hi_x - lo_x).max(hi_y - lo_y)
}

/// Ordered triangle. For wedges and chain roots the order is
/// (chain start, chain end, apex).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    /// Validating constructor: rejects non-finite or degenerate input.
    pub fn new(a: Point, b: Point, c: Point) -> Result<Self, GeometryError> {
        let t = Self { a, b, c };
        t.validate()?;
        Ok(t)
    }

    pub fn canonical() -> Self {
        Self {
            a: Point::new(-1.0, 1.0),
            b: Point::new(1.0, 1.0),
            c: Point::new(0.0, -1.0),
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let s = self.doubled_area();
        let scale = bbox_scale(&[self.a, self.b, self.c]);
        if s.abs() <= DEGENERACY_TOL * scale * scale || s == 0.0 {
            return Err(GeometryError::Degenerate { area: s });
        }
        Ok(())
    }

    pub fn doubled_area(&self) -> f64 {
        doubled_area(self.a, self.b, self.c)
    }

    pub fn plain_area(&self) -> f64 {
        self.doubled_area().abs() / 2.0
    }

    pub fn longest_side(&self) -> f64 {
        self.a.dist(self.b).max(self.b.dist(self.c)).max(self.c.dist(self.a))
    }

    pub fn vertices(&self) -> [Point; 3] {
        [self.a, self.b, self.c]
    }

    /// Strict interior test, orientation independent.
    pub fn contains_strictly(&self, p: Point) -> bool {
        let s = self.doubled_area().signum();
        let d1 = doubled_area(self.a, self.b, p) * s;
        let d2 = doubled_area(self.b, self.c, p) * s;
        let d3 = doubled_area(self.c, self.a, p) * s;
        // every sub-triangle has the parent's orientation when p is inside
        d1 > 0.0 && d2 > 0.0 && d3 > 0.0
    }

    /// Closed containment with a relative slack on the sub-areas.
    pub fn contains(&self, p: Point, rel_tol: f64) -> bool {
        let s = self.doubled_area();
        let slack = -rel_tol * s.abs();
        let sg = s.signum();
        doubled_area(self.a, self.b, p) * sg >= slack
            && doubled_area(self.b, self.c, p) * sg >= slack
            && doubled_area(self.c, self.a, p) * sg >= slack
    }
}

/// `x -> linear * x + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: [[f64; 2]; 2],
    pub translation: Point,
    pub determinant: f64,
}

impl AffineMap {
    pub fn identity() -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]], Point::default())
    }

    pub fn new(linear: [[f64; 2]; 2], translation: Point) -> Self {
        let determinant = linear[0][0] * linear[1][1] - linear[0][1] * linear[1][0];
        Self { linear, translation, determinant }
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        let m = &self.linear;
        Point::new(
            m[0][0] * p.x + m[0][1] * p.y + self.translation.x,
            m[1][0] * p.x + m[1][1] * p.y + self.translation.y,
        )
    }

    #[inline]
    pub fn apply_linear(&self, v: Point) -> Point {
        let m = &self.linear;
        Point::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        let det = self.determinant;
        if !det.is_finite() || det == 0.0 {
            return Err(GeometryError::Singular { det });
        }
        let m = &self.linear;
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let t = self.translation;
        let translation = Point::new(
            -(inv[0][0] * t.x + inv[0][1] * t.y),
            -(inv[1][0] * t.x + inv[1][1] * t.y),
        );
        Ok(Self::new(inv, translation))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> Self {
        let a = &self.linear;
        let b = &other.linear;
        let linear = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        Self::new(linear, self.apply(other.translation))
    }

    /// Ratio of image plain area to source plain area.
    pub fn area_scale(&self) -> f64 {
        self.determinant.abs()
    }
}

/// Unique affine map sending (chain start, chain end, apex) to
/// `(-1, 1)`, `(1, 1)`, `(0, -1)`.
pub fn canonical_map(w: &Triangle) -> Result<AffineMap, GeometryError> {
    w.validate()?;
    // source frame columns u = b - a, v = c - a; target U = (2, 0), V = (1, -2)
    let u = w.b - w.a;
    let v = w.c - w.a;
    let det = u.x * v.y - v.x * u.y;
    let inv = [[v.y / det, -v.x / det], [-u.y / det, u.x / det]];
    let target = [[2.0, 1.0], [0.0, -2.0]];
    let mut linear = [[0.0; 2]; 2];
    for (r, row) in linear.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = target[r][0] * inv[0][c] + target[r][1] * inv[1][c];
        }
    }
    let partial = AffineMap::new(linear, Point::default());
    let image_a = partial.apply(w.a);
    Ok(AffineMap::new(linear, Point::new(-1.0 - image_a.x, 1.0 - image_a.y)))
}

/// True iff every consecutive turn of the polyline has the same strict sign.
pub fn is_strictly_convex(chain: &[Point]) -> bool {
    if chain.len() < 3 {
        return false;
    }
    let mut sign = 0.0;
    for w in chain.windows(3) {
        let u = w[1] - w[0];
        let v = w[2] - w[1];
        let c = cross(u, v);
        if !(c.abs() > TURN_TOL * u.norm() * v.norm()) {
            return false;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

/// Whether a single turn `a -> b -> c` is strict and has the given orientation sign.
pub fn is_strict_turn(a: Point, b: Point, c: Point, sign: f64) -> bool {
    let u = b - a;
    let v = c - b;
    let cr = cross(u, v);
    cr.abs() > TURN_TOL * u.norm() * v.norm() && cr.signum() == sign
}

/// Parameter `s` with `p = a + s (b - a)` when `p` is within `rel_tol * |ab|`
/// of the line through `a, b` and `s` lies in `[-rel_tol, 1 + rel_tol]`.
pub fn segment_parameter(p: Point, a: Point, b: Point, rel_tol: f64) -> Option<f64> {
    let d = b - a;
    let len2 = d.x * d.x + d.y * d.y;
    if len2 == 0.0 {
        return None;
    }
    let len = len2.sqrt();
    let off = cross(d, p - a).abs() / len;
    if off > rel_tol * len {
        return None;
    }
    let s = ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2;
    (s >= -rel_tol && s <= 1.0 + rel_tol).then_some(s)
}

/// Intersection of lines `p1 p2` and `p3 p4`; `None` when parallel.
pub fn line_intersection(p1: Point, p2: Point, p3: Point, p4: Point) -> Option<Point> {
    let d1 = p2 - p1;
    let d2 = p4 - p3;
    let den = cross(d1, d2);
    if den == 0.0 {
        return None;
    }
    let s = cross(p3 - p1, d2) / den;
    Some(p1 + d1 * s)
}

/// Checks the 399/400 segment bound for `P` on `AC`, `R` on `BC`, `Q` on `PR`.
///
/// Precondition failures (points off their segments, ratios `AP:AC`,
/// `PQ:PR`, `BR:BC` outside `[1/8, 7/8]`) are errors; `Ok(false)` means the
/// preconditions held but some length exceeded `(399/400) m + slack`.
pub fn segment_bound_check(t: &Triangle, p: Point, q: Point, r: Point) -> Result<bool, GeometryError> {
    segment_bound_check_with_slack(t, p, q, r, 1e-12)
}

pub fn segment_bound_check_with_slack(
    t: &Triangle,
    p: Point,
    q: Point,
    r: Point,
    slack: f64,
) -> Result<bool, GeometryError> {
    t.validate()?;
    const ON_TOL: f64 = 1e-9;
    const RATIO_TOL: f64 = 1e-9;
    let (a, b, c) = (t.a, t.b, t.c);
    let ap = segment_parameter(p, a, c, ON_TOL)
        .ok_or_else(|| GeometryError::Precondition("P is not on side AC".into()))?;
    let br = segment_parameter(r, b, c, ON_TOL)
        .ok_or_else(|| GeometryError::Precondition("R is not on side BC".into()))?;
    let pq = segment_parameter(q, p, r, ON_TOL)
        .ok_or_else(|| GeometryError::Precondition("Q is not on segment PR".into()))?;
    for (name, ratio) in [("AP:AC", ap), ("PQ:PR", pq), ("BR:BC", br)] {
        if !(1.0 / 8.0 - RATIO_TOL..=7.0 / 8.0 + RATIO_TOL).contains(&ratio) {
            return Err(GeometryError::Precondition(format!("{name} = {ratio} outside [1/8, 7/8]")));
        }
    }
    let bound = SHRINK_FACTOR * t.longest_side() + slack;
    let lengths = [a.dist(p), p.dist(q), q.dist(r), r.dist(b), a.dist(q), q.dist(b)];
    Ok(lengths.iter().all(|&l| l <= bound))
}
