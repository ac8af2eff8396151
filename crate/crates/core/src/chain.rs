//! Inscribed chain pairs and the generalized affine length.
//!
//! The inner chain `A = C_0, C_1, ..., C_n = B` is inscribed in the outer
//! chain `A, D_1, ..., D_n, B`: each `C_k` (0 < k < n) lies on `[D_k, D_{k+1}]`.
//! Wedge `i` (0-based) is the triangle `C_i D_{i+1} C_{i+1}`, and the affine
//! length is the sum of the cube roots of the wedge doubled areas.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, GeometryError};
use crate::geometry::{doubled_area, is_strict_turn, is_strictly_convex, segment_parameter, Point, Triangle};

/// Relative tolerance for "point lies on segment" checks.
pub const ON_SEGMENT_TOL: f64 = 1e-9;

/// `ell` is recomputed from the wedge areas after this many insertions.
pub const RESYNC_INTERVAL: usize = 1024;

/// Triangle `C_{i-1} D_i C_i` between consecutive inner vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub c_prev: Point,
    pub apex: Point,
    pub c_next: Point,
    /// Unsigned doubled area.
    pub s: f64,
}

impl Wedge {
    pub fn new(c_prev: Point, apex: Point, c_next: Point) -> Result<Self, GeometryError> {
        Self::from_triangle(&Triangle::new(c_prev, c_next, apex)?)
    }

    /// Wedge from a triangle ordered (chain start, chain end, apex).
    pub fn from_triangle(t: &Triangle) -> Result<Self, GeometryError> {
        t.validate()?;
        Ok(Self { c_prev: t.a, apex: t.c, c_next: t.b, s: t.doubled_area().abs() })
    }

    /// As a triangle ordered (chain start, chain end, apex).
    pub fn triangle(&self) -> Triangle {
        Triangle { a: self.c_prev, b: self.c_next, c: self.apex }
    }

    pub fn plain_area(&self) -> f64 {
        self.s / 2.0
    }

    pub fn longest_side(&self) -> f64 {
        self.triangle().longest_side()
    }
}

/// Result of one accepted insertion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    pub decrement: f64,
    pub parent: Wedge,
    pub children: [Wedge; 2],
}

/// Serializable snapshot of a pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub root: Triangle,
    pub inner: Vec<Point>,
    pub outer: Vec<Point>,
    pub ell: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InscribedChainPair {
    root: Triangle,
    inner: Vec<Point>,
    outer: Vec<Point>,
    wedges: Vec<Wedge>,
    ell: f64,
    /// Turn orientation of the inner chain.
    sign: f64,
    since_resync: usize,
}

impl InscribedChainPair {
    /// `gamma_1 = AB` inscribed in `gamma_1' = ACB`, for a root ordered (A, B, C).
    pub fn initial(root: &Triangle) -> Result<Self, ChainError> {
        let w = Wedge::from_triangle(root)?;
        Ok(Self {
            root: *root,
            inner: vec![root.a, root.b],
            outer: vec![root.a, root.c, root.b],
            wedges: vec![w],
            ell: w.s.cbrt(),
            sign: root.doubled_area().signum(),
            since_resync: 0,
        })
    }

    pub fn root(&self) -> &Triangle {
        &self.root
    }

    pub fn inner(&self) -> &[Point] {
        &self.inner
    }

    pub fn outer(&self) -> &[Point] {
        &self.outer
    }

    pub fn wedges(&self) -> &[Wedge] {
        &self.wedges
    }

    pub fn wedge_count(&self) -> usize {
        self.wedges.len()
    }

    /// Cached affine length.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// Affine length recomputed from the wedges.
    pub fn affine_length(&self) -> f64 {
        self.wedges.iter().map(|w| w.s.cbrt()).sum()
    }

    /// Total plain area between the chains.
    pub fn gap_area(&self) -> f64 {
        self.wedges.iter().map(Wedge::plain_area).sum()
    }

    /// Splits wedge `i` at `q`, replacing its apex by `p` and `r`.
    ///
    /// Rejected inputs leave the pair untouched.
    pub fn insert(&mut self, i: usize, q: Point, p: Point, r: Point) -> Result<Insertion, ChainError> {
        let parent = *self
            .wedges
            .get(i)
            .ok_or(ChainError::WedgeIndex { index: i, count: self.wedges.len() })?;
        if !(q.is_finite() && p.is_finite() && r.is_finite()) {
            return Err(ChainError::Rejected("non-finite point".into()));
        }
        let Some(ap) = segment_parameter(p, parent.c_prev, parent.apex, ON_SEGMENT_TOL) else {
            return Err(ChainError::Rejected("P is not on the incoming outer segment".into()));
        };
        let Some(rc) = segment_parameter(r, parent.apex, parent.c_next, ON_SEGMENT_TOL) else {
            return Err(ChainError::Rejected("R is not on the outgoing outer segment".into()));
        };
        if !parent.triangle().contains_strictly(q) {
            return Err(ChainError::Rejected("Q is not strictly inside the wedge".into()));
        }
        let Some(pq) = segment_parameter(q, p, r, ON_SEGMENT_TOL) else {
            return Err(ChainError::Rejected("P, Q, R are not collinear in order".into()));
        };

        // Child areas from the split ratios rather than from the vertices: on
        // thin wedges the vertex form loses the digits that keep the
        // decrement nonnegative, while the ratio form satisfies
        // (xyz)^(1/3) + ((1-x)(1-y)(1-z))^(1/3) <= 1 term by term.
        let (x, y, z) = (ap.clamp(0.0, 1.0), pq.clamp(0.0, 1.0), (1.0 - rc).clamp(0.0, 1.0));
        let f1 = x * y * (1.0 - z);
        let f2 = (1.0 - x) * (1.0 - y) * z;
        let (s1, s2) = (parent.s * f1, parent.s * f2);
        if !(s1 > 0.0 && s2 > 0.0) {
            return Err(ChainError::Rejected("degenerate child wedge".into()));
        }
        let decrement = parent.s.cbrt() * (1.0 - f1.cbrt() - f2.cbrt());
        if decrement < -1e-12 {
            return Err(ChainError::Invariant(format!("negative decrement {decrement:e}")));
        }

        // Only the turns at C_{i-1}, Q and C_i change.
        let n = self.inner.len();
        let before = (i > 0).then(|| self.inner[i - 1]);
        let after = (i + 2 < n).then(|| self.inner[i + 2]);
        let (c_prev, c_next) = (self.inner[i], self.inner[i + 1]);
        let turns_ok = before.is_none_or(|b| is_strict_turn(b, c_prev, q, self.sign))
            && is_strict_turn(c_prev, q, c_next, self.sign)
            && after.is_none_or(|a| is_strict_turn(q, c_next, a, self.sign));
        if !turns_ok {
            return Err(ChainError::Invariant("insertion would break strict convexity".into()));
        }

        let children = [
            Wedge { c_prev: parent.c_prev, apex: p, c_next: q, s: s1 },
            Wedge { c_prev: q, apex: r, c_next: parent.c_next, s: s2 },
        ];
        self.inner.insert(i + 1, q);
        self.outer[i + 1] = p;
        self.outer.insert(i + 2, r);
        self.wedges[i] = children[0];
        self.wedges.insert(i + 1, children[1]);
        self.ell -= decrement;
        self.since_resync += 1;
        if self.since_resync >= RESYNC_INTERVAL {
            self.ell = self.affine_length();
            self.since_resync = 0;
        }
        Ok(Insertion { decrement, parent, children })
    }

    /// Full invariant check.
    pub fn validate(&self) -> Result<(), ChainError> {
        let n = self.wedges.len();
        let bad = |m: String| Err(ChainError::Invariant(m));
        if n == 0 || self.inner.len() != n + 1 || self.outer.len() != n + 2 {
            return bad(format!(
                "size mismatch: {} wedges, {} inner, {} outer",
                n,
                self.inner.len(),
                self.outer.len()
            ));
        }
        if self.inner[0] != self.root.a || self.inner[n] != self.root.b {
            return bad("inner chain endpoints differ from the root".into());
        }
        if self.outer[0] != self.root.a || self.outer[n + 1] != self.root.b {
            return bad("outer chain endpoints differ from the root".into());
        }
        for (i, w) in self.wedges.iter().enumerate() {
            if w.c_prev != self.inner[i] || w.c_next != self.inner[i + 1] || w.apex != self.outer[i + 1] {
                return bad(format!("wedge {i} does not match the chains"));
            }
            let s = doubled_area(w.c_prev, w.c_next, w.apex).abs();
            if !(w.s > 0.0) || (s - w.s).abs() > 1e-9 * w.s.max(s) + area_rounding(w) {
                return bad(format!("wedge {i} cached area {} vs {}", w.s, s));
            }
        }
        if n >= 2 && !is_strictly_convex(&self.inner) {
            return bad("inner chain is not strictly convex".into());
        }
        for k in 1..n {
            if segment_parameter(self.inner[k], self.outer[k], self.outer[k + 1], ON_SEGMENT_TOL).is_none() {
                return bad(format!("inner vertex {k} is off its outer segment"));
            }
        }
        for win in self.outer.windows(3) {
            let u = win[1] - win[0];
            let v = win[2] - win[1];
            let c = crate::geometry::cross(u, v);
            if c * self.sign < -1e-9 * u.norm() * v.norm() {
                return bad("outer chain is not convex".into());
            }
        }
        for p in self.inner.iter().chain(self.outer.iter()) {
            if !self.root.contains(*p, 1e-9) {
                return bad(format!("vertex ({}, {}) outside the root triangle", p.x, p.y));
            }
        }
        let fresh = self.affine_length();
        if (fresh - self.ell).abs() > 1e-9 * fresh.max(1e-300) {
            return bad(format!("cached affine length {} vs recomputed {}", self.ell, fresh));
        }
        Ok(())
    }

    pub fn to_record(&self) -> PairRecord {
        PairRecord {
            root: self.root,
            inner: self.inner.clone(),
            outer: self.outer.clone(),
            ell: self.ell,
        }
    }

    /// Rebuilds a pair from a snapshot, validating every invariant.
    pub fn from_record(rec: &PairRecord) -> Result<Self, ChainError> {
        rec.root.validate()?;
        let n = rec.inner.len().saturating_sub(1);
        if n == 0 || rec.outer.len() != n + 2 {
            return Err(ChainError::Invariant("chain lengths are inconsistent".into()));
        }
        let mut wedges = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b, c) = (rec.inner[i], rec.inner[i + 1], rec.outer[i + 1]);
            if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                return Err(ChainError::Geometry(GeometryError::NonFinite));
            }
            let s = doubled_area(a, b, c).abs();
            if !(s > 0.0) {
                return Err(ChainError::Invariant(format!("wedge {i} is degenerate")));
            }
            wedges.push(Wedge { c_prev: a, apex: c, c_next: b, s });
        }
        // The recorded length was accumulated from split ratios, the areas
        // above from coordinates; they agree up to the coordinates' rounding.
        let fresh: f64 = wedges.iter().map(|w| w.s.cbrt()).sum();
        let slack: f64 = wedges.iter().map(|w| area_rounding(w) / (3.0 * w.s.powf(2.0 / 3.0))).sum();
        if !((rec.ell - fresh).abs() <= 1e-9 * fresh + slack) {
            return Err(ChainError::Invariant(format!("recorded affine length {} vs recomputed {fresh}", rec.ell)));
        }
        let pair = Self {
            root: rec.root,
            inner: rec.inner.clone(),
            outer: rec.outer.clone(),
            wedges,
            ell: fresh,
            sign: rec.root.doubled_area().signum(),
            since_resync: 0,
        };
        pair.validate()?;
        Ok(pair)
    }
}

/// Bound on the rounding error of the doubled area computed from the
/// wedge's coordinates: differences of coordinates of magnitude `M` carry
/// absolute error about `eps M`, which the cross product multiplies by the
/// edge lengths.
fn area_rounding(w: &Wedge) -> f64 {
    let m = [w.c_prev, w.apex, w.c_next].iter().fold(0.0f64, |acc, p| acc.max(p.x.abs()).max(p.y.abs()));
    let u = (w.c_next - w.c_prev).norm();
    let v = (w.apex - w.c_prev).norm();
    64.0 * f64::EPSILON * (m * (u + v) + u * v)
}

impl Serialize for InscribedChainPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InscribedChainPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = PairRecord::deserialize(deserializer)?;
        Self::from_record(&rec).map_err(serde::de::Error::custom)
    }
}

/// Initial pair for a root triangle ordered (A, B, C).
pub fn initial_pair(root: &Triangle) -> Result<InscribedChainPair, ChainError> {
    InscribedChainPair::initial(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::err;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn initial_pair_lengths() {
        let pair = initial_pair(&Triangle::canonical()).unwrap();
        assert!((pair.ell() - 4f64.cbrt()).abs() < 1e-15);
        assert!((4f64.cbrt() - 1.5874).abs() < 1e-4);
        let unit = Triangle::new(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)).unwrap();
        assert!((initial_pair(&unit).unwrap().ell() - 1.0).abs() < 1e-15);
        pair.validate().unwrap();
        assert_eq!(pair.wedge_count(), 1);
    }

    #[test]
    fn scaling_root_scales_length() {
        let lambda: f64 = 3.7;
        let base = Triangle::canonical();
        let scaled = Triangle { a: base.a * lambda, b: base.b * lambda, c: base.c * lambda };
        let l0 = initial_pair(&base).unwrap().ell();
        let l1 = initial_pair(&scaled).unwrap().ell();
        assert!((l1 / l0 - lambda.powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_root_rejected() {
        let t = Triangle { a: p(0.0, 0.0), b: p(1.0, 0.0), c: p(2.0, 0.0) };
        assert!(initial_pair(&t).is_err());
    }

    #[test]
    fn symmetric_canonical_insertion_is_free() {
        let mut pair = initial_pair(&Triangle::canonical()).unwrap();
        let ins = pair.insert(0, p(0.0, 0.0), p(-0.5, 0.0), p(0.5, 0.0)).unwrap();
        assert!((ins.children[0].s - 0.5).abs() < 1e-15);
        assert!((ins.children[1].s - 0.5).abs() < 1e-15);
        assert!(ins.decrement.abs() < 1e-15);
        assert!((pair.affine_length() - 4f64.cbrt()).abs() < 1e-12);
        assert_eq!(pair.wedge_count(), 2);
        assert_eq!(pair.inner().len(), 3);
        pair.validate().unwrap();
    }

    #[test]
    fn two_wedge_affine_length() {
        // wedge doubled areas 1 and 8
        let rec = PairRecord {
            root: Triangle { a: p(0.0, 0.0), b: p(20.0, 0.0), c: p(10.0, 20.0) },
            inner: vec![p(0.0, 0.0), p(5.0, 1.0), p(20.0, 0.0)],
            outer: vec![p(0.0, 0.0), p(4.0, 1.0), p(13.0, 1.0), p(20.0, 0.0)],
            ell: 3.0,
        };
        let pair = InscribedChainPair::from_record(&rec).unwrap();
        let s: Vec<f64> = pair.wedges().iter().map(|w| w.s).collect();
        assert_eq!(s, vec![1.0, 8.0]);
        assert_eq!(pair.affine_length(), 3.0);
    }

    #[test]
    fn decrement_matches_err() {
        let root = Triangle::new(p(0.0, 0.0), p(5.0, 1.0), p(2.0, -3.0)).unwrap();
        let mut pair = initial_pair(&root).unwrap();
        let pp = root.a.lerp(root.c, 0.3);
        let rr = root.c.lerp(root.b, 0.6);
        let q = pp.lerp(rr, 0.45);
        let s = pair.wedges()[0].s;
        let ins = pair.insert(0, q, pp, rr).unwrap();
        let e = err(s, ins.children[0].s, ins.children[1].s).unwrap();
        assert!((ins.decrement - e * s.cbrt()).abs() < 1e-12);
        assert!(ins.decrement >= 0.0);
        pair.validate().unwrap();
    }

    #[test]
    fn rejected_insertions_do_not_mutate() {
        let mut pair = initial_pair(&Triangle::canonical()).unwrap();
        let snapshot = pair.clone();
        // degenerate limit: Q at P
        assert!(pair.insert(0, p(-0.5, 0.0), p(-0.5, 0.0), p(0.5, 0.0)).is_err());
        // off-segment P
        assert!(pair.insert(0, p(0.0, 0.0), p(-0.5, 0.1), p(0.5, 0.0)).is_err());
        // Q outside
        assert!(pair.insert(0, p(0.0, 1.5), p(-0.5, 0.0), p(0.5, 0.0)).is_err());
        // non-collinear
        assert!(pair.insert(0, p(0.0, 0.1), p(-0.5, 0.0), p(0.5, 0.0)).is_err());
        assert!(matches!(pair.insert(3, p(0.0, 0.0), p(-0.5, 0.0), p(0.5, 0.0)), Err(ChainError::WedgeIndex { .. })));
        assert_eq!(pair, snapshot);
    }

    #[test]
    fn near_degenerate_limit_approaches_single_child() {
        // Q slides toward P: decrement tends to S^(1/3) - S(QRB)^(1/3)
        let root = Triangle::canonical();
        let pp = p(-0.5, 0.0);
        let rr = p(0.5, 0.0);
        let limit = 4f64.cbrt() - doubled_area(pp, root.b, rr).abs().cbrt();
        let mut gaps = Vec::new();
        for eps in [1e-3, 1e-6, 1e-9, 1e-12] {
            let mut pair = initial_pair(&root).unwrap();
            let ins = pair.insert(0, pp.lerp(rr, eps), pp, rr).unwrap();
            let s1 = ins.children[0].s;
            assert!((ins.decrement + s1.cbrt() + ins.children[1].s.cbrt() - 4f64.cbrt()).abs() < 1e-12);
            gaps.push((ins.decrement - limit).abs());
        }
        assert!(gaps.windows(2).all(|g| g[1] < g[0]));
        assert!(gaps[3] < 1e-3);
    }

    #[test]
    fn record_round_trip() {
        let mut pair = initial_pair(&Triangle::canonical()).unwrap();
        pair.insert(0, p(0.0, 0.0), p(-0.5, 0.0), p(0.5, 0.0)).unwrap();
        let json = serde_json::to_string(&pair).unwrap();
        let back: InscribedChainPair = serde_json::from_str(&json).unwrap();
        assert_eq!(back.inner(), pair.inner());
        assert_eq!(back.wedges(), pair.wedges());
    }

    #[test]
    fn bad_records_rejected() {
        let mut rec = initial_pair(&Triangle::canonical()).unwrap().to_record();
        rec.ell = 17.0;
        assert!(InscribedChainPair::from_record(&rec).is_err());
        let mut rec = initial_pair(&Triangle::canonical()).unwrap().to_record();
        rec.outer.pop();
        assert!(InscribedChainPair::from_record(&rec).is_err());
    }
}
