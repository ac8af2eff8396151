//! SVG figures of a chain pair: root triangle, inner chain solid, outer
//! chain dashed, and optionally the admissible bands shaded.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::admissible::AdmissibleBand;
use crate::chain::{InscribedChainPair, PairRecord};
use crate::error::ExperimentError;
use crate::geometry::Point;

/// Canvas size in SVG user units.
const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
/// Samples per band boundary.
const BAND_SAMPLES: usize = 24;

/// What gets drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub pair: InscribedChainPair,
    /// Budget for the shaded bands, if any.
    #[serde(default)]
    pub band_alpha: Option<f64>,
}

impl Snapshot {
    pub fn from_json_str(text: &str) -> Result<Self, ExperimentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn record(&self) -> PairRecord {
        self.pair.to_record()
    }
}

struct Frame {
    min: Point,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Point]) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let scale = if span > 0.0 { (CANVAS - 2.0 * MARGIN) / span } else { 1.0 };
        Frame { min: lo, scale }
    }

    /// Canvas coordinates, y pointing down.
    fn map(&self, p: Point) -> (f64, f64) {
        let x = MARGIN + (p.x - self.min.x) * self.scale;
        let y = CANVAS - MARGIN - (p.y - self.min.y) * self.scale;
        (x, y)
    }

    fn points(&self, pts: &[Point]) -> String {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{},{}", num(x), num(y));
        }
        s
    }
}

/// Fixed four-decimal rendering; negative zero prints as `0.0000`.
fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn band_outline(band: &AdmissibleBand) -> Vec<Point> {
    let (t0, t1) = band.t_range;
    let ts: Vec<f64> = (0..=BAND_SAMPLES).map(|k| t0 + (t1 - t0) * k as f64 / BAND_SAMPLES as f64).collect();
    let upper = ts.iter().map(|&t| band.from_canonical(Point::new(t, t * t + band.delta)));
    let lower = ts.iter().rev().map(|&t| band.from_canonical(Point::new(t, t * t - band.delta)));
    upper.chain(lower).collect()
}

/// SVG document for a snapshot.
pub fn svg_string(snapshot: &Snapshot) -> Result<String, ExperimentError> {
    scene_svg(&[&snapshot.pair], snapshot.band_alpha)
}

/// SVG document for several pairs sharing one frame, such as the wedges of a
/// theorem assembly.
pub fn scene_svg(pairs: &[&InscribedChainPair], band_alpha: Option<f64>) -> Result<String, ExperimentError> {
    let corners: Vec<Point> = pairs.iter().flat_map(|p| p.root().vertices()).collect();
    if corners.is_empty() {
        return Err(ExperimentError::Config("nothing to render".into()));
    }
    let frame = Frame::fit(&corners);
    let mut doc = String::new();
    let _ = writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(doc, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, pair) in pairs.iter().enumerate() {
        let _ = writeln!(doc, r#"<g id="pair{k}">"#);
        let _ = writeln!(
            doc,
            r##"<polygon class="root" points="{}" fill="none" stroke="#999999" stroke-width="1"/>"##,
            frame.points(&pair.root().vertices())
        );
        if let Some(alpha) = band_alpha {
            let _ = writeln!(doc, r##"<g class="bands" fill="#4a90d9" fill-opacity="0.35" stroke="none">"##);
            for (i, w) in pair.wedges().iter().enumerate() {
                let band = AdmissibleBand::new(i, w, alpha)?;
                if band.delta > 0.0 {
                    let _ = writeln!(doc, r#"<polygon points="{}"/>"#, frame.points(&band_outline(&band)));
                }
            }
            let _ = writeln!(doc, "</g>");
        }
        let _ = writeln!(
            doc,
            r##"<polyline class="outer" points="{}" fill="none" stroke="#000000" stroke-width="1" stroke-dasharray="6 4"/>"##,
            frame.points(pair.outer())
        );
        let _ = writeln!(
            doc,
            r##"<polyline class="inner" points="{}" fill="none" stroke="#000000" stroke-width="2"/>"##,
            frame.points(pair.inner())
        );
        let _ = writeln!(doc, "</g>");
    }
    doc.push_str("</svg>\n");
    Ok(doc)
}

/// Writes the snapshot's SVG to `path`.
pub fn render_svg(snapshot: &Snapshot, path: &Path) -> Result<(), ExperimentError> {
    std::fs::write(path, svg_string(snapshot)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Triangle;

    #[test]
    fn initial_pair_is_triangle_and_chord() {
        let snap = Snapshot { pair: InscribedChainPair::initial(&Triangle::canonical()).unwrap(), band_alpha: None };
        let svg = svg_string(&snap).unwrap();
        assert!(svg.contains(r#"class="root""#));
        assert!(!svg.contains(r#"class="bands""#));
        // inner chain is the single chord A B
        let inner = svg.lines().find(|l| l.contains(r#"class="inner""#)).unwrap();
        assert!(inner.contains(r#"points="20.0000,20.0000 780.0000,20.0000""#), "{inner}");
        assert_eq!(svg, svg_string(&snap).unwrap());
    }

    #[test]
    fn num_formatting() {
        assert_eq!(num(-0.0), "0.0000");
        assert_eq!(num(-0.00001), "0.0000");
        assert_eq!(num(1.23456), "1.2346");
    }
}
