//! Seeded randomness and homogeneous Poisson sampling over unions of wedges.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::chain::Wedge;
use crate::error::SamplerError;
use crate::geometry::{Point, Triangle};

/// Means below this use sequential inversion; larger ones use PTRS rejection.
pub const INVERSION_LIMIT: f64 = 30.0;

/// ChaCha8 generator addressed by `(seed, stream)`.
///
/// Identical pairs replay identical draws; distinct streams are independent.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededGenerator {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Stream id for `(trial, slot)`; `slot` is the wedge index in theorem
/// assemblies or a replay index in miss-rate estimation.
pub fn stream_id(trial: u64, slot: u64) -> u64 {
    (trial << 32) | (slot & 0xffff_ffff)
}

/// One draw from Poisson(`mean`).
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64, SamplerError> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(SamplerError::BadMean(mean));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < INVERSION_LIMIT {
        Ok(poisson_inversion(mean, rng))
    } else {
        Ok(poisson_ptrs(mean, rng))
    }
}

fn poisson_inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // tail underflow: the remaining mass is below f64 resolution
            break;
        }
        cdf = next;
    }
    k
}

/// Hörmann's transformed rejection with squeeze (PTRS).
fn poisson_ptrs<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// Uniform point in a triangle via the square-root parametrization.
pub fn sample_triangle<R: Rng + ?Sized>(t: &Triangle, rng: &mut R) -> Point {
    let r1: f64 = rng.random::<f64>().sqrt();
    let r2: f64 = rng.random();
    t.a * (1.0 - r1) + t.b * (r1 * (1.0 - r2)) + t.c * (r1 * r2)
}

/// Cumulative weights for proportional selection.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    cumulative: Vec<f64>,
}

impl CumulativeTable {
    pub fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Index chosen with probability proportional to its weight.
    pub fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if !(total > 0.0) {
            return None;
        }
        let target = rng.random::<f64>() * total;
        let mut i = self.cumulative.partition_point(|&c| c <= target).min(self.cumulative.len() - 1);
        // only reachable when target rounds up to the total: step back over zero-weight tail entries
        while i > 0 && self.cumulative[i] == self.cumulative[i - 1] {
            i -= 1;
        }
        Some(i)
    }
}

/// Points of one Poisson realization over a union of wedges.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonBatch {
    pub points: Vec<Point>,
    /// Index of the wedge holding each point.
    pub wedge_of: Vec<usize>,
    /// Points per unit plain area.
    pub intensity: f64,
    /// Total plain area of the region.
    pub region_area: f64,
}

impl PoissonBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Poisson process of the given intensity restricted to the (non-overlapping) wedges.
pub fn sample_in_wedges<R: Rng + ?Sized>(
    intensity: f64,
    wedges: &[Wedge],
    rng: &mut R,
) -> Result<PoissonBatch, SamplerError> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(SamplerError::BadIntensity(intensity));
    }
    let table = CumulativeTable::new(wedges.iter().map(Wedge::plain_area));
    let region_area = table.total();
    let count = poisson_count(intensity * region_area, rng)? as usize;
    let mut points = Vec::with_capacity(count);
    let mut wedge_of = Vec::with_capacity(count);
    for _ in 0..count {
        let Some(i) = table.pick(rng) else { break };
        points.push(sample_triangle(&wedges[i].triangle(), rng));
        wedge_of.push(i);
    }
    Ok(PoissonBatch { points, wedge_of, intensity, region_area })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Triangle;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn zero_mean_gives_zero() {
        let mut rng = SeededGenerator::new(1, 0);
        for _ in 0..100 {
            assert_eq!(poisson_count(0.0, &mut rng).unwrap(), 0);
        }
        assert!(poisson_count(-1.0, &mut rng).is_err());
        assert!(poisson_count(f64::NAN, &mut rng).is_err());
        assert!(poisson_count(f64::INFINITY, &mut rng).is_err());
    }

    #[test]
    fn poisson_moments() {
        for (seed, mean) in [(2u64, 5.0), (3, 50.0), (4, 0.5), (5, 1234.5)] {
            let mut rng = SeededGenerator::new(seed, 0);
            let n = 100_000;
            let xs: Vec<f64> = (0..n).map(|_| poisson_count(mean, &mut rng).unwrap() as f64).collect();
            let (m, v) = mean_var(&xs);
            assert!((m - mean).abs() <= 3.0 * (mean / n as f64).sqrt(), "mean {m} vs {mean}");
            assert!((v - mean).abs() <= 0.05 * mean, "variance {v} vs {mean}");
        }
    }

    #[test]
    fn determinism_and_streams() {
        let draw = |seed, stream| {
            let mut g = SeededGenerator::new(seed, stream);
            (0..16).map(|_| g.next_u64()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9, 3), draw(9, 3));
        assert_ne!(draw(9, 3), draw(9, 4));
        assert_ne!(draw(9, 3), draw(10, 3));
        assert_ne!(stream_id(1, 0), stream_id(0, 1));
    }

    #[test]
    fn triangle_samples_inside() {
        let t = Triangle::new(Point::new(0.0, 0.0), Point::new(3.0, 0.5), Point::new(1.0, 2.0)).unwrap();
        let mut rng = SeededGenerator::new(5, 0);
        for _ in 0..10_000 {
            assert!(t.contains(sample_triangle(&t, &mut rng), 1e-12));
        }
    }

    #[test]
    fn empty_and_single_wedge_batches() {
        let w = Wedge::from_triangle(&Triangle::new(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 1.0)).unwrap()).unwrap();
        let mut rng = SeededGenerator::new(6, 0);
        assert!(sample_in_wedges(0.0, &[w], &mut rng).unwrap().is_empty());
        assert!(sample_in_wedges(-1.0, &[w], &mut rng).is_err());
        // unit plain area, intensity 3
        let trials = 10_000;
        let counts: Vec<f64> = (0..trials).map(|_| sample_in_wedges(3.0, &[w], &mut rng).unwrap().len() as f64).collect();
        let (m, _) = mean_var(&counts);
        assert!((m - 3.0).abs() <= 3.0 * (3.0 / trials as f64).sqrt(), "mean {m}");
    }

    #[test]
    fn allocation_proportional_to_area() {
        let w1 = Wedge::from_triangle(&Triangle::new(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 1.0)).unwrap()).unwrap();
        let w2 = Wedge::from_triangle(&Triangle::new(Point::new(5.0, 0.0), Point::new(11.0, 0.0), Point::new(5.0, 1.0)).unwrap()).unwrap();
        assert_eq!((w1.plain_area(), w2.plain_area()), (1.0, 3.0));
        let mut rng = SeededGenerator::new(8, 0);
        let batch = sample_in_wedges(25_000.0, &[w1, w2], &mut rng).unwrap();
        let n = batch.len() as f64;
        let frac = batch.wedge_of.iter().filter(|&&i| i == 1).count() as f64 / n;
        let sigma = (0.75 * 0.25 / n).sqrt();
        assert!((frac - 0.75).abs() < 3.0 * sigma, "fraction {frac}");
        for (p, &i) in batch.points.iter().zip(&batch.wedge_of) {
            assert!([w1, w2][i].triangle().contains(*p, 1e-12));
        }
    }

    #[test]
    fn cumulative_table_skips_zero_weights() {
        let table = CumulativeTable::new([0.0, 1.0, 0.0, 0.0]);
        let mut rng = SeededGenerator::new(12, 0);
        for _ in 0..1000 {
            assert_eq!(table.pick(&mut rng), Some(1));
        }
        assert_eq!(CumulativeTable::new([0.0, 0.0]).pick(&mut rng), None);
    }
}
