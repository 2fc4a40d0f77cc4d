//! Interest-point distributions of a single sensor frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, normalized horizontal coordinates of the interest points of one
/// frame. The CDF is the right-continuous step function counting points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameDistribution {
    points: Vec<f64>,
}

impl FrameDistribution {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if let Some(bad) = points.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("interest point {bad} outside [0, 1]")));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self { points })
    }

    /// `count` points on the lattice `(k - 0.5) / count`.
    pub fn exact_uniform(count: usize) -> Self {
        let n = count as f64;
        Self {
            points: (1..=count).map(|k| (k as f64 - 0.5) / n).collect(),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points `<= x`.
    pub fn cdf(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p <= x)
    }

    /// Points in the slice `(a, b]`; the first slice (`a == 0`) also owns
    /// points sitting exactly on the left frame edge.
    pub fn slice_count(&self, a: f64, b: f64) -> usize {
        let lo = if a <= 0.0 { 0 } else { self.cdf(a) };
        self.cdf(b).saturating_sub(lo)
    }

    /// The `Q - 1` pixel quantiles
    /// `q(p) = min { x in 0..=w : p/Q <= F(x/w) / count }`, `1 <= p < Q`.
    ///
    /// An empty distribution yields all zeros; check [`Self::is_empty`].
    pub fn quantile_vector(&self, quantiles: usize, width: u32) -> Vec<u32> {
        let n = self.points.len();
        if n == 0 {
            return vec![0; quantiles.saturating_sub(1)];
        }
        (1..quantiles)
            .map(|p| {
                // F is integer valued, so p/Q <= F/n  <=>  F >= ceil(p n / Q).
                let needed = (p * n).div_ceil(quantiles).max(1);
                let z = self.points[needed - 1];
                let px = (z * f64::from(width) - 1e-9).ceil().max(0.0) as u32;
                // guard against the tolerance pulling us one pixel too far left
                if self.cdf(f64::from(px) / f64::from(width)) < needed {
                    px + 1
                } else {
                    px
                }
                .min(width)
            })
            .collect()
    }
}

/// Piecewise-linear CDF through the pixel quantiles `(q(p)/w, p/Q)`, scaled to
/// the point count. Repeated quantiles produce jumps; evaluation is
/// right-continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCdf {
    xs: Vec<f64>,
    ys: Vec<f64>,
    total: f64,
}

impl PiecewiseCdf {
    pub fn from_quantiles(quantiles: &[u32], width: u32, total: f64) -> Self {
        let q = (quantiles.len() + 1) as f64;
        let mut xs = Vec::with_capacity(quantiles.len() + 2);
        let mut ys = Vec::with_capacity(quantiles.len() + 2);
        xs.push(0.0);
        ys.push(0.0);
        for (i, &px) in quantiles.iter().enumerate() {
            xs.push(f64::from(px) / f64::from(width));
            ys.push(total * (i + 1) as f64 / q);
        }
        xs.push(1.0);
        ys.push(total);
        Self { xs, ys, total }
    }

    pub fn from_distribution(dist: &FrameDistribution, quantiles: usize, width: u32) -> Self {
        Self::from_quantiles(
            &dist.quantile_vector(quantiles, width),
            width,
            dist.point_count() as f64,
        )
    }

    /// Exactly linear CDF carrying `total` points.
    pub fn uniform(total: f64) -> Self {
        Self {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, total],
            total,
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Abscissae of the knots, ascending.
    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return self.total;
        }
        if x <= 0.0 {
            // right limit at zero; includes a jump sitting on the edge
            let k = self.xs.partition_point(|&k| k <= 0.0);
            return self.ys[k - 1];
        }
        let k = self.xs.partition_point(|&k| k <= x);
        let (x0, y0) = (self.xs[k - 1], self.ys[k - 1]);
        let (x1, y1) = (self.xs[k], self.ys[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Mass in `(a, b]`, with the first slice owning everything from 0.
    pub fn slice_mass(&self, a: f64, b: f64) -> f64 {
        let lo = if a <= 0.0 { 0.0 } else { self.eval(a) };
        (self.eval(b) - lo).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cdf_counts_points_at_or_below() {
        let d = FrameDistribution::new(vec![0.9, 0.1, 0.2]).unwrap();
        assert_eq!(d.cdf(0.5), 2);
        assert_eq!(d.cdf(1.0), 3);
        assert_eq!(d.cdf(0.1), 1);
        assert_eq!(d.cdf(0.0), 0);
        let u = FrameDistribution::exact_uniform(400);
        assert_eq!(u.cdf(0.5), 200);
    }

    #[test]
    fn rejects_points_outside_unit_interval() {
        assert!(FrameDistribution::new(vec![0.2, 1.2]).is_err());
        assert!(FrameDistribution::new(vec![-0.1]).is_err());
    }

    #[test]
    fn quantiles_follow_infimum_definition() {
        let d = FrameDistribution::new(vec![0.1, 0.2, 0.9]).unwrap();
        assert_eq!(d.quantile_vector(2, 720), vec![144]);
        let u = FrameDistribution::exact_uniform(400);
        assert_eq!(u.quantile_vector(4, 720), vec![180, 360, 540]);
        let mass = FrameDistribution::new(vec![100.0 / 720.0; 50]).unwrap();
        assert_eq!(mass.quantile_vector(8, 720), vec![100; 7]);
    }

    #[test]
    fn empty_distribution_gives_zero_quantiles() {
        let d = FrameDistribution::default();
        assert!(d.is_empty());
        assert_eq!(d.quantile_vector(4, 720), vec![0, 0, 0]);
    }

    /// Enumerate every pixel and apply the infimum literally.
    fn brute_quantiles(d: &FrameDistribution, q: usize, w: u32) -> Vec<u32> {
        let n = d.point_count() as f64;
        (1..q)
            .map(|p| {
                (0..=w)
                    .find(|&x| p as f64 / q as f64 <= d.cdf(f64::from(x) / f64::from(w)) as f64 / n)
                    .unwrap()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn quantiles_match_enumeration(pts in prop::collection::vec(0.0f64..=1.0, 1..60), q in 2usize..12) {
            let d = FrameDistribution::new(pts).unwrap();
            prop_assert_eq!(d.quantile_vector(q, 720), brute_quantiles(&d, q, 720));
        }

        #[test]
        fn quantiles_nondecreasing_and_duplication_invariant(pts in prop::collection::vec(0.0f64..=1.0, 1..60), q in 2usize..20) {
            let d = FrameDistribution::new(pts.clone()).unwrap();
            let qv = d.quantile_vector(q, 720);
            prop_assert!(qv.windows(2).all(|w| w[0] <= w[1]));
            let doubled = FrameDistribution::new(pts.iter().chain(pts.iter()).copied().collect()).unwrap();
            prop_assert_eq!(doubled.quantile_vector(q, 720), qv);
        }

        #[test]
        fn cdf_monotone_and_bounded(pts in prop::collection::vec(0.0f64..=1.0, 0..60), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let d = FrameDistribution::new(pts).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(d.cdf(lo) <= d.cdf(hi));
            prop_assert!(d.cdf(hi) <= d.point_count());
            prop_assert_eq!(d.cdf(1.0), d.point_count());
        }
    }

    #[test]
    fn piecewise_cdf_interpolates_and_jumps() {
        let u = FrameDistribution::exact_uniform(400);
        let g = PiecewiseCdf::from_distribution(&u, 16, 720);
        for x in [0.0, 0.1, 0.25, 0.5, 0.77, 1.0] {
            assert!((g.eval(x) - 400.0 * x).abs() < 1e-9, "x = {x}");
        }
        let spike = PiecewiseCdf::from_quantiles(&[648, 648, 648], 720, 100.0);
        assert!((spike.eval(0.45) - 12.5).abs() < 1e-12);
        assert!((spike.eval(0.9) - 75.0).abs() < 1e-12);
        assert!((spike.slice_mass(0.0, 1.0) - 100.0).abs() < 1e-12);
    }
}
