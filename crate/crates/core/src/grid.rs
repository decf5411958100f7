use crate::error::{Error, Result};

/// Default mesh step, in units of the potential scale.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Uniform radial mesh `r_i = i h`, `i = 0..n_points`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    step: f64,
    n_points: usize,
}

impl RadialGrid {
    /// `r_max` is rounded to the nearest multiple of `step`.
    pub fn new(step: f64, r_max: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Configuration(format!("grid step must be positive, got {step}")));
        }
        if !(r_max > step && r_max.is_finite()) {
            return Err(Error::Configuration(format!(
                "grid extent {r_max} must exceed the step {step}"
            )));
        }
        let intervals = (r_max / step).round() as usize;
        Ok(Self {
            step,
            n_points: intervals + 1,
        })
    }

    /// Grid covering `cutoff + max(20 / alpha, 4 pi / k_min)`, so that both
    /// the bound tail and a couple of asymptotic wavelengths are resolved.
    pub fn covering(step: f64, cutoff: f64, alpha: Option<f64>, k_min: Option<f64>) -> Result<Self> {
        let tail = alpha.map_or(0.0, |a| 20.0 / a.abs());
        let wave = k_min.map_or(0.0, |k| 4.0 * std::f64::consts::PI / k);
        let extent = tail.max(wave).max(10.0 * step);
        let r_max = ((cutoff + extent) / step).ceil() * step;
        Self::new(step, r_max)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn r_max(&self) -> f64 {
        self.r(self.n_points - 1)
    }

    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.r(i))
    }

    /// Smallest index with `r_i >= r` (within rounding).
    pub fn index_at_or_above(&self, r: f64) -> usize {
        let x = r / self.step;
        let nearest = x.round();
        let i = if (x - nearest).abs() < 1e-9 { nearest } else { x.ceil() };
        (i.max(0.0) as usize).min(self.n_points - 1)
    }

    /// Index of `r` if it sits on a grid point.
    pub fn exact_index(&self, r: f64) -> Option<usize> {
        let x = r / self.step;
        let nearest = x.round();
        ((x - nearest).abs() < 1e-9 && nearest >= 0.0 && (nearest as usize) < self.n_points)
            .then_some(nearest as usize)
    }

    /// Four-point Lagrange interpolation of grid samples; exact at nodes.
    pub fn interpolate(&self, samples: &[f64], r: f64) -> f64 {
        debug_assert_eq!(samples.len(), self.n_points);
        if let Some(i) = self.exact_index(r) {
            return samples[i];
        }
        let x = r / self.step;
        let last = self.n_points - 1;
        let base = (x.floor() as isize - 1).clamp(0, last as isize - 3) as usize;
        let t = x - base as f64;
        let (y0, y1, y2, y3) = (
            samples[base],
            samples[base + 1],
            samples[base + 2],
            samples[base + 3],
        );
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
    }
}

/// Composite Simpson rule over equally spaced samples. An odd number of
/// intervals closes with the 3/8 rule; two points fall back to the trapezoid.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
            let mut total = 0.0;
            if simpson_end > 0 {
                let mut sum = values[0] + values[simpson_end];
                for (j, v) in values[1..simpson_end].iter().enumerate() {
                    sum += if j % 2 == 0 { 4.0 * v } else { 2.0 * v };
                }
                total += h / 3.0 * sum;
            }
            if simpson_end != n - 1 {
                let t = simpson_end;
                total += 3.0 * h / 8.0
                    * (values[t] + 3.0 * values[t + 1] + 3.0 * values[t + 2] + values[t + 3]);
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_layout() {
        let g = RadialGrid::new(0.01, 3.0).unwrap();
        assert_eq!(g.len(), 301);
        assert_relative_eq!(g.r_max(), 3.0, max_relative = 1e-14);
        assert_eq!(g.index_at_or_above(1.0), 100);
        assert_eq!(g.index_at_or_above(1.004), 101);
        assert_eq!(g.exact_index(0.5), Some(50));
        assert_eq!(g.exact_index(0.505), None);
        assert!(RadialGrid::new(0.0, 1.0).is_err());
        assert!(RadialGrid::new(0.1, 0.05).is_err());
    }

    #[test]
    fn covering_extent() {
        let g = RadialGrid::covering(1e-3, 1.0, Some(0.159), Some(0.1)).unwrap();
        assert!(g.r_max() >= 1.0 + 4.0 * std::f64::consts::PI / 0.1);
    }

    #[test]
    fn simpson_odd_and_even() {
        let h = 0.01;
        for n in [2usize, 3, 4, 5, 101, 102] {
            let xs: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
            let exact = 1.0 - ((n - 1) as f64 * h).cos();
            assert_relative_eq!(simpson(&xs, h), exact, max_relative = 1e-4);
        }
        let xs: Vec<f64> = (0..102).map(|i| (i as f64 * h).powi(3)).collect();
        assert_relative_eq!(simpson(&xs, h), (1.01f64).powi(4) / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn interpolation_is_cubic_exact() {
        let g = RadialGrid::new(0.1, 2.0).unwrap();
        let f = |r: f64| 1.0 + r - 2.0 * r * r + 0.5 * r * r * r;
        let samples: Vec<f64> = g.radii().map(f).collect();
        for r in [0.0, 0.03, 0.55, 1.234, 1.97, 2.0] {
            assert_relative_eq!(g.interpolate(&samples, r), f(r), max_relative = 1e-12);
        }
    }
}
