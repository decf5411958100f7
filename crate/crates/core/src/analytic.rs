//! Closed-form solutions for the square well and the one-term separable
//! (Yamaguchi) kernel. They serve as independent oracles for the Numerov
//! solver, and are the only way the non-local kernel is solved.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::potentials::SeparableModel;
use crate::solver::{refine_root, BoundState, ScatteringState};

/// Roots of `kappa cot(kappa a) = -alpha`, `kappa^2 = U0 - alpha^2`.
///
/// Bound roots (`0 < alpha < sqrt(U0)`) come first, deepest first. With
/// `include_virtual`, roots with `-sqrt(U0) < alpha < 0` follow, nearest to
/// threshold first.
pub fn well_alpha_roots(depth: f64, radius: f64, include_virtual: bool) -> Vec<f64> {
    if !(depth > 0.0 && radius > 0.0) {
        return Vec::new();
    }
    let mut roots = branch_roots(depth, radius, 1.0);
    roots.sort_by(|a, b| b.total_cmp(a));
    if include_virtual {
        let mut virt = branch_roots(depth, radius, -1.0);
        virt.sort_by(|a, b| b.total_cmp(a));
        roots.extend(virt);
    }
    roots
}

fn well_condition(depth: f64, radius: f64, alpha: f64) -> f64 {
    let kappa = (depth - alpha * alpha).max(0.0).sqrt();
    kappa * (kappa * radius).cos() + alpha * (kappa * radius).sin()
}

fn branch_roots(depth: f64, radius: f64, sign: f64) -> Vec<f64> {
    let top = depth.sqrt();
    let steps = ((top * radius / 0.005).ceil() as usize).max(2000);
    let alpha_of = |kappa: f64| sign * ((top - kappa) * (top + kappa)).max(0.0).sqrt();
    let f = |kappa: f64| kappa * (kappa * radius).cos() + alpha_of(kappa) * (kappa * radius).sin();
    let eps = 1e-9 * top;
    let kappas: Vec<f64> = (0..=steps)
        .map(|i| eps + (top - 2.0 * eps) * i as f64 / steps as f64)
        .collect();
    kappas
        .windows(2)
        .filter(|pair| (f(pair[0]) > 0.0) != (f(pair[1]) > 0.0))
        .filter_map(|pair| refine_root(f, pair[0], pair[1], 1e-15).ok())
        .map(alpha_of)
        .collect()
}

/// Closed-form square-well bound state, normalized to unity.
#[derive(Clone, Copy, Debug)]
pub struct WellBound {
    pub alpha: f64,
    pub kappa: f64,
    pub radius: f64,
    /// Interior `u = interior_amplitude * sin(kappa r)`.
    pub interior_amplitude: f64,
    /// Exterior `u = asymptotic_norm * exp(-alpha r)`, positive.
    pub asymptotic_norm: f64,
}

/// The bound state of the well at a root `alpha` of the matching condition.
pub fn well_bound_state(depth: f64, radius: f64, alpha: f64) -> Result<WellBound> {
    if !(alpha > 0.0 && alpha * alpha < depth) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is not a bound wavenumber of a well of depth {depth}"
        )));
    }
    let kappa = (depth - alpha * alpha).sqrt();
    let residual = well_condition(depth, radius, alpha) / kappa.hypot(alpha);
    if residual.abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "alpha = {alpha} does not satisfy the well matching condition (residual {residual:e})"
        )));
    }
    let s = (kappa * radius).sin();
    let interior = 0.5 * radius - (2.0 * kappa * radius).sin() / (4.0 * kappa);
    let exterior = s * s / (2.0 * alpha);
    let amp = s.signum() / (interior + exterior).sqrt();
    Ok(WellBound {
        alpha,
        kappa,
        radius,
        interior_amplitude: amp,
        asymptotic_norm: amp * s * (alpha * radius).exp(),
    })
}

impl WellBound {
    pub fn u(&self, r: f64) -> f64 {
        if r < self.radius {
            self.interior_amplitude * (self.kappa * r).sin()
        } else {
            self.asymptotic_norm * (-self.alpha * r).exp()
        }
    }

    pub fn node_count(&self) -> usize {
        ((self.kappa * self.radius / PI).ceil() as usize).saturating_sub(1)
    }

    pub fn to_bound_state(&self, grid: RadialGrid) -> BoundState {
        BoundState::from_function(
            self.alpha,
            grid,
            |r| self.u(r),
            self.interior_amplitude * self.kappa,
            self.asymptotic_norm,
            self.node_count(),
        )
    }
}

/// Closed-form square-well scattering state in the `sin(kr + delta)/k`
/// normalization, `delta -> 0` as `k -> 0`.
#[derive(Clone, Copy, Debug)]
pub struct WellScattering {
    pub k: f64,
    pub big_k: f64,
    pub radius: f64,
    pub delta: f64,
    pub interior_amplitude: f64,
}

pub fn well_scattering(depth: f64, radius: f64, k: f64) -> Result<WellScattering> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    if !(depth >= 0.0 && radius > 0.0) {
        return Err(Error::Domain(format!(
            "invalid well depth {depth} or radius {radius}"
        )));
    }
    let big_k = (depth + k * k).sqrt();
    let ka = big_k * radius;
    let (sin_ka, cos_ka) = ka.sin_cos();
    let nodes = ((ka / PI).ceil() as usize).saturating_sub(1);
    let mut frac = (k * sin_ka).atan2(big_k * cos_ka).rem_euclid(PI);
    if frac == 0.0 {
        frac = PI;
    }
    let levels = if depth > 0.0 {
        well_alpha_roots(depth, radius, false).len()
    } else {
        0
    };
    let delta = nodes as f64 * PI + frac - k * radius - levels as f64 * PI;
    let outer = k * radius + delta;
    let interior_amplitude = outer.sin() / k * sin_ka + outer.cos() / big_k * cos_ka;
    Ok(WellScattering {
        k,
        big_k,
        radius,
        delta,
        interior_amplitude,
    })
}

impl WellScattering {
    pub fn v(&self, r: f64) -> f64 {
        if r < self.radius {
            self.interior_amplitude * (self.big_k * r).sin()
        } else {
            (self.k * r + self.delta).sin() / self.k
        }
    }

    pub fn to_scattering_state(&self, grid: RadialGrid) -> ScatteringState {
        ScatteringState::from_function(
            self.k,
            self.delta,
            grid,
            |r| self.v(r),
            self.interior_amplitude * self.big_k,
        )
    }
}

fn well_smatrix_parts(depth: f64, radius: f64, k: Complex64) -> (Complex64, Complex64, Complex64) {
    let i = Complex64::i();
    let big_k = (k * k + depth).sqrt();
    let (s, c) = ((big_k * radius).sin(), (big_k * radius).cos());
    let num = big_k * c + i * k * s;
    let den = big_k * c - i * k * s;
    ((-2.0 * i * k * radius).exp(), num, den)
}

fn well_smatrix_unchecked(depth: f64, radius: f64, k: Complex64) -> Complex64 {
    let (phase, num, den) = well_smatrix_parts(depth, radius, k);
    phase * num / den
}

/// `S(k) = e^{2 i delta(k)}` of the well, continued to complex `k`:
/// `e^{-2ika} (K cos Ka + i k sin Ka) / (K cos Ka - i k sin Ka)`, `K^2 = U0 + k^2`.
pub fn well_smatrix(depth: f64, radius: f64, k: Complex64) -> Result<Complex64> {
    let (phase, num, den) = well_smatrix_parts(depth, radius, k);
    // distance to the nearest zero of the denominator, to first order
    let step = 1e-6 * k.norm().max(1.0);
    let dp = well_smatrix_parts(depth, radius, k + step).2;
    let dm = well_smatrix_parts(depth, radius, k - step).2;
    let slope = (dp - dm) / (2.0 * step);
    let distance = den.norm() / slope.norm();
    if distance < 1e-8 {
        return Err(Error::NearPole { distance });
    }
    Ok(phase * num / den)
}

/// Residue of the well S-matrix at `k = i alpha`, from a trapezoidal contour
/// integral on a small circle around the pole.
pub fn well_smatrix_residue(depth: f64, radius: f64, alpha: f64) -> Complex64 {
    let center = Complex64::new(0.0, alpha);
    let rho = 0.05 * alpha.abs().min(1.0);
    let n = 128;
    let sum: Complex64 = (0..n)
        .map(|j| {
            let z = Complex64::from_polar(rho, 2.0 * PI * j as f64 / n as f64);
            well_smatrix_unchecked(depth, radius, center + z) * z
        })
        .sum();
    sum / n as f64
}

/// Closed-form bound state of the separable kernel,
/// `u = A (e^{-alpha r} - e^{-beta r})`,
/// `A^2 = 2 alpha beta (alpha + beta) / (beta - alpha)^2`.
#[derive(Clone, Copy, Debug)]
pub struct YamaguchiBound {
    pub alpha: f64,
    pub beta: f64,
    pub amplitude: f64,
}

pub fn yamaguchi_bound(model: &SeparableModel) -> Result<YamaguchiBound> {
    let alpha = model
        .bound_alpha()
        .ok_or_else(|| Error::Domain("separable kernel too weak to bind".into()))?;
    let beta = model.beta();
    let amplitude = (2.0 * alpha * beta * (alpha + beta)).sqrt() / (beta - alpha);
    Ok(YamaguchiBound {
        alpha,
        beta,
        amplitude,
    })
}

impl YamaguchiBound {
    pub fn u(&self, r: f64) -> f64 {
        self.amplitude * ((-self.alpha * r).exp() - (-self.beta * r).exp())
    }

    pub fn origin_slope(&self) -> f64 {
        self.amplitude * (self.beta - self.alpha)
    }

    pub fn to_bound_state(&self, grid: RadialGrid) -> BoundState {
        BoundState::from_function(
            self.alpha,
            grid,
            |r| self.u(r),
            self.origin_slope(),
            self.amplitude,
            0,
        )
    }
}

/// Closed-form scattering state of the separable kernel,
/// `v = [cos(delta) sin(kr) + sin(delta) (cos(kr) - e^{-beta r})] / k`, with
/// `tan(delta) = strength k / D(k)`,
/// `D(k) = (beta^2 + k^2)^2 - strength (beta^2 - k^2) / (2 beta)`.
#[derive(Clone, Copy, Debug)]
pub struct YamaguchiScattering {
    pub k: f64,
    pub beta: f64,
    pub delta: f64,
}

fn yamaguchi_denominator(model: &SeparableModel, k: f64) -> f64 {
    let b2 = model.beta().powi(2);
    (b2 + k * k).powi(2) - model.strength() * (b2 - k * k) / (2.0 * model.beta())
}

pub fn yamaguchi_scattering(model: &SeparableModel, k: f64) -> Result<YamaguchiScattering> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let lk = model.strength() * k;
    let d = yamaguchi_denominator(model, k);
    // branch continuous in k with delta(0) = 0
    let delta = if yamaguchi_denominator(model, 0.0) < 0.0 {
        (-lk).atan2(-d)
    } else {
        lk.atan2(d)
    };
    Ok(YamaguchiScattering {
        k,
        beta: model.beta(),
        delta,
    })
}

impl YamaguchiScattering {
    pub fn v(&self, r: f64) -> f64 {
        let (s, c) = self.delta.sin_cos();
        let kr = self.k * r;
        (c * kr.sin() + s * (kr.cos() - (-self.beta * r).exp())) / self.k
    }

    pub fn origin_slope(&self) -> f64 {
        let (s, c) = self.delta.sin_cos();
        c + self.beta * s / self.k
    }

    pub fn to_scattering_state(&self, grid: RadialGrid) -> ScatteringState {
        ScatteringState::from_function(self.k, self.delta, grid, |r| self.v(r), self.origin_slope())
    }
}

/// `S(k) = (D + i strength k) / (D - i strength k)` continued to complex `k`.
pub fn yamaguchi_smatrix(model: &SeparableModel, k: Complex64) -> Complex64 {
    let b2 = model.beta().powi(2);
    let lam = model.strength();
    let d = (k * k + b2).powu(2) - lam * (b2 - k * k) / (2.0 * model.beta());
    let i = Complex64::i();
    (d + i * lam * k) / (d - i * lam * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson on [0, upper] with a fine fixed step; test-only quadrature.
    fn quad(f: impl Fn(f64) -> f64, upper: f64, n: usize) -> f64 {
        let h = upper / n as f64;
        let mut s = f(0.0) + f(upper);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    /// Fourth-order central second difference.
    fn second_derivative(f: impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
        (-f(r + 2.0 * h) + 16.0 * f(r + h) - 30.0 * f(r) + 16.0 * f(r - h) - f(r - 2.0 * h))
            / (12.0 * h * h)
    }

    #[test]
    fn well_roots_match_level_structure() {
        let r = well_alpha_roots(2.8, 1.0, false);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.159).abs() < 1e-3);
        let kappa = (2.8f64 - 0.159 * 0.159).sqrt();
        assert_relative_eq!(kappa / kappa.tan(), -0.1588, max_relative = 1e-3);

        let r = well_alpha_roots(22.547, 1.0, false);
        assert_eq!(r.len(), 2);
        assert!((r[1] - 0.159).abs() < 1e-3);
        // one bound root, then virtual roots nearest to threshold first
        let r = well_alpha_roots(21.913, 1.0, true);
        assert_eq!(r.len(), 3);
        assert!(r[0] > 0.0 && r[2] < r[1]);
        assert!((r[1] + 0.159).abs() < 1e-3, "{r:?}");
        assert!(well_alpha_roots(2.8, 1.0, true).iter().all(|&a| a > 0.0));
    }

    #[test]
    fn well_bound_closed_form() {
        let alpha = well_alpha_roots(2.8, 1.0, false)[0];
        let b = well_bound_state(2.8, 1.0, alpha).unwrap();
        // continuity and log derivative at the edge
        let left = b.interior_amplitude * b.kappa.sin();
        assert_relative_eq!(left, b.u(1.0), max_relative = 1e-12);
        let dleft = b.interior_amplitude * b.kappa * b.kappa.cos();
        assert_relative_eq!(dleft / left, -alpha, max_relative = 1e-10);
        let norm = quad(|r| b.u(r).powi(2), 1.0, 2000) + quad(|r| b.u(r + 1.0).powi(2), 200.0, 200_000);
        assert_relative_eq!(norm, 1.0, max_relative = 1e-10);
        assert!(well_bound_state(2.8, 1.0, 0.2).is_err());
    }

    #[test]
    fn well_scattering_limits() {
        let s = well_scattering(0.0, 1.0, 0.7).unwrap();
        assert!(s.delta.abs() < 1e-14);
        assert_relative_eq!(s.v(0.4), (0.7f64 * 0.4).sin() / 0.7, max_relative = 1e-13);
        // continuity of value and slope at the edge
        let s = well_scattering(2.8, 1.0, 0.5).unwrap();
        let inside = s.interior_amplitude * s.big_k.sin();
        assert_relative_eq!(inside, s.v(1.0), max_relative = 1e-12);
        let d_in = s.interior_amplitude * s.big_k * s.big_k.cos();
        assert_relative_eq!(d_in, (0.5 + s.delta).cos(), max_relative = 1e-12);
        // one bound state: delta near -atan(k/alpha) for small k
        let s = well_scattering(2.8, 1.0, 0.01).unwrap();
        assert!(s.delta < 0.0 && s.delta > -0.5 * PI);
    }

    #[test]
    fn smatrix_unitary_and_pole() {
        for k in [0.05, 0.3, 1.0, 4.0] {
            let s = well_smatrix(2.8, 1.0, Complex64::new(k, 0.0)).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
            let d = well_scattering(2.8, 1.0, k).unwrap().delta;
            assert!((s - Complex64::from_polar(1.0, 2.0 * d)).norm() < 1e-12);
        }
        let alpha = well_alpha_roots(2.8, 1.0, false)[0];
        let mut last = 0.0;
        for q in [0.9, 0.99, 0.999] {
            let s = well_smatrix(2.8, 1.0, Complex64::new(0.0, q * alpha)).unwrap();
            assert!(s.norm() > last);
            last = s.norm();
        }
        let near = well_smatrix(2.8, 1.0, Complex64::new(0.0, alpha + 1e-10));
        assert!(matches!(near, Err(Error::NearPole { .. })));
    }

    #[test]
    fn smatrix_residue_is_minus_i_nas_squared() {
        for depth in [2.8, 22.547] {
            for alpha in well_alpha_roots(depth, 1.0, false) {
                let b = well_bound_state(depth, 1.0, alpha).unwrap();
                let res = well_smatrix_residue(depth, 1.0, alpha);
                let expected = Complex64::new(0.0, -b.asymptotic_norm.powi(2));
                assert!((res - expected).norm() < 1e-6 * expected.norm(), "{res} vs {expected}");
            }
        }
    }

    #[test]
    fn yamaguchi_bound_normalized_and_regular() {
        let model = SeparableModel::yamaguchi(1.0, 0.159).unwrap();
        let b = yamaguchi_bound(&model).unwrap();
        assert_eq!(b.u(0.0), 0.0);
        let norm = quad(|r| b.u(r).powi(2), 400.0, 400_000);
        assert_relative_eq!(norm, 1.0, max_relative = 1e-10);
        let slope = ((b.u(60.0)).ln() - (b.u(50.0)).ln()) / 10.0;
        assert_relative_eq!(slope, -0.159, max_relative = 1e-12);
    }

    #[test]
    fn yamaguchi_bound_solves_integro_differential_equation() {
        let model = SeparableModel::yamaguchi(1.0, 0.159).unwrap();
        let b = yamaguchi_bound(&model).unwrap();
        let beta = model.beta();
        let overlap = quad(|r| (-beta * r).exp() * b.u(r), 60.0, 600_000);
        for r in [0.1, 0.5, 1.0, 2.5, 6.0] {
            let lhs = second_derivative(|x| b.u(x), r, 1e-2) - 0.159f64.powi(2) * b.u(r);
            let rhs = model.kernel(r, 0.0) * overlap;
            assert!((lhs - rhs).abs() < 1e-8, "r = {r}: {}", lhs - rhs);
        }
    }

    #[test]
    fn yamaguchi_scattering_solves_integro_differential_equation() {
        let model = SeparableModel::yamaguchi(1.0, 0.159).unwrap();
        let beta = model.beta();
        for k in [0.1, 0.3, 1.2] {
            let s = yamaguchi_scattering(&model, k).unwrap();
            let overlap = quad(|r| (-beta * r).exp() * s.v(r), 60.0, 600_000);
            for r in [0.2, 0.7, 3.0] {
                let lhs = second_derivative(|x| s.v(x), r, 1e-2) + k * k * s.v(r);
                let rhs = model.kernel(r, 0.0) * overlap;
                assert!((lhs - rhs).abs() < 1e-8, "k = {k}, r = {r}: {}", lhs - rhs);
            }
            // asymptotic normalization
            let r = 60.0;
            assert_relative_eq!(s.v(r), (k * r + s.delta).sin() / k, epsilon = 1e-14);
        }
    }

    #[test]
    fn yamaguchi_weak_limit_and_pole() {
        let weak = SeparableModel::with_strength(1.0, 1e-12).unwrap();
        let s = yamaguchi_scattering(&weak, 0.4).unwrap();
        assert!(s.delta.abs() < 1e-10);
        assert_relative_eq!(s.v(2.0), (0.8f64).sin() / 0.4, max_relative = 1e-10);

        let model = SeparableModel::yamaguchi(1.0, 0.159).unwrap();
        let mut last = 0.0;
        for q in [0.5, 0.9, 0.99, 0.999] {
            let s = yamaguchi_smatrix(&model, Complex64::new(0.0, q * 0.159)).norm();
            assert!(s > last);
            last = s;
        }
        assert!(last > 100.0);
        let s = yamaguchi_smatrix(&model, Complex64::new(0.3, 0.0));
        let d = yamaguchi_scattering(&model, 0.3).unwrap().delta;
        assert!((s - Complex64::from_polar(1.0, 2.0 * d)).norm() < 1e-12);
    }
}
