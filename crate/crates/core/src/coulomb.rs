//! Coulomb origin values: the Gamow factor, its pole-sum form and the
//! hydrogenic bound-state densities that make up the residues.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default number of series terms.
pub const DEFAULT_TERMS: usize = 10_000;

/// Coulomb strength `kappa_c = m e^2 / hbar^2`; levels sit at `alpha_n = kappa_c / n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoulombScale {
    kappa: f64,
}

impl CoulombScale {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Coulomb scale must be positive, got {kappa}"
            )));
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self, n: usize) -> f64 {
        self.kappa / n as f64
    }

    /// Attractive Sommerfeld parameter `eta = -kappa_c / k`.
    pub fn eta(&self, k: f64) -> f64 {
        -self.kappa / k
    }
}

/// `2 pi eta / (e^{2 pi eta} - 1)`, equal to 1 at `eta = 0`.
pub fn gamow_factor(eta: f64) -> f64 {
    let x = 2.0 * PI * eta;
    if x == 0.0 {
        return 1.0;
    }
    let d = x.exp_m1();
    if d.is_infinite() {
        // e^{x} overflowed: the value is x e^{-x}, below the smallest double
        return if x > 0.0 { x * (-x).exp() } else { -x };
    }
    x / d
}

/// Partial sum of the partial-fraction form of the Gamow factor, with the
/// dropped tail estimated analytically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GamowSeries {
    pub eta: f64,
    pub n_terms: usize,
    /// `-pi eta + 1 + 2 sum_{n <= N} 1 / (1 + n^2 / eta^2)`.
    pub partial: f64,
    /// Upper bound `2 eta^2 / N` on the dropped terms.
    pub tail_bound: f64,
    /// Integral estimate `2 |eta| (pi/2 - atan((N + 1/2) / |eta|))` of the dropped terms.
    pub tail_estimate: f64,
}

impl GamowSeries {
    pub fn completed(&self) -> f64 {
        self.partial + self.tail_estimate
    }
}

pub fn gamow_series(eta: f64, n_terms: usize) -> Result<GamowSeries> {
    if n_terms == 0 {
        return Err(Error::InvalidParameter("series needs at least one term".into()));
    }
    if eta == 0.0 {
        return Ok(GamowSeries {
            eta,
            n_terms,
            partial: 1.0,
            tail_bound: 0.0,
            tail_estimate: 0.0,
        });
    }
    let e2 = eta * eta;
    let sum: f64 = (1..=n_terms)
        .rev()
        .map(|n| {
            let n2 = (n * n) as f64;
            e2 / (e2 + n2)
        })
        .sum();
    let a = eta.abs();
    Ok(GamowSeries {
        eta,
        n_terms,
        partial: -PI * eta + 1.0 + 2.0 * sum,
        tail_bound: 2.0 * e2 / n_terms as f64,
        tail_estimate: 2.0 * a * (0.5 * PI - ((n_terms as f64 + 0.5) / a).atan()),
    })
}

/// `|psi_n(0)|^2 = 4 alpha_n^3`.
pub fn coulomb_bound_psi0_sq(n: usize, scale: CoulombScale) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("Coulomb levels start at n = 1".into()));
    }
    Ok(4.0 * scale.alpha(n).powi(3))
}

/// Pole term `psi_n(0)^2 / (2 alpha_n (alpha_n^2 + k^2))`; `k^2` may be negative.
pub fn pole_term(n: usize, scale: CoulombScale, k_squared: f64) -> Result<f64> {
    let alpha = scale.alpha(n);
    Ok(coulomb_bound_psi0_sq(n, scale)? / (2.0 * alpha * (alpha * alpha + k_squared)))
}

/// Comparison of the Gamow factor with `pi kappa_c / k + 1 + sum_n` of pole terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleDecomposition {
    pub k: f64,
    pub eta: f64,
    pub closed_form: f64,
    pub pole_sum: f64,
    pub tail_bound: f64,
    pub tail_estimate: f64,
}

impl PoleDecomposition {
    /// `|closed form - truncated pole sum|`.
    pub fn raw_residual(&self) -> f64 {
        (self.closed_form - self.pole_sum).abs()
    }

    /// Residual after adding the analytic tail estimate.
    pub fn completed_residual(&self) -> f64 {
        (self.closed_form - self.pole_sum - self.tail_estimate).abs()
    }
}

pub fn pole_decomposition_residual(
    k: f64,
    scale: CoulombScale,
    n_terms: usize,
) -> Result<PoleDecomposition> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    if n_terms == 0 {
        return Err(Error::InvalidParameter("series needs at least one term".into()));
    }
    let k2 = k * k;
    let mut sum = 0.0;
    for n in (1..=n_terms).rev() {
        sum += pole_term(n, scale, k2)?;
    }
    let eta = scale.eta(k);
    let series = gamow_series(eta, n_terms)?;
    Ok(PoleDecomposition {
        k,
        eta,
        closed_form: gamow_factor(eta),
        pole_sum: PI * scale.kappa() / k + 1.0 + sum,
        tail_bound: series.tail_bound,
        tail_estimate: series.tail_estimate,
    })
}

/// Ratio of the `n`-th pole term to everything else in the decomposition at
/// `k^2 = -alpha_n^2 (1 - t)`, i.e. `k^2 + alpha_n^2 = t alpha_n^2`.
///
/// With `k = i q` the `pi kappa_c / k` term is imaginary, so moduli are compared.
pub fn pole_dominance(n: usize, scale: CoulombScale, t: f64, n_terms: usize) -> Result<f64> {
    if n < 1 || n > n_terms {
        return Err(Error::Domain(format!("level {n} outside 1..={n_terms}")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("offset t must lie in (0, 1), got {t}")));
    }
    let alpha = scale.alpha(n);
    let k2 = -alpha * alpha * (1.0 - t);
    let q = (-k2).sqrt();
    let mut rest = 1.0;
    for m in (1..=n_terms).rev().filter(|&m| m != n) {
        rest += pole_term(m, scale, k2)?;
    }
    let imaginary = -PI * scale.kappa() / q;
    let own = pole_term(n, scale, k2)?;
    Ok(own.abs() / rest.hypot(imaginary))
}

/// `|single pole - Gamow| / Gamow` for the ground-state pole alone.
pub fn single_pole_error(k: f64, scale: CoulombScale) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let exact = gamow_factor(scale.eta(k));
    Ok((pole_term(1, scale, k * k)? - exact).abs() / exact)
}
