//! Extrapolation of scattering wave functions to the bound-state pole.
//!
//! Near a pole at `k = i alpha` the scaled scattering function
//! `-[2 alpha (alpha^2 + k^2)]^{1/2} v(k, r)` tends to the bound function
//! `u_alpha(r)`. The ratio `R(k, r)` of the two is analytic in
//! `x = alpha^2 + k^2` and equals one at `x = 0`; this module samples it at
//! real `k`, fits its series coefficients and locates where `R = 1` away
//! from the pole.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{yamaguchi_bound, yamaguchi_scattering};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::potentials::{PotentialModel, SeparableModel, RANGE_THRESHOLD};
use crate::solver::{default_bound_window, find_bound_states, scattering_state, BoundState, ScatteringState};

/// Default wavenumbers for series fits, in units of the inverse range.
pub const DEFAULT_K_SAMPLES: [f64; 6] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
/// Largest acceptable condition number of the column-normalized design.
pub const MAX_CONDITION: f64 = 1e8;
/// Bisection tolerance on crossover radii.
pub const CROSSOVER_TOLERANCE: f64 = 1e-4;
/// Relative band around nodes of `u_alpha` where the ratio is undefined.
pub const NODE_BAND: f64 = 1e-10;

/// A bound-state problem that can also produce scattering states at real `k`.
pub trait WaveProblem: Sync {
    fn grid(&self) -> &RadialGrid;
    /// Bound states, deepest first.
    fn bound_states(&self) -> Result<Vec<BoundState>>;
    fn scattering(&self, k: f64) -> Result<ScatteringState>;
    /// Radius beyond which the interaction is negligible.
    fn range(&self) -> f64;
}

/// A local potential solved numerically.
#[derive(Clone, Debug)]
pub struct LocalProblem {
    model: PotentialModel,
    grid: RadialGrid,
}

impl LocalProblem {
    pub fn new(model: PotentialModel, grid: RadialGrid) -> Self {
        Self { model, grid }
    }

    /// Grid with spacing `step` long enough for the shallowest bound tail and
    /// for two wavelengths at `k_min`.
    pub fn with_default_grid(model: PotentialModel, step: f64, k_min: f64) -> Result<Self> {
        let cutoff = model.range_cutoff();
        let probe = RadialGrid::covering(step, cutoff, None, None)?;
        let shallowest = find_bound_states(&model, &probe, default_bound_window(&model), usize::MAX)?
            .iter()
            .map(BoundState::alpha)
            .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.min(a))));
        let grid = RadialGrid::covering(step, cutoff, shallowest, Some(k_min))?;
        Ok(Self { model, grid })
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }
}

impl WaveProblem for LocalProblem {
    fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn bound_states(&self) -> Result<Vec<BoundState>> {
        let mut states =
            find_bound_states(&self.model, &self.grid, default_bound_window(&self.model), usize::MAX)?;
        states.sort_by(|a, b| b.alpha().total_cmp(&a.alpha()));
        Ok(states)
    }

    fn scattering(&self, k: f64) -> Result<ScatteringState> {
        scattering_state(&self.model, k, &self.grid)
    }

    fn range(&self) -> f64 {
        self.model.range_cutoff()
    }
}

/// The separable kernel, solved in closed form and sampled on a grid.
#[derive(Clone, Debug)]
pub struct SeparableProblem {
    model: SeparableModel,
    grid: RadialGrid,
}

impl SeparableProblem {
    pub fn new(model: SeparableModel, grid: RadialGrid) -> Self {
        Self { model, grid }
    }

    pub fn with_default_grid(model: SeparableModel, step: f64, k_min: f64) -> Result<Self> {
        let range = -RANGE_THRESHOLD.ln() / model.beta();
        let grid = RadialGrid::covering(step, range, model.bound_alpha(), Some(k_min))?;
        Ok(Self { model, grid })
    }

    pub fn model(&self) -> &SeparableModel {
        &self.model
    }
}

impl WaveProblem for SeparableProblem {
    fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn bound_states(&self) -> Result<Vec<BoundState>> {
        Ok(match self.model.bound_alpha() {
            Some(_) => vec![yamaguchi_bound(&self.model)?.to_bound_state(self.grid)],
            None => Vec::new(),
        })
    }

    fn scattering(&self, k: f64) -> Result<ScatteringState> {
        Ok(yamaguchi_scattering(&self.model, k)?.to_scattering_state(self.grid))
    }

    fn range(&self) -> f64 {
        -RANGE_THRESHOLD.ln() / self.model.beta()
    }
}

fn near_origin(grid: &RadialGrid, r: f64) -> bool {
    r < 10.0 * grid.step()
}

/// `v(k, r) / r`, with the origin slope used for `r < 10 h`.
fn scattering_over_r(s: &ScatteringState, r: f64) -> f64 {
    if near_origin(s.grid(), r) {
        s.origin_slope()
    } else {
        s.value_at(r) / r
    }
}

/// Bound wave function `psi = u / r`, with `u'(0)` used for `r < 10 h`.
pub fn bound_psi(b: &BoundState, r: f64) -> f64 {
    if near_origin(b.grid(), r) {
        b.origin_slope()
    } else {
        b.value_at(r) / r
    }
}

/// `-[2 |alpha_ref| (alpha_ref^2 + k^2)]^{1/2} v(k, r) / r`.
///
/// A negative `alpha_ref` refers to a virtual state; only its magnitude
/// enters the factor.
pub fn modified_scattering(s: &ScatteringState, alpha_ref: f64, r: f64) -> Result<f64> {
    if alpha_ref == 0.0 || !alpha_ref.is_finite() {
        return Err(Error::Domain("reference wavenumber must be nonzero".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    let k = s.k();
    let factor = (2.0 * alpha_ref.abs() * (alpha_ref * alpha_ref + k * k)).sqrt();
    Ok(-factor * scattering_over_r(s, r))
}

/// `R(k, r) = -[2 alpha (alpha^2 + k^2)]^{1/2} v(k, r) / u_alpha(r)`.
pub fn ratio(b: &BoundState, s: &ScatteringState, r: f64) -> Result<f64> {
    let alpha = b.alpha();
    let k = s.k();
    let factor = (2.0 * alpha * (alpha * alpha + k * k)).sqrt();
    if near_origin(b.grid(), r) {
        return Ok(-factor * s.origin_slope() / b.origin_slope());
    }
    let u = b.value_at(r);
    let scale = b.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if u.abs() < NODE_BAND * scale {
        return Err(Error::NodeSingularity { r });
    }
    Ok(-factor * s.value_at(r) / u)
}

/// Complex outgoing-wave approximation
/// `psi^+ = -(2 alpha)^{-1/2} psi_alpha(r) / (alpha + i k)`.
pub fn complex_outgoing_approx(b: &BoundState, k: f64, r: f64) -> Result<Complex64> {
    let alpha = b.alpha();
    if !(alpha > 0.0) {
        return Err(Error::Domain("outgoing approximation needs a true bound state".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let psi = bound_psi(b, r);
    Ok(-(2.0 * alpha).powf(-0.5) * psi / Complex64::new(alpha, k))
}

/// Coefficients of `R(k, r) = 1 + R1(r) x + R2(r) x^2 + ...` on a set of radii.
#[derive(Clone, Debug)]
pub struct RatioSeries {
    pub radii: Vec<f64>,
    pub alpha: f64,
    pub k_samples: Vec<f64>,
    /// Design values `x = alpha^2 + k^2`.
    pub x: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    /// Cubic coefficient, fitted to keep `r2` unbiased; not reported as a result.
    pub r3: Vec<f64>,
    pub r1_stderr: Vec<f64>,
    pub r2_stderr: Vec<f64>,
    /// `max |R - fit| / max |R - 1|` over the samples, per radius.
    pub residual: Vec<f64>,
    /// Measured `R(k_j, r_i)`, row per radius.
    pub measured: Vec<Vec<f64>>,
    pub condition: f64,
}

impl RatioSeries {
    /// `1 + R1 x + R2 x^2 + R3 x^3` at radius index `i`.
    pub fn reconstruct(&self, i: usize, x: f64) -> f64 {
        1.0 + x * (self.r1[i] + x * (self.r2[i] + x * self.r3[i]))
    }

    /// Least-squares polynomial `R1(r) ~ sum_j c_j r^j` over the fitted radii.
    pub fn r1_polynomial(&self, degree: usize) -> Result<Vec<f64>> {
        polynomial_fit(&self.radii, &self.r1, degree).map(|f| f.coefficients)
    }
}

struct PolyFit {
    coefficients: Vec<f64>,
    stderr: Vec<f64>,
    fitted: Vec<f64>,
    condition: f64,
}

/// Least squares `y ~ sum_j c_j t^j` with columns normalized before the SVD.
fn polynomial_fit(t: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
    let n = t.len();
    let p = degree + 1;
    if n < p {
        return Err(Error::Fit(format!("{n} samples cannot determine {p} coefficients")));
    }
    let mut a = DMatrix::from_fn(n, p, |i, j| t[i].powi(j as i32));
    let b = DVector::from_fn(n, |i, _| y[i]);
    let norms: Vec<f64> = (0..p).map(|j| a.column(j).norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::Fit("degenerate design column".into()));
    }
    for (j, c) in norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / c);
    }
    let svd = a.clone().svd(true, true);
    let s = &svd.singular_values;
    let condition = s.max() / s.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Fit(format!(
            "design condition number {condition:.3e} exceeds {MAX_CONDITION:e}; widen the x span"
        )));
    }
    let scaled = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let coefficients: Vec<f64> = (0..p).map(|j| scaled[j] / norms[j]).collect();
    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..p).map(|j| coefficients[j] * t[i].powi(j as i32)).sum())
        .collect();
    let dof = n - p;
    let stderr = if dof == 0 {
        vec![f64::NAN; p]
    } else {
        let ssr: f64 = (0..n).map(|i| (y[i] - fitted[i]).powi(2)).sum();
        let sigma2 = ssr / dof as f64;
        let v_t = svd.v_t.as_ref().expect("requested");
        (0..p)
            .map(|j| {
                let var: f64 = (0..p).map(|q| (v_t[(q, j)] / s[q]).powi(2)).sum();
                (sigma2 * var).sqrt() / norms[j]
            })
            .collect()
    };
    Ok(PolyFit {
        coefficients,
        stderr,
        fitted,
        condition,
    })
}

/// Design values and pre-checks shared by the fits.
fn design(problem: &dyn WaveProblem, b: &BoundState, k_samples: &[f64]) -> Result<Vec<f64>> {
    if k_samples.len() < 4 {
        return Err(Error::Configuration(format!(
            "need at least 4 k-samples, got {}",
            k_samples.len()
        )));
    }
    if let Some(k) = k_samples.iter().find(|k| !(**k > 0.0)) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let alpha = b.alpha();
    let x: Vec<f64> = k_samples.iter().map(|k| alpha * alpha + k * k).collect();
    let (lo, hi) = x.iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    if hi < 4.0 * lo {
        return Err(Error::Configuration(format!(
            "x = alpha^2 + k^2 spans only [{lo:.4e}, {hi:.4e}]; need a factor of 4"
        )));
    }
    for other in problem.bound_states()? {
        let distance = (other.alpha().powi(2) - alpha * alpha).abs();
        if (other.alpha() - alpha).abs() > 1e-9 * alpha && distance <= hi {
            return Err(Error::Configuration(format!(
                "pole at alpha = {} lies within |x| = {distance:.4e} < {hi:.4e}; lower the k-samples",
                other.alpha()
            )));
        }
    }
    Ok(x)
}

fn scattering_set(problem: &dyn WaveProblem, k_samples: &[f64]) -> Result<Vec<ScatteringState>> {
    k_samples
        .par_iter()
        .map(|&k| problem.scattering(k))
        .collect()
}

/// Per-radius weighted least squares of `R - 1` on `x, x^2, x^3`, weights
/// `1 / x` on the residuals so all samples count in relative terms.
pub fn fit_ratio_series(
    problem: &dyn WaveProblem,
    b: &BoundState,
    radii: &[f64],
    k_samples: &[f64],
) -> Result<RatioSeries> {
    let x = design(problem, b, k_samples)?;
    let states = scattering_set(problem, k_samples)?;
    let rows: Vec<(Vec<f64>, PolyFit)> = radii
        .par_iter()
        .map(|&r| {
            let measured = states
                .iter()
                .map(|s| ratio(b, s, r))
                .collect::<Result<Vec<f64>>>()?;
            // (R - 1)/x = R1 + R2 x + R3 x^2, with the 1/x weight already applied
            let reduced: Vec<f64> = measured.iter().zip(&x).map(|(m, x)| (m - 1.0) / x).collect();
            let fit = polynomial_fit(&x, &reduced, 2)?;
            Ok((measured, fit))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut series = RatioSeries {
        radii: radii.to_vec(),
        alpha: b.alpha(),
        k_samples: k_samples.to_vec(),
        x: x.clone(),
        r1: Vec::new(),
        r2: Vec::new(),
        r3: Vec::new(),
        r1_stderr: Vec::new(),
        r2_stderr: Vec::new(),
        residual: Vec::new(),
        measured: Vec::new(),
        condition: 0.0,
    };
    for (measured, fit) in rows {
        let c = &fit.coefficients;
        let scale = measured.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
        let worst = measured
            .iter()
            .zip(&x)
            .zip(&fit.fitted)
            .map(|((m, x), f)| (m - 1.0 - x * f).abs())
            .fold(0.0f64, f64::max);
        series.r1.push(c[0]);
        series.r2.push(c[1]);
        series.r3.push(c[2]);
        series.r1_stderr.push(fit.stderr[0]);
        series.r2_stderr.push(fit.stderr[1]);
        series.residual.push(if scale > 0.0 { worst / scale } else { 0.0 });
        series.measured.push(measured);
        series.condition = series.condition.max(fit.condition);
    }
    Ok(series)
}

/// Outcome of the pole-limit check.
#[derive(Clone, Debug)]
pub struct TheoremCheck {
    /// `(r, |extrapolated + u(r)| / |u(r)|)` per probe.
    pub probes: Vec<(f64, f64)>,
    pub degree: usize,
}

impl TheoremCheck {
    pub fn max_deviation(&self) -> f64 {
        self.probes.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

/// Extrapolates `[2 alpha x]^{1/2} v(k, r)` polynomially in `x` to `x = 0`
/// and compares with `-u_alpha(r)`. The polynomial degree is
/// `min(4, samples - 2)`, leaving at least one residual degree of freedom.
pub fn theorem_limit_check(
    problem: &dyn WaveProblem,
    b: &BoundState,
    probes: &[f64],
    k_samples: &[f64],
) -> Result<TheoremCheck> {
    let x = design(problem, b, k_samples)?;
    let states = scattering_set(problem, k_samples)?;
    let degree = (k_samples.len() - 2).min(4);
    let x_max = x.iter().copied().fold(0.0, f64::max);
    let t: Vec<f64> = x.iter().map(|v| v / x_max).collect();
    let alpha = b.alpha();
    let probes = probes
        .iter()
        .map(|&r| {
            let y: Vec<f64> = states
                .iter()
                .zip(&x)
                .map(|(s, x)| (2.0 * alpha * x).sqrt() * s.value_at(r))
                .collect();
            let fit = polynomial_fit(&t, &y, degree)?;
            let u = b.value_at(r);
            let scale = b.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if u.abs() < NODE_BAND * scale {
                return Err(Error::NodeSingularity { r });
            }
            Ok((r, (fit.coefficients[0] + u).abs() / u.abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremCheck { probes, degree })
}

/// Result of a crossover search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Crossover {
    Found(f64),
    /// `R - 1` keeps one sign over the whole search interval.
    NoCrossover,
}

impl Crossover {
    pub fn radius(self) -> Option<f64> {
        match self {
            Crossover::Found(r) => Some(r),
            Crossover::NoCrossover => None,
        }
    }
}

/// End of the default crossover search: the first node of `u_alpha`, or
/// `range + 3 / alpha` for a nodeless state.
pub fn crossover_search_end(problem: &dyn WaveProblem, b: &BoundState) -> f64 {
    let grid = b.grid();
    let u = b.samples();
    let first_node = (2..u.len())
        .find(|&i| u[i] != 0.0 && u[i - 1] != 0.0 && (u[i] > 0.0) != (u[i - 1] > 0.0))
        .map(|i| grid.r(i - 1) - u[i - 1] * grid.step() / (u[i] - u[i - 1]));
    first_node
        .unwrap_or(problem.range() + 3.0 / b.alpha())
        .min(grid.r_max())
}

/// First radius where `R(k, r) = 1`, searched between the origin and
/// [`crossover_search_end`].
pub fn crossover_radius(problem: &dyn WaveProblem, b: &BoundState, k: f64) -> Result<Crossover> {
    let end = crossover_search_end(problem, b);
    let s = problem.scattering(k)?;
    crossover_in(b, &s, (0.0, end))
}

/// First root of `R(k, r) - 1` in `interval`, scanning grid points and
/// bisecting the first sign change. Points inside the node band are skipped.
pub fn crossover_in(b: &BoundState, s: &ScatteringState, interval: (f64, f64)) -> Result<Crossover> {
    let grid = b.grid();
    let f = |r: f64| ratio(b, s, r).map(|v| v - 1.0);
    let (lo, hi) = interval;
    let mut prev: Option<(f64, f64)> = None;
    let mut i = grid.index_at_or_above(lo);
    while i < grid.len() && grid.r(i) <= hi {
        let r = grid.r(i);
        i += 1;
        let value = match f(r) {
            Ok(v) => v,
            Err(Error::NodeSingularity { .. }) => {
                prev = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        if value == 0.0 {
            return Ok(Crossover::Found(r));
        }
        if let Some((r0, v0)) = prev {
            if (v0 > 0.0) != (value > 0.0) {
                return bisect(&f, r0, r, v0).map(Crossover::Found);
            }
        }
        prev = Some((r, value));
    }
    Ok(Crossover::NoCrossover)
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
    let positive = fa > 0.0;
    while b - a > CROSSOVER_TOLERANCE * 1e-2 {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Models with a published low-order expansion of `R1(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceModel {
    Yamaguchi { beta: f64, alpha: f64 },
    Bargmann { beta: f64, alpha: f64 },
    SphericalWell { depth: f64, radius: f64, alpha: f64 },
}

/// A truncated reference value. `truncation_warning` is set when the
/// estimated first omitted term exceeds 1% of the retained sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceValue {
    pub value: f64,
    pub truncation_warning: bool,
}

/// Truncated small-`r` expansion of `R1(r)`:
///
/// * Yamaguchi: `3/(8 beta (beta+alpha)) + r/(4 beta) - (beta-alpha) r^2/(8 beta)`
/// * Bargmann: `1/(2(beta^2-alpha^2)) - r^2/6 - (2 beta^2 - 3 alpha^2) r^4/90`
/// * well: `a^2/(4(1+alpha a)) - (4+alpha a)/(4(U0-alpha^2)) - r^2/6`
///
/// The omitted term is estimated as the last retained term times the
/// expansion variable (`beta r`, `(beta r)^2` or `(kappa r)^2`).
pub fn r1_reference(model: ReferenceModel, r: f64) -> ReferenceValue {
    let (terms, growth): (Vec<f64>, f64) = match model {
        ReferenceModel::Yamaguchi { beta, alpha } => (
            vec![
                3.0 / (8.0 * beta * (beta + alpha)),
                r / (4.0 * beta),
                -(beta - alpha) * r * r / (8.0 * beta),
            ],
            beta * r,
        ),
        ReferenceModel::Bargmann { beta, alpha } => (
            vec![
                1.0 / (2.0 * (beta * beta - alpha * alpha)),
                -r * r / 6.0,
                -(2.0 * beta * beta - 3.0 * alpha * alpha) * r.powi(4) / 90.0,
            ],
            (beta * r).powi(2),
        ),
        ReferenceModel::SphericalWell { depth, radius, alpha } => (
            vec![
                radius * radius / (4.0 * (1.0 + alpha * radius))
                    - (4.0 + alpha * radius) / (4.0 * (depth - alpha * alpha)),
                -r * r / 6.0,
            ],
            (depth - alpha * alpha) * r * r,
        ),
    };
    let value: f64 = terms.iter().sum();
    let last = terms.iter().rev().find(|t| **t != 0.0).copied().unwrap_or(0.0);
    ReferenceValue {
        value,
        truncation_warning: (last * growth).abs() > 1e-2 * value.abs(),
    }
}

/// `R2(0) = -1 / (8 (beta^2 - alpha^2)^2)` for the Bargmann potential.
pub fn bargmann_r2_reference(beta: f64, alpha: f64) -> f64 {
    -1.0 / (8.0 * (beta * beta - alpha * alpha).powi(2))
}

/// Positive root of the truncated Bargmann `R1(r)`, with or without the
/// quartic term.
pub fn bargmann_reference_crossover(beta: f64, alpha: f64, quartic: bool) -> Option<f64> {
    let c0 = 1.0 / (2.0 * (beta * beta - alpha * alpha));
    if !quartic {
        return Some((6.0 * c0).sqrt());
    }
    // c0 - s/6 - c4 s^2 = 0 in s = r^2
    let c4 = (2.0 * beta * beta - 3.0 * alpha * alpha) / 90.0;
    if c4 == 0.0 {
        return Some((6.0 * c0).sqrt());
    }
    let disc = 1.0 / 36.0 + 4.0 * c4 * c0;
    if disc < 0.0 {
        return None;
    }
    let s = (-1.0 / 6.0 + disc.sqrt()) / (2.0 * c4);
    (s > 0.0).then(|| s.sqrt())
}

/// Measured sign of the well's `R1(0)` compared against the closed-form
/// expansion and against the level-ordering statement (positive for a
/// nodeless state, negative once the state has a node).
#[derive(Clone, Debug)]
pub struct SignArbitration {
    pub depth: f64,
    pub alpha: f64,
    pub node_count: usize,
    pub fitted: f64,
    pub fitted_stderr: f64,
    pub formula: f64,
    pub matches_formula_sign: bool,
    pub matches_ordering_sign: bool,
    /// `|fitted| / |formula|`.
    pub magnitude_ratio: f64,
}

impl SignArbitration {
    pub fn magnitude_within(&self, tolerance: f64) -> bool {
        (self.magnitude_ratio - 1.0).abs() <= tolerance
    }

    pub fn verdict(&self) -> &'static str {
        match (self.matches_formula_sign, self.matches_ordering_sign) {
            (true, false) => "sign matches the closed-form expansion, contradicts the level-ordering statement",
            (false, true) => "sign matches the level-ordering statement, contradicts the closed-form expansion",
            (true, true) => "sign matches both",
            (false, false) => "sign matches neither",
        }
    }
}

/// Fits `R1(0)` for the shallowest bound state of a well of unit radius
/// scale `radius` and arbitrates its sign.
pub fn well_sign_arbitration(
    depth: f64,
    radius: f64,
    step: f64,
    k_samples: &[f64],
) -> Result<SignArbitration> {
    let model = PotentialModel::spherical_well(depth, radius)?;
    let k_min = k_samples.iter().copied().fold(f64::MAX, f64::min);
    let problem = LocalProblem::with_default_grid(model, step, k_min)?;
    let states = problem.bound_states()?;
    let b = states
        .last()
        .ok_or_else(|| Error::Domain(format!("well of depth {depth} has no bound state")))?;
    let series = fit_ratio_series(&problem, b, &[0.0], k_samples)?;
    let fitted = series.r1[0];
    let formula = r1_reference(
        ReferenceModel::SphericalWell {
            depth,
            radius,
            alpha: b.alpha(),
        },
        0.0,
    )
    .value;
    let expected_ordering = if b.node_count() == 0 { 1.0 } else { -1.0 };
    Ok(SignArbitration {
        depth,
        alpha: b.alpha(),
        node_count: b.node_count(),
        fitted,
        fitted_stderr: series.r1_stderr[0],
        formula,
        matches_formula_sign: fitted.signum() == formula.signum(),
        matches_ordering_sign: fitted.signum() == expected_ordering,
        magnitude_ratio: fitted.abs() / formula.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_fit_recovers_exact_cubic() {
        let t: Vec<f64> = (1..=6).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 0.3 - 2.0 * t + 0.7 * t * t * t).collect();
        let fit = polynomial_fit(&t, &y, 3).unwrap();
        for (c, e) in fit.coefficients.iter().zip([0.3, -2.0, 0.0, 0.7]) {
            assert!((c - e).abs() < 1e-10, "{c} vs {e}");
        }
        assert!(fit.stderr.iter().all(|s| *s < 1e-8));
    }

    #[test]
    fn polynomial_fit_rejects_degenerate_design() {
        let t = vec![1.0, 1.0 + 1e-12, 1.0 + 2e-12, 1.0 + 3e-12];
        let y = vec![0.0; 4];
        assert!(matches!(polynomial_fit(&t, &y, 2), Err(Error::Fit(_))));
        assert!(polynomial_fit(&t[..2], &y[..2], 2).is_err());
    }

    #[test]
    fn reference_values() {
        let b = r1_reference(ReferenceModel::Bargmann { beta: 1.0, alpha: 0.1 }, 0.0);
        assert_relative_eq!(b.value, 0.50505, max_relative = 1e-5);
        assert!(!b.truncation_warning);
        let y = r1_reference(ReferenceModel::Yamaguchi { beta: 1.0, alpha: 0.159 }, 0.0);
        assert_relative_eq!(y.value, 3.0 / (8.0 * 1.159), max_relative = 1e-14);
        let w = r1_reference(
            ReferenceModel::SphericalWell { depth: 2.8, radius: 1.0, alpha: 0.159 },
            0.0,
        );
        assert!((w.value + 0.1590).abs() < 1e-4, "{}", w.value);
        assert!(r1_reference(ReferenceModel::Bargmann { beta: 1.0, alpha: 0.1 }, 1.5).truncation_warning);
        // shared r^2 coefficient
        let db = r1_reference(ReferenceModel::Bargmann { beta: 1.0, alpha: 0.1 }, 1e-3).value - b.value;
        let dw = r1_reference(
            ReferenceModel::SphericalWell { depth: 2.8, radius: 1.0, alpha: 0.159 },
            1e-3,
        )
        .value
            - w.value;
        assert!((db / 1e-6 + 1.0 / 6.0).abs() < 1e-5);
        assert_relative_eq!(dw / 1e-6, -1.0 / 6.0, max_relative = 1e-10);
        assert_relative_eq!(bargmann_r2_reference(1.0, 0.1), -0.12756, max_relative = 2e-4);
    }

    #[test]
    fn reference_crossovers() {
        let q = bargmann_reference_crossover(1.0, 0.1, false).unwrap();
        assert!((q - 1.74).abs() < 0.01);
        let r4 = bargmann_reference_crossover(1.0, 0.1, true).unwrap();
        let check = r1_reference(ReferenceModel::Bargmann { beta: 1.0, alpha: 0.1 }, r4).value;
        assert!(check.abs() < 1e-12);
        assert!((r4 - 1.52).abs() < 0.01);
    }

    #[test]
    fn modified_scattering_origin_limit() {
        let grid = RadialGrid::new(1e-3, 50.0).unwrap();
        let s = ScatteringState::from_function(0.3, 0.0, grid, |r| 2.0 * r, 2.0);
        let v = modified_scattering(&s, 0.159, 0.0).unwrap();
        let factor = (2.0 * 0.159 * (0.159f64.powi(2) + 0.09)).sqrt();
        assert_relative_eq!(v, -factor * 2.0, max_relative = 1e-14);
        assert!(matches!(modified_scattering(&s, 0.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn outgoing_approximation_modulus_and_phase() {
        let grid = RadialGrid::new(1e-3, 50.0).unwrap();
        let alpha: f64 = 0.159;
        let b = BoundState::from_function(alpha, grid, |r| (-alpha * r).exp() * r, 1.0, 1.0, 0);
        for k in [0.05, 0.159, 0.5] {
            let psi = complex_outgoing_approx(&b, k, 2.0).unwrap();
            let bound = bound_psi(&b, 2.0);
            assert_relative_eq!(
                psi.norm_sqr(),
                bound * bound / (2.0 * alpha * (alpha * alpha + k * k)),
                max_relative = 1e-12
            );
            // psi^+ = -|psi^+| e^{i delta} with e^{2 i delta} = (alpha - i k)/(alpha + i k)
            assert_relative_eq!((-psi).arg(), (-k / alpha).atan(), max_relative = 1e-12);
        }
        assert!(complex_outgoing_approx(&b, 0.0, 1.0).is_err());
    }
}
