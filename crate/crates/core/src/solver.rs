//! Numerov integration of the S-wave radial equation
//! `w'' = (U(r) - E) w` with `w(0) = 0`.
//!
//! Bound and virtual states are located by shooting: the outward solution is
//! matched at the first grid point at or beyond the range cutoff against the
//! exact exterior `exp(-alpha r)`. Scattering states are continued into the
//! exterior analytically, so no discontinuity of the potential is ever
//! straddled by a Numerov stencil as long as the cutoff is a grid point.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{simpson, RadialGrid};
use crate::potentials::PotentialModel;

/// Eigenvalue convergence on the wavenumber.
pub const ROOT_TOLERANCE: f64 = 1e-13;
pub const MAX_ROOT_ITERATIONS: usize = 200;
/// Points in the bracketing scan of an eigenvalue window.
pub const SCAN_POINTS: usize = 200;

/// A normalized bound state.
#[derive(Clone, Debug)]
pub struct BoundState {
    pub(crate) alpha: f64,
    pub(crate) grid: RadialGrid,
    pub(crate) u: Vec<f64>,
    pub(crate) asymptotic_norm: f64,
    pub(crate) node_count: usize,
    pub(crate) origin_slope: f64,
    pub(crate) match_radius: f64,
}

impl BoundState {
    /// Builds a state from a closed-form wave function sampled on `grid`.
    pub fn from_function(
        alpha: f64,
        grid: RadialGrid,
        u: impl Fn(f64) -> f64,
        origin_slope: f64,
        asymptotic_norm: f64,
        node_count: usize,
    ) -> Self {
        Self {
            alpha,
            grid,
            u: grid.radii().map(u).collect(),
            asymptotic_norm,
            node_count,
            origin_slope,
            match_radius: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn energy(&self) -> f64 {
        -self.alpha * self.alpha
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.u
    }

    /// Coefficient of `exp(-alpha r)` in the normalized tail; positive by convention.
    pub fn asymptotic_norm(&self) -> f64 {
        self.asymptotic_norm
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `u'(0)`.
    pub fn origin_slope(&self) -> f64 {
        self.origin_slope
    }

    /// Radius where interior numerics were joined to the exact tail.
    pub fn match_radius(&self) -> f64 {
        self.match_radius
    }

    pub fn value_at(&self, r: f64) -> f64 {
        if r > self.grid.r_max() {
            return self.asymptotic_norm * (-self.alpha * r).exp();
        }
        self.grid.interpolate(&self.u, r)
    }

    /// `int_0^inf u^2 dr`, with the tail beyond `r_max` added analytically.
    pub fn normalization_integral(&self) -> f64 {
        let r_max = self.grid.r_max();
        let tail = self.asymptotic_norm.powi(2) * (-2.0 * self.alpha * r_max).exp()
            / (2.0 * self.alpha);
        let sq: Vec<f64> = self.u.iter().map(|u| u * u).collect();
        split_simpson(&sq, &self.grid, &[self.match_radius]) + tail
    }

    /// Least-squares fit of `ln u` on `[r_lo, r_hi]`; `r_lo` must lie beyond
    /// the matching radius.
    pub fn asymptotic_normalization(&self, window: (f64, f64)) -> Result<TailFit> {
        if window.0 <= self.match_radius {
            return Err(Error::Configuration(format!(
                "fit window starts at {} inside the potential range {}",
                window.0, self.match_radius
            )));
        }
        fit_exponential_tail(&self.grid, &self.u, window)
    }
}

/// Phase shift as a principal value in `(-pi/2, pi/2]` plus a winding number.
///
/// The full value `principal + winding * pi` is continuous in `k` and tends
/// to zero as `k -> 0` (the bound-state count has been removed).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseShift {
    pub principal: f64,
    pub winding: i32,
}

impl PhaseShift {
    pub fn from_continuous(delta: f64) -> Self {
        let mut principal = delta.rem_euclid(PI);
        if principal > 0.5 * PI {
            principal -= PI;
        }
        Self {
            principal,
            winding: ((delta - principal) / PI).round() as i32,
        }
    }

    pub fn value(&self) -> f64 {
        self.principal + self.winding as f64 * PI
    }
}

/// A real standing-wave scattering solution, `v -> sin(k r + delta) / k`.
#[derive(Clone, Debug)]
pub struct ScatteringState {
    pub(crate) k: f64,
    pub(crate) phase: PhaseShift,
    pub(crate) grid: RadialGrid,
    pub(crate) v: Vec<f64>,
    pub(crate) origin_slope: f64,
    pub(crate) match_radius: f64,
}

impl ScatteringState {
    pub fn from_function(
        k: f64,
        delta: f64,
        grid: RadialGrid,
        v: impl Fn(f64) -> f64,
        origin_slope: f64,
    ) -> Self {
        Self {
            k,
            phase: PhaseShift::from_continuous(delta),
            grid,
            v: grid.radii().map(v).collect(),
            origin_slope,
            match_radius: 0.0,
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn phase_shift(&self) -> PhaseShift {
        self.phase
    }

    /// Continuous phase shift in radians.
    pub fn delta(&self) -> f64 {
        self.phase.value()
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.v
    }

    /// `v'(0)`.
    pub fn origin_slope(&self) -> f64 {
        self.origin_slope
    }

    pub fn match_radius(&self) -> f64 {
        self.match_radius
    }

    pub fn value_at(&self, r: f64) -> f64 {
        if r > self.grid.r_max() {
            return (self.k * r + self.delta()).sin() / self.k;
        }
        self.grid.interpolate(&self.v, r)
    }
}

/// Result of [`extract_phase_shift`]: `samples(r) = amplitude * sin(k r + delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatch {
    /// Principal branch, `(-pi/2, pi/2]`.
    pub delta: f64,
    /// Signed amplitude belonging to the principal branch.
    pub amplitude: f64,
}

/// Result of an exponential tail fit, `u ~ n_as * exp(slope * r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailFit {
    pub n_as: f64,
    pub slope: f64,
}

/// Numerov recurrence with `w_0 = 0`, `w_1 = h`. `g[i] = U(r_i) - E`.
fn numerov(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    w[1] = h;
    let c = h * h / 12.0;
    for i in 1..n - 1 {
        let next = (2.0 * (1.0 + 5.0 * c * g[i]) * w[i] - (1.0 - c * g[i - 1]) * w[i - 1])
            / (1.0 - c * g[i + 1]);
        w[i + 1] = next;
        if next.abs() > 1e200 {
            w[..=i + 1].iter_mut().for_each(|x| *x *= 1e-200);
        }
    }
    w
}

/// Samples of the regular solution of `w'' = (U - energy) w` over the whole
/// grid, starting from `w(0) = 0`, `w(h) = h`.
///
/// The recurrence samples the left limit of `U` at grid points. Across a
/// discontinuity inside the grid the result is only second-order accurate;
/// the eigenvalue and scattering solvers avoid that by matching at the cutoff.
pub fn integrate_outward(model: &PotentialModel, energy: f64, grid: &RadialGrid) -> Vec<f64> {
    let g: Vec<f64> = grid.radii().map(|r| model.value_left(r) - energy).collect();
    numerov(&g, grid.step())
}

/// Shooting setup: potential sampled up to the matching index.
struct Shooter {
    h: f64,
    m: usize,
    potential: Vec<f64>,
}

impl Shooter {
    fn new(model: &PotentialModel, grid: &RadialGrid) -> Result<Self> {
        let cutoff = model.range_cutoff();
        if grid.r_max() < cutoff {
            return Err(Error::Configuration(format!(
                "grid extent {} does not reach the range cutoff {cutoff}",
                grid.r_max()
            )));
        }
        let m = grid.index_at_or_above(cutoff).max(3);
        if m >= grid.len() {
            return Err(Error::Configuration("grid too short for matching".into()));
        }
        let potential = (0..=m).map(|i| model.value_left(grid.r(i))).collect();
        Ok(Self {
            h: grid.step(),
            m,
            potential,
        })
    }

    fn match_radius(&self) -> f64 {
        self.m as f64 * self.h
    }

    fn solve(&self, energy: f64) -> Vec<f64> {
        let g: Vec<f64> = self.potential.iter().map(|u| u - energy).collect();
        numerov(&g, self.h)
    }

    /// `(w, w')` at the matching point from a one-sided Taylor expansion that
    /// uses the equation itself for the higher derivatives; error `O(h^4)`.
    fn edge(&self, w: &[f64], energy: f64) -> (f64, f64) {
        let h = self.h;
        let n = self.m;
        let g = |i: usize| self.potential[i] - energy;
        let (g0, g1, g2) = (g(n), g(n - 1), g(n - 2));
        let dg = (3.0 * g0 - 4.0 * g1 + g2) / (2.0 * h);
        let d2g = (g0 - 2.0 * g1 + g2) / (h * h);
        let wn = w[n];
        let num = wn - w[n - 1] + 0.5 * h * h * g0 * wn - h.powi(3) / 6.0 * dg * wn
            + h.powi(4) / 24.0 * (d2g + g0 * g0) * wn;
        let den = h + h.powi(3) * g0 / 6.0 - h.powi(4) * dg / 12.0;
        (wn, num / den)
    }

    /// `w'(0)` for the solution started with `w(h) = h`.
    fn origin_slope(&self, w: &[f64], energy: f64) -> f64 {
        let h = self.h;
        let g0 = self.potential[0] - energy;
        let dg = (self.potential[1] - self.potential[0]) / h;
        w[1] / (h * (1.0 + g0 * h * h / 6.0 + dg * h.powi(3) / 12.0))
    }

    /// Continuous log-derivative mismatch against the exterior `exp(-alpha r)`.
    fn mismatch(&self, alpha: f64) -> f64 {
        let energy = -alpha * alpha;
        let w = self.solve(energy);
        let (wm, dwm) = self.edge(&w, energy);
        (dwm + alpha * wm) / wm.hypot(dwm)
    }

    /// Number of bound states, from the nodes of the zero-energy solution
    /// (including a possible node of its linear exterior continuation).
    fn zero_energy_levels(&self) -> usize {
        let w = self.solve(0.0);
        let (wm, dwm) = self.edge(&w, 0.0);
        count_sign_changes(&w[1..=self.m]) + usize::from(wm * dwm < 0.0)
    }
}

fn count_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Composite Simpson with panels split at the given radii (rounded to grid points).
pub(crate) fn split_simpson(values: &[f64], grid: &RadialGrid, splits: &[f64]) -> f64 {
    let last = grid.len() - 1;
    let mut cuts: Vec<usize> = splits
        .iter()
        .map(|&r| grid.index_at_or_above(r))
        .filter(|&i| i > 0 && i < last)
        .collect();
    cuts.push(0);
    cuts.push(last);
    cuts.sort_unstable();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| simpson(&values[w[0]..=w[1]], grid.step()))
        .sum()
}

/// Safeguarded root refinement: a few bisections, then secant steps kept
/// inside the bracket, falling back to bisection when a step escapes.
pub(crate) fn refine_root(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    for iter in 0..MAX_ROOT_ITERATIONS {
        let mid = 0.5 * (a + b);
        let x = if iter < 8 {
            mid
        } else {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a.min(b) && s < a.max(b) {
                s
            } else {
                mid
            }
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a).abs() < tol {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        // secant steps that land on one side repeatedly: force a bisection
        if iter >= 8 && iter % 4 == 3 {
            let mid = 0.5 * (a + b);
            let fm = f(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
                fb = fm;
            }
        }
    }
    Err(Error::NumericalFailure(format!(
        "root not converged after {MAX_ROOT_ITERATIONS} iterations on [{a}, {b}]"
    )))
}

/// Sign-change brackets of `f` on a uniform scan of `[lo, hi]`.
fn scan_brackets(f: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..points - 1 {
        if fs[i] == 0.0 {
            out.push((xs[i], xs[i]));
        } else if fs[i + 1] != 0.0 && (fs[i] > 0.0) != (fs[i + 1] > 0.0) {
            out.push((xs[i], xs[i + 1]));
        }
    }
    if fs[points - 1] == 0.0 {
        out.push((xs[points - 1], xs[points - 1]));
    }
    out
}

/// Default bound-state window `(1e-6, sqrt(max |U|))`.
pub fn default_bound_window(model: &PotentialModel) -> (f64, f64) {
    (1e-6, model.max_depth().sqrt())
}

/// Default virtual-state window `(-sqrt(max |U|), -1e-6)`.
pub fn default_virtual_window(model: &PotentialModel) -> (f64, f64) {
    (-model.max_depth().sqrt(), -1e-6)
}

/// All bound states with `alpha` in `window`, sorted by node count.
pub fn find_bound_states(
    model: &PotentialModel,
    grid: &RadialGrid,
    window: (f64, f64),
    max_levels: usize,
) -> Result<Vec<BoundState>> {
    let (lo, hi) = window;
    if !(lo > 0.0) {
        return Err(Error::Configuration(format!(
            "bound-state window must start above zero, got {lo}"
        )));
    }
    if hi <= lo {
        return Ok(Vec::new());
    }
    let shooter = Shooter::new(model, grid)?;
    let brackets = scan_brackets(|a| shooter.mismatch(a), lo, hi, SCAN_POINTS);
    let mut states = brackets
        .into_par_iter()
        .map(|(a, b)| {
            let alpha = if a == b {
                a
            } else {
                refine_root(|x| shooter.mismatch(x), a, b, ROOT_TOLERANCE)?
            };
            build_bound_state(&shooter, grid, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    states.sort_by_key(|s| s.node_count);
    states.truncate(max_levels);
    Ok(states)
}

/// Virtual-state wavenumbers (`alpha < 0`, growing tail) in `window`,
/// nearest to threshold first.
pub fn find_virtual_states(
    model: &PotentialModel,
    grid: &RadialGrid,
    window: (f64, f64),
) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(hi < 0.0) {
        return Err(Error::Configuration(format!(
            "virtual-state window must lie below zero, got upper end {hi}"
        )));
    }
    if hi <= lo {
        return Ok(Vec::new());
    }
    let shooter = Shooter::new(model, grid)?;
    let mut roots = scan_brackets(|a| shooter.mismatch(a), lo, hi, SCAN_POINTS)
        .into_iter()
        .map(|(a, b)| {
            if a == b {
                Ok(a)
            } else {
                refine_root(|x| shooter.mismatch(x), a, b, ROOT_TOLERANCE)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

fn build_bound_state(shooter: &Shooter, grid: &RadialGrid, alpha: f64) -> Result<BoundState> {
    let energy = -alpha * alpha;
    let w = shooter.solve(energy);
    let m = shooter.m;
    let (wm, _) = shooter.edge(&w, energy);
    if wm == 0.0 || !wm.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "degenerate matching amplitude at alpha = {alpha}"
        )));
    }
    let node_count = count_sign_changes(&w[1..=m]);
    let sq: Vec<f64> = w.iter().map(|x| x * x).collect();
    let norm = simpson(&sq, grid.step()) + wm * wm / (2.0 * alpha);
    let scale = wm.signum() / norm.sqrt();
    let r_m = shooter.match_radius();
    let um = wm * scale;
    let u: Vec<f64> = (0..grid.len())
        .map(|i| {
            if i <= m {
                w[i] * scale
            } else {
                um * (-alpha * (grid.r(i) - r_m)).exp()
            }
        })
        .collect();
    Ok(BoundState {
        alpha,
        grid: *grid,
        u,
        asymptotic_norm: um * (alpha * r_m).exp(),
        node_count,
        origin_slope: shooter.origin_slope(&w, energy) * scale,
        match_radius: r_m,
    })
}

/// Number of bound states supported by the model (zero-energy node count).
pub fn count_bound_states(model: &PotentialModel, grid: &RadialGrid) -> Result<usize> {
    Ok(Shooter::new(model, grid)?.zero_energy_levels())
}

/// Real scattering solution normalized to `sin(k r + delta) / k` outside the
/// range, with `delta` on the branch that vanishes as `k -> 0`.
pub fn scattering_state(model: &PotentialModel, k: f64, grid: &RadialGrid) -> Result<ScatteringState> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let cutoff = model.range_cutoff();
    if grid.r_max() < cutoff + 2.0 * PI / k {
        return Err(Error::Configuration(format!(
            "grid extent {} shorter than range {cutoff} plus one wavelength {}",
            grid.r_max(),
            2.0 * PI / k
        )));
    }
    let shooter = Shooter::new(model, grid)?;
    let energy = k * k;
    let mut w = shooter.solve(energy);
    let m = shooter.m;
    let r_m = shooter.match_radius();
    let (wm, dwm) = shooter.edge(&w, energy);
    w.extend((m + 1..grid.len()).map(|i| {
        let x = k * (grid.r(i) - r_m);
        wm * x.cos() + dwm / k * x.sin()
    }));

    let i1 = grid.index_at_or_above(r_m + 0.25 * PI / k).max(m + 1);
    let i2 = grid.index_at_or_above(grid.r(i1) + 0.5 * PI / k);
    let (r1, r2) = (grid.r(i1), grid.r(i2));
    let matched = extract_phase_shift(&w, grid, k, r1, r2)?;

    // Pruefer phase theta(r1) = k r1 + delta_L lies in (n pi, (n+1) pi] after n nodes.
    let nodes = count_sign_changes(&w[1..i1]);
    let mut frac = (k * r1 + matched.delta).rem_euclid(PI);
    if frac == 0.0 {
        frac = PI;
    }
    let theta = nodes as f64 * PI + frac;
    let delta_levinson = theta - k * r1;
    let flips = ((delta_levinson - matched.delta) / PI).round() as i64;
    let amplitude = if flips % 2 == 0 {
        matched.amplitude
    } else {
        -matched.amplitude
    };
    if !(amplitude > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "inconsistent phase bookkeeping at k = {k}"
        )));
    }
    let levels = shooter.zero_energy_levels();
    let delta = delta_levinson - levels as f64 * PI;
    let scale = if levels % 2 == 0 { 1.0 } else { -1.0 } / (amplitude * k);
    let origin_slope = shooter.origin_slope(&w, energy) * scale;
    w.iter_mut().for_each(|x| *x *= scale);
    Ok(ScatteringState {
        k,
        phase: PhaseShift::from_continuous(delta),
        grid: *grid,
        v: w,
        origin_slope,
        match_radius: r_m,
    })
}

/// Two-point asymptotic match `samples(r) = C sin(k r + delta)` at `r1`, `r2`
/// (interpolated when off-grid).
pub fn extract_phase_shift(
    samples: &[f64],
    grid: &RadialGrid,
    k: f64,
    r1: f64,
    r2: f64,
) -> Result<PhaseMatch> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    if samples.len() != grid.len() {
        return Err(Error::Configuration("samples do not match the grid".into()));
    }
    for r in [r1, r2] {
        if !(0.0..=grid.r_max()).contains(&r) {
            return Err(Error::Configuration(format!("match radius {r} outside the grid")));
        }
    }
    let spacing = k * (r2 - r1);
    if (spacing - PI * (spacing / PI).round()).abs() < 1e-3 {
        return Err(Error::Configuration(format!(
            "k (r2 - r1) = {spacing} is too close to a multiple of pi"
        )));
    }
    let (y1, y2) = (grid.interpolate(samples, r1), grid.interpolate(samples, r2));
    let (s1, c1) = (k * r1).sin_cos();
    let (s2, c2) = (k * r2).sin_cos();
    let det = s1 * c2 - c1 * s2;
    let a = (y1 * c2 - y2 * c1) / det;
    let b = (s1 * y2 - s2 * y1) / det;
    Ok(if a == 0.0 {
        PhaseMatch {
            delta: 0.5 * PI,
            amplitude: b,
        }
    } else {
        let delta = (b / a).atan();
        PhaseMatch {
            delta,
            amplitude: a / delta.cos(),
        }
    })
}

/// Least-squares fit of `ln u = ln n_as + slope * r` over grid points in `window`.
pub fn fit_exponential_tail(grid: &RadialGrid, samples: &[f64], window: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = window;
    let points: Vec<(f64, f64)> = grid
        .radii()
        .zip(samples)
        .filter(|(r, _)| *r >= lo && *r <= hi)
        .map(|(r, &u)| (r, u))
        .collect();
    if points.len() < 2 {
        return Err(Error::Fit(format!("fewer than two samples in [{lo}, {hi}]")));
    }
    if let Some((r, u)) = points.iter().find(|(_, u)| !(*u > 0.0)) {
        return Err(Error::Fit(format!(
            "wave function not positive in the fit window (u({r}) = {u})"
        )));
    }
    let n = points.len() as f64;
    let mean_r = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_r) * (p.1.ln() - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_r).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(TailFit {
        n_as: (mean_y - slope * mean_r).exp(),
        slope,
    })
}

/// `|int_0^inf u v dr|`, the tail beyond `r_max` done in closed form.
pub fn orthogonality_defect(bound: &BoundState, scattering: &ScatteringState) -> Result<f64> {
    if bound.grid != scattering.grid {
        return Err(Error::Configuration("states live on different grids".into()));
    }
    let grid = &bound.grid;
    let products: Vec<f64> = bound.u.iter().zip(&scattering.v).map(|(u, v)| u * v).collect();
    let inner = split_simpson(
        &products,
        grid,
        &[bound.match_radius, scattering.match_radius],
    );
    let (alpha, k, delta) = (bound.alpha, scattering.k, scattering.delta());
    let r = grid.r_max();
    let phase = k * r + delta;
    let tail = bound.asymptotic_norm * (-alpha * r).exp()
        * (alpha * phase.sin() + k * phase.cos())
        / ((alpha * alpha + k * k) * k);
    Ok((inner + tail).abs())
}

/// `int_0^inf u_1 u_2 dr` for two bound states on the same grid.
pub fn bound_overlap(a: &BoundState, b: &BoundState) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::Configuration("states live on different grids".into()));
    }
    let products: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x * y).collect();
    let inner = split_simpson(&products, &a.grid, &[a.match_radius, b.match_radius]);
    let s = a.alpha + b.alpha;
    let tail = a.asymptotic_norm * b.asymptotic_norm * (-s * a.grid.r_max()).exp() / s;
    Ok(inner + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn free() -> PotentialModel {
        PotentialModel::zero(1.0).unwrap()
    }

    #[test]
    fn free_scattering_is_sine() {
        let grid = RadialGrid::new(1e-3, 20.0).unwrap();
        let w = integrate_outward(&free(), 1.0, &grid);
        // w(h) = h fixes the scale to sin(r) up to O(h^2).
        let scale = w[1000] / 1f64.sin();
        let worst = grid
            .radii()
            .zip(&w)
            .skip(1)
            .filter(|(r, _)| r.sin().abs() > 0.1)
            .map(|(r, w)| ((w / scale) / r.sin() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "worst {worst}");
    }

    #[test]
    fn free_bound_energy_is_sinh() {
        let grid = RadialGrid::new(1e-3, 5.0).unwrap();
        let w = integrate_outward(&free(), -1.0, &grid);
        let scale = w[1000] / 1f64.sinh();
        for i in [10, 500, 2500, 5000] {
            let r = grid.r(i);
            assert_relative_eq!(w[i] / scale, r.sinh(), max_relative = 1e-8);
        }
    }

    #[test]
    fn well_interior_is_sine_kappa_r() {
        let grid = RadialGrid::new(1e-3, 2.0).unwrap();
        let well = PotentialModel::spherical_well(2.8, 1.0).unwrap();
        let alpha: f64 = 0.159;
        let kappa = (2.8 - alpha * alpha).sqrt();
        assert_relative_eq!(kappa, 1.66575, max_relative = 1e-5);
        let w = integrate_outward(&well, -alpha * alpha, &grid);
        let scale = w[500] / (kappa * 0.5).sin();
        for i in [1, 100, 700, 1000] {
            let r = grid.r(i);
            assert_relative_eq!(w[i] / scale, (kappa * r).sin(), max_relative = 1e-8);
        }
    }

    #[test]
    fn free_potential_has_zero_phase() {
        let grid = RadialGrid::new(1e-3, 80.0).unwrap();
        for k in [0.1, 0.5, 1.3] {
            let s = scattering_state(&free(), k, &grid).unwrap();
            assert!(s.delta().abs() < 1e-10, "k = {k}: {}", s.delta());
            for r in [0.3, 7.0, 40.0] {
                assert_relative_eq!(s.value_at(r), (k * r).sin() / k, max_relative = 1e-8);
            }
            assert_relative_eq!(s.origin_slope(), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn scattering_errors() {
        let grid = RadialGrid::new(1e-3, 10.0).unwrap();
        assert!(matches!(scattering_state(&free(), 0.0, &grid), Err(Error::Domain(_))));
        assert!(matches!(
            scattering_state(&free(), 0.1, &grid),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn two_point_phase_extraction() {
        let grid = RadialGrid::new(1e-3, 20.0).unwrap();
        let sample = |f: &dyn Fn(f64) -> f64| grid.radii().map(f).collect::<Vec<_>>();
        let m = extract_phase_shift(&sample(&|r: f64| r.sin()), &grid, 1.0, 10.0, 11.0).unwrap();
        assert!(m.delta.abs() < 1e-12);
        assert_relative_eq!(m.amplitude, 1.0, max_relative = 1e-12);
        let m = extract_phase_shift(&sample(&|r: f64| r.cos()), &grid, 1.0, 10.0, 11.0).unwrap();
        assert_relative_eq!(m.delta, 0.5 * PI, max_relative = 1e-12);
        let m = extract_phase_shift(&sample(&|r: f64| 2.0 * (r + 0.3).sin()), &grid, 1.0, 10.0, 11.0)
            .unwrap();
        assert_relative_eq!(m.delta, 0.3, max_relative = 1e-12);
        assert_relative_eq!(m.amplitude, 2.0, max_relative = 1e-12);
        let err = extract_phase_shift(&sample(&|r: f64| r.sin()), &grid, 1.0, 10.0, 10.0 + PI);
        assert!(matches!(err, Err(Error::Configuration(_))));
    }

    #[test]
    fn tail_fit() {
        let grid = RadialGrid::new(1e-2, 12.0).unwrap();
        let u: Vec<f64> = grid.radii().map(|r| 0.7 * (-0.2 * r).exp()).collect();
        let fit = fit_exponential_tail(&grid, &u, (5.0, 10.0)).unwrap();
        assert_relative_eq!(fit.n_as, 0.7, max_relative = 1e-12);
        assert_relative_eq!(fit.slope, -0.2, max_relative = 1e-12);
        let bad: Vec<f64> = grid.radii().map(|r| (r - 7.0) * (-0.2 * r).exp()).collect();
        assert!(matches!(fit_exponential_tail(&grid, &bad, (5.0, 10.0)), Err(Error::Fit(_))));
    }

    #[test]
    fn bound_search_window_edges() {
        let grid = RadialGrid::new(1e-3, 150.0).unwrap();
        let well = PotentialModel::spherical_well(2.8, 1.0).unwrap();
        assert!(find_bound_states(&well, &grid, (0.5, 0.2), 5).unwrap().is_empty());
        assert!(find_bound_states(&well, &grid, (0.3, 1.0), 5).unwrap().is_empty());
        assert!(find_bound_states(&well, &grid, (0.0, 1.0), 5).is_err());
        assert!(find_bound_states(&free(), &grid, (1e-6, 1.0), 5).unwrap().is_empty());
    }

    #[test]
    fn refine_root_reports_bad_bracket() {
        assert!(refine_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        let r = refine_root(|x| x.cos(), 1.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 0.5 * PI, max_relative = 1e-13);
    }

    #[test]
    fn phase_shift_branches() {
        let p = PhaseShift::from_continuous(-2.0);
        assert_relative_eq!(p.value(), -2.0, max_relative = 1e-15);
        assert!(p.principal > -0.5 * PI && p.principal <= 0.5 * PI);
        assert_eq!(p.winding, -1);
        assert_eq!(PhaseShift::from_continuous(0.5 * PI).winding, 0);
    }
}
