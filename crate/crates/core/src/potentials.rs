//! Reduced potential models.
//!
//! Units throughout the crate use `hbar^2 / 2m = 1`, so the reduced potential
//! `U(r) = 2m V(r) / hbar^2` is numerically equal to `V(r)`, energies are in
//! inverse length squared, a bound state at wavenumber `alpha` has `E = -alpha^2`
//! and a scattering state at wavenumber `k` has `E = k^2`.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Relative magnitude below which a smooth potential is truncated to zero.
pub const RANGE_THRESHOLD: f64 = 1e-12;

/// The shape family of a local model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    SphericalWell,
    Bargmann,
    Gaussian,
    Tabulated,
    Scaled,
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Well { depth: f64, radius: f64 },
    Bargmann { beta: f64, alpha_b: f64, cutoff: f64 },
    Gaussian { height: f64, width: f64, cutoff: f64 },
    Tabulated { r: Vec<f64>, u: Vec<f64> },
    Scaled { factor: f64, inner: Box<PotentialModel> },
    Sum(Vec<PotentialModel>),
}

/// A local reduced potential `U(r)` with a finite range.
///
/// Models are immutable after construction. `U(r)` is exactly zero beyond
/// [`PotentialModel::range_cutoff`].
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialModel(Shape);

impl PotentialModel {
    /// Square well: `U = -depth` for `r < radius`, `0` for `r >= radius`.
    pub fn spherical_well(depth: f64, radius: f64) -> Result<Self> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "well depth must be positive, got {depth}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "well radius must be positive, got {radius}"
            )));
        }
        Ok(Self(Shape::Well { depth, radius }))
    }

    /// Bargmann potential with a single bound state at wavenumber `alpha_b`:
    ///
    /// `U(r) = -2 (beta^2 - alpha_b^2) / (cosh(beta r) - (alpha_b / beta) sinh(beta r))^2`.
    pub fn bargmann(beta: f64, alpha_b: f64) -> Result<Self> {
        if !(alpha_b > 0.0 && beta > alpha_b && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bargmann potential needs beta > alpha_b > 0, got beta = {beta}, alpha_b = {alpha_b}"
            )));
        }
        let profile = |r: f64| bargmann_profile(beta, alpha_b, r);
        // |U| rises from r = 0 up to the minimum of the denominator at
        // tanh(beta r) = alpha_b / beta, then decays monotonically.
        let r_peak = (alpha_b / beta).atanh() / beta;
        let cutoff = relative_cutoff(profile, r_peak, 1.0 / beta);
        Ok(Self(Shape::Bargmann {
            beta,
            alpha_b,
            cutoff,
        }))
    }

    /// Gaussian profile `height * exp(-(r / width)^2)`, truncated at the
    /// relative threshold. Used mainly as a perturbing potential.
    pub fn gaussian(height: f64, width: f64) -> Result<Self> {
        if !height.is_finite() || height == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gaussian height must be finite and nonzero, got {height}"
            )));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        let cutoff = width * (-RANGE_THRESHOLD.ln()).sqrt();
        Ok(Self(Shape::Gaussian {
            height,
            width,
            cutoff,
        }))
    }

    /// Tabulated potential, linearly interpolated between samples and zero
    /// beyond the last sample. Below the first sample the first value is held.
    pub fn tabulated(r: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if r.len() != u.len() {
            return Err(Error::Table(format!(
                "{} radii but {} potential values",
                r.len(),
                u.len()
            )));
        }
        if r.len() < 2 {
            return Err(Error::Table("need at least two samples".into()));
        }
        if r[0] < 0.0 {
            return Err(Error::Table(format!("negative radius {}", r[0])));
        }
        if let Some(bad) = r.iter().chain(u.iter()).find(|v| !v.is_finite()) {
            return Err(Error::Table(format!("non-finite sample {bad}")));
        }
        if let Some(w) = r.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Table(format!(
                "radii must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self(Shape::Tabulated { r, u }))
    }

    /// Loads a two-column `r,U` CSV. A header row and `#` comment lines are
    /// allowed.
    pub fn tabulated_from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rs = Vec::new();
        let mut us = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Table(e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::Table(format!(
                    "record {} has {} columns, expected 2",
                    line + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(r), Ok(u)) => {
                    rs.push(r);
                    us.push(u);
                }
                // header row
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Table(format!(
                        "record {} is not numeric: {:?}",
                        line + 1,
                        record
                    )))
                }
            }
        }
        Self::tabulated(rs, us)
    }

    pub fn tabulated_from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::tabulated_from_csv(file)
    }

    /// The zero potential on `[0, cutoff]`.
    pub fn zero(cutoff: f64) -> Result<Self> {
        Self::tabulated(vec![0.0, cutoff], vec![0.0, 0.0])
    }

    /// `factor * U(r)`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self(Shape::Scaled {
            factor,
            inner: Box::new(self.clone()),
        })
    }

    /// `U(r) + other(r)`.
    pub fn plus(&self, other: &PotentialModel) -> Self {
        let mut terms = match &self.0 {
            Shape::Sum(terms) => terms.clone(),
            _ => vec![self.clone()],
        };
        terms.push(other.clone());
        Self(Shape::Sum(terms))
    }

    pub fn kind(&self) -> PotentialKind {
        match self.0 {
            Shape::Well { .. } => PotentialKind::SphericalWell,
            Shape::Bargmann { .. } => PotentialKind::Bargmann,
            Shape::Gaussian { .. } => PotentialKind::Gaussian,
            Shape::Tabulated { .. } => PotentialKind::Tabulated,
            Shape::Scaled { .. } => PotentialKind::Scaled,
            Shape::Sum(_) => PotentialKind::Sum,
        }
    }

    /// Well parameters `(depth, radius)` when this is a plain spherical well.
    pub fn well_parameters(&self) -> Option<(f64, f64)> {
        match self.0 {
            Shape::Well { depth, radius } => Some((depth, radius)),
            _ => None,
        }
    }

    /// Bargmann parameters `(beta, alpha_b)`.
    pub fn bargmann_parameters(&self) -> Option<(f64, f64)> {
        match self.0 {
            Shape::Bargmann { beta, alpha_b, .. } => Some((beta, alpha_b)),
            _ => None,
        }
    }

    /// Radius beyond which `U(r) = 0` exactly.
    pub fn range_cutoff(&self) -> f64 {
        match &self.0 {
            Shape::Well { radius, .. } => *radius,
            Shape::Bargmann { cutoff, .. } | Shape::Gaussian { cutoff, .. } => *cutoff,
            Shape::Tabulated { r, .. } => *r.last().expect("validated table"),
            Shape::Scaled { inner, .. } => inner.range_cutoff(),
            Shape::Sum(terms) => terms.iter().map(|t| t.range_cutoff()).fold(0.0, f64::max),
        }
    }

    /// Radii where the profile is discontinuous (the range cutoffs of the
    /// truncated terms and the edge of any step), sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match &self.0 {
            Shape::Scaled { inner, .. } => inner.collect_breakpoints(out),
            Shape::Sum(terms) => terms.iter().for_each(|t| t.collect_breakpoints(out)),
            _ => out.push(self.range_cutoff()),
        }
    }

    /// Checked evaluation of the profile. Uses the half-open convention at
    /// discontinuities, so a well of radius `a` gives 0 at `r = a`.
    pub fn evaluate_local(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
        }
        Ok(self.value(r))
    }

    /// Right-continuous value `U(r)`.
    pub fn value(&self, r: f64) -> f64 {
        self.eval(r, false)
    }

    /// Left limit `U(r-)`. Equal to [`value`](Self::value) except at
    /// breakpoints, where it is the limit from the interior.
    pub fn value_left(&self, r: f64) -> f64 {
        self.eval(r, true)
    }

    fn eval(&self, r: f64, left: bool) -> f64 {
        let inside = |edge: f64| if left { r <= edge } else { r < edge };
        match &self.0 {
            Shape::Well { depth, radius } => {
                if inside(*radius) {
                    -depth
                } else {
                    0.0
                }
            }
            Shape::Bargmann {
                beta,
                alpha_b,
                cutoff,
            } => {
                if inside(*cutoff) {
                    bargmann_profile(*beta, *alpha_b, r)
                } else {
                    0.0
                }
            }
            Shape::Gaussian {
                height,
                width,
                cutoff,
            } => {
                if inside(*cutoff) {
                    height * (-(r / width).powi(2)).exp()
                } else {
                    0.0
                }
            }
            Shape::Tabulated { r: rs, u } => {
                let last = *rs.last().expect("validated table");
                if !inside(last) {
                    return 0.0;
                }
                if r <= rs[0] {
                    return u[0];
                }
                let j = rs.partition_point(|&x| x <= r).min(rs.len() - 1);
                let (r0, r1) = (rs[j - 1], rs[j]);
                let t = (r - r0) / (r1 - r0);
                u[j - 1] + t * (u[j] - u[j - 1])
            }
            Shape::Scaled { factor, inner } => factor * inner.eval(r, left),
            Shape::Sum(terms) => terms.iter().map(|t| t.eval(r, left)).sum(),
        }
    }

    /// Largest `|U|` sampled on `[0, cutoff]`; sets the default eigenvalue window.
    pub fn max_depth(&self) -> f64 {
        let cutoff = self.range_cutoff();
        let n = 4000;
        (0..=n)
            .map(|i| -self.value_left(cutoff * i as f64 / n as f64))
            .fold(0.0, f64::max)
    }
}

fn bargmann_profile(beta: f64, alpha_b: f64, r: f64) -> f64 {
    let br = beta * r;
    if br > 350.0 {
        // cosh and sinh overflow; use the exponential tail form.
        let q = 1.0 - alpha_b / beta;
        return -8.0 * (beta * beta - alpha_b * alpha_b) * (-2.0 * br).exp() / (q * q);
    }
    let d = br.cosh() - (alpha_b / beta) * br.sinh();
    -2.0 * (beta * beta - alpha_b * alpha_b) / (d * d)
}

/// Radius past `r_peak` where `|f(r)| / |f(0)|` first drops below the
/// threshold, assuming `|f|` decays monotonically beyond `r_peak`.
fn relative_cutoff(f: impl Fn(f64) -> f64, r_peak: f64, scale: f64) -> f64 {
    let target = RANGE_THRESHOLD * f(0.0).abs();
    let below = |r: f64| f(r).abs() < target;
    let mut lo = r_peak;
    let mut hi = r_peak + scale;
    while !below(hi) {
        lo = hi;
        hi += scale;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    hi
}

/// One-term separable (Yamaguchi) interaction.
///
/// In the radial equation the kernel acting on `u(r)` is
/// `-strength * exp(-beta r) * exp(-beta r')`, i.e. `strength = 4 pi lambda`
/// for the three-dimensional form `-lambda (e^{-beta r}/r)(e^{-beta r'}/r')`.
/// A bound state at `alpha_b` requires `strength = 2 beta (beta + alpha_b)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparableModel {
    beta: f64,
    strength: f64,
}

impl SeparableModel {
    /// Strength fixed so that the solitary bound state sits at `E = -alpha_b^2`.
    pub fn yamaguchi(beta: f64, alpha_b: f64) -> Result<Self> {
        if !(alpha_b > 0.0 && beta > alpha_b && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "yamaguchi kernel needs beta > alpha_b > 0, got beta = {beta}, alpha_b = {alpha_b}"
            )));
        }
        Ok(Self {
            beta,
            strength: Self::strength_for(beta, alpha_b),
        })
    }

    /// Arbitrary attractive strength; binds only above `2 beta^3`.
    pub fn with_strength(beta: f64, strength: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite() && strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "yamaguchi kernel needs beta > 0 and strength >= 0, got {beta}, {strength}"
            )));
        }
        Ok(Self { beta, strength })
    }

    /// `2 beta (beta + alpha_b)^2`.
    pub fn strength_for(beta: f64, alpha_b: f64) -> f64 {
        2.0 * beta * (beta + alpha_b).powi(2)
    }

    /// Threshold strength `2 beta^3` (the `alpha_b -> 0` limit).
    pub fn critical_strength(beta: f64) -> f64 {
        2.0 * beta.powi(3)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Radial kernel strength.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Strength of the three-dimensional kernel, `strength / 4 pi`.
    pub fn lambda(&self) -> f64 {
        self.strength / (4.0 * std::f64::consts::PI)
    }

    /// Bound wavenumber, if the strength exceeds the threshold.
    pub fn bound_alpha(&self) -> Option<f64> {
        let alpha = (self.strength / (2.0 * self.beta)).sqrt() - self.beta;
        (alpha > 0.0).then_some(alpha)
    }

    /// `U(r, r')` of the radial equation.
    pub fn kernel(&self, r: f64, r_prime: f64) -> f64 {
        -self.strength * (-self.beta * (r + r_prime)).exp()
    }
}

/// Anything that can be asked for a local `U(r)`.
pub trait Interaction {
    fn evaluate_local(&self, r: f64) -> Result<f64>;
}

impl Interaction for PotentialModel {
    fn evaluate_local(&self, r: f64) -> Result<f64> {
        PotentialModel::evaluate_local(self, r)
    }
}

impl Interaction for SeparableModel {
    fn evaluate_local(&self, _r: f64) -> Result<f64> {
        Err(Error::Unsupported(
            "separable kernel has no local value U(r); it depends on r and r'",
        ))
    }
}
