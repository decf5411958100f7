//! First-order response to a small added potential `U1`.
//!
//! In reduced units the level shift is `dE = int u^2 U1 dr`, and the
//! amplitude shift is `df = -e^{2 i delta0} int v^2 U1 dr` with `v` in the
//! `sin(kr + delta)/k` normalization. Requiring `-alpha^2 = -alpha0^2 + dE`
//! at first order fixes `alpha = alpha0 - dE / (2 alpha0)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{simpson, RadialGrid};
use crate::potentials::PotentialModel;
use crate::solver::{default_bound_window, find_bound_states, scattering_state, BoundState};

/// `int_0^{r_max} f(r) U1(r) dr` with panels split at the breakpoints of
/// `U1` and at `extra` radii; each panel uses the one-sided limits of `U1`
/// at its ends so steps are integrated exactly when they sit on grid points.
fn weighted_integral(grid: &RadialGrid, f: &[f64], u1: &PotentialModel, extra: &[f64]) -> Result<f64> {
    if u1.range_cutoff() > grid.r_max() {
        return Err(Error::Configuration(format!(
            "perturbation range {} exceeds the grid extent {}",
            u1.range_cutoff(),
            grid.r_max()
        )));
    }
    let last = grid.len() - 1;
    let mut cuts: Vec<usize> = u1
        .breakpoints()
        .iter()
        .chain(extra)
        .map(|&r| grid.index_at_or_above(r))
        .filter(|&i| i > 0 && i < last)
        .collect();
    cuts.extend([0, last]);
    cuts.sort_unstable();
    cuts.dedup();
    let h = grid.step();
    Ok(cuts
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let panel: Vec<f64> = (a..=b)
                .map(|i| {
                    let r = grid.r(i);
                    let u = if i == b { u1.value_left(r) } else { u1.value(r) };
                    f[i] * u
                })
                .collect();
            simpson(&panel, h)
        })
        .sum())
}

/// `dE = int_0^inf u_alpha^2 U1 dr`.
pub fn bound_energy_shift(b: &BoundState, u1: &PotentialModel) -> Result<f64> {
    let sq: Vec<f64> = b.samples().iter().map(|u| u * u).collect();
    weighted_integral(b.grid(), &sq, u1, &[b.match_radius()])
}

/// `alpha = alpha0 - dE / (2 alpha0)`, the first-order root of
/// `-alpha^2 = -alpha0^2 + dE`.
pub fn alpha_shift_first_order(alpha0: f64, delta_e: f64) -> Result<f64> {
    if !(alpha0 > 0.0) {
        return Err(Error::Domain(format!("alpha0 must be positive, got {alpha0}")));
    }
    Ok(alpha0 - delta_e / (2.0 * alpha0))
}

/// Scattering-length form `e^{2 i delta} = (alpha - i k) / (alpha + i k)`.
pub fn scattering_length_smatrix(alpha: f64, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    Ok(Complex64::new(alpha, -k) / Complex64::new(alpha, k))
}

/// First-order amplitude change at one `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeShift {
    pub k: f64,
    pub delta0: f64,
    /// `int v^2 U1 dr`.
    pub overlap: f64,
    pub delta_f: Complex64,
}

impl AmplitudeShift {
    /// Phase shift implied by `e^{2 i delta} = 1 + 2 i k (f0 + df)`, on the
    /// branch continuous with `delta0`.
    pub fn phase(&self) -> f64 {
        self.delta0 + 0.5 * Complex64::new(1.0, -2.0 * self.k * self.overlap).arg()
    }
}

/// `df = -e^{2 i delta0} int v^2 U1 dr` for the scattering state of `model0`.
pub fn two_potential_delta_f(
    model0: &PotentialModel,
    u1: &PotentialModel,
    k: f64,
    grid: &RadialGrid,
) -> Result<AmplitudeShift> {
    let s = scattering_state(model0, k, grid)?;
    let sq: Vec<f64> = s.samples().iter().map(|v| v * v).collect();
    let overlap = weighted_integral(grid, &sq, u1, &[s.match_radius()])?;
    let delta0 = s.delta();
    Ok(AmplitudeShift {
        k,
        delta0,
        overlap,
        delta_f: -Complex64::from_polar(1.0, 2.0 * delta0) * overlap,
    })
}

/// `df` with `v^2` replaced by its pole approximation
/// `u^2 / (2 alpha (alpha^2 + k^2))`, i.e. `-e^{2 i delta0} dE / (2 alpha (alpha^2 + k^2))`.
pub fn pole_approx_delta_f(b: &BoundState, delta_e: f64, delta0: f64, k: f64) -> Complex64 {
    let alpha = b.alpha();
    -Complex64::from_polar(1.0, 2.0 * delta0) * delta_e / (2.0 * alpha * (alpha * alpha + k * k))
}

/// One row of a consistency report.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyRow {
    pub eps: f64,
    pub delta_e_first_order: f64,
    pub delta_e_exact: f64,
    pub alpha_first_order: f64,
    pub alpha_exact: f64,
    /// Largest `|phase(first order) - phase(exact)|` over the k-list.
    pub phase_error: f64,
}

impl ConsistencyRow {
    pub fn energy_error(&self) -> f64 {
        (self.delta_e_first_order - self.delta_e_exact).abs()
    }

    pub fn alpha_error(&self) -> f64 {
        (self.alpha_first_order - self.alpha_exact).abs()
    }
}

/// First-order predictions against exact re-solves of `model0 + eps * profile`.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub alpha0: f64,
    pub k_list: Vec<f64>,
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    /// Nonzero-`eps` rows of one sign, by decreasing `|eps|`.
    fn branch(&self, positive: bool) -> Vec<&ConsistencyRow> {
        let mut rows: Vec<&ConsistencyRow> = self
            .rows
            .iter()
            .filter(|r| r.eps != 0.0 && (r.eps > 0.0) == positive)
            .collect();
        rows.sort_by(|a, b| b.eps.abs().total_cmp(&a.eps.abs()));
        rows
    }

    /// Error ratios `(energy, phase, alpha)` between successive rows of the
    /// same sign of `eps`, larger `|eps|` first.
    pub fn successive_ratios(&self) -> Vec<(f64, f64, f64)> {
        [true, false]
            .iter()
            .flat_map(|&positive| {
                self.branch(positive)
                    .windows(2)
                    .map(|w| {
                        (
                            w[0].energy_error() / w[1].energy_error(),
                            w[0].phase_error / w[1].phase_error,
                            w[0].alpha_error() / w[1].alpha_error(),
                        )
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Second-order constants `(energy, phase, alpha)` from the two smallest
    /// `|eps|` of the given sign, Richardson-extrapolated assuming
    /// `error = C eps^2 + D |eps|^3`.
    pub fn second_order_constants(&self, positive: bool) -> Option<(f64, f64, f64)> {
        let rows = self.branch(positive);
        let (l, s) = (rows.get(rows.len().checked_sub(2)?)?, rows.last()?);
        let q = l.eps.abs() / s.eps.abs();
        let c = |es: f64, el: f64| {
            let (cs, cl) = (es / s.eps.powi(2), el / l.eps.powi(2));
            (q * cs - cl) / (q - 1.0)
        };
        Some((
            c(s.energy_error(), l.energy_error()),
            c(s.phase_error, l.phase_error),
            c(s.alpha_error(), l.alpha_error()),
        ))
    }
}

fn wrap_phase(d: f64) -> f64 {
    let mut w = d.rem_euclid(PI);
    if w > 0.5 * PI {
        w -= PI;
    }
    w
}

/// Runs the first-order predictions for `model0 + eps * profile` over
/// `eps_list` and `k_list` and compares them with exact re-solves.
pub fn consistency_report(
    model0: &PotentialModel,
    profile: &PotentialModel,
    eps_list: &[f64],
    k_list: &[f64],
    grid: &RadialGrid,
) -> Result<ConsistencyReport> {
    let states = find_bound_states(model0, grid, default_bound_window(model0), usize::MAX)?;
    if states.len() != 1 {
        return Err(Error::Configuration(format!(
            "first-order consistency needs exactly one bound state, found {}",
            states.len()
        )));
    }
    let b0 = &states[0];
    let alpha0 = b0.alpha();
    let base: Vec<AmplitudeShift> = k_list
        .par_iter()
        .map(|&k| two_potential_delta_f(model0, profile, k, grid))
        .collect::<Result<_>>()?;

    let rows = eps_list
        .par_iter()
        .map(|&eps| {
            let u1 = profile.scaled(eps);
            let exact_model = model0.plus(&u1);
            let delta_e = bound_energy_shift(b0, &u1)?;
            let exact = find_bound_states(&exact_model, grid, default_bound_window(&exact_model), usize::MAX)?;
            let alpha_exact = exact
                .iter()
                .map(BoundState::alpha)
                .min_by(|a, b| (a - alpha0).abs().total_cmp(&(b - alpha0).abs()))
                .ok_or_else(|| Error::NumericalFailure(format!("bound state lost at eps = {eps}")))?;
            let mut phase_error = 0.0f64;
            for shift in &base {
                let predicted = AmplitudeShift {
                    overlap: eps * shift.overlap,
                    ..*shift
                }
                .phase();
                let exact = scattering_state(&exact_model, shift.k, grid)?.delta();
                phase_error = phase_error.max(wrap_phase(predicted - exact).abs());
            }
            Ok(ConsistencyRow {
                eps,
                delta_e_first_order: delta_e,
                delta_e_exact: alpha0 * alpha0 - alpha_exact * alpha_exact,
                alpha_first_order: alpha_shift_first_order(alpha0, delta_e)?,
                alpha_exact,
                phase_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConsistencyReport {
        alpha0,
        k_list: k_list.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup() -> (PotentialModel, RadialGrid, BoundState) {
        let model = PotentialModel::spherical_well(2.8, 1.0).unwrap();
        let grid = RadialGrid::covering(1e-3, 1.0, Some(0.159), Some(0.1)).unwrap();
        let b = find_bound_states(&model, &grid, default_bound_window(&model), 1)
            .unwrap()
            .remove(0);
        (model, grid, b)
    }

    fn indicator() -> PotentialModel {
        PotentialModel::spherical_well(1.0, 1.0).unwrap().scaled(-1.0)
    }

    #[test]
    fn energy_shift_is_interior_weight() {
        let (_, grid, b) = setup();
        assert_eq!(bound_energy_shift(&b, &PotentialModel::zero(1.0).unwrap()).unwrap(), 0.0);
        let eps = -0.01;
        let de = bound_energy_shift(&b, &indicator().scaled(eps)).unwrap();
        let n = grid.index_at_or_above(1.0);
        let sq: Vec<f64> = b.samples()[..=n].iter().map(|u| u * u).collect();
        assert_relative_eq!(de, eps * simpson(&sq, grid.step()), max_relative = 1e-12);
        assert!(de < 0.0);
        let de2 = bound_energy_shift(&b, &indicator().scaled(2.0 * eps)).unwrap();
        assert_relative_eq!(de2, 2.0 * de, max_relative = 1e-14);
    }

    #[test]
    fn closure_of_first_order_alpha() {
        assert_eq!(alpha_shift_first_order(0.159, 0.0).unwrap(), 0.159);
        for de in [1e-3, -1e-3, 1e-5] {
            let a = alpha_shift_first_order(0.159, de).unwrap();
            let defect = (-a * a) - (-0.159f64 * 0.159) - de;
            assert!((defect + de * de / (4.0 * 0.159 * 0.159)).abs() < 1e-15);
        }
        assert!(alpha_shift_first_order(0.0, 1.0).is_err());
        assert!(alpha_shift_first_order(0.159, -0.01).unwrap() > 0.159);
    }

    #[test]
    fn scattering_length_form() {
        let s = scattering_length_smatrix(0.159, 0.159).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_relative_eq!(s.arg(), -0.5 * PI, max_relative = 1e-14);
        let s = scattering_length_smatrix(0.159, 1e-12).unwrap();
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(scattering_length_smatrix(0.159, 0.0).is_err());
    }

    #[test]
    fn zero_perturbation() {
        let (model, grid, _) = setup();
        let zero = PotentialModel::zero(1.0).unwrap();
        let shift = two_potential_delta_f(&model, &zero, 0.3, &grid).unwrap();
        assert_eq!(shift.delta_f, Complex64::new(0.0, 0.0));
        let report = consistency_report(&model, &indicator(), &[0.0], &[0.1], &grid).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.energy_error(), 0.0);
        assert_eq!(row.alpha_error(), 0.0);
        assert_eq!(row.phase_error, 0.0);
    }

    #[test]
    fn rejects_model_with_two_levels() {
        let model = PotentialModel::spherical_well(22.547, 1.0).unwrap();
        let grid = RadialGrid::covering(1e-3, 1.0, Some(0.159), Some(0.1)).unwrap();
        assert!(matches!(
            consistency_report(&model, &indicator(), &[0.01], &[0.1], &grid),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn errors_scale_quadratically() {
        let (model, grid, _) = setup();
        let report =
            consistency_report(&model, &indicator(), &[0.02, 0.01, -0.02, -0.01], &[0.1, 0.3], &grid)
                .unwrap();
        let ratios = report.successive_ratios();
        assert_eq!(ratios.len(), 2);
        for (e, p, a) in ratios {
            for r in [e, p, a] {
                assert!(r > 2.0 && r < 6.0, "{r}");
            }
        }
        let (ce, _, ca) = report.second_order_constants(true).unwrap();
        assert!(ce > 0.0 && ca > 0.0);
        // deepening raises alpha
        let deeper = report.rows.iter().find(|r| r.eps == -0.01).unwrap();
        assert!(deeper.alpha_exact > report.alpha0 && deeper.alpha_first_order > report.alpha0);
    }

    #[test]
    fn wrap_phase_range() {
        assert_relative_eq!(wrap_phase(PI + 0.1), 0.1, max_relative = 1e-12);
        assert_relative_eq!(wrap_phase(-0.2), -0.2, max_relative = 1e-12);
    }
}
