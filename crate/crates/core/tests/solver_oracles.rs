//! The Numerov solver checked against closed-form square-well solutions.

use num_complex::Complex64;
use wavepole::analytic::{
    well_alpha_roots, well_bound_state, well_scattering, well_smatrix, well_smatrix_residue,
};
use wavepole::solver::{
    bound_overlap, count_bound_states, default_bound_window, find_bound_states,
    find_virtual_states, orthogonality_defect, scattering_state,
};
use wavepole::{PotentialModel, RadialGrid};

fn well(depth: f64) -> PotentialModel {
    PotentialModel::spherical_well(depth, 1.0).unwrap()
}

fn grid(step: f64) -> RadialGrid {
    RadialGrid::covering(step, 1.0, Some(0.159), Some(0.1)).unwrap()
}

#[test]
fn eigenvalues_match_matching_condition_roots() {
    let g = grid(1e-3);
    for depth in [2.8, 10.0, 22.547] {
        let model = well(depth);
        let states = find_bound_states(&model, &g, default_bound_window(&model), 10).unwrap();
        let roots = well_alpha_roots(depth, 1.0, false);
        assert_eq!(states.len(), roots.len(), "U0 = {depth}");
        assert_eq!(count_bound_states(&model, &g).unwrap(), roots.len());
        for (s, exact) in states.iter().zip(&roots) {
            assert!((s.alpha() - exact).abs() < 1e-8, "U0 = {depth}: {} vs {exact}", s.alpha());
        }
        for (n, s) in states.iter().enumerate() {
            assert_eq!(s.node_count(), n);
        }
    }
}

#[test]
fn virtual_state_of_shallower_well() {
    let model = well(21.913);
    let g = grid(1e-3);
    let virt = find_virtual_states(&model, &g, (-1.0, -1e-4)).unwrap();
    let exact = well_alpha_roots(21.913, 1.0, true);
    let nearest = *exact.iter().find(|a| **a < 0.0).unwrap();
    assert!((virt[0] - nearest).abs() < 1e-8, "{} vs {nearest}", virt[0]);
    assert!((virt[0] + 0.159).abs() < 1e-3);
}

#[test]
fn bound_wave_function_matches_closed_form() {
    let g = grid(1e-3);
    for depth in [2.8, 22.547] {
        let model = well(depth);
        for s in find_bound_states(&model, &g, default_bound_window(&model), 10).unwrap() {
            let exact = well_bound_state(depth, 1.0, s.alpha()).unwrap();
            assert!((s.normalization_integral() - 1.0).abs() < 1e-6);
            assert!((s.asymptotic_norm() / exact.asymptotic_norm - 1.0).abs() < 1e-6);
            for (r, u) in g.radii().zip(s.samples()).step_by(37) {
                let e = exact.u(r);
                if e.abs() > 1e-3 {
                    assert!((u / e - 1.0).abs() < 1e-6, "U0 = {depth}, r = {r}: {u} vs {e}");
                }
            }
            let fit = s.asymptotic_normalization((3.0, 20.0)).unwrap();
            assert!((fit.slope / -s.alpha() - 1.0).abs() < 1e-6);
            assert!((fit.n_as / s.asymptotic_norm() - 1.0).abs() < 1e-6);
            let res = well_smatrix_residue(depth, 1.0, s.alpha());
            let expected = Complex64::new(0.0, -s.asymptotic_norm().powi(2));
            assert!((res - expected).norm() < 1e-6 * expected.norm());
        }
    }
}

#[test]
fn distinct_bound_states_are_orthogonal() {
    let g = grid(1e-3);
    let model = well(22.547);
    let s = find_bound_states(&model, &g, default_bound_window(&model), 10).unwrap();
    assert!(bound_overlap(&s[0], &s[1]).unwrap().abs() < 1e-6);
}

#[test]
fn phase_shifts_match_closed_form() {
    let g = grid(1e-3);
    let model = well(2.8);
    for k in [0.1, 0.2, 0.5, 1.0] {
        let num = scattering_state(&model, k, &g).unwrap();
        let exact = well_scattering(2.8, 1.0, k).unwrap();
        assert!((num.delta() - exact.delta).abs() < 1e-6, "k = {k}: {} vs {}", num.delta(), exact.delta);
        for (r, v) in g.radii().zip(num.samples()).step_by(101).skip(1) {
            let e = exact.v(r);
            if e.abs() > 1e-3 {
                assert!((v / e - 1.0).abs() < 1e-6, "k = {k}, r = {r}");
            }
        }
        let s = well_smatrix(2.8, 1.0, Complex64::new(k, 0.0)).unwrap();
        assert!((s - Complex64::from_polar(1.0, 2.0 * num.delta())).norm() < 1e-6);
    }
}

#[test]
fn low_energy_phase_follows_scattering_length() {
    let g = RadialGrid::covering(1e-3, 1.0, None, Some(0.005)).unwrap();
    let model = well(2.8);
    let k = 0.005;
    let s = scattering_state(&model, k, &g).unwrap();
    let exact = well_scattering(2.8, 1.0, k).unwrap();
    assert!((s.delta() - exact.delta).abs() < 1e-6);
    // a bound state near threshold gives a large positive scattering length ~ 1/alpha
    let a_scat = -s.delta() / k;
    assert!(a_scat > 1.0 / 0.159 && a_scat < 1.0 / 0.159 + 2.0, "{a_scat}");
}

#[test]
fn scattering_orthogonal_to_bound() {
    let g = grid(1e-3);
    let model = well(2.8);
    let b = &find_bound_states(&model, &g, default_bound_window(&model), 1).unwrap()[0];
    for k in [0.1, 0.2, 0.5, 1.0] {
        let s = scattering_state(&model, k, &g).unwrap();
        assert!(orthogonality_defect(b, &s).unwrap() < 1e-4, "k = {k}");
    }
}

#[test]
fn eigenvalue_converges_at_fourth_order() {
    let exact = well_alpha_roots(2.8, 1.0, false)[0];
    let errs: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&h| {
            let g = RadialGrid::covering(h, 1.0, Some(0.159), None).unwrap();
            let model = well(2.8);
            let s = find_bound_states(&model, &g, default_bound_window(&model), 1).unwrap();
            s[0].alpha() - exact
        })
        .collect();
    let ratio = errs[0] / errs[1];
    assert!(ratio > 12.0 && ratio < 20.0, "{errs:?}");
}
