mod common;

use serde_json::Value;

use spdc_core::config::ResolvedConfig;
use spdc_core::density::{compute_density_matrix, pump_amplitude, QuadratureSpec};
use spdc_core::dispersion::{central_transverse_k, Leg, TransverseK};
use spdc_core::oracle::{
    compare, density_matrix_direct, density_matrix_quadratic_direct, density_matrix_with_model, psi_i_direct,
    z_integral, PhaseModel, TransverseNodes, MAX_EXACT_GRID, MAX_QUADRATIC_GRID,
};
use spdc_core::units::omega_from_wavelength_nm;
use spdc_core::Error;

fn with(overrides: &[(&str, Value)]) -> ResolvedConfig {
    let mut c = common::load("fig2a.json");
    for (path, v) in overrides {
        c = c.with_override(path, v.clone()).unwrap();
    }
    c.resolve().unwrap()
}

fn idler_center(r: &ResolvedConfig, omega_i: f64) -> TransverseK {
    central_transverse_k(r.source.crystal.material, omega_i, &r.source.geometry, Leg::Idler).unwrap()
}

#[test]
fn z_integral_closed_form() {
    assert_eq!(z_integral(0.0, 1000.0), 1000.0);
    // first zero of the sinc
    assert!(z_integral(2.0 * std::f64::consts::PI / 1000.0, 1000.0).abs() < 1e-10);
    assert_eq!(z_integral(0.01, 1000.0), z_integral(-0.01, 1000.0));
}

#[test]
fn matched_phase_reduces_to_the_gaussian_overlap() {
    let r = common::resolve("fig2a.json");
    let (ws, wi) = (omega_from_wavelength_nm(790.0), omega_from_wavelength_nm(812.0));
    let ki0 = idler_center(&r, wi);
    let wp2 = r.source.beams.pump_waist_um.powi(2);
    let wf2 = r.source.beams.fiber_waist_um.powi(2);
    let p = 0.5 * (wp2 + wf2);
    let wc = wp2 * wf2 / (2.0 * (wp2 + wf2));
    for k_s in [TransverseK::new(0.0, 0.0), TransverseK::new(-ki0.kx + 0.004, 0.003), TransverseK::new(0.02, -0.01)] {
        let got = psi_i_direct(k_s, ws, wi, &r.source, PhaseModel::Matched, 8).unwrap();
        let d = k_s + ki0;
        let want = pump_amplitude(&r.source.pump, ws + wi).unwrap()
            * (r.source.crystal.length_um * r.source.beams.pump_waist_um * r.source.beams.fiber_waist_um / p
                * (-wc * d.norm_sqr()).exp());
        assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-300), "{got} vs {want}");
    }
}

#[test]
fn detuned_collection_angle_suppresses_the_amplitude() {
    let tuned = common::resolve("fig2a.json");
    let detuned = with(&[("collection.alpha_deg", Value::from(12.0))]);
    let w0 = omega_from_wavelength_nm(800.0);
    let amp = |r: &ResolvedConfig| {
        let k_s = idler_center(r, w0).scale(-1.0);
        psi_i_direct(k_s, w0, w0, &r.source, PhaseModel::Exact, 32).unwrap().norm_sqr()
    };
    // the sinc tail only falls off algebraically, so compare probabilities
    let (a, b) = (amp(&tuned), amp(&detuned));
    assert!(a > 1e3 * b, "tuned {a:e}, detuned {b:e}");
}

#[test]
fn amplitude_is_even_in_the_out_of_plane_component() {
    let r = common::resolve("fig2b.json");
    let (ws, wi) = (omega_from_wavelength_nm(805.0), omega_from_wavelength_nm(795.0));
    let c = idler_center(&r, wi).scale(-1.0);
    for model in [PhaseModel::Exact, PhaseModel::Quadratic] {
        let up = psi_i_direct(c + TransverseK::new(0.003, 0.007), ws, wi, &r.source, model, 16).unwrap();
        let down = psi_i_direct(c + TransverseK::new(0.003, -0.007), ws, wi, &r.source, model, 16).unwrap();
        assert!((up - down).norm() <= 1e-10 * up.norm(), "{model:?}");
    }
}

#[test]
fn compare_ignores_scale_and_rejects_mismatched_grids() {
    let r = common::resolve("fig2a.json");
    let quad = QuadratureSpec::new(8, 8, 8).unwrap();
    let g = common::grid(790.0, 810.0, 3);
    let x = compute_density_matrix(&r.source, &g, &quad).unwrap();
    assert_eq!(compare(&x, &x).unwrap().rel_frobenius_error, 0.0);
    assert!(compare(&x.scaled(2.0), &x).unwrap().rel_frobenius_error < 1e-15);
    let y = compute_density_matrix(&r.source, &common::grid(790.0, 812.0, 3), &quad).unwrap();
    assert!(matches!(compare(&x, &y), Err(Error::GridMismatch(_))));
}

#[test]
fn oracle_grid_and_node_limits() {
    let r = common::resolve("fig2a.json");
    let quad = QuadratureSpec::new(8, 8, 8).unwrap();
    let big = common::grid(790.0, 810.0, MAX_EXACT_GRID + 1);
    let err = density_matrix_direct(&r.source, &big, TransverseNodes::uniform(4), &quad).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
    let big = common::grid(790.0, 810.0, MAX_QUADRATIC_GRID + 1);
    let err = density_matrix_quadratic_direct(&r.source, &big, TransverseNodes::uniform(4), &quad).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
    let g = common::grid(790.0, 810.0, 2);
    let err = density_matrix_direct(&r.source, &g, TransverseNodes::uniform(3), &quad).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
}

#[test]
fn quadratic_oracle_converges_to_the_pipeline() {
    // small waists and a long crystal make the transverse integrand hard
    // enough that the node count matters
    let r = with(&[
        ("pump.waist_um", Value::from(30.0)),
        ("collection.waist_um", Value::from(30.0)),
        ("crystal.length_mm", Value::from(3.0)),
    ]);
    let quad = QuadratureSpec::new(64, 64, 8).unwrap();
    let g = common::grid(790.0, 810.0, 3);
    let pipeline = compute_density_matrix(&r.source, &g, &quad).unwrap();
    let errs: Vec<f64> = [12, 24, 48]
        .iter()
        .map(|&n| {
            let o = density_matrix_quadratic_direct(&r.source, &g, TransverseNodes::uniform(n), &quad).unwrap();
            compare(&pipeline, &o).unwrap().rel_frobenius_error
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-5, "{errs:?}");
}

#[test]
fn halving_oracle_nodes_moves_more_than_the_pipeline_disagrees() {
    let r = common::resolve("fig2a.json");
    let quad = QuadratureSpec::default();
    let g = common::grid(780.0, 820.0, 3);
    let pipeline = compute_density_matrix(&r.source, &g, &quad).unwrap();
    let fine = density_matrix_quadratic_direct(&r.source, &g, TransverseNodes::uniform(16), &quad).unwrap();
    let coarse = density_matrix_quadratic_direct(&r.source, &g, TransverseNodes::uniform(4), &quad).unwrap();
    let agreement = compare(&pipeline, &fine).unwrap().rel_frobenius_error;
    let self_change = compare(&coarse, &fine).unwrap().rel_frobenius_error;
    assert!(self_change > 10.0 * agreement, "agreement {agreement:e}, node sensitivity {self_change:e}");
}

#[test]
fn paraxial_error_shrinks_with_the_waist() {
    let quad = QuadratureSpec::new(16, 16, 16).unwrap();
    let g = common::grid(780.0, 820.0, 3);
    let errs: Vec<f64> = [25.0, 50.0, 200.0]
        .iter()
        .map(|&w| {
            let r = with(&[("pump.waist_um", Value::from(w)), ("collection.waist_um", Value::from(w))]);
            let p = compute_density_matrix(&r.source, &g, &quad).unwrap();
            let o = density_matrix_direct(&r.source, &g, TransverseNodes::uniform(16), &quad).unwrap();
            compare(&p, &o).unwrap().rel_frobenius_error
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-3, "{errs:?}");
}

#[test]
fn exact_and_quadratic_models_agree_at_degeneracy() {
    // on a single degenerate point only the transverse expansion differs
    let r = common::resolve("fig2a.json");
    let quad = QuadratureSpec::new(16, 16, 16).unwrap();
    let g = common::grid(799.0, 801.0, 1);
    let a = density_matrix_with_model(&r.source, &g, PhaseModel::Exact, TransverseNodes::uniform(12), &quad).unwrap();
    let b = density_matrix_with_model(&r.source, &g, PhaseModel::Quadratic, TransverseNodes::uniform(12), &quad).unwrap();
    let (x, y) = (a.values[(0, 0)], b.values[(0, 0)]);
    assert!((x - y).norm() < 1e-3 * y.norm());
}
