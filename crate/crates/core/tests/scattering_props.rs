use bolab_core::field::{norm, szego_project};
use bolab_core::lab::{fit_decay, ErrorCurve};
use bolab_core::scattering::{
    born_jost, box_frequencies, distorted_coefficient, distorted_spectrum, jost_solve, radiation_profile, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
use bolab_core::{Complex64, Grid1D, NormKind, SampledField};
use proptest::prelude::*;

fn gaussian(grid: Grid1D, a: f64) -> SampledField {
    SampledField::from_fn(grid, |x| a * (-x * x).exp())
}

fn flat_coefficient(u: &SampledField, lambda: f64) -> Complex64 {
    let h = szego_project(u).to_complex_field();
    let dx = u.grid().dx();
    h.values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, -lambda * u.grid().x(k)))
        .sum::<Complex64>()
        * dx
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn returned_solutions_meet_tolerance(a in 0.005f64..0.1, k in 2usize..200) {
        let g = Grid1D::centered(40.0, 1024).unwrap();
        let u = gaussian(g, a);
        let lambda = g.frequency(k);
        let j = jost_solve(&u, lambda, 1e-9, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(j.residual <= 1e-9);
        prop_assert!(j.boundary_defect() <= 1e-9);
    }
}

#[test]
fn small_gaussian_residual() {
    let g = Grid1D::centered(40.0, 1024).unwrap();
    let j = jost_solve(&gaussian(g, 0.05), 1.0, 1e-8, DEFAULT_MAX_ITER).unwrap();
    assert!(j.residual <= 1e-8);
}

#[test]
fn born_gap_is_quadratic() {
    let g = Grid1D::centered(40.0, 1024).unwrap();
    let amps = vec![0.025, 0.05, 0.1];
    let gaps: Vec<f64> = amps
        .iter()
        .map(|&a| {
            let u = gaussian(g, a);
            let full = jost_solve(&u, 1.0, 1e-12, DEFAULT_MAX_ITER).unwrap();
            let born = born_jost(&u, 1.0).unwrap();
            full.m.iter().zip(&born.m).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
        })
        .collect();
    assert!(gaps[1] <= 10.0 * 0.05f64.powi(2));
    let fit = fit_decay(&ErrorCurve::new(amps, gaps, NormKind::Linf).unwrap()).unwrap();
    assert!((fit.slope - 2.0).abs() <= 0.3, "{}", fit.slope);
}

#[test]
fn coefficient_is_flat_transform_at_first_order() {
    let g = Grid1D::centered(40.0, 1024).unwrap();
    for a in [0.01, 0.05] {
        let u = gaussian(g, a);
        for lambda in [0.5, 1.0, 2.0] {
            let zeta = distorted_coefficient(&u, lambda).unwrap();
            let flat = flat_coefficient(&u, lambda);
            assert!((zeta - flat).norm() <= 2.0 * a * flat.norm(), "a={a} lambda={lambda}: {zeta} vs {flat}");
        }
    }
}

#[test]
fn sweep_has_finite_mass() {
    let g = Grid1D::centered(40.0, 1024).unwrap();
    let u = gaussian(g, 0.05);
    let s = distorted_spectrum(&u, &box_frequencies(&g, 511), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!(s.mass().is_finite() && s.mass() > 0.0);
    assert!(s.residuals.iter().all(|r| *r <= DEFAULT_TOL));
}

#[test]
fn radiation_norm_matches_flat_norm() {
    let g = Grid1D::centered(40.0, 1024).unwrap();
    let u = gaussian(g, 0.05);
    let (profile, _) = radiation_profile(&u, None).unwrap();
    let flat = norm(&u, NormKind::L2).unwrap();
    let distorted = norm(&profile, NormKind::L2).unwrap();
    assert!((distorted - flat).abs() <= 0.2 * flat, "{distorted} vs {flat}");
    let (h0, h1) = (szego_project(&u).norm_sq(), szego_project(&profile).norm_sq());
    assert!((h1 - h0).abs() <= 0.2 * h0);
}

#[test]
fn pure_soliton_is_transparent() {
    let g = Grid1D::centered(50.0, 1024).unwrap();
    let u = SampledField::from_fn(g, |x| 2.0 / (x * x + 1.0));
    let (profile, spectrum) = radiation_profile(&u, None).unwrap();
    let mass = szego_project(&u).norm_sq();
    assert!(spectrum.mass() <= 0.01 * mass, "{} vs {mass}", spectrum.mass());
    assert!(szego_project(&profile).norm_sq().sqrt() <= 0.05 * mass.sqrt());
}

#[test]
fn zero_field_gives_zero_profile() {
    let g = Grid1D::centered(20.0, 256).unwrap();
    let (p, s) = radiation_profile(&SampledField::zeros(g), None).unwrap();
    assert_eq!(p.max_abs(), 0.0);
    assert_eq!(s.mass(), 0.0);
}
