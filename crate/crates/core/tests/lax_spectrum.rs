use std::time::Instant;

use bolab_core::lax::{default_epsilon, discrete_spectrum, meromorphic_f, trace_identity};
use bolab_core::soliton::{l2_identity, SolitonFamily};
use bolab_core::{Complex64, Grid1D, SampledField};
use proptest::prelude::*;

fn soliton(center: f64, y: f64) -> impl Fn(f64) -> f64 {
    move |x| 2.0 * y / ((x - center).powi(2) + y * y)
}

#[test]
fn one_soliton_bound_state_and_trace() {
    let g = Grid1D::centered(100.0, 4096).unwrap();
    let u = SampledField::from_fn(g, soliton(0.0, 1.0));
    let start = Instant::now();
    let s = discrete_spectrum(&u, 1024, default_epsilon(&g)).unwrap();
    eprintln!("eigensolve M=1024: {:?}", start.elapsed());
    assert_eq!(s.negative_part.len(), 1, "{:?}", s.negative_part);
    assert!((s.negative_part[0] + 0.5).abs() <= 1e-3, "{}", s.negative_part[0]);
    assert!(s.unitarity_defect() < 1e-8);
    assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));

    let tr = trace_identity(&u, 1024, default_epsilon(&g)).unwrap();
    assert!(tr.gap.abs() <= 5e-3, "{tr:?}");
    let fam = SolitonFamily::from_poles(&[Complex64::i()]).unwrap();
    let l2 = l2_identity(&fam, g, 1).unwrap();
    assert!((l2.rhs - std::f64::consts::PI).abs() < 1e-12);
    assert!((tr.rhs - l2.rhs).abs() <= 5e-3);

    let coarse = discrete_spectrum(&u, 512, default_epsilon(&g)).unwrap();
    assert!((coarse.negative_part[0] - s.negative_part[0]).abs() <= 1e-3);
}

#[test]
fn separated_pair_and_radiation_bump() {
    let g = Grid1D::centered(100.0, 4096).unwrap();
    let a = soliton(-30.0, 1.0);
    let b = soliton(30.0, 2.0);
    let u = SampledField::from_fn(g, |x| a(x) + b(x));
    let s = discrete_spectrum(&u, 1024, default_epsilon(&g)).unwrap();
    assert_eq!(s.negative_part.len(), 2, "{:?}", s.negative_part);
    assert!((s.negative_part[0] + 0.5).abs() <= 0.5e-2);
    assert!((s.negative_part[1] + 0.25).abs() <= 0.25e-2);

    let bump = SampledField::from_fn(g, |x| 0.05 * (-x * x).exp());
    let tr = trace_identity(&bump, 1024, default_epsilon(&g)).unwrap();
    assert_eq!(tr.bound_states, 0);
    assert_eq!(tr.lhs, 0.0);
    assert!(tr.gap > 1e-3 && tr.gap == tr.rhs, "{tr:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn meromorphic_identity(
        poles in prop::collection::vec((-5.0f64..5.0, 0.1f64..4.0), 5),
        z in (-5.0f64..5.0, 0.05f64..3.0),
    ) {
        let p: Vec<Complex64> = poles.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let fam = SolitonFamily::from_poles(&p).unwrap();
        let (d, h) = meromorphic_f(&fam, Complex64::new(z.0, z.1), 5).unwrap();
        prop_assert!((d - h).norm() <= 1e-14 * d.norm().max(1.0));
    }

    #[test]
    fn lax_matrix_is_hermitian(
        amps in prop::collection::vec((-2.0f64..2.0, -20.0f64..20.0, 0.5f64..3.0), 1..4),
    ) {
        let g = Grid1D::centered(50.0, 1024).unwrap();
        let u = SampledField::from_fn(g, |x| amps.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum());
        let op = bolab_core::lax::lax_matrix(&u, 128).unwrap();
        prop_assert!(op.hermitian_defect() <= 1e-10);
    }
}
