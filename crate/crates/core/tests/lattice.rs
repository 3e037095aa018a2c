mod common;

use common::any_params;
use proptest::prelude::*;
use theta_gabor::lattice::{lattice_vector, reduce_to_box};
use theta_gabor::{dual_lattice_member, from_complex, to_complex, TFPoint, C64, DEFAULT_LATTICE_TOL};

proptest! {
    #[test]
    fn complex_round_trip_on_the_box(p in any_params(1usize..6), ux in prop::collection::vec(0.0f64..1.0, 2), xi in prop::collection::vec(0.0f64..1.0, 2)) {
        let d = p.d();
        let nf = p.n() as f64;
        let pt = TFPoint::new(ux[..d].iter().map(|u| u * nf).collect(), xi[..d].to_vec());
        let back = from_complex(&to_complex(&pt, &p), &p).unwrap();
        for i in 0..d {
            prop_assert!((back.x[i] - pt.x[i]).abs() <= 1e-12 * nf);
            prop_assert!((back.xi[i] - pt.xi[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn torus_periods_are_lattice_vectors(p in any_params(1usize..6), a in prop::collection::vec(-3i64..=3, 2), b in prop::collection::vec(-3i64..=3, 2)) {
        let d = p.d();
        let nf = p.n() as f64;
        let pt = TFPoint::new(a[..d].iter().map(|&v| v as f64 * nf).collect(), b[..d].iter().map(|&v| v as f64).collect());
        let m = dual_lattice_member(&to_complex(&pt, &p).z, &p, 1.0, DEFAULT_LATTICE_TOL);
        prop_assert!(m.member, "residual {}", m.residual);
    }

    #[test]
    fn membership_is_lattice_invariant(
        p in any_params(1usize..6),
        re in prop::collection::vec(-2.0f64..2.0, 2),
        im in prop::collection::vec(-2.0f64..2.0, 2),
        a in prop::collection::vec(-3i64..=3, 2),
        b in prop::collection::vec(-3i64..=3, 2),
    ) {
        let d = p.d();
        let z: Vec<C64> = (0..d).map(|i| C64::new(re[i], im[i])).collect();
        let lv = lattice_vector(&a[..d], &b[..d], &p);
        let shifted: Vec<C64> = z.iter().zip(&lv).map(|(u, v)| u + v).collect();
        let m0 = dual_lattice_member(&z, &p, 1.0, DEFAULT_LATTICE_TOL);
        let m1 = dual_lattice_member(&shifted, &p, 1.0, DEFAULT_LATTICE_TOL);
        prop_assert_eq!(m0.member, m1.member);
        prop_assert!((m0.residual - m1.residual).abs() < 1e-9);
        let r0 = reduce_to_box(&z, &p);
        let r1 = reduce_to_box(&shifted, &p);
        let diff: Vec<C64> = r0.iter().zip(&r1).map(|(u, v)| u - v).collect();
        prop_assert!(dual_lattice_member(&diff, &p, 1.0, 1e-9).member);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    use theta_gabor::lattice::ParamsFile;
    use theta_gabor::{Error, GaborParams};
    assert!(matches!(GaborParams::one_dim(3, 0.0, -1.0), Err(Error::NotPositiveDefinite { .. })));
    let asym = ParamsFile {
        d: 2,
        n: 2,
        omega_re: vec![vec![0.0, 0.5], vec![0.0, 0.0]],
        omega_im: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    assert!(matches!(GaborParams::from_file(&asym), Err(Error::NonSymmetric { .. })));
    assert!(GaborParams::one_dim(0, 0.0, 1.0).is_err());
}
