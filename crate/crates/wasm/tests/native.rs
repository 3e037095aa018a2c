use theta_gabor_wasm::{density, frame_check, restriction_spectrum};

#[test]
fn density_integrates_to_n() {
    let d = density(4, 0.0, 1.0, 2).unwrap();
    assert_eq!(d.rho.len(), d.m_x * d.m_xi);
    assert!((d.integral - 4.0).abs() < 1e-9);
    assert!(d.min > 0.0 && d.max >= d.min);
}

#[test]
fn constant_symbol_gives_unit_spectrum() {
    let s = restriction_spectrum(4, 0.0, 1.0, "1").unwrap();
    assert_eq!(s.eigenvalues.len(), 4);
    assert!(s.eigenvalues.iter().all(|e| (e - 1.0).abs() < 1e-8));
    assert!((s.trace_norm - 1.0).abs() < 1e-8);
}

#[test]
fn indicator_spectrum_lies_in_unit_interval() {
    let s = restriction_spectrum(8, 0.0, 1.0, "step(0.5 - x1)").unwrap();
    assert!(s.eigenvalues.iter().all(|&e| (-1e-9..=1.0 + 1e-9).contains(&e)));
}

#[test]
fn frame_check_matches_parity() {
    let r = frame_check(4, 0.0, 1.0, &[0, 0, 1, 1, 2, 3, 1, 0]).unwrap();
    assert!(!r.is_frame);
    assert_eq!(r.parity_no_frame, Some(true));
    let r = frame_check(4, 0.0, 1.0, &[0, 0, 1, 1, 2, 2, 3, 3, 0, 1]).unwrap();
    assert!(r.is_frame && r.a > 0.0);
}

#[test]
fn bad_input_is_an_error_string() {
    assert!(restriction_spectrum(4, 0.0, 1.0, "x1 +").unwrap_err().contains("byte"));
    assert!(density(0, 0.0, 1.0, 2).is_err());
    assert!(frame_check(4, 0.0, -1.0, &[0, 0]).is_err());
}
