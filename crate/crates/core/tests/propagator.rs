use crowent::model::{ComplexMatrix2, SystemConfig, TimeGrid};
use crowent::propagator::{
    finite_chain_oracle, io, master_equation_coefficients, resume_volterra, solve_volterra, weak_coupling_propagator,
    HistorySum, Method, PropagatorTrajectory, VolterraOptions,
};
use crowent::spectral::{lamb_shift_matrix, markovian_rates};
use crowent::PropagatorError;
use num_complex::Complex64;

fn grid_to(xi0: f64, xi0_t: f64, dt: f64) -> TimeGrid {
    TimeGrid::covering(dt, xi0_t / xi0).unwrap()
}

fn fig3() -> SystemConfig {
    SystemConfig::symmetric(1.0, 0.05, 0.08, 1, 5, 1.0)
}

fn direct() -> VolterraOptions {
    VolterraOptions { history: HistorySum::Direct, ..VolterraOptions::default() }
}

fn assert_passive(traj: &PropagatorTrajectory) {
    let s = traj.max_singular_value();
    assert!(s <= 1.0 + 1e-8, "{:?}: max singular value {s}", traj.method());
}

#[test]
fn every_method_starts_at_identity() {
    let c = fig3();
    let g = grid_to(c.xi0, 10.0, 0.5);
    for traj in [
        solve_volterra(&c, &g, &VolterraOptions::default()).unwrap(),
        weak_coupling_propagator(&c, &g, 1.0).unwrap(),
        finite_chain_oracle(&c, &g, 400).unwrap(),
    ] {
        assert!(traj.samples()[0].is_identity(1e-12), "{:?}", traj.method());
        assert_eq!(traj.len(), g.len());
        assert_passive(&traj);
    }
}

#[test]
fn decoupled_cavities_only_rotate() {
    let mut c = fig3();
    c.xi1 = 0.0;
    c.xi2 = 0.0;
    c.omega_c1 = 1.03;
    c.omega_c2 = 0.96;
    let g = grid_to(c.xi0, 20.0, 0.5);
    let exact = |t: f64| {
        ComplexMatrix2::diag(
            Complex64::from_polar(1.0, -(c.omega_c1 - 1.0) * t),
            Complex64::from_polar(1.0, -(c.omega_c2 - 1.0) * t),
        )
    };
    let v = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
    let o = finite_chain_oracle(&c, &g, 100).unwrap();
    for k in 0..g.len() {
        let t = g.time(k);
        assert!(v.samples()[k].max_abs_diff(&exact(t)) < 1e-13, "t={t}");
        assert!(o.samples()[k].max_abs_diff(&exact(t)) < 1e-12);
    }
}

#[test]
fn fft_history_matches_direct_sum() {
    for (omega_c, n2, eta) in [(1.0, 5, 0.3), (1.2, 2, 0.4), (1.03, 3, 0.2)] {
        let c = SystemConfig::symmetric(omega_c, 0.05, eta, 1, n2, 1.0);
        let g = TimeGrid::new(0.4, 3000).unwrap();
        let fast = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
        let slow = solve_volterra(&c, &g, &direct()).unwrap();
        let d = fast.max_abs_diff(&slow);
        assert!(d < 1e-12, "omega_c={omega_c}: {d}");
    }
}

#[test]
fn quadrature_backend_gives_same_trajectory() {
    let c = SystemConfig::symmetric(1.0, 0.05, 0.3, 2, 3, 1.0);
    let g = TimeGrid::new(0.5, 400).unwrap();
    let a = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
    let b = solve_volterra(&c, &g, &VolterraOptions::with_quadrature(1e-13)).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-10);
}

#[test]
fn second_order_convergence() {
    let c = SystemConfig::symmetric(1.03, 0.05, 0.5, 1, 3, 1.0);
    let t_end = 200.0;
    let at_end = |dt: f64| {
        let g = TimeGrid::covering(dt, t_end).unwrap();
        *solve_volterra(&c, &g, &VolterraOptions::default()).unwrap().samples().last().unwrap()
    };
    let (m1, m2, m3) = (at_end(1.0), at_end(0.5), at_end(0.25));
    let ratio = m1.max_abs_diff(&m2) / m2.max_abs_diff(&m3);
    assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
    // Richardson-extrapolated reference.
    let reference = m3 + (m3 - m2) * (1.0 / 3.0);
    let e2 = m2.max_abs_diff(&reference);
    let e3 = m3.max_abs_diff(&reference);
    assert!((e2 / e3 - 4.0).abs() < 0.3);
}

#[test]
fn volterra_matches_finite_chain_in_each_regime() {
    for (omega_c, n2, eta) in [(1.0, 5, 0.08), (1.2, 5, 0.2), (1.03, 5, 0.2)] {
        let c = SystemConfig::symmetric(omega_c, 0.05, eta, 1, n2, 1.0);
        let g = grid_to(c.xi0, 50.0, 0.05);
        let v = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
        let o = finite_chain_oracle(&c, &g, 400).unwrap();
        let d = v.max_abs_diff(&o);
        assert!(d < 1e-4, "omega_c={omega_c}: {d}");
        assert_passive(&v);
        assert_passive(&o);
    }
}

#[test]
fn weak_coupling_resonant_limit_is_dark_mode_projector() {
    let c = fig3();
    let g = TimeGrid::covering(1000.0, 2e6).unwrap();
    let w = weak_coupling_propagator(&c, &g, 1.0).unwrap();
    let last = w.samples().last().unwrap();
    let want = ComplexMatrix2::from_real([[0.5, -0.5], [-0.5, 0.5]]);
    assert!(last.max_abs_diff(&want) < 1e-12);
    for m in w.samples() {
        assert!(((m[(0, 0)] - m[(0, 1)]).norm() - 1.0).abs() < 1e-3);
    }
    assert_passive(&w);
}

#[test]
fn weak_coupling_out_of_band_is_beam_splitter() {
    // Choose ξ₂ so both diagonal shifts coincide; the dynamics is then a pure rotation.
    let mut c = SystemConfig::symmetric(1.2, 0.05, 0.2, 1, 2, 1.0);
    let rho: f64 = 2.0 - 3.0_f64.sqrt();
    c.xi2 = c.xi1 * ((1.0 - rho.powi(2)) / (1.0 - rho.powi(4))).sqrt();
    let shift = lamb_shift_matrix(1.2, &c).unwrap();
    assert!((shift[(0, 0)] - shift[(1, 1)]).norm() < 1e-15);
    let d12 = shift[(0, 1)].re;
    assert_eq!(markovian_rates(1.2, &c), ComplexMatrix2::zeros());
    let g = TimeGrid::covering(10.0, 4.0 / d12.abs()).unwrap();
    let w = weak_coupling_propagator(&c, &g, 1.2).unwrap();
    for (k, m) in w.samples().iter().enumerate() {
        let t = g.time(k);
        assert!((m[(0, 0)].norm() - (d12 * t).cos().abs()).abs() < 1e-12);
        assert!((m[(0, 1)].norm() - (d12 * t).sin().abs()).abs() < 1e-12);
    }
}

#[test]
fn volterra_matches_weak_coupling_at_small_eta() {
    let c = SystemConfig::symmetric(1.0, 0.05, 0.01, 1, 5, 1.0);
    let gamma11 = markovian_rates(1.0, &c)[(0, 0)].re;
    let g = TimeGrid::covering(1.0, 5.0 / gamma11).unwrap();
    let v = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
    let w = weak_coupling_propagator(&c, &g, 1.0).unwrap();
    let d = v.max_abs_diff(&w);
    assert!(d < 1e-3, "{d}");
    for m in v.samples() {
        assert!(((m[(0, 0)] - m[(0, 1)]).norm() - 1.0).abs() < 1e-2);
    }
    assert_passive(&v);
}

#[test]
fn coefficients_of_decoupled_cavities() {
    let mut c = fig3();
    c.xi1 = 0.0;
    c.xi2 = 0.0;
    c.omega_c2 = 1.02;
    let g = TimeGrid::new(0.5, 200).unwrap();
    let chain = finite_chain_oracle(&c, &g, 40).unwrap();
    let coeffs = master_equation_coefficients(&chain);
    for s in &coeffs.samples {
        let gamma = s.gamma().unwrap();
        let omega = s.omega_ren().unwrap();
        assert!(gamma.max_abs() < 1e-6);
        assert!(omega.max_abs_diff(&ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 1.02]])) < 1e-6);
        assert!(gamma.is_hermitian(1e-10) && omega.is_hermitian(1e-10));
    }
}

#[test]
fn coefficients_approach_markovian_rates() {
    let c = SystemConfig::symmetric(1.0, 0.05, 0.05, 1, 3, 1.0);
    let g = TimeGrid::new(0.5, 8000).unwrap();
    let v = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
    let coeffs = master_equation_coefficients(&v);
    let markov = markovian_rates(1.0, &c);
    // After the memory time the rates settle to J(ω_c)/2 up to O(η²).
    for k in (2000..8000).step_by(500) {
        let gamma = coeffs.samples[k].gamma().unwrap();
        assert!(gamma.max_abs_diff(&markov) < 0.02 * markov.max_abs(), "k={k}");
        assert!(gamma.is_hermitian(1e-10));
    }
}

#[test]
fn coefficients_out_of_band_are_hamiltonian() {
    let c = SystemConfig::symmetric(1.2, 0.05, 0.1, 1, 2, 1.0);
    let g = TimeGrid::new(0.25, 40000).unwrap();
    let v = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
    let coeffs = master_equation_coefficients(&v);
    let shift = lamb_shift_matrix(1.2, &c).unwrap();
    // Transients from the initial slip decay over a few hundred 1/ξ₀.
    for k in (4000..40000).step_by(3000) {
        let s = coeffs.samples[k];
        let gamma = s.gamma().unwrap();
        let omega = s.omega_ren().unwrap();
        assert!(gamma.max_abs() < 1e-2 * shift.max_abs());
        // Physical renormalisation is ω_c − δω.
        assert!((omega[(0, 1)] + shift[(0, 1)]).norm() < 0.05 * shift[(0, 1)].norm(), "{omega:?} {shift:?}");
    }
}

#[test]
fn binary_round_trip_and_resume() {
    let c = SystemConfig::symmetric(1.03, 0.05, 0.3, 1, 5, 1.0);
    let full = solve_volterra(&c, &TimeGrid::new(0.4, 1500).unwrap(), &VolterraOptions::default()).unwrap();
    let head = solve_volterra(&c, &TimeGrid::new(0.4, 700).unwrap(), &VolterraOptions::default()).unwrap();
    let mut bytes = Vec::new();
    io::write_binary(&head, &mut bytes).unwrap();
    let back = io::read_binary(bytes.as_slice()).unwrap();
    assert_eq!(back, head);
    let resumed = resume_volterra(&back, &TimeGrid::new(0.4, 1500).unwrap(), &VolterraOptions::default()).unwrap();
    assert_eq!(&resumed.samples()[..701], head.samples());
    assert!(resumed.max_abs_diff(&full) < 1e-13);

    bytes[8] = 9;
    assert!(io::read_binary(bytes.as_slice()).is_err());
    assert!(io::read_binary(&b"nonsense"[..]).is_err());
}

#[test]
fn csv_has_one_row_per_sample() {
    let c = fig3();
    let traj = weak_coupling_propagator(&c, &TimeGrid::new(1.0, 5).unwrap(), 1.0).unwrap();
    let mut out = Vec::new();
    io::write_csv(&traj, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], io::CSV_HEADER);
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[1].split(',').count(), 9);
    assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
}

#[test]
fn frame_change_is_exact() {
    let c = fig3();
    let g = TimeGrid::new(0.5, 100).unwrap();
    let v = solve_volterra(&c, &g, &VolterraOptions::default()).unwrap();
    let lab = v.in_frame(0.0);
    for k in 0..g.len() {
        assert!(lab.samples()[k].max_abs_diff(&v.lab(k)) < 1e-15);
    }
    assert_eq!(lab.method(), Method::Volterra);
}

#[test]
fn precondition_errors() {
    let c = fig3();
    match solve_volterra(&c, &TimeGrid::new(3.0, 10).unwrap(), &VolterraOptions::default()) {
        Err(PropagatorError::StepTooLarge { scale, .. }) => assert_eq!(scale, "xi0"),
        other => panic!("{other:?}"),
    }
    let far = SystemConfig::symmetric(1.5, 0.05, 0.2, 1, 5, 1.0);
    match solve_volterra(&far, &TimeGrid::new(0.5, 10).unwrap(), &VolterraOptions::default()) {
        Err(PropagatorError::StepTooLarge { scale, .. }) => assert!(scale.contains("omega_c1")),
        other => panic!("{other:?}"),
    }
    let g = grid_to(c.xi0, 50.0, 0.5);
    assert!(matches!(finite_chain_oracle(&c, &g, 19), Err(PropagatorError::ChainTooShort { .. })));
    assert!(matches!(finite_chain_oracle(&c, &g, 60), Err(PropagatorError::BeyondHorizon { .. })));
    let mut detuned = c;
    detuned.omega_c2 = 1.01;
    assert!(matches!(weak_coupling_propagator(&detuned, &g, 1.0), Err(PropagatorError::Unsupported(_))));
    let mut bad = c;
    bad.n2 = 1;
    assert!(matches!(solve_volterra(&bad, &g, &VolterraOptions::default()), Err(PropagatorError::Invalid(_))));
}
