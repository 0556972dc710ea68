use super::*;
use crate::torus_field::inverse_laplacian_mode;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn sin2y(alpha: f64, ny: usize) -> ModeProfile {
    ModeProfile::from_fn(alpha, ny, |y| cx((2.0 * y).sin()))
}

fn smooth(alpha: f64) -> ModeProfile {
    ModeProfile::from_fn(alpha, 64, |y| cx((2.0 * y).sin() + 0.5 * (2.0 * y).cos() - 0.25 * y.cos()))
}

#[test]
fn representation_reproduces_initial_data() {
    let w = sin2y(2.0, 64);
    let sol = solve_inviscid(&w, &[0.0]).unwrap();
    let psi = inverse_laplacian_mode(&ModeProfile::from_trig(2.0, &w.to_trig(), sol.psi[0].ny())).unwrap();
    assert!(sol.psi[0].rel_dist(&psi) < 1e-3, "{}", sol.psi[0].rel_dist(&psi));
    assert!(sol.omega[0].rel_dist(&ModeProfile::from_trig(2.0, &w.to_trig(), sol.psi[0].ny())) < 1e-3);
}

#[test]
fn zero_data_stays_zero() {
    let z = ModeProfile::zeros(2.0, 32);
    let sol = solve_inviscid(&z, &[0.0, 3.0]).unwrap();
    assert!(sol.psi.iter().all(|p| p.norm() == 0.0));
}

#[test]
fn representation_matches_direct_stepper() {
    let w = smooth(2.0);
    let times = [1.0, 5.0];
    let sol = solve_inviscid(&w, &times).unwrap();
    let run = direct_stepper_lin_euler(&w, &times, 0.01).unwrap();
    for i in 0..times.len() {
        let ny = sol.psi[i].ny();
        let d = sol.psi[i].rel_dist(&run.psi_profile(i, ny));
        assert!(d < 1e-3, "t = {}: {d}", times[i]);
    }
}

#[test]
fn stepper_rejects_large_step() {
    assert!(matches!(DirectStepper::new(2.0, 1.0, 0.3), Err(Error::Stability(_))));
}

#[test]
fn transport_hook_is_pure_phase() {
    let w = smooth(3.0);
    let mut st = DirectStepper::new(3.0, 4.0, 0.01).unwrap();
    st.transport_only = true;
    let times = [1.0, 2.0, 4.0];
    let run = st.run(&w.to_trig(), &times).unwrap();
    let ny = 64;
    let w0 = ModeProfile::from_trig(3.0, &w.to_trig(), ny);
    let profiles: Vec<ModeProfile> = (0..3).map(|i| run.omega_profile(i, ny)).collect();
    for p in &profiles {
        for (a, b) in p.values.iter().zip(&w0.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-7);
        }
    }
    let sc = scattering_from(&times, &profiles).unwrap();
    assert!(sc.profile.rel_dist(&w0) < 1e-6);
    assert!(sc.residual() < 1e-6);
}

#[test]
fn stepper_is_fourth_order() {
    let w = smooth(2.0);
    let t = [5.0];
    let run = |dt| DirectStepper::new(2.0, 5.0, dt).unwrap().run(&w.to_trig(), &t).unwrap().omega[0].clone();
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let d1 = a.sub(&b).norm_sq().sqrt();
    let d2 = b.sub(&c).norm_sq().sqrt();
    assert!(d2 <= d1 / 15.0, "{d1} {d2}");
}

#[test]
fn conjugate_modes_give_real_field() {
    let w = smooth(2.0);
    let wc = ModeProfile::new(-2.0, w.values.iter().map(|v| v.conj() * Complex64::new(1.0, 0.0)).collect());
    let wp = ModeProfile::new(2.0, w.values.iter().map(|v| v * Complex64::new(0.6, 0.8)).collect());
    let wm = ModeProfile::new(-2.0, wc.values.iter().map(|v| v * Complex64::new(0.6, -0.8)).collect());
    let a = solve_inviscid(&wp, &[3.0]).unwrap();
    let b = solve_inviscid(&wm, &[3.0]).unwrap();
    for (x, y) in a.psi[0].values.iter().zip(&b.psi[0].values) {
        let re = (x + y).re.abs();
        let im = (x + y).im.abs();
        assert!(im <= 1e-10 * re.max(1e-3 * a.psi[0].norm()), "{x} {y}");
    }
}

#[test]
fn decay_fit_rejects_bad_windows() {
    let w = sin2y(2.0, 32);
    let sol = solve_inviscid(&w, &[4.0, 6.0, 8.0]).unwrap();
    assert!(matches!(measure_decay(&sol, DecayQuantity::V, (4.0, 8.0)), Err(Error::Fit(_))));
    assert!(matches!(measure_decay(&sol, DecayQuantity::V, (1.0, 10.0)), Err(Error::Fit(_))));
}

#[test]
fn scattering_residuals_decrease() {
    let w = smooth(2.0);
    let times = [10.0, 20.0, 40.0, 80.0];
    let run = direct_stepper_lin_euler(&w, &times, 0.02).unwrap();
    let ny = 512;
    let profiles: Vec<ModeProfile> = (0..times.len()).map(|i| run.omega_profile(i, ny)).collect();
    let sc = scattering_from(&times, &profiles).unwrap();
    for r in sc.residuals.windows(2) {
        assert!(r[1] < r[0], "{:?}", sc.residuals);
    }
    let alt = scattering_from(&times[..3], &profiles[..3]).unwrap();
    assert!(alt.profile.sub(&sc.profile).norm() <= 2.0 * alt.residual());
}
