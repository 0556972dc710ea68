use super::*;
use crate::inviscid::DirectStepper;
use crate::wave_op::WaveOperator;
use crate::spectral_kernels::CGrid;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_poly(rng: &mut ChaCha8Rng, deg: i64) -> TrigPoly {
    let terms: Vec<(i64, Complex64)> =
        (-deg..=deg).map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + (k * k) as f64))).collect();
    TrigPoly::from_terms(&terms)
}

fn sample() -> TrigPoly {
    TrigPoly::cos(1).add(&TrigPoly::sin(2).scale(cx(0.7)))
}

fn run(st: &mut ViscousModeState, dt: f64, steps: usize) -> Vec<EnergyTriple> {
    let mut s = LinNsStepper::for_state(st);
    let mut out = vec![energy_triple(st)];
    for _ in 0..steps {
        s.step(st, dt).unwrap();
        out.push(energy_triple(st));
    }
    out
}

#[test]
fn heat_flow_hook_is_exact() {
    let (alpha, nu) = (2.0, 0.03);
    let w0 = sample();
    let mut st = ViscousModeState::new(alpha, nu, 0.0, &w0, 16).unwrap();
    run(&mut st, 0.25, 8);
    for k in -3i64..=3 {
        let want = w0.get(k) * (-nu * ((k * k) as f64 + alpha * alpha) * 2.0).exp();
        assert!((st.omega.get(k) - want).norm() < 1e-14);
    }
    assert!(st.inversion_residual() < 1e-14);
}

#[test]
fn triple_of_zero_and_cfl() {
    let st = ViscousModeState::new(2.0, 1e-3, 1.0, &TrigPoly::zeros(2), 8).unwrap();
    assert_eq!(energy_triple(&st), EnergyTriple { k1: 0.0, k2: 0.0, k3: 0.0 });
    let mut st = ViscousModeState::new(2.0, 1e-3, 1.0, &sample(), 8).unwrap();
    assert!(matches!(step_lin_ns(&mut st, 2.0), Err(Error::Stability(_))));
    assert!(matches!(ViscousModeState::new(0.5, 1e-3, 1.0, &sample(), 8), Err(Error::SpectralCondition { .. })));
}

#[test]
fn quadratic_inequalities_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let w = random_poly(&mut rng, 10);
        let st = ViscousModeState::new(2.0, 1e-3, 1.0, &w, 10).unwrap();
        let e = energy_triple(&st);
        assert!(e.k1 >= 0.0 && e.k2 >= 0.0 && e.k3 >= 0.0);
        for s in e.slacks(2.0) {
            assert!(s >= -1e-12, "{s}");
        }
    }
}

#[test]
fn k1_matches_wave_operator() {
    let w = TrigPoly::sin(2).add(&TrigPoly::cos(3));
    let st = ViscousModeState::new(2.0, 1e-3, 1.0, &w, 8).unwrap();
    let k1 = energy_triple(&st).k1;
    let d = WaveOperator::new(2.0, CGrid::new(512).unwrap()).unwrap().apply(&w).norm_sq();
    assert!(((k1 - d) / k1).abs() < 1e-6, "{k1} vs {d}");
}

#[test]
fn k1_monotone_and_below_heat_envelope() {
    let (alpha, nu) = (2.0, 2e-3);
    let mut st = ViscousModeState::new(alpha, nu, 1.0, &sample(), 64).unwrap();
    let ks = run(&mut st, 0.05, 400);
    for (i, w) in ks.windows(2).enumerate() {
        assert!(w[1].k1 <= w[0].k1 * (1.0 + 1e-14));
        let t = (i + 1) as f64 * 0.05;
        assert!(w[1].k1 <= (-2.0 * nu * alpha * alpha * t).exp() * ks[0].k1 * (1.0 + 1e-12));
        for s in w[1].slacks(alpha) {
            assert!(s >= -1e-12);
        }
    }
}

#[test]
fn energy_law_second_order() {
    let (alpha, nu) = (2.0, 0.01);
    let mut base = ViscousModeState::new(alpha, nu, 1.0, &sample(), 48).unwrap();
    run(&mut base, 0.01, 100);
    let mismatch = |dt: f64| {
        let mut st = base.clone();
        let e0 = energy_triple(&st);
        step_lin_ns(&mut st, dt).unwrap();
        let e1 = energy_triple(&st);
        let lhs = (e1.k1 - e0.k1) / dt;
        let rhs = -nu * (e0.k2 + e1.k2);
        ((lhs - rhs) / rhs).abs()
    };
    let (m1, m2) = (mismatch(0.2), mismatch(0.1));
    assert!(m1 < 0.05, "{m1}");
    assert!(m1 / m2 > 3.0, "{m1} {m2}");
}

#[test]
fn vanishing_viscosity_approaches_euler() {
    let alpha = 2.0;
    let w0 = sample();
    let t = 5.0;
    let dt = 0.01;
    let euler = DirectStepper::new(alpha, t, dt).unwrap();
    let ref_w = euler.run(&w0, &[t]).unwrap().omega.remove(0);
    let dist = |nu: f64| {
        let mut st = ViscousModeState::new(alpha, nu, 1.0, &w0, euler.kmax).unwrap();
        run(&mut st, dt, 500);
        st.omega.sub(&ref_w).norm_sq().sqrt() / ref_w.norm_sq().sqrt()
    };
    let (d1, d2) = (dist(1e-5), dist(2e-5));
    assert!(d1 < 1e-2, "{d1}");
    assert!((d2 / d1 - 2.0).abs() < 0.3, "{d1} {d2}");
}

#[test]
fn toy_contract_and_gamma() {
    assert!(matches!(ToyState::new(2.0, 2.0, &sample(), 8), Err(Error::Contract(_))));
    let st = ToyState::new(1e-2, 2.0, &sample(), 8).unwrap();
    for &t in &[0.5, 3.0, 20.0] {
        assert_eq!(st.gamma(t, t), 0.0);
        let g0 = st.gamma0(t);
        assert!(g0 >= 0.0);
        assert!(g0 >= 4.0 * (-2.0 * 1e-2 * t).exp() * t.powi(3) / 12.0 * (1.0 - 1e-12));
        let g1_exact = 2.0 / 1e-2 * ((1.0 - (-1e-2 * t).exp()) / 1e-2 - t * (-1e-2 * t).exp());
        assert!((st.gamma1(t) - g1_exact).abs() < 1e-9 * g1_exact);
        // tγ₀ = ∫₀^t∫_s^t γ(τ,s)² dτ ds
        let p = Panels::new(Panels::uniform_breaks(0.0, t, t / 4.0));
        let f: Vec<f64> = p.nodes.iter().map(|&s| st.gamma_sq_integral(t, s)).collect();
        assert!((p.integrate(&f) - t * g0).abs() < 1e-9 * t * g0);
    }
}

#[test]
fn toy_inviscid_is_pure_phase() {
    let w0 = sample();
    let tr = solve_toy_model(&w0, 0.0, 2.0, 5.0, 0.01, 5).unwrap();
    let n = 256;
    let a = w0.to_samples(n);
    let b = tr.omega.last().unwrap().to_samples(n);
    for (x, y) in a.iter().zip(&b) {
        assert!((x.norm() - y.norm()).abs() < 1e-8);
    }
}

#[test]
fn toy_decay_envelope() {
    let (nu, a) = (1e-4f64, 2.0);
    let t_end = (nu * a).powf(-0.5);
    let w0 = sample();
    let tr = solve_toy_model(&w0, nu, a, t_end, 0.02, 400).unwrap();
    assert!(tr.monotonicity_violation() <= 1e-12);
    let c = tr.envelope_constant(1.0, t_end);
    assert!(c <= 10.0, "{c}");
    assert!(c <= (6.0 * std::f64::consts::E.powi(2) + 2.0).sqrt());
}

#[test]
fn toy_unwound_gradient_gronwall() {
    let (nu, a) = (1e-3, 2.0);
    let w0 = sample();
    let tr = solve_toy_model(&w0, nu, a, 20.0, 0.01, 20).unwrap();
    let st = ToyState::new(nu, a, &w0, 8).unwrap();
    let n0 = tr.norm[0].powi(2);
    let s_idx = 5;
    let s = tr.times[s_idx];
    let start = tr.omega[s_idx].deriv().norm_sq();
    for i in s_idx..tr.times.len() {
        let t = tr.times[i];
        let lhs = unwound_gradient_sq(&tr.omega[i], st.gamma(t, s));
        let rhs = start + 1.5 * nu * n0 * st.gamma_sq_integral(t, s);
        assert!(lhs <= rhs * (1.0 + 1e-6), "t = {t}: {lhs} > {rhs}");
    }
}

#[test]
fn dissipation_metrics_short_run() {
    let w0 = ModeProfile::from_trig(2.0, &sample(), 32);
    let nu = 1e-3;
    let r = enhanced_dissipation_metrics(&w0, nu, 1.0, 0.5, &DissipationOptions::default()).unwrap();
    assert!(r.c_fit > 0.0);
    assert!(r.k1_bound_excess <= 1e-12);
    assert!(r.k_slack_min >= -1e-12);
    assert!(r.spacetime.grad_sq_scaled > 0.0 && r.spacetime.grad_sq_scaled.is_finite());
    let low = ModeProfile::from_trig(1.5, &sample(), 32);
    let opts = DissipationOptions { require_alpha_two: true, ..Default::default() };
    assert!(matches!(enhanced_dissipation_metrics(&low, nu, 1.0, 0.5, &opts), Err(Error::SpectralCondition { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn triple_inequalities_hold(seed in 0u64..10_000, alpha in 1.05f64..8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_poly(&mut rng, 12);
        let st = ViscousModeState::new(alpha, 1e-3, 1.0, &w, 12).unwrap();
        for s in energy_triple(&st).slacks(alpha) {
            prop_assert!(s >= -1e-12);
        }
    }
}
