use super::*;
use crate::oracle::{gl_integrate, shoot};
use crate::torus_field::inverse_laplacian_mode;
use proptest::prelude::*;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn ld(alpha: f64, c: f64) -> LayerData {
    LayerData::new(alpha, limit_layer(c).unwrap()).unwrap()
}

fn trig(terms: &[(i64, f64)]) -> TrigPoly {
    TrigPoly::from_terms(&terms.iter().map(|&(k, v)| (k, cx(v))).collect::<Vec<_>>())
}

/// `sin(ky)` as a trigonometric polynomial.
fn sin_k(k: i64) -> TrigPoly {
    TrigPoly::sin(k)
}

/// `∫_0^π p(y) q(y) dy` for trigonometric polynomials, by Gauss–Legendre.
fn pair(p: &TrigPoly, q: &TrigPoly) -> Complex64 {
    let re = gl_integrate(&|y| (p.eval(y) * q.eval(y)).re, 0.0, PI, 64);
    let im = gl_integrate(&|y| (p.eval(y) * q.eval(y)).im, 0.0, PI, 64);
    Complex64::new(re, im)
}

fn inv_lap(alpha: f64, p: &TrigPoly) -> TrigPoly {
    p.map_coef(|k, v| v / ((k * k) as f64 + alpha * alpha))
}

fn helmholtz(alpha: f64, p: &TrigPoly) -> TrigPoly {
    p.map_coef(|k, v| -v * ((k * k) as f64 + alpha * alpha))
}

fn ii_oracle(alpha: f64, c: f64) -> f64 {
    let f = |y: f64, p: f64, _: f64, _: &[f64]| {
        let yc = (-c).acos();
        let w = 2.0 * (0.5 * (y + yc)).sin() * (0.5 * (y - yc)).sin();
        vec![(1.0 / (p * p) - 1.0) / (w * w)]
    };
    let (_, _, up) = shoot(alpha, c, PI, 1, &f);
    let (_, _, dn) = shoot(alpha, c, 0.0, 1, &f);
    up[0] - dn[0]
}

#[test]
fn ii_matches_shooting_oracle() {
    for &(alpha, c) in &[(2.0, 0.0), (3.0, 0.45), (2.5, -0.8)] {
        let ks = compute_kernel_set(alpha, c).unwrap();
        let o = ii_oracle(alpha, c);
        assert!(((ks.ii - o) / o).abs() < 1e-6, "alpha {alpha} c {c}: {} vs {o}", ks.ii);
    }
}

#[test]
fn kernel_set_invariants() {
    for &alpha in &[1.5, 2.0, 4.0] {
        for k in 1..20 {
            let c = -1.0 + 0.1 * k as f64;
            let ks = compute_kernel_set(alpha, c).unwrap();
            assert!(ks.ii < 0.0);
            assert!((ks.b - PI * ks.layer.yc.cos()).abs() < 1e-14);
            assert!(ks.j1 >= 0.0 && ks.j0 <= 0.0, "J signs at c = {c}");
            assert!(ks.a1b1_sq() > 0.0);
        }
    }
    let ks = compute_kernel_set(2.0, 0.0).unwrap();
    assert!(ks.b.abs() < 1e-15);
    assert!(matches!(compute_kernel_set(1.0, 0.0), Err(Error::SpectralCondition { .. })));
    assert!(matches!(compute_kernel_set(2.0, 1.5), Err(Error::OutOfRange(_))));
}

#[test]
fn kernel_set_endpoint_limits() {
    let ks = compute_kernel_set(2.0, -1.0).unwrap();
    assert!((ks.b - PI).abs() < 1e-5);
    let near = compute_kernel_set(2.0, -0.99).unwrap();
    assert!(ks.a.abs() < 0.02 * near.a.abs(), "A = {} vs {}", ks.a, near.a);
    assert!(ks.j0.abs() < 1e-9, "J0 = {}", ks.j0);
    assert!(ks.j1 > 0.1, "J1 = {}", ks.j1);
    let kr = compute_kernel_set(2.0, 1.0).unwrap();
    assert!((kr.b + PI).abs() < 1e-5);
    assert!(kr.j1.abs() < 1e-9 && kr.j0 < -0.1);
}

#[test]
fn kernel_set_symmetry_in_c() {
    for &c in &[0.2, 0.55, 0.9] {
        let p = compute_kernel_set(2.5, c).unwrap();
        let m = compute_kernel_set(2.5, -c).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs());
        assert!(close(p.ii, m.ii));
        assert!(close(p.a, m.a));
        assert!(close(p.b, -m.b));
        assert!(close(p.j1, -m.j0) && close(p.j0, -m.j1));
        assert!(close(p.a1, m.a1));
        assert!(close(p.b1, -m.b1));
    }
}

#[test]
fn envelope_bands() {
    let mut mins = Vec::new();
    for &alpha in &[2.0, 3.0, 4.0, 6.0] {
        let (mut lo1, mut hi1, mut lo2, mut hi2) = (f64::MAX, 0.0f64, f64::MAX, 0.0f64);
        for k in 0..=40 {
            let yc = PI * k as f64 / 40.0;
            let ks = compute_kernel_set(alpha, -yc.cos()).unwrap();
            let e = 1.0 + alpha * ks.layer.s;
            let r1 = ks.ab_sq() / (e * e);
            let r2 = alpha.powi(4) * ks.a1b1_sq() / e.powi(6);
            lo1 = lo1.min(r1);
            hi1 = hi1.max(r1);
            lo2 = lo2.min(r2);
            hi2 = hi2.max(r2);
        }
        assert!(hi1 / lo1 < 100.0, "alpha {alpha}: A²+B² band {lo1}..{hi1}");
        // only the lower bound is uniform; the upper end is set by J₁ at the endpoints
        assert!(hi2 / lo2 < 1000.0, "alpha {alpha}: A₁²+B₁² band {lo2}..{hi2}");
        mins.push(lo2);
    }
    let (lo, hi) = mins.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 3.0, "lower envelope not uniform in alpha: {mins:?}");
}

#[test]
fn wronskian_limit_identities() {
    for &c in &[-0.6, 0.0, 0.35] {
        let w = wronskian_limits(2.0, c).unwrap();
        let ks = compute_kernel_set(2.0, c).unwrap();
        let ld = ld(2.0, c);
        let pp = ld.ends[0] * ld.ends[2];
        assert!((w.wo_plus - w.wo_minus.conj()).norm() < 1e-12 * w.wo_plus.norm());
        assert!((w.we_plus - w.we_minus.conj()).norm() < 1e-12 * w.we_plus.norm());
        assert!((w.wo_plus.im - pp * ks.b).abs() < 1e-12 * (1.0 + pp * ks.b.abs()));
        assert!((w.wo_plus.norm() - pp.abs() * ks.ab_sq().sqrt()).abs() < 1e-10 * w.wo_plus.norm());
        assert!(w.wo_plus.norm() > 0.0 && w.we_plus.norm() > 0.0);
    }
}

#[test]
fn hilbert_transform_examples() {
    let n = 64;
    let ys = crate::fourier::periodic_grid(n);
    let one = vec![cx(1.0); n];
    assert!(hilbert_transform(&one).iter().all(|v| v.norm() < 1e-10));
    let hc = hilbert_transform(&ys.iter().map(|y| cx(y.cos())).collect::<Vec<_>>());
    let hs = hilbert_transform(&ys.iter().map(|y| cx(y.sin())).collect::<Vec<_>>());
    for i in 0..n {
        assert!((hc[i] - cx(2.0 * PI * ys[i].sin())).norm() < 1e-10);
        assert!((hs[i] - cx(-2.0 * PI * ys[i].cos())).norm() < 1e-10);
    }
}

/// Symmetric-excision principal value of `∫_0^π (Int(y) − Int(y_c))/(u(y) − c)² dy`.
fn ii11_oracle(int: &dyn Fn(f64) -> f64, c: f64) -> f64 {
    let yc = (-c).acos();
    let g = |y: f64| (int(y) - int(yc)) / (yc.cos() - y.cos()).powi(2);
    let m = yc.min(PI - yc);
    let sym = gl_integrate(&|t| g(yc + t) + g(yc - t), 0.0, m, 200);
    let rest = if yc < PI - yc { gl_integrate(&g, 2.0 * yc, PI, 200) } else { gl_integrate(&g, 0.0, 2.0 * yc - PI, 200) };
    sym + rest
}

#[test]
fn ii11_of_u_second_derivative() {
    let cosy = ModeProfile::from_fn(2.0, 64, |y| cx(y.cos()));
    for &c in &[0.0, 0.4, -0.7] {
        let v = compute_ii11(&cosy, c).unwrap();
        let exact = -2.0 / (1.0 - c * c);
        assert!(rel(v, cx(exact)) < 1e-6, "c = {c}: {v} vs {exact}");
    }
    let zero = ModeProfile::zeros(2.0, 64);
    assert_eq!(compute_ii11(&zero, 0.3).unwrap().norm(), 0.0);
}

#[test]
fn ii11_matches_excision_oracle() {
    let sin = ModeProfile::from_fn(2.0, 64, |y| cx(y.sin()));
    let v = compute_ii11(&sin, 0.4).unwrap();
    let o = ii11_oracle(&|y| 1.0 - y.cos(), 0.4);
    assert!((v.re - o).abs() < 1e-5 * o.abs().max(1.0), "{v} vs {o}");
    let mixed = ModeProfile::from_fn(2.0, 64, |y| cx((2.0 * y).cos() + (3.0 * y).sin() + 0.5));
    let int = |y: f64| (2.0 * y).sin() / 2.0 + (1.0 - (3.0 * y).cos()) / 3.0 + 0.5 * y;
    for &c in &[-0.3, 0.15, 0.85] {
        let v = compute_ii11(&mixed, c).unwrap();
        let o = ii11_oracle(&int, c);
        assert!((v.re - o).abs() < 1e-5 * o.abs().max(1.0), "c = {c}: {v} vs {o}");
        assert!(v.im.abs() < 1e-12);
    }
}

fn l0_oracle(alpha: f64, c: f64, phi: &dyn Fn(f64) -> f64) -> f64 {
    let yc = (-c).acos();
    let f = |y: f64, p: f64, _: f64, st: &[f64]| {
        let w = 2.0 * (0.5 * (y + yc)).sin() * (0.5 * (y - yc)).sin();
        let q = (st[0] / (p * p) - st[1]) / (w * w);
        vec![phi(y) * p, phi(y), q]
    };
    let (_, _, up) = shoot(alpha, c, PI, 3, &f);
    let (_, _, dn) = shoot(alpha, c, 0.0, 3, &f);
    up[2] - dn[2]
}

#[test]
fn l0_matches_nested_oracle() {
    let cases: [(f64, f64, fn(f64) -> f64, TrigPoly); 3] = [
        (2.0, 0.0, |y| y.cos(), trig(&[(1, 0.5), (-1, 0.5)])),
        (3.0, 0.5, |y| (2.0 * y).sin(), sin_k(2)),
        (2.0, -0.75, |y| 1.0 + y.cos(), trig(&[(0, 1.0), (1, 0.5), (-1, 0.5)])),
    ];
    for (alpha, c, f, p) in cases {
        let v = compute_lk(&p, &ld(alpha, c), 0).unwrap();
        let o = l0_oracle(alpha, c, &f);
        assert!(rel(v, cx(o)) < 1e-5, "alpha {alpha} c {c}: {v} vs {o}");
    }
    assert_eq!(compute_lk(&TrigPoly::zeros(2), &ld(2.0, 0.1), 0).unwrap().norm(), 0.0);
}

#[test]
fn lk_higher_orders_finite_and_linear() {
    let d = ld(2.0, 0.3);
    let p = sin_k(2);
    let q = trig(&[(0, 1.0), (3, 0.25), (-3, 0.25)]);
    for k in 1..=2 {
        let a = compute_lk(&p, &d, k).unwrap();
        let b = compute_lk(&q, &d, k).unwrap();
        let ab = compute_lk(&p.add(&q.scale(cx(2.0))), &d, k).unwrap();
        assert!(a.norm().is_finite() && b.norm().is_finite());
        assert!((ab - a - b * 2.0).norm() < 1e-6 * (1.0 + ab.norm()));
    }
    assert!(compute_lk(&p, &d, 3).is_err());
}

#[test]
fn ej_matches_shooting_oracle() {
    for &(alpha, c) in &[(2.0, 0.0), (3.0, -0.4), (2.0, 0.7)] {
        let f = |_: f64, p: f64, _: f64, _: &[f64]| vec![p];
        let (_, _, up) = shoot(alpha, c, PI, 1, &f);
        let (_, _, dn) = shoot(alpha, c, 0.0, 1, &f);
        let d = ld(alpha, c);
        let one = trig(&[(0, 1.0)]);
        assert!(rel(compute_ej(&one, &d, 1), cx(up[0])) < 1e-7);
        assert!(rel(compute_ej(&one, &d, 0), cx(dn[0])) < 1e-7);
    }
    let d = ld(2.0, -1.0);
    assert!(compute_ej(&trig(&[(0, 1.0)]), &d, 0).norm() < 1.01 * d.layer().yc);
}

#[test]
fn lambdas_vanish_on_zero_input() {
    let z = TrigPoly::zeros(0);
    let l = compute_lambdas(&z, &z, &z, &ld(2.0, 0.2), DEFAULT_PV_STEP);
    assert_eq!(l.l1.norm() + l.l2.norm() + l.l3.norm() + l.l4.norm(), 0.0);
}

#[test]
fn lambda_intertwining() {
    let alpha = 2.0;
    let wo = sin_k(2).add(&sin_k(1).scale(cx(0.4)));
    let we = trig(&[(0, 0.3), (2, 0.5), (-2, 0.5), (3, 0.1), (-3, 0.1)]);
    for &c in &[0.3, -0.55] {
        let d = ld(alpha, c);
        let uc = c;
        for (w, odd) in [(&wo, true), (&we, false)] {
            let psi = inv_lap(alpha, w);
            let lhs_arg = psi.sub(w).mul_cos();
            let ev = |p: &TrigPoly| {
                let f = PreparedFn::new(p.clone());
                if odd {
                    lambda1(&d, &f, DEFAULT_PV_STEP)
                } else {
                    lambda3(&d, &f, DEFAULT_PV_STEP)
                }
            };
            let rhs = ev(w) * uc;
            let lhs = ev(&lhs_arg);
            assert!((lhs - rhs).norm() < 1e-6 * ev(w).norm(), "c {c} odd {odd}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn lambda2_of_g_o_equals_lambda1() {
    let alpha = 2.0;
    let wo = sin_k(2).add(&sin_k(3).scale(cx(-0.3)));
    let g = wo.sub(&inv_lap(alpha, &wo));
    for &c in &[0.3, -0.2, 0.8] {
        let d = ld(alpha, c);
        let l1 = lambda1(&d, &PreparedFn::new(wo.clone()), DEFAULT_PV_STEP);
        let l2 = lambda2(&d, &PreparedFn::new(g.mul_cos()), g.eval(d.layer().yc), DEFAULT_PV_STEP);
        assert!(rel(l2, l1) < 1e-6, "c {c}: {l2} vs {l1}");
    }
}

fn omega_test(alpha: f64) -> ModeProfile {
    ModeProfile::from_fn(alpha, 64, |y| cx((2.0 * y).sin() + 0.5 * (2.0 * y).cos() + 0.3 * y.cos() - 0.2 * (3.0 * y).sin()))
}

#[test]
fn representation_reconstructs_initial_stream_function() {
    let alpha = 2.0;
    let omega = omega_test(alpha);
    let psi = inverse_laplacian_mode(&omega).unwrap();
    let dens = build_representation_density(&omega, &CGrid::new(512).unwrap()).unwrap();
    let rec = dens.evolve_stream_mode(0.0).unwrap();
    assert!(rec.rel_dist(&psi) < 1e-4, "rel = {}", rec.rel_dist(&psi));
    let ny = dens.y.len();
    for j in [3, 100, 400] {
        let (o, e) = (dens.phi_tilde_odd(j), dens.phi_tilde_even(j));
        for i in 1..ny {
            let m = ny - i;
            assert!((o[i] + o[m]).norm() < 1e-10 * (1.0 + o[i].norm()));
            assert!((e[i] - e[m]).norm() < 1e-10 * (1.0 + e[i].norm()));
        }
        assert!(o[0].norm() < 1e-9 && o[ny / 2].norm() < 1e-12);
    }
    let z = build_representation_density(&ModeProfile::zeros(alpha, 64), &CGrid::new(16).unwrap()).unwrap();
    assert!(z.evolve_stream_mode(0.5).unwrap().norm() == 0.0);
}

#[test]
fn dual_kernels_vanish_at_endpoints() {
    let alpha = 2.0;
    let grid = CGrid::new(256).unwrap();
    let wo = ModeProfile::from_fn(alpha, 64, |y| cx((2.0 * y).sin()));
    let g = ModeProfile::from_fn(alpha, 64, |y| cx(y.sin()));
    let ko = assemble_dual_kernel(KernelKind::Odd, &wo, Some(&g), &grid).unwrap();
    assert!(ko.endpoint_ratio() < 1e-3, "K_o ratio {}", ko.endpoint_ratio());
    let we = ModeProfile::from_fn(alpha, 64, |y| cx((2.0 * y).cos() + 0.3));
    let ge = ModeProfile::from_fn(alpha, 64, |y| cx(y.cos()));
    let ke = assemble_dual_kernel(KernelKind::Even, &we, Some(&ge), &grid).unwrap();
    assert!(ke.endpoint_ratio() < 1e-3, "K_e ratio {}", ke.endpoint_ratio());
    let ke0 = assemble_dual_kernel(KernelKind::EvenCritical, &we, None, &grid).unwrap();
    assert!(ke0.endpoint_ratio() < 1e-3, "K_e0 ratio {}", ke0.endpoint_ratio());
    for k in [&ko, &ke, &ke0] {
        assert!(k.l1_norms().iter().all(|v| v.is_finite()));
    }
    let zero = ModeProfile::zeros(alpha, 64);
    let kz = assemble_dual_kernel(KernelKind::Odd, &zero, Some(&g), &grid).unwrap();
    assert_eq!(kz.max_abs(), 0.0);
}

#[test]
fn dual_kernel_rejects_bad_test_function() {
    let grid = CGrid::new(16).unwrap();
    let w = ModeProfile::from_fn(2.0, 32, |y| cx(y.sin()));
    let bad = ModeProfile::from_fn(2.0, 32, |y| cx(y.cos()));
    assert!(matches!(assemble_dual_kernel(KernelKind::Odd, &w, Some(&bad), &grid), Err(Error::Contract(_))));
    let bad_e = ModeProfile::from_fn(2.0, 32, |y| cx(y.sin()));
    assert!(matches!(assemble_dual_kernel(KernelKind::Even, &w, Some(&bad_e), &grid), Err(Error::Contract(_))));
    assert!(matches!(assemble_dual_kernel(KernelKind::Odd, &w, None, &grid), Err(Error::Contract(_))));
}

#[test]
fn pairing_identities() {
    let alpha = 2.0;
    let grid = CGrid::new(512).unwrap();
    let omega = omega_test(alpha);
    let w = omega.to_trig();
    let psi = inv_lap(alpha, &w);
    let dens = build_representation_density(&omega, &grid).unwrap();
    let go = sin_k(1).add(&sin_k(3).scale(cx(0.5)));
    let ge = trig(&[(1, 0.5), (-1, 0.5), (0, 0.2), (2, 0.1), (-2, 0.1)]);
    let gom = ModeProfile::from_trig(alpha, &go, 64);
    let gem = ModeProfile::from_trig(alpha, &ge, 64);
    let ko = assemble_dual_kernel(KernelKind::Odd, &omega, Some(&gom), &grid).unwrap();
    let ke = assemble_dual_kernel(KernelKind::Even, &omega, Some(&gem), &grid).unwrap();
    let direct_o = pair(&psi.odd_part(), &helmholtz(alpha, &go));
    let direct_e = pair(&psi.even_part(), &helmholtz(alpha, &ge));
    let ko0 = -ko.integrate_oscillatory(0.0).unwrap();
    let ke0 = -ke.integrate_oscillatory(0.0).unwrap();
    assert!(rel(ko0, direct_o) < 1e-4, "odd {ko0} vs {direct_o}");
    assert!(rel(ke0, direct_e) < 1e-4, "even {ke0} vs {direct_e}");
    for t in [1.0, 5.0] {
        let p = dens.evolve_stream_mode(t).unwrap().to_trig();
        let rep_o = pair(&p.odd_part(), &helmholtz(alpha, &go));
        let rep_e = pair(&p.even_part(), &helmholtz(alpha, &ge));
        let k_o = -ko.integrate_oscillatory(t).unwrap();
        let k_e = -ke.integrate_oscillatory(t).unwrap();
        assert!(rel(k_o, rep_o) < 1e-4, "t {t} odd {k_o} vs {rep_o}");
        assert!(rel(k_e, rep_e) < 1e-4, "t {t} even {k_e} vs {rep_e}");
    }
    let kc_o = assemble_dual_kernel(KernelKind::OddCritical, &omega, None, &grid).unwrap();
    let kc_e = assemble_dual_kernel(KernelKind::EvenCritical, &omega, None, &grid).unwrap();
    let d0 = psi.deriv().eval(0.0);
    assert!(rel(kc_o.integrate_oscillatory(0.0).unwrap(), d0) < 1e-4);
    assert!(rel(kc_e.integrate_oscillatory(0.0).unwrap(), psi.eval(0.0)) < 1e-4);
    let kw = assemble_dual_kernel(KernelKind::VorticityCritical, &omega, None, &grid).unwrap();
    assert!(rel(kw.integrate_oscillatory(0.0).unwrap(), w.eval(0.0)) < 1e-4);
    for t in [1.0, 5.0] {
        let p = dens.evolve_stream_mode(t).unwrap().to_trig();
        assert!(rel(kc_e.integrate_oscillatory(t).unwrap(), p.eval(0.0)) < 1e-4);
        assert!(rel(kc_o.integrate_oscillatory(t).unwrap(), p.deriv().eval(0.0)) < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn kernel_set_finite_and_ordered(alpha in 1.2f64..6.0, c in -0.999f64..0.999) {
        let ks = compute_kernel_set(alpha, c).unwrap();
        prop_assert!(ks.ii < 0.0 && ks.ii.is_finite());
        prop_assert!(ks.j1 >= 0.0 && ks.j0 <= 0.0);
        prop_assert!(ks.a1b1_sq() > 0.0 && ks.ab_sq() > 0.0);
    }

    #[test]
    fn ii11_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -0.9f64..0.9) {
        let layer = limit_layer(c).unwrap();
        let p = sin_k(2);
        let q = trig(&[(1, 0.5), (-1, 0.5)]);
        let comb = p.scale(cx(a)).add(&q.scale(cx(b)));
        let v = PvOperator::new(&comb).ii11(&layer, DEFAULT_PV_STEP);
        let w = PvOperator::new(&p).ii11(&layer, DEFAULT_PV_STEP) * a + PvOperator::new(&q).ii11(&layer, DEFAULT_PV_STEP) * b;
        prop_assert!((v - w).norm() < 1e-9 * (1.0 + w.norm()));
    }
}
