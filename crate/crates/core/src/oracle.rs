//! Independent reference computations used only by tests: ODE shooting for `φ₁`
//! with augmented integral components, and brute-force nested quadratures.

use crate::quad::GlRule;
use std::f64::consts::PI;

/// Right-hand side of the augmented components: `(y, φ₁, φ₁', extra) -> d extra / dy`.
pub type ExtraRhs<'a> = dyn Fn(f64, f64, f64, &[f64]) -> Vec<f64> + 'a;

fn rhs(alpha: f64, yc: f64, y: f64, st: &[f64], extra: &ExtraRhs) -> Vec<f64> {
    let w = 2.0 * (0.5 * (y + yc)).sin() * (0.5 * (y - yc)).sin();
    let mut d = vec![st[1], alpha * alpha * st[0] - 2.0 * y.sin() * st[1] / w];
    d.extend(extra(y, st[0], st[1], &st[2..]));
    d
}

fn rk4_step(f: &dyn Fn(f64, &[f64]) -> Vec<f64>, x: f64, st: &[f64], h: f64) -> Vec<f64> {
    let add = |a: &[f64], b: &[f64], s: f64| a.iter().zip(b).map(|(x, y)| x + s * y).collect::<Vec<_>>();
    let k1 = f(x, st);
    let k2 = f(x + 0.5 * h, &add(st, &k1, 0.5 * h));
    let k3 = f(x + 0.5 * h, &add(st, &k2, 0.5 * h));
    let k4 = f(x + h, &add(st, &k3, h));
    (0..st.len()).map(|i| st[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

/// Integrates `φ₁'' = α²φ₁ − 2u'φ₁'/(u−c)` from the critical layer to `y_end`,
/// together with `nextra` integral components started at zero on the layer.
/// Returns `(φ₁(y_end), φ₁'(y_end), extra(y_end))`.
pub fn shoot(alpha: f64, c: f64, y_end: f64, nextra: usize, extra: &ExtraRhs) -> (f64, f64, Vec<f64>) {
    let yc = (-c).acos();
    let dir = if y_end >= yc { 1.0 } else { -1.0 };
    let dist = (y_end - yc).abs();
    let tau0 = 1e-9f64;
    let mut st = vec![1.0 + alpha * alpha * tau0 * tau0 / 6.0, dir * alpha * alpha * tau0 / 3.0];
    st.resize(2 + nextra, 0.0);
    if dist <= tau0 {
        return (st[0], st[1], st[2..].to_vec());
    }
    let y0 = yc + dir * tau0;
    let e0 = extra(y0, st[0], st[1], &st[2..]);
    for i in 0..nextra {
        st[2 + i] = dir * tau0 * e0[i];
    }
    // geometric phase in s = ln τ
    let tau1 = dist.min(0.1);
    let (s0, s1) = (tau0.ln(), tau1.ln());
    let ns = ((s1 - s0) / 1e-3).ceil() as usize;
    let ds = (s1 - s0) / ns as f64;
    let fs = |s: f64, x: &[f64]| {
        let tau = s.exp();
        let y = yc + dir * tau;
        rhs(alpha, yc, y, x, extra).into_iter().map(|v| v * dir * tau).collect::<Vec<_>>()
    };
    for k in 0..ns {
        st = rk4_step(&fs, s0 + k as f64 * ds, &st, ds);
    }
    let ya = yc + dir * tau1;
    let rest = y_end - ya;
    if rest.abs() > 0.0 {
        let n = (rest.abs() / 5e-4).ceil() as usize;
        let h = rest / n as f64;
        let fy = |y: f64, x: &[f64]| rhs(alpha, yc, y, x, extra);
        for k in 0..n {
            st = rk4_step(&fy, ya + k as f64 * h, &st, h);
        }
    }
    (st[0], st[1], st[2..].to_vec())
}

pub fn shoot_phi1(alpha: f64, c: f64, y: f64) -> (f64, f64) {
    let (p, d, _) = shoot(alpha, c, y, 0, &|_, _, _, _| Vec::new());
    (p, d)
}

/// Composite Gauss–Legendre quadrature of `f` on `[a,b]` with `n` panels.
pub fn gl_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let r = GlRule::new(20);
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        for j in 0..r.x.len() {
            s += 0.5 * (hi - lo) * r.w[j] * f(lo + 0.5 * (hi - lo) * (r.x[j] + 1.0));
        }
    }
    s
}

/// `T1(π)` at `c = 0` by nested quadrature; the singular outer weight
/// `cos^{−2} y'` is handled by the substitution `y' = π/2 + t`.
pub fn t_of_one_c0_at_pi() -> f64 {
    let outer = |t: f64| {
        let yp = PI / 2.0 + t;
        let inner = gl_integrate(&|z: f64| z.cos().powi(2), PI / 2.0, yp, 8);
        inner / t.sin().powi(2)
    };
    gl_integrate(&outer, 0.0, PI / 2.0, 64)
}
