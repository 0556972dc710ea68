//! Scalars and kernels of the limiting-absorption construction: `II`, `A`, `B`,
//! `J_j^k`, `A₁`, `B₁`, Wronskian limits, `II_{1,1}`, `ℒ_k`, `E_j`, `Λ₁…Λ₄`,
//! dual kernels and representation densities.

pub mod cgrid;
pub mod density;
pub mod dual;

pub use cgrid::CGrid;
pub use density::{build_representation_density, RepresentationDensity};
pub use dual::{assemble_dual_kernel, DualKernel, KernelKind};

pub use crate::fourier::hilbert_transform;

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::rayleigh::{c_step, critical_layer, solve_phi1_domain, solve_phi1_on, u_minus_c, CriticalLayer, RayleighProfile, PANEL_HMAX};
use crate::torus_field::ModeProfile;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Neumann-series tolerance used for all kernel evaluations.
pub const PROFILE_TOL: f64 = 1e-14;
/// Offset from `c = ±1` at which endpoint limits are evaluated.
pub const EPS_LIM: f64 = 1e-6;
/// Periodic grid used for the Hilbert-transform route of `II_{1,1}`.
pub const NFFT_PV: usize = 4096;
/// Default `y_c` step of the finite difference in `II_{1,1}` (a 512-interval c-grid).
pub const DEFAULT_PV_STEP: f64 = PI / 512.0;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Scalar building blocks at one `c`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelSet {
    pub alpha: f64,
    pub layer: CriticalLayer,
    pub ii: f64,
    pub a: f64,
    pub b: f64,
    pub j0: f64,
    pub j1: f64,
    pub j1k1: f64,
    pub j0k1: f64,
    pub a1: f64,
    pub b1: f64,
}

impl KernelSet {
    pub fn ab_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b
    }

    pub fn a1b1_sq(&self) -> f64 {
        self.a1 * self.a1 + self.b1 * self.b1
    }
}

/// Checks `|α| > 1`.
pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.abs() <= 1.0 {
        Err(Error::SpectralCondition { alpha: alpha.abs(), bound: 1.0 })
    } else {
        Ok(())
    }
}

/// Layer for `c`, with `c = ±1` replaced by the one-sided limit point.
pub fn limit_layer(c: f64) -> Result<CriticalLayer> {
    let cc = c.clamp(-1.0 + EPS_LIM, 1.0 - EPS_LIM);
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange(format!("c = {c} not in [-1,1]")));
    }
    critical_layer(cc)
}

/// Everything at one `c` that does not depend on the data: `φ₁`, `u−c` on the
/// panel nodes, and the [`KernelSet`].
#[derive(Debug, Clone)]
pub struct LayerData {
    pub profile: RayleighProfile,
    pub ks: KernelSet,
    /// `u − c` at the panel nodes.
    pub w: Vec<f64>,
    /// `(1/φ₁² − 1)/(u−c)²` at the panel nodes.
    pub r: Vec<f64>,
    /// `φ₁(0), φ₁'(0), φ₁(π), φ₁'(π)`.
    pub ends: [f64; 4],
}

impl LayerData {
    pub fn new(alpha: f64, layer: CriticalLayer) -> Result<Self> {
        check_alpha(alpha)?;
        let profile = solve_phi1_on(alpha, layer, PROFILE_TOL, PANEL_HMAX)?;
        Ok(Self::from_profile(profile))
    }

    pub fn from_profile(profile: RayleighProfile) -> Self {
        let layer = profile.layer;
        let w: Vec<f64> = profile.panels.nodes.iter().map(|&y| u_minus_c(y, layer.yc)).collect();
        let r: Vec<f64> = (0..w.len())
            .map(|i| {
                let p = profile.psi1[i];
                -p * (2.0 + p) / (profile.phi1[i].powi(2) * w[i] * w[i])
            })
            .collect();
        let ends = profile.endpoint_values();
        let ii = profile.panels.integrate(&r);
        let s = layer.s;
        let (up, um) = (1.0 - layer.c, 1.0 + layer.c);
        let j1 = -s * up * up / (ends[0] * ends[1]);
        let j0 = -s * um * um / (ends[2] * ends[3]);
        let j1k1 = -s * up / ends[1];
        let j0k1 = s * um / ends[3];
        let a = s * s * s * ii;
        let b = PI * (-layer.c);
        let ks = KernelSet {
            alpha: profile.alpha,
            layer,
            ii,
            a,
            b,
            j0,
            j1,
            j1k1,
            j0k1,
            a1: j1 - j0 + s * s * a,
            b1: s * s * b,
        };
        Self { profile, ks, w, r, ends }
    }

    pub fn layer(&self) -> &CriticalLayer {
        &self.ks.layer
    }

    /// `∫_0^y (1/φ₁² − 1)/(u−c)²` at arbitrary `y ∈ [0, π]`, from node samples of its cumulative integral.
    pub fn cumulative_r(&self) -> Vec<f64> {
        self.profile.panels.cumint_from(&self.r, 0)
    }
}

/// `II`, `A`, `B`, `J_j^k`, `A₁`, `B₁` at `c` (endpoints by one-sided limits).
pub fn compute_kernel_set(alpha: f64, c: f64) -> Result<KernelSet> {
    check_alpha(alpha)?;
    Ok(LayerData::new(alpha, limit_layer(c)?)?.ks)
}

/// Boundary values of the odd and even Wronskians from above (`+`) and below (`−`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WronskianLimits {
    /// `lim ρ^{1/2} W_o` from `c + i0`.
    pub wo_plus: Complex64,
    pub wo_minus: Complex64,
    /// `lim φ(0)φ(π) W_e` from `c + i0`.
    pub we_plus: Complex64,
    pub we_minus: Complex64,
}

pub fn wronskian_limits(alpha: f64, c: f64) -> Result<WronskianLimits> {
    check_alpha(alpha)?;
    let ld = LayerData::new(alpha, limit_layer(c)?)?;
    let k = &ld.ks;
    let [p0, d0, pp, dp] = ld.ends;
    let wo = |sg: f64| Complex64::new(-p0 * pp * k.a, p0 * pp * sg * k.b);
    let pref = -(pp * dp) * (p0 * d0) / k.layer.s;
    let we = |sg: f64| Complex64::new(pref * k.a1, -pref * sg * k.b1);
    Ok(WronskianLimits { wo_plus: wo(1.0), wo_minus: wo(-1.0), we_plus: we(1.0), we_minus: we(-1.0) })
}

fn solve4(m: [[f64; 4]; 4], rhs: [Complex64; 4]) -> [Complex64; 4] {
    let mut a = m;
    let mut b = rhs;
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] = b[row] - b[col] * f;
        }
    }
    let mut x = [ZERO; 4];
    for row in (0..4).rev() {
        let mut s = b[row];
        for k in row + 1..4 {
            s -= x[k] * a[row][k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Principal-value operator `φ ↦ II_{1,1}(φ)(c)` for one function, built on the
/// Hilbert-transform identity. The endpoint kinks of the even extension of
/// `Int(φ)` are removed by subtracting `sin y·P(cos y)` with cubic `P`, whose
/// contribution is added in closed form.
#[derive(Debug, Clone)]
pub struct PvOperator {
    b: [Complex64; 4],
    /// Cosine-series coefficients `R_k`, `k ≥ 1`, of the smooth remainder.
    rk: Vec<Complex64>,
}

fn mu(m: usize) -> f64 {
    if m % 2 == 0 {
        2.0 / (m + 1) as f64
    } else {
        0.0
    }
}

impl PvOperator {
    pub fn new(phi: &TrigPoly) -> Self {
        Self::with_grid(phi, NFFT_PV)
    }

    pub fn with_grid(phi: &TrigPoly, nfft: usize) -> Self {
        let mut v = [ZERO; 4];
        for k in phi.ks() {
            let c = phi.get(k);
            let sg = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let k2 = (k * k) as f64;
            v[0] += c;
            v[1] -= c * k2;
            v[2] += c * sg;
            v[3] -= c * (k2 * sg);
        }
        let mut m = [[0.0; 4]; 4];
        for n in 0..4 {
            let nf = n as f64;
            let sg = if n % 2 == 0 { 1.0 } else { -1.0 };
            m[0][n] = 1.0;
            m[1][n] = -(1.0 + 3.0 * nf);
            m[2][n] = -sg;
            m[3][n] = sg * (1.0 + 3.0 * nf);
        }
        let b = solve4(m, v);
        let q = |y: f64| {
            let x = y.cos();
            y.sin() * (b[0] + x * (b[1] + x * (b[2] + x * b[3])))
        };
        let ys = crate::fourier::periodic_grid(nfft);
        let vals: Vec<Complex64> = ys
            .iter()
            .map(|&y| {
                let y = y.abs();
                phi.integral_from0(y) - q(y)
            })
            .collect();
        let rp = TrigPoly::from_samples(&vals);
        let rk = (1..nfft as i64 / 2).map(|k| (rp.get(k) + rp.get(-k)) * 0.5).collect();
        Self { b, rk }
    }

    /// `S_R(y) = −H R(y)/(2 sin y)` via the Chebyshev form `Σ R_k U_{k−1}(cos y)`.
    pub fn s_r(&self, y: f64) -> Complex64 {
        let x = y.cos();
        let (mut b1, mut b2) = (ZERO, ZERO);
        for a in self.rk.iter().rev() {
            let b0 = a + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        b1 * (-2.0 * PI)
    }

    /// `II_{1,1}(φ)(c)` with a fourth-order difference of step `h` in `y_c`.
    pub fn ii11(&self, layer: &CriticalLayer, h: f64) -> Complex64 {
        let y = layer.yc;
        let ds = (self.s_r(y - 2.0 * h) - self.s_r(y + 2.0 * h) + (self.s_r(y + h) - self.s_r(y - h)) * 8.0) / (12.0 * h);
        let ii_r = ds / layer.s;
        let a = -layer.c;
        let b = &self.b;
        let p = b[0] + a * (b[1] + a * (b[2] + a * b[3]));
        let dp = b[1] + a * (b[2] * 2.0 + a * b[3] * 3.0);
        let l = ((1.0 - layer.c) / (1.0 + layer.c)).ln();
        let mut poly = dp * l + p * (2.0 / layer.rho);
        for n in 2..4 {
            for m in 0..n - 1 {
                poly -= b[n] * ((n - 1 - m) as f64 * a.powi((n - 2 - m) as i32) * mu(m));
            }
        }
        ii_r - poly
    }
}

/// `II_{1,1}(φ)(c)` for a full-period profile `φ`.
pub fn compute_ii11(phi: &ModeProfile, c: f64) -> Result<Complex64> {
    let layer = limit_layer(c)?;
    Ok(PvOperator::new(&phi.to_trig()).ii11(&layer, DEFAULT_PV_STEP))
}

/// A function of y prepared for kernel evaluation: its coefficients and p.v. operator.
#[derive(Debug, Clone)]
pub struct PreparedFn {
    pub poly: TrigPoly,
    pub pv: PvOperator,
}

impl PreparedFn {
    pub fn new(poly: TrigPoly) -> Self {
        let pv = PvOperator::new(&poly);
        Self { poly, pv }
    }

    pub fn zero() -> Self {
        Self::new(TrigPoly::zeros(0))
    }

    pub fn at_nodes(&self, ld: &LayerData) -> Vec<Complex64> {
        self.poly.eval_many(&ld.profile.panels.nodes)
    }
}

/// `E_j(φ) = ∫_{y_c}^{jπ} φ φ₁` from node samples of `φ`.
pub fn ej_from_nodes(ld: &LayerData, vals: &[Complex64], j: usize) -> Complex64 {
    let pr = &ld.profile;
    let p = pr.panels.order();
    let mut s = ZERO;
    let range = if j == 0 { 0..pr.kc * p } else { pr.kc * p..vals.len() };
    for i in range {
        s += vals[i] * (pr.phi1[i] * pr.panels.weights[i]);
    }
    if j == 0 {
        -s
    } else {
        s
    }
}

fn l_integral(ld: &LayerData, vals: &[Complex64], psi: &[f64], w: &[f64]) -> Complex64 {
    let pr = &ld.profile;
    let p0 = pr.panels.cumint_from(vals, pr.kc);
    let vp: Vec<Complex64> = vals.iter().zip(psi).map(|(v, s)| v * s).collect();
    let p1 = pr.panels.cumint_from(&vp, pr.kc);
    let integrand: Vec<Complex64> = (0..vals.len())
        .map(|i| {
            let s = psi[i];
            (p1[i] - p0[i] * (s * (2.0 + s))) / ((1.0 + s).powi(2) * w[i] * w[i])
        })
        .collect();
    pr.panels.integrate(&integrand)
}

/// `ℒ₀(φ)` from node samples of `φ`.
pub fn l0_from_nodes(ld: &LayerData, vals: &[Complex64]) -> Complex64 {
    l_integral(ld, vals, &ld.profile.psi1, &ld.w)
}

/// `ℒ_k(φ)(c)`, `k ∈ {0,1,2}`. For `k ≥ 1` the kernel derivative is taken in `c`
/// at fixed offsets from the critical layer, by central differences.
pub fn compute_lk(phi: &TrigPoly, ld: &LayerData, k: usize) -> Result<Complex64> {
    let vals = phi.eval_many(&ld.profile.panels.nodes);
    let q0 = l0_from_nodes(ld, &vals);
    if k == 0 {
        return Ok(q0);
    }
    if k > 2 {
        return Err(Error::OutOfRange(format!("k = {k} not in {{0,1,2}}")));
    }
    let layer = *ld.layer();
    let eps = c_step(&layer);
    let shifted = |e: f64| -> Result<Complex64> {
        let l2 = critical_layer(layer.c + e)?;
        let d = l2.yc - layer.yc;
        let pad = 2.0 * d.abs() + 1e-12;
        let pr2 = solve_phi1_domain(ld.profile.alpha, l2, PROFILE_TOL, PANEL_HMAX, -pad, PI + pad)?;
        let nodes = &ld.profile.panels.nodes;
        let psi: Vec<f64> = nodes.iter().map(|&y| pr2.psi1_at(y + d)).collect();
        let w: Vec<f64> = nodes
            .iter()
            .map(|&z| 2.0 * (0.5 * (z + d + l2.yc)).sin() * (0.5 * (z - layer.yc)).sin())
            .collect();
        Ok(l_integral(ld, &vals, &psi, &w))
    };
    let (qp, qm) = (shifted(eps)?, shifted(-eps)?);
    Ok(if k == 1 { (qp - qm) / (2.0 * eps) } else { (qp - q0 * 2.0 + qm) / (eps * eps) })
}

/// `E_j(φ)(c)`.
pub fn compute_ej(phi: &TrigPoly, ld: &LayerData, j: usize) -> Complex64 {
    ej_from_nodes(ld, &phi.eval_many(&ld.profile.panels.nodes), j)
}

/// `II₁(φ) = II_{1,1}(φ) + ℒ₀(φ)`.
pub fn ii1(ld: &LayerData, f: &PreparedFn, h: f64) -> Complex64 {
    f.pv.ii11(ld.layer(), h) + l0_from_nodes(ld, &f.at_nodes(ld))
}

/// `Λ₁(φ) = ρ[u''(y_c)II₁(φ) + u'(y_c)II·φ(y_c)]`.
pub fn lambda1(ld: &LayerData, f: &PreparedFn, h: f64) -> Complex64 {
    let l = ld.layer();
    let phi_c = f.poly.eval(l.yc);
    (ii1(ld, f, h) * (-l.c) + phi_c * (l.s * ld.ks.ii)) * l.rho
}

/// `Λ₂(g) = ρ[II₁(u''g) + u'(y_c)II·g(y_c)]`; `gc` is the prepared `cos y·g`.
pub fn lambda2(ld: &LayerData, gc: &PreparedFn, g_at_yc: Complex64, h: f64) -> Complex64 {
    let l = ld.layer();
    (ii1(ld, gc, h) + g_at_yc * (l.s * ld.ks.ii)) * l.rho
}

/// `Λ₃(φ) = ρΛ₁(φ) + J_j(u''(y_c)E_{1−j}(φ)/u'(y_c) + φ(y_c))|_{j=0}^{1}`.
pub fn lambda3(ld: &LayerData, f: &PreparedFn, h: f64) -> Complex64 {
    let l = ld.layer();
    let vals = f.at_nodes(ld);
    let phi_c = f.poly.eval(l.yc);
    let cy = -l.c;
    let e0 = ej_from_nodes(ld, &vals, 0);
    let e1 = ej_from_nodes(ld, &vals, 1);
    let l1 = (f.pv.ii11(l, h) + l0_from_nodes(ld, &vals)) * cy * l.rho + phi_c * (l.rho * l.s * ld.ks.ii);
    l1 * l.rho + (e0 * (cy / l.s) + phi_c) * ld.ks.j1 - (e1 * (cy / l.s) + phi_c) * ld.ks.j0
}

/// `Λ₄(g) = ρΛ₂(g) + J_j(E_{1−j}(u''g)/u'(y_c) + g(y_c))|_{j=0}^{1}`.
pub fn lambda4(ld: &LayerData, gc: &PreparedFn, g_at_yc: Complex64, h: f64) -> Complex64 {
    let l = ld.layer();
    let vals = gc.at_nodes(ld);
    let e0 = ej_from_nodes(ld, &vals, 0);
    let e1 = ej_from_nodes(ld, &vals, 1);
    let l2 = (gc.pv.ii11(l, h) + l0_from_nodes(ld, &vals) + g_at_yc * (l.s * ld.ks.ii)) * l.rho;
    l2 * l.rho + (e0 / l.s + g_at_yc) * ld.ks.j1 - (e1 / l.s + g_at_yc) * ld.ks.j0
}

/// `(Λ₁(ω_o), Λ₂(g), Λ₃(ω_e), Λ₄(g))` at one `c`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lambdas {
    pub l1: Complex64,
    pub l2: Complex64,
    pub l3: Complex64,
    pub l4: Complex64,
}

pub fn compute_lambdas(omega_odd: &TrigPoly, omega_even: &TrigPoly, g: &TrigPoly, ld: &LayerData, h: f64) -> Lambdas {
    let yc = ld.layer().yc;
    let fo = PreparedFn::new(omega_odd.clone());
    let fe = PreparedFn::new(omega_even.clone());
    let gc = PreparedFn::new(g.mul_cos());
    let gy = g.eval(yc);
    Lambdas {
        l1: lambda1(ld, &fo, h),
        l2: lambda2(ld, &gc, gy, h),
        l3: lambda3(ld, &fe, h),
        l4: lambda4(ld, &gc, gy, h),
    }
}

#[cfg(test)]
mod tests;
