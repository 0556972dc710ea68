//! Homogeneous Rayleigh solution `φ = (u−c)φ₁` for `u(y) = −cos y`, built from the
//! Neumann series `φ₁ = Σ α^{2k} T^k 1` of the Rayleigh integral operator.

use crate::error::{Error, Result};
use crate::quad::Panels;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// Location of the critical layer `u(y_c) = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalLayer {
    pub c: f64,
    pub yc: f64,
    pub s: f64,
    pub rho: f64,
}

impl CriticalLayer {
    /// Layer parametrized by `y_c ∈ [0, π]`.
    pub fn from_yc(yc: f64) -> Self {
        let yc = yc.clamp(0.0, PI);
        let s = yc.sin().max(0.0);
        Self { c: -yc.cos(), yc, s, rho: s * s }
    }
}

/// Critical layer of wave speed `c ∈ [−1, 1]`.
pub fn critical_layer(c: f64) -> Result<CriticalLayer> {
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange(format!("c = {c} not in [-1,1]")));
    }
    let yc = (-c).acos();
    let rho = (1.0 - c) * (1.0 + c);
    Ok(CriticalLayer { c, yc, s: rho.sqrt(), rho })
}

/// `u(y) − c = cos y_c − cos y`, evaluated without cancellation near `y_c`.
pub fn u_minus_c(y: f64, yc: f64) -> f64 {
    2.0 * (0.5 * (y + yc)).sin() * (0.5 * (y - yc)).sin()
}

/// `u₁(y,c) = (cos y_c − cos y)/(y − y_c)`, continuous across `y = y_c`.
pub fn u1(y: f64, yc: f64) -> f64 {
    let d = 0.5 * (y - yc);
    let sinc = if d.abs() < 1e-8 { 1.0 - d * d / 6.0 } else { d.sin() / d };
    (0.5 * (y + yc)).sin() * sinc
}

/// Default maximal panel length on `[0, π]`.
pub const PANEL_HMAX: f64 = 0.25;

/// Panel breakpoints for a layer: `0`, `y_c`, `π` are breakpoints, panels are at
/// most `hmax` long and graded toward the reflected poles `−y_c` and `2π − y_c`.
/// Returns the breakpoints and the index of `y_c` among them.
pub fn layer_breaks(yc: f64, hmax: f64) -> (Vec<f64>, usize) {
    layer_breaks_on(yc, hmax, 0.0, PI)
}

/// As [`layer_breaks`] on `[lo, hi]` (with `−y_c < lo` and `hi < 2π − y_c`).
pub fn layer_breaks_on(yc: f64, hmax: f64, lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let mut coarse = vec![lo];
    if yc > lo && yc < hi {
        coarse.push(yc);
    }
    coarse.push(hi);
    let admissible = |a: f64, b: f64| {
        let d = (a + yc).min(2.0 * PI - yc - b);
        b - a <= hmax && b - a <= d
    };
    let mut out = vec![lo];
    for w in coarse.windows(2) {
        let mut stack = vec![(w[0], w[1])];
        let mut seg = Vec::new();
        while let Some((a, b)) = stack.pop() {
            if admissible(a, b) || b - a < 1e-13 {
                seg.push((a, b));
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b));
                stack.push((a, m));
            }
        }
        for (_, b) in seg {
            out.push(b);
        }
    }
    let kc = out.iter().position(|&b| b == yc).unwrap_or(if yc <= lo { 0 } else { out.len() - 1 });
    (out, kc)
}

/// Sampled `φ₁(·, c)` and its y-derivative on a panel quadrature of `[0, π]`.
#[derive(Debug, Clone)]
pub struct RayleighProfile {
    pub alpha: f64,
    pub layer: CriticalLayer,
    pub panels: Panels,
    /// Breakpoint index of `y_c`.
    pub kc: usize,
    pub phi1: Vec<f64>,
    /// `φ₁ − 1`, accumulated directly from the series for full relative precision.
    pub psi1: Vec<f64>,
    pub dphi1: Vec<f64>,
    pub f: Vec<f64>,
    /// `𝒢 = ∂_cφ₁/φ₁`, filled by [`log_derivatives`] on demand.
    pub g: Option<Vec<f64>>,
    pub series_terms: usize,
    pub residual: f64,
}

/// Applies the Rayleigh integral operator on a panel set:
/// returns `(T f, T_{2,2} f)` with `T_{2,2} f = (u−c)^{−2}∫_{y_c}^{y} f (u−c)²`.
pub fn apply_t(panels: &Panels, kc: usize, yc: f64, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let w2: Vec<f64> = panels.nodes.iter().map(|&y| u_minus_c(y, yc).powi(2)).collect();
    apply_t_w2(panels, kc, &w2, f)
}

fn apply_t_w2(panels: &Panels, kc: usize, w2: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let fw: Vec<f64> = f.iter().zip(w2).map(|(a, b)| a * b).collect();
    let inner = panels.cumint_from(&fw, kc);
    let t22: Vec<f64> = inner.iter().zip(w2).map(|(a, b)| a / b).collect();
    let t = panels.cumint_from(&t22, kc);
    (t, t22)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

const MAX_TERMS: usize = 200;

/// Neumann-series solution of `φ₁ = 1 + α²Tφ₁`.
pub fn solve_phi1(alpha: f64, c: f64, tol: f64) -> Result<RayleighProfile> {
    solve_phi1_on(alpha, critical_layer(c)?, tol, PANEL_HMAX)
}

/// As [`solve_phi1`] for a given layer and panel size.
pub fn solve_phi1_on(alpha: f64, layer: CriticalLayer, tol: f64, hmax: f64) -> Result<RayleighProfile> {
    solve_phi1_domain(alpha, layer, tol, hmax, 0.0, PI)
}

/// As [`solve_phi1_on`] on a slightly enlarged interval `[lo, hi] ⊃ [0, π]`.
pub fn solve_phi1_domain(
    alpha: f64,
    layer: CriticalLayer,
    tol: f64,
    hmax: f64,
    lo: f64,
    hi: f64,
) -> Result<RayleighProfile> {
    if (lo < 0.0 && lo <= -layer.yc) || (hi > PI && hi >= 2.0 * PI - layer.yc) {
        return Err(Error::OutOfRange(format!("domain [{lo}, {hi}] reaches a reflected critical point")));
    }
    if tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::OutOfRange(format!("tol = {tol} must be positive")));
    }
    if alpha.abs() < 1.0 {
        return Err(Error::SpectralCondition { alpha: alpha.abs(), bound: 1.0 });
    }
    let a2 = alpha * alpha;
    let (breaks, kc) = layer_breaks_on(layer.yc, hmax, lo, hi);
    let panels = Panels::new(breaks);
    let n = panels.len();
    let w2: Vec<f64> = panels.nodes.iter().map(|&y| u_minus_c(y, layer.yc).powi(2)).collect();
    let mut term = vec![1.0; n];
    let mut psi1 = vec![0.0; n];
    let mut dphi1 = vec![0.0; n];
    let mut terms = 0;
    let mut last;
    loop {
        let (t, t22) = apply_t_w2(&panels, kc, &w2, &term);
        for i in 0..n {
            dphi1[i] += a2 * t22[i];
            term[i] = a2 * t[i];
            psi1[i] += term[i];
        }
        terms += 1;
        last = sup(&term);
        if last < tol * (1.0 + sup(&psi1)) {
            break;
        }
        if terms >= MAX_TERMS || !last.is_finite() {
            return Err(Error::Divergence { terms, last });
        }
    }
    let (_, t22) = apply_t_w2(&panels, kc, &w2, &term);
    for i in 0..n {
        dphi1[i] += a2 * t22[i];
    }
    let phi1: Vec<f64> = psi1.iter().map(|p| 1.0 + p).collect();
    let f = dphi1.iter().zip(&phi1).map(|(d, p)| d / p).collect();
    let residual = last / sup(&phi1);
    Ok(RayleighProfile { alpha, layer, panels, kc, phi1, psi1, dphi1, f, g: None, series_terms: terms, residual })
}

impl RayleighProfile {
    pub fn phi1_at(&self, y: f64) -> f64 {
        1.0 + self.panels.eval(&self.psi1, y)
    }

    pub fn psi1_at(&self, y: f64) -> f64 {
        self.panels.eval(&self.psi1, y)
    }

    pub fn dphi1_at(&self, y: f64) -> f64 {
        self.panels.eval(&self.dphi1, y)
    }

    /// `φ₁(0), φ₁'(0), φ₁(π), φ₁'(π)`.
    pub fn endpoint_values(&self) -> [f64; 4] {
        [self.phi1_at(0.0), self.dphi1_at(0.0), self.phi1_at(PI), self.dphi1_at(PI)]
    }

    /// `sup |φ₁ − 1 − α²Tφ₁|` relative to `sup φ₁`.
    pub fn fixed_point_residual(&self) -> f64 {
        let (t, _) = apply_t(&self.panels, self.kc, self.layer.yc, &self.phi1);
        let a2 = self.alpha * self.alpha;
        let r = (0..self.phi1.len()).map(|i| (self.psi1[i] - a2 * t[i]).abs()).fold(0.0, f64::max);
        r / sup(&self.phi1)
    }

    /// `𝒢₁ = ℱ/u'(y_c) + 𝒢` (requires [`log_derivatives`] to have filled `g`).
    pub fn g1(&self) -> Option<Vec<f64>> {
        let g = self.g.as_ref()?;
        Some(self.f.iter().zip(g).map(|(f, g)| f / self.layer.s + g).collect())
    }

    /// CSV with columns `y, phi1, dphi1, F, G` (G empty when not computed).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["y", "phi1", "dphi1", "F", "G"])?;
        for i in 0..self.phi1.len() {
            let g = self.g.as_ref().map(|g| g[i].to_string()).unwrap_or_default();
            w.write_record([
                self.panels.nodes[i].to_string(),
                self.phi1[i].to_string(),
                self.dphi1[i].to_string(),
                self.f[i].to_string(),
                g,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Finite-difference step in `c` for the c-derivatives of `φ₁`.
pub fn c_step(layer: &CriticalLayer) -> f64 {
    (1e-3 * layer.s).max(1e-4)
}

/// `(ℱ, 𝒢)` on the profile nodes; `𝒢` by finite differences in `c` (one-sided near `c = ±1`).
pub fn log_derivatives(profile: &RayleighProfile, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = profile.layer.c;
    let h = c_step(&profile.layer);
    let at = |cc: f64| -> Result<Vec<f64>> {
        let p = solve_phi1(profile.alpha, cc, tol)?;
        Ok(profile.panels.nodes.iter().map(|&y| p.phi1_at(y)).collect())
    };
    let d: Vec<f64> = if c + h <= 1.0 && c - h >= -1.0 {
        let (p, m) = (at(c + h)?, at(c - h)?);
        p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    } else {
        let sg = if c + h > 1.0 { -1.0 } else { 1.0 };
        let (p1, p2) = (at(c + sg * h)?, at(c + 2.0 * sg * h)?);
        (0..p1.len())
            .map(|i| sg * (-3.0 * profile.phi1[i] + 4.0 * p1[i] - p2[i]) / (2.0 * h))
            .collect()
    };
    let g = d.iter().zip(&profile.phi1).map(|(d, p)| d / p).collect();
    Ok((profile.f.clone(), g))
}

/// Fills the `g` field of a profile.
pub fn with_log_derivatives(mut profile: RayleighProfile, tol: f64) -> Result<RayleighProfile> {
    let (_, g) = log_derivatives(&profile, tol)?;
    profile.g = Some(g);
    Ok(profile)
}

/// Which endpoint a rescaled profile zooms into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// `φ̃₁(y) = φ₁(y·y_c)` (left) or `φ̃̃₁(y) = φ₁((1−y)π + y·y_c)` (right) for `y ∈ [0,1]`.
#[derive(Debug, Clone, Serialize)]
pub struct RescaledProfile {
    pub side: Side,
    pub y: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn rescaled_phi1(alpha: f64, c: f64, side: Side, npts: usize) -> Result<RescaledProfile> {
    let layer = critical_layer(c)?;
    let near = match side {
        Side::Left => layer.yc,
        Side::Right => PI - layer.yc,
    };
    if near > 1.0 / alpha.abs() {
        return Err(Error::OutOfRange(format!(
            "y_c = {} is not within 1/alpha of the {:?} endpoint",
            layer.yc, side
        )));
    }
    let prof = solve_phi1(alpha, c, 1e-14)?;
    let y: Vec<f64> = (0..npts).map(|i| i as f64 / (npts - 1).max(1) as f64).collect();
    let values = y
        .iter()
        .map(|&t| {
            let yy = match side {
                Side::Left => t * layer.yc,
                Side::Right => (1.0 - t) * PI + t * layer.yc,
            };
            prof.phi1_at(yy)
        })
        .collect();
    Ok(RescaledProfile { side, y, values })
}
