//! Representation of `ψ̂(t)` as an oscillatory integral over the wave speed.

use super::{check_alpha, lambda1, lambda3, CGrid, LayerData, PreparedFn, DEFAULT_PV_STEP};
use crate::error::Result;
use crate::rayleigh::u_minus_c;
use crate::torus_field::ModeProfile;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Densities `αΦ̃_o/(2π)` and `αΦ̃_e/(2π)` on the periodic y-grid for every c-node,
/// so that `ψ̂(t,y) = ∫ e^{−iαct}(odd + even)(y,c) dc`.
#[derive(Debug, Clone)]
pub struct RepresentationDensity {
    pub alpha: f64,
    pub grid: CGrid,
    pub y: Vec<f64>,
    /// `odd[j][i]` at `(y_i, c_j)`.
    pub odd: Vec<Vec<Complex64>>,
    pub even: Vec<Vec<Complex64>>,
    /// `ρμ₁ = π sin y_c Λ₁(ω̂_o)/(A²+B²)` per c.
    pub rho_mu1: Vec<Complex64>,
    /// `μ₂ = πρ²Λ₃(ω̂_e)/(sin y_c (A₁²+B₁²))` per c.
    pub mu2: Vec<Complex64>,
    /// `ν_j = −μ₂/(φφ')(jπ)` per c.
    pub nu0: Vec<Complex64>,
    pub nu1: Vec<Complex64>,
}

/// `h(y,c) = φ(y,c)∫_{jπ}^{y} φ(z,c)^{−2} dz` with `j = 1` for `y > y_c` and `j = 0` otherwise.
pub fn h_value(ld: &LayerData, rcum: &[f64], y: f64) -> f64 {
    let l = ld.layer();
    let w = u_minus_c(y, l.yc);
    let wl = if w == 0.0 {
        0.0
    } else {
        w * ((0.5 * (y - l.yc)).sin() / (0.5 * (y + l.yc)).sin()).abs().ln()
    };
    let tail = if y > l.yc { ld.ks.ii } else { 0.0 };
    let rr = ld.profile.panels.eval(rcum, y) - tail;
    let s = l.s;
    let phi1 = ld.profile.phi1_at(y);
    let cos_yc = -l.c;
    phi1 * (-cos_yc / (s * s * s) * wl - y.sin() / (s * s) + w * rr)
}

/// Builds the density for `ω̂₀` on a c-grid with the y-grid of `omega0`.
pub fn build_representation_density(omega0: &ModeProfile, grid: &CGrid) -> Result<RepresentationDensity> {
    check_alpha(omega0.alpha)?;
    let lds = grid.layer_data(omega0.alpha)?;
    build_representation_density_with(omega0, grid, &lds)
}

pub fn build_representation_density_with(omega0: &ModeProfile, grid: &CGrid, lds: &[LayerData]) -> Result<RepresentationDensity> {
    let alpha = omega0.alpha;
    check_alpha(alpha)?;
    let w = omega0.to_trig();
    let fo = PreparedFn::new(w.odd_part());
    let fe = PreparedFn::new(w.even_part());
    let ys = omega0.ys();
    let ny = ys.len();
    let h = DEFAULT_PV_STEP.min(grid.step());
    let zero = Complex64::new(0.0, 0.0);
    let mut out = RepresentationDensity {
        alpha,
        grid: grid.clone(),
        y: ys.clone(),
        odd: Vec::with_capacity(lds.len()),
        even: Vec::with_capacity(lds.len()),
        rho_mu1: Vec::new(),
        mu2: Vec::new(),
        nu0: Vec::new(),
        nu1: Vec::new(),
    };
    for ld in lds {
        let k = &ld.ks;
        let l = k.layer;
        let s = l.s;
        let l1 = lambda1(ld, &fo, h);
        let l3 = lambda3(ld, &fe, h);
        let ao = l1 * (s / k.ab_sq());
        let ae = l3 * (l.rho * l.rho / (s * k.a1b1_sq()));
        let [p0, d0, pp, dp] = ld.ends;
        let pp0 = (1.0 + l.c).powi(2) * p0 * d0;
        let pp1 = (1.0 - l.c).powi(2) * pp * dp;
        out.rho_mu1.push(ao * PI);
        out.mu2.push(ae * PI);
        out.nu0.push(-ae * PI / pp0);
        out.nu1.push(-ae * PI / pp1);
        let rcum = ld.cumulative_r();
        let mut odd = vec![zero; ny];
        let mut even = vec![zero; ny];
        for (i, &y) in ys.iter().enumerate() {
            let ya = y.abs();
            let hv = h_value(ld, &rcum, ya);
            let phi = u_minus_c(ya, l.yc) * ld.profile.phi1_at(ya);
            let pj = if ya > l.yc { pp1 } else { pp0 };
            let o = ao * hv;
            odd[i] = if y < 0.0 { -o } else { o };
            even[i] = ae * (hv - phi / pj);
        }
        out.odd.push(odd);
        out.even.push(even);
    }
    Ok(out)
}

impl RepresentationDensity {
    /// `ψ̂(t, α, ·)`.
    pub fn evolve_stream_mode(&self, t: f64) -> Result<ModeProfile> {
        let wts = self.grid.oscillatory_weights(self.alpha * t)?;
        let ny = self.y.len();
        let mut v = vec![Complex64::new(0.0, 0.0); ny];
        for (j, w) in wts.iter().enumerate() {
            if w.norm() == 0.0 {
                continue;
            }
            for i in 0..ny {
                v[i] += w * (self.odd[j][i] + self.even[j][i]);
            }
        }
        Ok(ModeProfile::new(self.alpha, v))
    }

    /// `Φ̃_o(·, c_j)` (odd in y).
    pub fn phi_tilde_odd(&self, j: usize) -> Vec<Complex64> {
        self.odd[j].iter().map(|v| v * (2.0 * PI / self.alpha)).collect()
    }

    /// `Φ̃_e(·, c_j)` (even in y).
    pub fn phi_tilde_even(&self, j: usize) -> Vec<Complex64> {
        self.even[j].iter().map(|v| v * (2.0 * PI / self.alpha)).collect()
    }
}
