//! Dual kernels `K_o`, `K_e` and the critical-point kernels `K_o⁰`, `K_e⁰`.

use super::{check_alpha, lambda1, lambda2, lambda3, lambda4, CGrid, LayerData, PreparedFn, DEFAULT_PV_STEP};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::torus_field::ModeProfile;
use num_complex::Complex64;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    /// `K_o`, paired with `∫_0^π ψ̂_o f`.
    Odd,
    /// `K_e`, paired with `∫_0^π ψ̂_e f`.
    Even,
    /// `K_o⁰`, giving `∂_yψ̂(t,0)`.
    OddCritical,
    /// `K_e⁰`, giving `ψ̂(t,0)`.
    EvenCritical,
    /// `K_e⁰/(1+c)`, giving `ω̂(t,0)`.
    VorticityCritical,
}

/// Kernel samples on a c-grid with finite-difference c-derivatives.
#[derive(Debug, Clone)]
pub struct DualKernel {
    pub kind: KernelKind,
    pub alpha: f64,
    pub grid: CGrid,
    pub values: Vec<Complex64>,
    /// `|∂_c K|`.
    pub d1: Vec<f64>,
    /// `|∂_c² K|`.
    pub d2: Vec<f64>,
}

fn bc_scale(p: &TrigPoly) -> f64 {
    p.coef.iter().map(|c| c.norm()).sum::<f64>().max(1e-300)
}

fn check_bc(kind: KernelKind, g: &TrigPoly) -> Result<()> {
    let tol = 1e-10 * bc_scale(g);
    match kind {
        KernelKind::Odd => {
            if g.eval(0.0).norm() > tol || g.eval(std::f64::consts::PI).norm() > tol {
                return Err(Error::Contract("odd kernel requires g(0) = g(pi) = 0".into()));
            }
        }
        KernelKind::Even => {
            let d = g.deriv();
            if d.eval(0.0).norm() > tol * 10.0 || d.eval(std::f64::consts::PI).norm() > tol * 10.0 {
                return Err(Error::Contract("even kernel requires g'(0) = g'(pi) = 0".into()));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Kernel value at one layer.
pub fn kernel_value(kind: KernelKind, ld: &LayerData, w: &PreparedFn, gc: Option<(&PreparedFn, Complex64)>, h: f64) -> Complex64 {
    let k = &ld.ks;
    let s = k.layer.s;
    match kind {
        KernelKind::Odd => {
            let (gc, gy) = gc.expect("g required");
            lambda1(ld, w, h) * lambda2(ld, gc, gy, h) / (k.ab_sq() * s)
        }
        KernelKind::Even => {
            let (gc, gy) = gc.expect("g required");
            lambda3(ld, w, h) * lambda4(ld, gc, gy, h) / (k.a1b1_sq() * s)
        }
        KernelKind::OddCritical => {
            let phi0 = -(1.0 + k.layer.c) * ld.ends[0];
            lambda1(ld, w, h) * s / (k.ab_sq() * phi0)
        }
        KernelKind::EvenCritical => -lambda3(ld, w, h) * k.j1k1 / k.a1b1_sq(),
        KernelKind::VorticityCritical => {
            let up = 1.0 - k.layer.c;
            lambda3(ld, w, h) * (up * up / (s * ld.ends[1] * k.a1b1_sq()))
        }
    }
}

/// Assembles a kernel on `grid`. `omega0` is split into its odd/even part according to
/// `kind`; `g` is required for [`KernelKind::Odd`] and [`KernelKind::Even`].
pub fn assemble_dual_kernel(kind: KernelKind, omega0: &ModeProfile, g: Option<&ModeProfile>, grid: &CGrid) -> Result<DualKernel> {
    check_alpha(omega0.alpha)?;
    let lds = grid.layer_data(omega0.alpha)?;
    assemble_dual_kernel_with(kind, omega0, g, grid, &lds)
}

/// As [`assemble_dual_kernel`] with precomputed per-layer data.
pub fn assemble_dual_kernel_with(
    kind: KernelKind,
    omega0: &ModeProfile,
    g: Option<&ModeProfile>,
    grid: &CGrid,
    lds: &[LayerData],
) -> Result<DualKernel> {
    let alpha = omega0.alpha;
    check_alpha(alpha)?;
    let w = omega0.to_trig();
    let part = match kind {
        KernelKind::Odd | KernelKind::OddCritical => w.odd_part(),
        _ => w.even_part(),
    };
    let wf = PreparedFn::new(part);
    let gprep = match kind {
        KernelKind::Odd | KernelKind::Even => {
            let g = g.ok_or_else(|| Error::Contract("kernel kind requires a test function g".into()))?.to_trig();
            check_bc(kind, &g)?;
            Some((PreparedFn::new(g.mul_cos()), g))
        }
        _ => None,
    };
    let h = DEFAULT_PV_STEP.min(grid.step());
    let values: Vec<Complex64> = lds
        .iter()
        .map(|ld| {
            let gc = gprep.as_ref().map(|(p, g)| (p, g.eval(ld.layer().yc)));
            kernel_value(kind, ld, &wf, gc, h)
        })
        .collect();
    let (d1, d2) = c_derivatives(&grid.c, &values);
    Ok(DualKernel { kind, alpha, grid: grid.clone(), values, d1, d2 })
}

/// Moduli of the first and second c-derivatives on a nonuniform grid.
fn c_derivatives(c: &[f64], v: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let n = v.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for j in 0..n {
        let (a, b, m) = if j == 0 {
            (0, 2, 1)
        } else if j == n - 1 {
            (n - 3, n - 1, n - 2)
        } else {
            (j - 1, j + 1, j)
        };
        let (h1, h2) = (c[m] - c[a], c[b] - c[m]);
        let s1 = (v[m] - v[a]) / h1;
        let s2 = (v[b] - v[m]) / h2;
        let second = (s2 - s1) * (2.0 / (h1 + h2));
        let first = if j == 0 {
            s1 - second * (0.5 * h1)
        } else if j == n - 1 {
            s2 + second * (0.5 * h2)
        } else {
            (s1 * h2 + s2 * h1) / (h1 + h2)
        };
        d1[j] = first.norm();
        d2[j] = second.norm();
    }
    (d1, d2)
}

impl DualKernel {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max(|K(−1)|, |K(1)|) / max |K|`.
    pub fn endpoint_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values[0].norm().max(self.values[self.values.len() - 1].norm()) / m
    }

    /// `∫_{−1}^{1} K(c) e^{−iαct} dc`.
    pub fn integrate_oscillatory(&self, t: f64) -> Result<Complex64> {
        let w = self.grid.oscillatory_weights(self.alpha * t)?;
        Ok(w.iter().zip(&self.values).map(|(w, v)| w * v).sum())
    }

    /// Discrete L¹ norms of `K`, `∂_cK`, `∂_c²K`.
    pub fn l1_norms(&self) -> [f64; 3] {
        let w = self.grid.weights();
        let f = |v: &[f64]| v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let k: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        [f(&k), f(&self.d1), f(&self.d2)]
    }

    /// CSV with columns `c, y_c, re, im, abs_dK, abs_d2K`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["c", "y_c", "re", "im", "abs_dK", "abs_d2K"])?;
        for j in 0..self.values.len() {
            w.serialize((self.grid.c[j], self.grid.yc[j], self.values[j].re, self.values[j].im, self.d1[j], self.d2[j]))?;
        }
        w.flush()?;
        Ok(())
    }
}
