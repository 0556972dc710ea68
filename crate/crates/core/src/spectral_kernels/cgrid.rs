//! Wave-speed grid uniform in `y_c` and quadrature of `∫_{−1}^{1} F(c) e^{−iωc} dc`.

use super::{limit_layer, LayerData};
use crate::error::{Error, Result};
use crate::quad::GlRule;
use crate::rayleigh::CriticalLayer;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Oscillation parameter `ω = αt` beyond which Filon quadrature is used.
pub const FILON_THRESHOLD: f64 = 200.0;
/// Minimal samples per oscillation period for the trapezoid rule.
pub const SAMPLES_PER_PERIOD: f64 = 20.0;
/// Samples per period targeted by [`CGrid::for_horizon`].
pub const SIZING_SAMPLES_PER_PERIOD: f64 = 40.0;

/// Nodes `y_{c,j} = jπ/M`, `c_j = −cos y_{c,j}`, `j = 0..=M`.
#[derive(Debug, Clone)]
pub struct CGrid {
    pub m: usize,
    pub yc: Vec<f64>,
    pub c: Vec<f64>,
}

impl CGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 8 || m % 2 != 0 {
            return Err(Error::OutOfRange(format!("c-grid size {m} must be even and >= 8")));
        }
        let yc: Vec<f64> = (0..=m).map(|j| PI * j as f64 / m as f64).collect();
        let c = yc
            .iter()
            .enumerate()
            .map(|(j, y)| if j == 0 { -1.0 } else if j == m { 1.0 } else { -y.cos() })
            .collect();
        Ok(Self { m, yc, c })
    }

    /// Smallest power-of-two multiple of 512 resolving every `ω ≤ αt_max` that the
    /// trapezoid rule handles.
    pub fn for_horizon(omega_max: f64) -> Result<Self> {
        let w = omega_max.abs().min(FILON_THRESHOLD);
        let mut m = 512;
        while (PI / m as f64) * w > 2.0 * PI / SIZING_SAMPLES_PER_PERIOD {
            m *= 2;
        }
        Self::new(m)
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        PI / self.m as f64
    }

    /// Layer at node `j`; the endpoints use the one-sided limit points.
    pub fn layer(&self, j: usize) -> CriticalLayer {
        if j == 0 || j == self.m {
            limit_layer(self.c[j]).expect("endpoint in range")
        } else {
            CriticalLayer::from_yc(self.yc[j])
        }
    }

    pub fn layer_data(&self, alpha: f64) -> Result<Vec<LayerData>> {
        (0..self.len()).map(|j| LayerData::new(alpha, self.layer(j))).collect()
    }

    /// Trapezoid weights of `∫ F dc = ∫ F sin y_c dy_c`.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        self.yc.iter().map(|y| h * y.sin().max(0.0)).collect()
    }

    pub fn integrate(&self, f: &[Complex64]) -> Complex64 {
        f.iter().zip(self.weights()).map(|(v, w)| v * w).sum()
    }

    /// Weights `w_j` with `∫_{−1}^{1} F(c) e^{−iωc} dc ≈ Σ w_j F(c_j)`.
    pub fn oscillatory_weights(&self, omega: f64) -> Result<Vec<Complex64>> {
        if omega.abs() <= FILON_THRESHOLD {
            if self.step() * omega.abs() > 2.0 * PI / SAMPLES_PER_PERIOD {
                return Err(Error::Resolution(format!(
                    "c-grid of {} intervals cannot resolve alpha*t = {omega}",
                    self.m
                )));
            }
            Ok(self
                .weights()
                .iter()
                .zip(&self.c)
                .map(|(w, c)| Complex64::from_polar(*w, -omega * c))
                .collect())
        } else {
            Ok(self.filon_weights(omega))
        }
    }

    /// Composite Filon weights: exact integration of `e^{−iωc}` against the
    /// quadratic interpolant on each node triple.
    pub fn filon_weights(&self, omega: f64) -> Vec<Complex64> {
        let mut w = vec![Complex64::new(0.0, 0.0); self.len()];
        let rule = GlRule::default_rule();
        for p in 0..self.m / 2 {
            let j = 2 * p;
            let (c0, c1, c2) = (self.c[j], self.c[j + 1], self.c[j + 2]);
            let (x0, x2) = (c0 - c1, c2 - c1);
            let len = c2 - c0;
            let moments: [Complex64; 3] = if omega.abs() * len < 1.0 {
                let mut mm = [Complex64::new(0.0, 0.0); 3];
                for k in 0..rule.order() {
                    let x = x0 + 0.5 * len * (rule.x[k] + 1.0);
                    let e = Complex64::from_polar(0.5 * len * rule.w[k], -omega * x);
                    mm[0] += e;
                    mm[1] += e * x;
                    mm[2] += e * x * x;
                }
                mm
            } else {
                let iw = Complex64::new(0.0, omega);
                let ea = Complex64::from_polar(1.0, -omega * x0);
                let eb = Complex64::from_polar(1.0, -omega * x2);
                let i0 = (eb - ea) / (-iw);
                let i1 = (eb * x2 - ea * x0) / (-iw) + i0 / iw;
                let i2 = (eb * (x2 * x2) - ea * (x0 * x0)) / (-iw) + i1 * 2.0 / iw;
                [i0, i1, i2]
            };
            // Lagrange basis on (x0, 0, x2) as quadratics in x
            let basis = [
                [0.0, -x2 / (x0 * (x0 - x2)), 1.0 / (x0 * (x0 - x2))],
                [1.0, -(x0 + x2) / (x0 * x2), 1.0 / (x0 * x2)],
                [0.0, -x0 / (x2 * (x2 - x0)), 1.0 / (x2 * (x2 - x0))],
            ];
            let ph = Complex64::from_polar(1.0, -omega * c1);
            for (i, q) in basis.iter().enumerate() {
                w[j + i] += ph * (moments[0] * q[0] + moments[1] * q[1] + moments[2] * q[2]);
            }
        }
        w
    }
}
