//! The wave operator `𝔻`, which conjugates `cos y (1 + (∂_y²−α²)^{−1})` to
//! multiplication by `cos y_c`.

use crate::error::Result;
use crate::fourier::TrigPoly;
use crate::spectral_kernels::{check_alpha, lambda1, lambda3, CGrid, LayerData, PreparedFn, DEFAULT_PV_STEP};
use crate::torus_field::ModeProfile;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::Path;

/// `𝔻(ω)` on the periodic grid `y_c = −π + kπ/M`, `k = 0..2M`.
#[derive(Debug, Clone)]
pub struct WaveImage {
    pub alpha: f64,
    pub yc: Vec<f64>,
    pub odd: Vec<Complex64>,
    pub even: Vec<Complex64>,
}

impl WaveImage {
    pub fn values(&self) -> Vec<Complex64> {
        self.odd.iter().zip(&self.even).map(|(a, b)| a + b).collect()
    }

    fn step(&self) -> f64 {
        2.0 * PI / self.yc.len() as f64
    }

    /// `∫_{−π}^{π} |𝔻(ω)|² dy_c`.
    pub fn norm_sq(&self) -> f64 {
        self.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * self.step()
    }

    /// `∫ |w(y_c) 𝔻(ω)|²` for a real weight.
    pub fn weighted_norm_sq(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.values().iter().zip(&self.yc).map(|(v, y)| (v * w(*y)).norm_sqr()).sum::<f64>() * self.step()
    }

    /// Fourth-order periodic second difference in `y_c`.
    pub fn d2(&self) -> Vec<Complex64> {
        let v = self.values();
        let n = v.len();
        let h2 = self.step().powi(2);
        (0..n)
            .map(|k| {
                let at = |o: isize| v[(k as isize + o).rem_euclid(n as isize) as usize];
                (-(at(2) + at(-2)) + (at(1) + at(-1)) * 16.0 - at(0) * 30.0) / (12.0 * h2)
            })
            .collect()
    }

    /// CSV with columns `y_c, re, im, odd_re, odd_im, even_re, even_im`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["y_c", "re", "im", "odd_re", "odd_im", "even_re", "even_im"])?;
        for k in 0..self.yc.len() {
            let (o, e) = (self.odd[k], self.even[k]);
            w.serialize((self.yc[k], o.re + e.re, o.im + e.im, o.re, o.im, e.re, e.im))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `𝔻` for one `α` on a c-grid, with the per-layer data cached.
pub struct WaveOperator {
    pub alpha: f64,
    pub grid: CGrid,
    lds: Vec<LayerData>,
}

impl WaveOperator {
    pub fn new(alpha: f64, grid: CGrid) -> Result<Self> {
        check_alpha(alpha)?;
        let lds = grid.layer_data(alpha)?;
        Ok(Self { alpha, grid, lds })
    }

    /// Default 512-interval grid.
    pub fn with_default_grid(alpha: f64) -> Result<Self> {
        Self::new(alpha, CGrid::new(512)?)
    }

    pub fn apply(&self, omega: &TrigPoly) -> WaveImage {
        let m = self.grid.m;
        let h = DEFAULT_PV_STEP.min(self.grid.step());
        let fo = PreparedFn::new(omega.odd_part());
        let fe = PreparedFn::new(omega.even_part());
        let half: Vec<(Complex64, Complex64)> = self
            .lds
            .iter()
            .map(|ld| {
                let k = &ld.ks;
                (lambda1(ld, &fo, h) / k.ab_sq().sqrt(), lambda3(ld, &fe, h) / k.a1b1_sq().sqrt())
            })
            .collect();
        let n = 2 * m;
        let yc: Vec<f64> = (0..n).map(|k| -PI + PI * k as f64 / m as f64).collect();
        let mut odd = vec![Complex64::new(0.0, 0.0); n];
        let mut even = vec![Complex64::new(0.0, 0.0); n];
        for (k, o) in odd.iter_mut().enumerate() {
            let (j, sign) = if k >= m { (k - m, 1.0) } else { (m - k, -1.0) };
            *o = half[j].0 * sign;
            even[k] = half[j].1;
        }
        WaveImage { alpha: self.alpha, yc, odd, even }
    }

    pub fn apply_profile(&self, omega: &ModeProfile) -> WaveImage {
        self.apply(&omega.to_trig())
    }

    /// `(‖𝔻(ω)‖², ⟨ω, ω + (∂_y²−α²)^{−1}ω⟩)`.
    pub fn norm_identity(&self, omega: &TrigPoly) -> (f64, f64) {
        let d = self.apply(omega).norm_sq();
        (d, quadratic_form(self.alpha, omega))
    }

    /// `‖𝔻(cos y(1+(∂_y²−α²)^{−1})ω) − cos y_c 𝔻(ω)‖ / ‖𝔻(ω)‖`.
    pub fn intertwining_residual(&self, omega: &TrigPoly) -> f64 {
        let a2 = self.alpha * self.alpha;
        let inner = omega.map_coef(|k, v| v * (1.0 - 1.0 / ((k * k) as f64 + a2)));
        let lhs = self.apply(&inner.mul_cos()).values();
        let d = self.apply(omega);
        let rhs = d.values();
        let num: f64 = lhs.iter().zip(&rhs).zip(&d.yc).map(|((l, r), y)| (l - r * y.cos()).norm_sqr()).sum();
        let den: f64 = rhs.iter().map(|v| v.norm_sqr()).sum();
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// `‖sin y_c(𝔻(∂_y²ω) − ∂_{y_c}²𝔻(ω))‖ / (|α|‖ω‖ + ‖∂_yω‖)`.
    pub fn commutator_ratio(&self, omega: &TrigPoly) -> f64 {
        let den = self.alpha.abs() * omega.norm_sq().sqrt() + omega.deriv().norm_sq().sqrt();
        if den == 0.0 {
            return 0.0;
        }
        let a = self.apply(&omega.deriv().deriv());
        let b = self.apply(omega);
        let d2 = b.d2();
        let h = b.step();
        let num: f64 = a.values().iter().zip(&d2).zip(&b.yc).map(|((x, y), t)| ((x - y) * t.sin()).norm_sqr()).sum::<f64>() * h;
        num.sqrt() / den
    }

    /// `(‖sin y_c 𝔻(ω)‖², ‖∂_yψ‖² + (α²−1)‖ψ‖²)`.
    pub fn velocity_bound(&self, omega: &TrigPoly) -> (f64, f64) {
        let d = self.apply(omega).weighted_norm_sq(|y| y.sin());
        let a2 = self.alpha * self.alpha;
        let psi = omega.map_coef(|k, v| v / ((k * k) as f64 + a2));
        (d, psi.deriv().norm_sq() + (a2 - 1.0) * psi.norm_sq())
    }
}

/// `⟨ω, ω + (∂_y²−α²)^{−1}ω⟩ = ⟨ω, ω − ψ⟩` over `[−π, π]`.
pub fn quadratic_form(alpha: f64, omega: &TrigPoly) -> f64 {
    let a2 = alpha * alpha;
    omega.ks().map(|k| omega.get(k).norm_sqr() * (1.0 - 1.0 / ((k * k) as f64 + a2))).sum::<f64>() * 2.0 * PI
}

/// `𝔻(ω)` on the default grid.
pub fn apply_d(omega: &ModeProfile) -> Result<WaveImage> {
    Ok(WaveOperator::with_default_grid(omega.alpha)?.apply_profile(omega))
}

pub fn check_intertwining(omega: &ModeProfile) -> Result<f64> {
    Ok(WaveOperator::with_default_grid(omega.alpha)?.intertwining_residual(&omega.to_trig()))
}

pub fn commutator_ratio(omega: &ModeProfile) -> Result<f64> {
    Ok(WaveOperator::with_default_grid(omega.alpha)?.commutator_ratio(&omega.to_trig()))
}
