//! Trigonometric polynomials in y, FFT helpers and the periodic Hilbert transform.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized forward DFT in place.
pub fn fft(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// Unnormalized inverse DFT in place.
pub fn ifft(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Uniform grid `−π + 2πj/n` on `[−π, π)`.
pub fn periodic_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
}

/// Signed wavenumber of FFT bin `j` for length `n`.
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// `Σ_{k=−K}^{K} c_k e^{iky}` stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub kmax: usize,
    pub coef: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zeros(kmax: usize) -> Self {
        Self { kmax, coef: vec![Complex64::new(0.0, 0.0); 2 * kmax + 1] }
    }

    /// Build from `(k, c_k)` pairs.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let kmax = terms.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let mut p = Self::zeros(kmax);
        for &(k, c) in terms {
            *p.get_mut(k) += c;
        }
        p
    }

    pub fn sin(k: i64) -> Self {
        let h = Complex64::new(0.0, 0.5);
        Self::from_terms(&[(k, -h), (-k, h)])
    }

    pub fn cos(k: i64) -> Self {
        let h = Complex64::new(0.5, 0.0);
        Self::from_terms(&[(k, h), (-k, h)])
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.kmax {
            Complex64::new(0.0, 0.0)
        } else {
            self.coef[(k + self.kmax as i64) as usize]
        }
    }

    pub fn get_mut(&mut self, k: i64) -> &mut Complex64 {
        let km = self.kmax as i64;
        &mut self.coef[(k + km) as usize]
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> {
        let km = self.kmax as i64;
        -km..=km
    }

    /// Coefficients from samples on [`periodic_grid`]; the Nyquist bin is split evenly.
    pub fn from_samples(vals: &[Complex64]) -> Self {
        let n = vals.len();
        let mut buf = vals.to_vec();
        fft(&mut buf);
        let kmax = n / 2;
        let mut p = Self::zeros(kmax);
        for (j, v) in buf.iter().enumerate() {
            let k = wavenumber(j, n);
            let sgn = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let c = v * (sgn / n as f64);
            if n % 2 == 0 && j == n / 2 {
                *p.get_mut(kmax as i64) += c * 0.5;
                *p.get_mut(-(kmax as i64)) += c * 0.5;
            } else {
                *p.get_mut(k) += c;
            }
        }
        p
    }

    /// Samples on the `n`-point periodic grid (`n >= 2 kmax`).
    pub fn to_samples(&self, n: usize) -> Vec<Complex64> {
        assert!(n >= 2 * self.kmax, "grid too coarse for polynomial degree");
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for k in self.ks() {
            let sgn = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[k.rem_euclid(n as i64) as usize] += self.get(k) * sgn;
        }
        ifft(&mut buf);
        buf
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, y);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coef.iter().rev() {
            acc = acc * z + c;
        }
        acc * Complex64::from_polar(1.0, -(self.kmax as f64) * y)
    }

    pub fn eval_many(&self, ys: &[f64]) -> Vec<Complex64> {
        ys.iter().map(|&y| self.eval(y)).collect()
    }

    pub fn map_coef(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let mut p = self.clone();
        for k in self.ks() {
            *p.get_mut(k) = f(k, self.get(k));
        }
        p
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coef(|_, c| c * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let km = self.kmax.max(other.kmax);
        let mut p = Self::zeros(km);
        for k in -(km as i64)..=km as i64 {
            *p.get_mut(k) = self.get(k) + other.get(k);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn deriv(&self) -> Self {
        self.map_coef(|k, c| c * Complex64::new(0.0, k as f64))
    }

    /// Multiplication by `cos y`.
    pub fn mul_cos(&self) -> Self {
        let km = self.kmax + 1;
        let mut p = Self::zeros(km);
        for k in self.ks() {
            let c = self.get(k) * 0.5;
            *p.get_mut(k + 1) += c;
            *p.get_mut(k - 1) += c;
        }
        p
    }

    /// Multiplication by `sin y`.
    pub fn mul_sin(&self) -> Self {
        let km = self.kmax + 1;
        let mut p = Self::zeros(km);
        let h = Complex64::new(0.0, -0.5);
        for k in self.ks() {
            let c = self.get(k) * h;
            *p.get_mut(k + 1) += c;
            *p.get_mut(k - 1) -= c;
        }
        p
    }

    /// Part even in y.
    pub fn even_part(&self) -> Self {
        self.map_coef(|k, _| (self.get(k) + self.get(-k)) * 0.5)
    }

    /// Part odd in y.
    pub fn odd_part(&self) -> Self {
        self.map_coef(|k, _| (self.get(k) - self.get(-k)) * 0.5)
    }

    /// `∫_{−π}^{π} |f|²`.
    pub fn norm_sq(&self) -> f64 {
        2.0 * PI * self.coef.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `∫_{−π}^{π} f ḡ`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for k in self.ks() {
            s += self.get(k) * other.get(k).conj();
        }
        s * (2.0 * PI)
    }

    /// `∫_0^y f` evaluated at `y`.
    pub fn integral_from0(&self, y: f64) -> Complex64 {
        let mut s = self.get(0) * y;
        for k in self.ks() {
            if k != 0 {
                let ik = Complex64::new(0.0, k as f64);
                s += self.get(k) * ((ik * y).exp() - 1.0) / ik;
            }
        }
        s
    }

    /// Trim trailing coefficients of modulus below `tol·max`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let m = self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut km = 0usize;
        for k in self.ks() {
            if self.get(k).norm() > tol * m {
                km = km.max(k.unsigned_abs() as usize);
            }
        }
        let mut p = Self::zeros(km);
        for k in p.ks().collect::<Vec<_>>() {
            *p.get_mut(k) = self.get(k);
        }
        p
    }
}

/// Random complex coefficients on `|k| ≤ deg` with `1/(1+k²)` decay.
pub fn random_trig_poly(rng: &mut impl rand::Rng, deg: i64) -> TrigPoly {
    let terms: Vec<(i64, Complex64)> =
        (-deg..=deg).map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + (k * k) as f64))).collect();
    TrigPoly::from_terms(&terms)
}

/// Periodic Hilbert transform `H f(y) = p.v.∫ cot((y−z)/2) f(z) dz` of samples on
/// [`periodic_grid`], i.e. the Fourier multiplier `−2πi·sign(k)`.
pub fn hilbert_transform(vals: &[Complex64]) -> Vec<Complex64> {
    let n = vals.len();
    let mut buf = vals.to_vec();
    fft(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        let k = wavenumber(j, n);
        let m = if n % 2 == 0 && j == n / 2 || k == 0 {
            0.0
        } else {
            k.signum() as f64
        };
        *v *= Complex64::new(0.0, -2.0 * PI * m) / n as f64;
    }
    ifft(&mut buf);
    buf
}

/// Real-valued convenience wrapper of [`hilbert_transform`].
pub fn hilbert_transform_real(vals: &[f64]) -> Vec<f64> {
    let c: Vec<Complex64> = vals.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    hilbert_transform(&c).into_iter().map(|v| v.re).collect()
}
