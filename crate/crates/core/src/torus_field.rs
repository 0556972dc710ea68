//! Grids, Fourier modes, inverse Laplacian and projections on the torus
//! `T_{2πδ} × T_{2π}`.

use crate::error::{Error, Result};
use crate::fourier::{fft, ifft, periodic_grid, wavenumber, TrigPoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

/// Uniform periodic grid: `nx` points over `[0, 2πδ)`, `ny` points over `[−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub delta: f64,
    pub nx: usize,
    pub ny: usize,
}

impl TorusGrid {
    pub fn new(delta: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::OutOfRange(format!("delta = {delta} not in (0,1]")));
        }
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::OutOfRange(format!("{name} = {n} must be even and >= 8")));
            }
        }
        Ok(Self { delta, nx, ny })
    }

    pub fn lx(&self) -> f64 {
        2.0 * PI * self.delta
    }

    pub fn hx(&self) -> f64 {
        self.lx() / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        2.0 * PI / self.ny as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.hx() * i as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        -PI + self.hy() * j as f64
    }

    pub fn ys(&self) -> Vec<f64> {
        periodic_grid(self.ny)
    }

    /// x-wavenumber `m/δ` of FFT bin `i`.
    pub fn alpha_of_bin(&self, i: usize) -> f64 {
        wavenumber(i, self.nx) as f64 / self.delta
    }
}

/// Real samples on a [`TorusGrid`], row-major with x outer and y inner.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

impl ScalarField2D {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx * grid.ny {
            return Err(Error::Malformed(format!(
                "expected {} values, got {}",
                grid.nx * grid.ny,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.nx * grid.ny);
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, values: vec![0.0; grid.nx * grid.ny] }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ny + j]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `∫∫ f g` over the torus.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        s * self.grid.hx() * self.grid.hy()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, values }
    }

    /// CSV with columns `x, y, value`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "y", "value"])?;
        for i in 0..self.grid.nx {
            for j in 0..self.grid.ny {
                w.serialize((self.grid.x(i), self.grid.y(j), self.at(i, j)))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Little-endian binary: `nx`, `ny` as `u32`, then the `f64` samples.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&(self.grid.nx as u32).to_le_bytes())?;
        w.write_all(&(self.grid.ny as u32).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read, delta: f64) -> Result<Self> {
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let nx = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4)?;
        let ny = u32::from_le_bytes(b4) as usize;
        let grid = TorusGrid::new(delta, nx, ny)?;
        let mut values = Vec::with_capacity(nx * ny);
        let mut b8 = [0u8; 8];
        for _ in 0..nx * ny {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        Self::new(grid, values)
    }
}

/// One x-Fourier mode `ω̂(α, y)` sampled on the periodic y-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub alpha: f64,
    pub values: Vec<Complex64>,
}

impl ModeProfile {
    pub fn new(alpha: f64, values: Vec<Complex64>) -> Self {
        Self { alpha, values }
    }

    pub fn from_fn(alpha: f64, ny: usize, f: impl Fn(f64) -> Complex64) -> Self {
        Self { alpha, values: periodic_grid(ny).into_iter().map(f).collect() }
    }

    pub fn from_trig(alpha: f64, p: &TrigPoly, ny: usize) -> Self {
        Self { alpha, values: p.to_samples(ny) }
    }

    pub fn zeros(alpha: f64, ny: usize) -> Self {
        Self { alpha, values: vec![Complex64::new(0.0, 0.0); ny] }
    }

    pub fn ny(&self) -> usize {
        self.values.len()
    }

    pub fn ys(&self) -> Vec<f64> {
        periodic_grid(self.ny())
    }

    pub fn to_trig(&self) -> TrigPoly {
        TrigPoly::from_samples(&self.values)
    }

    /// `∫_{−π}^{π} |f|²` (exact for band-limited samples).
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * 2.0 * PI / self.ny() as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { alpha: self.alpha, values }
    }

    /// Relative L² distance `‖self − other‖ / ‖other‖`.
    pub fn rel_dist(&self, other: &Self) -> f64 {
        self.sub(other).norm() / other.norm()
    }

    /// Spectral y-derivative.
    pub fn dy(&self) -> Self {
        let p = self.to_trig();
        Self::from_trig(self.alpha, &p.deriv(), self.ny())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Fourier decomposition in x; modes are returned in FFT bin order, mode 0 first.
pub fn decompose_modes(field: &ScalarField2D) -> Vec<ModeProfile> {
    let g = field.grid;
    let mut modes = vec![vec![Complex64::new(0.0, 0.0); g.ny]; g.nx];
    let mut buf = vec![Complex64::new(0.0, 0.0); g.nx];
    for j in 0..g.ny {
        for i in 0..g.nx {
            buf[i] = Complex64::new(field.at(i, j), 0.0);
        }
        fft(&mut buf);
        for i in 0..g.nx {
            modes[i][j] = buf[i] / g.nx as f64;
        }
    }
    modes
        .into_iter()
        .enumerate()
        .map(|(i, v)| ModeProfile::new(g.alpha_of_bin(i), v))
        .collect()
}

/// Inverse of [`decompose_modes`]; the imaginary part of the synthesis is dropped.
pub fn reconstruct_modes(grid: TorusGrid, modes: &[ModeProfile]) -> Result<ScalarField2D> {
    if modes.len() != grid.nx || modes.iter().any(|m| m.ny() != grid.ny) {
        return Err(Error::Malformed("mode set does not match grid".into()));
    }
    let mut values = vec![0.0; grid.nx * grid.ny];
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.nx];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            buf[i] = modes[i].values[j];
        }
        ifft(&mut buf);
        for i in 0..grid.nx {
            values[i * grid.ny + j] = buf[i].re;
        }
    }
    ScalarField2D::new(grid, values)
}

/// Solves `−(∂_y² − α²)ψ̂ = ω̂` by the diagonal symbol `k² + α²`.
pub fn inverse_laplacian_mode(omega: &ModeProfile) -> Result<ModeProfile> {
    let p = omega.to_trig();
    let a2 = omega.alpha * omega.alpha;
    if a2 == 0.0 {
        let scale = omega.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if p.get(0).norm() > 1e-14 * scale.max(1e-300) {
            return Err(Error::Singular("alpha = 0 with nonzero mean".into()));
        }
    }
    let q = p.map_coef(|k, c| {
        let s = (k * k) as f64 + a2;
        if s == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c / s
        }
    });
    Ok(ModeProfile::from_trig(omega.alpha, &q, omega.ny()))
}

/// Applies `−(∂_y² − α²)` spectrally.
pub fn forward_operator_mode(psi: &ModeProfile) -> ModeProfile {
    let a2 = psi.alpha * psi.alpha;
    let q = psi.to_trig().map_coef(|k, c| c * ((k * k) as f64 + a2));
    ModeProfile::from_trig(psi.alpha, &q, psi.ny())
}

fn map_modes(field: &ScalarField2D, f: impl Fn(usize, &mut ModeProfile)) -> ScalarField2D {
    let mut modes = decompose_modes(field);
    for (i, m) in modes.iter_mut().enumerate() {
        f(i, m);
    }
    reconstruct_modes(field.grid, &modes).expect("grid-consistent modes")
}

/// Projection onto x-independent (shear) fields.
pub fn project_shear(field: &ScalarField2D) -> ScalarField2D {
    map_modes(field, |i, m| {
        if i != 0 {
            m.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        }
    })
}

/// Projection onto fields with zero x-average.
pub fn project_nonshear(field: &ScalarField2D) -> ScalarField2D {
    map_modes(field, |i, m| {
        if i == 0 {
            m.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        }
    })
}

/// Projection onto `span{sin y, cos y}`.
pub fn project_p2(field: &ScalarField2D) -> ScalarField2D {
    map_modes(field, |i, m| {
        if i == 0 {
            let p = m.to_trig();
            let q = TrigPoly::from_terms(&[(1, p.get(1)), (-1, p.get(-1))]);
            *m = ModeProfile::from_trig(m.alpha, &q, m.ny());
        } else {
            m.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(seed: u64, grid: TorusGrid) -> ScalarField2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.nx * grid.ny).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ScalarField2D::new(grid, values).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TorusGrid::new(0.8, 16, 16).is_ok());
        assert!(TorusGrid::new(1.2, 16, 16).is_err());
        assert!(TorusGrid::new(0.8, 15, 16).is_err());
        assert!(TorusGrid::new(0.8, 16, 6).is_err());
    }

    #[test]
    fn shear_field_is_mode_zero() {
        let g = TorusGrid::new(0.8, 16, 32).unwrap();
        let f = ScalarField2D::from_fn(g, |_, y| y.sin());
        let modes = decompose_modes(&f);
        for (i, m) in modes.iter().enumerate() {
            for (j, v) in m.values.iter().enumerate() {
                let want = if i == 0 { g.y(j).sin() } else { 0.0 };
                assert!((v - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_harmonic_splits_in_half() {
        let g = TorusGrid::new(0.5, 16, 32).unwrap();
        let f = ScalarField2D::from_fn(g, |x, y| (x / g.delta).cos() * (2.0 * y).sin());
        let modes = decompose_modes(&f);
        for (i, m) in modes.iter().enumerate() {
            let amp = if i == 1 || i == g.nx - 1 { 0.5 } else { 0.0 };
            if amp > 0.0 {
                assert!((m.alpha.abs() - 2.0).abs() < 1e-14);
            }
            for (j, v) in m.values.iter().enumerate() {
                assert!((v - amp * (2.0 * g.y(j)).sin()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_laplacian_examples() {
        let w = ModeProfile::from_fn(2.0, 32, |y| Complex64::new(y.sin(), 0.0));
        let p = inverse_laplacian_mode(&w).unwrap();
        for (y, v) in w.ys().iter().zip(&p.values) {
            assert!((v - y.sin() / 5.0).norm() < 1e-15);
        }
        let w = ModeProfile::from_fn(1.0, 32, |y| Complex64::from_polar(1.0, y));
        let p = inverse_laplacian_mode(&w).unwrap();
        for (y, v) in w.ys().iter().zip(&p.values) {
            assert!((v - Complex64::from_polar(0.5, *y)).norm() < 1e-15);
        }
        let w = ModeProfile::from_fn(0.0, 32, |_| Complex64::new(1.0, 0.0));
        assert!(inverse_laplacian_mode(&w).is_err());
    }

    #[test]
    fn projections_on_harmonics() {
        let g = TorusGrid::new(0.8, 16, 32).unwrap();
        let s1 = ScalarField2D::from_fn(g, |_, y| y.sin());
        let s2 = ScalarField2D::from_fn(g, |_, y| (2.0 * y).sin());
        assert!(project_p2(&s1).sub(&s1).norm() < 1e-13);
        assert!(project_p2(&s2).norm() < 1e-13);
        let shear = ScalarField2D::from_fn(g, |_, y| (3.0 * y).cos() + y.sin());
        assert!(project_nonshear(&shear).norm() < 1e-13);
    }

    #[test]
    fn binary_round_trip() {
        let g = TorusGrid::new(0.8, 8, 8).unwrap();
        let f = random_field(3, g);
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 * 64);
        let h = ScalarField2D::read_binary(&buf[..], 0.8).unwrap();
        assert_eq!(f, h);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_and_parseval(seed in 0u64..1000) {
            let g = TorusGrid::new(0.8, 16, 24).unwrap();
            let f = random_field(seed, g);
            let modes = decompose_modes(&f);
            let r = reconstruct_modes(g, &modes).unwrap();
            prop_assert!(r.sub(&f).norm() <= 1e-12 * f.norm());
            let msum: f64 = modes.iter().map(|m| m.norm_sq()).sum::<f64>() * g.lx();
            prop_assert!((msum - f.norm().powi(2)).abs() <= 1e-10 * msum);
        }

        #[test]
        fn projections_idempotent_and_orthogonal(seed in 0u64..1000) {
            let g = TorusGrid::new(0.8, 16, 24).unwrap();
            let f = random_field(seed, g);
            let n = f.norm();
            let p2 = project_p2(&f);
            prop_assert!(project_p2(&p2).sub(&p2).norm() <= 1e-12 * n);
            let q = f.sub(&p2);
            prop_assert!((p2.norm().powi(2) + q.norm().powi(2) - n * n).abs() <= 1e-12 * n * n);
            let p0 = project_shear(&f);
            let pn = project_nonshear(&f);
            prop_assert!(project_shear(&p0).sub(&p0).norm() <= 1e-12 * n);
            prop_assert!(project_nonshear(&pn).sub(&pn).norm() <= 1e-12 * n);
            let sum = ScalarField2D::new(g, p0.values.iter().zip(&pn.values).map(|(a, b)| a + b).collect()).unwrap();
            prop_assert!(sum.sub(&f).norm() <= 1e-12 * n);
            prop_assert!(project_shear(&pn).norm() <= 1e-12 * n);
            prop_assert!(project_p2(&p0).sub(&p2).norm() <= 1e-12 * n);
            let h = random_field(seed + 7, g);
            prop_assert!((project_p2(&f).inner(&h) - f.inner(&project_p2(&h))).abs() <= 1e-12 * n * h.norm());
        }

        #[test]
        fn inverse_laplacian_round_trip(seed in 0u64..1000, k in 1i32..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let terms: Vec<(i64, Complex64)> = (-8..=8)
                .map(|j| (j, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect();
            let w = ModeProfile::from_trig(k as f64 / 0.8, &TrigPoly::from_terms(&terms), 32);
            let back = forward_operator_mode(&inverse_laplacian_mode(&w).unwrap());
            prop_assert!(back.rel_dist(&w) <= 1e-12);
        }
    }
}
