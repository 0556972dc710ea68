//! Linearized Euler evolution per x-mode: the oscillatory-integral representation,
//! a direct time-stepping cross-check, and decay-rate measurements.

use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::fourier::TrigPoly;
use crate::spectral_kernels::density::build_representation_density_with;
use crate::spectral_kernels::dual::assemble_dual_kernel_with;
use crate::spectral_kernels::{check_alpha, CGrid, DualKernel, KernelKind, RepresentationDensity};
use crate::torus_field::ModeProfile;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// `ψ̂(t, α, ·)` from a representation density.
pub fn evolve_stream_mode(density: &RepresentationDensity, t: f64) -> Result<ModeProfile> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange(format!("t = {t} must be >= 0")));
    }
    density.evolve_stream_mode(t)
}

/// Fourier–Galerkin RK4 integrator of `∂_tω̂ = iα cos y (ω̂ − ψ̂)`, `−(∂_y²−α²)ψ̂ = ω̂`.
#[derive(Debug, Clone)]
pub struct DirectStepper {
    pub alpha: f64,
    pub kmax: usize,
    pub dt: f64,
    /// Drops the `u''ψ̂` term, leaving pure transport.
    pub transport_only: bool,
}

/// Snapshots of a direct-stepper run as y-Fourier series.
#[derive(Debug, Clone)]
pub struct LinEulerTrajectory {
    pub alpha: f64,
    pub times: Vec<f64>,
    pub omega: Vec<TrigPoly>,
}

impl DirectStepper {
    /// Truncation wide enough for the `e^{iαt cos y}` filamentation up to `t_end`.
    pub fn new(alpha: f64, t_end: f64, dt: f64) -> Result<Self> {
        if alpha == 0.0 {
            return Err(Error::OutOfRange("alpha must be nonzero".into()));
        }
        if !(dt > 0.0) || dt > 0.5 / alpha.abs() {
            return Err(Error::Stability(format!("dt = {dt} exceeds 0.5/|alpha| = {}", 0.5 / alpha.abs())));
        }
        let w = alpha.abs() * t_end.max(0.0);
        let kmax = (1.2 * w + 8.0 * w.cbrt() + 48.0).ceil() as usize;
        Ok(Self { alpha, kmax, dt, transport_only: false })
    }

    fn rhs(&self, w: &[Complex64], out: &mut [Complex64], v: &mut [Complex64]) {
        let km = self.kmax as i64;
        let a2 = self.alpha * self.alpha;
        for (i, k) in (-km..=km).enumerate() {
            v[i] = if self.transport_only { w[i] } else { w[i] * (1.0 - 1.0 / ((k * k) as f64 + a2)) };
        }
        let f = Complex64::new(0.0, 0.5 * self.alpha);
        let n = w.len();
        for i in 0..n {
            let lo = if i > 0 { v[i - 1] } else { Complex64::new(0.0, 0.0) };
            let hi = if i + 1 < n { v[i + 1] } else { Complex64::new(0.0, 0.0) };
            out[i] = f * (lo + hi);
        }
    }

    fn rk4(&self, w: &mut [Complex64], h: f64, s: &mut [Vec<Complex64>; 6]) {
        let n = w.len();
        let [k1, k2, k3, k4, tmp, v] = s;
        self.rhs(w, k1, v);
        for i in 0..n {
            tmp[i] = w[i] + k1[i] * (0.5 * h);
        }
        self.rhs(tmp, k2, v);
        for i in 0..n {
            tmp[i] = w[i] + k2[i] * (0.5 * h);
        }
        self.rhs(tmp, k3, v);
        for i in 0..n {
            tmp[i] = w[i] + k3[i] * h;
        }
        self.rhs(tmp, k4, v);
        for i in 0..n {
            w[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }

    /// Integrates from `t = 0` and records `ω̂` at each of the increasing `times`.
    pub fn run(&self, omega0: &TrigPoly, times: &[f64]) -> Result<LinEulerTrajectory> {
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
            return Err(Error::OutOfRange("sample times must be nonnegative and increasing".into()));
        }
        if omega0.kmax > self.kmax {
            return Err(Error::Resolution(format!("initial data degree {} exceeds truncation {}", omega0.kmax, self.kmax)));
        }
        let km = self.kmax as i64;
        let mut w: Vec<Complex64> = (-km..=km).map(|k| omega0.get(k)).collect();
        let n = w.len();
        let mut scratch: [Vec<Complex64>; 6] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]);
        let mut t = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &ts in times {
            let span = ts - t;
            if span > 0.0 {
                let steps = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
                let h = span / steps as f64;
                for _ in 0..steps {
                    self.rk4(&mut w, h, &mut scratch);
                }
            }
            t = ts;
            if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Stability(format!("non-finite state at t = {t}")));
            }
            out.push(TrigPoly { kmax: self.kmax, coef: w.clone() });
        }
        Ok(LinEulerTrajectory { alpha: self.alpha, times: times.to_vec(), omega: out })
    }
}

/// Runs the direct stepper on `ω̂₀` up to the last of `times`.
pub fn direct_stepper_lin_euler(omega0: &ModeProfile, times: &[f64], dt: f64) -> Result<LinEulerTrajectory> {
    let t_end = times.last().copied().unwrap_or(0.0);
    DirectStepper::new(omega0.alpha, t_end, dt)?.run(&omega0.to_trig(), times)
}

impl LinEulerTrajectory {
    pub fn psi(&self, i: usize) -> TrigPoly {
        let a2 = self.alpha * self.alpha;
        self.omega[i].map_coef(|k, v| v / ((k * k) as f64 + a2))
    }

    /// `ω̂(t_i)` evaluated pointwise on an `ny`-point grid.
    pub fn omega_profile(&self, i: usize, ny: usize) -> ModeProfile {
        let ys = crate::fourier::periodic_grid(ny);
        ModeProfile::new(self.alpha, self.omega[i].eval_many(&ys))
    }

    pub fn psi_profile(&self, i: usize, ny: usize) -> ModeProfile {
        let ys = crate::fourier::periodic_grid(ny);
        ModeProfile::new(self.alpha, self.psi(i).eval_many(&ys))
    }
}

/// Quantities whose decay is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayQuantity {
    /// `‖V̂(t)‖`.
    V,
    /// `‖V̂¹(t)‖ = ‖∂_yψ̂‖`.
    V1,
    /// `‖V̂²(t)‖ = |α|‖ψ̂‖`.
    V2,
    /// `|ω̂(t, α, 0)|`.
    OmegaCritical,
    /// `|∂_yψ̂(t, α, 0)|`.
    V1Critical,
    /// `|α ψ̂(t, α, 0)|`.
    V2Critical,
}

impl DecayQuantity {
    pub fn name(self) -> &'static str {
        match self {
            Self::V => "V",
            Self::V1 => "V1",
            Self::V2 => "V2",
            Self::OmegaCritical => "omega-critical",
            Self::V1Critical => "V1-critical",
            Self::V2Critical => "V2-critical",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "V" => Self::V,
            "V1" => Self::V1,
            "V2" => Self::V2,
            "omega-critical" => Self::OmegaCritical,
            "V1-critical" => Self::V1Critical,
            "V2-critical" => Self::V2Critical,
            _ => return Err(Error::Config(format!("unknown quantity {s}"))),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub quantity: DecayQuantity,
    pub window: (f64, f64),
    pub slope: f64,
    pub residual: f64,
    pub samples: usize,
}

/// Representation-route solution on a set of times.
#[derive(Debug, Clone)]
pub struct InviscidSolution {
    pub alpha: f64,
    pub density: RepresentationDensity,
    pub times: Vec<f64>,
    pub psi: Vec<ModeProfile>,
    pub omega: Vec<ModeProfile>,
    pub v1_norm: Vec<f64>,
    pub v2_norm: Vec<f64>,
    /// `ω̂(t,0)`, `∂_yψ̂(t,0)`, `ψ̂(t,0)` from the critical-point kernels.
    pub omega_at_0: Vec<Complex64>,
    pub dpsi_at_0: Vec<Complex64>,
    pub psi_at_0: Vec<Complex64>,
}

/// Grid sizes used by [`solve_inviscid`] for a horizon `α t_max`.
pub fn resolution_for(omega0: &ModeProfile, t_max: f64) -> Result<(CGrid, usize)> {
    let w = omega0.alpha.abs() * t_max;
    let grid = CGrid::for_horizon(w)?;
    let need = (2.0 * w + 96.0).ceil() as usize;
    let ny = need.max(omega0.ny()).next_power_of_two();
    Ok((grid, ny))
}

/// Evaluates the representation and the critical-point kernels at `times`.
pub fn solve_inviscid(omega0: &ModeProfile, times: &[f64]) -> Result<InviscidSolution> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let (grid, ny) = resolution_for(omega0, t_max)?;
    solve_inviscid_on(omega0, times, &grid, ny)
}

pub fn solve_inviscid_on(omega0: &ModeProfile, times: &[f64], grid: &CGrid, ny: usize) -> Result<InviscidSolution> {
    let alpha = omega0.alpha;
    check_alpha(alpha)?;
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::OutOfRange("times must be >= 0".into()));
    }
    let data = ModeProfile::from_trig(alpha, &omega0.to_trig(), ny);
    let lds = grid.layer_data(alpha)?;
    let density = build_representation_density_with(&data, grid, &lds)?;
    let kern = |kind| assemble_dual_kernel_with(kind, &data, None, grid, &lds);
    let (k_om, k_dpsi, k_psi): (DualKernel, DualKernel, DualKernel) =
        (kern(KernelKind::VorticityCritical)?, kern(KernelKind::OddCritical)?, kern(KernelKind::EvenCritical)?);
    let a2 = alpha * alpha;
    let mut sol = InviscidSolution {
        alpha,
        density,
        times: times.to_vec(),
        psi: Vec::new(),
        omega: Vec::new(),
        v1_norm: Vec::new(),
        v2_norm: Vec::new(),
        omega_at_0: Vec::new(),
        dpsi_at_0: Vec::new(),
        psi_at_0: Vec::new(),
    };
    for &t in times {
        let psi = sol.density.evolve_stream_mode(t)?;
        let p = psi.to_trig();
        let dpsi = ModeProfile::from_trig(alpha, &p.deriv(), ny);
        let omega = ModeProfile::from_trig(alpha, &p.map_coef(|k, v| v * ((k * k) as f64 + a2)), ny);
        sol.v1_norm.push(dpsi.norm());
        sol.v2_norm.push(alpha.abs() * psi.norm());
        sol.psi.push(psi);
        sol.omega.push(omega);
        sol.omega_at_0.push(k_om.integrate_oscillatory(t)?);
        sol.dpsi_at_0.push(k_dpsi.integrate_oscillatory(t)?);
        sol.psi_at_0.push(k_psi.integrate_oscillatory(t)?);
    }
    Ok(sol)
}

impl InviscidSolution {
    pub fn series(&self, q: DecayQuantity) -> Vec<f64> {
        let a = self.alpha.abs();
        match q {
            DecayQuantity::V => self.v1_norm.iter().zip(&self.v2_norm).map(|(a, b)| a.hypot(*b)).collect(),
            DecayQuantity::V1 => self.v1_norm.clone(),
            DecayQuantity::V2 => self.v2_norm.clone(),
            DecayQuantity::OmegaCritical => self.omega_at_0.iter().map(|v| v.norm()).collect(),
            DecayQuantity::V1Critical => self.dpsi_at_0.iter().map(|v| v.norm()).collect(),
            DecayQuantity::V2Critical => self.psi_at_0.iter().map(|v| a * v.norm()).collect(),
        }
    }

    /// CSV with columns `t, V, V1, V2, omega0, V1_0, V2_0`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "V", "V1", "V2", "omega_crit", "V1_crit", "V2_crit"])?;
        let cols: Vec<Vec<f64>> = [
            DecayQuantity::V,
            DecayQuantity::V1,
            DecayQuantity::V2,
            DecayQuantity::OmegaCritical,
            DecayQuantity::V1Critical,
            DecayQuantity::V2Critical,
        ]
        .iter()
        .map(|q| self.series(*q))
        .collect();
        for (i, t) in self.times.iter().enumerate() {
            w.serialize((t, cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i], cols[5][i]))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Log-log slope of `quantity` over the samples in `window`.
pub fn measure_decay(sol: &InviscidSolution, quantity: DecayQuantity, window: (f64, f64)) -> Result<DecayFit> {
    let (a, b) = window;
    if !(a > 0.0 && b >= 10.0 * a) {
        return Err(Error::Fit(format!("window [{a}, {b}] must span at least one decade")));
    }
    if a < 2.0 * PI / sol.alpha.abs() {
        return Err(Error::Fit(format!("window start {a} is below 2*pi/alpha")));
    }
    let q = sol.series(quantity);
    let (ts, vs): (Vec<f64>, Vec<f64>) =
        sol.times.iter().zip(&q).filter(|(t, _)| **t >= a * (1.0 - 1e-12) && **t <= b * (1.0 + 1e-12)).map(|(t, v)| (*t, *v)).unzip();
    let f = loglog_fit(&ts, &vs)?;
    Ok(DecayFit { quantity, window, slope: f.slope, residual: f.residual, samples: f.n })
}

/// Estimate of the scattering limit `ω_∞ = lim e^{iαtu(y)} ω̂(t,α,y)`.
#[derive(Debug, Clone)]
pub struct ScatteringEstimate {
    pub profile: ModeProfile,
    /// `‖f(t_{i+1}) − f(t_i)‖` for consecutive sample times.
    pub residuals: Vec<f64>,
}

impl ScatteringEstimate {
    pub fn residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Applies the inverse shear flow to each `ω̂(t_i)` and returns the last iterate.
pub fn scattering_from(times: &[f64], omega: &[ModeProfile]) -> Result<ScatteringEstimate> {
    if times.is_empty() || times.len() != omega.len() {
        return Err(Error::Malformed("times and profiles must be nonempty and of equal length".into()));
    }
    let pulled: Vec<ModeProfile> = times
        .iter()
        .zip(omega)
        .map(|(t, w)| {
            let ys = w.ys();
            let values = w.values.iter().zip(&ys).map(|(v, y)| v * Complex64::from_polar(1.0, -w.alpha * t * y.cos())).collect();
            ModeProfile::new(w.alpha, values)
        })
        .collect();
    let residuals = pulled.windows(2).map(|p| p[1].sub(&p[0]).norm()).collect();
    Ok(ScatteringEstimate { profile: pulled.last().unwrap().clone(), residuals })
}

pub fn scattering_profile(sol: &InviscidSolution) -> Result<ScatteringEstimate> {
    scattering_from(&sol.times, &sol.omega)
}

#[cfg(test)]
mod tests;
