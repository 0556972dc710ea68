//! Pseudo-spectral 2-D Navier–Stokes in vorticity form on `T_{2πδ} × T_{2π}` and
//! the nonlinear enhanced-dissipation experiment around the bar state.

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::fourier::wavenumber;
use crate::torus_field::{ScalarField2D, TorusGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Unnormalized 2-D FFT on the row-major `(x, y)` layout.
struct Fft2 {
    nx: usize,
    ny: usize,
    fy: Arc<dyn Fft<f64>>,
    fy_inv: Arc<dyn Fft<f64>>,
    fx: Arc<dyn Fft<f64>>,
    fx_inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    col: Vec<Complex64>,
}

impl Fft2 {
    fn new(nx: usize, ny: usize) -> Self {
        let mut p = FftPlanner::new();
        let (fy, fy_inv, fx, fx_inv) = (p.plan_fft_forward(ny), p.plan_fft_inverse(ny), p.plan_fft_forward(nx), p.plan_fft_inverse(nx));
        let s = [&fy, &fy_inv, &fx, &fx_inv].iter().map(|f| f.get_inplace_scratch_len()).max().unwrap_or(0);
        Self { nx, ny, fy, fy_inv, fx, fx_inv, scratch: vec![zero(); s], col: vec![zero(); nx] }
    }

    fn run(&mut self, data: &mut [Complex64], inverse: bool) {
        let (fy, fx) = if inverse { (&self.fy_inv, &self.fx_inv) } else { (&self.fy, &self.fx) };
        fy.process_with_scratch(data, &mut self.scratch);
        for j in 0..self.ny {
            for i in 0..self.nx {
                self.col[i] = data[i * self.ny + j];
            }
            fx.process_with_scratch(&mut self.col, &mut self.scratch);
            for i in 0..self.nx {
                data[i * self.ny + j] = self.col[i];
            }
        }
    }
}

/// Spectral state of the full nonlinear problem.
#[derive(Debug, Clone)]
pub struct NSState {
    pub grid: TorusGrid,
    pub nu: f64,
    pub t: f64,
    /// Normalized coefficients `ω̂(m, k)`, row-major in FFT bin order.
    pub omega_hat: Vec<Complex64>,
    /// `true` for retained (|m|, |k| ≤ n/3) modes.
    pub mask: Vec<bool>,
}

impl NSState {
    pub fn from_field(field: &ScalarField2D, nu: f64) -> Result<Self> {
        if !(nu >= 0.0) {
            return Err(Error::OutOfRange(format!("nu = {nu} must be >= 0")));
        }
        let g = field.grid;
        let mut buf: Vec<Complex64> = field.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        Fft2::new(g.nx, g.ny).run(&mut buf, false);
        let scale = 1.0 / (g.nx * g.ny) as f64;
        let mask = dealias_mask(&g);
        for (v, keep) in buf.iter_mut().zip(&mask) {
            *v = if *keep { *v * scale } else { zero() };
        }
        Ok(Self { grid: g, nu, t: 0.0, omega_hat: buf, mask })
    }

    pub fn to_field(&self) -> ScalarField2D {
        let g = self.grid;
        let mut buf = self.omega_hat.clone();
        Fft2::new(g.nx, g.ny).run(&mut buf, true);
        ScalarField2D { grid: g, values: buf.iter().map(|v| v.re).collect() }
    }

    fn area(&self) -> f64 {
        self.grid.lx() * 2.0 * PI
    }

    fn wavevector(&self, idx: usize) -> (f64, f64) {
        let g = &self.grid;
        (g.alpha_of_bin(idx / g.ny), wavenumber(idx % g.ny, g.ny) as f64)
    }

    /// `Σ w(α, k)|ω̂|²` scaled to an integral over the torus.
    fn weighted(&self, w: impl Fn(f64, f64) -> f64) -> f64 {
        self.omega_hat
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (a, k) = self.wavevector(i);
                w(a, k) * v.norm_sqr()
            })
            .sum::<f64>()
            * self.area()
    }

    pub fn enstrophy(&self) -> f64 {
        self.weighted(|_, _| 1.0)
    }

    pub fn norm(&self) -> f64 {
        self.enstrophy().sqrt()
    }

    /// `‖∇ω‖²`.
    pub fn grad_sq(&self) -> f64 {
        self.weighted(|a, k| a * a + k * k)
    }

    /// `‖∇ψ‖² = Σ|ω̂|²/|K|²`.
    pub fn velocity_sq(&self) -> f64 {
        self.weighted(|a, k| {
            let s = a * a + k * k;
            if s == 0.0 {
                0.0
            } else {
                1.0 / s
            }
        })
    }

    pub fn mean(&self) -> f64 {
        self.omega_hat[0].re
    }

    /// `‖P_{≠0}ω‖`.
    pub fn nonshear_norm(&self) -> f64 {
        self.weighted(|a, _| if a == 0.0 { 0.0 } else { 1.0 }).sqrt()
    }

    /// `‖P₂ω‖`, the `span{sin y, cos y}` component.
    pub fn p2_norm(&self) -> f64 {
        self.weighted(|a, k| if a == 0.0 && k.abs() == 1.0 { 1.0 } else { 0.0 }).sqrt()
    }

    /// `‖(I−P₂)ω‖`.
    pub fn complement_p2_norm(&self) -> f64 {
        self.weighted(|a, k| if a == 0.0 && k.abs() == 1.0 { 0.0 } else { 1.0 }).sqrt()
    }

    /// Largest `|ω̂(m,k) − conj ω̂(−m,−k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut d = 0.0f64;
        for i in 0..g.nx {
            for j in 0..g.ny {
                let (ri, rj) = ((g.nx - i) % g.nx, (g.ny - j) % g.ny);
                d = d.max((self.omega_hat[i * g.ny + j] - self.omega_hat[ri * g.ny + rj].conj()).norm());
            }
        }
        d
    }
}

/// Retains `3|m| ≤ n` in each direction.
pub fn dealias_mask(g: &TorusGrid) -> Vec<bool> {
    let mut m = Vec::with_capacity(g.nx * g.ny);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let (a, b) = (wavenumber(i, g.nx).unsigned_abs() as usize, wavenumber(j, g.ny).unsigned_abs() as usize);
            m.push(3 * a <= g.nx && 3 * b <= g.ny);
        }
    }
    m
}

/// Integrating-factor RK4 stepper with cached transforms.
pub struct NsSolver {
    grid: TorusGrid,
    nu: f64,
    fft: Fft2,
    kx: Vec<f64>,
    ky: Vec<f64>,
    k2: Vec<f64>,
    mask: Vec<bool>,
    buf: [Vec<Complex64>; 3],
    stages: [Vec<Complex64>; 5],
    decay: (f64, Vec<f64>, Vec<f64>),
    /// `max|V|` at the start of the last step.
    pub last_vmax: f64,
}

impl NsSolver {
    pub fn new(grid: TorusGrid, nu: f64) -> Self {
        let n = grid.nx * grid.ny;
        let mut kx = Vec::with_capacity(n);
        let mut ky = Vec::with_capacity(n);
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                kx.push(grid.alpha_of_bin(i));
                ky.push(wavenumber(j, grid.ny) as f64);
            }
        }
        let k2 = kx.iter().zip(&ky).map(|(a, b)| a * a + b * b).collect();
        Self {
            grid,
            nu,
            fft: Fft2::new(grid.nx, grid.ny),
            kx,
            ky,
            k2,
            mask: dealias_mask(&grid),
            buf: std::array::from_fn(|_| vec![zero(); n]),
            stages: std::array::from_fn(|_| vec![zero(); n]),
            decay: (f64::NAN, vec![], vec![]),
            last_vmax: 0.0,
        }
    }

    /// `−V·∇ω` projected onto the retained modes; returns `max|V|`.
    fn nonlinear(&mut self, w: &[Complex64], out: &mut [Complex64]) -> f64 {
        let n = w.len();
        let i = Complex64::new(0.0, 1.0);
        let [p, q, _] = &mut self.buf;
        for idx in 0..n {
            let psi = if self.k2[idx] == 0.0 { zero() } else { w[idx] / self.k2[idx] };
            // ψ_x + iψ_y and ω_x + iω_y
            p[idx] = i * self.kx[idx] * psi - self.ky[idx] * psi;
            q[idx] = i * self.kx[idx] * w[idx] - self.ky[idx] * w[idx];
        }
        self.fft.run(p, true);
        self.fft.run(q, true);
        let mut vmax = 0.0f64;
        for idx in 0..n {
            let (px, py) = (p[idx].re, p[idx].im);
            let (wx, wy) = (q[idx].re, q[idx].im);
            vmax = vmax.max(px.hypot(py));
            out[idx] = Complex64::new(-(py * wx - px * wy), 0.0);
        }
        self.fft.run(out, false);
        let scale = 1.0 / n as f64;
        for idx in 0..n {
            out[idx] = if self.mask[idx] { out[idx] * scale } else { zero() };
        }
        out[0] = zero();
        vmax
    }

    fn decay_factors(&mut self, h: f64) {
        if self.decay.0 != h {
            let nu = self.nu;
            self.decay = (h, self.k2.iter().map(|k| (-nu * k * h).exp()).collect(), self.k2.iter().map(|k| (-nu * k * 0.5 * h).exp()).collect());
        }
    }

    /// Largest stable step at the current state: `0.5·min(h_x,h_y)/max|V|`.
    pub fn cfl_limit(&self, vmax: f64) -> f64 {
        let h = self.grid.hx().min(self.grid.hy());
        if vmax == 0.0 {
            f64::INFINITY
        } else {
            0.5 * h / vmax
        }
    }

    pub fn step(&mut self, st: &mut NSState, dt: f64) -> Result<()> {
        if st.grid != self.grid || st.nu != self.nu {
            return Err(Error::Contract("state does not match solver grid or viscosity".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::OutOfRange(format!("dt = {dt} must be positive")));
        }
        self.decay_factors(dt);
        let n = st.omega_hat.len();
        let mut stages = std::mem::take(&mut self.stages);
        let [k1, k2, k3, k4, tmp] = &mut stages;
        let w = &mut st.omega_hat;
        let vmax = self.nonlinear(w, k1);
        self.last_vmax = vmax;
        if dt > self.cfl_limit(vmax) {
            self.stages = stages;
            return Err(Error::Stability(format!("dt = {dt} exceeds CFL limit {} (max|V| = {vmax})", self.cfl_limit(vmax))));
        }
        let (h0, e, e2) = std::mem::take(&mut self.decay);
        for idx in 0..n {
            tmp[idx] = (w[idx] + k1[idx] * (0.5 * dt)) * e2[idx];
        }
        self.nonlinear(tmp, k2);
        for idx in 0..n {
            tmp[idx] = w[idx] * e2[idx] + k2[idx] * (0.5 * dt);
        }
        self.nonlinear(tmp, k3);
        for idx in 0..n {
            tmp[idx] = w[idx] * e[idx] + k3[idx] * (dt * e2[idx]);
        }
        self.nonlinear(tmp, k4);
        for idx in 0..n {
            w[idx] = w[idx] * e[idx] + (k1[idx] * e[idx] + (k2[idx] + k3[idx]) * (2.0 * e2[idx]) + k4[idx]) * (dt / 6.0);
        }
        self.stages = stages;
        self.decay = (h0, e, e2);
        st.t += dt;
        if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Stability(format!("non-finite vorticity at t = {}", st.t)));
        }
        Ok(())
    }
}

/// One step of `ω_t − νΔω + V·∇ω = 0`.
pub fn step_ns(state: &mut NSState, dt: f64) -> Result<()> {
    NsSolver::new(state.grid, state.nu).step(state, dt)
}

/// `(‖ω‖² − ‖∇ψ‖², ‖(I−P₂)ω‖², ratio)` together with the symbol constant `C₀`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyGap {
    pub gap: f64,
    pub complement_sq: f64,
    pub ratio: f64,
    /// `min (1 − 1/|K|²)` over the retained modes other than `(0,0)`, `(0,±1)`.
    pub c0: f64,
}

pub fn energy_gap_diagnostics(state: &NSState) -> EnergyGap {
    let gap = state.enstrophy() - state.velocity_sq();
    let c = state.complement_p2_norm().powi(2);
    let mut c0 = f64::INFINITY;
    for idx in 0..state.omega_hat.len() {
        let (a, k) = state.wavevector(idx);
        let s = a * a + k * k;
        if state.mask[idx] && s > 1.0 {
            c0 = c0.min(1.0 - 1.0 / s);
        }
    }
    EnergyGap { gap, complement_sq: c, ratio: if c == 0.0 { 0.0 } else { gap / c }, c0 }
}

/// Parameters of the nonlinear enhanced-dissipation run.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem14Config {
    pub nu: f64,
    pub gamma: f64,
    pub c1: f64,
    pub tau: f64,
    pub seed: u64,
    pub delta: f64,
    pub n: usize,
    /// `None` picks half the CFL limit of the initial bar state.
    pub dt: Option<f64>,
    /// Largest `|m|`, `|k|` in the random perturbation.
    pub pert_modes: i64,
    pub samples: usize,
    /// Upper bound on `ν` (the `c₂` analog).
    pub nu_max: f64,
}

impl Default for Theorem14Config {
    fn default() -> Self {
        Self { nu: 5e-4, gamma: 0.7, c1: 2.0, tau: 1.0, seed: 14, delta: 0.8, n: 128, dt: None, pert_modes: 8, samples: 1000, nu_max: 1e-2 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem14Report {
    pub config: Theorem14Config,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub nonshear: Vec<f64>,
    pub p2: Vec<f64>,
    pub complement: Vec<f64>,
    pub enstrophy: Vec<f64>,
    /// `‖ω(t)‖² + 2ν∫₀^t‖∇ω‖²`.
    pub energy_budget: Vec<f64>,
    /// `c₃` in `ln‖P_{≠0}ω‖ ≈ const − c₃√ν t`.
    pub c3: f64,
    pub fit_window: (f64, f64),
    pub fit_samples: usize,
    /// `min, max` of `‖P₂ω(t)‖/‖P₂ω₀‖`.
    pub p2_band: (f64, f64),
    /// Same band after dividing by the shear heat decay `e^{−νt}`.
    pub p2_band_heat: (f64, f64),
    /// `max_t |budget(t) − budget(0)| / (budget(0)·t)`.
    pub energy_closure: f64,
    /// `max_t ‖(I−P₂)ω(t)‖ / ν^γ`.
    pub complement_over_nu_gamma: f64,
    /// Fraction of consecutive samples over which `‖P_{≠0}ω‖` decreased.
    pub nonshear_monotone_fraction: f64,
    #[serde(skip)]
    pub final_state: Option<NSState>,
}

impl Theorem14Report {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "norm_nonshear", "norm_P2", "norm_I_minus_P2", "enstrophy", "energy_budget"])?;
        for i in 0..self.times.len() {
            w.serialize((self.times[i], self.nonshear[i], self.p2[i], self.complement[i], self.enstrophy[i], self.energy_budget[i]))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed-seed mean-free perturbation on `|m|, |k| ≤ modes` with no `P₂` part, scaled to `‖·‖ = size`.
pub fn random_perturbation(grid: TorusGrid, modes: i64, size: f64, seed: u64) -> ScalarField2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for m in 0..=modes {
        for k in -modes..=modes {
            if m == 0 && k <= 1 {
                continue;
            }
            let amp = rng.gen_range(-1.0..1.0) / (1.0 + (m * m + k * k) as f64);
            let ph = rng.gen_range(0.0..2.0 * PI);
            terms.push((m as f64 / grid.delta, k as f64, amp, ph));
        }
    }
    let f = ScalarField2D::from_fn(grid, |x, y| terms.iter().map(|(a, k, c, p)| c * (a * x + k * y + p).cos()).sum());
    let s = size / f.norm();
    ScalarField2D { grid, values: f.values.iter().map(|v| v * s).collect() }
}

/// Bar state `−a₀ sin y` with `‖P₂ω₀‖ = 1` plus a perturbation of size `ν^γ`.
pub fn theorem14_initial(cfg: &Theorem14Config) -> Result<(ScalarField2D, f64)> {
    let grid = TorusGrid::new(cfg.delta, cfg.n, cfg.n)?;
    let a0 = 1.0 / (2.0 * PI * PI * cfg.delta).sqrt();
    let bar = ScalarField2D::from_fn(grid, |_, y| -a0 * y.sin());
    let size = cfg.nu.powf(cfg.gamma);
    let field = if size > 0.0 && cfg.pert_modes > 0 {
        let p = random_perturbation(grid, cfg.pert_modes, size, cfg.seed);
        ScalarField2D { grid, values: bar.values.iter().zip(&p.values).map(|(a, b)| a + b).collect() }
    } else {
        bar
    };
    Ok((field, a0))
}

impl Theorem14Config {
    pub fn validate(&self) -> Result<()> {
        check_theorem14(self)
    }
}

fn check_theorem14(cfg: &Theorem14Config) -> Result<()> {
    if !(cfg.gamma > 2.0 / 3.0) {
        return Err(Error::Contract(format!("gamma = {} must exceed 2/3", cfg.gamma)));
    }
    if !(cfg.delta < 1.0) {
        return Err(Error::Contract(format!("delta = {} must be < 1", cfg.delta)));
    }
    if !(cfg.nu > 0.0 && cfg.nu < cfg.nu_max) {
        return Err(Error::Contract(format!("nu = {} must lie in (0, {})", cfg.nu, cfg.nu_max)));
    }
    if !(cfg.c1 >= 1.0 && cfg.tau > 0.0) {
        return Err(Error::Contract(format!("need C1 >= 1 and tau > 0, got {} and {}", cfg.c1, cfg.tau)));
    }
    Ok(())
}

/// Runs the nonlinear experiment to `τ/ν`.
pub fn run_theorem14(cfg: &Theorem14Config) -> Result<Theorem14Report> {
    check_theorem14(cfg)?;
    run_unchecked(cfg)
}

fn run_unchecked(cfg: &Theorem14Config) -> Result<Theorem14Report> {
    let (field, a0) = theorem14_initial(cfg)?;
    let mut st = NSState::from_field(&field, cfg.nu)?;
    run_theorem14_from(cfg, &mut st, a0)
}

fn run_theorem14_from(cfg: &Theorem14Config, st: &mut NSState, a0: f64) -> Result<Theorem14Report> {
    let nu = cfg.nu;
    let p20 = st.p2_norm();
    if !(p20 >= 1.0 / cfg.c1 && p20 <= cfg.c1) {
        return Err(Error::Contract(format!("|P2 omega0| = {p20} outside [1/C1, C1]")));
    }
    if st.complement_p2_norm() > nu.powf(cfg.gamma) * (1.0 + 1e-9) {
        return Err(Error::Contract("|(I-P2) omega0| exceeds nu^gamma".into()));
    }
    let mut solver = NsSolver::new(st.grid, nu);
    let h = st.grid.hx().min(st.grid.hy());
    let vmax0 = a0 + nu.powf(cfg.gamma);
    let horizon = cfg.tau / nu;
    let dt_target = cfg.dt.unwrap_or(0.25 * h / vmax0);
    let steps = (horizon / dt_target).ceil() as usize;
    let dt = horizon / steps as f64;
    let every = (steps / cfg.samples.max(1)).max(1);

    let mut rep = Theorem14Report {
        config: cfg.clone(),
        dt,
        steps,
        times: vec![],
        nonshear: vec![],
        p2: vec![],
        complement: vec![],
        enstrophy: vec![],
        energy_budget: vec![],
        c3: f64::NAN,
        fit_window: (0.0, 0.0),
        fit_samples: 0,
        p2_band: (1.0, 1.0),
        p2_band_heat: (1.0, 1.0),
        energy_closure: 0.0,
        complement_over_nu_gamma: 0.0,
        nonshear_monotone_fraction: 1.0,
        final_state: None,
    };
    let mut dissipated = 0.0;
    let mut g_prev = st.grad_sq();
    let record = |st: &NSState, d: f64, r: &mut Theorem14Report| {
        r.times.push(st.t);
        r.nonshear.push(st.nonshear_norm());
        r.p2.push(st.p2_norm());
        r.complement.push(st.complement_p2_norm());
        let e = st.enstrophy();
        r.enstrophy.push(e);
        r.energy_budget.push(e + 2.0 * nu * d);
    };
    record(st, 0.0, &mut rep);
    for i in 1..=steps {
        solver.step(st, dt)?;
        let g = st.grad_sq();
        dissipated += 0.5 * dt * (g_prev + g);
        g_prev = g;
        if i % every == 0 || i == steps {
            record(st, dissipated, &mut rep);
        }
    }

    let b0 = rep.energy_budget[0];
    rep.energy_closure = rep.times.iter().zip(&rep.energy_budget).skip(1).map(|(t, b)| (b - b0).abs() / (b0 * t)).fold(0.0, f64::max);
    let ratios: Vec<f64> = rep.p2.iter().map(|p| p / p20).collect();
    rep.p2_band = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), r| (a.min(*r), b.max(*r)));
    rep.p2_band_heat =
        ratios.iter().zip(&rep.times).map(|(r, t)| r * (nu * t).exp()).fold((f64::MAX, f64::MIN), |(a, b), r| (a.min(r), b.max(r)));
    rep.complement_over_nu_gamma = rep.complement.iter().fold(0.0f64, |a, c| a.max(*c)) / nu.powf(cfg.gamma);
    let dec = rep.nonshear.windows(2).filter(|w| w[1] <= w[0]).count();
    rep.nonshear_monotone_fraction = dec as f64 / (rep.nonshear.len() - 1).max(1) as f64;

    let s = nu.sqrt();
    rep.fit_window = (2.0 / s, horizon.min(20.0 / s));
    let floor = 1e3 * f64::EPSILON;
    let (ts, ls): (Vec<f64>, Vec<f64>) = rep
        .times
        .iter()
        .zip(&rep.nonshear)
        .zip(&rep.enstrophy)
        .filter(|((t, p), e)| **t >= rep.fit_window.0 && **t <= rep.fit_window.1 && **p > floor * e.sqrt())
        .map(|((t, p), _)| (*t, p.ln()))
        .unzip();
    rep.fit_samples = ts.len();
    if ts.len() >= 3 {
        rep.c3 = -linear_fit(&ts, &ls)?.slope / s;
    }
    rep.final_state = Some(st.clone());
    Ok(rep)
}

/// The experiment for several `γ`, everything else fixed. Values `γ ≤ 2/3` bypass
/// the `γ` check.
pub fn gamma_sweep(base: &Theorem14Config, gammas: &[f64]) -> Result<Vec<Theorem14Report>> {
    check_theorem14(&Theorem14Config { gamma: 1.0, ..base.clone() })?;
    gammas.iter().map(|g| run_unchecked(&Theorem14Config { gamma: *g, ..base.clone() })).collect()
}
