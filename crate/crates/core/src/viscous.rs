//! Per-mode linearized Navier–Stokes around the decaying bar state, the local
//! toy model, the `K₁, K₂, K₃` functionals and enhanced-dissipation metrics.

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::fourier::TrigPoly;
use crate::quad::Panels;
use crate::spectral_kernels::check_alpha;
use crate::torus_field::ModeProfile;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// RK4 stays inside its stability region on the imaginary axis up to `2√2`.
pub const SKEW_STABILITY: f64 = 2.5;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Truncation for a run with skew amplitude `amp` up to `t_end`.
///
/// Filaments reach `|k| ≈ amp·t` before diffusion stops them near `(amp/ν)^{1/3}`.
pub fn viscous_kmax(amp: f64, nu: f64, t_end: f64) -> usize {
    let transport = 1.2 * amp.abs() * t_end;
    let diffusive = if nu > 0.0 { 8.0 * (amp.abs() / nu).cbrt() } else { f64::INFINITY };
    (transport.min(diffusive) + 48.0).ceil() as usize
}

/// One x-mode of the linearized Navier–Stokes perturbation.
#[derive(Debug, Clone)]
pub struct ViscousModeState {
    pub alpha: f64,
    pub nu: f64,
    pub a0: f64,
    pub t: f64,
    pub omega: TrigPoly,
    /// `−(∂_y²−α²)^{−1}ω̂`, refreshed after every step.
    pub psi: TrigPoly,
}

impl ViscousModeState {
    pub fn new(alpha: f64, nu: f64, a0: f64, omega0: &TrigPoly, kmax: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if !(nu >= 0.0) || !a0.is_finite() {
            return Err(Error::OutOfRange(format!("need nu >= 0 and finite a0, got nu = {nu}, a0 = {a0}")));
        }
        if omega0.kmax > kmax {
            return Err(Error::Resolution(format!("initial data degree {} exceeds truncation {kmax}", omega0.kmax)));
        }
        let km = kmax as i64;
        let omega = TrigPoly::from_terms(&(-km..=km).map(|k| (k, omega0.get(k))).collect::<Vec<_>>());
        let mut s = Self { alpha, nu, a0, t: 0.0, psi: TrigPoly::zeros(kmax), omega };
        s.refresh_psi();
        Ok(s)
    }

    pub fn from_profile(omega0: &ModeProfile, nu: f64, a0: f64, kmax: usize) -> Result<Self> {
        Self::new(omega0.alpha, nu, a0, &omega0.to_trig().trimmed(1e-15), kmax)
    }

    fn refresh_psi(&mut self) {
        let a2 = self.alpha * self.alpha;
        self.psi = self.omega.map_coef(|k, v| v / ((k * k) as f64 + a2));
    }

    pub fn omega_profile(&self, ny: usize) -> ModeProfile {
        ModeProfile::from_trig(self.alpha, &self.omega, ny)
    }

    pub fn psi_profile(&self, ny: usize) -> ModeProfile {
        ModeProfile::from_trig(self.alpha, &self.psi, ny)
    }

    pub fn norm(&self) -> f64 {
        self.omega.norm_sq().sqrt()
    }

    /// `‖V̂‖ = (‖∂_yψ̂‖² + α²‖ψ̂‖²)^{1/2}`.
    pub fn velocity_norm(&self) -> f64 {
        (self.psi.deriv().norm_sq() + self.alpha * self.alpha * self.psi.norm_sq()).sqrt()
    }

    /// `‖∇ω̂‖² = ‖∂_yω̂‖² + α²‖ω̂‖²`.
    pub fn grad_norm_sq(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        self.omega.ks().map(|k| self.omega.get(k).norm_sqr() * ((k * k) as f64 + a2)).sum::<f64>() * 2.0 * PI
    }

    /// `sup_y |V̂|` on a grid fine enough for the truncation.
    pub fn velocity_sup(&self) -> f64 {
        let n = (4 * self.omega.kmax + 8).next_power_of_two();
        let dpsi = self.psi.deriv().to_samples(n);
        let psi = self.psi.to_samples(n);
        dpsi.iter().zip(&psi).map(|(d, p)| (d.norm_sqr() + self.alpha * self.alpha * p.norm_sqr()).sqrt()).fold(0.0, f64::max)
    }

    /// `‖(−∂_y²+α²)ψ̂ − ω̂‖`.
    pub fn inversion_residual(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        let r = self.psi.map_coef(|k, v| v * ((k * k) as f64 + a2)).sub(&self.omega);
        r.norm_sq().sqrt()
    }
}

/// `K₁ = ⟨ω̂, ω̂−ψ̂⟩`, `K₂ = −⟨(∂_y²−α²)ω̂, ω̂−ψ̂⟩`, `K₃ = ⟨ψ̂, ω̂−ψ̂⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyTriple {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl EnergyTriple {
    /// Slacks of `K₂ ≥ α²K₁`, `K₁ ≥ α²K₃`, `K₂K₃ ≥ K₁²`, relative to the larger side.
    pub fn slacks(&self, alpha: f64) -> [f64; 3] {
        let a2 = alpha * alpha;
        let rel = |big: f64, small: f64| if big.abs().max(small.abs()) == 0.0 { 0.0 } else { (big - small) / big.abs().max(small.abs()) };
        [rel(self.k2, a2 * self.k1), rel(self.k1, a2 * self.k3), rel(self.k2 * self.k3, self.k1 * self.k1)]
    }
}

pub fn energy_triple(state: &ViscousModeState) -> EnergyTriple {
    let a2 = state.alpha * state.alpha;
    let (mut k1, mut k2, mut k3) = (0.0, 0.0, 0.0);
    for k in state.omega.ks() {
        let lam = (k * k) as f64 + a2;
        let m = state.omega.get(k).norm_sqr() * (1.0 - 1.0 / lam);
        k1 += m;
        k2 += m * lam;
        k3 += m / lam;
    }
    let s = 2.0 * PI;
    EnergyTriple { k1: k1 * s, k2: k2 * s, k3: k3 * s }
}

/// Strang splitting for `∂_tω = −ν(k² + shift)ω + i·amp·e^{−νt} cos y (Mω)`, with
/// `M` diagonal in `k`.
struct SplitStepper {
    nu: f64,
    shift: f64,
    amp: f64,
    m: Vec<f64>,
    scratch: [Vec<Complex64>; 6],
    half_decay: (f64, Vec<f64>),
}

impl SplitStepper {
    fn new(kmax: usize, nu: f64, shift: f64, amp: f64, nonlocal: Option<f64>) -> Self {
        let km = kmax as i64;
        let m = (-km..=km)
            .map(|k| match nonlocal {
                Some(a) => 1.0 - 1.0 / ((k * k) as f64 + a * a),
                None => 1.0,
            })
            .collect::<Vec<_>>();
        let n = m.len();
        Self { nu, shift, amp, m, scratch: std::array::from_fn(|_| vec![zero(); n]), half_decay: (f64::NAN, vec![1.0; n]) }
    }

    fn check_dt(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0) || dt * self.amp.abs() > SKEW_STABILITY {
            return Err(Error::Stability(format!("dt = {dt} exceeds {SKEW_STABILITY}/|amp| with amp = {}", self.amp)));
        }
        Ok(())
    }

    fn rhs(m: &[f64], f: Complex64, w: &[Complex64], out: &mut [Complex64], v: &mut [Complex64]) {
        let n = w.len();
        for i in 0..n {
            v[i] = w[i] * m[i];
        }
        for i in 0..n {
            let lo = if i > 0 { v[i - 1] } else { zero() };
            let hi = if i + 1 < n { v[i + 1] } else { zero() };
            out[i] = f * (lo + hi);
        }
    }

    fn diffuse(&mut self, w: &mut [Complex64], h: f64) {
        if self.half_decay.0 != h {
            let km = (w.len() / 2) as i64;
            let (nu, shift) = (self.nu, self.shift);
            self.half_decay = (h, (-km..=km).map(|k| (-nu * ((k * k) as f64 + shift) * 0.5 * h).exp()).collect());
        }
        for (v, d) in w.iter_mut().zip(&self.half_decay.1) {
            *v *= d;
        }
    }

    fn step(&mut self, w: &mut [Complex64], t: f64, h: f64) {
        self.diffuse(w, h);
        if self.amp != 0.0 {
            let n = w.len();
            let fac = |s: f64| Complex64::new(0.0, 0.5 * self.amp * (-self.nu * s).exp());
            let (f0, f1, f2) = (fac(t), fac(t + 0.5 * h), fac(t + h));
            let [k1, k2, k3, k4, tmp, v] = &mut self.scratch;
            let m = &self.m;
            Self::rhs(m, f0, w, k1, v);
            for i in 0..n {
                tmp[i] = w[i] + k1[i] * (0.5 * h);
            }
            Self::rhs(m, f1, tmp, k2, v);
            for i in 0..n {
                tmp[i] = w[i] + k2[i] * (0.5 * h);
            }
            Self::rhs(m, f1, tmp, k3, v);
            for i in 0..n {
                tmp[i] = w[i] + k3[i] * h;
            }
            Self::rhs(m, f2, tmp, k4, v);
            for i in 0..n {
                w[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        self.diffuse(w, h);
    }
}

fn check_finite(w: &[Complex64], t: f64) -> Result<()> {
    if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Stability(format!("non-finite state at t = {t}")));
    }
    Ok(())
}

/// Reusable linearized Navier–Stokes stepper for one state.
pub struct LinNsStepper {
    inner: SplitStepper,
}

impl LinNsStepper {
    pub fn for_state(state: &ViscousModeState) -> Self {
        let a = state.alpha;
        Self { inner: SplitStepper::new(state.omega.kmax, state.nu, a * a, a * state.a0, Some(a)) }
    }

    pub fn step(&mut self, state: &mut ViscousModeState, dt: f64) -> Result<()> {
        self.inner.check_dt(dt)?;
        self.inner.step(&mut state.omega.coef, state.t, dt);
        state.t += dt;
        check_finite(&state.omega.coef, state.t)?;
        state.refresh_psi();
        Ok(())
    }
}

/// One step of `∂_tω̂ + ℒ_ν(t)ω̂ = 0`.
pub fn step_lin_ns(state: &mut ViscousModeState, dt: f64) -> Result<()> {
    LinNsStepper::for_state(state).step(state, dt)
}

/// Default step `min(0.1/(|α|a₀), 0.5·h_y)` with `h_y = 2π/(2 kmax)`.
pub fn default_dt(alpha: f64, a0: f64, kmax: usize) -> f64 {
    let hy = PI / kmax.max(1) as f64;
    let skew = if a0 == 0.0 { f64::INFINITY } else { 0.1 / (alpha * a0).abs() };
    skew.min(0.5 * hy)
}

// ---------------------------------------------------------------------------
// Toy model

/// `∂_tω − ν∂_y²ω − i a e^{−νt} cos y ω = 0` with the `γ` bookkeeping of its decay proof.
#[derive(Debug, Clone)]
pub struct ToyState {
    pub nu: f64,
    pub a: f64,
    pub t: f64,
    pub omega: TrigPoly,
}

impl ToyState {
    pub fn new(nu: f64, a: f64, omega0: &TrigPoly, kmax: usize) -> Result<Self> {
        if !(nu >= 0.0) || nu >= a.abs() {
            return Err(Error::Contract(format!("toy model needs 0 <= nu < |a|, got nu = {nu}, a = {a}")));
        }
        if omega0.kmax > kmax {
            return Err(Error::Resolution(format!("initial data degree {} exceeds truncation {kmax}", omega0.kmax)));
        }
        let km = kmax as i64;
        let omega = TrigPoly::from_terms(&(-km..=km).map(|k| (k, omega0.get(k))).collect::<Vec<_>>());
        Ok(Self { nu, a, t: 0.0, omega })
    }

    /// `γ(t,s) = ∫_s^t a e^{−ντ} dτ`.
    pub fn gamma(&self, t: f64, s: f64) -> f64 {
        if self.nu == 0.0 {
            self.a * (t - s)
        } else {
            self.a * (-self.nu * s).exp() * -(-self.nu * (t - s)).exp_m1() / self.nu
        }
    }

    fn gamma_moment(&self, t: f64, p: i32) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let panels = Panels::new(Panels::uniform_breaks(0.0, t, t / 4.0));
        let f: Vec<f64> = panels.nodes.iter().map(|&s| self.gamma(t, s).powi(p)).collect();
        panels.integrate(&f)
    }

    /// `γ₁(t) = ∫₀^t γ(t,s) ds`.
    pub fn gamma1(&self, t: f64) -> f64 {
        self.gamma_moment(t, 1)
    }

    /// `γ₂(t) = ∫₀^t γ(t,s)² ds`.
    pub fn gamma2(&self, t: f64) -> f64 {
        self.gamma_moment(t, 2)
    }

    /// `γ₀(t) = γ₂ − γ₁²/t`.
    pub fn gamma0(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let g1 = self.gamma1(t);
        self.gamma2(t) - g1 * g1 / t
    }

    /// `∫_s^t γ(τ,s)² dτ`.
    pub fn gamma_sq_integral(&self, t: f64, s: f64) -> f64 {
        if t <= s {
            return 0.0;
        }
        let panels = Panels::new(Panels::uniform_breaks(s, t, (t - s) / 4.0));
        let f: Vec<f64> = panels.nodes.iter().map(|&tau| self.gamma(tau, s).powi(2)).collect();
        panels.integrate(&f)
    }

    pub fn norm(&self) -> f64 {
        self.omega.norm_sq().sqrt()
    }

    /// `‖sin y ω‖`.
    pub fn sin_norm(&self) -> f64 {
        self.omega.mul_sin().norm_sq().sqrt()
    }
}

/// Samples of a toy-model run.
#[derive(Debug, Clone)]
pub struct ToyTrajectory {
    pub nu: f64,
    pub a: f64,
    pub times: Vec<f64>,
    pub omega: Vec<TrigPoly>,
    pub norm: Vec<f64>,
    pub sin_norm: Vec<f64>,
}

impl ToyTrajectory {
    /// `sup_t ‖sin y ω(t)‖ √(νt³a²) / ‖ω(0)‖` over `t ∈ [t_lo, t_hi]`.
    pub fn envelope_constant(&self, t_lo: f64, t_hi: f64) -> f64 {
        let n0 = self.norm[0];
        self.times
            .iter()
            .zip(&self.sin_norm)
            .filter(|(t, _)| **t >= t_lo && **t <= t_hi)
            .map(|(t, s)| s * (self.nu * t.powi(3) * self.a * self.a).sqrt() / n0)
            .fold(0.0, f64::max)
    }

    /// Largest `‖ω(t_{i+1})‖ − ‖ω(t_i)‖` relative to `‖ω(0)‖`.
    pub fn monotonicity_violation(&self) -> f64 {
        let n0 = self.norm[0].max(f64::MIN_POSITIVE);
        self.norm.windows(2).map(|w| (w[1] - w[0]) / n0).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "norm", "sin_norm", "envelope"])?;
        let n0 = self.norm[0];
        for i in 0..self.times.len() {
            let t = self.times[i];
            let env = if n0 > 0.0 { self.sin_norm[i] * (self.nu * t.powi(3) * self.a * self.a).sqrt() / n0 } else { 0.0 };
            w.serialize((t, self.norm[i], self.sin_norm[i], env))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integrates the toy model to `t_end`, recording about `samples` snapshots.
pub fn solve_toy_model(omega0: &TrigPoly, nu: f64, a: f64, t_end: f64, dt: f64, samples: usize) -> Result<ToyTrajectory> {
    let kmax = viscous_kmax(a, nu, t_end).max(omega0.kmax + 16);
    let mut st = ToyState::new(nu, a, omega0, kmax)?;
    let mut stepper = SplitStepper::new(kmax, nu, 0.0, a, None);
    stepper.check_dt(dt)?;
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let every = (steps / samples.max(1)).max(1);
    let mut tr = ToyTrajectory { nu, a, times: vec![0.0], omega: vec![st.omega.clone()], norm: vec![st.norm()], sin_norm: vec![st.sin_norm()] };
    for i in 1..=steps {
        stepper.step(&mut st.omega.coef, st.t, h);
        st.t = i as f64 * h;
        if i % every == 0 || i == steps {
            check_finite(&st.omega.coef, st.t)?;
            tr.times.push(st.t);
            tr.norm.push(st.norm());
            tr.sin_norm.push(st.sin_norm());
            tr.omega.push(st.omega.clone());
        }
    }
    Ok(tr)
}

/// `‖∂_y(e^{iγ(t,s)u}ω(t))‖²` with `u = −cos y`.
pub fn unwound_gradient_sq(omega: &TrigPoly, gamma: f64) -> f64 {
    let n = (4 * (omega.kmax + gamma.abs().ceil() as usize) + 64).next_power_of_two();
    let ys = crate::fourier::periodic_grid(n);
    let vals: Vec<Complex64> = omega.to_samples(n).iter().zip(&ys).map(|(v, y)| v * Complex64::from_polar(1.0, -gamma * y.cos())).collect();
    TrigPoly::from_samples(&vals).deriv().norm_sq()
}

// ---------------------------------------------------------------------------
// Enhanced dissipation

/// Options for [`enhanced_dissipation_metrics`].
#[derive(Debug, Clone, Serialize)]
pub struct DissipationOptions {
    /// Step size; `None` uses `0.2/(|α|a₀)`.
    pub dt: Option<f64>,
    /// The run stops once `‖ω‖ < stop_below·‖ω₀‖`.
    pub stop_below: f64,
    /// Number of recorded samples.
    pub samples: usize,
    /// Enforce `|α| ≥ 2`.
    pub require_alpha_two: bool,
}

impl Default for DissipationOptions {
    fn default() -> Self {
        Self { dt: None, stop_below: 1e-12, samples: 2000, require_alpha_two: false }
    }
}

/// Space-time integrals and their `ν`-scaled versions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpacetimeNorms {
    /// `∫‖∇ω‖² dt / ‖ω₀‖²`.
    pub grad_sq: f64,
    /// `∫‖∂_xω‖ dt / ‖ω₀‖`.
    pub dx: f64,
    /// `∫‖V‖²_{L^∞} dt / ‖ω₀‖²`, by trapezoid over the recorded samples.
    pub vel_sup_sq: f64,
    /// `ν·grad_sq`.
    pub grad_sq_scaled: f64,
    /// `ν^{2/3}·dx`.
    pub dx_scaled: f64,
    /// `ν^{1/3}/(|ln ν|+1)·vel_sup_sq`.
    pub vel_sup_sq_scaled: f64,
}

/// Enhanced-dissipation measurements for one `(α, ν)`.
#[derive(Debug, Clone, Serialize)]
pub struct DissipationReport {
    pub alpha: f64,
    pub nu: f64,
    pub a0: f64,
    pub tau: f64,
    pub dt: f64,
    pub kmax: usize,
    /// Time at which the run ended (`τ/ν` or the `stop_below` floor).
    pub t_end: f64,
    pub fit_window: (f64, f64),
    /// `c` in `ln‖ω‖ ≈ const − c√ν t`.
    pub c_fit: f64,
    /// e-folding time `1/(c√ν)`.
    pub t_d: f64,
    pub residual: f64,
    pub spacetime: SpacetimeNorms,
    /// Largest `K₁(t)/(e^{−2να²t}K₁(0)) − 1`.
    pub k1_bound_excess: f64,
    /// Most negative relative slack of the `K`-inequalities.
    pub k_slack_min: f64,
    #[serde(skip)]
    pub series: DissipationSeries,
}

#[derive(Debug, Clone, Default)]
pub struct DissipationSeries {
    pub t: Vec<f64>,
    pub norm: Vec<f64>,
    pub vel: Vec<f64>,
    pub k: Vec<EnergyTriple>,
}

impl DissipationReport {
    /// `‖V̂(t)‖√(1+νt³)e^{c√νt}/‖ω₀‖` at the recorded times.
    pub fn velocity_factor(&self, c: f64) -> Vec<f64> {
        let s = &self.series;
        let n0 = s.norm[0];
        s.t.iter().zip(&s.vel).map(|(t, v)| v * (1.0 + self.nu * t.powi(3)).sqrt() * (c * self.nu.sqrt() * t).exp() / n0).collect()
    }

    /// `max/min` of the velocity factor over `t ∈ [ν^{−1/3}, t_end]`.
    pub fn velocity_factor_spread(&self, c: f64) -> f64 {
        let lo = self.nu.powf(-1.0 / 3.0);
        let f = self.velocity_factor(c);
        let vals: Vec<f64> = self.series.t.iter().zip(&f).filter(|(t, _)| **t >= lo).map(|(_, v)| *v).collect();
        let (mn, mx) = vals.iter().fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        if vals.is_empty() {
            f64::NAN
        } else {
            mx / mn
        }
    }

    /// `‖V̂(t)‖/‖ω̂(t)‖·√(1+νt³)`, whose flatness tests the `(1+νt³)^{−1/2}` factor.
    pub fn velocity_ratio_profile(&self) -> Vec<f64> {
        let s = &self.series;
        s.t.iter().zip(&s.vel).zip(&s.norm).map(|((t, v), n)| v / n * (1.0 + self.nu * t.powi(3)).sqrt()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "norm_omega", "norm_V", "K1", "K2", "K3"])?;
        let s = &self.series;
        for i in 0..s.t.len() {
            w.serialize((s.t[i], s.norm[i], s.vel[i], s.k[i].k1, s.k[i].k2, s.k[i].k3))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fit window `[2ν^{−1/2}, min(τ/ν, 20ν^{−1/2})]`.
pub fn dissipation_fit_window(nu: f64, tau: f64) -> (f64, f64) {
    let s = nu.sqrt();
    (2.0 / s, (tau / nu).min(20.0 / s))
}

/// Runs one mode to `τ/ν` and measures the enhanced-dissipation quantities.
pub fn enhanced_dissipation_metrics(omega0: &ModeProfile, nu: f64, a0: f64, tau: f64, opts: &DissipationOptions) -> Result<DissipationReport> {
    let alpha = omega0.alpha;
    check_alpha(alpha)?;
    if opts.require_alpha_two && alpha.abs() < 2.0 {
        return Err(Error::SpectralCondition { alpha: alpha.abs(), bound: 2.0 });
    }
    if !(nu > 0.0) || !(tau > 0.0) || a0 == 0.0 {
        return Err(Error::OutOfRange(format!("need nu > 0, tau > 0, a0 != 0; got {nu}, {tau}, {a0}")));
    }
    let horizon = tau / nu;
    let window = dissipation_fit_window(nu, tau);
    if window.1 <= window.0 {
        return Err(Error::Fit(format!("fit window [{}, {}] is empty for tau = {tau}", window.0, window.1)));
    }
    let dt = opts.dt.unwrap_or(0.2 / (alpha * a0).abs());
    let data = omega0.to_trig().trimmed(1e-15);
    let kmax = viscous_kmax(alpha * a0, nu, horizon).max(data.kmax + 16);
    let mut st = ViscousModeState::new(alpha, nu, a0, &data, kmax)?;
    let mut stepper = LinNsStepper::for_state(&st);
    let steps = (horizon / dt).ceil() as usize;
    let h = horizon / steps as f64;
    let every = (steps / opts.samples.max(1)).max(1);

    let n0 = st.norm();
    if n0 == 0.0 {
        return Err(Error::OutOfRange("initial vorticity is zero".into()));
    }
    let k0 = energy_triple(&st);
    let mut series = DissipationSeries::default();
    let record = |st: &ViscousModeState, s: &mut DissipationSeries| {
        s.t.push(st.t);
        s.norm.push(st.norm());
        s.vel.push(st.velocity_norm());
        s.k.push(energy_triple(st));
    };
    record(&st, &mut series);

    let integrands = |st: &ViscousModeState| [st.grad_norm_sq(), alpha.abs() * st.norm()];
    let mut prev = integrands(&st);
    let mut acc = [0.0; 3];
    let mut sup_prev = (0.0, st.velocity_sup().powi(2));
    let mut k1_excess = f64::NEG_INFINITY;
    let mut slack_min = f64::INFINITY;
    let mut i = 0;
    while i < steps {
        stepper.step(&mut st, h)?;
        i += 1;
        let cur = integrands(&st);
        for j in 0..2 {
            acc[j] += 0.5 * h * (prev[j] + cur[j]);
        }
        prev = cur;
        let kt = energy_triple(&st);
        let bound = (-2.0 * nu * alpha * alpha * st.t).exp() * k0.k1;
        k1_excess = k1_excess.max(kt.k1 / bound - 1.0);
        slack_min = slack_min.min(kt.slacks(alpha).iter().copied().fold(f64::INFINITY, f64::min));
        let done = st.norm() < opts.stop_below * n0;
        if i % every == 0 || i == steps || done {
            record(&st, &mut series);
            let v = st.velocity_sup().powi(2);
            acc[2] += 0.5 * (st.t - sup_prev.0) * (v + sup_prev.1);
            sup_prev = (st.t, v);
        }
        if done {
            break;
        }
    }

    let (ts, ls): (Vec<f64>, Vec<f64>) =
        series.t.iter().zip(&series.norm).filter(|(t, _)| **t >= window.0 && **t <= window.1).map(|(t, n)| (*t, n.ln())).unzip();
    let fit = linear_fit(&ts, &ls)?;
    let c_fit = -fit.slope / nu.sqrt();
    let spacetime = SpacetimeNorms {
        grad_sq: acc[0] / (n0 * n0),
        dx: acc[1] / n0,
        vel_sup_sq: acc[2] / (n0 * n0),
        grad_sq_scaled: nu * acc[0] / (n0 * n0),
        dx_scaled: nu.powf(2.0 / 3.0) * acc[1] / n0,
        vel_sup_sq_scaled: nu.powf(1.0 / 3.0) / (nu.ln().abs() + 1.0) * acc[2] / (n0 * n0),
    };
    Ok(DissipationReport {
        alpha,
        nu,
        a0,
        tau,
        dt: h,
        kmax,
        t_end: st.t,
        fit_window: window,
        c_fit,
        t_d: 1.0 / (c_fit * nu.sqrt()),
        residual: fit.residual,
        spacetime,
        k1_bound_excess: k1_excess,
        k_slack_min: slack_min,
        series,
    })
}

#[cfg(test)]
mod tests;
