//! Experiment runner: named experiments, key=value configuration, CSV/JSON output.

use crate::error::{Error, Result};
use crate::fit::{log_space, loglog_fit};
use crate::fourier::{hilbert_transform, periodic_grid, random_trig_poly, TrigPoly};
use crate::inviscid::{direct_stepper_lin_euler, measure_decay, solve_inviscid, DecayQuantity};
use crate::nonlinear::{run_theorem14, Theorem14Config};
use crate::spectral_kernels::{assemble_dual_kernel, check_alpha, compute_ii11, compute_kernel_set, CGrid, KernelKind};
use crate::torus_field::ModeProfile;
use crate::viscous::{enhanced_dissipation_metrics, solve_toy_model, DissipationOptions};
use crate::wave_op::WaveOperator;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    InviscidDamping,
    VorticityDepletion,
    KernelDiagnostics,
    WaveOperatorSuite,
    ToyModel,
    EnhancedDissipation,
    NonlinearTheorem14,
    CrossValidation,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Self::InviscidDamping,
        Self::VorticityDepletion,
        Self::KernelDiagnostics,
        Self::WaveOperatorSuite,
        Self::ToyModel,
        Self::EnhancedDissipation,
        Self::NonlinearTheorem14,
        Self::CrossValidation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::InviscidDamping => "inviscid-damping",
            Self::VorticityDepletion => "vorticity-depletion",
            Self::KernelDiagnostics => "kernel-diagnostics",
            Self::WaveOperatorSuite => "wave-operator-suite",
            Self::ToyModel => "toy-model",
            Self::EnhancedDissipation => "enhanced-dissipation",
            Self::NonlinearTheorem14 => "nonlinear-theorem14",
            Self::CrossValidation => "cross-validation",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
            Error::Config(format!("unknown experiment '{s}' (expected one of: {})", names.join(", ")))
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a run needs. Unused fields are ignored by a given experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub alpha: Vec<f64>,
    pub nu: Vec<f64>,
    pub delta: f64,
    /// Torus grid size for the nonlinear run.
    pub n: usize,
    /// Samples per mode profile in y.
    pub ny: usize,
    /// Critical-value grid size.
    pub m: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub times: Vec<f64>,
    /// Initial mode profile, see [`named_profile`].
    pub data: String,
    /// Odd companion data for the depletion run.
    pub data_odd: String,
    pub a0: f64,
    /// Toy-model amplitude.
    pub a: f64,
    pub tau: f64,
    pub gamma: f64,
    pub c1: f64,
    pub dt: Option<f64>,
    pub seed: u64,
    pub tol: f64,
    pub pert_modes: i64,
    pub random_inputs: usize,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment,
            alpha: vec![2.0],
            nu: vec![1e-4],
            delta: 0.8,
            n: 128,
            ny: 64,
            m: 512,
            t_min: 10.0,
            t_max: 100.0,
            samples: 16,
            times: vec![1.0, 5.0, 20.0],
            data: "sin2y".into(),
            data_odd: "sin2y".into(),
            a0: 1.0,
            a: 2.0,
            tau: 1.0,
            gamma: 0.7,
            c1: 2.0,
            dt: None,
            seed: 14,
            tol: 1e-3,
            pert_modes: 8,
            random_inputs: 20,
            out: PathBuf::from("out").join(experiment.name()),
        };
        match experiment {
            Experiment::VorticityDepletion => {
                c.data = "cos2y".into();
                c.t_min = 20.0;
                c.t_max = 200.0;
                c.samples = 24;
            }
            Experiment::KernelDiagnostics => c.m = 64,
            Experiment::WaveOperatorSuite => {
                c.alpha = vec![2.0, 3.0, 4.0, 6.0];
                c.data = "mixed".into();
                c.seed = 7;
                c.tol = 1e-6;
            }
            Experiment::ToyModel => {
                c.data = "cosy+0.7sin2y".into();
                c.dt = Some(0.02);
                c.samples = 400;
            }
            Experiment::EnhancedDissipation => {
                c.data = "cosy+0.7sin2y".into();
                c.nu = vec![1e-4, 4e-5, 1e-5];
                c.ny = 32;
                c.samples = 2000;
            }
            Experiment::NonlinearTheorem14 => {
                c.nu = vec![5e-4];
                c.samples = 1000;
                c.tol = 1e-6;
            }
            Experiment::CrossValidation => {
                c.alpha = vec![2.0, 3.0];
                c.data = "mixed".into();
                c.dt = Some(0.01);
            }
            Experiment::InviscidDamping => {}
        }
        c
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("{key}: cannot parse '{value}' as {what}"));
        let f = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("a number"));
        let u = |v: &str| v.trim().parse::<usize>().map_err(|_| bad("a non-negative integer"));
        let list = |v: &str| v.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad("a comma-separated list of numbers"))).collect::<Result<Vec<_>>>();
        match key.trim() {
            "alpha" => self.alpha = list(value)?,
            "nu" => self.nu = list(value)?,
            "times" => self.times = list(value)?,
            "delta" => self.delta = f(value)?,
            "n" => self.n = u(value)?,
            "ny" => self.ny = u(value)?,
            "m" => self.m = u(value)?,
            "t_min" => self.t_min = f(value)?,
            "t_max" => self.t_max = f(value)?,
            "samples" => self.samples = u(value)?,
            "data" => self.data = value.trim().to_string(),
            "data_odd" => self.data_odd = value.trim().to_string(),
            "a0" => self.a0 = f(value)?,
            "a" => self.a = f(value)?,
            "tau" => self.tau = f(value)?,
            "gamma" => self.gamma = f(value)?,
            "c1" => self.c1 = f(value)?,
            "dt" => self.dt = if value.trim() == "auto" { None } else { Some(f(value)?) },
            "seed" => self.seed = value.trim().parse().map_err(|_| bad("an unsigned integer"))?,
            "tol" => self.tol = f(value)?,
            "pert_modes" => self.pert_modes = value.trim().parse().map_err(|_| bad("an integer"))?,
            "random_inputs" => self.random_inputs = u(value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        self.apply_file_contents(&text)
    }

    /// Checks every precondition the chosen experiment relies on.
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.alpha.is_empty() {
            return cfg("alpha: list is empty".into());
        }
        for &a in &self.alpha {
            check_alpha(a).map_err(|e| Error::Config(format!("alpha: {e}")))?;
        }
        if self.ny < 8 {
            return cfg(format!("ny = {} must be at least 8", self.ny));
        }
        named_profile(&self.data, 2.0, 8)?;
        match self.experiment {
            Experiment::InviscidDamping | Experiment::VorticityDepletion => {
                if self.experiment == Experiment::VorticityDepletion {
                    named_profile(&self.data_odd, 2.0, 8)?;
                }
                if !(self.t_min > 0.0 && self.t_max >= 10.0 * self.t_min) {
                    return cfg(format!("window [{}, {}] must span at least one decade", self.t_min, self.t_max));
                }
                let amin = self.alpha.iter().fold(f64::MAX, |m, a| m.min(a.abs()));
                if self.t_min < 2.0 * PI / amin {
                    return cfg(format!("t_min = {} is below 2*pi/alpha = {}", self.t_min, 2.0 * PI / amin));
                }
                if self.samples < 3 {
                    return cfg("samples must be at least 3".into());
                }
            }
            Experiment::KernelDiagnostics | Experiment::WaveOperatorSuite => {
                if self.m < 16 || self.m % 2 != 0 {
                    return cfg(format!("m = {} must be even and at least 16", self.m));
                }
            }
            Experiment::ToyModel => {
                self.check_nu()?;
                for &nu in &self.nu {
                    if nu >= self.a.abs() {
                        return cfg(format!("nu = {nu} must be below |a| = {}", self.a.abs()));
                    }
                }
                self.check_dt()?;
            }
            Experiment::EnhancedDissipation => {
                self.check_nu()?;
                if !(self.tau > 0.0) || self.a0 == 0.0 {
                    return cfg(format!("need tau > 0 and a0 != 0, got {} and {}", self.tau, self.a0));
                }
                if self.nu.len() < 2 {
                    return cfg("nu: the sweep needs at least two values".into());
                }
                self.check_dt()?;
            }
            Experiment::NonlinearTheorem14 => {
                self.check_nu()?;
                for c in self.theorem14_configs() {
                    c.validate().map_err(|e| Error::Config(e.to_string()))?;
                }
                if self.n < 8 || self.n % 2 != 0 {
                    return cfg(format!("n = {} must be even and at least 8", self.n));
                }
                self.check_dt()?;
            }
            Experiment::CrossValidation => {
                if self.times.iter().any(|t| !(*t >= 0.0)) {
                    return cfg("times must be non-negative".into());
                }
                self.check_dt()?;
            }
        }
        Ok(())
    }

    fn check_nu(&self) -> Result<()> {
        if self.nu.is_empty() || self.nu.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config(format!("nu = {:?}: every value must be positive", self.nu)));
        }
        Ok(())
    }

    fn check_dt(&self) -> Result<()> {
        match self.dt {
            Some(dt) if !(dt > 0.0) => Err(Error::Config(format!("dt = {dt} must be positive"))),
            _ => Ok(()),
        }
    }

    fn theorem14_configs(&self) -> Vec<Theorem14Config> {
        self.nu
            .iter()
            .map(|&nu| Theorem14Config {
                nu,
                gamma: self.gamma,
                c1: self.c1,
                tau: self.tau,
                seed: self.seed,
                delta: self.delta,
                n: self.n,
                dt: self.dt,
                pert_modes: self.pert_modes,
                samples: self.samples,
                ..Default::default()
            })
            .collect()
    }
}

/// Named initial mode profiles.
pub fn named_profile(name: &str, alpha: f64, ny: usize) -> Result<ModeProfile> {
    let f: fn(f64) -> f64 = match name {
        "sin2y" => |y| (2.0 * y).sin(),
        "cos2y" => |y| (2.0 * y).cos(),
        "mixed" => |y| (2.0 * y).sin() + 0.5 * (2.0 * y).cos() - 0.25 * y.cos(),
        "cosy+0.7sin2y" => |y| y.cos() + 0.7 * (2.0 * y).sin(),
        _ => return Err(Error::Config(format!("data: unknown profile '{name}' (sin2y, cos2y, mixed, cosy+0.7sin2y)"))),
    };
    Ok(ModeProfile::from_fn(alpha, ny, |y| Complex64::new(f(y), 0.0)))
}

fn tag(v: f64) -> String {
    format!("{v:e}")
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

/// Runs the experiment, writing `manifest.json`, `summary.json` and CSV files
/// into `cfg.out`. Returns the summary.
pub fn run(cfg: &ExperimentConfig) -> Result<Value> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let manifest = json!({
        "experiment": cfg.experiment.name(),
        "library": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
    });
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    let summary = match cfg.experiment {
        Experiment::InviscidDamping => inviscid_damping(cfg)?,
        Experiment::VorticityDepletion => vorticity_depletion(cfg)?,
        Experiment::KernelDiagnostics => kernel_diagnostics(cfg)?,
        Experiment::WaveOperatorSuite => wave_operator_suite(cfg)?,
        Experiment::ToyModel => toy_model(cfg)?,
        Experiment::EnhancedDissipation => enhanced_dissipation(cfg)?,
        Experiment::NonlinearTheorem14 => nonlinear_theorem14(cfg)?,
        Experiment::CrossValidation => cross_validation(cfg)?,
    };
    write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(summary)
}

fn decay_runs(cfg: &ExperimentConfig, data: &str, quantities: &[DecayQuantity], prefix: &str) -> Result<Vec<Value>> {
    let times = log_space(cfg.t_min, cfg.t_max, cfg.samples);
    let mut out = Vec::new();
    for &alpha in &cfg.alpha {
        let w = named_profile(data, alpha, cfg.ny)?;
        let sol = solve_inviscid(&w, &times)?;
        sol.write_csv(&cfg.out.join(format!("{prefix}_{data}_alpha{}.csv", tag(alpha))))?;
        let fits = quantities.iter().map(|q| measure_decay(&sol, *q, (cfg.t_min, cfg.t_max))).collect::<Result<Vec<_>>>()?;
        out.push(json!({ "alpha": alpha, "data": data, "fits": fits }));
    }
    Ok(out)
}

fn inviscid_damping(cfg: &ExperimentConfig) -> Result<Value> {
    let runs = decay_runs(cfg, &cfg.data, &[DecayQuantity::V, DecayQuantity::V1, DecayQuantity::V2], "velocity")?;
    Ok(json!({ "window": [cfg.t_min, cfg.t_max], "runs": runs }))
}

fn vorticity_depletion(cfg: &ExperimentConfig) -> Result<Value> {
    let mut runs = decay_runs(cfg, &cfg.data, &[DecayQuantity::OmegaCritical, DecayQuantity::V2Critical], "critical")?;
    runs.extend(decay_runs(cfg, &cfg.data_odd, &[DecayQuantity::V1Critical], "critical")?);
    Ok(json!({ "window": [cfg.t_min, cfg.t_max], "runs": runs }))
}

fn kernel_diagnostics(cfg: &ExperimentConfig) -> Result<Value> {
    let mut per_alpha = Vec::new();
    for &alpha in &cfg.alpha {
        let mut w = csv::Writer::from_path(cfg.out.join(format!("kernel_set_alpha{}.csv", tag(alpha))))?;
        w.write_record(["c", "II", "A", "B", "A1", "B1", "J0", "J1"])?;
        for j in 0..cfg.m {
            let c = -1.0 + (j as f64 + 0.5) * 2.0 / cfg.m as f64;
            let k = compute_kernel_set(alpha, c)?;
            w.serialize((c, k.ii, k.a, k.b, k.a1, k.b1, k.j0, k.j1))?;
        }
        w.flush()?;

        let grid = CGrid::new(256)?;
        let p = |f: fn(f64) -> f64| ModeProfile::from_fn(alpha, cfg.ny, move |y| Complex64::new(f(y), 0.0));
        let ko = assemble_dual_kernel(KernelKind::Odd, &p(|y| (2.0 * y).sin()), Some(&p(f64::sin)), &grid)?;
        let ke = assemble_dual_kernel(KernelKind::Even, &p(|y| (2.0 * y).cos() + 0.3), Some(&p(f64::cos)), &grid)?;
        ko.write_csv(&cfg.out.join(format!("kernel_odd_alpha{}.csv", tag(alpha))))?;
        ke.write_csv(&cfg.out.join(format!("kernel_even_alpha{}.csv", tag(alpha))))?;
        per_alpha.push(json!({
            "alpha": alpha,
            "odd_endpoint_ratio": ko.endpoint_ratio(),
            "even_endpoint_ratio": ke.endpoint_ratio(),
        }));
    }
    let cosy = ModeProfile::from_fn(2.0, cfg.ny, |y| Complex64::new(y.cos(), 0.0));
    let ii11 = compute_ii11(&cosy, 0.0)?;
    let ys = periodic_grid(cfg.ny);
    let h1 = hilbert_transform(&vec![Complex64::new(1.0, 0.0); cfg.ny]).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let hc = hilbert_transform(&ys.iter().map(|y| Complex64::new(y.cos(), 0.0)).collect::<Vec<_>>());
    let hc_err = hc.iter().zip(&ys).map(|(v, y)| (v - 2.0 * PI * y.sin()).norm()).fold(0.0, f64::max);
    Ok(json!({
        "alphas": per_alpha,
        "ii11_cos_at_0": ii11.re,
        "ii11_cos_at_0_error": (ii11 - Complex64::new(-2.0, 0.0)).norm(),
        "hilbert_of_one_max": h1,
        "hilbert_of_cos_error": hc_err,
    }))
}

fn wave_operator_suite(cfg: &ExperimentConfig) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inputs: Vec<TrigPoly> = (0..cfg.random_inputs).map(|_| random_trig_poly(&mut rng, 8)).collect();
    let example = named_profile(&cfg.data, 2.0, cfg.ny)?.to_trig().trimmed(1e-14);
    let mut per_alpha = Vec::new();
    let mut ratios = Vec::new();
    for &alpha in &cfg.alpha {
        let op = WaveOperator::new(alpha, CGrid::new(cfg.m)?)?;
        op.apply(&example).write_csv(&cfg.out.join(format!("wave_image_alpha{}.csv", tag(alpha))))?;
        let (d, q) = op.norm_identity(&example);
        let lower = 1.0 - 1.0 / (alpha * alpha);
        let mut slack = f64::MAX;
        for w in &inputs {
            let n = w.norm_sq();
            let dn = op.apply(w).norm_sq();
            slack = slack.min((dn - lower * n) / n).min((n - dn) / n);
        }
        let r1 = op.intertwining_residual(&example);
        let r2 = WaveOperator::new(alpha, CGrid::new(2 * cfg.m)?)?.intertwining_residual(&example);
        let cr: Vec<f64> = inputs.iter().take(10).map(|w| op.commutator_ratio(w)).collect();
        ratios.extend(&cr);
        per_alpha.push(json!({
            "alpha": alpha,
            "norm_identity_rel": ((d - q) / q).abs(),
            "bound_slack_min": slack,
            "intertwining_residual": r1,
            "intertwining_residual_doubled": r2,
            "commutator_ratio_max": cr.iter().copied().fold(0.0, f64::max),
        }));
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    Ok(json!({ "alphas": per_alpha, "commutator_spread": hi / lo }))
}

fn toy_model(cfg: &ExperimentConfig) -> Result<Value> {
    let w0 = named_profile(&cfg.data, 1.0, cfg.ny)?.to_trig().trimmed(1e-14);
    let mut runs = Vec::new();
    for &nu in &cfg.nu {
        let t_end = (nu * cfg.a.abs()).powf(-0.5);
        let tr = solve_toy_model(&w0, nu, cfg.a, t_end, cfg.dt.unwrap_or(0.02), cfg.samples)?;
        tr.write_csv(&cfg.out.join(format!("toy_nu{}.csv", tag(nu))))?;
        runs.push(json!({
            "nu": nu,
            "a": cfg.a,
            "t_end": t_end,
            "monotonicity_violation": tr.monotonicity_violation(),
            "envelope_constant": tr.envelope_constant(1.0, t_end),
        }));
    }
    Ok(json!({ "runs": runs }))
}

fn enhanced_dissipation(cfg: &ExperimentConfig) -> Result<Value> {
    let opts = DissipationOptions { dt: cfg.dt, samples: cfg.samples, ..Default::default() };
    let mut runs = Vec::new();
    let mut sweeps = Vec::new();
    for &alpha in &cfg.alpha {
        let w0 = named_profile(&cfg.data, alpha, cfg.ny)?;
        let (mut nus, mut tds) = (Vec::new(), Vec::new());
        for &nu in &cfg.nu {
            let r = enhanced_dissipation_metrics(&w0, nu, cfg.a0, cfg.tau, &opts)?;
            r.write_csv(&cfg.out.join(format!("dissipation_alpha{}_nu{}.csv", tag(alpha), tag(nu))))?;
            nus.push(nu);
            tds.push(r.t_d);
            let mut v = serde_json::to_value(&r)?;
            v["velocity_factor_spread"] = json!(r.velocity_factor_spread(r.c_fit));
            runs.push(v);
        }
        let fit = loglog_fit(&nus, &tds)?;
        sweeps.push(json!({ "alpha": alpha, "t_d_slope": fit.slope, "t_d_residual": fit.residual }));
    }
    Ok(json!({ "runs": runs, "sweeps": sweeps }))
}

fn nonlinear_theorem14(cfg: &ExperimentConfig) -> Result<Value> {
    let mut runs = Vec::new();
    for c in cfg.theorem14_configs() {
        let r = run_theorem14(&c)?;
        r.write_csv(&cfg.out.join(format!("theorem14_nu{}.csv", tag(c.nu))))?;
        if let Some(st) = &r.final_state {
            let f = fs::File::create(cfg.out.join(format!("final_state_nu{}.bin", tag(c.nu))))?;
            st.to_field().write_binary(std::io::BufWriter::new(f))?;
        }
        runs.push(json!({
            "config": r.config,
            "dt": r.dt,
            "steps": r.steps,
            "c3": r.c3,
            "fit_window": r.fit_window,
            "fit_samples": r.fit_samples,
            "p2_band": r.p2_band,
            "p2_band_heat": r.p2_band_heat,
            "energy_closure": r.energy_closure,
            "complement_over_nu_gamma": r.complement_over_nu_gamma,
            "nonshear_monotone_fraction": r.nonshear_monotone_fraction,
        }));
    }
    Ok(json!({ "runs": runs }))
}

fn cross_validation(cfg: &ExperimentConfig) -> Result<Value> {
    let mut rows = Vec::new();
    let mut w = csv::Writer::from_path(cfg.out.join("cross_validation.csv"))?;
    w.write_record(["alpha", "t", "psi_rel_dist"])?;
    let mut worst = 0.0f64;
    for &alpha in &cfg.alpha {
        let w0 = named_profile(&cfg.data, alpha, cfg.ny)?;
        let sol = solve_inviscid(&w0, &cfg.times)?;
        let run = direct_stepper_lin_euler(&w0, &cfg.times, cfg.dt.unwrap_or(0.01))?;
        for (i, &t) in cfg.times.iter().enumerate() {
            let ny = sol.psi[i].ny();
            let d = sol.psi[i].rel_dist(&run.psi_profile(i, ny));
            worst = worst.max(d);
            w.serialize((alpha, t, d))?;
            rows.push(json!({ "alpha": alpha, "t": t, "psi_rel_dist": d }));
        }
    }
    w.flush()?;
    Ok(json!({ "rows": rows, "max_rel_dist": worst, "tol": cfg.tol, "within_tol": worst <= cfg.tol }))
}
