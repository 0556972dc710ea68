//! Composite Gauss–Legendre panels with spectral cumulative integration
//! and barycentric interpolation.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

/// Scalars that can be integrated on panels (real or complex samples).
pub trait Scalar: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Gauss–Legendre rule on [−1,1] with its cumulative-integration matrix.
#[derive(Debug, Clone)]
pub struct GlRule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// `cum[i*p + j]`: weight of f(x_j) in ∫_{−1}^{x_i} f.
    pub cum: Vec<f64>,
    /// Barycentric weights.
    pub bary: Vec<f64>,
}

fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

impl GlRule {
    pub fn new(p: usize) -> Self {
        assert!(p >= 2);
        let mut x = vec![0.0; p];
        let mut w = vec![0.0; p];
        for i in 0..p {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
            for _ in 0..100 {
                let l = legendre_all(p, z);
                let dp = p as f64 * (z * l[p] - l[p - 1]) / (z * z - 1.0);
                let dz = l[p] / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let l = legendre_all(p, z);
            let dp = p as f64 * (z * l[p] - l[p - 1]) / (z * z - 1.0);
            x[p - 1 - i] = z;
            w[p - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        let pj: Vec<Vec<f64>> = x.iter().map(|&xj| legendre_all(p, xj)).collect();
        let mut cum = vec![0.0; p * p];
        for i in 0..p {
            let pi = &pj[i];
            for j in 0..p {
                let mut s = 0.5 * (x[i] + 1.0);
                for n in 1..p {
                    s += 0.5 * pj[j][n] * (pi[n + 1] - pi[n - 1]);
                }
                cum[i * p + j] = w[j] * s;
            }
        }
        let bary = (0..p)
            .map(|j| {
                let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
                sgn * ((1.0 - x[j] * x[j]) * w[j]).sqrt()
            })
            .collect();
        Self { x, w, cum, bary }
    }

    pub fn order(&self) -> usize {
        self.x.len()
    }

    /// Default 16-point rule, built once.
    pub fn default_rule() -> &'static GlRule {
        static RULE: OnceLock<GlRule> = OnceLock::new();
        RULE.get_or_init(|| GlRule::new(16))
    }

    /// Barycentric interpolation of samples at the nodes, evaluated at `t ∈ [−1,1]`.
    pub fn interp<T: Scalar>(&self, vals: &[T], t: f64) -> T {
        let mut num = T::default();
        let mut den = 0.0;
        for j in 0..self.x.len() {
            let d = t - self.x[j];
            if d == 0.0 {
                return vals[j];
            }
            let q = self.bary[j] / d;
            num = num + vals[j] * q;
            den += q;
        }
        num * (1.0 / den)
    }
}

/// Composite Gauss–Legendre discretization of an interval.
#[derive(Debug, Clone)]
pub struct Panels {
    pub breaks: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    rule: &'static GlRule,
}

impl Panels {
    /// Panels between consecutive (strictly increasing) breakpoints.
    pub fn new(breaks: Vec<f64>) -> Self {
        let rule = GlRule::default_rule();
        let p = rule.order();
        let mut nodes = Vec::with_capacity(p * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for k in 0..breaks.len() - 1 {
            let (a, b) = (breaks[k], breaks[k + 1]);
            let h = 0.5 * (b - a);
            for j in 0..p {
                nodes.push(a + h * (rule.x[j] + 1.0));
                weights.push(h * rule.w[j]);
            }
        }
        Self { breaks, nodes, weights, rule }
    }

    /// Uniform subdivision of `[a,b]` into panels no longer than `hmax`.
    pub fn uniform_breaks(a: f64, b: f64, hmax: f64) -> Vec<f64> {
        let n = ((b - a) / hmax).ceil().max(1.0) as usize;
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn integrate<T: Scalar>(&self, f: &[T]) -> T {
        f.iter().zip(&self.weights).fold(T::default(), |s, (&v, &w)| s + v * w)
    }

    /// Values at the nodes of `∫_{breaks[kb]}^{y} f`.
    pub fn cumint_from<T: Scalar>(&self, f: &[T], kb: usize) -> Vec<T> {
        let p = self.order();
        let q = &self.rule.cum;
        let mut out = vec![T::default(); f.len()];
        let mut acc = T::default();
        for k in kb..self.n_panels() {
            let h = 0.5 * (self.breaks[k + 1] - self.breaks[k]);
            let fs = &f[k * p..(k + 1) * p];
            for i in 0..p {
                let mut s = T::default();
                for j in 0..p {
                    s = s + fs[j] * q[i * p + j];
                }
                out[k * p + i] = acc + s * h;
            }
            let mut tot = T::default();
            for j in 0..p {
                tot = tot + fs[j] * (self.rule.w[j] * h);
            }
            acc = acc + tot;
        }
        let mut acc = T::default();
        for k in (0..kb).rev() {
            let h = 0.5 * (self.breaks[k + 1] - self.breaks[k]);
            let fs = &f[k * p..(k + 1) * p];
            for i in 0..p {
                let mut s = T::default();
                for j in 0..p {
                    s = s + fs[j] * q[(p - 1 - i) * p + (p - 1 - j)];
                }
                out[k * p + i] = T::default() - (acc + s * h);
            }
            let mut tot = T::default();
            for j in 0..p {
                tot = tot + fs[j] * (self.rule.w[j] * h);
            }
            acc = acc + tot;
        }
        out
    }

    /// Index of the panel containing `y` (clamped to the ends).
    pub fn locate(&self, y: f64) -> usize {
        let n = self.n_panels();
        match self.breaks.binary_search_by(|b| b.partial_cmp(&y).unwrap()) {
            Ok(k) => k.min(n - 1),
            Err(k) => k.saturating_sub(1).min(n - 1),
        }
    }

    /// Interpolated value of the node samples at `y`.
    pub fn eval<T: Scalar>(&self, vals: &[T], y: f64) -> T {
        let k = self.locate(y);
        let p = self.order();
        let (a, b) = (self.breaks[k], self.breaks[k + 1]);
        let t = (2.0 * y - a - b) / (b - a);
        self.rule.interp(&vals[k * p..(k + 1) * p], t)
    }

    /// Interpolated value using the panel to the left of breakpoint `kb` (`left`)
    /// or to the right of it.
    pub fn eval_at_break<T: Scalar>(&self, vals: &[T], kb: usize, left: bool) -> T {
        let p = self.order();
        if left {
            self.rule.interp(&vals[(kb - 1) * p..kb * p], 1.0)
        } else {
            self.rule.interp(&vals[kb * p..(kb + 1) * p], -1.0)
        }
    }
}
