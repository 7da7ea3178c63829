//! The free propagator `e^{t∂ₓ|D|}` and an integrating-factor RK4 solver for
//! `∂ₜu = ∂ₓ|D|u − ∂ₓ(u²)` on the periodic box.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{fourier_multiplier, szego_project, Grid1D, SampledField};
use crate::io::write_atomic;

/// Largest admissible `dt·ξ_max²` over the retained modes.
pub const MAX_PHASE_STEP: f64 = 1.5;

/// Relative energy allowed in the top tenth of the frequencies of `u₀`.
pub const SPECTRAL_GUARD: f64 = 1e-8;

/// `e^{t∂ₓ|D|}`, the multiplier `e^{itξ|ξ|}`.
pub fn free_propagate(f: &SampledField, t: f64) -> SampledField {
    fourier_multiplier(f, |xi| Complex64::from_polar(1.0, t * xi * xi.abs()), true)
}

/// Solver settings for [`bo_evolve_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    /// Upper bound on the step; each output interval is split evenly.
    pub dt: f64,
    /// Fraction of the Nyquist index kept by the dealiasing mask, in `[1/2, 2/3]`.
    pub dealias: f64,
    /// Increasing positive output times; `t = 0` is always recorded first.
    pub output_times: Vec<f64>,
    /// Relative L² drift that triggers an accuracy error.
    pub l2_tolerance: f64,
}

impl EvolveConfig {
    pub fn new(t_final: f64, dt: f64) -> Self {
        EvolveConfig {
            dt,
            dealias: 2.0 / 3.0,
            output_times: vec![t_final],
            l2_tolerance: 1e-8,
        }
    }
}

/// Snapshots of an evolution with the mean and L² norm of each.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub times: Vec<f64>,
    pub fields: Vec<SampledField>,
    pub means: Vec<f64>,
    pub l2_norms: Vec<f64>,
    /// Steps actually taken.
    pub steps: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    grid: &'a Grid1D,
    times: &'a [f64],
    means: &'a [f64],
    l2_norms: &'a [f64],
    files: Vec<String>,
}

impl Trajectory {
    pub fn last(&self) -> &SampledField {
        self.fields.last().expect("trajectory holds the initial field")
    }

    /// `max_t |‖u(t)‖₂ − ‖u(0)‖₂| / ‖u(0)‖₂` (absolute when `u₀ = 0`).
    pub fn l2_drift(&self) -> f64 {
        let base = self.l2_norms[0];
        let scale = if base > 0.0 { base } else { 1.0 };
        self.l2_norms.iter().map(|v| (v - base).abs() / scale).fold(0.0, f64::max)
    }

    pub fn mean_drift(&self) -> f64 {
        let base = self.means[0];
        self.means.iter().map(|v| (v - base).abs()).fold(0.0, f64::max)
    }

    /// One `snapshot_NNNN.csv` (columns `x,u`) per time plus `manifest.json`.
    pub fn dump(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for (i, f) in self.fields.iter().enumerate() {
            let name = format!("snapshot_{i:04}.csv");
            let mut text = String::from("x,u\n");
            for (j, v) in f.values().iter().enumerate() {
                text.push_str(&format!("{:.16e},{:.16e}\n", self.grid.x(j), v.re));
            }
            write_atomic(&dir.join(&name), text.as_bytes())?;
            files.push(name);
        }
        let manifest = Manifest {
            grid: &self.grid,
            times: &self.times,
            means: &self.means,
            l2_norms: &self.l2_norms,
            files,
        };
        let json = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Io(e.into()))?;
        write_atomic(&dir.join("manifest.json"), &json)
    }
}

/// Evolve to `t_final` with outputs at `0` and `t_final`.
pub fn bo_evolve(u0: &SampledField, t_final: f64, dt: f64, dealias: f64) -> Result<Trajectory> {
    let mut cfg = EvolveConfig::new(t_final, dt);
    cfg.dealias = dealias;
    bo_evolve_with(u0, &cfg)
}

struct Stepper {
    n: usize,
    xi: Vec<f64>,
    mask: Vec<bool>,
}

impl Stepper {
    /// `−iξ·FFT(u²)` on the retained modes, with `u` built from the retained
    /// modes of `v`.
    fn nonlinear(&self, v: &[Complex64]) -> Vec<Complex64> {
        let inv_n = 1.0 / self.n as f64;
        let mut buf: Vec<Complex64> = v
            .iter()
            .zip(&self.mask)
            .map(|(c, &keep)| if keep { *c * inv_n } else { Complex64::new(0.0, 0.0) })
            .collect();
        fft::inverse(&mut buf);
        for b in buf.iter_mut() {
            *b = Complex64::new(b.re * b.re, 0.0);
        }
        fft::forward(&mut buf);
        for ((b, &xi), &keep) in buf.iter_mut().zip(&self.xi).zip(&self.mask) {
            *b = if keep { Complex64::new(0.0, -xi) * *b } else { Complex64::new(0.0, 0.0) };
        }
        buf
    }

    fn step(&self, v: &mut [Complex64], half: &[Complex64], full: &[Complex64], h: f64) {
        let n = self.n;
        let k1 = self.nonlinear(v);
        let s: Vec<Complex64> = (0..n).map(|j| half[j] * (v[j] + 0.5 * h * k1[j])).collect();
        let k2 = self.nonlinear(&s);
        let s: Vec<Complex64> = (0..n).map(|j| half[j] * v[j] + 0.5 * h * k2[j]).collect();
        let k3 = self.nonlinear(&s);
        let s: Vec<Complex64> = (0..n).map(|j| full[j] * v[j] + h * half[j] * k3[j]).collect();
        let k4 = self.nonlinear(&s);
        for j in 0..n {
            v[j] = full[j] * v[j] + h / 6.0 * (full[j] * k1[j] + 2.0 * half[j] * (k2[j] + k3[j]) + k4[j]);
        }
    }
}

/// Relative energy of `f` in the top tenth of the box frequencies.
pub fn high_frequency_energy(f: &SampledField) -> f64 {
    let grid = f.grid();
    let c = f.coefficients();
    let cutoff = 0.9 * (grid.n() / 2) as f64;
    let (mut high, mut total) = (0.0, 0.0);
    for (j, v) in c.iter().enumerate() {
        total += v.norm_sqr();
        if grid.wavenumber(j).abs() as f64 > cutoff {
            high += v.norm_sqr();
        }
    }
    if total > 0.0 {
        high / total
    } else {
        0.0
    }
}

pub fn bo_evolve_with(u0: &SampledField, cfg: &EvolveConfig) -> Result<Trajectory> {
    let grid = *u0.grid();
    let n = grid.n();
    if !u0.is_real() {
        return Err(Error::InvalidParameter("bo_evolve needs a real initial field".into()));
    }
    if !(0.5..=2.0 / 3.0 + 1e-12).contains(&cfg.dealias) {
        return Err(Error::InvalidParameter(format!(
            "dealias fraction {} outside [1/2, 2/3]",
            cfg.dealias
        )));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {}", cfg.dt)));
    }
    let mut prev = 0.0;
    for &t in &cfg.output_times {
        if !(t > prev) || !t.is_finite() {
            return Err(Error::InvalidParameter(
                "output times must be finite, positive and increasing".into(),
            ));
        }
        prev = t;
    }
    let cut = cfg.dealias * (n / 2) as f64;
    let mask: Vec<bool> = (0..n).map(|j| (grid.wavenumber(j).abs() as f64) < cut).collect();
    let xi: Vec<f64> = (0..n).map(|j| grid.frequency(j)).collect();
    let xi_max = (0..n).filter(|&j| mask[j]).map(|j| xi[j].abs()).fold(0.0, f64::max);
    if cfg.dt * xi_max * xi_max > MAX_PHASE_STEP {
        return Err(Error::InvalidParameter(format!(
            "dt = {} does not resolve the stiffest retained mode: dt*xi_max^2 = {:.3} > {MAX_PHASE_STEP}",
            cfg.dt,
            cfg.dt * xi_max * xi_max
        )));
    }
    let high = high_frequency_energy(u0);
    if high > SPECTRAL_GUARD {
        return Err(Error::InvalidParameter(format!(
            "initial field carries {high:.2e} of its energy in the top 10% of frequencies; refine the grid"
        )));
    }

    let stepper = Stepper { n, xi, mask };
    let mut v = u0.values().to_vec();
    fft::forward(&mut v);
    for (c, &keep) in v.iter_mut().zip(&stepper.mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }

    let mut traj = Trajectory {
        grid,
        times: Vec::new(),
        fields: Vec::new(),
        means: Vec::new(),
        l2_norms: Vec::new(),
        steps: 0,
    };
    record(&mut traj, &v, 0.0)?;
    let mut t = 0.0;
    for &target in &cfg.output_times {
        let span = target - t;
        let count = (span / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = span / count as f64;
        let half: Vec<Complex64> = stepper
            .xi
            .iter()
            .map(|&x| Complex64::from_polar(1.0, 0.5 * h * x * x.abs()))
            .collect();
        let full: Vec<Complex64> = half.iter().map(|e| e * e).collect();
        for s in 0..count {
            stepper.step(&mut v, &half, &full, h);
            if v.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::BlowUp {
                    t: t + (s + 1) as f64 * h,
                });
            }
        }
        traj.steps += count;
        t = target;
        record(&mut traj, &v, t)?;
        let drift = traj.l2_drift();
        if drift > cfg.l2_tolerance {
            return Err(Error::Accuracy(format!(
                "relative L2 drift {drift:.3e} exceeds {:.3e} at t = {t}",
                cfg.l2_tolerance
            )));
        }
        let scale = traj.means[0].abs().max(1.0);
        if traj.mean_drift() > 1e-12 * scale {
            return Err(Error::Accuracy(format!(
                "mean drifted by {:.3e} at t = {t}",
                traj.mean_drift()
            )));
        }
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, v: &[Complex64], t: f64) -> Result<()> {
    let grid = traj.grid;
    let n = grid.n() as f64;
    let mut buf = v.to_vec();
    fft::inverse(&mut buf);
    let values: Vec<f64> = buf.iter().map(|c| c.re / n).collect();
    let energy: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>() / (n * n);
    traj.times.push(t);
    traj.means.push(v[0].re / n);
    traj.l2_norms.push((grid.length() * energy).sqrt());
    traj.fields.push(SampledField::from_real(grid, values)?);
    Ok(())
}

/// `(‖Πu_in‖₂, ‖Πu_out‖₂)` from the Hardy coefficients of both fields.
pub fn contraction_check(u_in: &SampledField, u_out: &SampledField) -> (f64, f64) {
    (
        szego_project(u_in).norm_sq().sqrt(),
        szego_project(u_out).norm_sq().sqrt(),
    )
}

/// Speed `(2π/L) coth(2πy/L)` of the exact periodic one-soliton of width `y`.
pub fn periodic_soliton_speed(length: f64, y: f64) -> f64 {
    let g = 2.0 * PI * y / length;
    2.0 * PI / length / g.tanh()
}

/// Exact periodic one-soliton: the box periodisation of `2y/(x² + y²)`,
/// `(2π/L) sinh γ / (cosh γ − cos(2π(x − ct − x₀)/L))` with `γ = 2πy/L`,
/// travelling at [`periodic_soliton_speed`].
pub fn periodic_soliton(grid: Grid1D, y: f64, x0: f64, t: f64) -> Result<SampledField> {
    if !(y > 0.0) {
        return Err(Error::InvalidParameter(format!("soliton width must be positive, got {y}")));
    }
    let l = grid.length();
    let g = 2.0 * PI * y / l;
    let c = periodic_soliton_speed(l, y);
    Ok(SampledField::from_fn(grid, |x| {
        2.0 * PI / l * g.sinh() / (g.cosh() - (2.0 * PI * (x - c * t - x0) / l).cos())
    }))
}

/// Position of the maximum, refined by a parabola through the neighbours.
pub fn crest_position(f: &SampledField) -> f64 {
    let v = f.real_values();
    let n = v.len();
    let (j, _) = v
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    let (a, b, c) = (v[(j + n - 1) % n], v[j], v[(j + 1) % n]);
    let denom = a - 2.0 * b + c;
    let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    f.grid().x(j) + shift * f.grid().dx()
}
