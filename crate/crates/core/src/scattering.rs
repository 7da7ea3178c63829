//! Jost functions, distorted Fourier coefficients and the radiation profile.
//!
//! For `λ > 0` the Jost function solves `(D − T_u)m = λm` with
//! `e^{−iλx}m(x) → 1` as `x → −∞`. On the box it is the fixed point of
//! `m = e^{iλ·} + iK m`, `K m(x) = ∫_{x_min}^x e^{iλ(x−y)} Π(u m)(y) dy`, with the
//! projector applied on the periodic grid and the integral by the trapezoid
//! rule.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{szego_project, to_real_field, Grid1D, HardyCoeffs, SampledField};
use crate::fft;

/// Default fixed-point tolerance on `max |m − (e^{iλ·} + iKm)|`.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const DEFAULT_MAX_ITER: usize = 200;

/// Largest grid on which the dense `(1 − iK)` fallback is attempted.
pub const DENSE_LIMIT: usize = 2048;

/// Jost function `m_-(·, λ)` on a grid.
#[derive(Debug, Clone)]
pub struct JostSolution {
    pub grid: Grid1D,
    pub lambda: f64,
    pub m: Vec<Complex64>,
    /// `max |m − (e^{iλ·} + iKm)|`.
    pub residual: f64,
    /// Fixed-point iterations used; zero when the dense solve produced `m`.
    pub iterations: usize,
    pub dense: bool,
}

impl JostSolution {
    /// `|e^{−iλ x_min} m(x_min) − 1|`.
    pub fn boundary_defect(&self) -> f64 {
        let x0 = self.grid.x_min();
        (Complex64::from_polar(1.0, -self.lambda * x0) * self.m[0] - 1.0).norm()
    }

    /// `ρ = m − e^{iλ·}`.
    pub fn rho(&self) -> Vec<Complex64> {
        let grid = self.grid;
        self.m
            .iter()
            .enumerate()
            .map(|(j, m)| m - Complex64::from_polar(1.0, self.lambda * grid.x(j)))
            .collect()
    }
}

/// The Volterra operator `K_{u,λ}` on one grid.
struct Kernel<'a> {
    u: &'a [f64],
    phase: Vec<Complex64>,
    dx: f64,
}

impl<'a> Kernel<'a> {
    fn new(u: &'a [f64], grid: Grid1D, lambda: f64) -> Self {
        Kernel {
            u,
            phase: (0..grid.n()).map(|j| Complex64::from_polar(1.0, lambda * grid.x(j))).collect(),
            dx: grid.dx(),
        }
    }

    /// `e^{iλ·} + iKm`.
    fn step(&self, m: &[Complex64]) -> Vec<Complex64> {
        let mut k = self.apply(m);
        for (kj, e) in k.iter_mut().zip(&self.phase) {
            *kj = e + Complex64::i() * *kj;
        }
        k
    }

    fn apply(&self, m: &[Complex64]) -> Vec<Complex64> {
        let n = m.len();
        let mut buf: Vec<Complex64> = m.iter().zip(self.u).map(|(m, u)| m * u).collect();
        fft::forward(&mut buf);
        let scale = 1.0 / n as f64;
        for (j, c) in buf.iter_mut().enumerate() {
            if j == 0 || j >= n / 2 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= scale;
            }
        }
        fft::inverse(&mut buf);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev = Complex64::new(0.0, 0.0);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let g = self.phase[j].conj() * buf[j];
            if j > 0 {
                acc += 0.5 * self.dx * (prev + g);
            }
            prev = g;
            out[j] = self.phase[j] * acc;
        }
        out
    }

    fn residual(&self, m: &[Complex64]) -> f64 {
        let next = self.step(m);
        max_diff(&next, m)
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

fn check_input(u0: &SampledField, lambda: f64) -> Result<()> {
    if !u0.is_real() {
        return Err(Error::InvalidParameter("Jost solve needs a real field".into()));
    }
    let dxi = u0.grid().dxi();
    if !(lambda >= dxi * (1.0 - 1e-12)) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} must be at least the frequency spacing {dxi}"
        )));
    }
    Ok(())
}

/// Fixed-point iteration, then a dense solve of `(1 − iK)m = e^{iλ·}` on
/// grids up to [`DENSE_LIMIT`] points.
pub fn jost_solve(u0: &SampledField, lambda: f64, tol: f64, max_iter: usize) -> Result<JostSolution> {
    check_input(u0, lambda)?;
    let grid = *u0.grid();
    let u = u0.real_values();
    let kernel = Kernel::new(&u, grid, lambda);
    let mut m = kernel.phase.clone();
    let mut residual = f64::INFINITY;
    for it in 0..max_iter {
        let next = kernel.step(&m);
        residual = max_diff(&next, &m);
        if residual <= tol {
            return Ok(JostSolution {
                grid,
                lambda,
                m,
                residual,
                iterations: it,
                dense: false,
            });
        }
        if !residual.is_finite() {
            break;
        }
        m = next;
    }
    if grid.n() > DENSE_LIMIT {
        return Err(Error::NonConvergence {
            lambda,
            iterations: max_iter,
            residual,
        });
    }
    let m = dense_solve(&kernel, grid.n()).ok_or(Error::NonConvergence {
        lambda,
        iterations: max_iter,
        residual,
    })?;
    let residual = kernel.residual(&m);
    if !(residual <= tol) {
        return Err(Error::NonConvergence {
            lambda,
            iterations: max_iter,
            residual,
        });
    }
    Ok(JostSolution {
        grid,
        lambda,
        m,
        residual,
        iterations: 0,
        dense: true,
    })
}

fn dense_solve(kernel: &Kernel, n: usize) -> Option<Vec<Complex64>> {
    let mut a = DMatrix::<Complex64>::identity(n, n);
    let mut unit = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        unit[j] = Complex64::new(1.0, 0.0);
        let col = kernel.apply(&unit);
        unit[j] = Complex64::new(0.0, 0.0);
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] -= Complex64::i() * v;
        }
    }
    let rhs = DVector::from_vec(kernel.phase.clone());
    a.lu().solve(&rhs).map(|v| v.data.into())
}

/// One fixed-point step from `e^{iλ·}`: `m ≈ e^{iλ·} + iK e^{iλ·}`.
pub fn born_jost(u0: &SampledField, lambda: f64) -> Result<JostSolution> {
    check_input(u0, lambda)?;
    let grid = *u0.grid();
    let u = u0.real_values();
    let kernel = Kernel::new(&u, grid, lambda);
    let m = kernel.step(&kernel.phase);
    let residual = kernel.residual(&m);
    Ok(JostSolution {
        grid,
        lambda,
        m,
        residual,
        iterations: 1,
        dense: false,
    })
}

fn hardy_samples(u0: &SampledField) -> Vec<Complex64> {
    szego_project(u0).to_complex_field().values().to_vec()
}

fn inner(pu: &[Complex64], m: &[Complex64], dx: f64) -> Complex64 {
    pu.iter().zip(m).map(|(a, b)| a * b.conj()).sum::<Complex64>() * dx
}

/// `ζ(λ) = ⟨Πu₀, m_-(·, λ)⟩` by the grid sum.
pub fn distorted_coefficient(u0: &SampledField, lambda: f64) -> Result<Complex64> {
    let jost = jost_solve(u0, lambda, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(inner(&hardy_samples(u0), &jost.m, u0.grid().dx()))
}

/// `ζ` on a set of positive frequencies, with the Jost residual of each.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortedSpectrum {
    pub lambdas: Vec<f64>,
    pub zeta: Vec<Complex64>,
    pub residuals: Vec<f64>,
}

impl DistortedSpectrum {
    /// `Σ|ζ|² Δλ` with the local spacing of the λ grid.
    pub fn mass(&self) -> f64 {
        let n = self.lambdas.len();
        (0..n)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { self.lambdas[i - 1] };
                let width = if i + 1 < n {
                    0.5 * (self.lambdas[i + 1] - lo)
                } else {
                    self.lambdas[i] - lo
                };
                self.zeta[i].norm_sqr() * width
            })
            .sum()
    }

    /// CSV with columns `lambda,re_zeta,im_zeta,residual`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "lambda,re_zeta,im_zeta,residual")?;
        for i in 0..self.lambdas.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.lambdas[i], self.zeta[i].re, self.zeta[i].im, self.residuals[i]
            )?;
        }
        Ok(())
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        crate::io::write_atomic(path, &buf)
    }
}

/// `ζ` at arbitrary positive `λ`, solved in parallel.
pub fn distorted_spectrum(u0: &SampledField, lambdas: &[f64], tol: f64, max_iter: usize) -> Result<DistortedSpectrum> {
    let pu = hardy_samples(u0);
    let dx = u0.grid().dx();
    let solved: Vec<(Complex64, f64)> = lambdas
        .par_iter()
        .map(|&l| {
            let j = jost_solve(u0, l, tol, max_iter)?;
            Ok((inner(&pu, &j.m, dx), j.residual))
        })
        .collect::<Result<_>>()?;
    Ok(DistortedSpectrum {
        lambdas: lambdas.to_vec(),
        zeta: solved.iter().map(|s| s.0).collect(),
        residuals: solved.iter().map(|s| s.1).collect(),
    })
}

/// The positive box frequencies `k·dξ`, `k = 1..=K`.
pub fn box_frequencies(grid: &Grid1D, k_max: usize) -> Vec<f64> {
    (1..=k_max.min(grid.max_hardy_index())).map(|k| k as f64 * grid.dxi()).collect()
}

/// `u_∞ = 2 Re Σ_k (ζ(ξ_k)/L) e^{iξ_k x}`, with `L` the box length, from a
/// spectrum computed on the first box frequencies; missing frequencies are
/// zero.
pub fn profile_from(grid: Grid1D, spectrum: &DistortedSpectrum) -> Result<SampledField> {
    let mut coeffs = HardyCoeffs::zeros(grid).coeffs().to_vec();
    if spectrum.lambdas.len() > coeffs.len() {
        return Err(Error::InvalidParameter("more frequencies than the grid carries".into()));
    }
    for (k, (&l, z)) in spectrum.lambdas.iter().zip(&spectrum.zeta).enumerate() {
        let expected = (k + 1) as f64 * grid.dxi();
        if (l - expected).abs() > 1e-9 * expected {
            return Err(Error::InvalidParameter(format!(
                "lambda grid must be the box frequencies; entry {} is {l}, expected {expected}",
                k + 1
            )));
        }
        coeffs[k] = z / grid.length();
    }
    Ok(to_real_field(&HardyCoeffs::new(grid, coeffs)?))
}

/// Radiation profile from `ζ` on the first `k_max` box frequencies
/// (all of them when `None`).
pub fn radiation_profile(u0: &SampledField, k_max: Option<usize>) -> Result<(SampledField, DistortedSpectrum)> {
    let grid = *u0.grid();
    let lambdas = box_frequencies(&grid, k_max.unwrap_or(grid.max_hardy_index()));
    let spectrum = distorted_spectrum(u0, &lambdas, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok((profile_from(grid, &spectrum)?, spectrum))
}
