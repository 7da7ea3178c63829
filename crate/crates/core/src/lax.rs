//! Fourier–Galerkin discretisation of the Lax operator `L_u = D − T_u` on the
//! Hardy space of the box.
//!
//! The unknowns are the Fourier coefficients of a Hardy function at
//! `ξ_m = m·dξ`, `m = 0..=M`. Treating the coefficient sum as a trapezoid rule
//! for `∫_0^∞ dξ` puts weight ½ on the `m = 0` node; with `w = diag(½, 1, …, 1)`
//! the operator is represented by the Hermitian matrix
//! `diag(ξ_m) − w^{1/2} T w^{1/2}` where `T_{mm'} = c_{m−m'}` are box Fourier
//! coefficients of `u`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{hardy_mass, Grid1D, SampledField};
use crate::soliton::{hardy_closed_form, pole_sum, SolitonFamily};

/// Default number of positive frequency nodes.
pub const DEFAULT_MODES: usize = 1024;

/// Fraction of the highest frequencies whose relative energy is reported as
/// aliasing.
const ALIAS_BAND: f64 = 0.1;

/// Relative energy in the aliasing band above which a warning is raised.
pub const ALIAS_WARNING: f64 = 1e-8;

/// A finite section of a Hardy-space operator on the nodes `ξ_m = m·dξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    /// `ξ_0 = 0, ξ_1, …, ξ_M`.
    pub frequencies: Vec<f64>,
    pub matrix: DMatrix<Complex64>,
    /// Share of `Σ|c_k|²` carried by the top tenth of the box frequencies.
    pub aliasing_ratio: f64,
}

impl DiscretizedOperator {
    pub fn modes(&self) -> usize {
        self.frequencies.len() - 1
    }

    pub fn aliasing_warning(&self) -> bool {
        self.aliasing_ratio > ALIAS_WARNING
    }

    /// `max |A − Aᴴ|`.
    pub fn hermitian_defect(&self) -> f64 {
        let a = &self.matrix;
        let n = a.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((a[(j, k)] - a[(k, j)].conj()).norm());
            }
        }
        worst
    }
}

fn check_modes(grid: &Grid1D, modes: usize) -> Result<()> {
    if modes == 0 || modes > grid.max_hardy_index() {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= M <= {} modes on this grid, got {modes}",
            grid.max_hardy_index()
        )));
    }
    Ok(())
}

fn aliasing_ratio(coeffs: &[Complex64], grid: &Grid1D) -> f64 {
    let n = grid.n();
    let cutoff = ((1.0 - ALIAS_BAND) * (n / 2) as f64) as i64;
    let (mut high, mut total) = (0.0, 0.0);
    for (j, c) in coeffs.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if grid.wavenumber(j).abs() > cutoff {
            high += e;
        }
    }
    if total > 0.0 {
        high / total
    } else {
        0.0
    }
}

/// `T_{mm'} = c_{m−m'}` for `m, m' = 0..=M`, unweighted.
pub fn toeplitz_of(u: &SampledField, modes: usize) -> Result<DiscretizedOperator> {
    let grid = *u.grid();
    check_modes(&grid, modes)?;
    let c = u.coefficients();
    let n = grid.n() as i64;
    let coeff = |k: i64| c[k.rem_euclid(n) as usize];
    let matrix = DMatrix::from_fn(modes + 1, modes + 1, |m, mp| coeff(m as i64 - mp as i64));
    Ok(DiscretizedOperator {
        frequencies: (0..=modes).map(|m| m as f64 * grid.dxi()).collect(),
        matrix,
        aliasing_ratio: aliasing_ratio(&c, &grid),
    })
}

/// `diag(ξ_m) − w^{1/2} T_u w^{1/2}` with half weight on the zero node.
pub fn lax_matrix(u: &SampledField, modes: usize) -> Result<DiscretizedOperator> {
    let mut op = toeplitz_of(u, modes)?;
    let half = 0.5f64.sqrt();
    let n = modes + 1;
    for m in 0..n {
        for mp in 0..n {
            let mut w = 1.0;
            if m == 0 {
                w *= half;
            }
            if mp == 0 {
                w *= half;
            }
            let t = op.matrix[(m, mp)] * w;
            op.matrix[(m, mp)] = if m == mp {
                Complex64::new(op.frequencies[m], 0.0) - t
            } else {
                -t
            };
        }
    }
    Ok(op)
}

/// Full eigendecomposition of a discretised Lax operator.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns in the weighted basis `w^{1/2} f̂`.
    pub eigenvectors: DMatrix<Complex64>,
    pub epsilon: f64,
    /// Eigenvalues below `−ε`, ascending.
    pub negative_part: Vec<f64>,
}

impl SpectrumResult {
    /// `max |VᴴV − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let g = v.adjoint() * v;
        let mut worst: f64 = 0.0;
        for j in 0..g.nrows() {
            for k in 0..g.ncols() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g[(j, k)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Default threshold `5·dξ`.
pub fn default_epsilon(grid: &Grid1D) -> f64 {
    5.0 * grid.dxi()
}

pub fn spectrum_of(op: &DiscretizedOperator, epsilon: f64) -> Result<SpectrumResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let eig = SymmetricEigen::try_new(op.matrix.clone(), 1e-14, 0)
        .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    let eigenvectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    let negative_part = eigenvalues.iter().copied().filter(|&v| v < -epsilon).collect();
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        epsilon,
        negative_part,
    })
}

pub fn discrete_spectrum(u: &SampledField, modes: usize, epsilon: f64) -> Result<SpectrumResult> {
    spectrum_of(&lax_matrix(u, modes)?, epsilon)
}

/// Both sides of `2π Σ|λ_k| = ‖Πu‖₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceIdentity {
    /// `2π Σ_{λ_k < −ε} |λ_k|`.
    pub lhs: f64,
    /// Trapezoid Hardy mass, see [`hardy_mass`].
    pub rhs: f64,
    /// `rhs − lhs`.
    pub gap: f64,
    pub bound_states: usize,
}

pub fn trace_identity(u: &SampledField, modes: usize, epsilon: f64) -> Result<TraceIdentity> {
    let spec = discrete_spectrum(u, modes, epsilon)?;
    Ok(trace_from(&spec, u))
}

pub fn trace_from(spec: &SpectrumResult, u: &SampledField) -> TraceIdentity {
    let lhs = 2.0 * PI * spec.negative_part.iter().map(|v| v.abs()).sum::<f64>();
    let rhs = hardy_mass(u);
    TraceIdentity {
        lhs,
        rhs,
        gap: rhs - lhs,
        bound_states: spec.negative_part.len(),
    }
}

/// `F(z) = Σ_{m≤J} 1/(z + p_m)` directly and as `−i·Πu₀(z)`.
pub fn meromorphic_f(fam: &SolitonFamily, z: Complex64, j_max: usize) -> Result<(Complex64, Complex64)> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidParameter(format!("need Im z > 0, got {z}")));
    }
    let direct = pole_sum(&fam.poles_up_to(j_max)?, z)?;
    let via_hardy = -Complex64::i() * hardy_closed_form(fam, z, j_max)?;
    Ok((direct, via_hardy))
}

/// CSV with columns `index,lambda,is_negative`.
pub fn write_spectrum_csv(spec: &SpectrumResult, mut out: impl Write) -> Result<()> {
    writeln!(out, "index,lambda,is_negative")?;
    for (i, v) in spec.eigenvalues.iter().enumerate() {
        writeln!(out, "{},{:.16e},{}", i + 1, v, *v < -spec.epsilon)?;
    }
    Ok(())
}

pub fn dump_spectrum(spec: &SpectrumResult, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_spectrum_csv(spec, &mut buf)?;
    crate::io::write_atomic(path, &buf)
}
