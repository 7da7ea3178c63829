//! Finite-rank multisoliton solutions from the resolvent-matrix formula.
//!
//! For asymptotic data `(λ_k, x_k, θ_k)` with `y_k = 1/(2|λ_k|)` and
//! `c_k = 2|λ_k|` the Hardy part of the solution is
//! `Πu(t, x) = i Σ_{j,k} W_{jk} [(D + E)⁻¹]_{jk}` and `u = 2 Re Πu`.
//!
//! `W` has rank one, `W_{jk} = a_j b_k` with `a_j = √y_j e^{−iθ_j}` and
//! `b_k = e^{iθ_k}/√y_k`, so the double sum is `aᵀ(D + E)⁻¹b` and each point
//! costs one LU factorisation and one solve.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{derivative, fourier_multiplier, Grid1D, SampledField};
use crate::soliton::SolitonFamily;

/// Condition estimate above which `D + E` is reported singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Padding factor used by [`pde_residual`].
pub const RESIDUAL_PADDING: usize = 4;

/// Eigenvalues `λ_1 < … < λ_N < 0` with centers `x_k` and phases `θ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSpectrum {
    lambdas: Vec<f64>,
    centers: Vec<f64>,
    phases: Vec<f64>,
}

impl AsymptoticSpectrum {
    pub fn new(lambdas: Vec<f64>, centers: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if centers.len() != lambdas.len() || phases.len() != lambdas.len() {
            return Err(Error::InvalidParameter(format!(
                "{} eigenvalues but {} centers and {} phases",
                lambdas.len(),
                centers.len(),
                phases.len()
            )));
        }
        for (k, &l) in lambdas.iter().enumerate() {
            if !(l < 0.0) || !l.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "lambda_{} = {l} is not a finite negative number",
                    k + 1
                )));
            }
            if k > 0 && !(lambdas[k - 1] < l) {
                return Err(Error::InvalidParameter(format!(
                    "eigenvalues must increase strictly: lambda_{} = {} >= lambda_{} = {l}",
                    k,
                    lambdas[k - 1],
                    k + 1
                )));
            }
        }
        if let Some(v) = centers.iter().chain(&phases).find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite center or phase {v}")));
        }
        Ok(AsymptoticSpectrum {
            lambdas,
            centers,
            phases,
        })
    }

    /// Zero phases.
    pub fn with_centers(lambdas: Vec<f64>, centers: Vec<f64>) -> Result<Self> {
        let n = lambdas.len();
        Self::new(lambdas, centers, vec![0.0; n])
    }

    /// Zero centers and phases.
    pub fn from_lambdas(lambdas: Vec<f64>) -> Result<Self> {
        let n = lambdas.len();
        Self::new(lambdas, vec![0.0; n], vec![0.0; n])
    }

    pub fn empty() -> Self {
        AsymptoticSpectrum {
            lambdas: Vec::new(),
            centers: Vec::new(),
            phases: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `y_k = 1/(2|λ_k|)`, zero-based.
    pub fn width(&self, k: usize) -> f64 {
        0.5 / self.lambdas[k].abs()
    }

    /// `c_k = 2|λ_k|`, zero-based.
    pub fn speed(&self, k: usize) -> f64 {
        2.0 * self.lambdas[k].abs()
    }

    /// Predicted crest position `c_k t − x_k`, zero-based.
    pub fn crest(&self, k: usize, t: f64) -> f64 {
        self.speed(k) * t - self.centers[k]
    }

    /// Same eigenvalues and centers, new phases.
    pub fn with_phases(&self, phases: Vec<f64>) -> Result<Self> {
        Self::new(self.lambdas.clone(), self.centers.clone(), phases)
    }

    /// The first `n` solitons.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        AsymptoticSpectrum {
            lambdas: self.lambdas[..n].to_vec(),
            centers: self.centers[..n].to_vec(),
            phases: self.phases[..n].to_vec(),
        }
    }

    /// Poles `p_k = x_k + i y_k`, so that `R_{p_k}(x − c_k t)` is term `k` of
    /// [`soliton_sum`].
    pub fn to_family(&self) -> Result<SolitonFamily> {
        let poles: Vec<Complex64> = (0..self.len())
            .map(|k| Complex64::new(self.centers[k], self.width(k)))
            .collect();
        SolitonFamily::from_poles(&poles)
    }

    fn left(&self) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| Complex64::from_polar(self.width(k).sqrt(), -self.phases[k]))
            .collect()
    }

    fn right(&self) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| Complex64::from_polar(1.0 / self.width(k).sqrt(), self.phases[k]))
            .collect()
    }

    fn diagonal(&self, t: f64, x: f64) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| Complex64::new(x - self.speed(k) * t + self.centers[k], self.width(k)))
            .collect()
    }

    fn e_entry(&self, j: usize, k: usize) -> Complex64 {
        let (yj, yk) = (self.width(j), self.width(k));
        let modulus = 2.0 * yk.powf(1.5) * yj.sqrt() / (yk - yj);
        Complex64::i() * Complex64::from_polar(modulus, self.phases[j] - self.phases[k])
    }

    fn coupling_matrix(&self) -> DMatrix<Complex64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |j, k| {
            if j == k {
                Complex64::new(0.0, 0.0)
            } else {
                self.e_entry(j, k)
            }
        })
    }
}

/// `D`, `E` and `W` at one space-time point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventMatrices {
    /// Diagonal of `D`.
    pub d: Vec<Complex64>,
    pub e: DMatrix<Complex64>,
    pub w: DMatrix<Complex64>,
}

pub fn build_matrices(spec: &AsymptoticSpectrum, t: f64, x: f64) -> ResolventMatrices {
    let n = spec.len();
    let (a, b) = (spec.left(), spec.right());
    ResolventMatrices {
        d: spec.diagonal(t, x),
        e: spec.coupling_matrix(),
        w: DMatrix::from_fn(n, n, |j, k| if j == k { Complex64::new(1.0, 0.0) } else { a[j] * b[k] }),
    }
}

/// `Πu(t, x) = i aᵀ(D + E)⁻¹b`.
pub fn hardy_value(spec: &AsymptoticSpectrum, t: f64, x: f64) -> Result<Complex64> {
    if spec.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut m = spec.coupling_matrix();
    for (k, d) in spec.diagonal(t, x).into_iter().enumerate() {
        m[(k, k)] = d;
    }
    hardy_value_with(spec, &m, t, x)
}

fn hardy_value_with(spec: &AsymptoticSpectrum, m: &DMatrix<Complex64>, t: f64, x: f64) -> Result<Complex64> {
    let n = spec.len();
    let a = DVector::from_vec(spec.left());
    let b = DVector::from_vec(spec.right());
    let lu = m.clone().lu();
    let singular = |condition| Error::Singular { t, x, condition };
    let v = lu.solve(&b).ok_or_else(|| singular(f64::INFINITY))?;
    if n > 1 {
        let condition = one_norm(m) * inverse_one_norm(&lu, &m.adjoint().lu(), n);
        if !(condition <= CONDITION_LIMIT) {
            return Err(singular(condition));
        }
    }
    let s: Complex64 = a.iter().zip(v.iter()).map(|(a, v)| a * v).sum();
    Ok(Complex64::i() * s)
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

type Lu = nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>;

/// Hager's estimate of `‖M⁻¹‖₁` from factorisations of `M` and `Mᴴ`.
fn inverse_one_norm(lu: &Lu, lu_adj: &Lu, n: usize) -> f64 {
    let mut x = DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
    let mut estimate = 0.0;
    for _ in 0..5 {
        let Some(y) = lu.solve(&x) else {
            return f64::INFINITY;
        };
        estimate = y.iter().map(|v| v.norm()).sum::<f64>();
        let sign = y.map(|v| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) });
        let Some(z) = lu_adj.solve(&sign) else {
            return f64::INFINITY;
        };
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, 0.0), |acc, p| if p.1 > acc.1 { p } else { acc });
        let ztx = z.dotc(&x).re;
        if zmax <= ztx {
            break;
        }
        x = DVector::from_element(n, Complex64::new(0.0, 0.0));
        x[jmax] = Complex64::new(1.0, 0.0);
    }
    estimate
}

/// `u(t, x) = 2 Re Πu(t, x)`.
pub fn exact_solution(spec: &AsymptoticSpectrum, t: f64, x: f64) -> Result<f64> {
    Ok(2.0 * hardy_value(spec, t, x)?.re)
}

/// [`exact_solution`] on every grid point.
pub fn sample_exact(spec: &AsymptoticSpectrum, t: f64, grid: Grid1D) -> Result<SampledField> {
    let values = grid
        .points()
        .par_iter()
        .map(|&x| exact_solution(spec, t, x))
        .collect::<Result<Vec<f64>>>()?;
    SampledField::from_real(grid, values)
}

/// `Σ_k 2y_k / ((x − c_k t + x_k)² + y_k²)`.
pub fn soliton_sum(spec: &AsymptoticSpectrum, t: f64, x: f64) -> f64 {
    (0..spec.len())
        .map(|k| {
            let y = spec.width(k);
            let s = x - spec.speed(k) * t + spec.centers[k];
            2.0 * y / (s * s + y * y)
        })
        .sum()
}

/// Order-`m` Neumann term `i(−1)^m aᵀD⁻¹(ED⁻¹)^m b`.
pub fn neumann_term(spec: &AsymptoticSpectrum, t: f64, x: f64, order: usize) -> Complex64 {
    if spec.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let d = spec.diagonal(t, x);
    let e = spec.coupling_matrix();
    let mut v = DVector::from_iterator(spec.len(), spec.right().into_iter().zip(&d).map(|(b, d)| b / d));
    for _ in 0..order {
        v = &e * v;
        for (vk, dk) in v.iter_mut().zip(&d) {
            *vk /= dk;
        }
    }
    let a = spec.left();
    let s: Complex64 = a.iter().zip(v.iter()).map(|(a, v)| a * v).sum();
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    Complex64::i() * s * sign
}

/// `A_{jk} = W_{jk} E_{jk}` for one-based `j ≠ k`.
pub fn coupling(spec: &AsymptoticSpectrum, j: usize, k: usize) -> Result<Complex64> {
    let n = spec.len();
    if j == k || j == 0 || k == 0 || j > n || k > n {
        return Err(Error::InvalidParameter(format!(
            "coupling needs distinct indices in 1..={n}, got ({j}, {k})"
        )));
    }
    let (j, k) = (j - 1, k - 1);
    let w = spec.left()[j] * spec.right()[k];
    Ok(w * spec.e_entry(j, k))
}

/// `Σ_{j,k,l; j≠l, k≠l} |λ_k| / (|λ_j − λ_l|² |λ_k − λ_l|)` by direct triple loop.
pub fn interaction_sum(lambdas: &[f64]) -> Result<f64> {
    check_distinct(lambdas)?;
    let n = lambdas.len();
    let mut total = 0.0;
    for l in 0..n {
        for j in 0..n {
            if j == l {
                continue;
            }
            let djl = (lambdas[j] - lambdas[l]).abs();
            for k in 0..n {
                if k == l {
                    continue;
                }
                total += lambdas[k].abs() / (djl * djl * (lambdas[k] - lambdas[l]).abs());
            }
        }
    }
    Ok(total)
}

pub(crate) fn check_distinct(lambdas: &[f64]) -> Result<()> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(format!("duplicate eigenvalue {}", w[0])));
    }
    Ok(())
}

/// `(C′/t)` times [`interaction_sum`] over the first `n` eigenvalues.
pub fn second_order_bound(spec: &AsymptoticSpectrum, n: usize, t: f64, c_prime: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("second-order bound needs t > 0, got {t}")));
    }
    let n = n.min(spec.len());
    Ok(c_prime / t * interaction_sum(&spec.lambdas[..n])?)
}

/// Neumann-expansion diagnostics at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannDiagnostics {
    pub order0: Complex64,
    pub order1_max: f64,
    pub order2: Complex64,
    /// [`second_order_bound`] over the full spectrum; infinite for `t ≤ 0`.
    pub order2_bound: f64,
    /// `‖D⁻¹E‖₂`.
    pub spectral_radius_proxy: f64,
}

pub fn neumann_diagnostics(
    spec: &AsymptoticSpectrum,
    t: f64,
    x: f64,
    c_prime: f64,
) -> Result<NeumannDiagnostics> {
    let order2_bound = if t > 0.0 {
        second_order_bound(spec, spec.len(), t, c_prime)?
    } else {
        f64::INFINITY
    };
    let spectral_radius_proxy = if spec.is_empty() {
        0.0
    } else {
        let d = spec.diagonal(t, x);
        let mut m = spec.coupling_matrix();
        for (j, dj) in d.iter().enumerate() {
            m.row_mut(j).iter_mut().for_each(|v| *v /= dj);
        }
        m.singular_values().max()
    };
    Ok(NeumannDiagnostics {
        order0: neumann_term(spec, t, x, 0),
        order1_max: neumann_term(spec, t, x, 1).norm(),
        order2: neumann_term(spec, t, x, 2),
        order2_bound,
        spectral_radius_proxy,
    })
}

/// Sup over `grid` of the BO residual `u_t − ∂ₓ|D|u + ∂ₓ(u²)` of the matrix
/// solution, with `u_t` by central differences.
///
/// Spectral derivatives are taken on a box [`RESIDUAL_PADDING`] times longer
/// with the same spacing, so the jump of the slowly decaying tails at the box
/// edge stays away from the points that are reported.
pub fn pde_residual(spec: &AsymptoticSpectrum, t: f64, grid: Grid1D, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if spec.is_empty() {
        return Ok(0.0);
    }
    let big = grid.padded(RESIDUAL_PADDING)?;
    let before = sample_exact(spec, t - dt, big)?;
    let now = sample_exact(spec, t, big)?;
    let after = sample_exact(spec, t + dt, big)?;
    let dispersion = fourier_multiplier(&now, |xi| Complex64::new(0.0, xi * xi.abs()), true);
    let square = SampledField::from_real(big, now.values().iter().map(|v| v.re * v.re).collect())?;
    let flux = derivative(&square);
    let offset = (RESIDUAL_PADDING - 1) * grid.n() / 2;
    let mut worst: f64 = 0.0;
    for j in offset..offset + grid.n() {
        let ut = (after.values()[j].re - before.values()[j].re) / (2.0 * dt);
        let r = ut - dispersion.values()[j].re + flux.values()[j].re;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Parse a spectrum file: one `lambda center [phase]` triple per line, `#`
/// comments and blank lines ignored; a missing phase is zero.
pub fn parse_spectrum(text: &str) -> Result<AsymptoticSpectrum> {
    let (mut lambdas, mut centers, mut phases) = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected `lambda center [phase]`, found {:?}", raw.trim()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{s:?}: {e}"),
            })
        };
        lambdas.push(num(fields[0])?);
        centers.push(num(fields[1])?);
        phases.push(if fields.len() == 3 { num(fields[2])? } else { 0.0 });
    }
    AsymptoticSpectrum::new(lambdas, centers, phases)
}

pub fn read_spectrum(path: &Path) -> Result<AsymptoticSpectrum> {
    parse_spectrum(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::soliton_profile;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pair() -> AsymptoticSpectrum {
        AsymptoticSpectrum::from_lambdas(vec![-1.0, -0.25]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(AsymptoticSpectrum::from_lambdas(vec![-0.25, -1.0]).is_err());
        assert!(AsymptoticSpectrum::from_lambdas(vec![-1.0, -1.0]).is_err());
        assert!(AsymptoticSpectrum::from_lambdas(vec![-1.0, 0.0]).is_err());
        assert!(AsymptoticSpectrum::new(vec![-1.0], vec![], vec![0.0]).is_err());
        let s = pair();
        assert_eq!((s.width(0), s.width(1)), (0.5, 2.0));
        assert_eq!((s.speed(0), s.speed(1)), (2.0, 0.5));
    }

    #[test]
    fn single_soliton_matrices() {
        let s = AsymptoticSpectrum::from_lambdas(vec![-0.5]).unwrap();
        let m = build_matrices(&s, 0.0, 0.0);
        assert_eq!(m.d, vec![c(0.0, 1.0)]);
        assert_eq!(m.e[(0, 0)], c(0.0, 0.0));
        assert_eq!(m.w[(0, 0)], c(1.0, 0.0));
        assert!((exact_solution(&s, 0.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pair_entries() {
        let m = build_matrices(&pair(), 0.0, 0.0);
        assert!((m.e[(0, 1)] - c(0.0, 8.0 / 3.0)).norm() < 1e-14);
        assert!((coupling(&pair(), 1, 2).unwrap() - c(0.0, 4.0 / 3.0)).norm() < 1e-14);
        assert!(coupling(&pair(), 1, 1).is_err());
        for k in 0..2 {
            assert_eq!(m.e[(k, k)], c(0.0, 0.0));
            assert_eq!(m.w[(k, k)], c(1.0, 0.0));
        }
    }

    #[test]
    fn one_soliton_is_exact() {
        let s = AsymptoticSpectrum::with_centers(vec![-0.5], vec![3.0]).unwrap();
        let p = crate::soliton::SolitonParam::new(c(3.0, 1.0)).unwrap();
        for &(t, x) in &[(0.0, 0.0), (2.5, -1.0), (10.0, 7.0), (-4.0, 30.0)] {
            let u = exact_solution(&s, t, x).unwrap();
            assert!((u - soliton_sum(&s, t, x)).abs() < 1e-14);
            assert!((u - soliton_profile(p, t, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let s = AsymptoticSpectrum::new(vec![-1.0, -0.25], vec![1.5, -2.0], vec![0.3, -1.1]).unwrap();
        let m = build_matrices(&s, 0.7, 10.0);
        let (a, b, cc, d) = (m.d[0], m.e[(0, 1)], m.e[(1, 0)], m.d[1]);
        let det = a * d - b * cc;
        let inv = [[d / det, -b / det], [-cc / det, a / det]];
        let mut sum = c(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                sum += m.w[(j, k)] * inv[j][k];
            }
        }
        let expected = 2.0 * (Complex64::i() * sum).re;
        assert!((exact_solution(&s, 0.7, 10.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn triple_product_moduli() {
        let s = AsymptoticSpectrum::new(vec![-1.0, -0.5, -0.25], vec![0.0; 3], vec![0.2, 1.0, -0.4]).unwrap();
        let m = build_matrices(&s, 0.0, 0.0);
        let l = s.lambdas();
        let mut checked = 0;
        for j in 0..3 {
            for k in 0..3 {
                for q in 0..3 {
                    if q == j || q == k {
                        continue;
                    }
                    let lhs = (m.w[(j, k)] * m.e[(j, q)] * m.e[(q, k)]).norm();
                    let rhs = 1.0 / ((l[j] - l[q]).abs() * (l[k] - l[q]).abs());
                    assert!((lhs - rhs).abs() < 1e-13 * rhs, "({j},{k},{q})");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 6);
    }

    #[test]
    fn neumann_orders() {
        let s = pair();
        for &(t, x) in &[(0.0, 0.0), (3.0, 1.0), (50.0, 90.0)] {
            assert!((2.0 * neumann_term(&s, t, x, 0).re - soliton_sum(&s, t, x)).abs() < 1e-14);
            assert!(neumann_term(&s, t, x, 1).norm() < 1e-15);
        }
        // the series converges at large t; its partial sums approach the LU value
        let (t, x) = (200.0, 120.0);
        let series: Complex64 = (0..40).map(|m| neumann_term(&s, t, x, m)).sum();
        assert!((series - hardy_value(&s, t, x).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn interaction_sums() {
        let s = pair();
        assert!((second_order_bound(&s, 2, 1.0, 1.0).unwrap() - 80.0 / 27.0).abs() < 1e-14);
        assert_eq!(second_order_bound(&s, 1, 1.0, 1.0).unwrap(), 0.0);
        let b1 = second_order_bound(&s, 2, 3.0, 1.0).unwrap();
        let b2 = second_order_bound(&s, 2, 6.0, 1.0).unwrap();
        assert!((b1 - 2.0 * b2).abs() < 1e-15);
        assert!(second_order_bound(&s, 2, 0.0, 1.0).is_err());
        assert!(interaction_sum(&[-1.0, -1.0]).is_err());
    }

    #[test]
    fn diagnostics_fields() {
        let d = neumann_diagnostics(&pair(), 100.0, 50.0, 1.0).unwrap();
        assert!(d.order1_max < 1e-15);
        assert!((d.order2_bound - 80.0 / 27.0 / 100.0).abs() < 1e-15);
        assert!(d.spectral_radius_proxy > 0.0 && d.spectral_radius_proxy < 1.0);
        let d0 = neumann_diagnostics(&pair(), 0.0, 0.0, 1.0).unwrap();
        assert!(d0.order2_bound.is_infinite());
    }

    #[test]
    fn residual_of_zero_is_zero() {
        let g = Grid1D::centered(100.0, 4096).unwrap();
        assert_eq!(pde_residual(&AsymptoticSpectrum::empty(), 1.0, g, 1e-4).unwrap(), 0.0);
        assert_eq!(exact_solution(&AsymptoticSpectrum::empty(), 1.0, 2.0).unwrap(), 0.0);
        assert_eq!(soliton_sum(&AsymptoticSpectrum::empty(), 1.0, 2.0), 0.0);
    }

    #[test]
    fn spectrum_parsing() {
        let s = parse_spectrum("# lambda center phase\n-1 0.5 0.1\n\n-0.25 -2\n").unwrap();
        assert_eq!(s.lambdas(), &[-1.0, -0.25]);
        assert_eq!(s.centers(), &[0.5, -2.0]);
        assert_eq!(s.phases(), &[0.1, 0.0]);
        assert!(matches!(parse_spectrum("-1 0 0 0"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_spectrum("-0.25 0\n-1 0").is_err());
    }

    #[test]
    fn family_view_matches_soliton_sum() {
        let s = AsymptoticSpectrum::with_centers(vec![-1.0, -0.25], vec![2.0, -3.0]).unwrap();
        let fam = s.to_family().unwrap();
        for &(t, x) in &[(0.0, 0.0), (4.0, 5.0)] {
            let direct: f64 = (0..2)
                .map(|k| {
                    let p = fam.pole(k + 1).unwrap();
                    soliton_profile(p, t, x)
                })
                .sum();
            assert!((direct - soliton_sum(&s, t, x)).abs() < 1e-14);
        }
    }
}
