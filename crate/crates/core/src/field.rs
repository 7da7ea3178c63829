//! Periodic-box model of the real line: grids, sampled fields, the Szegő
//! projector, Fourier multipliers and the norms used by every other module.
//!
//! A field sampled on `[x_min, x_max)` is identified with its Fourier series
//! `f(x) = Σ_k c_k e^{i ξ_k x}` with `ξ_k = k·dξ`, `dξ = 2π/(x_max − x_min)`.
//! The coefficients `c_k` carry the phase of `x_min`, so a pure exponential
//! `e^{iξ_k x}` has coefficient exactly one regardless of where the box sits.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Uniform periodic grid on `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max})"
            )));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Grid1D { x_min, x_max, n })
    }

    /// Grid on `[-half_width, half_width)`.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Same spacing, `factor` times the length, centred on the same midpoint.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        let mid = 0.5 * (self.x_min + self.x_max);
        let half = 0.5 * self.length() * factor as f64;
        Self::new(mid - half, mid + half, self.n * factor)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Frequency spacing `2π / length`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed wavenumber index of FFT slot `j`; the Nyquist slot maps to `-n/2`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular frequency of FFT slot `j`.
    pub fn frequency(&self, j: usize) -> f64 {
        self.wavenumber(j) as f64 * self.dxi()
    }

    /// Largest positive frequency index carried by [`HardyCoeffs`].
    pub fn max_hardy_index(&self) -> usize {
        self.n / 2 - 1
    }
}

/// Samples of a (possibly complex) function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid1D,
    values: Vec<Complex64>,
    real: bool,
}

impl SampledField {
    pub fn from_complex(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidParameter(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.n()
            )));
        }
        Ok(SampledField {
            grid,
            values,
            real: false,
        })
    }

    pub fn from_real(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let mut f = Self::from_complex(grid, values)?;
        f.real = true;
        Ok(f)
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().into_iter().map(|x| Complex64::new(f(x), 0.0)).collect();
        SampledField {
            grid,
            values,
            real: true,
        }
    }

    pub fn from_complex_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        SampledField {
            grid,
            values,
            real: false,
        }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        SampledField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
            real: true,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Pointwise `self - other`; the grids must agree.
    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> SampledField {
        SampledField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            real: self.real,
        }
    }

    fn zip_with(
        &self,
        other: &SampledField,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<SampledField> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("fields live on different grids".into()));
        }
        Ok(SampledField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            real: self.real && other.real,
        })
    }

    /// Fourier-series coefficients `c_k` in FFT order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        fft::forward(&mut buf);
        let n = self.grid.n() as f64;
        let x0 = self.grid.x_min();
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0 / n, -self.grid.frequency(j) * x0);
        }
        buf
    }

    /// Inverse of [`SampledField::coefficients`]; the result is flagged complex.
    pub fn from_coefficients(grid: Grid1D, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.n()
            )));
        }
        let x0 = grid.x_min();
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| c * Complex64::from_polar(1.0, grid.frequency(j) * x0))
            .collect();
        fft::inverse(&mut buf);
        Self::from_complex(grid, buf)
    }

    /// Drop imaginary parts and flag the field real.
    pub fn into_real(mut self) -> SampledField {
        for v in &mut self.values {
            v.im = 0.0;
        }
        self.real = true;
        self
    }
}

/// Fourier coefficients at the strictly positive frequencies `k·dξ`,
/// `k = 1 ..= n/2 − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyCoeffs {
    grid: Grid1D,
    coeffs: Vec<Complex64>,
}

impl HardyCoeffs {
    /// `coeffs[k - 1]` is the coefficient of `e^{i k dξ x}`.
    pub fn new(grid: Grid1D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.max_hardy_index() {
            return Err(Error::InvalidParameter(format!(
                "expected {} positive-frequency coefficients, got {}",
                grid.max_hardy_index(),
                coeffs.len()
            )));
        }
        Ok(HardyCoeffs { grid, coeffs })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        HardyCoeffs {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.max_hardy_index()],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at frequency index `k >= 1`.
    pub fn get(&self, k: usize) -> Complex64 {
        assert!(k >= 1 && k <= self.coeffs.len(), "frequency index {k} out of range");
        self.coeffs[k - 1]
    }

    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.grid.dxi()
    }

    /// `‖h‖₂²` of the represented function over the box (Parseval).
    pub fn norm_sq(&self) -> f64 {
        self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Samples of `Σ_k h_k e^{iξ_k x}` (the complex Hardy function itself).
    pub fn to_complex_field(&self) -> SampledField {
        let n = self.grid.n();
        let mut full = vec![Complex64::new(0.0, 0.0); n];
        full[1..=self.coeffs.len()].copy_from_slice(&self.coeffs);
        SampledField::from_coefficients(self.grid, &full).expect("length matches grid")
    }
}

/// Szegő projection: keep the strictly positive frequencies.
pub fn szego_project(f: &SampledField) -> HardyCoeffs {
    let c = f.coefficients();
    let m = f.grid().max_hardy_index();
    HardyCoeffs {
        grid: *f.grid(),
        coeffs: c[1..=m].to_vec(),
    }
}

/// `2·Re` of the Hardy function described by `h`.
pub fn to_real_field(h: &HardyCoeffs) -> SampledField {
    h.to_complex_field().scale(2.0).into_real()
}

/// Apply the Fourier multiplier `symbol(ξ)`.
///
/// When the input is real and `hermitian` is set (`symbol(−ξ) = conj symbol(ξ)`)
/// the output is returned as a real field; the Nyquist slot, which has no
/// partner, is then zeroed unless the symbol is real there.
pub fn fourier_multiplier(
    f: &SampledField,
    symbol: impl Fn(f64) -> Complex64,
    hermitian: bool,
) -> SampledField {
    let grid = *f.grid();
    let mut buf = f.values().to_vec();
    fft::forward(&mut buf);
    let n = grid.n();
    let inv_n = 1.0 / n as f64;
    for (j, c) in buf.iter_mut().enumerate() {
        let mut s = symbol(grid.frequency(j));
        if hermitian && j == n / 2 && s.im != 0.0 {
            s = Complex64::new(0.0, 0.0);
        }
        *c *= s * inv_n;
    }
    fft::inverse(&mut buf);
    let out = SampledField::from_complex(grid, buf).expect("length preserved");
    if hermitian && f.is_real() {
        out.into_real()
    } else {
        out
    }
}

/// `|D|`, the multiplier `|ξ|`.
pub fn abs_d(f: &SampledField) -> SampledField {
    fourier_multiplier(f, |xi| Complex64::new(xi.abs(), 0.0), true)
}

/// Spectral `∂ₓ`, the multiplier `iξ`.
pub fn derivative(f: &SampledField) -> SampledField {
    fourier_multiplier(f, |xi| Complex64::new(0.0, xi), true)
}

/// Norm selector for [`norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    Linf,
    /// Sobolev `H^s` with weight `(1 + ξ²)^{s/2}`.
    Hs(f64),
    /// `‖⟨x⟩^α f‖_{H^s}`.
    Weighted { s: f64, alpha: f64 },
}

pub fn norm(f: &SampledField, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::L2 => {
            let dx = f.grid().dx();
            Ok((dx * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt())
        }
        NormKind::Linf => Ok(f.max_abs()),
        NormKind::Hs(s) => {
            if !(s >= 0.0) {
                return Err(Error::InvalidParameter(format!("Sobolev index s = {s} < 0")));
            }
            Ok(sobolev(f, s))
        }
        NormKind::Weighted { s, alpha } => {
            if !(s >= 0.0) || !(alpha >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "weighted norm needs s, alpha >= 0 (got s = {s}, alpha = {alpha})"
                )));
            }
            let grid = *f.grid();
            let weighted: Vec<Complex64> = f
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| v * (1.0 + grid.x(j).powi(2)).powf(0.5 * alpha))
                .collect();
            Ok(sobolev(&SampledField::from_complex(grid, weighted)?, s))
        }
    }
}

fn sobolev(f: &SampledField, s: f64) -> f64 {
    let grid = f.grid();
    let c = f.coefficients();
    let sum: f64 = c
        .iter()
        .enumerate()
        .map(|(j, ck)| (1.0 + grid.frequency(j).powi(2)).powf(s) * ck.norm_sqr())
        .sum();
    (grid.length() * sum).sqrt()
}

/// `‖Πf‖₂²` of the line function approximated by the trapezoidal rule in
/// frequency: `(1/2π)∫₀^∞ |f̂|² dξ` with half weight on the `ξ = 0⁺` node.
///
/// [`HardyCoeffs::norm_sq`] omits the zero node and is off by
/// `½|f̂(0)|² dξ / 2π`, which is `O(1/length)` for fields of nonzero mass.
pub fn hardy_mass(f: &SampledField) -> f64 {
    let c = f.coefficients();
    let m = f.grid().max_hardy_index();
    let interior: f64 = c[1..=m].iter().map(|v| v.norm_sqr()).sum();
    f.grid().length() * (0.5 * c[0].norm_sqr() + interior)
}

/// `‖f‖∞² / (‖f‖₂ ‖f′‖₂)`; at most one on the line for every `f ∈ H¹`.
pub fn gagliardo_nirenberg_ratio(f: &SampledField) -> Result<f64> {
    let l2 = norm(f, NormKind::L2)?;
    let dl2 = norm(&derivative(f), NormKind::L2)?;
    let denom = l2 * dl2;
    if denom < 1e-300 {
        return Err(Error::InvalidParameter(
            "Gagliardo-Nirenberg ratio undefined for a vanishing field".into(),
        ));
    }
    Ok(f.max_abs().powi(2) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(n: usize) -> Grid1D {
        Grid1D::centered(PI, n).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 12).is_err());
        assert!(Grid1D::new(0.0, 1.0, 4).is_err());
        assert!(Grid1D::new(1.0, 1.0, 16).is_err());
        let g = Grid1D::new(-2.0, 2.0, 16).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert!((g.dxi() - PI / 2.0).abs() < 1e-15);
        assert_eq!(g.wavenumber(8), -8);
        assert_eq!(g.wavenumber(9), -7);
    }

    #[test]
    fn projection_of_exponentials() {
        let g = unit_box(64);
        let plus = SampledField::from_complex_fn(g, |x| Complex64::from_polar(1.0, x));
        let h = szego_project(&plus);
        assert!(close(h.get(1), Complex64::new(1.0, 0.0), 1e-14));
        assert!(h.coeffs()[1..].iter().all(|c| c.norm() < 1e-14));

        let minus = SampledField::from_complex_fn(g, |x| Complex64::from_polar(1.0, -x));
        assert!(szego_project(&minus).coeffs().iter().all(|c| c.norm() < 1e-14));

        let cos2 = SampledField::from_fn(g, |x| 2.0 * x.cos());
        let hc = szego_project(&cos2);
        for (a, b) in hc.coeffs().iter().zip(h.coeffs()) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn box_offset_does_not_change_coefficients() {
        let g = Grid1D::new(0.5, 0.5 + 2.0 * PI, 32).unwrap();
        let f = SampledField::from_complex_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x));
        assert!(close(szego_project(&f).get(3), Complex64::new(1.0, 0.0), 1e-13));
    }

    #[test]
    fn real_field_roundtrip() {
        let g = unit_box(64);
        let cos2 = SampledField::from_fn(g, |x| 2.0 * x.cos());
        let back = to_real_field(&szego_project(&cos2));
        assert!(back.is_real());
        for (a, b) in back.values().iter().zip(cos2.values()) {
            assert!(close(*a, *b, 1e-13));
        }
        let zero = to_real_field(&HardyCoeffs::zeros(g));
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn soliton_roundtrip_through_hardy_space() {
        // Π removes the mean, so compare against R_i minus its box average.
        let g = Grid1D::centered(200.0, 4096).unwrap();
        let r = SampledField::from_fn(g, |x| 2.0 / (x * x + 1.0));
        let mean = r.coefficients()[0].re;
        let back = to_real_field(&szego_project(&r));
        let err = back
            .values()
            .iter()
            .zip(r.values())
            .map(|(a, b)| (a.re - (b.re - mean)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "roundtrip error {err}");
        assert!(mean < 2.0 * PI / 400.0);
    }

    #[test]
    fn multipliers_on_single_modes() {
        let g = unit_box(32);
        let e2 = SampledField::from_complex_fn(g, |x| Complex64::from_polar(1.0, 2.0 * x));
        let d = abs_d(&e2);
        for (j, v) in d.values().iter().enumerate() {
            assert!(close(*v, Complex64::from_polar(2.0, 2.0 * g.x(j)), 1e-13));
        }
        let c = SampledField::from_fn(g, |_| 3.5);
        assert!(abs_d(&c).max_abs() < 1e-13);
        assert!(derivative(&c).max_abs() < 1e-13);

        let cos = SampledField::from_fn(g, f64::cos);
        let dc = abs_d(&cos);
        assert!(dc.is_real());
        for (a, b) in dc.values().iter().zip(cos.values()) {
            assert!(close(*a, *b, 1e-13));
        }

        let sin = SampledField::from_fn(g, f64::sin);
        for (a, b) in derivative(&sin).values().iter().zip(cos.values()) {
            assert!(close(*a, *b, 1e-13));
        }
        let e3 = SampledField::from_complex_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x));
        let de3 = derivative(&e3);
        for (j, v) in de3.values().iter().enumerate() {
            let expect = Complex64::new(0.0, 3.0) * Complex64::from_polar(1.0, 3.0 * g.x(j));
            assert!(close(*v, expect, 1e-12));
        }
    }

    #[test]
    fn norms_of_soliton() {
        let g = Grid1D::centered(200.0, 4096).unwrap();
        let zero = SampledField::zeros(g);
        for kind in [
            NormKind::L2,
            NormKind::Linf,
            NormKind::Hs(1.0),
            NormKind::Weighted { s: 1.0, alpha: 1.0 },
        ] {
            assert_eq!(norm(&zero, kind).unwrap(), 0.0);
        }
        let r = SampledField::from_fn(g, |x| 2.0 / (x * x + 1.0));
        assert!((norm(&r, NormKind::Linf).unwrap() - 2.0).abs() < 1e-15);
        // ∫ 4/(x²+1)² over |x| < L is 2π minus a tail of order 4/(3L³)
        let l2 = norm(&r, NormKind::L2).unwrap();
        assert!((l2 - (2.0 * PI).sqrt()).abs() < 1e-6, "L2 = {l2}");
        assert!(norm(&r, NormKind::Hs(-0.5)).is_err());
        assert!(norm(&r, NormKind::Weighted { s: 0.0, alpha: -1.0 }).is_err());
    }

    #[test]
    fn l2_by_quadrature_matches_arctan_closed_form() {
        // Independent closed form: ∫_{-L}^{L} 4/(x²+1)² dx = 4[x/(2(x²+1)) + atan(x)/2]_{-L}^{L}.
        let l: f64 = 50.0;
        let g = Grid1D::centered(l, 8192).unwrap();
        let r = SampledField::from_fn(g, |x| 2.0 / (x * x + 1.0));
        let exact = 4.0 * (l / (l * l + 1.0) + l.atan());
        let quad = norm(&r, NormKind::L2).unwrap().powi(2);
        assert!((quad - exact).abs() < 1e-9, "{quad} vs {exact}");
    }

    #[test]
    fn hardy_mass_is_half_the_l2_mass() {
        let g = Grid1D::centered(100.0, 4096).unwrap();
        let r = SampledField::from_fn(g, |x| 2.0 / (x * x + 1.0) + 0.3 * (-x * x).exp());
        let half = 0.5 * norm(&r, NormKind::L2).unwrap().powi(2);
        assert!((hardy_mass(&r) - half).abs() < 1e-12 * half);
    }

    #[test]
    fn gagliardo_nirenberg_examples() {
        let g = Grid1D::centered(200.0, 4096).unwrap();
        let r = SampledField::from_fn(g, |x| 2.0 / (x * x + 1.0));
        assert!(gagliardo_nirenberg_ratio(&r).unwrap() <= 1.0);
        let gauss = SampledField::from_fn(g, |x| (-x * x).exp());
        assert!(gagliardo_nirenberg_ratio(&gauss).unwrap() <= 1.0);
        assert!(gagliardo_nirenberg_ratio(&SampledField::zeros(g)).is_err());
    }

    #[test]
    fn abs_d_is_symmetric_and_nonnegative() {
        let g = Grid1D::centered(20.0, 256).unwrap();
        let f = SampledField::from_fn(g, |x| (-(x - 1.0).powi(2)).exp() * (2.0 * x).sin());
        let h = SampledField::from_fn(g, |x| 1.0 / (1.0 + x * x));
        let inner = |a: &SampledField, b: &SampledField| -> Complex64 {
            a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * g.dx()
        };
        let dff = inner(&abs_d(&f), &f);
        assert!(dff.re >= 0.0 && dff.im.abs() < 1e-14);
        let lhs = inner(&abs_d(&f), &h);
        let rhs = inner(&f, &abs_d(&h));
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
