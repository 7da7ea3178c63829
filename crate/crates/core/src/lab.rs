//! Error curves, the tail/dynamic/minimax bound calculus, gap checks, decay
//! fits and the radiation comparison.

use rayon::prelude::*;

use crate::engine::{check_distinct, exact_solution, interaction_sum, soliton_sum, AsymptoticSpectrum};
use crate::error::{Error, Result};
use crate::evolution::{bo_evolve_with, free_propagate, EvolveConfig};
use crate::field::{norm, Grid1D, NormKind, SampledField};
use crate::lax::{default_epsilon, discrete_spectrum};
use crate::scattering::{radiation_profile, DistortedSpectrum};

/// Eigenvalues `λ_k = −C₁ k^{−α}` with gap constant `C₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLaw {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
}

impl SpectralLaw {
    pub fn new(c1: f64, c2: f64, alpha: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0) || !c1.is_finite() || !c2.is_finite() {
            return Err(Error::InvalidParameter(format!("need C1, C2 > 0, got {c1}, {c2}")));
        }
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("need alpha > 1, got {alpha}")));
        }
        Ok(SpectralLaw { c1, c2, alpha })
    }

    /// One-based.
    pub fn lambda(&self, k: usize) -> f64 {
        -self.c1 * (k as f64).powf(-self.alpha)
    }

    /// `λ_1, …, λ_n` in increasing order.
    pub fn lambdas(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.lambda(k)).collect()
    }

    /// `N = t^{1/(3α+4)}`.
    pub fn schedule(&self, t: f64) -> f64 {
        t.powf(1.0 / (3.0 * self.alpha + 4.0))
    }

    /// `(α − 1)/(3α + 4)`.
    pub fn predicted_exponent(&self) -> f64 {
        (self.alpha - 1.0) / (3.0 * self.alpha + 4.0)
    }
}

/// A finite eigenvalue list or an infinite law.
#[derive(Debug, Clone, PartialEq)]
pub enum Eigenvalues {
    List(Vec<f64>),
    Law(SpectralLaw),
}

impl Eigenvalues {
    fn first(&self, n: usize) -> Vec<f64> {
        match self {
            Eigenvalues::List(v) => v[..n.min(v.len())].to_vec(),
            Eigenvalues::Law(law) => law.lambdas(n),
        }
    }
}

/// Measured errors at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
    pub norm: NormKind,
}

impl ErrorCurve {
    pub fn new(times: Vec<f64>, errors: Vec<f64>, norm: NormKind) -> Result<Self> {
        if times.len() != errors.len() {
            return Err(Error::InvalidParameter(format!(
                "{} times but {} errors",
                times.len(),
                errors.len()
            )));
        }
        if times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("times must be positive and strictly increasing".into()));
        }
        if errors.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(Error::InvalidParameter("errors must be finite and nonnegative".into()));
        }
        Ok(ErrorCurve { times, errors, norm })
    }

    /// CSV with columns `t,error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,error\n");
        for (t, e) in self.times.iter().zip(&self.errors) {
            s.push_str(&format!("{t:.16e},{e:.16e}\n"));
        }
        s
    }
}

/// Least-squares line through `(log t, log error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_decay(curve: &ErrorCurve) -> Result<DecayFit> {
    let n = curve.times.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("decay fit needs at least 3 points, got {n}")));
    }
    if curve.errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("decay fit needs strictly positive errors".into()));
    }
    let xs: Vec<f64> = curve.times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = curve.errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
    })
}

/// `Σ_{k>N} 4|λ_k|`, with the integral bound `4C₁ N^{1−α}/(α − 1)` for laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailError {
    pub value: f64,
    pub certificate: Option<f64>,
}

pub fn tail_error(eigs: &Eigenvalues, n: usize) -> TailError {
    match eigs {
        Eigenvalues::List(v) => TailError {
            value: v.iter().skip(n).map(|l| 4.0 * l.abs()).sum(),
            certificate: None,
        },
        Eigenvalues::Law(law) => TailError {
            value: 4.0 * law.c1 * hurwitz_tail(law.alpha, n + 1),
            certificate: (n > 0).then(|| 4.0 * law.c1 / (law.alpha - 1.0) * (n as f64).powf(1.0 - law.alpha)),
        },
    }
}

/// `Σ_{k≥m} k^{−α}` for `α > 1`, `m ≥ 1`: ten explicit terms, then
/// Euler–Maclaurin.
fn hurwitz_tail(alpha: f64, m: usize) -> f64 {
    let direct: f64 = (m..m + 10).map(|k| (k as f64).powf(-alpha)).sum();
    let a = (m + 10) as f64;
    let p = |e: f64| a.powf(e);
    let s = alpha;
    direct + p(1.0 - s) / (s - 1.0) + 0.5 * p(-s) + s / 12.0 * p(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * p(-s - 3.0)
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * p(-s - 5.0)
        - s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * (s + 5.0) * (s + 6.0) / 1_209_600.0 * p(-s - 7.0)
}

/// Direct triple sum over the first `n` eigenvalues.
pub fn dyn_error(lambdas: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("dyn_error needs N >= 1".into()));
    }
    interaction_sum(&lambdas[..n.min(lambdas.len())])
}

/// The same sum as `Σ_l A_l B_l` with `A_l = Σ_{j≠l} |λ_j − λ_l|^{−2}` and
/// `B_l = Σ_{k≠l} |λ_k|/|λ_k − λ_l|`.
pub fn dyn_error_factored(lambdas: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("dyn_error needs N >= 1".into()));
    }
    let l = &lambdas[..n.min(lambdas.len())];
    check_distinct(l)?;
    Ok((0..l.len())
        .map(|i| {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &lj) in l.iter().enumerate() {
                if j != i {
                    let d = (lj - l[i]).abs();
                    a += 1.0 / (d * d);
                    b += lj.abs() / d;
                }
            }
            a * b
        })
        .sum())
}

/// Minimiser of `tail(N) + dyn(N)/t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimax {
    pub n_star: usize,
    pub bound: f64,
    /// Largest `N` examined.
    pub scanned: usize,
}

/// Scan cap for laws when none is given.
pub const LAW_SCAN_CAP: usize = 100_000;

/// Scan `N = 1, 2, …` up to the list length or `cap`.
///
/// `dyn(N)` is nondecreasing, so the scan stops once `dyn(N)/t` alone
/// reaches the best bound found.
pub fn minimax_bound(eigs: &Eigenvalues, t: f64, cap: Option<usize>) -> Result<Minimax> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("minimax bound needs t > 0, got {t}")));
    }
    let limit = match eigs {
        Eigenvalues::List(v) => v.len().min(cap.unwrap_or(usize::MAX)),
        Eigenvalues::Law(_) => cap.unwrap_or(LAW_SCAN_CAP),
    };
    if limit == 0 {
        return Err(Error::InvalidParameter("minimax bound needs at least one eigenvalue".into()));
    }
    let mut lambdas: Vec<f64> = Vec::new();
    let (mut a, mut b): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut best = Minimax {
        n_star: 0,
        bound: f64::INFINITY,
        scanned: 0,
    };
    let list_tail: Vec<f64> = match eigs {
        Eigenvalues::List(v) => {
            check_distinct(v)?;
            let mut acc = vec![0.0; v.len() + 1];
            for k in (0..v.len()).rev() {
                acc[k] = acc[k + 1] + 4.0 * v[k].abs();
            }
            acc
        }
        Eigenvalues::Law(_) => Vec::new(),
    };
    for n in 1..=limit {
        let new = eigs.first(n)[n - 1];
        let (mut an, mut bn) = (0.0, 0.0);
        for (i, &li) in lambdas.iter().enumerate() {
            let d = (new - li).abs();
            if d == 0.0 {
                return Err(Error::InvalidParameter(format!("duplicate eigenvalue {new}")));
            }
            a[i] += 1.0 / (d * d);
            b[i] += new.abs() / d;
            an += 1.0 / (d * d);
            bn += li.abs() / d;
        }
        lambdas.push(new);
        a.push(an);
        b.push(bn);
        let dyn_n: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let tail = match eigs {
            Eigenvalues::List(_) => list_tail.get(n).copied().unwrap_or(0.0),
            Eigenvalues::Law(_) => tail_error(eigs, n).value,
        };
        let value = tail + dyn_n / t;
        best.scanned = n;
        if value < best.bound {
            best.bound = value;
            best.n_star = n;
        }
        if dyn_n / t >= best.bound {
            break;
        }
    }
    Ok(best)
}

/// Result of [`gap_check`]. Margins are relative: `have/need − 1`, so a
/// negative margin is a violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCheck {
    pub ok: bool,
    pub amplitude_ok: bool,
    pub gap_ok: bool,
    /// One-based pair with the smallest gap margin.
    pub worst_pair: Option<(usize, usize)>,
    pub worst_gap_margin: f64,
    /// One-based index with the smallest amplitude margin.
    pub worst_index: usize,
    pub worst_amplitude_margin: f64,
}

/// Relative slack accepted before a margin counts as violated.
const GAP_SLACK: f64 = 1e-12;

/// `|λ_k| ≤ C₁k^{−α}` and `|λ_j − λ_k| ≥ C₂|j − k| max(j,k)^{−α−1}`.
pub fn gap_check(lambdas: &[f64], c1: f64, c2: f64, alpha: f64) -> Result<GapCheck> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("gap check needs a nonempty list".into()));
    }
    let mut worst_index = 1;
    let mut worst_amp = f64::INFINITY;
    for (i, l) in lambdas.iter().enumerate() {
        let k = (i + 1) as f64;
        let margin = c1 * k.powf(-alpha) / l.abs() - 1.0;
        if margin < worst_amp {
            worst_amp = margin;
            worst_index = i + 1;
        }
    }
    let mut worst_pair = None;
    let mut worst_gap = f64::INFINITY;
    for j in 0..lambdas.len() {
        for k in j + 1..lambdas.len() {
            let (jj, kk) = ((j + 1) as f64, (k + 1) as f64);
            let need = c2 * (kk - jj) * kk.max(jj).powf(-alpha - 1.0);
            let margin = (lambdas[j] - lambdas[k]).abs() / need - 1.0;
            if margin < worst_gap {
                worst_gap = margin;
                worst_pair = Some((j + 1, k + 1));
            }
        }
    }
    let amplitude_ok = worst_amp >= -GAP_SLACK;
    let gap_ok = worst_gap >= -GAP_SLACK;
    Ok(GapCheck {
        ok: amplitude_ok && gap_ok,
        amplitude_ok,
        gap_ok,
        worst_pair,
        worst_gap_margin: worst_gap,
        worst_index,
        worst_amplitude_margin: worst_amp,
    })
}

/// Subsamples per crest window in [`measure_interaction_error`].
pub const WINDOW_SAMPLES: usize = 64;

/// Sample points at time `t`: the grid plus a window of width `10 y_k` around
/// each predicted crest.
pub fn refined_points(spec: &AsymptoticSpectrum, t: f64, grid: &Grid1D) -> Vec<f64> {
    let mut pts = grid.points();
    for k in 0..spec.len() {
        let centre = spec.crest(k, t);
        let half = 5.0 * spec.width(k);
        for i in 0..WINDOW_SAMPLES {
            pts.push(centre - half + 2.0 * half * i as f64 / (WINDOW_SAMPLES - 1) as f64);
        }
    }
    pts
}

/// `sup |exact_solution − soliton_sum|` over [`refined_points`] at each time.
pub fn measure_interaction_error(spec: &AsymptoticSpectrum, times: &[f64], grid: &Grid1D) -> Result<ErrorCurve> {
    let errors = times
        .par_iter()
        .map(|&t| {
            let mut worst: f64 = 0.0;
            for x in refined_points(spec, t, grid) {
                let d = exact_solution(spec, t, x)? - soliton_sum(spec, t, x);
                worst = worst.max(d.abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    ErrorCurve::new(times.to_vec(), errors, NormKind::Linf)
}

/// Grid L² norm of `exact_solution − soliton_sum` at each time.
pub fn measure_interaction_error_l2(spec: &AsymptoticSpectrum, times: &[f64], grid: &Grid1D) -> Result<ErrorCurve> {
    let errors = times
        .par_iter()
        .map(|&t| {
            let mut acc = 0.0;
            for x in grid.points() {
                let d = exact_solution(spec, t, x)? - soliton_sum(spec, t, x);
                acc += d * d;
            }
            Ok((acc * grid.dx()).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    ErrorCurve::new(times.to_vec(), errors, NormKind::L2)
}

/// Settings for [`radiation_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationConfig {
    pub dt: f64,
    pub dealias: f64,
    /// Lax modes used for the bound-state check.
    pub modes: usize,
    /// Bound-state threshold; `5·dξ` when `None`.
    pub epsilon: Option<f64>,
    /// Box frequencies carrying `ζ`; all when `None`.
    pub k_max: Option<usize>,
    pub l2_tolerance: f64,
}

impl Default for RadiationConfig {
    fn default() -> Self {
        RadiationConfig {
            dt: 5e-4,
            dealias: 2.0 / 3.0,
            modes: crate::lax::DEFAULT_MODES,
            epsilon: None,
            k_max: None,
            l2_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadiationResult {
    pub l2: ErrorCurve,
    pub linf: ErrorCurve,
    /// Lowest Lax eigenvalue found by the bound-state check.
    pub lowest_eigenvalue: f64,
    pub profile: SampledField,
    pub spectrum: DistortedSpectrum,
}

/// `r(t) = ‖u(t) − e^{t∂ₓ|D|}u_∞‖` in L² and L∞, with `u(t)` from the
/// pseudo-spectral solver and `u_∞` from the distorted coefficients of `u₀`.
pub fn radiation_experiment(u0: &SampledField, times: &[f64], cfg: &RadiationConfig) -> Result<RadiationResult> {
    let grid = *u0.grid();
    let epsilon = cfg.epsilon.unwrap_or_else(|| default_epsilon(&grid));
    let modes = cfg.modes.min(grid.max_hardy_index());
    let spec = discrete_spectrum(u0, modes, epsilon)?;
    if !spec.negative_part.is_empty() {
        return Err(Error::BoundState {
            count: spec.negative_part.len(),
            lowest: spec.negative_part[0],
        });
    }
    let (profile, spectrum) = radiation_profile(u0, cfg.k_max)?;
    let evolve = EvolveConfig {
        dt: cfg.dt,
        dealias: cfg.dealias,
        output_times: times.to_vec(),
        l2_tolerance: cfg.l2_tolerance,
    };
    let traj = bo_evolve_with(u0, &evolve)?;
    let mut l2 = Vec::new();
    let mut linf = Vec::new();
    for (t, u) in traj.times.iter().zip(&traj.fields).skip(1) {
        let diff = u.sub(&free_propagate(&profile, *t))?;
        l2.push(norm(&diff, NormKind::L2)?);
        linf.push(norm(&diff, NormKind::Linf)?);
    }
    Ok(RadiationResult {
        l2: ErrorCurve::new(times.to_vec(), l2, NormKind::L2)?,
        linf: ErrorCurve::new(times.to_vec(), linf, NormKind::Linf)?,
        lowest_eigenvalue: spec.eigenvalues[0],
        profile,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn decay_fit_examples() {
        let times = vec![1.0, 10.0, 100.0, 1000.0];
        let c = ErrorCurve::new(times.clone(), times.iter().map(|t| t.powf(-0.5)).collect(), NormKind::Linf).unwrap();
        let f = fit_decay(&c).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let c = ErrorCurve::new(times.clone(), times.iter().map(|t| 7.0 * t.powf(-0.1)).collect(), NormKind::L2).unwrap();
        let f = fit_decay(&c).unwrap();
        assert!((f.slope + 0.1).abs() < 1e-12);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-12);
        let bad = ErrorCurve::new(times.clone(), vec![1.0, 0.0, 1.0, 1.0], NormKind::L2).unwrap();
        assert!(fit_decay(&bad).is_err());
        assert!(ErrorCurve::new(vec![1.0, 1.0], vec![1.0, 1.0], NormKind::L2).is_err());
        assert!(ErrorCurve::new(vec![1.0], vec![1.0, 2.0], NormKind::L2).is_err());
    }

    #[test]
    fn tails() {
        let law = SpectralLaw::new(1.0, 1.0, 2.0).unwrap();
        let basel: f64 = (1..=10).map(|k| 1.0 / (k * k) as f64).sum();
        let expected = 4.0 * (PI * PI / 6.0 - basel);
        let t = tail_error(&Eigenvalues::Law(law), 10);
        assert!((t.value - expected).abs() < 1e-13, "{} vs {expected}", t.value);
        assert!((t.value - 0.3804).abs() < 1e-3);
        assert!((t.certificate.unwrap() - 0.4).abs() < 1e-15);
        let list = Eigenvalues::List(vec![-1.0, -0.5]);
        assert_eq!(tail_error(&list, 2).value, 0.0);
        assert_eq!(tail_error(&list, 1).value, 2.0);
        assert!(SpectralLaw::new(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn dynamic_sums() {
        assert_eq!(dyn_error(&[-1.0], 1).unwrap(), 0.0);
        assert!((dyn_error(&[-1.0, -0.25], 2).unwrap() - 80.0 / 27.0).abs() < 1e-14);
        let l = [-1.0, -0.5, -0.25];
        let a = dyn_error(&l, 3).unwrap();
        let b = dyn_error_factored(&l, 3).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        assert!(dyn_error(&[-1.0, -1.0], 2).is_err());
        assert!(dyn_error(&l, 0).is_err());
    }

    #[test]
    fn minimax_examples() {
        let list = Eigenvalues::List(vec![-1.0, -0.5, -0.25]);
        let m = minimax_bound(&list, 1e12, None).unwrap();
        assert_eq!(m.n_star, 3);
        assert!(m.bound < 1e-9);
        let law = Eigenvalues::Law(SpectralLaw::new(1.0, 1.0, 2.0).unwrap());
        let m = minimax_bound(&law, 1e10, None).unwrap();
        assert!(m.n_star as f64 >= 10.0 / 3.0 && m.n_star as f64 <= 30.0, "{m:?}");
        assert!(m.scanned < LAW_SCAN_CAP);
        assert!(minimax_bound(&law, 0.0, None).is_err());
    }

    #[test]
    fn gap_examples() {
        let l: Vec<f64> = (1..=500).map(|k| -1.0 / (k * k) as f64).collect();
        let g = gap_check(&l, 1.0, 1.0, 2.0).unwrap();
        assert!(g.ok && g.amplitude_ok && g.gap_ok);
        assert!(g.worst_amplitude_margin.abs() < 1e-12);
        let bad = gap_check(&[-1.0, -1.0 + 1e-9], 1.0, 1.0, 2.0).unwrap();
        assert!(!bad.ok && !bad.gap_ok);
        assert_eq!(bad.worst_pair, Some((1, 2)));
        assert!(gap_check(&[], 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn single_soliton_has_no_interaction_error() {
        let spec = AsymptoticSpectrum::from_lambdas(vec![-0.5]).unwrap();
        let g = Grid1D::centered(50.0, 256).unwrap();
        let c = measure_interaction_error(&spec, &[1.0, 10.0, 100.0], &g).unwrap();
        assert!(c.errors.iter().all(|e| *e < 1e-14), "{:?}", c.errors);
        let c = measure_interaction_error_l2(&spec, &[1.0, 10.0], &g).unwrap();
        assert!(c.errors.iter().all(|e| *e < 1e-13), "{:?}", c.errors);
    }
}
