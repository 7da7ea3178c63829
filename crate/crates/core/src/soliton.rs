//! Rational soliton profiles `R_p`, pole families and their closed-form
//! Hardy projections.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Grid1D, SampledField};

/// Distance below which `z + p` counts as a pole hit.
pub const POLE_GUARD: f64 = 1e-12;

/// A pole `p` in the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParam {
    p: Complex64,
}

impl SolitonParam {
    pub fn new(p: Complex64) -> Result<Self> {
        if !(p.im > 0.0) || !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "soliton pole must satisfy Im p > 0, got {p}"
            )));
        }
        Ok(SolitonParam { p })
    }

    pub fn p(&self) -> Complex64 {
        self.p
    }

    pub fn im(&self) -> f64 {
        self.p.im
    }

    /// Crest speed `1 / Im p`.
    pub fn velocity(&self) -> f64 {
        1.0 / self.p.im
    }
}

/// `R_p(x − t/Im p) = 2 Im p / |x − t/Im p + p|²`.
pub fn soliton_profile(p: SolitonParam, t: f64, x: f64) -> f64 {
    let shifted = Complex64::new(x - t * p.velocity(), 0.0) + p.p;
    2.0 * p.im() / shifted.norm_sqr()
}

type PoleRule = Arc<dyn Fn(usize) -> Complex64 + Send + Sync>;
type TailRule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Poles {
    Finite(Vec<SolitonParam>),
    Generated {
        rule: PoleRule,
        max_index: usize,
        tail: TailRule,
    },
}

/// Finite or rule-generated sequence of poles `p_1, p_2, …`.
///
/// Generated families carry a certified bound on the sup-norm tail
/// `Σ_{j>J} 2/Im p_j`, which every truncation reports back to the caller.
#[derive(Clone)]
pub struct SolitonFamily {
    poles: Poles,
    ordered: bool,
    dropped_real: usize,
}

impl fmt::Debug for SolitonFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.poles {
            Poles::Finite(p) => f
                .debug_struct("SolitonFamily")
                .field("poles", p)
                .field("ordered", &self.ordered)
                .finish(),
            Poles::Generated { max_index, .. } => f
                .debug_struct("SolitonFamily")
                .field("generated_up_to", max_index)
                .field("ordered", &self.ordered)
                .finish(),
        }
    }
}

impl SolitonFamily {
    /// Family from explicit poles. Poles on the real axis contribute nothing to
    /// the sum and are dropped (see [`SolitonFamily::dropped_real_poles`]);
    /// poles below the axis are rejected.
    pub fn from_poles(poles: &[Complex64]) -> Result<Self> {
        let mut kept = Vec::with_capacity(poles.len());
        let mut dropped = 0;
        for &p in poles {
            if p.im == 0.0 {
                dropped += 1;
                continue;
            }
            kept.push(SolitonParam::new(p)?);
        }
        Ok(SolitonFamily {
            poles: Poles::Finite(kept),
            ordered: false,
            dropped_real: dropped,
        })
    }

    /// Infinite family `p_j = rule(j)` (1-based), explored up to `max_index`.
    /// `tail_bound(J)` must bound `Σ_{j>J} 2/Im p_j` and be nonincreasing.
    pub fn generated(
        rule: impl Fn(usize) -> Complex64 + Send + Sync + 'static,
        max_index: usize,
        tail_bound: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SolitonFamily {
            poles: Poles::Generated {
                rule: Arc::new(rule),
                max_index,
                tail: Arc::new(tail_bound),
            },
            ordered: false,
            dropped_real: 0,
        }
    }

    /// Assert `Im p_1 < Im p_2 < …` and set the ordering flag. For generated
    /// families the check covers the first `min(max_index, 100_000)` poles.
    pub fn into_ordered(mut self) -> Result<Self> {
        let count = self.len().min(100_000);
        let mut prev = f64::NEG_INFINITY;
        for j in 1..=count {
            let im = self.pole(j)?.im();
            if !(im > prev) {
                return Err(Error::InvalidParameter(format!(
                    "Im p_{j} = {im} does not exceed Im p_{} = {prev}",
                    j - 1
                )));
            }
            prev = im;
        }
        self.ordered = true;
        Ok(self)
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.poles, Poles::Finite(_))
    }

    pub fn dropped_real_poles(&self) -> usize {
        self.dropped_real
    }

    /// Number of poles (finite) or the generator's index bound.
    pub fn len(&self) -> usize {
        match &self.poles {
            Poles::Finite(p) => p.len(),
            Poles::Generated { max_index, .. } => *max_index,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pole `p_j`, 1-based.
    pub fn pole(&self, j: usize) -> Result<SolitonParam> {
        if j == 0 || j > self.len() {
            return Err(Error::InvalidParameter(format!(
                "pole index {j} outside 1..={}",
                self.len()
            )));
        }
        match &self.poles {
            Poles::Finite(p) => Ok(p[j - 1]),
            Poles::Generated { rule, .. } => SolitonParam::new(rule(j)),
        }
    }

    /// The first `min(j_max, len)` poles.
    pub fn poles_up_to(&self, j_max: usize) -> Result<Vec<SolitonParam>> {
        (1..=j_max.min(self.len())).map(|j| self.pole(j)).collect()
    }

    /// Bound on `sup_x Σ_{j>J} R_{p_j}`, i.e. `Σ_{j>J} 2/Im p_j`.
    pub fn sup_tail(&self, j_cut: usize) -> f64 {
        match &self.poles {
            Poles::Finite(p) => p.iter().skip(j_cut).map(|q| 2.0 / q.im()).sum(),
            Poles::Generated { tail, .. } => tail(j_cut),
        }
    }
}

/// Smallest truncation index `J` with tail bound below `tail_tol`.
pub fn truncation_index(fam: &SolitonFamily, tail_tol: f64) -> Result<(usize, f64)> {
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tail_tol must be > 0, got {tail_tol}")));
    }
    let max = fam.len();
    let at_max = fam.sup_tail(max);
    if !(at_max < tail_tol) {
        return Err(Error::Truncation {
            tol: tail_tol,
            bound: at_max,
            max_index: max,
        });
    }
    if fam.sup_tail(0) < tail_tol {
        return Ok((0, fam.sup_tail(0)));
    }
    // invariant: tail(lo) >= tol, tail(hi) < tol
    let (mut lo, mut hi) = (0usize, max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fam.sup_tail(mid) < tail_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, fam.sup_tail(hi)))
}

/// Sampled soliton sum plus the truncation certificate.
#[derive(Debug, Clone)]
pub struct FamilyField {
    pub field: SampledField,
    pub truncation_index: usize,
    pub tail_bound: f64,
}

/// `Σ_j R_{p_j}(x − t/Im p_j)` on the grid, truncated once the sup-norm tail
/// bound falls below `tail_tol`.
pub fn family_field(fam: &SolitonFamily, t: f64, grid: Grid1D, tail_tol: f64) -> Result<FamilyField> {
    let (cut, bound) = truncation_index(fam, tail_tol)?;
    let poles = fam.poles_up_to(cut)?;
    let values: Vec<f64> = grid
        .points()
        .par_iter()
        .map(|&x| poles.iter().map(|&p| soliton_profile(p, t, x)).sum())
        .collect();
    Ok(FamilyField {
        field: SampledField::from_real(grid, values)?,
        truncation_index: cut,
        tail_bound: bound,
    })
}

/// Partial double sum of the summability condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summability {
    pub value: f64,
    /// Partial sums over the leading `J' × J'` blocks never decreased.
    pub monotone: bool,
}

/// `Σ_{j,k ≤ J} Im p_j / |p_j − conj p_k|²`.
pub fn summability(fam: &SolitonFamily, j_max: usize) -> Result<Summability> {
    let poles = fam.poles_up_to(j_max)?;
    let term = |a: Complex64, b: Complex64| a.im / (a - b.conj()).norm_sqr();
    let mut value = 0.0;
    let mut monotone = true;
    for (m, pm) in poles.iter().enumerate() {
        let mut inc = term(pm.p(), pm.p());
        for pj in &poles[..m] {
            inc += term(pj.p(), pm.p()) + term(pm.p(), pj.p());
        }
        let next = value + inc;
        if next < value {
            monotone = false;
        }
        value = next;
    }
    Ok(Summability { value, monotone })
}

/// `Πu₀(z) = i Σ_{j≤J} 1/(z + p_j)` for `Im z ≥ 0`.
pub fn hardy_closed_form(fam: &SolitonFamily, z: Complex64, j_max: usize) -> Result<Complex64> {
    if z.im < 0.0 {
        return Err(Error::InvalidParameter(format!("need Im z >= 0, got {z}")));
    }
    let poles = fam.poles_up_to(j_max)?;
    pole_sum(&poles, z).map(|s| Complex64::i() * s)
}

/// `Σ 1/(z + p_j)` with the collision guard.
pub(crate) fn pole_sum(poles: &[SolitonParam], z: Complex64) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for p in poles {
        let w = z + p.p();
        let distance = w.norm();
        if distance < POLE_GUARD {
            return Err(Error::PoleCollision { z, distance });
        }
        s += w.inv();
    }
    Ok(s)
}

/// Two evaluations of `‖Πu₀‖₂²` for a truncated family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Identity {
    /// Grid quadrature of `|Πu₀|²` including the far-field correction.
    pub lhs: f64,
    /// `4π Σ_{j,k} Im p_j / |p_j − conj p_k|²`.
    pub rhs: f64,
    /// Analytic integral of the `1/x²` and `1/x³` far-field terms outside the box.
    pub far_field: f64,
}

/// Quadrature of `|Πu₀|²` over the grid against the residue double sum.
///
/// Outside the box `|Πu₀|² = J²/x² − 2J Re(Σp)/x³ + O(x⁻⁴)`; those two terms are
/// integrated analytically so the comparison is limited by `O(L⁻³)` rather
/// than the `O(1/L)` box truncation.
pub fn l2_identity(fam: &SolitonFamily, grid: Grid1D, j_max: usize) -> Result<L2Identity> {
    let (a, b) = (grid.x_min(), grid.x_max());
    if !(a < 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(
            "l2_identity needs a box containing the origin".into(),
        ));
    }
    let poles = fam.poles_up_to(j_max)?;
    let dens = |x: f64| -> Result<f64> { Ok(pole_sum(&poles, Complex64::new(x, 0.0))?.norm_sqr()) };
    let pts = grid.points();
    let body: Vec<f64> = pts.par_iter().map(|&x| dens(x)).collect::<Result<_>>()?;
    let dx = grid.dx();
    // periodic rectangle sum plus the trapezoid endpoint term
    let quad = dx * body.iter().sum::<f64>() + 0.5 * dx * (dens(b)? - dens(a)?);

    let count = poles.len() as f64;
    let re_sum: f64 = poles.iter().map(|p| p.p().re).sum();
    let far_field = count * count * (1.0 / b - 1.0 / a) - count * re_sum * (1.0 / (b * b) - 1.0 / (a * a));

    let rhs = 4.0 * PI * summability(fam, j_max)?.value;
    Ok(L2Identity {
        lhs: quad + far_field,
        rhs,
        far_field,
    })
}

/// Parse a pole list: one `re im` pair per line, `#` comments and blank lines
/// ignored.
pub fn parse_poles(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected `re im`, found {:?}", raw.trim()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{s:?}: {e}"),
            })
        };
        out.push(Complex64::new(num(fields[0])?, num(fields[1])?));
    }
    Ok(out)
}

pub fn read_poles(path: &Path) -> Result<SolitonFamily> {
    let text = std::fs::read_to_string(path)?;
    SolitonFamily::from_poles(&parse_poles(&text)?)
}
