//! One function per subcommand. Each reads all of its keys, rejects unknown
//! ones, then computes and writes.

use std::fs;

use bolab_core::engine::{neumann_term, parse_spectrum, sample_exact, second_order_bound, AsymptoticSpectrum};
use bolab_core::evolution::{bo_evolve_with, EvolveConfig};
use bolab_core::lab::{
    fit_decay, gap_check, measure_interaction_error, measure_interaction_error_l2, minimax_bound, radiation_experiment,
    ErrorCurve, Eigenvalues, RadiationConfig, SpectralLaw,
};
use bolab_core::lax::{default_epsilon, discrete_spectrum, dump_spectrum, trace_from, DEFAULT_MODES};
use bolab_core::scattering::{distorted_spectrum, profile_from, box_frequencies, DEFAULT_MAX_ITER, DEFAULT_TOL};
use bolab_core::soliton::{family_field, parse_poles};
use bolab_core::{Grid1D, NormKind, SampledField, SolitonFamily};
use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::error::CliError;
use crate::output::Output;

fn read_text(cfg: &Config, key: &str) -> Result<String, CliError> {
    let path = cfg.path(key)?;
    fs::read_to_string(&path).map_err(|e| CliError::Config(format!("cannot read {} file {}: {e}", key, path.display())))
}

fn read_family(cfg: &Config) -> Result<SolitonFamily, CliError> {
    Ok(SolitonFamily::from_poles(&parse_poles(&read_text(cfg, "poles")?)?)?)
}

fn read_spectrum(cfg: &Config) -> Result<AsymptoticSpectrum, CliError> {
    Ok(parse_spectrum(&read_text(cfg, "spectrum")?)?)
}

/// Initial data selected by `initial = zero | gaussian | poles | spectrum`.
enum Initial {
    Zero,
    Gaussian { amplitude: f64, width: f64 },
    Poles(SolitonFamily, f64),
    Spectrum(AsymptoticSpectrum, f64),
}

impl Initial {
    fn read(cfg: &Config) -> Result<Self, CliError> {
        match cfg.string_or("initial", "gaussian").as_str() {
            "zero" => Ok(Initial::Zero),
            "gaussian" => Ok(Initial::Gaussian {
                amplitude: cfg.f64_or("amplitude", 0.05)?,
                width: cfg.f64_or("width", 4.0)?,
            }),
            "poles" => Ok(Initial::Poles(read_family(cfg)?, cfg.f64_or("tail_tol", 1e-12)?)),
            "spectrum" => Ok(Initial::Spectrum(read_spectrum(cfg)?, cfg.f64_or("t", 0.0)?)),
            other => Err(CliError::Config(format!(
                "`initial` must be zero, gaussian, poles or spectrum, got `{other}`"
            ))),
        }
    }

    fn sample(&self, grid: Grid1D) -> Result<SampledField, CliError> {
        Ok(match self {
            Initial::Zero => SampledField::zeros(grid),
            Initial::Gaussian { amplitude, width } => {
                let (a, w) = (*amplitude, *width);
                SampledField::from_fn(grid, |x| a * (-(x / w).powi(2)).exp())
            }
            Initial::Poles(fam, tol) => family_field(fam, 0.0, grid, *tol)?.field,
            Initial::Spectrum(spec, t) => sample_exact(spec, *t, grid)?,
        })
    }
}

pub fn soliton(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let fam = read_family(cfg)?;
    let t = cfg.f64_or("t", 0.0)?;
    let tail_tol = cfg.f64_or("tail_tol", 1e-12)?;
    let grid = cfg.grid()?;
    cfg.finish()?;
    let f = family_field(&fam, t, grid, tail_tol)?;
    let rows = f.field.real_values().into_iter().enumerate().map(|(j, u)| vec![grid.x(j), u]);
    out.csv("profile.csv", &["x", "u"], rows)
}

pub fn exact(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let spec = read_spectrum(cfg)?;
    let times = cfg.times("0")?;
    let c_prime = cfg.f64_or("c_prime", 1.0)?;
    let grid = cfg.grid()?;
    cfg.finish()?;
    let mut rows = Vec::new();
    let mut diag = Vec::new();
    for &t in &times {
        let u = sample_exact(&spec, t, grid)?;
        let mut order1: f64 = 0.0;
        for (j, v) in u.real_values().into_iter().enumerate() {
            let x = grid.x(j);
            rows.push(vec![t, x, v]);
            order1 = order1.max(neumann_term(&spec, t, x, 1).norm());
        }
        let bound = if t > 0.0 {
            second_order_bound(&spec, spec.len(), t, c_prime)?
        } else {
            f64::INFINITY
        };
        diag.push(vec![t, order1, bound]);
    }
    out.csv("exact.csv", &["t", "x", "u"], rows)?;
    out.csv("diagnostics.csv", &["t", "order1_max", "order2_bound"], diag)
}

pub fn spectrum(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let initial = Initial::read(cfg)?;
    let grid = cfg.grid()?;
    let modes = cfg.usize_or("modes", DEFAULT_MODES)?;
    let epsilon = cfg.f64_or("epsilon", default_epsilon(&grid))?;
    cfg.finish()?;
    let u = initial.sample(grid)?;
    let s = discrete_spectrum(&u, modes, epsilon)?;
    let tr = trace_from(&s, &u);
    dump_spectrum(&s, &out.path("spectrum.csv"))?;
    out.record("spectrum.csv");
    out.json(
        "trace.json",
        &json!({
            "lhs": tr.lhs,
            "rhs": tr.rhs,
            "gap": tr.gap,
            "bound_states": tr.bound_states,
            "negative_eigenvalues": s.negative_part,
            "epsilon": epsilon,
            "modes": modes,
        }),
    )
}

pub fn scatter(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let initial = Initial::read(cfg)?;
    let grid = cfg.grid()?;
    let k_max = cfg.usize_or("k_max", grid.max_hardy_index())?;
    let tol = cfg.f64_or("tol", DEFAULT_TOL)?;
    let max_iter = cfg.usize_or("max_iter", DEFAULT_MAX_ITER)?;
    cfg.finish()?;
    let u = initial.sample(grid)?;
    let s = distorted_spectrum(&u, &box_frequencies(&grid, k_max), tol, max_iter)?;
    let profile = profile_from(grid, &s)?;
    s.dump(&out.path("zeta.csv"))?;
    out.record("zeta.csv");
    let rows = profile.real_values().into_iter().enumerate().map(|(j, v)| vec![grid.x(j), v]);
    out.csv("radiation.csv", &["x", "u"], rows)
}

pub fn evolve(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let initial = Initial::read(cfg)?;
    let grid = cfg.grid()?;
    let times = cfg.times("1")?;
    let dt = cfg.f64("dt")?;
    let dealias = cfg.f64_or("dealias", 2.0 / 3.0)?;
    let l2_tolerance = cfg.f64_or("l2_tolerance", 1e-8)?;
    cfg.finish()?;
    let u = initial.sample(grid)?;
    let traj = bo_evolve_with(
        &u,
        &EvolveConfig {
            dt,
            dealias,
            output_times: times,
            l2_tolerance,
        },
    )?;
    traj.dump(out.dir())?;
    for i in 0..traj.fields.len() {
        out.record(&format!("snapshot_{i:04}.csv"));
    }
    out.record("manifest.json");
    Ok(())
}

#[derive(Serialize)]
struct FitReport {
    norm: &'static str,
    slope: Option<f64>,
    intercept: Option<f64>,
    r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_condition: Option<bool>,
}

fn norm_name(kind: NormKind) -> &'static str {
    match kind {
        NormKind::L2 => "l2",
        NormKind::Linf => "linf",
        _ => "other",
    }
}

/// A fit, or an explanatory note when the curve cannot be fitted (for example
/// an identically zero error).
fn report(curve: &ErrorCurve) -> FitReport {
    let name = norm_name(curve.norm);
    match fit_decay(curve) {
        Ok(f) => FitReport {
            norm: name,
            slope: Some(f.slope),
            intercept: Some(f.intercept),
            r_squared: Some(f.r_squared),
            note: None,
            predicted_exponent: None,
            gap_condition: None,
        },
        Err(e) => FitReport {
            norm: name,
            slope: None,
            intercept: None,
            r_squared: None,
            note: Some(e.to_string()),
            predicted_exponent: None,
            gap_condition: None,
        },
    }
}

fn pick(l2: ErrorCurve, linf: ErrorCurve, which: &str) -> Result<ErrorCurve, CliError> {
    match which {
        "linf" => Ok(linf),
        "l2" => Ok(l2),
        other => Err(CliError::Config(format!("`fit_norm` must be l2 or linf, got `{other}`"))),
    }
}

pub fn resolve(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let experiment = cfg.string_or("experiment", "interaction");
    match experiment.as_str() {
        "interaction" => resolve_interaction(cfg, out),
        "radiation" => resolve_radiation(cfg, out),
        other => Err(CliError::Config(format!(
            "`experiment` must be interaction or radiation, got `{other}`"
        ))),
    }
}

fn resolve_interaction(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let (spec, eigs, law) = if cfg.has("spectrum") {
        let spec = read_spectrum(cfg)?;
        let eigs = Eigenvalues::List(spec.lambdas().to_vec());
        (spec, eigs, None)
    } else {
        let law = SpectralLaw::new(cfg.f64_or("c1", 1.0)?, cfg.f64_or("c2", 1.0)?, cfg.f64_or("alpha", 2.0)?)?;
        let n_total = cfg.usize_or("n_total", 50)?;
        let spec = AsymptoticSpectrum::from_lambdas(law.lambdas(n_total))?;
        (spec, Eigenvalues::Law(law), Some(law))
    };
    let times = cfg.times("100, 1000, 10000")?;
    let grid = cfg.grid()?;
    let fit_norm = cfg.string_or("fit_norm", "linf");
    let scan_cap = cfg.opt_usize("scan_cap")?;
    cfg.finish()?;
    if times.first().is_some_and(|t| !(*t > 0.0)) {
        return Err(CliError::Config("`times` must be positive".into()));
    }
    let linf = measure_interaction_error(&spec, &times, &grid)?;
    let l2 = measure_interaction_error_l2(&spec, &times, &grid)?;
    let rows = (0..times.len()).map(|i| vec![times[i], l2.errors[i], linf.errors[i]]);
    out.csv("errors.csv", &["t", "err_l2", "err_linf"], rows)?;
    let mut bounds = Vec::new();
    if !spec.is_empty() {
        for &t in &times {
            let m = minimax_bound(&eigs, t, scan_cap)?;
            bounds.push(vec![t, m.n_star as f64, m.bound]);
        }
    }
    out.csv("bounds.csv", &["t", "n_star", "bound"], bounds)?;
    let mut fit = report(&pick(l2, linf, &fit_norm)?);
    if let Some(law) = law {
        fit.predicted_exponent = Some(-law.predicted_exponent());
        fit.gap_condition = Some(gap_check(spec.lambdas(), law.c1, law.c2, law.alpha)?.ok);
    }
    out.json("fit.json", &fit)
}

fn resolve_radiation(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let initial = Initial::read(cfg)?;
    let grid = cfg.grid()?;
    let times = cfg.times("1, 5, 10, 25, 50, 100")?;
    let defaults = RadiationConfig::default();
    let rc = RadiationConfig {
        dt: cfg.f64_or("dt", defaults.dt)?,
        dealias: cfg.f64_or("dealias", defaults.dealias)?,
        modes: cfg.usize_or("modes", defaults.modes)?,
        epsilon: cfg.opt_f64("epsilon")?,
        k_max: cfg.opt_usize("k_max")?,
        l2_tolerance: cfg.f64_or("l2_tolerance", defaults.l2_tolerance)?,
    };
    let fit_norm = cfg.string_or("fit_norm", "linf");
    cfg.finish()?;
    let u = initial.sample(grid)?;
    let r = radiation_experiment(&u, &times, &rc)?;
    let rows = (0..times.len()).map(|i| vec![times[i], r.l2.errors[i], r.linf.errors[i]]);
    out.csv("errors.csv", &["t", "err_l2", "err_linf"], rows)?;
    out.json("fit.json", &report(&pick(r.l2, r.linf, &fit_norm)?))
}

pub fn fit(cfg: &Config, out: &mut Output) -> Result<(), CliError> {
    let text = read_text(cfg, "input")?;
    let column = cfg.string_or("column", "err_linf");
    cfg.finish()?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Config("input table is empty".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = header
        .iter()
        .position(|h| *h == column)
        .ok_or_else(|| CliError::Config(format!("input has no column `{column}`")))?;
    let (mut times, mut errors) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |k: usize| -> Result<f64, CliError> {
            cells
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Config(format!("input row {}: bad value in column {}", i + 2, k + 1)))
        };
        times.push(get(0)?);
        errors.push(get(col)?);
    }
    let kind = if column.ends_with("l2") { NormKind::L2 } else { NormKind::Linf };
    let curve = ErrorCurve::new(times, errors, kind)?;
    let f = fit_decay(&curve)?;
    out.json(
        "fit.json",
        &json!({ "column": column, "slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared }),
    )
}
