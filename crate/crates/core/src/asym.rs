//! Leading-order asymptotics of confined walk counts, the parity condition
//! for positivity, and convergence diagnostics against exact counts.
//!
//! Fixed endpoint:
//! `|M| S(1)^n (2/π)^{k/2} (nΛ)^{-(k²+k/2)} ∏_{j<m}(u_m²-u_j²)(v_m²-v_j²) ∏_j u_j v_j / ∏_j (2j-1)!`
//!
//! Free endpoint:
//! `S(1)^n (2/π)^{k/2} (nΛ)^{-k²/2} ∏_j u_j (j-1)!/(2j-1)! ∏_{j<m}(u_m²-u_j²)`

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{ChamberError, Result};
use crate::exact::{CountValue, Counter};
use crate::rational::{self, ln_abs_rational};
use crate::stepmodel::{gaussian_expansion, maximal_points, s_one, AtomicKind, ChamberPoint, CompositeSpec};

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `ln ∏_{j=1}^k (2j-1)!`.
pub fn ln_odd_factorial_product(k: usize) -> f64 {
    (1..=k as u64).map(|j| ln_factorial(2 * j - 1)).sum()
}

/// `ln ∏_{j<m} (x_m² - x_j²)` for an increasing positive sequence.
pub fn ln_squared_vandermonde(x: &[i64]) -> f64 {
    let mut acc = 0.0;
    for m in 0..x.len() {
        for j in 0..m {
            let (a, b) = (x[j] as f64, x[m] as f64);
            acc += (b - a).ln() + (b + a).ln();
        }
    }
    acc
}

/// A closed-form asymptotic estimate, kept in log space.
///
/// `leading_log = base_log + n_power · ln n + constant_log`; `log_value`
/// adds the optional correction and is `None` when the parity condition
/// rules out positive counts at this `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub log_value: Option<f64>,
    pub leading_log: f64,
    pub base_log: f64,
    #[serde(with = "rational::serde_rational")]
    pub n_power: BigRational,
    pub constant_log: f64,
    pub correction_log: f64,
    pub correction_applied: bool,
    pub supported: bool,
}

impl AsymptoticEstimate {
    pub(crate) fn assemble(n: usize, base_log: f64, n_power: BigRational, constant_log: f64, correction: Option<f64>, supported: bool) -> Self {
        let leading_log = base_log + n_power.to_f64().unwrap_or(f64::NAN) * (n as f64).ln() + constant_log;
        let correction_log = correction.unwrap_or(0.0);
        AsymptoticEstimate {
            log_value: supported.then_some(leading_log + correction_log),
            leading_log,
            base_log,
            n_power,
            constant_log,
            correction_log,
            correction_applied: correction.is_some(),
            supported,
        }
    }

    /// `log10` of the estimate, when supported.
    pub fn log10_value(&self) -> Option<f64> {
        self.log_value.map(|l| l / std::f64::consts::LN_10)
    }
}

/// Where the walk ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Fixed(ChamberPoint),
    Free,
}

/// Necessary parity condition for a positive confined count `u → v` in `n` steps.
///
/// Only models whose positive weights all sit at lengths of one parity `p`
/// are constrained: axis steps need `Σ(u_j + v_j) ≡ n p`, diagonal steps
/// need `v_j - u_j ≡ n p` for every `j` (all mod 2).
pub fn support_positive(spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> bool {
    let Some(p) = spec.weight_parity() else {
        return true;
    };
    let target = (n as i64 * p as i64).rem_euclid(2);
    match spec.kind() {
        AtomicKind::Axis => {
            let s: i64 = u.coords().iter().chain(v.coords()).sum();
            s.rem_euclid(2) == target
        }
        AtomicKind::Diagonal => u.coords().iter().zip(v.coords()).all(|(a, b)| (b - a).rem_euclid(2) == target),
    }
}

fn model_constants(spec: &CompositeSpec) -> Result<(f64, f64)> {
    let lambda = gaussian_expansion(spec)?.lambda;
    Ok((ln_abs_rational(&s_one(spec)), ln_abs_rational(&lambda)))
}

fn positive_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(ChamberError::Domain("asymptotic estimates need n ≥ 1".into()))
    } else {
        Ok(())
    }
}

/// Fixed-endpoint estimate. `correction` multiplies by `1 + 1/(nΛ)`.
pub fn asym_fixed(spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize, correction: bool) -> Result<AsymptoticEstimate> {
    positive_n(n)?;
    spec.check_endpoint(u)?;
    spec.check_endpoint(v)?;
    let k = spec.k();
    let kf = k as f64;
    let (ln_s1, ln_lambda) = model_constants(spec)?;
    let exponent = kf * kf + kf / 2.0;
    let ln_m = (maximal_points(spec).len() as f64).ln();
    let ln_endpoints = ln_squared_vandermonde(u.coords())
        + ln_squared_vandermonde(v.coords())
        + u.coords().iter().chain(v.coords()).map(|&x| (x as f64).ln()).sum::<f64>();
    let constant_log = ln_m + kf / 2.0 * (2.0 / std::f64::consts::PI).ln() - exponent * ln_lambda + ln_endpoints
        - ln_odd_factorial_product(k);
    let n_power = -BigRational::new((2 * k * k + k).into(), 2.into());
    let corr = correction.then(|| (1.0 / (n as f64 * ln_lambda.exp())).ln_1p());
    Ok(AsymptoticEstimate::assemble(n, n as f64 * ln_s1, n_power, constant_log, corr, support_positive(spec, u, v, n)))
}

/// Free-endpoint estimate (no correction term is available).
pub fn asym_free(spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<AsymptoticEstimate> {
    positive_n(n)?;
    spec.check_endpoint(u)?;
    let k = spec.k();
    let kf = k as f64;
    let (ln_s1, ln_lambda) = model_constants(spec)?;
    let per_walker: f64 = u
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &x)| (x as f64).ln() + ln_factorial(i as u64) - ln_factorial(2 * i as u64 + 1))
        .sum();
    let constant_log =
        kf / 2.0 * (2.0 / std::f64::consts::PI).ln() - kf * kf / 2.0 * ln_lambda + per_walker + ln_squared_vandermonde(u.coords());
    let n_power = -BigRational::new((k * k).into(), 2.into());
    Ok(AsymptoticEstimate::assemble(n, n as f64 * ln_s1, n_power, constant_log, None, true))
}

/// One grid point of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub exact: CountValue,
    pub exact_log: f64,
    pub asym_log: f64,
    pub ratio: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
}

/// Exact counts against leading-order estimates over `n_grid`, with a log-log
/// fit of `|δ_n|`. Unsupported lengths and zero counts are skipped.
pub fn compare_series(spec: &CompositeSpec, u: &ChamberPoint, end: &Endpoint, n_grid: &[usize]) -> Result<ConvergenceReport> {
    compare_series_with(&Counter::default(), spec, u, end, n_grid)
}

pub fn compare_series_with(
    counter: &Counter,
    spec: &CompositeSpec,
    u: &ChamberPoint,
    end: &Endpoint,
    n_grid: &[usize],
) -> Result<ConvergenceReport> {
    let mut grid: Vec<usize> = n_grid
        .iter()
        .copied()
        .filter(|&n| {
            n > 0
                && match end {
                    Endpoint::Fixed(v) => support_positive(spec, u, v, n),
                    Endpoint::Free => true,
                }
        })
        .collect();
    grid.sort_unstable();
    grid.dedup();
    let exact = match end {
        Endpoint::Fixed(v) => counter.confined_series(spec, u, v, &grid)?,
        Endpoint::Free => counter.confined_free_series(spec, u, &grid)?,
    };
    let mut rows = Vec::new();
    for (&n, count) in grid.iter().zip(exact) {
        if count.is_zero() {
            continue;
        }
        let est = match end {
            Endpoint::Fixed(v) => asym_fixed(spec, u, v, n, false)?,
            Endpoint::Free => asym_free(spec, u, n)?,
        };
        let exact_log = count.ln();
        let ratio = (exact_log - est.leading_log).exp();
        rows.push(ConvergenceRow { n, exact: count, exact_log, asym_log: est.leading_log, ratio, delta: ratio - 1.0 });
    }
    let mut report = ConvergenceReport { rows, fitted_slope: f64::NAN, fitted_intercept: f64::NAN };
    let (slope, intercept) = fit_decay_line(&report)?;
    report.fitted_slope = slope;
    report.fitted_intercept = intercept;
    Ok(report)
}

/// Least-squares slope of `ln|δ_n|` against `ln n`.
pub fn fit_decay(report: &ConvergenceReport) -> Result<f64> {
    Ok(fit_decay_line(report)?.0)
}

fn fit_decay_line(report: &ConvergenceReport) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.delta != 0.0 && r.delta.is_finite())
        .map(|r| ((r.n as f64).ln(), r.delta.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(ChamberError::Diagnostic(format!("need at least 3 usable grid points, got {}", pts.len())));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ChamberError::Diagnostic("all grid points share the same n".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Least-squares fit `δ_n ≈ a/n + b/n²` over rows with `n ≥ n_min`; returns `(a, b)`.
pub fn fit_inverse_powers(report: &ConvergenceReport, n_min: usize) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = report.rows.iter().filter(|r| r.n >= n_min).map(|r| (1.0 / r.n as f64, r.delta)).collect();
    if pts.len() < 3 {
        return Err(ChamberError::Diagnostic(format!("need at least 3 grid points with n ≥ {n_min}, got {}", pts.len())));
    }
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in pts {
        let (f1, f2) = (x, x * x);
        s11 += f1 * f1;
        s12 += f1 * f2;
        s22 += f2 * f2;
        t1 += f1 * y;
        t2 += f2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < f64::MIN_POSITIVE {
        return Err(ChamberError::Diagnostic("singular second-order fit".into()));
    }
    Ok(((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det))
}
