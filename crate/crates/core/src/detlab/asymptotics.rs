//! Small-argument behaviour of the sine and Gaussian-kernel determinants, and
//! the sign rule for shifting angles by maximal points.
//!
//! The determinants vanish to high order at the origin, so they are evaluated
//! in exact rational arithmetic from truncated Taylor series (inputs are the
//! exact binary values of the given doubles).

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use super::matrix::{det_exact, ExactMatrix};
use super::{IdentityReport, Residual};
use crate::error::{ChamberError, Result};
use crate::rational::{int, pow_i, rational_from_f64};

fn tail_bound() -> BigRational {
    pow_i(&int(2), -256)
}

/// `sin x` to within `2^-256`.
fn sin_series(x: &BigRational) -> BigRational {
    let x2 = x * x;
    let eps = tail_bound();
    let mut term = x.clone();
    let mut sum = x.clone();
    let mut i = 1i64;
    loop {
        term = -(term * &x2) / int((2 * i) * (2 * i + 1));
        sum += &term;
        if term.abs() < eps {
            return sum;
        }
        i += 1;
    }
}

/// `exp(-s)` for `s ≥ 0`, to within `2^-256`.
fn exp_neg_series(s: &BigRational) -> BigRational {
    let eps = tail_bound();
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut i = 1i64;
    loop {
        term = -(term * s) / int(i);
        sum += &term;
        if term.abs() < eps && int(i) > *s {
            return sum;
        }
        i += 1;
    }
}

fn odd_factorial_product(k: usize) -> BigRational {
    (1..=k as i64).map(|j| (1..=2 * j - 1).map(int).product::<BigRational>()).product()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 0.3 {
        Ok(())
    } else {
        Err(ChamberError::Domain(format!("eps must lie in (0, 0.3], got {eps}")))
    }
}

fn ratio_report(identity: &str, params: serde_json::Value, ratio: &BigRational) -> IdentityReport {
    let r = ratio.to_f64().unwrap_or(f64::NAN);
    let residual = r.abs() - 1.0;
    IdentityReport {
        identity: identity.to_string(),
        params,
        pass: residual.is_finite() && residual.abs() < 0.5,
        residual: Residual::Float(residual),
        sign: Some(if r < 0.0 { -1 } else { 1 }),
    }
}

/// `det(sin(u_m φ_j)) / L(φ)` at `φ = eps · direction`, with
/// `L = ∏φ_j ∏_{j<m}(φ_m² - φ_j²) (-1)^{k(k-1)/2} ∏_j u_j/(2j-1)! ∏_{j<m}(u_m² - u_j²)`.
///
/// The residual is `|R| - 1`, expected to be `O(eps²)`; `sign` is the sign of `R`.
pub fn dsin_leading_ratio(u: &[i64], direction: &[f64], eps: f64) -> Result<IdentityReport> {
    check_eps(eps)?;
    let k = u.len();
    crate::error::check_dim(k, direction.len())?;
    if k == 0 {
        return Err(ChamberError::Domain("need at least one coordinate".into()));
    }
    if u.iter().any(|&x| x <= 0) || u.iter().tuple_combinations().any(|(a, b)| a == b) {
        return Err(ChamberError::Domain("u must be distinct positive integers".into()));
    }
    let phi: Vec<BigRational> = direction.iter().map(|d| rational_from_f64(eps * d)).collect::<Result<_>>()?;
    if phi.iter().any(Zero::is_zero) || phi.iter().tuple_combinations().any(|(a, b)| a * a == b * b) {
        return Err(ChamberError::Degenerate("direction needs nonzero coordinates with distinct squares".into()));
    }
    let m = ExactMatrix::from_fn(k, |j, c| sin_series(&(&phi[j] * int(u[c]))));
    let det = det_exact(&m);

    let mut lead: BigRational = phi.iter().product();
    for (j, m) in (0..k).tuple_combinations() {
        lead *= &phi[m] * &phi[m] - &phi[j] * &phi[j];
        lead *= int(u[m] * u[m] - u[j] * u[j]);
    }
    lead *= u.iter().map(|&x| int(x)).product::<BigRational>();
    lead /= odd_factorial_product(k);
    if (k * (k - 1) / 2) % 2 == 1 {
        lead = -lead;
    }
    let params = json!({ "u": u, "direction": direction, "eps": eps });
    Ok(ratio_report("dsin_leading_ratio", params, &(det / lead)))
}

/// `det(e^{-(x_j - y_m)²} - e^{-(x_j + y_m)²})` at `x = y = eps·(1, …, k)` over
/// `∏ x_j y_j ∏_{j<m}(x_m² - x_j²)(y_m² - y_j²) · 2^{k²+k} / ∏(2j-1)!`.
pub fn gaussian_kernel_det_ratio(k: usize, eps: f64) -> Result<IdentityReport> {
    check_eps(eps)?;
    if k == 0 {
        return Err(ChamberError::Domain("need k ≥ 1".into()));
    }
    let e = rational_from_f64(eps)?;
    let x: Vec<BigRational> = (1..=k as i64).map(|j| &e * int(j)).collect();
    let y = x.clone();
    let m = ExactMatrix::from_fn(k, |j, c| {
        let d = &x[j] - &y[c];
        let s = &x[j] + &y[c];
        exp_neg_series(&(&d * &d)) - exp_neg_series(&(&s * &s))
    });
    let det = det_exact(&m);
    let mut lead: BigRational = x.iter().chain(&y).product();
    for (j, m) in (0..k).tuple_combinations() {
        lead *= (&x[m] * &x[m] - &x[j] * &x[j]) * (&y[m] * &y[m] - &y[j] * &y[j]);
    }
    lead *= pow_i(&int(2), (k * k + k) as i64);
    lead /= odd_factorial_product(k);
    Ok(ratio_report("gaussian_kernel_ratio", json!({ "k": k, "eps": eps }), &(det / lead)))
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for p in 0..n {
        let piv = (p..n).max_by(|&i, &j| a[i][p].abs().total_cmp(&a[j][p].abs())).expect("nonempty");
        if a[piv][p] == 0.0 {
            return 0.0;
        }
        if piv != p {
            a.swap(piv, p);
            det = -det;
        }
        det *= a[p][p];
        let (top, rest) = a.split_at_mut(p + 1);
        let pivot = &top[p];
        for row in rest {
            let f = row[p] / pivot[p];
            for (x, y) in row[p..].iter_mut().zip(&pivot[p..]) {
                *x -= f * y;
            }
        }
    }
    det
}

/// `det(sin(u_m(φ̂_j + φ_j))) = (-1)^{Σ u_j φ̂_j/π} det(sin(u_m φ_j))`, where
/// `φ̂_j` is `π` for `signs[j] = -1` and `0` otherwise. Relative tolerance `1e-9`.
pub fn sign_identity_check(u: &[i64], signs: &[i8], phi: &[f64]) -> Result<IdentityReport> {
    let k = u.len();
    crate::error::check_dim(k, signs.len())?;
    crate::error::check_dim(k, phi.len())?;
    let hat: Vec<f64> = signs.iter().map(|&s| if s < 0 { std::f64::consts::PI } else { 0.0 }).collect();
    let shifted = det_f64((0..k).map(|j| (0..k).map(|m| (u[m] as f64 * (hat[j] + phi[j])).sin()).collect()).collect());
    let plain = det_f64((0..k).map(|j| (0..k).map(|m| (u[m] as f64 * phi[j]).sin()).collect()).collect());
    let flips: i64 = u.iter().zip(signs).filter(|(_, &s)| s < 0).map(|(&x, _)| x).sum();
    let sign: i8 = if flips % 2 == 0 { 1 } else { -1 };
    let expected = sign as f64 * plain;
    let residual = (shifted - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
    Ok(IdentityReport {
        identity: "maximal_point_sign".to_string(),
        params: json!({ "u": u, "signs": signs, "phi": phi }),
        pass: residual <= 1e-9,
        residual: Residual::Float(residual),
        sign: Some(sign),
    })
}
