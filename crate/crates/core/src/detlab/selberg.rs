//! Laguerre and Hermite Selberg integrals: closed forms and seeded Monte Carlo checks.
//!
//! * Laguerre: `⟨f⟩_L = ∫_{0<x_1<…<x_k} f(x) √(∏x_j) ∏_{j<m}(x_m - x_j)² e^{-Σx_j} dx`
//!   (the ordered region; the integral over all of `[0,∞)^k` is `k!` times larger)
//! * Hermite: `⟨f⟩_H = ∫_{R^k} f(x) ∏_{j<m}(x_m - x_j)² e^{-Σx_j²/2} dx`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{IdentityReport, Residual};
use crate::asym::ln_factorial;
use crate::error::{ChamberError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelbergWeight {
    Laguerre,
    Hermite,
}

/// `One` checks `⟨1⟩` against its closed form; `Aomoto` checks
/// `⟨Σx⟩_L/⟨1⟩_L = k² + k/2` or `⟨Σx²⟩_H/⟨1⟩_H = k²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelbergStatistic {
    One,
    Aomoto,
}

/// `⟨1⟩_L = π^{k/2} 2^{-k²} ∏(2j-1)!` or `⟨1⟩_H = (2π)^{k/2} ∏ j!`.
pub fn selberg_closed_form(k: usize, weight: SelbergWeight) -> f64 {
    let kf = k as f64;
    let pi = std::f64::consts::PI;
    let ln = match weight {
        SelbergWeight::Laguerre => {
            kf / 2.0 * pi.ln() - kf * kf * 2f64.ln() + (1..=k as u64).map(|j| ln_factorial(2 * j - 1)).sum::<f64>()
        }
        SelbergWeight::Hermite => kf / 2.0 * (2.0 * pi).ln() + (1..=k as u64).map(ln_factorial).sum::<f64>(),
    };
    ln.exp()
}

fn squared_vandermonde(x: &[f64]) -> f64 {
    let mut acc = 1.0;
    for m in 0..x.len() {
        for j in 0..m {
            acc *= (x[m] - x[j]).powi(2);
        }
    }
    acc
}

/// Monte Carlo estimate from `samples` draws of a `ChaCha8` stream seeded with `seed`.
///
/// Laguerre draws unit-rate exponentials and averages `√∏x · Δ² / k!`; Hermite draws
/// standard normals and averages `(2π)^{k/2} Δ²`. Passes when the estimate lies
/// within 3 standard errors of the target; the residual is that z-score.
pub fn selberg_mc_check(k: usize, weight: SelbergWeight, which: SelbergStatistic, samples: usize, seed: u64) -> Result<IdentityReport> {
    if k == 0 || k > 3 {
        return Err(ChamberError::Domain(format!("Monte Carlo check supports 1 ≤ k ≤ 3, got {k}")));
    }
    if samples < 100_000 {
        return Err(ChamberError::Domain(format!("need at least 100000 samples, got {samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm = match weight {
        SelbergWeight::Laguerre => 1.0 / (1..=k).product::<usize>() as f64,
        SelbergWeight::Hermite => (2.0 * std::f64::consts::PI).powf(k as f64 / 2.0),
    };
    let mut x = vec![0.0; k];
    // Running sums for f, g = f·extra, and their second moments.
    let (mut sf, mut sg, mut sff, mut sgg, mut sfg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let (f, extra) = match weight {
            SelbergWeight::Laguerre => {
                for v in x.iter_mut() {
                    *v = rng.sample(Exp1);
                }
                (norm * x.iter().product::<f64>().sqrt() * squared_vandermonde(&x), x.iter().sum::<f64>())
            }
            SelbergWeight::Hermite => {
                for v in x.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                (norm * squared_vandermonde(&x), x.iter().map(|v| v * v).sum::<f64>())
            }
        };
        let g = f * extra;
        sf += f;
        sg += g;
        sff += f * f;
        sgg += g * g;
        sfg += f * g;
    }
    let n = samples as f64;
    let (mf, mg) = (sf / n, sg / n);
    let var_f = (sff / n - mf * mf) * n / (n - 1.0);
    let var_g = (sgg / n - mg * mg) * n / (n - 1.0);
    let cov = (sfg / n - mf * mg) * n / (n - 1.0);
    let kf = k as f64;
    let (estimate, target, se) = match which {
        SelbergStatistic::One => (mf, selberg_closed_form(k, weight), (var_f / n).sqrt()),
        SelbergStatistic::Aomoto => {
            let r = mg / mf;
            // Delta method for a ratio of means.
            let var_r = (var_g - 2.0 * r * cov + r * r * var_f) / (mf * mf);
            let target = match weight {
                SelbergWeight::Laguerre => kf * kf + kf / 2.0,
                SelbergWeight::Hermite => kf * kf,
            };
            (r, target, (var_r / n).sqrt())
        }
    };
    let z = (estimate - target) / se;
    Ok(IdentityReport {
        identity: format!("selberg_{}", match which {
            SelbergStatistic::One => "one",
            SelbergStatistic::Aomoto => "aomoto",
        }),
        params: json!({
            "k": k,
            "weight": weight,
            "samples": samples,
            "seed": seed,
            "estimate": estimate,
            "target": target,
            "standard_error": se,
        }),
        pass: z.is_finite() && z.abs() <= 3.0,
        residual: Residual::Float(z),
        sign: None,
    })
}
