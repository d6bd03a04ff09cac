//! Named walk models from the vicious-walker and tangled-diagram applications,
//! with their specialised asymptotic formulas coded independently of [`crate::asym`].
//!
//! Walker heights `0, 2, …, 2k-2` are stored shifted by one, as chamber
//! coordinates `1, 3, …, 2k-1`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::asym::{ln_factorial, ln_odd_factorial_product, ln_squared_vandermonde, support_positive, AsymptoticEstimate};
use crate::error::{ChamberError, Result};
use crate::stepmodel::{AtomicKind, ChamberPoint, CompositeSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetId {
    LockStepFixed,
    Watermelon,
    LockStepFree,
    Star,
    RandomTurnsFixed,
    RandomTurnsFree,
    TangledIsolated,
    TangledNoIsolated,
}

impl PresetId {
    pub const ALL: [PresetId; 8] = [
        PresetId::LockStepFixed,
        PresetId::Watermelon,
        PresetId::LockStepFree,
        PresetId::Star,
        PresetId::RandomTurnsFixed,
        PresetId::RandomTurnsFree,
        PresetId::TangledIsolated,
        PresetId::TangledNoIsolated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetId::LockStepFixed => "lock-step-fixed",
            PresetId::Watermelon => "watermelon",
            PresetId::LockStepFree => "lock-step-free",
            PresetId::Star => "star",
            PresetId::RandomTurnsFixed => "random-turns-fixed",
            PresetId::RandomTurnsFree => "random-turns-free",
            PresetId::TangledIsolated => "tangled-isolated",
            PresetId::TangledNoIsolated => "tangled-no-isolated",
        }
    }

    /// Whether the walk has a free endpoint.
    pub fn is_free(self) -> bool {
        matches!(self, PresetId::LockStepFree | PresetId::Star | PresetId::RandomTurnsFree)
    }

    /// Whether the specialised formula is stated only for the default endpoints.
    pub fn fixes_endpoints(self) -> bool {
        matches!(self, PresetId::Watermelon | PresetId::Star | PresetId::TangledIsolated | PresetId::TangledNoIsolated)
    }

    pub fn spec(self, k: usize) -> Result<CompositeSpec> {
        let (kind, w): (AtomicKind, &[i64]) = match self {
            PresetId::LockStepFixed | PresetId::Watermelon | PresetId::LockStepFree | PresetId::Star => (AtomicKind::Diagonal, &[0, 1]),
            PresetId::RandomTurnsFixed | PresetId::RandomTurnsFree => (AtomicKind::Axis, &[0, 1]),
            PresetId::TangledIsolated => (AtomicKind::Axis, &[1, 1, 1]),
            PresetId::TangledNoIsolated => (AtomicKind::Axis, &[0, 1, 1]),
        };
        CompositeSpec::with_integer_weights(kind, k, w)
    }

    fn default_start(self, k: usize) -> Option<Vec<i64>> {
        let k = k as i64;
        match self {
            PresetId::Watermelon | PresetId::Star => Some((1..=k).map(|j| 2 * j - 1).collect()),
            PresetId::TangledIsolated | PresetId::TangledNoIsolated => Some((1..=k).collect()),
            _ => None,
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetId {
    type Err = ChamberError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        PresetId::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| ChamberError::Parse(format!("unknown preset {s:?}")))
    }
}

/// Explicit endpoints replacing a preset's defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EndpointOverride {
    pub u: Option<ChamberPoint>,
    pub v: Option<ChamberPoint>,
}

impl EndpointOverride {
    pub fn is_empty(&self) -> bool {
        self.u.is_none() && self.v.is_none()
    }
}

/// A preset walk model with concrete endpoints.
///
/// `length_scale` converts the preset's length parameter into a number of
/// composite steps (2 for watermelons, whose parameter is the half-length).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresetInstance {
    pub id: PresetId,
    pub spec: CompositeSpec,
    pub u: ChamberPoint,
    pub v: Option<ChamberPoint>,
    pub length_scale: usize,
}

impl PresetInstance {
    pub fn length(&self, n: usize) -> usize {
        self.length_scale * n
    }
}

pub fn preset_spec(id: PresetId, k: usize, endpoints: &EndpointOverride) -> Result<PresetInstance> {
    let spec = id.spec(k)?;
    let default = id.default_start(k).map(ChamberPoint::new).transpose()?;
    let u = endpoints
        .u
        .clone()
        .or_else(|| default.clone())
        .ok_or_else(|| ChamberError::Domain(format!("preset {id} needs an explicit start point")))?;
    let v = if id.is_free() {
        if endpoints.v.is_some() {
            return Err(ChamberError::Domain(format!("preset {id} has a free endpoint; drop the end point")));
        }
        None
    } else {
        let v = match id {
            PresetId::Watermelon => endpoints.v.clone().or(default),
            PresetId::TangledIsolated | PresetId::TangledNoIsolated => endpoints.v.clone().or(default),
            _ => endpoints.v.clone(),
        };
        Some(v.ok_or_else(|| ChamberError::Domain(format!("preset {id} needs an explicit end point")))?)
    };
    spec.check_endpoint(&u)?;
    if let Some(v) = &v {
        spec.check_endpoint(v)?;
    }
    let length_scale = if id == PresetId::Watermelon { 2 } else { 1 };
    Ok(PresetInstance { id, spec, u, v, length_scale })
}

fn ln_fixed_product(u: &[i64], v: &[i64]) -> f64 {
    ln_squared_vandermonde(u) + ln_squared_vandermonde(v) + u.iter().chain(v).map(|&x| (x as f64).ln()).sum::<f64>()
}

fn ln_free_product(u: &[i64]) -> f64 {
    u.iter()
        .enumerate()
        .map(|(i, &x)| (x as f64).ln() + ln_factorial(i as u64) - ln_factorial(2 * i as u64 + 1))
        .sum::<f64>()
        + ln_squared_vandermonde(u)
}

fn half(x: usize) -> BigRational {
    BigRational::new(x.into(), 2.into())
}

/// The specialised leading-order formula for a preset, evaluated at the preset's
/// length parameter `n`. `correction` applies the printed second-order factor
/// where one exists (diagnostic only).
pub fn preset_asym(id: PresetId, k: usize, n: usize, endpoints: &EndpointOverride, correction: bool) -> Result<AsymptoticEstimate> {
    if id.fixes_endpoints() && !endpoints.is_empty() {
        return Err(ChamberError::Domain(format!("the {id} formula is stated for its default endpoints only")));
    }
    if n == 0 {
        return Err(ChamberError::Domain("asymptotic estimates need n ≥ 1".into()));
    }
    let inst = preset_spec(id, k, endpoints)?;
    let u = inst.u.coords();
    let kf = k as f64;
    let nf = n as f64;
    let ln2 = 2f64.ln();
    let ln_pi = std::f64::consts::PI.ln();
    let ln_2_over_pi = (2.0 / std::f64::consts::PI).ln();
    let fixed_power = half(2 * k * k + k);
    let free_power = half(k * k);
    let v = inst.v.as_ref().map(|v| v.coords());

    // (base_log, n_power, constant_log, printed correction factor)
    let (base, power, constant, corr): (f64, BigRational, f64, Option<f64>) = match id {
        PresetId::LockStepFixed => (
            nf * kf * ln2,
            -fixed_power,
            1.5 * kf * ln2 - kf / 2.0 * ln_pi + ln_fixed_product(u, v.expect("fixed")) - ln_odd_factorial_product(k),
            Some(1.0 / nf),
        ),
        PresetId::Watermelon => (
            nf * kf * 4f64.ln(),
            -fixed_power,
            (kf * kf - kf) * ln2 - kf / 2.0 * ln_pi + ln_odd_factorial_product(k),
            Some(1.0 / nf),
        ),
        PresetId::LockStepFree => {
            (nf * kf * ln2, -free_power, kf / 2.0 * ln2 - kf / 2.0 * ln_pi + ln_free_product(u), None)
        }
        PresetId::Star => (
            nf * kf * ln2,
            -free_power,
            (kf * kf - kf / 2.0) * ln2 - kf / 2.0 * ln_pi + (0..k as u64).map(ln_factorial).sum::<f64>(),
            None,
        ),
        PresetId::RandomTurnsFixed => (
            nf * (2.0 * kf).ln(),
            -fixed_power.clone(),
            ln2 + kf / 2.0 * ln_2_over_pi + (kf * kf + kf / 2.0) * kf.ln() + ln_fixed_product(u, v.expect("fixed"))
                - ln_odd_factorial_product(k),
            Some(kf / nf),
        ),
        PresetId::RandomTurnsFree => (
            nf * (2.0 * kf).ln(),
            -free_power,
            kf / 2.0 * ln_2_over_pi + kf * kf / 2.0 * kf.ln() + ln_free_product(u),
            None,
        ),
        PresetId::TangledIsolated | PresetId::TangledNoIsolated => {
            let s = if id == PresetId::TangledIsolated { 1.0 + 2.0 * kf + 4.0 * kf * kf } else { 2.0 * kf + 4.0 * kf * kf };
            let e = kf * kf + kf / 2.0;
            let corr = if id == PresetId::TangledIsolated {
                (1.0 + 2.0 * kf + 4.0 * kf * kf) / (2.0 * nf * (1.0 + 4.0 * kf))
            } else {
                (1.0 + 2.0 * kf * kf) / (nf * (1.0 + 4.0 * kf))
            };
            (
                nf * s.ln(),
                -fixed_power,
                kf / 2.0 * ln_2_over_pi + e * (s.ln() - (2.0 + 8.0 * kf).ln()) + ln_odd_factorial_product(k),
                Some(corr),
            )
        }
    };
    let supported = match &inst.v {
        Some(v) => support_positive(&inst.spec, &inst.u, v, inst.length(n)),
        None => true,
    };
    let corr = if correction { corr.map(f64::ln_1p) } else { None };
    Ok(AsymptoticEstimate::assemble(n, base, power, constant, corr, supported))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::{asym_fixed, asym_free};

    fn general(inst: &PresetInstance, n: usize) -> f64 {
        let len = inst.length(n);
        match &inst.v {
            Some(v) => asym_fixed(&inst.spec, &inst.u, v, len, false).unwrap().leading_log,
            None => asym_free(&inst.spec, &inst.u, len).unwrap().leading_log,
        }
    }

    fn sample_override(id: PresetId, k: usize) -> EndpointOverride {
        if id.fixes_endpoints() {
            return EndpointOverride::default();
        }
        let step = if id.spec(k).unwrap().kind() == AtomicKind::Diagonal { 2 } else { 1 };
        let u = ChamberPoint::new((1..=k as i64).map(|j| 1 + step * (j - 1) * 2).collect()).unwrap();
        let v = ChamberPoint::new((1..=k as i64).map(|j| 3 + step * (j - 1) * 3).collect()).unwrap();
        EndpointOverride { u: Some(u), v: (!id.is_free()).then_some(v) }
    }

    #[test]
    fn corollaries_match_general_formulas() {
        for id in PresetId::ALL {
            for k in 1..=4 {
                let ov = sample_override(id, k);
                let inst = preset_spec(id, k, &ov).unwrap();
                for n in [10, 100, 1000] {
                    let special = preset_asym(id, k, n, &ov, false).unwrap().leading_log;
                    let g = general(&inst, n);
                    assert!((special - g).abs() <= 1e-10 * g.abs().max(1.0), "{id} k={k} n={n}: {special} vs {g}");
                }
            }
        }
    }

    #[test]
    fn preset_shapes() {
        let w = preset_spec(PresetId::Watermelon, 2, &EndpointOverride::default()).unwrap();
        assert_eq!(w.spec.kind(), AtomicKind::Diagonal);
        assert_eq!(w.u.coords(), &[1, 3]);
        assert_eq!(w.v.as_ref().unwrap().coords(), &[1, 3]);
        assert_eq!(w.length(5), 10);
        let t = preset_spec(PresetId::TangledIsolated, 2, &EndpointOverride::default()).unwrap();
        assert_eq!(t.spec.weights().len(), 3);
        assert_eq!(t.u.coords(), &[1, 2]);
        let s = preset_spec(PresetId::Star, 3, &EndpointOverride::default()).unwrap();
        assert_eq!(s.u.coords(), &[1, 3, 5]);
        assert!(s.v.is_none());
        assert!(preset_spec(PresetId::LockStepFixed, 2, &EndpointOverride::default()).is_err());
        assert!(preset_spec(PresetId::RandomTurnsFree, 2, &EndpointOverride::default()).is_err());
    }

    #[test]
    fn watermelon_k1_value() {
        let est = preset_asym(PresetId::Watermelon, 1, 8, &EndpointOverride::default(), false).unwrap();
        let direct = 4f64.powi(8) / std::f64::consts::PI.sqrt() / 8f64.powf(1.5);
        assert!((est.leading_log.exp() / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overrides_rejected_where_formula_fixes_endpoints() {
        let ov = EndpointOverride { u: Some(ChamberPoint::new(vec![1, 5]).unwrap()), v: None };
        assert!(preset_asym(PresetId::Star, 2, 10, &ov, false).is_err());
    }

    #[test]
    fn names_roundtrip() {
        for id in PresetId::ALL {
            assert_eq!(id.name().parse::<PresetId>().unwrap(), id);
        }
        assert!("nope".parse::<PresetId>().is_err());
    }
}
