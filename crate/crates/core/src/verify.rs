//! Seeded verification suites over the counting engine, the asymptotic
//! formulas and the determinant identities.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::asym::{asym_fixed, asym_free};
use crate::detlab::{
    check_type_c_det_identity, dsin_leading_ratio, gaussian_kernel_det_ratio, mixed_vandermonde_det, quotient_identity_check,
    schur_orthogonal_identity_check, selberg_closed_form, selberg_mc_check, sign_identity_check, IdentityReport, Residual,
    SelbergStatistic, SelbergWeight,
};
use crate::error::{ChamberError, Result};
use crate::exact::Counter;
use crate::presets::{preset_asym, preset_spec, EndpointOverride, PresetId, PresetInstance};
use crate::rational::format_rational;
use crate::stepmodel::{gaussian_expansion, maximal_points, numeric_expansion, AtomicKind, ChamberPoint, CompositeSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Oracle,
    Det,
    Schur,
    Selberg,
    Dsin,
    Signs,
    Consistency,
}

impl Suite {
    pub const ALL: [Suite; 7] = [Suite::Oracle, Suite::Det, Suite::Schur, Suite::Selberg, Suite::Dsin, Suite::Signs, Suite::Consistency];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Det => "det",
            Suite::Schur => "schur",
            Suite::Selberg => "selberg",
            Suite::Dsin => "dsin",
            Suite::Signs => "signs",
            Suite::Consistency => "consistency",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ChamberError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| ChamberError::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: usize,
    pub failures: usize,
    pub reports: Vec<IdentityReport>,
}

impl SuiteReport {
    fn new(suite: Suite, reports: Vec<IdentityReport>) -> Self {
        let failures = reports.iter().filter(|r| !r.pass).count();
        SuiteReport { suite: suite.name().to_string(), pass: failures == 0, checks: reports.len(), failures, reports }
    }
}

/// Monte Carlo sample count used by the Selberg suite.
pub const SELBERG_SAMPLES: usize = 1_000_000;

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let reports = match suite {
        Suite::Oracle => oracle_suite(seed)?,
        Suite::Det => det_suite(seed)?,
        Suite::Schur => schur_suite(seed)?,
        Suite::Selberg => selberg_suite(seed)?,
        Suite::Dsin => dsin_suite()?,
        Suite::Signs => signs_suite(seed)?,
        Suite::Consistency => consistency_suite()?,
    };
    Ok(SuiteReport::new(suite, reports))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A random chamber point with coordinates in `1..=top`, in the lattice of `kind`.
pub fn random_chamber_point(rng: &mut impl Rng, kind: AtomicKind, k: usize, top: i64) -> ChamberPoint {
    let pool: Vec<i64> = match kind {
        AtomicKind::Axis => (1..=top).collect(),
        AtomicKind::Diagonal => {
            let parity = rng.gen_range(0..2);
            (1..=top).filter(|x| x % 2 == parity).collect()
        }
    };
    let mut picked: Vec<i64> = pool.choose_multiple(rng, k).copied().collect();
    picked.sort_unstable();
    ChamberPoint::new(picked).expect("distinct positive coordinates")
}

fn lengths_for(k: usize) -> Vec<usize> {
    let n_max = if k == 1 { 16 } else { 10 };
    (0..=n_max).collect()
}

fn points_json(p: &ChamberPoint) -> serde_json::Value {
    json!(p.coords())
}

/// Reflection sum against the confined DP for every preset, `k ∈ {1,2,3}`,
/// ten random endpoint pairs each, all lengths up to 10 (16 for `k = 1`).
/// The per-image reflection mode is cross-checked on the first pair.
pub fn oracle_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let counter = Counter::default();
    let cases: Vec<(PresetId, usize, usize)> =
        PresetId::ALL.into_iter().flat_map(|id| (1..=3).flat_map(move |k| (0..10).map(move |i| (id, k, i)))).collect();
    cases
        .par_iter()
        .map(|&(id, k, i)| {
            let spec = id.spec(k)?;
            let mut rng = rng_for(seed, (id as u64) << 16 | (k as u64) << 8 | i as u64);
            let top = 3 * k as i64 + 3;
            let u = random_chamber_point(&mut rng, spec.kind(), k, top);
            let v = random_chamber_point(&mut rng, spec.kind(), k, top);
            let lengths = lengths_for(k);
            let confined = counter.confined_series(&spec, &u, &v, &lengths)?;
            let reflected = counter.reflection_series(&spec, &u, &v, &lengths)?;
            let mut mismatch = confined.iter().zip(&reflected).position(|(a, b)| a != b);
            if mismatch.is_none() && i == 0 {
                for &n in lengths.iter().take(7) {
                    if counter.count_reflection_naive(&spec, &u, &v, n)? != confined[n] {
                        mismatch = Some(n);
                        break;
                    }
                }
            }
            if mismatch.is_none() && id.is_free() {
                let a = counter.confined_free_series(&spec, &u, &lengths)?;
                let b = counter.reflection_free_series(&spec, &u, &lengths)?;
                mismatch = a.iter().zip(&b).position(|(x, y)| x != y);
            }
            let residual = match mismatch {
                Some(n) => Residual::Exact(reflected[n].value() - confined[n].value()),
                None => Residual::Exact(BigRational::zero()),
            };
            Ok(IdentityReport {
                identity: "reflection_equals_confined".into(),
                params: json!({
                    "preset": id.name(),
                    "k": k,
                    "u": points_json(&u),
                    "v": points_json(&v),
                    "n_max": lengths.last(),
                    "first_mismatch": mismatch,
                }),
                pass: mismatch.is_none(),
                residual,
                sign: None,
            })
        })
        .collect()
}

fn random_rational(rng: &mut impl Rng, positive: bool) -> BigRational {
    loop {
        let num: i64 = if positive { rng.gen_range(1..=9) } else { rng.gen_range(-9..=9) };
        let den: i64 = rng.gen_range(1..=5);
        if num != 0 {
            return BigRational::new(num.into(), den.into());
        }
    }
}

fn random_distinct(rng: &mut impl Rng, k: usize, positive: bool, ok: impl Fn(&[BigRational], &BigRational) -> bool) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::with_capacity(k);
    while out.len() < k {
        let x = random_rational(rng, positive);
        if ok(&out, &x) {
            out.push(x);
        }
    }
    out
}

fn distinct_squares(prev: &[BigRational], x: &BigRational) -> bool {
    prev.iter().all(|p| p.abs() != x.abs())
}

/// Exact determinant identities at 20 random rational points each, `k ≤ 4`.
pub fn det_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = rng_for(seed, 1);
    let mut reports = Vec::new();
    for i in 0..20 {
        let k = 1 + i % 4;
        let z = random_distinct(&mut rng, k, false, distinct_squares);
        reports.push(check_type_c_det_identity(&z, false)?);
        let t = random_distinct(&mut rng, k, false, distinct_squares);
        reports.push(check_type_c_det_identity(&t, true)?);
        let one = BigRational::one();
        let q = random_distinct(&mut rng, k, false, |prev, x| {
            x.abs() != one && prev.iter().all(|p| p != x && p * x != one)
        });
        reports.push(quotient_identity_check(&q)?);
        let mut u = random_distinct(&mut rng, k, true, |prev, x| !prev.contains(x));
        u.sort();
        let a = rng.gen_range(0..=k);
        let (pass, value) = match mixed_vandermonde_det(&u, a) {
            Ok(d) => (true, format_rational(&d)),
            Err(ChamberError::Diagnostic(_)) => (false, "0".to_string()),
            Err(e) => return Err(e),
        };
        reports.push(IdentityReport {
            identity: "mixed_vandermonde_nonzero".into(),
            params: json!({ "u": crate::detlab::rationals_json(&u), "a": a, "det": value }),
            pass,
            residual: Residual::Exact(BigRational::zero()),
            sign: None,
        });
    }
    Ok(reports)
}

/// Box sum of Schur functions at 20 random points, `k ≤ 3`, `c ≤ 2`.
pub fn schur_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = rng_for(seed, 2);
    (0..20)
        .map(|i| {
            let k = 1 + i % 3;
            let c = rng.gen_range(0..=2);
            let one = BigRational::one();
            // t = 1 and t_j t_m = 1 are poles of the determinant ratio.
            let t = random_distinct(&mut rng, k, true, |prev, x| *x != one && prev.iter().all(|p| p != x && p * x != one));
            schur_orthogonal_identity_check(&t, c)
        })
        .collect()
}

fn closed_form_report(name: &str, value: f64, target: f64) -> IdentityReport {
    let residual = (value - target).abs() / target;
    IdentityReport {
        identity: name.into(),
        params: json!({ "value": value, "target": target }),
        pass: residual <= 4.0 * f64::EPSILON,
        residual: Residual::Float(residual),
        sign: None,
    }
}

/// Closed forms at `k = 1` and Monte Carlo checks at `k = 2`.
pub fn selberg_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let pi = std::f64::consts::PI;
    let mut reports = vec![
        closed_form_report("selberg_closed_form_laguerre_k1", selberg_closed_form(1, SelbergWeight::Laguerre), pi.sqrt() / 2.0),
        closed_form_report("selberg_closed_form_hermite_k1", selberg_closed_form(1, SelbergWeight::Hermite), (2.0 * pi).sqrt()),
    ];
    let runs = [
        (SelbergWeight::Laguerre, SelbergStatistic::One),
        (SelbergWeight::Hermite, SelbergStatistic::One),
        (SelbergWeight::Laguerre, SelbergStatistic::Aomoto),
        (SelbergWeight::Hermite, SelbergStatistic::Aomoto),
    ];
    let mc: Vec<Result<IdentityReport>> = runs
        .par_iter()
        .enumerate()
        .map(|(i, &(w, s))| selberg_mc_check(2, w, s, SELBERG_SAMPLES, seed.wrapping_add(i as u64)))
        .collect();
    for r in mc {
        reports.push(r?);
    }
    Ok(reports)
}

/// Step sizes for the quadratic-decay checks.
pub const DECAY_EPS: [f64; 3] = [0.1, 0.05, 0.025];

fn decay_reports(name: &str, params: serde_json::Value, runs: &[IdentityReport]) -> Vec<IdentityReport> {
    let residual = |r: &IdentityReport| match r.residual {
        Residual::Float(x) => x.abs(),
        _ => f64::NAN,
    };
    let mut out: Vec<IdentityReport> = runs.to_vec();
    for (a, b) in runs.iter().tuple_windows() {
        let factor = residual(a) / residual(b);
        out.push(IdentityReport {
            identity: format!("{name}_decay"),
            params: json!({ "instance": params, "from": a.params["eps"], "to": b.params["eps"] }),
            pass: (3.0..=5.0).contains(&factor),
            residual: Residual::Float(factor),
            sign: None,
        });
    }
    out
}

/// Sine and Gaussian-kernel determinant ratios at `k ∈ {1,2,3}` over the
/// halving sequence [`DECAY_EPS`], with a `[3, 5]` decay-factor check per halving.
pub fn dsin_suite() -> Result<Vec<IdentityReport>> {
    let mut reports = Vec::new();
    for k in 1..=3usize {
        let u: Vec<i64> = (1..=k as i64).collect();
        let dir: Vec<f64> = (1..=k).map(|j| j as f64).collect();
        let runs = DECAY_EPS.iter().map(|&e| dsin_leading_ratio(&u, &dir, e)).collect::<Result<Vec<_>>>()?;
        reports.extend(decay_reports("dsin_leading_ratio", json!({ "u": u, "direction": dir }), &runs));
        let runs = DECAY_EPS.iter().map(|&e| gaussian_kernel_det_ratio(k, e)).collect::<Result<Vec<_>>>()?;
        reports.extend(decay_reports("gaussian_kernel_ratio", json!({ "k": k }), &runs));
    }
    Ok(reports)
}

fn instance_for(id: PresetId, k: usize, rng: &mut impl Rng) -> Result<PresetInstance> {
    let spec = id.spec(k)?;
    let ov = if id.fixes_endpoints() {
        EndpointOverride::default()
    } else {
        let u = random_chamber_point(rng, spec.kind(), k, 3 * k as i64 + 3);
        let v = (!id.is_free()).then(|| random_chamber_point(rng, spec.kind(), k, 3 * k as i64 + 3));
        EndpointOverride { u: Some(u), v }
    };
    preset_spec(id, k, &ov)
}

/// The maximal-point sign rule for every preset, `k ≤ 3`, every maximal point.
pub fn signs_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = rng_for(seed, 3);
    let mut reports = Vec::new();
    for id in PresetId::ALL {
        for k in 1..=3 {
            let inst = instance_for(id, k, &mut rng)?;
            for eps in maximal_points(&inst.spec).points {
                let phi: Vec<f64> = (0..k).map(|j| 0.05 + 0.1 * j as f64 + rng.gen_range(0.0..0.05)).collect();
                let mut r = sign_identity_check(inst.u.coords(), &eps, &phi)?;
                r.params["preset"] = json!(id.name());
                reports.push(r);
            }
        }
    }
    Ok(reports)
}

fn general_leading(inst: &PresetInstance, n: usize) -> Result<f64> {
    let len = inst.length(n);
    Ok(match &inst.v {
        Some(v) => asym_fixed(&inst.spec, &inst.u, v, len, false)?.leading_log,
        None => asym_free(&inst.spec, &inst.u, len)?.leading_log,
    })
}

/// Absolute tolerance on log-scale agreement between specialised and general formulas.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Specialised preset formulas against the general formulas (`k ≤ 4`,
/// `n ∈ {10, 100, 1000}`), and the closed-form `Λ` against a numeric fit.
pub fn consistency_suite() -> Result<Vec<IdentityReport>> {
    let mut reports = Vec::new();
    let mut rng = rng_for(0, 4);
    for id in PresetId::ALL {
        for k in 1..=4 {
            let inst = instance_for(id, k, &mut rng)?;
            let ov = if id.fixes_endpoints() {
                EndpointOverride::default()
            } else {
                EndpointOverride { u: Some(inst.u.clone()), v: inst.v.clone() }
            };
            for n in [10usize, 100, 1000] {
                let special = preset_asym(id, k, n, &ov, false)?.leading_log;
                let general = general_leading(&inst, n)?;
                let diff = (special - general).abs();
                reports.push(IdentityReport {
                    identity: "preset_formula_consistency".into(),
                    params: json!({ "preset": id.name(), "k": k, "n": n, "u": inst.u.coords(), "v": inst.v.as_ref().map(|v| v.coords().to_vec()), "log_value": general }),
                    pass: diff <= CONSISTENCY_TOL,
                    residual: Residual::Float(diff),
                    sign: None,
                });
            }
            reports.push(lambda_fit_report(&inst.spec, id)?);
        }
    }
    Ok(reports)
}

fn lambda_fit_report(spec: &CompositeSpec, id: PresetId) -> Result<IdentityReport> {
    let exact = gaussian_expansion(spec)?.lambda;
    let fit = numeric_expansion(spec).lambda;
    let exact_f = crate::rational::rational_to_f64(&exact);
    let diff = (exact_f - fit).abs();
    Ok(IdentityReport {
        identity: "lambda_numeric_fit".into(),
        params: json!({ "preset": id.name(), "k": spec.k(), "lambda": format_rational(&exact), "fit": fit }),
        pass: diff <= 1e-10,
        residual: Residual::Float(diff),
        sign: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn random_points_respect_lattice() {
        let mut rng = rng_for(5, 0);
        for _ in 0..50 {
            let p = random_chamber_point(&mut rng, AtomicKind::Diagonal, 3, 12);
            assert!(p.coords().iter().all(|x| (x - p.coords()[0]) % 2 == 0));
        }
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Det, Suite::Schur, Suite::Dsin, Suite::Signs, Suite::Consistency] {
            let r = run_suite(s, 7).unwrap();
            let bad: Vec<_> = r.reports.iter().filter(|x| !x.pass).collect();
            assert!(r.pass, "{s}: {bad:#?}");
        }
    }
}
