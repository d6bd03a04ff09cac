use std::io::Write;

use chamber_core::asym::compare_series_with;
use chamber_core::rational::parse_rational;
use chamber_core::{
    asym_fixed, asym_free, preset_asym, preset_spec, run_suite, AsymptoticEstimate, ChamberPoint, CompositeSpec, CountValue,
    Counter, Endpoint, EndpointOverride, PresetId, Suite, SuiteReport,
};
use serde::Serialize;

use crate::args::{AsymArgs, CompareArgs, CountArgs, Format, Method, ModelArgs, OnOff, PresetArgs, VerifyArgs};
use crate::Failure;

struct Model {
    preset: Option<PresetId>,
    spec: CompositeSpec,
    u: ChamberPoint,
    end: Endpoint,
}

#[derive(Serialize)]
struct ModelEcho<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'a str>,
    #[serde(flatten)]
    spec: &'a CompositeSpec,
    u: &'a [i64],
    v: Option<&'a [i64]>,
}

impl Model {
    fn echo(&self) -> ModelEcho<'_> {
        ModelEcho {
            preset: self.preset.map(PresetId::name),
            spec: &self.spec,
            u: self.u.coords(),
            v: match &self.end {
                Endpoint::Fixed(v) => Some(v.coords()),
                Endpoint::Free => None,
            },
        }
    }

    fn endpoint_name(&self) -> &'static str {
        match self.end {
            Endpoint::Fixed(_) => "fixed",
            Endpoint::Free => "free",
        }
    }
}

fn point(coords: &Option<Vec<i64>>) -> Result<Option<ChamberPoint>, Failure> {
    Ok(coords.as_ref().map(|c| ChamberPoint::new(c.clone())).transpose()?)
}

fn resolve(m: &ModelArgs) -> Result<Model, Failure> {
    let u = point(&m.u)?;
    let v = point(&m.v)?;
    if let Some(id) = m.preset {
        let inst = preset_spec(id, m.k, &EndpointOverride { u, v })?;
        return Ok(Model { preset: Some(id), spec: inst.spec, u: inst.u, end: inst.v.map_or(Endpoint::Free, Endpoint::Fixed) });
    }
    let kind = m.kind.ok_or_else(|| Failure::Usage("--kind is required unless --preset is given".into()))?;
    let weights = m.weights.as_ref().ok_or_else(|| Failure::Usage("--weights is required unless --preset is given".into()))?;
    let weights = weights.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>, _>>()?;
    let spec = CompositeSpec::new(kind.into(), m.k, weights)?;
    let u = u.ok_or_else(|| Failure::Usage("--u is required".into()))?;
    spec.check_endpoint(&u)?;
    if let Some(v) = &v {
        spec.check_endpoint(v)?;
    }
    Ok(Model { preset: None, spec, u, end: v.map_or(Endpoint::Free, Endpoint::Fixed) })
}

fn counter(budget: Option<u64>) -> Counter {
    budget.map_or_else(Counter::default, Counter::with_budget)
}

fn csv_writer(out: &mut impl Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Always).from_writer(out as &mut dyn Write)
}

fn json_line(out: &mut impl Write, value: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// `exact / estimate` from their logs; `None` when the estimate does not apply.
fn ratio(exact: &CountValue, log_estimate: Option<f64>) -> Option<f64> {
    let log_estimate = log_estimate?;
    Some(if exact.is_zero() { 0.0 } else { (exact.ln() - log_estimate).exp() })
}

fn direct_value(log10: Option<f64>) -> Option<f64> {
    log10.filter(|&l| l < 300.0).map(|l| 10f64.powf(l))
}

#[derive(Serialize)]
struct CountRecord<'a> {
    #[serde(flatten)]
    model: ModelEcho<'a>,
    n: usize,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<&'a CountValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dp: Option<&'a CountValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reflection: Option<&'a CountValue>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    matches: Option<bool>,
}

pub fn count(a: &CountArgs, out: &mut impl Write) -> Result<(), Failure> {
    let model = resolve(&a.model)?;
    let counter = counter(a.state_budget);
    let lengths = &a.n.0;
    let (spec, u) = (&model.spec, &model.u);
    let dp = (a.method != Method::Reflection)
        .then(|| match &model.end {
            Endpoint::Fixed(v) => counter.confined_series(spec, u, v, lengths),
            Endpoint::Free => counter.confined_free_series(spec, u, lengths),
        })
        .transpose()?;
    let refl = (a.method != Method::Dp)
        .then(|| match &model.end {
            Endpoint::Fixed(v) => counter.reflection_series(spec, u, v, lengths),
            Endpoint::Free => counter.reflection_free_series(spec, u, lengths),
        })
        .transpose()?;
    let method = match a.method {
        Method::Dp => "dp",
        Method::Reflection => "reflection",
        Method::Both => "both",
    };
    let both = a.method == Method::Both;
    let rows: Vec<(usize, Option<&CountValue>, Option<&CountValue>)> = lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, dp.as_ref().map(|s| &s[i]), refl.as_ref().map(|s| &s[i])))
        .collect();
    let mismatch = both && rows.iter().any(|(_, d, r)| d != r);
    match a.format {
        Format::Csv => {
            let mut w = csv_writer(out);
            if both {
                w.write_record(["n", "dp", "reflection", "match"])?;
            } else {
                w.write_record(["n", "method", "count"])?;
            }
            for &(n, d, r) in &rows {
                match (d, r) {
                    (Some(d), Some(r)) => w.write_record([n.to_string(), d.to_string(), r.to_string(), (d == r).to_string()])?,
                    _ => w.write_record([n.to_string(), method.to_string(), d.or(r).expect("one method ran").to_string()])?,
                }
            }
            w.flush()?;
        }
        Format::Json => {
            for &(n, d, r) in &rows {
                let record = CountRecord {
                    model: model.echo(),
                    n,
                    method,
                    count: if both { None } else { d.or(r) },
                    dp: if both { d } else { None },
                    reflection: if both { r } else { None },
                    matches: both.then(|| d == r),
                };
                json_line(out, &record)?;
            }
        }
    }
    if mismatch {
        Err(Failure::Verification)
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct AsymRecord<'a> {
    #[serde(flatten)]
    model: ModelEcho<'a>,
    n: usize,
    endpoint: &'static str,
    log10_value: Option<f64>,
    value: Option<f64>,
    #[serde(flatten)]
    estimate: &'a AsymptoticEstimate,
}

pub fn asym(a: &AsymArgs, out: &mut impl Write) -> Result<(), Failure> {
    let model = resolve(&a.model)?;
    for &n in &a.n.0 {
        let est = match &model.end {
            Endpoint::Fixed(v) => asym_fixed(&model.spec, &model.u, v, n, a.correction == OnOff::On)?,
            Endpoint::Free => asym_free(&model.spec, &model.u, n)?,
        };
        let log10 = est.log10_value();
        json_line(
            out,
            &AsymRecord {
                model: model.echo(),
                n,
                endpoint: model.endpoint_name(),
                log10_value: log10,
                value: direct_value(log10),
                estimate: &est,
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareRecord<'a> {
    #[serde(flatten)]
    model: ModelEcho<'a>,
    endpoint: &'static str,
    #[serde(flatten)]
    report: &'a chamber_core::ConvergenceReport,
}

pub fn compare(a: &CompareArgs, out: &mut impl Write) -> Result<(), Failure> {
    let model = resolve(&a.model)?;
    let report = compare_series_with(&counter(a.state_budget), &model.spec, &model.u, &model.end, &a.grid.0)?;
    match a.format {
        Format::Json => json_line(out, &CompareRecord { model: model.echo(), endpoint: model.endpoint_name(), report: &report })?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["n", "exact", "exact_log", "asym_log", "ratio", "delta"])?;
            for r in &report.rows {
                w.write_record([
                    r.n.to_string(),
                    r.exact.to_string(),
                    r.exact_log.to_string(),
                    r.asym_log.to_string(),
                    r.ratio.to_string(),
                    r.delta.to_string(),
                ])?;
            }
            w.flush()?;
            eprintln!("fitted_slope={} fitted_intercept={}", report.fitted_slope, report.fitted_intercept);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PresetRecord<'a> {
    preset: &'static str,
    k: usize,
    n: usize,
    length: usize,
    u: &'a [i64],
    v: Option<&'a [i64]>,
    count: &'a CountValue,
    /// `preset` for the specialised closed form, `general` when overridden
    /// endpoints put the instance outside it.
    formula: &'static str,
    supported: bool,
    log10_estimate: Option<f64>,
    estimate: Option<f64>,
    ratio: Option<f64>,
    delta: Option<f64>,
}

pub fn preset(a: &PresetArgs, out: &mut impl Write) -> Result<(), Failure> {
    let ov = EndpointOverride { u: point(&a.u)?, v: point(&a.v)? };
    let inst = preset_spec(a.name, a.k, &ov)?;
    let counter = counter(a.state_budget);
    let general = a.name.fixes_endpoints() && !ov.is_empty();
    let correction = a.correction == OnOff::On;
    for &n in &a.n.0 {
        let length = inst.length(n);
        let count = match &inst.v {
            Some(v) => counter.count_confined(&inst.spec, &inst.u, v, length)?,
            None => counter.count_confined_free(&inst.spec, &inst.u, length)?,
        };
        let est = if n == 0 {
            None
        } else if general {
            Some(match &inst.v {
                Some(v) => asym_fixed(&inst.spec, &inst.u, v, length, correction)?,
                None => asym_free(&inst.spec, &inst.u, length)?,
            })
        } else {
            Some(preset_asym(a.name, a.k, n, &ov, correction)?)
        };
        let log10 = est.as_ref().and_then(AsymptoticEstimate::log10_value);
        let r = ratio(&count, est.as_ref().and_then(|e| e.log_value));
        json_line(
            out,
            &PresetRecord {
                preset: a.name.name(),
                k: a.k,
                n,
                length,
                u: inst.u.coords(),
                v: inst.v.as_ref().map(ChamberPoint::coords),
                count: &count,
                formula: if general { "general" } else { "preset" },
                supported: est.as_ref().is_some_and(|e| e.supported),
                log10_estimate: log10,
                estimate: direct_value(log10),
                ratio: r,
                delta: r.map(|x| x - 1.0),
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyRecord {
    seed: u64,
    pass: bool,
    suites: Vec<SuiteReport>,
}

pub fn verify(a: &VerifyArgs, out: &mut impl Write) -> Result<(), Failure> {
    let suites = a.suite.clone().unwrap_or_else(|| Suite::ALL.to_vec());
    let mut reports = Vec::with_capacity(suites.len());
    for s in suites {
        let mut r = run_suite(s, a.seed)?;
        if !a.full {
            r.reports.retain(|c| !c.pass);
        }
        reports.push(r);
    }
    let pass = reports.iter().all(|r| r.pass);
    serde_json::to_writer_pretty(&mut *out, &VerifyRecord { seed: a.seed, pass, suites: reports })?;
    writeln!(out)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
