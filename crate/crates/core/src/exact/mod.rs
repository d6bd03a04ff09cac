//! Exact walk counts: the chamber-confined dynamic program, unconstrained
//! coefficient extraction, and the reflection-principle signed sums.
//!
//! All counting runs on integers. Rational weights are scaled by the lcm `L`
//! of their denominators and the result divided by `L^n` at the end.

mod grid;
mod reflection;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ChamberError, Result};
use crate::rational;
use crate::stepmodel::{binomial, AtomicKind, ChamberPoint, CompositeSpec, LatticePoint};
use grid::{Frontier, Grid, ScaledWeights, Stepper};

pub use reflection::{permutation_sign, signed_permutations, SignedPermutation};

/// Default cap on the number of DP states.
pub const DEFAULT_STATE_BUDGET: u64 = 10_000_000;

/// An exact nonnegative walk count (an integer whenever all weights are integers).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountValue(BigRational);

impl CountValue {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(ChamberError::Domain(format!("negative count {value}")));
        }
        Ok(CountValue(value))
    }

    pub fn zero() -> Self {
        CountValue(BigRational::zero())
    }

    pub fn from_integer(n: BigUint) -> Self {
        CountValue(rational::biguint_to_rational(n))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Natural log; `-inf` for zero. Works for values of any size.
    pub fn ln(&self) -> f64 {
        rational::ln_abs_rational(&self.0)
    }

    pub fn to_f64(&self) -> f64 {
        rational::rational_to_f64(&self.0)
    }
}

impl fmt::Display for CountValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format_rational(&self.0))
    }
}

impl FromStr for CountValue {
    type Err = ChamberError;

    fn from_str(s: &str) -> Result<Self> {
        CountValue::new(rational::parse_rational(s)?)
    }
}

impl From<u64> for CountValue {
    fn from(n: u64) -> Self {
        CountValue::from_integer(BigUint::from(n))
    }
}

impl Serialize for CountValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CountValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A sparse distribution of walk weight over lattice points after `n` steps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FrontierDistribution {
    pub entries: BTreeMap<Vec<i64>, CountValue>,
}

impl FrontierDistribution {
    pub fn get(&self, p: &[i64]) -> CountValue {
        self.entries.get(p).cloned().unwrap_or_else(CountValue::zero)
    }

    pub fn total(&self) -> CountValue {
        CountValue(self.entries.values().fold(BigRational::zero(), |acc, v| acc + &v.0))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Counting engine with a configurable state budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counter {
    state_budget: u64,
}

impl Default for Counter {
    fn default() -> Self {
        Counter { state_budget: DEFAULT_STATE_BUDGET }
    }
}

fn guard(required: u128, budget: u64) -> Result<()> {
    if required > budget as u128 {
        Err(ChamberError::Resource { required, budget })
    } else {
        Ok(())
    }
}

fn reach(spec: &CompositeSpec, n: usize) -> i64 {
    (n * spec.degree()) as i64
}

fn binomial_u128(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

impl Counter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(state_budget: u64) -> Self {
        Counter { state_budget }
    }

    pub fn state_budget(&self) -> u64 {
        self.state_budget
    }

    /// Upper estimate of the confined state count: strictly increasing
    /// `k`-tuples in `1..=u_k + n d`.
    pub fn confined_states(spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> u128 {
        let top = *u.coords().last().expect("nonempty") + reach(spec, n);
        binomial_u128(top as u128, spec.k() as u128)
    }

    /// Size of the unconstrained reachability box `(2 n d + 1)^k`.
    pub fn box_states(spec: &CompositeSpec, n: usize) -> u128 {
        let side = 2 * reach(spec, n) as u128 + 1;
        (0..spec.k()).try_fold(1u128, |acc, _| acc.checked_mul(side)).unwrap_or(u128::MAX)
    }

    fn confined_stepper(&self, spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<Stepper> {
        spec.check_endpoint(u)?;
        guard(Self::confined_states(spec, u, n), self.state_budget)?;
        let top = *u.coords().last().expect("nonempty") + reach(spec, n);
        let grid = Grid::new(vec![1; spec.k()], vec![top; spec.k()])?;
        Ok(Stepper::new(spec, grid, true))
    }

    fn free_stepper(&self, spec: &CompositeSpec, center: &[i64], n: usize) -> Result<Stepper> {
        guard(Self::box_states(spec, n), self.state_budget)?;
        let r = reach(spec, n);
        let grid = Grid::new(center.iter().map(|c| c - r).collect(), center.iter().map(|c| c + r).collect())?;
        Ok(Stepper::new(spec, grid, false))
    }

    /// Runs `stepper` from `start` and calls `visit(step, frontier)` after every step in `0..=n`.
    fn run(stepper: &Stepper, start: &[i64], n: usize, mut visit: impl FnMut(usize, &Frontier)) {
        let mut f = stepper.unit(start);
        visit(0, &f);
        for i in 1..=n {
            f = stepper.step(&f);
            visit(i, &f);
        }
    }

    fn to_distribution(stepper: &Stepper, f: &Frontier, n: usize) -> FrontierDistribution {
        let mut p = vec![0i64; stepper.dim()];
        let entries = f
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(key, v)| {
                stepper.grid().decode(*key, &mut p);
                (p.clone(), CountValue(stepper.weights().unscale(v.clone(), n)))
            })
            .collect();
        FrontierDistribution { entries }
    }

    /// `[z^{v-u}] S(z)^n`.
    pub fn count_unconstrained(&self, spec: &CompositeSpec, u: &LatticePoint, v: &LatticePoint, n: usize) -> Result<CountValue> {
        spec.check_lattice(u.coords())?;
        spec.check_lattice(v.coords())?;
        let delta: Vec<i64> = u.coords().iter().zip(v.coords()).map(|(a, b)| b - a).collect();
        if let Some(c) = single_diagonal_weight(spec) {
            return Ok(lock_step_unconstrained(c, &delta, n));
        }
        let r = reach(spec, n);
        if delta.iter().any(|d| d.abs() > r) {
            return Ok(CountValue::zero());
        }
        let dist = self.unconstrained_distribution(spec, &LatticePoint::new(vec![0; spec.k()]), n)?;
        Ok(dist.get(&delta))
    }

    /// Full distribution of `S(z)^n` shifted to start at `u`.
    pub fn unconstrained_distribution(&self, spec: &CompositeSpec, u: &LatticePoint, n: usize) -> Result<FrontierDistribution> {
        spec.check_lattice(u.coords())?;
        let stepper = self.free_stepper(spec, u.coords(), n)?;
        let mut last = Frontier::default();
        Self::run(&stepper, u.coords(), n, |i, f| {
            if i == n {
                last = f.clone();
            }
        });
        Ok(Self::to_distribution(&stepper, &last, n))
    }

    /// Reflection-principle count from a single unconstrained distribution
    /// started at `v` (the step set is symmetric, so `P_n(x→v) = P_n(v→x)`).
    pub fn count_reflection(&self, spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> Result<CountValue> {
        Ok(self.reflection_series(spec, u, v, &[n])?.pop().expect("one length"))
    }

    /// [`Counter::count_reflection`] at every length in `lengths`, from one pass.
    pub fn reflection_series(&self, spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, lengths: &[usize]) -> Result<Vec<CountValue>> {
        self.check_pair(spec, u, v)?;
        self.check_group_size(spec.k())?;
        let n_max = lengths.iter().copied().max().unwrap_or(0);
        let stepper = self.free_stepper(spec, v.coords(), n_max)?;
        let images: Vec<(Vec<i64>, i8)> = signed_permutations(spec.k())
            .map(|rho| (rho.apply(u.coords()), rho.sign()))
            .filter(|(image, _)| stepper.grid().contains(image))
            .collect();
        self.collect_signed_series(&stepper, v.coords(), lengths, |f| {
            let mut raw = BigInt::zero();
            for (image, sign) in &images {
                if let Some(c) = f.get(&stepper.grid().encode(image)) {
                    accumulate(&mut raw, c, *sign);
                }
            }
            raw
        })
    }

    /// Reflection-principle count with one unconstrained count per signed image of `u`.
    pub fn count_reflection_naive(&self, spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> Result<CountValue> {
        self.check_pair(spec, u, v)?;
        self.check_group_size(spec.k())?;
        let images: Vec<SignedPermutation> = signed_permutations(spec.k()).collect();
        let terms: Vec<Result<BigRational>> = images
            .par_iter()
            .map(|rho| {
                let image = LatticePoint::new(rho.apply(u.coords()));
                let c = self.count_unconstrained(spec, &image, &LatticePoint::from(v), n)?.into_inner();
                Ok(if rho.sign() > 0 { c } else { -c })
            })
            .collect();
        let mut total = BigRational::zero();
        for t in terms {
            total += t?;
        }
        CountValue::new(total)
    }

    /// Walks from `u` to `v` in `n` composite steps whose atomic positions all stay
    /// strictly inside the chamber.
    pub fn count_confined(&self, spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> Result<CountValue> {
        Ok(self.confined_series(spec, u, v, &[n])?.pop().expect("one length"))
    }

    /// Total confined weight after `n` steps, any endpoint.
    pub fn count_confined_free(&self, spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<CountValue> {
        Ok(self.confined_free_series(spec, u, &[n])?.pop().expect("one length"))
    }

    /// Free-endpoint count by reflection: the unconstrained distribution from `u`,
    /// each point weighted by the sign of the group element folding it into the chamber.
    pub fn count_reflection_free(&self, spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<CountValue> {
        Ok(self.reflection_free_series(spec, u, &[n])?.pop().expect("one length"))
    }

    /// [`Counter::count_reflection_free`] at every length in `lengths`, from one pass.
    pub fn reflection_free_series(&self, spec: &CompositeSpec, u: &ChamberPoint, lengths: &[usize]) -> Result<Vec<CountValue>> {
        spec.check_endpoint(u)?;
        let n_max = lengths.iter().copied().max().unwrap_or(0);
        let stepper = self.free_stepper(spec, u.coords(), n_max)?;
        self.collect_signed_series(&stepper, u.coords(), lengths, |f| {
            let mut raw = BigInt::zero();
            let mut p = vec![0i64; spec.k()];
            for (key, val) in f {
                stepper.grid().decode(*key, &mut p);
                if let Some(sign) = reflection::chamber_sign(&p) {
                    accumulate(&mut raw, val, sign);
                }
            }
            raw
        })
    }

    fn collect_signed_series(
        &self,
        stepper: &Stepper,
        start: &[i64],
        lengths: &[usize],
        read: impl Fn(&Frontier) -> BigInt,
    ) -> Result<Vec<CountValue>> {
        let n_max = lengths.iter().copied().max().unwrap_or(0);
        let mut at: BTreeMap<usize, BigInt> = lengths.iter().map(|&n| (n, BigInt::zero())).collect();
        Self::run(stepper, start, n_max, |i, f| {
            if let Some(slot) = at.get_mut(&i) {
                *slot = read(f);
            }
        });
        lengths.iter().map(|n| finish_signed(at[n].clone(), stepper.weights(), *n)).collect()
    }

    /// Confined distribution after `n` steps.
    pub fn confined_frontier(&self, spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<FrontierDistribution> {
        let stepper = self.confined_stepper(spec, u, n)?;
        let mut last = Frontier::default();
        Self::run(&stepper, u.coords(), n, |i, f| {
            if i == n {
                last = f.clone();
            }
        });
        Ok(Self::to_distribution(&stepper, &last, n))
    }

    /// Confined counts `u → v` at every length in `lengths`, from a single DP pass.
    pub fn confined_series(&self, spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, lengths: &[usize]) -> Result<Vec<CountValue>> {
        self.check_pair(spec, u, v)?;
        let n_max = lengths.iter().copied().max().unwrap_or(0);
        let stepper = self.confined_stepper(spec, u, n_max)?;
        let target = stepper.grid().contains(v.coords()).then(|| stepper.grid().encode(v.coords()));
        self.collect_series(&stepper, u, lengths, |f| match target {
            Some(t) => f.get(&t).cloned().unwrap_or_default(),
            None => BigUint::zero(),
        })
    }

    /// Free-endpoint confined totals at every length in `lengths`.
    pub fn confined_free_series(&self, spec: &CompositeSpec, u: &ChamberPoint, lengths: &[usize]) -> Result<Vec<CountValue>> {
        spec.check_endpoint(u)?;
        let n_max = lengths.iter().copied().max().unwrap_or(0);
        let stepper = self.confined_stepper(spec, u, n_max)?;
        self.collect_series(&stepper, u, lengths, |f| f.values().fold(BigUint::zero(), |a, v| a + v))
    }

    fn collect_series(
        &self,
        stepper: &Stepper,
        u: &ChamberPoint,
        lengths: &[usize],
        read: impl Fn(&Frontier) -> BigUint,
    ) -> Result<Vec<CountValue>> {
        let n_max = lengths.iter().copied().max().unwrap_or(0);
        let mut at: BTreeMap<usize, BigUint> = lengths.iter().map(|&n| (n, BigUint::zero())).collect();
        Self::run(stepper, u.coords(), n_max, |i, f| {
            if let Some(slot) = at.get_mut(&i) {
                *slot = read(f);
            }
        });
        Ok(lengths.iter().map(|n| CountValue(stepper.weights().unscale(at[n].clone(), *n))).collect())
    }

    fn check_pair(&self, spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint) -> Result<()> {
        spec.check_endpoint(u)?;
        spec.check_endpoint(v)
    }

    fn check_group_size(&self, k: usize) -> Result<()> {
        let order = (1..=k as u128).product::<u128>() << k;
        guard(order, self.state_budget)
    }
}

fn accumulate(raw: &mut BigInt, c: &BigUint, sign: i8) {
    let c = BigInt::from(c.clone());
    if sign > 0 {
        *raw += c;
    } else {
        *raw -= c;
    }
}

fn finish_signed(raw: BigInt, weights: &ScaledWeights, n: usize) -> Result<CountValue> {
    let raw = raw
        .to_biguint()
        .ok_or_else(|| ChamberError::Diagnostic("reflection sum came out negative".into()))?;
    Ok(CountValue(weights.unscale(raw, n)))
}

/// `Some(c)` when the model is diagonal with `P(x) = c x`.
fn single_diagonal_weight(spec: &CompositeSpec) -> Option<&BigRational> {
    (spec.kind() == AtomicKind::Diagonal && spec.degree() == 1 && spec.weights()[0].is_zero()).then(|| &spec.weights()[1])
}

fn lock_step_unconstrained(c: &BigRational, delta: &[i64], n: usize) -> CountValue {
    let n_i = n as i64;
    let mut acc = rational::pow_i(c, n_i);
    for &d in delta {
        if d.abs() > n_i || (n_i + d) % 2 != 0 {
            return CountValue::zero();
        }
        acc *= BigRational::from_integer(binomial(n as u64, ((n_i + d) / 2) as u64));
    }
    CountValue(acc)
}

/// [`Counter::count_unconstrained`] with the default budget.
pub fn count_unconstrained(spec: &CompositeSpec, u: &LatticePoint, v: &LatticePoint, n: usize) -> Result<CountValue> {
    Counter::default().count_unconstrained(spec, u, v, n)
}

/// [`Counter::count_reflection`] with the default budget.
pub fn count_reflection(spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> Result<CountValue> {
    Counter::default().count_reflection(spec, u, v, n)
}

/// [`Counter::count_reflection_naive`] with the default budget.
pub fn count_reflection_naive(spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> Result<CountValue> {
    Counter::default().count_reflection_naive(spec, u, v, n)
}

/// [`Counter::count_confined`] with the default budget.
pub fn count_confined(spec: &CompositeSpec, u: &ChamberPoint, v: &ChamberPoint, n: usize) -> Result<CountValue> {
    Counter::default().count_confined(spec, u, v, n)
}

/// [`Counter::count_confined_free`] with the default budget.
pub fn count_confined_free(spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<CountValue> {
    Counter::default().count_confined_free(spec, u, n)
}

/// [`Counter::count_reflection_free`] with the default budget.
pub fn count_reflection_free(spec: &CompositeSpec, u: &ChamberPoint, n: usize) -> Result<CountValue> {
    Counter::default().count_reflection_free(spec, u, n)
}
