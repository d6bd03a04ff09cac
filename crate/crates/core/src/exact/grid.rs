//! Packed-key sparse frontiers and the composite one-step operator.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{ChamberError, Result};
use crate::stepmodel::{in_chamber, CompositeSpec};

pub(crate) type Frontier = FxHashMap<u128, BigUint>;

/// Frontiers larger than this are advanced in parallel chunks.
const PAR_THRESHOLD: usize = 4096;

/// Mixed-radix packing of the points of an axis-parallel box into `u128` keys.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    lo: Vec<i64>,
    hi: Vec<i64>,
    stride: Vec<u128>,
}

impl Grid {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let mut stride = Vec::with_capacity(lo.len());
        let mut acc: u128 = 1;
        for (l, h) in lo.iter().zip(&hi) {
            stride.push(acc);
            let radix = (h - l + 1) as u128;
            acc = acc.checked_mul(radix).ok_or(ChamberError::Resource { required: u128::MAX, budget: u64::MAX })?;
        }
        Ok(Grid { lo, hi, stride })
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn encode(&self, p: &[i64]) -> u128 {
        p.iter().zip(&self.lo).zip(&self.stride).map(|((x, l), s)| (x - l) as u128 * s).sum()
    }

    pub fn decode(&self, mut key: u128, out: &mut [i64]) {
        for j in (0..out.len()).rev() {
            out[j] = self.lo[j] + (key / self.stride[j]) as i64;
            key %= self.stride[j];
        }
    }

    pub fn offset(&self, disp: &[i64]) -> i128 {
        disp.iter().zip(&self.stride).map(|(d, s)| *d as i128 * *s as i128).sum()
    }
}

/// Composite weights scaled to integers: `w_m = a_m / denom`.
#[derive(Clone, Debug)]
pub(crate) struct ScaledWeights {
    pub a: Vec<BigUint>,
    pub denom: BigUint,
}

impl ScaledWeights {
    pub fn new(spec: &CompositeSpec) -> Self {
        let denom = spec
            .weights()
            .iter()
            .fold(BigUint::one(), |l, w| l.lcm(w.denom().magnitude()));
        let a = spec
            .weights()
            .iter()
            .map(|w| w.numer().magnitude() * (&denom / w.denom().magnitude()))
            .collect();
        ScaledWeights { a, denom }
    }

    /// `raw / denom^n` as an exact rational.
    pub fn unscale(&self, raw: BigUint, n: usize) -> BigRational {
        let raw = crate::rational::biguint_to_rational(raw);
        if self.denom.is_one() {
            raw
        } else {
            raw / crate::rational::biguint_to_rational(num_traits::pow(self.denom.clone(), n))
        }
    }
}

/// The composite one-step operator `T = sum_m a_m M^m` on a packed grid.
pub(crate) struct Stepper {
    k: usize,
    atoms: Vec<Vec<i64>>,
    offsets: Vec<i128>,
    weights: ScaledWeights,
    grid: Grid,
    confine: bool,
}

impl Stepper {
    pub fn new(spec: &CompositeSpec, grid: Grid, confine: bool) -> Self {
        let atoms = spec.kind().atomic_steps(spec.k());
        let offsets = atoms.iter().map(|a| grid.offset(a)).collect();
        Stepper { k: spec.k(), atoms, offsets, weights: ScaledWeights::new(spec), grid, confine }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn weights(&self) -> &ScaledWeights {
        &self.weights
    }

    pub fn unit(&self, p: &[i64]) -> Frontier {
        let mut f = Frontier::default();
        f.insert(self.grid.encode(p), BigUint::one());
        f
    }

    /// One composite step (every intermediate atomic position is checked when confining).
    pub fn step(&self, f: &Frontier) -> Frontier {
        let a = &self.weights.a;
        let mut acc = if a[0].is_zero() { Frontier::default() } else { scaled(f, &a[0]) };
        let mut g: Option<Frontier> = None;
        for am in &a[1..] {
            let next = self.atomic(g.as_ref().unwrap_or(f));
            if !am.is_zero() {
                add_scaled(&mut acc, &next, am);
            }
            g = Some(next);
        }
        acc
    }

    fn atomic(&self, f: &Frontier) -> Frontier {
        if f.len() < PAR_THRESHOLD {
            let mut out = Frontier::default();
            self.push_atomic(f.iter(), &mut out);
            return out;
        }
        let entries: Vec<(&u128, &BigUint)> = f.iter().collect();
        let chunk = entries.len().div_ceil(rayon::current_num_threads().max(1) * 4);
        let parts: Vec<Frontier> = entries
            .par_chunks(chunk)
            .map(|c| {
                let mut out = Frontier::default();
                self.push_atomic(c.iter().copied(), &mut out);
                out
            })
            .collect();
        let mut parts = parts.into_iter();
        let mut out = parts.next().unwrap_or_default();
        for p in parts {
            for (key, val) in p {
                match out.get_mut(&key) {
                    Some(v) => *v += val,
                    None => {
                        out.insert(key, val);
                    }
                }
            }
        }
        out
    }

    fn push_atomic<'a>(&self, entries: impl Iterator<Item = (&'a u128, &'a BigUint)>, out: &mut Frontier) {
        let mut here = vec![0i64; self.k];
        let mut there = vec![0i64; self.k];
        for (&key, val) in entries {
            self.grid.decode(key, &mut here);
            for (atom, off) in self.atoms.iter().zip(&self.offsets) {
                if self.confine {
                    for j in 0..self.k {
                        there[j] = here[j] + atom[j];
                    }
                    if !in_chamber(&there) {
                        continue;
                    }
                }
                let target = (key as i128 + off) as u128;
                match out.get_mut(&target) {
                    Some(v) => *v += val,
                    None => {
                        out.insert(target, val.clone());
                    }
                }
            }
        }
    }
}

fn scaled(f: &Frontier, c: &BigUint) -> Frontier {
    if c.is_one() {
        return f.clone();
    }
    f.iter().map(|(k, v)| (*k, v * c)).collect()
}

fn add_scaled(acc: &mut Frontier, f: &Frontier, c: &BigUint) {
    for (key, val) in f {
        let term = if c.is_one() { val.clone() } else { val * c };
        match acc.get_mut(key) {
            Some(v) => *v += term,
            None => {
                acc.insert(*key, term);
            }
        }
    }
}
