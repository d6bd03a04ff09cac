//! The walk model: atomic step kinds, composite step weights, lattice and
//! chamber membership, and the generating-function constants that drive the
//! asymptotics.
//!
//! A composite step set is described entirely by its weight polynomial
//! `P(x) = sum_m w_m x^m`, where `w_m` is the weight of every composite step
//! made of `m` atomic steps. The step generating function is then
//! `S(z) = P(A(z))` with
//!
//! * axis steps: `A(z) = sum_j (z_j + 1/z_j)`,
//! * diagonal steps: `A(z) = prod_j (z_j + 1/z_j)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, ChamberError, Result};
use crate::rational::{self, int};

/// Largest dimension accepted by [`CompositeSpec::new`].
pub const MAX_DIMENSION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomicKind {
    /// `{±e_1, …, ±e_k}`
    Axis,
    /// `{(±1, …, ±1)}`
    Diagonal,
}

impl AtomicKind {
    /// All atomic displacement vectors in dimension `k`.
    pub fn atomic_steps(self, k: usize) -> Vec<Vec<i64>> {
        match self {
            AtomicKind::Axis => (0..k)
                .flat_map(|j| {
                    [1i64, -1].into_iter().map(move |s| {
                        let mut a = vec![0; k];
                        a[j] = s;
                        a
                    })
                })
                .collect(),
            AtomicKind::Diagonal => (0u64..1 << k)
                .map(|mask| (0..k).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect())
                .collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AtomicKind::Axis => "axis",
            AtomicKind::Diagonal => "diagonal",
        }
    }
}

impl std::str::FromStr for AtomicKind {
    type Err = ChamberError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "axis" => Ok(AtomicKind::Axis),
            "diagonal" => Ok(AtomicKind::Diagonal),
            other => Err(ChamberError::Parse(format!("unknown atomic kind {other:?}"))),
        }
    }
}

impl fmt::Display for AtomicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A walk model: atomic kind, dimension and composite weights `w_0..=w_d`.
///
/// Trailing zero weights are dropped on construction, so `degree()` is the
/// index of the last positive weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct CompositeSpec {
    kind: AtomicKind,
    k: usize,
    weights: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    kind: AtomicKind,
    k: usize,
    #[serde(with = "rational::serde_rational_vec")]
    weights: Vec<BigRational>,
}

impl TryFrom<SpecRepr> for CompositeSpec {
    type Error = ChamberError;

    fn try_from(r: SpecRepr) -> Result<Self> {
        CompositeSpec::new(r.kind, r.k, r.weights)
    }
}

impl From<CompositeSpec> for SpecRepr {
    fn from(s: CompositeSpec) -> Self {
        SpecRepr { kind: s.kind, k: s.k, weights: s.weights }
    }
}

impl CompositeSpec {
    pub fn new(kind: AtomicKind, k: usize, mut weights: Vec<BigRational>) -> Result<Self> {
        if k == 0 || k > MAX_DIMENSION {
            return Err(ChamberError::InvalidSpec(format!("dimension must be in 1..={MAX_DIMENSION}, got {k}")));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(ChamberError::InvalidSpec("weights must be nonnegative".into()));
        }
        while weights.last().is_some_and(|w| w.is_zero()) {
            weights.pop();
        }
        if weights.len() < 2 {
            return Err(ChamberError::InvalidSpec(
                "some composite step with at least one atomic step must have positive weight".into(),
            ));
        }
        Ok(CompositeSpec { kind, k, weights })
    }

    /// Convenience constructor from integer weights.
    pub fn with_integer_weights(kind: AtomicKind, k: usize, weights: &[i64]) -> Result<Self> {
        Self::new(kind, k, weights.iter().map(|&w| int(w)).collect())
    }

    pub fn kind(&self) -> AtomicKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Degree `d` of the weight polynomial (number of atomic steps in the longest composite step).
    pub fn degree(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn has_integer_weights(&self) -> bool {
        self.weights.iter().all(|w| w.is_integer())
    }

    /// `Some(0)` if every positive weight sits at an even `m`, `Some(1)` if
    /// every one sits at an odd `m`, `None` for mixed parity.
    pub fn weight_parity(&self) -> Option<u8> {
        let mut seen = [false; 2];
        for (m, w) in self.weights.iter().enumerate() {
            if !w.is_zero() {
                seen[m % 2] = true;
            }
        }
        match seen {
            [true, false] => Some(0),
            [false, true] => Some(1),
            _ => None,
        }
    }

    /// `P(x)`.
    pub fn weight_poly(&self, x: &BigRational) -> BigRational {
        horner(&self.weights, x)
    }

    /// Taylor coefficients of `P` around `x0`: `c_r = P^(r)(x0) / r!`.
    pub fn weight_poly_taylor(&self, x0: &BigRational) -> Vec<BigRational> {
        let d = self.degree();
        (0..=d)
            .map(|r| {
                let mut acc = BigRational::zero();
                for m in (r..=d).rev() {
                    let binom = BigRational::from_integer(binomial(m as u64, r as u64));
                    acc = acc * x0 + &self.weights[m] * binom;
                }
                acc
            })
            .collect()
    }

    /// `A(z)` at a point with nonzero coordinates.
    pub fn atomic_gf(&self, z: &[BigRational]) -> Result<BigRational> {
        check_dim(self.k, z.len())?;
        if z.iter().any(Zero::is_zero) {
            return Err(ChamberError::Domain("generating function needs nonzero coordinates".into()));
        }
        let terms = z.iter().map(|zj| zj + zj.recip());
        Ok(match self.kind {
            AtomicKind::Axis => terms.fold(BigRational::zero(), |a, t| a + t),
            AtomicKind::Diagonal => terms.fold(BigRational::one(), |a, t| a * t),
        })
    }

    /// `A` at the sign vector `eps` (i.e. at `z = eps`).
    fn atomic_gf_at_signs(&self, eps: &[i8]) -> BigRational {
        match self.kind {
            AtomicKind::Axis => int(2 * eps.iter().map(|&e| e as i64).sum::<i64>()),
            AtomicKind::Diagonal => {
                let sign: i64 = eps.iter().map(|&e| e as i64).product();
                int(sign << self.k)
            }
        }
    }

    /// `A(1, …, 1)`: `2k` for axis steps, `2^k` for diagonal steps.
    pub fn atomic_at_one(&self) -> BigRational {
        match self.kind {
            AtomicKind::Axis => int(2 * self.k as i64),
            AtomicKind::Diagonal => int(1i64 << self.k),
        }
    }

    /// Checks dimension and lattice membership of a displacement or point.
    pub fn check_lattice(&self, p: &[i64]) -> Result<()> {
        check_dim(self.k, p.len())?;
        if !lattice_contains_coords(self.kind, p) {
            return Err(ChamberError::Domain(format!("{p:?} is not in the {} lattice", self.kind)));
        }
        Ok(())
    }

    /// Checks that `p` is a valid endpoint for this model (dimension and lattice).
    pub fn check_endpoint(&self, p: &ChamberPoint) -> Result<()> {
        self.check_lattice(p.coords())
    }
}

impl fmt::Display for CompositeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(rational::format_rational).collect();
        write!(f, "{} k={} P=[{}]", self.kind, self.k, w.join(","))
    }
}

fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub(crate) fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn lattice_contains_coords(kind: AtomicKind, p: &[i64]) -> bool {
    match kind {
        AtomicKind::Axis => true,
        AtomicKind::Diagonal => p.windows(2).all(|w| (w[0] - w[1]).rem_euclid(2) == 0),
    }
}

/// A point of the lattice spanned by the atomic steps (or a displacement in it).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl From<&ChamberPoint> for LatticePoint {
    fn from(p: &ChamberPoint) -> Self {
        LatticePoint(p.0.clone())
    }
}

/// A point strictly inside the chamber `0 < x_1 < … < x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ChamberPoint(Vec<i64>);

impl ChamberPoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(ChamberError::Domain("chamber point needs at least one coordinate".into()));
        }
        if !in_chamber(&coords) {
            return Err(ChamberError::Domain(format!("{coords:?} is not strictly inside 0 < x_1 < … < x_k")));
        }
        Ok(ChamberPoint(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }
}

impl<'de> Deserialize<'de> for ChamberPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<i64>::deserialize(d)?;
        ChamberPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ChamberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `0 < x_1 < … < x_k`, strictly.
pub fn in_chamber(p: &[i64]) -> bool {
    p.first().is_some_and(|&x| x > 0) && p.windows(2).all(|w| w[0] < w[1])
}

/// Whether `p` lies in the lattice spanned by the atomic steps of `spec`.
pub fn lattice_contains(spec: &CompositeSpec, p: &LatticePoint) -> Result<bool> {
    check_dim(spec.k, p.0.len())?;
    Ok(lattice_contains_coords(spec.kind, &p.0))
}

/// `S(z) = P(A(z))`, exactly.
pub fn composite_gf_value(spec: &CompositeSpec, z: &[BigRational]) -> Result<BigRational> {
    Ok(spec.weight_poly(&spec.atomic_gf(z)?))
}

/// `S(1, …, 1)`.
pub fn s_one(spec: &CompositeSpec) -> BigRational {
    spec.weight_poly(&spec.atomic_at_one())
}

/// `S` evaluated at a sign vector.
pub fn composite_gf_at_signs(spec: &CompositeSpec, eps: &[i8]) -> Result<BigRational> {
    check_dim(spec.k, eps.len())?;
    if eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(ChamberError::Domain("sign vector entries must be ±1".into()));
    }
    Ok(spec.weight_poly(&spec.atomic_gf_at_signs(eps)))
}

/// Second-order constants of `log|S(e^{iφ})|` near `φ = 0`, as given by the
/// closed forms in terms of `P`.
///
/// `lambda` is always exact and checked against an independent expansion of
/// `S`. `omega` and `psi` follow the printed closed forms; `omega_psi_validated`
/// records whether they agree with a finite-difference fit of the actual
/// function (see [`numeric_expansion`]).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianExpansion {
    #[serde(with = "rational::serde_rational")]
    pub lambda: BigRational,
    #[serde(with = "rational::serde_rational")]
    pub omega: BigRational,
    #[serde(with = "rational::serde_rational")]
    pub psi: BigRational,
    pub omega_psi_validated: bool,
}

pub fn gaussian_expansion(spec: &CompositeSpec) -> Result<GaussianExpansion> {
    let x0 = spec.atomic_at_one();
    let taylor = spec.weight_poly_taylor(&x0);
    let p0 = &taylor[0];
    let p1 = &taylor[1];
    // P''(x) = 2 * c_2
    let p2 = taylor.get(2).map(|c| c * int(2)).unwrap_or_else(BigRational::zero);
    if p0.is_zero() || p1.is_zero() {
        return Err(ChamberError::Domain("walk model has no moving composite step".into()));
    }
    let (lambda, omega, psi) = match spec.kind {
        AtomicKind::Axis => {
            let lambda = int(2) * p1 / p0;
            let omega = int(4) * &p2 / (p0 * p0) - &lambda * &lambda;
            (lambda.clone(), omega, lambda)
        }
        AtomicKind::Diagonal => {
            let lambda = &x0 * p1 / p0;
            // Printed with argument 2k rather than 2^k; kept as printed.
            let two_k = int(2 * spec.k as i64);
            let p_2k = spec.weight_poly(&two_k);
            let pp_2k = spec.weight_poly_taylor(&two_k).get(2).map(|c| c * int(2)).unwrap_or_else(BigRational::zero);
            let omega = rational::pow_i(&int(4), spec.k as i64) * pp_2k / (&p_2k * &p_2k) - &lambda * &lambda + &lambda;
            let psi = int(-2) * &lambda;
            (lambda, omega, psi)
        }
    };

    let curvature = second_derivative_at_one(spec) / s_one(spec);
    assert_eq!(lambda, curvature, "closed-form Λ disagrees with S''(1)/S(1) for {spec}");

    let numeric = numeric_expansion(spec);
    let omega_f = omega.to_f64().unwrap_or(f64::NAN);
    let psi_f = psi.to_f64().unwrap_or(f64::NAN);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-4 * a.abs().max(b.abs()).max(1.0);
    let omega_psi_validated = match (numeric.omega, numeric.psi) {
        (Some(o), Some(p)) => close(omega_f, o) && close(psi_f, p),
        _ => close(omega_f / 2.0 + psi_f / 24.0, numeric.quartic_axis),
    };

    Ok(GaussianExpansion { lambda, omega, psi, omega_psi_validated })
}

/// `∂²S/∂z_1²` at `(1, …, 1)`, computed from the Laurent expansion of `S`
/// restricted to the first variable (independent of the chain-rule closed form).
pub fn second_derivative_at_one(spec: &CompositeSpec) -> BigRational {
    // A restricted to z = (t, 1, …, 1) as a Laurent polynomial in t.
    let mut atom: BTreeMap<i64, BigRational> = BTreeMap::new();
    match spec.kind {
        AtomicKind::Axis => {
            atom.insert(1, int(1));
            atom.insert(-1, int(1));
            if spec.k > 1 {
                atom.insert(0, int(2 * (spec.k as i64 - 1)));
            }
        }
        AtomicKind::Diagonal => {
            let c = int(1i64 << (spec.k - 1));
            atom.insert(1, c.clone());
            atom.insert(-1, c);
        }
    }
    let mut power: BTreeMap<i64, BigRational> = BTreeMap::from([(0, int(1))]);
    let mut total: BTreeMap<i64, BigRational> = BTreeMap::new();
    for (m, w) in spec.weights.iter().enumerate() {
        if m > 0 {
            let mut next = BTreeMap::new();
            for (e1, c1) in &power {
                for (e2, c2) in &atom {
                    *next.entry(e1 + e2).or_insert_with(BigRational::zero) += c1 * c2;
                }
            }
            power = next;
        }
        if !w.is_zero() {
            for (e, c) in &power {
                *total.entry(*e).or_insert_with(BigRational::zero) += c * w;
            }
        }
    }
    total.iter().fold(BigRational::zero(), |acc, (e, c)| acc + c * int(e * (e - 1)))
}

/// Finite-difference fit of the expansion
/// `log|S(e^{iφ})| = log S(1) − Λ Σφ²/2 + Ω/2 (Σφ²)² + Ψ Σφ⁴/24 + …`.
///
/// `lambda` uses central differences with step `1e-3` plus one Richardson
/// extrapolation; `quartic_axis` is the `φ_1⁴` coefficient `Ω/2 + Ψ/24`.
/// `omega` and `psi` are separable only when `k ≥ 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericExpansion {
    pub lambda: f64,
    pub quartic_axis: f64,
    pub omega: Option<f64>,
    pub psi: Option<f64>,
}

pub fn numeric_expansion(spec: &CompositeSpec) -> NumericExpansion {
    let x0 = spec.atomic_at_one();
    let taylor = spec.weight_poly_taylor(&x0);
    let ratios: Vec<f64> = taylor.iter().map(|c| rational::rational_to_f64(&(c / &taylor[0]))).collect();
    let x0f = rational::rational_to_f64(&x0);
    let k = spec.k;

    // log|S(e^{iφ})/S(1)| evaluated without cancellation.
    let log_ratio = |phi: &[f64]| -> f64 {
        let delta = match spec.kind {
            AtomicKind::Axis => -4.0 * phi.iter().map(|p| (p / 2.0).sin().powi(2)).sum::<f64>(),
            AtomicKind::Diagonal => {
                let log_prod: f64 = phi.iter().map(|p| (-2.0 * (p / 2.0).sin().powi(2)).ln_1p()).sum();
                x0f * log_prod.exp_m1()
            }
        };
        let mut rel = 0.0;
        for r in (1..ratios.len()).rev() {
            rel = (rel + ratios[r]) * delta;
        }
        rel.ln_1p()
    };
    let along = |dir: &[f64], h: f64| -> f64 {
        let phi: Vec<f64> = dir.iter().map(|d| d * h).collect();
        log_ratio(&phi)
    };

    let mut e1 = vec![0.0; k];
    e1[0] = 1.0;
    let h = 1e-3;
    let second = |h: f64| 2.0 * along(&e1, h) / (h * h);
    let lambda = -(4.0 * second(h) - second(2.0 * h)) / 3.0;

    let quartic = |dir: &[f64]| -> f64 {
        // g(h)/h² = a + b s + c s², s = h²; solve for b from three step sizes.
        let s: Vec<f64> = [0.02f64, 0.04, 0.06].iter().map(|h| h * h).collect();
        let y: Vec<f64> = s.iter().map(|&si| along(dir, si.sqrt()) / si).collect();
        let d01 = (y[1] - y[0]) / (s[1] - s[0]);
        let d12 = (y[2] - y[1]) / (s[2] - s[1]);
        let c = (d12 - d01) / (s[2] - s[0]);
        d01 - c * (s[0] + s[1])
    };
    let quartic_axis = quartic(&e1);
    let (omega, psi) = if k >= 2 {
        let mut e12 = vec![0.0; k];
        e12[0] = 1.0;
        e12[1] = 1.0;
        let omega = quartic(&e12) - 2.0 * quartic_axis;
        (Some(omega), Some(24.0 * (quartic_axis - omega / 2.0)))
    } else {
        (None, None)
    };
    NumericExpansion { lambda, quartic_axis, omega, psi }
}

/// A sign vector `ε ∈ {±1}^k`; `ε_j = -1` stands for the angle `π`.
pub type SignVector = Vec<i8>;

/// Angles in `{0, π}^k` where `|S(e^{iφ})|` reaches `S(1, …, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalPointSet {
    pub points: Vec<SignVector>,
}

impl MaximalPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, eps: &[i8]) -> bool {
        self.points.iter().any(|p| p == eps)
    }

    /// Angle vector for a sign vector.
    pub fn angles(eps: &[i8]) -> Vec<f64> {
        eps.iter().map(|&e| if e < 0 { std::f64::consts::PI } else { 0.0 }).collect()
    }
}

/// All sign vectors of dimension `k`, the all-plus vector first.
pub fn sign_vectors(k: usize) -> impl Iterator<Item = SignVector> {
    (0u64..1 << k).map(move |mask| (0..k).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect())
}

pub fn maximal_points(spec: &CompositeSpec) -> MaximalPointSet {
    let top = s_one(spec);
    let points = sign_vectors(spec.k)
        .filter(|eps| spec.weight_poly(&spec.atomic_gf_at_signs(eps)).abs() == top)
        .collect();
    MaximalPointSet { points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn spec(kind: AtomicKind, k: usize, w: &[i64]) -> CompositeSpec {
        CompositeSpec::with_integer_weights(kind, k, w).unwrap()
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn gf_values() {
        let s = spec(AtomicKind::Axis, 2, &[0, 1]);
        assert_eq!(composite_gf_value(&s, &[int(1), int(1)]).unwrap(), int(4));
        let s = spec(AtomicKind::Axis, 2, &[1, 1, 1]);
        assert_eq!(composite_gf_value(&s, &[int(1), int(1)]).unwrap(), int(21));
        let s = spec(AtomicKind::Diagonal, 2, &[0, 1]);
        assert_eq!(composite_gf_value(&s, &[int(2), int(3)]).unwrap(), q("25/3"));
        assert!(matches!(composite_gf_value(&s, &[int(0), int(3)]), Err(ChamberError::Domain(_))));
    }

    #[test]
    fn s_one_values() {
        assert_eq!(s_one(&spec(AtomicKind::Diagonal, 3, &[0, 1])), int(8));
        assert_eq!(s_one(&spec(AtomicKind::Axis, 3, &[0, 1])), int(6));
        assert_eq!(s_one(&spec(AtomicKind::Axis, 2, &[0, 1, 1])), int(20));
    }

    #[test]
    fn lambda_values() {
        for k in 1..=4 {
            assert_eq!(gaussian_expansion(&spec(AtomicKind::Diagonal, k, &[0, 1])).unwrap().lambda, int(1));
        }
        assert_eq!(gaussian_expansion(&spec(AtomicKind::Axis, 2, &[0, 1])).unwrap().lambda, q("1/2"));
        assert_eq!(gaussian_expansion(&spec(AtomicKind::Axis, 2, &[1, 1, 1])).unwrap().lambda, q("6/7"));
    }

    #[test]
    fn numeric_lambda_matches_closed_form() {
        for s in [
            spec(AtomicKind::Axis, 1, &[1, 1, 1]),
            spec(AtomicKind::Axis, 3, &[0, 1, 1]),
            spec(AtomicKind::Axis, 2, &[2, 0, 3, 1]),
            spec(AtomicKind::Diagonal, 2, &[0, 1]),
            spec(AtomicKind::Diagonal, 3, &[1, 0, 2]),
        ] {
            let exact = gaussian_expansion(&s).unwrap().lambda.to_f64().unwrap();
            let fitted = numeric_expansion(&s).lambda;
            assert!((exact - fitted).abs() < 1e-10, "{s}: {exact} vs {fitted}");
        }
    }

    #[test]
    fn printed_quartic_constants_flagged_against_fit() {
        // Lock-step: log cos φ per coordinate, Ω = 0, Ψ = -2 as printed.
        let g = gaussian_expansion(&spec(AtomicKind::Diagonal, 2, &[0, 1])).unwrap();
        assert_eq!(g.omega, int(0));
        assert_eq!(g.psi, int(-2));
        assert!(g.omega_psi_validated);
        // Random turns: the printed axis Ω = -Λ² is off by a factor 4 from the fit.
        let s = spec(AtomicKind::Axis, 2, &[0, 1]);
        let g = gaussian_expansion(&s).unwrap();
        let fit = numeric_expansion(&s);
        assert!((fit.omega.unwrap() + 1.0 / 16.0).abs() < 1e-6);
        assert!((fit.psi.unwrap() - 0.5).abs() < 1e-5);
        assert_eq!(g.omega, q("-1/4"));
        assert!(!g.omega_psi_validated);
    }

    #[test]
    fn second_derivative_matches_chain_rule() {
        let s = spec(AtomicKind::Axis, 1, &[1, 1, 1]);
        assert_eq!(second_derivative_at_one(&s), int(10));
        let s = spec(AtomicKind::Axis, 3, &[1, 1, 1]);
        assert_eq!(second_derivative_at_one(&s), int(2 + 8 * 3));
        let s = spec(AtomicKind::Diagonal, 3, &[0, 1]);
        assert_eq!(second_derivative_at_one(&s), int(8));
    }

    #[test]
    fn maximal_point_sets() {
        let m = maximal_points(&spec(AtomicKind::Diagonal, 2, &[0, 1]));
        assert_eq!(m.len(), 4);
        let m = maximal_points(&spec(AtomicKind::Axis, 2, &[0, 1]));
        assert_eq!(m.points, vec![vec![1, 1], vec![-1, -1]]);
        let m = maximal_points(&spec(AtomicKind::Axis, 2, &[1, 1, 1]));
        assert_eq!(m.points, vec![vec![1, 1]]);
        // Even P on diagonal steps: every sign vector is maximal.
        let m = maximal_points(&spec(AtomicKind::Diagonal, 3, &[1, 0, 1]));
        assert_eq!(m.len(), 8);
        // Mixed parity on diagonal steps: only an even number of π angles.
        let m = maximal_points(&spec(AtomicKind::Diagonal, 3, &[0, 1, 1]));
        assert!(m.points.iter().all(|e| e.iter().filter(|&&x| x < 0).count() % 2 == 0));
    }

    #[test]
    fn lattice_and_chamber() {
        let d = spec(AtomicKind::Diagonal, 2, &[0, 1]);
        assert!(lattice_contains(&d, &LatticePoint::new(vec![1, 3])).unwrap());
        assert!(!lattice_contains(&d, &LatticePoint::new(vec![1, 2])).unwrap());
        let a = spec(AtomicKind::Axis, 2, &[0, 1]);
        assert!(lattice_contains(&a, &LatticePoint::new(vec![-5, 0])).unwrap());
        assert!(matches!(
            lattice_contains(&a, &LatticePoint::new(vec![1])),
            Err(ChamberError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(in_chamber(&[1, 2, 3]));
        assert!(!in_chamber(&[0, 1, 2]));
        assert!(!in_chamber(&[1, 1, 2]));
        assert!(ChamberPoint::new(vec![2, 1]).is_err());
    }

    #[test]
    fn spec_validation_and_json() {
        assert!(CompositeSpec::with_integer_weights(AtomicKind::Axis, 2, &[1]).is_err());
        assert!(CompositeSpec::with_integer_weights(AtomicKind::Axis, 2, &[1, 0, 0]).is_err());
        assert!(CompositeSpec::with_integer_weights(AtomicKind::Axis, 0, &[0, 1]).is_err());
        assert!(CompositeSpec::new(AtomicKind::Axis, 1, vec![int(-1), int(1)]).is_err());
        let s = CompositeSpec::with_integer_weights(AtomicKind::Axis, 2, &[1, 1, 0]).unwrap();
        assert_eq!(s.degree(), 1);

        let text = r#"{"kind":"diagonal","k":2,"weights":["0","3/2"]}"#;
        let s: CompositeSpec = serde_json::from_str(text).unwrap();
        assert_eq!(s.weights()[1], q("3/2"));
        assert_eq!(serde_json::to_string(&s).unwrap(), text);
        assert!(serde_json::from_str::<CompositeSpec>(r#"{"kind":"axis","k":1,"weights":["1"]}"#).is_err());
    }

    #[test]
    fn weight_parity() {
        assert_eq!(spec(AtomicKind::Axis, 1, &[0, 1]).weight_parity(), Some(1));
        assert_eq!(spec(AtomicKind::Axis, 1, &[1, 0, 1]).weight_parity(), Some(0));
        assert_eq!(spec(AtomicKind::Axis, 1, &[1, 1, 1]).weight_parity(), None);
    }
}
