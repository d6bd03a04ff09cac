//! Exact rational determinant identities.
//!
//! Half-integer powers `z^{m-1/2}` are handled by writing `z = t²`, so every
//! quantity stays rational.

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::matrix::{det_exact, ExactMatrix};
use super::{rationals_json, IdentityReport};
use crate::error::{ChamberError, Result};
use crate::rational::{int, pow_i};

fn nonzero(xs: &[BigRational], what: &str) -> Result<()> {
    if xs.is_empty() {
        return Err(ChamberError::Domain(format!("{what} must be nonempty")));
    }
    if xs.iter().any(Zero::is_zero) {
        return Err(ChamberError::Domain(format!("{what} must be nonzero")));
    }
    Ok(())
}

/// `det(z_j^m - z_j^{-m})` against
/// `(∏z)^{-k} ∏_{j<m}(z_j - z_m)(1 - z_j z_m) ∏_j (z_j² - 1)`,
/// or, with `half_integer`, `det(z_j^{m-1/2} - z_j^{-(m-1/2)})` against
/// `(∏t)^{-2k+1} ∏_{j<m}(z_j - z_m)(1 - z_j z_m) ∏_j (z_j - 1)` where `z = t²`
/// and the inputs are the `t_j`.
pub fn check_type_c_det_identity(z: &[BigRational], half_integer: bool) -> Result<IdentityReport> {
    nonzero(z, "coordinates")?;
    let k = z.len();
    let (zs, lhs) = if half_integer {
        let t = z;
        let zs: Vec<BigRational> = t.iter().map(|x| x * x).collect();
        let m = ExactMatrix::from_fn(k, |j, c| {
            let e = 2 * c as i64 + 1;
            pow_i(&t[j], e) - pow_i(&t[j], -e)
        });
        (zs, det_exact(&m))
    } else {
        let m = ExactMatrix::from_fn(k, |j, c| {
            let e = c as i64 + 1;
            pow_i(&z[j], e) - pow_i(&z[j], -e)
        });
        (z.to_vec(), det_exact(&m))
    };
    let mut rhs = BigRational::one();
    for (j, m) in (0..k).tuple_combinations() {
        rhs *= (&zs[j] - &zs[m]) * (BigRational::one() - &zs[j] * &zs[m]);
    }
    let prod: BigRational = z.iter().product();
    if half_integer {
        rhs *= pow_i(&prod, 1 - 2 * k as i64);
        for x in &zs {
            rhs *= x - BigRational::one();
        }
    } else {
        rhs *= pow_i(&prod, -(k as i64));
        for x in &zs {
            rhs *= x * x - BigRational::one();
        }
    }
    let degenerate = lhs.is_zero() && rhs.is_zero();
    let name = if half_integer { "type_c_det_half_integer" } else { "type_c_det" };
    let key = if half_integer { "t" } else { "z" };
    Ok(IdentityReport::exact(name, json!({ key: rationals_json(z), "degenerate": degenerate }), &lhs, &rhs))
}

/// All weakly increasing sequences in `0..=top` of length `k`.
fn weakly_increasing(k: usize, top: usize) -> Vec<Vec<usize>> {
    (0..=top).combinations_with_replacement(k).collect()
}

/// Sum of Schur bialternants over all partitions in a `k × 2c` box against the
/// ratio `det(z^{2c+m-1/2} - z^{-(m-1/2)}) / det(z^{m-1/2} - z^{-(m-1/2)})`,
/// with inputs `t_j` and `z_j = t_j²`.
pub fn schur_orthogonal_identity_check(t: &[BigRational], c: usize) -> Result<IdentityReport> {
    nonzero(t, "coordinates")?;
    if t.iter().any(|x| x.is_negative()) {
        return Err(ChamberError::Domain("t must be positive".into()));
    }
    let k = t.len();
    let z: Vec<BigRational> = t.iter().map(|x| x * x).collect();
    if z.iter().tuple_combinations().any(|(a, b)| a == b) {
        return Err(ChamberError::Degenerate("coincident z values".into()));
    }
    let vandermonde = det_exact(&ExactMatrix::from_fn(k, |j, m| pow_i(&z[j], m as i64)));
    let mut lhs = BigRational::zero();
    for lambda in weakly_increasing(k, 2 * c) {
        let num = det_exact(&ExactMatrix::from_fn(k, |j, m| pow_i(&z[j], (lambda[m] + m) as i64)));
        lhs += num;
    }
    lhs /= vandermonde;
    let num = det_exact(&ExactMatrix::from_fn(k, |j, m| {
        let e = 2 * m as i64 + 1;
        pow_i(&t[j], 4 * c as i64 + e) - pow_i(&t[j], -e)
    }));
    let den = det_exact(&ExactMatrix::from_fn(k, |j, m| {
        let e = 2 * m as i64 + 1;
        pow_i(&t[j], e) - pow_i(&t[j], -e)
    }));
    if den.is_zero() {
        return Err(ChamberError::Degenerate("vanishing denominator determinant".into()));
    }
    let rhs = num / den;
    Ok(IdentityReport::exact("schur_orthogonal_sum", json!({ "t": rationals_json(t), "c": c }), &lhs, &rhs))
}

/// `det(z^m) det(z^{-m}) / det(z^m - z^{-m})` against
/// `∏_j (z_j - 1/z_j)^{-1} ∏_{j<m} (2 - z_m/z_j - z_j/z_m) / (z_m + 1/z_m - z_j - 1/z_j)`.
pub fn quotient_identity_check(z: &[BigRational]) -> Result<IdentityReport> {
    nonzero(z, "coordinates")?;
    let one = BigRational::one();
    if z.iter().any(|x| x.abs() == one) {
        return Err(ChamberError::Domain("coordinates must avoid ±1".into()));
    }
    if z.iter().tuple_combinations().any(|(a, b)| a == b || a * b == one) {
        return Err(ChamberError::Domain("coordinates must be distinct with no reciprocal pairs".into()));
    }
    let k = z.len();
    let pos = det_exact(&ExactMatrix::from_fn(k, |j, m| pow_i(&z[j], m as i64 + 1)));
    let neg = det_exact(&ExactMatrix::from_fn(k, |j, m| pow_i(&z[j], -(m as i64) - 1)));
    let mixed = det_exact(&ExactMatrix::from_fn(k, |j, m| pow_i(&z[j], m as i64 + 1) - pow_i(&z[j], -(m as i64) - 1)));
    let lhs = pos * neg / mixed;
    let mut rhs = BigRational::one();
    for x in z {
        rhs /= x - x.recip();
    }
    for (j, m) in (0..k).tuple_combinations() {
        let (a, b) = (&z[j], &z[m]);
        rhs *= (int(2) - b / a - a / b) / (b + b.recip() - a - a.recip());
    }
    Ok(IdentityReport::exact("quotient", json!({ "z": rationals_json(z) }), &lhs, &rhs))
}

/// Determinant with rows `(-1)^m u_m^{j-1}` for `j ≤ a` and `u_m^{j-a-1}` for `j > a`.
/// Errors when `u` is not strictly increasing and positive, or when the value vanishes.
pub fn mixed_vandermonde_det(u: &[BigRational], a: usize) -> Result<BigRational> {
    let k = u.len();
    if a > k {
        return Err(ChamberError::Domain(format!("a = {a} exceeds k = {k}")));
    }
    if u.first().is_some_and(|x| !x.is_positive()) || u.iter().tuple_windows().any(|(x, y)| x >= y) {
        return Err(ChamberError::Domain("u must satisfy 0 < u_1 < … < u_k".into()));
    }
    let m = ExactMatrix::from_fn(k, |j, c| {
        if j < a {
            let s = if (c + 1) % 2 == 0 { int(1) } else { int(-1) };
            s * pow_i(&u[c], j as i64)
        } else {
            pow_i(&u[c], (j - a) as i64)
        }
    });
    let d = det_exact(&m);
    if d.is_zero() {
        return Err(ChamberError::Diagnostic(format!("mixed Vandermonde determinant vanished at u = {u:?}, a = {a}")));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn qs(xs: &[&str]) -> Vec<BigRational> {
        xs.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn type_c_examples() {
        let r = check_type_c_det_identity(&qs(&["2"]), false).unwrap();
        assert!(r.pass && r.residual.is_exact_zero());
        let r = check_type_c_det_identity(&qs(&["2", "3"]), false).unwrap();
        assert!(r.pass);
        let m = ExactMatrix::from_fn(2, |j, c| {
            let z = [q("2"), q("3")];
            pow_i(&z[j], c as i64 + 1) - pow_i(&z[j], -(c as i64) - 1)
        });
        assert_eq!(det_exact(&m), q("10/3"));
        assert!(check_type_c_det_identity(&qs(&["2"]), true).unwrap().pass);
        assert!(check_type_c_det_identity(&qs(&["2", "-1/3", "5/2", "7"]), true).unwrap().pass);
        assert!(check_type_c_det_identity(&qs(&["2", "-1/3", "5/2", "7"]), false).unwrap().pass);
        let d = check_type_c_det_identity(&qs(&["2", "2"]), false).unwrap();
        assert!(d.pass && d.params["degenerate"] == true);
        assert!(check_type_c_det_identity(&qs(&["0", "2"]), false).is_err());
    }

    #[test]
    fn schur_examples() {
        let r = schur_orthogonal_identity_check(&qs(&["2"]), 1).unwrap();
        assert!(r.pass);
        assert!(schur_orthogonal_identity_check(&qs(&["2", "3"]), 0).unwrap().pass);
        assert!(schur_orthogonal_identity_check(&qs(&["2", "3"]), 1).unwrap().pass);
        assert!(schur_orthogonal_identity_check(&qs(&["1/2", "3", "5/3"]), 2).unwrap().pass);
        assert!(schur_orthogonal_identity_check(&qs(&["2", "2"]), 1).is_err());
    }

    #[test]
    fn schur_box_count() {
        assert_eq!(weakly_increasing(2, 2).len(), 6);
        assert_eq!(weakly_increasing(3, 4).len(), 35);
    }

    #[test]
    fn quotient_examples() {
        assert!(quotient_identity_check(&qs(&["2"])).unwrap().pass);
        assert!(quotient_identity_check(&qs(&["2", "3"])).unwrap().pass);
        assert!(quotient_identity_check(&qs(&["2", "-3/5", "7/2"])).unwrap().pass);
        assert!(quotient_identity_check(&qs(&["2", "1/2"])).is_err());
        assert!(quotient_identity_check(&qs(&["-1", "3"])).is_err());
    }

    #[test]
    fn mixed_vandermonde_examples() {
        assert_eq!(mixed_vandermonde_det(&qs(&["1", "2", "3"]), 0).unwrap(), int(2));
        assert_eq!(mixed_vandermonde_det(&qs(&["1", "2"]), 1).unwrap(), int(-2));
        assert!(!mixed_vandermonde_det(&qs(&["1/2", "2", "7/3", "5"]), 4).unwrap().is_zero());
        assert!(mixed_vandermonde_det(&qs(&["2", "1"]), 0).is_err());
        assert!(mixed_vandermonde_det(&qs(&["1", "2"]), 3).is_err());
    }
}
