//! Exact rational helpers: parsing, canonical string form, and overflow-free
//! conversion of huge integers and rationals into natural logarithms.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ChamberError, Result};

/// Parses `"p"`, `"-p"` or `"p/q"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || ChamberError::Parse(format!("not a rational number: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ChamberError::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Natural log of a positive big integer, accurate to double precision
/// for any bit length. Uses the top 64 bits as a mantissa.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_u64().expect("at most 64 bits after shift");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of `|q|`; `-inf` for zero.
pub fn ln_abs_rational(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())
}

/// Best-effort conversion to `f64`, going through logarithms when the
/// direct conversion would overflow or underflow.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    match q.to_f64() {
        Some(x) if x.is_finite() && (x != 0.0 || q.is_zero()) => x,
        _ => {
            let sign = if q.is_negative() { -1.0 } else { 1.0 };
            sign * ln_abs_rational(q).exp()
        }
    }
}

/// Exact conversion of a finite `f64` into a rational (every finite double is dyadic).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| ChamberError::Domain(format!("non-finite value {x}")))
}

pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn biguint_to_rational(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

/// `x^e` for a possibly negative exponent.
pub(crate) fn pow_i(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<BigRational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(qs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(qs.len()))?;
        for q in qs {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts.iter().map(|t| parse_rational(t).map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational(" -7 ").unwrap()), "-7");
        assert_eq!(format_rational(&parse_rational("10/5").unwrap()), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ln_of_huge_integers() {
        let two = BigUint::from(2u32);
        let big = num_traits::pow(two, 5000);
        let expected = 5000.0 * std::f64::consts::LN_2;
        assert!((ln_biguint(&big) - expected).abs() < 1e-9);
        assert!((ln_biguint(&BigUint::from(1430u32)) - 1430f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        let q = rational_from_f64(0.1).unwrap();
        assert_eq!(q.to_f64().unwrap(), 0.1);
        assert_ne!(q, BigRational::new(1.into(), 10.into()));
    }
}
