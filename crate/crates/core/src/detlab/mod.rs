//! Exact and numeric checks of the determinant evaluations, character sums,
//! determinant asymptotics and Selberg integrals behind the asymptotic formulas.

mod asymptotics;
mod identities;
mod matrix;
mod selberg;

use num_rational::BigRational;
use serde::Serialize;

pub use asymptotics::{dsin_leading_ratio, gaussian_kernel_det_ratio, sign_identity_check};
pub use identities::{check_type_c_det_identity, mixed_vandermonde_det, quotient_identity_check, schur_orthogonal_identity_check};
pub use matrix::{det_exact, ExactMatrix};
pub use selberg::{selberg_closed_form, selberg_mc_check, SelbergStatistic, SelbergWeight};

use crate::rational;

/// Residual of an identity check: exact for rational identities, a float otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Residual {
    Exact(#[serde(with = "rational::serde_rational")] BigRational),
    Float(f64),
}

impl Residual {
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Residual::Exact(r) if num_traits::Zero::is_zero(r))
    }
}

/// Outcome of one identity check at one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: serde_json::Value,
    pub pass: bool,
    pub residual: Residual,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl IdentityReport {
    pub(crate) fn exact(identity: &str, params: serde_json::Value, lhs: &BigRational, rhs: &BigRational) -> Self {
        let diff = lhs - rhs;
        IdentityReport {
            identity: identity.to_string(),
            params,
            pass: num_traits::Zero::is_zero(&diff),
            residual: Residual::Exact(diff),
            sign: None,
        }
    }
}

pub(crate) fn rationals_json(xs: &[BigRational]) -> serde_json::Value {
    serde_json::Value::Array(xs.iter().map(|x| serde_json::Value::String(rational::format_rational(x))).collect())
}
