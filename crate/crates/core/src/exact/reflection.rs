//! Signed permutations (the group generated by the chamber walls).

use itertools::Itertools;

/// A signed permutation `ρ` acting by `ρ(x)_j = signs[j] * x[perm[j]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    /// `sgn(σ) · ∏ ε_j`.
    pub fn sign(&self) -> i8 {
        let flips: i8 = self.signs.iter().product();
        permutation_sign(&self.perm) * flips
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.perm.iter().zip(&self.signs).map(|(&p, &s)| s as i64 * x[p]).collect()
    }
}

pub fn permutation_sign(perm: &[usize]) -> i8 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All `2^k k!` signed permutations, in a fixed order.
pub fn signed_permutations(k: usize) -> impl Iterator<Item = SignedPermutation> {
    (0..k).permutations(k).flat_map(move |perm| {
        crate::stepmodel::sign_vectors(k).map(move |signs| SignedPermutation { perm: perm.clone(), signs })
    })
}

/// Sign of the signed permutation carrying `x` onto a chamber point, or `None`
/// when `x` lies on a wall (a zero coordinate or two equal absolute values).
pub(crate) fn chamber_sign(x: &[i64]) -> Option<i8> {
    let mut sign: i8 = 1;
    for &c in x {
        if c == 0 {
            return None;
        }
        if c < 0 {
            sign = -sign;
        }
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (a, b) = (x[i].abs(), x[j].abs());
            if a == b {
                return None;
            }
            if a > b {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_order_and_signs() {
        assert_eq!(signed_permutations(3).count(), 48);
        let total: i64 = signed_permutations(3).map(|r| r.sign() as i64).sum();
        assert_eq!(total, 0);
        let r = SignedPermutation { perm: vec![1, 0], signs: vec![1, -1] };
        assert_eq!(r.apply(&[1, 3]), vec![3, -1]);
        assert_eq!(r.sign(), 1);
    }

    #[test]
    fn chamber_sign_matches_group_action() {
        let u = [1i64, 4, 6];
        for r in signed_permutations(3) {
            assert_eq!(chamber_sign(&r.apply(&u)), Some(r.sign()));
        }
        assert_eq!(chamber_sign(&[0, 2]), None);
        assert_eq!(chamber_sign(&[-2, 2]), None);
    }
}
