use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A quadratic integer `c ≥ 1` given by `c² = a·c + b` with `a, b ∈ ℤ`,
/// together with its exact value (the larger root).
///
/// `b = 0` is the rational-integer case, where `value = a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticInt {
    pub a: BigInt,
    pub b: BigInt,
    pub value: Scalar,
}

impl QuadraticInt {
    /// The rational integer `n ≥ 1` as a quadratic integer `(a, b) = (n, 0)`.
    pub fn from_integer(n: BigInt) -> Self {
        assert!(n >= BigInt::from(1));
        QuadraticInt {
            value: Scalar::from_big(BigRational::from_integer(n.clone())),
            a: n,
            b: BigInt::zero(),
        }
    }

    /// Larger root of `c² = a·c + b`, requiring it to be real and ≥ 1.
    pub fn from_relation(a: BigInt, b: BigInt) -> Result<Self> {
        let disc = &a * &a + BigInt::from(4) * &b;
        if disc.is_negative() {
            return Err(Error::NotExpansionFactor);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let value = if disc.is_zero() {
            Scalar::from_big(BigRational::from_integer(a.clone()) / &two)
        } else {
            let (s, d0) = split_square(&disc);
            let p = BigRational::from_integer(a.clone()) / &two;
            let q = BigRational::from_integer(s) / &two;
            if d0 == 1 {
                Scalar::from_big(p + q)
            } else {
                Scalar::quad(p, q, d0)
            }
        };
        if value < Scalar::one() {
            return Err(Error::NotExpansionFactor);
        }
        let candidate = QuadraticInt { a, b, value };
        debug_assert!(candidate.check());
        Ok(candidate)
    }

    /// Exact check of the defining relation `value² − a·value − b = 0`.
    pub fn check(&self) -> bool {
        let v = &self.value;
        let av = &Scalar::from_big(BigRational::from_integer(self.a.clone())) * v;
        let b = Scalar::from_big(BigRational::from_integer(self.b.clone()));
        &(v * v) - &av == b
    }
}

/// Writes `n = s²·d0` over the integers with `d0` square-reduced.
fn split_square(n: &BigInt) -> (BigInt, u64) {
    use num_traits::ToPrimitive;
    let mut s = BigInt::from(1);
    let mut m = n.clone();
    let mut f = BigInt::from(2);
    while &f * &f <= m {
        while (&m % (&f * &f)).is_zero() {
            m = m / (&f * &f);
            s *= &f;
        }
        f += 1;
    }
    (
        s,
        m.to_u64().expect("square-free part of discriminant exceeds u64"),
    )
}

/// Expansion factor of an integer 2×2 lattice action: the larger root of
/// `c² = (tr M)·c − det M`, which must be real and ≥ 1.
pub fn quad_from_lattice(m: &[[BigInt; 2]; 2]) -> Result<QuadraticInt> {
    let tr = &m[0][0] + &m[1][1];
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    QuadraticInt::from_relation(tr, -det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_mat(m: [[i64; 2]; 2]) -> [[BigInt; 2]; 2] {
        [
            [BigInt::from(m[0][0]), BigInt::from(m[0][1])],
            [BigInt::from(m[1][0]), BigInt::from(m[1][1])],
        ]
    }

    #[test]
    fn fibonacci_matrix_gives_golden_mean() {
        let q = quad_from_lattice(&int_mat([[0, 1], [1, 1]])).unwrap();
        assert_eq!(q.a, BigInt::from(1));
        assert_eq!(q.b, BigInt::from(1));
        let phi = Scalar::quad(
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            5,
        );
        assert_eq!(q.value, phi);
        assert!(q.check());
    }

    #[test]
    fn scalar_matrix_normalizes_to_rational() {
        let q = quad_from_lattice(&int_mat([[2, 0], [0, 2]])).unwrap();
        assert_eq!((q.a, q.b), (BigInt::from(4), BigInt::from(-4)));
        assert_eq!(q.value, Scalar::from_int(2));
    }

    #[test]
    fn swap_matrix_gives_sqrt_two() {
        let q = quad_from_lattice(&int_mat([[0, 2], [1, 0]])).unwrap();
        assert_eq!((q.a, q.b), (BigInt::from(0), BigInt::from(2)));
        let root2 = Scalar::quad(
            BigRational::zero(),
            BigRational::from_integer(BigInt::from(1)),
            2,
        );
        assert_eq!(q.value, root2);
    }

    #[test]
    fn rotation_matrix_is_rejected() {
        // eigenvalues ±i
        let r = quad_from_lattice(&int_mat([[0, -1], [1, 0]]));
        assert!(matches!(r, Err(Error::NotExpansionFactor)));
    }

    #[test]
    fn contraction_is_rejected() {
        // largest root 1/2-ish: c² = c − 2/... use [[0,1],[-1,0]]-like small:
        // M = [[0, 1], [-2, 0]] has c² = −2 < 0 roots imaginary
        let r = quad_from_lattice(&int_mat([[0, 1], [-2, 0]]));
        assert!(matches!(r, Err(Error::NotExpansionFactor)));
    }
}
