use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact number in ℚ or in a real quadratic extension ℚ(√D).
///
/// `Quad { p, q, d }` means `p + q·√d` with `q ≠ 0` and `d` a non-square
/// positive integer. A `Quad` with vanishing irrational part is normalized
/// to `Rat` on construction, so equality is structural.
///
/// All scalars appearing in one computation share a single `d`; combining
/// two distinct extensions panics rather than coercing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Quad {
        p: BigRational,
        q: BigRational,
        d: u64,
    },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Scalar::Rat(r)
    }

    /// Builds `p + q√d`, normalizing `q = 0` to the rational case and
    /// extracting square factors of `d`.
    pub fn quad(p: BigRational, q: BigRational, d: u64) -> Self {
        assert!(d > 1, "quadratic radicand must exceed 1");
        if q.is_zero() {
            return Scalar::Rat(p);
        }
        let (s, d0) = extract_square(d);
        if d0 == 1 {
            // d was a perfect square; the value is rational.
            return Scalar::Rat(p + q * BigRational::from_integer(BigInt::from(s)));
        }
        Scalar::Quad {
            p,
            q: q * BigRational::from_integer(BigInt::from(s)),
            d: d0,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Quad { .. } => None,
        }
    }

    /// Rational and irrational parts `(p, q, d)`; `q = 0`, `d = 1` for `Rat`.
    pub fn parts(&self) -> (BigRational, BigRational, u64) {
        match self {
            Scalar::Rat(r) => (r.clone(), BigRational::zero(), 1),
            Scalar::Quad { p, q, d } => (p.clone(), q.clone(), *d),
        }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Rat(r) => sign_of(r),
            Scalar::Quad { p, q, d } => {
                // sign of p + q√d decided rationally from the signs of p, q
                // and of p² − q²d.
                let sp = sign_of(p);
                let sq = sign_of(q);
                debug_assert!(sq != 0);
                if sp == 0 {
                    return sq;
                }
                if sp == sq {
                    return sp;
                }
                // p and q√d pull in opposite directions; p wins iff p² > q²d.
                let disc = p * p - q * q * BigRational::from_integer(BigInt::from(*d));
                match sign_of(&disc) {
                    1 => sp,
                    -1 => sq,
                    _ => 0, // impossible for non-square d, kept for totality
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero scalar");
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
            Scalar::Quad { p, q, d } => {
                // 1/(p + q√d) = (p − q√d)/(p² − q²d)
                let n = p * p - q * q * BigRational::from_integer(BigInt::from(*d));
                debug_assert!(!n.is_zero());
                Scalar::quad(p / &n, -(q / &n), *d)
            }
        }
    }

    pub fn pow(&self, mut n: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Decimal approximation, for the optional `approx` report fields only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rat(r) => rat_to_f64(r),
            Scalar::Quad { p, q, d } => rat_to_f64(p) + rat_to_f64(q) * (*d as f64).sqrt(),
        }
    }

    fn binop(
        &self,
        other: &Scalar,
        f: impl Fn(&BigRational, &BigRational, &BigRational, &BigRational, u64) -> Scalar,
    ) -> Scalar {
        let (p1, q1, d1) = self.parts();
        let (p2, q2, d2) = other.parts();
        let d = match (d1, d2) {
            (1, d) | (d, 1) => d,
            (a, b) if a == b => a,
            (a, b) => panic!("mixing distinct quadratic extensions √{a} and √{b}"),
        };
        f(&p1, &q1, &p2, &q2, d)
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Writes `n = s²·d0` with `d0` square-reduced by trial division (and a
/// perfect-square check on the cofactor). Returns `(s, d0)`.
fn extract_square(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut m = n;
    let mut f = 2u64;
    while f * f <= m {
        while m % (f * f) == 0 {
            m /= f * f;
            s *= f;
        }
        f += 1;
    }
    (s, m)
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self - other;
        match diff.signum() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, other: &Scalar) -> Scalar {
        self.binop(other, |p1, q1, p2, q2, d| {
            if d == 1 {
                Scalar::Rat(p1 + p2)
            } else {
                Scalar::quad(p1 + p2, q1 + q2, d)
            }
        })
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, other: &Scalar) -> Scalar {
        self + &(-other.clone())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, other: &Scalar) -> Scalar {
        self.binop(other, |p1, q1, p2, q2, d| {
            if d == 1 {
                Scalar::Rat(p1 * p2)
            } else {
                let dd = BigRational::from_integer(BigInt::from(d));
                Scalar::quad(p1 * p2 + q1 * q2 * dd, p1 * q2 + q1 * p2, d)
            }
        })
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, other: &Scalar) -> Scalar {
        self * &other.recip()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Quad { p, q, d } => Scalar::Quad { p: -p, q: -q, d },
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, other: Scalar) -> Scalar {
                (&self).$method(&other)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, other: &Scalar) -> Scalar {
                (&self).$method(other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Quad { p, q, d } => {
                if p.is_zero() {
                    write!(f, "{q}*sqrt({d})")
                } else if q.is_positive() {
                    write!(f, "{p}+{q}*sqrt({d})")
                } else {
                    write!(f, "{p}{q}*sqrt({d})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn quad_normalizes_to_rational() {
        let s = Scalar::quad(rat(1, 2), rat(0, 1), 5);
        assert_eq!(s, Scalar::from_frac(1, 2));
        // √9 = 3 folds in
        let s = Scalar::quad(rat(1, 1), rat(2, 1), 9);
        assert_eq!(s, Scalar::from_int(7));
        // √12 = 2√3
        let s = Scalar::quad(rat(0, 1), rat(1, 1), 12);
        assert_eq!(
            s,
            Scalar::Quad {
                p: rat(0, 1),
                q: rat(2, 1),
                d: 3
            }
        );
    }

    #[test]
    fn exact_sign_of_mixed_parts() {
        // 3 − 2√2 > 0 since 9 > 8
        let s = Scalar::quad(rat(3, 1), rat(-2, 1), 2);
        assert!(s.is_positive());
        // 2 − 3√2 < 0 since 4 < 18
        let s = Scalar::quad(rat(2, 1), rat(-3, 1), 2);
        assert!(s.is_negative());
        // −3 + 2√2 < 0
        let s = Scalar::quad(rat(-3, 1), rat(2, 1), 2);
        assert!(s.is_negative());
    }

    #[test]
    fn golden_mean_satisfies_its_equation() {
        // φ = (1+√5)/2 satisfies φ² = φ + 1
        let phi = Scalar::quad(rat(1, 2), rat(1, 2), 5);
        let lhs = &phi * &phi;
        let rhs = &phi + &Scalar::one();
        assert_eq!(lhs, rhs);
        assert!(phi > Scalar::from_int(1));
        assert!(phi < Scalar::from_int(2));
    }

    #[test]
    fn reciprocal_roundtrip() {
        let phi = Scalar::quad(rat(1, 2), rat(1, 2), 5);
        assert_eq!(&phi * &phi.recip(), Scalar::one());
    }

    #[test]
    #[should_panic(expected = "mixing distinct quadratic extensions")]
    fn mixing_extensions_panics() {
        let a = Scalar::quad(rat(0, 1), rat(1, 1), 2);
        let b = Scalar::quad(rat(0, 1), rat(1, 1), 3);
        let _ = &a + &b;
    }
}
