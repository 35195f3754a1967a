use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};

use super::scalar::Scalar;

/// A scalar extended with ±∞, ordered totally.
///
/// Addition follows the valuation conventions: `x + (+∞) = +∞` for
/// `x ≠ −∞`, and `(+∞) + (−∞)` is a programming error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtValue {
    MinusInf,
    Finite(Scalar),
    PlusInf,
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(Scalar::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtValue::Finite(Scalar::from_int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            ExtValue::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn expect_finite(&self, what: &str) -> &Scalar {
        self.finite()
            .unwrap_or_else(|| panic!("expected finite value for {what}, got {self}"))
    }

    pub fn min(self, other: ExtValue) -> ExtValue {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn scale(&self, c: &Scalar) -> ExtValue {
        assert!(c.is_positive(), "scaling an extended value needs c > 0");
        match self {
            ExtValue::Finite(s) => ExtValue::Finite(s * c),
            inf => inf.clone(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            ExtValue::MinusInf => -1,
            ExtValue::PlusInf => 1,
            ExtValue::Finite(s) => s.signum(),
        }
    }
}

impl From<Scalar> for ExtValue {
    fn from(s: Scalar) -> Self {
        ExtValue::Finite(s)
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtValue::*;
        match (self, other) {
            (MinusInf, MinusInf) | (PlusInf, PlusInf) => Ordering::Equal,
            (MinusInf, _) | (_, PlusInf) => Ordering::Less,
            (_, MinusInf) | (PlusInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for &ExtValue {
    type Output = ExtValue;
    fn add(self, other: &ExtValue) -> ExtValue {
        use ExtValue::*;
        match (self, other) {
            (PlusInf, MinusInf) | (MinusInf, PlusInf) => {
                panic!("(+inf) + (-inf) is undefined")
            }
            (PlusInf, _) | (_, PlusInf) => PlusInf,
            (MinusInf, _) | (_, MinusInf) => MinusInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;
    fn add(self, other: ExtValue) -> ExtValue {
        &self + &other
    }
}

impl Neg for ExtValue {
    type Output = ExtValue;
    fn neg(self) -> ExtValue {
        match self {
            ExtValue::MinusInf => ExtValue::PlusInf,
            ExtValue::PlusInf => ExtValue::MinusInf,
            ExtValue::Finite(s) => ExtValue::Finite(-s),
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::MinusInf => write!(f, "-inf"),
            ExtValue::PlusInf => write!(f, "+inf"),
            ExtValue::Finite(s) => write!(f, "{s}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_total() {
        assert!(ExtValue::MinusInf < ExtValue::from_int(-100));
        assert!(ExtValue::from_int(3) < ExtValue::PlusInf);
        assert_eq!(
            ExtValue::from_int(5).min(ExtValue::PlusInf),
            ExtValue::from_int(5)
        );
    }

    #[test]
    fn addition_absorbs_infinities() {
        assert_eq!(
            &ExtValue::PlusInf + &ExtValue::from_int(2),
            ExtValue::PlusInf
        );
        assert_eq!(
            &ExtValue::MinusInf + &ExtValue::from_int(2),
            ExtValue::MinusInf
        );
    }

    #[test]
    #[should_panic(expected = "undefined")]
    fn opposite_infinities_panic() {
        let _ = &ExtValue::PlusInf + &ExtValue::MinusInf;
    }
}
