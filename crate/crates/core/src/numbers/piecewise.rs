use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ext::ExtValue;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// The affine function `a + b·t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub a: Scalar,
    pub b: Scalar,
}

impl AffineForm {
    pub fn new(a: Scalar, b: Scalar) -> Self {
        AffineForm { a, b }
    }

    pub fn constant(a: Scalar) -> Self {
        AffineForm {
            a,
            b: Scalar::zero(),
        }
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        &self.a + &(&self.b * t)
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        AffineForm::new(&self.a + &other.a, &self.b + &other.b)
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        AffineForm::new(&self.a - &other.a, &self.b - &other.b)
    }

    pub fn scale(&self, c: &Scalar) -> AffineForm {
        AffineForm::new(&self.a * c, &self.b * c)
    }

    /// The crossing point of two non-parallel forms.
    fn crossing(&self, other: &AffineForm) -> Option<Scalar> {
        let db = &self.b - &other.b;
        if db.is_zero() {
            return None;
        }
        Some(&(&other.a - &self.a) / &db)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*t", self.a, self.b)
    }
}

/// A closed parameter interval with extended endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtValue,
    pub hi: ExtValue,
}

impl Interval {
    pub fn new(lo: ExtValue, hi: ExtValue) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn closed(lo: Scalar, hi: Scalar) -> Self {
        Interval::new(ExtValue::Finite(lo), ExtValue::Finite(hi))
    }

    pub fn ray_from(lo: Scalar) -> Self {
        Interval::new(ExtValue::Finite(lo), ExtValue::PlusInf)
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        let t = ExtValue::Finite(t.clone());
        self.lo <= t && t <= self.hi
    }

    /// Some point strictly inside (or an endpoint for degenerate intervals).
    fn sample(&self) -> Scalar {
        match (&self.lo, &self.hi) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => &(a + b) / &Scalar::from_int(2),
            (ExtValue::Finite(a), ExtValue::PlusInf) => a + &Scalar::one(),
            (ExtValue::MinusInf, ExtValue::Finite(b)) => b - &Scalar::one(),
            (ExtValue::MinusInf, ExtValue::PlusInf) => Scalar::zero(),
            _ => unreachable!("empty interval"),
        }
    }
}

/// A continuous piecewise-affine function on an interval: ordered interior
/// breakpoints and one affine form per piece. A lower envelope is concave
/// (slopes non-increasing along the pieces).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAFunction {
    pub interval: Interval,
    /// Strictly increasing interior breakpoints; `pieces.len() == breakpoints.len() + 1`.
    pub breakpoints: Vec<Scalar>,
    pub pieces: Vec<AffineForm>,
}

impl PAFunction {
    pub fn constant(interval: Interval, value: Scalar) -> Self {
        PAFunction {
            interval,
            breakpoints: Vec::new(),
            pieces: vec![AffineForm::constant(value)],
        }
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        assert!(self.interval.contains(t), "parameter outside interval");
        self.piece_at(t).eval(t)
    }

    /// The form governing `t`; ties at a breakpoint resolve to the earlier piece.
    pub fn piece_at(&self, t: &Scalar) -> &AffineForm {
        let mut idx = 0;
        for bp in &self.breakpoints {
            if t > bp {
                idx += 1;
            } else {
                break;
            }
        }
        &self.pieces[idx]
    }

    /// Sub-interval governed by piece `i`.
    pub fn piece_interval(&self, i: usize) -> Interval {
        let lo = if i == 0 {
            self.interval.lo.clone()
        } else {
            ExtValue::Finite(self.breakpoints[i - 1].clone())
        };
        let hi = if i == self.breakpoints.len() {
            self.interval.hi.clone()
        } else {
            ExtValue::Finite(self.breakpoints[i].clone())
        };
        Interval::new(lo, hi)
    }

    /// Pointwise combination with matching intervals.
    pub fn zip_with(
        &self,
        other: &PAFunction,
        f: impl Fn(&AffineForm, &AffineForm) -> AffineForm,
    ) -> PAFunction {
        assert_eq!(self.interval, other.interval, "interval mismatch");
        let mut bps: Vec<Scalar> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        for i in 0..=bps.len() {
            let lo = if i == 0 {
                self.interval.lo.clone()
            } else {
                ExtValue::Finite(bps[i - 1].clone())
            };
            let hi = if i == bps.len() {
                self.interval.hi.clone()
            } else {
                ExtValue::Finite(bps[i].clone())
            };
            let probe = Interval::new(lo, hi).sample();
            pieces.push(f(self.piece_at(&probe), other.piece_at(&probe)));
        }
        let mut out = PAFunction {
            interval: self.interval.clone(),
            breakpoints: bps,
            pieces,
        };
        out.coalesce();
        out
    }

    pub fn sub(&self, other: &PAFunction) -> PAFunction {
        self.zip_with(other, |a, b| a.sub(b))
    }

    /// Pointwise minimum of two piecewise-affine functions.
    pub fn min_with(&self, other: &PAFunction) -> PAFunction {
        assert_eq!(self.interval, other.interval, "interval mismatch");
        let mut forms = Vec::new();
        // Candidate breakpoints: the union of both functions' breakpoints plus
        // crossings inside each common sub-piece; evaluate per sub-piece.
        let mut bps: Vec<Scalar> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        for p in &self.pieces {
            for q in &other.pieces {
                if let Some(c) = p.crossing(q) {
                    if self.interval.contains(&c) {
                        bps.push(c);
                    }
                }
            }
        }
        bps.sort();
        bps.dedup();
        let mut intervals = Vec::new();
        let mut lo = self.interval.lo.clone();
        for bp in &bps {
            intervals.push(Interval::new(lo.clone(), ExtValue::Finite(bp.clone())));
            lo = ExtValue::Finite(bp.clone());
        }
        intervals.push(Interval::new(lo, self.interval.hi.clone()));
        for iv in &intervals {
            let probe = iv.sample();
            let fa = self.piece_at(&probe);
            let fb = other.piece_at(&probe);
            forms.push(if fa.eval(&probe) <= fb.eval(&probe) {
                fa.clone()
            } else {
                fb.clone()
            });
        }
        let mut out = PAFunction {
            interval: self.interval.clone(),
            breakpoints: bps,
            pieces: forms,
        };
        out.coalesce();
        out
    }

    /// Drops breakpoints between identical adjacent pieces (canonical form).
    fn coalesce(&mut self) {
        let mut i = 0;
        while i < self.breakpoints.len() {
            if self.pieces[i] == self.pieces[i + 1] {
                self.pieces.remove(i + 1);
                self.breakpoints.remove(i);
            } else {
                i += 1;
            }
        }
    }

    /// True when slopes are non-increasing across pieces.
    pub fn is_concave(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].b >= w[1].b)
    }
}

/// Lower envelope (pointwise minimum) of affine forms over an interval.
///
/// The result is concave with at most one piece per form; ties at
/// breakpoints keep the earlier piece.
pub fn pa_envelope(forms: &[AffineForm], interval: Interval) -> Result<PAFunction> {
    if forms.is_empty() {
        return Err(Error::NoForms);
    }
    let mut acc = PAFunction {
        interval: interval.clone(),
        breakpoints: Vec::new(),
        pieces: vec![forms[0].clone()],
    };
    for f in &forms[1..] {
        let g = PAFunction {
            interval: interval.clone(),
            breakpoints: Vec::new(),
            pieces: vec![f.clone()],
        };
        acc = acc.min_with(&g);
    }
    debug_assert!(acc.is_concave());
    Ok(acc)
}

/// Exact fixed points of `t ↦ (a₁ + b₁t)/(a₂ + b₂t)` inside an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPoints {
    /// Every point of the piece is fixed.
    WholePiece,
    /// The listed points (possibly none), each rational or quadratic.
    Points(Vec<Scalar>),
}

/// Solves `t = (num.a + num.b·t)/(den.a + den.b·t)` exactly on `interval`.
///
/// Requires rational coefficients; the denominator must not vanish on the
/// interval interior. Quadratic roots come out as exact `Scalar::Quad`s.
pub fn solve_fixed(num: &AffineForm, den: &AffineForm, interval: &Interval) -> Result<FixedPoints> {
    let (a1, b1, a2, b2) = match (
        num.a.as_rational(),
        num.b.as_rational(),
        den.a.as_rational(),
        den.b.as_rational(),
    ) {
        (Some(a1), Some(b1), Some(a2), Some(b2)) => {
            (a1.clone(), b1.clone(), a2.clone(), b2.clone())
        }
        _ => return Err(Error::IrrationalCoefficients),
    };
    // t(a2 + b2 t) = a1 + b1 t  ⟺  b2 t² + (a2 − b1) t − a1 = 0
    let ca = b2;
    let cb = &a2 - &b1;
    let cc = -a1;
    let mut roots = Vec::new();
    if ca.is_zero() {
        if cb.is_zero() {
            if cc.is_zero() {
                return Ok(FixedPoints::WholePiece);
            }
            return Ok(FixedPoints::Points(Vec::new()));
        }
        roots.push(Scalar::Rat(-(&cc / &cb)));
    } else {
        let disc = &cb * &cb - BigRational::from_integer(BigInt::from(4)) * &ca * &cc;
        if disc.is_negative() {
            return Ok(FixedPoints::Points(Vec::new()));
        }
        let two_a = BigRational::from_integer(BigInt::from(2)) * &ca;
        if disc.is_zero() {
            roots.push(Scalar::Rat(-(&cb / &two_a)));
        } else {
            // √disc = √(n·d)/d for disc = n/d, then square-reduce.
            let (s, d0) = sqrt_of_rational(&disc);
            if d0 == 1 {
                roots.push(Scalar::Rat((-(&cb) + s.clone()) / &two_a));
                roots.push(Scalar::Rat((-(&cb) - s) / &two_a));
            } else {
                let p = -(&cb / &two_a);
                let q = &s / &two_a;
                roots.push(Scalar::quad(p.clone(), q.clone(), d0));
                roots.push(Scalar::quad(p, -q, d0));
            }
        }
    }
    let mut sols: Vec<Scalar> = roots
        .into_iter()
        .filter(|t| interval.contains(t) && !den.eval(t).is_zero())
        .collect();
    sols.sort();
    sols.dedup();
    Ok(FixedPoints::Points(sols))
}

/// For a positive rational `r = n/d`, writes `√r = (s/d)·√d0` with `d0`
/// square-reduced, returning the rational factor and `d0` (1 when `r` is a
/// perfect square).
fn sqrt_of_rational(r: &BigRational) -> (BigRational, u64) {
    use num_traits::ToPrimitive;
    assert!(r.is_positive());
    let n = r.numer() * r.denom();
    let den = r.denom().clone();
    // n = s²·d0
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
    let d0 = m
        .to_u64()
        .expect("square-free radicand exceeds u64; discriminant too large");
    (BigRational::new(s, den), d0)
}
