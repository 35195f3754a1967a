//! Sparse bivariate polynomials and monomial-denominator rational functions
//! over exact rationals, with the weighted-minimum (monomial valuation)
//! evaluator used throughout.

mod gcd;
mod parse;
mod uni;

pub use gcd::{factor_for_curves, gcd_bivariate, squarefree_part, CurveFactor};
pub use parse::{parse_ideal, parse_map, parse_poly};
pub use uni::{rational_roots, RootReport};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numbers::{pa_envelope, AffineForm, ExtValue, Interval, PAFunction, Scalar};

/// Sparse bivariate polynomial: exponent pairs to nonzero rational
/// coefficients. The map is ordered, so iteration (and hence all derived
/// output) is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<(u64, u64), BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn constant_int(c: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    /// The first variable.
    pub fn var1() -> Self {
        Poly::monomial(1, 0, BigRational::one())
    }

    /// The second variable.
    pub fn var2() -> Self {
        Poly::monomial(0, 1, BigRational::one())
    }

    pub fn monomial(i: u64, j: u64, c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn add_term(&mut self, i: u64, j: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, j)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u64, u64), &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u64, j: u64) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// Order of vanishing at the origin (min total degree); +∞ for 0.
    pub fn ord_origin(&self) -> ExtValue {
        match self.terms.keys().map(|&(i, j)| i + j).min() {
            Some(m) => ExtValue::from_int(m as i64),
            None => ExtValue::PlusInf,
        }
    }

    pub fn degrees_in(&self) -> (u64, u64) {
        let d1 = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let d2 = self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0);
        (d1, d2)
    }

    /// Smallest exponents of each variable over the support.
    pub fn min_exponents(&self) -> (u64, u64) {
        let m1 = self.terms.keys().map(|&(i, _)| i).min().unwrap_or(0);
        let m2 = self.terms.keys().map(|&(_, j)| j).min().unwrap_or(0);
        (m1, m2)
    }

    /// Divides by `u^a v^b`, which must divide every term.
    pub fn shift_down(&self, a: u64, b: u64) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            assert!(i >= a && j >= b, "monomial shift does not divide");
            out.add_term(i - a, j - b, c.clone());
        }
        out
    }

    pub fn mul_monomial(&self, a: u64, b: u64) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(checked_exp(i, a), checked_exp(j, b), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (&(i, j), k) in &self.terms {
            out.add_term(i, j, k * c);
        }
        out
    }

    pub fn pow(&self, n: u64) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial1(&self) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, j, c * BigRational::from_integer(BigInt::from(i)));
            }
        }
        out
    }

    pub fn partial2(&self) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.add_term(i, j - 1, c * BigRational::from_integer(BigInt::from(j)));
            }
        }
        out
    }

    /// Substitutes polynomials for the two variables.
    pub fn substitute(&self, x: &Poly, y: &Poly) -> Poly {
        // Horner-style over grouped powers keeps the term blowup in check.
        let mut by_i: BTreeMap<u64, Poly> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            by_i
                .entry(i)
                .or_insert_with(Poly::zero)
                .add_term(0, j, c.clone());
        }
        let mut result = Poly::zero();
        let mut xpow_cache: BTreeMap<u64, Poly> = BTreeMap::new();
        for (i, yi_poly) in by_i {
            // yi_poly is a polynomial in the second variable only.
            let mut val = Poly::zero();
            for (&(_, j), c) in &yi_poly.terms {
                let yj = y.pow(j);
                val = &val + &yj.scale(c);
            }
            let xi = xpow_cache
                .entry(i)
                .or_insert_with(|| x.pow(i))
                .clone();
            result = &result + &(&xi * &val);
        }
        result
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..i {
                t *= x;
            }
            for _ in 0..j {
                t *= y;
            }
            acc += t;
        }
        acc
    }

    /// Minimum of `i·w₁ + j·w₂` over the support; +∞ for the zero
    /// polynomial. A zero exponent contributes nothing even against an
    /// infinite weight.
    pub fn weighted_min(&self, w: &(ExtValue, ExtValue)) -> ExtValue {
        let mut best = ExtValue::PlusInf;
        for &(i, j) in self.terms.keys() {
            let a = weight_term(&w.0, i);
            let b = weight_term(&w.1, j);
            best = best.min(&a + &b);
        }
        best
    }

    /// Parametric weighted minimum: weights `(w₁(t), w₂(t))` affine in `t`,
    /// returning the exact lower envelope over the interval.
    pub fn weighted_min_param(
        &self,
        w1: &AffineForm,
        w2: &AffineForm,
        interval: &Interval,
    ) -> Result<PAFunction> {
        let forms: Vec<AffineForm> = self
            .terms
            .keys()
            .map(|&(i, j)| {
                let si = Scalar::from_int(i as i64);
                let sj = Scalar::from_int(j as i64);
                w1.scale(&si).add(&w2.scale(&sj))
            })
            .collect();
        pa_envelope(&forms, interval.clone())
    }

    /// Exact division by a single divisor via leading-term cancellation in
    /// graded-lex order; `None` when the division is not exact.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let lead = leading_term_grlex(divisor)?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while !rem.is_zero() {
            let (rk, rc) = leading_term_grlex(&rem)?;
            if rk.0 < lead.0 .0 || rk.1 < lead.0 .1 {
                return None;
            }
            let qk = (rk.0 - lead.0 .0, rk.1 - lead.0 .1);
            let qc = rc / &lead.1;
            quot.add_term(qk.0, qk.1, qc.clone());
            let mut t = Poly::monomial(qk.0, qk.1, qc);
            t = &t * divisor;
            rem = &rem - &t;
        }
        Some(quot)
    }

    /// Largest `k` with `h^k | self`; +∞ sentinel for the zero polynomial.
    pub fn h_adic_order(&self, h: &Poly) -> Result<ExtValue> {
        if h.is_constant() {
            return Err(Error::Precondition("h-adic order of a constant".into()));
        }
        if self.is_zero() {
            return Ok(ExtValue::PlusInf);
        }
        let mut k: i64 = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.div_exact(h) {
            cur = q;
            k += 1;
        }
        Ok(ExtValue::from_int(k))
    }

    /// Restriction to the first axis: `p(x, 0)` as coefficients of `x`.
    pub fn restrict_axis1(&self) -> Vec<BigRational> {
        let d = self.degrees_in().0 as usize;
        let mut out = vec![BigRational::zero(); d + 1];
        for (&(i, j), c) in &self.terms {
            if j == 0 {
                out[i as usize] = c.clone();
            }
        }
        trim_zeros(&mut out);
        out
    }

    /// Restriction to the second axis: `p(0, y)` as coefficients of `y`.
    pub fn restrict_axis2(&self) -> Vec<BigRational> {
        let d = self.degrees_in().1 as usize;
        let mut out = vec![BigRational::zero(); d + 1];
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                out[j as usize] = c.clone();
            }
        }
        trim_zeros(&mut out);
        out
    }

    /// Substitutes `y ↦ y + c`, used to recentre charts at a free point.
    pub fn shift_var2(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return self.clone();
        }
        let shifted = Poly::var2() + Poly::constant(c.clone());
        self.substitute(&Poly::var1(), &shifted)
    }

    /// Terms of minimal weighted value under finite weights `w`, as a
    /// polynomial (the weighted initial form).
    pub fn initial_form(&self, w: &(Scalar, Scalar)) -> Poly {
        let mut best: Option<Scalar> = None;
        for &(i, j) in self.terms.keys() {
            let v = &(&w.0 * &Scalar::from_int(i as i64)) + &(&w.1 * &Scalar::from_int(j as i64));
            best = Some(match best {
                None => v,
                Some(b) => {
                    if v < b {
                        v
                    } else {
                        b
                    }
                }
            });
        }
        let Some(best) = best else {
            return Poly::zero();
        };
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            let v = &(&w.0 * &Scalar::from_int(i as i64)) + &(&w.1 * &Scalar::from_int(j as i64));
            if v == best {
                out.add_term(i, j, c.clone());
            }
        }
        out
    }

    /// Content: gcd of all coefficients as a positive rational (monic
    /// normalization helper).
    pub fn leading_coeff_grlex(&self) -> Option<BigRational> {
        leading_term_grlex(self).map(|(_, c)| c)
    }
}

fn weight_term(w: &ExtValue, e: u64) -> ExtValue {
    if e == 0 {
        return ExtValue::zero();
    }
    match w {
        ExtValue::PlusInf => ExtValue::PlusInf,
        ExtValue::MinusInf => ExtValue::MinusInf,
        ExtValue::Finite(s) => ExtValue::Finite(s * &Scalar::from_int(e as i64)),
    }
}

fn checked_exp(a: u64, b: u64) -> u64 {
    a.checked_add(b).expect("exponent overflow")
}

fn leading_term_grlex(p: &Poly) -> Option<((u64, u64), BigRational)> {
    p.terms
        .iter()
        .max_by(|(&(i1, j1), _), (&(i2, j2), _)| {
            (i1 + j1, i1).cmp(&(i2 + j2, i2))
        })
        .map(|(&k, c)| (k, c.clone()))
}

fn trim_zeros(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    if v.len() == 1 && v[0].is_zero() {
        v.clear();
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(checked_exp(i1, i2), checked_exp(j1, j2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

macro_rules! poly_forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, other: Poly) -> Poly {
                (&self).$method(&other)
            }
        }
    };
}
poly_forward_owned!(Add, add);
poly_forward_owned!(Sub, sub);
poly_forward_owned!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // graded-lex, highest first, for readable stable output
        let mut keys: Vec<_> = self.terms.keys().cloned().collect();
        keys.sort_by(|&(i1, j1), &(i2, j2)| (i2 + j2, i2).cmp(&(i1 + j1, i1)));
        for (i, j) in keys {
            let c = &self.terms[&(i, j)];
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && (i, j) != (0, 0);
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            let mut star = !unit_coeff;
            if i > 0 {
                if star {
                    write!(f, "*")?;
                }
                write!(f, "z1")?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
                star = true;
            }
            if j > 0 {
                if star {
                    write!(f, "*")?;
                }
                write!(f, "z2")?;
                if j > 1 {
                    write!(f, "^{j}")?;
                }
            }
        }
        Ok(())
    }
}

/// A polynomial divided by a monomial `u^k v^l` in chart variables,
/// kept reduced (numerator not divisible by a variable with a positive
/// denominator exponent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMonom {
    pub num: Poly,
    pub den: (u64, u64),
}

impl RatMonom {
    pub fn from_poly(num: Poly) -> Self {
        RatMonom { num, den: (0, 0) }
    }

    pub fn new(num: Poly, den: (u64, u64)) -> Self {
        let mut r = RatMonom { num, den };
        r.reduce();
        r
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = (0, 0);
            return;
        }
        let (m1, m2) = self.num.min_exponents();
        let c1 = m1.min(self.den.0);
        let c2 = m2.min(self.den.1);
        if c1 > 0 || c2 > 0 {
            self.num = self.num.shift_down(c1, c2);
            self.den = (self.den.0 - c1, self.den.1 - c2);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &RatMonom) -> RatMonom {
        RatMonom::new(
            &self.num * &other.num,
            (self.den.0 + other.den.0, self.den.1 + other.den.1),
        )
    }

    pub fn pow(&self, n: u64) -> RatMonom {
        RatMonom::new(
            self.num.pow(n),
            (self.den.0 * n, self.den.1 * n),
        )
    }

    /// Weighted order: numerator minimum minus the denominator contribution.
    pub fn weighted_min(&self, w: &(ExtValue, ExtValue)) -> ExtValue {
        if self.num.is_zero() {
            return ExtValue::PlusInf;
        }
        let num = self.num.weighted_min(w);
        let den = &weight_term(&w.0, self.den.0) + &weight_term(&w.1, self.den.1);
        match den {
            ExtValue::Finite(s) => &num + &ExtValue::Finite(-s),
            _ => panic!("infinite denominator weight"),
        }
    }

    pub fn weighted_min_param(
        &self,
        w1: &AffineForm,
        w2: &AffineForm,
        interval: &Interval,
    ) -> Result<PAFunction> {
        let env = self.num.weighted_min_param(w1, w2, interval)?;
        let den = w1
            .scale(&Scalar::from_int(self.den.0 as i64))
            .add(&w2.scale(&Scalar::from_int(self.den.1 as i64)));
        let neg = AffineForm::new(-den.a, -den.b);
        Ok(env.zip_with(
            &PAFunction {
                interval: interval.clone(),
                breakpoints: vec![],
                pieces: vec![neg],
            },
            |a, b| a.add(b),
        ))
    }

    /// Substitutes chart variables by polynomials, staying exact; the
    /// substitution images of `u` and `v` must themselves be monomials
    /// times units for the result to remain a `RatMonom`, so this variant
    /// accepts only polynomial images whose denominator contribution is
    /// re-extracted from the numerator afterwards.
    pub fn substitute_poly(&self, x: &Poly, y: &Poly) -> RatMonom {
        // num(x,y) / (x^du · y^dv): the result only stays monomial-
        // denominated when x and y are monomials; callers in chart
        // composition only pass monomial-times-shift images, and the
        // denominators are handled by the chart layer.
        assert!(
            self.den == (0, 0),
            "substitute_poly on reduced denominator only"
        );
        RatMonom::from_poly(self.num.substitute(x, y))
    }
}

impl fmt::Display for RatMonom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == (0, 0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / (u^{} v^{})", self.num, self.den.0, self.den.1)
        }
    }
}

/// A dominant polynomial self-map `(z1, z2) ↦ (f1, f2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    pub f1: Poly,
    pub f2: Poly,
    dominant: bool,
}

impl PolyMap {
    pub fn new(f1: Poly, f2: Poly) -> Self {
        let dominant = !jacobian_raw(&f1, &f2).is_zero();
        PolyMap { f1, f2, dominant }
    }

    pub fn identity() -> Self {
        PolyMap::new(Poly::var1(), Poly::var2())
    }

    pub fn is_dominant(&self) -> bool {
        self.dominant
    }

    pub fn degree(&self) -> u64 {
        self.f1.degree().max(self.f2.degree())
    }

    pub fn fixes_origin(&self) -> bool {
        self.f1.coeff(0, 0).is_zero() && self.f2.coeff(0, 0).is_zero()
    }

    /// Pullback of a polynomial: `φ ∘ f`.
    pub fn pullback(&self, phi: &Poly) -> Poly {
        phi.substitute(&self.f1, &self.f2)
    }
}

/// Composition `f ∘ g` as maps, i.e. first `g`, then `f`.
pub fn compose(f: &PolyMap, g: &PolyMap) -> PolyMap {
    PolyMap::new(g.pullback(&f.f1), g.pullback(&f.f2))
}

fn jacobian_raw(f1: &Poly, f2: &Poly) -> Poly {
    &(&f1.partial1() * &f2.partial2()) - &(&f1.partial2() * &f2.partial1())
}

/// Jacobian determinant of the map.
pub fn jacobian(f: &PolyMap) -> Poly {
    jacobian_raw(&f.f1, &f.f2)
}

/// A finite list of nonzero polynomial generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    pub gens: Vec<Poly>,
}

impl Ideal {
    pub fn new(gens: Vec<Poly>) -> Result<Self> {
        if gens.is_empty() || gens.iter().any(Poly::is_zero) {
            return Err(Error::Precondition(
                "ideal needs nonempty, nonzero generators".into(),
            ));
        }
        Ok(Ideal { gens })
    }

    /// `ord₀` of the ideal: minimum vanishing order of the generators.
    pub fn ord_origin(&self) -> ExtValue {
        self.gens
            .iter()
            .map(Poly::ord_origin)
            .fold(ExtValue::PlusInf, ExtValue::min)
    }

    pub fn max_degree(&self) -> u64 {
        self.gens.iter().map(Poly::degree).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn compose_golden_map_with_itself() {
        // f=(z2, z1z2), g=f → (z1z2, z1z2²)
        let f = PolyMap::new(p("z2"), p("z1*z2"));
        let ff = compose(&f, &f);
        assert_eq!(ff.f1, p("z1*z2"));
        assert_eq!(ff.f2, p("z1*z2^2"));
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let f = PolyMap::new(p("z1^2 - z2"), p("z2^3 + z1"));
        let id = PolyMap::identity();
        assert_eq!(compose(&f, &id), f);
        assert_eq!(compose(&id, &f), f);
    }

    #[test]
    fn skew_product_square_has_degree_eight() {
        // f=(z1², z1z2²) squared → (z1⁴, z1⁴z2⁴)
        let f = PolyMap::new(p("z1^2"), p("z1*z2^2"));
        let ff = compose(&f, &f);
        assert_eq!(ff.f1, p("z1^4"));
        assert_eq!(ff.f2, p("z1^4*z2^4"));
        assert_eq!(ff.degree(), 8);
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian(&PolyMap::new(p("z2"), p("z1*z2"))), p("-z2"));
        assert_eq!(
            jacobian(&PolyMap::new(p("z1^2"), p("z1*z2^2"))),
            p("4*z1^2*z2")
        );
        assert_eq!(jacobian(&PolyMap::identity()), p("1"));
    }

    #[test]
    fn weighted_min_of_cusp() {
        let cusp = p("z2^2 - z1^3");
        let w11 = (ExtValue::from_int(1), ExtValue::from_int(1));
        assert_eq!(cusp.weighted_min(&w11), ExtValue::from_int(2));
        let w23 = (ExtValue::from_int(2), ExtValue::from_int(3));
        assert_eq!(cusp.weighted_min(&w23), ExtValue::from_int(6));
    }

    #[test]
    fn weighted_min_param_of_cusp() {
        // weights (1,t): min(3, 2t), breakpoint t=3/2
        let cusp = p("z2^2 - z1^3");
        let env = cusp
            .weighted_min_param(
                &AffineForm::constant(Scalar::one()),
                &AffineForm::new(Scalar::zero(), Scalar::one()),
                &Interval::ray_from(Scalar::from_int(1)),
            )
            .unwrap();
        assert_eq!(env.breakpoints, vec![Scalar::from_frac(3, 2)]);
    }

    #[test]
    fn zero_poly_has_infinite_order() {
        let w = (ExtValue::from_int(1), ExtValue::from_int(1));
        assert_eq!(Poly::zero().weighted_min(&w), ExtValue::PlusInf);
    }

    #[test]
    fn h_adic_orders() {
        assert_eq!(
            p("z1*z2^2").h_adic_order(&p("z2")).unwrap(),
            ExtValue::from_int(2)
        );
        let phi = &p("z2 - z1^2").pow(3) * &p("z1 + 1");
        assert_eq!(
            phi.h_adic_order(&p("z2 - z1^2")).unwrap(),
            ExtValue::from_int(3)
        );
        assert_eq!(
            p("z1 + z2").h_adic_order(&p("z2")).unwrap(),
            ExtValue::from_int(0)
        );
        assert!(p("z1").h_adic_order(&p("3")).is_err());
        assert_eq!(
            Poly::zero().h_adic_order(&p("z2")).unwrap(),
            ExtValue::PlusInf
        );
    }

    #[test]
    fn exact_division_detects_non_divisor() {
        assert!(p("z1^2 + z2").div_exact(&p("z1 + z2")).is_none());
        let prod = &p("z1^2 + z2*z1 + 7") * &p("z2^3 - z1");
        assert_eq!(
            prod.div_exact(&p("z2^3 - z1")).unwrap(),
            p("z1^2 + z2*z1 + 7")
        );
    }

    #[test]
    fn substitution_is_exact() {
        // (z1 + z2)² at (z2, z1z2) = (z2 + z1z2)² = z2²(1+z1)²
        let s = p("z1 + z2").pow(2);
        let f = PolyMap::new(p("z2"), p("z1*z2"));
        let img = f.pullback(&s);
        assert_eq!(img, &p("z2^2") * &p("z1^2 + 2*z1 + 1"));
    }

    #[test]
    fn ratmonom_reduces() {
        let r = RatMonom::new(p("z1^2*z2 + z1^3"), (1, 0));
        assert_eq!(r.num, p("z1*z2 + z1^2"));
        assert_eq!(r.den, (0, 0));
    }
}
