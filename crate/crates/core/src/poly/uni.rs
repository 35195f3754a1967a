//! Univariate helpers over ℚ: exact arithmetic, gcd, and complete rational
//! root extraction with a certified irrational/complex residue report.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type UniPoly = Vec<BigRational>;

pub fn uni_trim(p: &mut UniPoly) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

pub fn uni_is_zero(p: &UniPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub fn uni_degree(p: &UniPoly) -> usize {
    let mut d = 0;
    for (i, c) in p.iter().enumerate() {
        if !c.is_zero() {
            d = i;
        }
    }
    d
}

pub fn uni_mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
    if uni_is_zero(a) || uni_is_zero(b) {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    uni_trim(&mut out);
    out
}

pub fn uni_sub(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, cb) in b.iter().enumerate() {
        out[i] -= cb;
    }
    uni_trim(&mut out);
    out
}

/// Division with remainder over the field ℚ.
pub fn uni_divrem(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly) {
    assert!(!uni_is_zero(b), "univariate division by zero");
    let db = uni_degree(b);
    let lb = b[db].clone();
    let mut rem = a.clone();
    uni_trim(&mut rem);
    let mut quot: UniPoly = vec![];
    while !uni_is_zero(&rem) && uni_degree(&rem) >= db {
        let dr = uni_degree(&rem);
        let c = &rem[dr] / &lb;
        let shift = dr - db;
        if quot.len() < shift + 1 {
            quot.resize(shift + 1, BigRational::zero());
        }
        quot[shift] = c.clone();
        let mut t = vec![BigRational::zero(); shift + 1];
        t[shift] = c;
        rem = uni_sub(&rem, &uni_mul(&t, b));
    }
    uni_trim(&mut quot);
    (quot, rem)
}

/// Rescales to the integer-primitive representative with positive leading
/// coefficient, which keeps Euclidean remainder sequences from blowing up.
pub fn uni_primitive(p: &UniPoly) -> UniPoly {
    let mut out = p.clone();
    uni_trim(&mut out);
    if out.is_empty() {
        return out;
    }
    let mut lcm = BigInt::one();
    for c in &out {
        lcm = lcm.lcm(c.denom());
    }
    let mut content = BigInt::zero();
    let scaled: Vec<BigInt> = out
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    for c in &scaled {
        content = content.gcd(c);
    }
    if scaled.last().map(|c| c.is_negative()).unwrap_or(false) {
        content = -content;
    }
    scaled
        .into_iter()
        .map(|c| BigRational::from_integer(c / &content))
        .collect()
}

/// Monic gcd via Euclid on primitive remainders.
pub fn uni_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut x = uni_primitive(a);
    let mut y = uni_primitive(b);
    while !uni_is_zero(&y) {
        let (_, r) = uni_divrem(&x, &y);
        x = y;
        y = uni_primitive(&r);
    }
    if !uni_is_zero(&x) {
        let d = uni_degree(&x);
        let lead = x[d].clone();
        for c in &mut x {
            *c /= &lead;
        }
    }
    x
}

pub fn uni_eval(p: &UniPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// The rational roots of a univariate polynomial, plus the degree of the
/// residual factor with no rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport {
    /// Each rational root with its multiplicity.
    pub roots: Vec<(BigRational, usize)>,
    /// Degree of what is left after deflating all rational roots; any
    /// positive residual degree means roots exist only beyond ℚ.
    pub residual_degree: usize,
}

/// Complete rational-root extraction. Errors with `FactorUnknown` only when
/// a coefficient resists factorization (candidate enumeration would be
/// incomplete), never returning a wrong list.
pub fn rational_roots(p: &UniPoly) -> Result<RootReport> {
    let mut f = p.clone();
    uni_trim(&mut f);
    assert!(!uni_is_zero(&f), "root-finding on the zero polynomial");
    let mut roots: Vec<(BigRational, usize)> = Vec::new();
    // x = 0 roots first
    let mut zero_mult = 0usize;
    while !f.is_empty() && f[0].is_zero() {
        f.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((BigRational::zero(), zero_mult));
    }
    loop {
        if uni_degree(&f) == 0 {
            return Ok(RootReport {
                roots,
                residual_degree: 0,
            });
        }
        match one_rational_root(&f)? {
            Some(r) => {
                // deflate, tracking multiplicity
                let mut mult = 0usize;
                loop {
                    let lin = vec![-r.clone(), BigRational::one()];
                    let (q, rem) = uni_divrem(&f, &lin);
                    if uni_is_zero(&rem) {
                        f = q;
                        mult += 1;
                    } else {
                        break;
                    }
                }
                debug_assert!(mult > 0);
                roots.push((r, mult));
            }
            None => {
                return Ok(RootReport {
                    roots,
                    residual_degree: uni_degree(&f),
                })
            }
        }
    }
}

/// Finds one rational root, or proves none exists.
fn one_rational_root(f: &UniPoly) -> Result<Option<BigRational>> {
    let d = uni_degree(f);
    match d {
        0 => Ok(None),
        1 => Ok(Some(-(&f[0] / &f[1]))),
        2 => {
            // rational iff the discriminant is a perfect rational square
            let (a, b, c) = (&f[2], &f[1], &f[0]);
            let disc = b * b - BigRational::from_integer(BigInt::from(4)) * a * c;
            if disc.is_negative() {
                return Ok(None);
            }
            match rational_sqrt(&disc) {
                Some(s) => Ok(Some((-b + s) / (BigRational::from_integer(BigInt::from(2)) * a))),
                None => Ok(None),
            }
        }
        _ => higher_degree_root(f),
    }
}

/// Rational root theorem on the primitive integer model, requiring complete
/// factorizations of the extreme coefficients.
fn higher_degree_root(f: &UniPoly) -> Result<Option<BigRational>> {
    // clear denominators
    let mut lcm = BigInt::one();
    for c in f {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let d = ints.len() - 1;
    let a0 = &ints[0];
    let an = &ints[d];
    debug_assert!(!a0.is_zero() && !an.is_zero());
    let div0 = divisors(a0).ok_or_else(|| {
        Error::FactorUnknown(format!("constant coefficient {a0} resists factorization"))
    })?;
    let divn = divisors(an).ok_or_else(|| {
        Error::FactorUnknown(format!("leading coefficient {an} resists factorization"))
    })?;
    for p in &div0 {
        for q in &divn {
            for sign in [1i64, -1] {
                let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                if uni_eval(f, &cand).is_zero() {
                    return Ok(Some(cand));
                }
            }
        }
    }
    Ok(None)
}

/// All positive divisors, or `None` if the factorization is incomplete.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n;
    let mut f = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &f * &f <= m && f <= bound {
        if (&m % &f).is_zero() {
            let mut e = 0;
            while (&m % &f).is_zero() {
                m = m / &f;
                e += 1;
            }
            primes.push((f.clone(), e));
        }
        f += 1;
    }
    if m > BigInt::one() {
        if &f * &f > m || is_prime(&m) {
            primes.push((m, 1));
        } else {
            return None;
        }
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    Some(divs)
}

/// Deterministic Miller–Rabin for the ranges arising here.
fn is_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    for small in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let s = BigInt::from(small);
        if *n == s {
            return true;
        }
        if (n % s).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let two = BigInt::from(2);
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut r = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        r += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigInt::from(a);
        if a >= *n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 0..r.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// √r when `r` is a perfect square of a rational.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let sn = r.numer().sqrt();
    let sd = r.denom().sqrt();
    if &(&sn * &sn) == r.numer() && &(&sd * &sd) == r.denom() {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (x − 2)²(x + 1/3)·3 = ...
        let f = uni_mul(
            &uni_mul(&vec![q(-2), q(1)], &vec![q(-2), q(1)]),
            &vec![BigRational::new(BigInt::from(1), BigInt::from(3)), q(1)],
        );
        let rep = rational_roots(&f).unwrap();
        assert_eq!(rep.residual_degree, 0);
        assert!(rep
            .roots
            .contains(&(q(2), 2)));
        assert!(rep
            .roots
            .contains(&(BigRational::new(BigInt::from(-1), BigInt::from(3)), 1)));
    }

    #[test]
    fn irrational_residual_is_reported() {
        // x² − 2
        let rep = rational_roots(&vec![q(-2), q(0), q(1)]).unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.residual_degree, 2);
    }

    #[test]
    fn cubic_with_rational_and_irrational_roots() {
        // (x − 1)(x² − 2)
        let f = uni_mul(&vec![q(-1), q(1)], &vec![q(-2), q(0), q(1)]);
        let rep = rational_roots(&f).unwrap();
        assert_eq!(rep.roots, vec![(q(1), 1)]);
        assert_eq!(rep.residual_degree, 2);
    }

    #[test]
    fn gcd_of_common_factor() {
        let a = uni_mul(&vec![q(-1), q(1)], &vec![q(3), q(1)]);
        let b = uni_mul(&vec![q(-1), q(1)], &vec![q(5), q(0), q(1)]);
        let g = uni_gcd(&a, &b);
        assert_eq!(g, vec![q(-1), q(1)]);
    }

    #[test]
    fn primality_check() {
        assert!(is_prime(&BigInt::from(1_000_003)));
        assert!(!is_prime(&BigInt::from(1_000_001))); // 101 × 9901
    }
}
