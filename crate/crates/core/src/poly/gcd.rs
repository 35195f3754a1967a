//! Bivariate gcd over ℚ via content/primitive-part recursion, square-free
//! parts, and the curve-factor splitting used to detect contracted curves.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::uni::{uni_degree, uni_divrem, uni_gcd, uni_is_zero, uni_mul, UniPoly};
use super::Poly;
use crate::error::{Error, Result};

/// View of a `Poly` as univariate in `z2` with coefficients in ℚ[z1].
fn to_z2_coeffs(p: &Poly) -> Vec<UniPoly> {
    let d2 = p.degrees_in().1 as usize;
    let mut out: Vec<UniPoly> = vec![vec![]; d2 + 1];
    for (&(i, j), c) in p.terms() {
        let coeff = &mut out[j as usize];
        if coeff.len() <= i as usize {
            coeff.resize(i as usize + 1, BigRational::zero());
        }
        coeff[i as usize] = c.clone();
    }
    out
}

fn from_z2_coeffs(coeffs: &[UniPoly]) -> Poly {
    let mut p = Poly::zero();
    for (j, c) in coeffs.iter().enumerate() {
        for (i, q) in c.iter().enumerate() {
            p.add_term(i as u64, j as u64, q.clone());
        }
    }
    p
}

fn z2_content(coeffs: &[UniPoly]) -> UniPoly {
    let mut g: UniPoly = vec![];
    for c in coeffs {
        if !uni_is_zero(c) {
            g = if g.is_empty() { c.clone() } else { uni_gcd(&g, c) };
            if uni_degree(&g) == 0 && !uni_is_zero(&g) {
                return vec![BigRational::one()];
            }
        }
    }
    if g.is_empty() {
        vec![BigRational::one()]
    } else {
        g
    }
}

fn z2_primitive(coeffs: &[UniPoly]) -> Vec<UniPoly> {
    let cont = z2_content(coeffs);
    coeffs
        .iter()
        .map(|c| {
            if uni_is_zero(c) {
                vec![]
            } else {
                let (q, r) = uni_divrem(c, &cont);
                debug_assert!(uni_is_zero(&r));
                q
            }
        })
        .collect()
}

/// Euclid on primitive parts in (ℚ[z1])[z2], tolerating field-of-fraction
/// intermediate coefficients via ordinary division (exactness restored by
/// taking primitive parts of the results).
fn z2_prim_gcd(a: &[UniPoly], b: &[UniPoly]) -> Vec<UniPoly> {
    fn deg(p: &[UniPoly]) -> Option<usize> {
        let mut d = None;
        for (j, c) in p.iter().enumerate() {
            if !uni_is_zero(c) {
                d = Some(j);
            }
        }
        d
    }
    // pseudo-remainder: lead(b)^k · a mod b, staying in ℚ[z1][z2]
    fn prem(a: &[UniPoly], b: &[UniPoly]) -> Vec<UniPoly> {
        let db = deg(b).expect("zero divisor in prem");
        let lb = &b[db];
        let mut r: Vec<UniPoly> = a.to_vec();
        loop {
            let Some(dr) = deg(&r) else { return r };
            if dr < db {
                return r;
            }
            let lr = r[dr].clone();
            // r ← lb·r − lr·z2^{dr−db}·b
            let mut scaled: Vec<UniPoly> = r.iter().map(|c| uni_mul(c, lb)).collect();
            for (j, c) in b.iter().enumerate() {
                let idx = j + dr - db;
                let t = uni_mul(c, &lr);
                if scaled.len() <= idx {
                    scaled.resize(idx + 1, vec![]);
                }
                scaled[idx] = super::uni::uni_sub(&scaled[idx], &t);
            }
            r = scaled;
            // trim top zeros
            while r.last().map(|c| uni_is_zero(c)).unwrap_or(false) {
                r.pop();
            }
        }
    }
    let mut x = z2_primitive(a);
    let mut y = z2_primitive(b);
    if deg(&x).is_none() {
        return y;
    }
    if deg(&y).is_none() {
        return x;
    }
    if deg(&x) < deg(&y) {
        std::mem::swap(&mut x, &mut y);
    }
    while deg(&y).is_some() {
        let r = prem(&x, &y);
        x = y;
        y = z2_primitive(&r);
    }
    z2_primitive(&x)
}

/// Gcd of two bivariate polynomials over ℚ, normalized so the graded-lex
/// leading coefficient is 1. gcd(p, 0) = p.
pub fn gcd_bivariate(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return normalize(q.clone());
    }
    if q.is_zero() {
        return normalize(p.clone());
    }
    let pa = to_z2_coeffs(p);
    let pb = to_z2_coeffs(q);
    let cont = uni_gcd(&z2_content(&pa), &z2_content(&pb));
    let prim = z2_prim_gcd(&pa, &pb);
    let g = from_z2_coeffs(&prim);
    let cont_poly = from_z2_coeffs(&[cont]);
    normalize(&g * &cont_poly)
}

fn normalize(p: Poly) -> Poly {
    match p.leading_coeff_grlex() {
        Some(c) if !c.is_one() => p.scale(&c.recip()),
        _ => p,
    }
}

/// Square-free part (radical) of a bivariate polynomial.
pub fn squarefree_part(p: &Poly) -> Poly {
    if p.is_zero() || p.is_constant() {
        return normalize(p.clone());
    }
    let g1 = gcd_bivariate(p, &p.partial1());
    let g = gcd_bivariate(&g1, &p.partial2());
    match p.div_exact(&g) {
        Some(q) => normalize(q),
        None => normalize(p.clone()), // g should always divide; defensive fallback unreachable
    }
}

/// One multiplicity-tagged factor of a curve divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFactor {
    pub poly: Poly,
    pub multiplicity: u64,
    /// True when the factor is certified irreducible over ℚ (degree one,
    /// a coordinate, or an irreducibility test passed); factors that are
    /// merely square-free carry `false` and drivers surface the limitation.
    pub certified_irreducible: bool,
}

/// Splits a nonzero polynomial into curve factors: monomial axes first,
/// then square-free components. Components that cannot be certified
/// irreducible are returned whole with `certified_irreducible = false`.
pub fn factor_for_curves(p: &Poly) -> Result<Vec<CurveFactor>> {
    if p.is_zero() {
        return Err(Error::Precondition("cannot factor the zero polynomial".into()));
    }
    let mut out = Vec::new();
    let (m1, m2) = p.min_exponents();
    let mut rest = p.shift_down(m1, m2);
    if m1 > 0 {
        out.push(CurveFactor {
            poly: Poly::var1(),
            multiplicity: m1,
            certified_irreducible: true,
        });
    }
    if m2 > 0 {
        out.push(CurveFactor {
            poly: Poly::var2(),
            multiplicity: m2,
            certified_irreducible: true,
        });
    }
    rest = normalize(rest);
    if rest.is_constant() {
        return Ok(out);
    }
    // peel square-free layers: p = Π layer_k^k
    let mut k = 1u64;
    loop {
        if rest.is_constant() {
            break;
        }
        let rad = squarefree_part(&rest);
        let next = rest.div_exact(&rad).expect("radical divides");
        // factors at multiplicity exactly k live in rad / gcd(rad, next)
        let shared = gcd_bivariate(&rad, &next);
        let exact_k = match rad.div_exact(&shared) {
            Some(q) => q,
            None => rad.clone(),
        };
        if !exact_k.is_constant() {
            for piece in split_squarefree(&exact_k) {
                out.push(CurveFactor {
                    multiplicity: k,
                    certified_irreducible: piece.1,
                    poly: piece.0,
                });
            }
        }
        rest = next;
        k += 1;
        if k > 64 {
            return Err(Error::BudgetExhausted("factor multiplicity".into()));
        }
    }
    Ok(out)
}

/// Attempts to split a square-free polynomial into irreducible pieces;
/// each piece is tagged with whether irreducibility is certified.
fn split_squarefree(p: &Poly) -> Vec<(Poly, bool)> {
    let mut pieces = Vec::new();
    let mut rest = p.clone();
    // univariate-in-one-variable parts: pull out rational linear factors
    loop {
        if rest.is_constant() {
            return pieces;
        }
        let (d1, d2) = rest.degrees_in();
        if rest.degree() == 1 {
            pieces.push((normalize(rest), true));
            return pieces;
        }
        if d2 == 0 {
            // univariate in z1: split off rational roots
            if let Ok(rep) = super::uni::rational_roots(&rest.restrict_axis1()) {
                if let Some((root, _)) = rep.roots.first() {
                    let lin = &Poly::var1() - &Poly::constant(root.clone());
                    pieces.push((lin.clone(), true));
                    rest = rest.div_exact(&lin).expect("linear factor divides");
                    continue;
                }
            }
            pieces.push((normalize(rest), false));
            return pieces;
        }
        if d1 == 0 {
            if let Ok(rep) = super::uni::rational_roots(&rest.restrict_axis2()) {
                if let Some((root, _)) = rep.roots.first() {
                    let lin = &Poly::var2() - &Poly::constant(root.clone());
                    pieces.push((lin.clone(), true));
                    rest = rest.div_exact(&lin).expect("linear factor divides");
                    continue;
                }
            }
            pieces.push((normalize(rest), false));
            return pieces;
        }
        // genuinely bivariate: monic-in-z2 degree-one case is irreducible,
        // e.g. z2·q(z1) + r(z1) with gcd(q, r) = 1
        if d2 == 1 {
            let coeffs = to_z2_coeffs(&rest);
            let g = uni_gcd(&coeffs[0], &coeffs[1]);
            if uni_degree(&g) == 0 {
                pieces.push((normalize(rest), true));
                return pieces;
            }
        }
        pieces.push((normalize(rest), false));
        return pieces;
    }
}
