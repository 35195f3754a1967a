//! Log resolution of ideals and embedded resolution of marked curves:
//! iteratively blow up base points of strict transforms until the pulled
//! back ideal is principal with normal-crossings support and every marked
//! curve branch meets the exceptional set transversally at its own free
//! point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::chart::{ChartId, PrimeId};
use super::seq::{BlowupSeq, BlowupStep, FreePoint, MarkedCurve, Mode};
use crate::error::{Error, Result};
use crate::poly::{
    factor_for_curves, gcd_bivariate, rational_roots, Ideal, Poly, RatMonom,
};

/// Default cap on resolution blowups.
pub const DEFAULT_STEP_CAP: usize = 256;

/// Where a curve branch currently sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchState {
    /// Attached transversally at a free point: `(prime, chart, coordinate)`.
    Resolved {
        prime: PrimeId,
        chart: ChartId,
        coord: BigRational,
    },
    /// Passing through a free point non-transversally (multiple or tangent),
    /// or through several points; the listed point needs blowing up.
    AtFreePoint { chart: ChartId, coord: BigRational },
    /// Passing through a satellite point.
    AtSatellite { pair: (PrimeId, PrimeId) },
}

/// One branch of a marked curve on the current surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub curve: usize,
    pub state: BranchState,
}

/// Pulls a polynomial back to a chart and strips its own exceptional
/// components: always the `u`-powers, and the `v`-powers exactly when the
/// `v`-axis is a prime.
pub fn strict_in_chart(seq: &BlowupSeq, chart: ChartId, phi: &Poly) -> Poly {
    let (z1, z2) = seq.fwd(chart);
    let num = phi.substitute2(&z1, &z2);
    let (m1, m2) = num.num.min_exponents();
    let strip_v = match seq.chart(chart).v_axis {
        super::chart::VAxis::Prime(_) => m2,
        super::chart::VAxis::Curvette => 0,
    };
    num.num.shift_down(m1, strip_v)
}

/// Pullback orders and fully stripped numerators of a generator list in a
/// chart: per generator `(a, b, h)` with pullback `u^a v^b · h`, `h` coprime
/// to both variables.
fn chart_levels(seq: &BlowupSeq, chart: ChartId, gens: &[Poly]) -> Vec<(i64, i64, Poly)> {
    let (z1, z2) = seq.fwd(chart);
    gens.iter()
        .map(|g| {
            let r = g.substitute2(&z1, &z2);
            let (m1, m2) = r.num.min_exponents();
            (
                m1 as i64 - r.den.0 as i64,
                m2 as i64 - r.den.1 as i64,
                r.num.shift_down(m1, m2),
            )
        })
        .collect()
}

/// `ord_E(φ)` for a prime of the sequence: the `u`-adic order of the
/// pullback in the prime's primary chart.
pub fn ord_along_prime(seq: &BlowupSeq, prime: PrimeId, phi: &Poly) -> BigInt {
    let (z1, z2) = seq.fwd(seq.prime(prime).chart);
    let r = phi.substitute2(&z1, &z2);
    BigInt::from(r.num.min_exponents().0) - BigInt::from(r.den.0)
}

impl Poly {
    /// Pullback through chart forward maps, as a monomial-denominated
    /// function.
    pub fn substitute2(&self, x: &RatMonom, y: &RatMonom) -> RatMonom {
        if self.is_zero() {
            return RatMonom::from_poly(Poly::zero());
        }
        // common denominator u^(a·du) v^(a·dv) with a = max power needed
        let mut acc = RatMonom::from_poly(Poly::zero());
        for (&(i, j), c) in self.terms() {
            let term = x.pow(i).mul(&y.pow(j));
            let scaled = RatMonom::new(term.num.scale(c), term.den);
            acc = ratmonom_add(&acc, &scaled);
        }
        acc
    }
}

fn ratmonom_add(a: &RatMonom, b: &RatMonom) -> RatMonom {
    let du = a.den.0.max(b.den.0);
    let dv = a.den.1.max(b.den.1);
    let na = a.num.mul_monomial(du - a.den.0, dv - a.den.1);
    let nb = b.num.mul_monomial(du - b.den.0, dv - b.den.1);
    RatMonom::new(&na + &nb, (du, dv))
}

/// Recomputes the branch states of every marked curve on the current
/// surface from scratch. Deterministic in the sequence contents.
pub fn track_curves(seq: &BlowupSeq) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    for (curve_idx, curve) in seq.curves.iter().enumerate() {
        // free-point intersections via every prime's primary chart (plus
        // the root's alternate chart for its extra point)
        for prime in &seq.primes {
            let mut charts = vec![(prime.chart, false)];
            if let Some(alt) = prime.alt_chart {
                charts.push((alt, true));
            }
            for (chart_id, alt_only) in charts {
                let strict = strict_in_chart(seq, chart_id, &curve.poly);
                let restr = strict.restrict_axis2();
                if restr.is_empty() {
                    // strict vanishes identically on {u=0}: cannot happen
                    // for a curve not containing the prime
                    return Err(Error::UnresolvedCurve(format!(
                        "curve {} contains a prime",
                        curve.poly
                    )));
                }
                let report = rational_roots(&restr)?;
                if report.residual_degree > 0 {
                    return Err(Error::IrrationalBasePoint(format!(
                        "curve {} meets E{} at a non-rational point",
                        curve.poly, prime.id
                    )));
                }
                for (root, mult) in report.roots {
                    if alt_only && !root.is_zero() {
                        continue; // other points already seen in the primary chart
                    }
                    if seq.is_blown(chart_id, &root) {
                        continue; // continuation lives on the child prime
                    }
                    if let Some(other) = seq.chart(chart_id).crossing_at(&root) {
                        out.push(Branch {
                            curve: curve_idx,
                            state: BranchState::AtSatellite {
                                pair: (prime.id, other),
                            },
                        });
                        continue;
                    }
                    let state = if mult == 1 {
                        BranchState::Resolved {
                            prime: prime.id,
                            chart: chart_id,
                            coord: root,
                        }
                    } else {
                        BranchState::AtFreePoint {
                            chart: chart_id,
                            coord: root,
                        }
                    };
                    out.push(Branch {
                        curve: curve_idx,
                        state,
                    });
                }
            }
        }
        // satellite-point intersections via the live pair charts
        for pair in &seq.pairs {
            let strict = strict_in_chart(seq, pair.chart, &curve.poly);
            let at_origin = strict.coeff(0, 0).is_zero();
            if at_origin && !seq.is_blown(pair.chart, &BigRational::zero()) {
                out.push(Branch {
                    curve: curve_idx,
                    state: BranchState::AtSatellite {
                        pair: (pair.u, pair.v),
                    },
                });
            }
        }
    }
    Ok(out)
}

/// A base point of the strict-transform ideal on the current surface.
#[derive(Debug, Clone, PartialEq, Eq)]
enum BasePoint {
    Free { parent: PrimeId, at: FreePoint },
    Satellite { pair: (PrimeId, PrimeId) },
}

/// Scans every chart for common zeros of the strict transform of the
/// generators on the exceptional set.
fn base_points(seq: &BlowupSeq, gens: &[Poly]) -> Result<Vec<BasePoint>> {
    let mut out = Vec::new();
    for prime in &seq.primes {
        let mut charts = vec![(prime.chart, false)];
        if let Some(alt) = prime.alt_chart {
            charts.push((alt, true));
        }
        for (chart_id, alt_only) in charts {
            // strict ideal in this chart: pullbacks u^{a_i}·h_i; the strict
            // generators are u^{a_i - min}·h_i, and on {u = 0} only the
            // minimal level constrains the common zero locus
            let levels = chart_levels(seq, chart_id, gens);
            let min_u = levels.iter().map(|(a, _, _)| *a).min().unwrap();
            // when the v-axis is a prime, its multiplicity in the ideal is
            // exceptional too and gets stripped before restricting
            let min_v = match seq.chart(chart_id).v_axis {
                super::chart::VAxis::Prime(_) => {
                    levels.iter().map(|(_, b, _)| *b).min().unwrap()
                }
                super::chart::VAxis::Curvette => 0,
            };
            let mut g: Option<Poly> = None;
            for (a, b, h) in &levels {
                if *a != min_u {
                    continue;
                }
                // the strict generator restricted to {u=0} is v^(b-mv)·h(0,v)
                let restr = poly_from_coeffs2(&h.restrict_axis2())
                    .mul_monomial(0, (*b - min_v) as u64);
                g = Some(match g {
                    None => restr,
                    Some(prev) => gcd_bivariate(&prev, &restr),
                });
            }
            let g = g.expect("some generator achieves the minimum");
            if g.is_zero() || g.is_constant() {
                continue;
            }
            let report = rational_roots(&g.restrict_axis2())?;
            if report.residual_degree > 0 {
                return Err(Error::IrrationalBasePoint(format!(
                    "base point on E{} beyond the rational numbers",
                    prime.id
                )));
            }
            for (root, _) in report.roots {
                if alt_only && !root.is_zero() {
                    continue;
                }
                if seq.is_blown(chart_id, &root) {
                    continue;
                }
                if let Some(other) = seq.chart(chart_id).crossing_at(&root) {
                    out.push(BasePoint::Satellite {
                        pair: (prime.id, other),
                    });
                    continue;
                }
                let at = if alt_only {
                    FreePoint::RootAlt
                } else {
                    FreePoint::Coord(root)
                };
                out.push(BasePoint::Free {
                    parent: prime.id,
                    at,
                });
            }
        }
    }
    // satellite base points at live pair origins: with pullbacks
    // u^{a_i} v^{b_i} h_i, the strict generator u^{a_i-mu} v^{b_i-mv} h_i
    // vanishes at the origin unless both exponents are minimal and
    // h_i(0,0) ≠ 0
    for pair in &seq.pairs {
        let levels = chart_levels(seq, pair.chart, gens);
        let mu = levels.iter().map(|(a, _, _)| *a).min().unwrap();
        let mv = levels.iter().map(|(_, b, _)| *b).min().unwrap();
        let all_vanish = levels
            .iter()
            .all(|(a, b, h)| *a > mu || *b > mv || h.coeff(0, 0).is_zero());
        if all_vanish && !seq.is_blown(pair.chart, &BigRational::zero()) {
            out.push(BasePoint::Satellite {
                pair: (pair.u, pair.v),
            });
        }
    }
    out.dedup();
    Ok(out)
}

fn poly_from_coeffs2(coeffs: &[BigRational]) -> Poly {
    let mut p = Poly::zero();
    for (j, c) in coeffs.iter().enumerate() {
        p.add_term(0, j as u64, c.clone());
    }
    p
}

/// Result of a log resolution.
#[derive(Debug, Clone)]
pub struct LogResolution {
    pub seq: BlowupSeq,
    /// Orders of vanishing of the (curve-free part of the) ideal along each
    /// prime; the associated exceptional divisor has coefficients `-ord`.
    pub vanishing_orders: Vec<BigInt>,
    /// Fixed curve components factored out of the generators (local mode),
    /// each with the multiplicity it divides the ideal.
    pub fixed_curves: Vec<MarkedCurve>,
    /// Generators after removing the fixed part (and, at infinity, with the
    /// implicit constant section included).
    pub moving_gens: Vec<Poly>,
}

/// Log resolution of an ideal. Local mode requires all generators to vanish
/// at the origin; infinity mode resolves the linear system spanned by the
/// generators together with the constants.
///
/// Marked curves (e.g. contracted curves of a map germ) are resolved
/// alongside until each branch attaches transversally at its own free point.
pub fn log_resolution(
    ideal: &Ideal,
    mode: Mode,
    extra_curves: &[MarkedCurve],
    step_cap: usize,
) -> Result<LogResolution> {
    let mut seq = BlowupSeq::new(mode);
    let mut moving: Vec<Poly> = ideal.gens.clone();
    let mut fixed_curves: Vec<MarkedCurve> = Vec::new();

    match mode {
        Mode::Local => {
            for g in &moving {
                if !g.coeff(0, 0).is_zero() {
                    return Err(Error::Precondition(
                        "local mode needs generators vanishing at the origin".into(),
                    ));
                }
            }
            // factor out the fixed curve part: gcd of the generators
            let mut g = moving[0].clone();
            for gen in &moving[1..] {
                g = gcd_bivariate(&g, gen);
            }
            if !g.is_constant() {
                for f in factor_for_curves(&g)? {
                    // only components through the origin are part of the
                    // local picture
                    if f.poly.coeff(0, 0).is_zero() {
                        fixed_curves.push(MarkedCurve {
                            poly: f.poly,
                            multiplicity: f.multiplicity,
                            certified_irreducible: f.certified_irreducible,
                        });
                    }
                }
                moving = moving
                    .iter()
                    .map(|m| m.div_exact(&g).expect("gcd divides generators"))
                    .collect();
            }
        }
        Mode::Infinity => {
            if !moving.iter().any(|g| !g.is_constant()) {
                return Err(Error::Precondition(
                    "infinity mode needs a nonconstant generator".into(),
                ));
            }
            moving.push(Poly::one());
        }
    }

    for c in &fixed_curves {
        seq.mark_curve(c.clone());
    }
    for c in extra_curves {
        seq.mark_curve(c.clone());
    }

    let mut steps_done = 0usize;
    loop {
        let mut work: Vec<BlowupStep> = Vec::new();
        for bp in base_points(&seq, &moving)? {
            work.push(match bp {
                BasePoint::Free { parent, at } => BlowupStep::Free { parent, at },
                BasePoint::Satellite { pair } => BlowupStep::Satellite { pair },
            });
        }
        if work.is_empty() {
            work = curve_steps(&seq)?;
        }
        if work.is_empty() {
            break;
        }
        work.dedup();
        if std::env::var("VALDYN_TRACE_RESOLVE").is_ok() {
            eprintln!("round with {} primes: {:?}", seq.num_primes(), work);
        }
        for step in work {
            // a step may have been invalidated by an earlier one this round
            match seq.apply_blowup(step) {
                Ok(next) => {
                    seq = next;
                    steps_done += 1;
                    if steps_done > step_cap {
                        return Err(Error::BudgetExhausted(format!(
                            "resolution exceeded {step_cap} blowups"
                        )));
                    }
                }
                Err(Error::InvalidStep(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }

    let vanishing_orders = (0..seq.num_primes())
        .map(|p| {
            moving
                .iter()
                .map(|g| ord_along_prime(&seq, p, g))
                .min()
                .expect("nonempty generators")
        })
        .collect();

    Ok(LogResolution {
        seq,
        vanishing_orders,
        fixed_curves,
        moving_gens: moving,
    })
}

/// Steps needed to push the marked curves toward resolution: blow up
/// unresolved branch points and coincident attachments.
fn curve_steps(seq: &BlowupSeq) -> Result<Vec<BlowupStep>> {
    let branches = track_curves(seq)?;
    let mut work = Vec::new();
    let mut attach_seen: Vec<(ChartId, BigRational)> = Vec::new();
    for br in &branches {
        match &br.state {
            BranchState::AtFreePoint { chart, coord } => {
                work.push(BlowupStep::Free {
                    parent: seq.chart(*chart).u_prime,
                    at: free_point_for(seq, *chart, coord),
                });
            }
            BranchState::AtSatellite { pair } => {
                work.push(BlowupStep::Satellite { pair: *pair });
            }
            BranchState::Resolved { chart, coord, .. } => {
                if attach_seen.contains(&(*chart, coord.clone())) {
                    // two branches at one point: separate them
                    work.push(BlowupStep::Free {
                        parent: seq.chart(*chart).u_prime,
                        at: free_point_for(seq, *chart, coord),
                    });
                } else {
                    attach_seen.push((*chart, coord.clone()));
                }
            }
        }
    }
    work.dedup();
    Ok(work)
}

/// Blows up until every marked curve branch attaches transversally at its
/// own free point, leaving the rest of the sequence untouched.
pub fn resolve_marked_curves(seq: &BlowupSeq, step_cap: usize) -> Result<BlowupSeq> {
    let mut seq = seq.clone();
    let mut done = 0usize;
    loop {
        let work = curve_steps(&seq)?;
        if work.is_empty() {
            return Ok(seq);
        }
        for step in work {
            match seq.apply_blowup(step) {
                Ok(next) => {
                    seq = next;
                    done += 1;
                    if done > step_cap {
                        return Err(Error::BudgetExhausted(format!(
                            "curve resolution exceeded {step_cap} blowups"
                        )));
                    }
                }
                Err(Error::InvalidStep(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
}

fn free_point_for(seq: &BlowupSeq, chart: ChartId, coord: &BigRational) -> FreePoint {
    let ch = seq.chart(chart);
    if seq.prime(ch.u_prime).alt_chart == Some(chart) {
        FreePoint::RootAlt
    } else {
        FreePoint::Coord(coord.clone())
    }
}
