//! Retraction of a semivaluation onto the dual graph of a blowup sequence:
//! a walk down the tree of infinitely-near points, evaluating the
//! valuation on inverse-chart coordinate functions and descending through
//! blown-up centers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::blowup::{BlowupSeq, BlowupStep, ChartId, DualGraph, FreePoint, GraphPoint, PrimeId, RatFn};
use crate::error::{Error, Result};
use crate::numbers::{ExtValue, Scalar};
use crate::poly::Poly;

use super::{pullback_shifted, ValKind, Valuation};

/// Exact evaluation interface used by the retraction walk. Implemented by
/// valuations themselves and by pushforwards along polynomial maps.
pub trait Evaluator {
    /// Value on a polynomial in the affine coordinates.
    fn value(&self, phi: &Poly) -> ExtValue;

    /// Residue: the rational `c` with `value(num − c·den) > value(num)`,
    /// when `value(num) = value(den)` is finite. `None` when the center is
    /// the generic point (no such `c` exists over the rationals or at all).
    fn residue(&self, num: &Poly, den: &Poly) -> Result<Option<BigRational>>;

    /// Value on a factored rational function.
    fn value_ratfn(&self, f: &RatFn) -> ExtValue {
        let mut acc = ExtValue::zero();
        for (p, e) in &f.num {
            let v = self.value(p);
            for _ in 0..*e {
                acc = &acc + &v;
            }
        }
        for (p, e) in &f.den {
            let v = -self.value(p);
            for _ in 0..*e {
                acc = &acc + &v;
            }
        }
        acc
    }
}

impl Evaluator for Valuation {
    fn value(&self, phi: &Poly) -> ExtValue {
        self.eval(phi)
    }

    fn residue(&self, num: &Poly, den: &Poly) -> Result<Option<BigRational>> {
        match &self.kind {
            ValKind::Quasimonomial {
                chart,
                center,
                wu,
                wv,
            } => {
                let rn = pullback_shifted(&self.seq, *chart, center, num);
                let rd = pullback_shifted(&self.seq, *chart, center, den);
                // initial forms of numerator polys, with the monomial
                // denominators moved across
                let w = (wu.clone(), wv.clone());
                let in_n = rn.num.initial_form(&w).mul_monomial(rd.den.0, rd.den.1);
                let in_d = rd.num.initial_form(&w).mul_monomial(rn.den.0, rn.den.1);
                // candidate: match any common monomial's coefficients
                let Some((&key, dc)) = in_d.terms().next() else {
                    return Ok(None);
                };
                let nc = in_n.coeff(key.0, key.1);
                if nc.is_zero() {
                    return Ok(None);
                }
                let c = nc / dc.clone();
                if in_n == in_d.scale(&c) {
                    Ok(Some(c))
                } else {
                    Ok(None)
                }
            }
            ValKind::CurveEnd {
                chart,
                coord,
                ..
            } => curve_end_residue(&self.seq, *chart, coord, num, den),
        }
    }
}

/// Residue of `num/den` along a curve branch: the value of the function at
/// the moving attachment point, refining the branch until both strict
/// transforms miss it.
pub(super) fn curve_end_residue(
    seq: &BlowupSeq,
    chart: ChartId,
    coord: &BigRational,
    num: &Poly,
    den: &Poly,
) -> Result<Option<BigRational>> {
    let mut seq = seq.clone();
    let mut chart = chart;
    let mut coord = coord.clone();
    let h = seq
        .curves
        .iter()
        .find_map(|c| {
            let s = crate::blowup::strict_in_chart(&seq, chart, &c.poly);
            let r = s.restrict_axis2();
            let at = crate::poly::rational_roots(&r).ok()?;
            if at.roots.iter().any(|(x, _)| *x == coord) {
                Some(c.poly.clone())
            } else {
                None
            }
        })
        .ok_or_else(|| Error::Precondition("curve end without a tracked curve".into()))?;
    for _ in 0..crate::blowup::DEFAULT_STEP_CAP {
        let rn = pullback_shifted(&seq, chart, &coord, num);
        let rd = pullback_shifted(&seq, chart, &coord, den);
        // value of the fraction at the attachment: leading coefficients of
        // the restrictions to the curvette axis, when both separate
        let sep = |r: &crate::poly::RatMonom| -> Option<(i64, BigRational)> {
            let m = r.num.min_exponents().0;
            let restr = r.num.restrict_axis1();
            let e = restr.iter().position(|c| !c.is_zero())?;
            if e as u64 == m {
                Some((m as i64 - r.den.0 as i64, restr[e].clone()))
            } else {
                None
            }
        };
        if let (Some((on, cn)), Some((od, cd))) = (sep(&rn), sep(&rd)) {
            // value(num/den) = σ(on − od); residue exists only at value 0
            return Ok(if on == od { Some(cn / cd) } else { None });
        }
        let step = advance_branch(&seq, &h, chart, &coord)?;
        seq = step.0;
        chart = step.1;
        coord = step.2;
    }
    Err(Error::BudgetExhausted("curve residue refinement".into()))
}

/// Blows up the current attachment point of a branch and returns the new
/// sequence with the branch's next attachment.
pub(crate) fn advance_branch(
    seq: &BlowupSeq,
    h: &Poly,
    chart: ChartId,
    coord: &BigRational,
) -> Result<(BlowupSeq, ChartId, BigRational)> {
    let parent = seq.chart(chart).u_prime;
    let at = if seq.prime(parent).alt_chart == Some(chart) {
        crate::blowup::FreePoint::RootAlt
    } else {
        crate::blowup::FreePoint::Coord(coord.clone())
    };
    let next = seq.apply_blowup(crate::blowup::BlowupStep::Free { parent, at })?;
    let new_prime = next.num_primes() - 1;
    let new_chart = next.prime(new_prime).chart;
    let strict = crate::blowup::strict_in_chart(&next, new_chart, h);
    let roots = crate::poly::rational_roots(&strict.restrict_axis2())?;
    if roots.residual_degree > 0 {
        return Err(Error::IrrationalBasePoint(format!(
            "branch of {h} leaves the rational numbers"
        )));
    }
    let coord = roots
        .roots
        .iter()
        .find(|(c, _)| !next.is_blown(new_chart, c))
        .map(|(c, _)| c.clone())
        .ok_or_else(|| Error::Precondition("branch lost during refinement".into()))?;
    Ok((next, new_chart, coord))
}

/// Locates the retraction of a valuation on the dual graph of `seq`.
pub fn locate(seq: &BlowupSeq, graph: &DualGraph, v: &Valuation) -> Result<GraphPoint> {
    locate_eval(seq, graph, v)
}

/// Retraction of anything that evaluates exactly (valuations, pushforwards).
pub fn locate_eval(
    seq: &BlowupSeq,
    graph: &DualGraph,
    v: &impl Evaluator,
) -> Result<GraphPoint> {
    Ok(locate_status(seq, graph, v)?.0)
}

/// Retraction plus exactness: the second component is `None` when the
/// returned point IS the valuation, and otherwise a blowup step that
/// brings the graph closer to containing it.
pub fn locate_status(
    seq: &BlowupSeq,
    graph: &DualGraph,
    v: &impl Evaluator,
) -> Result<(GraphPoint, Option<BlowupStep>)> {
    let mut chart_id = seq.prime(0).chart;
    loop {
        let chart = seq.chart(chart_id);
        let host = chart.u_prime;
        let (_, inv_v) = seq.inv(chart_id);
        let tv = v.value_ratfn(&inv_v);
        let center_coord: BigRational = match tv.signum() {
            1 => BigRational::zero(),
            0 => {
                let (num, den) = (expand_num(&inv_v), expand_den(&inv_v));
                match v.residue(&num, &den)? {
                    Some(c) => c,
                    // generic center: the valuation IS the vertex
                    None => return Ok((GraphPoint::Vertex(host), None)),
                }
            }
            _ => {
                // center is at the one point this chart misses: for the
                // root switch to the alternate chart, otherwise move to the
                // sibling pair chart whose origin is that point
                if let Some(alt) = seq.prime(host).alt_chart {
                    if alt != chart_id {
                        chart_id = alt;
                        continue;
                    }
                }
                let pair_chart = sibling_pair_chart(seq, chart_id).ok_or_else(|| {
                    Error::Precondition(format!(
                        "no sibling pair chart for E{host}; walk inconsistent"
                    ))
                })?;
                if seq.is_blown(pair_chart, &BigRational::zero()) {
                    chart_id = child_main_chart(seq, pair_chart, &BigRational::zero())
                        .ok_or_else(|| {
                            Error::Precondition("blown point without child chart".into())
                        })?;
                    continue;
                }
                let pair = seq
                    .pairs
                    .iter()
                    .find(|p| p.chart == pair_chart)
                    .ok_or_else(|| {
                        Error::Precondition("pair chart without live pair".into())
                    })?;
                return edge_position(seq, graph, v, pair.u, pair.v);
            }
        };
        if seq.is_blown(chart_id, &center_coord) {
            chart_id = child_main_chart(seq, chart_id, &center_coord).ok_or_else(|| {
                Error::Precondition("blown point without child chart".into())
            })?;
            continue;
        }
        if let Some(other) = chart.crossing_at(&center_coord) {
            return edge_position(seq, graph, v, host, other);
        }
        // free point not blown up: curve-end edges may extend the graph here
        if let Some((end_idx, end)) = graph
            .curve_ends
            .iter()
            .enumerate()
            .find(|(_, e)| e.chart == chart_id && e.coord == center_coord)
        {
            let h = &seq.curves[end.curve].poly;
            let vh = v.value(h);
            let (z1f, _) = seq.fwd(chart_id);
            let _ = z1f;
            let m = h_pullback_u_order(seq, chart_id, h);
            let b = seq.prime(host).b.clone();
            let sigma = Scalar::from_big(BigRational::new(BigInt::from(1), b));
            let s = match vh {
                // the end itself: ends are maximal, so this is exact
                ExtValue::PlusInf => return Ok((GraphPoint::CurveEnd(end_idx), None)),
                ExtValue::MinusInf => {
                    return Err(Error::Precondition(
                        "curve equation with value −∞ during locate".into(),
                    ))
                }
                ExtValue::Finite(val) => {
                    &val - &(&Scalar::from_big(BigRational::from_integer(m)) * &sigma)
                }
            };
            // an irrational position determines the valuation; a rational
            // one may sit below a deeper valuation, so refine the branch
            let refine = if s.is_rational() {
                Some(BlowupStep::Free {
                    parent: host,
                    at: free_point_at(seq, chart_id, &center_coord),
                })
            } else {
                None
            };
            return Ok((
                graph.normalize_point(GraphPoint::CurveInterior { end: end_idx, s }),
                refine,
            ));
        }
        // a free point not on the graph: the valuation sits strictly
        // beyond the vertex; blowing the point up refines toward it
        return Ok((
            GraphPoint::Vertex(host),
            Some(BlowupStep::Free {
                parent: host,
                at: free_point_at(seq, chart_id, &center_coord),
            }),
        ));
    }
}

fn free_point_at(seq: &BlowupSeq, chart: ChartId, coord: &BigRational) -> FreePoint {
    let host = seq.chart(chart).u_prime;
    if seq.prime(host).alt_chart == Some(chart) {
        FreePoint::RootAlt
    } else {
        FreePoint::Coord(coord.clone())
    }
}

fn expand_num(f: &RatFn) -> Poly {
    f.num_expanded()
}

fn expand_den(f: &RatFn) -> Poly {
    f.den_expanded()
}

/// `ord_u` of the pullback of a polynomial in a chart (numerator order
/// minus the monomial-denominator exponent).
fn h_pullback_u_order(seq: &BlowupSeq, chart: ChartId, h: &Poly) -> BigInt {
    let (z1, z2) = seq.fwd(chart);
    let r = h.substitute2(&z1, &z2);
    BigInt::from(r.num.min_exponents().0) - BigInt::from(r.den.0)
}

/// Position on the edge between two intersecting primes: the monomial
/// weights are the values on the pair chart's coordinate functions.
fn edge_position(
    seq: &BlowupSeq,
    graph: &DualGraph,
    v: &impl Evaluator,
    a: PrimeId,
    b: PrimeId,
) -> Result<(GraphPoint, Option<BlowupStep>)> {
    let pair = seq
        .pair_between(a, b)
        .ok_or_else(|| Error::Precondition(format!("primes E{a},E{b} no longer intersect")))?;
    let (inv_u, inv_v) = seq.inv(pair.chart);
    let wu = v
        .value_ratfn(&inv_u)
        .finite()
        .ok_or_else(|| Error::Precondition("infinite weight at satellite point".into()))?
        .clone();
    let wv = v
        .value_ratfn(&inv_v)
        .finite()
        .ok_or_else(|| Error::Precondition("infinite weight at satellite point".into()))?
        .clone();
    let point = graph.normalize_point(GraphPoint::Edge {
        a: pair.u,
        b: pair.v,
        wa: wu.clone(),
        wb: wv.clone(),
    });
    // a vertex hit or an irrational interior position is exact; a rational
    // interior position may sit below the valuation, so subdividing the
    // edge makes progress either way
    let refine = match &point {
        GraphPoint::Vertex(_) => None,
        _ if !wu.is_rational() || !wv.is_rational() => None,
        _ => Some(BlowupStep::Satellite {
            pair: (pair.u, pair.v),
        }),
    };
    Ok((point, refine))
}

/// The pair chart created by the same blowup as the given main chart: it
/// covers the one point of the new prime the main chart misses.
fn sibling_pair_chart(seq: &BlowupSeq, chart: ChartId) -> Option<ChartId> {
    let c = seq.chart(chart);
    let parent = c.parent?;
    let want = match &c.subst {
        crate::blowup::Subst::FreeMain(x) => crate::blowup::Subst::FreePair(x.clone()),
        crate::blowup::Subst::SatMain => crate::blowup::Subst::SatPair,
        _ => return None,
    };
    seq.charts
        .iter()
        .find(|d| d.parent == Some(parent) && d.subst == want && d.u_prime == c.u_prime)
        .map(|d| d.id)
}

/// After blowing up `(chart, coord)`, the main chart of the new prime.
fn child_main_chart(seq: &BlowupSeq, chart: ChartId, coord: &BigRational) -> Option<ChartId> {
    seq.charts.iter().find_map(|c| {
        if c.parent != Some(chart) {
            return None;
        }
        match &c.subst {
            crate::blowup::Subst::FreeMain(x) if x == coord => Some(c.id),
            crate::blowup::Subst::SatMain if coord.is_zero() => Some(c.id),
            _ => None,
        }
    })
}
