//! Edge return maps and the fixed-point search for `r_π ∘ f_•` on a dual
//! graph: exact piecewise data on every edge, vertex checks, and
//! attracting-end detection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::blowup::{BlowupSeq, DualGraph, GraphPoint, Mode, PrimeId};
use crate::error::{Error, Result};
use crate::numbers::{
    solve_fixed, AffineForm, ExtValue, FixedPoints, Interval, PAFunction, Scalar,
};
use crate::poly::Poly;
use crate::valuation::Valuation;

use super::{step_retracted_status, MapGerm};

/// Which edge of the graph a return map describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRef {
    /// The edge between two intersecting primes, parametrized by the
    /// weight `s` on the second prime's equation: `s ∈ [0, 1/b_v]`.
    Pair { u: PrimeId, v: PrimeId },
    /// The edge from a curve end's attachment vertex toward the end,
    /// parametrized by the weight `s ∈ [0, ∞)` on the curvette coordinate.
    Curve { end: usize },
}

/// One refined piece of an edge return map.
#[derive(Debug, Clone)]
pub struct ReturnPiece {
    pub interval: Interval,
    /// Whether the retracted image stays on the same edge over this piece.
    pub on_edge: bool,
    /// When on the edge: the image parameter `s' = num/den`.
    pub num: AffineForm,
    pub den: AffineForm,
}

/// Exact return data for one edge: the cocycle and the per-piece image.
#[derive(Debug, Clone)]
pub struct EdgeReturn {
    pub edge: EdgeRef,
    pub interval: Interval,
    pub cocycle: PAFunction,
    pub pieces: Vec<ReturnPiece>,
}

/// The valuation at parameter `s` of an edge.
pub fn edge_valuation(
    seq: &std::sync::Arc<BlowupSeq>,
    graph: &DualGraph,
    edge: &EdgeRef,
    s: &Scalar,
) -> Result<Valuation> {
    match edge {
        EdgeRef::Pair { u, v } => {
            let pair = seq
                .pair_between(*u, *v)
                .ok_or_else(|| Error::Precondition("edge without live pair".into()))?;
            let bu = Scalar::from_big(BigRational::from_integer(seq.prime(pair.u).b.clone()));
            let bv = Scalar::from_big(BigRational::from_integer(seq.prime(pair.v).b.clone()));
            let wu = &(&Scalar::one() - &(&bv * s)) / &bu;
            Valuation::monomial(seq.clone(), pair.chart, BigRational::zero(), wu, s.clone())
        }
        EdgeRef::Curve { end } => {
            let e = &graph.curve_ends[*end];
            let b = Scalar::from_big(BigRational::from_integer(seq.prime(e.attach).b.clone()));
            Valuation::monomial(
                seq.clone(),
                e.chart,
                e.coord.clone(),
                Scalar::one() / b,
                s.clone(),
            )
        }
    }
}

/// The parameter interval of an edge.
fn edge_interval(seq: &BlowupSeq, edge: &EdgeRef) -> Interval {
    match edge {
        EdgeRef::Pair { u, v } => {
            let pair = seq.pair_between(*u, *v).expect("live pair");
            let bv = seq.prime(pair.v).b.clone();
            Interval::closed(
                Scalar::zero(),
                Scalar::from_big(BigRational::new(BigInt::one(), bv)),
            )
        }
        EdgeRef::Curve { .. } => Interval::new(
            ExtValue::Finite(Scalar::zero()),
            ExtValue::PlusInf,
        ),
    }
}

/// The value of `v_s(φ)` as a piecewise-affine function of the edge
/// parameter.
fn param_value(
    seq: &BlowupSeq,
    edge: &EdgeRef,
    interval: &Interval,
    phi: &Poly,
) -> Result<PAFunction> {
    let (chart, center, w_u, w_v) = edge_forms(seq, edge)?;
    let r = crate::valuation::pullback_shifted(seq, chart, &center, phi);
    r.weighted_min_param(&w_u, &w_v, interval)
}

/// Chart, recentre coordinate and weight forms `(wu(s), wv(s))` of an edge.
fn edge_forms(
    seq: &BlowupSeq,
    edge: &EdgeRef,
) -> Result<(crate::blowup::ChartId, BigRational, AffineForm, AffineForm)> {
    match edge {
        EdgeRef::Pair { u, v } => {
            let pair = seq
                .pair_between(*u, *v)
                .ok_or_else(|| Error::Precondition("edge without live pair".into()))?;
            let bu = Scalar::from_big(BigRational::from_integer(seq.prime(pair.u).b.clone()));
            let bv = Scalar::from_big(BigRational::from_integer(seq.prime(pair.v).b.clone()));
            // wu(s) = (1 − b_v s)/b_u, wv(s) = s
            let w_u = AffineForm::new(Scalar::one() / &bu, -(&bv / &bu));
            let w_v = AffineForm::new(Scalar::zero(), Scalar::one());
            Ok((pair.chart, BigRational::zero(), w_u, w_v))
        }
        EdgeRef::Curve { end } => {
            let graph_ends = seq_curve_end(seq, *end)?;
            let (chart, coord, attach) = graph_ends;
            let b = Scalar::from_big(BigRational::from_integer(seq.prime(attach).b.clone()));
            let w_u = AffineForm::constant(Scalar::one() / &b);
            let w_v = AffineForm::new(Scalar::zero(), Scalar::one());
            Ok((chart, coord, w_u, w_v))
        }
    }
}

/// Attachment data of a curve end straight from the sequence (avoiding a
/// circular need for the graph).
fn seq_curve_end(
    seq: &BlowupSeq,
    end: usize,
) -> Result<(crate::blowup::ChartId, BigRational, PrimeId)> {
    let graph = crate::blowup::dual_graph(seq)?;
    let e = graph
        .curve_ends
        .get(end)
        .ok_or_else(|| Error::Precondition("no such curve end".into()))?;
    Ok((e.chart, e.coord.clone(), e.attach))
}

/// The multiplier `c(f, v_s)` (resp. `d(f, v_s)`) as a piecewise-affine
/// function on an edge.
pub fn cocycle_on_edge(
    germ: &MapGerm,
    seq: &BlowupSeq,
    edge: &EdgeRef,
    interval: &Interval,
) -> Result<PAFunction> {
    let e1 = param_value(seq, edge, interval, &germ.map.f1)?;
    let e2 = param_value(seq, edge, interval, &germ.map.f2)?;
    let m = e1.min_with(&e2);
    Ok(match germ.mode {
        Mode::Local => m,
        Mode::Infinity => {
            let zero = PAFunction::constant(interval.clone(), Scalar::zero());
            let m = m.min_with(&zero);
            // d = −min(v(f1), v(f2), 0)
            zero.sub(&m)
        }
    })
}

/// Exact return map on an edge: partitions the parameter range into pieces
/// on which the retracted image either stays on the edge (as a ratio of
/// affine forms) or leaves it.
pub fn edge_return_map(
    germ: &MapGerm,
    seq: &BlowupSeq,
    graph: &DualGraph,
    edge: EdgeRef,
) -> Result<EdgeReturn> {
    let interval = edge_interval(seq, &edge);
    let cocycle = cocycle_on_edge(germ, seq, &edge, &interval)?;
    // image values on the edge's own coordinate functions
    let pieces = match &edge {
        EdgeRef::Pair { u, v } => {
            let pair = seq.pair_between(*u, *v).expect("live pair");
            let (inv_u, inv_v) = seq.inv(pair.chart);
            let a = ratfn_param_value(germ, seq, &edge, &interval, &inv_u)?;
            let b = ratfn_param_value(germ, seq, &edge, &interval, &inv_v)?;
            let bu = Scalar::from_big(BigRational::from_integer(seq.prime(pair.u).b.clone()));
            let bv = Scalar::from_big(BigRational::from_integer(seq.prime(pair.v).b.clone()));
            // normalized image position s' = B/(b_u·A + b_v·B); on-edge
            // requires A > 0 and B > 0
            let den = a
                .zip_with(&b, |fa, fb| fa.scale(&bu).add(&fb.scale(&bv)));
            pieces_from(&a, &b, &b.clone(), &den, &interval, OnEdge::BothPositive)?
        }
        EdgeRef::Curve { end } => {
            let e = &graph.curve_ends[*end];
            let h = &seq.curves[e.curve].poly;
            // image position s' = (v_s(h∘f) − M·σ·c(s))/c(s); on-edge
            // requires the image weight on the prime equation to equal σ·c
            let hf = germ.map.pullback(h);
            let hval = param_value(seq, &edge, &interval, &hf)?;
            let m_ord = {
                let (z1, z2) = seq.fwd(e.chart);
                let r = h.substitute2(&z1, &z2);
                BigInt::from(r.num.min_exponents().0) - BigInt::from(r.den.0)
            };
            let b = Scalar::from_big(BigRational::from_integer(seq.prime(e.attach).b.clone()));
            let sigma = Scalar::one() / &b;
            let msigma = &Scalar::from_big(BigRational::from_integer(m_ord)) * &sigma;
            let num = hval.zip_with(&cocycle, |fh, fc| fh.sub(&fc.scale(&msigma)));
            // u-equation value of the image
            let u_eq = chart_u_equation(seq, e.chart);
            let uval = ratfn_param_value(germ, seq, &edge, &interval, &u_eq)?;
            let target = cocycle.zip_with(&cocycle, |fc, _| fc.scale(&sigma));
            let diff = uval.sub(&target);
            pieces_from(&diff, &num, &num.clone(), &cocycle, &interval, OnEdge::FirstZero)?
        }
    };
    Ok(EdgeReturn {
        edge,
        interval,
        cocycle,
        pieces,
    })
}

/// The local equation of a chart's host prime, as a factored function.
fn chart_u_equation(seq: &BlowupSeq, chart: crate::blowup::ChartId) -> crate::blowup::RatFn {
    seq.inv(chart).0
}

/// Value of `f(v_s)` on a factored rational function, piecewise in `s`.
fn ratfn_param_value(
    germ: &MapGerm,
    seq: &BlowupSeq,
    edge: &EdgeRef,
    interval: &Interval,
    f: &crate::blowup::RatFn,
) -> Result<PAFunction> {
    let mut acc = PAFunction::constant(interval.clone(), Scalar::zero());
    for (p, e) in &f.num {
        let val = param_value(seq, edge, interval, &germ.map.pullback(p))?;
        for _ in 0..*e {
            acc = acc.zip_with(&val, |a, b| a.add(b));
        }
    }
    for (p, e) in &f.den {
        let val = param_value(seq, edge, interval, &germ.map.pullback(p))?;
        for _ in 0..*e {
            acc = acc.zip_with(&val, |a, b| a.sub(b));
        }
    }
    Ok(acc)
}

enum OnEdge {
    /// On-edge iff both guard functions are positive.
    BothPositive,
    /// On-edge iff the first guard vanishes identically on the piece (and
    /// the second, the position numerator, is positive).
    FirstZero,
}

/// Refines the parameter range by every breakpoint of the inputs and
/// classifies each piece.
fn pieces_from(
    guard1: &PAFunction,
    guard2: &PAFunction,
    num: &PAFunction,
    den: &PAFunction,
    interval: &Interval,
    kind: OnEdge,
) -> Result<Vec<ReturnPiece>> {
    let mut bps: Vec<Scalar> = vec![];
    for f in [guard1, guard2, num, den] {
        bps.extend(f.breakpoints.iter().cloned());
        // sign changes of the guards happen at their roots
        for (i, piece) in f.pieces.iter().enumerate() {
            if !piece.b.is_zero() {
                let root = &(-piece.a.clone()) / &piece.b;
                if f.piece_interval(i).contains(&root) && interval.contains(&root) {
                    bps.push(root);
                }
            }
        }
    }
    bps.sort();
    bps.dedup();
    bps.retain(|t| {
        interval.contains(t)
            && ExtValue::Finite(t.clone()) > interval.lo
            && ExtValue::Finite(t.clone()) < interval.hi
    });
    let mut out = Vec::new();
    let mut lo = interval.lo.clone();
    let mut cuts = bps.into_iter().peekable();
    loop {
        let hi = match cuts.peek() {
            Some(t) => ExtValue::Finite(t.clone()),
            None => interval.hi.clone(),
        };
        let piece_iv = Interval::new(lo.clone(), hi.clone());
        let probe = sample(&piece_iv);
        let on_edge = match kind {
            OnEdge::BothPositive => {
                guard1.eval(&probe).is_positive() && guard2.eval(&probe).is_positive()
            }
            OnEdge::FirstZero => {
                guard1.eval(&probe).is_zero() && guard2.eval(&probe).is_positive()
            }
        };
        out.push(ReturnPiece {
            interval: piece_iv,
            on_edge,
            num: num.piece_at(&probe).clone(),
            den: den.piece_at(&probe).clone(),
        });
        match cuts.next() {
            Some(t) => lo = ExtValue::Finite(t),
            None => break,
        }
    }
    Ok(out)
}

fn sample(iv: &Interval) -> Scalar {
    match (&iv.lo, &iv.hi) {
        (ExtValue::Finite(a), ExtValue::Finite(b)) => &(a + b) / &Scalar::from_int(2),
        (ExtValue::Finite(a), ExtValue::PlusInf) => a + &Scalar::one(),
        (ExtValue::MinusInf, ExtValue::Finite(b)) => b - &Scalar::one(),
        _ => Scalar::zero(),
    }
}

/// A fixed point of the retracted action, or an attracting end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPoint {
    /// A graph point with `r_π f_• p = p`.
    At(GraphPoint),
    /// A curve end toward which the edge flow escapes, with the end fixed
    /// by the action (the curve is invariant).
    AttractingEnd(usize),
}

/// Finds the retraction-fixed locus of `r_π ∘ f_•` and returns the point
/// of it closest to the root (largest skewness; deterministic tiebreak).
pub fn find_fixed_point(
    germ: &MapGerm,
    seq: &std::sync::Arc<BlowupSeq>,
    graph: &DualGraph,
) -> Result<FixedPoint> {
    let mut candidates: Vec<FixedPoint> = Vec::new();
    // vertices
    for v in &graph.vertices {
        let val = Valuation::divisorial(seq.clone(), v.prime);
        let gp = match step_retracted_status(germ, &val, seq, graph) {
            Ok((gp, _)) => gp,
            Err(_) => continue, // undefined (e.g. image escapes); not fixed
        };
        if gp == GraphPoint::Vertex(v.prime) {
            candidates.push(FixedPoint::At(gp));
        }
    }
    // pair edges
    for e in &graph.edges {
        let edge = EdgeRef::Pair { u: e.a, v: e.b };
        let ret = edge_return_map(germ, seq, graph, edge)?;
        collect_edge_fixed(seq, graph, &ret, &mut candidates)?;
    }
    // curve edges
    for (k, _) in graph.curve_ends.iter().enumerate() {
        let edge = EdgeRef::Curve { end: k };
        let ret = edge_return_map(germ, seq, graph, edge)?;
        collect_edge_fixed(seq, graph, &ret, &mut candidates)?;
        // escape along the tail: the end attracts iff the curve is invariant
        if let Some(tail) = ret.pieces.last() {
            if tail.on_edge && escapes_on_tail(tail) {
                let e = &graph.curve_ends[k];
                let h = &seq.curves[e.curve].poly;
                let hf = germ.map.pullback(h);
                let invariant = hf.div_exact(h).is_some();
                if invariant {
                    candidates.push(FixedPoint::AttractingEnd(k));
                }
            }
        }
    }
    // choose the candidate closest to the root: maximal skewness, with a
    // deterministic tiebreak on the discovery order above
    let mut best: Option<(ExtValue, usize, FixedPoint)> = None;
    for (i, c) in candidates.into_iter().enumerate() {
        let alpha = match &c {
            FixedPoint::At(gp) => graph.alpha_at(gp),
            FixedPoint::AttractingEnd(_) => ExtValue::MinusInf,
        };
        let better = match &best {
            None => true,
            Some((a, _, _)) => alpha > *a,
        };
        if better {
            best = Some((alpha, i, c));
        }
    }
    best.map(|(_, _, c)| c)
        .ok_or_else(|| Error::Precondition("no fixed point found; graph too coarse".into()))
}

fn collect_edge_fixed(
    seq: &std::sync::Arc<BlowupSeq>,
    graph: &DualGraph,
    ret: &EdgeReturn,
    out: &mut Vec<FixedPoint>,
) -> Result<()> {
    for piece in &ret.pieces {
        if !piece.on_edge {
            continue;
        }
        match solve_fixed(&piece.num, &piece.den, &piece.interval)? {
            FixedPoints::WholePiece => {
                // a whole fixed segment: report its root-closest point,
                // the piece's lower end
                if let ExtValue::Finite(s) = &piece.interval.lo {
                    out.push(FixedPoint::At(point_at(seq, graph, &ret.edge, s)));
                }
            }
            FixedPoints::Points(roots) => {
                for s in roots {
                    // endpoints are covered by the vertex pass
                    if ExtValue::Finite(s.clone()) > piece.interval.lo
                        || *piece.interval.lo.expect_finite("edge lo") != Scalar::zero()
                    {
                        out.push(FixedPoint::At(point_at(seq, graph, &ret.edge, &s)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The graph point at parameter `s` of an edge.
pub fn point_at(
    seq: &BlowupSeq,
    graph: &DualGraph,
    edge: &EdgeRef,
    s: &Scalar,
) -> GraphPoint {
    match edge {
        EdgeRef::Pair { u, v } => {
            let pair = seq.pair_between(*u, *v).expect("live pair");
            let bu = Scalar::from_big(BigRational::from_integer(seq.prime(pair.u).b.clone()));
            let bv = Scalar::from_big(BigRational::from_integer(seq.prime(pair.v).b.clone()));
            let wu = &(&Scalar::one() - &(&bv * s)) / &bu;
            graph.normalize_point(GraphPoint::Edge {
                a: pair.u,
                b: pair.v,
                wa: wu,
                wb: s.clone(),
            })
        }
        EdgeRef::Curve { end } => graph.normalize_point(GraphPoint::CurveInterior {
            end: *end,
            s: s.clone(),
        }),
    }
}

/// Whether the return map escapes toward the end on an unbounded tail
/// piece: `s' > s` for all large `s`.
fn escapes_on_tail(piece: &ReturnPiece) -> bool {
    // s' = (na + nb·s)/(da + db·s); compare with s as s → ∞
    let (na, nb) = (&piece.num.a, &piece.num.b);
    let (da, db) = (&piece.den.a, &piece.den.b);
    if !db.is_zero() {
        // s' tends to nb/db: bounded, cannot escape
        return false;
    }
    // denominator constant da: s' − s = (na + (nb − da) s)/da
    let slope = &(nb - da) / da;
    match slope.signum() {
        1 => true,
        -1 => false,
        _ => (&*na / da).is_positive(),
    }
}
