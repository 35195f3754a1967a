//! The induced action of a polynomial map on valuation space: attraction
//! cocycles, edge return maps, fixed-point search on dual graphs, and the
//! drivers computing the local attraction rate and the dynamical degree
//! with quadratic-integer certification.

mod drivers;
mod edge;

pub use drivers::{
    analyze_infinity, analyze_local, sequences, sequences_parallel, EigenData, InfinityCase,
    InfinityReport, LocalCase, LocalReport, DEFAULT_DEGREE_CAP, DEFAULT_INFINITY_ITERATES,
    DEFAULT_LOCAL_ITERATES,
};
pub use edge::{
    edge_return_map, edge_valuation, find_fixed_point, EdgeRef, EdgeReturn, FixedPoint,
    ReturnPiece,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::blowup::{BlowupSeq, DualGraph, GraphPoint, Mode};
use crate::error::{Error, Result};
use crate::numbers::{ExtValue, Scalar};
use crate::poly::{factor_for_curves, gcd_bivariate, jacobian, Poly, PolyMap};
use crate::valuation::{locate_status, Evaluator, Valuation};

/// A dominant polynomial self-map prepared for local (fixed point at the
/// origin) or at-infinity analysis.
#[derive(Debug, Clone)]
pub struct MapGerm {
    pub map: PolyMap,
    pub mode: Mode,
    /// Generators of the pulled-back reference system: `f*m₀ = (f1, f2)`
    /// locally, `f*|L|` spanned by `{1, f1, f2}` at infinity.
    pub pullback_gens: Vec<Poly>,
    /// Curves through the origin contracted to the origin: irreducible
    /// factors of gcd(f1, f2) vanishing there (local mode).
    pub contracted: Vec<Poly>,
    /// Whether the germ is finite (no contracted curves).
    pub finite: bool,
    /// Set when a contracted-curve factor resisted certification of
    /// irreducibility over ℚ.
    pub factor_limitation: bool,
}

impl MapGerm {
    pub fn local(map: PolyMap) -> Result<MapGerm> {
        if !map.is_dominant() {
            return Err(Error::Precondition("map is not dominant".into()));
        }
        if !map.fixes_origin() {
            return Err(Error::Precondition(
                "local mode needs f(0) = 0".into(),
            ));
        }
        let g = gcd_bivariate(&map.f1, &map.f2);
        let mut contracted = Vec::new();
        let mut limitation = false;
        if !g.is_constant() {
            for f in factor_for_curves(&g)? {
                if f.poly.coeff(0, 0).is_zero() {
                    if !f.certified_irreducible {
                        limitation = true;
                    }
                    contracted.push(f.poly);
                }
            }
        }
        Ok(MapGerm {
            pullback_gens: vec![map.f1.clone(), map.f2.clone()],
            finite: contracted.is_empty(),
            factor_limitation: limitation,
            contracted,
            map,
            mode: Mode::Local,
        })
    }

    pub fn infinity(map: PolyMap) -> Result<MapGerm> {
        if !map.is_dominant() {
            return Err(Error::Precondition("map is not dominant".into()));
        }
        Ok(MapGerm {
            pullback_gens: vec![map.f1.clone(), map.f2.clone(), Poly::one()],
            contracted: vec![],
            finite: true,
            factor_limitation: false,
            map,
            mode: Mode::Infinity,
        })
    }

    pub fn degree(&self) -> u64 {
        self.map.degree()
    }

    /// The Jacobian determinant.
    pub fn jacobian(&self) -> Poly {
        jacobian(&self.map)
    }
}

/// The multiplier `c(f, v) = v(f*m₀)` locally, `d(f, v) = −v(f*|L|)` at
/// infinity. `+∞` marks contracted-curve ends locally; `0` marks
/// valuations where the at-infinity action is undefined.
pub fn attraction_factor(germ: &MapGerm, v: &Valuation) -> ExtValue {
    match germ.mode {
        Mode::Local => v
            .eval(&germ.map.f1)
            .min(v.eval(&germ.map.f2)),
        Mode::Infinity => -v
            .eval(&germ.map.f1)
            .min(v.eval(&germ.map.f2))
            .min(ExtValue::zero()),
    }
}

/// The pushforward `f(v)`, normalized by the cocycle, as an exact
/// evaluator: `(f_• v)(φ) = v(φ ∘ f)/c(f, v)`.
pub struct Pushforward<'a> {
    pub germ: &'a MapGerm,
    pub v: &'a Valuation,
    scale: Scalar,
}

impl<'a> Pushforward<'a> {
    pub fn new(germ: &'a MapGerm, v: &'a Valuation) -> Result<Self> {
        let c = attraction_factor(germ, v);
        let scale = match c {
            ExtValue::Finite(s) if s.is_positive() => s,
            other => {
                return Err(Error::Precondition(format!(
                    "action undefined: multiplier {other}"
                )))
            }
        };
        Ok(Pushforward { germ, v, scale })
    }

    pub fn multiplier(&self) -> &Scalar {
        &self.scale
    }
}

impl Evaluator for Pushforward<'_> {
    fn value(&self, phi: &Poly) -> ExtValue {
        let raw = self.v.eval(&self.germ.map.pullback(phi));
        raw.scale(&self.scale.recip())
    }

    fn residue(&self, num: &Poly, den: &Poly) -> Result<Option<BigRational>> {
        self.v
            .residue(&self.germ.map.pullback(num), &self.germ.map.pullback(den))
    }
}

/// Pushforward of the generic-point valuation of a contracted curve
/// `D = {h = 0}`: `f(ord_D)(φ) = ord_D(φ ∘ f)`, the h-adic order, again
/// normalized to the mode's reference system.
pub struct ContractedPush<'a> {
    pub germ: &'a MapGerm,
    pub h: &'a Poly,
    /// Resolved attachment of the branch, for residue refinement.
    seq: &'a BlowupSeq,
    scale: BigRational,
}

impl<'a> ContractedPush<'a> {
    pub fn new(germ: &'a MapGerm, seq: &'a BlowupSeq, h: &'a Poly) -> Result<Self> {
        let o1 = h_adic_int(&germ.map.pullback(&Poly::var1()), h)?;
        let o2 = h_adic_int(&germ.map.pullback(&Poly::var2()), h)?;
        let scale = BigRational::from_integer(BigInt::from(o1.min(o2)));
        if scale.is_zero() {
            return Err(Error::Precondition(
                "curve is not contracted by the map".into(),
            ));
        }
        Ok(ContractedPush {
            germ,
            h,
            seq,
            scale,
        })
    }
}

fn h_adic_int(phi: &Poly, h: &Poly) -> Result<i64> {
    match phi.h_adic_order(h)? {
        ExtValue::Finite(s) => Ok(s
            .as_rational()
            .and_then(|r| i64::try_from(r.numer()).ok())
            .expect("h-adic order is a small integer")),
        _ => Err(Error::Precondition("zero component in map".into())),
    }
}

impl Evaluator for ContractedPush<'_> {
    fn value(&self, phi: &Poly) -> ExtValue {
        let pulled = self.germ.map.pullback(phi);
        match pulled.h_adic_order(self.h).expect("nonconstant h") {
            ExtValue::Finite(k) => ExtValue::Finite(
                &k * &Scalar::from_big(self.scale.recip()),
            ),
            inf => inf,
        }
    }

    fn residue(&self, num: &Poly, den: &Poly) -> Result<Option<BigRational>> {
        // candidate from the value of the function along the branch, then
        // verified h-adically: ord_D(n̂ − c·d̂) > 0 ⟺ h | (n̂ − c·d̂)
        let pn = self.germ.map.pullback(num);
        let pd = self.germ.map.pullback(den);
        let k = match (pn.h_adic_order(self.h)?, pd.h_adic_order(self.h)?) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => {
                if a != b {
                    return Ok(None);
                }
                a
            }
            _ => return Ok(None),
        };
        let k: u64 = k
            .as_rational()
            .and_then(|r| u64::try_from(r.numer()).ok())
            .expect("finite h-adic order");
        let mut nn = pn;
        let mut dd = pd;
        for _ in 0..k {
            nn = nn.div_exact(self.h).expect("h-adic order");
            dd = dd.div_exact(self.h).expect("h-adic order");
        }
        // the branch-limit value of nn/dd is the only possible residue
        let (chart, coord) = branch_attachment(self.seq, self.h)?;
        let cand =
            super::valuation::curve_residue_at(self.seq, chart, &coord, &nn, &dd)?;
        match cand {
            Some(c) => {
                let diff = &nn - &dd.scale(&c);
                if diff.is_zero() || diff.div_exact(self.h).is_some() {
                    Ok(Some(c))
                } else {
                    Ok(None)
                }
            }
            None => Ok(None),
        }
    }
}

/// The resolved attachment of the (unique tracked branch of the) marked
/// curve `h` in the sequence.
pub fn branch_attachment(
    seq: &BlowupSeq,
    h: &Poly,
) -> Result<(crate::blowup::ChartId, BigRational)> {
    let graph = crate::blowup::dual_graph(seq)?;
    for e in &graph.curve_ends {
        if &seq.curves[e.curve].poly == h {
            return Ok((e.chart, e.coord.clone()));
        }
    }
    Err(Error::Precondition(format!(
        "curve {h} is not marked and resolved in this sequence"
    )))
}

/// One application of `r_π ∘ f_•`: where the normalized image of `v`
/// retracts on the graph. Curve ends of contracted curves use the
/// generic-point pushforward rule.
pub fn step_retracted(
    germ: &MapGerm,
    v: &Valuation,
    seq: &BlowupSeq,
    graph: &DualGraph,
) -> Result<GraphPoint> {
    Ok(step_retracted_status(germ, v, seq, graph)?.0)
}

/// As [`step_retracted`], also reporting the refinement suggestion when the
/// image is not exactly a graph point (its center data).
pub fn step_retracted_status(
    germ: &MapGerm,
    v: &Valuation,
    seq: &BlowupSeq,
    graph: &DualGraph,
) -> Result<(GraphPoint, Option<crate::blowup::BlowupStep>)> {
    if v.is_curve_end() {
        let h = curve_of(v)?;
        if germ.contracted.contains(&h) {
            let push = ContractedPush::new(germ, seq, &h)?;
            return locate_status(seq, graph, &push);
        }
        // not contracted: the plain pushforward is defined
    }
    match Pushforward::new(germ, v) {
        Ok(push) => locate_status(seq, graph, &push),
        Err(_) => Err(Error::Precondition(
            "undefined at curve end (not a marked contracted curve)".into(),
        )),
    }
}

fn curve_of(v: &Valuation) -> Result<Poly> {
    match &v.kind {
        crate::valuation::ValKind::CurveEnd { curve, .. } => {
            Ok(v.seq.curves[*curve].poly.clone())
        }
        _ => Err(Error::Precondition("not a curve end".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{log_resolution, MarkedCurve, DEFAULT_STEP_CAP};
    use crate::poly::{parse_map, parse_poly, Ideal};
    use std::sync::Arc;

    fn golden() -> MapGerm {
        MapGerm::local(parse_map("z2; z1*z2").unwrap()).unwrap()
    }

    #[test]
    fn golden_map_is_non_finite_with_contracted_axis() {
        let g = golden();
        assert!(!g.finite);
        assert_eq!(g.contracted, vec![parse_poly("z2").unwrap()]);
    }

    #[test]
    fn attraction_factors_of_golden_map() {
        let g = golden();
        let seq = Arc::new(crate::blowup::BlowupSeq::new(Mode::Local));
        let ord0 = Valuation::root(seq);
        assert_eq!(attraction_factor(&g, &ord0), ExtValue::from_int(1));

        let ginf = MapGerm::infinity(parse_map("z2; z1*z2").unwrap()).unwrap();
        let seqi = Arc::new(crate::blowup::BlowupSeq::new(Mode::Infinity));
        let ordinf = Valuation::root(seqi);
        assert_eq!(attraction_factor(&ginf, &ordinf), ExtValue::from_int(2));
    }

    #[test]
    fn attraction_factor_at_contracted_end_is_infinite() {
        let g = golden();
        let mut seq = crate::blowup::BlowupSeq::new(Mode::Local);
        seq.mark_curve(MarkedCurve {
            poly: parse_poly("z2").unwrap(),
            multiplicity: 1,
            certified_irreducible: true,
        });
        let seq = Arc::new(seq);
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let end = &graph.curve_ends[0];
        let v = Valuation::curve_end(seq.clone(), 0, end.chart, end.coord.clone());
        assert_eq!(attraction_factor(&g, &v), ExtValue::PlusInf);
    }

    #[test]
    fn golden_step_from_root_moves_along_curve_edge() {
        // f_•(ord₀) is the monomial with values (1, 2) on (z1, z2): the
        // interior of the curve edge toward {z2 = 0}
        let g = golden();
        let res = log_resolution(
            &Ideal::new(g.pullback_gens.clone()).unwrap(),
            Mode::Local,
            &[],
            DEFAULT_STEP_CAP,
        )
        .unwrap();
        let seq = Arc::new(res.seq);
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        assert_eq!(graph.curve_ends.len(), 1);
        let ord0 = Valuation::root(seq.clone());
        let gp = step_retracted(&g, &ord0, &seq, &graph).unwrap();
        match &gp {
            GraphPoint::CurveInterior { end: 0, s } => {
                assert_eq!(*s, Scalar::one());
            }
            other => panic!("expected curve-edge point, got {other:?}"),
        }
    }

    #[test]
    fn golden_step_from_contracted_end_is_root() {
        let g = golden();
        let res = log_resolution(
            &Ideal::new(g.pullback_gens.clone()).unwrap(),
            Mode::Local,
            &[],
            DEFAULT_STEP_CAP,
        )
        .unwrap();
        let seq = Arc::new(res.seq);
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let end = &graph.curve_ends[0];
        let v = Valuation::curve_end(seq.clone(), end.curve, end.chart, end.coord.clone());
        let gp = step_retracted(&g, &v, &seq, &graph).unwrap();
        assert_eq!(gp, GraphPoint::Vertex(0));
    }

    #[test]
    fn power_map_step_is_weighted_monomial() {
        // f = (z1³, z2²): f(ord₀) has values (3, 2), normalized (3/2, 1)
        let g = MapGerm::local(parse_map("z1^3; z2^2").unwrap()).unwrap();
        let seq = Arc::new(crate::blowup::BlowupSeq::new(Mode::Local));
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let ord0 = Valuation::root(seq.clone());
        let push = Pushforward::new(&g, &ord0).unwrap();
        assert_eq!(push.multiplier(), &Scalar::from_int(2));
        assert_eq!(
            push.value(&parse_poly("z1").unwrap()),
            ExtValue::Finite(Scalar::from_frac(3, 2))
        );
        // retraction onto the bare root graph is the root vertex
        let gp = step_retracted(&g, &ord0, &seq, &graph).unwrap();
        assert_eq!(gp, GraphPoint::Vertex(0));
    }
}
