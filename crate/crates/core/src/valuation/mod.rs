//! Semivaluations on the valuative trees at the origin and at infinity:
//! representation, exact evaluation, retraction onto dual graphs,
//! comparison, parametrization and classification.

mod locate;

pub use locate::{locate, locate_eval, locate_status, Evaluator};

/// Residue of `num/den` along the resolved curve branch attached at
/// `(chart, coord)`; see the curve-end evaluator.
pub fn curve_residue_at(
    seq: &crate::blowup::BlowupSeq,
    chart: crate::blowup::ChartId,
    coord: &num_rational::BigRational,
    num: &crate::poly::Poly,
    den: &crate::poly::Poly,
) -> Result<Option<num_rational::BigRational>> {
    locate::curve_end_residue(seq, chart, coord, num, den)
}

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::blowup::{BlowupSeq, ChartId, DualGraph, GraphPoint, Mode, PrimeId};
use crate::error::{Error, Result};
use crate::numbers::{ExtValue, Scalar};
use crate::poly::{Poly, RatMonom};

/// How a valuation is normalized: value 1 on the maximal ideal at the
/// origin, or value −1 on the system of affine lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Local,
    Infinity,
}

impl Normalization {
    pub fn of_mode(mode: Mode) -> Self {
        match mode {
            Mode::Local => Normalization::Local,
            Mode::Infinity => Normalization::Infinity,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ValKind {
    /// Monomial valuation in a chart recentred at `(0, center)`: weights
    /// `(wu, wv)` on the local coordinates `(u, v − center)`.
    Quasimonomial {
        chart: ChartId,
        center: BigRational,
        wu: Scalar,
        wv: Scalar,
    },
    /// Curve semivaluation of a marked-curve branch resolved at a free
    /// point: `+∞` on multiples of the equation, intersection order
    /// against the branch otherwise.
    CurveEnd {
        curve: usize,
        chart: ChartId,
        coord: BigRational,
    },
}

/// A normalized semivaluation carrying a snapshot of the blowup sequence
/// whose chart monomializes it. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct Valuation {
    pub seq: Arc<BlowupSeq>,
    pub kind: ValKind,
    norm: Normalization,
}

impl Valuation {
    /// Monomial valuation with the given weights in a chart, recentred at
    /// `(0, center)`; weights are rescaled to the mode's normalization.
    pub fn monomial(
        seq: Arc<BlowupSeq>,
        chart: ChartId,
        center: BigRational,
        wu: Scalar,
        wv: Scalar,
    ) -> Result<Valuation> {
        let norm = Normalization::of_mode(seq.mode);
        let mut v = Valuation {
            seq,
            kind: ValKind::Quasimonomial {
                chart,
                center,
                wu,
                wv,
            },
            norm,
        };
        v.normalize()?;
        Ok(v)
    }

    /// The root vertex valuation: order of vanishing at the origin, or
    /// minus the degree at infinity.
    pub fn root(seq: Arc<BlowupSeq>) -> Valuation {
        let chart = seq.prime(0).chart;
        Valuation::monomial(
            seq,
            chart,
            BigRational::zero(),
            Scalar::one(),
            Scalar::zero(),
        )
        .expect("root valuation is normalizable")
    }

    /// The divisorial valuation of a prime, normalized.
    pub fn divisorial(seq: Arc<BlowupSeq>, prime: PrimeId) -> Valuation {
        let p = seq.prime(prime);
        let chart = p.chart;
        let b = Scalar::from_big(BigRational::from_integer(p.b.clone()));
        Valuation::monomial(
            seq,
            chart,
            BigRational::zero(),
            Scalar::one() / b,
            Scalar::zero(),
        )
        .expect("divisorial valuation is normalizable")
    }

    /// The curve semivaluation of a resolved marked-curve branch.
    pub fn curve_end(
        seq: Arc<BlowupSeq>,
        curve: usize,
        chart: ChartId,
        coord: BigRational,
    ) -> Valuation {
        let norm = Normalization::of_mode(seq.mode);
        Valuation {
            seq,
            kind: ValKind::CurveEnd {
                curve,
                chart,
                coord,
            },
            norm,
        }
    }

    /// Embeds a graph point of a sequence as the corresponding monomial
    /// (or curve) valuation.
    pub fn embed(seq: Arc<BlowupSeq>, graph: &DualGraph, gp: &GraphPoint) -> Result<Valuation> {
        match gp {
            GraphPoint::Vertex(p) => Ok(Valuation::divisorial(seq, *p)),
            GraphPoint::Edge { a, b, wa, wb } => {
                let pair = seq
                    .pair_between(*a, *b)
                    .ok_or_else(|| Error::Precondition(format!("no live pair E{a},E{b}")))?;
                // orient weights to the pair chart's (u, v) = (pair.u, pair.v)
                let (wu, wv) = if (pair.u, pair.v) == (*a, *b) {
                    (wa.clone(), wb.clone())
                } else {
                    (wb.clone(), wa.clone())
                };
                Valuation::monomial(seq.clone(), pair.chart, BigRational::zero(), wu, wv)
            }
            GraphPoint::CurveInterior { end, s } => {
                let e = &graph.curve_ends[*end];
                let b = Scalar::from_big(BigRational::from_integer(
                    seq.prime(e.attach).b.clone(),
                ));
                Valuation::monomial(
                    seq.clone(),
                    e.chart,
                    e.coord.clone(),
                    Scalar::one() / b,
                    s.clone(),
                )
            }
            GraphPoint::CurveEnd(end) => {
                let e = &graph.curve_ends[*end];
                Ok(Valuation::curve_end(
                    seq,
                    e.curve,
                    e.chart,
                    e.coord.clone(),
                ))
            }
        }
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn is_curve_end(&self) -> bool {
        matches!(self.kind, ValKind::CurveEnd { .. })
    }

    fn normalize(&mut self) -> Result<()> {
        let target = match self.norm {
            Normalization::Local => Scalar::one(),
            Normalization::Infinity => -Scalar::one(),
        };
        let current = self.norm_value()?;
        let current = current
            .finite()
            .ok_or_else(|| Error::Precondition("normalization value must be finite".into()))?
            .clone();
        if current.is_zero() || (current.is_positive() != target.is_positive()) {
            return Err(Error::Precondition(format!(
                "valuation not normalizable: value {current} on the reference system"
            )));
        }
        if current != target {
            let factor = &target / &current;
            if let ValKind::Quasimonomial { wu, wv, .. } = &mut self.kind {
                *wu = &*wu * &factor;
                *wv = &*wv * &factor;
            }
        }
        Ok(())
    }

    /// Value on the normalizing system: `m₀ = (z1, z2)` locally, the lines
    /// `{1, z1, z2}` at infinity.
    fn norm_value(&self) -> Result<ExtValue> {
        let v1 = self.eval_raw(&Poly::var1());
        let v2 = self.eval_raw(&Poly::var2());
        Ok(match self.norm {
            Normalization::Local => v1.min(v2),
            Normalization::Infinity => v1.min(v2).min(ExtValue::zero()),
        })
    }

    /// Exact value on a polynomial (normalized).
    pub fn eval(&self, phi: &Poly) -> ExtValue {
        self.eval_raw(phi)
    }

    fn eval_raw(&self, phi: &Poly) -> ExtValue {
        if phi.is_zero() {
            return ExtValue::PlusInf;
        }
        match &self.kind {
            ValKind::Quasimonomial {
                chart,
                center,
                wu,
                wv,
            } => {
                let shifted = pullback_shifted(&self.seq, *chart, center, phi);
                shifted.weighted_min(&(
                    ExtValue::Finite(wu.clone()),
                    ExtValue::Finite(wv.clone()),
                ))
            }
            ValKind::CurveEnd {
                curve,
                chart,
                coord,
            } => curve_end_value(&self.seq, *curve, *chart, coord, phi),
        }
    }

    /// Value on a rational function given as numerator and denominator.
    pub fn eval_fraction(&self, num: &Poly, den: &Poly) -> ExtValue {
        &self.eval_raw(num) + &(-self.eval_raw(den))
    }

    /// Classification: divisorial, irrational or curve.
    pub fn classify(&self) -> ValClass {
        match &self.kind {
            ValKind::CurveEnd { .. } => ValClass::Curve,
            ValKind::Quasimonomial { wu, wv, .. } => {
                match (wu.as_rational(), wv.as_rational()) {
                    (Some(a), Some(b)) => ValClass::Divisorial {
                        b: divisorial_b(a, b),
                    },
                    _ => ValClass::Irrational,
                }
            }
        }
    }

    /// Skewness, log discrepancy and multiplicity, via the exact graph
    /// position after refining the carrier sequence as needed.
    pub fn parametrize(&self) -> Result<(ExtValue, ExtValue, ExtValue)> {
        let (_, graph, gp) = refine_until_exact(self)?;
        Ok((
            graph.alpha_at(&gp),
            graph.a_at(&gp),
            graph.multiplicity_at(&gp),
        ))
    }
}

/// Refines a copy of the valuation's carrier sequence until the valuation
/// is exactly a vertex, edge point or curve point of the dual graph.
pub fn refine_until_exact(v: &Valuation) -> Result<(BlowupSeq, DualGraph, GraphPoint)> {
    refine_until_exact_eval(&v.seq, v)
}

/// As [`refine_until_exact`], for any exact evaluator (e.g. pushforwards).
pub fn refine_until_exact_eval(
    seq0: &BlowupSeq,
    v: &impl locate::Evaluator,
) -> Result<(BlowupSeq, DualGraph, GraphPoint)> {
    let mut seq = seq0.clone();
    for _ in 0..crate::blowup::DEFAULT_STEP_CAP {
        let graph = crate::blowup::dual_graph(&seq)?;
        let (pos, refine) = locate::locate_status(&seq, &graph, v)?;
        match refine {
            None => return Ok((seq, graph, pos)),
            Some(step) => {
                seq = seq.apply_blowup(step)?;
                seq = crate::blowup::resolve_marked_curves(&seq, crate::blowup::DEFAULT_STEP_CAP)?;
            }
        }
    }
    Err(Error::BudgetExhausted("graph refinement toward a valuation".into()))
}

/// Denominator-normalized generic multiplicity of the divisorial valuation
/// with rational monomial weights `(a, b)` in an SNC chart.
fn divisorial_b(a: &BigRational, b: &BigRational) -> BigInt {
    if b.is_zero() {
        return a.denom().clone() / a.numer().gcd(a.denom());
    }
    if a.is_zero() {
        return b.denom().clone() / b.numer().gcd(b.denom());
    }
    // Γ = ℤa + ℤb = (g/m)ℤ with m = lcm of denominators
    let m = a.denom().lcm(b.denom());
    let na = (a * BigRational::from_integer(m.clone())).to_integer();
    let nb = (b * BigRational::from_integer(m.clone())).to_integer();
    m / na.gcd(&nb)
}

/// Pulls a polynomial through a chart's forward maps and recentres the
/// second coordinate at `center`.
pub(crate) fn pullback_shifted(
    seq: &BlowupSeq,
    chart: ChartId,
    center: &BigRational,
    phi: &Poly,
) -> RatMonom {
    let (z1, z2) = seq.fwd(chart);
    let r = phi.substitute2(&z1, &z2);
    if center.is_zero() {
        return r;
    }
    assert!(
        r.den.1 == 0,
        "recentring a chart with the v-axis in the denominator"
    );
    RatMonom::new(r.num.shift_var2(center), r.den)
}

/// Exact curve-semivaluation value: +∞ on multiples of the equation, and
/// otherwise the stable weighted order after refining the branch until the
/// strict transform of `phi` misses the attachment point.
fn curve_end_value(
    seq: &BlowupSeq,
    curve: usize,
    chart: ChartId,
    coord: &BigRational,
    phi: &Poly,
) -> ExtValue {
    let h = &seq.curves[curve].poly;
    if phi
        .div_exact(h)
        .is_some()
    {
        return ExtValue::PlusInf;
    }
    let mut seq = seq.clone();
    let mut chart = chart;
    let mut coord = coord.clone();
    // the attachment prime's multiplicity never changes along the branch
    let b = seq.prime(seq.chart(chart).u_prime).b.clone();
    let sigma = Scalar::from_big(BigRational::new(BigInt::one(), b));
    loop {
        let r = pullback_shifted(&seq, chart, &coord, phi);
        // separation test: the strict transform misses the attachment
        // exactly when the u-order of the restriction to the curvette axis
        // equals the full u-order of the pullback numerator
        let m = r.num.min_exponents().0;
        let restr = r.num.restrict_axis1();
        let e = restr.iter().position(|c| !c.is_zero());
        if e == Some(m as usize) {
            let raw = BigInt::from(m as i64) - BigInt::from(r.den.0 as i64);
            return ExtValue::Finite(&sigma * &Scalar::from_big(BigRational::from_integer(raw)));
        }
        // φ's strict transform still passes through the attachment: push the
        // branch one blowup deeper
        let parent = seq.chart(chart).u_prime;
        let at = if seq.prime(parent).alt_chart == Some(chart) {
            crate::blowup::FreePoint::RootAlt
        } else {
            crate::blowup::FreePoint::Coord(coord.clone())
        };
        seq = seq
            .apply_blowup(crate::blowup::BlowupStep::Free { parent, at })
            .expect("attachment point is free");
        // the branch continues through the new prime's chart; find where
        let new_prime = seq.num_primes() - 1;
        let new_chart = seq.prime(new_prime).chart;
        let strict = crate::blowup::strict_in_chart(&seq, new_chart, h);
        let roots = crate::poly::rational_roots(&strict.restrict_axis2())
            .expect("resolved branch stays rational");
        let next = roots
            .roots
            .iter()
            .find(|(c, _)| !seq.is_blown(new_chart, c))
            .map(|(c, _)| c.clone())
            .expect("resolved branch meets the new prime");
        chart = new_chart;
        coord = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValClass {
    Divisorial { b: BigInt },
    Irrational,
    Curve,
}

/// Result of comparing two semivaluations in the rooted tree order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeOrder {
    Equal,
    Less,
    Greater,
    Incomparable,
}

/// Refines one sequence until both valuations sit exactly on its dual
/// graph, and returns the graph with both positions.
fn common_positions(
    v: &Valuation,
    w: &Valuation,
) -> Result<(BlowupSeq, DualGraph, GraphPoint, GraphPoint)> {
    if v.seq.mode != w.seq.mode {
        return Err(Error::Precondition("comparing across modes".into()));
    }
    let mut seq = (*v.seq).clone();
    for c in &w.seq.curves {
        seq.mark_curve(c.clone());
    }
    seq = crate::blowup::resolve_marked_curves(&seq, crate::blowup::DEFAULT_STEP_CAP)?;
    for _ in 0..crate::blowup::DEFAULT_STEP_CAP {
        let graph = crate::blowup::dual_graph(&seq)?;
        let (pos_v, refine_v) = locate::locate_status(&seq, &graph, v)?;
        if let Some(step) = refine_v {
            seq = crate::blowup::resolve_marked_curves(
                &seq.apply_blowup(step)?,
                crate::blowup::DEFAULT_STEP_CAP,
            )?;
            continue;
        }
        let (pos_w, refine_w) = locate::locate_status(&seq, &graph, w)?;
        if let Some(step) = refine_w {
            seq = crate::blowup::resolve_marked_curves(
                &seq.apply_blowup(step)?,
                crate::blowup::DEFAULT_STEP_CAP,
            )?;
            continue;
        }
        return Ok((seq, graph, pos_v, pos_w));
    }
    Err(Error::BudgetExhausted("common refinement of two valuations".into()))
}

/// Decides the tree order between two valuations of matching mode, by
/// retraction onto a common refined graph.
pub fn compare(v: &Valuation, w: &Valuation) -> Result<TreeOrder> {
    let (_, graph, pos_v, pos_w) = common_positions(v, w)?;
    let le = graph.tree_leq(&pos_v, &pos_w);
    let ge = graph.tree_leq(&pos_w, &pos_v);
    Ok(match (le, ge) {
        (true, true) => TreeOrder::Equal,
        (true, false) => TreeOrder::Less,
        (false, true) => TreeOrder::Greater,
        (false, false) => TreeOrder::Incomparable,
    })
}

/// The meet of two valuations in the tree rooted at `ord₀` / `ord∞`,
/// returned as a valuation.
pub fn wedge(v: &Valuation, w: &Valuation) -> Result<Valuation> {
    let (seq, graph, pos_v, pos_w) = common_positions(v, w)?;
    let meet = graph.tree_meet(&pos_v, &pos_w);
    Valuation::embed(std::sync::Arc::new(seq), &graph, &meet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{log_resolution, BlowupStep, FreePoint, MarkedCurve, DEFAULT_STEP_CAP};
    use crate::poly::{parse_ideal, parse_poly};

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn cusp_seq() -> Arc<BlowupSeq> {
        let ideal = parse_ideal("z2^2 - z1^3, z1^2*z2").unwrap();
        Arc::new(
            log_resolution(&ideal, Mode::Local, &[], DEFAULT_STEP_CAP)
                .unwrap()
                .seq,
        )
    }

    #[test]
    fn order_of_vanishing_at_origin() {
        let seq = Arc::new(BlowupSeq::new(Mode::Local));
        let ord0 = Valuation::root(seq);
        assert_eq!(ord0.eval(&p("z1^2 + z2^3")), ExtValue::from_int(2));
        assert_eq!(ord0.eval(&p("z1*z2")), ExtValue::from_int(2));
        assert_eq!(ord0.eval(&p("z1 + z2")), ExtValue::from_int(1));
    }

    #[test]
    fn degree_valuation_at_infinity() {
        let seq = Arc::new(BlowupSeq::new(Mode::Infinity));
        let ordinf = Valuation::root(seq);
        assert_eq!(ordinf.eval(&p("z1^2 + z2^3")), ExtValue::from_int(-3));
        assert_eq!(ordinf.eval(&p("z1 + 1")), ExtValue::from_int(-1));
        assert_eq!(ordinf.eval(&p("7")), ExtValue::from_int(0));
    }

    #[test]
    fn satellite_prime_evaluates_cusp() {
        // v_{E2} of the cusp resolution, normalized by b=2, takes the value
        // 3 = 6/2 on z2² − z1³
        let seq = cusp_seq();
        let v = Valuation::divisorial(seq, 2);
        assert_eq!(
            v.eval(&p("z2^2 - z1^3")),
            ExtValue::Finite(Scalar::from_int(3))
        );
        // and its monomial weights in affine coordinates are (1, 3/2)
        assert_eq!(v.eval(&p("z1")), ExtValue::Finite(Scalar::from_int(1)));
        assert_eq!(v.eval(&p("z2")), ExtValue::Finite(Scalar::from_frac(3, 2)));
    }

    #[test]
    fn curve_end_values() {
        // curve semivaluation of {z2=0}: +∞ on z2, 1 on z1
        let mut seq = BlowupSeq::new(Mode::Local);
        seq.mark_curve(MarkedCurve {
            poly: p("z2"),
            multiplicity: 1,
            certified_irreducible: true,
        });
        let seq = Arc::new(seq);
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        assert_eq!(graph.curve_ends.len(), 1);
        let end = &graph.curve_ends[0];
        let v = Valuation::curve_end(seq.clone(), 0, end.chart, end.coord.clone());
        assert_eq!(v.eval(&p("z2")), ExtValue::PlusInf);
        assert_eq!(v.eval(&p("z1")), ExtValue::from_int(1));
        // on z2 − z1²: not a multiple, contact order 2 with the branch
        assert_eq!(v.eval(&p("z2 - z1^2")), ExtValue::from_int(2));
        assert_eq!(v.eval(&p("z2 + z1^2")), ExtValue::from_int(2));
        assert_eq!(v.eval(&p("z2 + z1^3")), ExtValue::from_int(3));
    }

    #[test]
    fn monomial_weight_normalization() {
        // weights (2, 3) at the origin normalize to (1, 3/2)
        let seq = Arc::new(BlowupSeq::new(Mode::Local));
        let chart = seq.prime(0).chart;
        let v = Valuation::monomial(
            seq,
            chart,
            BigRational::zero(),
            Scalar::from_int(2),
            Scalar::from_int(1),
        )
        .unwrap();
        // chart A: z1 = u, z2 = uv: weights (wu, wv) give values
        // v(z1) = wu, v(z2) = wu + wv: (2,1) → (2,3) → normalized (1, 3/2)
        assert_eq!(v.eval(&p("z1")), ExtValue::Finite(Scalar::one()));
        assert_eq!(v.eval(&p("z2")), ExtValue::Finite(Scalar::from_frac(3, 2)));
    }

    #[test]
    fn classification() {
        let seq = Arc::new(BlowupSeq::new(Mode::Local));
        let chart = seq.prime(0).chart;
        // weights (1, 3/2) in affine coordinates: on chart A that is
        // wu = 1, wv = 1/2 (v(z2) = wu + wv)
        let v = Valuation::monomial(
            seq.clone(),
            chart,
            BigRational::zero(),
            Scalar::one(),
            Scalar::from_frac(1, 2),
        )
        .unwrap();
        assert_eq!(
            v.classify(),
            ValClass::Divisorial {
                b: BigInt::from(2)
            }
        );
        let sqrt2 = Scalar::quad(BigRational::zero(), BigRational::one(), 2);
        let w = Valuation::monomial(
            seq.clone(),
            chart,
            BigRational::zero(),
            Scalar::one(),
            &sqrt2 - &Scalar::one(),
        )
        .unwrap();
        assert_eq!(w.classify(), ValClass::Irrational);
        let mut seq2 = BlowupSeq::new(Mode::Local);
        seq2.mark_curve(MarkedCurve {
            poly: p("z2"),
            multiplicity: 1,
            certified_irreducible: true,
        });
        let seq2 = Arc::new(seq2);
        let g = crate::blowup::dual_graph(&seq2).unwrap();
        let v = Valuation::curve_end(seq2, 0, g.curve_ends[0].chart, g.curve_ends[0].coord.clone());
        assert_eq!(v.classify(), ValClass::Curve);
    }

    #[test]
    fn parametrize_worked_example() {
        // v_{E2}: α = −3/2, A = 5/2, m = 2; ord₀: (−1, 2, 1)
        let seq = cusp_seq();
        let v2 = Valuation::divisorial(seq.clone(), 2);
        let (alpha, a, m) = v2.parametrize().unwrap();
        assert_eq!(alpha, ExtValue::Finite(Scalar::from_frac(-3, 2)));
        assert_eq!(a, ExtValue::Finite(Scalar::from_frac(5, 2)));
        assert_eq!(m, ExtValue::from_int(2));
        let ord0 = Valuation::root(seq);
        let (alpha, a, m) = ord0.parametrize().unwrap();
        assert_eq!(alpha, ExtValue::from_int(-1));
        assert_eq!(a, ExtValue::from_int(2));
        assert_eq!(m, ExtValue::from_int(1));
    }

    #[test]
    fn local_monomial_family_alpha() {
        // monomial (1, t) has α = −t: test t = 5/4 via an edge point of the
        // cusp graph
        let seq = cusp_seq();
        let chart = seq.prime(0).chart;
        let v = Valuation::monomial(
            seq,
            chart,
            BigRational::zero(),
            Scalar::one(),
            Scalar::from_frac(1, 4),
        )
        .unwrap();
        // affine weights (1, 5/4)
        assert_eq!(v.eval(&p("z2")), ExtValue::Finite(Scalar::from_frac(5, 4)));
        let (alpha, _, _) = v.parametrize().unwrap();
        assert_eq!(alpha, ExtValue::Finite(Scalar::from_frac(-5, 4)));
    }

    #[test]
    fn compare_and_wedge_nested_monomials() {
        let seq = Arc::new(BlowupSeq::new(Mode::Local));
        let chart = seq.prime(0).chart;
        let m = |wv: Scalar| {
            Valuation::monomial(seq.clone(), chart, BigRational::zero(), Scalar::one(), wv)
                .unwrap()
        };
        // affine weights (1,2) vs (1,3): nested along one branch
        let v12 = m(Scalar::from_int(1));
        let v13 = m(Scalar::from_int(2));
        assert_eq!(compare(&v12, &v13).unwrap(), TreeOrder::Less);
        assert_eq!(compare(&v13, &v12).unwrap(), TreeOrder::Greater);
        assert_eq!(compare(&v12, &v12.clone()).unwrap(), TreeOrder::Equal);
        let w = wedge(&v12, &v13).unwrap();
        assert_eq!(w.eval(&p("z2")), ExtValue::from_int(2));
        // v ∧ v = v
        let w = wedge(&v13, &v13).unwrap();
        assert_eq!(w.eval(&p("z2")), ExtValue::from_int(3));
    }

    #[test]
    fn wedge_of_distinct_branches_is_root() {
        // monomial-(2,1) and monomial-(1,2) in affine weights sit on
        // different branches; the meet is ord₀
        let seq = Arc::new(BlowupSeq::new(Mode::Local));
        let chart_a = seq.prime(0).chart;
        let chart_b = seq.prime(0).alt_chart.unwrap();
        // (1,2): chart A weights (1,1); (2,1): chart B weights (1,1)
        let v = Valuation::monomial(
            seq.clone(),
            chart_a,
            BigRational::zero(),
            Scalar::one(),
            Scalar::one(),
        )
        .unwrap();
        let w = Valuation::monomial(
            seq.clone(),
            chart_b,
            BigRational::zero(),
            Scalar::one(),
            Scalar::one(),
        )
        .unwrap();
        assert_eq!(compare(&v, &w).unwrap(), TreeOrder::Incomparable);
        let m = wedge(&v, &w).unwrap();
        assert_eq!(m.eval(&p("z1")), ExtValue::from_int(1));
        assert_eq!(m.eval(&p("z2")), ExtValue::from_int(1));
        assert_eq!(m.eval(&p("z1 + z2")), ExtValue::from_int(1));
    }

    #[test]
    fn locate_interior_point_of_cusp_edge() {
        // monomial (1, 5/4) lands inside the edge (E0, E2); re-embedding
        // reproduces its values on the coordinates
        let seq = cusp_seq();
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let chart = seq.prime(0).chart;
        let v = Valuation::monomial(
            seq.clone(),
            chart,
            BigRational::zero(),
            Scalar::one(),
            Scalar::from_frac(1, 4),
        )
        .unwrap();
        let gp = locate(&seq, &graph, &v).unwrap();
        match &gp {
            GraphPoint::Edge { a, b, .. } => {
                let pair = if *a < *b { (*a, *b) } else { (*b, *a) };
                assert_eq!(pair, (0, 2));
            }
            other => panic!("expected an edge point, got {other:?}"),
        }
        let emb = Valuation::embed(seq.clone(), &graph, &gp).unwrap();
        assert_eq!(emb.eval(&p("z1")), ExtValue::from_int(1));
        assert_eq!(
            emb.eval(&p("z2")),
            ExtValue::Finite(Scalar::from_frac(5, 4))
        );
    }

    #[test]
    fn locate_beyond_graph_hits_vertex() {
        // monomial (1,3) on the two-blowup graph retracts to v_{E1} = (1,2)
        let seq = BlowupSeq::new(Mode::Local);
        let seq = seq
            .apply_blowup(BlowupStep::Free {
                parent: 0,
                at: FreePoint::Coord(BigRational::zero()),
            })
            .unwrap();
        let seq = Arc::new(seq);
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let chart = seq.prime(0).chart;
        let v = Valuation::monomial(
            seq.clone(),
            chart,
            BigRational::zero(),
            Scalar::one(),
            Scalar::from_int(2),
        )
        .unwrap();
        assert_eq!(v.eval(&p("z2")), ExtValue::from_int(3));
        let gp = locate(&seq, &graph, &v).unwrap();
        assert_eq!(gp, GraphPoint::Vertex(1));
    }

    #[test]
    fn locate_root_anywhere() {
        let seq = cusp_seq();
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let v = Valuation::root(seq.clone());
        assert_eq!(locate(&seq, &graph, &v).unwrap(), GraphPoint::Vertex(0));
    }

    #[test]
    fn retraction_inequality_on_samples() {
        // (r_π v)(φ) ≤ v(φ), equality when the strict transform misses the
        // center
        let seq = cusp_seq();
        let graph = crate::blowup::dual_graph(&seq).unwrap();
        let chart = seq.prime(3).chart;
        // a valuation beyond the graph: monomial deep in E3's chart
        let v = Valuation::monomial(
            seq.clone(),
            chart,
            rat(2, 1),
            Scalar::one(),
            Scalar::from_int(5),
        )
        .unwrap();
        let gp = locate(&seq, &graph, &v).unwrap();
        let rv = Valuation::embed(seq.clone(), &graph, &gp).unwrap();
        for phi in ["z1", "z2", "z2^2 - z1^3", "z1*z2 - z2^2", "z1^4 + z2^3"] {
            let a = rv.eval(&p(phi));
            let b = v.eval(&p(phi));
            assert!(a <= b, "retraction inequality failed on {phi}: {a} > {b}");
        }
        // equality on the resolved ideal's generators
        assert_eq!(v.eval(&p("z2^2 - z1^3")), rv.eval(&p("z2^2 - z1^3")));
    }
}
