//! Dual graphs of blowup sequences: metric trees with per-vertex
//! invariants, marked curve ends, graph points, the rooted-tree order, and
//! DOT / JSON export with exact replay.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::chart::{ChartId, PrimeId};
use super::resolution::{track_curves, BranchState};
use super::seq::{BlowupSeq, BlowupStep, FreePoint, MarkedCurve, Mode};
use crate::error::{Error, Result};
use crate::numbers::{ExtValue, Scalar};
use crate::poly::{parse_poly, Poly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphVertex {
    pub prime: PrimeId,
    pub b: BigInt,
    pub a_log: BigInt,
    pub alpha: BigInt,
}

impl GraphVertex {
    pub fn alpha_normalized(&self) -> BigRational {
        BigRational::new(self.alpha.clone(), &self.b * &self.b)
    }
    pub fn a_normalized(&self) -> BigRational {
        BigRational::new(self.a_log.clone(), self.b.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub a: PrimeId,
    pub b: PrimeId,
    /// 1/(b_a·b_b), the metric suited to potential theory.
    pub length: BigRational,
    /// gcd(b_a, b_b).
    pub multiplicity: BigInt,
    pub chart: ChartId,
}

/// A marked-curve end attached at a free point of a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveEndVertex {
    pub curve: usize,
    pub poly: Poly,
    pub attach: PrimeId,
    pub chart: ChartId,
    pub coord: BigRational,
    /// Branch multiplicity (= b of the attachment prime).
    pub branch_multiplicity: BigInt,
}

/// A point of the dual graph: a vertex, an interior point of an edge
/// between primes (weights on the two prime equations in the pair chart),
/// an interior point of a curve-end edge, or the curve end itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphPoint {
    Vertex(PrimeId),
    /// Interior of the edge joining `a` and `b`, as the monomial valuation
    /// with weights `(wa, wb)` on the local equations of `a` and `b` in
    /// their pair chart; both weights positive, and `b_a·wa + b_b·wb = 1`.
    Edge {
        a: PrimeId,
        b: PrimeId,
        wa: Scalar,
        wb: Scalar,
    },
    /// Interior of the edge running from the attachment vertex of curve
    /// end `end` out toward it: the monomial valuation with weight `1/b_E`
    /// on the prime equation and `s > 0` on the curvette coordinate.
    CurveInterior { end: usize, s: Scalar },
    CurveEnd(usize),
}

#[derive(Debug, Clone)]
pub struct DualGraph {
    pub mode: Mode,
    pub root: PrimeId,
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub curve_ends: Vec<CurveEndVertex>,
    /// parent[p] = (parent prime, edge index) in the tree rooted at `root`.
    parent: Vec<Option<(PrimeId, usize)>>,
}

/// Builds the dual graph of a sequence. Marked curves appear as curve-end
/// vertices; they must be resolved first.
pub fn dual_graph(seq: &BlowupSeq) -> Result<DualGraph> {
    let vertices: Vec<GraphVertex> = seq
        .primes
        .iter()
        .map(|p| GraphVertex {
            prime: p.id,
            b: p.b.clone(),
            a_log: p.a_log.clone(),
            alpha: p.alpha.clone(),
        })
        .collect();
    let edges: Vec<GraphEdge> = seq
        .pairs
        .iter()
        .map(|pair| {
            let ba = &seq.prime(pair.u).b;
            let bb = &seq.prime(pair.v).b;
            GraphEdge {
                a: pair.u,
                b: pair.v,
                length: BigRational::new(BigInt::from(1), ba * bb),
                multiplicity: ba.gcd(bb),
                chart: pair.chart,
            }
        })
        .collect();
    let mut curve_ends = Vec::new();
    let branches = track_curves(seq)?;
    for br in &branches {
        match &br.state {
            BranchState::Resolved {
                prime,
                chart,
                coord,
            } => {
                curve_ends.push(CurveEndVertex {
                    curve: br.curve,
                    poly: seq.curves[br.curve].poly.clone(),
                    attach: *prime,
                    chart: *chart,
                    coord: coord.clone(),
                    branch_multiplicity: seq.prime(*prime).b.clone(),
                });
            }
            other => {
                return Err(Error::UnresolvedCurve(format!(
                    "curve {} has an unresolved branch: {:?}",
                    seq.curves[br.curve].poly, other
                )))
            }
        }
    }
    // BFS tree from the root over the edges
    let n = vertices.len();
    let mut parent: Vec<Option<(PrimeId, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    while let Some(p) = queue.pop_front() {
        for (ei, e) in edges.iter().enumerate() {
            let q = if e.a == p {
                e.b
            } else if e.b == p {
                e.a
            } else {
                continue;
            };
            if !seen[q] {
                seen[q] = true;
                parent[q] = Some((p, ei));
                queue.push_back(q);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Precondition("dual graph is not connected".into()));
    }
    Ok(DualGraph {
        mode: seq.mode,
        root: 0,
        vertices,
        edges,
        curve_ends,
        parent,
    })
}

impl DualGraph {
    pub fn vertex(&self, p: PrimeId) -> &GraphVertex {
        &self.vertices[p]
    }

    /// Path of primes from the root to `p`, inclusive.
    pub fn path_from_root(&self, p: PrimeId) -> Vec<PrimeId> {
        let mut path = vec![p];
        let mut cur = p;
        while let Some((par, _)) = self.parent[cur] {
            path.push(par);
            cur = par;
        }
        path.reverse();
        path
    }

    /// Normalized skewness of a graph point.
    pub fn alpha_at(&self, gp: &GraphPoint) -> ExtValue {
        match gp {
            GraphPoint::Vertex(p) => {
                ExtValue::Finite(Scalar::from_big(self.vertex(*p).alpha_normalized()))
            }
            GraphPoint::Edge { a, b, wa, wb } => {
                // α(v) = wa·α_a/b_a + wb·α_b/b_b for normalized weights
                let va = self.vertex(*a);
                let vb = self.vertex(*b);
                let ca = Scalar::from_big(BigRational::new(va.alpha.clone(), va.b.clone()));
                let cb = Scalar::from_big(BigRational::new(vb.alpha.clone(), vb.b.clone()));
                ExtValue::Finite(&(wa * &ca) + &(wb * &cb))
            }
            GraphPoint::CurveInterior { end, s } => {
                // α = α_E/b_E² − s/b_E along the curvette direction
                let e = &self.curve_ends[*end];
                let v = self.vertex(e.attach);
                let base = Scalar::from_big(v.alpha_normalized());
                let slope = Scalar::from_big(BigRational::new(BigInt::from(1), v.b.clone()));
                ExtValue::Finite(&base - &(s * &slope))
            }
            GraphPoint::CurveEnd(_) => ExtValue::MinusInf,
        }
    }

    /// Normalized log discrepancy of a graph point.
    pub fn a_at(&self, gp: &GraphPoint) -> ExtValue {
        match gp {
            GraphPoint::Vertex(p) => {
                ExtValue::Finite(Scalar::from_big(self.vertex(*p).a_normalized()))
            }
            GraphPoint::Edge { a, b, wa, wb } => {
                let va = self.vertex(*a);
                let vb = self.vertex(*b);
                let ca = Scalar::from_big(BigRational::from_integer(va.a_log.clone()));
                let cb = Scalar::from_big(BigRational::from_integer(vb.a_log.clone()));
                ExtValue::Finite(&(wa * &ca) + &(wb * &cb))
            }
            GraphPoint::CurveInterior { end, s } => {
                // A grows with slope +1 in the curvette weight
                let e = &self.curve_ends[*end];
                let v = self.vertex(e.attach);
                let base = Scalar::from_big(v.a_normalized());
                ExtValue::Finite(&base + s)
            }
            GraphPoint::CurveEnd(_) => ExtValue::PlusInf,
        }
    }

    /// Multiplicity at a graph point; edge interiors report the gcd of the
    /// endpoint values (the interpolated convention).
    pub fn multiplicity_at(&self, gp: &GraphPoint) -> ExtValue {
        let m = match gp {
            GraphPoint::Vertex(p) => self.vertex(*p).b.clone(),
            GraphPoint::Edge { a, b, .. } => self.vertex(*a).b.gcd(&self.vertex(*b).b),
            GraphPoint::CurveInterior { end, .. } | GraphPoint::CurveEnd(end) => {
                self.curve_ends[*end].branch_multiplicity.clone()
            }
        };
        ExtValue::Finite(Scalar::from_big(BigRational::from_integer(m)))
    }

    /// Canonicalizes edge points with a vanishing weight to vertices.
    pub fn normalize_point(&self, gp: GraphPoint) -> GraphPoint {
        match gp {
            GraphPoint::Edge { a, b, wa, wb } => {
                if wb.is_zero() {
                    GraphPoint::Vertex(a)
                } else if wa.is_zero() {
                    GraphPoint::Vertex(b)
                } else {
                    GraphPoint::Edge { a, b, wa, wb }
                }
            }
            GraphPoint::CurveInterior { end, s } => {
                if s.is_zero() {
                    GraphPoint::Vertex(self.curve_ends[end].attach)
                } else {
                    GraphPoint::CurveInterior { end, s }
                }
            }
            other => other,
        }
    }

    /// Splits a graph point into (base vertex path, extension) where the
    /// extension describes how far the point reaches beyond the last vertex
    /// of its root path.
    fn address(&self, gp: &GraphPoint) -> (Vec<PrimeId>, Extension) {
        match gp {
            GraphPoint::Vertex(p) => (self.path_from_root(*p), Extension::None),
            GraphPoint::Edge { a, b, wa, wb } => {
                // orient: which endpoint is on the root side?
                let pa = self.path_from_root(*a);
                let pb = self.path_from_root(*b);
                if pa.len() < pb.len() {
                    debug_assert_eq!(pb[pb.len() - 2], *a);
                    (
                        pa,
                        Extension::ontoEdge {
                            child: *b,
                            child_weight: wb.clone(),
                            own_weight: wa.clone(),
                        },
                    )
                } else {
                    debug_assert_eq!(pa[pa.len() - 2], *b);
                    (
                        pb,
                        Extension::ontoEdge {
                            child: *a,
                            child_weight: wa.clone(),
                            own_weight: wb.clone(),
                        },
                    )
                }
            }
            GraphPoint::CurveInterior { end, s } => (
                self.path_from_root(self.curve_ends[*end].attach),
                Extension::ontoCurve {
                    end: *end,
                    s: s.clone(),
                },
            ),
            GraphPoint::CurveEnd(end) => (
                self.path_from_root(self.curve_ends[*end].attach),
                Extension::ontoCurve {
                    end: *end,
                    s: Scalar::from_int(i64::MAX), // sentinel; compared via variant
                },
            ),
        }
    }

    /// Rooted-tree order: is `p ≤ q` (p on the path from root to q)?
    pub fn tree_leq(&self, p: &GraphPoint, q: &GraphPoint) -> bool {
        let p = self.normalize_point(p.clone());
        let q = self.normalize_point(q.clone());
        if p == q {
            return true;
        }
        let (base_p, ext_p) = self.address(&p);
        let (base_q, ext_q) = self.address(&q);
        match &ext_p {
            Extension::None => {
                // vertex ≤ q iff the vertex lies on q's root path
                let vp = *base_p.last().unwrap();
                base_q.contains(&vp)
            }
            Extension::ontoEdge {
                child,
                child_weight,
                ..
            } => {
                // p is interior to edge (last(base_p), child)
                if base_q.contains(child) {
                    return true; // q at or beyond the child vertex
                }
                // q must be interior to the same edge, further out
                match (&q, &ext_q) {
                    (
                        _,
                        Extension::ontoEdge {
                            child: qc,
                            child_weight: qw,
                            ..
                        },
                    ) if qc == child && base_q == base_p => qw > child_weight,
                    _ => false,
                }
            }
            Extension::ontoCurve { end, s } => match (&q, &ext_q) {
                (GraphPoint::CurveEnd(qe), _) => qe == end,
                (
                    _,
                    Extension::ontoCurve { end: qe, s: qs },
                ) if qe == end => {
                    if matches!(p, GraphPoint::CurveEnd(_)) {
                        false
                    } else {
                        qs > s && base_q == base_p
                    }
                }
                _ => false,
            },
        }
    }

    /// Meet (wedge) of two graph points in the rooted tree.
    pub fn tree_meet(&self, p: &GraphPoint, q: &GraphPoint) -> GraphPoint {
        let p = self.normalize_point(p.clone());
        let q = self.normalize_point(q.clone());
        if self.tree_leq(&p, &q) {
            return p;
        }
        if self.tree_leq(&q, &p) {
            return q;
        }
        let (base_p, ext_p) = self.address(&p);
        let (base_q, ext_q) = self.address(&q);
        // longest common prefix of the vertex paths
        let mut k = 0;
        while k < base_p.len() && k < base_q.len() && base_p[k] == base_q[k] {
            k += 1;
        }
        debug_assert!(k > 0, "paths share the root");
        let common = base_p[k - 1];
        // if both extend onto the same edge from `common`, the meet is the
        // nearer interior point — but that case is already covered by the
        // leq checks above; anything else meets at the common vertex,
        // except when one path continues along the edge the other's point
        // lies interior on
        if k == base_p.len() && k < base_q.len() {
            if let Extension::ontoEdge {
                child,
                child_weight,
                own_weight,
            } = &ext_p
            {
                if base_q[k] == *child {
                    return GraphPoint::Edge {
                        a: common,
                        b: *child,
                        wa: own_weight.clone(),
                        wb: child_weight.clone(),
                    };
                }
            }
        }
        if k == base_q.len() && k < base_p.len() {
            if let Extension::ontoEdge {
                child,
                child_weight,
                own_weight,
            } = &ext_q
            {
                if base_p[k] == *child {
                    return GraphPoint::Edge {
                        a: common,
                        b: *child,
                        wa: own_weight.clone(),
                        wb: child_weight.clone(),
                    };
                }
            }
        }
        if k == base_p.len() && k == base_q.len() {
            // both extensions leave the same vertex in different directions
            // (which includes distinct curve ends or edge vs curve): meet at
            // the vertex — unless они share the едge/curve, handled by leq.
            match (&ext_p, &ext_q) {
                (
                    Extension::ontoEdge {
                        child: c1,
                        child_weight: w1,
                        own_weight: o1,
                    },
                    Extension::ontoEdge {
                        child: c2,
                        child_weight: w2,
                        ..
                    },
                ) if c1 == c2 => {
                    let (wa, wb) = if w1 <= w2 {
                        (o1.clone(), w1.clone())
                    } else {
                        unreachable!("covered by leq")
                    };
                    return GraphPoint::Edge {
                        a: common,
                        b: *c1,
                        wa,
                        wb,
                    };
                }
                (
                    Extension::ontoCurve { end: e1, s: s1 },
                    Extension::ontoCurve { end: e2, s: s2 },
                ) if e1 == e2 => {
                    let s = if s1 <= s2 { s1.clone() } else { s2.clone() };
                    return self.normalize_point(GraphPoint::CurveInterior { end: *e1, s });
                }
                _ => {}
            }
        }
        GraphPoint::Vertex(common)
    }
}

enum Extension {
    None,
    #[allow(non_camel_case_types)]
    ontoEdge {
        child: PrimeId,
        child_weight: Scalar,
        own_weight: Scalar,
    },
    #[allow(non_camel_case_types)]
    ontoCurve {
        end: usize,
        s: Scalar,
    },
}

/// DOT export: stable node order (creation order), exact rational labels.
pub fn export_dot(g: &DualGraph) -> String {
    let mut out = String::from("graph dual {\n");
    for v in &g.vertices {
        let name = vertex_name(g.mode, v.prime);
        out.push_str(&format!(
            "  {} [label=\"{} [b={},A={},alpha={}]\"];\n",
            name, name, v.b, v.a_log, v.alpha
        ));
    }
    for (i, e) in g.curve_ends.iter().enumerate() {
        out.push_str(&format!(
            "  C{} [label=\"C{} [{}] m={}\", shape=diamond];\n",
            i, i, e.poly, e.branch_multiplicity
        ));
    }
    for e in &g.edges {
        out.push_str(&format!(
            "  {} -- {} [label=\"len={}, m={}\"];\n",
            vertex_name(g.mode, e.a),
            vertex_name(g.mode, e.b),
            e.length,
            e.multiplicity
        ));
    }
    for (i, e) in g.curve_ends.iter().enumerate() {
        out.push_str(&format!(
            "  {} -- C{} [label=\"curve\", style=dashed];\n",
            vertex_name(g.mode, e.attach),
            i
        ));
    }
    out.push_str("}\n");
    out
}

fn vertex_name(mode: Mode, p: PrimeId) -> String {
    if p == 0 && mode == Mode::Infinity {
        "Linf".to_string()
    } else {
        format!("E{p}")
    }
}

/// JSON step list for exact replay.
pub fn seq_to_json(seq: &BlowupSeq) -> Value {
    let steps: Vec<Value> = seq
        .steps
        .iter()
        .map(|s| match s {
            BlowupStep::Free { parent, at } => match at {
                FreePoint::Coord(c) => json!({
                    "free": {
                        "parent": parent,
                        "at": [c.numer().to_string(), c.denom().to_string()],
                    }
                }),
                FreePoint::RootAlt => json!({
                    "free": { "parent": parent, "at": "alt" }
                }),
            },
            BlowupStep::Satellite { pair } => json!({ "satellite": [pair.0, pair.1] }),
        })
        .collect();
    let curves: Vec<Value> = seq
        .curves
        .iter()
        .map(|c| {
            json!({
                "poly": c.poly.to_string(),
                "multiplicity": c.multiplicity,
                "irreducible_certified": c.certified_irreducible,
            })
        })
        .collect();
    json!({
        "mode": match seq.mode { Mode::Local => "local", Mode::Infinity => "infinity" },
        "steps": steps,
        "marked_curves": curves,
    })
}

/// Replays a JSON step list into a sequence.
pub fn seq_from_json(v: &Value) -> Result<BlowupSeq> {
    let mode = match v.get("mode").and_then(Value::as_str) {
        Some("local") => Mode::Local,
        Some("infinity") => Mode::Infinity,
        _ => return Err(Error::Parse("mode must be local or infinity".into())),
    };
    let mut seq = BlowupSeq::new(mode);
    let steps = v
        .get("steps")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing steps".into()))?;
    for s in steps {
        let step = if let Some(f) = s.get("free") {
            let parent = f
                .get("parent")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("free step needs parent".into()))?
                as PrimeId;
            let at = match f.get("at") {
                Some(Value::String(s)) if s == "alt" => FreePoint::RootAlt,
                Some(Value::Array(arr)) if arr.len() == 2 => {
                    let num: BigInt = arr[0]
                        .as_str()
                        .ok_or_else(|| Error::Parse("coordinate as strings".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad numerator".into()))?;
                    let den: BigInt = arr[1]
                        .as_str()
                        .ok_or_else(|| Error::Parse("coordinate as strings".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad denominator".into()))?;
                    if den.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    FreePoint::Coord(BigRational::new(num, den))
                }
                _ => return Err(Error::Parse("free step needs at".into())),
            };
            BlowupStep::Free { parent, at }
        } else if let Some(p) = s.get("satellite") {
            let arr = p
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse("satellite step needs a pair".into()))?;
            let a = arr[0].as_u64().ok_or_else(|| Error::Parse("bad pair".into()))? as PrimeId;
            let b = arr[1].as_u64().ok_or_else(|| Error::Parse("bad pair".into()))? as PrimeId;
            BlowupStep::Satellite { pair: (a, b) }
        } else {
            return Err(Error::Parse("unknown step kind".into()));
        };
        seq = seq.apply_blowup(step)?;
    }
    if let Some(curves) = v.get("marked_curves").and_then(Value::as_array) {
        for c in curves {
            let poly = parse_poly(
                c.get("poly")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("marked curve needs poly".into()))?,
            )?;
            let multiplicity = c.get("multiplicity").and_then(Value::as_u64).unwrap_or(1);
            let certified = c
                .get("irreducible_certified")
                .and_then(Value::as_bool)
                .unwrap_or(false);
            seq.mark_curve(MarkedCurve {
                poly,
                multiplicity,
                certified_irreducible: certified,
            });
        }
    }
    Ok(seq)
}
