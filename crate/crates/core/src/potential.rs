//! Potential theory on dual-graph metric trees: Laplacians of
//! piecewise-affine functions, exact Poisson solving through the Green
//! kernel, and the measure attached to an ideal through its log
//! resolution.
//!
//! The ground convention is built in: the root carries an extra ground
//! edge of length one, contributing `−φ(root)` to the root mass locally
//! and `+φ(root)` at infinity.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::blowup::{
    dual_graph, log_resolution, BlowupSeq, DualGraph, GraphPoint, Mode, DEFAULT_STEP_CAP,
};
use crate::error::{Error, Result};
use crate::numbers::{scalar_to_json, ExtValue, Scalar};
use crate::poly::Ideal;

/// A finite atomic (possibly signed) measure on the points of a dual graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicMeasure {
    pub mode: Mode,
    pub atoms: Vec<(GraphPoint, Scalar)>,
}

impl AtomicMeasure {
    pub fn new(mode: Mode, atoms: Vec<(GraphPoint, Scalar)>) -> Self {
        let mut m = AtomicMeasure { mode, atoms: vec![] };
        for (p, mass) in atoms {
            m.add(p, mass);
        }
        m
    }

    pub fn add(&mut self, point: GraphPoint, mass: Scalar) {
        if mass.is_zero() {
            return;
        }
        if let Some(slot) = self.atoms.iter_mut().find(|(p, _)| *p == point) {
            slot.1 = &slot.1 + &mass;
        } else {
            self.atoms.push((point, mass));
        }
        self.atoms.retain(|(_, m)| !m.is_zero());
    }

    pub fn total_mass(&self) -> Scalar {
        self.atoms
            .iter()
            .fold(Scalar::zero(), |acc, (_, m)| &acc + m)
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.iter().all(|(_, m)| m.is_positive())
    }
}

/// A continuous function on a dual graph, affine on each edge in the
/// α-parameter: values at the vertices plus, for each curve-end edge, the
/// outgoing slope toward the end (the value at a curve end is `−∞` times
/// the sign of the slope, or the attachment value for slope zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFn {
    pub mode: Mode,
    pub vertex_values: Vec<Scalar>,
    pub curve_slopes: Vec<Scalar>,
}

impl TreeFn {
    pub fn constant(graph: &DualGraph, value: Scalar) -> Self {
        TreeFn {
            mode: graph.mode,
            vertex_values: vec![value; graph.vertices.len()],
            curve_slopes: vec![Scalar::zero(); graph.curve_ends.len()],
        }
    }

    /// Value at a graph point (±∞ possible only at curve ends).
    pub fn eval(&self, graph: &DualGraph, p: &GraphPoint) -> ExtValue {
        match p {
            GraphPoint::Vertex(i) => ExtValue::Finite(self.vertex_values[*i].clone()),
            GraphPoint::Edge { a, b, wa: _, wb } => {
                // affine in the α-parameter between the endpoint values
                let fa = &self.vertex_values[*a];
                let fb = &self.vertex_values[*b];
                // position along the edge: wb runs from 0 to 1/b_b; the α
                // drop from a to b is the edge length
                let bb = Scalar::from_big(BigRational::from_integer(
                    graph.vertex(*b).b.clone(),
                ));
                let t = wb * &bb; // 0 at vertex a, 1 at vertex b
                ExtValue::Finite(&(&(Scalar::one() - &t) * fa) + &(&t * fb))
            }
            GraphPoint::CurveInterior { end, s } => {
                let e = &graph.curve_ends[*end];
                let base = &self.vertex_values[e.attach];
                // distance in α from the attachment is s/b
                let b = Scalar::from_big(BigRational::from_integer(
                    graph.vertex(e.attach).b.clone(),
                ));
                let d = s / &b;
                ExtValue::Finite(base + &(&self.curve_slopes[*end] * &d))
            }
            GraphPoint::CurveEnd(end) => {
                let s = &self.curve_slopes[*end];
                match s.signum() {
                    0 => ExtValue::Finite(
                        self.vertex_values[graph.curve_ends[*end].attach].clone(),
                    ),
                    x if x > 0 => ExtValue::PlusInf,
                    _ => ExtValue::MinusInf,
                }
            }
        }
    }
}

/// Laplacian of a piecewise-affine function: atoms at the vertices (sums
/// of outgoing slopes against the metric, plus the mode's ground term at
/// the root) and at curve ends.
pub fn laplacian(graph: &DualGraph, f: &TreeFn) -> AtomicMeasure {
    let mut out = AtomicMeasure::new(graph.mode, vec![]);
    for v in &graph.vertices {
        let i = v.prime;
        let mut mass = Scalar::zero();
        for e in &graph.edges {
            let j = if e.a == i {
                e.b
            } else if e.b == i {
                e.a
            } else {
                continue;
            };
            // slope toward j: (f_j − f_i)/length = b_i·b_j·(f_j − f_i)
            let len_inv = Scalar::from_big(BigRational::from_integer(
                &graph.vertex(i).b * &graph.vertex(j).b,
            ));
            mass = &mass + &(&(&f.vertex_values[j] - &f.vertex_values[i]) * &len_inv);
        }
        for (k, e) in graph.curve_ends.iter().enumerate() {
            if e.attach == i {
                mass = &mass + &f.curve_slopes[k];
            }
        }
        if i == graph.root {
            let ground = match graph.mode {
                Mode::Local => -f.vertex_values[i].clone(),
                Mode::Infinity => f.vertex_values[i].clone(),
            };
            mass = &mass + &ground;
        }
        out.add(GraphPoint::Vertex(i), mass);
    }
    for (k, _) in graph.curve_ends.iter().enumerate() {
        out.add(GraphPoint::CurveEnd(k), -f.curve_slopes[k].clone());
    }
    out
}

/// Green-kernel evaluation: `φ(v) = Σ mass(w)·α(w ∧ v)` over the atoms of
/// a positive measure. Errors on signed measures, and on evaluation at a
/// curve end carrying an atom (the value is −∞ there).
pub fn green_eval(graph: &DualGraph, rho: &AtomicMeasure, at: &GraphPoint) -> Result<Scalar> {
    if !rho.is_positive() {
        return Err(Error::SignedMeasure);
    }
    let mut acc = Scalar::zero();
    for (w, mass) in &rho.atoms {
        let meet = graph.tree_meet(w, at);
        match graph.alpha_at(&meet) {
            ExtValue::Finite(a) => acc = &acc + &(mass * &a),
            _ => {
                return Err(Error::Precondition(
                    "green kernel is infinite at a curve end with mass".into(),
                ))
            }
        }
    }
    Ok(acc)
}

/// Exact Poisson solve: the unique ground-normalized `φ` with
/// `laplacian(φ) = ρ`, for a positive measure supported on vertices and
/// curve ends.
pub fn poisson_solve(graph: &DualGraph, rho: &AtomicMeasure) -> Result<TreeFn> {
    if !rho.is_positive() {
        return Err(Error::SignedMeasure);
    }
    for (p, _) in &rho.atoms {
        match p {
            GraphPoint::Vertex(_) | GraphPoint::CurveEnd(_) => {}
            other => {
                return Err(Error::Precondition(format!(
                    "poisson needs atoms at vertices or curve ends, got {other:?}; \
                     refine the graph first"
                )))
            }
        }
    }
    let mut vertex_values = Vec::with_capacity(graph.vertices.len());
    for v in &graph.vertices {
        vertex_values.push(green_eval(graph, rho, &GraphPoint::Vertex(v.prime))?);
    }
    let mut curve_slopes = vec![Scalar::zero(); graph.curve_ends.len()];
    for (k, slot) in curve_slopes.iter_mut().enumerate() {
        for (p, mass) in &rho.atoms {
            if *p == GraphPoint::CurveEnd(k) {
                *slot = &*slot - mass;
            }
        }
    }
    Ok(TreeFn {
        mode: graph.mode,
        vertex_values,
        curve_slopes,
    })
}

/// The measure `Δ log|𝔞|` of an ideal, computed through a log resolution:
/// vertex masses `b_i (Z·E_i)` plus curve-end atoms for non-primary ideals
/// (mass = multiplicity × branch multiplicity per resolved branch).
pub struct IdealMeasure {
    pub seq: BlowupSeq,
    pub graph: DualGraph,
    pub measure: AtomicMeasure,
    pub vanishing_orders: Vec<BigInt>,
}

pub fn laplacian_log_ideal(ideal: &Ideal, mode: Mode) -> Result<IdealMeasure> {
    let res = log_resolution(ideal, mode, &[], DEFAULT_STEP_CAP)?;
    let seq = res.seq;
    let graph = dual_graph(&seq)?;
    let mut measure = AtomicMeasure::new(mode, vec![]);
    // vertex masses: the divisor has coefficients −ord, so
    // (Z·E_i) = −(M·ord)_i
    let n = seq.num_primes();
    for i in 0..n {
        let mut dot = BigInt::from(0);
        for (j, ord) in res.vanishing_orders.iter().enumerate() {
            dot += &seq.matrix[i][j] * ord;
        }
        let mass = BigRational::from_integer(-dot * &seq.prime(i).b);
        measure.add(
            GraphPoint::Vertex(i),
            Scalar::from_big(mass),
        );
    }
    for (k, end) in graph.curve_ends.iter().enumerate() {
        let mult = seq.curves[end.curve].multiplicity;
        let mass = BigRational::from_integer(
            BigInt::from(mult) * &end.branch_multiplicity,
        );
        measure.add(GraphPoint::CurveEnd(k), Scalar::from_big(mass));
    }
    Ok(IdealMeasure {
        seq,
        graph,
        measure,
        vanishing_orders: res.vanishing_orders,
    })
}

/// JSON form of a measure: a list of atoms.
pub fn measure_to_json(graph: &DualGraph, m: &AtomicMeasure) -> Value {
    let atoms: Vec<Value> = m
        .atoms
        .iter()
        .map(|(p, mass)| {
            json!({
                "point": point_to_json(graph, p),
                "mass": scalar_to_json(mass),
            })
        })
        .collect();
    json!({ "atoms": atoms })
}

pub fn point_to_json(graph: &DualGraph, p: &GraphPoint) -> Value {
    match p {
        GraphPoint::Vertex(i) => json!({ "vertex": i }),
        GraphPoint::Edge { a, b, wa, wb } => json!({
            "edge": [a, b],
            "weights": [scalar_to_json(wa), scalar_to_json(wb)],
        }),
        GraphPoint::CurveInterior { end, s } => json!({
            "curve_edge": end,
            "s": scalar_to_json(s),
            "curve": graph.curve_ends[*end].poly.to_string(),
        }),
        GraphPoint::CurveEnd(end) => json!({
            "curve_end": end,
            "curve": graph.curve_ends[*end].poly.to_string(),
        }),
    }
}

/// JSON form of a tree function: vertex values and curve-edge slopes.
pub fn treefn_to_json(f: &TreeFn) -> Value {
    json!({
        "vertex_values": f.vertex_values.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "curve_slopes": f.curve_slopes.iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{BlowupStep, FreePoint, MarkedCurve};
    use crate::poly::{parse_ideal, parse_poly};
    use num_traits::Zero;

    fn cusp_graph() -> (BlowupSeq, DualGraph) {
        let ideal = parse_ideal("z2^2 - z1^3, z1^2*z2").unwrap();
        let res = log_resolution(&ideal, Mode::Local, &[], DEFAULT_STEP_CAP).unwrap();
        let g = dual_graph(&res.seq).unwrap();
        (res.seq, g)
    }

    #[test]
    fn constant_minus_one_has_root_mass() {
        let (_, g) = cusp_graph();
        let f = TreeFn::constant(&g, Scalar::from_int(-1));
        let lap = laplacian(&g, &f);
        assert_eq!(
            lap.atoms,
            vec![(GraphPoint::Vertex(0), Scalar::one())]
        );
    }

    #[test]
    fn constant_plus_one_at_infinity() {
        let seq = BlowupSeq::new(Mode::Infinity);
        let seq = seq
            .apply_blowup(BlowupStep::Free {
                parent: 0,
                at: FreePoint::Coord(BigRational::zero()),
            })
            .unwrap();
        let g = dual_graph(&seq).unwrap();
        let f = TreeFn::constant(&g, Scalar::one());
        let lap = laplacian(&g, &f);
        assert_eq!(lap.atoms, vec![(GraphPoint::Vertex(0), Scalar::one())]);
    }

    #[test]
    fn green_of_root_mass_is_minus_one() {
        let (_, g) = cusp_graph();
        let rho = AtomicMeasure::new(
            Mode::Local,
            vec![(GraphPoint::Vertex(0), Scalar::one())],
        );
        for v in 0..4 {
            assert_eq!(
                green_eval(&g, &rho, &GraphPoint::Vertex(v)).unwrap(),
                Scalar::from_int(-1)
            );
        }
    }

    #[test]
    fn green_of_interior_mass() {
        // δ at v_{E1} of the two-blowup graph (weights (1,2), α = −2):
        // value −1 at ord₀, −2 at v_{E1}
        let seq = BlowupSeq::new(Mode::Local)
            .apply_blowup(BlowupStep::Free {
                parent: 0,
                at: FreePoint::Coord(BigRational::zero()),
            })
            .unwrap();
        let g = dual_graph(&seq).unwrap();
        let rho = AtomicMeasure::new(
            Mode::Local,
            vec![(GraphPoint::Vertex(1), Scalar::one())],
        );
        assert_eq!(
            green_eval(&g, &rho, &GraphPoint::Vertex(0)).unwrap(),
            Scalar::from_int(-1)
        );
        assert_eq!(
            green_eval(&g, &rho, &GraphPoint::Vertex(1)).unwrap(),
            Scalar::from_int(-2)
        );
    }

    #[test]
    fn green_is_linear_in_the_measure() {
        let (_, g) = cusp_graph();
        let rho1 = AtomicMeasure::new(Mode::Local, vec![(GraphPoint::Vertex(2), Scalar::one())]);
        let rho2 = AtomicMeasure::new(Mode::Local, vec![(GraphPoint::Vertex(3), Scalar::one())]);
        let half = Scalar::from_frac(1, 2);
        let mix = AtomicMeasure::new(
            Mode::Local,
            vec![
                (GraphPoint::Vertex(2), half.clone()),
                (GraphPoint::Vertex(3), half.clone()),
            ],
        );
        for v in 0..4 {
            let p = GraphPoint::Vertex(v);
            let a = green_eval(&g, &rho1, &p).unwrap();
            let b = green_eval(&g, &rho2, &p).unwrap();
            let m = green_eval(&g, &mix, &p).unwrap();
            assert_eq!(m, &(&half * &a) + &(&half * &b));
        }
    }

    #[test]
    fn poisson_then_laplacian_roundtrip() {
        let (_, g) = cusp_graph();
        let rho = AtomicMeasure::new(
            Mode::Local,
            vec![
                (GraphPoint::Vertex(1), Scalar::from_frac(1, 3)),
                (GraphPoint::Vertex(3), Scalar::from_int(2)),
            ],
        );
        let f = poisson_solve(&g, &rho).unwrap();
        let lap = laplacian(&g, &f);
        let mut expect = rho.clone();
        expect.atoms.sort_by_key(|(p, _)| format!("{p:?}"));
        let mut got = lap.clone();
        got.atoms.sort_by_key(|(p, _)| format!("{p:?}"));
        assert_eq!(got, expect);
    }

    #[test]
    fn roundtrip_with_curve_end_atom() {
        let mut seq = BlowupSeq::new(Mode::Local);
        seq.mark_curve(MarkedCurve {
            poly: parse_poly("z2").unwrap(),
            multiplicity: 1,
            certified_irreducible: true,
        });
        let g = dual_graph(&seq).unwrap();
        let rho = AtomicMeasure::new(
            Mode::Local,
            vec![
                (GraphPoint::Vertex(0), Scalar::one()),
                (GraphPoint::CurveEnd(0), Scalar::from_int(2)),
            ],
        );
        let f = poisson_solve(&g, &rho).unwrap();
        assert_eq!(f.vertex_values[0], Scalar::from_int(-3));
        assert_eq!(f.curve_slopes[0], Scalar::from_int(-2));
        let lap = laplacian(&g, &f);
        let mut atoms = lap.atoms.clone();
        atoms.sort_by_key(|(p, _)| format!("{p:?}"));
        assert_eq!(
            atoms,
            vec![
                (GraphPoint::CurveEnd(0), Scalar::from_int(2)),
                (GraphPoint::Vertex(0), Scalar::one()),
            ]
        );
    }

    #[test]
    fn mass_law_total_equals_root_value() {
        let (_, g) = cusp_graph();
        let rho = AtomicMeasure::new(
            Mode::Local,
            vec![
                (GraphPoint::Vertex(0), Scalar::from_frac(2, 5)),
                (GraphPoint::Vertex(2), Scalar::from_int(1)),
            ],
        );
        let f = poisson_solve(&g, &rho).unwrap();
        assert_eq!(-f.vertex_values[0].clone(), rho.total_mass());
    }

    #[test]
    fn measure_of_cusp_pair_ideal() {
        // Δlog|𝔞| = 2·δ_{v_{E3}}, total mass ord₀(𝔞) = 2
        let ideal = parse_ideal("z2^2 - z1^3, z1^2*z2").unwrap();
        let im = laplacian_log_ideal(&ideal, Mode::Local).unwrap();
        assert_eq!(
            im.measure.atoms,
            vec![(GraphPoint::Vertex(3), Scalar::from_int(2))]
        );
        assert_eq!(im.measure.total_mass(), Scalar::from_int(2));
    }

    #[test]
    fn measure_of_maximal_ideal_and_powers() {
        let ideal = parse_ideal("z1, z2").unwrap();
        let im = laplacian_log_ideal(&ideal, Mode::Local).unwrap();
        assert_eq!(
            im.measure.atoms,
            vec![(GraphPoint::Vertex(0), Scalar::one())]
        );
        // m₀²: generators z1², z1z2, z2²
        let ideal = parse_ideal("z1^2, z1*z2, z2^2").unwrap();
        let im = laplacian_log_ideal(&ideal, Mode::Local).unwrap();
        assert_eq!(
            im.measure.atoms,
            vec![(GraphPoint::Vertex(0), Scalar::from_int(2))]
        );
    }

    #[test]
    fn measure_of_principal_curve_ideal() {
        // 𝔞 = (z2): one curve-end atom of mass 1, fixed-curve flag
        let ideal = parse_ideal("z2").unwrap();
        let im = laplacian_log_ideal(&ideal, Mode::Local).unwrap();
        assert_eq!(im.vanishing_orders, vec![BigInt::zero()]);
        assert_eq!(im.graph.curve_ends.len(), 1);
        assert_eq!(
            im.measure.atoms,
            vec![(GraphPoint::CurveEnd(0), Scalar::one())]
        );
        assert_eq!(im.measure.total_mass(), Scalar::one());
    }

    #[test]
    fn subharmonicity_of_ideal_potential() {
        // φ = −v(𝔞) on the resolution graph decreases from the root
        let ideal = parse_ideal("z2^2 - z1^3, z1^2*z2").unwrap();
        let im = laplacian_log_ideal(&ideal, Mode::Local).unwrap();
        let f = poisson_solve(&im.graph, &im.measure).unwrap();
        let root_val = &f.vertex_values[0];
        for (i, fv) in f.vertex_values.iter().enumerate() {
            assert!(fv <= root_val, "vertex {i} value above the root");
        }
        // and equals −ord_i(𝔞)/b_i vertexwise
        for (i, fv) in f.vertex_values.iter().enumerate() {
            let expect = Scalar::from_big(BigRational::new(
                -im.vanishing_orders[i].clone(),
                im.seq.prime(i).b.clone(),
            ));
            assert_eq!(*fv, expect, "potential at vertex {i}");
        }
    }
}
