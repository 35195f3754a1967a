//! Blowup sequences above the origin (local mode) or above the line at
//! infinity of the projective plane (infinity mode): per-prime invariants,
//! charts, intersection theory, dual graphs, log resolution of ideals and
//! the tightness test.

mod chart;
mod graph;
mod resolution;
mod seq;

pub use chart::{Chart, ChartId, PrimeId, RatFn, Subst, VAxis};
pub use graph::{
    dual_graph, export_dot, seq_from_json, seq_to_json, CurveEndVertex, DualGraph, GraphEdge,
    GraphPoint, GraphVertex,
};
pub use resolution::{
    log_resolution, ord_along_prime, resolve_marked_curves, strict_in_chart, track_curves,
    Branch, BranchState, LogResolution, DEFAULT_STEP_CAP,
};
pub use seq::{
    BlowupSeq, BlowupStep, FreePoint, IntersectionData, MarkedCurve, Mode, Pair, Prime,
};
