//! Blowup sequences above the origin or above the line at infinity, with
//! per-prime invariants, chart bookkeeping and exact intersection data.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::chart::{
    child_inv, pullback_fwd, root_fwd, root_inv, Chart, ChartFwd, ChartId, PrimeId, RatFn,
    Subst, VAxis,
};
use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Local,
    Infinity,
}

/// Location of a free blowup center on its parent prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FreePoint {
    /// Coordinate on `{u = 0}` in the parent's primary chart.
    Coord(BigRational),
    /// The one point of the root not visible in its primary chart,
    /// addressed in the root's alternate chart at `v = 0`.
    RootAlt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlowupStep {
    Free { parent: PrimeId, at: FreePoint },
    Satellite { pair: (PrimeId, PrimeId) },
}

/// An exceptional prime (or the line at infinity) with its invariants.
#[derive(Debug, Clone)]
pub struct Prime {
    pub id: PrimeId,
    /// Generic multiplicity: `ord_E` of the maximal ideal (local) or minus
    /// the order of the system of lines (infinity).
    pub b: BigInt,
    /// Log discrepancy.
    pub a_log: BigInt,
    /// Self-intersection of the dual divisor (skewness numerator).
    pub alpha: BigInt,
    /// Primary chart: this prime is `{u = 0}` and every free point except
    /// the root's one extra point has a coordinate here.
    pub chart: ChartId,
    /// Second chart covering the remaining point; root only.
    pub alt_chart: Option<ChartId>,
}

impl Prime {
    pub fn alpha_normalized(&self) -> BigRational {
        BigRational::new(self.alpha.clone(), &self.b * &self.b)
    }

    pub fn a_normalized(&self) -> BigRational {
        BigRational::new(self.a_log.clone(), self.b.clone())
    }
}

/// A live intersection of two primes, with the chart where the first is
/// `{u = 0}` and the second `{v = 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub u: PrimeId,
    pub v: PrimeId,
    pub chart: ChartId,
}

impl Pair {
    pub fn joins(&self, a: PrimeId, b: PrimeId) -> bool {
        (self.u, self.v) == (a, b) || (self.u, self.v) == (b, a)
    }
}

/// Exact intersection data: the matrix over current primes and the dual
/// divisors solving `(Ě_i · E_j) = δ_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionData {
    pub matrix: Vec<Vec<BigInt>>,
    /// `dual[i]` is the coefficient vector of `Ě_i` in the `E_j` basis;
    /// it equals the `i`-th column of the inverse matrix.
    pub dual: Vec<Vec<BigInt>>,
}

impl IntersectionData {
    pub fn dot(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * &self.matrix[i][j] * yj;
            }
        }
        acc
    }

    /// Determinant sign and unimodularity, via exact elimination.
    pub fn det_sign_and_unimodular(&self) -> (i32, bool) {
        let n = self.matrix.len();
        let mut m: Vec<Vec<BigRational>> = self
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        let mut det = BigRational::one();
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r][col].is_zero());
            let Some(piv) = piv else { return (0, false) };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            det *= m[col][col].clone();
            let inv = m[col][col].recip();
            for r in col + 1..n {
                let factor = &m[r][col] * &inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let sub = &factor * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
        let uni = det.clone().abs() == BigRational::one();
        let sign = if det.is_positive() {
            1
        } else if det.is_zero() {
            0
        } else {
            -1
        };
        (sign, uni)
    }
}

/// A curve marked for tracking through the sequence, given by a global
/// polynomial equation (graded-lex monic). Branch states are recomputed on
/// demand; see [`super::resolution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedCurve {
    pub poly: Poly,
    /// Multiplicity with which the curve divides the resolved ideal
    /// (1 for plainly marked curves).
    pub multiplicity: u64,
    /// Whether the equation is certified irreducible over ℚ.
    pub certified_irreducible: bool,
}

#[derive(Default)]
struct ChartCache {
    fwd: Mutex<HashMap<ChartId, ChartFwd>>,
    inv: Mutex<HashMap<ChartId, (RatFn, RatFn)>>,
}

/// An immutable blowup sequence; `apply_blowup` returns a new value. Chart
/// maps materialize lazily behind a per-value cache (concurrent readers
/// are fine; the cache is internally serialized and never shared between
/// clones).
#[derive(Debug)]
pub struct BlowupSeq {
    pub mode: Mode,
    pub steps: Vec<BlowupStep>,
    pub primes: Vec<Prime>,
    pub charts: Vec<Chart>,
    pub pairs: Vec<Pair>,
    /// Full symmetric intersection matrix of the current primes.
    pub matrix: Vec<Vec<BigInt>>,
    /// Gram matrix of the dual divisors: `gram[i][j] = (Ě_i · Ě_j)`,
    /// the inverse of `matrix` (integral by unimodularity).
    pub gram: Vec<Vec<BigInt>>,
    /// Points already blown up, as (chart, coordinate on `{u = 0}`).
    pub blown: Vec<(ChartId, BigRational)>,
    pub curves: Vec<MarkedCurve>,
    cache: ChartCache,
}

impl std::fmt::Debug for ChartCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChartCache")
    }
}

impl Clone for BlowupSeq {
    fn clone(&self) -> Self {
        BlowupSeq {
            mode: self.mode,
            steps: self.steps.clone(),
            primes: self.primes.clone(),
            charts: self.charts.clone(),
            pairs: self.pairs.clone(),
            matrix: self.matrix.clone(),
            gram: self.gram.clone(),
            blown: self.blown.clone(),
            curves: self.curves.clone(),
            cache: ChartCache::default(),
        }
    }
}

impl BlowupSeq {
    /// The root blowup: the exceptional prime over the origin (local) or
    /// the line at infinity of the plane (infinity).
    pub fn new(mode: Mode) -> Self {
        let (a_log, alpha, self_int) = match mode {
            Mode::Local => (2, -1, -1),
            Mode::Infinity => (-2, 1, 1),
        };
        let (subst_a, subst_b) = match mode {
            Mode::Local => (Subst::RootLocalA, Subst::RootLocalB),
            Mode::Infinity => (Subst::RootInfA, Subst::RootInfB),
        };
        let chart_a = Chart {
            id: 0,
            parent: None,
            subst: subst_a,
            u_prime: 0,
            v_axis: VAxis::Curvette,
            crossings: vec![],
        };
        let chart_b = Chart {
            id: 1,
            parent: None,
            subst: subst_b,
            u_prime: 0,
            v_axis: VAxis::Curvette,
            crossings: vec![],
        };
        BlowupSeq {
            mode,
            steps: vec![],
            primes: vec![Prime {
                id: 0,
                b: BigInt::from(1),
                a_log: BigInt::from(a_log),
                alpha: BigInt::from(alpha),
                chart: 0,
                alt_chart: Some(1),
            }],
            charts: vec![chart_a, chart_b],
            pairs: vec![],
            matrix: vec![vec![BigInt::from(self_int)]],
            gram: vec![vec![BigInt::from(alpha)]],
            blown: vec![],
            curves: vec![],
            cache: ChartCache::default(),
        }
    }

    pub fn root(&self) -> PrimeId {
        0
    }

    pub fn num_primes(&self) -> usize {
        self.primes.len()
    }

    pub fn chart(&self, id: ChartId) -> &Chart {
        &self.charts[id]
    }

    pub fn prime(&self, id: PrimeId) -> &Prime {
        &self.primes[id]
    }

    pub fn pair_between(&self, a: PrimeId, b: PrimeId) -> Option<&Pair> {
        self.pairs.iter().find(|p| p.joins(a, b))
    }

    pub fn is_blown(&self, chart: ChartId, coord: &BigRational) -> bool {
        self.blown.iter().any(|(c, x)| *c == chart && x == coord)
    }

    /// Forward maps of a chart, computed lazily.
    pub fn fwd(&self, id: ChartId) -> ChartFwd {
        if let Some(hit) = self.cache.fwd.lock().unwrap().get(&id) {
            return hit.clone();
        }
        let chart = &self.charts[id];
        let value = match chart.parent {
            None => root_fwd(&chart.subst),
            Some(parent) => {
                let parent_fwd = self.fwd(parent);
                let (a, b) = chart.subst.images().expect("child chart");
                pullback_fwd(&parent_fwd, &a, &b)
            }
        };
        self.cache
            .fwd
            .lock()
            .unwrap()
            .insert(id, value.clone());
        value
    }

    /// Inverse maps of a chart: `(u(z1,z2), v(z1,z2))`, computed lazily in
    /// factored form.
    pub fn inv(&self, id: ChartId) -> (RatFn, RatFn) {
        if let Some(hit) = self.cache.inv.lock().unwrap().get(&id) {
            return hit.clone();
        }
        let chart = &self.charts[id];
        let value = match chart.parent {
            None => root_inv(&chart.subst),
            Some(parent) => {
                let (pu, pv) = self.inv(parent);
                child_inv(&chart.subst, &pu, &pv)
            }
        };
        self.cache
            .inv
            .lock()
            .unwrap()
            .insert(id, value.clone());
        value
    }

    /// Applies one blowup step, returning the extended sequence.
    pub fn apply_blowup(&self, step: BlowupStep) -> Result<BlowupSeq> {
        let mut next = self.clone();
        match &step {
            BlowupStep::Free { parent, at } => {
                if *parent >= next.primes.len() {
                    return Err(Error::InvalidStep(format!("no prime E{parent}")));
                }
                if matches!(at, FreePoint::RootAlt) && *parent != 0 {
                    return Err(Error::InvalidStep(
                        "alternate chart point exists only on the root".into(),
                    ));
                }
                next.blow_free(*parent, at)?;
                next.steps.push(step.clone());
            }
            BlowupStep::Satellite { pair } => {
                next.blow_satellite(*pair)?;
                next.steps.push(step);
            }
        }
        Ok(next)
    }

    pub fn mark_curve(&mut self, curve: MarkedCurve) {
        if !self.curves.iter().any(|c| c.poly == curve.poly) {
            self.curves.push(curve);
        }
    }

    fn blow_free(&mut self, parent: PrimeId, at: &FreePoint) -> Result<()> {
        let (chart_id, c) = match at {
            FreePoint::Coord(c) => (self.primes[parent].chart, c.clone()),
            FreePoint::RootAlt => {
                let alt = self.primes[parent]
                    .alt_chart
                    .ok_or_else(|| Error::InvalidStep("prime has no alternate chart".into()))?;
                (alt, BigRational::zero())
            }
        };
        if self.charts[chart_id].crossing_at(&c).is_some() {
            return Err(Error::InvalidStep(format!(
                "point v={c} on E{parent} is a satellite point"
            )));
        }
        if self.is_blown(chart_id, &c) {
            return Err(Error::InvalidStep(format!(
                "point v={c} on E{parent} was already blown up"
            )));
        }
        let new_id = self.primes.len();
        let chart1 = Chart {
            id: self.charts.len(),
            parent: Some(chart_id),
            subst: Subst::FreeMain(c.clone()),
            u_prime: new_id,
            v_axis: VAxis::Curvette,
            crossings: vec![],
        };
        let chart2 = Chart {
            id: self.charts.len() + 1,
            parent: Some(chart_id),
            subst: Subst::FreePair(c.clone()),
            u_prime: new_id,
            v_axis: VAxis::Prime(parent),
            crossings: vec![],
        };
        let c1 = chart1.id;
        let c2 = chart2.id;
        self.charts.push(chart1);
        self.charts.push(chart2);
        self.charts[chart_id].crossings.push((c.clone(), new_id));
        self.blown.push((chart_id, c));

        let p = &self.primes[parent];
        let prime = Prime {
            id: new_id,
            b: p.b.clone(),
            a_log: &p.a_log + BigInt::one(),
            alpha: &p.alpha - BigInt::one(),
            chart: c1,
            alt_chart: None,
        };
        self.primes.push(prime);
        self.pairs.push(Pair {
            u: new_id,
            v: parent,
            chart: c2,
        });
        self.extend_matrices(&[parent]);
        Ok(())
    }

    fn blow_satellite(&mut self, (a, b): (PrimeId, PrimeId)) -> Result<()> {
        let pair_pos = self
            .pairs
            .iter()
            .position(|p| p.joins(a, b))
            .ok_or_else(|| Error::InvalidStep(format!("primes E{a} and E{b} do not intersect")))?;
        let pair = self.pairs[pair_pos];
        let (i, j) = (pair.u, pair.v);
        let new_id = self.primes.len();

        let chart1 = Chart {
            id: self.charts.len(),
            parent: Some(pair.chart),
            subst: Subst::SatMain,
            u_prime: new_id,
            v_axis: VAxis::Prime(j),
            crossings: vec![],
        };
        let chart2 = Chart {
            id: self.charts.len() + 1,
            parent: Some(pair.chart),
            subst: Subst::SatPair,
            u_prime: new_id,
            v_axis: VAxis::Prime(i),
            crossings: vec![],
        };
        let c1 = chart1.id;
        let c2 = chart2.id;
        self.charts.push(chart1);
        self.charts.push(chart2);
        self.blown.push((pair.chart, BigRational::zero()));

        // the blown point separates i and j; crossing markers between them
        // now point at the child
        for chart in &mut self.charts {
            if chart.u_prime == i {
                for (_, q) in chart.crossings.iter_mut() {
                    if *q == j {
                        *q = new_id;
                    }
                }
            }
            if chart.u_prime == j {
                for (_, q) in chart.crossings.iter_mut() {
                    if *q == i {
                        *q = new_id;
                    }
                }
            }
        }

        let (pi, pj) = (&self.primes[i], &self.primes[j]);
        let cross = self.gram[i][j].clone();
        let prime = Prime {
            id: new_id,
            b: &pi.b + &pj.b,
            a_log: &pi.a_log + &pj.a_log,
            alpha: &pi.alpha + &pj.alpha + BigInt::from(2) * cross - BigInt::one(),
            chart: c1,
            alt_chart: None,
        };
        self.primes.push(prime);
        self.pairs.remove(pair_pos);
        self.pairs.push(Pair {
            u: new_id,
            v: j,
            chart: c1,
        });
        self.pairs.push(Pair {
            u: new_id,
            v: i,
            chart: c2,
        });
        self.extend_matrices(&[i, j]);
        Ok(())
    }

    /// Grows the intersection and dual Gram matrices by one prime blown up
    /// at a point lying on `parents`.
    fn extend_matrices(&mut self, parents: &[PrimeId]) {
        let n = self.matrix.len();
        for row in self.matrix.iter_mut() {
            row.push(BigInt::zero());
        }
        let mut new_row = vec![BigInt::zero(); n + 1];
        new_row[n] = BigInt::from(-1);
        for &p in parents {
            self.matrix[p][p] -= BigInt::one();
            self.matrix[p][n] = BigInt::one();
            new_row[p] = BigInt::one();
        }
        if let [i, j] = *parents {
            // blowing the intersection point separates the strict transforms
            self.matrix[i][j] = BigInt::zero();
            self.matrix[j][i] = BigInt::zero();
        }
        self.matrix.push(new_row);

        // dual Gram: G'_{kn} = Σ_parents G_{kp}; G'_{nn} = Σ α_p + 2·cross − 1
        let mut col = vec![BigInt::zero(); n];
        for (k, slot) in col.iter_mut().enumerate() {
            for &p in parents {
                *slot += &self.gram[k][p];
            }
        }
        let corner = match parents {
            [p] => &self.gram[*p][*p] - BigInt::one(),
            [p, q] => {
                &self.gram[*p][*p] + &self.gram[*q][*q] + BigInt::from(2) * &self.gram[*p][*q]
                    - BigInt::one()
            }
            _ => unreachable!("blowups have one or two parents"),
        };
        for (k, val) in col.iter().enumerate() {
            self.gram[k].push(val.clone());
        }
        let mut grow = col;
        grow.push(corner);
        self.gram.push(grow);
    }

    /// Exact intersection data with dual divisors.
    pub fn intersection_data(&self) -> IntersectionData {
        let n = self.matrix.len();
        let dual: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.gram[j][i].clone()).collect())
            .collect();
        IntersectionData {
            matrix: self.matrix.clone(),
            dual,
        }
    }

    /// Tightness test per prime: `A(v_E) ≤ 0 ≤ α(v_E)`. Infinity mode only.
    pub fn is_tight(&self) -> Result<Vec<bool>> {
        if self.mode != Mode::Infinity {
            return Err(Error::Precondition(
                "tightness is defined at infinity".into(),
            ));
        }
        Ok(self
            .primes
            .iter()
            .map(|p| p.a_log <= BigInt::zero() && p.alpha >= BigInt::zero())
            .collect())
    }
}
