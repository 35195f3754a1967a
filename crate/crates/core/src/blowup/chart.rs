//! Charts of blowup surfaces. A chart is described by the substitution
//! that produced it from its parent chart; the forward maps (affine
//! coordinates in chart variables, with the hosted prime at `{u = 0}`) and
//! the inverse maps (chart variables as rational functions of the affine
//! coordinates) are materialized lazily, since deep towers otherwise pay
//! for polynomial compositions nobody asked for.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::Poly;

pub type PrimeId = usize;
pub type ChartId = usize;

/// A rational function kept in factored form: `coeff · Π num^e / Π den^d`.
/// Factors are nonconstant, graded-lex monic, and deduplicated, so
/// divisions cancel structurally without polynomial gcds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub coeff: BigRational,
    pub num: Vec<(Poly, u64)>,
    pub den: Vec<(Poly, u64)>,
}

impl RatFn {
    pub fn from_poly(p: Poly) -> Self {
        let mut r = RatFn {
            coeff: BigRational::one(),
            num: vec![],
            den: vec![],
        };
        r.push_factor(p, 1, true);
        r
    }

    pub fn one_over(p: Poly) -> Self {
        let mut r = RatFn {
            coeff: BigRational::one(),
            num: vec![],
            den: vec![],
        };
        r.push_factor(p, 1, false);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Adds a factor, splitting off monomial content and normalizing to
    /// graded-lex monic form; cancels against the opposite side.
    fn push_factor(&mut self, p: Poly, mult: u64, numerator: bool) {
        assert!(!p.is_zero(), "zero factor in rational function");
        if mult == 0 {
            return;
        }
        let (m1, m2) = p.min_exponents();
        let mut core = p.shift_down(m1, m2);
        if m1 > 0 {
            self.insert(Poly::var1(), m1 * mult, numerator);
        }
        if m2 > 0 {
            self.insert(Poly::var2(), m2 * mult, numerator);
        }
        if core.is_constant() {
            let c = core.coeff(0, 0);
            self.scale_coeff(&c, mult, numerator);
            return;
        }
        let lead = core.leading_coeff_grlex().expect("nonconstant factor");
        if !lead.is_one() {
            core = core.scale(&lead.recip());
            self.scale_coeff(&lead, mult, numerator);
        }
        self.insert(core, mult, numerator);
    }

    fn scale_coeff(&mut self, c: &BigRational, mult: u64, numerator: bool) {
        let mut acc = BigRational::one();
        for _ in 0..mult {
            acc *= c;
        }
        if numerator {
            self.coeff *= acc;
        } else {
            self.coeff /= acc;
        }
    }

    fn insert(&mut self, p: Poly, mult: u64, numerator: bool) {
        let (this, other) = if numerator {
            (&mut self.num, &mut self.den)
        } else {
            (&mut self.den, &mut self.num)
        };
        // cancel against the other side first
        if let Some(pos) = other.iter().position(|(q, _)| *q == p) {
            let avail = other[pos].1;
            let cancel = avail.min(mult);
            if avail == cancel {
                other.remove(pos);
            } else {
                other[pos].1 -= cancel;
            }
            if mult > cancel {
                Self::add_to(this, p, mult - cancel);
            }
            return;
        }
        Self::add_to(this, p, mult);
    }

    fn add_to(list: &mut Vec<(Poly, u64)>, p: Poly, mult: u64) {
        if let Some(pos) = list.iter().position(|(q, _)| *q == p) {
            list[pos].1 += mult;
        } else {
            list.push((p, mult));
        }
    }

    pub fn div(&self, other: &RatFn) -> RatFn {
        assert!(!other.is_zero(), "division by zero rational function");
        let mut out = self.clone();
        out.coeff = &out.coeff / &other.coeff;
        for (p, e) in &other.num {
            out.push_factor(p.clone(), *e, false);
        }
        for (p, e) in &other.den {
            out.push_factor(p.clone(), *e, true);
        }
        out
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        let mut out = self.clone();
        out.coeff = &out.coeff * &other.coeff;
        for (p, e) in &other.num {
            out.push_factor(p.clone(), *e, true);
        }
        for (p, e) in &other.den {
            out.push_factor(p.clone(), *e, false);
        }
        out
    }

    /// Expands the numerator product (with the scalar coefficient).
    pub fn num_expanded(&self) -> Poly {
        let mut p = Poly::constant(self.coeff.clone());
        for (f, e) in &self.num {
            p = &p * &f.pow(*e);
        }
        p
    }

    /// Expands the denominator product.
    pub fn den_expanded(&self) -> Poly {
        let mut p = Poly::one();
        for (f, e) in &self.den {
            p = &p * &f.pow(*e);
        }
        p
    }

    /// `self − c`, collapsed to a single new numerator factor over the same
    /// denominator.
    pub fn sub_const(&self, c: &BigRational) -> RatFn {
        if c.is_zero() {
            return self.clone();
        }
        let num = &self.num_expanded() - &self.den_expanded().scale(c);
        let mut out = RatFn {
            coeff: BigRational::one(),
            num: vec![],
            den: self.den.clone(),
        };
        if num.is_zero() {
            return RatFn {
                coeff: BigRational::zero(),
                num: vec![],
                den: vec![],
            };
        }
        out.push_factor(num, 1, true);
        out
    }

    /// Value at a point where numerator and denominator are both nonzero.
    pub fn eval(&self, x: &BigRational, y: &BigRational) -> Option<BigRational> {
        let mut acc = self.coeff.clone();
        for (f, e) in &self.num {
            let v = f.eval(x, y);
            if v.is_zero() {
                return None;
            }
            for _ in 0..*e {
                acc *= &v;
            }
        }
        for (f, e) in &self.den {
            let v = f.eval(x, y);
            if v.is_zero() {
                return None;
            }
            for _ in 0..*e {
                acc /= &v;
            }
        }
        Some(acc)
    }
}

/// Which prime (or none) the `{v = 0}` axis of a chart is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VAxis {
    /// `{v = 0}` is a curvette (smooth transverse curve), not a prime.
    Curvette,
    /// `{v = 0}` is the strict transform of a prime.
    Prime(PrimeId),
}

/// How a chart arises from its parent chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subst {
    /// Local root, chart A: `z1 = u, z2 = u·v`.
    RootLocalA,
    /// Local root, chart B: `z1 = u·v, z2 = u`.
    RootLocalB,
    /// Infinity root, chart A: `z1 = 1/u, z2 = v/u`.
    RootInfA,
    /// Infinity root, chart B: `z1 = v/u, z2 = 1/u`.
    RootInfB,
    /// Free blowup at `(0, c)`: `u ↦ u, v ↦ c + u·v` (child's main chart).
    FreeMain(BigRational),
    /// Free blowup at `(0, c)`: `u ↦ u·v, v ↦ c + u` (pair chart with the parent).
    FreePair(BigRational),
    /// Satellite blowup: `u ↦ u, v ↦ u·v` (pair chart with the old v-prime).
    SatMain,
    /// Satellite blowup: `u ↦ u·v, v ↦ u` (pair chart with the old u-prime).
    SatPair,
}

impl Subst {
    /// The substitution images `(u-image, v-image)` in the parent chart's
    /// variables; `None` for root charts.
    pub fn images(&self) -> Option<(Poly, Poly)> {
        let u = Poly::var1();
        let uv = &Poly::var1() * &Poly::var2();
        match self {
            Subst::RootLocalA | Subst::RootLocalB | Subst::RootInfA | Subst::RootInfB => None,
            Subst::FreeMain(c) => Some((u, &Poly::constant(c.clone()) + &uv)),
            Subst::FreePair(c) => Some((uv, &Poly::constant(c.clone()) + &u)),
            Subst::SatMain => Some((u, uv)),
            Subst::SatPair => Some((uv, u)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub id: ChartId,
    pub parent: Option<ChartId>,
    pub subst: Subst,
    /// The prime hosted at `{u = 0}`.
    pub u_prime: PrimeId,
    pub v_axis: VAxis,
    /// Coordinates on `{u = 0}` where other primes cross, recorded as the
    /// blowup sequence grows. These points are satellite, hence not valid
    /// free-blowup centers.
    pub crossings: Vec<(BigRational, PrimeId)>,
}

impl Chart {
    /// Finds the prime crossing `{u = 0}` at coordinate `c`, if any.
    pub fn crossing_at(&self, c: &BigRational) -> Option<PrimeId> {
        if c.is_zero() {
            if let VAxis::Prime(p) = self.v_axis {
                return Some(p);
            }
        }
        self.crossings
            .iter()
            .find(|(x, _)| x == c)
            .map(|&(_, p)| p)
    }
}

/// Root-chart forward maps.
pub fn root_fwd(subst: &Subst) -> ChartFwd {
    let u = Poly::var1();
    let v = Poly::var2();
    match subst {
        Subst::RootLocalA => ChartFwd {
            z1: u.clone(),
            z2: &u * &v,
            den: ChartDen::default(),
        },
        Subst::RootLocalB => ChartFwd {
            z1: &u * &v,
            z2: u,
            den: ChartDen::default(),
        },
        Subst::RootInfA => ChartFwd {
            z1: Poly::one(),
            z2: v,
            den: ChartDen {
                mono: (1, 0),
                units: vec![],
            },
        },
        Subst::RootInfB => ChartFwd {
            z1: v,
            z2: Poly::one(),
            den: ChartDen {
                mono: (1, 0),
                units: vec![],
            },
        },
        _ => panic!("not a root chart"),
    }
}

/// Root-chart inverse maps `(u(z1,z2), v(z1,z2))`.
pub fn root_inv(subst: &Subst) -> (RatFn, RatFn) {
    let z1 = Poly::var1();
    let z2 = Poly::var2();
    match subst {
        Subst::RootLocalA => (
            RatFn::from_poly(z1.clone()),
            RatFn::from_poly(z2).div(&RatFn::from_poly(z1)),
        ),
        Subst::RootLocalB => (
            RatFn::from_poly(z2.clone()),
            RatFn::from_poly(z1).div(&RatFn::from_poly(z2)),
        ),
        Subst::RootInfA => (
            RatFn::one_over(z1.clone()),
            RatFn::from_poly(z2).div(&RatFn::from_poly(z1)),
        ),
        Subst::RootInfB => (
            RatFn::one_over(z2.clone()),
            RatFn::from_poly(z1).div(&RatFn::from_poly(z2)),
        ),
        _ => panic!("not a root chart"),
    }
}

/// Inverse maps of a child chart from the parent's inverse maps.
pub fn child_inv(subst: &Subst, parent_u: &RatFn, parent_v: &RatFn) -> (RatFn, RatFn) {
    match subst {
        Subst::FreeMain(c) => {
            let shifted = parent_v.sub_const(c);
            (parent_u.clone(), shifted.div(parent_u))
        }
        Subst::FreePair(c) => {
            let shifted = parent_v.sub_const(c);
            (shifted.clone(), parent_u.div(&shifted))
        }
        Subst::SatMain => (parent_u.clone(), parent_v.div(parent_u)),
        Subst::SatPair => (parent_v.clone(), parent_u.div(parent_v)),
        _ => panic!("root charts have no parent"),
    }
}

/// The forward map of a chart: affine coordinates as fractions
/// `num / (u^a v^b · Π units^e)` over the chart variables. The unit
/// factors are strict transforms of other primes passing through the
/// chart; they never vanish identically on either axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartFwd {
    pub z1: Poly,
    pub z2: Poly,
    pub den: ChartDen,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChartDen {
    pub mono: (u64, u64),
    pub units: Vec<(Poly, u64)>,
}

impl ChartDen {
    /// The denominator expanded as a polynomial.
    pub fn expand(&self) -> Poly {
        let mut p = Poly::monomial(self.mono.0, self.mono.1, BigRational::one());
        for (f, e) in &self.units {
            p = &p * &f.pow(*e);
        }
        p
    }

    fn push_unit(&mut self, p: Poly, mult: u64) {
        if mult == 0 || p.is_constant() {
            return;
        }
        if let Some(slot) = self.units.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += mult;
        } else {
            self.units.push((p, mult));
        }
    }
}

/// Substitutes `u ↦ a(u,v), v ↦ b(u,v)` into a chart forward map. Monomial
/// parts of the substituted denominator factors stay monomial; the rest
/// become unit factors, and scalar content rescales the numerators.
pub fn pullback_fwd(m: &ChartFwd, a: &Poly, b: &Poly) -> ChartFwd {
    let mut den = ChartDen::default();
    let mut scale = BigRational::one();
    let mut push_den_power = |den: &mut ChartDen, scale: &mut BigRational, img: &Poly, exp: u64| {
        if exp == 0 {
            return;
        }
        let (m1, m2) = img.min_exponents();
        den.mono.0 += m1 * exp;
        den.mono.1 += m2 * exp;
        let unit = img.shift_down(m1, m2);
        if unit.is_constant() {
            let c = unit.coeff(0, 0);
            *scale *= c.pow(exp as i32);
        } else {
            den.push_unit(unit, exp);
        }
    };
    push_den_power(&mut den, &mut scale, a, m.den.mono.0);
    push_den_power(&mut den, &mut scale, b, m.den.mono.1);
    for (f, e) in &m.den.units {
        let img = f.substitute(a, b);
        push_den_power(&mut den, &mut scale, &img, *e);
    }
    let inv = scale.recip();
    ChartFwd {
        z1: m.z1.substitute(a, b).scale(&inv),
        z2: m.z2.substitute(a, b).scale(&inv),
        den,
    }
}
