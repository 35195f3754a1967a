use std::fmt;

/// Errors surfaced by the exact-arithmetic and resolution machinery.
///
/// `IrrationalBasePoint` and friends mark inputs the rational ground field
/// cannot host exactly; drivers report them instead of approximating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// `pa_envelope` was given no forms.
    NoForms,
    /// `solve_fixed` needs rational piece coefficients.
    IrrationalCoefficients,
    /// The lattice action has no real eigenvalue ≥ 1.
    NotExpansionFactor,
    /// A resolution step needs a base point with irrational coordinates.
    IrrationalBasePoint(String),
    /// Step budget exhausted before the procedure terminated.
    BudgetExhausted(String),
    /// A blowup step referenced a dead prime or a non-intersecting pair.
    InvalidStep(String),
    /// Marked curve not yet resolved to a free transverse point.
    UnresolvedCurve(String),
    /// A driver precondition failed (mode mismatch, non-dominant map, ...).
    Precondition(String),
    /// Green/Poisson machinery was given a signed measure.
    SignedMeasure,
    /// Text input did not parse.
    Parse(String),
    /// A factor could not be certified irreducible over ℚ.
    FactorUnknown(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NoForms => write!(f, "no forms"),
            Error::IrrationalCoefficients => write!(f, "irrational piece coefficients"),
            Error::NotExpansionFactor => write!(f, "not an expansion factor"),
            Error::IrrationalBasePoint(s) => {
                write!(f, "irrational base point (ground field Q too small): {s}")
            }
            Error::BudgetExhausted(s) => write!(f, "step budget exhausted: {s}"),
            Error::InvalidStep(s) => write!(f, "invalid blowup step: {s}"),
            Error::UnresolvedCurve(s) => write!(f, "resolve first: {s}"),
            Error::Precondition(s) => write!(f, "precondition failed: {s}"),
            Error::SignedMeasure => write!(f, "positive measures only"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::FactorUnknown(s) => write!(f, "factorization over Q unknown: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
