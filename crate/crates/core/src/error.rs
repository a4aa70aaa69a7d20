//! Error type shared by every module of the crate.

/// Everything that can go wrong when an operation leaves its domain.
///
/// `At` wraps an inner error with the path of the expression node that
/// produced it, so callers can report which subexpression failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("actor quaternion is zero")]
    ZeroActor,
    #[error("quaternions commute, commutator conjugation is undefined")]
    Commuting,
    #[error("4x4 real system is singular (the function vanishes on the orbit)")]
    SingularSystem,
    #[error("logarithm branch cut: input on the closed negative real axis")]
    BranchCut,
    #[error("skew polynomial twists do not match")]
    TwistMismatch,
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("operation requires real coefficients")]
    NonRealCoefficients,
    #[error("orbit data invalid: norm {norm} is below |re| = {re}")]
    InvalidOrbit { re: f64, norm: f64 },
    #[error("slice plane requires a nonzero purely imaginary direction")]
    InvalidSlicePlane,
    #[error("point lies on a pole orbit")]
    PoleOrbit,
    #[error("point lies in the excluded image set of the inverse map")]
    ExcludedImagePoint,
    #[error("orbit is trivial (a real point)")]
    TrivialOrbit,
    #[error("point is real, operation needs a nontrivial imaginary part")]
    RealPoint,
    #[error("orbital witnesses disagree by {0:.3e}; function is not skew convex on this orbit")]
    WitnessDisagreement(f64),
    #[error("difference-quotient limit did not stabilize (spread {0:.3e})")]
    NoLimit(f64),
    #[error("finite-difference step underflows the base point")]
    StepUnderflow,
    #[error("point outside the series convergence region")]
    OutsideRegion,
    #[error("expansion point violates |P_O(p)| < |P_O(q)|")]
    OutsideAnnulus,
    #[error("contour winding is not +1 around a required slice point")]
    BadWinding,
    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
    #[error("{kind} (at expression node '{path}')")]
    At { path: String, kind: Box<Error> },
}

impl Error {
    /// Prefix `segment` onto the expression path carried by this error.
    pub fn at(self, segment: &str) -> Error {
        match self {
            Error::At { path, kind } => Error::At {
                path: format!("{segment}/{path}"),
                kind,
            },
            other => Error::At {
                path: segment.to_string(),
                kind: Box::new(other),
            },
        }
    }

    /// The underlying error with any path wrapper stripped.
    pub fn kind(&self) -> &Error {
        match self {
            Error::At { kind, .. } => kind.kind(),
            other => other,
        }
    }

    /// Expression path, if this error was produced during evaluation.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::At { path, .. } => Some(path),
            _ => None,
        }
    }

    /// Stable machine-readable name for reports.
    pub fn kind_name(&self) -> &'static str {
        match self.kind() {
            Error::ZeroActor => "ZeroActor",
            Error::Commuting => "Commuting",
            Error::SingularSystem => "SingularSystem",
            Error::BranchCut => "BranchCut",
            Error::TwistMismatch => "TwistMismatch",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::NonRealCoefficients => "NonRealCoefficients",
            Error::InvalidOrbit { .. } => "InvalidOrbit",
            Error::InvalidSlicePlane => "InvalidSlicePlane",
            Error::PoleOrbit => "PoleOrbit",
            Error::ExcludedImagePoint => "ExcludedImagePoint",
            Error::TrivialOrbit => "TrivialOrbit",
            Error::RealPoint => "RealPoint",
            Error::WitnessDisagreement(_) => "WitnessDisagreement",
            Error::NoLimit(_) => "NoLimit",
            Error::StepUnderflow => "StepUnderflow",
            Error::OutsideRegion => "OutsideRegion",
            Error::OutsideAnnulus => "OutsideAnnulus",
            Error::BadWinding => "BadWinding",
            Error::UnknownSuite(_) => "UnknownSuite",
            Error::InvalidExpr(_) => "InvalidExpr",
            Error::At { .. } => unreachable!("kind() strips At"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
