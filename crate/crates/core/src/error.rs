use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("domain is not admissible")]
    NotAdmissible,
    #[error("operation needs a bounded polygon domain")]
    UnboundedDomain,
    #[error("point {0} is outside the domain")]
    OutsideDomain(String),
    #[error("point {0} is not in the interior of the domain")]
    NotInterior(String),
    #[error("compact set touches the boundary of the domain")]
    DistanceZero,
    #[error("direction {0} lies outside the corner cone")]
    BadDirection(String),
    #[error("blow-up removes more than the chosen corner")]
    TooLarge,
    #[error("monomial {0} has no finite canonical coefficient on this domain")]
    UnboundedMonomial(String),
    #[error("series are defined on different domains")]
    DomainMismatch,
    #[error("no monomial vanishes on side {0}")]
    BoundaryMismatch(usize),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("increment must be nonnegative")]
    NegativeIncrement,
    #[error("not a vertex of the curve")]
    NotAVertex,
    #[error("side {0} of the face has an endpoint that is not a smooth vertex")]
    UnclassifiableSide(usize),
    #[error("level set is empty or has no interior")]
    EmptyLevelSet,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("epsilon too large: {0}")]
    EpsilonTooLarge(String),
    #[error("quasi-degree is not nice")]
    NotNice,
    #[error("polygon is not unimodular")]
    NotUnimodular,
    #[error("certification failed at step {step}: {reason}")]
    CertificationFailed { step: usize, reason: String },
    #[error("zero polynomial")]
    ZeroPolynomial,
}
