use thiserror::Error;

use crate::arith::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent argument {0} outside (0, 1]")]
    ExpArgumentOutOfRange(Rational),
    #[error("enclosure width bound must be positive, got {0}")]
    NonPositiveWidth(Rational),
    #[error("invalid enclosure: lo {lo} > hi {hi}")]
    InvalidEnclosure { lo: Box<Rational>, hi: Box<Rational> },
    #[error("negative measure value {0}")]
    NegativeMeasure(Rational),
    #[error("operands belong to different base models")]
    ModelMismatch,
    #[error("operation requires the Bernoulli model")]
    NotBernoulli,
    #[error("support of {support} coordinates exceeds the lowering cap {cap}")]
    LoweringCapExceeded { support: usize, cap: usize },
    #[error("malformed set: {0}")]
    InvalidSet(String),
    #[error("no majority set with n <= {cap} reaches slack {slack}")]
    SearchCapExceeded { cap: u64, slack: Rational },
    #[error("rectangles do not share a tail context")]
    TailMismatch,
    #[error("piece {piece} is not contained in the bounding rectangle at coordinate {coord}")]
    ContainmentViolation { piece: usize, coord: usize },
    #[error("bounding rectangle has a null factor at coordinate {coord}")]
    ZeroMeasureFactor { coord: usize },
    #[error("depth {depth} cannot host the {needed} controlled factors required")]
    DepthTooSmall { needed: usize, depth: usize },
    #[error("base set must have measure exactly 1/2, got {0}")]
    MeasureNotHalf(Rational),
    #[error("family size {n} exceeds cap {cap}")]
    FamilyTooLarge { n: u32, cap: u32 },
    #[error("group element {g} lies outside the certified window of radius {m}")]
    OutsideCertifiedWindow { g: i64, m: u64 },
    #[error("schedule has no entry for (k = {k}, m = {m})")]
    ScheduleIndexOutOfRange { k: usize, m: u64 },
    #[error("precondition violated at index {index}: {reason}")]
    Precondition { index: usize, reason: String },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
