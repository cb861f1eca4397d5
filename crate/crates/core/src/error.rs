use thiserror::Error;

use crate::series::HalfInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error(
        "term (t^{n}, q^{exponent}) lies outside the window t<={t_max}, q in [{q_min}, {q_max}]"
    )]
    OutsideWindow {
        n: usize,
        exponent: HalfInt,
        t_max: usize,
        q_min: HalfInt,
        q_max: HalfInt,
    },
    #[error(
        "term (t^{n}, q^{exponent}) fell below the window floor q >= {q_min}; widen the window"
    )]
    BelowWindow {
        n: usize,
        exponent: HalfInt,
        q_min: HalfInt,
    },
    #[error(
        "coefficient of t^{n} q^{exponent} lies in the truncated region (known up to {known})"
    )]
    TruncatedRegion {
        n: usize,
        exponent: HalfInt,
        known: String,
    },
    #[error("incompatible truncation windows: {0}")]
    PolicyMerge(String),
    #[error("not a unit for geometric inversion: {0}")]
    NotUnit(String),
    #[error("series has a nonzero t^0 part")]
    NonzeroConstantPart,
    #[error("Adams operation of order {0} is undefined")]
    BadAdamsOrder(usize),
    #[error(
        "internal consistency failure: non-integral coefficient {coeff} at t^{n} q^{exponent}"
    )]
    NonIntegral {
        n: usize,
        exponent: HalfInt,
        coeff: String,
    },
    #[error("cannot expand {0} as a series in the declared window direction")]
    Expansion(String),
    #[error("malformed serialized series: {0}")]
    Format(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size {0} exceeds the supported table size")]
    FieldTooLarge(u64),
    #[error("enumeration budget exceeded: {needed} > {budget} ({what})")]
    Budget {
        what: String,
        needed: u128,
        budget: u128,
    },
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("central element must be an invertible scalar matrix")]
    BadCentral,
    #[error("symbolic count is not a polynomial: {0}")]
    NonPolynomial(String),
    #[error("not polynomial at tested degree: {0}")]
    Interpolation(String),
    #[error("character data fails a sanity identity: {0}")]
    CharacterData(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("arrow endpoint {0} is not a vertex")]
    BadVertex(usize),
    #[error("dimension vector has {got} entries, quiver has {expected} vertices")]
    DimMismatch { expected: usize, got: usize },
    #[error("Serre exponent precondition violated: symmetrized form is {0} > 0")]
    PositiveForm(i64),
    #[error(transparent)]
    Count(#[from] CountError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("check precondition: {0}")]
    Precondition(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("filtration table inconsistent: {0}")]
    Table(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Count(#[from] CountError),
}
