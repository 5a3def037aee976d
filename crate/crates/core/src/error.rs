use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("polynomial is reducible over Q (factor of degree {degree})")]
    ReduciblePolynomial { degree: usize },
    #[error("field discriminant unknown: Z[x]/(f) is not maximal at p = {prime} and no discriminant was supplied")]
    UnknownDiscriminant { prime: u64 },
    #[error("supplied discriminant {supplied} is incompatible with polynomial discriminant {disc_f}")]
    InconsistentDiscriminant { supplied: u64, disc_f: i128 },
    #[error("p = {0} may divide the index [O_K : Z[x]]; its splitting type is not available")]
    IndexDivisor(u64),
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("permutation group is not transitive")]
    IntransitiveGroup,
    #[error("permutation group has more than {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("argument {requested} exceeds the table range {available}")]
    RangeExceeded { requested: f64, available: u64 },
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
    #[error("Laurent extrapolation unstable for c[{index}] (error estimate {estimate:e})")]
    ExtrapolationUnstable { index: usize, estimate: f64 },
    #[error("Laurent expansion has {have} coefficients, {needed} needed")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("quadrature step {step} exceeds the admissible maximum {max}")]
    StepTooCoarse { step: f64, max: f64 },
    #[error("prime pool bound {bound} is below the resonator window end {needed}")]
    PoolTooSmall { bound: u64, needed: f64 },
    #[error("resonator set is empty")]
    EmptyResonator,
    #[error("X = {0} is too small: log log log X must be positive")]
    XTooSmall(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}
