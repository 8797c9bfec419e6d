use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("negative entry {value} at {index}")]
    NegativeEntry { index: String, value: f64 },
    #[error("proposal row {row} sums to {sum}, expected 1")]
    RowSum { row: usize, sum: f64 },
    #[error("target has no state with positive mass")]
    EmptyTarget,
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("autoregressive coefficient must lie in (0, 1), got {0}")]
    BadArCoefficient(f64),
    #[error("degenerate pair ({x}, {y}): zero mass in both directions")]
    DegeneratePair { x: String, y: String },
    #[error("current state {0} has zero target mass")]
    ZeroMassState(String),
    #[error("Hastings condition violated at ({x}, {y}): alpha = {alpha}")]
    HastingsCondition { x: String, y: String, alpha: f64 },
    #[error("Stein condition violated at ({x}, {y}): delta / (p(x) gamma(y|x)) = {ratio}")]
    SteinCondition { x: String, y: String, ratio: f64 },
    #[error("not a majorizer at ({x}, {y}): M = {value} < H = {bound}")]
    NotMajorizer {
        x: String,
        y: String,
        value: f64,
        bound: f64,
    },
    #[error("not a minorizer at ({x}, {y}): m = {value} > L = {bound}")]
    NotMinorizer {
        x: String,
        y: String,
        value: f64,
        bound: f64,
    },
    #[error("parameter with role {found} does not fit rule {rule}")]
    RoleMismatch {
        rule: &'static str,
        found: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("proposal is not independent of the current state")]
    ProposalNotIndependent,
    #[error("majorization violated at state {index}: M * gamma = {bound} < p = {mass}")]
    MajorizationViolated {
        index: usize,
        bound: f64,
        mass: f64,
    },
    #[error("minorization violated at state {index}: m * gamma = {bound} > p = {mass}")]
    MinorizationViolated {
        index: usize,
        bound: f64,
        mass: f64,
    },
    #[error("chain length must be at least 1")]
    EmptyChain,
    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("kernel is reducible or degenerate")]
    DegenerateKernel,
    #[error("state count {0} exceeds the tabulation bound 4096")]
    TooLarge(usize),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
