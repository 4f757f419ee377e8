use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: operators must be square with dim >= 2")]
    InvalidDimension(usize),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("operator is not Hermitian: deviation {deviation:e} exceeds {limit:e}")]
    NotHermitian { deviation: f64, limit: f64 },

    #[error("density matrix trace {trace} differs from 1 by more than {limit:e}")]
    TraceNotUnit { trace: f64, limit: f64 },

    #[error("density matrix has eigenvalue {value:e} below {limit:e}")]
    NegativeEigenvalue { value: f64, limit: f64 },

    #[error(
        "Hermitian eigensolver did not converge (dim {dim}, frobenius norm {frobenius_norm:e}, \
         max off-diagonal {max_off_diagonal:e})"
    )]
    EigenFailure {
        dim: usize,
        frobenius_norm: f64,
        max_off_diagonal: f64,
    },

    #[error("dissipator {index} has negative or non-finite rate {rate}")]
    NegativeRate { index: usize, rate: f64 },

    #[error("step size {step:e} fell below minimum {min_step:e} at t = {t}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },

    #[error("step limit of {max_steps} reached at t = {t}")]
    StepLimit { t: f64, max_steps: usize },

    #[error("state invariant violated at t = {t}: {what} = {value:e} (limit {limit:e})")]
    InvariantViolation {
        t: f64,
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("invalid time span [{t0}, {t1}]")]
    InvalidTimeSpan { t0: f64, t1: f64 },

    #[error("invalid integrator control: {0}")]
    InvalidControl(String),

    #[error(
        "eigenbasis motion ill-defined at degeneracy: levels {j},{k} have gap {gap:e} but \
         generator coherence {leak:e} (t = {t})"
    )]
    DegenerateCoherence {
        t: f64,
        j: usize,
        k: usize,
        gap: f64,
        leak: f64,
    },

    #[error("eigenvalue {index} leaves the simplex: lambda = {lambda:e}, rate = {rate:e}")]
    SimplexExit { index: usize, lambda: f64, rate: f64 },

    #[error("non-finite value in spectral frame at t = {t}")]
    NonFiniteFrame { t: f64 },

    #[error("Bloch vector is zero: unit vector undefined")]
    ZeroBlochVector,

    #[error("Bloch vector norm {norm} exceeds 1")]
    OutsideBlochBall { norm: f64 },

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("channel `{channel}` is missing parameter `{param}`")]
    MissingParam { channel: String, param: String },

    #[error("invalid parameter `{param}`: {reason}")]
    InvalidParam { param: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
