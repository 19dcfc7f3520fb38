use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{requested} qubits requested, limit is {limit}")]
    QubitCap { requested: usize, limit: usize },

    #[error("qubit {site} out of range for a {n}-qubit register")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateSite(usize),

    #[error("{name} = {value} is not a valid probability")]
    Probability { name: &'static str, value: f64 },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("Kraus operators violate completeness (max deviation {0:e})")]
    Incomplete(f64),

    #[error("channel acts on {arity} qubits but {sites} sites were given")]
    Arity { arity: usize, sites: usize },

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("invalid noise specification: {0}")]
    Noise(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("target {target} is outside the attainable range [{lo}, {hi}]")]
    OutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("readout response matrix is near-singular (1 - q0 - q1 = {0})")]
    SingularReadout(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) | Error::NotHermitian(_) | Error::Incomplete(_) => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
