use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field contains a non-finite value at sample {index}")]
    NonFinite { index: usize },

    /// The total control Rabi frequency vanishes where it is needed, so the
    /// bright/dark decomposition (and adiabaticity) breaks down.
    #[error("total control Rabi frequency vanishes at sample ({i}, {j})")]
    ZeroControlField { i: usize, j: usize },

    #[error("step too large: {0}")]
    StepTooLarge(String),

    #[error("transverse diffraction in time stepping needs a uniform group velocity")]
    NonUniformGroupVelocity,

    #[error("phase undefined on the sampling circle of radius {radius}")]
    AmplitudeTooSmall { radius: f64 },

    #[error("winding sum is not close to an integer (residual {residual})")]
    WindingNotInteger { residual: f64 },

    #[error("exponential integral only defined here for negative arguments, got {0}")]
    EiDomain(f64),

    #[error("analytic loss law needs sigma_r == sigma_r3 (got {sigma_r} and {sigma_r3})")]
    WidthMismatch { sigma_r: f64, sigma_r3: f64 },

    #[error("adaptive quadrature did not converge (estimate {estimate}, error {error})")]
    QuadratureNonConvergent { estimate: f64, error: f64 },

    #[error("grid too coarse: {fraction:.3} of the power sits in the outer band")]
    GridTooCoarse { fraction: f64 },

    #[error("malformed field dump: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
