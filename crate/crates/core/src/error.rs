use thiserror::Error;

/// Errors produced by the forecasting toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForecastError {
    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input carries no usable signal (constant series, zero mean, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A derived structure is internally inconsistent.
    #[error("corrupt structure: {0}")]
    CorruptStructure(String),

    /// A square system is singular to working precision.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// A model component failed to fit; the component is named.
    #[error("{component} fit failed: {source}")]
    Component {
        component: &'static str,
        #[source]
        source: Box<ForecastError>,
    },
}

impl ForecastError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Self::DegenerateInput(msg.into())
    }

    pub(crate) fn in_component(self, component: &'static str) -> Self {
        Self::Component {
            component,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, ForecastError>;
